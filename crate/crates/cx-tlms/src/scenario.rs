//! Synthetic transmitter-harmonics identification benchmark.
//!
//! The interference to identify is a saturated power-amplifier
//! nonlinearity `x^2 / (1 + |x|)` driven by colored complex noise,
//! filtered through a synthesized duplexer stop-band impulse response
//! and observed under additive complex Gaussian noise:
//!
//! ```text
//! y_n = h_dup' z_n + eta_n,   z_n = [pa(x_n), ..., pa(x_{n-P+1})]
//! ```
//!
//! Estimators are driven by `(x_n, y_n)` and scored against the
//! noiseless `d_n = h_dup' z_n` with a run-averaged MSE in dB.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arch::ArchKind;
use crate::error::{Error, Result};

/// Lowest reportable MSE level; zero error maps here instead of -inf.
pub const MSE_DB_FLOOR: f64 = -320.0;

/// One value per estimator architecture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerArch<T> {
    pub tlms2r: T,
    pub ttlms: T,
    pub ctlms: T,
}

impl<T: Copy> PerArch<T> {
    pub fn get(&self, kind: ArchKind) -> T {
        match kind {
            ArchKind::Tlms2r => self.tlms2r,
            ArchKind::Ttlms => self.ttlms,
            ArchKind::Ctlms => self.ctlms,
        }
    }

    pub fn set(&mut self, kind: ArchKind, value: T) {
        match kind {
            ArchKind::Tlms2r => self.tlms2r = value,
            ArchKind::Ttlms => self.ttlms = value,
            ArchKind::Ctlms => self.ctlms = value,
        }
    }
}

/// Generation and adaptation parameters for the benchmark scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Filter order P: duplexer taps, delay-line depth, LMS length.
    pub filter_order: usize,
    /// Tensor rank R.
    pub rank: usize,
    /// Tensor order M; the complex architectures require 2.
    pub tensor_order: usize,
    /// Lookup bins per mode.
    pub n_bins: usize,
    /// Discretization interval.
    pub delta_x: f64,
    /// AR(1) coefficient of the colored excitation, in `[0, 1)`.
    pub ar_coeff: f64,
    /// Signal-to-noise ratio of `d` over `eta` in dB; `inf` disables
    /// the observation noise.
    pub snr_db: f64,
    /// Samples per run.
    pub n_samples: usize,
    /// Monte-Carlo runs (independent duplexer/noise seeds).
    pub n_runs: usize,
    /// Normalized tensor step size per architecture.
    pub mu_tensor: PerArch<f64>,
    /// LMS step size per architecture.
    pub mu_lms: PerArch<f64>,
    /// Normalization regularizer for all step-size denominators.
    pub epsilon: f64,
    /// Master seed; every run derives its own streams from it.
    pub master_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            filter_order: 16,
            rank: 10,
            tensor_order: 2,
            n_bins: 32,
            delta_x: 8.0 / 32.0,
            ar_coeff: 0.9,
            snr_db: 10.0,
            n_samples: 100_000,
            n_runs: 20,
            mu_tensor: PerArch {
                tlms2r: 0.009,
                ttlms: 0.009,
                ctlms: 0.075,
            },
            mu_lms: PerArch {
                tlms2r: 0.009,
                ttlms: 0.005,
                ctlms: 0.009,
            },
            epsilon: 1e-12,
            master_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_order == 0 || self.rank == 0 {
            return Err(Error::Config("filter order and rank must be positive".into()));
        }
        if self.tensor_order != 2 {
            return Err(Error::Config(
                "the complex architectures require tensor order 2".into(),
            ));
        }
        if self.n_bins == 0 || !self.n_bins.is_multiple_of(2) {
            return Err(Error::Config("bin count must be positive and even".into()));
        }
        if self.delta_x.is_nan() || self.delta_x <= 0.0 {
            return Err(Error::Config("delta_x must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.ar_coeff) {
            return Err(Error::Config(format!(
                "AR coefficient must lie in [0, 1), got {}",
                self.ar_coeff
            )));
        }
        if self.n_runs == 0 {
            return Err(Error::Config("need at least one run".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("need at least one sample".into()));
        }
        for kind in ArchKind::ALL {
            for (label, v) in [
                ("tensor step size", self.mu_tensor.get(kind)),
                ("LMS step size", self.mu_lms.get(kind)),
            ] {
                if v.is_nan() || v <= 0.0 || v >= 1.0 {
                    return Err(Error::Config(format!(
                        "{label} for {kind} must lie in (0, 1), got {v}"
                    )));
                }
            }
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if !(self.snr_db.is_finite() || self.snr_db == f64::INFINITY) {
            return Err(Error::Config("SNR must be finite or +inf".into()));
        }
        Ok(())
    }
}

/// Stable seed derivation: one independent stream per (purpose, index).
///
/// SplitMix64 finalization over the master seed, a label hash and the
/// index; changing any of the three decorrelates the stream.
pub fn derive_seed(master: u64, purpose: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = master
        .wrapping_add(h)
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Unit-variance circular complex white Gaussian samples (each part has
/// variance 1/2), via Box-Muller.
pub fn white_cgn(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| next_cgn(&mut rng)).collect()
}

fn next_cgn(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller; u1 in (0, 1] to keep the log finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    // scale by 1/sqrt(2) for unit total variance
    Complex64::new(
        radius * angle.cos() * std::f64::consts::FRAC_1_SQRT_2,
        radius * angle.sin() * std::f64::consts::FRAC_1_SQRT_2,
    )
}

/// AR(1) colored excitation `x_n = a x_{n-1} + sqrt(1-a^2) nu_n`,
/// started from the stationary distribution so the variance is one from
/// the first sample. `a = 0` reproduces the white sequence.
pub fn gen_colored_noise(a: f64, n_samples: usize, seed: u64) -> Result<Vec<Complex64>> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Config(format!(
            "AR coefficient must lie in [0, 1), got {a}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gain = (1.0 - a * a).sqrt();
    let mut out = Vec::with_capacity(n_samples);
    let mut state = Complex64::new(0.0, 0.0);
    for k in 0..n_samples {
        let nu = next_cgn(&mut rng);
        state = if k == 0 {
            nu
        } else {
            state.scale(a) + nu.scale(gain)
        };
        out.push(state);
    }
    Ok(out)
}

/// Saturating power-amplifier model `x^2 / (1 + |x|)`.
pub fn pa_nonlinearity(x: Complex64) -> Complex64 {
    (x * x).unscale(1.0 + x.norm())
}

/// Synthesized duplexer stop-band impulse response: unit-norm complex
/// taps with an `exp(-p/4)` decay envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplexerResponse {
    taps: Vec<Complex64>,
    seed: u64,
}

impl DuplexerResponse {
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

/// Draw a length-`p` duplexer response: i.i.d. circular Gaussian taps,
/// exponential decay, then l2 normalization. Deterministic per seed.
pub fn synth_duplexer(p: usize, seed: u64) -> Result<DuplexerResponse> {
    if p == 0 {
        return Err(Error::Config("duplexer needs at least one tap".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taps: Vec<Complex64> = (0..p)
        .map(|k| next_cgn(&mut rng).scale((-(k as f64) / 4.0).exp()))
        .collect();
    let norm = taps.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
    for t in &mut taps {
        *t = t.unscale(norm);
    }
    Ok(DuplexerResponse { taps, seed })
}

/// Pass the excitation through the PA model and duplexer, then add
/// observation noise calibrated so the mean power of `d` sits `snr_db`
/// above the noise power. Returns `(d, y)`; `snr_db = inf` gives
/// `y == d`.
pub fn simulate_target(
    x: &[Complex64],
    h: &DuplexerResponse,
    snr_db: f64,
    noise_seed: u64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let p = h.len();
    let n = x.len();
    let pa: Vec<Complex64> = x.iter().map(|&v| pa_nonlinearity(v)).collect();

    // d_n = sum_k h_k pa(x_{n-k}), zero-padded pre-history
    let mut d = Vec::with_capacity(n);
    for idx in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &tap) in h.taps().iter().enumerate().take(p.min(idx + 1)) {
            acc += tap * pa[idx - k];
        }
        d.push(acc);
    }

    if snr_db == f64::INFINITY {
        let y = d.clone();
        return (d, y);
    }

    let p_d = d.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    let sigma = (p_d * 10f64.powf(-snr_db / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let y = d
        .iter()
        .map(|&dv| dv + next_cgn(&mut rng).scale(sigma))
        .collect();
    (d, y)
}

/// Run-averaged MSE curve in dB:
/// `10 log10( (1/L) sum_l |d_n - y_hat_n|^2 )`, floored at
/// [`MSE_DB_FLOOR`].
pub fn mse_curve(d_runs: &[&[Complex64]], yhat_runs: &[&[Complex64]]) -> Result<Vec<f64>> {
    if d_runs.len() != yhat_runs.len() || d_runs.is_empty() {
        return Err(Error::Dimension {
            expected: d_runs.len().max(1),
            got: yhat_runs.len(),
        });
    }
    let n = d_runs[0].len();
    for (d, y) in d_runs.iter().zip(yhat_runs) {
        if d.len() != n || y.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: d.len().min(y.len()),
            });
        }
    }
    let l = d_runs.len() as f64;
    let mut curve = Vec::with_capacity(n);
    for i in 0..n {
        let mean_sq = d_runs
            .iter()
            .zip(yhat_runs)
            .map(|(d, y)| (d[i] - y[i]).norm_sqr())
            .sum::<f64>()
            / l;
        curve.push(db_floored(mean_sq));
    }
    Ok(curve)
}

/// `10 log10(x)` with non-positive inputs clamped to the floor.
pub fn db_floored(power: f64) -> f64 {
    if power <= 0.0 {
        MSE_DB_FLOOR
    } else {
        (10.0 * power.log10()).max(MSE_DB_FLOOR)
    }
}

/// Centered-window moving average for presentation smoothing; `window`
/// of 0 or 1 returns the curve unchanged.
pub fn moving_average(curve: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 || curve.is_empty() {
        return curve.to_vec();
    }
    let half = window / 2;
    let n = curve.len();
    let mut out = Vec::with_capacity(n);
    // prefix sums for O(n)
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &v in curve {
        prefix.push(prefix.last().unwrap() + v);
    }
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        out.push((prefix[hi] - prefix[lo]) / (hi - lo) as f64);
    }
    out
}
