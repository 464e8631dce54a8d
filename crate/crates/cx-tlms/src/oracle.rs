//! Independent brute-force verifiers for the tensor update rules.
//!
//! The estimators adapt factor matrices along `2 e S` directions derived
//! in closed form. This module rebuilds the per-sample cost through a
//! completely different route — dense tensor materialization plus index
//! lookups — and differentiates it numerically, so every update rule can
//! be checked against central finite differences without sharing code
//! with the filtering path.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arch::{Ctlms, RealTlms, Ttlms};
use crate::error::{Error, Result};
use crate::lms::LmsState;
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::tensor::{CpdTensor, Discretizer, IndexVector};

/// Default perturbation for central differences on unit-scaled states.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference gradient of a real cost over a real matrix.
pub fn fd_gradient_real(cost: impl Fn(&Mat<f64>) -> f64, a: &Mat<f64>, h: f64) -> Mat<f64> {
    let mut grad = Mat::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let mut plus = a.clone();
            *plus.get_mut(i, j) += h;
            let mut minus = a.clone();
            *minus.get_mut(i, j) -= h;
            *grad.get_mut(i, j) = (cost(&plus) - cost(&minus)) / (2.0 * h);
        }
    }
    grad
}

/// Conjugate-coordinate gradient `dJ/dA*` of a real cost over a complex
/// matrix: `(dJ/dRe + j dJ/dIm) / 2`, each part by central differences.
pub fn fd_gradient_wirtinger(
    cost: impl Fn(&Mat<Complex64>) -> f64,
    a: &Mat<Complex64>,
    h: f64,
) -> Mat<Complex64> {
    let mut grad = Mat::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let base = a.get(i, j);
            let at = |v: Complex64| {
                let mut m = a.clone();
                *m.get_mut(i, j) = v;
                cost(&m)
            };
            let d_re = (at(base + Complex64::new(h, 0.0)) - at(base - Complex64::new(h, 0.0)))
                / (2.0 * h);
            let d_im = (at(base + Complex64::new(0.0, h)) - at(base - Complex64::new(0.0, h)))
                / (2.0 * h);
            *grad.get_mut(i, j) = Complex64::new(d_re, d_im).scale(0.5);
        }
    }
    grad
}

/// Frozen view of an estimator at one sample: factor matrices, weights,
/// and the delay line's index history (newest first, aligned with the
/// weights). Everything the dense reference cost needs.
#[derive(Debug, Clone)]
pub enum ArchSnapshot {
    Real {
        factors: Vec<Mat<f64>>,
        weights: Vec<f64>,
        taps: Vec<IndexVector>,
    },
    TwoPath {
        factors_re: Vec<Mat<f64>>,
        factors_im: Vec<Mat<f64>>,
        weights: Vec<Complex64>,
        taps: Vec<IndexVector>,
    },
    Complex {
        factors: Vec<Mat<Complex64>>,
        weights: Vec<Complex64>,
        taps: Vec<IndexVector>,
    },
}

impl ArchSnapshot {
    pub fn from_real_tlms(f: &RealTlms) -> Self {
        ArchSnapshot::Real {
            factors: f.tensor().factors().to_vec(),
            weights: f.lms().weights().to_vec(),
            taps: f.tdl().index_history(),
        }
    }

    pub fn from_ttlms(f: &Ttlms) -> Self {
        ArchSnapshot::TwoPath {
            factors_re: f.tensor_re().factors().to_vec(),
            factors_im: f.tensor_im().factors().to_vec(),
            weights: f.lms().weights().to_vec(),
            taps: f.tdl_re().index_history(),
        }
    }

    pub fn from_ctlms(f: &Ctlms) -> Self {
        ArchSnapshot::Complex {
            factors: f.tensor().factors().to_vec(),
            weights: f.lms().weights().to_vec(),
            taps: f.tdl().index_history(),
        }
    }
}

fn dense_lookup_sum<T: Scalar>(
    factors: &[Mat<T>],
    weights_len: usize,
    taps: &[IndexVector],
    mut accumulate: impl FnMut(usize, T),
) -> Result<()> {
    let dense = CpdTensor::new(factors.to_vec())?.dense_materialize()?;
    for (p, idx) in taps.iter().take(weights_len).enumerate() {
        accumulate(p, dense.at(idx));
    }
    Ok(())
}

/// Recompute the per-sample cost `e* e` through dense materialization
/// and index lookups, entirely bypassing the filtering path.
///
/// For the real variant the desired sample is `y.re` and the cost is a
/// plain square.
pub fn dense_reference_cost(snap: &ArchSnapshot, y: Complex64) -> Result<f64> {
    match snap {
        ArchSnapshot::Real {
            factors,
            weights,
            taps,
        } => {
            let mut y_hat = 0.0;
            dense_lookup_sum(factors, weights.len(), taps, |p, z: f64| {
                y_hat += weights[p] * z;
            })?;
            let e = y.re - y_hat;
            Ok(e * e)
        }
        ArchSnapshot::TwoPath {
            factors_re,
            factors_im,
            weights,
            taps,
        } => {
            let mut z_re = vec![0.0; weights.len()];
            let mut z_im = vec![0.0; weights.len()];
            dense_lookup_sum(factors_re, weights.len(), taps, |p, z: f64| z_re[p] = z)?;
            dense_lookup_sum(factors_im, weights.len(), taps, |p, z: f64| z_im[p] = z)?;
            let y_hat: Complex64 = weights
                .iter()
                .zip(z_re.iter().zip(&z_im))
                .map(|(&w, (&re, &im))| w * Complex64::new(re, im))
                .sum();
            Ok((y - y_hat).norm_sqr())
        }
        ArchSnapshot::Complex {
            factors,
            weights,
            taps,
        } => {
            let mut y_hat = Complex64::new(0.0, 0.0);
            dense_lookup_sum(factors, weights.len(), taps, |p, z: Complex64| {
                y_hat += weights[p] * z;
            })?;
            Ok((y - y_hat).norm_sqr())
        }
    }
}

/// Outcome of comparing implemented update directions against the
/// finite-difference gradient.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    /// `||g_impl - g_fd|| / max(||g_fd||, 1e-30)`, worst over all
    /// matrices and cases checked.
    pub max_rel_error: f64,
    /// Label of the worst matrix, e.g. `"re_mode1"`.
    pub worst_matrix: String,
    /// 0-based entry with the largest absolute deviation.
    pub worst_entry: (usize, usize),
    /// Perturbation used for the central differences.
    pub step_h: f64,
}

impl GradCheckReport {
    fn empty(h: f64) -> Self {
        Self {
            max_rel_error: 0.0,
            worst_matrix: String::new(),
            worst_entry: (0, 0),
            step_h: h,
        }
    }

    fn absorb<T: Scalar>(&mut self, label: &str, g_impl: &Mat<T>, g_target: &Mat<T>) {
        let mut diff_sq = 0.0;
        let mut worst = (0usize, 0usize, 0.0f64);
        for i in 0..g_impl.rows() {
            for j in 0..g_impl.cols() {
                let d = (g_impl.get(i, j) - g_target.get(i, j)).modulus_sq();
                diff_sq += d;
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        let rel = diff_sq.sqrt() / g_target.frob_sq().sqrt().max(1e-30);
        if rel > self.max_rel_error {
            self.max_rel_error = rel;
            self.worst_matrix = label.to_string();
            self.worst_entry = (worst.0, worst.1);
        }
    }
}

/// Which update rule a gradient check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckArch {
    RealTlms,
    Ttlms,
    Ctlms,
}

impl CheckArch {
    pub const ALL: [CheckArch; 3] = [CheckArch::RealTlms, CheckArch::Ttlms, CheckArch::Ctlms];

    pub fn name(self) -> &'static str {
        match self {
            CheckArch::RealTlms => "tlms",
            CheckArch::Ttlms => "ttlms",
            CheckArch::Ctlms => "ctlms",
        }
    }
}

fn random_real_mat(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let mut m = Mat::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = rng.gen_range(-1.5..1.5);
    }
    m
}

fn random_complex_mat(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat<Complex64> {
    let mut m = Mat::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    }
    m
}

/// Weight with magnitude bounded away from zero, so the S-matrices and
/// gradients keep a workable scale for relative comparisons.
fn random_weight(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.2..1.0);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn random_complex_weight(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(random_weight(rng), random_weight(rng))
}

/// Gradient-check one randomly constructed small state.
///
/// The state is built by forward-only passes (no adaptation), so the
/// delay-line snapshots coincide with the current factors and the dense
/// reference cost evaluates to exactly the filter's own cost.
pub fn gradcheck_case(arch: CheckArch, seed: u64) -> Result<GradCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = DEFAULT_FD_STEP;
    let p = rng.gen_range(1..=4usize);
    let rank = rng.gen_range(1..=3usize);
    let mut report = GradCheckReport::empty(h);

    match arch {
        CheckArch::RealTlms => {
            let i1 = rng.gen_range(2..=8usize);
            let i2 = rng.gen_range(2..=8usize);
            let tensor = CpdTensor::new(vec![
                random_real_mat(i1, rank, &mut rng),
                random_real_mat(i2, rank, &mut rng),
            ])?;
            let weights: Vec<f64> = (0..p).map(|_| random_weight(&mut rng)).collect();
            let lms = LmsState::with_weights(weights, 0.5, 1e-12)?;
            let mut filter = RealTlms::from_parts(tensor, lms, 0.5, 1e-12)?;

            let rand_idx = |rng: &mut ChaCha8Rng| {
                IndexVector::from_pair(rng.gen_range(1..=i1), rng.gen_range(1..=i2))
            };
            for _ in 0..p {
                filter.forward(&rand_idx(&mut rng))?;
            }
            let (_, y_hat) = filter.forward(&rand_idx(&mut rng))?;
            let y = y_hat + random_weight(&mut rng) * 2.0;
            let e = y - y_hat;

            let dirs = filter.descent_directions(e);
            let snap = ArchSnapshot::from_real_tlms(&filter);
            for (m0, dir) in dirs.iter().enumerate() {
                let cost = |a: &Mat<f64>| {
                    let mut s = snap.clone();
                    let ArchSnapshot::Real { factors, .. } = &mut s else {
                        unreachable!()
                    };
                    factors[m0] = a.clone();
                    dense_reference_cost(&s, Complex64::new(y, 0.0)).expect("small dims")
                };
                let base = match &snap {
                    ArchSnapshot::Real { factors, .. } => factors[m0].clone(),
                    _ => unreachable!(),
                };
                let target = fd_gradient_real(cost, &base, h).map(|g| -g);
                report.absorb(&format!("mode{}", m0 + 1), dir, &target);
            }
        }
        CheckArch::Ttlms => {
            let n_bins = 2 * rng.gen_range(1..=4usize);
            let disc = Discretizer::new(4.0 / n_bins as f64, n_bins)?;
            let dims = [n_bins, n_bins];
            let tensor_re = CpdTensor::new(vec![
                random_real_mat(dims[0], rank, &mut rng),
                random_real_mat(dims[1], rank, &mut rng),
            ])?;
            let tensor_im = CpdTensor::new(vec![
                random_real_mat(dims[0], rank, &mut rng),
                random_real_mat(dims[1], rank, &mut rng),
            ])?;
            let weights: Vec<Complex64> = (0..p).map(|_| random_complex_weight(&mut rng)).collect();
            let lms = LmsState::with_weights(weights, 0.5, 1e-12)?;
            let mut filter = Ttlms::from_parts(tensor_re, tensor_im, lms, disc, 0.5, 1e-12)?;

            for _ in 0..p {
                let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                filter.forward(x)?;
            }
            let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let y_hat = filter.forward(x)?;
            let y = y_hat + Complex64::new(random_weight(&mut rng), random_weight(&mut rng));
            let e = y - y_hat;

            let (dirs_re, dirs_im) = filter.descent_directions(e);
            let snap = ArchSnapshot::from_ttlms(&filter);
            for (m0, dir) in dirs_re.iter().enumerate() {
                let cost = |a: &Mat<f64>| {
                    let mut s = snap.clone();
                    let ArchSnapshot::TwoPath { factors_re, .. } = &mut s else {
                        unreachable!()
                    };
                    factors_re[m0] = a.clone();
                    dense_reference_cost(&s, y).expect("small dims")
                };
                let base = match &snap {
                    ArchSnapshot::TwoPath { factors_re, .. } => factors_re[m0].clone(),
                    _ => unreachable!(),
                };
                let target = fd_gradient_real(cost, &base, h).map(|g| -g);
                report.absorb(&format!("re_mode{}", m0 + 1), dir, &target);
            }
            for (m0, dir) in dirs_im.iter().enumerate() {
                let cost = |a: &Mat<f64>| {
                    let mut s = snap.clone();
                    let ArchSnapshot::TwoPath { factors_im, .. } = &mut s else {
                        unreachable!()
                    };
                    factors_im[m0] = a.clone();
                    dense_reference_cost(&s, y).expect("small dims")
                };
                let base = match &snap {
                    ArchSnapshot::TwoPath { factors_im, .. } => factors_im[m0].clone(),
                    _ => unreachable!(),
                };
                let target = fd_gradient_real(cost, &base, h).map(|g| -g);
                report.absorb(&format!("im_mode{}", m0 + 1), dir, &target);
            }
        }
        CheckArch::Ctlms => {
            let n_bins = 2 * rng.gen_range(1..=4usize);
            let disc = Discretizer::new(4.0 / n_bins as f64, n_bins)?;
            let tensor = CpdTensor::new(vec![
                random_complex_mat(n_bins, rank, &mut rng),
                random_complex_mat(n_bins, rank, &mut rng),
            ])?;
            let weights: Vec<Complex64> = (0..p).map(|_| random_complex_weight(&mut rng)).collect();
            let lms = LmsState::with_weights(weights, 0.5, 1e-12)?;
            let mut filter = Ctlms::from_parts(tensor, lms, disc, 0.5, 1e-12)?;

            for _ in 0..p {
                let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                filter.forward(x)?;
            }
            let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let y_hat = filter.forward(x)?;
            let y = y_hat + Complex64::new(random_weight(&mut rng), random_weight(&mut rng));
            let e = y - y_hat;

            // implemented direction 2 e S* against -2 dJ/dA*
            let dirs = filter.descent_directions(e);
            let snap = ArchSnapshot::from_ctlms(&filter);
            for (m0, dir) in dirs.iter().enumerate() {
                let cost = |a: &Mat<Complex64>| {
                    let mut s = snap.clone();
                    let ArchSnapshot::Complex { factors, .. } = &mut s else {
                        unreachable!()
                    };
                    factors[m0] = a.clone();
                    dense_reference_cost(&s, y).expect("small dims")
                };
                let base = match &snap {
                    ArchSnapshot::Complex { factors, .. } => factors[m0].clone(),
                    _ => unreachable!(),
                };
                let target = fd_gradient_wirtinger(cost, &base, h).map(|g| g.scale(-2.0));
                report.absorb(&format!("mode{}", m0 + 1), dir, &target);
            }
        }
    }

    Ok(report)
}

/// Run `cases` independent gradient checks and keep the worst outcome.
pub fn gradcheck_suite(arch: CheckArch, cases: usize, seed: u64) -> Result<GradCheckReport> {
    if cases == 0 {
        return Err(Error::Config("gradient check needs at least one case".into()));
    }
    let mut worst = GradCheckReport::empty(DEFAULT_FD_STEP);
    for c in 0..cases {
        let report = gradcheck_case(arch, seed.wrapping_add(c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))?;
        if report.max_rel_error > worst.max_rel_error {
            worst = report;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_real_gradient_of_sum_is_ones() {
        let a = Mat::from_rows(&[vec![0.3, -1.2], vec![2.0, 0.0]]);
        let g = fd_gradient_real(|m| m.as_slice().iter().sum(), &a, 1e-5);
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.get(i, j) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fd_real_gradient_of_frob_sq_is_twice_matrix() {
        let a = Mat::from_rows(&[vec![0.5, -0.25], vec![1.5, 3.0]]);
        let g = fd_gradient_real(|m| m.frob_sq(), &a, 1e-5);
        for i in 0..2 {
            for j in 0..2 {
                let expect = 2.0 * a.get(i, j);
                assert!((g.get(i, j) - expect).abs() < 1e-8 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn fd_real_truncation_error_scales_quadratically() {
        // cubic cost: the central-difference error term is h^2 f'''/6,
        // so halving h divides the error by about four.
        let a = Mat::from_rows(&[vec![0.8]]);
        let cost = |m: &Mat<f64>| m.get(0, 0).powi(3);
        let exact = 3.0 * 0.8f64.powi(2);
        let err = |h: f64| (fd_gradient_real(cost, &a, h).get(0, 0) - exact).abs();
        let e1 = err(1e-3);
        let e2 = err(5e-4);
        let ratio = e1 / e2;
        assert!(
            (2.5..6.0).contains(&ratio),
            "expected ~4x error reduction, got {ratio}"
        );
    }

    #[test]
    fn fd_wirtinger_of_modulus_sq_is_the_value() {
        // J = |a|^2 -> dJ/da* = a
        let a = Mat::from_rows(&[vec![Complex64::new(0.7, -1.3)]]);
        let g = fd_gradient_wirtinger(|m| m.get(0, 0).norm_sqr(), &a, 1e-5);
        assert!((g.get(0, 0) - a.get(0, 0)).norm() < 1e-9);
    }

    #[test]
    fn fd_wirtinger_of_constant_is_zero() {
        let a = Mat::from_rows(&[vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]]);
        let g = fd_gradient_wirtinger(|_| 4.2, &a, 1e-5);
        assert_eq!(g.frob_sq(), 0.0);
    }

    #[test]
    fn fd_wirtinger_of_inner_product_is_half_coefficient() {
        // J = Re{conj(c) a} -> dJ/da* = c / 2
        let c = Complex64::new(-0.4, 1.1);
        let a = Mat::from_rows(&[vec![Complex64::new(0.2, 0.9)]]);
        let g = fd_gradient_wirtinger(|m| (c.conj() * m.get(0, 0)).re, &a, 1e-5);
        assert!((g.get(0, 0) - c.scale(0.5)).norm() < 1e-9);
    }

    #[test]
    fn dense_cost_matches_filter_cost_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for case in 0..20 {
            let i1 = rng.gen_range(2..=6usize);
            let i2 = rng.gen_range(2..=6usize);
            let rank = rng.gen_range(1..=3usize);
            let p = rng.gen_range(1..=4usize);
            let tensor = CpdTensor::new(vec![
                random_real_mat(i1, rank, &mut rng),
                random_real_mat(i2, rank, &mut rng),
            ])
            .unwrap();
            let weights: Vec<f64> = (0..p).map(|_| random_weight(&mut rng)).collect();
            let lms = LmsState::with_weights(weights, 0.5, 1e-12).unwrap();
            let mut filter = RealTlms::from_parts(tensor, lms, 0.5, 1e-12).unwrap();
            for _ in 0..=p {
                let idx = IndexVector::from_pair(rng.gen_range(1..=i1), rng.gen_range(1..=i2));
                filter.forward(&idx).unwrap();
            }
            let idx = IndexVector::from_pair(rng.gen_range(1..=i1), rng.gen_range(1..=i2));
            let (_, y_hat) = filter.forward(&idx).unwrap();
            let y = rng.gen_range(-2.0..2.0);
            let own_cost = (y - y_hat) * (y - y_hat);
            let snap = ArchSnapshot::from_real_tlms(&filter);
            let ref_cost = dense_reference_cost(&snap, Complex64::new(y, 0.0)).unwrap();
            assert!(
                (ref_cost - own_cost).abs() <= 1e-12 * own_cost.abs().max(1e-12),
                "case {case}: {ref_cost} vs {own_cost}"
            );
        }
    }

    #[test]
    fn dense_cost_zero_weights_is_y_squared() {
        let snap = ArchSnapshot::Complex {
            factors: vec![
                Mat::from_rows(&[vec![Complex64::new(1.0, 1.0)]]),
                Mat::from_rows(&[vec![Complex64::new(2.0, -1.0)]]),
            ],
            weights: vec![Complex64::new(0.0, 0.0); 2],
            taps: vec![
                IndexVector::from_pair(1, 1),
                IndexVector::from_pair(1, 1),
            ],
        };
        let y = Complex64::new(3.0, -4.0);
        assert!((dense_reference_cost(&snap, y).unwrap() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn dense_cost_single_tap_hand_case() {
        // z = 2*5 = 10, y_hat = 0.5*10 = 5, J = (9-5)^2 = 16
        let snap = ArchSnapshot::Real {
            factors: vec![
                Mat::from_rows(&[vec![2.0]]),
                Mat::from_rows(&[vec![5.0]]),
            ],
            weights: vec![0.5],
            taps: vec![IndexVector::from_pair(1, 1)],
        };
        let j = dense_reference_cost(&snap, Complex64::new(9.0, 0.0)).unwrap();
        assert!((j - 16.0).abs() < 1e-12);
    }

    #[test]
    fn gradcheck_small_batches_pass() {
        for arch in CheckArch::ALL {
            let report = gradcheck_suite(arch, 10, 1234).unwrap();
            assert!(
                report.max_rel_error <= 1e-6,
                "{}: relative error {} at {} {:?}",
                arch.name(),
                report.max_rel_error,
                report.worst_matrix,
                report.worst_entry
            );
        }
    }
}
