//! Real-valued tensor-LMS baseline.
//!
//! One real lookup tensor feeding a tapped delay line and a real
//! normalized LMS. The per-mode tensor update is
//!
//! ```text
//! A_{m'} <- A_{m'} + 2 * mu_{m'} * e * S_{m'}
//! ```
//!
//! with `S_{m'}` the scatter-accumulated weighted Hadamard-excluding
//! rows of the delay line and `mu_{m'} = mu_bar / (eps + ||S_{m'}||^2)`
//! the per-mode normalized step size.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{build_s, step_size_from_norm, MatrixField, ModeDiag, PathLabel, StateMatrix};
use crate::complexity::{FlopTally, NoTally};
use crate::error::{Error, Result};
use crate::lms::LmsState;
use crate::mat::Mat;
use crate::tdl::{snapshot_rows, Tap, Tdl};
use crate::tensor::{CpdTensor, IndexVector};

/// One adaptation step of the real baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStepOutput {
    pub estimate: f64,
    pub error: f64,
    pub modes: Vec<ModeDiag>,
}

#[derive(Debug, Clone)]
pub struct RealTlms {
    tensor: CpdTensor<f64>,
    lms: LmsState<f64>,
    tdl: Tdl<f64>,
    mu_tensor: f64,
    epsilon: f64,
}

impl RealTlms {
    /// Randomized factors, zero weights, zero-padded delay line.
    pub fn new(
        dims: &[usize],
        rank: usize,
        depth: usize,
        mu_tensor: f64,
        mu_lms: f64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensor = CpdTensor::random_uniform(dims, rank, &mut rng)?;
        let lms = LmsState::new(depth, mu_lms, epsilon)?;
        Self::from_parts(tensor, lms, mu_tensor, epsilon)
    }

    /// Assemble from explicit tensor and LMS state; the delay line
    /// starts zero-padded.
    pub fn from_parts(
        tensor: CpdTensor<f64>,
        lms: LmsState<f64>,
        mu_tensor: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if mu_tensor.is_nan() || mu_tensor <= 0.0 || mu_tensor >= 1.0 {
            return Err(Error::Config(format!(
                "tensor step size must lie in (0, 1), got {mu_tensor}"
            )));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "regularization must be positive, got {epsilon}"
            )));
        }
        let tdl = Tdl::new(lms.len(), tensor.order(), tensor.rank());
        Ok(Self {
            tensor,
            lms,
            tdl,
            mu_tensor,
            epsilon,
        })
    }

    pub fn tensor(&self) -> &CpdTensor<f64> {
        &self.tensor
    }

    pub fn lms(&self) -> &LmsState<f64> {
        &self.lms
    }

    pub fn tdl(&self) -> &Tdl<f64> {
        &self.tdl
    }

    pub fn mu_tensor(&self) -> f64 {
        self.mu_tensor
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Push a new tap and predict, without adapting anything.
    ///
    /// Returns `(z_n, y_hat)`: the fresh tensor output and the LMS
    /// prediction over the delay line including it.
    pub fn forward(&mut self, idx: &IndexVector) -> Result<(f64, f64)> {
        self.forward_tallied(idx, &mut NoTally)
    }

    pub(crate) fn forward_tallied<C: FlopTally>(
        &mut self,
        idx: &IndexVector,
        tally: &mut C,
    ) -> Result<(f64, f64)> {
        self.tensor.check_index(idx)?;
        let z = self.tensor.eval_tallied(idx, tally);
        let rows = snapshot_rows(self.tensor.factors(), idx);
        self.tdl.push(Tap {
            idx: idx.clone(),
            rows,
            z,
        });
        let z_vec = self.tdl.z_vector();
        let y_hat = self.lms.predict_tallied(&z_vec, tally);
        Ok((z, y_hat))
    }

    /// One full sample step: forward, error, all tensor-mode updates
    /// from the pre-update state, then the LMS update.
    pub fn step(&mut self, idx: &IndexVector, y: f64) -> Result<RealStepOutput> {
        if !y.is_finite() {
            return Err(Error::NonFinite {
                context: "desired sample",
            });
        }
        let (_, y_hat) = self.forward(idx)?;
        let e = y - y_hat;
        let modes = self.adapt(e)?;
        Ok(RealStepOutput {
            estimate: y_hat,
            error: e,
            modes,
        })
    }

    fn adapt(&mut self, e: f64) -> Result<Vec<ModeDiag>> {
        let order = self.tensor.order();
        let z_vec = self.tdl.z_vector();
        let weights = self.lms.weights().to_vec();

        // Stage every mode's S from the pre-update factors and weights,
        // then apply; Eq-style shared time index across modes.
        let mut staged = Vec::with_capacity(order);
        for m0 in 0..order {
            let s = build_s(
                &self.tdl,
                &weights,
                self.tensor.factor(m0).rows(),
                self.tensor.rank(),
                m0,
            );
            let frob = s.frob_sq();
            let mu = step_size_from_norm(frob, self.mu_tensor, self.epsilon);
            staged.push((s, frob, mu));
        }
        let mut modes = Vec::with_capacity(order);
        for (m0, (s, frob, mu)) in staged.into_iter().enumerate() {
            self.tensor.factor_mut(m0).add_scaled(2.0 * mu * e, &s);
            modes.push(ModeDiag {
                path: PathLabel::Real,
                mode: m0 + 1,
                s_frob_sq: frob,
                step_size: mu,
            });
        }
        self.lms.update(e, &z_vec)?;
        Ok(modes)
    }

    /// S-matrix for 1-based mode `m_prime`, built from the current delay
    /// line and weights.
    pub fn s_matrix(&self, m_prime: usize) -> Result<Mat<f64>> {
        if m_prime == 0 || m_prime > self.tensor.order() {
            return Err(Error::InvalidMode {
                mode: m_prime,
                order: self.tensor.order(),
            });
        }
        Ok(build_s(
            &self.tdl,
            self.lms.weights(),
            self.tensor.factor(m_prime - 1).rows(),
            self.tensor.rank(),
            m_prime - 1,
        ))
    }

    /// The per-mode tensor increments for unit step size: `2 e S_{m'}`.
    /// This is the quantity the finite-difference oracle checks against
    /// the cost gradient.
    pub fn descent_directions(&self, e: f64) -> Vec<Mat<f64>> {
        (1..=self.tensor.order())
            .map(|m_prime| {
                self.s_matrix(m_prime)
                    .expect("mode in range")
                    .map(|v| 2.0 * e * v)
            })
            .collect()
    }

    pub fn is_all_finite(&self) -> bool {
        self.tensor.is_all_finite()
            && self.lms.weights().iter().all(|w| w.is_finite())
            && self.tdl.is_all_finite()
    }

    pub(crate) fn state_matrices_with_prefix(&self, prefix: &str) -> Vec<StateMatrix> {
        let mut out: Vec<StateMatrix> = self
            .tensor
            .factors()
            .iter()
            .enumerate()
            .map(|(m, f)| StateMatrix {
                name: format!("{prefix}mode{}", m + 1),
                matrix: MatrixField::Real(f.clone()),
            })
            .collect();
        let w = Mat::from_rows(&self.lms.weights().iter().map(|&v| vec![v]).collect::<Vec<_>>());
        out.push(StateMatrix {
            name: format!("{prefix}weights"),
            matrix: MatrixField::Real(w),
        });
        out
    }

    pub fn state_matrices(&self) -> Vec<StateMatrix> {
        self.state_matrices_with_prefix("")
    }
}
