//! Fully complex estimator: complex tensor, complex LMS.
//!
//! The lookup tensor and all factor matrices live in the complex field;
//! the descent direction for a real cost with respect to complex factors
//! is the conjugate cost gradient, which gives the update
//!
//! ```text
//! A_{m'} <- A_{m'} + 2 mu e conj(S_{m'})
//! ```
//!
//! with `S_{m'}` built from plain (unconjugated) tap weights, exactly as
//! in the real baseline. The complex LMS update is unchanged. With
//! all-real data and all-real initialization every quantity stays real
//! and the trajectory coincides with the real baseline.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    build_s, c2r_split, ensure_finite_complex, step_size_from_norm, ArchKind, MatrixField,
    ModeDiag, PathLabel, StateMatrix, StepOutput,
};
use crate::complexity::{FlopTally, ForwardEvents, NoTally};
use crate::error::{Error, Result};
use crate::lms::LmsState;
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::tdl::{snapshot_rows, Tap, Tdl};
use crate::tensor::{CpdTensor, Discretizer, IndexVector};

#[derive(Debug, Clone)]
pub struct Ctlms {
    tensor: CpdTensor<Complex64>,
    tdl: Tdl<Complex64>,
    lms: LmsState<Complex64>,
    disc: Discretizer,
    mu_tensor: f64,
    epsilon: f64,
}

impl Ctlms {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        filter_order: usize,
        rank: usize,
        n_bins: usize,
        delta_x: f64,
        mu_tensor: f64,
        mu_lms: f64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self> {
        let disc = Discretizer::new(delta_x, n_bins)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensor = CpdTensor::random_uniform(&[n_bins, n_bins], rank, &mut rng)?;
        let lms = LmsState::new(filter_order, mu_lms, epsilon)?;
        Self::from_parts(tensor, lms, disc, mu_tensor, epsilon)
    }

    pub fn from_parts(
        tensor: CpdTensor<Complex64>,
        lms: LmsState<Complex64>,
        disc: Discretizer,
        mu_tensor: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if mu_tensor.is_nan() || mu_tensor <= 0.0 || mu_tensor >= 1.0 {
            return Err(Error::Config(format!(
                "tensor step size must lie in (0, 1), got {mu_tensor}"
            )));
        }
        if tensor.order() != 2 {
            return Err(Error::Config(
                "complex estimator requires an order-2 tensor".into(),
            ));
        }
        if tensor.dims().iter().any(|&d| d != disc.n_bins()) {
            return Err(Error::Config(
                "tensor mode sizes must equal the discretizer bin count".into(),
            ));
        }
        let tdl = Tdl::new(lms.len(), tensor.order(), tensor.rank());
        Ok(Self {
            tensor,
            tdl,
            lms,
            disc,
            mu_tensor,
            epsilon,
        })
    }

    pub fn kind(&self) -> ArchKind {
        ArchKind::Ctlms
    }

    pub fn tensor(&self) -> &CpdTensor<Complex64> {
        &self.tensor
    }

    pub fn lms(&self) -> &LmsState<Complex64> {
        &self.lms
    }

    pub fn tdl(&self) -> &Tdl<Complex64> {
        &self.tdl
    }

    pub fn discretizer(&self) -> &Discretizer {
        &self.disc
    }

    pub fn mu_tensor(&self) -> f64 {
        self.mu_tensor
    }

    fn index_of(&self, x: Complex64) -> Result<IndexVector> {
        let [re, im] = c2r_split(x);
        Ok(IndexVector::from_pair(
            self.disc.discretize(re)?,
            self.disc.discretize(im)?,
        ))
    }

    fn forward_tallied<C: FlopTally>(
        &mut self,
        x: Complex64,
        tally: &mut C,
    ) -> Result<(Vec<Complex64>, Complex64)> {
        let idx = self.index_of(x)?;
        self.tensor.check_index(&idx)?;
        let z = self.tensor.eval_tallied(&idx, tally);
        self.tdl.push(Tap {
            idx: idx.clone(),
            rows: snapshot_rows(self.tensor.factors(), &idx),
            z,
        });
        let z_vec = self.tdl.z_vector();
        let y_hat = self.lms.predict_tallied(&z_vec, tally);
        Ok((z_vec, y_hat))
    }

    /// Push a tap and predict without adapting.
    pub fn forward(&mut self, x: Complex64) -> Result<Complex64> {
        ensure_finite_complex(x, "input sample")?;
        self.forward_tallied(x, &mut NoTally).map(|(_, y)| y)
    }

    pub fn forward_counted(&mut self, x: Complex64) -> Result<ForwardEvents> {
        ensure_finite_complex(x, "input sample")?;
        let mut events = ForwardEvents::default();
        self.forward_tallied(x, &mut events)?;
        Ok(events)
    }

    /// S-matrix for a 1-based mode from the current delay line and
    /// plain (unconjugated) weights.
    pub fn s_matrix(&self, m_prime: usize) -> Result<Mat<Complex64>> {
        if m_prime == 0 || m_prime > self.tensor.order() {
            return Err(Error::InvalidMode {
                mode: m_prime,
                order: self.tensor.order(),
            });
        }
        let m0 = m_prime - 1;
        Ok(build_s(
            &self.tdl,
            self.lms.weights(),
            self.tensor.factor(m0).rows(),
            self.tensor.rank(),
            m0,
        ))
    }

    /// Per-mode unit-step increments `2 e conj(S_{m'})`; the Wirtinger
    /// finite-difference oracle verifies these.
    pub fn descent_directions(&self, e: Complex64) -> Vec<Mat<Complex64>> {
        (1..=self.tensor.order())
            .map(|m_prime| {
                self.s_matrix(m_prime)
                    .expect("mode in range")
                    .map(|s| e.scale(2.0) * s.conj())
            })
            .collect()
    }

    pub fn step(&mut self, x: Complex64, y: Complex64) -> Result<StepOutput> {
        ensure_finite_complex(x, "input sample")?;
        ensure_finite_complex(y, "desired sample")?;
        let (z, y_hat) = self.forward_tallied(x, &mut NoTally)?;
        let e = y - y_hat;

        let order = self.tensor.order();
        let mut staged = Vec::with_capacity(order);
        for m_prime in 1..=order {
            staged.push(self.s_matrix(m_prime)?);
        }

        let mut modes = Vec::with_capacity(order);
        for (m0, s) in staged.into_iter().enumerate() {
            let frob = s.frob_sq();
            let mu = step_size_from_norm(frob, self.mu_tensor, self.epsilon);
            let coeff = e.scale(2.0 * mu);
            let factor = self.tensor.factor_mut(m0);
            for (a, &sv) in factor.as_mut_slice().iter_mut().zip(s.as_slice()) {
                *a += coeff * sv.conj();
            }
            modes.push(ModeDiag {
                path: PathLabel::Real,
                mode: m0 + 1,
                s_frob_sq: frob,
                step_size: mu,
            });
        }

        self.lms.update(e, &z)?;
        Ok(StepOutput {
            estimate: y_hat,
            error: e,
            modes,
        })
    }

    pub fn is_all_finite(&self) -> bool {
        self.tensor.is_all_finite()
            && self
                .lms
                .weights()
                .iter()
                .all(|w| w.is_finite_scalar())
            && self.tdl.is_all_finite()
    }

    pub fn state_matrices(&self) -> Vec<StateMatrix> {
        let mut out: Vec<StateMatrix> = self
            .tensor
            .factors()
            .iter()
            .enumerate()
            .map(|(m, f)| StateMatrix {
                name: format!("mode{}", m + 1),
                matrix: MatrixField::Complex(f.clone()),
            })
            .collect();
        let w = Mat::from_rows(
            &self
                .lms
                .weights()
                .iter()
                .map(|&v| vec![v])
                .collect::<Vec<_>>(),
        );
        out.push(StateMatrix {
            name: "weights".into(),
            matrix: MatrixField::Complex(w),
        });
        out
    }
}
