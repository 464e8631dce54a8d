//! Two-tensor estimator with a complex LMS.
//!
//! Two real lookup tensors model the real and imaginary parts of the
//! nonlinearity; their outputs stack into one complex delay line feeding
//! a complex normalized LMS. The tensors adapt via
//!
//! ```text
//! A^re_{m'} <- A^re_{m'} + 2 mu Re{ e S^re_{m'} }
//! A^im_{m'} <- A^im_{m'} + 2 mu Im{ e S^im_{m'} }
//! ```
//!
//! where both S-matrices use conjugated tap weights. Taking the real
//! part on the real path and the imaginary part on the imaginary path is
//! what the gradient of `e* e` with respect to each real factor gives;
//! the finite-difference oracle pins this down.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    build_s_promoted, c2r_split, ensure_finite_complex, step_size_from_norm, ArchKind, MatrixField,
    ModeDiag, PathLabel, StateMatrix, StepOutput,
};
use crate::complexity::{FlopTally, ForwardEvents, NoTally};
use crate::error::{Error, Result};
use crate::lms::LmsState;
use crate::mat::Mat;
use crate::tdl::{snapshot_rows, Tap, Tdl};
use crate::tensor::{CpdTensor, Discretizer, IndexVector};

#[derive(Debug, Clone)]
pub struct Ttlms {
    tensor_re: CpdTensor<f64>,
    tensor_im: CpdTensor<f64>,
    tdl_re: Tdl<f64>,
    tdl_im: Tdl<f64>,
    lms: LmsState<Complex64>,
    disc: Discretizer,
    mu_tensor: f64,
    epsilon: f64,
}

impl Ttlms {
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
        let dims = [n_bins, n_bins];
        let tensor_re = CpdTensor::random_uniform(&dims, rank, &mut rng)?;
        let tensor_im = CpdTensor::random_uniform(&dims, rank, &mut rng)?;
        let lms = LmsState::new(filter_order, mu_lms, epsilon)?;
        Self::from_parts(tensor_re, tensor_im, lms, disc, mu_tensor, epsilon)
    }

    pub fn from_parts(
        tensor_re: CpdTensor<f64>,
        tensor_im: CpdTensor<f64>,
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
        for t in [&tensor_re, &tensor_im] {
            if t.order() != 2 {
                return Err(Error::Config(
                    "two-tensor estimator requires order-2 tensors".into(),
                ));
            }
            if t.dims().iter().any(|&d| d != disc.n_bins()) {
                return Err(Error::Config(
                    "tensor mode sizes must equal the discretizer bin count".into(),
                ));
            }
            if t.rank() != tensor_re.rank() {
                return Err(Error::Config("path tensors must share a rank".into()));
            }
        }
        let tdl_re = Tdl::new(lms.len(), tensor_re.order(), tensor_re.rank());
        let tdl_im = Tdl::new(lms.len(), tensor_im.order(), tensor_im.rank());
        Ok(Self {
            tensor_re,
            tensor_im,
            tdl_re,
            tdl_im,
            lms,
            disc,
            mu_tensor,
            epsilon,
        })
    }

    pub fn kind(&self) -> ArchKind {
        ArchKind::Ttlms
    }

    pub fn tensor_re(&self) -> &CpdTensor<f64> {
        &self.tensor_re
    }

    pub fn tensor_im(&self) -> &CpdTensor<f64> {
        &self.tensor_im
    }

    pub fn lms(&self) -> &LmsState<Complex64> {
        &self.lms
    }

    pub fn tdl_re(&self) -> &Tdl<f64> {
        &self.tdl_re
    }

    pub fn tdl_im(&self) -> &Tdl<f64> {
        &self.tdl_im
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
        self.tensor_re.check_index(&idx)?;
        self.tensor_im.check_index(&idx)?;

        let z_re = self.tensor_re.eval_tallied(&idx, tally);
        self.tdl_re.push(Tap {
            idx: idx.clone(),
            rows: snapshot_rows(self.tensor_re.factors(), &idx),
            z: z_re,
        });
        let z_im = self.tensor_im.eval_tallied(&idx, tally);
        self.tdl_im.push(Tap {
            idx: idx.clone(),
            rows: snapshot_rows(self.tensor_im.factors(), &idx),
            z: z_im,
        });

        let z: Vec<Complex64> = self
            .tdl_re
            .z_vector()
            .into_iter()
            .zip(self.tdl_im.z_vector())
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        let y_hat = self.lms.predict_tallied(&z, tally);
        Ok((z, y_hat))
    }

    /// Push both paths and predict without adapting.
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

    /// Complex S-matrices (real path, imaginary path) for a 1-based
    /// mode, built from the current delay lines and conjugated weights.
    pub fn s_matrices(&self, m_prime: usize) -> Result<(Mat<Complex64>, Mat<Complex64>)> {
        if m_prime == 0 || m_prime > self.tensor_re.order() {
            return Err(Error::InvalidMode {
                mode: m_prime,
                order: self.tensor_re.order(),
            });
        }
        let w_conj: Vec<Complex64> = self.lms.weights().iter().map(|w| w.conj()).collect();
        let m0 = m_prime - 1;
        let s_re = build_s_promoted(
            &self.tdl_re,
            &w_conj,
            self.tensor_re.factor(m0).rows(),
            self.tensor_re.rank(),
            m0,
        );
        let s_im = build_s_promoted(
            &self.tdl_im,
            &w_conj,
            self.tensor_im.factor(m0).rows(),
            self.tensor_im.rank(),
            m0,
        );
        Ok((s_re, s_im))
    }

    /// Per-mode unit-step tensor increments, `(2 Re{e S^re}, 2 Im{e S^im})`
    /// per mode — the quantities the finite-difference oracle verifies.
    pub fn descent_directions(&self, e: Complex64) -> (Vec<Mat<f64>>, Vec<Mat<f64>>) {
        let order = self.tensor_re.order();
        let mut dirs_re = Vec::with_capacity(order);
        let mut dirs_im = Vec::with_capacity(order);
        for m_prime in 1..=order {
            let (s_re, s_im) = self.s_matrices(m_prime).expect("mode in range");
            dirs_re.push(s_re.map(|s| 2.0 * (e * s).re));
            dirs_im.push(s_im.map(|s| 2.0 * (e * s).im));
        }
        (dirs_re, dirs_im)
    }

    pub fn step(&mut self, x: Complex64, y: Complex64) -> Result<StepOutput> {
        ensure_finite_complex(x, "input sample")?;
        ensure_finite_complex(y, "desired sample")?;
        let (z, y_hat) = self.forward_tallied(x, &mut NoTally)?;
        let e = y - y_hat;

        let order = self.tensor_re.order();
        let mut staged = Vec::with_capacity(2 * order);
        for m_prime in 1..=order {
            let (s_re, s_im) = self.s_matrices(m_prime)?;
            staged.push((PathLabel::Real, m_prime, s_re));
            staged.push((PathLabel::Imag, m_prime, s_im));
        }

        let mut modes = Vec::with_capacity(staged.len());
        for (path, m_prime, s) in staged {
            let frob = s.frob_sq();
            let mu = step_size_from_norm(frob, self.mu_tensor, self.epsilon);
            // expanded component form of 2 mu Re{e S} / 2 mu Im{e S};
            // with all-imaginary parts zero this reproduces the real
            // baseline's arithmetic bit for bit
            let c_re = 2.0 * mu * e.re;
            let c_im = 2.0 * mu * e.im;
            let m0 = m_prime - 1;
            match path {
                PathLabel::Real => {
                    let factor = self.tensor_re.factor_mut(m0);
                    for (a, &sv) in factor.as_mut_slice().iter_mut().zip(s.as_slice()) {
                        *a += c_re * sv.re - c_im * sv.im;
                    }
                }
                PathLabel::Imag => {
                    let factor = self.tensor_im.factor_mut(m0);
                    for (a, &sv) in factor.as_mut_slice().iter_mut().zip(s.as_slice()) {
                        *a += c_re * sv.im + c_im * sv.re;
                    }
                }
            }
            modes.push(ModeDiag {
                path,
                mode: m_prime,
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
        self.tensor_re.is_all_finite()
            && self.tensor_im.is_all_finite()
            && self.lms.weights().iter().all(|w| w.re.is_finite() && w.im.is_finite())
            && self.tdl_re.is_all_finite()
            && self.tdl_im.is_all_finite()
    }

    pub fn state_matrices(&self) -> Vec<StateMatrix> {
        let mut out: Vec<StateMatrix> = Vec::new();
        for (m, f) in self.tensor_re.factors().iter().enumerate() {
            out.push(StateMatrix {
                name: format!("re_mode{}", m + 1),
                matrix: MatrixField::Real(f.clone()),
            });
        }
        for (m, f) in self.tensor_im.factors().iter().enumerate() {
            out.push(StateMatrix {
                name: format!("im_mode{}", m + 1),
                matrix: MatrixField::Real(f.clone()),
            });
        }
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
