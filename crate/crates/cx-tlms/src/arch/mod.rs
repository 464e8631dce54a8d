//! The composite adaptive estimators.
//!
//! All estimators share the same per-sample pipeline: discretize the
//! input into a tensor index, evaluate the lookup tensor(s), feed the
//! tapped delay line of tensor outputs into an LMS stage, and adapt
//! tensor factors and weights from the prediction error. Within one
//! sample the order is fixed: the estimate and error use the pre-update
//! state, every mode's S-matrix is built from the pre-update factors and
//! weights, then all tensor modes are updated, then the LMS weights.
//!
//! [`RealTlms`] is the real-valued baseline. The complex-capable
//! estimators are [`Tlms2r`] (the baseline duplicated over the real and
//! imaginary paths), [`Ttlms`] (two real tensors with one complex LMS)
//! and [`Ctlms`] (complex tensor, complex LMS).

mod ctlms;
mod real_tlms;
mod tlms2r;
mod ttlms;

pub use ctlms::Ctlms;
pub use real_tlms::{RealStepOutput, RealTlms};
pub use tlms2r::Tlms2r;
pub use ttlms::Ttlms;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::tdl::Tdl;
use crate::tensor::hadamard_rows;

/// The complex-capable estimator architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArchKind {
    Tlms2r,
    Ttlms,
    Ctlms,
}

impl ArchKind {
    pub const ALL: [ArchKind; 3] = [ArchKind::Tlms2r, ArchKind::Ttlms, ArchKind::Ctlms];

    pub fn name(self) -> &'static str {
        match self {
            ArchKind::Tlms2r => "tlms2r",
            ArchKind::Ttlms => "ttlms",
            ArchKind::Ctlms => "ctlms",
        }
    }

    pub fn parse(s: &str) -> Option<ArchKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tlms2r" | "tlms-2r" => Some(ArchKind::Tlms2r),
            "ttlms" => Some(ArchKind::Ttlms),
            "ctlms" => Some(ArchKind::Ctlms),
            _ => None,
        }
    }
}

impl std::fmt::Display for ArchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which internal path a diagnostic belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLabel {
    /// Real path (or the single path of a real/fully-complex estimator).
    Real,
    /// Imaginary path of a two-path estimator.
    Imag,
}

/// Per-mode update diagnostics for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDiag {
    pub path: PathLabel,
    /// 1-based tensor mode.
    pub mode: usize,
    /// Squared Frobenius norm of the S-matrix for this mode.
    pub s_frob_sq: f64,
    /// Effective normalized tensor step size for this mode.
    pub step_size: f64,
}

impl ModeDiag {
    /// `|1 - 2 mu ||S||_F^2|`, the predicted per-mode error contraction.
    pub fn contraction_factor(&self) -> f64 {
        (1.0 - 2.0 * self.step_size * self.s_frob_sq).abs()
    }

    pub fn is_finite(&self) -> bool {
        self.s_frob_sq.is_finite() && self.step_size.is_finite()
    }
}

/// One adaptation step of a complex-capable estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub estimate: Complex64,
    pub error: Complex64,
    pub modes: Vec<ModeDiag>,
}

/// Stack a complex sample into its real composite `[Re, Im]`.
pub fn c2r_split(x: Complex64) -> [f64; 2] {
    [x.re, x.im]
}

/// Normalized tensor step size `mu_bar / (eps + ||S||_F^2)`.
///
/// For `0 < mu_bar < 1` the resulting per-mode error contraction factor
/// `|1 - 2 mu ||S||_F^2|` stays below one whenever `S` is nonzero.
pub fn tensor_step_size<T: Scalar>(s: &Mat<T>, mu_bar: f64, epsilon: f64) -> f64 {
    step_size_from_norm(s.frob_sq(), mu_bar, epsilon)
}

#[inline]
pub(crate) fn step_size_from_norm(s_frob_sq: f64, mu_bar: f64, epsilon: f64) -> f64 {
    mu_bar / (epsilon + s_frob_sq)
}

/// First-order prediction of the next error after one mode update:
/// `(1 - 2 mu ||S||_F^2) e`.
pub fn aposteriori_error_estimate<T: Scalar, S: Scalar>(e: T, mu_ten: f64, s: &Mat<S>) -> T {
    e.scale(1.0 - 2.0 * mu_ten * s.frob_sq())
}

/// Scatter-accumulate the weighted Hadamard-excluding rows of the delay
/// line into an `i_dim x R` matrix: row `i_{m'}` of tap `p` receives
/// `coeffs[p] * prod_{m != m'} rows_m`. Taps sharing an index add in
/// place.
pub(crate) fn build_s<T: Scalar>(
    tdl: &Tdl<T>,
    coeffs: &[T],
    i_dim: usize,
    rank: usize,
    m_prime0: usize,
) -> Mat<T> {
    let mut s = Mat::zeros(i_dim, rank);
    for (tap, &c) in tdl.taps().zip(coeffs.iter()) {
        let rows: Vec<&[T]> = tap
            .rows
            .iter()
            .enumerate()
            .filter(|(m, _)| *m != m_prime0)
            .map(|(_, r)| r.as_slice())
            .collect();
        let h = hadamard_rows(&rows, rank);
        let target = s.row_mut(tap.idx.zero_based(m_prime0));
        for (t, &v) in target.iter_mut().zip(&h) {
            *t += c * v;
        }
    }
    s
}

/// [`build_s`] for real snapshot rows combined with complex tap
/// coefficients, producing a complex S-matrix.
pub(crate) fn build_s_promoted(
    tdl: &Tdl<f64>,
    coeffs: &[Complex64],
    i_dim: usize,
    rank: usize,
    m_prime0: usize,
) -> Mat<Complex64> {
    let mut s = Mat::zeros(i_dim, rank);
    for (tap, &c) in tdl.taps().zip(coeffs.iter()) {
        let rows: Vec<&[f64]> = tap
            .rows
            .iter()
            .enumerate()
            .filter(|(m, _)| *m != m_prime0)
            .map(|(_, r)| r.as_slice())
            .collect();
        let h = hadamard_rows(&rows, rank);
        let target = s.row_mut(tap.idx.zero_based(m_prime0));
        for (t, &v) in target.iter_mut().zip(&h) {
            *t += c.scale(v);
        }
    }
    s
}

pub(crate) fn ensure_finite_complex(v: Complex64, context: &'static str) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

/// Named matrix snapshot for state dumps.
#[derive(Debug, Clone)]
pub struct StateMatrix {
    pub name: String,
    pub matrix: MatrixField,
}

/// Real or complex matrix payload of a state dump.
#[derive(Debug, Clone)]
pub enum MatrixField {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
}

impl MatrixField {
    pub fn rows(&self) -> usize {
        match self {
            MatrixField::Real(m) => m.rows(),
            MatrixField::Complex(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MatrixField::Real(m) => m.cols(),
            MatrixField::Complex(m) => m.cols(),
        }
    }
}

/// Any of the three complex-capable estimators, for uniform driving.
#[derive(Debug, Clone)]
pub enum AnyArch {
    Tlms2r(Tlms2r),
    Ttlms(Ttlms),
    Ctlms(Ctlms),
}

impl AnyArch {
    pub fn kind(&self) -> ArchKind {
        match self {
            AnyArch::Tlms2r(_) => ArchKind::Tlms2r,
            AnyArch::Ttlms(_) => ArchKind::Ttlms,
            AnyArch::Ctlms(_) => ArchKind::Ctlms,
        }
    }

    pub fn step(&mut self, x: Complex64, y: Complex64) -> Result<StepOutput> {
        match self {
            AnyArch::Tlms2r(a) => a.step(x, y),
            AnyArch::Ttlms(a) => a.step(x, y),
            AnyArch::Ctlms(a) => a.step(x, y),
        }
    }

    pub fn is_all_finite(&self) -> bool {
        match self {
            AnyArch::Tlms2r(a) => a.is_all_finite(),
            AnyArch::Ttlms(a) => a.is_all_finite(),
            AnyArch::Ctlms(a) => a.is_all_finite(),
        }
    }

    pub fn state_matrices(&self) -> Vec<StateMatrix> {
        match self {
            AnyArch::Tlms2r(a) => a.state_matrices(),
            AnyArch::Ttlms(a) => a.state_matrices(),
            AnyArch::Ctlms(a) => a.state_matrices(),
        }
    }
}
