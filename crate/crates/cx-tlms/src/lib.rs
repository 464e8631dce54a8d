//! Adaptive identification of complex-valued Hammerstein systems with
//! low-rank lookup tensors and (C)LMS filters.
//!
//! A Hammerstein system is a static nonlinearity followed by a linear
//! filter. Each estimator here models the nonlinearity with a low-rank
//! CPD lookup tensor (indexed by discretized input components) and the
//! linear part with a normalized LMS stage fed by a tapped delay line of
//! tensor outputs. Three complex-capable architectures are provided on
//! top of the real-valued baseline:
//!
//! - [`arch::Tlms2r`] — two independent real pipelines for the real and
//!   imaginary paths,
//! - [`arch::Ttlms`] — two real tensors feeding one complex LMS,
//! - [`arch::Ctlms`] — a fully complex tensor and complex LMS.
//!
//! The [`scenario`] module synthesizes the transmitter-harmonics
//! identification benchmark the architectures are compared on, and
//! [`oracle`] provides finite-difference verifiers for every update
//! rule. The `cx-tlms` binary drives Monte-Carlo experiments and emits
//! CSV learning curves.

pub mod arch;
pub mod bench;
pub mod complexity;
pub mod error;
pub mod lms;
pub mod mat;
pub mod oracle;
pub mod scalar;
pub mod scenario;
pub mod tdl;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;
