//! Normalized LMS weight updates, real and complex.
//!
//! One generic implementation serves both: the prediction is the plain
//! transpose inner product `w' z` (no conjugation), and the update is
//!
//! ```text
//! w <- w + mu * e * conj(z) / (eps + z^H z)
//! ```
//!
//! which restricted to reals is the familiar normalized LMS. The error
//! is always computed with the pre-update weights.

use crate::complexity::{FlopTally, NoTally};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Weight vector plus step configuration for one (C)LMS stage.
#[derive(Debug, Clone, PartialEq)]
pub struct LmsState<T> {
    weights: Vec<T>,
    step_size: f64,
    epsilon: f64,
}

impl<T: Scalar> LmsState<T> {
    /// Zero-initialized weights of length `len`.
    pub fn new(len: usize, step_size: f64, epsilon: f64) -> Result<Self> {
        if len == 0 {
            return Err(Error::Config("filter length must be positive".into()));
        }
        if step_size.is_nan() || step_size <= 0.0 || step_size >= 1.0 {
            return Err(Error::Config(format!(
                "LMS step size must lie in (0, 1), got {step_size}"
            )));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "regularization must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            weights: vec![T::ZERO; len],
            step_size,
            epsilon,
        })
    }

    /// Wrap an explicit weight vector (used by tests and state restore).
    pub fn with_weights(weights: Vec<T>, step_size: f64, epsilon: f64) -> Result<Self> {
        let mut s = Self::new(weights.len(), step_size, epsilon)?;
        s.weights = weights;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `w' z`, plain transpose without conjugation.
    pub fn predict(&self, z: &[T]) -> Result<T> {
        if z.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                got: z.len(),
            });
        }
        Ok(self.predict_tallied(z, &mut NoTally))
    }

    pub(crate) fn predict_tallied<C: FlopTally>(&self, z: &[T], tally: &mut C) -> T {
        let mut acc = T::ZERO;
        for (p, (&w, &x)) in self.weights.iter().zip(z.iter()).enumerate() {
            let term = w * x;
            tally.mul::<T>(1);
            if p == 0 {
                acc = term;
            } else {
                acc += term;
                tally.acc::<T>(1);
            }
        }
        acc
    }

    /// Normalized update from error `e` and regressor `z`. The
    /// normalizer `eps + z^H z` is strictly positive for every input,
    /// including `z = 0`.
    pub fn update(&mut self, e: T, z: &[T]) -> Result<()> {
        if z.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                got: z.len(),
            });
        }
        let energy: f64 = z.iter().map(|v| v.modulus_sq()).sum();
        let gain = e.scale(self.step_size / (self.epsilon + energy));
        for (w, &x) in self.weights.iter_mut().zip(z.iter()) {
            *w += gain * x.conj();
        }
        Ok(())
    }
}
