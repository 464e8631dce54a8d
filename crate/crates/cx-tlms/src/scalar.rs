//! Scalar field abstraction so the same tensor and filter code serves
//! real (`f64`) and complex (`Complex64`) instances.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// A real or complex scalar usable as the entry type of factor matrices
/// and filter weights.
///
/// `conj` is the identity on reals, `modulus_sq` is `|x|^2` and always
/// real. Both fields embed `f64` via [`Scalar::from_real`].
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;
    const ONE: Self;
    /// Whether the field is complex; drives operation accounting.
    const IS_COMPLEX: bool;

    fn conj(self) -> Self;
    fn modulus_sq(self) -> f64;
    fn from_real(value: f64) -> Self;
    fn is_finite_scalar(self) -> bool;

    /// Scale by a real factor.
    fn scale(self, factor: f64) -> Self;

    /// Draw with every real component i.i.d. uniform on `[0.9, 1.1]`.
    fn random_near_one(rng: &mut impl rand::Rng) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const IS_COMPLEX: bool = false;

    #[inline]
    fn conj(self) -> Self {
        self
    }

    #[inline]
    fn modulus_sq(self) -> f64 {
        self * self
    }

    #[inline]
    fn from_real(value: f64) -> Self {
        value
    }

    #[inline]
    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }

    #[inline]
    fn scale(self, factor: f64) -> Self {
        self * factor
    }

    #[inline]
    fn random_near_one(rng: &mut impl rand::Rng) -> Self {
        rng.gen_range(0.9..1.1)
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);
    const IS_COMPLEX: bool = true;

    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    #[inline]
    fn modulus_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    fn from_real(value: f64) -> Self {
        Complex64::new(value, 0.0)
    }

    #[inline]
    fn is_finite_scalar(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    #[inline]
    fn scale(self, factor: f64) -> Self {
        Complex64::new(self.re * factor, self.im * factor)
    }

    #[inline]
    fn random_near_one(rng: &mut impl rand::Rng) -> Self {
        let re = rng.gen_range(0.9..1.1);
        let im = rng.gen_range(0.9..1.1);
        Complex64::new(re, im)
    }
}
