//! C ABI for the complex-valued tensor-LMS estimators.
//!
//! Filters are created behind opaque handles and driven one sample at a
//! time; every function returns a status code and never unwinds across
//! the boundary. The generated header lives at `include/cx_tlms.h`.
//!
//! ```c
//! CxTlmsParams params;
//! cx_tlms_params_default(CX_TLMS_ARCH_CTLMS, &params);
//! CxTlmsFilter *filter = NULL;
//! if (cx_tlms_filter_new(CX_TLMS_ARCH_CTLMS, &params, &filter) != CX_TLMS_STATUS_OK) { ... }
//! CxTlmsStepResult out;
//! cx_tlms_filter_step(filter, x_re, x_im, y_re, y_im, &out);
//! cx_tlms_filter_free(filter);
//! ```

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use cx_tlms::arch::{AnyArch, ArchKind, Ctlms, Tlms2r, Ttlms};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CxTlmsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A parameter was out of range (step sizes, orders, bin count).
    InvalidArgument = 2,
    /// An input sample was NaN or infinite.
    NonFiniteInput = 3,
    /// Unexpected internal failure.
    Internal = 4,
}

/// Estimator architecture selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CxTlmsArch {
    /// Two independent real pipelines (real/imaginary paths).
    Tlms2r = 0,
    /// Two real tensors feeding one complex LMS.
    Ttlms = 1,
    /// Fully complex tensor and LMS.
    Ctlms = 2,
}

impl CxTlmsArch {
    fn kind(self) -> ArchKind {
        match self {
            CxTlmsArch::Tlms2r => ArchKind::Tlms2r,
            CxTlmsArch::Ttlms => ArchKind::Ttlms,
            CxTlmsArch::Ctlms => ArchKind::Ctlms,
        }
    }
}

/// Construction parameters for one filter instance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CxTlmsParams {
    /// Filter order P: delay-line depth and LMS length.
    pub filter_order: u32,
    /// Tensor rank R.
    pub rank: u32,
    /// Lookup bins per tensor mode (even, positive).
    pub n_bins: u32,
    /// Discretization interval.
    pub delta_x: f64,
    /// Normalized tensor step size, in (0, 1).
    pub mu_tensor: f64,
    /// LMS step size, in (0, 1).
    pub mu_lms: f64,
    /// Regularizer for all step-size denominators.
    pub epsilon: f64,
    /// Seed for the factor-matrix initialization.
    pub seed: u64,
}

/// One adaptation step's outputs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CxTlmsStepResult {
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub error_re: f64,
    pub error_im: f64,
}

/// Opaque filter handle.
pub struct CxTlmsFilter {
    inner: AnyArch,
}

/// Fill `out` with the benchmark defaults for the given architecture
/// (order 16, rank 10, 32 bins over [-4, 4], the published step sizes).
///
/// # Safety
/// `out` must point to writable memory for one `CxTlmsParams`.
#[no_mangle]
pub unsafe extern "C" fn cx_tlms_params_default(
    arch: CxTlmsArch,
    out: *mut CxTlmsParams,
) -> CxTlmsStatus {
    if out.is_null() {
        return CxTlmsStatus::NullArgument;
    }
    let (mu_tensor, mu_lms) = match arch {
        CxTlmsArch::Tlms2r => (0.009, 0.009),
        CxTlmsArch::Ttlms => (0.009, 0.005),
        CxTlmsArch::Ctlms => (0.075, 0.009),
    };
    // SAFETY: caller guarantees `out` is valid for writes.
    unsafe {
        out.write(CxTlmsParams {
            filter_order: 16,
            rank: 10,
            n_bins: 32,
            delta_x: 8.0 / 32.0,
            mu_tensor,
            mu_lms,
            epsilon: 1e-12,
            seed: 1,
        });
    }
    CxTlmsStatus::Ok
}

/// Create a filter; on success `*out` owns the handle until
/// [`cx_tlms_filter_free`].
///
/// # Safety
/// `params` must point to a valid `CxTlmsParams` and `out` to writable
/// pointer storage.
#[no_mangle]
pub unsafe extern "C" fn cx_tlms_filter_new(
    arch: CxTlmsArch,
    params: *const CxTlmsParams,
    out: *mut *mut CxTlmsFilter,
) -> CxTlmsStatus {
    if params.is_null() || out.is_null() {
        return CxTlmsStatus::NullArgument;
    }
    // SAFETY: caller guarantees `params` is valid for reads.
    let p = unsafe { *params };
    let build = catch_unwind(|| {
        let (order, rank, bins) = (p.filter_order as usize, p.rank as usize, p.n_bins as usize);
        let kind = arch.kind();
        let result = match kind {
            ArchKind::Tlms2r => Tlms2r::new(
                order, rank, bins, p.delta_x, p.mu_tensor, p.mu_lms, p.epsilon, p.seed,
            )
            .map(AnyArch::Tlms2r),
            ArchKind::Ttlms => Ttlms::new(
                order, rank, bins, p.delta_x, p.mu_tensor, p.mu_lms, p.epsilon, p.seed,
            )
            .map(AnyArch::Ttlms),
            ArchKind::Ctlms => Ctlms::new(
                order, rank, bins, p.delta_x, p.mu_tensor, p.mu_lms, p.epsilon, p.seed,
            )
            .map(AnyArch::Ctlms),
        };
        result.ok()
    });
    match build {
        Ok(Some(inner)) => {
            // SAFETY: caller guarantees `out` is valid for writes.
            unsafe {
                out.write(Box::into_raw(Box::new(CxTlmsFilter { inner })));
            }
            CxTlmsStatus::Ok
        }
        Ok(None) => CxTlmsStatus::InvalidArgument,
        Err(_) => CxTlmsStatus::Internal,
    }
}

/// Advance the filter by one sample `(x, y)` and report the estimate
/// and error. The filter state adapts in place.
///
/// # Safety
/// `filter` must be a live handle from [`cx_tlms_filter_new`]; `out`
/// must point to writable memory for one `CxTlmsStepResult`.
#[no_mangle]
pub unsafe extern "C" fn cx_tlms_filter_step(
    filter: *mut CxTlmsFilter,
    x_re: f64,
    x_im: f64,
    y_re: f64,
    y_im: f64,
    out: *mut CxTlmsStepResult,
) -> CxTlmsStatus {
    if filter.is_null() || out.is_null() {
        return CxTlmsStatus::NullArgument;
    }
    // SAFETY: caller guarantees the handle is live and exclusive.
    let filter = unsafe { &mut *filter };
    let x = Complex64::new(x_re, x_im);
    let y = Complex64::new(y_re, y_im);
    if !(x_re.is_finite() && x_im.is_finite() && y_re.is_finite() && y_im.is_finite()) {
        return CxTlmsStatus::NonFiniteInput;
    }
    let stepped = catch_unwind(AssertUnwindSafe(|| filter.inner.step(x, y)));
    match stepped {
        Ok(Ok(step)) => {
            // SAFETY: caller guarantees `out` is valid for writes.
            unsafe {
                out.write(CxTlmsStepResult {
                    estimate_re: step.estimate.re,
                    estimate_im: step.estimate.im,
                    error_re: step.error.re,
                    error_im: step.error.im,
                });
            }
            CxTlmsStatus::Ok
        }
        Ok(Err(_)) => CxTlmsStatus::NonFiniteInput,
        Err(_) => CxTlmsStatus::Internal,
    }
}

/// Destroy a handle. Passing null is a no-op; passing a freed or
/// foreign pointer is undefined behavior.
///
/// # Safety
/// `filter` must be null or a pointer previously returned by
/// [`cx_tlms_filter_new`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cx_tlms_filter_free(filter: *mut CxTlmsFilter) {
    if filter.is_null() {
        return;
    }
    // SAFETY: caller guarantees ownership of a live handle.
    drop(unsafe { Box::from_raw(filter) });
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn cx_tlms_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
