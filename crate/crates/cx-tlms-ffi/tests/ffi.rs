//! Exercises the C ABI surface from Rust: handle lifecycle, argument
//! validation, and numeric parity with the native API.

use std::ffi::CStr;
use std::ptr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cx_tlms::arch::Ctlms;
use cx_tlms_ffi::{
    cx_tlms_filter_free, cx_tlms_filter_new, cx_tlms_filter_step, cx_tlms_params_default,
    cx_tlms_version, CxTlmsArch, CxTlmsFilter, CxTlmsParams, CxTlmsStatus, CxTlmsStepResult,
};

fn default_params(arch: CxTlmsArch) -> CxTlmsParams {
    let mut params = CxTlmsParams {
        filter_order: 0,
        rank: 0,
        n_bins: 0,
        delta_x: 0.0,
        mu_tensor: 0.0,
        mu_lms: 0.0,
        epsilon: 0.0,
        seed: 0,
    };
    let status = unsafe { cx_tlms_params_default(arch, &mut params) };
    assert_eq!(status, CxTlmsStatus::Ok);
    params
}

#[test]
fn defaults_expose_benchmark_settings() {
    let p = default_params(CxTlmsArch::Ctlms);
    assert_eq!(p.filter_order, 16);
    assert_eq!(p.rank, 10);
    assert_eq!(p.n_bins, 32);
    assert_eq!(p.mu_tensor, 0.075);
    assert_eq!(p.mu_lms, 0.009);
    let p = default_params(CxTlmsArch::Ttlms);
    assert_eq!(p.mu_tensor, 0.009);
    assert_eq!(p.mu_lms, 0.005);
}

#[test]
fn lifecycle_and_null_checks() {
    let params = default_params(CxTlmsArch::Tlms2r);
    let mut handle: *mut CxTlmsFilter = ptr::null_mut();

    let status = unsafe { cx_tlms_filter_new(CxTlmsArch::Tlms2r, ptr::null(), &mut handle) };
    assert_eq!(status, CxTlmsStatus::NullArgument);
    let status = unsafe { cx_tlms_filter_new(CxTlmsArch::Tlms2r, &params, ptr::null_mut()) };
    assert_eq!(status, CxTlmsStatus::NullArgument);

    let status = unsafe { cx_tlms_filter_new(CxTlmsArch::Tlms2r, &params, &mut handle) };
    assert_eq!(status, CxTlmsStatus::Ok);
    assert!(!handle.is_null());

    let mut out = CxTlmsStepResult {
        estimate_re: 0.0,
        estimate_im: 0.0,
        error_re: 0.0,
        error_im: 0.0,
    };
    let status = unsafe { cx_tlms_filter_step(handle, 0.1, -0.2, 0.3, 0.4, &mut out) };
    assert_eq!(status, CxTlmsStatus::Ok);
    assert!(out.error_re.is_finite() && out.error_im.is_finite());

    let status =
        unsafe { cx_tlms_filter_step(ptr::null_mut(), 0.1, -0.2, 0.3, 0.4, &mut out) };
    assert_eq!(status, CxTlmsStatus::NullArgument);

    unsafe { cx_tlms_filter_free(handle) };
    unsafe { cx_tlms_filter_free(ptr::null_mut()) };
}

#[test]
fn invalid_parameters_are_rejected() {
    let mut params = default_params(CxTlmsArch::Ctlms);
    params.mu_tensor = 1.5;
    let mut handle: *mut CxTlmsFilter = ptr::null_mut();
    let status = unsafe { cx_tlms_filter_new(CxTlmsArch::Ctlms, &params, &mut handle) };
    assert_eq!(status, CxTlmsStatus::InvalidArgument);

    let mut params = default_params(CxTlmsArch::Ctlms);
    params.n_bins = 31; // odd
    let status = unsafe { cx_tlms_filter_new(CxTlmsArch::Ctlms, &params, &mut handle) };
    assert_eq!(status, CxTlmsStatus::InvalidArgument);

    let mut params = default_params(CxTlmsArch::Ctlms);
    params.filter_order = 0;
    let status = unsafe { cx_tlms_filter_new(CxTlmsArch::Ctlms, &params, &mut handle) };
    assert_eq!(status, CxTlmsStatus::InvalidArgument);
}

#[test]
fn non_finite_samples_are_rejected() {
    let params = default_params(CxTlmsArch::Ttlms);
    let mut handle: *mut CxTlmsFilter = ptr::null_mut();
    assert_eq!(
        unsafe { cx_tlms_filter_new(CxTlmsArch::Ttlms, &params, &mut handle) },
        CxTlmsStatus::Ok
    );
    let mut out = CxTlmsStepResult {
        estimate_re: 0.0,
        estimate_im: 0.0,
        error_re: 0.0,
        error_im: 0.0,
    };
    let status = unsafe { cx_tlms_filter_step(handle, f64::NAN, 0.0, 0.0, 0.0, &mut out) };
    assert_eq!(status, CxTlmsStatus::NonFiniteInput);
    // the handle stays usable
    let status = unsafe { cx_tlms_filter_step(handle, 0.5, 0.5, 0.1, 0.1, &mut out) };
    assert_eq!(status, CxTlmsStatus::Ok);
    unsafe { cx_tlms_filter_free(handle) };
}

#[test]
fn matches_native_api_bit_for_bit() {
    let params = default_params(CxTlmsArch::Ctlms);
    let mut handle: *mut CxTlmsFilter = ptr::null_mut();
    assert_eq!(
        unsafe { cx_tlms_filter_new(CxTlmsArch::Ctlms, &params, &mut handle) },
        CxTlmsStatus::Ok
    );
    let mut native = Ctlms::new(
        params.filter_order as usize,
        params.rank as usize,
        params.n_bins as usize,
        params.delta_x,
        params.mu_tensor,
        params.mu_lms,
        params.epsilon,
        params.seed,
    )
    .unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut out = CxTlmsStepResult {
        estimate_re: 0.0,
        estimate_im: 0.0,
        error_re: 0.0,
        error_im: 0.0,
    };
    for _ in 0..500 {
        let x = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let y = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let status = unsafe { cx_tlms_filter_step(handle, x.re, x.im, y.re, y.im, &mut out) };
        assert_eq!(status, CxTlmsStatus::Ok);
        let native_out = native.step(x, y).unwrap();
        assert_eq!(out.estimate_re.to_bits(), native_out.estimate.re.to_bits());
        assert_eq!(out.estimate_im.to_bits(), native_out.estimate.im.to_bits());
        assert_eq!(out.error_re.to_bits(), native_out.error.re.to_bits());
        assert_eq!(out.error_im.to_bits(), native_out.error.im.to_bits());
    }
    unsafe { cx_tlms_filter_free(handle) };
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(cx_tlms_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_exports_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("cx_tlms.h");
    let text = std::fs::read_to_string(&header).expect("header generated at build time");
    for symbol in [
        "cx_tlms_params_default",
        "cx_tlms_filter_new",
        "cx_tlms_filter_step",
        "cx_tlms_filter_free",
        "cx_tlms_version",
        "CX_TLMS_STATUS_OK",
        "CX_TLMS_ARCH_CTLMS",
        "typedef struct CxTlmsFilter CxTlmsFilter;",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
