//! C ABI over the verification library: opaque function handles with
//! pointwise and spherical-mean evaluation, plus JSON-in/JSON-out one-shot
//! entry points mirroring the command-line subcommands.
//!
//! Conventions:
//! - every entry point returns an [`SmStatus`] (or a pointer that is null
//!   on failure) and records a diagnostic retrievable with
//!   [`sm_last_error_message`];
//! - strings returned to the caller are NUL-terminated, heap-allocated, and
//!   owned by the caller, who releases them with [`sm_string_free`];
//! - all entry points catch panics and convert them to `SM_ERR_PANIC`
//!   instead of unwinding across the boundary.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Value};

use sphermean::generators::{CompactFunction, EigenFamily};
use sphermean::json as schema;
use sphermean::means::{report_from_rows, scan_means};
use sphermean::moments::{common_zero_sample, family_satisfies_recursion, harmonic_minor, MomentFamily};
use sphermean::quad::sphere_rule;
use sphermean::ruled::chart::classify_singularity;
use sphermean::symmetry::{coxeter_closure, injectivity_certificate, validate_cone_configuration};
use sphermean::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStatus {
    /// The call succeeded.
    SmOk = 0,
    /// A required pointer argument was null.
    SmErrNullArgument = 1,
    /// An input string was not valid UTF-8.
    SmErrUtf8 = 2,
    /// The input JSON could not be parsed; the diagnostic names the
    /// offending JSON path.
    SmErrMalformed = 3,
    /// The input parsed but the computation rejected it (domain error).
    SmErrDomain = 4,
    /// An internal panic was caught at the boundary.
    SmErrPanic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = message.into();
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::Malformed { .. } => SmStatus::SmErrMalformed,
        _ => SmStatus::SmErrDomain,
    }
}

fn fail(e: &Error) -> SmStatus {
    set_error(e.to_string());
    status_of(e)
}

/// Library version string (static storage; do not free).
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// A copy of the thread's last diagnostic, or null when the last call on
/// this thread succeeded. Release with [`sm_string_free`].
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque handle to a compactly supported source function.
pub struct SmFunction {
    inner: CompactFunction,
}

/// Parses a source-function JSON document (schema kind `radial_harmonic`,
/// `odd_plane`, `grid`, or `discrete`) into a handle. Returns null on
/// failure and records the diagnostic.
///
/// # Safety
/// `text` must be null or a NUL-terminated C string.
#[no_mangle]
pub unsafe extern "C" fn sm_function_parse(text: *const c_char) -> *mut SmFunction {
    clear_error();
    if text.is_null() {
        set_error("null input text");
        return std::ptr::null_mut();
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("input text is not valid UTF-8");
        return std::ptr::null_mut();
    };
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<CompactFunction, Error> {
        let doc = schema::parse_document(text)?;
        schema::function_from_json(&doc, "$")
    }));
    match result {
        Ok(Ok(inner)) => Box::into_raw(Box::new(SmFunction { inner })),
        Ok(Err(e)) => {
            set_error(e.to_string());
            std::ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic while parsing the function");
            std::ptr::null_mut()
        }
    }
}

/// Releases a function handle. Null is ignored.
///
/// # Safety
/// `f` must be null or a handle from [`sm_function_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_function_free(f: *mut SmFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Ambient dimension of the function (2 or 3); 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle from [`sm_function_parse`].
#[no_mangle]
pub unsafe extern "C" fn sm_function_dim(f: *const SmFunction) -> usize {
    if f.is_null() {
        return 0;
    }
    (*f).inner.dim()
}

/// Evaluates the function at the point `x` (`len` coordinates, which must
/// match the function's dimension), writing the value to `out`.
///
/// # Safety
/// `f` must be a live handle; `x` must point to `len` readable doubles;
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn sm_function_eval(
    f: *const SmFunction,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> SmStatus {
    clear_error();
    if f.is_null() || x.is_null() || out.is_null() {
        set_error("null argument");
        return SmStatus::SmErrNullArgument;
    }
    let point = std::slice::from_raw_parts(x, len);
    let result = catch_unwind(AssertUnwindSafe(|| (*f).inner.eval(point)));
    match result {
        Ok(Ok(v)) => {
            *out = v;
            SmStatus::SmOk
        }
        Ok(Err(e)) => fail(&e),
        Err(_) => {
            set_error("internal panic during evaluation");
            SmStatus::SmErrPanic
        }
    }
}

/// Mean of the function over the sphere of radius `radius` centered at
/// `center` (`len` coordinates), using a product quadrature rule of the
/// given order.
///
/// # Safety
/// `f` must be a live handle; `center` must point to `len` readable
/// doubles; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn sm_spherical_mean(
    f: *const SmFunction,
    center: *const f64,
    len: usize,
    radius: f64,
    quad_order: usize,
    out: *mut f64,
) -> SmStatus {
    clear_error();
    if f.is_null() || center.is_null() || out.is_null() {
        set_error("null argument");
        return SmStatus::SmErrNullArgument;
    }
    let c = std::slice::from_raw_parts(center, len);
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<f64, Error> {
        let rule = sphere_rule((*f).inner.dim(), quad_order)?;
        sphermean::means::spherical_mean(&(*f).inner, c, radius, &rule)
    }));
    match result {
        Ok(Ok(v)) => {
            *out = v;
            SmStatus::SmOk
        }
        Ok(Err(e)) => fail(&e),
        Err(_) => {
            set_error("internal panic during quadrature");
            SmStatus::SmErrPanic
        }
    }
}

/// Shared wrapper for the JSON one-shot entry points.
unsafe fn one_shot(
    input: *const c_char,
    out_json: *mut *mut c_char,
    run: impl FnOnce(&Value) -> Result<Value, Error>,
) -> SmStatus {
    clear_error();
    if input.is_null() || out_json.is_null() {
        set_error("null argument");
        return SmStatus::SmErrNullArgument;
    }
    *out_json = std::ptr::null_mut();
    let Ok(text) = CStr::from_ptr(input).to_str() else {
        set_error("input text is not valid UTF-8");
        return SmStatus::SmErrUtf8;
    };
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<Value, Error> {
        let doc = schema::parse_document(text)?;
        run(&doc)
    }));
    match result {
        Ok(Ok(v)) => {
            let text = serde_json::to_string(&v).expect("serializable report");
            *out_json = CString::new(text).expect("JSON has no NUL").into_raw();
            SmStatus::SmOk
        }
        Ok(Err(e)) => fail(&e),
        Err(_) => {
            set_error("internal panic");
            SmStatus::SmErrPanic
        }
    }
}

/// Classifies the singular point of a truncated ruled chart
/// (chart-JSON in, verdict-JSON out).
///
/// # Safety
/// `input` must be a NUL-terminated C string; `out_json` must point to a
/// writable `char*`.
#[no_mangle]
pub unsafe extern "C" fn sm_classify_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let parsed = schema::chart_input_from_json(doc, "$")?;
        let verdict = classify_singularity(&parsed.chart, &parsed.t0, &parsed.lambda0);
        Ok(schema::verdict_to_json(&verdict))
    })
}

/// Builds the moment family of a discrete measure: recursion check,
/// harmonic minor, and sampled common zeros (moments-job JSON in).
///
/// # Safety
/// As for [`sm_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn sm_moments_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let job = schema::moments_job_from_json(doc, "$")?;
        let family = MomentFamily::new(&job.measure, job.kmax)?;
        let minor = harmonic_minor(&job.measure, job.kmax)?;
        let zeros = common_zero_sample(&family, &job.grid, job.tol)?;
        Ok(json!({
            "recursion_ok": family_satisfies_recursion(&family),
            "kmax": job.kmax,
            "k0": minor.as_ref().map(|(k0, _)| *k0),
            "minor": minor.as_ref().map(|(_, h)| schema::poly_to_json(h)),
            "zero_count": zeros.len(),
            "zeros": zeros,
        }))
    })
}

/// Closes a concurrent mirror system under its own reflections
/// (mirror-system JSON in, closure JSON out).
///
/// # Safety
/// As for [`sm_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn sm_coxeter_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let sys = schema::reflection_system_from_json(doc, "$")?;
        Ok(schema::closure_to_json(&coxeter_closure(&sys), sys.dim()))
    })
}

/// Runs the antipodal support-shrinking certificate (certify JSON in,
/// certificate JSON out).
///
/// # Safety
/// As for [`sm_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn sm_certify_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let i = schema::certify_input_from_json(doc, "$")?;
        let cert = injectivity_certificate(
            i.a,
            i.b,
            i.normal_a,
            i.normal_b,
            i.support_radius,
            i.max_iter,
        );
        Ok(schema::certificate_to_json(&cert))
    })
}

/// Validates a labeled configuration of vertex-meeting cones
/// (configuration JSON in, verdict JSON out).
///
/// # Safety
/// As for [`sm_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn sm_validate_config_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let cfg = schema::cone_config_from_json(doc, "$")?;
        let verdict = validate_cone_configuration(&cfg)?;
        Ok(schema::config_verdict_to_json(&verdict))
    })
}

/// Scans spherical means of a source over centers x radii and reports the
/// largest absolute mean with a sampled sup-norm estimate (means-job JSON
/// in, report JSON out).
///
/// # Safety
/// As for [`sm_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn sm_verify_means_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let job = schema::means_job_from_json(doc, "$")?;
        let rule = sphere_rule(job.function.dim(), job.quad_order)?;
        let rows = scan_means(&job.function, &job.centers, &job.radii, &rule)?;
        let report = report_from_rows(&rows);
        let sup = job.function.sup_abs_estimate(100_000)?;
        Ok(schema::mean_report_to_json(&report, Some(sup)))
    })
}

/// Evaluates the eigenfunction family of a discrete measure over a lambda
/// grid at chosen points and reports the largest modulus (spectral-job JSON
/// in, report JSON out).
///
/// # Safety
/// As for [`sm_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn sm_spectral_json(
    input: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    one_shot(input, out_json, |doc| {
        let job = schema::spectral_job_from_json(doc, "$")?;
        let points = match &job.points {
            schema::SpectralPoints::List(pts) => pts.clone(),
            schema::SpectralPoints::CommonZeros { kmax, grid, tol } => {
                let family = MomentFamily::new(&job.measure, *kmax)?;
                common_zero_sample(&family, grid, *tol)?
            }
        };
        let family = EigenFamily::new(job.measure.clone());
        let mut max_abs = 0.0f64;
        let mut argmax: Option<(f64, Vec<f64>)> = None;
        for p in &points {
            for &lambda in &job.lambdas {
                let value = family.eval(lambda, p)?;
                if value.abs() > max_abs {
                    max_abs = value.abs();
                    argmax = Some((lambda, p.clone()));
                }
            }
        }
        Ok(json!({
            "count_points": points.len(),
            "count_lambdas": job.lambdas.len(),
            "max_abs": max_abs,
            "argmax_lambda": argmax.as_ref().map(|(l, _)| *l),
            "argmax_point": argmax.as_ref().map(|(_, p)| p.clone()),
        }))
    })
}
