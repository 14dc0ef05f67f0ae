//! C ABI over the wprop library.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`WpropStatus`]; on failure `wprop_last_error` holds a message
//! for the calling thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wprop::bounds::{bound_thm4, bound_thm6, bound_with_lipschitz, BoundOptions, BoundReport, Method};
use wprop::dynamics::{builtin_system, propagate_horizon, EpsilonPolicy, PropagationConfig, StochasticSystem, SystemSpec};
use wprop::funcmodel::{builtin, FunctionModel};
use wprop::measures::Distribution;
use wprop::quantize::{optimized_grid, QuantizationOperator};
use wprop::validate::mc_wasserstein;
use wprop::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpropStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    UnsupportedRho = 4,
    Parse = 5,
    TooLarge = 6,
    BudgetExhausted = 7,
    Numerical = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpropMethod {
    Thm4 = 0,
    Thm6 = 1,
    Lipschitz = 2,
    Linear = 3,
}

/// Headline numbers of a bound report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpropBound {
    pub value: f64,
    pub theta: f64,
    pub theta_d: f64,
    pub alpha_max: f64,
    pub beta_sum: f64,
    pub lipschitz: f64,
    pub method: WpropMethod,
    pub unbounded: bool,
}

/// A measure (product or discrete).
pub struct WpropDistribution(Distribution);

/// A function model.
pub struct WpropModel(FunctionModel);

/// A grid quantization operator.
pub struct WpropQuantizer(QuantizationOperator);

/// A stochastic system.
pub struct WpropSystem(StochasticSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn status_of(e: &Error) -> WpropStatus {
    match e {
        Error::DimensionMismatch { .. } => WpropStatus::DimensionMismatch,
        Error::UnsupportedRho(_) => WpropStatus::UnsupportedRho,
        Error::InvalidArgument(_) => WpropStatus::InvalidArgument,
        Error::Quadrature(_) => WpropStatus::Numerical,
        Error::TooLarge { .. } => WpropStatus::TooLarge,
        Error::BudgetExhausted { .. } => WpropStatus::BudgetExhausted,
        Error::Serde(_) => WpropStatus::Parse,
        Error::Io(_) => WpropStatus::Io,
    }
}

struct Fail(WpropStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> WpropStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WpropStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside wprop");
            WpropStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(WpropStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(WpropStatus::InvalidArgument, "string is not valid UTF-8".into()))
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, n: usize) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_out(out: *mut f64, len: usize, v: &[f64]) -> Result<(), Fail> {
    if v.len() > len {
        return Err(Fail(
            WpropStatus::BufferTooSmall,
            format!("output buffer holds {len} values, {} needed", v.len()),
        ));
    }
    if v.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null());
    }
    ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wprop_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wprop_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a distribution from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wprop_distribution_from_json(json: *const c_char, out: *mut *mut WpropDistribution) -> WpropStatus {
    guard(|| {
        let d = Distribution::from_json(str_arg(json)?)?;
        put(out, WpropDistribution(d))
    })
}

/// Product of independent Gaussians from means and variances.
///
/// # Safety
/// `mean` and `var` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_distribution_gaussian(
    mean: *const f64,
    var: *const f64,
    dim: usize,
    out: *mut *mut WpropDistribution,
) -> WpropStatus {
    guard(|| {
        let p = wprop::measures::ProductDistribution::diag_gaussian(slice(mean, dim)?, slice(var, dim)?)?;
        put(out, WpropDistribution(Distribution::Product(p)))
    })
}

/// # Safety
/// `d` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn wprop_distribution_free(d: *mut WpropDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_distribution_dim(d: *const WpropDistribution, out: *mut usize) -> WpropStatus {
    guard(|| {
        let d = obj(d)?;
        *out.as_mut().ok_or_else(null)? = d.0.dim();
        Ok(())
    })
}

/// Builtin model by name (`sigmoid`, `mountain_car`, ...).
///
/// # Safety
/// `name` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_model_builtin(name: *const c_char, out: *mut *mut WpropModel) -> WpropStatus {
    guard(|| {
        let m = builtin(str_arg(name)?, &serde_json::Value::Null)?;
        put(out, WpropModel(m))
    })
}

/// # Safety
/// `json` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_model_from_json(json: *const c_char, out: *mut *mut WpropModel) -> WpropStatus {
    guard(|| {
        let m = FunctionModel::from_json(str_arg(json)?)?;
        put(out, WpropModel(m))
    })
}

/// # Safety
/// `m` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn wprop_model_free(m: *mut WpropModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Input and output dimensions of a model.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_model_dims(m: *const WpropModel, input_dim: *mut usize, output_dim: *mut usize) -> WpropStatus {
    guard(|| {
        let m = obj(m)?;
        *input_dim.as_mut().ok_or_else(null)? = m.0.input_dim();
        *output_dim.as_mut().ok_or_else(null)? = m.0.output_dim();
        Ok(())
    })
}

/// Evaluates the model at `x` (length `n`), writing at most `out_len` values.
///
/// # Safety
/// `x` must point to `n` doubles and `out` to `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wprop_model_evaluate(
    m: *const WpropModel,
    x: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> WpropStatus {
    guard(|| {
        let y = obj(m)?.0.evaluate(slice(x, n)?)?;
        write_out(out, out_len, &y)
    })
}

/// Optimized grid with at most `budget` locations for a product distribution.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_quantizer_optimized(
    d: *const WpropDistribution,
    budget: usize,
    out: *mut *mut WpropQuantizer,
) -> WpropStatus {
    guard(|| {
        let p = match &obj(d)?.0 {
            Distribution::Product(p) => p,
            Distribution::Discrete(_) => {
                return Err(Fail(WpropStatus::InvalidArgument, "grid quantizers need a product distribution".into()))
            }
        };
        if budget == 0 {
            return Err(Fail(WpropStatus::InvalidArgument, "budget must be >= 1".into()));
        }
        put(out, WpropQuantizer(optimized_grid(p, budget)))
    })
}

/// # Safety
/// `json` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_quantizer_from_json(json: *const c_char, out: *mut *mut WpropQuantizer) -> WpropStatus {
    guard(|| {
        let q = QuantizationOperator::from_json(str_arg(json)?)?;
        put(out, WpropQuantizer(q))
    })
}

/// # Safety
/// `q` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn wprop_quantizer_free(q: *mut WpropQuantizer) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Number of locations.
///
/// # Safety
/// `q` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_quantizer_len(q: *const WpropQuantizer, out: *mut usize) -> WpropStatus {
    guard(|| {
        let q = obj(q)?;
        *out.as_mut().ok_or_else(null)? = q.0.len();
        Ok(())
    })
}

/// Quantization error theta_d of `q` applied to `d`.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_quantizer_theta_d(
    q: *const WpropQuantizer,
    d: *const WpropDistribution,
    rho: u32,
    out: *mut f64,
) -> WpropStatus {
    guard(|| {
        let v = obj(q)?.0.theta_d(&obj(d)?.0, rho)?;
        *out.as_mut().ok_or_else(null)? = v;
        Ok(())
    })
}

fn method_of(m: Method) -> WpropMethod {
    match m {
        Method::Thm4 => WpropMethod::Thm4,
        Method::Thm6 => WpropMethod::Thm6,
        Method::Lipschitz => WpropMethod::Lipschitz,
        Method::Linear => WpropMethod::Linear,
    }
}

fn summary(r: &BoundReport) -> WpropBound {
    WpropBound {
        value: r.value,
        theta: r.theta,
        theta_d: r.theta_d,
        alpha_max: r.alpha_max,
        beta_sum: r.beta_sum,
        lipschitz: r.lipschitz,
        method: method_of(r.method),
        unbounded: r.unbounded,
    }
}

/// Bound on the distance between the pushforward of any law within `theta`
/// of `d` and the pushforward of the quantized `d`. `method` picks the
/// bound; `WPROP_METHOD_THM6` requires theta = 0.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_bound(
    m: *const WpropModel,
    q: *const WpropQuantizer,
    d: *const WpropDistribution,
    theta: f64,
    rho: u32,
    method: WpropMethod,
    out: *mut WpropBound,
) -> WpropStatus {
    guard(|| {
        let (f, q, p) = (&obj(m)?.0, &obj(q)?.0, &obj(d)?.0);
        let r = match method {
            WpropMethod::Thm4 => bound_thm4(q, p, theta, f, rho, BoundOptions::default())?,
            WpropMethod::Thm6 if theta == 0.0 => bound_thm6(q, p, f, rho)?,
            WpropMethod::Thm6 => return Err(Fail(WpropStatus::InvalidArgument, "thm6 needs theta = 0".into())),
            WpropMethod::Lipschitz | WpropMethod::Linear => bound_with_lipschitz(q, p, theta, f, rho)?,
        };
        *out.as_mut().ok_or_else(null)? = summary(&r);
        Ok(())
    })
}

/// Builtin stochastic system by name.
///
/// # Safety
/// `name` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_system_builtin(name: *const c_char, out: *mut *mut WpropSystem) -> WpropStatus {
    guard(|| {
        let s = builtin_system(str_arg(name)?)?;
        put(out, WpropSystem(s))
    })
}

/// System from a JSON description.
///
/// # Safety
/// `json` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_system_from_json(json: *const c_char, out: *mut *mut WpropSystem) -> WpropStatus {
    guard(|| {
        let s = SystemSpec::from_json(str_arg(json)?)?;
        put(out, WpropSystem(s))
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn wprop_system_free(s: *mut WpropSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Propagates over `horizon` steps with fixed budgets and writes theta_1..
/// theta_T to `thetas` (and the Lipschitz trace to `lipschitz` if non-NULL).
///
/// # Safety
/// `thetas` must hold `horizon` doubles; `lipschitz` is NULL or the same size.
#[no_mangle]
pub unsafe extern "C" fn wprop_propagate(
    s: *const WpropSystem,
    horizon: usize,
    state_budget: usize,
    noise_budget: usize,
    rho: u32,
    seed: u64,
    thetas: *mut f64,
    lipschitz: *mut f64,
) -> WpropStatus {
    guard(|| {
        let sys = &obj(s)?.0;
        let cfg = PropagationConfig {
            state_budget,
            noise_budget,
            rho,
            seed,
            epsilon: EpsilonPolicy::Off,
            ..PropagationConfig::default()
        };
        let p = propagate_horizon(sys, horizon, &cfg)?;
        write_out(thetas, horizon, &p.trace.thetas())?;
        if !lipschitz.is_null() {
            write_out(lipschitz, horizon, &p.trace.lipschitz_thetas())?;
        }
        Ok(())
    })
}

/// Monte-Carlo estimate of W_rho between two distributions.
///
/// # Safety
/// Handles must be live; `estimate` and `stderr` valid.
#[no_mangle]
pub unsafe extern "C" fn wprop_mc_wasserstein(
    p: *const WpropDistribution,
    q: *const WpropDistribution,
    n: usize,
    repeats: usize,
    rho: u32,
    seed: u64,
    estimate: *mut f64,
    stderr: *mut f64,
) -> WpropStatus {
    guard(|| {
        let e = mc_wasserstein(&obj(p)?.0, &obj(q)?.0, n, repeats, rho, seed)?;
        *estimate.as_mut().ok_or_else(null)? = e.estimate;
        *stderr.as_mut().ok_or_else(null)? = e.stderr;
        Ok(())
    })
}
