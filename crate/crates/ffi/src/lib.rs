//! C ABI over `netmatch`.
//!
//! Samples and estimation results are opaque handles created by the library
//! and released with their `*_free` function. Every fallible call returns an
//! [`NmStatus`]; on failure the message is kept per thread and can be read
//! with [`nm_last_error_message`]. Arrays cross the boundary row-major, and
//! the caller owns every buffer it passes in.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use netmatch::estimators::ProbClip;
use netmatch::{
    Adjacency, BandwidthRule, EstimationResult, EstimatorConfig, Error, Kernel, KernelSpec,
    LinkFunction, NetworkSample, SocialInfluence, TrueParameters,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Domain = 4,
    Validation = 5,
    DegenerateMatching = 6,
    Separation = 7,
    NonConvergence = 8,
    Config = 9,
    Precondition = 10,
    Io = 11,
    Parse = 12,
    Json = 13,
    Panic = 14,
}

impl From<&Error> for NmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => NmStatus::Domain,
            Error::Validation(_) => NmStatus::Validation,
            Error::DegenerateMatching(_) => NmStatus::DegenerateMatching,
            Error::Separation(_) => NmStatus::Separation,
            Error::NonConvergence(_) => NmStatus::NonConvergence,
            Error::Config(_) => NmStatus::Config,
            Error::Precondition(_) => NmStatus::Precondition,
            Error::Parse { .. } => NmStatus::Parse,
            Error::Io { .. } => NmStatus::Io,
            Error::Json(_) => NmStatus::Json,
        }
    }
}

/// Opaque sample handle.
pub struct NmSample(NetworkSample);

/// Opaque estimation result handle.
pub struct NmResult(EstimationResult);

/// Estimator settings. Non-positive `bandwidth` selects the default rule
/// `n^(-1/9)/10`; non-positive `prob_clip` selects `1/(n+1)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NmEstimatorConfig {
    pub bandwidth: f64,
    pub prob_clip: f64,
    pub max_iterations: u32,
    pub gradient_tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(NmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(NmStatus::from(&e), e.to_string())
    }
}

fn fail(status: NmStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

/// Runs `body`, converting errors and panics into a status plus message.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> NmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => NmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            NmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(NmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(NmStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_buffer<'a, T>(
    p: *mut T,
    len: usize,
    needed: usize,
    what: &str,
) -> Result<&'a mut [T], Fail> {
    if len < needed {
        return Err(fail(
            NmStatus::BufferTooSmall,
            format!("{what} holds {len} elements, {needed} needed"),
        ));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(NmStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

unsafe fn sample_ref<'a>(s: *const NmSample) -> Result<&'a NetworkSample, Fail> {
    s.as_ref()
        .map(|s| &s.0)
        .ok_or_else(|| fail(NmStatus::NullPointer, "sample handle is null"))
}

unsafe fn result_ref<'a>(r: *const NmResult) -> Result<&'a EstimationResult, Fail> {
    r.as_ref()
        .map(|r| &r.0)
        .ok_or_else(|| fail(NmStatus::NullPointer, "result handle is null"))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(NmStatus::NullPointer, "output handle pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL; 0 when the last call succeeded.
#[no_mangle]
pub extern "C" fn nm_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |m| m.as_bytes().len()))
}

/// Copies the last error message into `buf` (truncated and always
/// NUL-terminated when `len > 0`). Returns the full message length
/// excluding the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |m| m.as_bytes());
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Default estimator settings.
#[no_mangle]
pub extern "C" fn nm_estimator_config_default() -> NmEstimatorConfig {
    let d = EstimatorConfig::default();
    NmEstimatorConfig {
        bandwidth: 0.0,
        prob_clip: 0.0,
        max_iterations: d.optimizer.max_iterations as u32,
        gradient_tolerance: d.optimizer.gradient_tolerance,
    }
}

fn to_config(c: &NmEstimatorConfig) -> Result<EstimatorConfig, Fail> {
    let mut cfg = EstimatorConfig::default();
    if c.bandwidth.is_nan() || c.prob_clip.is_nan() {
        return Err(fail(NmStatus::Config, "bandwidth and prob_clip must not be NaN"));
    }
    if c.bandwidth > 0.0 {
        cfg.kernel.bandwidth = BandwidthRule::Fixed(c.bandwidth);
    }
    if c.prob_clip > 0.0 {
        cfg.prob_clip = ProbClip::Fixed(c.prob_clip);
    }
    cfg.optimizer.max_iterations = c.max_iterations as usize;
    cfg.optimizer.gradient_tolerance = c.gradient_tolerance;
    cfg.validate()?;
    Ok(cfg)
}

/// Simulates a sample of `n` agents with one standard normal covariate,
/// `β = 1` and uniform social characteristics.
///
/// `link` is `blockmodel`, `beta` or `homophily`. `lambda` is `reference`
/// (`1.5w² + ln w`) or `zero`; null means `reference`.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be valid for
/// one write.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_simulate(
    n: usize,
    link: *const c_char,
    lambda: *const c_char,
    seed: u64,
    out: *mut *mut NmSample,
) -> NmStatus {
    guard(|| {
        let link: LinkFunction = str_arg(link, "link")?.parse()?;
        let lambda: SocialInfluence = if lambda.is_null() {
            SocialInfluence::Reference
        } else {
            str_arg(lambda, "lambda")?.parse()?
        };
        let params = TrueParameters::new(vec![1.0], lambda)?;
        let s = netmatch::simulate_sample(n, &link, &params, seed)?;
        store(out, NmSample(s))
    })
}

/// Builds a sample from caller data: `x` is `n×k` row-major, `y` holds `n`
/// outcomes in {0,1}, and `adjacency` is the `n×n` row-major 0/1 matrix
/// (symmetric, zero diagonal).
///
/// # Safety
/// Each pointer must be valid for the stated number of elements; `out`
/// must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_from_arrays(
    n: usize,
    k: usize,
    x: *const f64,
    y: *const u8,
    adjacency: *const u8,
    out: *mut *mut NmSample,
) -> NmStatus {
    guard(|| {
        let cells = n
            .checked_mul(n)
            .ok_or_else(|| fail(NmStatus::InvalidArgument, "n*n overflows"))?;
        let xlen = n
            .checked_mul(k)
            .ok_or_else(|| fail(NmStatus::InvalidArgument, "n*k overflows"))?;
        let x = slice_arg(x, xlen, "x")?;
        let y = slice_arg(y, n, "y")?;
        let a = slice_arg(adjacency, cells, "adjacency")?;
        let d = Adjacency::from_dense(n, a.to_vec())?;
        let x = DMatrix::from_row_slice(n, k, x);
        let s = NetworkSample::new(x, y.to_vec(), d, None)?;
        store(out, NmSample(s))
    })
}

/// Releases a sample. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_free(s: *mut NmSample) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of agents; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live sample handle.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_n(s: *const NmSample) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

/// Number of covariates; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live sample handle.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_k(s: *const NmSample) -> usize {
    s.as_ref().map_or(0, |s| s.0.k())
}

/// Copies the covariates (`n×k`, row-major) into `buf`.
///
/// # Safety
/// `s` must be a live sample handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_copy_x(s: *const NmSample, buf: *mut f64, len: usize) -> NmStatus {
    guard(|| {
        let s = sample_ref(s)?;
        let (n, k) = (s.n(), s.k());
        let out = out_buffer(buf, len, n * k, "x buffer")?;
        for i in 0..n {
            for c in 0..k {
                out[i * k + c] = s.x()[(i, c)];
            }
        }
        Ok(())
    })
}

/// Copies the `n` outcomes into `buf`.
///
/// # Safety
/// `s` must be a live sample handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_copy_y(s: *const NmSample, buf: *mut u8, len: usize) -> NmStatus {
    guard(|| {
        let s = sample_ref(s)?;
        out_buffer(buf, len, s.n(), "y buffer")?.copy_from_slice(s.y());
        Ok(())
    })
}

/// Copies the `n×n` adjacency matrix (row-major) into `buf`.
///
/// # Safety
/// `s` must be a live sample handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nm_sample_copy_adjacency(
    s: *const NmSample,
    buf: *mut u8,
    len: usize,
) -> NmStatus {
    guard(|| {
        let s = sample_ref(s)?;
        let cells = s.adjacency().cells();
        out_buffer(buf, len, cells.len(), "adjacency buffer")?.copy_from_slice(cells);
        Ok(())
    })
}

/// Writes the `n×n` codegree distance matrix (row-major) into `buf`.
///
/// # Safety
/// `s` must be a live sample handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nm_codegree_distance(
    s: *const NmSample,
    buf: *mut f64,
    len: usize,
) -> NmStatus {
    guard(|| {
        let s = sample_ref(s)?;
        let n = s.n();
        let out = out_buffer(buf, len, n * n, "distance buffer")?;
        let c = netmatch::codegree_distance_matrix(s.adjacency());
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = c.get(i, j);
            }
        }
        Ok(())
    })
}

/// Runs the matched estimator and the social-influence recovery.
///
/// A run that stops before meeting its tolerance still returns `Ok`; check
/// [`nm_result_converged`]. `config` may be null for defaults.
///
/// # Safety
/// `s` must be a live sample handle, `config` null or valid, and `out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nm_estimate(
    s: *const NmSample,
    config: *const NmEstimatorConfig,
    out: *mut *mut NmResult,
) -> NmStatus {
    guard(|| {
        let s = sample_ref(s)?;
        let cfg = match config.as_ref() {
            Some(c) => to_config(c)?,
            None => EstimatorConfig::default(),
        };
        let r = netmatch::estimate(s, &cfg)?;
        store(out, NmResult(r))
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nm_result_free(r: *mut NmResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of slope coefficients; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nm_result_k(r: *const NmResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.beta_hat.len())
}

/// Number of agents with a social-influence entry; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nm_result_n(r: *const NmResult) -> usize {
    r.as_ref()
        .and_then(|r| r.0.lambda_hat.as_ref())
        .map_or(0, |l| l.len())
}

/// 1 if the optimiser met its tolerance, 0 otherwise or for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nm_result_converged(r: *const NmResult) -> i32 {
    r.as_ref().map_or(0, |r| r.0.converged as i32)
}

/// Newton iterations used; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nm_result_iterations(r: *const NmResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.iterations)
}

/// Final gradient norm; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nm_result_gradient_norm(r: *const NmResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.gradient_norm)
}

/// Total kernel weight over discordant pairs; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn nm_result_effective_pair_mass(r: *const NmResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.effective_pair_mass)
}

/// Copies the slope estimate into `buf`.
///
/// # Safety
/// `r` must be a live result handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nm_result_beta(r: *const NmResult, buf: *mut f64, len: usize) -> NmStatus {
    guard(|| {
        let r = result_ref(r)?;
        out_buffer(buf, len, r.beta_hat.len(), "beta buffer")?.copy_from_slice(&r.beta_hat);
        Ok(())
    })
}

/// Copies the per-agent social-influence estimates into `buf`; agents with
/// no positive kernel weight get NaN.
///
/// # Safety
/// `r` must be a live result handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nm_result_lambda(r: *const NmResult, buf: *mut f64, len: usize) -> NmStatus {
    guard(|| {
        let r = result_ref(r)?;
        let lambda = r
            .lambda_hat
            .as_ref()
            .ok_or_else(|| fail(NmStatus::Precondition, "result carries no lambda estimates"))?;
        let out = out_buffer(buf, len, lambda.len(), "lambda buffer")?;
        for (o, v) in out.iter_mut().zip(lambda) {
            *o = v.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Epanechnikov weight `K(δ̂²/h)`; NaN when `h` is not positive.
#[no_mangle]
pub extern "C" fn nm_kernel_weight(delta_hat: f64, h: f64) -> f64 {
    if h.is_nan() || h <= 0.0 {
        return f64::NAN;
    }
    let spec = KernelSpec {
        kernel: Kernel::Epanechnikov,
        bandwidth: BandwidthRule::Fixed(h),
    };
    netmatch::kernel_weight(&spec, delta_hat, h)
}

/// Default bandwidth `n^(-1/9)/10`; NaN for `n = 0`.
#[no_mangle]
pub extern "C" fn nm_bandwidth(n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    BandwidthRule::Standard.bandwidth(n).unwrap_or(f64::NAN)
}
