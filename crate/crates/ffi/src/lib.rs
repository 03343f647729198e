//! C ABI over the simulator.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns an
//! [`SaStatus`] and leaves a message for [`sa_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use social_assoc::sim::{
    export_results, overhead_bounds, run_experiment, Approach, ExperimentResult, ExperimentSummary,
    ScenarioConfig,
};
use social_assoc::Error;

/// Status codes. Values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaStatus {
    Ok = 0,
    Invariant = 1,
    Config = 2,
    TooLarge = 3,
    Io = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Association schemes evaluated by a campaign.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaApproach {
    Proposed = 0,
    MaxRssi = 1,
    Random = 2,
}

impl From<SaApproach> for Approach {
    fn from(a: SaApproach) -> Self {
        match a {
            SaApproach::Proposed => Approach::Proposed,
            SaApproach::MaxRssi => Approach::MaxRssi,
            SaApproach::Random => Approach::Random,
        }
    }
}

/// Approach bits for the mask taken by [`sa_run_experiment`].
pub const SA_MASK_PROPOSED: u32 = 1;
pub const SA_MASK_MAX_RSSI: u32 = 2;
pub const SA_MASK_RANDOM: u32 = 4;
pub const SA_MASK_ALL: u32 = 7;

/// Opaque scenario configuration.
pub struct SaConfig(ScenarioConfig);

/// Opaque campaign result.
pub struct SaResult(ExperimentResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> SaStatus {
    match e.exit_code() {
        2 => SaStatus::Config,
        3 => SaStatus::TooLarge,
        4 => SaStatus::Io,
        _ => SaStatus::Invariant,
    }
}

fn fail(status: SaStatus, msg: impl Into<String>) -> SaStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SaStatus) -> SaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SaStatus::Panic, "panic inside social_assoc"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, SaStatus> {
    if p.is_null() {
        return Err(fail(SaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New configuration holding the built-in defaults.
#[no_mangle]
pub extern "C" fn sa_config_default() -> *mut SaConfig {
    Box::into_raw(Box::new(SaConfig(ScenarioConfig::default())))
}

/// Parses a `key = value` configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sa_config_load(path: *const c_char, out: *mut *mut SaConfig) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SaStatus::NullPointer, "out is null");
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match ScenarioConfig::load(Path::new(path)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(SaConfig(cfg)));
                SaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Sets one configuration key from its textual value.
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn sa_config_set(cfg: *mut SaConfig, key: *const c_char, value: *const c_char) -> SaStatus {
    guard(|| {
        let Some(cfg) = cfg.as_mut() else {
            return fail(SaStatus::NullPointer, "config is null");
        };
        let (key, value) = match (str_arg(key, "key"), str_arg(value, "value")) {
            (Ok(k), Ok(v)) => (k, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match cfg.0.set(key, value) {
            Ok(()) => SaStatus::Ok,
            Err(msg) => fail(SaStatus::Config, msg),
        }
    })
}

/// Checks ranges and cross-field constraints.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sa_config_validate(cfg: *const SaConfig) -> SaStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(SaStatus::NullPointer, "config is null");
        };
        match cfg.0.validate() {
            Ok(()) => SaStatus::Ok,
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// The configuration in file syntax. Free with [`sa_string_free`].
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sa_config_to_text(cfg: *const SaConfig) -> *mut c_char {
    match cfg.as_ref() {
        Some(cfg) => into_c_string(cfg.0.to_text()),
        None => {
            set_error("config is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `cfg` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sa_config_free(cfg: *mut SaConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs a Monte-Carlo campaign for the approaches selected in `mask`.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sa_run_experiment(cfg: *const SaConfig, mask: u32, out: *mut *mut SaResult) -> SaStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(SaStatus::NullPointer, "config is null");
        };
        if out.is_null() {
            return fail(SaStatus::NullPointer, "out is null");
        }
        let approaches: Vec<Approach> = [
            (SA_MASK_PROPOSED, Approach::Proposed),
            (SA_MASK_MAX_RSSI, Approach::MaxRssi),
            (SA_MASK_RANDOM, Approach::Random),
        ]
        .into_iter()
        .filter(|(bit, _)| mask & bit != 0)
        .map(|(_, a)| a)
        .collect();
        if approaches.is_empty() || mask & !SA_MASK_ALL != 0 {
            return fail(SaStatus::Config, format!("invalid approach mask {mask:#x}"));
        }
        match run_experiment(&cfg.0, &approaches) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(SaResult(r)));
                SaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Average network sum rate of one approach, in bit/s.
///
/// # Safety
/// `res` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sa_result_avg_sum_rate(res: *const SaResult, approach: SaApproach, out: *mut f64) -> SaStatus {
    guard(|| {
        let (Some(res), false) = (res.as_ref(), out.is_null()) else {
            return fail(SaStatus::NullPointer, "result or out is null");
        };
        match res.0.report.get(approach.into()) {
            Some(s) => {
                *out = s.avg_sum_rate;
                SaStatus::Ok
            }
            None => fail(SaStatus::Config, format!("approach {} was not run", Approach::from(approach))),
        }
    })
}

/// Per-UE rate percentile `q` in `[0, 1]` of one approach, in bit/s.
///
/// # Safety
/// `res` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sa_result_ue_rate_percentile(
    res: *const SaResult,
    approach: SaApproach,
    q: f64,
    out: *mut f64,
) -> SaStatus {
    guard(|| {
        let (Some(res), false) = (res.as_ref(), out.is_null()) else {
            return fail(SaStatus::NullPointer, "result or out is null");
        };
        let Some(s) = res.0.report.get(approach.into()) else {
            return fail(SaStatus::Config, format!("approach {} was not run", Approach::from(approach)));
        };
        match social_assoc::sim::percentile(&s.ue_rate_samples, q) {
            Ok(v) => {
                *out = v;
                SaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Number of Monte-Carlo runs held by the result.
///
/// # Safety
/// `res` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sa_result_run_count(res: *const SaResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.runs.len())
}

/// Summary JSON as written to `summary.json`. Free with [`sa_string_free`].
///
/// # Safety
/// `res` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sa_result_summary_json(res: *const SaResult) -> *mut c_char {
    match res.as_ref() {
        Some(r) => into_c_string(ExperimentSummary::of(&r.0).to_json()),
        None => {
            set_error("result is null");
            ptr::null_mut()
        }
    }
}

/// Writes every result file into `dir`.
///
/// # Safety
/// `res` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sa_result_export(res: *const SaResult, dir: *const c_char) -> SaStatus {
    guard(|| {
        let Some(res) = res.as_ref() else {
            return fail(SaStatus::NullPointer, "result is null");
        };
        let dir = match str_arg(dir, "dir") {
            Ok(d) => d,
            Err(s) => return s,
        };
        match export_results(&res.0, Path::new(dir)) {
            Ok(_) => SaStatus::Ok,
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `res` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sa_result_free(res: *mut SaResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Closed-form signalling-overhead bound of one cluster.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sa_overhead_bound(m_c: usize, phi_s: f64, phi_c: usize, out: *mut f64) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SaStatus::NullPointer, "out is null");
        }
        match overhead_bounds(m_c, phi_s, phi_c) {
            Ok(v) => {
                *out = v;
                SaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}
