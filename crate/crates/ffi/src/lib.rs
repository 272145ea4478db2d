//! C ABI over the `sfcavail` engine.
//!
//! Objects cross the boundary as opaque handles, created by
//! `sfc_chain_from_*` or `sfc_chain_optimize` and released by the matching
//! `*_free`. Every fallible function
//! returns an [`SfcStatus`]; on failure a message is available from
//! [`sfc_last_error`] on the calling thread. Strings returned by the library
//! are NUL-terminated UTF-8 and must be released with [`sfc_string_free`].
//! Panics never unwind across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sfcavail::config::ConfigFile;
use sfcavail::optimizer::{self, Outcome};
use sfcavail::sensitivity::{self, Parameter};
use sfcavail::sim::{simulate_chain, SimConfig};
use sfcavail::{ChainEvaluator, ChainSpec, RedundancyVector};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The configuration is unreadable or invalid.
    Config = 3,
    /// The model rejected the arguments (bad redundancy vector, rates, ...).
    Model = 4,
    /// No configuration meets the availability target.
    Infeasible = 5,
    /// A caller-provided buffer is too small or an index is out of range.
    OutOfRange = 6,
    /// Internal failure; the handle involved should not be reused.
    Panic = 7,
}

/// A loaded chain with its availability target and memoized subsystem
/// distributions.
pub struct SfcChain {
    evaluator: ChainEvaluator,
    target: f64,
}

/// Minimal-cost configurations returned by [`sfc_chain_optimize`].
pub struct SfcOptimum {
    min_cost: f64,
    optima: Vec<RedundancyVector>,
    availabilities: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let message = CString::new(bytes).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn fail(status: SfcStatus, message: impl Into<String>) -> SfcStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> SfcStatus) -> SfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == SfcStatus::Ok {
                set_error("");
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SfcStatus::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SfcStatus> {
    if s.is_null() {
        return Err(fail(SfcStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(SfcStatus::InvalidUtf8, e.to_string()))
}

unsafe fn read_l(l: *const u32, len: usize) -> Result<RedundancyVector, SfcStatus> {
    if l.is_null() {
        return Err(fail(SfcStatus::NullPointer, "redundancy vector is null"));
    }
    Ok(RedundancyVector(std::slice::from_raw_parts(l, len).to_vec()))
}

unsafe fn chain_ref<'a>(chain: *const SfcChain) -> Result<&'a SfcChain, SfcStatus> {
    chain.as_ref().ok_or_else(|| fail(SfcStatus::NullPointer, "chain handle is null"))
}

fn model_err(e: sfcavail::Error) -> SfcStatus {
    fail(SfcStatus::Model, e.to_string())
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(SfcStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

fn new_chain(config: ConfigFile, out: *mut *mut SfcChain) -> SfcStatus {
    let spec: ChainSpec = config.chain_spec();
    let evaluator = tri!(ChainEvaluator::new(&spec).map_err(|e| fail(SfcStatus::Config, e.to_string())));
    let handle = Box::new(SfcChain { evaluator, target: config.targets.a0 });
    // SAFETY: caller guarantees `out` is valid for writes; checked non-null.
    unsafe { *out = Box::into_raw(handle) };
    SfcStatus::Ok
}

/// Loads a chain from a JSON configuration document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_from_json(json: *const c_char, out: *mut *mut SfcChain) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        *out = ptr::null_mut();
        let text = tri!(read_str(json));
        let config = tri!(ConfigFile::from_json_str(text).map_err(|e| fail(SfcStatus::Config, e.to_string())));
        new_chain(config, out)
    })
}

/// Loads a chain from a JSON configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_from_file(path: *const c_char, out: *mut *mut SfcChain) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        *out = ptr::null_mut();
        let path = tri!(read_str(path));
        let config = tri!(ConfigFile::load(path).map_err(|e| fail(SfcStatus::Config, e.to_string())));
        new_chain(config, out)
    })
}

/// Releases a chain. Null is ignored.
///
/// # Safety
/// `chain` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_free(chain: *mut SfcChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of subsystems, i.e. the length of every redundancy vector.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_subsystem_count(chain: *const SfcChain, out: *mut usize) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        let chain = tri!(chain_ref(chain));
        *out = chain.evaluator.spec().subsystems.len();
        SfcStatus::Ok
    })
}

/// Availability target stored in the configuration.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_target(chain: *const SfcChain, out: *mut f64) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        *out = tri!(chain_ref(chain)).target;
        SfcStatus::Ok
    })
}

/// Steady-state availability of redundancy vector `l[0..len]`.
///
/// # Safety
/// `l` must point to `len` readable values and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_availability(
    chain: *const SfcChain,
    l: *const u32,
    len: usize,
    out: *mut f64,
) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        let chain = tri!(chain_ref(chain));
        let l = tri!(read_l(l, len));
        *out = tri!(chain.evaluator.availability(&l).map_err(model_err));
        SfcStatus::Ok
    })
}

/// Chain performance distribution as JSON
/// (`{"dimension":K,"terms":[{"g":[..],"p":..},..]}`), written to `*out`.
///
/// # Safety
/// `l` must point to `len` readable values and `out` be valid for writes.
/// The string must be released with [`sfc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_distribution_json(
    chain: *const SfcChain,
    l: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        *out = ptr::null_mut();
        let chain = tri!(chain_ref(chain));
        let l = tri!(read_l(l, len));
        let dist = tri!(chain.evaluator.distribution(&l).map_err(model_err));
        let json = serde_json::to_string(&dist).expect("distribution serializes");
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        SfcStatus::Ok
    })
}

/// Exhaustive minimal-cost search. A non-positive `target` selects the
/// configuration's own target. Returns [`SfcStatus::Infeasible`] (and a null
/// handle) when no configuration qualifies.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_optimize(chain: *const SfcChain, target: f64, out: *mut *mut SfcOptimum) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        *out = ptr::null_mut();
        let chain = tri!(chain_ref(chain));
        let target = if target > 0.0 { target } else { chain.target };
        match tri!(optimizer::optimize_with(&chain.evaluator, target).map_err(model_err)) {
            Outcome::Optimal(r) => {
                let handle = SfcOptimum { min_cost: r.min_cost, optima: r.optima, availabilities: r.availabilities };
                *out = Box::into_raw(Box::new(handle));
                SfcStatus::Ok
            }
            Outcome::Infeasible(r) => fail(
                SfcStatus::Infeasible,
                format!("target {target} unreachable; best {} gives {}", r.best, r.best_availability),
            ),
        }
    })
}

/// Number of tied optima (at least one).
///
/// # Safety
/// `opt` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_optimum_count(opt: *const SfcOptimum, out: *mut usize) -> SfcStatus {
    guard(|| {
        nonnull!(opt, out);
        *out = (*opt).optima.len();
        SfcStatus::Ok
    })
}

/// Cost shared by every optimum.
///
/// # Safety
/// `opt` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sfc_optimum_min_cost(opt: *const SfcOptimum, out: *mut f64) -> SfcStatus {
    guard(|| {
        nonnull!(opt, out);
        *out = (*opt).min_cost;
        SfcStatus::Ok
    })
}

/// Copies optimum `index` into `l[0..len]` and its availability into
/// `*availability` (which may be null).
///
/// # Safety
/// `l` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn sfc_optimum_get(
    opt: *const SfcOptimum,
    index: usize,
    l: *mut u32,
    len: usize,
    availability: *mut f64,
) -> SfcStatus {
    guard(|| {
        nonnull!(opt, l);
        let opt = &*opt;
        let Some(config) = opt.optima.get(index) else {
            return fail(SfcStatus::OutOfRange, format!("index {index} beyond {} optima", opt.optima.len()));
        };
        if len < config.len() {
            return fail(SfcStatus::OutOfRange, format!("buffer holds {len} values, need {}", config.len()));
        }
        std::slice::from_raw_parts_mut(l, config.len()).copy_from_slice(config.as_slice());
        if !availability.is_null() {
            *availability = opt.availabilities[index];
        }
        SfcStatus::Ok
    })
}

/// Releases an optimization result. Null is ignored.
///
/// # Safety
/// `opt` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sfc_optimum_free(opt: *mut SfcOptimum) {
    if !opt.is_null() {
        drop(Box::from_raw(opt));
    }
}

/// Rate (per second) of `param` at which configuration `l` stops meeting
/// `target`, all other rates nominal. `param` is one of `lambda_s`, `mu_s`,
/// `lambda_v`, `mu_v`, `lambda_h`, `mu_h`.
///
/// # Safety
/// Pointer arguments must be valid as documented on the other functions.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_threshold(
    chain: *const SfcChain,
    l: *const u32,
    len: usize,
    param: *const c_char,
    target: f64,
    out: *mut f64,
) -> SfcStatus {
    guard(|| {
        nonnull!(out);
        let chain = tri!(chain_ref(chain));
        let l = tri!(read_l(l, len));
        let name = tri!(read_str(param));
        let parameter: Parameter = tri!(name.parse().map_err(model_err));
        let target = if target > 0.0 { target } else { chain.target };
        let t = tri!(sensitivity::find_threshold(chain.evaluator.spec(), &l, parameter, target).map_err(model_err));
        *out = t.per_second;
        SfcStatus::Ok
    })
}

/// Monte Carlo availability estimate; warmup is 1% of `horizon` seconds.
/// `std_error` may be null.
///
/// # Safety
/// Pointer arguments must be valid as documented on the other functions.
#[no_mangle]
pub unsafe extern "C" fn sfc_chain_simulate(
    chain: *const SfcChain,
    l: *const u32,
    len: usize,
    horizon: f64,
    seed: u64,
    replications: u32,
    mean: *mut f64,
    std_error: *mut f64,
) -> SfcStatus {
    guard(|| {
        nonnull!(mean);
        let chain = tri!(chain_ref(chain));
        let l = tri!(read_l(l, len));
        let cfg = SimConfig::new(horizon, seed, replications);
        let est = tri!(simulate_chain(chain.evaluator.spec(), &l, &cfg).map_err(model_err));
        *mean = est.availability_mean;
        if !std_error.is_null() {
            *std_error = est.std_error;
        }
        SfcStatus::Ok
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn sfc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sfc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sfc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
