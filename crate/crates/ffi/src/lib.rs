//! C ABI over `opchain-core`.
//!
//! Maps and witnesses cross the boundary as opaque handles. Every call
//! returns an [`OpchainStatus`]; on failure the message is available from
//! [`opchain_last_error_message`] on the same thread. Strings handed out by
//! this library must be released with [`opchain_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opchain::classify::{self, Membership};
use opchain::factorize::{self, FactorizationWitness, GeneratorParams};
use opchain::{ChainModel, Error, PiecewiseMap, Rational};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpchainStatus {
    Ok = 0,
    /// A required pointer argument was null.
    Null = 1,
    /// Input text was not valid UTF-8, JSON or a rational.
    Parse = 2,
    /// The map is not orientation-preserving.
    NotOp = 3,
    /// A witness failed verification.
    Verification = 4,
    /// Any other rejected input (bad parameters, domain errors, ...).
    Invalid = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

/// Membership class reported by [`opchain_map_classify`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpchainMembership {
    OrderPreserving = 0,
    OrientationOnly = 1,
    Neither = 2,
}

/// Opaque piecewise map.
pub struct OpMap {
    inner: PiecewiseMap,
}

/// Opaque factorization witness.
pub struct OpWitness {
    inner: FactorizationWitness,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> OpchainStatus {
    match err {
        Error::Parse(_) => OpchainStatus::Parse,
        Error::NotOp => OpchainStatus::NotOp,
        Error::VerificationFailed(_) => OpchainStatus::Verification,
        _ => OpchainStatus::Invalid,
    }
}

fn fail(status: OpchainStatus, msg: impl Into<String>) -> OpchainStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), OpchainStatus>) -> OpchainStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OpchainStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(OpchainStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn lift<T>(r: opchain::Result<T>) -> Result<T, OpchainStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, OpchainStatus> {
    if p.is_null() {
        return Err(fail(OpchainStatus::Null, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(OpchainStatus::Parse, "string is not valid UTF-8"))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, OpchainStatus> {
    p.as_mut()
        .ok_or_else(|| fail(OpchainStatus::Null, "null output pointer"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, OpchainStatus> {
    p.as_ref()
        .ok_or_else(|| fail(OpchainStatus::Null, "null handle"))
}

fn to_c_string(s: String) -> Result<*mut c_char, OpchainStatus> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| fail(OpchainStatus::Invalid, "output contains a NUL byte"))
}

/// Message for the most recent failure on this thread, or null.
///
/// The pointer stays valid until the next call into this library on the
/// same thread. Do not free it.
#[no_mangle]
pub extern "C" fn opchain_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn opchain_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a map from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opchain_map_from_json(
    json: *const c_char,
    out: *mut *mut OpMap,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inner = lift(PiecewiseMap::from_json(read_str(json)?))?;
        *out = Box::into_raw(Box::new(OpMap { inner }));
        Ok(())
    })
}

/// Serializes a map to JSON. Free the result with [`opchain_string_free`].
///
/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opchain_map_to_json(
    map: *const OpMap,
    out: *mut *mut c_char,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = to_c_string(handle(map)?.inner.to_json())?;
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opchain_map_free(map: *mut OpMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Evaluates `map` at the rational `x` (for example `"-3/4"`). The value
/// is written as a string; free it with [`opchain_string_free`].
///
/// # Safety
/// `map` must be a live handle, `x` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_map_evaluate(
    map: *const OpMap,
    x: *const c_char,
    out: *mut *mut c_char,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let map = handle(map)?;
        let x: Rational = lift(read_str(x)?.parse())?;
        let y = lift(map.inner.evaluate(&x))?;
        *out = to_c_string(y.to_string())?;
        Ok(())
    })
}

/// Composes left to right: the result sends x to `second(first(x))`.
///
/// # Safety
/// Both handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_map_compose(
    first: *const OpMap,
    second: *const OpMap,
    out: *mut *mut OpMap,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inner = lift(handle(first)?.inner.compose(&handle(second)?.inner))?;
        *out = Box::into_raw(Box::new(OpMap { inner }));
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_map_classify(
    map: *const OpMap,
    out: *mut OpchainMembership,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = match classify::membership(&handle(map)?.inner) {
            Membership::OrderPreserving => OpchainMembership::OrderPreserving,
            Membership::OrientationOnly => OpchainMembership::OrientationOnly,
            Membership::Neither => OpchainMembership::Neither,
        };
        Ok(())
    })
}

unsafe fn read_params(
    model: &ChainModel,
    params_json: *const c_char,
) -> Result<GeneratorParams, OpchainStatus> {
    if params_json.is_null() {
        return Ok(GeneratorParams::default_for(model));
    }
    serde_json::from_str(read_str(params_json)?)
        .map_err(|e| fail(OpchainStatus::Parse, e.to_string()))
}

/// Builds the distinguished generator for a chain model given as JSON.
/// `params_json` may be null to use the default parameters.
///
/// # Safety
/// `model_json` must be NUL-terminated, `params_json` null or
/// NUL-terminated, and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_generator(
    model_json: *const c_char,
    params_json: *const c_char,
    out: *mut *mut OpMap,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let model: ChainModel = serde_json::from_str(read_str(model_json)?)
            .map_err(|e| fail(OpchainStatus::Parse, e.to_string()))?;
        lift(model.validate())?;
        let params = read_params(&model, params_json)?;
        let inner = lift(factorize::model_generator(&model, &params))?;
        *out = Box::into_raw(Box::new(OpMap { inner }));
        Ok(())
    })
}

/// Factors `map` into order-preserving maps and generators.
/// `params_json` may be null to use the default parameters.
///
/// # Safety
/// `map` must be a live handle, `params_json` null or NUL-terminated, and
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_factorize(
    map: *const OpMap,
    params_json: *const c_char,
    out: *mut *mut OpWitness,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let map = &handle(map)?.inner;
        let params = read_params(&map.model, params_json)?;
        let inner = lift(factorize::factor(map, &params))?;
        *out = Box::into_raw(Box::new(OpWitness { inner }));
        Ok(())
    })
}

/// # Safety
/// `json` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_witness_from_json(
    json: *const c_char,
    out: *mut *mut OpWitness,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inner = lift(FactorizationWitness::from_json(read_str(json)?))?;
        *out = Box::into_raw(Box::new(OpWitness { inner }));
        Ok(())
    })
}

/// Serializes a witness. Free the result with [`opchain_string_free`].
///
/// # Safety
/// `w` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_witness_to_json(
    w: *const OpWitness,
    out: *mut *mut c_char,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = to_c_string(handle(w)?.inner.to_json())?;
        Ok(())
    })
}

/// Re-checks a witness on `samples` points drawn with `seed`. A witness
/// that fails sets `*passed` to false and returns `Verification`.
///
/// # Safety
/// `w` must be a live handle and `passed` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_witness_verify(
    w: *const OpWitness,
    samples: usize,
    seed: u64,
    passed: *mut bool,
) -> OpchainStatus {
    guard(|| {
        let passed = out_ptr(passed)?;
        let report = factorize::verify_witness(&handle(w)?.inner, samples, seed);
        *passed = report.all_pass();
        if *passed {
            Ok(())
        } else {
            Err(fail(OpchainStatus::Verification, report.summary()))
        }
    })
}

/// # Safety
/// `w` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_witness_factor_count(
    w: *const OpWitness,
    out: *mut usize,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = handle(w)?.inner.factors.len();
        Ok(())
    })
}

/// # Safety
/// `w` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn opchain_witness_generator_count(
    w: *const OpWitness,
    out: *mut usize,
) -> OpchainStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = handle(w)?.inner.generator_count();
        Ok(())
    })
}

/// # Safety
/// `w` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opchain_witness_free(w: *mut OpWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}
