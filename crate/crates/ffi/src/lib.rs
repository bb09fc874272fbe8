//! C interface to the block and canonical-basis computations.
//!
//! Functions return a [`GlbStatus`]. Results come back through out-pointers:
//! strings are NUL-terminated UTF-8 owned by the caller and released with
//! [`glb_string_free`]; block handles are released with [`glb_block_free`].
//! After a failure, [`glb_last_error`] describes it on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use glblocks::blockan::{cartan_entry, graded_cartan, h_count};
use glblocks::combinat::{BlockKey, Composition};
use glblocks::qcanon::{dual_canonical, parse_key, parse_signs};
use glblocks::verify::{self, Options, Profile};
use glblocks::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    ComputationFailed = 4,
    VerificationFailed = 5,
    Panic = 6,
}

/// Opaque handle to a block of gl(m|n).
pub struct GlbBlock {
    key: BlockKey,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> GlbStatus {
    match e {
        Error::Invalid(_) => GlbStatus::InvalidInput,
        _ => GlbStatus::ComputationFailed,
    }
}

/// Runs `f`, recording errors and converting panics into [`GlbStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (GlbStatus, String)>) -> GlbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GlbStatus::Panic
        }
    }
}

fn lib<T>(r: glblocks::Result<T>) -> Result<T, (GlbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GlbStatus, String)> {
    if p.is_null() {
        return Err((GlbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GlbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (GlbStatus, String)> {
    if out.is_null() {
        return Err((GlbStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| (GlbStatus::ComputationFailed, "result contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// # Safety
/// `block` must be null or a live handle from [`glb_block_new`].
unsafe fn read_block<'a>(block: *const GlbBlock) -> Result<&'a GlbBlock, (GlbStatus, String)> {
    block.as_ref().ok_or((GlbStatus::NullPointer, "block handle is null".into()))
}

/// Message for the most recent failure on this thread, or null if none.
/// The caller owns the string and frees it with [`glb_string_free`].
#[no_mangle]
pub extern "C" fn glb_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn glb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a block handle from a key such as `"mu=0;nu=2:1;t=1"`.
///
/// # Safety
/// `key` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn glb_block_new(m: usize, n: usize, key: *const c_char, out: *mut *mut GlbBlock) -> GlbStatus {
    guard(|| {
        if out.is_null() {
            return Err((GlbStatus::NullPointer, "output pointer is null".into()));
        }
        let key = lib(BlockKey::parse(read_str(key, "key")?, m, n))?;
        *out = Box::into_raw(Box::new(GlbBlock { key }));
        Ok(())
    })
}

/// Releases a block handle.
///
/// # Safety
/// `block` must be null or a handle from [`glb_block_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glb_block_free(block: *mut GlbBlock) {
    if !block.is_null() {
        drop(Box::from_raw(block));
    }
}

/// Atypicality `t` of the block, or `-1` for a null handle.
///
/// # Safety
/// `block` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glb_block_atypicality(block: *const GlbBlock) -> i64 {
    block.as_ref().map_or(-1, |b| b.key.t as i64)
}

/// Cartan entry `[P(lambda) : L(kappa)]` as a decimal string.
///
/// # Safety
/// `block` must be a live handle, `lambda` and `kappa` NUL-terminated
/// compositions, and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn glb_cartan_entry(
    block: *const GlbBlock,
    lambda: *const c_char,
    kappa: *const c_char,
    out: *mut *mut c_char,
) -> GlbStatus {
    guard(|| {
        let b = read_block(block)?;
        let lam: Composition = lib(read_str(lambda, "lambda")?.parse())?;
        let kap: Composition = lib(read_str(kappa, "kappa")?.parse())?;
        let v = lib(cartan_entry(&b.key, &lam, &kap))?;
        write_string(out, v.to_string())
    })
}

/// Graded Cartan entry as a JSON object mapping exponents to coefficients.
///
/// # Safety
/// Same contract as [`glb_cartan_entry`].
#[no_mangle]
pub unsafe extern "C" fn glb_graded_cartan(
    block: *const GlbBlock,
    lambda: *const c_char,
    kappa: *const c_char,
    out: *mut *mut c_char,
) -> GlbStatus {
    guard(|| {
        let b = read_block(block)?;
        let lam: Composition = lib(read_str(lambda, "lambda")?.parse())?;
        let kap: Composition = lib(read_str(kappa, "kappa")?.parse())?;
        let v = lib(graded_cartan(&b.key, &lam, &kap))?;
        write_string(out, v.to_json_value().to_string())
    })
}

/// Number of simples in the projective cover of `lambda`, as a decimal string.
///
/// # Safety
/// `lambda` must be NUL-terminated and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn glb_h_count(lambda: *const c_char, out: *mut *mut c_char) -> GlbStatus {
    guard(|| {
        let lam: Composition = lib(read_str(lambda, "lambda")?.parse())?;
        write_string(out, h_count(&lam).to_string())
    })
}

/// Dual canonical basis vector on rank-`rank` tensor space as
/// `{"terms":[{"key":[..],"coeff":{..}}]}`.
///
/// # Safety
/// `signs` and `key` must be NUL-terminated and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn glb_dual_canonical(
    rank: usize,
    signs: *const c_char,
    key: *const c_char,
    out: *mut *mut c_char,
) -> GlbStatus {
    guard(|| {
        let signs = lib(parse_signs(read_str(signs, "signs")?))?;
        let key = lib(parse_key(read_str(key, "key")?))?;
        let v = lib(dual_canonical(rank, &signs, &key, None))?;
        write_string(out, serde_json::json!({ "terms": v.terms_json() }).to_string())
    })
}

/// Runs the verification suite (`"quick"` or `"full"`) and writes the JSON
/// report. Returns [`GlbStatus::VerificationFailed`] if any criterion fails.
///
/// # Safety
/// `profile` must be NUL-terminated and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn glb_verify(profile: *const c_char, out: *mut *mut c_char) -> GlbStatus {
    let mut passed = false;
    let status = guard(|| {
        let profile: Profile = lib(read_str(profile, "profile")?.parse())?;
        let report = verify::run(Options { profile, inject: None });
        passed = report.passed;
        let text = serde_json::to_string(&report).map_err(|e| (GlbStatus::ComputationFailed, e.to_string()))?;
        write_string(out, text)
    });
    if status == GlbStatus::Ok && !passed {
        set_error("verification failed");
        return GlbStatus::VerificationFailed;
    }
    status
}
