//! C ABI over `tlemma`.
//!
//! Handles are opaque pointers created by `*_parse`/`tlemma_enumerate` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`TlemmaStatus`]; the message of the last failure on the calling thread is
//! available from [`tlemma_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use tlemma::frontend::print::render_lemma_file;
use tlemma::oracle::Backend;
use tlemma::strategies::run_strategy;
use tlemma::verifier::{check_lemmas, classify};
use tlemma::{Error, Instance, LemmaSet, Oracle, OracleConfig, StrategySpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlemmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Unsupported = 4,
    UnknownStrategy = 5,
    /// The budget lapsed; the returned lemma set is partial.
    BudgetExceeded = 6,
    CapExceeded = 7,
    Oracle = 8,
    OutOfRange = 9,
    Internal = 10,
    Panic = 11,
}

/// A parsed instance.
pub struct TlemmaInstance {
    inner: Instance,
}

/// A deduplicated lemma set.
pub struct TlemmaLemmaSet {
    inner: LemmaSet,
}

/// Verification outcome.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TlemmaVerdict {
    pub rules_out: bool,
    pub lemmas_valid: bool,
    pub atoms_in_theory: bool,
    pub abstraction_equivalent: bool,
    pub n_ctta: usize,
    pub n_itta: usize,
}

/// Enumeration options. Zero `workers` means one worker; a non-positive
/// `budget_secs` means no budget; a null `oracle_cmd` selects the builtin
/// procedure.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TlemmaOptions {
    pub workers: usize,
    pub budget_secs: f64,
    pub early_pruning: u32,
    pub subsume: bool,
    pub oracle_cmd: *const c_char,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let c = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TlemmaStatus {
    match e {
        Error::Parse { .. } | Error::LemmaFile(_) => TlemmaStatus::Parse,
        Error::Unsupported { .. } => TlemmaStatus::Unsupported,
        Error::ExternalSolver(_) | Error::OracleTimeout(_) => TlemmaStatus::Oracle,
        Error::BudgetExceeded(_) => TlemmaStatus::BudgetExceeded,
        Error::CapExceeded { .. } => TlemmaStatus::CapExceeded,
        _ => TlemmaStatus::Internal,
    }
}

fn fail(status: TlemmaStatus, msg: impl std::fmt::Display) -> TlemmaStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> TlemmaStatus) -> TlemmaStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(TlemmaStatus::Panic, "panic inside tlemma"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, TlemmaStatus> {
    if p.is_null() {
        return Err(fail(TlemmaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TlemmaStatus::InvalidUtf8, "argument is not UTF-8"))
}

/// Message of the last failed call on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tlemma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tlemma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default options: one worker, no budget, builtin oracle.
#[no_mangle]
pub extern "C" fn tlemma_options_default() -> TlemmaOptions {
    TlemmaOptions {
        workers: 1,
        budget_secs: 0.0,
        early_pruning: 0,
        subsume: false,
        oracle_cmd: ptr::null(),
    }
}

/// Parses an SMT-LIB2 script.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tlemma_instance_parse(text: *const c_char, out: *mut *mut TlemmaInstance) -> TlemmaStatus {
    guard(|| {
        if out.is_null() {
            return fail(TlemmaStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Instance::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TlemmaInstance { inner }));
                TlemmaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e),
        }
    })
}

/// # Safety
/// `inst` must come from [`tlemma_instance_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn tlemma_instance_free(inst: *mut TlemmaInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of atoms (theory and Boolean); 0 for a null handle.
///
/// # Safety
/// `inst` must be a live instance handle or null.
#[no_mangle]
pub unsafe extern "C" fn tlemma_instance_num_atoms(inst: *const TlemmaInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n_atoms())
}

unsafe fn oracle_config(cmd: *const c_char) -> Result<OracleConfig, TlemmaStatus> {
    let mut cfg = OracleConfig::default();
    if !cmd.is_null() {
        cfg.backend = Backend::external(str_arg(cmd)?);
    }
    Ok(cfg)
}

/// Runs a strategy (e.g. `"dnc-proj-part"`). On `TLEMMA_STATUS_BUDGET_EXCEEDED`
/// `*out` still receives the partial lemma set.
///
/// # Safety
/// `inst` must be a live instance, `strategy` a NUL-terminated string,
/// `options` null or valid, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tlemma_enumerate(
    inst: *const TlemmaInstance,
    strategy: *const c_char,
    options: *const TlemmaOptions,
    out: *mut *mut TlemmaLemmaSet,
) -> TlemmaStatus {
    guard(|| {
        if out.is_null() {
            return fail(TlemmaStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(inst) = inst.as_ref() else {
            return fail(TlemmaStatus::NullPointer, "null instance");
        };
        let name = match str_arg(strategy) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let mut spec: StrategySpec = match name.parse() {
            Ok(s) => s,
            Err(e) => return fail(TlemmaStatus::UnknownStrategy, e),
        };
        let opts = options.as_ref().copied().unwrap_or_else(|| tlemma_options_default());
        spec.workers = opts.workers.max(1);
        spec.budget = (opts.budget_secs > 0.0).then(|| Duration::from_secs_f64(opts.budget_secs));
        spec.early_pruning = (opts.early_pruning > 0).then_some(opts.early_pruning);
        spec.subsume = opts.subsume;
        let cfg = match oracle_config(opts.oracle_cmd) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let (set, status) = match run_strategy(&inst.inner, &spec, &cfg) {
            Ok(r) => (r.lemmas, TlemmaStatus::Ok),
            Err(Error::BudgetExceeded(partial)) => {
                set_error("budget exceeded");
                (*partial, TlemmaStatus::BudgetExceeded)
            }
            Err(e) => return fail(status_of(&e), e),
        };
        *out = Box::into_raw(Box::new(TlemmaLemmaSet { inner: set }));
        status
    })
}

/// # Safety
/// `set` must come from [`tlemma_enumerate`] or be null.
#[no_mangle]
pub unsafe extern "C" fn tlemma_lemmas_free(set: *mut TlemmaLemmaSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of lemmas; 0 for a null handle.
///
/// # Safety
/// `set` must be a live lemma-set handle or null.
#[no_mangle]
pub unsafe extern "C" fn tlemma_lemmas_len(set: *const TlemmaLemmaSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Literal count of lemma `index`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tlemma_lemma_len(set: *const TlemmaLemmaSet, index: usize, out: *mut usize) -> TlemmaStatus {
    let (Some(set), false) = (set.as_ref(), out.is_null()) else {
        return fail(TlemmaStatus::NullPointer, "null argument");
    };
    match set.inner.lemmas.get(index) {
        Some(l) => {
            *out = l.len();
            TlemmaStatus::Ok
        }
        None => fail(TlemmaStatus::OutOfRange, format!("lemma {index} out of range")),
    }
}

/// Literal `lit` of lemma `index` as an atom index and a polarity.
///
/// # Safety
/// `set` must be a live handle; `atom` and `positive` writable.
#[no_mangle]
pub unsafe extern "C" fn tlemma_lemma_literal(
    set: *const TlemmaLemmaSet,
    index: usize,
    lit: usize,
    atom: *mut u32,
    positive: *mut bool,
) -> TlemmaStatus {
    let (Some(set), false, false) = (set.as_ref(), atom.is_null(), positive.is_null()) else {
        return fail(TlemmaStatus::NullPointer, "null argument");
    };
    match set.inner.lemmas.get(index).and_then(|l| l.literals.get(lit)) {
        Some(l) => {
            *atom = l.atom();
            *positive = l.is_positive();
            TlemmaStatus::Ok
        }
        None => fail(TlemmaStatus::OutOfRange, format!("literal {index}/{lit} out of range")),
    }
}

/// The lemma set as an SMT-LIB2 script over the instance's symbols. Release
/// with [`tlemma_string_free`]. Null on failure.
///
/// # Safety
/// Both handles must be live, and the set must come from `inst`.
#[no_mangle]
pub unsafe extern "C" fn tlemma_lemmas_render(inst: *const TlemmaInstance, set: *const TlemmaLemmaSet) -> *mut c_char {
    let (Some(inst), Some(set)) = (inst.as_ref(), set.as_ref()) else {
        set_error("null argument");
        return ptr::null_mut();
    };
    let n = inst.inner.n_atoms() as u32;
    if set.inner.lemmas.iter().flat_map(|l| &l.literals).any(|l| l.atom() >= n) {
        set_error("lemma set does not belong to this instance");
        return ptr::null_mut();
    }
    catch_unwind(AssertUnwindSafe(|| render_lemma_file(&inst.inner.problem, &set.inner.lemmas)))
        .ok()
        .and_then(|s| CString::new(s).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tlemma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Brute-force verification of `set` against `inst`, for instances with at
/// most `cap` atoms.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tlemma_verify(
    inst: *const TlemmaInstance,
    set: *const TlemmaLemmaSet,
    cap: usize,
    out: *mut TlemmaVerdict,
) -> TlemmaStatus {
    guard(|| {
        let (Some(inst), Some(set), false) = (inst.as_ref(), set.as_ref(), out.is_null()) else {
            return fail(TlemmaStatus::NullPointer, "null argument");
        };
        let res = Oracle::new(&OracleConfig::default(), inst.inner.table()).and_then(|mut o| {
            let class = classify(&inst.inner, &mut o, cap)?;
            check_lemmas(&inst.inner, &class, &set.inner.lemmas, &mut o)
        });
        match res {
            Ok(v) => {
                *out = TlemmaVerdict {
                    rules_out: v.rules_out,
                    lemmas_valid: v.lemmas_valid,
                    atoms_in_theory: v.atoms_in_theory,
                    abstraction_equivalent: v.abstraction_equivalent,
                    n_ctta: v.n_ctta,
                    n_itta: v.n_itta,
                };
                TlemmaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e),
        }
    })
}
