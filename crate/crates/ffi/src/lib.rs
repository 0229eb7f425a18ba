//! C interface to the ludics engine.
//!
//! Objects are opaque handles owned by the caller and released with the
//! matching `_free` function. Every call returns a [`LudStatus`]; on failure
//! [`lud_last_error_message`] describes what went wrong. Strings returned by
//! the library must be released with [`lud_string_free`].

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ludics::delocalize::check_fax_theorem;
use ludics::interaction::{closed_pair_trace, make_net, normalize, OrthError};
use ludics::syntax::{parse_source, SourceFile, SyntaxError};
use ludics::{Locus, Trace, Verdict};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LudStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Net = 5,
    NotFound = 6,
    Engine = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LudVerdict {
    Converged = 0,
    Diverged = 1,
    OutOfFuel = 2,
}

/// A parsed design file.
pub struct LudLibrary {
    src: SourceFile,
}

/// The result of a normalization.
pub struct LudOutcome {
    trace: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(LudStatus, String);

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        let status = match e {
            SyntaxError::Invalid { .. } => LudStatus::Validation,
            _ => LudStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, recording its error and catching panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LudStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LudStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LudStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LudStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LudStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn library<'a>(p: *const LudLibrary) -> Result<&'a LudLibrary, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(LudStatus::NullPointer, "library is null".into()))
}

fn names(list: &str) -> Vec<&str> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

impl LudLibrary {
    fn design(&self, name: &str) -> Result<&ludics::Design, Failure> {
        self.src
            .design(name)
            .ok_or_else(|| Failure(LudStatus::NotFound, format!("no design `{name}`")))
    }

    fn locus(&self, text: &str) -> Result<Locus, Failure> {
        Ok(self.src.locus(text)?)
    }
}

fn orth_failure(e: OrthError) -> Failure {
    match e {
        OrthError::NotDual(..) => Failure(LudStatus::Net, e.to_string()),
        OrthError::Engine(e) => Failure(LudStatus::Engine, e.to_string()),
    }
}

/// Parses a design file. On success `*out` holds a new library.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lud_library_parse(
    source: *const c_char,
    out: *mut *mut LudLibrary,
) -> LudStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(LudStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let src = parse_source(text(source, "source")?)?;
        *out = Box::into_raw(Box::new(LudLibrary { src }));
        Ok(())
    })
}

/// Number of designs in the library, 0 for a null handle.
///
/// # Safety
/// `lib` must be null or a handle from [`lud_library_parse`].
#[no_mangle]
pub unsafe extern "C" fn lud_library_design_count(lib: *const LudLibrary) -> usize {
    lib.as_ref().map_or(0, |l| l.src.order.len())
}

/// # Safety
/// `lib` must be null or a handle from [`lud_library_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lud_library_free(lib: *mut LudLibrary) {
    if !lib.is_null() {
        drop(Box::from_raw(lib));
    }
}

/// Normalizes the net made of the comma-separated `members`. `cuts` is a
/// comma-separated list of loci, or null to take every handle that is
/// also some member's tine.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lud_normalize(
    lib: *const LudLibrary,
    members: *const c_char,
    cuts: *const c_char,
    fuel: usize,
    out: *mut *mut LudOutcome,
) -> LudStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(LudStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let lib = library(lib)?;
        let designs = names(text(members, "members")?)
            .into_iter()
            .map(|n| lib.design(n).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let cuts: BTreeSet<Locus> = if cuts.is_null() {
            designs
                .iter()
                .filter_map(|d| d.base.handle.clone())
                .filter(|h| designs.iter().any(|e| e.base.tines.contains(h)))
                .collect()
        } else {
            names(text(cuts, "cuts")?)
                .into_iter()
                .map(|c| lib.locus(c))
                .collect::<Result<_, _>>()?
        };
        let net = make_net(designs, cuts, &lib.src.library)
            .map_err(|e| Failure(LudStatus::Net, e.to_string()))?;
        let trace = normalize(&net, fuel).map_err(|e| Failure(LudStatus::Engine, e.to_string()))?;
        *out = Box::into_raw(Box::new(LudOutcome { trace }));
        Ok(())
    })
}

/// # Safety
/// `outcome` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn lud_outcome_verdict(outcome: *const LudOutcome) -> LudVerdict {
    match outcome.as_ref().map(|o| &o.trace.verdict) {
        Some(Verdict::Converged { .. }) => LudVerdict::Converged,
        Some(Verdict::OutOfFuel { .. }) => LudVerdict::OutOfFuel,
        _ => LudVerdict::Diverged,
    }
}

/// Number of actions in the trace, 0 for a null handle.
///
/// # Safety
/// `outcome` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn lud_outcome_step_count(outcome: *const LudOutcome) -> usize {
    outcome.as_ref().map_or(0, |o| o.trace.steps.len())
}

/// The trace in its line form. Release with [`lud_string_free`].
///
/// # Safety
/// `outcome` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn lud_outcome_trace_text(outcome: *const LudOutcome) -> *mut c_char {
    match outcome.as_ref() {
        Some(o) => CString::new(o.trace.to_text()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `outcome` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lud_outcome_free(outcome: *mut LudOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Orthogonality of two designs on dual bases: `*answer` is 1 (yes),
/// 0 (no) or -1 (out of fuel).
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lud_orthogonal(
    lib: *const LudLibrary,
    left: *const c_char,
    right: *const c_char,
    fuel: usize,
    answer: *mut c_int,
) -> LudStatus {
    guard(|| {
        if answer.is_null() {
            return Err(Failure(LudStatus::NullPointer, "answer is null".into()));
        }
        let lib = library(lib)?;
        let d = lib.design(text(left, "left")?)?;
        let e = lib.design(text(right, "right")?)?;
        let trace = closed_pair_trace(d, e, &lib.src.library, fuel).map_err(orth_failure)?;
        *answer = match trace.verdict {
            Verdict::Converged { .. } => 1,
            Verdict::Diverged { .. } => 0,
            Verdict::OutOfFuel { .. } => -1,
        };
        Ok(())
    })
}

/// Checks that the copy-cat design moves `design` to the locus `to`;
/// `*holds` is 1 when it does.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lud_fax_check(
    lib: *const LudLibrary,
    design: *const c_char,
    to: *const c_char,
    fuel: usize,
    holds: *mut c_int,
) -> LudStatus {
    guard(|| {
        if holds.is_null() {
            return Err(Failure(LudStatus::NullPointer, "holds is null".into()));
        }
        let lib = library(lib)?;
        let d = lib.design(text(design, "design")?)?;
        let rho = lib.locus(text(to, "to")?)?;
        let check = check_fax_theorem(d, &rho, fuel, &lib.src.library)
            .map_err(|e| Failure(LudStatus::Engine, e.to_string()))?;
        *holds = c_int::from(check.holds);
        Ok(())
    })
}

/// The message of the last failed call on this thread, or null. Release
/// with [`lud_string_free`].
#[no_mangle]
pub extern "C" fn lud_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .clone()
            .map_or(ptr::null_mut(), CString::into_raw)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lud_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
