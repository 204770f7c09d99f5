//! C interface to the lref toolkit.
//!
//! Programs are opaque handles created by [`lref_program_parse`] and released
//! with [`lref_program_free`]. Every call returns an [`LrefStatus`]; on anything
//! other than `LREF_STATUS_OK` the message is available from
//! [`lref_last_error`]. Strings handed out by the library belong to the caller
//! and must be released with [`lref_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lref::denote::{equal_open, Bounds, Verdict};
use lref::error::Error;
use lref::harness::laws::{default_signatures, run_suite, SuiteConfig, SUITES};
use lref::opsem::{eval, render_heap, to_typed, UntypedHeap, DEFAULT_FUEL};
use lref::syntax::parser::parse_store_literal;
use lref::syntax::{parse_program, parse_type, Program};
use lref::typing::{check, infer, infer_principal, Context};
use lref::worlds::cell_values;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LrefStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Type = 4,
    Eval = 5,
    Semantic = 6,
    Usage = 7,
    /// The call completed and its report lists failures.
    Failures = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LrefVerdict {
    Equal = 0,
    NotEqual = 1,
    Approximate = 2,
}

/// A parsed program: signature, layout and core term.
pub struct LrefProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> LrefStatus {
    match e {
        Error::Parse(_) | Error::Signature(_) | Error::Manifest(_) => LrefStatus::Parse,
        Error::Type(_) => LrefStatus::Type,
        Error::Eval(_) | Error::Heap(_) => LrefStatus::Eval,
        Error::Sem(_) | Error::Gen(_) => LrefStatus::Semantic,
        Error::Usage(_) => LrefStatus::Usage,
    }
}

enum Fail {
    Status(LrefStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<LrefStatus, Fail>) -> LrefStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            LrefStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(LrefStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail::Status(LrefStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn program<'a>(p: *const LrefProgram, what: &str) -> Result<&'a Program, Fail> {
    p.as_ref()
        .map(|h| &h.program)
        .ok_or_else(|| Fail::Status(LrefStatus::NullArgument, format!("{what} is null")))
}

unsafe fn hand_out(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(LrefStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|e| Fail::Status(LrefStatus::Usage, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// The message of the most recent failure on this thread, or null. Free it
/// with `lref_string_free`.
#[no_mangle]
pub extern "C" fn lref_last_error() -> *mut c_char {
    LAST_ERROR
        .with(|e| e.borrow().clone())
        .and_then(|m| CString::new(m).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lref_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a program file's text into a new handle.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lref_program_parse(source: *const c_char, out: *mut *mut LrefProgram) -> LrefStatus {
    guard(|| {
        let src = text(source, "source")?;
        if out.is_null() {
            return Err(Fail::Status(LrefStatus::NullArgument, "output pointer is null".into()));
        }
        let program = parse_program(src)?;
        *out = Box::into_raw(Box::new(LrefProgram { program }));
        Ok(LrefStatus::Ok)
    })
}

/// # Safety
/// `p` must be null or a handle from `lref_program_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lref_program_free(p: *mut LrefProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The principal type of the program, with `_` for undetermined parts.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lref_program_type(p: *const LrefProgram, out: *mut *mut c_char) -> LrefStatus {
    guard(|| {
        let prog = program(p, "program")?;
        let ty = infer_principal(&prog.sig, &prog.layout, &Context::new(), &prog.term).map_err(Error::from)?;
        hand_out(out, ty.to_string())?;
        Ok(LrefStatus::Ok)
    })
}

/// Evaluates the program. `heap` is null or a literal such as `{#0 = true}`;
/// cells it leaves out start at their first value. The result is JSON with
/// fields `value` and `heap`.
///
/// # Safety
/// `p` must be a live handle, `heap` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lref_program_run(p: *const LrefProgram, heap: *const c_char, out: *mut *mut c_char) -> LrefStatus {
    guard(|| {
        let prog = program(p, "program")?;
        let mut h: UntypedHeap = prog
            .layout
            .iter()
            .filter_map(|(l, k)| {
                let v = cell_values(&prog.sig, k, &prog.layout).into_iter().next()?;
                Some((l, lref::harness::soundness::semvalue_to_term(&v)?))
            })
            .collect();
        if !heap.is_null() {
            h.extend(parse_store_literal(&prog.sig, text(heap, "heap")?).map_err(Error::from)?);
        }
        to_typed(&prog.sig, &prog.layout, &h).map_err(Error::from)?;
        let o = eval(&prog.term, &h, DEFAULT_FUEL).map_err(Error::from)?;
        let w = o.final_layout(&prog.layout);
        let json = serde_json::json!({ "value": o.value.to_string(), "heap": render_heap(&w, &o.heap) });
        hand_out(out, json.to_string())?;
        Ok(LrefStatus::Ok)
    })
}

/// Compares the denotations of two programs with the same signature and
/// layout over extensions of at most `bound` cells. `ty` is null to infer
/// the result type.
///
/// # Safety
/// Both handles must be live, `ty` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lref_programs_equal(
    p1: *const LrefProgram,
    p2: *const LrefProgram,
    ty: *const c_char,
    bound: u32,
    out: *mut LrefVerdict,
) -> LrefStatus {
    guard(|| {
        let (a, b) = (program(p1, "first program")?, program(p2, "second program")?);
        if out.is_null() {
            return Err(Fail::Status(LrefStatus::NullArgument, "output pointer is null".into()));
        }
        if a.sig != b.sig || a.layout != b.layout {
            return Err(Error::Usage("programs must share signature and layout".into()).into());
        }
        let ctx = Context::new();
        let ty = if ty.is_null() {
            infer(&a.sig, &a.layout, &ctx, &a.term).map_err(Error::from)?
        } else {
            let ty = parse_type(&a.sig, text(ty, "type")?).map_err(Error::from)?;
            check(&a.sig, &a.layout, &ctx, &a.term, &ty).map_err(Error::from)?;
            ty
        };
        check(&b.sig, &b.layout, &ctx, &b.term, &ty).map_err(Error::from)?;
        let bounds = Bounds { world: bound as usize, ..Bounds::default() };
        let v = equal_open(&a.sig, &a.layout, &ctx, &a.term, &b.term, &ty, bounds).map_err(Error::from)?;
        *out = match &v {
            Verdict::Equal => LrefVerdict::Equal,
            Verdict::NotEqual(w) => {
                set_error(w.to_string());
                LrefVerdict::NotEqual
            }
            Verdict::Approximate(why) => {
                set_error(why.clone());
                LrefVerdict::Approximate
            }
        };
        Ok(LrefStatus::Ok)
    })
}

/// Runs a law suite (`monad`, `hiding`, `gs`, `masking` or `soundness`) on
/// the bundled signatures and writes the reports as a JSON array. Returns
/// `LREF_STATUS_FAILURES` when any report lists failures.
///
/// # Safety
/// `suite` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lref_laws(
    suite: *const c_char,
    bound: u32,
    seed: u64,
    programs: u32,
    out: *mut *mut c_char,
) -> LrefStatus {
    guard(|| {
        let name = text(suite, "suite")?;
        if !SUITES.contains(&name) {
            return Err(Error::Usage(format!("unknown suite {name}")).into());
        }
        let cfg = SuiteConfig { bound: bound as usize, seed, programs: programs as usize, ..SuiteConfig::default() };
        let reports: Vec<_> = default_signatures()
            .into_iter()
            .filter_map(|(label, sig)| {
                let mut r = run_suite(name, &sig, &cfg)?;
                r.suite = format!("{name} ({label})");
                Some(r)
            })
            .collect();
        let passed = reports.iter().all(|r| r.passed());
        hand_out(out, serde_json::to_string(&reports).expect("reports are plain data"))?;
        Ok(if passed { LrefStatus::Ok } else { LrefStatus::Failures })
    })
}
