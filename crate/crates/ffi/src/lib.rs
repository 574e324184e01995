//! C ABI for `hytw`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`HytwStatus`]; on failure [`hytw_last_error`] describes the problem.
//! Strings returned through out-parameters are owned by the caller and
//! released with [`hytw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hytw::games::{self, ExplicitTree, Player};
use hytw::normalize::{canonicalize, normalize_with, Options, DEFAULT_STEP_BUDGET};
use hytw::ordinal::{parse_ordinal, Ordinal};
use hytw::tagged::{self, Condition, RetagInstance};
use hytw::term::{parse_file, print_term};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HytwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Type = 4,
    Budget = 5,
    Domain = 6,
    Panic = 7,
}

/// A finite game tree.
pub struct HytwGame(ExplicitTree);

/// A tagged tree; not necessarily a valid condition.
pub struct HytwCondition(Condition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(HytwStatus, String);

impl Fail {
    fn from_message(msg: impl ToString) -> Fail {
        let msg = msg.to_string();
        let status = if msg.starts_with("SyntaxError") {
            HytwStatus::Syntax
        } else if msg.starts_with("TypeMismatch") || msg.starts_with("UnboundVariable") {
            HytwStatus::Type
        } else if msg.contains("BudgetExceeded") {
            HytwStatus::Budget
        } else {
            HytwStatus::Domain
        };
        Fail(status, msg)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HytwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HytwStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HytwStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(HytwStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(HytwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ordinal(p: *const c_char, what: &str) -> Result<Ordinal, Fail> {
    parse_ordinal(text(p, what)?).map_err(Fail::from_message)
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(HytwStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(HytwStatus::NullArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(HytwStatus::Domain, "output contains a nul byte".into()))?;
    put(out, c.into_raw(), "out")
}

/// The library version as a static string.
#[no_mangle]
pub extern "C" fn hytw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hytw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hytw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Normalizes every term of a term file and writes the canonical normal
/// forms, one per line, to `*out`. A `budget` of 0 means the default.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_normalize(src: *const c_char, budget: u64, out: *mut *mut c_char) -> HytwStatus {
    guard(|| {
        let file = parse_file(text(src, "src")?).map_err(Fail::from_message)?;
        let budget = if budget == 0 { DEFAULT_STEP_BUDGET } else { budget };
        let mut s = String::new();
        for t in &file.terms {
            let (nf, _) = normalize_with(t, Options { budget, ..Options::default() }).map_err(Fail::from_message)?;
            s.push_str(&print_term(&canonicalize(&nf)));
            s.push('\n');
        }
        put_string(out, s)
    })
}

/// Writes -1, 0 or 1 to `*cmp` as ordinal `a` is below, equal to or above `b`.
///
/// # Safety
/// `a` and `b` must be nul-terminated strings and `cmp` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_ordinal_compare(a: *const c_char, b: *const c_char, cmp: *mut i32) -> HytwStatus {
    guard(|| {
        let (a, b) = (ordinal(a, "a")?, ordinal(b, "b")?);
        put(cmp, a.cmp(&b) as i32, "cmp")
    })
}

/// Writes the Cantor normal form of `a + b` to `*out`.
///
/// # Safety
/// `a` and `b` must be nul-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_ordinal_add(a: *const c_char, b: *const c_char, out: *mut *mut c_char) -> HytwStatus {
    guard(|| {
        let sum = ordinal(a, "a")?.add(&ordinal(b, "b")?);
        put_string(out, sum.to_string())
    })
}

/// Parses a game file (one node per line, moves separated by spaces).
///
/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_game_parse(src: *const c_char, out: *mut *mut HytwGame) -> HytwStatus {
    guard(|| {
        let g = games::parse_game(text(src, "src")?).map_err(Fail::from_message)?;
        put(out, Box::into_raw(Box::new(HytwGame(g))), "out")
    })
}

/// # Safety
/// `g` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hytw_game_free(g: *mut HytwGame) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of nodes, counting the root; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hytw_game_node_count(g: *const HytwGame) -> u64 {
    g.as_ref().map_or(0, |g| g.0.len() as u64)
}

/// Solves the game: `*winner` is 1 or 2 for player I or II, `*rank` the
/// rank of the root. A `budget` of 0 means the default node budget.
///
/// # Safety
/// `g` must be a live handle and `winner`, `rank` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_game_solve(
    g: *const HytwGame,
    budget: u64,
    winner: *mut u8,
    rank: *mut u64,
) -> HytwStatus {
    guard(|| {
        let g = handle(g, "game")?;
        let budget = if budget == 0 { games::DEFAULT_NODE_BUDGET } else { budget };
        let lab = games::solve(&g.0, budget).map_err(Fail::from_message)?;
        let w = match lab.winner() {
            Player::I => 1,
            Player::II => 2,
        };
        put(winner, w, "winner")?;
        put(rank, lab.root_info().rank, "rank")
    })
}

/// Parses a condition file of `PATH TAG0 TAG1` lines. The result is not
/// checked; see [`hytw_condition_violations`].
///
/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_condition_parse(src: *const c_char, out: *mut *mut HytwCondition) -> HytwStatus {
    guard(|| {
        let c = tagged::parse_condition(text(src, "src")?).map_err(Fail::from_message)?;
        put(out, Box::into_raw(Box::new(HytwCondition(c))), "out")
    })
}

/// # Safety
/// `c` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn hytw_condition_free(c: *mut HytwCondition) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Writes the condition in file format to `*out`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_condition_print(c: *const HytwCondition, out: *mut *mut c_char) -> HytwStatus {
    guard(|| put_string(out, tagged::print_condition(&handle(c, "condition")?.0)))
}

/// Writes the number of rule violations to `*count`, 0 for a condition.
///
/// # Safety
/// `c` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_condition_violations(c: *const HytwCondition, count: *mut u64) -> HytwStatus {
    guard(|| put(count, tagged::violations(&handle(c, "condition")?.0).len() as u64, "count"))
}

/// The projection replacing every tag at or above `alpha` by `inf`.
///
/// # Safety
/// `c` must be a live handle, `alpha` a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_condition_project(
    c: *const HytwCondition,
    alpha: *const c_char,
    out: *mut *mut HytwCondition,
) -> HytwStatus {
    guard(|| {
        let p = tagged::project(&handle(c, "condition")?.0, &ordinal(alpha, "alpha")?);
        put(out, Box::into_raw(Box::new(HytwCondition(p))), "out")
    })
}

/// Retags `r`, an extension of `q`, into an extension of `p` that agrees
/// with `r` below a bound at least `gamma`.
///
/// # Safety
/// `p`, `q`, `r` must be live handles, `alpha` and `gamma` nul-terminated
/// strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hytw_retag(
    p: *const HytwCondition,
    q: *const HytwCondition,
    r: *const HytwCondition,
    alpha: *const c_char,
    gamma: *const c_char,
    out: *mut *mut HytwCondition,
) -> HytwStatus {
    guard(|| {
        let inst = RetagInstance {
            p: handle(p, "p")?.0.clone(),
            q: handle(q, "q")?.0.clone(),
            r: handle(r, "r")?.0.clone(),
            alpha: ordinal(alpha, "alpha")?,
            gamma: ordinal(gamma, "gamma")?,
        };
        let done = tagged::retag(&inst).map_err(Fail::from_message)?;
        put(out, Box::into_raw(Box::new(HytwCondition(done.r_hat))), "out")
    })
}
