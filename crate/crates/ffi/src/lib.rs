//! C ABI over `multl1`.
//!
//! Every fallible call returns a [`Multl1Status`]; on failure the message is kept per thread
//! and can be copied out with [`multl1_last_error`]. Handles are opaque and owned by the
//! caller, who releases them with the matching `_free` function. Functions that receive a
//! null handle or output pointer return `MULTL1_STATUS_NULL_POINTER` without touching memory.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use multl1::arcs::{energy_split, major_arcs};
use multl1::arith::{characters_mod, gauss_sum, FactorSieve, MultFnSpec};
use multl1::cli::fnspec::parse_fn_spec;
use multl1::cli::run::MAX_GRID_POINTS;
use multl1::expsum::{coefficient_vector, grid_transform, lp_norm, ExpSumGrid, Profile, Window};
use multl1::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multl1Status {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Resource = 3,
    Resolution = 4,
    Parse = 5,
    Io = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

/// Smallest-prime-factor table.
pub struct Multl1Sieve(FactorSieve);

/// Multiplicative function tabulated on prime powers up to its limit.
pub struct Multl1Function(MultFnSpec);

/// Exponential sum S(j/M), j = 0..M, of a coefficient vector of length N.
pub struct Multl1Grid(ExpSumGrid);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> Multl1Status {
    match e {
        Error::Domain(_) => Multl1Status::Domain,
        Error::Resource { .. } => Multl1Status::Resource,
        Error::Resolution(_) => Multl1Status::Resolution,
        Error::Parse { .. } => Multl1Status::Parse,
        Error::Io(_) => Multl1Status::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> Multl1Status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            Multl1Status::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed as {what}"));
            Multl1Status::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("string argument is not valid UTF-8".into());
            Multl1Status::InvalidUtf8
        }
        Err(_) => {
            set_error("internal panic".into());
            Multl1Status::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(p: *mut T, what: &'static str, v: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

fn check_out<T>(p: *mut T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() { Err(Failure::Null(what)) } else { Ok(()) }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn multl1_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated, always
/// NUL-terminated when `len > 0`) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn multl1_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn multl1_sieve_new(limit: u64, out: *mut *mut Multl1Sieve) -> Multl1Status {
    guard(|| {
        check_out(out, "out")?;
        let s = FactorSieve::new(limit)?;
        put(out, "out", Box::into_raw(Box::new(Multl1Sieve(s))))
    })
}

/// # Safety
/// `sieve` must be null or a handle from `multl1_sieve_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn multl1_sieve_free(sieve: *mut Multl1Sieve) {
    if !sieve.is_null() {
        drop(Box::from_raw(sieve));
    }
}

/// Smallest prime factor of `n` (2 ≤ n ≤ limit).
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_sieve_spf(sieve: *const Multl1Sieve, n: u64, out: *mut u64) -> Multl1Status {
    guard(|| {
        let s = &get(sieve, "sieve")?.0;
        if n < 2 || n > s.limit() {
            return Err(Error::Domain(format!("n = {n} must lie in [2, {}]", s.limit())).into());
        }
        put(out, "out", s.spf(n))
    })
}

/// Parses a function specification such as `"pretend:5:100:42*twist:0.5"` and tabulates it
/// on [1, limit].
///
/// # Safety
/// `spec` must be null or a NUL-terminated string; other pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_function_parse(
    spec: *const c_char,
    sieve: *const Multl1Sieve,
    limit: u64,
    out: *mut *mut Multl1Function,
) -> Multl1Status {
    guard(|| {
        if spec.is_null() {
            return Err(Failure::Null("spec"));
        }
        check_out(out, "out")?;
        let text = CStr::from_ptr(spec).to_str().map_err(|_| Failure::Utf8)?;
        let s = &get(sieve, "sieve")?.0;
        let f = parse_fn_spec(text)?.build(s, limit)?;
        put(out, "out", Box::into_raw(Box::new(Multl1Function(f))))
    })
}

/// # Safety
/// `f` must be null or a handle from `multl1_function_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn multl1_function_free(f: *mut Multl1Function) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// f(n) as (re, im).
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_function_eval(
    f: *const Multl1Function,
    sieve: *const Multl1Sieve,
    n: u64,
    re: *mut f64,
    im: *mut f64,
) -> Multl1Status {
    guard(|| {
        check_out(re, "re")?;
        check_out(im, "im")?;
        let v = get(f, "function")?.0.eval(&get(sieve, "sieve")?.0, n)?;
        put(re, "re", v.re)?;
        put(im, "im", v.im)
    })
}

/// Grid of S(α) = Σ_{n≤N} f(n) W(n/N) e(nα) with M = oversample·N rounded up to a power of
/// two (at most 2^26 points). `eps ≤ 0` means no window; otherwise a plateau window with that parameter.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_grid_new(
    f: *const Multl1Function,
    sieve: *const Multl1Sieve,
    n: u64,
    oversample: u64,
    eps: f64,
    out: *mut *mut Multl1Grid,
) -> Multl1Status {
    guard(|| {
        check_out(out, "out")?;
        let f = &get(f, "function")?.0;
        let s = &get(sieve, "sieve")?.0;
        let window = if eps > 0.0 { Some(Window::plateau(eps)?) } else { None };
        let a = coefficient_vector(f, s, n as usize, window.as_ref().map(|w| w as &dyn Profile), None)?;
        let m = oversample
            .checked_mul(n)
            .and_then(u64::checked_next_power_of_two)
            .unwrap_or(u64::MAX);
        if m > MAX_GRID_POINTS {
            return Err(Error::Resource { what: "grid points", requested: m, limit: MAX_GRID_POINTS }.into());
        }
        let g = grid_transform(&a, m as usize)?;
        put(out, "out", Box::into_raw(Box::new(Multl1Grid(g))))
    })
}

/// # Safety
/// `grid` must be null or a handle from `multl1_grid_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn multl1_grid_free(grid: *mut Multl1Grid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Coefficient count N and grid size M.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_grid_size(grid: *const Multl1Grid, n: *mut u64, m: *mut u64) -> Multl1Status {
    guard(|| {
        check_out(n, "n")?;
        check_out(m, "m")?;
        let g = &get(grid, "grid")?.0;
        put(n, "n", g.n() as u64)?;
        put(m, "m", g.m() as u64)
    })
}

/// ‖S‖_p over the circle with a rigorous bound on the discretization error.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_lp_norm(
    grid: *const Multl1Grid,
    p: f64,
    value: *mut f64,
    error_bound: *mut f64,
) -> Multl1Status {
    guard(|| {
        check_out(value, "value")?;
        check_out(error_bound, "error_bound")?;
        let e = lp_norm(&get(grid, "grid")?.0, p)?;
        put(value, "value", e.value)?;
        put(error_bound, "error_bound", e.error_bound)
    })
}

/// Energy of S on the major arcs of level Q and on their complement.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_arcs_energy(
    grid: *const Multl1Grid,
    q: u64,
    major: *mut f64,
    minor: *mut f64,
    error_bound: *mut f64,
) -> Multl1Status {
    guard(|| {
        check_out(major, "major")?;
        check_out(minor, "minor")?;
        check_out(error_bound, "error_bound")?;
        let g = &get(grid, "grid")?.0;
        let e = energy_split(g, &major_arcs(q, g.n() as u64)?)?;
        put(major, "major", e.major)?;
        put(minor, "minor", e.minor)?;
        put(error_bound, "error_bound", e.error_bound)
    })
}

/// Gauss sum of the `index`-th character mod q (same enumeration as `char:q:index`), which
/// must be primitive.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn multl1_gauss_sum(q: u64, index: u64, re: *mut f64, im: *mut f64) -> Multl1Status {
    guard(|| {
        check_out(re, "re")?;
        check_out(im, "im")?;
        let chars = characters_mod(q)?;
        let chi = chars.get(index as usize).ok_or_else(|| {
            Error::Domain(format!("index {index} out of range: there are {} characters mod {q}", chars.len()))
        })?;
        let tau = gauss_sum(chi)?;
        put(re, "re", tau.re)?;
        put(im, "im", tau.im)
    })
}
