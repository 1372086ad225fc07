//! C ABI over `levelcross`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! [`LcStatus`]; on failure [`lc_last_error`] describes what went wrong on
//! the calling thread. Strings returned through out-parameters are owned by
//! the caller and released with [`lc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levelcross::coloring::{color, ColoringParams};
use levelcross::continuous::{approximate_level_crossing, ContinuousWitness};
use levelcross::discrete::{solve, DiscreteWitness, SolveOptions};
use levelcross::grid::{CellLabeling, GridShape};
use levelcross::io::{emit_witness, parse_labeling, WitnessRef};
use levelcross::lattice::LatticePoint;
use levelcross::steinhaus::{find_crossing, random_coloring, ChessboardWitness};
use levelcross::{functions, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    InvalidInput = 1,
    Schema = 2,
    DimensionMismatch = 3,
    UnsupportedDimension = 4,
    EmptyInput = 5,
    InfeasibleEnumeration = 6,
    TheoremViolation = 7,
    Io = 8,
    NullPointer = 9,
    Panic = 10,
}

/// A cell labeling of `[k]^n` with values in `Z^d`.
pub struct LcLabeling(CellLabeling);

/// A crossing witness of any of the three kinds.
pub enum LcWitness {
    Chessboard(ChessboardWitness, GridShape),
    Discrete(DiscreteWitness, GridShape),
    Continuous(ContinuousWitness),
}

impl LcWitness {
    fn as_ref(&self) -> WitnessRef<'_> {
        match self {
            LcWitness::Chessboard(w, s) => WitnessRef::Chessboard(w, *s),
            LcWitness::Discrete(w, s) => WitnessRef::Discrete(w, *s),
            LcWitness::Continuous(w) => WitnessRef::Continuous(w),
        }
    }

    fn axis(&self) -> usize {
        match self {
            LcWitness::Chessboard(w, _) => w.axis,
            LcWitness::Discrete(w, _) => w.axis,
            LcWitness::Continuous(w) => w.axis,
        }
    }

    fn cell_count(&self) -> usize {
        match self {
            LcWitness::Chessboard(w, _) => w.cells.len(),
            LcWitness::Discrete(w, _) => w.cells.len(),
            LcWitness::Continuous(w) => w.cells.len(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LcStatus {
    match e {
        Error::InvalidInput(_) => LcStatus::InvalidInput,
        Error::Schema { .. } => LcStatus::Schema,
        Error::DimensionMismatch { .. } => LcStatus::DimensionMismatch,
        Error::UnsupportedDimension(_) => LcStatus::UnsupportedDimension,
        Error::EmptyInput(_) => LcStatus::EmptyInput,
        Error::InfeasibleEnumeration { .. } => LcStatus::InfeasibleEnumeration,
        Error::TheoremViolation(_) => LcStatus::TheoremViolation,
        Error::Io(_) => LcStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            LcStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Lib(Error::InvalidInput(format!("{what} is not UTF-8"))))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a labeling document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out_labeling` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_labeling_parse(
    json: *const c_char,
    out_labeling: *mut *mut LcLabeling,
) -> LcStatus {
    guard(|| {
        let slot = out(out_labeling, "out_labeling")?;
        *slot = ptr::null_mut();
        let l = parse_labeling(text(json, "json")?)?;
        *slot = boxed(LcLabeling(l));
        Ok(())
    })
}

/// A uniformly random coloring of `[k]^n` with colors `1..=n`.
///
/// # Safety
/// `out_labeling` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_labeling_random(
    n: usize,
    k: usize,
    seed: u64,
    out_labeling: *mut *mut LcLabeling,
) -> LcStatus {
    guard(|| {
        let slot = out(out_labeling, "out_labeling")?;
        *slot = ptr::null_mut();
        let shape = GridShape::new(n, k)?;
        let l = random_coloring(shape, n, &mut ChaCha8Rng::seed_from_u64(seed));
        *slot = boxed(LcLabeling(l));
        Ok(())
    })
}

/// Writes the grid dimension, side length and value dimension.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lc_labeling_shape(
    labeling: *const LcLabeling,
    n: *mut usize,
    k: *mut usize,
    d: *mut usize,
) -> LcStatus {
    guard(|| {
        let l = &deref(labeling, "labeling")?.0;
        *out(n, "n")? = l.shape().n();
        *out(k, "k")? = l.shape().k();
        *out(d, "d")? = l.dim();
        Ok(())
    })
}

/// # Safety
/// `labeling` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lc_labeling_free(labeling: *mut LcLabeling) {
    if !labeling.is_null() {
        drop(Box::from_raw(labeling));
    }
}

/// Color of the lattice point `t[0..n]` in the clustered coloring at distance `m`.
///
/// # Safety
/// `t` must point to `n` readable values and `out_color` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lc_color(
    t: *const i64,
    n: usize,
    m: i64,
    out_color: *mut usize,
) -> LcStatus {
    guard(|| {
        let slot = out(out_color, "out_color")?;
        if t.is_null() && n > 0 {
            return Err(Fail::Null("t"));
        }
        let coords = if n == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(t, n).to_vec()
        };
        *slot = color(&LatticePoint(coords), ColoringParams::new(n, m)?)?;
        Ok(())
    })
}

/// Finds a monochromatic crossing of a one-dimensional labeling.
///
/// # Safety
/// `labeling` and `out_witness` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lc_find_crossing(
    labeling: *const LcLabeling,
    out_witness: *mut *mut LcWitness,
) -> LcStatus {
    guard(|| {
        let slot = out(out_witness, "out_witness")?;
        *slot = ptr::null_mut();
        let l = &deref(labeling, "labeling")?.0;
        let w = find_crossing(l)?;
        *slot = boxed(LcWitness::Chessboard(w, l.shape()));
        Ok(())
    })
}

/// Solves a `Z^(n-1)`-valued labeling for a connected value set.
///
/// # Safety
/// `labeling` and `out_witness` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lc_solve_discrete(
    labeling: *const LcLabeling,
    m: usize,
    shrink: bool,
    out_witness: *mut *mut LcWitness,
) -> LcStatus {
    guard(|| {
        let slot = out(out_witness, "out_witness")?;
        *slot = ptr::null_mut();
        let l = &deref(labeling, "labeling")?.0;
        let w = solve(
            l,
            m,
            SolveOptions {
                shrink,
                prefer_axis: None,
            },
        )?;
        *slot = boxed(LcWitness::Discrete(w, l.shape()));
        Ok(())
    })
}

/// Approximate level crossing of a registry function at tolerance `epsilon`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out_witness` valid.
#[no_mangle]
pub unsafe extern "C" fn lc_levelset(
    name: *const c_char,
    n: usize,
    epsilon: f64,
    out_witness: *mut *mut LcWitness,
) -> LcStatus {
    guard(|| {
        let slot = out(out_witness, "out_witness")?;
        *slot = ptr::null_mut();
        let f = functions::by_name(text(name, "name")?, n)?;
        let w = approximate_level_crossing(&f, epsilon)?;
        *slot = boxed(LcWitness::Continuous(w));
        Ok(())
    })
}

/// 1-based axis the witness crosses, or 0 for a null handle.
///
/// # Safety
/// `witness` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_witness_axis(witness: *const LcWitness) -> usize {
    witness.as_ref().map_or(0, LcWitness::axis)
}

/// Number of cells in the witness, or 0 for a null handle.
///
/// # Safety
/// `witness` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_witness_cell_count(witness: *const LcWitness) -> usize {
    witness.as_ref().map_or(0, LcWitness::cell_count)
}

/// Serializes the witness. Release the string with [`lc_string_free`].
///
/// # Safety
/// `witness` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lc_witness_to_json(
    witness: *const LcWitness,
    out_json: *mut *mut c_char,
) -> LcStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let doc = emit_witness(deref(witness, "witness")?.as_ref());
        *slot = CString::new(doc).expect("JSON has no NUL bytes").into_raw();
        Ok(())
    })
}

/// # Safety
/// `witness` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lc_witness_free(witness: *mut LcWitness) {
    if !witness.is_null() {
        drop(Box::from_raw(witness));
    }
}

/// # Safety
/// `s` must be a string returned by this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
