//! C ABI over `rieffel_deform`.
//!
//! Objects are opaque heap handles created by `rd_*_new`/constructor calls
//! and released with the matching `rd_*_free`. Every fallible call returns
//! an [`RdStatus`]; on failure the message is available from
//! [`rd_last_error_message`] until the next failing call on the same thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rieffel_deform::field::{norm_bracket, smoothing_norm_constant};
use rieffel_deform::product::{star_product, TWIST_CONVENTION};
use rieffel_deform::smoothing::smooth;
use rieffel_deform::states::{deformed_evaluate, MomentState};
use rieffel_deform::{DeformError, DeformationData, FourierElement, LatticeIndex, Metric, SymplecticForm};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    InvalidSymplecticForm = 3,
    NotPositiveDefinite = 4,
    Incompatible = 5,
    InvalidHbar = 6,
    CutoffTooSmall = 7,
    InvalidGrid = 8,
    InvalidState = 9,
    ShapeMismatch = 10,
    InvalidArgument = 11,
    Io = 12,
    InvalidUtf8 = 13,
    Panic = 14,
}

impl From<&DeformError> for RdStatus {
    fn from(e: &DeformError) -> Self {
        match e {
            DeformError::DimensionMismatch { .. } => RdStatus::DimensionMismatch,
            DeformError::InvalidSymplecticForm(_) => RdStatus::InvalidSymplecticForm,
            DeformError::NotPositiveDefinite(_) => RdStatus::NotPositiveDefinite,
            DeformError::Incompatible { .. } => RdStatus::Incompatible,
            DeformError::InvalidHbar(_) => RdStatus::InvalidHbar,
            DeformError::CutoffTooSmall { .. } => RdStatus::CutoffTooSmall,
            DeformError::InvalidGrid => RdStatus::InvalidGrid,
            DeformError::InvalidState(_) => RdStatus::InvalidState,
            DeformError::ShapeMismatch(_) => RdStatus::ShapeMismatch,
            DeformError::InvalidArgument(_) => RdStatus::InvalidArgument,
            DeformError::Io(_) => RdStatus::Io,
        }
    }
}

/// Symplectic form, compatible metric and ℏ.
pub struct RdData {
    inner: DeformationData,
}

/// Trigonometric polynomial on the torus.
pub struct RdElement {
    inner: FourierElement,
}

/// Classical state given by its moments.
pub struct RdState {
    inner: MomentState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(RdStatus, String);

impl From<DeformError> for Fail {
    fn from(e: DeformError) -> Self {
        Fail(RdStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RdStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RdStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failing call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn rd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, NUL-terminated, static.
#[no_mangle]
pub extern "C" fn rd_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// The twist-sign convention string, NUL-terminated, static.
#[no_mangle]
pub extern "C" fn rd_twist_convention() -> *const c_char {
    static S: OnceLock<CString> = OnceLock::new();
    S.get_or_init(|| CString::new(TWIST_CONVENTION).expect("no nul")).as_ptr()
}

/// Deformation data from row-major `2n×2n` matrices `theta` and `g`.
///
/// # Safety
/// `theta` and `g` must point to `4n²` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_data_new(n: usize, theta: *const f64, g: *const f64, hbar: f64, out: *mut *mut RdData) -> RdStatus {
    guard(|| {
        let d = 2 * n;
        let theta = slice(theta, d * d, "theta")?;
        let g = slice(g, d * d, "g")?;
        if n == 0 {
            return Err(Fail(RdStatus::InvalidArgument, "n must be at least 1".into()));
        }
        let theta = SymplecticForm::new(nalgebra_rows(d, theta))?;
        let g = Metric::new(nalgebra_rows(d, g))?;
        let data = DeformationData::new(theta, g, hbar)?;
        write_out(out, boxed(RdData { inner: data }), "out")
    })
}

fn nalgebra_rows(d: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(d, d, v)
}

/// Standard symplectic form and Euclidean metric on `R^{2n}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_data_standard(n: usize, hbar: f64, out: *mut *mut RdData) -> RdStatus {
    guard(|| {
        let data = DeformationData::standard(n, hbar)?;
        write_out(out, boxed(RdData { inner: data }), "out")
    })
}

/// Copy of `data` with a different ℏ.
///
/// # Safety
/// `data` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_data_with_hbar(data: *const RdData, hbar: f64, out: *mut *mut RdData) -> RdStatus {
    guard(|| {
        let d = deref(data, "data")?;
        let next = d.inner.with_hbar(hbar)?;
        write_out(out, boxed(RdData { inner: next }), "out")
    })
}

/// # Safety
/// `data` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rd_data_free(data: *mut RdData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// The zero element of the torus algebra in half-dimension `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_element_new(n: usize, out: *mut *mut RdElement) -> RdStatus {
    guard(|| write_out(out, boxed(RdElement { inner: FourierElement::zero(n) }), "out"))
}

/// Adds `re + i·im` to the coefficient of the lattice point `k` (`2n` entries).
///
/// # Safety
/// `el` must be a live handle and `k` must point to `rank` integers.
#[no_mangle]
pub unsafe extern "C" fn rd_element_add_term(el: *mut RdElement, k: *const i64, rank: usize, re: f64, im: f64) -> RdStatus {
    guard(|| {
        let el = el.as_mut().ok_or_else(|| null("element"))?;
        let k = slice(k, rank, "k")?;
        let expected = 2 * el.inner.dim();
        if rank != expected {
            return Err(DeformError::DimensionMismatch { expected, got: rank }.into());
        }
        let term = FourierElement::monomial(el.inner.dim(), LatticeIndex::new(k.to_vec()), Complex64::new(re, im));
        el.inner = el.inner.add(&term)?;
        Ok(())
    })
}

/// Parses the JSON form `{"dim": n, "terms": [{"k": [...], "re": x, "im": y}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_element_from_json(json: *const c_char, out: *mut *mut RdElement) -> RdStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Fail(RdStatus::InvalidUtf8, e.to_string()))?;
        let el: FourierElement = serde_json::from_str(text).map_err(|e| Fail(RdStatus::InvalidArgument, e.to_string()))?;
        write_out(out, boxed(RdElement { inner: el }), "out")
    })
}

/// JSON form of the element; release with [`rd_string_free`].
///
/// # Safety
/// `el` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_element_to_json(el: *const RdElement, out: *mut *mut c_char) -> RdStatus {
    guard(|| {
        let el = deref(el, "element")?;
        let text = serde_json::to_string(&el.inner).expect("serializable");
        let c = CString::new(text).expect("JSON has no nul");
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of nonzero coefficients.
///
/// # Safety
/// `el` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_element_len(el: *const RdElement, out: *mut usize) -> RdStatus {
    guard(|| write_out(out, deref(el, "element")?.inner.len(), "out"))
}

/// Coefficient at the lattice point `k`.
///
/// # Safety
/// `el` must be a live handle, `k` must point to `rank` integers and the
/// outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_element_coeff(el: *const RdElement, k: *const i64, rank: usize, re: *mut f64, im: *mut f64) -> RdStatus {
    guard(|| {
        let el = deref(el, "element")?;
        let k = slice(k, rank, "k")?;
        let expected = 2 * el.inner.dim();
        if rank != expected {
            return Err(DeformError::DimensionMismatch { expected, got: rank }.into());
        }
        let c = el.inner.coeff(&LatticeIndex::new(k.to_vec()));
        write_out(re, c.re, "re")?;
        write_out(im, c.im, "im")
    })
}

/// # Safety
/// `el` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rd_element_free(el: *mut RdElement) {
    if !el.is_null() {
        drop(Box::from_raw(el));
    }
}

/// Evaluation at the point `x` of the torus (`len = 2n` angles).
///
/// # Safety
/// `x` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_state_point(x: *const f64, len: usize, out: *mut *mut RdState) -> RdStatus {
    guard(|| {
        let x = slice(x, len, "x")?;
        let state = MomentState::point(x.to_vec())?;
        write_out(out, boxed(RdState { inner: state }), "out")
    })
}

/// The Haar trace.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_state_haar(out: *mut *mut RdState) -> RdStatus {
    guard(|| write_out(out, boxed(RdState { inner: MomentState::haar() }), "out"))
}

/// # Safety
/// `state` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn rd_state_free(state: *mut RdState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `a ⋆_ℏ b` as a new element.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_star_product(data: *const RdData, a: *const RdElement, b: *const RdElement, out: *mut *mut RdElement) -> RdStatus {
    guard(|| {
        let value = star_product(&deref(data, "data")?.inner, &deref(a, "a")?.inner, &deref(b, "b")?.inner)?;
        write_out(out, boxed(RdElement { inner: value }), "out")
    })
}

/// `S_ℏ a` as a new element.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_smooth(data: *const RdData, a: *const RdElement, out: *mut *mut RdElement) -> RdStatus {
    guard(|| {
        let value = smooth(&deref(data, "data")?.inner, &deref(a, "a")?.inner)?;
        write_out(out, boxed(RdElement { inner: value }), "out")
    })
}

/// `ω_ℏ(a) = ω(S_ℏ a)`.
///
/// # Safety
/// All handles must be live; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_deformed_evaluate(state: *const RdState, data: *const RdData, a: *const RdElement, re: *mut f64, im: *mut f64) -> RdStatus {
    guard(|| {
        let v = deformed_evaluate(&deref(state, "state")?.inner, &deref(data, "data")?.inner, &deref(a, "a")?.inner)?;
        write_out(re, v.re, "re")?;
        write_out(im, v.im, "im")
    })
}

/// Bracket `lower ≤ ‖a‖_ℏ ≤ upper` from the compression to `{−N..N}^{2n}`.
///
/// # Safety
/// All handles must be live; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_norm_bracket(data: *const RdData, a: *const RdElement, cutoff: usize, lower: *mut f64, upper: *mut f64) -> RdStatus {
    guard(|| {
        let b = norm_bracket(&deref(data, "data")?.inner, &deref(a, "a")?.inner, cutoff)?;
        write_out(lower, b.lower, "lower")?;
        write_out(upper, b.upper, "upper")
    })
}

/// The constant `c(ℏ)²` in `‖S_ℏ a‖² ≤ c(ℏ)² ‖a‖²_ℏ`.
///
/// # Safety
/// `data` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rd_smoothing_norm_constant(data: *const RdData, out: *mut f64) -> RdStatus {
    guard(|| write_out(out, smoothing_norm_constant(&deref(data, "data")?.inner)?, "out"))
}
