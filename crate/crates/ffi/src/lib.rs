//! C ABI over `krauslab`.
//!
//! Matrices, states and Kraus sets cross the boundary as opaque heap handles
//! owned by the caller and released with the matching `kl_*_free`. Every
//! fallible call returns a [`KlStatus`]; on failure a message is available
//! from [`kl_last_error_message`] until the next failing call on the same
//! thread. Complex data is passed as interleaved `(re, im)` doubles in
//! row-major order.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use krauslab::dynamics::{factor_local_unitary, reduced_dynamics, CnotScenario};
use krauslab::io::{to_json_string, KrausJson};
use krauslab::kraus::{
    apply_channel_with_tol, closed_form_qubit_kraus, general_qubit_kraus, measure_prepare_kraus,
    unitary_remix, verify_channel,
};
use krauslab::linalg::{c, ComplexMatrix};
use krauslab::state::{bloch_to_density, BlochVector, DensityMatrix};
use krauslab::{Error, KrausSet, DEFAULT_TOL};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    NotHermitian = 5,
    NotUnitary = 6,
    NoConvergence = 7,
    Completeness = 8,
    NotFactorable = 9,
    Serialization = 10,
    Panic = 11,
}

impl From<&Error> for KlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::ShapeMismatch { .. } | Error::NotSquare(..) | Error::DimensionMismatch { .. } => {
                KlStatus::DimensionMismatch
            }
            Error::InvalidState(_) => KlStatus::InvalidState,
            Error::NotHermitian(_) => KlStatus::NotHermitian,
            Error::NotUnitary(_) => KlStatus::NotUnitary,
            Error::NoConvergence(_) => KlStatus::NoConvergence,
            Error::Completeness(_) => KlStatus::Completeness,
            Error::Json(_) | Error::Io(_) | Error::Format(_) => KlStatus::Serialization,
            Error::DataLength { .. }
            | Error::NonFinite(..)
            | Error::NegativeRadicand(_)
            | Error::InvalidArgument(_) => KlStatus::InvalidArgument,
        }
    }
}

/// Opaque dense complex matrix.
pub struct KlMatrix(ComplexMatrix);

/// Opaque validated density matrix.
pub struct KlState(DensityMatrix);

/// Opaque Kraus set.
pub struct KlKrausSet(KrausSet);

/// Bloch coordinates of a qubit state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlBloch {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Residuals reported by `kl_kraus_verify`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlChannelReport {
    pub completeness_residual: f64,
    pub reconstruction_residual: f64,
    pub choi_min_eigenvalue: f64,
    pub output_trace_residual: f64,
    pub output_min_eigenvalue: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

enum Failure {
    Status(KlStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(KlStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KlStatus::Ok,
        Ok(Err(Failure::Status(status, msg))) => {
            set_last_error(msg);
            status
        }
        Ok(Err(Failure::Core(e))) => {
            let status = KlStatus::from(&e);
            set_last_error(e.to_string());
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            KlStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn bloch(b: KlBloch) -> Result<BlochVector, Failure> {
    Ok(BlochVector::new(b.r, b.theta, b.phi)?)
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn kl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default absolute tolerance used by the library.
#[no_mangle]
pub extern "C" fn kl_default_tolerance() -> f64 {
    DEFAULT_TOL
}

// ---- matrices -------------------------------------------------------------

/// Builds a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut KlMatrix,
) -> KlStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure::Status(KlStatus::InvalidArgument, "dimensions overflow".into()))?;
        let raw = std::slice::from_raw_parts(data, 2 * n);
        let entries = raw.chunks_exact(2).map(|p| c(p[0], p[1])).collect();
        store(out, KlMatrix(ComplexMatrix::new(rows, cols, entries)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn kl_matrix_free(m: *mut KlMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn kl_matrix_rows(m: *const KlMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// Column count, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn kl_matrix_cols(m: *const KlMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

#[no_mangle]
pub unsafe extern "C" fn kl_matrix_get(
    m: *const KlMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> KlStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if re.is_null() || im.is_null() {
            return Err(null("output pointer"));
        }
        if row >= m.0.rows() || col >= m.0.cols() {
            return Err(Failure::Status(
                KlStatus::InvalidArgument,
                format!("index ({row}, {col}) outside {}x{}", m.0.rows(), m.0.cols()),
            ));
        }
        let z = m.0[(row, col)];
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Copies the entries into `buf` as interleaved doubles; `len` is the
/// capacity of `buf` in doubles and must be at least `2·rows·cols`.
#[no_mangle]
pub unsafe extern "C" fn kl_matrix_copy_data(m: *const KlMatrix, buf: *mut f64, len: usize) -> KlStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let need = 2 * m.0.data().len();
        if len < need {
            return Err(Failure::Status(
                KlStatus::InvalidArgument,
                format!("buffer holds {len} doubles, need {need}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(m.0.data()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

// ---- states ---------------------------------------------------------------

#[no_mangle]
pub unsafe extern "C" fn kl_state_from_bloch(b: KlBloch, out: *mut *mut KlState) -> KlStatus {
    guard(|| store(out, KlState(bloch_to_density(&bloch(b)?)?)))
}

/// Validates `m` as a density matrix at tolerance `tol`.
#[no_mangle]
pub unsafe extern "C" fn kl_state_from_matrix(m: *const KlMatrix, tol: f64, out: *mut *mut KlState) -> KlStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        store(out, KlState(DensityMatrix::new(m.0.clone(), tol)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn kl_state_free(s: *mut KlState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn kl_state_dim(s: *const KlState) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the state's matrix into a new handle.
#[no_mangle]
pub unsafe extern "C" fn kl_state_matrix(s: *const KlState, out: *mut *mut KlMatrix) -> KlStatus {
    guard(|| store(out, KlMatrix(deref(s, "state")?.0.matrix().clone())))
}

#[no_mangle]
pub unsafe extern "C" fn kl_state_to_bloch(s: *const KlState, out: *mut KlBloch) -> KlStatus {
    guard(|| {
        let b = deref(s, "state")?.0.to_bloch()?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = KlBloch {
            r: b.r,
            theta: b.theta,
            phi: b.phi,
        };
        Ok(())
    })
}

/// Trace distance `½‖a − b‖₁`.
#[no_mangle]
pub unsafe extern "C" fn kl_state_trace_distance(a: *const KlState, b: *const KlState, out: *mut f64) -> KlStatus {
    guard(|| {
        let d = krauslab::state::trace_distance(&deref(a, "state a")?.0, &deref(b, "state b")?.0)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = d;
        Ok(())
    })
}

// ---- Kraus sets -----------------------------------------------------------

/// Builds a set from `n` matrices (copied; the inputs stay owned by the caller).
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_from_ops(
    ops: *const *const KlMatrix,
    n: usize,
    out: *mut *mut KlKrausSet,
) -> KlStatus {
    guard(|| {
        if ops.is_null() {
            return Err(null("ops"));
        }
        let mats = std::slice::from_raw_parts(ops, n)
            .iter()
            .map(|&p| deref(p, "operator").map(|m| m.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        store(out, KlKrausSet(KrausSet::new(mats)?))
    })
}

/// Two operators taking qubit state `rho0` to `rhot`.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_general(
    rho0: *const KlState,
    rhot: *const KlState,
    out: *mut *mut KlKrausSet,
) -> KlStatus {
    guard(|| {
        let k = general_qubit_kraus(&deref(rho0, "rho0")?.0, &deref(rhot, "rhot")?.0)?;
        store(out, KlKrausSet(k))
    })
}

/// Closed-form qubit operators from Bloch coordinates.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_closed_form(b0: KlBloch, bt: KlBloch, out: *mut *mut KlKrausSet) -> KlStatus {
    guard(|| store(out, KlKrausSet(closed_form_qubit_kraus(&bloch(b0)?, &bloch(bt)?)?)))
}

/// Replacement channel onto `rhot`, any dimension.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_measure_prepare(
    rho0: *const KlState,
    rhot: *const KlState,
    out: *mut *mut KlKrausSet,
) -> KlStatus {
    guard(|| {
        let k = measure_prepare_kraus(&deref(rho0, "rho0")?.0, &deref(rhot, "rhot")?.0)?;
        store(out, KlKrausSet(k))
    })
}

/// Closed-form Kraus pair of the two-qubit controlled-NOT example.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_cnot_analytic(r0: f64, t: f64, out: *mut *mut KlKrausSet) -> KlStatus {
    guard(|| store(out, KlKrausSet(CnotScenario::new(r0)?.analytic_kraus(t)?)))
}

#[no_mangle]
pub unsafe extern "C" fn kl_kraus_free(k: *mut KlKrausSet) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Number of operators, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_len(k: *const KlKrausSet) -> usize {
    k.as_ref().map_or(0, |k| k.0.len())
}

/// Copies operator `index` into a new matrix handle.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_op(k: *const KlKrausSet, index: usize, out: *mut *mut KlMatrix) -> KlStatus {
    guard(|| {
        let k = deref(k, "Kraus set")?;
        let op = k.0.ops().get(index).ok_or_else(|| {
            Failure::Status(
                KlStatus::InvalidArgument,
                format!("operator index {index} out of range ({} operators)", k.0.len()),
            )
        })?;
        store(out, KlMatrix(op.clone()))
    })
}

/// `Σ M ρ M†`, after checking completeness at `tol`.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_apply(
    k: *const KlKrausSet,
    rho: *const KlState,
    tol: f64,
    out: *mut *mut KlState,
) -> KlStatus {
    guard(|| {
        let s = apply_channel_with_tol(&deref(k, "Kraus set")?.0, &deref(rho, "state")?.0, tol)?;
        store(out, KlState(s))
    })
}

#[no_mangle]
pub unsafe extern "C" fn kl_kraus_verify(
    k: *const KlKrausSet,
    rho0: *const KlState,
    rhot: *const KlState,
    out: *mut KlChannelReport,
) -> KlStatus {
    guard(|| {
        let r = verify_channel(&deref(k, "Kraus set")?.0, &deref(rho0, "rho0")?.0, &deref(rhot, "rhot")?.0)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = KlChannelReport {
            completeness_residual: r.completeness_residual,
            reconstruction_residual: r.reconstruction_residual,
            choi_min_eigenvalue: r.choi_min_eigenvalue,
            output_trace_residual: r.output_trace_residual,
            output_min_eigenvalue: r.output_min_eigenvalue,
        };
        Ok(())
    })
}

/// `M̃_μ = Σ_ν M_ν V_μν`.
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_remix(
    k: *const KlKrausSet,
    v: *const KlMatrix,
    out: *mut *mut KlKrausSet,
) -> KlStatus {
    guard(|| {
        let mixed = unitary_remix(&deref(k, "Kraus set")?.0, &deref(v, "unitary")?.0)?;
        store(out, KlKrausSet(mixed))
    })
}

/// JSON encoding of the set; release with [`kl_string_free`].
#[no_mangle]
pub unsafe extern "C" fn kl_kraus_to_json(k: *const KlKrausSet, out: *mut *mut c_char) -> KlStatus {
    guard(|| {
        let text = to_json_string(&KrausJson::from(&deref(k, "Kraus set")?.0))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn kl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- dynamics -------------------------------------------------------------

/// Controlled-NOT example at time `t`: numerically evolved reduced state and
/// inhomogeneous term δρ. Either output pointer may be NULL to skip it.
#[no_mangle]
pub unsafe extern "C" fn kl_cnot_evolve(
    r0: f64,
    t: f64,
    rho_t: *mut *mut KlState,
    delta_rho: *mut *mut KlMatrix,
) -> KlStatus {
    guard(|| {
        let sc = CnotScenario::new(r0)?;
        let h = krauslab::dynamics::cnot_hamiltonian();
        let d = reduced_dynamics(&h, &sc.joint_initial_state(), t)?;
        if !rho_t.is_null() {
            store(rho_t, KlState(d.rho_t))?;
        }
        if !delta_rho.is_null() {
            store(delta_rho, KlMatrix(d.delta_rho))?;
        }
        Ok(())
    })
}

/// Splits `u` as `U_i ⊗ U_e`. Returns `NotFactorable` (outputs untouched)
/// when no such split exists within `tol`.
#[no_mangle]
pub unsafe extern "C" fn kl_factor_local_unitary(
    u: *const KlMatrix,
    d_i: usize,
    d_e: usize,
    tol: f64,
    out_system: *mut *mut KlMatrix,
    out_environment: *mut *mut KlMatrix,
) -> KlStatus {
    guard(|| {
        let u = deref(u, "unitary")?;
        if out_system.is_null() || out_environment.is_null() {
            return Err(null("output pointer"));
        }
        match factor_local_unitary(&u.0, (d_i, d_e), tol) {
            Some((a, b)) => {
                store(out_system, KlMatrix(a))?;
                store(out_environment, KlMatrix(b))
            }
            None => Err(Failure::Status(
                KlStatus::NotFactorable,
                "unitary is not a local product".into(),
            )),
        }
    })
}
