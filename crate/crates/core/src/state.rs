//! Density matrices, the qubit Bloch parametrisation, and the diagonalising
//! bases used by the qubit Kraus construction.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, pauli, Complex64, ComplexMatrix};
use crate::DEFAULT_TOL;

/// One failed density-matrix invariant, with how badly it failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    NotHermitian { residual: f64 },
    Trace { residual: f64 },
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            Violation::NotHermitian { residual } => {
                write!(f, "not Hermitian (residual {residual:e})")
            }
            Violation::Trace { residual } => write!(f, "trace differs from 1 by {residual:e}"),
            Violation::NotPositive { min_eigenvalue } => {
                write!(f, "not positive semidefinite (min eigenvalue {min_eigenvalue:e})")
            }
        }
    }
}

/// Every invariant a candidate density matrix violated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks the three density-matrix invariants and reports each one that
/// fails, rather than stopping at the first.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> std::result::Result<DensityMatrix, ValidationReport> {
    let mut report = ValidationReport::default();
    if !m.is_square() {
        report.violations.push(Violation::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
        return Err(report);
    }
    let herm = m.hermiticity_residual().expect("square");
    if herm > tol {
        report.violations.push(Violation::NotHermitian { residual: herm });
    }
    let tr = m.trace().expect("square");
    let trace_residual = (tr - c(1.0, 0.0)).norm();
    if trace_residual > tol {
        report.violations.push(Violation::Trace {
            residual: trace_residual,
        });
    }
    // Positivity is judged on the Hermitian part so that it is reported even
    // when Hermiticity already failed.
    let hermitian_part = (m + &m.adjoint()).scale_real(0.5);
    match eigh(&hermitian_part, f64::INFINITY) {
        Ok(e) if e.min_value() < -tol => report.violations.push(Violation::NotPositive {
            min_eigenvalue: e.min_value(),
        }),
        Ok(_) => {}
        Err(_) => report.violations.push(Violation::NotPositive {
            min_eigenvalue: f64::NAN,
        }),
    }
    if report.is_empty() {
        Ok(DensityMatrix { mat: m.clone() })
    } else {
        Err(report)
    }
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        validate_density(&mat, tol).map_err(Error::InvalidState)
    }

    /// Pure state `|ψ⟩⟨ψ|` of a (not necessarily normalised) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("state vector has zero norm".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|&z| z / norm).collect();
        Ok(Self {
            mat: ComplexMatrix::outer(&v, &v),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.mat, f64::INFINITY)
            .expect("density matrices are Hermitian")
            .values
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kron(&other.mat),
        }
    }

    pub fn to_bloch(&self) -> Result<BlochVector> {
        density_to_bloch(self)
    }
}

/// Spherical Bloch coordinates `(r, θ, φ)` of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochVector {
    /// Checks ranges: `0 ≤ r ≤ 1 + ε`, `0 ≤ θ ≤ π` (within ε). `φ` is wrapped
    /// into `[0, 2π)`.
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Bloch coordinate".into()));
        }
        if !(0.0..=1.0 + DEFAULT_TOL).contains(&r) {
            return Err(Error::InvalidArgument(format!(
                "Bloch radius {r} outside [0, 1]"
            )));
        }
        if !(-DEFAULT_TOL..=PI + DEFAULT_TOL).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "polar angle {theta} outside [0, π]"
            )));
        }
        Ok(Self {
            r,
            theta: theta.clamp(0.0, PI),
            phi: wrap_angle(phi),
        })
    }

    /// Cartesian components `r·(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `½(I + r⃗·σ⃗)`.
pub fn bloch_to_density(b: &BlochVector) -> Result<DensityMatrix> {
    if b.r > 1.0 + DEFAULT_TOL {
        return Err(Error::InvalidArgument(format!(
            "Bloch radius {} exceeds 1",
            b.r
        )));
    }
    let [x, y, z] = b.cartesian();
    Ok(DensityMatrix {
        mat: pauli::from_bloch_components(x, y, z),
    })
}

/// Inverse of [`bloch_to_density`]. At the poles of the parametrisation the
/// angles are pinned: `r < ε` gives `θ = φ = 0`, and `sinθ < ε` gives `φ = 0`.
pub fn density_to_bloch(d: &DensityMatrix) -> Result<BlochVector> {
    if d.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: d.dim(),
        });
    }
    let (_, hx, hy, hz) = pauli::decompose(d.matrix());
    let (x, y, z) = (2.0 * hx, 2.0 * hy, 2.0 * hz);
    let r = (x * x + y * y + z * z).sqrt();
    if r < DEFAULT_TOL {
        return Ok(BlochVector { r, theta: 0.0, phi: 0.0 });
    }
    let rho_xy = (x * x + y * y).sqrt();
    let theta = rho_xy.atan2(z);
    let phi = if rho_xy / r < DEFAULT_TOL {
        0.0
    } else {
        wrap_angle(y.atan2(x))
    };
    Ok(BlochVector { r, theta, phi })
}

/// Column layout of a qubit diagonalising basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// Columns `(v₊, v₋)`: the state becomes `diag((1+r)/2, (1−r)/2)`.
    PlusFirst,
    /// Columns `(v₋, v₊)`: the state becomes `diag((1−r)/2, (1+r)/2)`.
    MinusFirst,
}

/// A qubit state written as `basis · diag · basis†`.
#[derive(Debug, Clone)]
pub struct DiagonalizedState {
    /// `(λ₊, λ₋)` with `λ₊ ≥ λ₋`.
    pub eigs: (f64, f64),
    pub basis: ComplexMatrix,
    pub ordering: Ordering,
}

impl DiagonalizedState {
    /// Bloch radius `λ₊ − λ₋`.
    pub fn radius(&self) -> f64 {
        self.eigs.0 - self.eigs.1
    }

    /// The diagonal matrix in this state's column order.
    pub fn diagonal(&self) -> ComplexMatrix {
        let (p, m) = self.eigs;
        match self.ordering {
            Ordering::PlusFirst => ComplexMatrix::from_real_diagonal(&[p, m]),
            Ordering::MinusFirst => ComplexMatrix::from_real_diagonal(&[m, p]),
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.basis.sandwich(&self.diagonal()).expect("2x2")
    }
}

/// Diagonalises a qubit state with a basis in the gauge of the closed-form
/// Kraus operators:
///
/// ```text
/// MinusFirst: [[-sin(θ/2),        cos(θ/2)e^{-iφ}],
///              [ cos(θ/2)e^{iφ},  sin(θ/2)       ]]
/// PlusFirst:  [[ cos(θ/2),       -sin(θ/2)e^{-iφ}],
///              [ sin(θ/2)e^{iφ},  cos(θ/2)       ]]
/// ```
///
/// The eigenvectors come from [`eigh`]; only their phases are adjusted. A
/// maximally mixed input gets the identity basis.
pub fn diagonalize_state(d: &DensityMatrix, ordering: Ordering) -> Result<DiagonalizedState> {
    let bloch = density_to_bloch(d)?;
    let e = eigh(d.matrix(), f64::INFINITY)?;
    let eigs = (e.values[0], e.values[1]);
    if bloch.r < DEFAULT_TOL {
        return Ok(DiagonalizedState {
            eigs,
            basis: ComplexMatrix::identity(2),
            ordering,
        });
    }
    let mut plus = e.vectors.column(0);
    let mut minus = e.vectors.column(1);
    // Near the poles the generic anchor components vanish, so the phase is
    // pinned on the other component (matching φ = 0 there).
    let polar = bloch.theta.sin() < DEFAULT_TOL;
    let north = bloch.theta < PI / 2.0;
    match ordering {
        Ordering::MinusFirst => {
            if polar && north {
                set_real(&mut minus, 1, 1.0);
                set_real(&mut plus, 0, 1.0);
            } else {
                set_real(&mut minus, 0, -1.0);
                set_real(&mut plus, 1, 1.0);
            }
        }
        Ordering::PlusFirst => {
            if polar && !north {
                set_real(&mut plus, 1, 1.0);
                set_real(&mut minus, 0, -1.0);
            } else {
                set_real(&mut plus, 0, 1.0);
                set_real(&mut minus, 1, 1.0);
            }
        }
    }
    let mut basis = ComplexMatrix::zeros(2, 2);
    let (first, second) = match ordering {
        Ordering::PlusFirst => (&plus, &minus),
        Ordering::MinusFirst => (&minus, &plus),
    };
    basis.set_column(0, first);
    basis.set_column(1, second);
    Ok(DiagonalizedState { eigs, basis, ordering })
}

/// Multiplies `v` by a phase making `v[idx]` real with the given sign.
fn set_real(v: &mut [Complex64], idx: usize, sign: f64) {
    let a = v[idx];
    let n = a.norm();
    if n == 0.0 {
        return;
    }
    let rot = a.conj() / n * sign;
    for z in v.iter_mut() {
        *z *= rot;
    }
}

/// `½‖a − b‖₁`, from the eigenvalues of `a − b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = a.matrix().try_sub(b.matrix())?;
    let e = eigh(&diff, f64::INFINITY)?;
    Ok(0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>())
}
