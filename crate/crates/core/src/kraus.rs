//! Kraus (operator-sum) representations: construction, application,
//! verification.
//!
//! The qubit constructions all follow the same pattern. Both states are
//! diagonalised, a pair of operators is written down that carries the first
//! diagonal state to the second, and the pair is conjugated back into the
//! original bases:
//!
//! ```text
//! M_μ = U_t · M'_μ · U_0†
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, Complex64, ComplexMatrix};
use crate::state::{diagonalize_state, BlochVector, DensityMatrix, Ordering};
use crate::DEFAULT_TOL;

/// An ordered list of equally shaped operators `d_out × d_in`.
///
/// Construction only checks shapes. Completeness (`Σ M†M = I`) is a property
/// of the data and is enforced where the set is applied, so that incomplete
/// sets can still be loaded and diagnosed by [`verify_channel`].
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

impl KrausSet {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("Kraus set must not be empty".into()))?;
        let shape = first.shape();
        if let Some(bad) = ops.iter().find(|m| m.shape() != shape) {
            return Err(Error::ShapeMismatch {
                op: "KrausSet::new",
                left: shape,
                right: bad.shape(),
            });
        }
        Ok(Self {
            d_out: shape.0,
            d_in: shape.1,
            ops,
        })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<ComplexMatrix> {
        self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `Σ_μ M_μ† M_μ`.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.d_in, self.d_in);
        for m in &self.ops {
            acc = &acc + &(&m.adjoint() * m);
        }
        acc
    }

    /// `‖Σ_μ M_μ† M_μ − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        self.completeness_sum()
            .max_diff(&ComplexMatrix::identity(self.d_in))
            .expect("square")
    }

    /// `Σ_μ M_μ ρ M_μ†` on a raw matrix, with no checks beyond shape.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: rho.rows(),
            });
        }
        let mut acc = ComplexMatrix::zeros(self.d_out, self.d_out);
        for m in &self.ops {
            acc = &acc + &m.sandwich(rho)?;
        }
        Ok(acc)
    }

    /// Choi matrix `Σ_μ vec(M_μ) vec(M_μ)†` (column-stacking `vec`).
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.d_in * self.d_out;
        let mut acc = ComplexMatrix::zeros(n, n);
        for m in &self.ops {
            let v = m.vec_columns();
            acc = &acc + &ComplexMatrix::outer(&v, &v);
        }
        acc
    }
}

/// Applies the channel to a state, after checking completeness at the
/// default tolerance.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_channel_with_tol(k, rho, DEFAULT_TOL)
}

/// As [`apply_channel`]; the output is validated at `10·tol` since rounding
/// accumulates over the operator sum.
pub fn apply_channel_with_tol(k: &KrausSet, rho: &DensityMatrix, tol: f64) -> Result<DensityMatrix> {
    let res = k.completeness_residual();
    if res > tol {
        return Err(Error::Completeness(res));
    }
    let out = k.apply_matrix(rho.matrix())?;
    DensityMatrix::new(out, 10.0 * tol)
}

fn checked_sqrt(x: f64) -> Result<f64> {
    if x < -DEFAULT_TOL || x.is_nan() {
        return Err(Error::NegativeRadicand(x));
    }
    Ok(x.max(0.0).sqrt())
}

fn check_radius(name: &str, r: f64) -> Result<()> {
    if !(0.0..=1.0 + DEFAULT_TOL).contains(&r) {
        return Err(Error::InvalidArgument(format!("{name} = {r} outside [0, 1]")));
    }
    Ok(())
}

/// The pair carrying `diag((1−r0)/2, (1+r0)/2)` to `diag((1+r)/2, (1−r)/2)`:
///
/// ```text
/// M'_0 = diag(1, √((1−r)/(1+r0)))      M'_1 = [[0, √((r+r0)/(1+r0))], [0, 0]]
/// ```
pub fn diagonal_pair_kraus(r0: f64, r: f64) -> Result<KrausSet> {
    check_radius("r0", r0)?;
    check_radius("r", r)?;
    let keep = checked_sqrt((1.0 - r) / (1.0 + r0))?;
    let lift = checked_sqrt((r + r0) / (1.0 + r0))?;
    let zero = c(0.0, 0.0);
    let m0 = ComplexMatrix::from_rows(&[[c(1.0, 0.0), zero], [zero, c(keep, 0.0)]]);
    let m1 = ComplexMatrix::from_rows(&[[zero, c(lift, 0.0)], [zero, zero]]);
    KrausSet::new(vec![m0, m1])
}

/// Replaces every operator `M` by `u_out · M · u_in†`.
pub fn conjugate_kraus(k: &KrausSet, u_out: &ComplexMatrix, u_in: &ComplexMatrix) -> Result<KrausSet> {
    conjugate_kraus_with_tol(k, u_out, u_in, DEFAULT_TOL)
}

pub fn conjugate_kraus_with_tol(
    k: &KrausSet,
    u_out: &ComplexMatrix,
    u_in: &ComplexMatrix,
    tol: f64,
) -> Result<KrausSet> {
    u_out.ensure_unitary(tol)?;
    u_in.ensure_unitary(tol)?;
    if u_out.rows() != k.d_out() || u_in.rows() != k.d_in() {
        return Err(Error::ShapeMismatch {
            op: "conjugate_kraus",
            left: (k.d_out(), k.d_in()),
            right: (u_out.rows(), u_in.rows()),
        });
    }
    let u_in_dag = u_in.adjoint();
    let ops = k
        .ops()
        .iter()
        .map(|m| u_out.try_mul(m)?.try_mul(&u_in_dag))
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops)
}

/// Two Kraus operators taking the qubit state `rho0` to `rhot`.
///
/// `rho0` is diagonalised with its minus eigenvector first, `rhot` with its
/// plus eigenvector first; [`diagonal_pair_kraus`] connects the diagonal
/// forms and the bases conjugate it back.
pub fn general_qubit_kraus(rho0: &DensityMatrix, rhot: &DensityMatrix) -> Result<KrausSet> {
    let d0 = diagonalize_state(rho0, Ordering::MinusFirst)?;
    let dt = diagonalize_state(rhot, Ordering::PlusFirst)?;
    let pair = diagonal_pair_kraus(d0.radius().min(1.0), dt.radius().min(1.0))?;
    conjugate_kraus(&pair, &dt.basis, &d0.basis)
}

/// Entrywise closed form of [`general_qubit_kraus`] in Bloch coordinates.
pub fn closed_form_qubit_kraus(b0: &BlochVector, bt: &BlochVector) -> Result<KrausSet> {
    let (r0, r) = (b0.r.min(1.0), bt.r.min(1.0));
    check_radius("r0", r0)?;
    check_radius("r", r)?;
    let k = checked_sqrt((1.0 - r) / (1.0 + r0))?;
    let s = checked_sqrt((r + r0) / (1.0 + r0))?;
    let (sin0, cos0) = (b0.theta / 2.0).sin_cos();
    let (sint, cost) = (bt.theta / 2.0).sin_cos();
    let e = |angle: f64| Complex64::from_polar(1.0, angle);
    let (phi0, phi) = (b0.phi, bt.phi);

    let m0 = ComplexMatrix::from_rows(&[
        [
            c(-cost * sin0, 0.0) - e(phi0 - phi) * (k * sint * cos0),
            e(-phi0) * (cost * cos0) - e(-phi) * (k * sint * sin0),
        ],
        [
            -e(phi) * (sint * sin0) + e(phi0) * (k * cost * cos0),
            e(phi - phi0) * (sint * cos0) + c(k * cost * sin0, 0.0),
        ],
    ]);
    let m1 = ComplexMatrix::from_rows(&[
        [e(phi0) * (s * cost * cos0), c(s * cost * sin0, 0.0)],
        [e(phi + phi0) * (s * sint * cos0), e(phi) * (s * sint * sin0)],
    ]);
    KrausSet::new(vec![m0, m1])
}

/// Kraus operators of the reduced dynamics for an uncorrelated initial state
/// `ρ_i ⊗ ρ_e`: with `ρ_e = Σ_ν p_ν |ν⟩⟨ν|`,
/// `M_{μν} = √p_ν ⟨μ| U |ν⟩` where `⟨μ|` runs over the computational basis of
/// the environment. Operators are ordered `μ`-major, `d_e²` of them.
pub fn factorable_kraus(u_ie: &ComplexMatrix, rho_e0: &DensityMatrix) -> Result<KrausSet> {
    let de = rho_e0.dim();
    let n = u_ie.rows();
    if !u_ie.is_square() || !n.is_multiple_of(de) {
        return Err(Error::DimensionMismatch {
            expected: de,
            found: n,
        });
    }
    u_ie.ensure_unitary(10.0 * DEFAULT_TOL)?;
    let di = n / de;
    let env = eigh(rho_e0.matrix(), f64::INFINITY)?;
    let mut ops = Vec::with_capacity(de * de);
    for mu in 0..de {
        for nu in 0..de {
            let weight = env.values[nu].max(0.0).sqrt();
            let ket = env.vectors.column(nu);
            let mut m = ComplexMatrix::zeros(di, di);
            for a in 0..di {
                for b in 0..di {
                    let amp: Complex64 = (0..de).map(|e| u_ie[(a * de + mu, b * de + e)] * ket[e]).sum();
                    m[(a, b)] = amp * weight;
                }
            }
            ops.push(m);
        }
    }
    KrausSet::new(ops)
}

/// A replacement channel in any dimension: `M_{jk} = √q_j |v_j⟩⟨w_k|`, where
/// `(q_j, v_j)` is the spectrum of `rhot` and `w_k` the eigenbasis of `rho0`.
/// Every input is mapped to `rhot`. Total but not rank-minimal (`d²`
/// operators).
pub fn measure_prepare_kraus(rho0: &DensityMatrix, rhot: &DensityMatrix) -> Result<KrausSet> {
    let d = rho0.dim();
    if rhot.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rhot.dim(),
        });
    }
    let target = eigh(rhot.matrix(), f64::INFINITY)?;
    let source = eigh(rho0.matrix(), f64::INFINITY)?;
    let mut ops = Vec::with_capacity(d * d);
    for j in 0..d {
        let v: Vec<Complex64> = target
            .vectors
            .column(j)
            .into_iter()
            .map(|z| z * target.values[j].max(0.0).sqrt())
            .collect();
        for k in 0..d {
            ops.push(ComplexMatrix::outer(&v, &source.vectors.column(k)));
        }
    }
    KrausSet::new(ops)
}

/// `M̃_μ = Σ_ν M_ν V_{μν}`. If `v` is larger than the set, the set is padded
/// with zero operators first.
pub fn unitary_remix(k: &KrausSet, v: &ComplexMatrix) -> Result<KrausSet> {
    v.ensure_unitary(10.0 * DEFAULT_TOL)?;
    let n = v.rows();
    if n < k.len() {
        return Err(Error::DimensionMismatch {
            expected: k.len(),
            found: n,
        });
    }
    let zero = ComplexMatrix::zeros(k.d_out(), k.d_in());
    let padded: Vec<&ComplexMatrix> = k.ops().iter().chain(std::iter::repeat(&zero)).take(n).collect();
    let ops = (0..n)
        .map(|mu| {
            padded
                .iter()
                .enumerate()
                .fold(zero.clone(), |acc, (nu, m)| &acc + &m.scale(v[(mu, nu)]))
        })
        .collect();
    KrausSet::new(ops)
}

/// Residuals from checking a Kraus set against a claimed state pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelReport {
    /// `‖Σ M†M − I‖_max`
    pub completeness_residual: f64,
    /// `‖Σ M ρ0 M† − ρt‖_max`
    pub reconstruction_residual: f64,
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eigenvalue: f64,
    /// `|tr(Σ M ρ0 M†) − 1|`
    pub output_trace_residual: f64,
    /// Smallest eigenvalue of the (Hermitian part of the) output.
    pub output_min_eigenvalue: f64,
}

impl ChannelReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.completeness_residual <= tol
            && self.reconstruction_residual <= tol
            && self.choi_min_eigenvalue >= -tol
            && self.output_trace_residual <= tol
            && self.output_min_eigenvalue >= -tol
    }

    pub fn is_finite(&self) -> bool {
        [
            self.completeness_residual,
            self.reconstruction_residual,
            self.choi_min_eigenvalue,
            self.output_trace_residual,
            self.output_min_eigenvalue,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// Measures everything about `k` as a channel from `rho0` to `rhot`. Only
/// shape mismatches are errors; numeric failures show up as residuals.
pub fn verify_channel(k: &KrausSet, rho0: &DensityMatrix, rhot: &DensityMatrix) -> Result<ChannelReport> {
    if rhot.dim() != k.d_out() {
        return Err(Error::DimensionMismatch {
            expected: k.d_out(),
            found: rhot.dim(),
        });
    }
    let out = k.apply_matrix(rho0.matrix())?;
    let hermitian_part = (&out + &out.adjoint()).scale_real(0.5);
    let choi = k.choi();
    Ok(ChannelReport {
        completeness_residual: k.completeness_residual(),
        reconstruction_residual: out.max_diff(rhot.matrix())?,
        choi_min_eigenvalue: eigh(&choi, f64::INFINITY)?.min_value(),
        output_trace_residual: (out.trace()? - c(1.0, 0.0)).norm(),
        output_min_eigenvalue: eigh(&hermitian_part, f64::INFINITY)?.min_value(),
    })
}
