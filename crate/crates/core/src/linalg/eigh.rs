//! Hermitian eigendecomposition.
//!
//! 2×2 inputs are solved in closed form from their Pauli coefficients. Larger
//! inputs go through a cyclic complex Jacobi iteration: each rotation first
//! removes the phase of the pivot `a_pq` with a diagonal unitary and then
//! applies an ordinary real Jacobi rotation, so the accumulated transform is
//! unitary at every step.
//!
//! Output convention (relied on by the state and Kraus code):
//! - eigenvalues sorted descending;
//! - each eigenvector is scaled so that its first component of largest
//!   modulus is real and nonnegative.

use super::{c, pauli, Complex64, ComplexMatrix};
use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Converged once the off-diagonal Frobenius norm drops below this fraction
/// of the input's Frobenius norm.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V · diag(values) · V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| c(x, 0.0))
    }

    /// `V · diag(f(values)) · V†`, i.e. a spectral function of the input.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }
}

/// Eigendecomposition of a Hermitian matrix. `tol` bounds the accepted
/// Hermiticity residual `‖m − m†‖_max`.
pub fn eigh(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let herm = m.hermiticity_residual()?;
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }
    let (values, vectors) = match m.rows() {
        1 => (vec![m[(0, 0)].re], ComplexMatrix::identity(1)),
        2 => eigh_2x2(m),
        _ => eigh_jacobi(m)?,
    };
    Ok(finish(values, vectors))
}

fn eigh_2x2(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (a0, ax, ay, az) = pauli::decompose(m);
    let n = (ax * ax + ay * ay + az * az).sqrt();
    if n == 0.0 {
        return (vec![a0, a0], ComplexMatrix::identity(2));
    }
    // Eigenvector of a·σ for +|a|, picking the better-conditioned of the two
    // equivalent unnormalised forms.
    let (u0, u1) = if az >= 0.0 {
        (c(n + az, 0.0), c(ax, ay))
    } else {
        (c(ax, -ay), c(n - az, 0.0))
    };
    let norm = (u0.norm_sqr() + u1.norm_sqr()).sqrt();
    let (p0, p1) = (u0 / norm, u1 / norm);
    let vectors = ComplexMatrix::from_rows(&[[p0, -p1.conj()], [p1, p0.conj()]]);
    (vec![a0 + n, a0 - n], vectors)
}

fn eigh_jacobi(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.rows();
    // Symmetrise so that rounding in the input cannot bias the iteration.
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.norm_fro();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= OFF_DIAGONAL_THRESHOLD * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_norm(&a) > OFF_DIAGONAL_THRESHOLD * scale {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    Ok(((0..n).map(|i| a[(i, i)].re).collect(), v))
}

/// One complex Jacobi rotation zeroing `a[p][q]`; `a ← J† a J`, `v ← v J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g; // e^{iα}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let n = a.rows();

    // J = diag(1, e^{-iα}) on (p,q), then the real rotation.
    let jpp = c(cs, 0.0);
    let jpq = c(sn, 0.0);
    let jqp = -phase.conj() * sn;
    let jqq = phase.conj() * cs;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = c(0.0, 0.0);
    a[(q, p)] = c(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);
}

/// Sort descending and fix eigenvector phases.
fn finish(values: Vec<f64>, vectors: ComplexMatrix) -> EigenDecomposition {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src);
        fix_phase(&mut col);
        sorted.set_column(dst, &col);
    }
    EigenDecomposition {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: sorted,
    }
}

/// Rotate `v` so its first component of (near-)largest modulus is real and
/// nonnegative. Ties within a relative 1e-9 go to the lowest index.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let anchor = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-9))
        .copied()
        .expect("max exists");
    let rot = anchor.conj() / anchor.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
}
