//! Dense complex matrices and the handful of decompositions the rest of the
//! crate is built on.
//!
//! Everything here is sized for small operators (qubits, qutrits, a few
//! coupled two-level systems). Storage is row-major `Vec<Complex64>`.

mod eigh;
mod expm;
pub mod pauli;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64;

pub use self::eigh::{eigh, EigenDecomposition, MAX_SWEEPS, OFF_DIAGONAL_THRESHOLD};
pub use self::expm::expm_hermitian_generator;

use crate::error::{Error, Result};

/// Scalar type used throughout the crate.
pub type ComplexScalar = Complex64;

/// Shorthand for building a complex scalar.
#[inline]
pub const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) const ZERO: Complex64 = c(0.0, 0.0);
pub(crate) const ONE: Complex64 = c(1.0, 0.0);
pub(crate) const I: Complex64 = c(0.0, 1.0);

/// Which factor of a bipartite space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The first (system) factor, `d_i`.
    System,
    /// The second (environment) factor, `d_e`.
    Environment,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DataLength {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(k / cols, k % cols));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; intended for
    /// literals in code and tests.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(n > 0 && m > 0, "empty matrix literal");
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), m, "ragged matrix literal");
            data.extend_from_slice(r);
        }
        Self::new(n, m, data).expect("matrix literal must be finite")
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major view of the entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        Ok(self.diagonal().into_iter().sum())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// `a · m · a†`, the conjugation every channel and evolution uses.
    pub fn sandwich(&self, m: &Self) -> Result<Self> {
        self.try_mul(m)?.try_mul(&self.adjoint())
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_max`, or an error when shapes differ.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.norm_max())
    }

    pub fn hermiticity_residual(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// `‖m†m − I‖_max`.
    pub fn unitarity_residual(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        self.adjoint()
            .try_mul(self)?
            .max_diff(&Self::identity(self.rows))
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let res = self.unitarity_residual()?;
        if res > tol {
            return Err(Error::NotUnitary(res));
        }
        Ok(())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_diff(other).is_ok_and(|d| d <= tol)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (ar, ac) = self.shape();
        let (br, bc) = other.shape();
        let mut out = Self::zeros(ar * br, ac * bc);
        for i in 0..ar {
            for j in 0..ac {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..br {
                    for l in 0..bc {
                        out[(i * br + k, j * bc + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Partial trace of a `(d_i·d_e)`-square operator in system-major
    /// ordering (`|s⟩⊗|e⟩` has index `s·d_e + e`).
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (di, de) = dims;
        let n = di * de;
        if di == 0 || de == 0 || self.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.rows.max(self.cols),
            });
        }
        let out = match keep {
            Subsystem::System => {
                let mut out = Self::zeros(di, di);
                for a in 0..di {
                    for b in 0..di {
                        out[(a, b)] = (0..de).map(|e| self[(a * de + e, b * de + e)]).sum();
                    }
                }
                out
            }
            Subsystem::Environment => {
                let mut out = Self::zeros(de, de);
                for a in 0..de {
                    for b in 0..de {
                        out[(a, b)] = (0..di).map(|s| self[(s * de + a, s * de + b)]).sum();
                    }
                }
                out
            }
        };
        Ok(out)
    }

    /// Column-stacking vectorisation.
    pub fn vec_columns(&self) -> Vec<Complex64> {
        (0..self.cols).flat_map(|j| self.column(j)).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; use the `try_*` methods on
// untrusted shapes.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("shape mismatch in +")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("shape mismatch in -")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("shape mismatch in *")
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale_real(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::{sigma_x, sigma_y, sigma_z};
    use super::*;

    #[test]
    fn pauli_basics() {
        assert_eq!(sigma_y().adjoint(), sigma_y());
        assert_eq!(ComplexMatrix::identity(2).trace().unwrap(), c(2.0, 0.0));
        assert!((&sigma_x() * &sigma_x()).approx_eq(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn norms() {
        let s2 = 2f64.sqrt();
        assert!((ComplexMatrix::identity(2).norm_fro() - s2).abs() < 1e-15);
        assert_eq!(ComplexMatrix::zeros(3, 3).norm_max(), 0.0);
        assert!((sigma_x().norm_fro() - s2).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 2);
        assert!(matches!(a.try_add(&b), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(b.try_mul(&a.transpose()), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(a.trace(), Err(Error::NotSquare(2, 3))));
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ZERO; 3]),
            Err(Error::DataLength { expected: 4, found: 3 })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![ZERO, c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(0, 1))
        ));
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
        let d = ComplexMatrix::from_real_diagonal(&[2.0, 3.0]);
        assert_eq!(d.kron(&i2), ComplexMatrix::from_real_diagonal(&[2.0, 2.0, 3.0, 3.0]));
        let k = sigma_x().kron(&sigma_z());
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], -ONE);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_rows(&[[c(1.0, 0.0), c(2.0, -1.0)], [c(0.5, 3.0), c(-1.0, 0.0)]]);
        let b = ComplexMatrix::from_rows(&[
            [c(0.2, 0.0), c(0.0, 1.0), ZERO],
            [ZERO, c(0.3, 0.0), ZERO],
            [c(1.0, 1.0), ZERO, c(0.4, 0.1)],
        ]);
        let ab = a.kron(&b);
        let tr_b = b.trace().unwrap();
        let tr_a = a.trace().unwrap();
        assert!(ab
            .partial_trace((2, 3), Subsystem::System)
            .unwrap()
            .approx_eq(&a.scale(tr_b), 1e-14));
        assert!(ab
            .partial_trace((2, 3), Subsystem::Environment)
            .unwrap()
            .approx_eq(&b.scale(tr_a), 1e-14));
        assert!(ab.partial_trace((3, 3), Subsystem::System).is_err());
    }

    #[test]
    fn sandwich_and_vec() {
        let u = sigma_x();
        let z = sigma_z();
        assert!(u.sandwich(&z).unwrap().approx_eq(&(-&z), 0.0));
        let m = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let v: Vec<f64> = m.vec_columns().iter().map(|z| z.re).collect();
        assert_eq!(v, vec![1.0, 3.0, 2.0, 4.0]);
    }
}
