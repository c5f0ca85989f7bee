//! Seeded random operators for property checks and the CLI's `--seed`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, Complex64, ComplexMatrix};
use crate::state::DensityMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// `n × m` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussians are finite")
}

/// `(G + G†)/2` for a Ginibre `G`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary: Gram–Schmidt on Ginibre columns, which is the
/// QR decomposition with the positive-diagonal convention.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.column(j);
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let proj: Complex64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(&qk) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<Complex64> = v.into_iter().map(|z| z / norm).collect();
        q.set_column(j, &v);
    }
    q
}

/// Full-rank mixed state `G G† / tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    density_matrix_of_rank(rng, n, n)
}

/// Mixed state of the given rank (`1` gives a pure state).
pub fn density_matrix_of_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DensityMatrix {
    assert!(rank >= 1 && rank <= n);
    let g = ginibre(rng, n, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().expect("square").re;
    let m = m.scale_real(1.0 / tr);
    // exact Hermitian symmetry
    let m = (&m + &m.adjoint()).scale_real(0.5);
    DensityMatrix::new(m, 1e-10).expect("Gram matrices are states")
}
