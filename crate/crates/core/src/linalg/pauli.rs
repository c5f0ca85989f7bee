//! Pauli matrices and the qubit identity.

use super::{c, ComplexMatrix, I, ONE, ZERO};

pub fn identity() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, c(-1.0, 0.0)]])
}

/// `½(I + x σ_x + y σ_y + z σ_z)`.
pub fn from_bloch_components(x: f64, y: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [c(0.5 * (1.0 + z), 0.0), c(0.5 * x, -0.5 * y)],
        [c(0.5 * x, 0.5 * y), c(0.5 * (1.0 - z), 0.0)],
    ])
}

/// Pauli coefficients `(a0, ax, ay, az)` of a 2×2 matrix `a0 I + a·σ`.
/// Only meaningful (real) for Hermitian input; imaginary parts are dropped.
pub fn decompose(m: &ComplexMatrix) -> (f64, f64, f64, f64) {
    assert_eq!(m.shape(), (2, 2), "Pauli decomposition needs a 2x2 matrix");
    let a0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let az = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    // m01 = ax − i ay, m10 = ax + i ay
    let off = 0.5 * (m[(1, 0)] + m[(0, 1)].conj());
    (a0, off.re, off.im, az)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_round_trip() {
        let m = from_bloch_components(0.3, -0.2, 0.5);
        let (a0, x, y, z) = decompose(&m);
        assert!((a0 - 0.5).abs() < 1e-15);
        assert!((x - 0.15).abs() < 1e-15);
        assert!((y + 0.1).abs() < 1e-15);
        assert!((z - 0.25).abs() < 1e-15);
    }

    #[test]
    fn anticommute() {
        let xy = &sigma_x() * &sigma_y();
        let yx = &sigma_y() * &sigma_x();
        assert!((&xy + &yx).norm_max() < 1e-15);
        assert!(xy.approx_eq(&sigma_z().scale(I), 1e-15));
    }
}
