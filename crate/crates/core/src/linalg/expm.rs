use super::{c, eigh, ComplexMatrix};
use crate::error::Result;

/// `exp(−i h t)` for Hermitian `h`, computed spectrally as `V·diag(e^{−iλt})·V†`.
pub fn expm_hermitian_generator(h: &ComplexMatrix, t: f64, tol: f64) -> Result<ComplexMatrix> {
    let e = eigh(h, tol)?;
    Ok(e.reconstruct_with(|lambda| {
        let phase = -lambda * t;
        c(phase.cos(), phase.sin())
    }))
}
