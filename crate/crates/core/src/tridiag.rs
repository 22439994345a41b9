//! Thomas algorithm for tridiagonal systems.

use crate::error::{Error, Result};

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` in place.
///
/// `lower[0]` and `upper[n-1]` are ignored. `scratch` must have length `n`.
/// No pivoting: intended for diagonally dominant M-matrices, which is what the
/// implicit diffusion sweeps produce.
pub fn solve_in_place(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = rhs.len();
    if n == 0 {
        return Ok(());
    }
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n && scratch.len() == n);
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::SingularSystem);
    }
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        if beta == 0.0 {
            return Err(Error::SingularSystem);
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}
