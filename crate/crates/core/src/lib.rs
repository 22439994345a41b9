//! Numerics for the local and non-local cane toads equations.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the pure
//! algorithmic pieces: closed-form Hamilton-Jacobi objects, the piecewise
//! super-solution, an ADI finite-difference solver, front extraction, and the
//! moving-domain spectral machinery. File formats and the command line live in
//! the `canetoads-lab` crate.

#![no_std]
// `!(a > b)` is used on purpose so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod math;

pub mod contour;
pub mod front;
pub mod grid;
pub mod hj;
pub mod solver;
pub mod spectral;
pub mod supersolution;
pub mod tridiag;

pub use crate::error::{Error, Result};
pub use crate::grid::{Field, GridSpec, RhoProfile};
