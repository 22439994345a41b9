//! Experiment drivers, file formats and the command-line front end for
//! [`canetoads_core`].

// `!(a > b)` is used on purpose so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub use canetoads_core as core;

pub mod acceptance;
pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod svg;

pub use error::{LabError, Result};
