//! File formats, the Fourier reference operator, the benchmark harness and
//! the command-line front end for [`rldeconv_core`].

pub mod bench;
pub mod cli;
mod error;
pub mod fourier;
pub mod pgm;
pub mod psfspec;
pub mod timing;

pub use error::{Error, Result};
pub use rldeconv_core as core;
