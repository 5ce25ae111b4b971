//! Richardson-Lucy deconvolution with PSF-specialised spatial convolution.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation on in-memory images: replicate padding, point-spread function
//! representations, the family of spatial convolution operators (naive, list,
//! generic box, sliding and cumulated-sum box filters), selective convolution
//! and the Richardson-Lucy iteration itself. File formats, the Fourier
//! reference operator, timing and the command line live in the `rldeconv`
//! companion crate.
//!
//! All spatial operators share one boundary rule: pixels outside the image are
//! replaced by the nearest image pixel.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod convops;
mod error;
pub mod image;
pub mod metrics;
pub mod psf;
pub mod rl;

pub use convops::{Convolution, OpCounts, Operator, OperatorChoice, OperatorKind};
pub use error::{Error, Result};
pub use image::{pad_replicate, Image, PaddedImage};
pub use metrics::snr_db;
pub use psf::{DensePsf, Psf, SparsePsf, Tap, UniformConvexPsf};
pub use rl::{ActivityMask, Clock, NoClock, RlConfig, RlTrace};
