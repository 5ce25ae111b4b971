//! Reconstruction quality metrics.

use crate::error::{Error, Result};
use crate::image::Image;

/// Signal-to-noise ratio in decibels, `10 log10(sum(ref^2) / sum((ref - test)^2))`.
///
/// Returns `f64::INFINITY` when the two images are identical.
pub fn snr_db(reference: &Image, test: &Image) -> Result<f64> {
    reference.check_same_shape(test)?;
    let (signal, noise) =
        reference
            .data()
            .iter()
            .zip(test.data())
            .fold((0.0f64, 0.0f64), |(s, n), (&r, &t)| {
                let e = r - t;
                (s + r * r, n + e * e)
            });
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(signal / noise))
}
