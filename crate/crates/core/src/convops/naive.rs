//! Direct summation over the rectangle enclosing the PSF.

use alloc::vec::Vec;

use super::counter::Counter;
use super::{collect_masked, gather_run};
use crate::image::{pad_centered, Image, PaddedImage};
use crate::psf::DensePsf;

pub(crate) fn pad_for(img: &Image, psf: &DensePsf) -> (PaddedImage, f64) {
    let (l, r, t, b) = psf.extent().pads();
    pad_centered(img, l, r, t, b)
}

/// Flat offsets into `padded` of every grid cell, zeros included, in grid
/// row-major order, relative to the padded position of output `(0, 0)`.
pub(crate) fn grid_offsets(padded: &PaddedImage, psf: &DensePsf) -> Vec<(usize, f64)> {
    let stride = padded.width();
    psf.weights()
        .chunks_exact(psf.width())
        .enumerate()
        .flat_map(|(j, row)| row.iter().enumerate().map(move |(i, &w)| (j * stride + i, w)))
        .collect()
}

pub(crate) fn convolve(img: &Image, psf: &DensePsf, counter: &mut impl Counter) -> Image {
    let (padded, level) = pad_for(img, psf);
    let taps = grid_offsets(&padded, psf);
    let (w, h) = (img.width(), img.height());
    counter.setup((padded.width() * padded.height()) as u64);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        gather_run(&mut out, &padded, &taps, level, y, 0..w);
    }
    counter.taps((w * h * taps.len()) as u64);
    counter.outputs((w * h) as u64);
    Image::from_raw(w, h, out)
}

pub(crate) fn convolve_masked(
    img: &Image,
    psf: &DensePsf,
    mask: &[bool],
    fallback: &Image,
    counter: &mut impl Counter,
) -> Image {
    let (padded, level) = pad_for(img, psf);
    let taps = grid_offsets(&padded, psf);
    collect_masked(&padded, &taps, level, mask, fallback, counter)
}
