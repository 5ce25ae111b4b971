//! Summation over the support-pixel list of a sparse PSF.

use alloc::vec::Vec;

use super::counter::Counter;
use super::{collect_masked, gather_run};
use crate::image::{pad_centered, Image, PaddedImage};
use crate::psf::SparsePsf;

pub(crate) fn pad_for(img: &Image, psf: &SparsePsf) -> (PaddedImage, f64) {
    let (l, r, t, b) = psf.extent().pads();
    pad_centered(img, l, r, t, b)
}

/// Flat offsets into `padded` of every tap, relative to the padded position
/// of output `(0, 0)`.
pub(crate) fn tap_offsets(padded: &PaddedImage, psf: &SparsePsf) -> Vec<(usize, f64)> {
    let (left, _, top, _) = padded.pads();
    let stride = padded.width() as isize;
    psf.taps()
        .iter()
        .map(|t| {
            let off = (t.dy + top as isize) * stride + t.dx + left as isize;
            (off as usize, t.weight)
        })
        .collect()
}

pub(crate) fn convolve(img: &Image, psf: &SparsePsf, counter: &mut impl Counter) -> Image {
    let (padded, level) = pad_for(img, psf);
    let taps = tap_offsets(&padded, psf);
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
    psf: &SparsePsf,
    mask: &[bool],
    fallback: &Image,
    counter: &mut impl Counter,
) -> Image {
    let (padded, level) = pad_for(img, psf);
    let taps = tap_offsets(&padded, psf);
    collect_masked(&padded, &taps, level, mask, fallback, counter)
}
