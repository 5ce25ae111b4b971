//! Direct periodic-boundary convolution.

use alloc::vec;

use crate::image::Image;
use crate::psf::Psf;

/// Convolution with periodic continuation: taps wrap around the image edges.
///
/// This is the spatial counterpart of a DFT-based convolution and is used to
/// synthesise blurred test inputs.
pub fn cyclic_convolve(img: &Image, psf: &Psf) -> Image {
    let (w, h) = (img.width(), img.height());
    let taps = psf.nonzero_taps();
    let mut out = vec![0.0; w * h];
    for tap in &taps {
        let sx = tap.dx.rem_euclid(w as isize) as usize;
        let sy = tap.dy.rem_euclid(h as isize) as usize;
        for (y, out_row) in out.chunks_exact_mut(w).enumerate() {
            let src = img.row((y + sy) % h);
            let (head, tail) = src.split_at(sx);
            for (o, &s) in out_row.iter_mut().zip(tail.iter().chain(head)) {
                *o += tap.weight * s;
            }
        }
    }
    Image::from_raw(w, h, out)
}
