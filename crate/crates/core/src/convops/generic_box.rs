//! Sliding-window sum for any row-convex PSF of uniform intensity.
//!
//! Moving the window one pixel right drops one pixel from the left end of
//! every support row and adds one at the right end, so each shift costs one
//! subtraction and one addition per support row.

use alloc::vec;
use alloc::vec::Vec;

use super::counter::Counter;
use crate::image::{pad_centered, Image};
use crate::psf::UniformConvexPsf;

pub(crate) fn convolve(img: &Image, psf: &UniformConvexPsf, counter: &mut impl Counter) -> Image {
    let (l, r, t, b) = psf.extent().pads();
    let (padded, level) = pad_centered(img, l, r, t, b);
    let (w, h) = (img.width(), img.height());
    let weight = psf.uniform_weight();
    let rows = psf.rows();
    let support_rows = rows.len() as u64;

    // Per support row: (dy offset into padded rows, left end, right end) in padded columns.
    let spans: Vec<(usize, usize, usize)> = rows
        .iter()
        .map(|row| {
            (
                (row.dy + t as isize) as usize,
                (row.x_min + l as isize) as usize,
                (row.x_max + l as isize) as usize,
            )
        })
        .collect();

    let mut out = vec![0.0; w * h];
    let mut delta = vec![0.0; w];
    for (y, out_row) in out.chunks_exact_mut(w).enumerate() {
        // Window sum at x = 0, recomputed for every scan line.
        let mut sum = 0.0;
        for &(dy, lo, hi) in &spans {
            sum += padded.row(y + dy)[lo..=hi].iter().sum::<f64>();
        }
        counter.setup(psf.support() as u64);
        out_row[0] = sum * weight + level;

        if w > 1 {
            // delta[x] = sum over rows of (entering - leaving) for the shift x-1 -> x.
            let (first, rest) = spans.split_first().unwrap();
            let (dy, lo, hi) = *first;
            let src = padded.row(y + dy);
            for (x, d) in delta.iter_mut().enumerate().skip(1) {
                *d = src[x + hi] - src[x - 1 + lo];
            }
            for &(dy, lo, hi) in rest {
                let src = padded.row(y + dy);
                for (x, d) in delta.iter_mut().enumerate().skip(1) {
                    *d = *d + src[x + hi] - src[x - 1 + lo];
                }
            }
            for (o, &d) in out_row[1..].iter_mut().zip(&delta[1..]) {
                sum += d;
                *o = sum * weight + level;
            }
            counter.update(2 * support_rows * (w as u64 - 1));
        }
        counter.scale(w as u64);
        counter.outputs(w as u64);
    }
    Image::from_raw(w, h, out)
}
