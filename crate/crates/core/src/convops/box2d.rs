//! Uniform rectangle filters: separable sliding windows and the 2D
//! cumulated-sum (integral image) variant.
//!
//! The rectangle covers offsets `x0 .. x0 + mx` and `y0 .. y0 + my`.
//! Both variants replicate-pad the full 2D domain once before filtering, so
//! the second separable pass reads genuine continuation values.

use alloc::vec;
use alloc::vec::Vec;

use super::counter::Counter;
use crate::image::{pad_centered, Image, PaddedImage};

/// Order of the two 1D passes of the separable filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PassOrder {
    #[default]
    XThenY,
    YThenX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Rect {
    pub x0: isize,
    pub y0: isize,
    pub mx: usize,
    pub my: usize,
}

impl Rect {
    fn pad(&self, img: &Image) -> (PaddedImage, f64) {
        let l = (-self.x0).max(0) as usize;
        let r = (self.x0 + self.mx as isize - 1).max(0) as usize;
        let t = (-self.y0).max(0) as usize;
        let b = (self.y0 + self.my as isize - 1).max(0) as usize;
        pad_centered(img, l, r, t, b)
    }
}

/// Unscaled horizontal window sums of `len` samples starting at column
/// `start`, for `out_w` outputs on each of the `src.len() / src_w` rows.
fn horizontal_sums(
    src: &[f64],
    src_w: usize,
    start: usize,
    len: usize,
    out_w: usize,
    counter: &mut impl Counter,
) -> Vec<f64> {
    let rows = src.len() / src_w;
    let mut out = vec![0.0; out_w * rows];
    for (row, out_row) in src.chunks_exact(src_w).zip(out.chunks_exact_mut(out_w)) {
        let win = &row[start..];
        let mut sum: f64 = win[..len].iter().sum();
        out_row[0] = sum;
        for x in 1..out_w {
            sum += win[x + len - 1] - win[x - 1];
            out_row[x] = sum;
        }
        counter.setup(len as u64);
        counter.update(2 * (out_w as u64 - 1));
    }
    out
}

/// Unscaled vertical window sums of `len` rows starting at row `start`,
/// producing `out_h` rows of width `w`.
fn vertical_sums(
    src: &[f64],
    w: usize,
    start: usize,
    len: usize,
    out_h: usize,
    counter: &mut impl Counter,
) -> Vec<f64> {
    let row = |r: usize| &src[r * w..(r + 1) * w];
    let mut out = vec![0.0; w * out_h];
    let mut col = vec![0.0; w];
    for k in 0..len {
        for (c, &v) in col.iter_mut().zip(row(start + k)) {
            *c += v;
        }
    }
    counter.setup((len * w) as u64);
    out[..w].copy_from_slice(&col);
    for y in 1..out_h {
        let enter = row(start + y + len - 1);
        let leave = row(start + y - 1);
        for ((c, &a), &b) in col.iter_mut().zip(enter).zip(leave) {
            *c = *c + a - b;
        }
        out[y * w..(y + 1) * w].copy_from_slice(&col);
    }
    counter.update(2 * (w * (out_h - 1)) as u64);
    out
}

pub(crate) fn sliding(img: &Image, rect: Rect, order: PassOrder, counter: &mut impl Counter) -> Image {
    let (w, h) = (img.width(), img.height());
    let (padded, level) = rect.pad(img);
    let (l, _, t, _) = padded.pads();
    let pw = padded.width();
    let sx = (rect.x0 + l as isize) as usize;
    let sy = (rect.y0 + t as isize) as usize;
    let mut out = match order {
        PassOrder::XThenY => {
            let inter = horizontal_sums(padded.data(), pw, sx, rect.mx, w, counter);
            vertical_sums(&inter, w, sy, rect.my, h, counter)
        }
        PassOrder::YThenX => {
            let inter = vertical_sums(padded.data(), pw, sy, rect.my, h, counter);
            horizontal_sums(&inter, pw, sx, rect.mx, w, counter)
        }
    };
    let scale = 1.0 / (rect.mx * rect.my) as f64;
    for v in &mut out {
        *v = *v * scale + level;
    }
    counter.scale((w * h) as u64);
    counter.outputs((w * h) as u64);
    Image::from_raw(w, h, out)
}

/// Integral image of `padded` with a leading zero row and column:
/// `v[r][c]` is the sum of all padded pixels above and left of `(c, r)`.
pub(crate) fn integral(padded: &PaddedImage, counter: &mut impl Counter) -> Vec<f64> {
    let (pw, ph) = (padded.width(), padded.height());
    let iw = pw + 1;
    let mut v = vec![0.0; iw * (ph + 1)];
    for r in 0..ph {
        let src = padded.row(r);
        let (above, below) = v.split_at_mut((r + 1) * iw);
        let above = &above[r * iw..];
        let cur = &mut below[..iw];
        let mut run = 0.0;
        for c in 0..pw {
            run += src[c];
            cur[c + 1] = above[c + 1] + run;
        }
    }
    counter.setup(2 * (pw * ph) as u64);
    v
}

pub(crate) fn cumulated(img: &Image, rect: Rect, counter: &mut impl Counter) -> Image {
    let (w, h) = (img.width(), img.height());
    let (padded, level) = rect.pad(img);
    let (l, _, t, _) = padded.pads();
    let iw = padded.width() + 1;
    let v = integral(&padded, counter);
    let sx = (rect.x0 + l as isize) as usize;
    let sy = (rect.y0 + t as isize) as usize;
    let scale = 1.0 / (rect.mx * rect.my) as f64;
    let mut out = vec![0.0; w * h];
    for (y, out_row) in out.chunks_exact_mut(w).enumerate() {
        let top = &v[(sy + y) * iw + sx..];
        let bottom = &v[(sy + y + rect.my) * iw + sx..];
        for (x, o) in out_row.iter_mut().enumerate() {
            let x1 = x + rect.mx;
            *o = (bottom[x1] - bottom[x] - top[x1] + top[x]) * scale + level;
        }
    }
    counter.update(3 * (w * h) as u64);
    counter.scale((w * h) as u64);
    counter.outputs((w * h) as u64);
    Image::from_raw(w, h, out)
}
