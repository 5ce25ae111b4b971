//! Horizontal box filters: sliding window and per-line cumulated sums.
//!
//! `x0` is the offset of the leftmost tap and `len` the number of taps, so
//! output pixel `x` averages padded inputs `x + x0 .. x + x0 + len`.

use alloc::vec;
use alloc::vec::Vec;

use super::counter::Counter;
use crate::image::{pad_row_into, Image};

fn row_pads(x0: isize, len: usize) -> (usize, usize) {
    ((-x0).max(0) as usize, (x0 + len as isize - 1).max(0) as usize)
}

pub(crate) fn sliding(img: &Image, x0: isize, len: usize, counter: &mut impl Counter) -> Image {
    let (w, h) = (img.width(), img.height());
    let (left, right) = row_pads(x0, len);
    let start = (x0 + left as isize) as usize;
    let scale = 1.0 / len as f64;
    let level = img.reference_level();
    let mut buf = Vec::with_capacity(w + left + right);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        pad_row_into(img.row(y), left, right, level, &mut buf);
        let win = &buf[start..];
        let mut sum: f64 = win[..len].iter().sum();
        counter.setup(len as u64);
        out.push(sum * scale + level);
        out.extend(win[len..len + w - 1].iter().zip(win).map(|(&enter, &leave)| {
            sum += enter - leave;
            sum * scale + level
        }));
        counter.update(2 * (w as u64 - 1));
        counter.scale(w as u64);
        counter.outputs(w as u64);
    }
    Image::from_raw(w, h, out)
}

pub(crate) fn cumulated(img: &Image, x0: isize, len: usize, counter: &mut impl Counter) -> Image {
    let (w, h) = (img.width(), img.height());
    let (left, right) = row_pads(x0, len);
    let start = (x0 + left as isize) as usize;
    let scale = 1.0 / len as f64;
    let level = img.reference_level();
    let mut buf = Vec::with_capacity(w + left + right);
    let mut cum = vec![0.0; w + left + right + 1];
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        pad_row_into(img.row(y), left, right, level, &mut buf);
        // cum[i] = sum of buf[..i]
        let mut acc = 0.0;
        for (c, &v) in cum[1..].iter_mut().zip(&buf) {
            acc += v;
            *c = acc;
        }
        counter.setup(buf.len() as u64);
        let hi = &cum[start + len..];
        let lo = &cum[start..];
        out.extend(hi[..w].iter().zip(lo).map(|(&a, &b)| (a - b) * scale + level));
        counter.update(w as u64);
        counter.scale(w as u64);
        counter.outputs(w as u64);
    }
    Image::from_raw(w, h, out)
}
