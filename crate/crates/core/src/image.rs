//! Grey-value image container and replicate padding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major grid of real grey values.
///
/// Values nominally live in `[0, 255]` but are never clamped here; the
/// Richardson-Lucy iterates are allowed to overshoot.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        if data.len() != width * height {
            return Err(Error::DataLength {
                width,
                height,
                len: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: i % width,
                y: i / width,
            });
        }
        Ok(Self { width, height, data })
    }

    /// Image with every pixel set to `value`.
    ///
    /// # Panics
    /// If either dimension is zero or `value` is not finite.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        assert!(value.is_finite());
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    // Crate-internal constructor for operator outputs whose shape is known correct.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Value at a possibly out-of-range position, continued by the nearest pixel.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    /// Level that operators accumulate relative to: the midrange of about 256
    /// evenly strided samples. Exactly `c` for an image filled with `c`, and
    /// close enough to the centre of the range to keep running sums small.
    pub(crate) fn reference_level(&self) -> f64 {
        let step = (self.data.len() / 256).max(1);
        let (lo, hi) = self
            .data
            .iter()
            .step_by(step)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        lo / 2.0 + hi / 2.0
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_shape(&self, other: &Image) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ))
        }
    }

    /// Largest absolute pixel difference between two equally sized images.
    pub fn max_abs_diff(&self, other: &Image) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Pixelwise `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &Image, b: f64) -> Result<Image> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(u, w)| a * u + b * w)
            .collect();
        Ok(Image::from_raw(self.width, self.height, data))
    }
}

/// An image surrounded by replicate-continued borders.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedImage {
    core_width: usize,
    core_height: usize,
    left: usize,
    right: usize,
    top: usize,
    bottom: usize,
    data: Vec<f64>,
}

impl PaddedImage {
    #[inline]
    pub fn width(&self) -> usize {
        self.core_width + self.left + self.right
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.core_height + self.top + self.bottom
    }

    /// `(left, right, top, bottom)`
    pub fn pads(&self) -> (usize, usize, usize, usize) {
        (self.left, self.right, self.top, self.bottom)
    }

    pub fn core_size(&self) -> (usize, usize) {
        (self.core_width, self.core_height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Padded row `py` (0 is the topmost pad row).
    #[inline]
    pub fn row(&self, py: usize) -> &[f64] {
        let w = self.width();
        &self.data[py * w..(py + 1) * w]
    }

    /// Value at padded coordinates.
    #[inline]
    pub fn get(&self, px: usize, py: usize) -> f64 {
        self.data[py * self.width() + px]
    }

    /// Extracts the original image back out of the padding.
    pub fn crop(&self) -> Image {
        let w = self.width();
        let mut data = Vec::with_capacity(self.core_width * self.core_height);
        for y in 0..self.core_height {
            let start = (y + self.top) * w + self.left;
            data.extend_from_slice(&self.data[start..start + self.core_width]);
        }
        Image::from_raw(self.core_width, self.core_height, data)
    }
}

/// Continues `img` by `left`/`right`/`top`/`bottom` pixels, each missing
/// pixel taking the value of the closest image pixel. Corners take the corner
/// pixel (both coordinates clamped independently).
pub fn pad_replicate(img: &Image, left: usize, right: usize, top: usize, bottom: usize) -> PaddedImage {
    pad_shifted(img, left, right, top, bottom, 0.0)
}

fn pad_shifted(img: &Image, left: usize, right: usize, top: usize, bottom: usize, level: f64) -> PaddedImage {
    let pw = img.width + left + right;
    let ph = img.height + top + bottom;
    let mut data = Vec::with_capacity(pw * ph);
    let mut line = Vec::with_capacity(pw);
    let mut last_src = usize::MAX;
    for py in 0..ph {
        let sy = py.saturating_sub(top).min(img.height - 1);
        if sy != last_src {
            let src = img.row(sy);
            pad_row_into(src, left, right, level, &mut line);
            last_src = sy;
        }
        data.extend_from_slice(&line);
    }
    PaddedImage {
        core_width: img.width,
        core_height: img.height,
        left,
        right,
        top,
        bottom,
        data,
    }
}

/// Replicate-pads `img` and subtracts its reference level from every padded
/// pixel. Returns the padded differences and the level.
///
/// Operators accumulate these differences and add the level back per output.
/// For a unit-mass PSF this is the same convolution, but constant inputs come
/// out exact and cumulated sums stay small.
pub(crate) fn pad_centered(
    img: &Image,
    left: usize,
    right: usize,
    top: usize,
    bottom: usize,
) -> (PaddedImage, f64) {
    let level = img.reference_level();
    (pad_shifted(img, left, right, top, bottom, level), level)
}

/// Replicate-pads a single scan line into `out` (cleared first), subtracting
/// `level` from every sample.
#[inline]
pub(crate) fn pad_row_into(src: &[f64], left: usize, right: usize, level: f64, out: &mut Vec<f64>) {
    out.clear();
    out.extend(core::iter::repeat_n(src[0] - level, left));
    out.extend(src.iter().map(|&v| v - level));
    out.extend(core::iter::repeat_n(src[src.len() - 1] - level, right));
}
