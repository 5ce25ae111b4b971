//! Periodic convolution through the discrete Fourier transform.
//!
//! This is the benchmark reference: its boundary rule is wrap-around, not the
//! replicate rule of the spatial operators, so results only agree with them
//! away from the borders.

use std::sync::Arc;

use rldeconv_core::convops::Convolution;
use rldeconv_core::{DensePsf, Image, OperatorKind, Psf};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cyclic convolution with a fixed PSF on a fixed image size.
///
/// The transfer function is computed once; each call costs two 2D transforms
/// plus a pointwise product. Images of another size are handled by building
/// a temporary operator.
pub struct FourierOperator {
    psf: Psf,
    width: usize,
    height: usize,
    transfer: Vec<Complex64>,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierOperator")
            .field("psf", &self.psf.describe())
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl FourierOperator {
    pub fn new(psf: &Psf, width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut planner = FftPlanner::new();
        let mut op = Self {
            psf: psf.clone(),
            width,
            height,
            transfer: Vec::new(),
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        };
        // out(x) = sum w(t) u(x + t) is a convolution with k(s) = w(-s).
        let mut kernel = vec![Complex64::new(0.0, 0.0); width * height];
        for tap in psf.nonzero_taps() {
            let x = (-tap.dx).rem_euclid(width as isize) as usize;
            let y = (-tap.dy).rem_euclid(height as isize) as usize;
            kernel[y * width + x].re += tap.weight;
        }
        op.transfer = op.forward(kernel);
        op
    }

    /// Operator for the adjoint PSF on the same image size.
    pub fn adjoint(&self) -> Self {
        Self::new(&self.psf.adjoint(), self.width, self.height)
    }

    pub fn size(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Row transforms in place, then column transforms; returns the spectrum
    /// in transposed (column-major) layout.
    fn forward(&self, mut data: Vec<Complex64>) -> Vec<Complex64> {
        self.row_fwd.process(&mut data);
        let mut t = transpose(&data, self.width, self.height);
        self.col_fwd.process(&mut t);
        t
    }

    fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
        self.col_inv.process(&mut spectrum);
        let mut data = transpose(&spectrum, self.height, self.width);
        self.row_inv.process(&mut data);
        data
    }

    fn apply(&self, img: &Image) -> Image {
        let input = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut spectrum = self.forward(input);
        for (s, t) in spectrum.iter_mut().zip(&self.transfer) {
            *s *= t;
        }
        let scale = 1.0 / (self.width * self.height) as f64;
        let data = self.inverse(spectrum).into_iter().map(|c| c.re * scale).collect();
        Image::new(self.width, self.height, data).expect("finite input gives finite output")
    }
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for (y, row) in data.chunks_exact(width).enumerate() {
        for (x, &v) in row.iter().enumerate() {
            out[x * height + y] = v;
        }
    }
    out
}

impl Convolution for FourierOperator {
    fn kind(&self) -> OperatorKind {
        OperatorKind::FourierReference
    }

    fn convolve(&self, img: &Image) -> Image {
        if (img.width(), img.height()) == (self.width, self.height) {
            self.apply(img)
        } else {
            Self::new(&self.psf, img.width(), img.height()).apply(img)
        }
    }
}

/// One-shot periodic convolution of `img` with `psf`.
pub fn fourier_convolve(img: &Image, psf: &DensePsf) -> Image {
    FourierOperator::new(&Psf::Dense(psf.clone()), img.width(), img.height()).apply(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rldeconv_core::convops::{cyclic_convolve, naive_convolve};
    use rldeconv_core::psf::{box_psf, diagonal_psf, disc_psf, line_psf};

    fn random_image(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.gen_range(0.0..255.0))
    }

    #[test]
    fn identity_psf() {
        let img = random_image(13, 7, 1);
        let out = fourier_convolve(&img, &box_psf(1, 1).unwrap());
        assert!(out.max_abs_diff(&img).unwrap() <= 1e-9);
    }

    #[test]
    fn brute_force_cyclic_on_8x8() {
        let img = random_image(8, 8, 2);
        let psfs: Vec<Psf> = vec![
            line_psf(3).unwrap().into(),
            box_psf(2, 3).unwrap().into(),
            disc_psf(5).unwrap().into(),
            diagonal_psf(9).unwrap().into(),
        ];
        for psf in &psfs {
            // Brute force written out here rather than trusting the library oracle.
            let mut expect = vec![0.0; 64];
            for y in 0..8isize {
                for x in 0..8isize {
                    for t in psf.nonzero_taps() {
                        let sx = (x + t.dx).rem_euclid(8) as usize;
                        let sy = (y + t.dy).rem_euclid(8) as usize;
                        expect[(y * 8 + x) as usize] += t.weight * img.get(sx, sy);
                    }
                }
            }
            let expect = Image::new(8, 8, expect).unwrap();
            let got = FourierOperator::new(psf, 8, 8).convolve(&img);
            assert!(got.max_abs_diff(&expect).unwrap() <= 1e-9, "{}", psf.describe());
            assert!(cyclic_convolve(&img, psf).max_abs_diff(&expect).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn interior_matches_naive() {
        let img = random_image(40, 33, 3);
        let psfs: [Psf; 3] = [
            box_psf(9, 9).unwrap().into(),
            disc_psf(9).unwrap().into(),
            line_psf(17).unwrap().into(),
        ];
        for psf in psfs {
            let dense = psf.to_dense();
            let r = psf.extent().radius();
            let a = fourier_convolve(&img, &dense);
            let b = naive_convolve(&img, &dense);
            for y in r..img.height() - r {
                for x in r..img.width() - r {
                    assert!((a.get(x, y) - b.get(x, y)).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn adjoint_and_resize() {
        let psf: Psf = diagonal_psf(5).unwrap().into();
        let op = FourierOperator::new(&psf, 10, 10);
        let img = random_image(12, 9, 4);
        let expect = cyclic_convolve(&img, &psf.adjoint());
        assert!(op.adjoint().convolve(&img).max_abs_diff(&expect).unwrap() <= 1e-9);
    }
}
