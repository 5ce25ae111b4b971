//! Deterministic stand-in for a natural photograph: smooth sky, a horizon
//! with buildings, textured ground and a dark foreground figure on a tripod.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rldeconv::core::Image;

struct ValueNoise {
    cell: f64,
    cols: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, size: usize, cell: usize) -> Self {
        let cols = size / cell + 2;
        let lattice = (0..cols * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self {
            cell: cell as f64,
            cols,
            lattice,
        }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        let (fx, fy) = (x as f64 / self.cell, y as f64 / self.cell);
        let (ix, iy) = (fx as usize, fy as usize);
        let s = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (s(fx - ix as f64), s(fy - iy as f64));
        let v = |i: usize, j: usize| self.lattice[j * self.cols + i];
        let top = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
        let bottom = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

fn near_segment(x: f64, y: f64, a: (f64, f64), b: (f64, f64), half_width: f64) -> bool {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((x - a.0) * dx + (y - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let (px, py) = (a.0 + t * dx - x, a.1 + t * dy - y);
    (px * px + py * py).sqrt() <= half_width
}

/// An 8-bit greyscale scene of `n`x`n` pixels.
pub fn scene(n: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = ValueNoise::new(&mut rng, n, (n / 4).max(2));
    let octaves: Vec<ValueNoise> = [16, 8, 4, 2]
        .iter()
        .map(|&c| ValueNoise::new(&mut rng, n, c.min(n).max(1)))
        .collect();
    let grain: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-6.0..6.0)).collect();
    let s = n as f64 / 256.0;
    let horizon = 150.0 * s;
    Image::from_fn(n, n, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let texture: f64 = octaves
            .iter()
            .enumerate()
            .map(|(k, o)| o.at(x, y) * 22.0 / (k + 1) as f64)
            .sum();
        let mut v = if fy < horizon {
            195.0 + 25.0 * fy / horizon + 6.0 * coarse.at(x, y)
        } else {
            115.0 + texture + grain[y * n + x]
        };
        // Buildings on the horizon.
        for &(x0, x1, top, grey) in &[
            (20.0, 60.0, 120.0, 160.0),
            (70.0, 85.0, 105.0, 140.0),
            (200.0, 240.0, 128.0, 170.0),
        ] {
            if fx >= x0 * s && fx < x1 * s && fy >= top * s && fy < horizon {
                v = grey + 4.0 * coarse.at(x, y);
            }
        }
        // Figure: head, coat, arm and tripod.
        let head = ((fx - 110.0 * s).powi(2) + (fy - 62.0 * s).powi(2)).sqrt() < 13.0 * s;
        let coat = fy > 74.0 * s
            && fy < 200.0 * s
            && (fx - 108.0 * s).abs() < (18.0 + 0.3 * (fy - 74.0 * s).max(0.0) / s) * s;
        let arm = near_segment(fx, fy, (120.0 * s, 95.0 * s), (150.0 * s, 88.0 * s), 5.0 * s);
        let camera = fx > 145.0 * s && fx < 168.0 * s && fy > 78.0 * s && fy < 96.0 * s;
        let tripod = [(140.0, 230.0), (158.0, 236.0), (176.0, 228.0)]
            .iter()
            .any(|&(bx, by)| near_segment(fx, fy, (157.0 * s, 96.0 * s), (bx * s, by * s), 1.6 * s.max(0.7)));
        if head || coat || arm || tripod {
            v = 22.0 + 8.0 * coarse.at(x, y) + 0.3 * grain[y * n + x];
        }
        if camera {
            v = 55.0;
        }
        v.round().clamp(0.0, 255.0)
    })
}
