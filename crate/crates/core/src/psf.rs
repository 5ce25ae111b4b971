//! Point-spread functions in the three shapes the operators consume.
//!
//! A tap at offset `(dx, dy)` with weight `w` contributes `w * u(x + dx, y + dy)`
//! to output pixel `(x, y)`. Generated kernels put their origin at
//! `floor(size / 2)` along each axis, so odd sizes are centred.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};

/// One support pixel of a PSF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub dx: isize,
    pub dy: isize,
    pub weight: f64,
}

/// Inclusive offset bounds `(min_dx, max_dx, min_dy, max_dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extent {
    pub min_dx: isize,
    pub max_dx: isize,
    pub min_dy: isize,
    pub max_dy: isize,
}

impl Extent {
    /// Replicate pads `(left, right, top, bottom)` needed so every tap of a
    /// pixel inside the image lands inside the padded grid.
    pub fn pads(&self) -> (usize, usize, usize, usize) {
        (
            (-self.min_dx).max(0) as usize,
            self.max_dx.max(0) as usize,
            (-self.min_dy).max(0) as usize,
            self.max_dy.max(0) as usize,
        )
    }

    /// Distance from the origin to the farthest tap along either axis.
    pub fn radius(&self) -> usize {
        [self.min_dx, self.max_dx, self.min_dy, self.max_dy]
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    fn union_origin(mut self) -> Self {
        self.min_dx = self.min_dx.min(0);
        self.max_dx = self.max_dx.max(0);
        self.min_dy = self.min_dy.min(0);
        self.max_dy = self.max_dy.max(0);
        self
    }
}

/// Divisor that brings a mass of `sum` over `n` weights to one. A mass already
/// within summation rounding of one is left alone so that normalised weights
/// survive a round trip unchanged.
fn mass_divisor(sum: f64, n: usize) -> f64 {
    if (sum - 1.0).abs() <= n as f64 * f64::EPSILON {
        1.0
    } else {
        sum
    }
}

fn normalize(weights: &mut [f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidPsf(format!("weight {w} is negative or not finite")));
    }
    let sum: f64 = weights.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::InvalidPsf(String::from("PSF has zero total mass")));
    }
    let sum = mass_divisor(sum, weights.len());
    for w in weights.iter_mut() {
        *w /= sum;
    }
    Ok(())
}

/// Rectangular weight grid with an anchor marking the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePsf {
    width: usize,
    height: usize,
    anchor: (usize, usize),
    weights: Vec<f64>,
}

impl DensePsf {
    /// Weights are renormalised to unit mass.
    pub fn new(width: usize, height: usize, anchor: (usize, usize), mut weights: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidPsf(format!("dense grid {width}x{height} is empty")));
        }
        if weights.len() != width * height {
            return Err(Error::InvalidPsf(format!(
                "{} weights for a {width}x{height} grid",
                weights.len()
            )));
        }
        if anchor.0 >= width || anchor.1 >= height {
            return Err(Error::InvalidPsf(format!(
                "anchor ({}, {}) outside {width}x{height} grid",
                anchor.0, anchor.1
            )));
        }
        normalize(&mut weights)?;
        Ok(Self {
            width,
            height,
            anchor,
            weights,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at grid cell `(i, j)`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[j * self.width + i]
    }

    pub fn extent(&self) -> Extent {
        let (ax, ay) = (self.anchor.0 as isize, self.anchor.1 as isize);
        Extent {
            min_dx: -ax,
            max_dx: self.width as isize - 1 - ax,
            min_dy: -ay,
            max_dy: self.height as isize - 1 - ay,
        }
    }

    /// Every grid cell as a tap, zeros included, in row-major order.
    pub fn grid_taps(&self) -> impl Iterator<Item = Tap> + '_ {
        let (ax, ay) = (self.anchor.0 as isize, self.anchor.1 as isize);
        self.weights.iter().enumerate().map(move |(k, &weight)| Tap {
            dx: (k % self.width) as isize - ax,
            dy: (k / self.width) as isize - ay,
            weight,
        })
    }

    /// Grid rotated by 180 degrees with the anchor remapped, so every
    /// offset is negated.
    pub fn adjoint(&self) -> Self {
        let mut weights = self.weights.clone();
        weights.reverse();
        Self {
            width: self.width,
            height: self.height,
            anchor: (self.width - 1 - self.anchor.0, self.height - 1 - self.anchor.1),
            weights,
        }
    }
}

/// One scan line of a row-convex PSF: columns `x_min..=x_max` at row offset `dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexRow {
    pub dy: isize,
    pub x_min: isize,
    pub x_max: isize,
}

impl ConvexRow {
    pub fn len(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.x_max < self.x_min
    }
}

/// Uniform-intensity PSF whose support is one contiguous interval per row,
/// on consecutive rows.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformConvexPsf {
    rows: Vec<ConvexRow>,
    support: usize,
    weight: f64,
}

impl UniformConvexPsf {
    pub fn new(rows: Vec<ConvexRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidPsf(String::from("convex PSF has no rows")));
        }
        for pair in rows.windows(2) {
            if pair[1].dy != pair[0].dy + 1 {
                return Err(Error::InvalidPsf(format!(
                    "row offsets must be consecutive, got {} after {}",
                    pair[1].dy, pair[0].dy
                )));
            }
        }
        if let Some(r) = rows.iter().find(|r| r.is_empty()) {
            return Err(Error::InvalidPsf(format!(
                "row {} has x_min {} > x_max {}",
                r.dy, r.x_min, r.x_max
            )));
        }
        let support: usize = rows.iter().map(ConvexRow::len).sum();
        Ok(Self {
            rows,
            support,
            weight: 1.0 / support as f64,
        })
    }

    pub fn rows(&self) -> &[ConvexRow] {
        &self.rows
    }

    /// Number of support pixels `M`.
    pub fn support(&self) -> usize {
        self.support
    }

    pub fn uniform_weight(&self) -> f64 {
        self.weight
    }

    pub fn extent(&self) -> Extent {
        Extent {
            min_dx: self.rows.iter().map(|r| r.x_min).min().unwrap(),
            max_dx: self.rows.iter().map(|r| r.x_max).max().unwrap(),
            min_dy: self.rows[0].dy,
            max_dy: self.rows[self.rows.len() - 1].dy,
        }
    }

    pub fn adjoint(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .rev()
            .map(|r| ConvexRow {
                dy: -r.dy,
                x_min: -r.x_max,
                x_max: -r.x_min,
            })
            .collect();
        Self {
            rows,
            support: self.support,
            weight: self.weight,
        }
    }

    pub fn taps(&self) -> impl Iterator<Item = Tap> + '_ {
        self.rows.iter().flat_map(move |r| {
            (r.x_min..=r.x_max).map(move |dx| Tap {
                dx,
                dy: r.dy,
                weight: self.weight,
            })
        })
    }
}

/// List of weighted support pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePsf {
    taps: Vec<Tap>,
}

impl SparsePsf {
    /// Rejects empty lists, duplicate offsets and nonpositive weights;
    /// renormalises to unit mass.
    pub fn new(mut taps: Vec<Tap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidPsf(String::from("sparse PSF has no taps")));
        }
        if let Some(t) = taps.iter().find(|t| !(t.weight.is_finite() && t.weight > 0.0)) {
            return Err(Error::InvalidPsf(format!(
                "tap ({}, {}) has nonpositive weight {}",
                t.dx, t.dy, t.weight
            )));
        }
        let mut seen = BTreeMap::new();
        for t in &taps {
            if seen.insert((t.dy, t.dx), ()).is_some() {
                return Err(Error::InvalidPsf(format!("duplicate tap ({}, {})", t.dx, t.dy)));
            }
        }
        let sum = mass_divisor(taps.iter().map(|t| t.weight).sum(), taps.len());
        for t in &mut taps {
            t.weight /= sum;
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    /// Number of support pixels `M`.
    pub fn support(&self) -> usize {
        self.taps.len()
    }

    pub fn extent(&self) -> Extent {
        let mut e = Extent {
            min_dx: isize::MAX,
            max_dx: isize::MIN,
            min_dy: isize::MAX,
            max_dy: isize::MIN,
        };
        for t in &self.taps {
            e.min_dx = e.min_dx.min(t.dx);
            e.max_dx = e.max_dx.max(t.dx);
            e.min_dy = e.min_dy.min(t.dy);
            e.max_dy = e.max_dy.max(t.dy);
        }
        e
    }

    pub fn adjoint(&self) -> Self {
        Self {
            taps: self
                .taps
                .iter()
                .map(|t| Tap {
                    dx: -t.dx,
                    dy: -t.dy,
                    weight: t.weight,
                })
                .collect(),
        }
    }

    /// Text form accepted by [`parse_sparse_psf`]: one `dx dy weight` line per tap.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# dx dy weight\n");
        for t in &self.taps {
            let _ = writeln!(s, "{} {} {}", t.dx, t.dy, t.weight);
        }
        s
    }
}

/// A point-spread function in any of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Psf {
    Dense(DensePsf),
    Convex(UniformConvexPsf),
    Sparse(SparsePsf),
}

impl From<DensePsf> for Psf {
    fn from(p: DensePsf) -> Self {
        Psf::Dense(p)
    }
}

impl From<UniformConvexPsf> for Psf {
    fn from(p: UniformConvexPsf) -> Self {
        Psf::Convex(p)
    }
}

impl From<SparsePsf> for Psf {
    fn from(p: SparsePsf) -> Self {
        Psf::Sparse(p)
    }
}

impl Psf {
    /// Reflection about the origin, in the same representation.
    pub fn adjoint(&self) -> Psf {
        match self {
            Psf::Dense(p) => Psf::Dense(p.adjoint()),
            Psf::Convex(p) => Psf::Convex(p.adjoint()),
            Psf::Sparse(p) => Psf::Sparse(p.adjoint()),
        }
    }

    pub fn extent(&self) -> Extent {
        match self {
            Psf::Dense(p) => p.extent(),
            Psf::Convex(p) => p.extent(),
            Psf::Sparse(p) => p.extent(),
        }
    }

    /// Nonzero taps sorted by `(dy, dx)`.
    pub fn nonzero_taps(&self) -> Vec<Tap> {
        let mut taps: Vec<Tap> = match self {
            Psf::Dense(p) => p.grid_taps().filter(|t| t.weight != 0.0).collect(),
            Psf::Convex(p) => p.taps().collect(),
            Psf::Sparse(p) => p.taps.clone(),
        };
        taps.sort_by_key(|t| (t.dy, t.dx));
        taps
    }

    /// Offset to weight map of the nonzero taps.
    pub fn weight_map(&self) -> BTreeMap<(isize, isize), f64> {
        self.nonzero_taps()
            .into_iter()
            .map(|t| ((t.dx, t.dy), t.weight))
            .collect()
    }

    pub fn to_dense(&self) -> DensePsf {
        match self {
            Psf::Dense(p) => p.clone(),
            _ => {
                let taps = self.nonzero_taps();
                let e = self.extent().union_origin();
                let w = (e.max_dx - e.min_dx + 1) as usize;
                let h = (e.max_dy - e.min_dy + 1) as usize;
                let mut weights = vec![0.0; w * h];
                for t in taps {
                    weights[(t.dy - e.min_dy) as usize * w + (t.dx - e.min_dx) as usize] = t.weight;
                }
                DensePsf {
                    width: w,
                    height: h,
                    anchor: ((-e.min_dx) as usize, (-e.min_dy) as usize),
                    weights,
                }
            }
        }
    }

    pub fn to_sparse(&self) -> SparsePsf {
        match self {
            Psf::Sparse(p) => p.clone(),
            _ => SparsePsf {
                taps: self.nonzero_taps(),
            },
        }
    }

    /// Row-convex uniform view of this PSF, if its nonzero taps share one
    /// weight, form one interval per row, and occupy consecutive rows.
    pub fn to_uniform_convex(&self) -> Option<UniformConvexPsf> {
        if let Psf::Convex(p) = self {
            return Some(p.clone());
        }
        let taps = self.nonzero_taps();
        if !is_uniform(&taps) {
            return None;
        }
        let mut rows: Vec<ConvexRow> = Vec::new();
        for t in &taps {
            match rows.last_mut() {
                Some(r) if r.dy == t.dy => {
                    if t.dx != r.x_max + 1 {
                        return None;
                    }
                    r.x_max = t.dx;
                }
                _ => rows.push(ConvexRow {
                    dy: t.dy,
                    x_min: t.dx,
                    x_max: t.dx,
                }),
            }
        }
        UniformConvexPsf::new(rows).ok()
    }

    /// `(x0, y0, width, height)` when the nonzero taps fill the rectangle
    /// with offsets `x0..x0+width`, `y0..y0+height` at one common weight.
    pub fn uniform_rect(&self) -> Option<(isize, isize, usize, usize)> {
        let conv = self.to_uniform_convex()?;
        let first = conv.rows[0];
        if conv
            .rows
            .iter()
            .all(|r| r.x_min == first.x_min && r.x_max == first.x_max)
        {
            Some((first.x_min, first.dy, first.len(), conv.rows.len()))
        } else {
            None
        }
    }

    /// Short human-readable description for diagnostics.
    pub fn describe(&self) -> String {
        match self {
            Psf::Dense(p) => format!("dense {}x{}", p.width, p.height),
            Psf::Convex(p) => format!("uniform convex, {} rows, {} px", p.rows.len(), p.support),
            Psf::Sparse(p) => format!("sparse, {} taps", p.taps.len()),
        }
    }
}

fn is_uniform(taps: &[Tap]) -> bool {
    let Some(first) = taps.first() else {
        return false;
    };
    let expected = 1.0 / taps.len() as f64;
    let tol = 1e-12 * expected;
    (first.weight - expected).abs() <= tol && taps.iter().all(|t| (t.weight - expected).abs() <= tol)
}

/// Horizontal motion blur of `length` pixels (height 1, weights `1/length`).
pub fn line_psf(length: usize) -> Result<DensePsf> {
    if length == 0 {
        return Err(Error::InvalidPsf(String::from("line length must be at least 1")));
    }
    DensePsf::new(length, 1, (length / 2, 0), vec![1.0; length])
}

/// Uniform `mx` by `my` rectangle.
pub fn box_psf(mx: usize, my: usize) -> Result<DensePsf> {
    if mx == 0 || my == 0 {
        return Err(Error::InvalidPsf(format!("box {mx}x{my} has a zero side")));
    }
    DensePsf::new(mx, my, (mx / 2, my / 2), vec![1.0; mx * my])
}

/// Defocus disc: every pixel of the `diameter`-square grid whose centre lies
/// within `diameter / 2` of the grid centre.
pub fn disc_psf(diameter: usize) -> Result<UniformConvexPsf> {
    if diameter == 0 {
        return Err(Error::InvalidPsf(String::from(
            "disc diameter must be at least 1",
        )));
    }
    // Doubled coordinates keep the radius test in integers:
    // (2i - (d-1))^2 + (2j - (d-1))^2 <= d^2.
    let d = diameter as i64;
    let anchor = (diameter / 2) as isize;
    let mut rows = Vec::with_capacity(diameter);
    for j in 0..d {
        let cy = 2 * j - (d - 1);
        let mut inside = (0..d).filter(|&i| {
            let cx = 2 * i - (d - 1);
            cx * cx + cy * cy <= d * d
        });
        let x_min = inside.next().expect("centre column is always inside");
        let x_max = inside.next_back().unwrap_or(x_min);
        rows.push(ConvexRow {
            dy: j as isize - anchor,
            x_min: x_min as isize - anchor,
            x_max: x_max as isize - anchor,
        });
    }
    UniformConvexPsf::new(rows)
}

/// 45 degree line of `length` taps `(i, i)` centred on the origin.
pub fn diagonal_psf(length: usize) -> Result<SparsePsf> {
    if length == 0 {
        return Err(Error::InvalidPsf(String::from(
            "diagonal length must be at least 1",
        )));
    }
    let start = -((length / 2) as isize);
    SparsePsf::new(
        (0..length as isize)
            .map(|k| Tap {
                dx: start + k,
                dy: start + k,
                weight: 1.0,
            })
            .collect(),
    )
}

/// Parses `dx dy weight` lines; blank lines and lines starting with `#` are
/// skipped. Weights are renormalised to unit sum.
pub fn parse_sparse_psf(text: &str) -> Result<SparsePsf> {
    let mut taps = Vec::new();
    let mut seen = BTreeMap::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::PsfParse { line, message };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected 3 fields \"dx dy weight\", found {}",
                fields.len()
            )));
        }
        let dx: isize = fields[0]
            .parse()
            .map_err(|_| err(format!("invalid dx {:?}", fields[0])))?;
        let dy: isize = fields[1]
            .parse()
            .map_err(|_| err(format!("invalid dy {:?}", fields[1])))?;
        let weight: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("invalid weight {:?}", fields[2])))?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(err(format!("weight must be positive, got {weight}")));
        }
        if let Some(first) = seen.insert((dx, dy), line) {
            return Err(err(format!(
                "duplicate tap ({dx}, {dy}), first seen on line {first}"
            )));
        }
        taps.push(Tap { dx, dy, weight });
    }
    if taps.is_empty() {
        return Err(Error::PsfParse {
            line: last_line,
            message: String::from("no taps found"),
        });
    }
    SparsePsf::new(taps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    fn mass(p: &Psf) -> f64 {
        p.nonzero_taps().iter().map(|t| t.weight).sum()
    }

    fn offsets(p: &Psf) -> BTreeSet<(isize, isize)> {
        p.weight_map().keys().copied().collect()
    }

    #[test]
    fn line_three() {
        let p = line_psf(3).unwrap();
        assert_eq!(p.anchor(), (1, 0));
        assert_eq!(p.height(), 1);
        for w in p.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn line_one_is_identity_and_zero_rejected() {
        let p = line_psf(1).unwrap();
        assert_eq!(p.weights(), &[1.0]);
        assert!(line_psf(0).is_err());
    }

    #[test]
    fn line_nine_and_seventeen() {
        for m in [9, 17] {
            let p = line_psf(m).unwrap();
            assert_eq!(p.width(), m);
            assert!(p.weights().iter().all(|w| (w - 1.0 / m as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn box_shapes() {
        assert_eq!(box_psf(1, 1).unwrap().weights(), &[1.0]);
        let b = box_psf(3, 3).unwrap();
        assert_eq!(b.anchor(), (1, 1));
        assert!(b.weights().iter().all(|w| (w - 1.0 / 9.0).abs() < 1e-15));
        for m in [9, 17] {
            let b = box_psf(m, m).unwrap();
            assert_eq!(b.weights().len(), m * m);
            assert_eq!(b.anchor(), (m / 2, m / 2));
        }
        assert!(box_psf(0, 3).is_err());
    }

    /// Brute-force pixel-centre enumeration against the radius rule.
    fn disc_oracle(d: usize) -> BTreeSet<(isize, isize)> {
        let c = (d as f64 - 1.0) / 2.0;
        let r = d as f64 / 2.0;
        let a = (d / 2) as isize;
        let mut s = BTreeSet::new();
        for j in 0..d {
            for i in 0..d {
                let (fx, fy) = (i as f64 - c, j as f64 - c);
                if fx * fx + fy * fy <= r * r {
                    s.insert((i as isize - a, j as isize - a));
                }
            }
        }
        s
    }

    #[test]
    fn disc_matches_enumeration() {
        assert_eq!(disc_psf(1).unwrap().support(), 1);
        assert_eq!(disc_psf(3).unwrap().support(), 9);
        for d in 1..=20 {
            let p = Psf::from(disc_psf(d).unwrap());
            assert_eq!(offsets(&p), disc_oracle(d), "diameter {d}");
            assert!((mass(&p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disc_nine_is_symmetric() {
        let p = Psf::from(disc_psf(9).unwrap());
        assert_eq!(p.adjoint().weight_map(), p.weight_map());
        assert_eq!(disc_psf(9).unwrap().support(), disc_oracle(9).len());
    }

    #[test]
    fn diagonal_taps() {
        let p = diagonal_psf(1).unwrap();
        assert_eq!(
            p.taps(),
            &[Tap {
                dx: 0,
                dy: 0,
                weight: 1.0
            }]
        );
        let p = diagonal_psf(3).unwrap();
        let got: Vec<(isize, isize)> = p.taps().iter().map(|t| (t.dx, t.dy)).collect();
        assert_eq!(got, vec![(-1, -1), (0, 0), (1, 1)]);
        assert!(p.taps().iter().all(|t| (t.weight - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(diagonal_psf(9).unwrap().support(), 9);
    }

    #[test]
    fn parse_identity_and_normalisation() {
        let p = parse_sparse_psf("0 0 1").unwrap();
        assert_eq!(
            p.taps(),
            &[Tap {
                dx: 0,
                dy: 0,
                weight: 1.0
            }]
        );
        let p = parse_sparse_psf("0 0 2\n1 0 2").unwrap();
        assert_eq!(p.taps()[0].weight, 0.5);
        assert_eq!(p.taps()[1].weight, 0.5);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_sparse_psf("# shake\n0 0 1\n1 1 1\n0 0 3\n").unwrap_err();
        assert!(matches!(e, Error::PsfParse { line: 4, .. }), "{e:?}");
        let e = parse_sparse_psf("0 0 1\n2 2 0\n").unwrap_err();
        assert!(matches!(e, Error::PsfParse { line: 2, .. }));
        let e = parse_sparse_psf("0 0 -1\n").unwrap_err();
        assert!(matches!(e, Error::PsfParse { line: 1, .. }));
        assert!(matches!(
            parse_sparse_psf("# nothing\n\n"),
            Err(Error::PsfParse { .. })
        ));
        assert!(matches!(
            parse_sparse_psf("1 2\n"),
            Err(Error::PsfParse { line: 1, .. })
        ));
        assert!(matches!(
            parse_sparse_psf("a 2 1\n"),
            Err(Error::PsfParse { line: 1, .. })
        ));
    }

    #[test]
    fn shake_kernel_file() {
        // Irregular camera-shake-like trajectory with varying intensity.
        let mut text = String::from("# shake kernel\n");
        let path = [
            (0, 0),
            (1, 0),
            (2, 1),
            (3, 1),
            (4, 2),
            (4, 3),
            (5, 4),
            (5, 5),
            (4, 6),
            (3, 6),
            (2, 7),
            (1, 7),
            (0, 8),
            (-1, 8),
            (-2, 9),
            (-2, 10),
            (-3, 11),
            (-3, 12),
            (-2, 13),
            (-1, 13),
        ];
        for (k, (dx, dy)) in path.iter().enumerate() {
            let _ = writeln!(text, "{dx} {dy} {}", 1.0 + (k % 5) as f64 * 0.7);
        }
        let p = parse_sparse_psf(&text).unwrap();
        assert_eq!(p.support(), 20);
        let sum: f64 = p.taps().iter().map(|t| t.weight).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_adjoint_flips_signs() {
        let p = SparsePsf::new(vec![
            Tap {
                dx: 1,
                dy: 2,
                weight: 0.5,
            },
            Tap {
                dx: 0,
                dy: 0,
                weight: 0.5,
            },
        ])
        .unwrap();
        let a = p.adjoint();
        assert_eq!(
            a.taps(),
            &[
                Tap {
                    dx: -1,
                    dy: -2,
                    weight: 0.5
                },
                Tap {
                    dx: 0,
                    dy: 0,
                    weight: 0.5
                }
            ]
        );
    }

    #[test]
    fn even_line_adjoint_negates_offsets() {
        let p = Psf::from(line_psf(4).unwrap());
        let neg: BTreeSet<(isize, isize)> = offsets(&p).iter().map(|&(x, y)| (-x, -y)).collect();
        assert_eq!(
            offsets(&p),
            [(-2, 0), (-1, 0), (0, 0), (1, 0)].into_iter().collect()
        );
        assert_eq!(offsets(&p.adjoint()), neg);
    }

    #[test]
    fn conversions() {
        let s = Psf::from(box_psf(3, 1).unwrap()).to_sparse();
        assert_eq!(s.support(), 3);
        assert!(s.taps().iter().all(|t| (t.weight - 1.0 / 3.0).abs() < 1e-15));
        let d = Psf::from(disc_psf(3).unwrap()).to_dense();
        assert_eq!((d.width(), d.height(), d.anchor()), (3, 3, (1, 1)));
        assert!(d.weights().iter().all(|w| (w - 1.0 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn uniform_detection() {
        assert_eq!(
            Psf::from(line_psf(5).unwrap()).uniform_rect(),
            Some((-2, 0, 5, 1))
        );
        assert_eq!(
            Psf::from(box_psf(4, 3).unwrap()).uniform_rect(),
            Some((-2, -1, 4, 3))
        );
        assert_eq!(Psf::from(disc_psf(9).unwrap()).uniform_rect(), None);
        assert!(Psf::from(diagonal_psf(9).unwrap()).to_uniform_convex().is_some());
        let skewed = SparsePsf::new(vec![
            Tap {
                dx: 0,
                dy: 0,
                weight: 1.0,
            },
            Tap {
                dx: 1,
                dy: 0,
                weight: 2.0,
            },
        ])
        .unwrap();
        assert!(Psf::from(skewed).to_uniform_convex().is_none());
        let gap = SparsePsf::new(vec![
            Tap {
                dx: 0,
                dy: 0,
                weight: 1.0,
            },
            Tap {
                dx: 2,
                dy: 0,
                weight: 1.0,
            },
        ])
        .unwrap();
        assert!(Psf::from(gap).to_uniform_convex().is_none());
    }

    #[test]
    fn convex_rows_validated() {
        let r = |dy, x_min, x_max| ConvexRow { dy, x_min, x_max };
        assert!(UniformConvexPsf::new(vec![r(0, 0, 1), r(2, 0, 1)]).is_err());
        assert!(UniformConvexPsf::new(vec![r(0, 1, 0)]).is_err());
        assert!(UniformConvexPsf::new(vec![]).is_err());
        assert!(UniformConvexPsf::new(vec![r(-1, 0, 0), r(0, -1, 1)]).is_ok());
    }

    #[test]
    fn dense_validation() {
        assert!(DensePsf::new(2, 2, (2, 0), vec![1.0; 4]).is_err());
        assert!(DensePsf::new(2, 2, (0, 0), vec![1.0; 3]).is_err());
        assert!(DensePsf::new(2, 1, (0, 0), vec![1.0, -1.0]).is_err());
        assert!(DensePsf::new(2, 1, (0, 0), vec![0.0, 0.0]).is_err());
    }

    fn arb_sparse() -> impl Strategy<Value = SparsePsf> {
        proptest::collection::btree_map((-6isize..7, -6isize..7), 0.01f64..5.0, 1..25).prop_map(|m| {
            SparsePsf::new(
                m.into_iter()
                    .map(|((dx, dy), weight)| Tap { dx, dy, weight })
                    .collect(),
            )
            .unwrap()
        })
    }

    fn arb_psf() -> impl Strategy<Value = Psf> {
        prop_oneof![
            arb_sparse().prop_map(Psf::Sparse),
            (1usize..12).prop_map(|m| Psf::Dense(line_psf(m).unwrap())),
            (1usize..8, 1usize..8).prop_map(|(a, b)| Psf::Dense(box_psf(a, b).unwrap())),
            (1usize..18).prop_map(|d| Psf::Convex(disc_psf(d).unwrap())),
            (1usize..12).prop_map(|m| Psf::Sparse(diagonal_psf(m).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn unit_mass(p in arb_psf()) {
            prop_assert!((mass(&p) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn adjoint_is_involution(p in arb_psf()) {
            prop_assert_eq!(p.adjoint().adjoint(), p.clone());
            let negated: BTreeMap<(isize, isize), f64> =
                p.weight_map().into_iter().map(|((x, y), w)| ((-x, -y), w)).collect();
            prop_assert_eq!(p.adjoint().weight_map(), negated);
            let dense = Psf::Dense(p.to_dense());
            prop_assert_eq!(dense.adjoint().adjoint(), dense);
        }

        #[test]
        fn weight_map_is_representation_invariant(p in arb_psf()) {
            let d = Psf::Dense(p.to_dense());
            let s = Psf::Sparse(p.to_sparse());
            prop_assert_eq!(d.weight_map(), p.weight_map());
            prop_assert_eq!(s.weight_map(), p.weight_map());
            prop_assert_eq!(Psf::Sparse(Psf::Dense(s.to_dense()).to_sparse()).weight_map(), s.weight_map());
        }

        #[test]
        fn text_round_trip_keeps_taps(p in arb_sparse()) {
            let q = parse_sparse_psf(&p.to_text()).unwrap();
            prop_assert_eq!(q.taps(), p.taps());
        }
    }
}
