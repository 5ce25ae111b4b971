//! Spatial convolution operators.
//!
//! Every operator computes
//! `out(x, y) = sum over taps of w(dx, dy) * u(x + dx, y + dy)`
//! with `u` continued past the image border by its nearest pixel. They differ
//! only in which PSFs they accept and how much work each output pixel costs:
//!
//! | kind             | accepts                          | work per pixel   |
//! |------------------|----------------------------------|------------------|
//! | `naive`          | anything (enclosing rectangle)   | `Mx * My`        |
//! | `list`           | anything (nonzero taps)          | `M`              |
//! | `generic-box`    | uniform, row-convex              | `2 * My`         |
//! | `box2d-sliding`  | uniform rectangle                | constant         |
//! | `box2d-cumul`    | uniform rectangle                | 4                |
//! | `box1d-sliding`  | uniform horizontal line          | 3                |
//! | `box1d-cumul`    | uniform horizontal line          | 2                |
//!
//! `naive` and `list` additionally evaluate a subset of pixels given by a
//! mask, which is what selective Richardson-Lucy needs. The Fourier reference
//! operator uses periodic boundaries and is provided by the `rldeconv` crate.

mod box1d;
mod box2d;
mod counter;
mod cyclic;
mod generic_box;
mod list;
mod naive;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use box2d::PassOrder;
pub use counter::{Counter, OpCounts};
pub use cyclic::cyclic_convolve;

use crate::error::{Error, Result};
use crate::image::{Image, PaddedImage};
use crate::psf::{DensePsf, Psf, SparsePsf, UniformConvexPsf};

/// Convolution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    Naive,
    List,
    GenericBox,
    Box2dSliding,
    Box2dCumulated,
    Box1dSliding,
    Box1dCumulated,
    FourierReference,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::Naive,
        OperatorKind::FourierReference,
        OperatorKind::List,
        OperatorKind::GenericBox,
        OperatorKind::Box2dSliding,
        OperatorKind::Box2dCumulated,
        OperatorKind::Box1dSliding,
        OperatorKind::Box1dCumulated,
    ];

    /// Stable name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Naive => "naive",
            OperatorKind::List => "list",
            OperatorKind::GenericBox => "generic-box",
            OperatorKind::Box2dSliding => "box2d-sliding",
            OperatorKind::Box2dCumulated => "box2d-cumul",
            OperatorKind::Box1dSliding => "box1d-sliding",
            OperatorKind::Box1dCumulated => "box1d-cumul",
            OperatorKind::FourierReference => "fourier",
        }
    }

    pub fn supports_mask(self) -> bool {
        matches!(self, OperatorKind::Naive | OperatorKind::List)
    }

    /// Everything except the Fourier reference uses replicate boundaries.
    pub fn is_spatial(self) -> bool {
        self != OperatorKind::FourierReference
    }

    /// Whether this strategy can represent `psf` exactly.
    pub fn accepts(self, psf: &Psf) -> bool {
        match self {
            OperatorKind::Naive | OperatorKind::List | OperatorKind::FourierReference => true,
            OperatorKind::GenericBox => psf.to_uniform_convex().is_some(),
            OperatorKind::Box2dSliding | OperatorKind::Box2dCumulated => psf.uniform_rect().is_some(),
            OperatorKind::Box1dSliding | OperatorKind::Box1dCumulated => {
                matches!(psf.uniform_rect(), Some((_, 0, _, 1)))
            }
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownOperator(String::from(s)))
    }
}

/// Either a fixed strategy or automatic selection of the most specific one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OperatorChoice {
    #[default]
    Auto,
    Kind(OperatorKind),
}

impl From<OperatorKind> for OperatorChoice {
    fn from(k: OperatorKind) -> Self {
        OperatorChoice::Kind(k)
    }
}

impl fmt::Display for OperatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorChoice::Auto => f.write_str("auto"),
            OperatorChoice::Kind(k) => k.fmt(f),
        }
    }
}

impl FromStr for OperatorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            Ok(OperatorChoice::Auto)
        } else {
            s.parse().map(OperatorChoice::Kind)
        }
    }
}

/// Resolves `choice` for `psf`.
///
/// `Auto` picks the most specific applicable strategy: 1D box for uniform
/// horizontal lines, 2D cumulated box for uniform rectangles, generic box for
/// convex uniform PSFs, list for sparse PSFs, naive otherwise. An explicit
/// kind is returned unchanged if it accepts the PSF.
pub fn dispatch(psf: &Psf, choice: OperatorChoice) -> Result<OperatorKind> {
    match choice {
        OperatorChoice::Kind(kind) if kind.accepts(psf) => Ok(kind),
        OperatorChoice::Kind(kind) => Err(Error::IncompatibleOperator {
            kind,
            psf: psf.describe(),
        }),
        OperatorChoice::Auto => Ok(match psf.uniform_rect() {
            Some((_, 0, _, 1)) => OperatorKind::Box1dCumulated,
            Some(_) => OperatorKind::Box2dCumulated,
            None => match psf {
                Psf::Convex(_) => OperatorKind::GenericBox,
                Psf::Sparse(_) => OperatorKind::List,
                Psf::Dense(_) => OperatorKind::Naive,
            },
        }),
    }
}

/// A convolution with one fixed PSF, as consumed by the deconvolution loop.
pub trait Convolution {
    fn kind(&self) -> OperatorKind;

    fn convolve(&self, img: &Image) -> Image;

    /// Convolution at pixels where `mask` is true; `fallback` elsewhere.
    fn convolve_masked(&self, _img: &Image, _mask: &[bool], _fallback: &Image) -> Result<Image> {
        Err(Error::MaskUnsupported(self.kind()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Prepared {
    Naive(DensePsf),
    List(SparsePsf),
    GenericBox(UniformConvexPsf),
    Box2d { rect: box2d::Rect, cumulated: bool },
    Box1d { x0: isize, len: usize, cumulated: bool },
}

/// A spatial operator bound to a PSF in the representation it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    kind: OperatorKind,
    prepared: Prepared,
}

impl Operator {
    /// Prepares `kind` for `psf`, converting the PSF as required.
    pub fn new(psf: &Psf, kind: OperatorKind) -> Result<Self> {
        let incompatible = || Error::IncompatibleOperator {
            kind,
            psf: psf.describe(),
        };
        let prepared = match kind {
            OperatorKind::Naive => Prepared::Naive(psf.to_dense()),
            OperatorKind::List => Prepared::List(psf.to_sparse()),
            OperatorKind::GenericBox => {
                Prepared::GenericBox(psf.to_uniform_convex().ok_or_else(incompatible)?)
            }
            OperatorKind::Box2dSliding | OperatorKind::Box2dCumulated => {
                let (x0, y0, mx, my) = psf.uniform_rect().ok_or_else(incompatible)?;
                Prepared::Box2d {
                    rect: box2d::Rect { x0, y0, mx, my },
                    cumulated: kind == OperatorKind::Box2dCumulated,
                }
            }
            OperatorKind::Box1dSliding | OperatorKind::Box1dCumulated => match psf.uniform_rect() {
                Some((x0, 0, len, 1)) => Prepared::Box1d {
                    x0,
                    len,
                    cumulated: kind == OperatorKind::Box1dCumulated,
                },
                _ => return Err(incompatible()),
            },
            OperatorKind::FourierReference => {
                return Err(Error::InvalidConfig(String::from(
                    "the Fourier reference operator is not a spatial operator",
                )))
            }
        };
        Ok(Self { kind, prepared })
    }

    /// Resolves `choice` with [`dispatch`] and prepares the result.
    pub fn for_psf(psf: &Psf, choice: OperatorChoice) -> Result<Self> {
        Self::new(psf, dispatch(psf, choice)?)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// The same strategy bound to the reflected PSF.
    pub fn adjoint(&self) -> Self {
        let prepared = match &self.prepared {
            Prepared::Naive(p) => Prepared::Naive(p.adjoint()),
            Prepared::List(p) => Prepared::List(p.adjoint()),
            Prepared::GenericBox(p) => Prepared::GenericBox(p.adjoint()),
            Prepared::Box2d { rect, cumulated } => Prepared::Box2d {
                rect: box2d::Rect {
                    x0: -(rect.x0 + rect.mx as isize - 1),
                    y0: -(rect.y0 + rect.my as isize - 1),
                    mx: rect.mx,
                    my: rect.my,
                },
                cumulated: *cumulated,
            },
            Prepared::Box1d { x0, len, cumulated } => Prepared::Box1d {
                x0: -(x0 + *len as isize - 1),
                len: *len,
                cumulated: *cumulated,
            },
        };
        Self {
            kind: self.kind,
            prepared,
        }
    }

    /// Convolution that also reports its arithmetic work into `counter`.
    pub fn convolve_counted(&self, img: &Image, counter: &mut impl Counter) -> Image {
        match &self.prepared {
            Prepared::Naive(p) => naive::convolve(img, p, counter),
            Prepared::List(p) => list::convolve(img, p, counter),
            Prepared::GenericBox(p) => generic_box::convolve(img, p, counter),
            Prepared::Box2d {
                rect,
                cumulated: true,
            } => box2d::cumulated(img, *rect, counter),
            Prepared::Box2d {
                rect,
                cumulated: false,
            } => box2d::sliding(img, *rect, PassOrder::XThenY, counter),
            Prepared::Box1d {
                x0,
                len,
                cumulated: true,
            } => box1d::cumulated(img, *x0, *len, counter),
            Prepared::Box1d {
                x0,
                len,
                cumulated: false,
            } => box1d::sliding(img, *x0, *len, counter),
        }
    }

    pub fn convolve_masked_counted(
        &self,
        img: &Image,
        mask: &[bool],
        fallback: &Image,
        counter: &mut impl Counter,
    ) -> Result<Image> {
        img.check_same_shape(fallback)?;
        if mask.len() != img.len() {
            return Err(Error::MaskLength(mask.len(), img.len()));
        }
        match &self.prepared {
            Prepared::Naive(p) => Ok(naive::convolve_masked(img, p, mask, fallback, counter)),
            Prepared::List(p) => Ok(list::convolve_masked(img, p, mask, fallback, counter)),
            _ => Err(Error::MaskUnsupported(self.kind)),
        }
    }
}

impl Convolution for Operator {
    fn kind(&self) -> OperatorKind {
        self.kind
    }

    fn convolve(&self, img: &Image) -> Image {
        self.convolve_counted(img, &mut ())
    }

    fn convolve_masked(&self, img: &Image, mask: &[bool], fallback: &Image) -> Result<Image> {
        self.convolve_masked_counted(img, mask, fallback, &mut ())
    }
}

/// Appends output pixels `xs` of row `y` to `out`, each a sum over `taps`
/// (flat offset, weight) accumulated in list order from zero, plus `level`.
///
/// Work is proportional to the number of pixels produced. The full and masked
/// paths share this one out-of-line routine, so their results agree bit for
/// bit and they run the same machine code.
#[inline(never)]
pub(crate) fn gather_run(
    out: &mut Vec<f64>,
    padded: &PaddedImage,
    taps: &[(usize, f64)],
    level: f64,
    y: usize,
    xs: core::ops::Range<usize>,
) {
    let data = padded.data();
    let row = y * padded.width();
    out.extend(xs.map(|x| {
        let p = row + x;
        let mut acc = 0.0;
        for &(off, w) in taps {
            acc += w * data[p + off];
        }
        acc + level
    }));
}

/// Builds a masked output in raster order: `gather_run` over each active run,
/// `fallback` elsewhere.
pub(crate) fn collect_masked(
    padded: &PaddedImage,
    taps: &[(usize, f64)],
    level: f64,
    mask: &[bool],
    fallback: &Image,
    counter: &mut impl Counter,
) -> Image {
    let (w, h) = (fallback.width(), fallback.height());
    let mut out = Vec::with_capacity(w * h);
    for (y, (frow, mrow)) in fallback
        .data()
        .chunks_exact(w)
        .zip(mask.chunks_exact(w))
        .enumerate()
    {
        let mut done = 0;
        for_each_run(mrow, |x0, x1| {
            out.extend_from_slice(&frow[done..x0]);
            gather_run(&mut out, padded, taps, level, y, x0..x1);
            counter.taps(((x1 - x0) * taps.len()) as u64);
            counter.outputs((x1 - x0) as u64);
            done = x1;
        });
        out.extend_from_slice(&frow[done..]);
    }
    Image::from_raw(w, h, out)
}

/// Calls `f(x0, x1)` for every maximal run of `true` in `mask`.
#[inline]
pub(crate) fn for_each_run(mask: &[bool], mut f: impl FnMut(usize, usize)) {
    let mut x = 0;
    let n = mask.len();
    while x < n {
        if !mask[x] {
            x += 1;
            continue;
        }
        let start = x;
        while x < n && mask[x] {
            x += 1;
        }
        f(start, x);
    }
}

/// Direct summation over the grid enclosing the PSF. The correctness oracle
/// for every other operator.
pub fn naive_convolve(img: &Image, psf: &DensePsf) -> Image {
    naive::convolve(img, psf, &mut ())
}

/// Summation over the support list; one multiply-add per tap per pixel.
pub fn list_convolve(img: &Image, psf: &SparsePsf) -> Image {
    list::convolve(img, psf, &mut ())
}

/// Sliding-window sum for a uniform row-convex PSF.
pub fn generic_box_convolve(img: &Image, psf: &UniformConvexPsf) -> Image {
    generic_box::convolve(img, psf, &mut ())
}

fn centred(len: usize) -> isize {
    -((len / 2) as isize)
}

/// Horizontal box of `length` taps (origin at `length / 2`), sliding window.
pub fn box1d_sliding_convolve(img: &Image, length: usize) -> Image {
    assert!(length >= 1, "box length must be at least 1");
    box1d::sliding(img, centred(length), length, &mut ())
}

/// Horizontal box of `length` taps via per-line cumulated sums.
pub fn box1d_cumulated_convolve(img: &Image, length: usize) -> Image {
    assert!(length >= 1, "box length must be at least 1");
    box1d::cumulated(img, centred(length), length, &mut ())
}

/// `mx` by `my` box as a horizontal pass followed by a vertical pass.
pub fn box2d_sliding_convolve(img: &Image, mx: usize, my: usize) -> Image {
    box2d_sliding_convolve_ordered(img, mx, my, PassOrder::XThenY)
}

/// Separable box filter with an explicit pass order.
pub fn box2d_sliding_convolve_ordered(img: &Image, mx: usize, my: usize, order: PassOrder) -> Image {
    assert!(mx >= 1 && my >= 1, "box sides must be at least 1");
    let rect = box2d::Rect {
        x0: centred(mx),
        y0: centred(my),
        mx,
        my,
    };
    box2d::sliding(img, rect, order, &mut ())
}

/// `mx` by `my` box via a 2D cumulated-sum array: four lookups per pixel.
pub fn box2d_cumulated_convolve(img: &Image, mx: usize, my: usize) -> Image {
    assert!(mx >= 1 && my >= 1, "box sides must be at least 1");
    let rect = box2d::Rect {
        x0: centred(mx),
        y0: centred(my),
        mx,
        my,
    };
    box2d::cumulated(img, rect, &mut ())
}

/// Masked evaluation with the strategy `kind`; only naive and list support it.
pub fn masked_convolve(
    img: &Image,
    psf: &Psf,
    kind: OperatorKind,
    mask: &[bool],
    fallback: &Image,
) -> Result<Image> {
    if !kind.supports_mask() {
        return Err(Error::MaskUnsupported(kind));
    }
    Operator::new(psf, kind)?.convolve_masked(img, mask, fallback)
}

/// 2D cumulated sums of a replicate-padded image, exposed for inspection.
///
/// `(width + 1) x (height + 1)` values where entry `(c, r)` is the sum of all
/// padded pixels in columns `< c` and rows `< r`.
pub fn cumulated_sum_array(
    img: &Image,
    left: usize,
    right: usize,
    top: usize,
    bottom: usize,
) -> (usize, alloc::vec::Vec<f64>) {
    let padded = crate::image::pad_replicate(img, left, right, top, bottom);
    (padded.width() + 1, box2d::integral(&padded, &mut ()))
}
