//! Richardson-Lucy deconvolution, plain and with selective convolution.
//!
//! Starting from `u0 = f`, each step computes
//!
//! ```text
//! v      = u * h
//! u_next = (h_adj * (f / v)) . u
//! ```
//!
//! where `h_adj` is `h` reflected about the origin and `.` is the pixelwise
//! product. The selective variant keeps a per-pixel activity flag: pixels whose
//! last change fell below a threshold are skipped by both convolutions and
//! keep their previous `v` and `u` until the next periodic full reactivation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::convops::{cyclic_convolve, Convolution, Operator, OperatorChoice};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::psf::Psf;

/// Source of wall-clock time in seconds. The core crate has no clock of its
/// own; callers with `std` plug in a monotonic one.
pub trait Clock {
    fn now(&self) -> f64;
}

/// Clock that always reads zero; iteration times in the trace come out as 0.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlConfig {
    pub iterations: usize,
    pub operator: OperatorChoice,
    /// Lower bound applied to `v` before dividing.
    pub epsilon_div: f64,
    pub clamp_non_negative: bool,
}

impl Default for RlConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            operator: OperatorChoice::Auto,
            epsilon_div: 1e-8,
            clamp_non_negative: true,
        }
    }
}

impl RlConfig {
    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_operator(mut self, operator: impl Into<OperatorChoice>) -> Self {
        self.operator = operator.into();
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon_div.is_finite() && self.epsilon_div > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!(
                "epsilon_div must be positive, got {}",
                self.epsilon_div
            )));
        }
        Ok(())
    }
}

/// Statistics for one completed iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Share of pixels skipped by this iteration's convolutions.
    pub inactive_fraction: f64,
    pub max_change: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RlTrace {
    pub records: Vec<IterationRecord>,
}

impl RlTrace {
    /// Share of per-pixel convolution evaluations skipped over the whole run.
    ///
    /// Every iteration evaluates both convolutions at the same pixel set, so
    /// this is the mean of the per-iteration inactive fractions.
    pub fn omitted_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.inactive_fraction).sum::<f64>() / self.records.len() as f64
    }

    pub fn total_seconds(&self) -> f64 {
        self.records.iter().map(|r| r.seconds).sum()
    }
}

fn check_observed(f: &Image) -> Result<()> {
    if let Some(i) = f.data().iter().position(|&v| v < 0.0) {
        return Err(Error::NegativeInput {
            x: i % f.width(),
            y: i / f.width(),
            value: f.data()[i],
        });
    }
    Ok(())
}

fn quotient(f: &Image, v: &Image, eps: f64) -> Image {
    let data = f
        .data()
        .iter()
        .zip(v.data())
        .map(|(&fv, &vv)| fv / if vv > eps { vv } else { eps })
        .collect();
    Image::from_raw(f.width(), f.height(), data)
}

/// The multiplicative update `c * u`, clamped at zero on request. Both
/// iteration variants go through here so they agree bit for bit.
#[inline]
fn multiplied(c: f64, u: f64, clamp: bool) -> f64 {
    let next = c * u;
    if clamp && (next < 0.0 || next.is_nan()) {
        0.0
    } else {
        next
    }
}

/// Standard Richardson-Lucy with the operator chosen by `cfg.operator`.
pub fn richardson_lucy(f: &Image, psf: &Psf, cfg: &RlConfig, clock: &dyn Clock) -> Result<(Image, RlTrace)> {
    let fwd = Operator::for_psf(psf, cfg.operator)?;
    let adj = fwd.adjoint();
    richardson_lucy_from(f, f.clone(), &fwd, &adj, cfg, clock)
}

/// Standard Richardson-Lucy from an explicit start `u0`, with caller-supplied
/// forward and adjoint convolutions. `cfg.operator` is ignored.
pub fn richardson_lucy_from(
    f: &Image,
    u0: Image,
    fwd: &dyn Convolution,
    adj: &dyn Convolution,
    cfg: &RlConfig,
    clock: &dyn Clock,
) -> Result<(Image, RlTrace)> {
    cfg.validate()?;
    check_observed(f)?;
    f.check_same_shape(&u0)?;
    let mut u = u0;
    let mut trace = RlTrace {
        records: Vec::with_capacity(cfg.iterations),
    };
    for k in 0..cfg.iterations {
        let t0 = clock.now();
        let v = fwd.convolve(&u);
        let q = quotient(f, &v, cfg.epsilon_div);
        let c = adj.convolve(&q);
        let mut max_change = 0.0f64;
        let mut finite = true;
        for (ui, &ci) in u.data_mut().iter_mut().zip(c.data()) {
            let next = multiplied(ci, *ui, cfg.clamp_non_negative);
            let change = (next - *ui).abs();
            if change > max_change {
                max_change = change;
            }
            finite &= next.is_finite();
            *ui = next;
        }
        if !finite {
            return Err(Error::NanIterate(k + 1));
        }
        trace.records.push(IterationRecord {
            iteration: k + 1,
            inactive_fraction: 0.0,
            max_change,
            seconds: clock.now() - t0,
        });
    }
    Ok((u, trace))
}

/// Activity flags and the cached re-blurred image of selective iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityMask {
    flags: Vec<bool>,
    cached_v: Image,
    threshold: f64,
    period: usize,
}

impl ActivityMask {
    /// All pixels start active; `cached_v` starts as zeros and is filled by
    /// the first (full) iteration.
    pub fn new(width: usize, height: usize, threshold: f64, period: usize) -> Result<Self> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "threshold must be nonnegative, got {threshold}"
            )));
        }
        if period == 0 {
            return Err(Error::InvalidConfig(String::from(
                "reactivation period must be at least 1",
            )));
        }
        Ok(Self {
            flags: vec![true; width * height],
            cached_v: Image::filled(width, height, 0.0),
            threshold,
            period,
        })
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn cached_v(&self) -> &Image {
        &self.cached_v
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn inactive_count(&self) -> usize {
        self.flags.iter().filter(|&&a| !a).count()
    }
}

/// Step-by-step selective Richardson-Lucy.
pub struct SelectiveRl<'a> {
    f: &'a Image,
    fwd: &'a dyn Convolution,
    adj: &'a dyn Convolution,
    cfg: RlConfig,
    u: Image,
    mask: ActivityMask,
    done: usize,
}

impl<'a> SelectiveRl<'a> {
    pub fn new(
        f: &'a Image,
        fwd: &'a dyn Convolution,
        adj: &'a dyn Convolution,
        cfg: &RlConfig,
        threshold: f64,
        period: usize,
    ) -> Result<Self> {
        cfg.validate()?;
        check_observed(f)?;
        for kind in [fwd.kind(), adj.kind()] {
            if !kind.supports_mask() {
                return Err(Error::MaskUnsupported(kind));
            }
        }
        Ok(Self {
            f,
            fwd,
            adj,
            cfg: *cfg,
            u: f.clone(),
            mask: ActivityMask::new(f.width(), f.height(), threshold, period)?,
            done: 0,
        })
    }

    pub fn current(&self) -> &Image {
        &self.u
    }

    pub fn mask(&self) -> &ActivityMask {
        &self.mask
    }

    pub fn into_image(self) -> Image {
        self.u
    }

    /// Runs one iteration and returns its record.
    pub fn step(&mut self, clock: &dyn Clock) -> Result<IterationRecord> {
        let t0 = clock.now();
        let k = self.done;
        if k.is_multiple_of(self.mask.period) {
            self.mask.flags.fill(true);
        }
        let inactive = self.mask.inactive_count();
        let flags = &self.mask.flags;

        // Inactive pixels keep v from the previous iteration.
        let v = self.fwd.convolve_masked(&self.u, flags, &self.mask.cached_v)?;
        // The quotient is needed everywhere: active pixels correlate over
        // their inactive neighbours too.
        let q = quotient(self.f, &v, self.cfg.epsilon_div);
        let c = self.adj.convolve_masked(&q, flags, &q)?;

        let mut max_change = 0.0f64;
        let mut finite = true;
        let threshold = self.mask.threshold;
        for ((ui, &ci), flag) in self
            .u
            .data_mut()
            .iter_mut()
            .zip(c.data())
            .zip(self.mask.flags.iter_mut())
        {
            if !*flag {
                continue;
            }
            let next = multiplied(ci, *ui, self.cfg.clamp_non_negative);
            let change = (next - *ui).abs();
            if change > max_change {
                max_change = change;
            }
            if change < threshold {
                *flag = false;
            }
            finite &= next.is_finite();
            *ui = next;
        }
        if !finite {
            return Err(Error::NanIterate(k + 1));
        }
        self.mask.cached_v = v;
        self.done += 1;
        Ok(IterationRecord {
            iteration: k + 1,
            inactive_fraction: inactive as f64 / self.u.len() as f64,
            max_change,
            seconds: clock.now() - t0,
        })
    }
}

/// Selective Richardson-Lucy. `cfg.operator` must resolve to an operator with
/// masked evaluation (naive or list).
pub fn richardson_lucy_selective(
    f: &Image,
    psf: &Psf,
    cfg: &RlConfig,
    threshold: f64,
    period: usize,
    clock: &dyn Clock,
) -> Result<(Image, RlTrace)> {
    let fwd = Operator::for_psf(psf, cfg.operator)?;
    let adj = fwd.adjoint();
    richardson_lucy_selective_with(f, &fwd, &adj, cfg, threshold, period, clock)
}

pub fn richardson_lucy_selective_with(
    f: &Image,
    fwd: &dyn Convolution,
    adj: &dyn Convolution,
    cfg: &RlConfig,
    threshold: f64,
    period: usize,
    clock: &dyn Clock,
) -> Result<(Image, RlTrace)> {
    let mut run = SelectiveRl::new(f, fwd, adj, cfg, threshold, period)?;
    let mut trace = RlTrace {
        records: Vec::with_capacity(cfg.iterations),
    };
    for _ in 0..cfg.iterations {
        trace.records.push(run.step(clock)?);
    }
    Ok((run.into_image(), trace))
}

/// Boundary rule used when synthesising a blurred observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlurMode {
    /// Periodic wrap-around, as a DFT-based blur would produce.
    #[default]
    Cyclic,
    Replicate,
}

/// Convolves a sharp image with `psf` to produce a test observation.
pub fn blur_image(g: &Image, psf: &Psf, mode: BlurMode) -> Result<Image> {
    match mode {
        BlurMode::Cyclic => Ok(cyclic_convolve(g, psf)),
        BlurMode::Replicate => Ok(Operator::for_psf(psf, OperatorChoice::Auto)?.convolve(g)),
    }
}
