//! Wall-clock measurement.

use std::time::{Duration, Instant};

use rldeconv_core::Clock;

/// Seconds since construction, from the monotonic system clock.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Wall time of one call to `thunk`, in seconds, together with its result.
pub fn time_run<T>(thunk: impl FnOnce() -> T) -> (f64, T) {
    let start = Instant::now();
    let out = thunk();
    (start.elapsed().as_secs_f64(), out)
}

/// Mean and sample standard deviation of repeated measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub samples: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
}

impl Timing {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        assert!(!samples.is_empty(), "no timing samples");
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stddev = if samples.len() < 2 {
            0.0
        } else {
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self {
            samples,
            mean,
            stddev,
        }
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Smallest nonzero step observed on the monotonic clock.
pub fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..8 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min(t1 - t0);
    }
    best
}
