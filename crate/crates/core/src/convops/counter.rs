/// Sink for arithmetic operation counts.
///
/// The unit type `()` discards everything and compiles down to nothing, so
/// the uninstrumented operators pay no cost for the hooks.
pub trait Counter {
    /// Work that prepares a scan line or a whole image: padding sums,
    /// window initialisation, prefix-sum construction.
    #[inline(always)]
    fn setup(&mut self, _n: u64) {}
    /// Additions and subtractions that slide a window or difference prefix sums.
    #[inline(always)]
    fn update(&mut self, _n: u64) {}
    /// Per-output normalisation of a window sum: scale by the uniform weight
    /// and add back the reference level, one fused step.
    #[inline(always)]
    fn scale(&mut self, _n: u64) {}
    /// Weighted tap accumulations `acc += w * u`.
    #[inline(always)]
    fn taps(&mut self, _n: u64) {}
    /// Output pixels produced.
    #[inline(always)]
    fn outputs(&mut self, _n: u64) {}
}

impl Counter for () {}

/// Tallies from one or more instrumented convolutions.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub setup: u64,
    pub update: u64,
    pub scale: u64,
    pub taps: u64,
    pub outputs: u64,
}

impl OpCounts {
    /// Steady-state work per output pixel (everything but setup).
    pub fn per_output(&self) -> f64 {
        (self.update + self.scale + self.taps) as f64 / self.outputs as f64
    }

    pub fn updates_per_output(&self) -> f64 {
        self.update as f64 / self.outputs as f64
    }

    pub fn taps_per_output(&self) -> f64 {
        self.taps as f64 / self.outputs as f64
    }
}

impl Counter for OpCounts {
    fn setup(&mut self, n: u64) {
        self.setup += n;
    }
    fn update(&mut self, n: u64) {
        self.update += n;
    }
    fn scale(&mut self, n: u64) {
        self.scale += n;
    }
    fn taps(&mut self, n: u64) {
        self.taps += n;
    }
    fn outputs(&mut self, n: u64) {
        self.outputs += n;
    }
}
