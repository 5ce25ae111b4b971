//! Runtime and thinning-quality experiments.
//!
//! `table1` times standard Richardson-Lucy for every (operator, PSF) pair;
//! `table2` compares selective iteration at several thresholds against an
//! unthinned naive reference. Only the iteration loop is timed. Repetitions
//! are interleaved across configurations so slow drift of the machine affects
//! every configuration alike.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Duration;

use rldeconv_core::convops::Convolution;
use rldeconv_core::rl::{blur_image, richardson_lucy_from, richardson_lucy_selective_with, BlurMode};
use rldeconv_core::{snr_db, Image, NoClock, Operator, OperatorKind, Psf, RlConfig};

use crate::error::Result;
use crate::fourier::FourierOperator;
use crate::psfspec::PsfSpec;
use crate::timing::{time_run, timer_resolution, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Table1,
    Table2,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::Table2 => "table2",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "table1" => Ok(Self::Table1),
            "table2" => Ok(Self::Table2),
            _ => Err(format!("unknown experiment {s:?} (expected table1 or table2)")),
        }
    }
}

pub const DEFAULT_THRESHOLDS: [f64; 8] = [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub experiment: Experiment,
    /// Table 2 uses the first entry only.
    pub psfs: Vec<PsfSpec>,
    pub iterations: usize,
    pub repetitions: usize,
    pub thresholds: Vec<f64>,
    /// Reactivation period of selective iteration.
    pub reactivate: usize,
    pub blur: BlurMode,
}

impl BenchSpec {
    pub fn table1() -> Self {
        use PsfSpec::*;
        Self {
            experiment: Experiment::Table1,
            psfs: vec![
                Line(9),
                Line(17),
                Box(9, 9),
                Box(17, 17),
                Diagonal(9),
                Diagonal(17),
                Disc(9),
                Disc(17),
            ],
            iterations: 100,
            repetitions: 100,
            thresholds: Vec::new(),
            reactivate: 10,
            blur: BlurMode::Cyclic,
        }
    }

    pub fn table2() -> Self {
        Self {
            experiment: Experiment::Table2,
            psfs: vec![PsfSpec::Disc(9)],
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            ..Self::table1()
        }
    }

    pub fn for_experiment(experiment: Experiment) -> Self {
        match experiment {
            Experiment::Table1 => Self::table1(),
            Experiment::Table2 => Self::table2(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(rldeconv_core::Error::InvalidConfig(m.to_owned()).into());
        if self.iterations == 0 || self.repetitions == 0 {
            return bad("iterations and repetitions must be at least 1");
        }
        if self.psfs.is_empty() {
            return bad("no PSFs to benchmark");
        }
        if self.experiment == Experiment::Table2 && self.thresholds.is_empty() {
            return bad("no thinning thresholds given");
        }
        Ok(())
    }
}

/// One configuration. `timing` is `None` for operator/PSF pairs that do not
/// fit together.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub experiment: Experiment,
    pub operator: String,
    pub psf: String,
    pub timing: Option<Timing>,
    pub omitted_pct: Option<f64>,
    pub snr_orig_db: Option<f64>,
    pub snr_ref_db: Option<f64>,
    pub speedup: Option<f64>,
    pub threshold: Option<f64>,
}

impl BenchRow {
    fn new(experiment: Experiment, operator: String, psf: String) -> Self {
        Self {
            experiment,
            operator,
            psf,
            timing: None,
            omitted_pct: None,
            snr_orig_db: None,
            snr_ref_db: None,
            speedup: None,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub warnings: Vec<String>,
}

impl BenchReport {
    /// The row for `operator` on `psf`, if any.
    pub fn row(&self, operator: &str, psf: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.operator == operator && r.psf == psf)
    }
}

fn resolution_warnings() -> Vec<String> {
    let res = timer_resolution();
    if res > Duration::from_millis(1) {
        vec![format!("timer resolution {res:?} is coarser than 1 ms")]
    } else {
        Vec::new()
    }
}

/// Forward and adjoint convolution of one PSF.
pub type OperatorPair = (Box<dyn Convolution>, Box<dyn Convolution>);

/// Deconvolution run returning the estimate and its omitted fraction.
type Run<'a> = Box<dyn Fn() -> Result<(Image, f64)> + 'a>;

/// Forward and adjoint convolution for `kind`, or `None` if `kind` does not
/// accept `psf`.
pub fn operator_pair(
    psf: &Psf,
    kind: OperatorKind,
    width: usize,
    height: usize,
) -> Result<Option<OperatorPair>> {
    if !kind.accepts(psf) {
        return Ok(None);
    }
    Ok(Some(if kind == OperatorKind::FourierReference {
        let fwd = FourierOperator::new(psf, width, height);
        let adj = fwd.adjoint();
        (Box::new(fwd), Box::new(adj))
    } else {
        let fwd = Operator::new(psf, kind)?;
        let adj = fwd.adjoint();
        (Box::new(fwd), Box::new(adj))
    }))
}

/// Runs `configs` closures `repetitions` times each, round-robin, and
/// returns per-configuration timings plus the last result of each.
fn interleaved<T>(repetitions: usize, configs: &[&dyn Fn() -> Result<T>]) -> Result<Vec<(Timing, T)>> {
    let mut samples = vec![Vec::with_capacity(repetitions); configs.len()];
    let mut last: Vec<Option<T>> = configs.iter().map(|_| None).collect();
    for _ in 0..repetitions {
        for (i, run) in configs.iter().enumerate() {
            let (secs, out) = time_run(run);
            samples[i].push(secs);
            last[i] = Some(out?);
        }
    }
    Ok(samples
        .into_iter()
        .zip(last)
        .map(|(s, out)| (Timing::from_samples(s), out.expect("repetitions >= 1")))
        .collect())
}

/// Times standard Richardson-Lucy for every operator on every PSF in
/// `spec.psfs`, after blurring `original` with that PSF.
pub fn run_table1(spec: &BenchSpec, original: &Image) -> Result<BenchReport> {
    spec.validate()?;
    let mut report = BenchReport {
        warnings: resolution_warnings(),
        ..Default::default()
    };
    let cfg = RlConfig::default().with_iterations(spec.iterations);
    let (w, h) = (original.width(), original.height());
    for label in &spec.psfs {
        let psf = label.build()?;
        let f = blur_image(original, &psf, spec.blur)?;
        let mut kinds = Vec::new();
        let mut pairs = Vec::new();
        for kind in OperatorKind::ALL {
            if let Some(pair) = operator_pair(&psf, kind, w, h)? {
                kinds.push(kind);
                pairs.push(pair);
            }
        }
        let runs: Vec<Box<dyn Fn() -> Result<()> + '_>> = pairs
            .iter()
            .map(|(fwd, adj)| {
                let f = &f;
                let cfg = &cfg;
                Box::new(move || {
                    richardson_lucy_from(f, f.clone(), fwd.as_ref(), adj.as_ref(), cfg, &NoClock)?;
                    Ok(())
                }) as Box<dyn Fn() -> Result<()>>
            })
            .collect();
        let refs: Vec<&dyn Fn() -> Result<()>> = runs.iter().map(|r| r.as_ref()).collect();
        let mut timings = interleaved(spec.repetitions, &refs)?.into_iter();
        for kind in OperatorKind::ALL {
            let mut row = BenchRow::new(Experiment::Table1, kind.name().to_owned(), label.to_string());
            if kinds.contains(&kind) {
                row.timing = Some(timings.next().expect("one timing per kind").0);
            }
            report.rows.push(row);
        }
    }
    Ok(report)
}

/// Label of the selective row at `threshold`.
pub fn thinned_label(threshold: f64) -> String {
    format!("naive/thin={threshold}")
}

/// Compares selective Richardson-Lucy at each of `spec.thresholds` with the
/// unthinned naive reference, all on `original` blurred by `spec.psfs[0]`.
pub fn run_table2(spec: &BenchSpec, original: &Image) -> Result<BenchReport> {
    spec.validate()?;
    let mut report = BenchReport {
        warnings: resolution_warnings(),
        ..Default::default()
    };
    let label = &spec.psfs[0];
    let psf = label.build()?;
    let f = blur_image(original, &psf, spec.blur)?;
    let cfg = RlConfig::default().with_iterations(spec.iterations);
    let fwd = Operator::new(&psf, OperatorKind::Naive)?;
    let adj = fwd.adjoint();

    let reference = || -> Result<(Image, f64)> {
        let (u, _) = richardson_lucy_from(&f, f.clone(), &fwd, &adj, &cfg, &NoClock)?;
        Ok((u, 0.0))
    };
    let thinned: Vec<Run<'_>> = spec
        .thresholds
        .iter()
        .map(|&t| {
            let (f, fwd, adj, cfg) = (&f, &fwd, &adj, &cfg);
            Box::new(move || {
                let (u, trace) =
                    richardson_lucy_selective_with(f, fwd, adj, cfg, t, spec.reactivate, &NoClock)?;
                Ok((u, trace.omitted_fraction()))
            }) as Box<dyn Fn() -> Result<(Image, f64)>>
        })
        .collect();
    let mut configs: Vec<&dyn Fn() -> Result<(Image, f64)>> = vec![&reference];
    configs.extend(thinned.iter().map(|b| b.as_ref()));
    let mut results = interleaved(spec.repetitions, &configs)?.into_iter();

    let (ref_timing, (u_ref, _)) = results.next().expect("reference configured");
    let mut row = BenchRow::new(Experiment::Table2, "naive".to_owned(), label.to_string());
    row.snr_orig_db = Some(snr_db(original, &u_ref)?);
    row.speedup = Some(1.0);
    let ref_mean = ref_timing.mean;
    row.timing = Some(ref_timing);
    report.rows.push(row);

    for (&t, (timing, (u, omitted))) in spec.thresholds.iter().zip(results) {
        let mut row = BenchRow::new(Experiment::Table2, thinned_label(t), label.to_string());
        row.threshold = Some(t);
        row.omitted_pct = Some(100.0 * omitted);
        row.snr_orig_db = Some(snr_db(original, &u)?);
        row.snr_ref_db = Some(snr_db(&u_ref, &u)?);
        row.speedup = Some(ref_mean / timing.mean);
        row.timing = Some(timing);
        report.rows.push(row);
    }
    Ok(report)
}

pub fn run(spec: &BenchSpec, original: &Image) -> Result<BenchReport> {
    match spec.experiment {
        Experiment::Table1 => run_table1(spec, original),
        Experiment::Table2 => run_table2(spec, original),
    }
}

pub const CSV_HEADER: &str =
    "experiment,operator,psf,mean_s,stddev_s,omitted_pct,snr_orig_db,snr_ref_db,speedup";

/// CSV rendering: fixed column order, two decimals, empty fields for absent
/// values, LF line endings.
pub fn emit_csv(report: &BenchReport) -> Vec<u8> {
    fn field(out: &mut String, v: Option<f64>) {
        out.push(',');
        if let Some(v) = v {
            write!(out, "{v:.2}").unwrap();
        }
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        write!(out, "{},{},{}", row.experiment, row.operator, row.psf).unwrap();
        field(&mut out, row.timing.as_ref().map(|t| t.mean));
        field(&mut out, row.timing.as_ref().map(|t| t.stddev));
        field(&mut out, row.omitted_pct);
        field(&mut out, row.snr_orig_db);
        field(&mut out, row.snr_ref_db);
        field(&mut out, row.speedup);
        out.push('\n');
    }
    out.into_bytes()
}
