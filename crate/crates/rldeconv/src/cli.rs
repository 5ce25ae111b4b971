//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rldeconv_core::rl::{blur_image, richardson_lucy, richardson_lucy_selective, BlurMode};
use rldeconv_core::{snr_db, NoClock, OperatorChoice, Psf, RlConfig};

use crate::bench::{self, BenchSpec, Experiment};
use crate::error::{io_err, Result};
use crate::pgm::{read_pgm_file, write_pgm_file};
use crate::psfspec::PsfSpec;
use crate::timing::time_run;

#[derive(Debug, Parser)]
#[command(
    name = "rldeconv",
    version,
    about = "Richardson-Lucy deconvolution with PSF-specialised convolution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Cyclic,
    Replicate,
}

impl From<Mode> for BlurMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Cyclic => BlurMode::Cyclic,
            Mode::Replicate => BlurMode::Replicate,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Blur an image with a PSF.
    Blur {
        #[arg(long = "in")]
        input: PathBuf,
        /// line:<M>, box:<MX>x<MY>, disc:<D>, diag:<M> or file:<path>
        #[arg(long)]
        psf: PsfSpec,
        #[arg(long, value_enum, default_value = "cyclic")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deconvolve an image with Richardson-Lucy.
    Deconv {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        psf: PsfSpec,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// auto, naive, list, generic-box, box2d-sliding, box2d-cumul,
        /// box1d-sliding or box1d-cumul
        #[arg(long, default_value = "auto")]
        op: OperatorChoice,
        /// Enable selective iteration with this change threshold.
        #[arg(long)]
        thin: Option<f64>,
        /// Reactivate every pixel after this many selective iterations.
        #[arg(long, default_value_t = 10, requires = "thin")]
        reactivate: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Signal-to-noise ratio of a test image against a reference, in dB.
    Snr {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Write a PSF as a sparse tap list.
    PsfGen {
        #[arg(long)]
        psf: PsfSpec,
        /// Standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark experiment and write CSV.
    Bench {
        #[arg(long)]
        experiment: Experiment,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// Standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_text(out: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(io_err(path)),
        None => std::io::stdout().write_all(bytes).map_err(io_err("<stdout>")),
    }
}

/// Executes `cmd` and returns the one-line summary for standard output.
pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Blur {
            input,
            psf,
            mode,
            out,
        } => {
            let g = read_pgm_file(input)?;
            let h = psf.build()?;
            let f = blur_image(&g, &h, (*mode).into())?;
            write_pgm_file(out, &f)?;
            Ok(format!(
                "blurred {}x{} with {psf} ({mode:?}) -> {}",
                g.width(),
                g.height(),
                out.display()
            ))
        }
        Command::Deconv {
            input,
            psf,
            iters,
            op,
            thin,
            reactivate,
            out,
        } => {
            let f = read_pgm_file(input)?;
            let h = psf.build()?;
            let cfg = RlConfig::default().with_iterations(*iters).with_operator(*op);
            let kind = rldeconv_core::convops::dispatch(&h, *op)?;
            let (secs, result) = time_run(|| match thin {
                Some(t) => richardson_lucy_selective(&f, &h, &cfg, *t, *reactivate, &NoClock),
                None => richardson_lucy(&f, &h, &cfg, &NoClock),
            });
            let (u, trace) = result?;
            write_pgm_file(out, &u)?;
            let mut line = format!("{iters} iterations, operator {kind}, {secs:.3} s");
            if thin.is_some() {
                line += &format!(", {:.2}% omitted", 100.0 * trace.omitted_fraction());
            }
            Ok(line)
        }
        Command::Snr { reference, test } => {
            let db = snr_db(&read_pgm_file(reference)?, &read_pgm_file(test)?)?;
            Ok(format!("{db:.2}"))
        }
        Command::PsfGen { psf, out } => {
            let h: Psf = psf.build()?;
            let sparse = h.to_sparse();
            let text = sparse.to_text();
            write_text(out.as_ref(), text.as_bytes())?;
            Ok(format!("{psf}: {} taps", sparse.support()))
        }
        Command::Bench {
            experiment,
            input,
            reps,
            iters,
            out,
        } => {
            let g = read_pgm_file(input)?;
            let mut spec = BenchSpec::for_experiment(*experiment);
            spec.repetitions = *reps;
            spec.iterations = *iters;
            let report = bench::run(&spec, &g)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_text(out.as_ref(), &bench::emit_csv(&report))?;
            Ok(format!("{experiment}: {} rows", report.rows.len()))
        }
    }
}

/// Parses `args` (program name first), runs the command and reports.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            // Keep standard output clean when it carries the payload.
            match &cli.command {
                Command::PsfGen { out: None, .. } | Command::Bench { out: None, .. } => {
                    eprintln!("{summary}")
                }
                _ => println!("{summary}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rldeconv: {e}");
            ExitCode::FAILURE
        }
    }
}
