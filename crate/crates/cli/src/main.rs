//! `pansu`: batch verification campaigns with JSON reports.

mod campaigns;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pansu_core::{Error, QuadratureSpec};

use campaigns::{AngleSource, CliError};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_NUMERICS: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pansu", version, about = "Verification campaigns for Pansu spheres in the sub-Riemannian 3-sphere")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed of the ChaCha8 generator used by sampling campaigns.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the campaign's CSV table here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Quadrature tolerance on successive refinements.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Panels per axis at the coarsest quadrature level.
    #[arg(long = "quad-panels", global = true)]
    quad_panels: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Areas, volumes and poles of Pansu spheres over a lambda grid.
    Sphere {
        /// `start:stop:step`, a comma list, or one value.
        #[arg(long, default_value = "0:5:0.25")]
        grid: String,
    },
    /// Divergence of the calibration fields at random points of the tube.
    Calibrate {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0])]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
    },
    /// Area of the ruled competitor of an angle function.
    Plateau {
        /// identity, constant-slope:C, sinusoidal:A or random:A.
        #[arg(long, conflicts_with = "knots")]
        preset: Option<String>,
        /// Samples of sigma' at equally spaced knots.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        knots: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        winding: Option<i64>,
        /// Run the projected gradient minimizer from this angle function.
        #[arg(long)]
        optimize: bool,
    },
    /// Isoperimetric comparison of trial sets in vertical solid tubes.
    Isoperim {
        /// Trial sets such as pansu-ball:1, tube:1:0.3, lens:2:0.2.
        #[arg(long, value_delimiter = ',', default_values_t = [String::from("pansu-ball:1")])]
        preset: Vec<String>,
    },
    /// Every campaign at default settings.
    All,
}

fn run(cli: &Cli) -> Result<report::Report, CliError> {
    let c = &cli.common;
    let mut q = QuadratureSpec::default();
    if let Some(t) = c.tol {
        q = q.with_tol(t);
    }
    if let Some(p) = c.quad_panels {
        q = q.with_panels(p);
    }
    let csv = c.csv.as_deref();
    match &cli.command {
        Command::Sphere { grid } => campaigns::cmd_sphere(&campaigns::parse_grid(grid)?, &q, csv),
        Command::Calibrate { lambda, samples, h } => campaigns::cmd_calibrate(lambda, *samples, *h, c.seed),
        Command::Plateau {
            preset,
            knots,
            winding,
            optimize,
        } => {
            let source = match (preset, knots) {
                (_, Some(k)) => AngleSource::Knots(k.clone()),
                (Some(p), None) => AngleSource::Preset(p.clone()),
                (None, None) => AngleSource::Preset("identity".into()),
            };
            campaigns::cmd_plateau(&source, *winding, *optimize, c.seed, &q, csv)
        }
        Command::Isoperim { preset } => campaigns::cmd_isoperim(&campaigns::parse_presets(preset)?, &q, csv),
        Command::All => campaigns::cmd_all(c.seed, &q),
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        CliError::Core(Error::HypothesisViolation(_)) => EXIT_HYPOTHESIS,
        CliError::Core(
            Error::NoConvergence { .. } | Error::SingularPoint { .. } | Error::DegenerateParametrization { .. },
        ) => EXIT_NUMERICS,
        CliError::Core(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("pansu: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let json = report.to_json();
    match &cli.common.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                eprintln!("pansu: cannot write {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{json}"),
    }
    eprintln!(
        "pansu: {} {} in {:.2} s",
        report.campaign,
        if report.pass { "passed" } else { "FAILED" },
        start.elapsed().as_secs_f64()
    );
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
