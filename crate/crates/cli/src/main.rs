use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fringe_scatter::Error;
use fringe_scatter_cli::commands::{self, Observable, SweepParam, SweepSpec};
use fringe_scatter_cli::config::{self, RunConfig, UnitMode};
use fringe_scatter_cli::oracle_check;
use fringe_scatter_cli::output::emit;

const EXIT_ORACLE_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

/// Angle- and frequency-resolved light scattering by an atom in a double-well superposition.
#[derive(Debug, Parser)]
#[command(name = "fringe-scatter", version)]
struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true, env = "FRINGE_SCATTER_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output CSV path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Read the config as SI quantities.
    #[arg(long, conflicts_with = "dimensionless")]
    si: bool,

    /// Read the config as dimensionless trap units.
    #[arg(long)]
    dimensionless: bool,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, Error> {
        let forced = match (self.si, self.dimensionless) {
            (true, _) => Some(UnitMode::Si),
            (_, true) => Some(UnitMode::Dimensionless),
            _ => None,
        };
        let cfg = config::load(&self.config, forced)?;
        commands::log_parameters(&cfg);
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rayleigh spectrum over the (Φ, ω) grid.
    RayleighSpectrum(RunArgs),
    /// Raman angular pattern with a fitted fringe summary.
    RamanPattern(RunArgs),
    /// Scalar observables while one parameter is varied.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary: separation, phi, theta or eta.
        #[arg(long)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of sweep points.
        #[arg(long)]
        steps: usize,
        /// Include the end point (default: half-open range).
        #[arg(long)]
        inclusive: bool,
        /// Comma-separated observables.
        #[arg(long, value_delimiter = ',', default_value = "broadband_visibility")]
        observables: Vec<Observable>,
    },
    /// Compare every closed form against its quadrature oracle on random tuples.
    OracleCheck {
        /// Number of random parameter tuples.
        #[arg(long, default_value_t = oracle_check::DEFAULT_COUNT)]
        count: usize,
        /// Seed of the tuple generator.
        #[arg(long, default_value_t = oracle_check::DEFAULT_SEED)]
        seed: u64,
        /// Also write the report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Perturb one closed form so that the check must fail.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_DOMAIN })
}

fn run_to_file(args: &RunArgs, body: impl FnOnce(&RunConfig) -> Result<String, Error>) -> ExitCode {
    match args.load().and_then(|cfg| body(&cfg)).and_then(|text| emit(&text, args.out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match cli.command {
        Command::RayleighSpectrum(args) => run_to_file(&args, commands::rayleigh),
        Command::RamanPattern(args) => run_to_file(&args, commands::raman),
        Command::Sweep { run, param, from, to, steps, inclusive, observables } => {
            let spec = SweepSpec { param, from, to, steps, inclusive, observables };
            run_to_file(&run, |cfg| commands::sweep(cfg, &spec))
        }
        Command::OracleCheck { count, seed, out, inject_fault } => {
            let report = match oracle_check::run(count, seed, inject_fault) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            print!("{}", report.text);
            if let Some(path) = out {
                if let Err(e) = emit(&report.text, Some(&path)) {
                    return fail(&e);
                }
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ORACLE_FAILURE)
            }
        }
    }
}
