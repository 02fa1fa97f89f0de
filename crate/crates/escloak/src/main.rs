use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use escloak::config::load_config;
use escloak::{commands, CliError, Format, OmegaRange, Options, Output};
use log::info;

#[derive(Parser, Debug)]
#[command(name = "escloak", version, about = "Elastic scattering coefficients of layered spherical cavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (.toml or .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Base seed for multistart runs; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, conflicts_with = "omega_range", allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, global = true, num_args = 3, value_names = ["LO", "HI", "N"], allow_negative_numbers = true)]
    omega_range: Option<Vec<String>>,
    /// Logarithmic spacing for --omega-range.
    #[arg(long, global = true)]
    log: bool,
    /// Truncation order T.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    /// Blow-up parameter for transform-field.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true, default_value_t = 18)]
    n_theta: usize,
    #[arg(long, global = true, default_value_t = 36)]
    n_phi: usize,
    #[arg(long, global = true, default_value_t = 40)]
    n_r: usize,
    #[arg(long, global = true, default_value_t = 2.5)]
    r_max: f64,
    /// Sweep only: also write every ESC table as CSV here.
    #[arg(long, global = true)]
    tables: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// ESC table of one stack at one or more frequencies.
    Compute,
    /// Scattering strength against the bare cavity over a frequency grid.
    Sweep,
    /// Multistart layer design.
    Optimize,
    /// Far-field amplitudes of a plane wave on a (theta, phi) grid.
    Farfield,
    /// Push-forward of the shrunk stack under the blow-up map.
    TransformField,
    /// Oracle, residual, symmetry, scaling and Parseval checks.
    Verify,
}

fn omega_range(raw: &[String], log: bool) -> Result<OmegaRange, CliError> {
    let bad = |what: &str| CliError::config("--omega-range", format!("{what} is not a valid number"));
    let lo: f64 = raw[0].parse().map_err(|_| bad("LO"))?;
    let hi: f64 = raw[1].parse().map_err(|_| bad("HI"))?;
    let count: usize = raw[2].parse().map_err(|_| bad("N"))?;
    Ok(OmegaRange { lo, hi, count, log })
}

fn options(cli: &Cli) -> Result<Options, CliError> {
    let config = cli.config.as_deref().map(load_config).transpose()?;
    Ok(Options {
        config,
        format: cli.format,
        seed: cli.seed,
        omega: cli.omega,
        omega_range: cli.omega_range.as_deref().map(|r| omega_range(r, cli.log)).transpose()?,
        order: cli.order,
        eps: cli.eps,
        n_theta: cli.n_theta,
        n_phi: cli.n_phi,
        n_r: cli.n_r,
        r_max: cli.r_max,
        tables: cli.tables.clone(),
    })
}

fn write_to(path: Option<&PathBuf>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let opts = options(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::config("--jobs", "must be at least 1").into());
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().context("building worker pool")?;
    let (out, failed): (Output, usize) = pool.install(|| -> Result<_, CliError> {
        Ok(match cli.command {
            Command::Compute => (commands::compute(&opts)?, 0),
            Command::Sweep => (commands::sweep(&opts)?, 0),
            Command::Optimize => (commands::optimize(&opts)?, 0),
            Command::Farfield => (commands::farfield(&opts)?, 0),
            Command::TransformField => (commands::transform_field(&opts)?, 0),
            Command::Verify => commands::verify(&opts)?,
        })
    })?;
    write_to(cli.out.as_ref(), &out.body)?;
    for (path, body) in &out.side_files {
        write_to(Some(path), body)?;
    }
    if let Some(p) = &cli.out {
        info!("wrote {}", p.display());
    }
    if failed > 0 {
        return Err(CliError::Verify(failed).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut logger = env_logger::Builder::from_env(env_logger::Env::new().filter_or("ESCLOAK_LOG", "warn"));
    if cli.quiet {
        logger.filter_level(log::LevelFilter::Error);
    }
    logger.init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map(CliError::exit_code).unwrap_or(1);
            ExitCode::from(code)
        }
    }
}
