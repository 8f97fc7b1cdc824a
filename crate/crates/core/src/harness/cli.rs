use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use super::config::{Arm, ExperimentConfig, Scenario};
use super::output::{write_outputs, Format};
use super::scenarios::run_scenario;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rcrae", version, about = "Enhanced-sampling amplitude estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Likelihood against layer count.
    ScanL(RunArgs),
    /// Likelihood against Π over a sweep of ansatz angles.
    ScanPi(RunArgs),
    /// SS, RAE and RC-RAE estimator statistics.
    Compare(RunArgs),
    /// Parse and validate a config file without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the version.
    Version,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config `output` entry.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    arm: Option<Arm>,
    /// Write only this format; both are written by default.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Record elapsed time in the manifest, which makes it differ between runs.
    #[arg(long)]
    record_wall_time: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn run(scenario: Scenario, args: RunArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(arm) = args.arm {
        cfg.arm = arm;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.to_string_lossy().into_owned());
    }
    if cfg.scenario != scenario {
        return Err(Error::config(
            "scenario",
            format!("config describes {} but {} was requested", cfg.scenario, scenario),
        ));
    }
    cfg.validate()?;
    let dir = PathBuf::from(cfg.output.clone().unwrap_or_else(|| "out".to_string()));
    let formats = match args.format {
        Some(f) => vec![f],
        None => vec![Format::Csv, Format::Json],
    };

    let start = Instant::now();
    let out = run_scenario(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let files = write_outputs(&dir, &cfg, &out, &formats, args.record_wall_time.then_some(elapsed))?;
    for f in files {
        println!("{}", f.display());
    }
    eprintln!("{} finished in {elapsed:.2} s", scenario);
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
///
/// Returns 0 on success, 2 on usage or config errors and 1 on runtime errors.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::ScanL(a) => run(Scenario::ScanL, a),
        Command::ScanPi(a) => run(Scenario::ScanPi, a),
        Command::Compare(a) => run(Scenario::Compare, a),
        Command::ValidateConfig { config } => ExperimentConfig::from_file(&config).map(|cfg| {
            println!("ok: {} config", cfg.scenario);
        }),
        Command::Version => {
            println!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
