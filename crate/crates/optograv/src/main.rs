use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use optograv::commands::{self, CommandError};
use optograv::config::{self, ConfigError, Format, RunConfig};
use optograv::output::Table;

const EXIT_BREACH: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "optograv", version, about = "Gravimetry with a nonreciprocal optomechanical cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["csv", "jsonl"])]
    format: Option<String>,
    /// Worker threads; defaults to the number of processors.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Fock truncation, `A,B` or `A,B,C`.
    #[arg(long, global = true)]
    dims: Option<String>,
    #[arg(long, global = true)]
    regime: Option<String>,
    /// Extra `key=value` assignments, applied after the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Add master-equation columns.
    #[arg(long, global = true)]
    oracle: bool,
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Mean-field amplitudes, stability and covariances.
    Steady,
    /// Homodyne uncertainty of g.
    Uncertainty,
    /// Weak-drive precision-ratio grid.
    Fig2,
    /// Weak-drive quantum Fisher information.
    Qfi,
    /// Master-equation cross-checks; exits 1 on any breach.
    Validate,
}

fn load(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for s in &cli.set {
        cfg.apply_override(s)?;
    }
    if let Some(path) = &cli.out {
        cfg.out = Some(path.clone());
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    if let Some(d) = &cli.dims {
        cfg.dims = config::parse_dims(d)?;
    }
    if let Some(r) = &cli.regime {
        cfg.set("regime", r)?;
    }
    if cli.oracle {
        cfg.oracle = true;
    }
    if let Some(p) = &cli.preset {
        cfg.preset = Some(p.clone());
    }
    cfg.resolve_regime()?;
    Ok(cfg)
}

fn emit(table: &Table, format: Format, out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(format, &mut w)?;
            w.flush()
        }
        None => table.write(format, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OPTOGRAV_LOG", "warn")).init();
    let cli = Cli::parse();

    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("{e}");
        }
    }

    let result = match cli.command {
        Command::Steady => commands::steady(&cfg).map(|t| (t, false)),
        Command::Uncertainty => commands::uncertainty(&cfg).map(|t| (t, false)),
        Command::Fig2 => commands::fig2(&cfg).map(|t| (t, false)),
        Command::Qfi => commands::qfi(&cfg).map(|t| (t, false)),
        Command::Validate => commands::validate(&cfg),
    };
    let (table, breach) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                CommandError::Config(_) => EXIT_CONFIG,
                _ => EXIT_SOLVER,
            };
            return ExitCode::from(code);
        }
    };
    if let Err(e) = emit(&table, cfg.format, cfg.out.as_ref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if breach {
        ExitCode::from(EXIT_BREACH)
    } else {
        ExitCode::SUCCESS
    }
}
