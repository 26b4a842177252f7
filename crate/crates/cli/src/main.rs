use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qudit_net_cli::commands::{self, Common};
use qudit_net_cli::config::{read_toml, Format, Kind, ParamsConfig, RunConfig};
use qudit_net_cli::CliError;

#[derive(Parser)]
#[command(name = "qudit", version, about = "Entanglement and dephasing witnesses for networks of coupled qudits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Flags {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted (required for sweeps).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for the parallel grid evaluation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Recorded in the output metadata; the engines are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Entangling sequence from coherent states.
    Gie(Flags),
    /// Twist, rotate, then evolve under the nonlocal coupling alone.
    Gid(Flags),
    /// Either protocol on a network of three or more ensembles.
    Network(Flags),
    /// Coupling constants from trap geometry and gravitational scenarios.
    Params(Flags),
    /// Compare the fast engines against the brute-force state.
    OracleCheck(Flags),
    /// Repeat a run over a list of N or M values and fit scaling laws.
    Sweep(Flags),
}

fn load_run(flags: &Flags, expect: Option<Kind>) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::load(&flags.config)?;
    if let Some(kind) = expect {
        if cfg.protocol.kind != kind {
            return Err(CliError::Config(format!(
                "{}: protocol.kind is {:?}, which does not match this subcommand",
                flags.config.display(),
                cfg.protocol.kind
            )));
        }
    }
    Ok(cfg)
}

fn execute(command: Command) -> Result<(), CliError> {
    let flags = match &command {
        Command::Gie(f) | Command::Gid(f) | Command::Network(f) | Command::Params(f) | Command::OracleCheck(f) | Command::Sweep(f) => f.clone(),
    };
    if let Some(n) = flags.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::io)?;
    }
    let common = Common { out: flags.out.clone(), format: flags.format, seed: flags.seed };
    match command {
        Command::Gie(_) => commands::run(&load_run(&flags, Some(Kind::Gie))?, &common),
        Command::Gid(_) => commands::run(&load_run(&flags, Some(Kind::Gid))?, &common),
        Command::Network(_) => {
            let cfg = load_run(&flags, None)?;
            if cfg.ensemble.m < 3 {
                return Err(CliError::Config(format!("{}: network runs need ensemble.m >= 3", flags.config.display())));
            }
            commands::run(&cfg, &common)
        }
        Command::Params(_) => commands::params(&read_toml::<ParamsConfig>(&flags.config)?, &common),
        Command::OracleCheck(_) => commands::oracle_check(&load_run(&flags, None)?, &common),
        Command::Sweep(_) => commands::sweep(&load_run(&flags, None)?, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
