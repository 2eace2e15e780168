//! `mechgen`: generate, solve, evaluate and search tap mechanics for the tile game.
//!
//! Exit status is 0 on success, 1 when an input is rejected (bad arguments,
//! unreadable or malformed files, ill-typed mechanics), and 2 on internal errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mechgen_core::evaluate::{evaluate_candidate, parse_challenge, search_mechanics, solve, Challenge, EvalStatus};
use mechgen_core::game::{build_game_registry, hook_table, on_tile_tapped_signature, ON_TILE_TAPPED};
use mechgen_core::lang::{parse_mechanic, render_mechanic, Mechanic};
use mechgen_core::synthesis::{GenerationConfig, Generator};
use mechgen_core::Registry;

/// Board size used for the design space when no challenge is involved.
const DEFAULT_BOARD: (usize, usize) = (3, 3);
/// Candidates evaluated by `search`.
const SEARCH_BUDGET: usize = 1_000;

#[derive(Debug, Parser)]
#[command(name = "mechgen", version, about = "Generate and test tap mechanics for a tile puzzle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write `mech_<seed>.mg` files for consecutive seeds.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        signature: String,
        #[arg(long)]
        count: usize,
        #[arg(long = "out")]
        out_dir: PathBuf,
    },
    /// Solve a challenge with the baseline tap behavior.
    Solve {
        #[arg(long)]
        challenge: PathBuf,
    },
    /// Solve a challenge with a mechanic bound to the tap hook.
    Evaluate {
        #[arg(long)]
        mechanic: PathBuf,
        #[arg(long)]
        challenge: PathBuf,
    },
    /// Sample mechanics and write a report of the ones that solve a challenge.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        challenge: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print the design space.
    Registry,
}

#[derive(Debug)]
enum CliError {
    Rejected(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Rejected(_) => ExitCode::from(1),
            CliError::Internal(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Rejected(m) | CliError::Internal(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Rejected(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<GenerationConfig, CliError> {
    GenerationConfig::parse(&read(path)?).map_err(|e| CliError::Rejected(format!("{}: {e}", path.display())))
}

fn load_challenge(path: &Path) -> Result<Challenge, CliError> {
    parse_challenge(&read(path)?).map_err(|e| CliError::Rejected(format!("{}: {e}", path.display())))
}

fn load_mechanic(path: &Path) -> Result<Mechanic, CliError> {
    parse_mechanic(&read(path)?).map_err(|e| CliError::Rejected(format!("{}: {e}", path.display())))
}

fn registry_for(challenge: &Challenge) -> Registry {
    build_game_registry(challenge.initial.width(), challenge.initial.height())
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Generate {
            config,
            signature,
            count,
            out_dir,
        } => {
            if count < 1 {
                return Err(CliError::Rejected("--count must be at least 1".into()));
            }
            if !out_dir.is_dir() {
                return Err(CliError::Rejected(format!("{}: not a directory", out_dir.display())));
            }
            let config = load_config(&config)?;
            if signature != ON_TILE_TAPPED {
                return Err(CliError::Rejected(format!(
                    "unknown signature `{signature}` (available: {ON_TILE_TAPPED})"
                )));
            }
            let sig = on_tile_tapped_signature();
            let registry = build_game_registry(DEFAULT_BOARD.0, DEFAULT_BOARD.1);
            let mut out = String::new();
            for i in 0..count as u64 {
                let seed = config.seed.wrapping_add(i);
                let seeded = GenerationConfig { seed, ..config.clone() };
                let body = Generator::new(&registry, &seeded)
                    .and_then(|mut g| g.generate_block(&sig))
                    .map_err(|e| CliError::Rejected(format!("seed {seed}: {e}")))?;
                let path = out_dir.join(format!("mech_{seed}.mg"));
                let text = render_mechanic(&Mechanic {
                    signature: sig.clone(),
                    body,
                });
                fs::write(&path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
                out.push_str(&format!("wrote {}\n", path.display()));
            }
            Ok(out)
        }
        Command::Solve { challenge } => {
            let challenge = load_challenge(&challenge)?;
            let result = solve(&challenge, &hook_table(), &registry_for(&challenge));
            Ok(format!("{result}\n"))
        }
        Command::Evaluate { mechanic, challenge } => {
            let mechanic = load_mechanic(&mechanic)?;
            let challenge = load_challenge(&challenge)?;
            let result = evaluate_candidate(&mechanic.body, &mechanic.signature, &registry_for(&challenge), &challenge);
            if let EvalStatus::Rejected(_) = result.status {
                return Err(CliError::Rejected(result.to_string()));
            }
            Ok(format!("{result}\n"))
        }
        Command::Search {
            config,
            challenge,
            report,
        } => {
            let config = load_config(&config)?;
            let label = challenge.display().to_string();
            let challenge = load_challenge(&challenge)?;
            let result = search_mechanics(
                &on_tile_tapped_signature(),
                &registry_for(&challenge),
                &challenge,
                &config,
                SEARCH_BUDGET,
            )
            .map_err(|e| CliError::Internal(e.to_string()))?;
            fs::write(&report, result.render(&label))
                .map_err(|e| CliError::Internal(format!("{}: {e}", report.display())))?;
            Ok(format!(
                "budget={} solved={} distinct={}\n",
                result.budget,
                result.solved(),
                result.distinct.len()
            ))
        }
        Command::Registry => Ok(build_game_registry(DEFAULT_BOARD.0, DEFAULT_BOARD.1).dump()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
