use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use d2d_core::experiments::{
    capacity_rows, fairness_rows, revenue_rows, simulate, to_csv, CAPACITY_SCHEMA,
    FAIRNESS_SCHEMA, REVENUE_SCHEMA,
};
use d2d_core::ledger::{decode_any, decode_binary, encode_binary, encode_text, CHAIN_MAGIC};
use d2d_core::sdr::dump::{read_instance, write_instance, write_solution, SolutionDump, SOLUTION_SCHEMA};
use d2d_core::sdr::{self, brute_force_oracle, live_instance, synthetic_instance};
use d2d_core::{verify_chain, Error, ExperimentConfig};

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "d2dsim", version, about = "SCMA D2D reuse allocation and ledger simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Revenue versus D-UE count per tip mode, and versus edge radius.
    Revenue(Common),
    /// Admission and throughput under SCMA and OMA, and over active D-UEs.
    Capacity(Common),
    /// Share of D-UEs served per tip mode.
    Fairness(Common),
    /// One traced horizon: trace CSV plus the packaged chain.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chain_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ChainFormat::Binary)]
        chain_format: ChainFormat,
    },
    /// Write a knapsack instance dump.
    Instance {
        #[command(flatten)]
        common: Common,
        /// Number of items.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Uniform random data instead of a cell scenario.
        #[arg(long)]
        synthetic: bool,
    },
    /// Solve an instance dump and write the solution dump.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also run exhaustive search and report its value.
        #[arg(long)]
        oracle: bool,
    },
    /// Check a chain file; `--out` re-encodes it in the same format.
    LedgerVerify {
        chain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainFormat {
    Binary,
    Text,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::Core(e) if e.is_convergence() => EXIT_CONVERGENCE,
            Failure::Core(Error::Config(_)) => EXIT_CONFIG,
            Failure::Core(_) => EXIT_OTHER,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Verify(msg) => f.write_str(msg),
        }
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Revenue(c) => {
            let cfg = load_config(&c)?;
            let csv = to_csv(REVENUE_SCHEMA, &revenue_rows(&cfg)?)?;
            emit(c.out.as_deref(), csv.as_bytes())
        }
        Command::Capacity(c) => {
            let cfg = load_config(&c)?;
            let csv = to_csv(CAPACITY_SCHEMA, &capacity_rows(&cfg)?)?;
            emit(c.out.as_deref(), csv.as_bytes())
        }
        Command::Fairness(c) => {
            let cfg = load_config(&c)?;
            let csv = to_csv(FAIRNESS_SCHEMA, &fairness_rows(&cfg)?)?;
            emit(c.out.as_deref(), csv.as_bytes())
        }
        Command::Simulate {
            common,
            chain_out,
            chain_format,
        } => {
            let cfg = load_config(&common)?;
            let (csv, chain) = simulate(&cfg)?;
            if let Some(path) = chain_out {
                let bytes = match chain_format {
                    ChainFormat::Binary => chain,
                    ChainFormat::Text => encode_text(&decode_binary(&chain)?)?.into_bytes(),
                };
                fs::write(path, bytes)?;
            }
            emit(common.out.as_deref(), csv.as_bytes())
        }
        Command::Instance {
            common,
            n,
            synthetic,
        } => {
            let cfg = load_config(&common)?;
            let inst = if synthetic {
                synthetic_instance(cfg.seed, n)
            } else {
                live_instance(cfg.seed, n, &cfg.scenario)?.ok_or_else(|| {
                    Error::Domain(format!("no scenario with {n} reusable pairs for seed {}", cfg.seed))
                })?
            };
            emit(common.out.as_deref(), write_instance(&inst)?.as_bytes())
        }
        Command::Solve {
            instance,
            common,
            oracle,
        } => {
            let cfg = load_config(&common)?;
            let inst = read_instance(&fs::read_to_string(&instance)?)?;
            let (solution, sdp) = sdr::solve(&inst, &cfg.solver.sdp, &cfg.solver.rounding, cfg.seed)?;
            let oracle = if oracle {
                let o = brute_force_oracle(&inst)?;
                eprintln!(
                    "sdr {:.9} oracle {:.9} bound {:.9}",
                    solution.selected_objective, o.value, solution.objective_bound
                );
                Some(o)
            } else {
                None
            };
            let dump = SolutionDump {
                schema: SOLUTION_SCHEMA.into(),
                seed: cfg.seed,
                sdp: cfg.solver.sdp,
                rounding: cfg.solver.rounding,
                iterations: sdp.map_or(0, |s| s.iterations),
                solution,
                oracle,
            };
            emit(common.out.as_deref(), write_solution(&dump)?.as_bytes())
        }
        Command::LedgerVerify { chain, out } => {
            let bytes = fs::read(&chain)?;
            let blocks = decode_any(&bytes)
                .map_err(|e| Failure::Verify(format!("{}: unreadable chain: {e}", chain.display())))?;
            let report = verify_chain(&blocks);
            if let Some(i) = report.first_bad_index {
                return Err(Failure::Verify(format!(
                    "{}: invalid chain, first bad block at index {i} of {}",
                    chain.display(),
                    report.blocks
                )));
            }
            println!("{}: valid chain, {} blocks", chain.display(), report.blocks);
            if let Some(path) = out {
                let again = if bytes.starts_with(CHAIN_MAGIC) {
                    encode_binary(&blocks)
                } else {
                    encode_text(&blocks)?.into_bytes()
                };
                fs::write(path, again)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("d2dsim: {e}");
            ExitCode::from(e.code())
        }
    }
}
