//! `fairshare`: shares, allocation algorithms, bidding games and the
//! verification suites over instance files.
//!
//! Exit status is 0 when every check holds, 2 when a checked claim fails on
//! some input (the report is still printed), and 1 for usage or I/O errors.

mod commands;
mod verify;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fairshare::bidding::{GameMode, TieRule};
use fairshare::exante::{ShareKind, VectorClass};
use fairshare::model::ValuationClass;
use fairshare::{Instance, Rat};

#[derive(Parser, Debug)]
#[command(
    name = "fairshare",
    version,
    about = "Share computations and allocation experiments"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "FAIRSHARE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// MMS, APS and MES of one agent (all agents without --agent).
    Shares {
        /// Instance file; standard input when omitted or `-`.
        file: Option<PathBuf>,
        #[arg(long)]
        agent: Option<usize>,
    },
    /// Run an allocation algorithm and report every agent's guarantee.
    Allocate {
        file: Option<PathBuf>,
        #[arg(long, value_parser = ["apsxos", "one-sixth", "four-seventeenths", "welfare-max"])]
        algo: String,
        /// Replacement step budget for one-sixth.
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Play the bidding game and print the transcript as JSON lines.
    Bid {
        file: Option<PathBuf>,
        /// Comma-separated strategies, one per agent (e.g. `one-shot,greedy:2,random`).
        #[arg(long, value_delimiter = ',', required = true)]
        strategies: Vec<String>,
        #[arg(long, default_value = "extended")]
        mode: GameMode,
        #[arg(long, default_value = "lowest-index")]
        tie: TieRule,
    },
    /// Check claims in batch and report every failure.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Write an instance file to standard output.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Best ratio of expected value to share over all lotteries.
    Exante {
        file: Option<PathBuf>,
        #[arg(long, default_value = "mes")]
        share: ShareKind,
        /// Also round the configuration LP this many times.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value = "xos")]
        class: VectorClass,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Recurrence, path formula and bounds on random y-sequences.
    Appendix {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Ladder properties and the payment bound for every agent.
    Ladder {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Ladder length (default: chosen from m and the entitlement).
        #[arg(long)]
        k: Option<usize>,
    },
    /// MES ≥ APS ≥ MMS and the class-dependent APS/MMS caps.
    Relations {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Agent 0's value against the adversarial bidders.
    Negative(NegativeArgs),
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// Agents over the vectors of {1..n}^n.
    Vector {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "xos")]
        class: VectorClass,
    },
    /// n agents sharing the two-triangle valuation.
    Triangles {
        #[arg(long)]
        n: usize,
    },
    /// The adversarial instance (agent 0 first).
    Negative(NegativeArgs),
    /// Random agents of one valuation class.
    Random {
        #[arg(long)]
        class: ValuationClass,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Largest item or bundle value.
        #[arg(long, default_value_t = 10)]
        max: i64,
        #[arg(long, default_value = "equal", value_parser = ["equal", "random", "partial"])]
        entitlements: String,
    },
}

#[derive(Args, Debug, Clone)]
struct NegativeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: usize,
    #[arg(long, default_value = "1/2")]
    eps: Rat,
    /// Random-bidder seeds in the strategy battery.
    #[arg(long, default_value_t = 50)]
    samples: u64,
}

/// A checked claim failed; the report has already been printed.
#[derive(Debug)]
struct Falsified(String);

impl std::fmt::Display for Falsified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Falsified {}

fn read_instance(file: Option<&Path>) -> anyhow::Result<Instance> {
    let text = match file {
        None => read_stdin()?,
        Some(p) if p == Path::new("-") => read_stdin()?,
        Some(p) => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
    };
    // a partial total is legal input; algorithms that need 1 check it
    let inst = Instance::from_json_partial(&text).with_context(|| {
        format!(
            "parsing {}",
            file.map_or("stdin".into(), |p| p.display().to_string())
        )
    })?;
    Ok(inst)
}

fn read_stdin() -> anyhow::Result<String> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .context("reading stdin")?;
    Ok(s)
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    print_text(&text)
}

/// Writes to stdout; a reader that went away (`| head`) is not an error.
fn print_text(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing output"),
        _ => Ok(()),
    }
}

fn is_falsification(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<Falsified>()
            || c.downcast_ref::<fairshare::Error>()
                .is_some_and(fairshare::Error::is_falsification)
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("starting worker threads")?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Shares { file, agent } => {
            let inst = read_instance(file.as_deref())?;
            commands::shares(&inst, agent)
        }
        Command::Allocate {
            file,
            algo,
            max_steps,
        } => {
            let inst = read_instance(file.as_deref())?;
            commands::allocate(&inst, &algo, max_steps)
        }
        Command::Bid {
            file,
            strategies,
            mode,
            tie,
        } => {
            let inst = read_instance(file.as_deref())?;
            commands::bid(&inst, &strategies, mode, tie, seed)
        }
        Command::Exante {
            file,
            share,
            trials,
            class,
        } => {
            let inst = read_instance(file.as_deref())?;
            commands::exante(&inst, share, trials, class, seed)
        }
        Command::Generate(g) => commands::generate(g, seed),
        Command::Verify(v) => match v {
            VerifyCommand::Appendix { k, samples } => verify::appendix(k, samples, seed),
            VerifyCommand::Ladder { files, k } => verify::ladder(&files, k),
            VerifyCommand::Relations { files } => verify::relations(&files),
            VerifyCommand::Negative(args) => verify::negative(&args),
        },
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_falsification(&e) => {
            // verification commands print their own report first
            if !e.chain().any(|c| c.is::<Falsified>()) {
                let report = serde_json::json!({ "falsification": format!("{e:#}") });
                let _ = print_text(&format!("{report:#}\n"));
            }
            eprintln!("falsified: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn failed_claims_map_to_falsification() {
        let budget =
            anyhow::Error::from(fairshare::Error::StepBudgetExhausted(3)).context("allocating");
        assert!(is_falsification(&budget));
        assert!(is_falsification(
            &Falsified("2 ladder violations".into()).into()
        ));
        let bad_input = anyhow::Error::from(fairshare::Error::TooLarge("m = 70".into()));
        assert!(!is_falsification(&bad_input));
        assert!(!is_falsification(&anyhow::anyhow!("reading x.json")));
    }

    #[test]
    fn arguments_parse() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from([
            "fairshare",
            "bid",
            "x.json",
            "--strategies",
            "one-shot,greedy:2",
        ])
        .unwrap();
        match cli.command {
            Command::Bid {
                strategies, mode, ..
            } => {
                assert_eq!(strategies, ["one-shot", "greedy:2"]);
                assert_eq!(mode, GameMode::Extended);
            }
            other => panic!("parsed as {other:?}"),
        }
        assert!(Cli::try_parse_from(["fairshare", "allocate", "--algo", "best"]).is_err());
    }
}
