use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use optiwind::commands::{self, Output};
use optiwind::CliError;
use optiwind_core::DEFAULT_TOL;

/// Online vehicle routing with time windows and release delays.
#[derive(Parser, Debug)]
#[command(name = "optiwind", version)]
struct Cli {
    /// Equality tolerance for times, distances and weight ties.
    #[arg(long, global = true, env = "OPTIWIND_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Print JSON instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Write the command's artifact here (trace, instance, table JSON).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run a policy on an instance file.
    Simulate {
        instance: PathBuf,
        #[arg(long, default_value = "gr0")]
        policy: String,
        /// Request budget the policy is tuned for (default: instance size).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Also solve the instance offline and report the ratio.
        #[arg(long)]
        offline: bool,
    },
    /// Play a policy against a registered adversary.
    Duel {
        #[arg(long)]
        adversary: String,
        /// A registered policy, or `best` for the best keep/switch script.
        #[arg(long, default_value = "gr0")]
        policy: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "T", default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Offline optimum of an instance file.
    Offline {
        instance: PathBuf,
        /// Use exhaustive search instead of the subset DP.
        #[arg(long)]
        brute: bool,
    },
    /// The α sequence value for n requests.
    Alpha {
        #[arg(long)]
        n: usize,
        /// Also print the realizing weight vector.
        #[arg(long)]
        vector: bool,
    },
    /// Weighted performance λ(n, δ0); β_n when δ0 = 0.
    Beta {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        delta0: f64,
        /// raw, closed or simplified.
        #[arg(long, default_value = "closed")]
        mode: String,
    },
    /// Four-request decision tree value for a delay regime.
    Minimax {
        #[arg(long)]
        regime: String,
        /// perf or cr.
        #[arg(long, default_value = "perf")]
        mode: String,
    },
    /// T0, T1 and ε for n, and i0 for a delay.
    Thresholds {
        #[arg(long)]
        n: usize,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Rebuild a result table and compare it with the stored values.
    Tables {
        /// summary, n3, n4, alpha or all.
        #[arg(default_value = "all")]
        id: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write a seeded random corpus of segment instances.
    Generate {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long = "T", default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.tol >= 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be a non-negative number, got {}", cli.tol)));
    }
    let tol = cli.tol;
    match &cli.cmd {
        Cmd::Simulate { instance, policy, n, eps, offline } => commands::simulate(instance, policy, *n, *eps, *offline, tol),
        Cmd::Duel { adversary, policy, n, t, eps } => commands::duel_cmd(adversary, policy, *n, *t, *eps, tol),
        Cmd::Offline { instance, brute } => commands::offline_cmd(instance, *brute, tol),
        Cmd::Alpha { n, vector } => commands::alpha_cmd(*n, *vector),
        Cmd::Beta { n, delta0, mode } => commands::beta_cmd(*n, *delta0, commands::parse_lambda_mode(mode)?),
        Cmd::Minimax { regime, mode } => commands::minimax_cmd(regime, commands::parse_tree_mode(mode)?),
        Cmd::Thresholds { n, t } => commands::thresholds_cmd(*n, *t),
        Cmd::Tables { id, n, seed } => commands::tables_cmd(id, *n, *seed, tol),
        Cmd::Generate { dir, n, t, count, seed } => commands::generate_cmd(dir, *n, *t, *count, *seed),
    }
}

fn run(cli: &Cli) -> anyhow::Result<Option<CliError>> {
    let out = match dispatch(cli) {
        Ok(o) => o,
        Err(e) => return Ok(Some(e)),
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&out.json)?);
    } else {
        print!("{}", out.text);
    }
    if let Some(path) = &cli.out {
        let body = match (&out.artifact, cli.json) {
            (Some(a), false) => a.clone(),
            _ => serde_json::to_string_pretty(&out.json)? + "\n",
        };
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
