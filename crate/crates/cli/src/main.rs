//! `bosonic` — phase-space linear bosonic channels and Gaussian dilations.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check fails,
//! 2 input/usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bosonic_cli::commands::{self, StateSpec};
use bosonic_cli::config::RunConfig;
use bosonic_cli::formats::{ChannelSpecJson, SimulateInputJson};

#[derive(Parser)]
#[command(name = "bosonic", version, about = "Linear bosonic channels, CP certificates, and Gaussian dilations")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Seed for every sampled certificate and point set.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Structural identity tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Eigenvalue nonnegativity tolerance.
    #[arg(long = "eig-tol", global = true)]
    eig_tol: Option<f64>,
    /// Per-mode Fock cutoff dimension.
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Quadrature base radius.
    #[arg(long = "grid-radius", global = true)]
    grid_radius: Option<f64>,
    /// Quadrature step.
    #[arg(long = "grid-step", global = true)]
    grid_step: Option<f64>,
    /// Output path (dilation file for `dilate`, CSV for `sweep`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the full JSON report instead of the summary line.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check complete positivity of a channel specification.
    Verify {
        /// Path to the channel spec JSON.
        spec: PathBuf,
    },
    /// Synthesize a Gaussian dilation and verify its invariants.
    Dilate {
        spec: PathBuf,
        /// exact | var-unitary | fixed-unitary
        #[arg(long)]
        algorithm: String,
        /// Approximation parameter for the approximate algorithms.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Act with a channel or dilation on a state; report characteristic and
    /// Fock-level outputs.
    Simulate {
        /// Channel spec or dilation JSON.
        spec: PathBuf,
        /// vacuum | coherent:RE[,IM] | thermal:NBAR
        #[arg(long, default_value = "vacuum")]
        state: String,
        /// Dump the Fock output state to this path.
        #[arg(long = "dump-state")]
        dump_state: Option<PathBuf>,
    },
    /// Convergence sweep over epsilon (or sigma for the bk preset).
    Sweep {
        spec: PathBuf,
        /// var-unitary | fixed-unitary | bk
        #[arg(long)]
        algorithm: String,
        /// Comma-separated list, e.g. 0.2,0.1,0.05,0.02,0.01
        #[arg(long)]
        epsilons: Option<String>,
        #[arg(long, default_value = "coherent:0.5")]
        state: String,
        /// Also compute Fock-level trace distances (slower).
        #[arg(long)]
        fock: bool,
    },
    /// Demonstrate that the binary displacement channel admits no exact
    /// Gaussian dilation.
    Witness {
        /// Displacement vector, comma-separated, e.g. 1,0
        #[arg(long)]
        s: String,
        /// Epsilons for the approximate dilations inspected.
        #[arg(long)]
        epsilons: Option<String>,
    },
}

fn build_config(args: &GlobalArgs) -> RunConfig {
    let mut config = RunConfig::default();
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    if let Some(eig) = args.eig_tol {
        config.eig_tol = eig;
    }
    if let Some(c) = args.cutoff {
        config.cutoff = c;
    }
    if let Some(r) = args.grid_radius {
        config.grid_radius = r;
    }
    if let Some(h) = args.grid_step {
        config.grid_step = h;
    }
    config
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed JSON in {path:?}: {e}"))
}

fn parse_float_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}'")))
        .collect()
}

fn run(cli: &Cli) -> Result<(i32, serde_json::Value), String> {
    let config = build_config(&cli.global);
    match &cli.command {
        Command::Verify { spec } => {
            let spec: ChannelSpecJson = read_json(spec)?;
            commands::cmd_verify(&spec, &config)
        }
        Command::Dilate {
            spec,
            algorithm,
            epsilon,
        } => {
            let spec: ChannelSpecJson = read_json(spec)?;
            commands::cmd_dilate(&spec, algorithm, *epsilon, cli.global.out.as_deref(), &config)
        }
        Command::Simulate {
            spec,
            state,
            dump_state,
        } => {
            let input: SimulateInputJson = read_json(spec)?;
            let state = StateSpec::parse(state)?;
            commands::cmd_simulate(&input, state, dump_state.as_deref(), &config)
        }
        Command::Sweep {
            spec,
            algorithm,
            epsilons,
            state,
            fock,
        } => {
            let spec: ChannelSpecJson = read_json(spec)?;
            let eps = match epsilons {
                Some(list) => parse_float_list(list)?,
                None => config.epsilons.clone(),
            };
            let state = StateSpec::parse(state)?;
            commands::cmd_sweep(
                &spec,
                algorithm,
                &eps,
                state,
                *fock,
                cli.global.out.as_deref(),
                &config,
            )
        }
        Command::Witness { s, epsilons } => {
            let s = parse_float_list(s)?;
            let eps = match epsilons {
                Some(list) => parse_float_list(list)?,
                None => vec![0.2, 0.1, 0.05],
            };
            commands::cmd_witness(&s, &eps, &config)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((code, report)) => {
            if cli.global.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                let verdict = report
                    .get("verdict")
                    .and_then(|v| v.as_str())
                    .unwrap_or("done");
                let command = report
                    .get("command")
                    .and_then(|v| v.as_str())
                    .unwrap_or("?");
                println!("{command}: {verdict}");
                if let Some(err) = report.get("error").and_then(|v| v.as_str()) {
                    println!("  {err}");
                }
                if let Some(csv) = report.get("csv").and_then(|v| v.as_str()) {
                    print!("{csv}");
                }
                if let Some(checks) = report.get("checks").and_then(|v| v.as_array()) {
                    for c in checks {
                        if let (Some(name), Some(res), Some(pass)) = (
                            c.get("name").and_then(|v| v.as_str()),
                            c.get("residual").and_then(|v| v.as_f64()),
                            c.get("pass").and_then(|v| v.as_bool()),
                        ) {
                            println!(
                                "  {} {name}: residual {res:.3e}",
                                if pass { "ok  " } else { "FAIL" }
                            );
                        }
                    }
                }
            }
            ExitCode::from(code as u8)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
