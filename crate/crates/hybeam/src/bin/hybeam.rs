//! Monte Carlo harness CLI: seeded sweeps, single verbose trials, and an
//! invariant check suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hybeam::checks::run_invariant_checks;
use hybeam::digital::SolverMode;
use hybeam::harness::{emit_outputs, run_sweep, run_trial, summarize, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "hybeam",
    version,
    about = "Energy-efficiency simulations for sub-connected hybrid beamforming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment config; defaults apply for every omitted field.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,

    /// Override the objective: energy efficiency or spectral efficiency.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SolverMode>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig, hybeam::Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_mode(s: &str) -> Result<SolverMode, String> {
    match s {
        "ee" | "energy_efficiency" => Ok(SolverMode::EnergyEfficiency),
        "se" | "spectral_efficiency" => Ok(SolverMode::SpectralEfficiency),
        other => Err(format!("unknown mode `{other}` (expected ee or se)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a full sweep and write summary/trace/record files.
    Run {
        #[command(flatten)]
        config: ConfigArgs,

        /// Output directory for summary.csv, traces.csv, config.json,
        /// records.json.
        #[arg(long, default_value = "hybeam_out")]
        out: PathBuf,

        /// Worker threads for trial execution (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },

    /// Run a single trial and print its traces.
    Trial {
        #[command(flatten)]
        config: ConfigArgs,

        /// Trial index within the seed stream.
        #[arg(long, default_value_t = 0)]
        trial_index: usize,

        /// Optional directory to also write the single-trial records into.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the invariant suite; exits nonzero if any check fails.
    Check {
        /// Seed for the randomized instances.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, hybeam::Error> {
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            let cfg = config.resolve()?;
            if threads > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                    .map_err(|e| {
                        hybeam::Error::InvalidArgument(format!("thread pool: {e}"))
                    })?;
            }
            let sweep = run_sweep(&cfg)?;
            emit_outputs(&sweep.records, &sweep.summary, &cfg, &out)?;
            println!(
                "{:>9}  {:>14}  {:>12}  {:>12}  {:>12}  {:>6}  {:>8}",
                "P [dBm]", "solver", "EE [b/Hz/J]", "R [b/s/Hz]", "Pcon [W]", "n", "failed"
            );
            for row in &sweep.summary {
                println!(
                    "{:>9}  {:>14}  {:>12.4}  {:>12.4}  {:>12.4}  {:>6}  {:>8}",
                    row.power_dbm,
                    row.solver.label(),
                    row.mean_energy_efficiency,
                    row.mean_rate_bits,
                    row.mean_consumed_power,
                    row.trials,
                    row.failures
                );
            }
            println!("outputs written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Trial {
            config,
            trial_index,
            out,
        } => {
            let cfg = config.resolve()?;
            let record = run_trial(&cfg, trial_index)?;
            println!("trial {} seed {}", record.trial_index, record.seed);
            println!("config hash {}", record.config_hash);
            println!(
                "analog total leakage trace ({} outer iterations):",
                record.analog.total_trace.iterations
            );
            for (i, v) in record.analog.total_trace.values.iter().enumerate() {
                println!("  outer {:>3}: {v:.6e}", i + 1);
            }
            for solve in &record.results {
                println!(
                    "\n{} @ {} dBm: converged={} lambda_ee={:.6}",
                    solve.solver.label(),
                    solve.power_dbm,
                    solve.converged,
                    solve.lambda_ee
                );
                match &solve.metrics {
                    Some(m) => println!(
                        "  rate {:.4} b/s/Hz | consumed {:.4} W | EE {:.4} b/Hz/J ({:.4} nats/Hz/J)",
                        m.rate_bits, m.consumed_power, m.energy_efficiency, solve.ee_nats
                    ),
                    None => println!(
                        "  FAILED: {}",
                        solve.error.as_deref().unwrap_or("unknown error")
                    ),
                }
                for (outer, trace) in solve.inner_traces.iter().enumerate() {
                    println!(
                        "  inner trace {} ({} iterations): {:?}",
                        outer + 1,
                        trace.iterations,
                        trace.values
                    );
                }
                if !solve.outer_trace.is_empty() {
                    println!("  outer (lambda, chi): {:?}", solve.outer_trace);
                }
            }
            if let Some(dir) = out {
                let records = vec![record];
                let summary = summarize(&cfg, &records);
                emit_outputs(&records, &summary, &cfg, &dir)?;
                println!("\noutputs written to {}", dir.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Check { seed } => {
            let outcomes = run_invariant_checks(seed);
            let mut all_ok = true;
            for o in &outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                println!("{tag}  {:<38} {}", o.name, o.detail);
                all_ok &= o.passed;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
