use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use moes::cli::{self, ExperimentConfig, Mode, Overrides};

#[derive(Parser)]
#[command(name = "moes", version, about = "Multi-objective ergodic trajectory planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Output directory; overrides the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> moes::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        Overrides {
            mode: self.mode,
            out: self.out.clone(),
            seed: self.seed,
        }
        .apply(&mut cfg);
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one trajectory for a single map or a fixed weight.
    Plan(Common),
    /// Approximate the Pareto front over 2 or 3 maps.
    Moes(Common),
    /// Repeat `moes` over several lattice step sizes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated step sizes; overrides `planner.sweep`.
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<f64>>,
    },
    /// Hypervolume of a front CSV.
    Hv {
        front: PathBuf,
        /// Comma-separated reference point; all ones by default.
        #[arg(long, value_delimiter = ',')]
        reference: Option<Vec<f64>>,
        /// Also write hypervolume.json here.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Pairwise ergodic distances between the configured maps.
    Dist(Common),
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: moes::Error| e.to_string())
}

fn print_json<T: serde::Serialize>(value: &T) {
    match serde_json::to_string_pretty(value) {
        Ok(s) => println!("{s}"),
        Err(e) => log::error!("cannot print result: {e}"),
    }
}

fn run(cli: Cli) -> moes::Result<()> {
    match cli.command {
        Command::Plan(c) => print_json(&cli::cmd_plan(&c.load()?)?),
        Command::Moes(c) => {
            let rep = cli::cmd_moes(&c.load()?)?;
            print_json(&rep.manifest);
            print_json(&rep.summary);
        }
        Command::Sweep { common, steps } => {
            let cfg = common.load()?;
            let steps = steps.unwrap_or_else(|| cfg.planner.sweep.clone());
            for row in cli::cmd_sweep(&cfg, &steps)? {
                match row.error {
                    Some(e) => println!("{}: failed: {e}", row.step),
                    None => println!(
                        "{}: hypervolume {:.6}, {} episodes, {} iterations",
                        row.step,
                        row.hypervolume.unwrap_or(f64::NAN),
                        row.episodes.unwrap_or(0),
                        row.total_iterations.unwrap_or(0)
                    ),
                }
            }
        }
        Command::Hv {
            front,
            reference,
            out,
        } => print_json(&cli::cmd_hv(&front, reference, out.as_deref())?),
        Command::Dist(c) => {
            for r in cli::cmd_dist(&c.load()?)? {
                if r.i < r.j {
                    println!("{} {} {:.6e}", r.i, r.j, r.distance);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
