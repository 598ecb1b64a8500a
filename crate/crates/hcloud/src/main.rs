use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcloud::config::Experiment;
use hcloud::experiment;
use hcloud::Result;

/// Hybrid-cloud resource allocation simulator.
#[derive(Parser)]
#[command(name = "hcloud", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Workload spec (generate) or experiment config (other commands).
    #[arg(long)]
    config: PathBuf,
    /// Output file (generate) or directory; defaults to the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary on standard output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a trace CSV from a workload spec.
    Generate(Common),
    /// Train the Q-learning agent and save the table, forecaster and reward curve.
    Train(Common),
    /// Evaluate one roster policy and write its history and report.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Roster name of the policy to run.
        #[arg(long)]
        policy: String,
    },
    /// Run every roster policy and write a comparison table.
    Compare(Common),
}

fn load(c: &Common) -> Result<(Experiment, PathBuf)> {
    let exp = Experiment::load(&c.config, c.seed)?;
    let out = c.out.clone().unwrap_or_else(|| exp.output_dir.clone());
    Ok((exp, out))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(c) => {
            let out = c
                .out
                .clone()
                .unwrap_or_else(|| c.config.with_extension("csv"));
            let s = experiment::generate(&c.config, &out, c.seed)?;
            if !c.quiet {
                println!(
                    "wrote {} requests ({} sensitive, {} scalable) to {}",
                    s.requests,
                    s.sensitive,
                    s.scalable,
                    out.display()
                );
            }
        }
        Command::Train(c) => {
            let (exp, out) = load(&c)?;
            let t = experiment::train(&exp, &out)?;
            if !c.quiet {
                for e in &t.episodes {
                    println!(
                        "episode {:>3}  epsilon {:.3}  reward {:>9.4}  cost {:>10.2}  sla {:.4}",
                        e.episode, e.epsilon, e.mean_reward, e.total_cost, e.sla_violation_rate
                    );
                }
                println!("saved model to {}", out.display());
            }
        }
        Command::Simulate { common: c, policy } => {
            let (exp, out) = load(&c)?;
            let o = experiment::simulate(&exp, &policy, &out)?;
            if !c.quiet {
                let r = &o.report;
                println!(
                    "{policy}: cost {:.2}  mean latency {}  sla violations {:.4}  availability {:.4}  peak public units {}",
                    r.total_cost,
                    r.mean_latency.map_or("n/a".into(), |l| format!("{l:.4}")),
                    r.sla_violation_rate,
                    r.availability,
                    r.peak_public_units
                );
            }
        }
        Command::Compare(c) => {
            let (exp, out) = load(&c)?;
            let rows = experiment::compare(&exp, &out)?;
            if !c.quiet {
                print!("{}", experiment::render_table(&rows));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
