//! The four harness commands as library functions.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hcloud_core::allocator::PolicyKind;
use hcloud_core::forecast::DemandModel;
use hcloud_core::model::RequestClass;
use hcloud_core::sim::{
    self, cost_efficiency, scalability_metric, MetricsReport, Mode, SimOutcome,
};
use hcloud_core::training::{smooth, train_agent, TrainingOutcome};
use hcloud_core::workload::generate_trace;
use serde::Serialize;

use crate::config::{load_spec, Experiment, Prepared};
use crate::error::{CliError, Result};
use crate::formats::{save_dataset, save_history, save_trace, write_json};

/// Window of the smoothed reward column in `rewards.csv`.
pub const REWARD_SMOOTHING: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateSummary {
    pub requests: usize,
    pub sensitive: usize,
    pub scalable: usize,
}

/// Generate a trace from the spec at `spec_path` and write it to `out`.
pub fn generate(spec_path: &Path, out: &Path, seed: Option<u64>) -> Result<GenerateSummary> {
    let mut spec = load_spec(spec_path)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let trace = generate_trace(&spec)?;
    save_trace(&trace, out)?;
    let sensitive = trace
        .requests()
        .iter()
        .filter(|r| r.class == RequestClass::Sensitive)
        .count();
    Ok(GenerateSummary {
        requests: trace.len(),
        sensitive,
        scalable: trace.len() - sensitive,
    })
}

/// Train the Q-learning agent on the experiment's workload.
pub fn train_in_process(exp: &Experiment) -> Result<TrainingOutcome> {
    let cfg = &exp.config;
    Ok(train_agent(
        &cfg.sim_config(),
        &exp.trace,
        cfg.new_agent()?,
        &cfg.training,
    )?)
}

/// Train and write `qtable.json`, `rewards.csv`, and when a forecaster was
/// fitted, `forecaster.json` and the `dataset.csv` it was fitted on.
pub fn train(exp: &Experiment, out_dir: &Path) -> Result<TrainingOutcome> {
    let outcome = train_in_process(exp)?;
    write_json(&outcome.agent.table, &out_dir.join("qtable.json"))?;
    let forecaster = out_dir.join("forecaster.json");
    match &outcome.model {
        Some(m) => write_json(m, &forecaster)?,
        None if forecaster.exists() => {
            fs::remove_file(&forecaster).map_err(|e| CliError::io(&forecaster, e))?
        }
        None => {}
    }
    if let Some(ds) = &outcome.dataset {
        save_dataset(ds, &out_dir.join("dataset.csv"))?;
    }
    write_rewards(&outcome, &out_dir.join("rewards.csv"))?;
    Ok(outcome)
}

fn write_rewards(outcome: &TrainingOutcome, path: &Path) -> Result<()> {
    let rewards: Vec<f64> = outcome.episodes.iter().map(|e| e.mean_reward).collect();
    let smoothed = smooth(&rewards, REWARD_SMOOTHING);
    let mut text = String::from(
        "episode,epsilon,mean_reward,smoothed_reward,total_cost,sla_violation_rate,forecast_mse\n",
    );
    for (i, e) in outcome.episodes.iter().enumerate() {
        let s = (i + 1)
            .checked_sub(REWARD_SMOOTHING)
            .and_then(|k| smoothed.get(k))
            .map_or(String::new(), f64::to_string);
        let mse = e.forecast_mse.map_or(String::new(), |m| m.to_string());
        writeln!(
            text,
            "{},{},{},{s},{},{},{mse}",
            e.episode, e.epsilon, e.mean_reward, e.total_cost, e.sla_violation_rate
        )
        .expect("writing to a String");
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Turn a roster entry into something runnable, training if needed.
pub fn materialize(
    exp: &Experiment,
    prepared: &Prepared,
) -> Result<(PolicyKind, Option<DemandModel>)> {
    Ok(match prepared {
        Prepared::Fixed(p) => (p.clone(), None),
        Prepared::Learned { agent, model } => (PolicyKind::QLearning(agent.clone()), model.clone()),
        Prepared::Untrained => {
            let out = train_in_process(exp)?;
            (PolicyKind::QLearning(out.agent), out.model)
        }
    })
}

fn lookup<'a>(exp: &'a Experiment, name: &str) -> Result<&'a Prepared> {
    exp.roster
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, p)| p)
        .ok_or_else(|| CliError::UnknownPolicy(name.to_string()))
}

/// One greedy evaluation run of the named roster policy.
pub fn evaluate(exp: &Experiment, name: &str) -> Result<SimOutcome> {
    let (mut policy, model) = materialize(exp, lookup(exp, name)?)?;
    Ok(sim::run(
        &exp.config.sim_config(),
        &exp.trace,
        &mut policy,
        model.as_ref(),
        Mode::Evaluate,
    )?)
}

/// Evaluate one policy and write `<name>_history.csv` and `<name>_report.json`.
pub fn simulate(exp: &Experiment, name: &str, out_dir: &Path) -> Result<SimOutcome> {
    let out = evaluate(exp, name)?;
    save_history(&out.ticks, &out_dir.join(format!("{name}_history.csv")))?;
    write_json(&out.report, &out_dir.join(format!("{name}_report.json")))?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub policy: String,
    pub kind: &'static str,
    pub report: MetricsReport,
    /// Against the first Static policy in the roster.
    pub cost_efficiency: Option<f64>,
    /// Throughput on the workload over throughput on the base workload.
    pub scalability: Option<f64>,
}

const COMPARISON_COLUMNS: [&str; 15] = [
    "policy",
    "kind",
    "total_cost",
    "cost_efficiency",
    "mean_latency",
    "p95_latency",
    "throughput",
    "scalability",
    "private_utilization",
    "public_utilization",
    "sla_violation_rate",
    "availability",
    "peak_public_units",
    "requests_completed",
    "requests_rejected",
];

impl ComparisonRow {
    fn cells(&self, fmt: impl Fn(f64) -> String) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), &fmt);
        let r = &self.report;
        vec![
            self.policy.clone(),
            self.kind.to_string(),
            fmt(r.total_cost),
            opt(self.cost_efficiency),
            opt(r.mean_latency),
            opt(r.p95_latency),
            fmt(r.throughput),
            opt(self.scalability),
            fmt(r.mean_utilization.private),
            fmt(r.mean_utilization.public),
            fmt(r.sla_violation_rate),
            fmt(r.availability),
            r.peak_public_units.to_string(),
            r.requests_completed.to_string(),
            r.requests_rejected.to_string(),
        ]
    }
}

/// Run every roster policy on the same trace and seed; rows keep roster order.
pub fn compare_rows(exp: &Experiment) -> Result<Vec<ComparisonRow>> {
    if exp.roster.len() < 2 {
        return Err(CliError::invalid(
            "policies: compare needs at least two policies",
        ));
    }
    let sim_cfg = exp.config.sim_config();
    let results: Vec<Result<(PolicyKind, MetricsReport, Option<MetricsReport>)>> =
        std::thread::scope(|s| {
            let handles: Vec<_> = exp
                .roster
                .iter()
                .map(|(_, prepared)| {
                    let sim_cfg = &sim_cfg;
                    s.spawn(move || {
                        let (policy, model) = materialize(exp, prepared)?;
                        let mut p = policy.clone();
                        let main =
                            sim::run(sim_cfg, &exp.trace, &mut p, model.as_ref(), Mode::Evaluate)?;
                        let base = match &exp.base_trace {
                            Some(t) => {
                                let mut p = policy.clone();
                                Some(
                                    sim::run(sim_cfg, t, &mut p, model.as_ref(), Mode::Evaluate)?
                                        .report,
                                )
                            }
                            None => None,
                        };
                        Ok((policy, main.report, base))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("policy evaluation thread panicked"))
                .collect()
        });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let anchor = results
        .iter()
        .find(|(p, _, _)| matches!(p, PolicyKind::Static { .. }))
        .map(|(_, r, _)| r.total_cost);
    Ok(exp
        .roster
        .iter()
        .zip(results)
        .map(|((name, _), (policy, report, base))| ComparisonRow {
            policy: name.clone(),
            kind: policy.name(),
            cost_efficiency: anchor.and_then(|a| cost_efficiency(a, report.total_cost).ok()),
            scalability: base
                .and_then(|b| scalability_metric(report.throughput, b.throughput).ok()),
            report,
        })
        .collect())
}

/// Compare and write `comparison.csv` and `comparison.txt`.
pub fn compare(exp: &Experiment, out_dir: &Path) -> Result<Vec<ComparisonRow>> {
    let rows = compare_rows(exp)?;
    let csv_path = out_dir.join("comparison.csv");
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::invalid(e.to_string()))?;
    w.write_record(COMPARISON_COLUMNS)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    for r in &rows {
        w.write_record(r.cells(|v| v.to_string()))
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(&csv_path, e))?;
    let txt = out_dir.join("comparison.txt");
    fs::write(&txt, render_table(&rows)).map_err(|e| CliError::io(&txt, e))?;
    Ok(rows)
}

/// Column-aligned text rendering of a comparison.
pub fn render_table(rows: &[ComparisonRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.cells(|v| format!("{v:.4}")))
        .collect();
    let widths: Vec<usize> = (0..COMPARISON_COLUMNS.len())
        .map(|c| {
            body.iter()
                .map(|r| r[c].len())
                .chain([COMPARISON_COLUMNS[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let header: Vec<String> = COMPARISON_COLUMNS.iter().map(|s| s.to_string()).collect();
    for row in std::iter::once(&header).chain(&body) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (v, w))| {
                if c < 2 {
                    format!("{v:<w$}")
                } else {
                    format!("{v:>w$}")
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
