//! Parameter sweeps over exploration, foresight and scope.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::harness::stats::{mean, population_std};
use crate::harness::trial::{run_trial, AgentKind, AgentSpec, TrialConfig, TrialLog, TrialSummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    /// Enactive foresight values; empty means no enactive cells.
    pub depths: Vec<usize>,
    /// RL scope radii; empty means no RL cells.
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Environment and planner settings shared by every cell. Its agent,
    /// alpha and seed are overwritten per trial.
    pub template: TrialConfig,
}

impl SweepSpec {
    /// α ∈ {0, 0.5}, d ∈ {2, 4, …, 20}, δ ∈ {2¹, …, 2¹¹}.
    pub fn standard_grid(template: TrialConfig, seeds: Vec<u64>) -> Self {
        Self {
            alphas: vec![0.0, 0.5],
            depths: (1..=10).map(|k| 2 * k).collect(),
            deltas: (1..=11).map(|k| f64::from(1u32 << k)).collect(),
            seeds,
            template,
        }
    }

    /// Every (agent, alpha) cell, enactive first, in grid order.
    pub fn cells(&self) -> Vec<(AgentSpec, f64)> {
        let mut out = Vec::new();
        for &alpha in &self.alphas {
            out.extend(self.depths.iter().map(|&d| (AgentSpec::Enactive { d }, alpha)));
        }
        for &alpha in &self.alphas {
            out.extend(self.deltas.iter().map(|&delta| (AgentSpec::Rl { delta }, alpha)));
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.cells().is_empty() || self.seeds.is_empty()
    }

    pub fn trial_configs(&self) -> Vec<TrialConfig> {
        let mut out = Vec::new();
        for (agent, alpha) in self.cells() {
            for &seed in &self.seeds {
                out.push(TrialConfig { agent, alpha, seed, ..self.template.clone() });
            }
        }
        out
    }

    /// Pairs each foresight with the scope radius closest to it on a log
    /// scale, so one step of foresight lines up with one cell of distance.
    pub fn alignment(&self) -> Vec<Alignment> {
        self.depths
            .iter()
            .filter_map(|&d| {
                self.deltas
                    .iter()
                    .copied()
                    .min_by(|a, b| {
                        let da = (a.ln() - (d as f64).ln()).abs();
                        let db = (b.ln() - (d as f64).ln()).abs();
                        da.total_cmp(&db).then(a.total_cmp(b))
                    })
                    .map(|delta| Alignment { d, delta })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub d: usize,
    pub delta: f64,
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub agent: AgentKind,
    pub alpha: f64,
    pub param_name: String,
    pub param_value: f64,
    pub mean_gain: f64,
    pub std_gain: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Per-seed trials, sorted by (agent, alpha, parameter, seed).
    pub trials: Vec<TrialSummary>,
    /// Tick logs aligned with `trials`.
    pub logs: Vec<TrialLog>,
    pub alignment: Vec<Alignment>,
}

fn trial_key(t: &TrialSummary) -> (AgentKind, f64, f64, u64) {
    (t.agent, t.alpha, t.param_value(), t.seed)
}

fn cmp_trials(a: &TrialSummary, b: &TrialSummary) -> std::cmp::Ordering {
    let (ka, kb) = (trial_key(a), trial_key(b));
    ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.total_cmp(&kb.2)).then(ka.3.cmp(&kb.3))
}

/// Mean and population std of gain per cell, from per-seed summaries.
pub fn aggregate(trials: &[TrialSummary]) -> Vec<SweepRow> {
    let mut sorted = trials.to_vec();
    sorted.sort_by(cmp_trials);
    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| a.agent == b.agent && a.alpha == b.alpha && a.param_value() == b.param_value()) {
        let gains: Vec<f64> = group.iter().map(|t| t.gain as f64).collect();
        let first = &group[0];
        rows.push(SweepRow {
            agent: first.agent,
            alpha: first.alpha,
            param_name: match first.agent {
                AgentKind::Enactive => "d".into(),
                AgentKind::Rl => "delta".into(),
            },
            param_value: first.param_value(),
            mean_gain: mean(&gains),
            std_gain: population_std(&gains),
            n_seeds: group.len(),
        });
    }
    rows
}

/// Runs every cell × seed on `workers` threads and aggregates per cell.
/// Output order is independent of the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult, HarnessError> {
    if spec.is_empty() {
        return Err(HarnessError::InvalidConfig("sweep has no cells or no seeds".into()));
    }
    let configs = spec.trial_configs();
    for c in &configs {
        c.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::InvalidConfig(format!("thread pool: {e}")))?;
    let mut done: Vec<(TrialSummary, TrialLog)> = pool.install(|| {
        configs.par_iter().map(|c| run_trial(c).map(|r| (r.summary(), r.log))).collect::<Result<Vec<_>, _>>()
    })?;
    done.sort_by(|a, b| cmp_trials(&a.0, &b.0));
    let (trials, logs): (Vec<_>, Vec<_>) = done.into_iter().unzip();
    Ok(SweepResult { rows: aggregate(&trials), trials, logs, alignment: spec.alignment() })
}
