//! Single seeded trials for either agent.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enactive::{EnactiveAgent, EnactiveParams, Likelihood};
use crate::error::HarnessError;
use crate::grid_world::{Action, AgentPose, DistanceNorm, EnvConfig, Environment, FoodLedger, MazeState};
use crate::rl::{PlannerConfig, RewardModel, RlAgent, RlParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Enactive,
    Rl,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Enactive => "enactive",
            AgentKind::Rl => "rl",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "enactive" => Ok(AgentKind::Enactive),
            "rl" => Ok(AgentKind::Rl),
            other => Err(format!("unknown agent {other:?}, expected enactive or rl")),
        }
    }
}

/// Agent kind together with the one parameter that kind uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AgentSpec {
    Enactive { d: usize },
    Rl { delta: f64 },
}

impl AgentSpec {
    pub fn kind(&self) -> AgentKind {
        match self {
            AgentSpec::Enactive { .. } => AgentKind::Enactive,
            AgentSpec::Rl { .. } => AgentKind::Rl,
        }
    }

    pub fn d(&self) -> Option<usize> {
        match self {
            AgentSpec::Enactive { d } => Some(*d),
            AgentSpec::Rl { .. } => None,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            AgentSpec::Rl { delta } => Some(*delta),
            AgentSpec::Enactive { .. } => None,
        }
    }

    /// `("d", d)` or `("delta", δ)`.
    pub fn param(&self) -> (&'static str, f64) {
        match self {
            AgentSpec::Enactive { d } => ("d", *d as f64),
            AgentSpec::Rl { delta } => ("delta", *delta),
        }
    }
}

/// Planner knobs of the RL agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlSettings {
    pub gamma: f64,
    pub vi_tolerance: f64,
    pub vi_max_iter: usize,
    pub empty_reward: f64,
    pub norm: DistanceNorm,
}

impl Default for RlSettings {
    fn default() -> Self {
        Self { gamma: 0.9, vi_tolerance: 1e-6, vi_max_iter: 10_000, empty_reward: 0.04, norm: DistanceNorm::Euclidean }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub agent: AgentSpec,
    pub alpha: f64,
    /// Seeds the agent's own RNG (exploration and bootstrap draws).
    pub seed: u64,
    pub env: EnvConfig,
    pub rl: RlSettings,
    pub stabilization_threshold: u64,
    pub likelihood: Likelihood,
    pub sequence_learning: bool,
}

impl TrialConfig {
    pub fn new(agent: AgentSpec, alpha: f64, seed: u64) -> Self {
        Self {
            agent,
            alpha,
            seed,
            env: EnvConfig::default(),
            rl: RlSettings::default(),
            stabilization_threshold: 2,
            likelihood: Likelihood::default(),
            sequence_learning: true,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(HarnessError::InvalidConfig(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        match self.agent {
            AgentSpec::Enactive { d } if d < 2 => {
                return Err(HarnessError::InvalidConfig(format!(
                    "d = {d}: composite interactions need a foresight of at least 2"
                )))
            }
            AgentSpec::Rl { delta } if !(delta >= 0.0 && delta.is_finite()) => {
                return Err(HarnessError::InvalidConfig(format!("delta {delta} must be finite and >= 0")))
            }
            _ => {}
        }
        if !(0.0..1.0).contains(&self.rl.gamma) {
            return Err(HarnessError::InvalidConfig(format!("gamma {} outside [0, 1)", self.rl.gamma)));
        }
        if self.rl.vi_tolerance.is_nan() || self.rl.vi_tolerance <= 0.0 {
            return Err(HarnessError::InvalidConfig("vi_tolerance must be > 0".into()));
        }
        self.env.validate().map_err(|e| HarnessError::InvalidConfig(e.to_string()))
    }

    pub fn load_maze(&self) -> Result<MazeState, HarnessError> {
        match &self.env.maze_file {
            None => Ok(MazeState::default_maze()),
            Some(path) => load_maze_file(path),
        }
    }
}

pub fn load_maze_file(path: &Path) -> Result<MazeState, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| HarnessError::MazeFile { path: path.to_path_buf(), source })?;
    MazeState::load(&text).map_err(|source| HarnessError::MazeParse { path: path.to_path_buf(), source })
}

/// One environment tick of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub pose: AgentPose,
    pub action: Action,
    pub succeeded: bool,
    /// Valence of the performed primitive (enactive) or reward (RL).
    pub value: f64,
    pub ate_food: bool,
    /// Arena id of the interaction enacted in the cycle covering this tick.
    pub enacted: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub trial_length: u64,
    pub records: Vec<TickRecord>,
}

impl TrialLog {
    pub fn negative_count(&self) -> u64 {
        self.records.iter().filter(|r| r.value < 0.0).count() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub config: TrialConfig,
    pub log: TrialLog,
    pub gain: u64,
    pub food: FoodLedger,
    pub final_food_on_grid: u64,
    /// Ticks after which grid, ledger and schedule disagreed.
    pub conservation_violations: u64,
    pub memory_dump: Option<String>,
    /// `(tick, ascii maze)` snapshots when tracing was requested.
    pub trace: Vec<(u64, String)>,
}

impl TrialResult {
    pub fn neg_valence_total(&self) -> u64 {
        self.log.negative_count()
    }

    pub fn summary(&self) -> TrialSummary {
        TrialSummary {
            agent: self.config.agent.kind(),
            alpha: self.config.alpha,
            d: self.config.agent.d(),
            delta: self.config.agent.delta(),
            seed: self.config.seed,
            gain: self.gain,
            neg_valence_total: self.neg_valence_total(),
            ticks: self.log.trial_length,
        }
    }
}

/// One row of `trials.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub agent: AgentKind,
    pub alpha: f64,
    pub d: Option<usize>,
    pub delta: Option<f64>,
    pub seed: u64,
    pub gain: u64,
    pub neg_valence_total: u64,
    pub ticks: u64,
}

impl TrialSummary {
    pub fn param_value(&self) -> f64 {
        self.d.map(|d| d as f64).or(self.delta).unwrap_or(f64::NAN)
    }
}

pub fn run_trial(config: &TrialConfig) -> Result<TrialResult, HarnessError> {
    run_trial_traced(config, None)
}

/// Runs a trial, snapshotting the maze every `trace_every` ticks if given.
pub fn run_trial_traced(config: &TrialConfig, trace_every: Option<u64>) -> Result<TrialResult, HarnessError> {
    config.validate()?;
    let maze = config.load_maze()?;
    let mut env = Environment::new(maze, config.env.clone())?;
    let mut records = Vec::with_capacity(config.env.trial_length as usize);
    let mut violations = 0;
    let mut tracer = Tracer { every: trace_every.filter(|k| *k > 0), next: 0, snapshots: Vec::new() };
    tracer.observe(&env);

    let memory_dump = match config.agent {
        AgentSpec::Enactive { d } => {
            let params = EnactiveParams {
                alpha: config.alpha,
                depth_limit: d,
                stabilization_threshold: config.stabilization_threshold,
                sequence_learning: config.sequence_learning,
                likelihood: config.likelihood,
                ..EnactiveParams::default()
            };
            let mut agent = EnactiveAgent::new(params, config.seed);
            while !env.finished() {
                let cycle = agent.decision_cycle(&mut env)?;
                for (p, v) in cycle.performed.iter().zip(&cycle.valences) {
                    records.push(TickRecord {
                        tick: p.tick,
                        pose: p.outcome.new_pose,
                        action: p.outcome.action,
                        succeeded: p.outcome.succeeded,
                        value: *v,
                        ate_food: p.outcome.ate_food,
                        enacted: Some(cycle.enacted.0),
                    });
                }
                if !env.food_conserved() {
                    violations += 1;
                }
                tracer.observe(&env);
            }
            Some(agent.memory.dump())
        }
        AgentSpec::Rl { delta } => {
            let rewards = RewardModel { empty: config.rl.empty_reward, ..RewardModel::default() };
            let params = RlParams {
                alpha: config.alpha,
                delta,
                norm: config.rl.norm,
                planner: PlannerConfig {
                    gamma: config.rl.gamma,
                    tolerance: config.rl.vi_tolerance,
                    max_iter: config.rl.vi_max_iter,
                    rewards,
                },
            };
            let mut agent = RlAgent::new(params, config.seed);
            while !env.finished() {
                let tick = env.tick();
                let decision = agent.act(&env.state);
                let out = env.attempt_action(decision.action);
                let value = if out.ate_food {
                    rewards.food
                } else if !out.succeeded {
                    rewards.obstacle
                } else {
                    rewards.empty
                };
                env.tick_environment()?;
                records.push(TickRecord {
                    tick,
                    pose: out.new_pose,
                    action: out.action,
                    succeeded: out.succeeded,
                    value,
                    ate_food: out.ate_food,
                    enacted: None,
                });
                if !env.food_conserved() {
                    violations += 1;
                }
                tracer.observe(&env);
            }
            None
        }
    };

    let gain = records.iter().filter(|r| r.ate_food).count() as u64;
    Ok(TrialResult {
        config: config.clone(),
        log: TrialLog { trial_length: config.env.trial_length, records },
        gain,
        food: env.state.food,
        final_food_on_grid: env.state.food_count(),
        conservation_violations: violations,
        memory_dump,
        trace: tracer.snapshots,
    })
}

/// Takes a snapshot the first time the clock reaches each multiple of `every`.
struct Tracer {
    every: Option<u64>,
    next: u64,
    snapshots: Vec<(u64, String)>,
}

impl Tracer {
    fn observe(&mut self, env: &Environment) {
        let Some(k) = self.every else { return };
        if env.tick() >= self.next {
            self.snapshots.push((env.tick(), env.state.render()));
            self.next = (env.tick() / k + 1) * k;
        }
    }
}
