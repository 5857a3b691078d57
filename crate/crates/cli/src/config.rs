//! Flat `key = value` configuration with flag and environment overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use enactlab::enactive::Likelihood;
use enactlab::grid_world::DistanceNorm;
use enactlab::harness::{AgentKind, AgentSpec, SweepSpec, TrialConfig};

use crate::CliError;

/// Recognised keys with their defaults, in the order `resolved.conf` lists them.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("agent", "enactive"),
    ("maze", ""),
    ("alpha", "0"),
    ("d", "10"),
    ("delta", "4"),
    ("seed", "0"),
    ("env_seed", "0"),
    ("ticks", "1000"),
    ("replenish_interval", "200"),
    ("replenish_count", "20"),
    ("initial_food", "18"),
    ("gamma", "0.9"),
    ("vi_tolerance", "1e-6"),
    ("vi_max_iter", "10000"),
    ("empty_reward", "0.04"),
    ("norm", "euclidean"),
    ("stabilization_threshold", "2"),
    ("likelihood", "context"),
    ("sequence_learning", "true"),
    ("window", "100"),
    ("grid", "standard"),
    ("seeds", "15"),
];

pub const SEED_ENV: &str = "ENACTLAB_SEED";

pub type KeyValues = BTreeMap<String, String>;

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config(text: &str, origin: &str) -> Result<KeyValues, CliError> {
    let mut out = KeyValues::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{origin}:{}: expected key = value", n + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if !DEFAULTS.iter().any(|(d, _)| *d == k) {
            return Err(CliError::Config(format!("{origin}:{}: unknown key {k:?}", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Config(format!("{origin}:{}: duplicate key {k:?}", n + 1)));
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<KeyValues, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Layers defaults, the config file, `ENACTLAB_SEED` (only when neither the
/// file nor a flag sets `seed`) and flags, later layers winning.
pub fn layer(file: Option<KeyValues>, env_seed: Option<String>, flags: KeyValues) -> KeyValues {
    let mut out: KeyValues = DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let file = file.unwrap_or_default();
    let seed_given = file.contains_key("seed") || flags.contains_key("seed");
    out.extend(file);
    if let (false, Some(s)) = (seed_given, env_seed) {
        out.insert("seed".into(), s);
    }
    out.extend(flags);
    out
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub values: KeyValues,
    pub template: TrialConfig,
    pub window: u64,
    pub grid: Grid,
    pub seeds: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub alphas: Vec<f64>,
    pub depths: Vec<usize>,
    pub deltas: Vec<f64>,
}

impl Grid {
    /// α ∈ {0, 0.5}, d ∈ {2, 4, …, 20}, δ ∈ {2, 4, …, 2048}.
    pub fn standard() -> Self {
        let s = SweepSpec::standard_grid(TrialConfig::new(AgentSpec::Enactive { d: 2 }, 0.0, 0), vec![]);
        Self { alphas: s.alphas, depths: s.depths, deltas: s.deltas }
    }

    /// `alpha=0,0.5;d=2,4;delta=2,8`. A missing `d` or `delta` part means no
    /// cells of that agent; a missing `alpha` part means `0,0.5`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim() == "standard" {
            return Ok(Self::standard());
        }
        let mut grid = Self { alphas: vec![0.0, 0.5], depths: vec![], deltas: vec![] };
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("grid part {part:?}: expected name=v1,v2,...")))?;
            let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            match k.trim() {
                "alpha" => grid.alphas = items.iter().map(|s| parse_num("grid alpha", s)).collect::<Result<_, _>>()?,
                "d" => grid.depths = items.iter().map(|s| parse_num("grid d", s)).collect::<Result<_, _>>()?,
                "delta" => grid.deltas = items.iter().map(|s| parse_num("grid delta", s)).collect::<Result<_, _>>()?,
                other => return Err(CliError::Config(format!("grid: unknown parameter {other:?}"))),
            }
        }
        if grid.alphas.is_empty() || (grid.depths.is_empty() && grid.deltas.is_empty()) {
            return Err(CliError::Config(format!("grid {text:?} has no cells")));
        }
        Ok(grid)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| CliError::Config(format!("{key} = {v:?}: {e}")))
}

impl Settings {
    pub fn from_values(values: KeyValues) -> Result<Self, CliError> {
        let get = |k: &str| values.get(k).map(String::as_str).unwrap_or("");
        let agent: AgentKind = get("agent").parse().map_err(CliError::Config)?;
        let spec = match agent {
            AgentKind::Enactive => AgentSpec::Enactive { d: parse_num("d", get("d"))? },
            AgentKind::Rl => AgentSpec::Rl { delta: parse_num("delta", get("delta"))? },
        };
        let mut t = TrialConfig::new(spec, parse_num("alpha", get("alpha"))?, parse_num("seed", get("seed"))?);
        let maze = get("maze");
        t.env.maze_file = (!maze.is_empty()).then(|| PathBuf::from(maze));
        t.env.seed = parse_num("env_seed", get("env_seed"))?;
        t.env.trial_length = parse_num("ticks", get("ticks"))?;
        t.env.replenish_interval = parse_num("replenish_interval", get("replenish_interval"))?;
        t.env.replenish_count = parse_num("replenish_count", get("replenish_count"))?;
        t.env.initial_food = parse_num("initial_food", get("initial_food"))?;
        t.rl.gamma = parse_num("gamma", get("gamma"))?;
        t.rl.vi_tolerance = parse_num("vi_tolerance", get("vi_tolerance"))?;
        t.rl.vi_max_iter = parse_num("vi_max_iter", get("vi_max_iter"))?;
        t.rl.empty_reward = parse_num("empty_reward", get("empty_reward"))?;
        t.rl.norm = match get("norm") {
            "euclidean" => DistanceNorm::Euclidean,
            "manhattan" => DistanceNorm::Manhattan,
            other => return Err(CliError::Config(format!("norm = {other:?}: expected euclidean or manhattan"))),
        };
        t.stabilization_threshold = parse_num("stabilization_threshold", get("stabilization_threshold"))?;
        t.likelihood = get("likelihood").parse::<Likelihood>().map_err(CliError::Config)?;
        t.sequence_learning = parse_num("sequence_learning", get("sequence_learning"))?;
        t.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let window: u64 = parse_num("window", get("window"))?;
        if window == 0 {
            return Err(CliError::Config("window must be positive".into()));
        }
        let grid = Grid::parse(get("grid"))?;
        let seeds: u64 = parse_num("seeds", get("seeds"))?;
        if seeds == 0 {
            return Err(CliError::Config("seeds must be positive".into()));
        }
        Ok(Self { values, template: t, window, grid, seeds })
    }

    /// Canonical `key = value` text; feeding it back through `--config`
    /// reproduces these settings.
    pub fn to_conf(&self) -> String {
        DEFAULTS
            .iter()
            .map(|(k, _)| format!("{k} = {}\n", self.values.get(*k).map(String::as_str).unwrap_or("")))
            .collect()
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let first = self.template.seed;
        SweepSpec {
            alphas: self.grid.alphas.clone(),
            depths: self.grid.depths.clone(),
            deltas: self.grid.deltas.clone(),
            seeds: (first..first + self.seeds).collect(),
            template: self.template.clone(),
        }
    }
}
