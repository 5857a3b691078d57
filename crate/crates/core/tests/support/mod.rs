//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls into the code under test except to build inputs.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use enactlab::enactive::{InteractionMemory, InteractionTree, Primitive};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random maze text with a walled border and at most `max_free` open cells,
/// some holding food, and one agent marker.
pub fn random_maze<R: Rng>(rng: &mut R, max_free: usize) -> String {
    let w = rng.gen_range(3..=6);
    let h = rng.gen_range(3..=6);
    let mut interior: Vec<(usize, usize)> = (1..=h).flat_map(|y| (1..=w).map(move |x| (x, y))).collect();
    interior.shuffle(rng);
    let free = rng.gen_range(1..=max_free.min(interior.len()));
    let mut grid = vec![vec!['#'; w + 2]; h + 2];
    for (i, (x, y)) in interior.iter().take(free).enumerate() {
        grid[*y][*x] = if i == 0 {
            *['^', '>', 'v', '<'].choose(rng).unwrap()
        } else if rng.gen_bool(0.3) {
            'F'
        } else {
            '.'
        };
    }
    grid.into_iter().map(|r| r.into_iter().collect::<String>() + "\n").collect()
}

/// Grid-level model of a maze text, independent of `MazeState`.
pub struct OracleGrid {
    rows: Vec<Vec<char>>,
}

/// `(x, y, heading)` with headings 0..4 = N, E, S, W.
pub type OraclePose = (i64, i64, usize);

impl OracleGrid {
    pub fn parse(text: &str) -> (Self, OraclePose) {
        let rows: Vec<Vec<char>> = text.lines().filter(|l| !l.is_empty()).map(|l| l.chars().collect()).collect();
        let mut start = None;
        for (y, r) in rows.iter().enumerate() {
            for (x, c) in r.iter().enumerate() {
                if let Some(h) = "^>v<".find(*c) {
                    start = Some((x as i64, y as i64, h));
                }
            }
        }
        (Self { rows }, start.expect("maze has an agent"))
    }

    fn at(&self, x: i64, y: i64) -> char {
        if y < 0 || x < 0 {
            return '#';
        }
        self.rows.get(y as usize).and_then(|r| r.get(x as usize)).copied().unwrap_or('#')
    }

    pub fn free_cells(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for (y, r) in self.rows.iter().enumerate() {
            for (x, c) in r.iter().enumerate() {
                if *c != '#' {
                    out.push((x as i64, y as i64));
                }
            }
        }
        out
    }

    /// Successor and reward for action 0 = step, 1 = left, 2 = right, with
    /// food left in place.
    pub fn step(&self, s: OraclePose, a: usize, food: f64, empty: f64, obstacle: f64) -> (OraclePose, f64) {
        let (x, y, h) = s;
        match a {
            0 => {
                let (dx, dy) = [(0, -1), (1, 0), (0, 1), (-1, 0)][h];
                match self.at(x + dx, y + dy) {
                    '#' => (s, obstacle),
                    'F' => ((x + dx, y + dy, h), food),
                    _ => ((x + dx, y + dy, h), empty),
                }
            }
            1 => ((x, y, (h + 3) % 4), empty),
            _ => ((x, y, (h + 1) % 4), empty),
        }
    }

    /// Best discounted return over every action sequence of length `h` that
    /// starts with each action.
    pub fn enumerate_first_action(&self, s: OraclePose, h: u32, gamma: f64, r: (f64, f64, f64)) -> [f64; 3] {
        let mut best = [f64::NEG_INFINITY; 3];
        let total = 3usize.pow(h);
        for code in 0..total {
            let mut c = code;
            let mut pose = s;
            let mut ret = 0.0;
            let mut disc = 1.0;
            let mut first = 0;
            for k in 0..h {
                let a = c % 3;
                c /= 3;
                if k == 0 {
                    first = a;
                }
                let (next, rew) = self.step(pose, a, r.0, r.1, r.2);
                ret += disc * rew;
                disc *= gamma;
                pose = next;
            }
            if ret > best[first] {
                best[first] = ret;
            }
        }
        best
    }
}

/// Tree-level model of a memory: learned composites with weights and a
/// context, kept as plain trees.
#[derive(Debug, Clone, Default)]
pub struct OracleMemory {
    pub weights: BTreeMap<InteractionTree, u64>,
    pub context: BTreeSet<InteractionTree>,
}

fn prim(p: Primitive) -> InteractionTree {
    InteractionTree::Primitive(p)
}

impl OracleMemory {
    /// Random closed memory: every learned composite's parts are primitives
    /// or learned composites, lengths stay within `depth`.
    pub fn random<R: Rng>(rng: &mut R, composites: usize, depth: usize) -> Self {
        let mut pool: Vec<InteractionTree> = Primitive::ALL.iter().copied().map(prim).collect();
        let mut weights = BTreeMap::new();
        for _ in 0..composites * 4 {
            if weights.len() >= composites {
                break;
            }
            let pre = pool.choose(rng).unwrap().clone();
            let post = pool.choose(rng).unwrap().clone();
            if pre.len() + post.len() > depth {
                continue;
            }
            let c = InteractionTree::pair(pre, post);
            *weights.entry(c.clone()).or_insert(0) += rng.gen_range(1..=5u64);
            if !pool.contains(&c) {
                pool.push(c);
            }
        }
        let context = pool.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
        Self { weights, context }
    }

    /// Loads this model into a fresh arena memory.
    pub fn build(&self, depth: usize) -> InteractionMemory {
        let mut m = InteractionMemory::new(depth);
        for (tree, w) in &self.weights {
            let id = m.intern_tree(tree);
            for _ in 0..*w {
                m.reinforce(id);
            }
        }
        let ctx = self.context.iter().map(|t| m.intern_tree(t)).collect();
        m.set_context(ctx);
        m
    }

    /// `{ a ∈ K : pre(a) ∈ C }` by scanning every learned composite.
    pub fn activate(&self) -> BTreeSet<InteractionTree> {
        self.weights
            .keys()
            .filter(|k| match k {
                InteractionTree::Composite(pre, _) => self.context.contains(pre.as_ref()),
                InteractionTree::Primitive(_) => false,
            })
            .cloned()
            .collect()
    }

    /// `{ post(a) : a ∈ A }`.
    pub fn propose(activated: &BTreeSet<InteractionTree>) -> BTreeSet<InteractionTree> {
        activated
            .iter()
            .filter_map(|a| match a {
                InteractionTree::Composite(_, post) => Some(post.as_ref().clone()),
                InteractionTree::Primitive(_) => None,
            })
            .collect()
    }
}

/// Tree-keyed weights of a memory, for comparisons across cycles.
pub fn weight_map(m: &InteractionMemory) -> BTreeMap<InteractionTree, u64> {
    m.learned().map(|(id, w)| (m.tree(id), w)).collect()
}

/// Runs `cycles` decision cycles with a random depth limit in 2..=20 on a
/// random small maze and checks the memory after every cycle: depth bound,
/// closure of every learned composite, weight monotonicity and the
/// four-primitive alphabet.
pub fn fuzz_memory(seed: u64, cycles: usize) -> Result<(), String> {
    use enactlab::enactive::{EnactiveAgent, EnactiveParams, Likelihood};
    use enactlab::grid_world::{EnvConfig, Environment, MazeState};
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(2..=20usize);
    let alpha = [0.0, 0.1, 0.5, 1.0][rng.gen_range(0..4)];
    let likelihood = if rng.gen_bool(0.5) { Likelihood::Context } else { Likelihood::Sibling };
    let text = random_maze(&mut rng, 12);
    let cfg = EnvConfig { trial_length: u64::MAX / 2, replenish_interval: 50, replenish_count: 2, initial_food: 2, seed, ..EnvConfig::default() };
    let mut env = Environment::new(MazeState::load(&text).unwrap(), cfg).unwrap();
    let params = EnactiveParams { alpha, depth_limit: d, likelihood, ..EnactiveParams::default() };
    let mut agent = EnactiveAgent::<f64>::new(params, seed);
    let mut before: BTreeMap<u32, u64> = BTreeMap::new();
    for cycle in 0..cycles {
        agent.decision_cycle(&mut env).map_err(|e| e.to_string())?;
        let m = &agent.memory;
        let after: BTreeMap<u32, u64> = m.learned().map(|(id, w)| (id.0, w)).collect();
        for (&raw, &w) in &after {
            let id = enactlab::enactive::InteractionId(raw);
            let (Some(pre), Some(post)) = (m.pre(id), m.post(id)) else {
                return Err(format!("cycle {cycle}: primitive {} stored as learned", m.tree(id)));
            };
            if m.len_of(id) > d || m.len_of(id) != m.len_of(pre) + m.len_of(post) {
                return Err(format!("cycle {cycle}: {} breaks the depth bound {d}", m.tree(id)));
            }
            let known = |x: enactlab::enactive::InteractionId| m.is_primitive(x) || after.contains_key(&x.0);
            if !known(pre) || !known(post) {
                return Err(format!("cycle {cycle}: {} has an unknown part", m.tree(id)));
            }
            if w < before.get(&raw).copied().unwrap_or(0) {
                return Err(format!("cycle {cycle}: weight of {} decreased", m.tree(id)));
            }
        }
        if let Some(lost) = before.keys().find(|k| !after.contains_key(*k)) {
            return Err(format!("cycle {cycle}: interaction {lost} was forgotten"));
        }
        before = after;
    }
    let m = &agent.memory;
    for (id, _) in m.learned() {
        let tree = m.tree(id);
        if tree.len() > d {
            return Err(format!("{tree} longer than {d}"));
        }
        for leaf in leaves(&tree) {
            if !Primitive::ALL.contains(&leaf) {
                return Err(format!("leaf {leaf} outside the alphabet"));
            }
        }
    }
    Ok(())
}

fn leaves(t: &InteractionTree) -> Vec<Primitive> {
    match t {
        InteractionTree::Primitive(p) => vec![*p],
        InteractionTree::Composite(a, b) => {
            let mut v = leaves(a);
            v.extend(leaves(b));
            v
        }
    }
}

/// Whether `select` at α = 0 picks the same interaction for the valences
/// scaled by every `c` in `scales`, on a random memory.
pub fn select_is_scale_invariant(seed: u64, scales: &[f64]) -> Result<(), String> {
    use enactlab::enactive::{EnactiveAgent, EnactiveParams, Likelihood, MotivationModel};
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(2..=20usize);
    let n = rng.gen_range(1..40);
    let oracle = OracleMemory::random(&mut rng, n, depth);
    for likelihood in [Likelihood::Sibling, Likelihood::Context] {
        let pick = |c: f64| {
            let memory = oracle.build(depth);
            let proposed = memory.propose(&memory.activate());
            let params = EnactiveParams {
                alpha: 0.0,
                depth_limit: depth,
                motivation: MotivationModel::default().scaled(c),
                likelihood,
                ..EnactiveParams::default()
            };
            let mut agent = EnactiveAgent::<f64>::with_memory(memory, params, seed);
            let (id, _) = agent.select(&proposed);
            agent.memory.tree(id)
        };
        let base = pick(1.0);
        for c in scales {
            let got = pick(*c);
            if got != base {
                return Err(format!("{likelihood:?}: scale {c} picked {got}, unscaled picked {base}"));
            }
        }
    }
    Ok(())
}

/// Compares `activate`/`propose` with the set comprehensions evaluated on
/// the tree model of a random memory.
pub fn set_comprehensions_agree(seed: u64) -> Result<(), String> {
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(2..=20usize);
    let n = rng.gen_range(0..60);
    let oracle = OracleMemory::random(&mut rng, n, depth);
    let memory = oracle.build(depth);
    let activated = memory.activate();
    let got_a: BTreeSet<InteractionTree> = activated.iter().map(|id| memory.tree(*id)).collect();
    let want_a = oracle.activate();
    if got_a != want_a {
        return Err(format!("activate: got {} want {}", got_a.len(), want_a.len()));
    }
    let got_p: BTreeSet<InteractionTree> = memory.propose(&activated).iter().map(|id| memory.tree(*id)).collect();
    let want_p = OracleMemory::propose(&want_a);
    if got_p != want_p {
        return Err(format!("propose: got {} want {}", got_p.len(), want_p.len()));
    }
    Ok(())
}

/// Outcome of one maze in the value-iteration oracle comparison.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleTally {
    pub compared: usize,
    pub skipped_close: usize,
    pub mismatched: usize,
}

/// Plans on a random maze of at most 12 free cells with the planner stopped
/// after `h - 1` sweeps, whose greedy step is then an `h`-step lookahead,
/// and checks every state's greedy action against exhaustive enumeration of
/// all length-`h` action sequences. States whose best two enumerated values
/// are within `margin` are skipped.
pub fn vi_matches_enumeration(seed: u64, h: u32, margin: f64) -> OracleTally {
    use enactlab::grid_world::{AgentPose, DistanceNorm, Heading, MazeState, Position};
    use enactlab::rl::{value_iteration, PlannerConfig, ScopedStateSpace};
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let text = random_maze(&mut rng, 12);
    let maze = MazeState::load(&text).unwrap();
    let (grid, _) = OracleGrid::parse(&text);
    let cfg = PlannerConfig::<f64> { max_iter: (h - 1) as usize, tolerance: 0.0, ..PlannerConfig::default() };
    let r = (cfg.rewards.food, cfg.rewards.empty, cfg.rewards.obstacle);
    let scope = ScopedStateSpace::around(&maze, maze.diagonal(), DistanceNorm::Euclidean);
    let plan = value_iteration(scope, &maze, &cfg);
    let mut tally = OracleTally::default();
    for (x, y) in grid.free_cells() {
        for (hi, heading) in Heading::ALL.into_iter().enumerate() {
            let q = grid.enumerate_first_action((x, y, hi), h, cfg.gamma, r);
            let mut sorted = q;
            sorted.sort_by(|a, b| b.total_cmp(a));
            if sorted[0] - sorted[1] <= margin {
                tally.skipped_close += 1;
                continue;
            }
            let best = (0..3).find(|i| q[*i] == sorted[0]).unwrap();
            let pose = AgentPose { position: Position::new(x as usize, y as usize), heading };
            let got = plan.action(&pose).map(|a| a as usize);
            tally.compared += 1;
            if got != Some(best) {
                tally.mismatched += 1;
            }
        }
    }
    tally
}
