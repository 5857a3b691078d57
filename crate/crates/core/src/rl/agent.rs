use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid_world::{Action, Cell, DistanceNorm, MazeState, Position};
use crate::rl::planner::{value_iteration, Plan, PlannerConfig};
use crate::rl::scope::ScopedStateSpace;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RlParams<T> {
    /// Probability of a uniformly random action instead of the policy.
    pub alpha: T,
    /// Scope radius.
    pub delta: f64,
    pub norm: DistanceNorm,
    pub planner: PlannerConfig<T>,
}

impl<T: Scalar> Default for RlParams<T> {
    fn default() -> Self {
        Self { alpha: T::zero(), delta: 4.0, norm: DistanceNorm::Euclidean, planner: PlannerConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    pub explored: bool,
    pub replanned: bool,
}

/// Model-based agent that plans over the cells within `delta` of itself and
/// replans whenever that view changes.
#[derive(Debug, Clone)]
pub struct RlAgent<T> {
    pub params: RlParams<T>,
    rng: ChaCha8Rng,
    plan: Option<Plan<T>>,
    planned_view: Vec<(Position, Cell)>,
    plans_computed: usize,
}

impl<T: Scalar> RlAgent<T> {
    pub fn new(params: RlParams<T>, seed: u64) -> Self {
        Self { params, rng: ChaCha8Rng::seed_from_u64(seed), plan: None, planned_view: Vec::new(), plans_computed: 0 }
    }

    pub fn plan(&self) -> Option<&Plan<T>> {
        self.plan.as_ref()
    }

    pub fn plans_computed(&self) -> usize {
        self.plans_computed
    }

    /// Re-runs value iteration when the cells within scope (positions or
    /// kinds) differ from those the cached plan was built on. Returns
    /// whether a new plan was computed.
    pub fn replan_if_needed(&mut self, maze: &MazeState) -> bool {
        let view = maze.visible_states(self.params.delta, self.params.norm);
        if self.plan.is_some() && view == self.planned_view {
            return false;
        }
        let scope = ScopedStateSpace::around(maze, self.params.delta, self.params.norm);
        self.plan = Some(value_iteration(scope, maze, &self.params.planner));
        self.planned_view = view;
        self.plans_computed += 1;
        true
    }

    /// Chooses the next action. One uniform draw decides the exploration
    /// branch on every call.
    pub fn act(&mut self, maze: &MazeState) -> Decision {
        let replanned = self.replan_if_needed(maze);
        let coin = T::lit(self.rng.gen::<f64>());
        if coin < self.params.alpha {
            let action = Action::ALL[self.rng.gen_range(0..Action::ALL.len())];
            return Decision { action, explored: true, replanned };
        }
        let action = self
            .plan
            .as_ref()
            .and_then(|p| p.action(&maze.pose))
            .expect("agent pose is always inside its own scope");
        Decision { action, explored: false, replanned }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_world::Heading;

    fn open3() -> MazeState {
        MazeState::load("#####\n#...#\n#.^.#\n#...#\n#####\n").unwrap()
    }

    fn agent(alpha: f64, delta: f64, seed: u64) -> RlAgent<f64> {
        RlAgent::new(RlParams { alpha, delta, ..RlParams::default() }, seed)
    }

    #[test]
    fn cache_hit_when_nothing_changes() {
        let m = open3();
        let mut a = agent(0.0, 5.0, 1);
        assert!(a.replan_if_needed(&m));
        let before = a.plan().cloned();
        assert!(!a.replan_if_needed(&m));
        assert_eq!(a.plan().cloned(), before);
        assert_eq!(a.plans_computed(), 1);
    }

    #[test]
    fn food_inside_scope_redirects_policy() {
        let mut m = open3();
        let mut a = agent(0.0, 5.0, 1);
        a.replan_if_needed(&m);
        m.set_cell(Position::new(2, 3), Cell::Food);
        assert!(a.replan_if_needed(&m));
        // Food is behind the agent: it must turn first, and from the
        // south-facing pose it must step.
        let act = a.plan().unwrap().action(&m.pose).unwrap();
        assert_ne!(act, Action::Step);
        let south = crate::grid_world::AgentPose { heading: Heading::South, ..m.pose };
        assert_eq!(a.plan().unwrap().action(&south), Some(Action::Step));
    }

    #[test]
    fn food_outside_scope_is_ignored() {
        let mut m = MazeState::load("#########\n#^......#\n#########\n").unwrap();
        let mut a = agent(0.0, 2.0, 1);
        a.replan_if_needed(&m);
        let before = a.plan().cloned();
        m.set_cell(Position::new(7, 1), Cell::Food);
        assert!(!a.replan_if_needed(&m));
        assert_eq!(a.plan().cloned(), before);
    }

    #[test]
    fn alpha_zero_follows_policy() {
        let m = open3();
        let mut a = agent(0.0, 5.0, 11);
        for _ in 0..50 {
            let d = a.act(&m);
            assert!(!d.explored);
            assert_eq!(Some(d.action), a.plan().unwrap().action(&m.pose));
        }
    }

    #[test]
    fn alpha_one_is_uniform() {
        let m = open3();
        let mut a = agent(1.0, 5.0, 12);
        let mut counts = [0usize; 3];
        let n = 9000;
        for _ in 0..n {
            let d = a.act(&m);
            assert!(d.explored);
            counts[Action::ALL.iter().position(|x| *x == d.action).unwrap()] += 1;
        }
        let e = n as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (*c as f64 - e).powi(2) / e).sum();
        // 2 dof, p = 0.001
        assert!(chi2 < 13.82, "{counts:?} chi2 {chi2}");
    }

    #[test]
    fn alpha_half_explores_half_the_time() {
        let m = open3();
        let mut a = agent(0.5, 5.0, 13);
        let n = 10_000;
        let explored = (0..n).filter(|_| a.act(&m).explored).count() as f64;
        let sd = (n as f64 * 0.25).sqrt();
        assert!((explored - 5000.0).abs() < 3.0 * sd, "{explored}");
    }
}
