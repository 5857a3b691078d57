//! Synchronous value iteration over a scoped state space.

use crate::grid_world::{Action, MazeState};
use crate::rl::scope::{reward, transition, RLState, RewardModel, ScopedStateSpace};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable<T> {
    /// Aligned with the scope's state order.
    pub values: Vec<T>,
    pub gamma: T,
    pub tolerance: T,
    pub iterations_used: usize,
    /// Last max |V_{k+1} - V_k|.
    pub residual: T,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    /// Aligned with the scope's state order.
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig<T> {
    pub gamma: T,
    pub tolerance: T,
    pub max_iter: usize,
    pub rewards: RewardModel<T>,
}

impl<T: Scalar> Default for PlannerConfig<T> {
    fn default() -> Self {
        Self { gamma: T::lit(0.9), tolerance: T::lit(1e-6), max_iter: 10_000, rewards: RewardModel::default() }
    }
}

/// One precomputed edge of the deterministic model.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge<T> {
    next: usize,
    reward: T,
}

/// A solved planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan<T> {
    pub scope: ScopedStateSpace,
    pub values: ValueTable<T>,
    pub policy: Policy,
    edges: Vec<[Edge<T>; 3]>,
}

impl<T: Scalar> Plan<T> {
    pub fn action(&self, s: &RLState) -> Option<Action> {
        self.scope.index_of(s).map(|i| self.policy.actions[i])
    }

    pub fn value(&self, s: &RLState) -> Option<T> {
        self.scope.index_of(s).map(|i| self.values.values[i])
    }

    /// One-step lookahead `R + γ V(s')` for each action, in [`Action::ALL`] order.
    pub fn action_values(&self, s: &RLState) -> Option<[T; 3]> {
        let i = self.scope.index_of(s)?;
        Some(q_values(&self.edges[i], &self.values.values, self.values.gamma))
    }

    /// Largest violation of `V(s) = max_a Q(s, a)` over the scope.
    pub fn bellman_residual(&self) -> T {
        self.edges
            .iter()
            .zip(&self.values.values)
            .map(|(e, v)| {
                let best = q_values(e, &self.values.values, self.values.gamma).into_iter().fold(T::neg_infinity(), T::max);
                (best - *v).abs()
            })
            .fold(T::zero(), T::max)
    }
}

fn q_values<T: Scalar>(edges: &[Edge<T>; 3], v: &[T], gamma: T) -> [T; 3] {
    edges.map(|e| e.reward + gamma * v[e.next])
}

/// First action attaining the maximum, so ties resolve Step < TurnLeft < TurnRight.
fn greedy<T: Scalar>(q: [T; 3]) -> Action {
    let mut best = 0;
    for i in 1..3 {
        if q[i] > q[best] {
            best = i;
        }
    }
    Action::ALL[best]
}

/// Builds the scoped model and runs synchronous Bellman backups from
/// `V = 0` until the max residual is at most `tolerance` or `max_iter`
/// sweeps have run. Successors outside the scope become self-loops paying
/// the empty-cell reward. The greedy policy is returned either way;
/// `values.converged` reports which stop condition fired.
pub fn value_iteration<T: Scalar>(scope: ScopedStateSpace, maze: &MazeState, config: &PlannerConfig<T>) -> Plan<T> {
    let edges: Vec<[Edge<T>; 3]> = scope
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Action::ALL.map(|a| {
                let (next, blocked) = transition(*s, a, maze);
                match scope.index_of(&next) {
                    Some(j) => Edge { next: j, reward: reward(next, a, blocked, maze, &config.rewards) },
                    None => Edge { next: i, reward: config.rewards.empty },
                }
            })
        })
        .collect();

    let gamma = config.gamma;
    let mut v = vec![T::zero(); scope.len()];
    let mut next = v.clone();
    let mut iterations = 0;
    let mut residual = T::infinity();
    let mut converged = false;
    while iterations < config.max_iter {
        residual = T::zero();
        for (i, e) in edges.iter().enumerate() {
            let best = q_values(e, &v, gamma).into_iter().fold(T::neg_infinity(), T::max);
            residual = residual.max((best - v[i]).abs());
            next[i] = best;
        }
        std::mem::swap(&mut v, &mut next);
        iterations += 1;
        if residual <= config.tolerance {
            converged = true;
            break;
        }
    }
    if scope.is_empty() {
        converged = true;
        residual = T::zero();
    }
    let actions = edges.iter().map(|e| greedy(q_values(e, &v, gamma))).collect();
    Plan {
        scope,
        values: ValueTable { values: v, gamma, tolerance: config.tolerance, iterations_used: iterations, residual, converged },
        policy: Policy { actions },
        edges,
    }
}
