use std::collections::HashMap;

use crate::grid_world::{Action, AgentPose, Cell, DistanceNorm, Heading, MazeState, Position};
use crate::scalar::Scalar;

/// Planner state: a free cell plus the agent's heading on it.
pub type RLState = AgentPose;

/// States whose position lies within `delta` of `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScopedStateSpace {
    pub center: Position,
    pub delta: f64,
    pub norm: DistanceNorm,
    states: Vec<RLState>,
    index: HashMap<RLState, usize>,
}

impl ScopedStateSpace {
    /// Every free position within `delta` of the agent, four headings each,
    /// in row-major then heading order.
    pub fn around(maze: &MazeState, delta: f64, norm: DistanceNorm) -> Self {
        let center = maze.pose.position;
        let states: Vec<RLState> = maze
            .free_positions()
            .filter(|p| norm.within(center, *p, delta))
            .flat_map(|position| Heading::ALL.into_iter().map(move |heading| AgentPose { position, heading }))
            .collect();
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self { center, delta, norm, states, index }
    }

    pub fn states(&self) -> &[RLState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &RLState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &RLState) -> bool {
        self.index.contains_key(s)
    }
}

/// Extrinsic reward constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardModel<T> {
    pub food: T,
    pub empty: T,
    pub obstacle: T,
}

impl<T: Scalar> Default for RewardModel<T> {
    fn default() -> Self {
        Self { food: T::lit(5.0), empty: T::lit(0.04), obstacle: T::lit(-9.0) }
    }
}

impl<T: Scalar> RewardModel<T> {
    pub fn scaled(&self, c: T) -> Self {
        Self { food: self.food * c, empty: self.empty * c, obstacle: self.obstacle * c }
    }
}

/// Deterministic successor of `s` under `a`, and whether a Step was blocked.
pub fn transition(s: RLState, a: Action, maze: &MazeState) -> (RLState, bool) {
    let (next, ok) = maze.resolve(s, a);
    (next, !ok)
}

/// Food reward for stepping onto food, obstacle penalty for a blocked Step,
/// empty-cell reward for everything else.
pub fn reward<T: Scalar>(s_next: RLState, a: Action, blocked: bool, maze: &MazeState, r: &RewardModel<T>) -> T {
    if blocked {
        r.obstacle
    } else if a == Action::Step && maze.cell(s_next.position) == Cell::Food {
        r.food
    } else {
        r.empty
    }
}
