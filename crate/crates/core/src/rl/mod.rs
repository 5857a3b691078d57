//! Reinforcement-learning baseline: scoped state space, value iteration and
//! an event-driven replanning agent with random-walk exploration.

mod agent;
mod planner;
mod scope;

pub use agent::{Decision, RlAgent, RlParams};
pub use planner::{value_iteration, Plan, PlannerConfig, Policy, ValueTable};
pub use scope::{reward, transition, RLState, RewardModel, ScopedStateSpace};
