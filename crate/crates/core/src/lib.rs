//! Enactive sequential learning and a scoped value-iteration baseline in a
//! volatile foraging maze.
//!
//! The agent and planner code is generic over [`Scalar`]; the aliases below
//! fix the common precisions. The [`harness`] runs in `f64`.

pub mod enactive;
pub mod error;
pub mod grid_world;
pub mod harness;
pub mod rl;
mod scalar;

pub use error::{EnvError, HarnessError, MazeError, MemoryError};
pub use scalar::Scalar;

pub type EnactiveAgent64 = enactive::EnactiveAgent<f64>;
pub type EnactiveAgent32 = enactive::EnactiveAgent<f32>;
pub type MotivationModel64 = enactive::MotivationModel<f64>;
pub type RlAgent64 = rl::RlAgent<f64>;
pub type RlAgent32 = rl::RlAgent<f32>;
pub type Plan64 = rl::Plan<f64>;
pub type Plan32 = rl::Plan<f32>;
pub type ValueTable64 = rl::ValueTable<f64>;
pub type RewardModel64 = rl::RewardModel<f64>;
