//! Enactive agent: interactions, weighted interaction memory and the
//! seven-phase decision cycle driven by intrinsic valences.

mod agent;
mod interaction;
mod memory;
mod motivation;

pub use agent::{best_by_context_proclivity, best_by_proclivity, enact, Choice, CycleRecord, Enaction, EnactiveAgent, EnactiveParams, Likelihood, PerformedPrimitive};
pub use interaction::{Interaction, InteractionId, InteractionTree, Outcome, Primitive};
pub use memory::InteractionMemory;
pub use motivation::MotivationModel;
