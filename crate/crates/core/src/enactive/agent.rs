//! The enactive decision cycle: preparation, activation, proposition,
//! selection, enaction, learning and context construction.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enactive::interaction::{InteractionId, Outcome, Primitive};
use crate::enactive::memory::InteractionMemory;
use crate::enactive::motivation::MotivationModel;
use crate::error::EnvError;
use crate::grid_world::{Action, ActionOutcome, Environment};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct EnactiveParams<T> {
    /// Probability of replacing the proclivity choice with a random primitive.
    pub alpha: T,
    /// Foresight: longest composite the agent may build or intend.
    pub depth_limit: usize,
    /// Weight at which a learned composite joins the next context.
    pub stabilization_threshold: u64,
    pub motivation: MotivationModel<T>,
    /// Also learn each pair of consecutive enactions as a sequence that the
    /// previous context can propose.
    pub sequence_learning: bool,
    pub likelihood: Likelihood,
}

impl<T: Scalar> Default for EnactiveParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::zero(),
            depth_limit: 10,
            stabilization_threshold: 2,
            motivation: MotivationModel::default(),
            sequence_learning: true,
            likelihood: Likelihood::default(),
        }
    }
}

/// How `select` estimates the probability part of a proposal's proclivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Likelihood {
    /// The proposal's own occurrence probability: sibling frequency for a
    /// composite, one for a primitive.
    Sibling,
    /// The proposal's share of the weight of the composites activated by the
    /// current context.
    #[default]
    Context,
}

impl Likelihood {
    pub fn name(self) -> &'static str {
        match self {
            Likelihood::Sibling => "sibling",
            Likelihood::Context => "context",
        }
    }
}

impl std::str::FromStr for Likelihood {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sibling" => Ok(Likelihood::Sibling),
            "context" => Ok(Likelihood::Context),
            other => Err(format!("unknown likelihood {other:?}, expected sibling or context")),
        }
    }
}

/// Why `select` returned what it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// The α branch fired.
    Explore,
    /// Nothing was proposed within the depth limit.
    Bootstrap,
    Proclivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerformedPrimitive {
    /// What actually happened, which may differ from the intended leaf.
    pub primitive: Primitive,
    pub outcome: ActionOutcome,
    /// Environment tick during which the primitive was performed.
    pub tick: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enaction {
    pub intended: InteractionId,
    pub enacted: InteractionId,
    pub performed: Vec<PerformedPrimitive>,
}

impl Enaction {
    pub fn succeeded(&self) -> bool {
        self.intended == self.enacted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord<T> {
    pub intended: InteractionId,
    pub enacted: InteractionId,
    pub choice: Choice,
    pub performed: Vec<PerformedPrimitive>,
    /// Valence of each performed primitive, aligned with `performed`.
    pub valences: Vec<T>,
    pub food_eaten: u32,
    pub learned: BTreeSet<InteractionId>,
}

impl<T> CycleRecord<T> {
    pub fn succeeded(&self) -> bool {
        self.intended == self.enacted
    }
}

/// Attempts the leaves of `intended` left to right, one environment tick
/// each, stopping at the first leaf whose actual result differs from the
/// intended one or when the trial runs out of ticks.
///
/// The enacted interaction is `intended` itself when every leaf matched,
/// otherwise the left-fold of what was actually performed.
pub fn enact(memory: &mut InteractionMemory, intended: InteractionId, env: &mut Environment) -> Enaction {
    let leaves = memory.leaves(intended);
    let mut performed = Vec::with_capacity(leaves.len());
    let mut matched = true;
    for leaf in &leaves {
        if env.finished() {
            matched = false;
            break;
        }
        let tick = env.tick();
        let outcome = env.attempt_action(leaf.experiment());
        let actual = Primitive::new(leaf.experiment(), Outcome::from_success(outcome.succeeded))
            .expect("turns never fail");
        env.tick_environment().expect("checked above");
        performed.push(PerformedPrimitive { primitive: actual, outcome, tick });
        if actual != *leaf {
            matched = false;
            break;
        }
    }
    let enacted = if matched {
        intended
    } else {
        let prims: Vec<Primitive> = performed.iter().map(|p| p.primitive).collect();
        memory.left_fold(&prims).expect("at least one primitive performed")
    };
    Enaction { intended, enacted, performed }
}

#[derive(Debug, Clone)]
pub struct EnactiveAgent<T> {
    pub memory: InteractionMemory,
    pub params: EnactiveParams<T>,
    rng: ChaCha8Rng,
    pub last_enacted: Option<InteractionId>,
    previous_context: BTreeSet<InteractionId>,
}

impl<T: Scalar> EnactiveAgent<T> {
    pub fn new(params: EnactiveParams<T>, seed: u64) -> Self {
        Self {
            memory: InteractionMemory::new(params.depth_limit),
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_enacted: None,
            previous_context: BTreeSet::new(),
        }
    }

    /// Rebuilds an agent around an existing memory.
    pub fn with_memory(memory: InteractionMemory, params: EnactiveParams<T>, seed: u64) -> Self {
        Self {
            memory,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_enacted: None,
            previous_context: BTreeSet::new(),
        }
    }

    fn random_primitive(&mut self) -> InteractionId {
        Primitive::ALL[self.rng.gen_range(0..Primitive::ALL.len())].id()
    }

    /// Picks the intended interaction. One uniform draw decides the α
    /// branch on every call, so the draw sequence does not depend on α.
    pub fn select(&mut self, proposed: &BTreeSet<InteractionId>) -> (InteractionId, Choice) {
        let coin = T::lit(self.rng.gen::<f64>());
        if coin < self.params.alpha {
            return (self.random_primitive(), Choice::Explore);
        }
        let scored = match self.params.likelihood {
            Likelihood::Sibling => best_by_proclivity(&self.memory, &self.params.motivation, proposed),
            Likelihood::Context => {
                let activated = self.memory.activate();
                best_by_context_proclivity(&self.memory, &self.params.motivation, proposed, &activated)
            }
        };
        match scored {
            Some(id) => (id, Choice::Proclivity),
            None => (self.random_primitive(), Choice::Bootstrap),
        }
    }

    /// Runs one full decision cycle against `env`.
    pub fn decision_cycle(&mut self, env: &mut Environment) -> Result<CycleRecord<T>, EnvError> {
        if env.finished() {
            return Err(EnvError::TrialExhausted { tick: env.tick(), trial_length: env.config.trial_length });
        }
        let activated = self.memory.activate();
        let proposed = self.memory.propose(&activated);
        let (intended, choice) = self.select(&proposed);
        let enaction = enact(&mut self.memory, intended, env);
        self.memory.ensure_known(enaction.enacted);
        let learned = self.memory.learn(enaction.enacted);
        if let Some(previous) = self.last_enacted.filter(|_| self.params.sequence_learning) {
            self.memory.learn_sequence(&self.previous_context, previous, enaction.enacted);
        }
        let next = self.memory.build_context(enaction.enacted, &learned, self.params.stabilization_threshold);
        self.previous_context = self.memory.context().clone();
        self.memory.set_context(next);
        self.last_enacted = Some(enaction.enacted);

        let valences = enaction
            .performed
            .iter()
            .map(|p| self.params.motivation.primitive(p.primitive))
            .collect();
        let food_eaten = enaction.performed.iter().filter(|p| p.outcome.ate_food).count() as u32;
        Ok(CycleRecord {
            intended,
            enacted: enaction.enacted,
            choice,
            performed: enaction.performed,
            valences,
            food_eaten,
            learned,
        })
    }
}

/// Highest-proclivity candidate, or `None` when nothing within the depth
/// limit was proposed.
///
/// Candidates are the proposals within the depth limit plus, for every
/// experiment that no such proposal starts with, its successful primitive
/// at proclivity zero: an untried experiment is neutral, so a known
/// negative proposal never wins by being the only one on offer.
///
/// Proclivities within a few ulps of the maximum count as tied and the
/// structurally smallest interaction wins, which keeps the choice invariant
/// under rescaling the valences.
pub fn best_by_proclivity<T: Scalar>(
    memory: &InteractionMemory,
    motivation: &MotivationModel<T>,
    proposed: &BTreeSet<InteractionId>,
) -> Option<InteractionId> {
    best_scored(memory, proposed, |p| memory.proclivity(p, motivation).ok())
}

/// As [`best_by_proclivity`], with each proposal's probability taken as its
/// share of the `activated` weight.
pub fn best_by_context_proclivity<T: Scalar>(
    memory: &InteractionMemory,
    motivation: &MotivationModel<T>,
    proposed: &BTreeSet<InteractionId>,
    activated: &BTreeSet<InteractionId>,
) -> Option<InteractionId> {
    best_scored(memory, proposed, |p| {
        memory.is_known(p).then(|| memory.valence(p, motivation) * memory.proposal_probability::<T>(p, activated))
    })
}

fn best_scored<T: Scalar>(
    memory: &InteractionMemory,
    proposed: &BTreeSet<InteractionId>,
    score: impl Fn(InteractionId) -> Option<T>,
) -> Option<InteractionId> {
    let mut scored: Vec<(InteractionId, T)> = proposed
        .iter()
        .filter(|p| memory.len_of(**p) <= memory.depth_limit())
        .filter_map(|p| score(*p).map(|v| (*p, v)))
        .collect();
    if scored.is_empty() {
        return None;
    }
    let covered: Vec<Action> = scored.iter().map(|(p, _)| memory.leaves(*p)[0].experiment()).collect();
    for neutral in [Primitive::STEP, Primitive::TURN_LEFT, Primitive::TURN_RIGHT] {
        if !covered.contains(&neutral.experiment()) {
            scored.push((neutral.id(), T::zero()));
        }
    }
    let max = scored.iter().map(|(_, v)| *v).fold(T::neg_infinity(), T::max);
    let slack = max.abs() * T::epsilon() * T::lit(64.0);
    scored
        .into_iter()
        .filter(|(_, v)| *v >= max - slack)
        .map(|(id, _)| id)
        .min_by(|a, b| memory.cmp_structure(*a, *b))
}
