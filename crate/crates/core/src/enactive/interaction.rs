//! Primitive and composite interactions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grid_world::Action;

/// Result half of a primitive interaction. `Failure` sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Failure,
    Success,
}

impl Outcome {
    pub fn from_success(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Failure
        }
    }
}

/// ⟨experiment, result⟩. Only four exist; turns never fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Primitive {
    experiment: Action,
    result: Outcome,
}

impl Primitive {
    pub const STEP: Primitive = Primitive { experiment: Action::Step, result: Outcome::Success };
    pub const STEP_FAIL: Primitive = Primitive { experiment: Action::Step, result: Outcome::Failure };
    pub const TURN_LEFT: Primitive = Primitive { experiment: Action::TurnLeft, result: Outcome::Success };
    pub const TURN_RIGHT: Primitive = Primitive { experiment: Action::TurnRight, result: Outcome::Success };

    /// In tie-break order.
    pub const ALL: [Primitive; 4] = [Self::STEP_FAIL, Self::STEP, Self::TURN_LEFT, Self::TURN_RIGHT];

    /// `None` for a failing turn, which does not exist.
    pub fn new(experiment: Action, result: Outcome) -> Option<Self> {
        match (experiment, result) {
            (Action::TurnLeft | Action::TurnRight, Outcome::Failure) => None,
            _ => Some(Self { experiment, result }),
        }
    }

    pub fn experiment(self) -> Action {
        self.experiment
    }

    pub fn result(self) -> Outcome {
        self.result
    }

    /// Slot in [`Primitive::ALL`], also the arena id of the primitive.
    pub fn index(self) -> usize {
        match (self.experiment, self.result) {
            (Action::Step, Outcome::Failure) => 0,
            (Action::Step, Outcome::Success) => 1,
            (Action::TurnLeft, _) => 2,
            (Action::TurnRight, _) => 3,
        }
    }

    pub fn id(self) -> InteractionId {
        InteractionId(self.index() as u32)
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.result {
            Outcome::Success => "ok",
            Outcome::Failure => "fail",
        };
        write!(f, "({} {})", self.experiment.name(), r)
    }
}

/// Handle into an [`InteractionMemory`](super::InteractionMemory) arena.
/// Ids 0..4 are the primitives in [`Primitive::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InteractionId(pub u32);

impl InteractionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for InteractionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interaction {
    Primitive(Primitive),
    Composite { pre: InteractionId, post: InteractionId },
}

/// Owned tree form, used by the dump format and by tests that build
/// interactions without an arena.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InteractionTree {
    Primitive(Primitive),
    Composite(Box<InteractionTree>, Box<InteractionTree>),
}

impl InteractionTree {
    pub fn pair(pre: InteractionTree, post: InteractionTree) -> Self {
        InteractionTree::Composite(Box::new(pre), Box::new(post))
    }

    pub fn len(&self) -> usize {
        match self {
            InteractionTree::Primitive(_) => 1,
            InteractionTree::Composite(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parses the s-expression form written by `Display`.
    pub fn parse(text: &str) -> Option<Self> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let tree = parse_tokens(&tokens, &mut pos)?;
        (pos == tokens.len()).then_some(tree)
    }
}

impl fmt::Display for InteractionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionTree::Primitive(p) => write!(f, "{p}"),
            InteractionTree::Composite(a, b) => write!(f, "({a} {b})"),
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
            }
            c => word.push(c),
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Option<InteractionTree> {
    if tokens.get(*pos)? != "(" {
        return None;
    }
    *pos += 1;
    let head = tokens.get(*pos)?;
    if head != "(" {
        let experiment = match head.as_str() {
            "step" => Action::Step,
            "turnl" => Action::TurnLeft,
            "turnr" => Action::TurnRight,
            _ => return None,
        };
        let result = match tokens.get(*pos + 1)?.as_str() {
            "ok" => Outcome::Success,
            "fail" => Outcome::Failure,
            _ => return None,
        };
        if tokens.get(*pos + 2)? != ")" {
            return None;
        }
        *pos += 3;
        return Primitive::new(experiment, result).map(InteractionTree::Primitive);
    }
    let pre = parse_tokens(tokens, pos)?;
    let post = parse_tokens(tokens, pos)?;
    if tokens.get(*pos)? != ")" {
        return None;
    }
    *pos += 1;
    Some(InteractionTree::pair(pre, post))
}
