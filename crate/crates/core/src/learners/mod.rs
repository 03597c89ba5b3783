//! Learners: deterministic state machines from prefixes to conjectures.

mod fin;
mod minimal;
mod simple;
mod simulate;
mod text;

use std::fmt;

use serde::Serialize;

use crate::character::Character;
use crate::presentation::Item;

pub use fin::{auto_k, FinLearner};
pub use minimal::{LearnerM, LearnerMStar};
pub use simple::{Alternating, ClassCount, Constant, Parity, SubsetLearner, TwoStage};
pub use simulate::{fin_shape, run_prefix, run_simulation, Relation, Simulation, Summary, Trace, Verdict};
pub use text::TextLearner;

/// A conjectured isomorphism type, or `?`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Conjecture {
    #[default]
    Unknown,
    Char(Character),
}

impl Conjecture {
    pub fn character(&self) -> Option<&Character> {
        match self {
            Conjecture::Char(c) => Some(c),
            Conjecture::Unknown => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Conjecture::Unknown)
    }
}

impl From<Character> for Conjecture {
    fn from(c: Character) -> Self {
        Conjecture::Char(c)
    }
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conjecture::Unknown => write!(f, "?"),
            Conjecture::Char(c) => write!(f, "{c}"),
        }
    }
}

impl Serialize for Conjecture {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Conjecture::Unknown => s.serialize_str("?"),
            Conjecture::Char(c) => c.serialize(s),
        }
    }
}

/// A learner. Same fed history, same conjecture.
pub trait Learner: Send {
    fn name(&self) -> String;
    /// Forget the history.
    fn reset(&mut self);
    /// Read one more item and return the new conjecture.
    fn feed(&mut self, item: &Item) -> Conjecture;
    /// Conjecture on the history fed so far (`?`-free learners answer on
    /// the empty history too).
    fn current(&self) -> Conjecture;
    fn clone_box(&self) -> Box<dyn Learner>;
}

impl Clone for Box<dyn Learner> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Conjecture after feeding `items` to a fresh copy of `l`.
pub fn conjecture_on(l: &dyn Learner, items: &[Item]) -> Conjecture {
    let mut probe = l.clone_box();
    probe.reset();
    for item in items {
        probe.feed(item);
    }
    probe.current()
}
