use serde::Serialize;

use crate::character::Character;
use crate::error::{Error, Result};
use crate::presentation::{Item, Prefix};

use super::{Conjecture, Learner};

/// How a final conjecture is compared with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Iso,
    Biembed,
}

impl Relation {
    pub fn holds(self, a: &Character, b: &Character) -> bool {
        match self {
            Relation::Iso => a.iso_eq(b),
            Relation::Biembed => a.biembeddable(b),
        }
    }
}

/// Conjectures stage by stage; stage `n` is the answer after item `n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub conjectures: Vec<Conjecture>,
    /// Every change of conjecture.
    pub ex_changes: Vec<usize>,
    /// Changes other than the first move away from `?`.
    pub fin_changes: Vec<usize>,
    committed: bool,
}

impl Trace {
    pub fn push(&mut self, c: Conjecture) {
        let n = self.conjectures.len();
        if let Some(prev) = self.conjectures.last() {
            if *prev != c {
                self.ex_changes.push(n);
                if self.committed {
                    self.fin_changes.push(n);
                }
            }
        }
        if !c.is_unknown() {
            self.committed = true;
        }
        self.conjectures.push(c);
    }

    pub fn last(&self) -> Option<&Conjecture> {
        self.conjectures.last()
    }

    pub fn mind_changes(&self) -> usize {
        self.ex_changes.len()
    }

    /// First stage from which the conjecture never changes again.
    pub fn stable_from(&self) -> usize {
        self.ex_changes.last().copied().unwrap_or(0)
    }

    /// `stage <n>: <conjecture>` per line, `MC` marking mind changes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut changes = self.ex_changes.iter().peekable();
        for (n, c) in self.conjectures.iter().enumerate() {
            out.push_str(&format!("stage {n}: {c}"));
            if changes.peek() == Some(&&n) {
                changes.next();
                out.push_str(" MC");
            }
            out.push('\n');
        }
        out
    }
}

/// The `e` of a Fin-shaped trace: `{e} ⊆ range ⊆ {e, ?}` with no `?` after `e`.
pub fn fin_shape(trace: &Trace) -> Option<Character> {
    let first = trace.conjectures.iter().position(|c| !c.is_unknown())?;
    let e = trace.conjectures[first].character()?;
    trace.conjectures[first..]
        .iter()
        .all(|c| c.character() == Some(e))
        .then(|| e.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "stage")]
pub enum Verdict {
    Converged(usize),
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub learner: String,
    pub stages: usize,
    pub window: usize,
    pub converged: bool,
    pub stage: Option<usize>,
    pub mind_changes: usize,
    #[serde(rename = "final")]
    pub final_conjecture: Conjecture,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub learner: String,
    pub input: Prefix,
    pub trace: Trace,
    pub window: usize,
    pub verdict: Verdict,
}

impl Simulation {
    pub fn converged(&self) -> bool {
        matches!(self.verdict, Verdict::Converged(_))
    }

    pub fn final_conjecture(&self) -> Conjecture {
        self.trace.last().cloned().unwrap_or_default()
    }

    pub fn summary(&self) -> Summary {
        let stage = match self.verdict {
            Verdict::Converged(t) => Some(t),
            Verdict::NotConverged => None,
        };
        Summary {
            learner: self.learner.clone(),
            stages: self.trace.conjectures.len(),
            window: self.window,
            converged: stage.is_some(),
            stage,
            mind_changes: self.trace.mind_changes(),
            final_conjecture: self.final_conjecture(),
        }
    }
}

/// Feeds `items` to a reset learner and judges convergence to `target`:
/// constant over at least the last `window` stages and related to it.
pub fn run_prefix(
    l: &mut dyn Learner,
    items: Prefix,
    target: &Character,
    relation: Relation,
    window: usize,
) -> Simulation {
    l.reset();
    let mut trace = Trace::default();
    for item in &items.items {
        trace.push(l.feed(item));
    }
    let t = trace.stable_from();
    let n = trace.conjectures.len();
    let correct = trace
        .last()
        .and_then(Conjecture::character)
        .is_some_and(|c| relation.holds(c, target));
    let verdict = if n > 0 && correct && n - t >= window.max(1) {
        Verdict::Converged(t)
    } else {
        Verdict::NotConverged
    };
    Simulation {
        learner: l.name(),
        input: items,
        trace,
        window,
        verdict,
    }
}

/// Draws `stages` items from `stream` and runs [`run_prefix`].
pub fn run_simulation(
    l: &mut dyn Learner,
    stream: &mut dyn Iterator<Item = Item>,
    stages: usize,
    target: &Character,
    relation: Relation,
    window: usize,
) -> Result<Simulation> {
    if stages == 0 {
        return Err(Error::Precondition("at least one stage".into()));
    }
    let items = crate::presentation::take_prefix(stream, stages)?;
    Ok(run_prefix(l, items, target, relation, window))
}
