use serde::Serialize;

use crate::character::Character;
use crate::error::{Error, Result};
use crate::learners::{Conjecture, Learner};
use crate::presentation::{Item, Prefix};
use crate::structure::PrefixState;

/// Which kind of data the extensions may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Informant,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum LockingVerdict {
    /// No extension within the bounds changes the conjecture.
    Candidate { sigma: Vec<String>, depth: usize, width: usize },
    /// `L(σ) != L(τ)` for this consistent extension `τ`.
    Violator { sigma: Vec<String>, tau: Vec<String> },
}

impl LockingVerdict {
    pub fn is_candidate(&self) -> bool {
        matches!(self, LockingVerdict::Candidate { .. })
    }
}

fn lines(items: &[Item]) -> Vec<String> {
    items.iter().map(Item::to_string).collect()
}

/// Whether the decoded prefix can still grow into a presentation of `c`.
pub(crate) fn consistent_with(state: &PrefixState, c: &Character, mode: SearchMode) -> bool {
    if !state.is_consistent() {
        return false;
    }
    match mode {
        SearchMode::Informant => state.character().embeds(c),
        // Without negative data any two classes may still merge.
        SearchMode::Text => c.has_infinite_classes() || state.character().embeds(c),
    }
}

/// Candidate next items on the elements of `state`, in a fixed order.
fn candidate_items(state: &PrefixState, mode: SearchMode) -> Vec<Item> {
    let classes = state.classes();
    let reps: Vec<u64> = classes.iter().map(|c| c[0]).collect();
    let fresh = state.max_name().map_or(0, |m| m + 1);
    let mut out = vec![Item::Pos(fresh, fresh)];
    for &r in &reps {
        out.push(Item::Pos(fresh, r));
        if mode == SearchMode::Informant {
            out.push(Item::Neg(fresh, r));
        }
    }
    for (i, &a) in reps.iter().enumerate() {
        for &b in &reps[i + 1..] {
            if mode == SearchMode::Informant && !state.explicitly_separated(a, b) {
                out.push(Item::Neg(a, b));
            }
            out.push(Item::Pos(a, b));
        }
    }
    if mode == SearchMode::Text {
        out.push(Item::Pause);
    }
    out
}

#[derive(Clone)]
struct Node {
    items: Vec<Item>,
    state: PrefixState,
    learner: Box<dyn Learner>,
}

/// Looks for an extension of `sigma0`, consistent with `c`, on which the
/// learner changes its conjecture. Beam search: `depth` levels, at most
/// `width` items tried per node and `width` nodes kept per level.
pub fn weak_locking_search(
    learner: &dyn Learner,
    c: &Character,
    sigma0: &Prefix,
    depth: usize,
    width: usize,
    mode: SearchMode,
) -> Result<LockingVerdict> {
    let mut state = PrefixState::new();
    let mut l = learner.clone_box();
    l.reset();
    for item in &sigma0.items {
        state.push(item)?;
        l.feed(item);
    }
    if !consistent_with(&state, c, mode) {
        return Err(Error::Precondition(format!("starting prefix is not consistent with {c}")));
    }
    let base = l.current();
    let mut frontier = vec![Node {
        items: sigma0.items.clone(),
        state,
        learner: l,
    }];
    for _ in 0..depth {
        let mut children: Vec<Vec<Node>> = Vec::new();
        for node in &frontier {
            let mut kids = Vec::new();
            for item in candidate_items(&node.state, mode) {
                if kids.len() >= width {
                    break;
                }
                let mut st = node.state.clone();
                if st.push(&item).is_err() || !consistent_with(&st, c, mode) {
                    continue;
                }
                let mut learner = node.learner.clone_box();
                let conj = learner.feed(&item);
                let mut items = node.items.clone();
                items.push(item);
                if conj != base {
                    return Ok(LockingVerdict::Violator {
                        sigma: lines(&sigma0.items),
                        tau: lines(&items),
                    });
                }
                kids.push(Node { items, state: st, learner });
            }
            children.push(kids);
        }
        // Keep the k-th child of every node before any (k+1)-th one.
        let mut next = Vec::new();
        let most = children.iter().map(Vec::len).max().unwrap_or(0);
        for k in 0..most {
            for kids in &mut children {
                if k < kids.len() && next.len() < width {
                    next.push(kids[k].clone());
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(LockingVerdict::Candidate {
        sigma: lines(&sigma0.items),
        depth,
        width,
    })
}

/// `M'(I[n]) = M(σ_n)`: `σ_n` only grows by pieces of the history that
/// make `M` change its mind, so `M'` is locking on every history.
#[derive(Clone)]
pub struct LockingTransform {
    base: Box<dyn Learner>,
    /// `M` after `σ_n`.
    at_sigma: Box<dyn Learner>,
    /// `M` after `σ_n` followed by every history item not yet in `σ_n`.
    probe: Box<dyn Learner>,
    sigma: Vec<Item>,
    pending: Vec<Item>,
}

impl LockingTransform {
    pub fn new(base: Box<dyn Learner>) -> Self {
        let mut at_sigma = base.clone_box();
        at_sigma.reset();
        LockingTransform {
            probe: at_sigma.clone_box(),
            at_sigma,
            base,
            sigma: Vec::new(),
            pending: Vec::new(),
        }
    }

    pub fn sigma(&self) -> &[Item] {
        &self.sigma
    }
}

impl Learner for LockingTransform {
    fn name(&self) -> String {
        format!("locking({})", self.base.name())
    }

    fn reset(&mut self) {
        *self = LockingTransform::new(self.base.clone_box());
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        let now = self.at_sigma.current();
        self.pending.push(*item);
        if self.probe.feed(item) != now {
            self.sigma.append(&mut self.pending);
            self.at_sigma = self.probe.clone_box();
            return self.current();
        }
        if self.pending.len() > 1 {
            let mut single = self.at_sigma.clone_box();
            if single.feed(item) != now {
                self.pending.pop();
                self.sigma.push(*item);
                self.at_sigma = single;
                let mut probe = self.at_sigma.clone_box();
                for p in &self.pending {
                    probe.feed(p);
                }
                self.probe = probe;
            }
        }
        self.current()
    }

    fn current(&self) -> Conjecture {
        self.at_sigma.current()
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

pub fn locking_transform(base: Box<dyn Learner>) -> LockingTransform {
    LockingTransform::new(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::{Fin, Omega};
    use crate::learners::{run_simulation, Constant, LearnerMStar, Relation, TwoStage};
    use crate::presentation::fair_informant;

    #[test]
    fn constant_learner_is_locked_everywhere() {
        let c = Character::listed(&[(5, Omega)]);
        let v = weak_locking_search(&Constant(c.clone()), &c, &Prefix::default(), 20, 4, SearchMode::Informant)
            .unwrap();
        assert!(v.is_candidate());
    }

    #[test]
    fn two_stage_has_a_violator_on_two_classes() {
        let c = Character::infinite_classes(Fin(2));
        let v = weak_locking_search(&TwoStage::new(), &c, &Prefix::default(), 50, 4, SearchMode::Informant)
            .unwrap();
        assert!(!v.is_candidate());
    }

    #[test]
    fn inconsistent_start_is_rejected() {
        let c = Character::listed(&[(1, Omega)]);
        let p = Prefix::new(vec![Item::Pos(0, 1)]);
        assert!(weak_locking_search(&TwoStage::new(), &c, &p, 5, 2, SearchMode::Informant).is_err());
    }

    #[test]
    fn transform_keeps_the_limit() {
        let fam = vec![
            Character::listed(&[(5, Omega), (6, Fin(2))]),
            Character::listed(&[(5, Omega), (7, Fin(1))]),
        ];
        for target in &fam {
            let base = LearnerMStar::new(fam.clone()).unwrap();
            let mut t = locking_transform(Box::new(base.clone()));
            let mut s = fair_informant(target, 3).unwrap();
            let a = run_simulation(&mut t, &mut s, 5000, target, Relation::Iso, 200).unwrap();
            assert!(a.converged());
        }
    }
}
