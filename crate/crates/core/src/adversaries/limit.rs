use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::character::Character;
use crate::error::{Error, Result};
use crate::extnat::{Fin, Omega};
use crate::learners::{Learner, Trace};
use crate::presentation::{Item, Prefix};

use super::{next_free_slot, size_counts, Builder};

/// Hosts searched per class when repairing toward the limit.
const REPAIR_SEARCH: u64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct LimitRun {
    pub prefix: Prefix,
    pub trace: Trace,
    /// Item counts at which the adversary changed target.
    pub phase_switches: Vec<usize>,
    /// What the stream is presenting when the horizon is reached.
    pub target: Character,
    pub limit: Character,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSummary {
    pub learner: String,
    pub stages: usize,
    pub phase_switches: usize,
    pub mind_changes: usize,
    pub target: Character,
    #[serde(rename = "final")]
    pub final_conjecture: crate::learners::Conjecture,
    /// At least `min_changes` mind changes, or wrong at the horizon.
    pub forced: bool,
}

impl LimitRun {
    pub fn mind_changes(&self) -> usize {
        self.trace.mind_changes()
    }

    pub fn final_correct(&self) -> bool {
        self.trace
            .last()
            .and_then(|c| c.character())
            .is_some_and(|c| c.iso_eq(&self.target))
    }

    pub fn forced(&self, min_changes: usize) -> bool {
        self.mind_changes() >= min_changes || !self.final_correct()
    }

    pub fn summary(&self, learner: &str, min_changes: usize) -> LimitSummary {
        LimitSummary {
            learner: learner.to_string(),
            stages: self.trace.conjectures.len(),
            phase_switches: self.phase_switches.len(),
            mind_changes: self.mind_changes(),
            target: self.target.clone(),
            final_conjecture: self.trace.last().cloned().unwrap_or_default(),
            forced: self.forced(min_changes),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Presenting the limit; `fresh` counts new classes added in this phase.
    Limit { repaired: bool, fresh: u64 },
    Witness(usize),
}

struct Run<'a> {
    learner: &'a mut dyn Learner,
    builder: Builder,
    items: Vec<Item>,
    trace: Trace,
    horizon: usize,
}

impl Run<'_> {
    fn emit(&mut self, items: Vec<Item>) {
        for item in items {
            if self.items.len() >= self.horizon {
                return;
            }
            self.trace.push(self.learner.feed(&item));
            self.items.push(item);
        }
    }

    fn done(&self) -> bool {
        self.items.len() >= self.horizon
    }

    fn conjectures(&self, c: &Character) -> bool {
        self.learner.current().character().is_some_and(|g| g.iso_eq(c))
    }
}

/// Classes to grow as (class, host size), and hosts taken per size.
type RepairPlan = (Vec<(usize, u64)>, BTreeMap<u64, u64>);

/// Assigns every current class a host size in `limit`, largest classes
/// first, oldest first among equals, smallest feasible host each time.
fn repair_plan(sizes: &[u64], limit: &Character, stage: usize) -> Result<RepairPlan> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), c));
    let mut used: BTreeMap<u64, u64> = BTreeMap::new();
    let mut grow = Vec::new();
    for c in order {
        let s = sizes[c];
        let host = (s..s + REPAIR_SEARCH)
            .find(|&h| match limit.count_at(h) {
                Omega => true,
                Fin(n) => used.get(&h).copied().unwrap_or(0) < n,
            })
            .ok_or(Error::NoLegalWitness { stage })?;
        *used.entry(host).or_default() += 1;
        if host > s {
            grow.push((c, host));
        }
    }
    Ok((grow, used))
}

/// Builds an informant that alternates between presenting `limit` and a
/// witness from `fam`, switching whenever the learner guesses the current
/// target at a class boundary. Witness phases never grow existing classes.
pub fn limit_adversary(
    learner: &mut dyn Learner,
    limit: &Character,
    fam: &[Character],
    horizon: usize,
) -> Result<LimitRun> {
    limit.require_no_infinite_classes()?;
    let eligible = |w: &Character| !w.iso_eq(limit) && w.fin_embeds(limit);
    if !fam.iter().any(|w| eligible(w) && limit.is_subset(w)) {
        return Err(Error::Precondition(format!("{limit} is not a limit of the family")));
    }
    learner.reset();
    let mut run = Run {
        learner,
        builder: Builder::new(false),
        items: Vec::new(),
        trace: Trace::default(),
        horizon,
    };
    let mut phase = Phase::Limit {
        repaired: true,
        fresh: 0,
    };
    let mut switches = Vec::new();
    let mut next_witness = 0;
    let mut jobs: VecDeque<(Option<usize>, u64)> = VecDeque::new();
    let mut used: BTreeMap<u64, u64> = BTreeMap::new();

    while !run.done() {
        if let Some((class, size)) = jobs.pop_front() {
            let items = match class {
                None => run.builder.add_class(size),
                Some(c) => {
                    let mut items = Vec::new();
                    while run.builder.sizes()[c] < size {
                        items.extend(run.builder.add(Some(c)).1);
                    }
                    items
                }
            };
            run.emit(items);
            continue;
        }
        // Class boundary: every class has its planned size.
        let stage = run.items.len();
        match phase {
            Phase::Limit { repaired: false, .. } => {
                let (grow, plan) = repair_plan(run.builder.sizes(), limit, stage)?;
                used = plan;
                jobs.extend(grow.into_iter().map(|(c, h)| (Some(c), h)));
                phase = Phase::Limit {
                    repaired: true,
                    fresh: 0,
                };
            }
            Phase::Limit { fresh, .. } if fresh > 0 && run.conjectures(limit) => {
                let current = run.builder.character();
                let pick = (0..fam.len())
                    .map(|k| (next_witness + k) % fam.len())
                    .find(|&i| eligible(&fam[i]) && current.is_subset(&fam[i]))
                    .ok_or(Error::NoLegalWitness { stage })?;
                next_witness = pick + 1;
                switches.push(stage);
                used = size_counts(run.builder.sizes());
                phase = Phase::Witness(pick);
            }
            Phase::Limit { fresh, .. } => match next_free_slot(limit, &used) {
                Some(Fin(k)) => {
                    *used.entry(k).or_default() += 1;
                    jobs.push_back((None, k));
                    phase = Phase::Limit {
                        repaired: true,
                        fresh: fresh + 1,
                    };
                }
                _ => run.emit(vec![Item::Pos(0, 0)]),
            },
            Phase::Witness(i) if run.conjectures(&fam[i]) => {
                switches.push(stage);
                phase = Phase::Limit {
                    repaired: false,
                    fresh: 0,
                };
            }
            Phase::Witness(i) => match next_free_slot(&fam[i], &used) {
                Some(Fin(k)) => {
                    *used.entry(k).or_default() += 1;
                    jobs.push_back((None, k));
                }
                Some(Omega) => return Err(Error::InfiniteClasses),
                None => run.emit(vec![Item::Pos(0, 0)]),
            },
        }
    }
    let target = match phase {
        Phase::Limit { .. } => limit.clone(),
        Phase::Witness(i) => fam[i].clone(),
    };
    Ok(LimitRun {
        prefix: Prefix::new(run.items),
        trace: run.trace,
        phase_switches: switches,
        target,
        limit: limit.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{Alternating, Constant, LearnerMStar, SubsetLearner};
    use crate::presentation::structure_from_prefix;

    fn family() -> (Character, Character) {
        (
            Character::listed(&[(5, Omega)]),
            Character::listed(&[(5, Omega), (2, Fin(1))]),
        )
    }

    #[test]
    fn constant_limit_guess_is_left_wrong() {
        let (a, s) = family();
        let mut l = Constant(a.clone());
        let run = limit_adversary(&mut l, &a, std::slice::from_ref(&s), 3000).unwrap();
        assert_eq!(run.target, s);
        assert!(run.forced(5));
        assert_eq!(run.phase_switches.len(), 1);
        let (f, _) = structure_from_prefix(&run.prefix).unwrap();
        assert!(f.character().embeds(&s));
    }

    #[test]
    fn constant_witness_guess_never_switches() {
        let (a, s) = family();
        let mut l = Constant(s.clone());
        let run = limit_adversary(&mut l, &a, &[s], 2000).unwrap();
        assert_eq!(run.target, a);
        assert!(run.phase_switches.is_empty());
        assert!(run.forced(5));
    }

    #[test]
    fn subset_learner_is_forced_to_change_its_mind() {
        let (a, s) = family();
        let mut l = SubsetLearner::new(vec![a.clone(), s.clone()]);
        let run = limit_adversary(&mut l, &a, &[s], 10_000).unwrap();
        assert!(run.mind_changes() >= 5);
        assert!(run.phase_switches.len() >= 5);
    }

    #[test]
    fn mstar_is_wrong_or_wavers() {
        let (a, s) = family();
        let mut l = LearnerMStar::new(vec![a.clone(), s.clone()]).unwrap();
        let run = limit_adversary(&mut l, &a, &[s], 10_000).unwrap();
        assert!(run.forced(5));
    }

    #[test]
    fn every_prefix_is_consistent() {
        let (a, s) = family();
        let mut l = Alternating::new(a.clone(), s.clone());
        let run = limit_adversary(&mut l, &a, &[s], 5000).unwrap();
        assert!(run.prefix.decode().is_ok());
    }

    #[test]
    fn rejects_non_limits() {
        let (a, s) = family();
        let mut l = Constant(a.clone());
        assert!(matches!(
            limit_adversary(&mut l, &s, &[a], 100),
            Err(Error::Precondition(_))
        ));
    }
}
