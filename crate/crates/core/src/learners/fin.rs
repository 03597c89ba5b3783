use std::sync::Arc;

use crate::character::Character;
use crate::error::{Error, Result};
use crate::extnat::Fin;
use crate::presentation::Item;
use crate::structure::PrefixState;

use super::{Conjecture, Learner};

/// Largest total size tried by the exhaustive search in [`auto_k`].
const K_SEARCH_LIMIT: u64 = 24;
/// Node budget for the relaxed embedding search.
const EMBED_BUDGET: usize = 100_000;

fn profile_character(parts: &[u64]) -> Character {
    Character::from_sizes(parts.iter().copied()).expect("parts are >= 1")
}

fn distinguishes(parts: &[u64], a: &Character, others: &[&Character]) -> bool {
    let c = profile_character(parts);
    c.embeds(a) && others.iter().all(|b| !c.embeds(b))
}

/// Partitions of `n` into parts `<= max`, each in non-increasing order.
fn partitions(n: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for p in (1..=max.min(n)).rev() {
        prefix.push(p);
        partitions(n - p, p, prefix, out);
        prefix.pop();
    }
}

/// Smallest finite substructure of `a` (block sizes, largest first) that
/// embeds into no member of `others`: least total size, then least
/// profile lexicographically.
pub fn auto_k(a: &Character, others: &[&Character]) -> Result<Vec<u64>> {
    let cap = std::iter::once(a)
        .chain(others.iter().copied())
        .map(|c| c.max_listed_size())
        .max()
        .unwrap_or(0)
        + 1;
    for n in 1..=K_SEARCH_LIMIT {
        let mut found = Vec::new();
        partitions(n, cap, &mut Vec::new(), &mut found);
        found.sort();
        if let Some(p) = found.into_iter().find(|p| distinguishes(p, a, others)) {
            return Ok(p);
        }
    }
    constructive_k(a, others, cap)
}

/// For each other member pick a threshold `t` with more classes of size
/// `>= t` in `a`, then stack the demands.
fn constructive_k(a: &Character, others: &[&Character], cap: u64) -> Result<Vec<u64>> {
    let mut demands: Vec<(u64, u64)> = Vec::new();
    for b in others {
        let best = (1..=cap)
            .filter_map(|t| {
                let theirs = b.cumulative(Fin(t)).ok()?.finite()?;
                (a.cumulative(Fin(t)).ok()? > Fin(theirs)).then_some((t, theirs + 1))
            })
            .min_by_key(|&(t, need)| t * need)
            .ok_or_else(|| Error::Precondition(format!("{a} finitely embeds into {b}")))?;
        demands.push(best);
    }
    demands.sort_unstable_by(|x, y| y.cmp(x));
    let mut parts = Vec::new();
    for (t, need) in demands {
        while (parts.len() as u64) < need {
            parts.push(t);
        }
    }
    if !distinguishes(&parts, a, others) {
        return Err(Error::Precondition(format!("no finite distinguishing part for {a}")));
    }
    Ok(parts)
}

/// Whether the parts map to distinct, pairwise explicitly separated
/// classes of the decoded prefix, each at least as large as its part.
fn relaxed_embeds(parts: &[u64], state: &PrefixState) -> bool {
    let roots = state.class_roots();
    let mut chosen: Vec<usize> = Vec::new();
    let mut budget = EMBED_BUDGET;
    fn go(
        parts: &[u64],
        roots: &[(usize, u64)],
        state: &PrefixState,
        chosen: &mut Vec<usize>,
        budget: &mut usize,
    ) -> bool {
        let Some((&need, rest)) = parts.split_first() else {
            return true;
        };
        for &(r, size) in roots {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            if size < need
                || chosen.contains(&r)
                || !chosen.iter().all(|&c| state.roots_separated(c, r))
            {
                continue;
            }
            chosen.push(r);
            if go(rest, roots, state, chosen, budget) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(parts, &roots, state, &mut chosen, &mut budget)
}

/// Outputs `?` until some `K(A)` shows up in the prefix, then `A` forever.
#[derive(Debug, Clone)]
pub struct FinLearner {
    family: Arc<Vec<Character>>,
    k: Arc<Vec<Vec<u64>>>,
    state: PrefixState,
    decided: Option<usize>,
}

impl FinLearner {
    /// Computes every `K(A)` automatically.
    pub fn new(family: Vec<Character>) -> Result<Self> {
        let k = (0..family.len())
            .map(|i| {
                let others: Vec<&Character> =
                    family.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| c).collect();
                auto_k(&family[i], &others)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_k(family, k)
    }

    pub fn with_k(family: Vec<Character>, k: Vec<Vec<u64>>) -> Result<Self> {
        if k.len() != family.len() {
            return Err(Error::Precondition("one K per member".into()));
        }
        Ok(FinLearner {
            family: Arc::new(family),
            k: Arc::new(k),
            state: PrefixState::new(),
            decided: None,
        })
    }

    pub fn k(&self) -> &[Vec<u64>] {
        &self.k
    }
}

impl Learner for FinLearner {
    fn name(&self) -> String {
        "fin".into()
    }

    fn reset(&mut self) {
        self.state = PrefixState::new();
        self.decided = None;
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if self.decided.is_none() && self.state.push(item).is_ok() && *item != Item::Pause {
            self.decided = (0..self.family.len()).find(|&i| relaxed_embeds(&self.k[i], &self.state));
        }
        self.current()
    }

    fn current(&self) -> Conjecture {
        self.decided
            .map_or(Conjecture::Unknown, |i| Conjecture::Char(self.family[i].clone()))
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::Omega;
    use crate::presentation::Item::{Neg, Pos};

    fn example1() -> Vec<Character> {
        vec![
            Character::listed(&[(5, Omega), (6, Fin(2))]),
            Character::listed(&[(5, Omega), (7, Fin(1))]),
        ]
    }

    #[test]
    fn example_one_parts() {
        let l = FinLearner::new(example1()).unwrap();
        assert_eq!(l.k(), &[vec![6, 6], vec![7]]);
    }

    #[test]
    fn not_an_antichain_is_rejected() {
        let fam = vec![Character::listed(&[(5, Omega)]), Character::listed(&[(6, Omega)])];
        assert!(matches!(FinLearner::new(fam), Err(Error::Precondition(_))));
    }

    #[test]
    fn constructive_fallback_agrees_on_small_case() {
        let fam = example1();
        let p = constructive_k(&fam[0], &[&fam[1]], 8).unwrap();
        assert_eq!(p, vec![6, 6]);
    }

    #[test]
    fn needs_explicit_separation() {
        let fam = example1();
        let mut l = FinLearner::new(fam.clone()).unwrap();
        for x in 1..6 {
            l.feed(&Pos(0, x));
            l.feed(&Pos(10, 10 + x));
        }
        assert_eq!(l.current(), Conjecture::Unknown);
        assert_eq!(l.feed(&Neg(0, 10)), fam[0].clone().into());
        l.feed(&Pos(20, 21));
        assert_eq!(l.current(), fam[0].clone().into());
    }

    #[test]
    fn single_seven_block_decides() {
        let fam = example1();
        let mut l = FinLearner::new(fam.clone()).unwrap();
        for x in 1..7 {
            l.feed(&Pos(0, x));
        }
        assert_eq!(l.current(), fam[1].clone().into());
    }
}
