use std::sync::Arc;

use crate::character::Character;
use crate::error::Result;
use crate::presentation::Item;
use crate::separability::{separator_of, Separator};
use crate::structure::PrefixState;

use super::{Conjecture, Learner};

/// Guesses the ≈fin-type: among members into which the prefix finitely
/// embeds, the ↪fin-minimal ones, least list index first.
#[derive(Debug, Clone)]
pub struct LearnerM {
    family: Arc<Vec<Character>>,
    /// `below[i][j]` iff member `i` ↪fin member `j`.
    below: Arc<Vec<Vec<bool>>>,
    state: PrefixState,
    seen: u64,
    prefix_char: Character,
    choice: Option<usize>,
}

impl LearnerM {
    pub fn new(family: Vec<Character>) -> Result<Self> {
        for c in &family {
            c.require_no_infinite_classes()?;
        }
        let below = family
            .iter()
            .map(|a| family.iter().map(|b| a.fin_embeds(b)).collect())
            .collect();
        let mut m = LearnerM {
            family: Arc::new(family),
            below: Arc::new(below),
            state: PrefixState::new(),
            seen: u64::MAX,
            prefix_char: Character::empty(),
            choice: None,
        };
        m.refresh();
        Ok(m)
    }

    pub fn family(&self) -> &[Character] {
        &self.family
    }

    pub(crate) fn state(&self) -> &PrefixState {
        &self.state
    }

    pub(crate) fn prefix_character(&self) -> &Character {
        &self.prefix_char
    }

    /// Index of the chosen representative.
    pub fn choice(&self) -> Option<usize> {
        self.choice
    }

    /// Members ≈fin-equivalent to member `i`.
    pub fn fin_class(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.family.len()).filter(move |&j| self.below[i][j] && self.below[j][i])
    }

    /// Returns whether the decoded structure changed.
    fn refresh(&mut self) -> bool {
        if self.seen == self.state.version() {
            return false;
        }
        self.seen = self.state.version();
        self.prefix_char = self.state.character();
        let hosts: Vec<usize> = (0..self.family.len())
            .filter(|&i| self.prefix_char.fin_embeds(&self.family[i]))
            .collect();
        self.choice = hosts
            .iter()
            .copied()
            .find(|&i| !hosts.iter().any(|&j| self.below[j][i] && !self.below[i][j]));
        true
    }

    fn push(&mut self, item: &Item) -> bool {
        if self.state.push(item).is_err() {
            self.choice = None;
            return false;
        }
        self.refresh()
    }
}

impl Learner for LearnerM {
    fn name(&self) -> String {
        "M".into()
    }

    fn reset(&mut self) {
        self.state = PrefixState::new();
        self.seen = u64::MAX;
        self.refresh();
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        self.push(item);
        self.current()
    }

    fn current(&self) -> Conjecture {
        match self.choice {
            Some(i) if self.state.is_consistent() => Conjecture::Char(self.family[i].clone()),
            _ => Conjecture::Unknown,
        }
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Runs [`LearnerM`] for the ≈fin-class, then picks the member whose
/// separator has been realized without interruption for longest.
#[derive(Debug, Clone)]
pub struct LearnerMStar {
    m: LearnerM,
    separators: Arc<Vec<Separator>>,
    /// Stage since which each member's separator is continuously realized.
    since: Vec<Option<usize>>,
    current: Conjecture,
}

impl LearnerMStar {
    pub fn new(family: Vec<Character>) -> Result<Self> {
        let m = LearnerM::new(family)?;
        let separators = m
            .family()
            .iter()
            .map(|c| separator_of(c, m.family()))
            .collect::<Result<Vec<_>>>()?;
        let mut l = LearnerMStar {
            since: vec![None; separators.len()],
            separators: Arc::new(separators),
            m,
            current: Conjecture::Unknown,
        };
        l.update_since();
        l.choose();
        Ok(l)
    }

    pub fn separators(&self) -> &[Separator] {
        &self.separators
    }

    fn update_since(&mut self) {
        let stage = self.m.state().items();
        let c = self.m.prefix_character();
        for (i, sep) in self.separators.iter().enumerate() {
            if sep.realized_by(c) {
                self.since[i].get_or_insert(stage);
            } else {
                self.since[i] = None;
            }
        }
    }

    fn choose(&mut self) {
        self.current = match self.m.choice() {
            Some(rep) if self.m.state().is_consistent() => self
                .m
                .fin_class(rep)
                .filter_map(|i| self.since[i].map(|s| (s, i)))
                .min()
                .map_or(Conjecture::Unknown, |(_, i)| {
                    Conjecture::Char(self.m.family()[i].clone())
                }),
            _ => Conjecture::Unknown,
        };
    }
}

impl Learner for LearnerMStar {
    fn name(&self) -> String {
        "Mstar".into()
    }

    fn reset(&mut self) {
        self.m.reset();
        self.since.iter_mut().for_each(|s| *s = None);
        self.update_since();
        self.choose();
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if self.m.push(item) {
            self.update_since();
            self.choose();
        } else if !self.m.state().is_consistent() {
            self.current = Conjecture::Unknown;
        }
        self.current()
    }

    fn current(&self) -> Conjecture {
        self.current.clone()
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::{Fin, Omega};
    use crate::presentation::Item::{Neg, Pos};

    fn block(start: u64, size: u64) -> Vec<Item> {
        (start + 1..start + size).map(|x| Pos(start, x)).chain([Pos(start, start)]).collect()
    }

    #[test]
    fn m_prefers_least_index_on_empty_history() {
        let fam = vec![
            Character::listed(&[(5, Omega), (2, Fin(1))]),
            Character::listed(&[(5, Omega)]),
        ];
        let m = LearnerM::new(fam.clone()).unwrap();
        assert_eq!(m.current(), fam[0].clone().into());
    }

    #[test]
    fn m_moves_to_the_only_host() {
        let fam = vec![Character::listed(&[(5, Omega)]), Character::listed(&[(6, Omega)])];
        let mut m = LearnerM::new(fam.clone()).unwrap();
        assert_eq!(m.current(), fam[0].clone().into());
        for item in block(0, 6) {
            m.feed(&item);
        }
        assert_eq!(m.current(), fam[1].clone().into());
        for item in block(10, 7) {
            m.feed(&item);
        }
        assert_eq!(m.current(), Conjecture::Unknown);
    }

    #[test]
    fn mstar_singleton_family_answers_at_once() {
        let c = Character::listed(&[(5, Omega)]);
        let mut l = LearnerMStar::new(vec![c.clone()]).unwrap();
        assert_eq!(l.current(), c.clone().into());
        assert_eq!(l.feed(&Pos(0, 1)), c.into());
    }

    #[test]
    fn mstar_inconsistent_prefix_is_unknown() {
        let c = Character::listed(&[(2, Omega)]);
        let mut l = LearnerMStar::new(vec![c]).unwrap();
        l.feed(&Pos(0, 1));
        assert_eq!(l.feed(&Neg(1, 0)), Conjecture::Unknown);
    }

    #[test]
    fn mstar_tracks_oldest_realized_separator() {
        use crate::character::all_sizes_but;
        let fam: Vec<Character> = (1..=3).map(all_sizes_but).collect();
        let mut l = LearnerMStar::new(fam.clone()).unwrap();
        // Blocks of sizes 1 and 3 realize sep(A_2) = {<1,1>, <3,1>}.
        for item in block(0, 1).into_iter().chain(block(1, 3)) {
            l.feed(&item);
        }
        assert_eq!(l.current(), fam[1].clone().into());
        // A block of size 2 now also realizes sep(A_1) and sep(A_3), but
        // sep(A_2) is older.
        for item in block(10, 2) {
            l.feed(&item);
        }
        assert_eq!(l.current(), fam[1].clone().into());
    }
}
