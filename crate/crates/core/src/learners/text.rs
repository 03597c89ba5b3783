use crate::presentation::{reorder_block, Item};
use crate::structure::PrefixState;

use super::{Conjecture, Learner};

/// Turns an informant learner into a text learner: on text `σ` it answers
/// what the base learner answers on the reordered informant `σ̄`.
///
/// The reordered informant is laid out class by class, and a new fact
/// usually touches only the last classes, so the base learner is kept at
/// every class boundary and only the changed tail is fed again.
#[derive(Clone)]
pub struct TextLearner {
    base: Box<dyn Learner>,
    positive: PrefixState,
    seen: u64,
    /// Classes at the last refresh, in reordering order.
    classes: Vec<Vec<u64>>,
    /// `checkpoints[c]` has been fed the blocks of `classes[..c]`.
    checkpoints: Vec<Box<dyn Learner>>,
    current: Conjecture,
}

impl TextLearner {
    pub fn new(base: Box<dyn Learner>) -> Self {
        let mut l = TextLearner {
            base,
            positive: PrefixState::new(),
            seen: u64::MAX,
            classes: Vec::new(),
            checkpoints: Vec::new(),
            current: Conjecture::Unknown,
        };
        l.refresh();
        l
    }

    fn refresh(&mut self) {
        if self.seen == self.positive.version() {
            return;
        }
        self.seen = self.positive.version();
        if self.checkpoints.is_empty() {
            self.base.reset();
            self.checkpoints.push(self.base.clone_box());
        }
        let classes = self.positive.classes();
        let keep = classes
            .iter()
            .zip(&self.classes)
            .take_while(|(a, b)| a == b)
            .count();
        self.checkpoints.truncate(keep + 1);
        let mut l = self.checkpoints[keep].clone_box();
        for c in keep..classes.len() {
            for item in reorder_block(&classes, c) {
                l.feed(&item);
            }
            self.checkpoints.push(l.clone_box());
        }
        self.current = l.current();
        self.classes = classes;
    }
}

impl Learner for TextLearner {
    fn name(&self) -> String {
        format!("txt({})", self.base.name())
    }

    fn reset(&mut self) {
        self.positive = PrefixState::new();
        self.seen = u64::MAX;
        self.classes.clear();
        self.checkpoints.clear();
        self.refresh();
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if let Item::Pos(..) = item {
            self.positive.push(item).expect("positive facts never conflict");
            self.refresh();
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
    use crate::character::Character;
    use crate::extnat::{Fin, Omega};
    use crate::learners::{Constant, TwoStage};
    use crate::presentation::Item::{Pause, Pos};

    #[test]
    fn constant_base_stays_constant() {
        let c = Character::listed(&[(5, Omega)]);
        let mut l = TextLearner::new(Box::new(Constant(c.clone())));
        assert_eq!(l.current(), c.clone().into());
        assert_eq!(l.feed(&Pos(0, 1)), c.into());
    }

    #[test]
    fn reordering_supplies_negatives() {
        let mut l = TextLearner::new(Box::new(TwoStage::new()));
        assert_eq!(l.feed(&Pos(0, 0)), Character::infinite_classes(Fin(1)).into());
        assert_eq!(l.feed(&Pause), Character::infinite_classes(Fin(1)).into());
        assert_eq!(l.feed(&Pos(1, 1)), Character::infinite_classes(Fin(2)).into());
    }

    #[test]
    fn checkpoints_match_a_full_rebuild() {
        use crate::corpus::example_one;
        use crate::learners::{conjecture_on, LearnerMStar};
        use crate::presentation::{fair_text, reorder_to_informant, take_prefix, Prefix};

        let fam = example_one();
        let base = LearnerMStar::new(fam.clone()).unwrap();
        for seed in 0..3 {
            let p = take_prefix(&mut fair_text(&fam[seed % 2], seed as u64).unwrap(), 400).unwrap();
            let mut l = TextLearner::new(Box::new(base.clone()));
            for n in 0..p.len() {
                let got = l.feed(&p.items[n]);
                let want = conjecture_on(&base, &reorder_to_informant(&Prefix::new(p.items[..=n].to_vec())).items);
                assert_eq!(got, want, "seed {seed} stage {n}");
            }
        }
    }
}
