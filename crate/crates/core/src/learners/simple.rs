use crate::character::Character;
use crate::extnat::Fin;
use crate::presentation::Item;
use crate::structure::PrefixState;

use super::{Conjecture, Learner};

/// Always the same character.
#[derive(Debug, Clone)]
pub struct Constant(pub Character);

impl Learner for Constant {
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }

    fn reset(&mut self) {}

    fn feed(&mut self, _: &Item) -> Conjecture {
        self.current()
    }

    fn current(&self) -> Conjecture {
        Conjecture::Char(self.0.clone())
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// `[ω:1]` until a negative fact arrives, `[ω:2]` afterwards.
#[derive(Debug, Clone, Default)]
pub struct TwoStage {
    seen_negative: bool,
}

impl TwoStage {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Learner for TwoStage {
    fn name(&self) -> String {
        "two_stage".into()
    }

    fn reset(&mut self) {
        self.seen_negative = false;
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if let Item::Neg(x, y) = item {
            if x != y {
                self.seen_negative = true;
            }
        }
        self.current()
    }

    fn current(&self) -> Conjecture {
        let n = if self.seen_negative { 2 } else { 1 };
        Conjecture::Char(Character::infinite_classes(Fin(n)))
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Answers by the parity of the number of items fed.
#[derive(Debug, Clone)]
pub struct Parity {
    pub even: Character,
    pub odd: Character,
    fed: u64,
}

impl Parity {
    pub fn new(even: Character, odd: Character) -> Self {
        Parity { even, odd, fed: 0 }
    }
}

impl Learner for Parity {
    fn name(&self) -> String {
        format!("parity({},{})", self.even, self.odd)
    }

    fn reset(&mut self) {
        self.fed = 0;
    }

    fn feed(&mut self, _: &Item) -> Conjecture {
        self.fed += 1;
        self.current()
    }

    fn current(&self) -> Conjecture {
        let c = if self.fed.is_multiple_of(2) { &self.even } else { &self.odd };
        Conjecture::Char(c.clone())
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Switches between two characters on every non-pause item.
#[derive(Debug, Clone)]
pub struct Alternating {
    pub first: Character,
    pub second: Character,
    flips: u64,
}

impl Alternating {
    pub fn new(first: Character, second: Character) -> Self {
        Alternating {
            first,
            second,
            flips: 0,
        }
    }
}

impl Learner for Alternating {
    fn name(&self) -> String {
        format!("alternating({},{})", self.first, self.second)
    }

    fn reset(&mut self) {
        self.flips = 0;
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if *item != Item::Pause {
            self.flips += 1;
        }
        self.current()
    }

    fn current(&self) -> Conjecture {
        let c = if self.flips.is_multiple_of(2) {
            &self.first
        } else {
            &self.second
        };
        Conjecture::Char(c.clone())
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Conjectures `[e:n, 1:ω]` where `n` counts the classes of size exactly `e`.
#[derive(Debug, Clone)]
pub struct ClassCount {
    pub e: u64,
    state: PrefixState,
}

impl ClassCount {
    pub fn new(e: u64) -> Self {
        ClassCount {
            e,
            state: PrefixState::new(),
        }
    }
}

impl Learner for ClassCount {
    fn name(&self) -> String {
        format!("class_count({})", self.e)
    }

    fn reset(&mut self) {
        self.state = PrefixState::new();
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        let _ = self.state.push(item);
        self.current()
    }

    fn current(&self) -> Conjecture {
        if !self.state.is_consistent() {
            return Conjecture::Unknown;
        }
        let n = self.state.size_histogram().get(&self.e).copied().unwrap_or(0);
        Conjecture::Char(Character::listed(&[(self.e, Fin(n)), (1, crate::extnat::Omega)]))
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

/// Least-index member whose character contains the prefix's character.
#[derive(Debug, Clone)]
pub struct SubsetLearner {
    family: Vec<Character>,
    state: PrefixState,
    current: Conjecture,
    seen: u64,
}

impl SubsetLearner {
    pub fn new(family: Vec<Character>) -> Self {
        let mut l = SubsetLearner {
            family,
            state: PrefixState::new(),
            current: Conjecture::Unknown,
            seen: u64::MAX,
        };
        l.refresh();
        l
    }

    fn refresh(&mut self) {
        if self.seen == self.state.version() {
            return;
        }
        self.seen = self.state.version();
        let c = self.state.character();
        self.current = self
            .family
            .iter()
            .find(|m| c.is_subset(m))
            .cloned()
            .map_or(Conjecture::Unknown, Conjecture::Char);
    }
}

impl Learner for SubsetLearner {
    fn name(&self) -> String {
        "subset".into()
    }

    fn reset(&mut self) {
        self.state = PrefixState::new();
        self.seen = u64::MAX;
        self.refresh();
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if self.state.push(item).is_err() {
            self.current = Conjecture::Unknown;
            return Conjecture::Unknown;
        }
        self.refresh();
        self.current()
    }

    fn current(&self) -> Conjecture {
        self.current.clone()
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}
