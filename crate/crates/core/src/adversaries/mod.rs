//! Presentations built against a learner: the limit adversary, the
//! expansionary-stage diagonalizer, locking-sequence search and the text
//! adversary for `{[ω:1], [ω:2]}`.

mod diagonal;
mod limit;
mod locking;
mod text;

use std::collections::BTreeMap;

use crate::character::Character;
use crate::extnat::{ExtNat, Fin};
use crate::presentation::Item;

pub use diagonal::{diagonalizer, Branch, DiagonalReport};
pub use limit::{limit_adversary, LimitRun, LimitSummary};
pub use locking::{locking_transform, weak_locking_search, LockingTransform, LockingVerdict, SearchMode};
pub use text::{txt_adversary, TextRun, TextVerdict};

/// A finite structure under construction, one element at a time, with the
/// informant (or text) items that describe each new element.
#[derive(Debug, Clone, Default)]
pub(crate) struct Builder {
    class_of: Vec<usize>,
    sizes: Vec<u64>,
    text: bool,
}

impl Builder {
    pub fn new(text: bool) -> Self {
        Builder {
            text,
            ..Default::default()
        }
    }

    pub fn len(&self) -> u64 {
        self.class_of.len() as u64
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn character(&self) -> Character {
        Character::from_sizes(self.sizes.iter().copied()).expect("classes are nonempty")
    }

    /// Adds one element to `class` (or to a new class) and returns the
    /// labels of every pair it forms with itself and earlier elements.
    pub fn add(&mut self, class: Option<usize>) -> (usize, Vec<Item>) {
        let x = self.len();
        let c = match class {
            Some(c) => {
                self.sizes[c] += 1;
                c
            }
            None => {
                self.sizes.push(1);
                self.sizes.len() - 1
            }
        };
        self.class_of.push(c);
        let mut items = vec![Item::Pos(x, x)];
        for (y, &d) in self.class_of[..x as usize].iter().enumerate() {
            let y = y as u64;
            if d == c {
                items.push(Item::Pos(y, x));
                items.push(Item::Pos(x, y));
            } else if !self.text {
                items.push(Item::Neg(y, x));
                items.push(Item::Neg(x, y));
            }
        }
        (c, items)
    }

    /// Elements of a new class of size `size`.
    pub fn add_class(&mut self, size: u64) -> Vec<Item> {
        let (c, mut items) = self.add(None);
        for _ in 1..size {
            items.extend(self.add(Some(c)).1);
        }
        items
    }
}

/// Number of classes of each size.
pub(crate) fn size_counts(sizes: &[u64]) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for &s in sizes {
        *out.entry(s).or_default() += 1;
    }
    out
}

/// The least class slot `⟨k, i⟩` of `c` with `i > used[k]`.
pub(crate) fn next_free_slot(c: &Character, used: &BTreeMap<u64, u64>) -> Option<ExtNat> {
    c.classes()
        .find(|comp| match comp.size {
            Fin(k) => comp.index > used.get(&k).copied().unwrap_or(0),
            _ => true,
        })
        .map(|comp| comp.size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Prefix;

    #[test]
    fn builder_emits_consistent_informant() {
        let mut b = Builder::new(false);
        let mut items = b.add_class(3);
        items.extend(b.add_class(1));
        let (s, _) = crate::presentation::structure_from_prefix(&Prefix::new(items)).unwrap();
        assert_eq!(s.block_sizes(), vec![3, 1]);
        assert_eq!(b.character(), Character::listed(&[(3, Fin(1)), (1, Fin(1))]));
    }

    #[test]
    fn free_slots_skip_used_ones() {
        let c = Character::listed(&[(5, crate::extnat::Omega), (2, Fin(1))]);
        let used = BTreeMap::from([(5, 3)]);
        assert_eq!(next_free_slot(&c, &used), Some(Fin(2)));
        let used = BTreeMap::from([(5, 3), (2, 1)]);
        assert_eq!(next_free_slot(&c, &used), Some(Fin(5)));
        assert_eq!(next_free_slot(&Character::listed(&[(2, Fin(1))]), &BTreeMap::from([(2, 1)])), None);
    }
}
