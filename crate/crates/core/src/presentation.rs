//! Texts, informants and the streams that present a character.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::character::{pair, unpair, Character, ClassSlots};
use crate::error::{Error, Result};
use crate::extnat::{ExtNat, Fin};
use crate::structure::{FiniteStructure, PrefixState};

/// One datum of a text or an informant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    /// `(x, y)` are related.
    Pos(u64, u64),
    /// `(x, y)` are not related; informants only.
    Neg(u64, u64),
    /// No new information; texts only.
    Pause,
}

impl Item {
    pub fn elements(&self) -> Option<(u64, u64)> {
        match *self {
            Item::Pos(x, y) | Item::Neg(x, y) => Some((x, y)),
            Item::Pause => None,
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Pos(x, y) => write!(f, "P {x} {y}"),
            Item::Neg(x, y) => write!(f, "N {x} {y}"),
            Item::Pause => write!(f, "#"),
        }
    }
}

impl FromStr for Item {
    type Err = Error;

    fn from_str(line: &str) -> Result<Item> {
        let mut parts = line.split_whitespace();
        let tag = parts.next().ok_or_else(|| Error::Parse("empty line".into()))?;
        if tag == "#" {
            return match parts.next() {
                None => Ok(Item::Pause),
                Some(extra) => Err(Error::Parse(format!("trailing {extra:?} after pause"))),
            };
        }
        let mut num = || -> Result<u64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("missing element in {line:?}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad element in {line:?}")))
        };
        let (x, y) = (num()?, num()?);
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing data in {line:?}")));
        }
        match tag {
            "P" => Ok(Item::Pos(x, y)),
            "N" => Ok(Item::Neg(x, y)),
            other => Err(Error::Parse(format!("unknown tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrefixKind {
    Text,
    Informant,
}

/// An initial segment of a text or an informant.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Prefix {
    pub items: Vec<Item>,
}

impl Prefix {
    pub fn new(items: Vec<Item>) -> Self {
        Prefix { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `Text` if no negative facts occur, `Informant` if no pauses occur;
    /// `None` when both occur.
    pub fn kind(&self) -> Option<PrefixKind> {
        let neg = self.items.iter().any(|i| matches!(i, Item::Neg(..)));
        let pause = self.items.iter().any(|i| matches!(i, Item::Pause));
        match (neg, pause) {
            (true, true) => None,
            (true, false) => Some(PrefixKind::Informant),
            _ if pause => Some(PrefixKind::Text),
            _ => Some(PrefixKind::Informant),
        }
    }

    /// One item per line: `P x y`, `N x y` or `#`.
    pub fn to_trace(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            out.push_str(&item.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_trace(text: &str) -> Result<Self> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| {
                l.parse::<Item>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))
            })
            .collect::<Result<Vec<_>>>()
            .map(Prefix::new)
    }

    pub fn decode(&self) -> Result<PrefixState> {
        let mut st = PrefixState::new();
        for item in &self.items {
            st.push(item)?;
        }
        Ok(st)
    }
}

impl From<Vec<Item>> for Prefix {
    fn from(items: Vec<Item>) -> Self {
        Prefix::new(items)
    }
}

/// `A_σ` for a prefix, with the map from element names to `{0..n-1}`.
pub fn structure_from_prefix(p: &Prefix) -> Result<(FiniteStructure, BTreeMap<u64, usize>)> {
    Ok(p.decode()?.structure())
}

/// Classes of the positive closure of a text prefix, ordered by least element.
fn text_classes(p: &Prefix) -> Vec<Vec<u64>> {
    let mut st = PrefixState::new();
    for item in &p.items {
        if let Item::Pos(..) = item {
            st.push(item).expect("positive facts never conflict");
        }
    }
    st.classes()
}

/// Rewrites a text prefix as an informant prefix: positive facts of each
/// class in turn, each followed by the assumed negative facts between that
/// class and all earlier ones.
pub fn reorder_to_informant(p: &Prefix) -> Prefix {
    reorder_classes(&text_classes(p))
}

pub(crate) fn reorder_classes(classes: &[Vec<u64>]) -> Prefix {
    Prefix::new((0..classes.len()).flat_map(|c| reorder_block(classes, c)).collect())
}

/// The part of [`reorder_classes`] contributed by class `c`.
pub(crate) fn reorder_block(classes: &[Vec<u64>], c: usize) -> Vec<Item> {
    let class = &classes[c];
    let mut items = Vec::new();
    for &x in class {
        for &y in class {
            items.push(Item::Pos(x, y));
        }
    }
    let mut negs = Vec::new();
    for earlier in &classes[..c] {
        for &e in earlier {
            for &n in class {
                negs.push((e, n));
                negs.push((n, e));
            }
        }
    }
    negs.sort_unstable();
    items.extend(negs.into_iter().map(|(x, y)| Item::Neg(x, y)));
    items
}

/// A presentation: an endless, deterministic source of items.
pub type Stream = Box<dyn Iterator<Item = Item> + Send>;

/// How a fair stream schedules class growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    /// Open a new class every `open_every` allocation rounds.
    pub open_every: u64,
    /// Classes opened before the first round.
    pub initial_classes: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            open_every: 1,
            initial_classes: 1,
        }
    }
}

impl Schedule {
    /// The `k`-th alternative schedule used to vary presentations of the
    /// same structure (`k = 0` is the default).
    pub fn variant(k: u64) -> Self {
        Schedule {
            open_every: 1 + k % 3,
            initial_classes: 1 + k / 3,
        }
    }
}

#[derive(Debug, Clone)]
struct OpenClass {
    target: ExtNat,
    members: Vec<u64>,
}

impl OpenClass {
    fn wants_more(&self) -> bool {
        Fin(self.members.len() as u64) < self.target
    }
}

/// Fair informant or text for a character.
///
/// Elements `0, 1, 2, ...` are handed out to classes round-robin (seeded
/// shuffle within each round, a new class from the slot enumeration every
/// few rounds). Pairs are labelled in Cantor order; each new element is
/// first linked to its class so every prefix decodes to a structure that
/// embeds into the character.
#[derive(Debug, Clone)]
pub struct FairStream {
    text: bool,
    rng: ChaCha8Rng,
    schedule: Schedule,
    slots: ClassSlots,
    slots_done: bool,
    classes: Vec<OpenClass>,
    round: Vec<usize>,
    rounds: u64,
    class_of: Vec<usize>,
    total: Option<u64>,
    pair_code: u128,
    buffer: VecDeque<Item>,
}

impl FairStream {
    pub fn new(c: &Character, seed: u64, text: bool, schedule: Schedule) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyCharacter);
        }
        let mut s = FairStream {
            text,
            rng: ChaCha8Rng::seed_from_u64(seed),
            schedule: Schedule {
                open_every: schedule.open_every.max(1),
                initial_classes: schedule.initial_classes.max(1),
            },
            slots: c.classes(),
            slots_done: false,
            classes: Vec::new(),
            round: Vec::new(),
            rounds: 0,
            class_of: Vec::new(),
            total: c.element_count().finite(),
            pair_code: 0,
            buffer: VecDeque::new(),
        };
        for _ in 0..s.schedule.initial_classes {
            s.open_class();
        }
        Ok(s)
    }

    fn open_class(&mut self) -> bool {
        if self.slots_done {
            return false;
        }
        match self.slots.next() {
            Some(comp) => {
                self.classes.push(OpenClass {
                    target: comp.size,
                    members: Vec::new(),
                });
                true
            }
            None => {
                self.slots_done = true;
                false
            }
        }
    }

    fn pick_class(&mut self) -> usize {
        loop {
            while let Some(c) = self.round.pop() {
                if self.classes[c].wants_more() {
                    return c;
                }
            }
            if self.rounds.is_multiple_of(self.schedule.open_every) {
                self.open_class();
            }
            self.rounds += 1;
            let mut pending: Vec<usize> = (0..self.classes.len())
                .filter(|&c| self.classes[c].wants_more())
                .collect();
            if pending.is_empty() {
                assert!(self.open_class(), "fair stream ran out of classes");
                continue;
            }
            pending.shuffle(&mut self.rng);
            self.round = pending;
        }
    }

    fn allocate(&mut self) {
        let x = self.class_of.len() as u64;
        let c = self.pick_class();
        let anchor = self.classes[c].members.first().copied().unwrap_or(x);
        self.classes[c].members.push(x);
        self.class_of.push(c);
        self.buffer.push_back(Item::Pos(x, anchor));
    }

    fn pairs_exhausted(&self) -> bool {
        match self.total {
            Some(n) => self.pair_code > pair(n.saturating_sub(1), n.saturating_sub(1)) + 2 * n as u128,
            None => false,
        }
    }
}

impl Iterator for FairStream {
    type Item = Item;

    fn next(&mut self) -> Option<Item> {
        if let Some(item) = self.buffer.pop_front() {
            return Some(item);
        }
        loop {
            if self.pairs_exhausted() {
                if self.text {
                    return Some(Item::Pause);
                }
                self.pair_code = 0;
            }
            let (x, y) = unpair(self.pair_code);
            self.pair_code += 1;
            let m = x.max(y);
            if self.total.is_some_and(|n| m >= n) {
                continue;
            }
            while (self.class_of.len() as u64) <= m {
                self.allocate();
            }
            let related = self.class_of[x as usize] == self.class_of[y as usize];
            let item = match (related, self.text) {
                (true, _) => Item::Pos(x, y),
                (false, false) => Item::Neg(x, y),
                (false, true) => Item::Pause,
            };
            self.buffer.push_back(item);
            return self.buffer.pop_front();
        }
    }
}

pub fn fair_informant(c: &Character, seed: u64) -> Result<FairStream> {
    FairStream::new(c, seed, false, Schedule::default())
}

pub fn fair_text(c: &Character, seed: u64) -> Result<FairStream> {
    FairStream::new(c, seed, true, Schedule::default())
}

/// Takes the first `n` items of a stream, failing if it ends early.
pub fn take_prefix(stream: &mut dyn Iterator<Item = Item>, n: usize) -> Result<Prefix> {
    let items: Vec<Item> = stream.take(n).collect();
    if items.len() < n {
        return Err(Error::StreamExhausted(items.len()));
    }
    Ok(Prefix::new(items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::Omega;
    use Item::{Neg, Pause, Pos};

    #[test]
    fn decoding_examples() {
        let p = Prefix::new(vec![Pos(0, 1), Neg(2, 3)]);
        let (s, _) = structure_from_prefix(&p).unwrap();
        assert_eq!(s.blocks(), &[vec![0, 1], vec![2], vec![3]]);
        let t = Prefix::new(vec![Pos(0, 1), Pos(1, 2)]);
        assert_eq!(structure_from_prefix(&t).unwrap().0.blocks(), &[vec![0, 1, 2]]);
        assert!(structure_from_prefix(&Prefix::default()).unwrap().0.is_empty());
        let bad = Prefix::new(vec![Pos(0, 1), Pos(1, 2), Neg(0, 2)]);
        assert_eq!(structure_from_prefix(&bad), Err(Error::Inconsistent { index: 2 }));
    }

    #[test]
    fn name_map_normalizes() {
        let p = Prefix::new(vec![Pos(10, 30), Neg(30, 20)]);
        let (s, map) = structure_from_prefix(&p).unwrap();
        assert_eq!(map[&10], 0);
        assert_eq!(map[&20], 1);
        assert_eq!(map[&30], 2);
        assert_eq!(s.blocks(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn reorder_small_cases() {
        assert!(reorder_to_informant(&Prefix::default()).is_empty());
        assert_eq!(reorder_to_informant(&Prefix::new(vec![Pos(0, 0)])).items, vec![Pos(0, 0)]);
        let r = reorder_to_informant(&Prefix::new(vec![Pos(0, 1), Pause, Pos(2, 3)]));
        assert_eq!(r.len(), 4 + 4 + 8);
        assert_eq!(&r.items[..4], &[Pos(0, 0), Pos(0, 1), Pos(1, 0), Pos(1, 1)]);
        assert_eq!(r.items[8], Neg(0, 2));
    }

    #[test]
    fn trace_lines_parse() {
        assert_eq!("P 1 2".parse::<Item>().unwrap(), Pos(1, 2));
        assert_eq!("N 3 4".parse::<Item>().unwrap(), Neg(3, 4));
        assert_eq!("#".parse::<Item>().unwrap(), Pause);
        assert!("Q 1 2".parse::<Item>().is_err());
        assert!("P 1".parse::<Item>().is_err());
        assert!("P 1 2 3".parse::<Item>().is_err());
    }

    #[test]
    fn singletons_present_identity() {
        let c = Character::listed(&[(1, Omega)]);
        let items: Vec<Item> = fair_informant(&c, 3).unwrap().take(500).collect();
        for item in items {
            if let Pos(x, y) = item {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn finite_text_ends_in_pauses() {
        let c = Character::listed(&[(2, Fin(1))]);
        let items: Vec<Item> = fair_text(&c, 0).unwrap().take(200).collect();
        assert!(items[50..].iter().all(|i| *i == Pause));
        let facts: std::collections::BTreeSet<Item> =
            items.into_iter().filter(|i| *i != Pause).collect();
        assert_eq!(
            facts.into_iter().collect::<Vec<_>>(),
            vec![Pos(0, 0), Pos(0, 1), Pos(1, 0), Pos(1, 1)]
        );
    }

    #[test]
    fn empty_character_rejected() {
        assert_eq!(fair_informant(&Character::empty(), 0).err(), Some(Error::EmptyCharacter));
    }

    #[test]
    fn two_infinite_classes_never_show_three() {
        let c = Character::infinite_classes(Fin(2));
        let mut st = PrefixState::new();
        for item in fair_informant(&c, 9).unwrap().take(3000) {
            st.push(&item).unwrap();
            assert!(st.class_roots().len() <= 2);
        }
    }
}
