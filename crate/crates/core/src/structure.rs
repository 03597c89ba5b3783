//! Finite equivalence structures and the incremental decoder that turns a
//! stream of facts into one.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::character::Character;
use crate::error::{Error, Result};
use crate::extnat::Fin;
use crate::presentation::Item;

/// A partition of `{0, .., n-1}` into nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl FiniteStructure {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Representation("empty block".into()));
            }
            for &x in block {
                if x >= n || seen[x] {
                    return Err(Error::Representation(format!(
                        "element {x} out of range or repeated"
                    )));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Representation("blocks do not cover the universe".into()));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        Ok(FiniteStructure { n, blocks })
    }

    pub fn empty() -> Self {
        FiniteStructure {
            n: 0,
            blocks: Vec::new(),
        }
    }

    /// Consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut next = 0;
        let blocks = sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let b: Vec<usize> = (next..next + s).collect();
                next += s;
                b
            })
            .collect();
        FiniteStructure::new(next, blocks).expect("consecutive blocks partition the universe")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.len() as u64).collect()
    }

    /// The character of this structure: default 0, no infinite classes.
    pub fn character(&self) -> Character {
        Character::from_sizes(self.block_sizes()).expect("blocks are nonempty")
    }
}

/// Incremental decoder of a prefix into `A_σ`: universe is every mentioned
/// element, the relation is the equivalence closure of the positive facts.
///
/// Negative facts are kept as a separation relation between current classes
/// so that contradictions are detected on the item that causes them.
#[derive(Debug, Clone, Default)]
pub struct PrefixState {
    ids: HashMap<u64, usize>,
    names: Vec<u64>,
    parent: Vec<usize>,
    size: Vec<u64>,
    separated: HashMap<usize, HashSet<usize>>,
    histogram: BTreeMap<u64, u64>,
    items: usize,
    version: u64,
    poisoned: Option<usize>,
}

impl PrefixState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of items fed so far.
    pub fn items(&self) -> usize {
        self.items
    }

    /// Increments whenever the decoded structure changes.
    pub fn version(&self) -> u64 {
        self.version
    }

    /// Index of the first inconsistent item, if any.
    pub fn inconsistency(&self) -> Option<usize> {
        self.poisoned
    }

    pub fn is_consistent(&self) -> bool {
        self.poisoned.is_none()
    }

    pub fn element_count(&self) -> usize {
        self.names.len()
    }

    pub fn mentions(&self, name: u64) -> bool {
        self.ids.contains_key(&name)
    }

    pub fn max_name(&self) -> Option<u64> {
        self.names.iter().copied().max()
    }

    fn intern(&mut self, name: u64) -> usize {
        if let Some(&id) = self.ids.get(&name) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(name, id);
        self.names.push(name);
        self.parent.push(id);
        self.size.push(1);
        *self.histogram.entry(1).or_default() += 1;
        self.version += 1;
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn find_const(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn bump(&mut self, size: u64, delta: i64) {
        let e = self.histogram.entry(size).or_default();
        *e = (*e as i64 + delta) as u64;
        if *e == 0 {
            self.histogram.remove(&size);
        }
    }

    fn are_separated(&self, a: usize, b: usize) -> bool {
        self.separated.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Feeds one item. On the first contradiction the state records the
    /// offending index and stops changing.
    pub fn push(&mut self, item: &Item) -> Result<()> {
        let index = self.items;
        self.items += 1;
        if let Some(bad) = self.poisoned {
            return Err(Error::Inconsistent { index: bad });
        }
        match *item {
            Item::Pause => Ok(()),
            Item::Pos(x, y) => {
                let (a, b) = (self.intern(x), self.intern(y));
                let (ra, rb) = (self.find(a), self.find(b));
                if ra == rb {
                    return Ok(());
                }
                if self.are_separated(ra, rb) {
                    self.poisoned = Some(index);
                    return Err(Error::Inconsistent { index });
                }
                let (big, small) = if self.size[ra] >= self.size[rb] {
                    (ra, rb)
                } else {
                    (rb, ra)
                };
                let (sb, ss) = (self.size[big], self.size[small]);
                self.bump(sb, -1);
                self.bump(ss, -1);
                self.bump(sb + ss, 1);
                self.parent[small] = big;
                self.size[big] = sb + ss;
                if let Some(others) = self.separated.remove(&small) {
                    for o in others {
                        if let Some(set) = self.separated.get_mut(&o) {
                            set.remove(&small);
                            set.insert(big);
                        }
                        self.separated.entry(big).or_default().insert(o);
                    }
                }
                self.version += 1;
                Ok(())
            }
            Item::Neg(x, y) => {
                let (a, b) = (self.intern(x), self.intern(y));
                let (ra, rb) = (self.find(a), self.find(b));
                if ra == rb {
                    self.poisoned = Some(index);
                    return Err(Error::Inconsistent { index });
                }
                self.separated.entry(ra).or_default().insert(rb);
                self.separated.entry(rb).or_default().insert(ra);
                Ok(())
            }
        }
    }

    /// Character of the decoded finite structure.
    pub fn character(&self) -> Character {
        Character::new(
            Fin(0),
            self.histogram.iter().map(|(&k, &n)| (k, Fin(n))),
            Fin(0),
        )
        .expect("histogram sizes are >= 1")
    }

    /// Histogram of class sizes.
    pub fn size_histogram(&self) -> &BTreeMap<u64, u64> {
        &self.histogram
    }

    /// Current classes as `(representative id, size)`.
    pub fn class_roots(&self) -> Vec<(usize, u64)> {
        (0..self.parent.len())
            .filter(|&i| self.parent[i] == i)
            .map(|i| (i, self.size[i]))
            .collect()
    }

    /// Whether the prefix explicitly separates the classes with these roots.
    pub fn roots_separated(&self, a: usize, b: usize) -> bool {
        self.are_separated(a, b)
    }

    /// Whether `x` and `y` are in the same class (both must be mentioned).
    pub fn same_class(&self, x: u64, y: u64) -> Option<bool> {
        let a = *self.ids.get(&x)?;
        let b = *self.ids.get(&y)?;
        Some(self.find_const(a) == self.find_const(b))
    }

    /// Whether some negative fact separates the classes of `x` and `y`.
    pub fn explicitly_separated(&self, x: u64, y: u64) -> bool {
        match (self.ids.get(&x), self.ids.get(&y)) {
            (Some(&a), Some(&b)) => self.are_separated(self.find_const(a), self.find_const(b)),
            _ => false,
        }
    }

    /// Classes by original element names, each sorted, ordered by least member.
    pub fn classes(&self) -> Vec<Vec<u64>> {
        let mut by_root: HashMap<usize, Vec<u64>> = HashMap::new();
        for (id, &name) in self.names.iter().enumerate() {
            by_root.entry(self.find_const(id)).or_default().push(name);
        }
        let mut out: Vec<Vec<u64>> = by_root
            .into_values()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        out.sort();
        out
    }

    /// Normalized structure on `{0..n-1}` plus the name map; names are
    /// renumbered in increasing order.
    pub fn structure(&self) -> (FiniteStructure, BTreeMap<u64, usize>) {
        let mut sorted = self.names.clone();
        sorted.sort_unstable();
        let map: BTreeMap<u64, usize> = sorted.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let blocks = self
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|n| map[&n]).collect())
            .collect();
        let s = FiniteStructure::new(sorted.len(), blocks).expect("classes partition names");
        (s, map)
    }
}
