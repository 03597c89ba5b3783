use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extnat::Fin;

use super::seq::SizeSequence;

/// A permutation of ω that moves finitely many points. Only moved points
/// are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePermutation {
    map: BTreeMap<u64, u64>,
}

impl FinitePermutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// From explicit `i ↦ π(i)` pairs; fixed points may be listed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let map: BTreeMap<u64, u64> = pairs.into_iter().filter(|(a, b)| a != b).collect();
        let mut images: Vec<u64> = map.values().copied().collect();
        images.sort_unstable();
        let domain: Vec<u64> = map.keys().copied().collect();
        if images != domain {
            return Err(Error::Representation("not a permutation of its support".into()));
        }
        Ok(FinitePermutation { map })
    }

    pub fn transposition(a: u64, b: u64) -> Self {
        FinitePermutation::from_pairs([(a, b), (b, a)]).expect("swaps are bijective")
    }

    pub fn apply(&self, i: u64) -> u64 {
        self.map.get(&i).copied().unwrap_or(i)
    }

    pub fn support(&self) -> Vec<u64> {
        self.map.keys().copied().collect()
    }

    pub fn moves(&self) -> impl Iterator<Item = (&u64, &u64)> {
        self.map.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }
}

impl fmt::Display for FinitePermutation {
    /// Cycle notation, `id` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return write!(f, "id");
        }
        let mut done = std::collections::BTreeSet::new();
        for &start in self.map.keys() {
            if !done.insert(start) {
                continue;
            }
            let mut cycle = vec![start];
            let mut x = self.apply(start);
            while x != start {
                done.insert(x);
                cycle.push(x);
                x = self.apply(x);
            }
            let parts: Vec<String> = cycle.iter().map(u64::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for FinitePermutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[u64; 2]> = self.map.iter().map(|(&a, &b)| [a, b]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinitePermutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[u64; 2]>::deserialize(d)?;
        FinitePermutation::from_pairs(pairs.into_iter().map(|[a, b]| (a, b))).map_err(serde::de::Error::custom)
    }
}

/// Bounds for permutation searches: support inside `[0, index_bound)` and
/// at most `max_support` moved points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PermBounds {
    pub index_bound: u64,
    pub max_support: usize,
}

impl Default for PermBounds {
    fn default() -> Self {
        PermBounds {
            index_bound: 64,
            max_support: 4,
        }
    }
}

/// The least finite permutation `π` (fewest moved points, then the sorted
/// support, then its images, lexicographically) with `need(i) <= g(π(i))`
/// for every listed `i`, within `bounds`.
///
/// `need(i) = j + 1` for the largest datum `⟨i, j⟩`, so a hit means the data
/// lie inside `L(g ∘ π)`.
pub fn least_permutation(g: &SizeSequence, need: &BTreeMap<u64, u64>, bounds: PermBounds) -> Option<FinitePermutation> {
    let fits = |i: u64, v: u64| need.get(&i).is_none_or(|&n| Fin(n) <= g.at(v));
    let bad: Vec<u64> = need.keys().copied().filter(|&i| !fits(i, i)).collect();
    if bad.is_empty() {
        return Some(FinitePermutation::identity());
    }
    if bad.iter().any(|&i| i >= bounds.index_bound) {
        return None;
    }
    for size in bad.len().max(2)..=bounds.max_support {
        let mut support = Vec::with_capacity(size);
        if let Some(p) = supports(0, size, &bad, bounds.index_bound, &mut support, &fits) {
            return Some(p);
        }
    }
    None
}

/// Walks supports of exactly `size` points containing `bad`, in
/// lexicographic order, and returns the first derangement that fits.
fn supports(
    start: u64,
    size: usize,
    bad: &[u64],
    bound: u64,
    chosen: &mut Vec<u64>,
    fits: &dyn Fn(u64, u64) -> bool,
) -> Option<FinitePermutation> {
    if chosen.len() == size {
        if !bad.iter().all(|b| chosen.contains(b)) {
            return None;
        }
        let mut images = Vec::with_capacity(size);
        let mut used = vec![false; size];
        return derangement(chosen, &mut images, &mut used, fits)
            .then(|| FinitePermutation::from_pairs(chosen.iter().copied().zip(images)).expect("derangement"));
    }
    let left = size - chosen.len();
    // Bad points not yet chosen must still fit.
    let pending = bad.iter().filter(|&&b| b >= start).count();
    if pending > left {
        return None;
    }
    for x in start..bound {
        if bound - x < left as u64 {
            break;
        }
        // Skipping a bad point loses it for good.
        if bad.iter().any(|&b| b >= start && b < x) {
            break;
        }
        chosen.push(x);
        let found = supports(x + 1, size, bad, bound, chosen, fits);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn derangement(support: &[u64], images: &mut Vec<u64>, used: &mut [bool], fits: &dyn Fn(u64, u64) -> bool) -> bool {
    let k = images.len();
    if k == support.len() {
        return true;
    }
    let i = support[k];
    for (slot, &v) in support.iter().enumerate() {
        if used[slot] || v == i || !fits(i, v) {
            continue;
        }
        used[slot] = true;
        images.push(v);
        if derangement(support, images, used, fits) {
            return true;
        }
        images.pop();
        used[slot] = false;
    }
    false
}
