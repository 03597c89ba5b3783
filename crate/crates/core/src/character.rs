//! Characters: finite descriptions of isomorphism types of equivalence
//! structures, together with the embedding relations between them.
//!
//! A character is the function `f` sending each class size (finite `k >= 1`
//! or `Omega`) to the number of classes of that size. We store it as a
//! default count for all finite sizes, a finite table of exceptions, and the
//! number of infinite classes. Exceptions never repeat the default, so two
//! characters denote the same isomorphism type iff they are structurally
//! equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extnat::{ExtNat, Fin, Omega};

/// Cantor pairing `<a, b> = (a + b)(a + b + 1) / 2 + b`.
pub fn pair(a: u64, b: u64) -> u128 {
    let s = a as u128 + b as u128;
    s * (s + 1) / 2 + b as u128
}

/// Inverse of [`pair`].
pub fn unpair(z: u128) -> (u64, u64) {
    let w = ((8 * z + 1).isqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = z - t;
    let a = w - b;
    (a as u64, b as u64)
}

/// The component `<size, index>`: "at least `index` classes of size `size`".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub size: ExtNat,
    pub index: u64,
}

impl Component {
    pub fn new(size: u64, index: u64) -> Self {
        Component {
            size: Fin(size),
            index,
        }
    }

    /// Canonical code for finite sizes; `None` for infinite-size components.
    pub fn code(&self) -> Option<u128> {
        self.size.finite().map(|k| pair(k, self.index))
    }
}

impl Ord for Component {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.code(), other.code()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => self.index.cmp(&other.index),
        }
    }
}

impl PartialOrd for Component {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.size, self.index)
    }
}

/// Isomorphism type of an equivalence structure, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    default: ExtNat,
    exceptions: BTreeMap<u64, ExtNat>,
    omega_count: ExtNat,
}

impl Default for Character {
    fn default() -> Self {
        Character::empty()
    }
}

impl Character {
    /// The character of the empty structure.
    pub fn empty() -> Self {
        Character {
            default: Fin(0),
            exceptions: BTreeMap::new(),
            omega_count: Fin(0),
        }
    }

    /// Builds a character, dropping exceptions that repeat the default.
    pub fn new(
        default: ExtNat,
        exceptions: impl IntoIterator<Item = (u64, ExtNat)>,
        omega_count: ExtNat,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (k, v) in exceptions {
            if k == 0 {
                return Err(Error::ZeroSize);
            }
            if v != default {
                table.insert(k, v);
            }
        }
        Ok(Character {
            default,
            exceptions: table,
            omega_count,
        })
    }

    /// Like [`Character::new`] but rejects non-canonical input instead of
    /// normalizing it.
    pub fn new_strict(
        default: ExtNat,
        exceptions: impl IntoIterator<Item = (u64, ExtNat)>,
        omega_count: ExtNat,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (k, v) in exceptions {
            if k == 0 {
                return Err(Error::ZeroSize);
            }
            if v == default {
                return Err(Error::Representation(format!(
                    "exception for size {k} repeats the default count {default}"
                )));
            }
            if table.insert(k, v).is_some() {
                return Err(Error::Representation(format!("size {k} listed twice")));
            }
        }
        Ok(Character {
            default,
            exceptions: table,
            omega_count,
        })
    }

    /// `[k0:n0, k1:n1, ...]` with default 0 and no infinite classes.
    ///
    /// Panics on size 0; intended for literals.
    pub fn listed(entries: &[(u64, ExtNat)]) -> Self {
        Character::new(Fin(0), entries.iter().copied(), Fin(0)).expect("sizes are >= 1")
    }

    /// `default` classes of every finite size, except as listed.
    pub fn with_default(default: ExtNat, entries: &[(u64, ExtNat)]) -> Self {
        Character::new(default, entries.iter().copied(), Fin(0)).expect("sizes are >= 1")
    }

    /// `[ω:n]`: exactly `n` infinite classes.
    pub fn infinite_classes(n: ExtNat) -> Self {
        Character {
            omega_count: n,
            ..Character::empty()
        }
    }

    /// Returns a copy with the number of infinite classes replaced.
    pub fn with_omega_count(mut self, n: ExtNat) -> Self {
        self.omega_count = n;
        self
    }

    /// Character of a finite multiset of finite class sizes.
    pub fn from_sizes(sizes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for s in sizes {
            if s == 0 {
                return Err(Error::ZeroSize);
            }
            *counts.entry(s).or_default() += 1;
        }
        Character::new(Fin(0), counts.into_iter().map(|(k, n)| (k, Fin(n))), Fin(0))
    }

    pub fn default_count(&self) -> ExtNat {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, ExtNat> {
        &self.exceptions
    }

    pub fn omega_count(&self) -> ExtNat {
        self.omega_count
    }

    pub fn has_infinite_classes(&self) -> bool {
        !self.omega_count.is_zero()
    }

    pub(crate) fn require_no_infinite_classes(&self) -> Result<()> {
        if self.has_infinite_classes() {
            Err(Error::InfiniteClasses)
        } else {
            Ok(())
        }
    }

    /// `f(k)` for a finite size `k >= 1`.
    pub fn count_at(&self, k: u64) -> ExtNat {
        debug_assert!(k >= 1);
        self.exceptions.get(&k).copied().unwrap_or(self.default)
    }

    /// `f(k)` for `k >= 1` or `k = Omega`.
    pub fn count(&self, k: ExtNat) -> Result<ExtNat> {
        match k {
            Fin(0) => Err(Error::ZeroSize),
            Fin(k) => Ok(self.count_at(k)),
            Omega => Ok(self.omega_count),
        }
    }

    /// Number of classes of size at least `t`.
    pub fn cumulative(&self, t: ExtNat) -> Result<ExtNat> {
        match t {
            Fin(0) => Err(Error::ZeroSize),
            Fin(t) => Ok(self.cumulative_at(t)),
            Omega => Ok(self.omega_count),
        }
    }

    fn cumulative_at(&self, t: u64) -> ExtNat {
        if !self.default.is_zero() {
            return Omega;
        }
        self.exceptions.range(t..).map(|(_, &v)| v).sum::<ExtNat>() + self.omega_count
    }

    /// Total number of classes.
    pub fn class_count(&self) -> ExtNat {
        self.cumulative_at(1)
    }

    /// Total number of elements of any structure with this character.
    pub fn element_count(&self) -> ExtNat {
        if !self.default.is_zero() || !self.omega_count.is_zero() {
            return Omega;
        }
        self.exceptions
            .iter()
            .map(|(&k, &n)| Fin(k).mul(n))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.class_count().is_zero()
    }

    pub fn contains(&self, comp: Component) -> bool {
        match self.count(comp.size) {
            Ok(n) => n >= Fin(comp.index),
            Err(_) => false,
        }
    }

    fn keys_with<'a>(&'a self, other: &'a Character) -> BTreeSet<u64> {
        self.exceptions
            .keys()
            .chain(other.exceptions.keys())
            .copied()
            .collect()
    }

    /// `char(self) ⊆ char(other)`, i.e. `f_self <= f_other` pointwise.
    pub fn is_subset(&self, other: &Character) -> bool {
        self.default <= other.default
            && self.omega_count <= other.omega_count
            && self
                .keys_with(other)
                .into_iter()
                .all(|k| self.count_at(k) <= other.count_at(k))
    }

    /// Least component (canonical order) of `char(self) \ char(other)`.
    pub fn diff_min(&self, other: &Character) -> Result<Option<Component>> {
        self.require_no_infinite_classes()?;
        other.require_no_infinite_classes()?;
        let keys = self.keys_with(other);
        let mut candidates: Vec<u64> = keys.iter().copied().collect();
        if self.default > other.default {
            // Every size outside the tables contributes; only the least one
            // can be minimal because codes grow with the size.
            let mut k = 1;
            while keys.contains(&k) {
                k += 1;
            }
            candidates.push(k);
        }
        Ok(candidates
            .into_iter()
            .filter_map(|k| match (self.count_at(k), other.count_at(k)) {
                (mine, Fin(theirs)) if mine > Fin(theirs) => Some(Component::new(k, theirs + 1)),
                _ => None,
            })
            .min())
    }

    /// Sizes at which the cumulative counts of `a` and `b` can change.
    fn breakpoints(a: &Character, b: &Character) -> BTreeSet<u64> {
        let mut out = BTreeSet::from([1]);
        for k in a.exceptions.keys().chain(b.exceptions.keys()) {
            out.insert(*k);
            out.insert(k + 1);
        }
        out
    }

    /// `self ↪fin other`: every finite substructure of `self` embeds in `other`.
    pub fn fin_embeds(&self, other: &Character) -> bool {
        Character::breakpoints(self, other)
            .into_iter()
            .all(|t| self.cumulative_at(t) <= other.cumulative_at(t))
    }

    /// `self ↪ other`.
    ///
    /// Class `C` may go to host `D` iff `|C| <= |D|`, so neighbourhoods are
    /// nested and the counting condition at every threshold (including
    /// `Omega`) decides the matching, also for countably many classes.
    pub fn embeds(&self, other: &Character) -> bool {
        self.fin_embeds(other) && self.omega_count <= other.omega_count
    }

    pub fn iso_eq(&self, other: &Character) -> bool {
        self == other
    }

    pub fn biembeddable(&self, other: &Character) -> bool {
        self.embeds(other) && other.embeds(self)
    }

    pub fn fin_biembeddable(&self, other: &Character) -> bool {
        self.fin_embeds(other) && other.fin_embeds(self)
    }

    /// Every class of this character, each exactly once, in slot order.
    pub fn classes(&self) -> ClassSlots {
        ClassSlots {
            character: self.clone(),
            code: 0,
            emitted: 0,
            total: self.class_count(),
        }
    }

    /// Largest size mentioned in the exception table, or 0.
    pub fn max_listed_size(&self) -> u64 {
        self.exceptions.keys().next_back().copied().unwrap_or(0)
    }
}

/// Enumerates classes by Cantor-ordered slots `(a, b)`: `a = 0` stands for
/// the `(b+1)`-th infinite class, `a >= 1` for the `(b+1)`-th class of size `a`.
#[derive(Debug, Clone)]
pub struct ClassSlots {
    character: Character,
    code: u128,
    emitted: u64,
    total: ExtNat,
}

impl Iterator for ClassSlots {
    type Item = Component;

    fn next(&mut self) -> Option<Component> {
        if let Fin(total) = self.total {
            if self.emitted >= total {
                return None;
            }
        }
        loop {
            let (a, b) = unpair(self.code);
            self.code += 1;
            let size = if a == 0 { Omega } else { Fin(a) };
            let available = if a == 0 {
                self.character.omega_count
            } else {
                self.character.count_at(a)
            };
            if available >= Fin(b + 1) {
                self.emitted += 1;
                return Some(Component { size, index: b + 1 });
            }
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.default.is_zero() {
            parts.push(format!("*:{}", self.default));
        }
        for (k, v) in &self.exceptions {
            parts.push(format!("{k}:{v}"));
        }
        if !self.omega_count.is_zero() {
            parts.push(format!("ω:{}", self.omega_count));
        }
        write!(f, "[{}]", parts.join(","))
    }
}

/// JSON object form of a character.
#[derive(Serialize, Deserialize)]
struct ObjectForm {
    #[serde(default = "zero")]
    default: ExtNat,
    #[serde(default)]
    exceptions: BTreeMap<String, ExtNat>,
    #[serde(default = "zero")]
    omega_count: ExtNat,
}

fn zero() -> ExtNat {
    Fin(0)
}

impl Serialize for Character {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObjectForm {
            default: self.default,
            exceptions: self
                .exceptions
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            omega_count: self.omega_count,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        Character::from_json(&value).map_err(serde::de::Error::custom)
    }
}

impl Character {
    /// Parses either the object form or the `[[size, count], ...]` shorthand.
    ///
    /// Shape problems are [`Error::Parse`]; size 0, duplicate sizes and
    /// non-canonical exceptions are [`Error::Representation`].
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parse_count = |v: &serde_json::Value| -> Result<ExtNat> {
            serde_json::from_value::<ExtNat>(v.clone()).map_err(|e| Error::Parse(e.to_string()))
        };
        let parse_size = |s: u64| -> Result<u64> {
            if s == 0 {
                Err(Error::Representation("class size 0".into()))
            } else {
                Ok(s)
            }
        };
        match value {
            serde_json::Value::Array(items) => {
                let mut entries = Vec::with_capacity(items.len());
                for item in items {
                    let pair = item
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::Parse(format!("expected [size, count], got {item}")))?;
                    let size = pair[0]
                        .as_u64()
                        .ok_or_else(|| Error::Parse(format!("bad size {}", pair[0])))?;
                    entries.push((parse_size(size)?, parse_count(&pair[1])?));
                }
                Character::new_strict(Fin(0), entries, Fin(0)).map_err(representation)
            }
            serde_json::Value::Object(_) => {
                let form: ObjectForm = serde_json::from_value(value.clone())
                    .map_err(|e| Error::Parse(e.to_string()))?;
                let mut entries = Vec::with_capacity(form.exceptions.len());
                for (k, v) in form.exceptions {
                    let size: u64 = k
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad size key {k:?}")))?;
                    entries.push((parse_size(size)?, v));
                }
                Character::new_strict(form.default, entries, form.omega_count)
                    .map_err(representation)
            }
            other => Err(Error::Parse(format!("expected a character, got {other}"))),
        }
    }
}

fn representation(e: Error) -> Error {
    match e {
        Error::ZeroSize => Error::Representation("class size 0".into()),
        other => other,
    }
}

/// Character of the structure with `f(k) = 1 - [k = i]` for finite `k`.
pub fn all_sizes_but(i: u64) -> Character {
    Character::with_default(Fin(1), &[(i, Fin(0))])
}
