//! Limits, finite separability, separators and the Fin anti-chain test.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::character::{all_sizes_but, unpair, Character, Component};
use crate::error::{Error, Result};
use crate::extnat::{Fin, Omega};

/// A built-in total enumeration `n ↦ Character` of pairwise non-isomorphic
/// members.
pub trait Generator: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn member(&self, n: u64) -> Character;
    /// Closed form for "component occurs in infinitely many members", when known.
    fn occurs_infinitely_often(&self, comp: Component) -> Option<bool>;
    /// The structure the generator is built to converge to, if any.
    fn companion_limit(&self) -> Option<Character> {
        None
    }
}

/// `n ↦ [5:n, 1:ω]`.
#[derive(Debug, Clone)]
pub struct FiveNTail;

impl Generator for FiveNTail {
    fn name(&self) -> &str {
        "five_n_tail"
    }

    fn member(&self, n: u64) -> Character {
        Character::listed(&[(5, Fin(n)), (1, Omega)])
    }

    fn occurs_infinitely_often(&self, comp: Component) -> Option<bool> {
        Some(comp.size == Fin(5) || comp.size == Fin(1))
    }

    fn companion_limit(&self) -> Option<Character> {
        Some(Character::listed(&[(5, Omega)]))
    }
}

/// `A_i = [j : 1 - δ_ij]` for `i >= 1`, optionally leaving one index out.
#[derive(Debug, Clone)]
pub struct Kronecker {
    pub exclude: Option<u64>,
}

impl Kronecker {
    pub fn index_of(&self, n: u64) -> u64 {
        let i = n + 1;
        match self.exclude {
            Some(x) if i >= x => i + 1,
            _ => i,
        }
    }
}

impl Generator for Kronecker {
    fn name(&self) -> &str {
        "kronecker"
    }

    fn member(&self, n: u64) -> Character {
        all_sizes_but(self.index_of(n))
    }

    fn occurs_infinitely_often(&self, comp: Component) -> Option<bool> {
        Some(comp.size.is_finite() && comp.index == 1)
    }

    fn companion_limit(&self) -> Option<Character> {
        self.exclude.map(all_sizes_but)
    }
}

/// `n ↦ [k : n+1]`.
#[derive(Debug, Clone)]
pub struct SizeCount {
    pub size: u64,
}

impl Generator for SizeCount {
    fn name(&self) -> &str {
        "size_count"
    }

    fn member(&self, n: u64) -> Character {
        Character::listed(&[(self.size, Fin(n + 1))])
    }

    fn occurs_infinitely_often(&self, comp: Component) -> Option<bool> {
        Some(comp.size == Fin(self.size))
    }
}

/// Looks a generator up by name; `params` is a JSON object.
pub fn generator(name: &str, params: &Value) -> Result<Box<dyn Generator>> {
    let int = |key: &str| -> Result<Option<u64>> {
        match params.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| Error::Parse(format!("generator parameter `{key}` must be an integer"))),
        }
    };
    match name {
        "five_n_tail" => Ok(Box::new(FiveNTail)),
        "kronecker" => {
            let exclude = int("exclude")?;
            if exclude == Some(0) {
                return Err(Error::Representation("kronecker index starts at 1".into()));
            }
            Ok(Box::new(Kronecker { exclude }))
        }
        "size_count" => {
            let size = int("size")?.ok_or_else(|| Error::Parse("size_count needs `size`".into()))?;
            if size == 0 {
                return Err(Error::ZeroSize);
            }
            Ok(Box::new(SizeCount { size }))
        }
        other => Err(Error::UnknownGenerator(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub params: Value,
}

/// Explicit members plus an optional generated tail.
#[derive(Debug, Clone, Default)]
pub struct Family {
    pub members: Vec<Character>,
    pub generator: Option<GeneratorSpec>,
}

impl Family {
    pub fn new(members: Vec<Character>) -> Result<Self> {
        for (i, a) in members.iter().enumerate() {
            if members[..i].iter().any(|b| b.iso_eq(a)) {
                return Err(Error::Representation(format!("member {a} listed twice")));
            }
        }
        Ok(Family {
            members,
            generator: None,
        })
    }

    pub fn with_generator(mut self, name: &str, params: Value) -> Result<Self> {
        generator(name, &params)?;
        self.generator = Some(GeneratorSpec {
            name: name.to_string(),
            params,
        });
        Ok(self)
    }

    pub fn generator(&self) -> Result<Box<dyn Generator>> {
        let spec = self.generator.as_ref().ok_or(Error::MissingGenerator)?;
        generator(&spec.name, &spec.params)
    }

    /// `{"members": [...], "generator": {"name": .., "params": ..}}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("family must be a JSON object".into()))?;
        let members = match obj.get("members") {
            Some(Value::Array(items)) => items.iter().map(Character::from_json).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
            Some(_) => return Err(Error::Parse("`members` must be an array".into())),
        };
        let mut fam = Family::new(members)?;
        match obj.get("generator") {
            None | Some(Value::Null) => {}
            Some(g) => {
                let name = g
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("generator needs a string `name`".into()))?;
                let params = g.get("params").cloned().unwrap_or(Value::Object(Default::default()));
                fam = fam.with_generator(name, params)?;
            }
        }
        Ok(fam)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Family::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        let mut out = serde_json::json!({ "members": self.members });
        if let Some(g) = &self.generator {
            out["generator"] = serde_json::json!({ "name": g.name, "params": g.params });
        }
        out
    }
}

fn require_finite_classes(chars: &[Character]) -> Result<()> {
    chars.iter().try_for_each(Character::require_no_infinite_classes)
}

/// Clause 1 for a single candidate witness.
fn witnesses_limit(s: &Character, a: &Character) -> bool {
    !a.iso_eq(s) && a.fin_embeds(s) && s.is_subset(a)
}

/// Some `A ∈ fam` making `s` a limit of a finite family.
pub fn is_limit_finite(s: &Character, fam: &[Character]) -> Result<Option<Character>> {
    s.require_no_infinite_classes()?;
    require_finite_classes(fam)?;
    Ok(fam.iter().find(|a| witnesses_limit(s, a)).cloned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "bound")]
pub enum LimitVerdict {
    Limit,
    NotLimit,
    Unknown(u64),
}

/// Bounded check of the infinite-family clause over the first `n` generated
/// members. Members isomorphic to `s` are skipped.
pub fn is_limit_infinite_bounded(s: &Character, g: &dyn Generator, n: u64) -> Result<LimitVerdict> {
    s.require_no_infinite_classes()?;
    let members: Vec<Character> = (0..n).map(|i| g.member(i)).filter(|a| !a.iso_eq(s)).collect();
    require_finite_classes(&members)?;
    if members.iter().any(|a| !a.fin_embeds(s)) {
        return Ok(LimitVerdict::NotLimit);
    }
    let mut unknown = false;
    for code in 0..=n as u128 {
        let (k, i) = unpair(code);
        if k == 0 || i == 0 {
            continue;
        }
        let comp = Component::new(k, i);
        if !s.contains(comp) {
            continue;
        }
        match g.occurs_infinitely_often(comp) {
            Some(false) => return Ok(LimitVerdict::NotLimit),
            Some(true) => {}
            None => {
                let hits: Vec<usize> = members
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.contains(comp))
                    .map(|(j, _)| j)
                    .collect();
                let half = members.len().div_ceil(2);
                let growing = hits.last().is_some_and(|&j| j >= members.len() / 2);
                if hits.len() < half || !growing {
                    unknown = true;
                }
            }
        }
    }
    Ok(if unknown {
        LimitVerdict::Unknown(n)
    } else {
        LimitVerdict::Limit
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separability {
    pub separable: bool,
    /// `(limit, witness)` when not separable.
    pub counterexample: Option<(Character, Character)>,
}

/// Finite separability of a finite family.
pub fn finitely_separable(fam: &[Character]) -> Result<Separability> {
    require_finite_classes(fam)?;
    for s in fam {
        if let Some(a) = fam.iter().find(|a| witnesses_limit(s, a)) {
            return Ok(Separability {
                separable: false,
                counterexample: Some((s.clone(), a.clone())),
            });
        }
    }
    Ok(Separability {
        separable: true,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Separator {
    pub owner: Character,
    pub components: BTreeSet<Component>,
}

impl Separator {
    /// Every component occurs in `c`.
    pub fn realized_by(&self, c: &Character) -> bool {
        self.components.iter().all(|&comp| c.contains(comp))
    }
}

/// Union of `min(char(c) \ char(s))` over the non-isomorphic members of the
/// ≈fin-class of `c`.
pub fn separator_of(c: &Character, fam: &[Character]) -> Result<Separator> {
    c.require_no_infinite_classes()?;
    require_finite_classes(fam)?;
    if !fam.iter().any(|a| a.iso_eq(c)) {
        return Err(Error::Precondition(format!("{c} is not a member")));
    }
    let mut components = BTreeSet::new();
    for s in fam {
        if s.iso_eq(c) || !s.fin_biembeddable(c) {
            continue;
        }
        if let Some(comp) = c.diff_min(s)? {
            components.insert(comp);
        }
    }
    Ok(Separator {
        owner: c.clone(),
        components,
    })
}

pub fn separator_realized(sep: &Separator, f: &crate::structure::FiniteStructure) -> bool {
    sep.realized_by(&f.character())
}

/// No two distinct members are comparable under ↪fin.
pub fn fin_antichain(fam: &[Character]) -> bool {
    fam.iter().enumerate().all(|(i, a)| {
        fam[i + 1..]
            .iter()
            .all(|b| !a.fin_embeds(b) && !b.fin_embeds(a))
    })
}
