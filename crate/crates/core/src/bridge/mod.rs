//! From structures to languages and back: `g_A`, the languages
//! `L(g_A ∘ π)`, tell-tale search, and learners that translate between
//! informants for structures and texts for languages.

mod learners;
mod perm;
mod seq;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::character::{pair, unpair, Character};
use crate::error::Result;
use crate::extnat::Fin;
use crate::separability::finitely_separable;

pub use learners::{
    LangConjecture, LangToStruct, LanguageLearner, MinimalSuperset, StructToLang, Translation,
};
pub use perm::{least_permutation, FinitePermutation, PermBounds};
pub use seq::{g_of_char, SizeSequence, Tail};

/// `L(h) = {⟨i, j⟩ : j < h(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LanguageDesc {
    pub h: SizeSequence,
}

impl LanguageDesc {
    pub fn new(h: SizeSequence) -> Self {
        LanguageDesc { h }
    }

    /// `L(g_c)`.
    pub fn of_char(c: &Character) -> Result<Self> {
        Ok(LanguageDesc::new(g_of_char(c)?))
    }

    pub fn member(&self, x: u64) -> bool {
        lang_member(self, x)
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &LanguageDesc) -> bool {
        self.h.pointwise_le(&other.h)
    }

    /// Members with code at most `bound`, ascending.
    pub fn members_up_to(&self, bound: u64) -> Vec<u64> {
        (0..=bound).filter(|&x| self.member(x)).collect()
    }
}

impl fmt::Display for LanguageDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.h)
    }
}

pub fn lang_member(l: &LanguageDesc, x: u64) -> bool {
    let (i, j) = unpair(x as u128);
    Fin(j) < l.h.at(i)
}

/// Code of `⟨i, j⟩` as a language element.
pub fn code(i: u64, j: u64) -> u64 {
    u64::try_from(pair(i, j)).expect("pair code fits in u64")
}

/// `L(g_A)` and every `L(g_A ∘ (a b))` with `a < b < index_bound`, for each
/// member, without repeats. This is the part of `∪ 𝓛_A` the bounded
/// searches look at.
pub fn transposition_closure(fam: &[Character], index_bound: u64) -> Result<Vec<LanguageDesc>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in fam {
        let g = g_of_char(c)?;
        let mut push = |h: SizeSequence| {
            if seen.insert(h.clone()) {
                out.push(LanguageDesc::new(h));
            }
        };
        push(g.clone());
        for a in 0..index_bound {
            for b in a + 1..index_bound {
                if g.at(a) != g.at(b) {
                    push(g.compose(&FinitePermutation::transposition(a, b)));
                }
            }
        }
    }
    Ok(out)
}

/// A finite `D ⊆ L` with codes at most `bound` such that no other listed
/// language `L'` has `D ⊆ L' ⊊ L`, shrunk greedily; `None` if even
/// `L ∩ [0, bound]` is not enough (then no `D` within the bound is).
pub fn telltale_search(l: &LanguageDesc, fam_langs: &[LanguageDesc], bound: u64) -> Option<Vec<u64>> {
    let below: Vec<&LanguageDesc> = fam_langs.iter().filter(|m| *m != l && m.is_subset(l)).collect();
    let escapes = |d: &[u64]| below.iter().any(|m| d.iter().all(|&x| m.member(x)));
    let mut d = l.members_up_to(bound);
    if escapes(&d) {
        return None;
    }
    let mut k = 0;
    while k < d.len() {
        let x = d.remove(k);
        if escapes(&d) {
            d.insert(k, x);
            k += 1;
        }
    }
    Some(d)
}

/// Tell-tale verdict for one translated language.
#[derive(Debug, Clone, Serialize)]
pub struct TelltaleResult {
    pub member: usize,
    pub permutation: FinitePermutation,
    pub language: LanguageDesc,
    pub telltale: Option<Vec<u64>>,
}

/// The languages whose tell-tales are checked: `L(g_A ∘ (a b))` for
/// `a < b < sample` and the identity, for each member.
pub fn telltale_report(fam: &[Character], bound: u64, sample: u64) -> Result<Vec<TelltaleResult>> {
    let closure = transposition_closure(fam, bound)?;
    let mut out = Vec::new();
    for (member, c) in fam.iter().enumerate() {
        let g = g_of_char(c)?;
        let mut perms = vec![FinitePermutation::identity()];
        for a in 0..sample {
            for b in a + 1..sample {
                if g.at(a) != g.at(b) {
                    perms.push(FinitePermutation::transposition(a, b));
                }
            }
        }
        for p in perms {
            let language = LanguageDesc::new(g.compose(&p));
            let telltale = telltale_search(&language, &closure, bound);
            out.push(TelltaleResult {
                member,
                permutation: p,
                language,
                telltale,
            });
        }
    }
    Ok(out)
}

/// Outcome of mapping each character to one language.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    pub family: Vec<Character>,
    pub languages: Vec<LanguageDesc>,
    pub telltales: Vec<Option<Vec<u64>>>,
    pub finitely_separable: bool,
}

impl CollapseReport {
    /// Every language has a tell-tale while the structures are not separable.
    pub fn collapses(&self) -> bool {
        self.telltales.iter().all(Option::is_some) && !self.finitely_separable
    }
}

/// Maps every member `A` to the single language `L(g_A)` and compares
/// tell-tales there with separability of the structures.
pub fn collapse_demo(fam: &[Character], bound: u64) -> Result<CollapseReport> {
    let languages = fam.iter().map(LanguageDesc::of_char).collect::<Result<Vec<_>>>()?;
    let telltales = languages.iter().map(|l| telltale_search(l, &languages, bound)).collect();
    Ok(CollapseReport {
        family: fam.to_vec(),
        telltales,
        finitely_separable: finitely_separable(fam)?.separable,
        languages,
    })
}
