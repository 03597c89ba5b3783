use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::character::{unpair, Character};
use crate::learners::{Conjecture, Learner};
use crate::presentation::Item;
use crate::structure::PrefixState;

use super::perm::{least_permutation, FinitePermutation, PermBounds};
use super::seq::{g_of_char, SizeSequence};
use super::{code, LanguageDesc};

/// `L(g_A ∘ π)`, remembered together with `A` and `π`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Translation {
    pub source: Character,
    pub permutation: FinitePermutation,
    pub language: LanguageDesc,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(untagged)]
pub enum LangConjecture {
    #[default]
    #[serde(serialize_with = "question_mark")]
    Unknown,
    Lang(Translation),
}

fn question_mark<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("?")
}

impl LangConjecture {
    pub fn translation(&self) -> Option<&Translation> {
        match self {
            LangConjecture::Lang(t) => Some(t),
            LangConjecture::Unknown => None,
        }
    }
}

impl fmt::Display for LangConjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangConjecture::Unknown => write!(f, "?"),
            LangConjecture::Lang(t) => write!(f, "{} = {} via {}", t.language, t.source, t.permutation),
        }
    }
}

/// A learner for languages of pair codes; `None` is a pause.
pub trait LanguageLearner: Send {
    fn name(&self) -> String;
    fn reset(&mut self);
    fn feed(&mut self, datum: Option<u64>) -> LangConjecture;
    fn current(&self) -> LangConjecture;
    fn clone_box(&self) -> Box<dyn LanguageLearner>;
}

impl Clone for Box<dyn LanguageLearner> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Largest `j + 1` seen for each `i` in data `⟨i, j⟩`.
#[derive(Debug, Clone, Default)]
struct Demands {
    need: BTreeMap<u64, u64>,
}

impl Demands {
    fn add(&mut self, i: u64, j: u64) {
        let e = self.need.entry(i).or_default();
        *e = (*e).max(j + 1);
    }

    fn met_by(&self, g: &SizeSequence, p: &FinitePermutation) -> bool {
        self.need.iter().all(|(&i, &n)| crate::extnat::Fin(n) <= g.at(p.apply(i)))
    }
}

/// Least fitting permutation for one fixed `g`, reused while it still fits:
/// more data only removes candidates, so a fitting least one stays least.
#[derive(Debug, Clone)]
struct Fit {
    g: SizeSequence,
    perm: Option<FinitePermutation>,
}

impl Fit {
    fn refresh(&mut self, data: &Demands, bounds: PermBounds) {
        if let Some(p) = &self.perm {
            if !data.met_by(&self.g, p) {
                self.perm = least_permutation(&self.g, &data.need, bounds);
            }
        }
    }

    fn translation(&self, source: &Character) -> Option<Translation> {
        let p = self.perm.clone()?;
        Some(Translation {
            source: source.clone(),
            language: LanguageDesc::new(self.g.compose(&p)),
            permutation: p,
        })
    }
}

/// Language learner from an informant learner `M`: the data are read as a
/// finite structure (`⟨i,j⟩ ~ ⟨i',j'⟩` iff `i = i'`), `M` names a character
/// `A`, and the answer is `L(g_A ∘ π)` for the least fitting `π`.
#[derive(Clone)]
pub struct StructToLang {
    inner: Box<dyn Learner>,
    bounds: PermBounds,
    elements: Vec<u64>,
    data: Demands,
    /// Fit for the character `M` currently names.
    fit: Option<(Character, Fit)>,
    current: LangConjecture,
}

impl StructToLang {
    pub fn new(inner: Box<dyn Learner>) -> Self {
        Self::with_bounds(inner, PermBounds::default())
    }

    pub fn with_bounds(mut inner: Box<dyn Learner>, bounds: PermBounds) -> Self {
        inner.reset();
        let mut l = StructToLang {
            inner,
            bounds,
            elements: Vec::new(),
            data: Demands::default(),
            fit: None,
            current: LangConjecture::Unknown,
        };
        l.update();
        l
    }

    fn update(&mut self) {
        let Conjecture::Char(a) = self.inner.current() else {
            self.fit = None;
            self.current = LangConjecture::Unknown;
            return;
        };
        match &mut self.fit {
            Some((c, fit)) if *c == a => fit.refresh(&self.data, self.bounds),
            _ => {
                self.fit = g_of_char(&a).ok().map(|g| {
                    let perm = least_permutation(&g, &self.data.need, self.bounds);
                    (a.clone(), Fit { g, perm })
                });
            }
        }
        self.current = self
            .fit
            .as_ref()
            .and_then(|(c, fit)| fit.translation(c))
            .map_or(LangConjecture::Unknown, LangConjecture::Lang);
    }
}

impl LanguageLearner for StructToLang {
    fn name(&self) -> String {
        format!("lang({})", self.inner.name())
    }

    fn reset(&mut self) {
        *self = StructToLang::with_bounds(self.inner.clone_box(), self.bounds);
    }

    fn feed(&mut self, datum: Option<u64>) -> LangConjecture {
        let Some(x) = datum else {
            return self.current();
        };
        if self.elements.contains(&x) {
            return self.current();
        }
        let (i, j) = unpair(x as u128);
        self.inner.feed(&Item::Pos(x, x));
        for &y in &self.elements {
            let same = unpair(y as u128).0 == i;
            for item in if same {
                [Item::Pos(x, y), Item::Pos(y, x)]
            } else {
                [Item::Neg(x, y), Item::Neg(y, x)]
            } {
                self.inner.feed(&item);
            }
        }
        self.elements.push(x);
        self.data.add(i, j);
        self.update();
        self.current()
    }

    fn current(&self) -> LangConjecture {
        self.current.clone()
    }

    fn clone_box(&self) -> Box<dyn LanguageLearner> {
        Box::new(self.clone())
    }
}

/// Language learner for `∪ 𝓛_A` over a finite family: among the members
/// whose languages (least fitting `π`) contain the data, drop those that
/// strictly contain another such language and take the least index.
#[derive(Clone)]
pub struct MinimalSuperset {
    family: Vec<Character>,
    bounds: PermBounds,
    fits: Vec<Option<Fit>>,
    data: Demands,
    seen: std::collections::BTreeSet<u64>,
    current: LangConjecture,
}

impl MinimalSuperset {
    pub fn new(family: Vec<Character>) -> Self {
        Self::with_bounds(family, PermBounds::default())
    }

    pub fn with_bounds(family: Vec<Character>, bounds: PermBounds) -> Self {
        let fits = family
            .iter()
            .map(|c| {
                g_of_char(c).ok().map(|g| Fit {
                    g,
                    perm: Some(FinitePermutation::identity()),
                })
            })
            .collect();
        let mut l = MinimalSuperset {
            family,
            bounds,
            fits,
            data: Demands::default(),
            seen: Default::default(),
            current: LangConjecture::Unknown,
        };
        l.choose();
        l
    }

    fn choose(&mut self) {
        let candidates: Vec<Translation> = self
            .fits
            .iter()
            .zip(&self.family)
            .filter_map(|(fit, c)| fit.as_ref()?.translation(c))
            .collect();
        let minimal = candidates.iter().find(|t| {
            !candidates
                .iter()
                .any(|u| u.language != t.language && u.language.is_subset(&t.language))
        });
        self.current = minimal.cloned().map_or(LangConjecture::Unknown, LangConjecture::Lang);
    }
}

impl LanguageLearner for MinimalSuperset {
    fn name(&self) -> String {
        "minimal_superset".into()
    }

    fn reset(&mut self) {
        *self = MinimalSuperset::with_bounds(self.family.clone(), self.bounds);
    }

    fn feed(&mut self, datum: Option<u64>) -> LangConjecture {
        if let Some(x) = datum {
            if self.seen.insert(x) {
                let (i, j) = unpair(x as u128);
                self.data.add(i, j);
                for fit in self.fits.iter_mut().flatten() {
                    fit.refresh(&self.data, self.bounds);
                }
                self.choose();
            }
        }
        self.current()
    }

    fn current(&self) -> LangConjecture {
        self.current.clone()
    }

    fn clone_box(&self) -> Box<dyn LanguageLearner> {
        Box::new(self.clone())
    }
}

/// Informant learner from a language learner: classes are numbered by first
/// appearance, `g(i)` is the size of class `i`, and the language learner
/// reads `{⟨i,j⟩ : j < g(i)}`. The answer is the source character of its
/// conjecture, `?` before any element is seen.
#[derive(Clone)]
pub struct LangToStruct {
    inner: Box<dyn LanguageLearner>,
    state: PrefixState,
    first_seen: BTreeMap<u64, usize>,
    version: u64,
    fed: Vec<u64>,
}

impl LangToStruct {
    pub fn new(mut inner: Box<dyn LanguageLearner>) -> Self {
        inner.reset();
        LangToStruct {
            inner,
            state: PrefixState::new(),
            first_seen: BTreeMap::new(),
            version: 0,
            fed: Vec::new(),
        }
    }

    /// Class sizes, classes ordered by their earliest-seen element.
    fn counting_function(&self) -> Vec<u64> {
        let mut classes: Vec<(usize, u64)> = self
            .state
            .classes()
            .into_iter()
            .map(|c| (c.iter().map(|x| self.first_seen[x]).min().expect("classes are nonempty"), c.len() as u64))
            .collect();
        classes.sort_unstable();
        classes.into_iter().map(|(_, n)| n).collect()
    }

    fn sync(&mut self) {
        if self.state.version() == self.version {
            return;
        }
        self.version = self.state.version();
        let g = self.counting_function();
        // The data set only grows if g does, pointwise.
        let grows = g.len() >= self.fed.len() && self.fed.iter().zip(&g).all(|(a, b)| a <= b);
        if !grows {
            self.inner.reset();
            self.fed.clear();
        }
        let mut fresh = Vec::new();
        for (i, &n) in g.iter().enumerate() {
            let from = self.fed.get(i).copied().unwrap_or(0);
            fresh.extend((from..n).map(|j| code(i as u64, j)));
        }
        fresh.sort_unstable();
        for x in fresh {
            self.inner.feed(Some(x));
        }
        self.fed = g;
    }
}

impl Learner for LangToStruct {
    fn name(&self) -> String {
        format!("struct({})", self.inner.name())
    }

    fn reset(&mut self) {
        *self = LangToStruct::new(self.inner.clone_box());
    }

    fn feed(&mut self, item: &Item) -> Conjecture {
        if let Some((x, y)) = item.elements() {
            let n = self.first_seen.len();
            self.first_seen.entry(x).or_insert(n);
            let n = self.first_seen.len();
            self.first_seen.entry(y).or_insert(n);
        }
        if self.state.push(item).is_ok() {
            self.sync();
        }
        self.current()
    }

    fn current(&self) -> Conjecture {
        if self.first_seen.is_empty() {
            return Conjecture::Unknown;
        }
        self.inner
            .current()
            .translation()
            .map_or(Conjecture::Unknown, |t| Conjecture::Char(t.source.clone()))
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}
