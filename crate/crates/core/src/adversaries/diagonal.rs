use serde::Serialize;

use crate::character::Character;
use crate::error::{Error, Result};
use crate::learners::{Conjecture, Learner};
use crate::presentation::{Item, Prefix};
use crate::structure::PrefixState;

use super::Builder;

/// Which side of the dichotomy the run ended on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// No expansionary stage in the last `window` stages.
    Finite,
    /// Expansionary stages keep coming up to the horizon.
    Infinite,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalReport {
    pub learner: String,
    pub e: u64,
    pub stages: usize,
    pub window: usize,
    pub expansionary: Vec<usize>,
    pub branch: Branch,
    pub sigma: Character,
    pub tau: Character,
    pub nu: Character,
    /// Learner's answer on `ν` right after each expansionary stage.
    pub nu_conjectures: Vec<Conjecture>,
    pub violations: Vec<String>,
    #[serde(skip)]
    pub sigma_prefix: Prefix,
    #[serde(skip)]
    pub tau_prefix: Prefix,
    #[serde(skip)]
    pub nu_prefix: Prefix,
}

/// A string under construction together with a learner that has read it.
struct Track {
    builder: Builder,
    items: Vec<Item>,
    learner: Box<dyn Learner>,
}

impl Track {
    fn new(learner: &dyn Learner) -> Self {
        let mut learner = learner.clone_box();
        learner.reset();
        Track {
            builder: Builder::new(false),
            items: Vec::new(),
            learner,
        }
    }

    fn push(&mut self, items: Vec<Item>) {
        for item in &items {
            self.learner.feed(item);
        }
        self.items.extend(items);
    }

    /// Same builder and learner, no items: a probe for the next block.
    fn fork(&self) -> Track {
        Track {
            builder: self.builder.clone(),
            items: Vec::new(),
            learner: self.learner.clone_box(),
        }
    }

    /// Takes over a probe forked from `self`.
    fn adopt(&mut self, probe: Track) {
        self.builder = probe.builder;
        self.learner = probe.learner;
        self.items.extend(probe.items);
    }

    fn singleton(&mut self) {
        let items = self.builder.add(None).1;
        self.push(items);
    }

    fn class(&mut self, size: u64) {
        let items = self.builder.add_class(size);
        self.push(items);
    }

    /// Two `e`-classes and `e + 1` singletons (the `σ` block) or three
    /// `e`-classes and one singleton (the `τ` block).
    fn block(&mut self, e: u64, classes: u64) {
        for _ in 0..classes {
            self.class(e);
        }
        for _ in 0..(3 - classes) * e + 1 {
            self.singleton();
        }
    }

    fn count(&self, size: u64) -> u64 {
        self.builder.sizes().iter().filter(|&&s| s == size).count() as u64
    }
}

/// Runs the expansionary-stage construction for `stages` stages against
/// `learner` and checks the dichotomy on the result.
///
/// `τ` starts with one `e`-class on the elements that `σ` holds as `e`
/// singletons, so the two strings differ from stage 0 and have equal domains.
pub fn diagonalizer(learner: &dyn Learner, e: u64, stages: usize, window: usize) -> Result<DiagonalReport> {
    if e < 2 {
        return Err(Error::Precondition("class size e must be at least 2".into()));
    }
    let mut sigma = Track::new(learner);
    let mut tau = Track::new(learner);
    let mut nu = Track::new(learner);
    for _ in 0..e {
        sigma.singleton();
    }
    tau.class(e);

    let mut violations = Vec::new();
    let mut expansionary = Vec::new();
    let mut nu_conjectures = Vec::new();
    // Some v in [l, s] has L(σ_v) != L(τ_v).
    let mut differs_since_l = sigma.learner.current() != tau.learner.current();
    let mut singles_at = vec![sigma.count(1)];

    for s in 0..stages {
        let stage = s + 1;
        if differs_since_l {
            expansionary.push(stage);
            sigma.block(e, 2);
            tau.block(e, 3);
            let before = nu.learner.current();
            let mut grown = None;
            for classes in [2, 3] {
                let mut probe = nu.fork();
                probe.block(e, classes);
                if probe.learner.current() != before {
                    grown = Some(probe);
                    break;
                }
            }
            let grown = grown.unwrap_or_else(|| {
                violations.push(format!("stage {stage}: neither block moves the learner off {before}"));
                let mut t = nu.fork();
                t.block(e, 2);
                t
            });
            nu.adopt(grown);
            nu_conjectures.push(nu.learner.current());
        } else {
            sigma.singleton();
            tau.singleton();
        }
        if sigma.builder.len() != tau.builder.len() {
            violations.push(format!("stage {stage}: domains differ"));
        }
        // A fresh window starts at every expansionary stage.
        let now_differs = sigma.learner.current() != tau.learner.current();
        differs_since_l = now_differs || (differs_since_l && expansionary.last() != Some(&stage));
        singles_at.push(sigma.count(1));
    }

    let m = expansionary.len() as u64;
    if sigma.count(e) != 2 * m || tau.count(e) != 1 + 3 * m {
        violations.push(format!(
            "e-class counts {} / {} after {m} expansionary stages",
            sigma.count(e),
            tau.count(e)
        ));
    }
    for (name, track) in [("sigma", &sigma), ("tau", &tau), ("nu", &nu)] {
        let mut st = PrefixState::new();
        if let Some(bad) = track.items.iter().position(|i| st.push(i).is_err()) {
            violations.push(format!("{name} inconsistent at item {bad}"));
        }
    }
    let last = expansionary.last().copied().unwrap_or(0);
    let branch = if stages >= window && last + window <= stages {
        Branch::Finite
    } else {
        Branch::Infinite
    };
    match branch {
        Branch::Finite => {
            if sigma.count(e) == tau.count(e) {
                violations.push("A and B agree on e-classes".into());
            }
            if singles_at[stages] <= singles_at[stages - window] {
                violations.push("singletons stopped growing".into());
            }
        }
        Branch::Infinite => {
            for (k, pair) in nu_conjectures.windows(2).enumerate() {
                if pair[0] == pair[1] {
                    violations.push(format!(
                        "no mind change on nu between stages {} and {}",
                        expansionary[k],
                        expansionary[k + 1]
                    ));
                }
            }
        }
    }
    Ok(DiagonalReport {
        learner: learner.name(),
        e,
        stages,
        window,
        branch,
        sigma: sigma.builder.character(),
        tau: tau.builder.character(),
        nu: nu.builder.character(),
        expansionary,
        nu_conjectures,
        violations,
        sigma_prefix: Prefix::new(sigma.items),
        tau_prefix: Prefix::new(tau.items),
        nu_prefix: Prefix::new(nu.items),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::{Fin, Omega};
    use crate::learners::{ClassCount, Constant, Parity};

    #[test]
    fn constant_learner_never_expands() {
        let c = Character::listed(&[(2, Fin(1)), (1, Omega)]);
        let r = diagonalizer(&Constant(c), 2, 300, 100).unwrap();
        assert!(r.expansionary.is_empty());
        assert_eq!(r.branch, Branch::Finite);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.sigma.count_at(2), Fin(0));
        assert_eq!(r.tau.count_at(2), Fin(1));
        assert_eq!(r.sigma.count_at(1), Fin(302));
    }

    #[test]
    fn class_counter_expands_every_stage() {
        let r = diagonalizer(&ClassCount::new(3), 3, 40, 10).unwrap();
        assert_eq!(r.expansionary.len(), 40);
        assert_eq!(r.branch, Branch::Infinite);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.sigma.count_at(3), Fin(80));
        assert_eq!(r.tau.count_at(3), Fin(121));
    }

    #[test]
    fn parity_learner_sees_equal_lengths() {
        let a = Character::listed(&[(1, Omega)]);
        let b = Character::listed(&[(2, Omega)]);
        let r = diagonalizer(&Parity::new(a, b), 2, 100, 50).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }

    #[test]
    fn rejects_small_e() {
        let c = Character::listed(&[(1, Omega)]);
        assert!(diagonalizer(&Constant(c), 1, 10, 5).is_err());
    }
}
