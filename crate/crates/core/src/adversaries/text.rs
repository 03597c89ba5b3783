use serde::Serialize;

use crate::character::Character;
use crate::error::Result;
use crate::extnat::Fin;
use crate::learners::{Conjecture, Learner};
use crate::presentation::{Item, Prefix};

use super::locking::{weak_locking_search, LockingVerdict, SearchMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TextVerdict {
    /// The learner is wrong at the horizon on a text it must learn, or
    /// every locking search broke its conjecture on one `[ω:1]` text.
    Defeated,
    /// Nothing could be concluded within the bounds.
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct TextRun {
    pub learner: String,
    pub verdict: TextVerdict,
    /// Locking searches run in phase 1 before a candidate was found.
    pub rounds: usize,
    /// The candidate locking sequence, if phase 1 found one.
    pub sigma: Option<Vec<String>>,
    /// Conjecture on the candidate.
    pub locked_on: Option<Conjecture>,
    /// What phase 2 presented.
    pub presented: Option<Character>,
    #[serde(rename = "final")]
    pub final_conjecture: Option<Conjecture>,
    #[serde(skip)]
    pub text: Prefix,
}

fn parse_items(lines: &[String]) -> Vec<Item> {
    lines.iter().map(|l| l.parse().expect("search emits valid items")).collect()
}

/// Appends the facts linking every element of `items` to the first one, so
/// the prefix keeps presenting a single class.
fn link_all(mut items: Vec<Item>) -> Vec<Item> {
    let mut xs: Vec<u64> = items.iter().filter_map(Item::elements).flat_map(|(x, y)| [x, y]).collect();
    xs.sort_unstable();
    xs.dedup();
    if let Some((&first, rest)) = xs.split_first() {
        items.extend(rest.iter().map(|&x| Item::Pos(first, x)));
    }
    items
}

/// Continues `sigma` as a text: all of its elements go into one class,
/// then fresh elements are added to that class, or alternately to it and
/// to one second class when `two` is set.
fn extend_text(sigma: &[Item], two: bool, horizon: usize) -> Vec<Item> {
    let mut items = sigma.to_vec();
    let mentioned: Vec<u64> = {
        let mut v: Vec<u64> = sigma.iter().filter_map(Item::elements).flat_map(|(x, y)| [x, y]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut next = mentioned.last().map_or(0, |m| m + 1);
    let first = mentioned.first().copied().unwrap_or_else(|| {
        next += 1;
        0
    });
    items.push(Item::Pos(first, first));
    for &x in &mentioned {
        items.push(Item::Pos(first, x));
    }
    let mut classes = vec![vec![first]];
    if two {
        classes.push(vec![next]);
        items.push(Item::Pos(next, next));
        next += 1;
    }
    let mut turn = 0;
    while items.len() < horizon {
        let c = turn % classes.len();
        turn += 1;
        let x = next;
        next += 1;
        items.push(Item::Pos(x, x));
        for &y in &classes[c] {
            items.push(Item::Pos(x, y));
            items.push(Item::Pos(y, x));
        }
        classes[c].push(x);
    }
    items.truncate(horizon.max(sigma.len()));
    items
}

/// Phase 1 looks for a text locking sequence `σ` of the learner on `[ω:1]`;
/// phase 2 continues `σ` as a text for `[ω:2]` if `L(σ) = [ω:1]`, or for
/// `[ω:1]` otherwise, and checks whether the learner is left wrong.
pub fn txt_adversary(
    learner: &dyn Learner,
    depth: usize,
    width: usize,
    rounds: usize,
    horizon: usize,
) -> Result<TextRun> {
    let one = Character::infinite_classes(Fin(1));
    let two = Character::infinite_classes(Fin(2));
    let mut sigma = Prefix::default();
    let mut found = None;
    let mut used = 0;
    while used < rounds {
        used += 1;
        match weak_locking_search(learner, &one, &sigma, depth, width, SearchMode::Text)? {
            LockingVerdict::Candidate { .. } => {
                found = Some(sigma.clone());
                break;
            }
            LockingVerdict::Violator { tau, .. } => sigma = Prefix::new(link_all(parse_items(&tau))),
        }
    }
    let mut run = TextRun {
        learner: learner.name(),
        verdict: TextVerdict::Undecided,
        rounds: used,
        sigma: None,
        locked_on: None,
        presented: None,
        final_conjecture: None,
        text: sigma.clone(),
    };
    let Some(sigma) = found else {
        // Every round broke the conjecture on one growing [ω:1] text: no
        // convergence there.
        let mut l = learner.clone_box();
        l.reset();
        let mut trace = crate::learners::Trace::default();
        for item in &sigma.items {
            trace.push(l.feed(item));
        }
        if trace.mind_changes() >= rounds {
            run.verdict = TextVerdict::Defeated;
            run.presented = Some(one);
            run.final_conjecture = Some(l.current());
        }
        return Ok(run);
    };
    let locked = crate::learners::conjecture_on(learner, &sigma.items);
    let wants_two = locked.character().is_some_and(|c| c.iso_eq(&one));
    let target = if wants_two { two } else { one };
    let text = extend_text(&sigma.items, wants_two, horizon);
    let last = crate::learners::conjecture_on(learner, &text);
    let wrong = last.character().is_none_or(|c| !c.iso_eq(&target));
    run.verdict = if wrong {
        TextVerdict::Defeated
    } else {
        TextVerdict::Undecided
    };
    run.sigma = Some(sigma.items.iter().map(Item::to_string).collect());
    run.locked_on = Some(locked);
    run.presented = Some(target);
    run.final_conjecture = Some(last);
    run.text = Prefix::new(text);
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{Constant, TextLearner, TwoStage};
    use crate::structure::PrefixState;

    #[test]
    fn constants_are_defeated() {
        for n in [1, 2] {
            let l = Constant(Character::infinite_classes(Fin(n)));
            let run = txt_adversary(&l, 10, 4, 5, 500).unwrap();
            assert_eq!(run.verdict, TextVerdict::Defeated);
            assert_eq!(run.rounds, 1);
        }
    }

    #[test]
    fn reordered_two_stage_is_not_learned() {
        let l = TextLearner::new(Box::new(TwoStage::new()));
        let run = txt_adversary(&l, 10, 4, 5, 500).unwrap();
        // Every candidate is broken by a fresh, not yet linked element.
        assert_eq!(run.verdict, TextVerdict::Defeated);
        assert_eq!(run.rounds, 5);
        assert!(run.sigma.is_none());
        let st = run.text.decode().unwrap();
        assert_eq!(st.class_roots().len(), 1);
    }

    #[test]
    fn phase_two_texts_have_the_right_classes() {
        let sigma = vec![Item::Pos(3, 4), Item::Pos(7, 7)];
        let t = extend_text(&sigma, true, 200);
        let mut st = PrefixState::new();
        for item in &t {
            st.push(item).unwrap();
        }
        assert_eq!(st.class_roots().len(), 2);
        let t = extend_text(&[], false, 50);
        assert_eq!(t.len(), 50);
    }
}
