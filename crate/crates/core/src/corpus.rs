//! Families used by tests, benches and the CLI.

use crate::character::{all_sizes_but, Character};
use crate::extnat::{Fin, Omega};

#[derive(Debug, Clone)]
pub struct CorpusFamily {
    pub name: String,
    pub members: Vec<Character>,
}

fn fam(name: &str, members: Vec<Character>) -> CorpusFamily {
    CorpusFamily {
        name: name.into(),
        members,
    }
}

/// `{[5:ω, 6:2], [5:ω, 7:1]}`.
pub fn example_one() -> Vec<Character> {
    vec![
        Character::listed(&[(5, Omega), (6, Fin(2))]),
        Character::listed(&[(5, Omega), (7, Fin(1))]),
    ]
}

/// `{[5:ω], [6:ω]}`.
pub fn example_two() -> Vec<Character> {
    vec![Character::listed(&[(5, Omega)]), Character::listed(&[(6, Omega)])]
}

/// `{[5:ω], [5:ω, 2:1]}`: `[5:ω]` is a limit of the other member.
pub fn limit_family() -> Vec<Character> {
    vec![
        Character::listed(&[(5, Omega)]),
        Character::listed(&[(5, Omega), (2, Fin(1))]),
    ]
}

/// `{A_1, ..., A_m}` with `A_i` having one class of every finite size but `i`.
pub fn kronecker_slice(m: u64) -> Vec<Character> {
    (1..=m).map(all_sizes_but).collect()
}

/// Finitely separable families.
pub fn separable_corpus() -> Vec<CorpusFamily> {
    let mut out = vec![fam("example-1", example_one()), fam("example-2", example_two())];
    for m in 2..=6 {
        out.push(fam(&format!("kronecker-{m}"), kronecker_slice(m)));
    }
    let l = Character::listed;
    out.extend([
        fam("one-vs-two", vec![l(&[(1, Omega)]), l(&[(2, Omega)])]),
        fam("three-pair", vec![l(&[(3, Fin(2))]), l(&[(3, Fin(1))])]),
        fam("pairs-plus-triple", vec![l(&[(2, Omega)]), l(&[(2, Omega), (3, Fin(1))])]),
        fam(
            "singletons-plus-fours",
            vec![l(&[(1, Omega)]), l(&[(1, Omega), (4, Fin(1))]), l(&[(1, Omega), (4, Fin(2))])],
        ),
        fam("three-pairs-vs-pairs", vec![l(&[(2, Fin(3)), (1, Omega)]), l(&[(2, Omega)])]),
        fam("fives-two-or-three", vec![l(&[(5, Omega), (2, Fin(1))]), l(&[(5, Omega), (3, Fin(1))])]),
    ]);
    out
}
