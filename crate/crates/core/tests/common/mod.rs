//! Brute-force embedding oracle shared by the property and acceptance tests.
//!
//! Structures with default count 0 are expanded into explicit class lists
//! (`u64::MAX` stands for an infinite class, infinite counts are truncated)
//! and matched with augmenting paths. Nothing here goes through the
//! library's own embedding code.

#![allow(dead_code)]

use limitlearn::{Character, ExtNat, Fin, Omega};

const INF: u64 = u64::MAX;

fn entries(c: &Character) -> Vec<(u64, ExtNat)> {
    assert_eq!(c.default_count(), Fin(0), "oracle needs default count 0");
    let mut out: Vec<(u64, ExtNat)> = c.exceptions().iter().map(|(&k, &n)| (k, n)).collect();
    out.push((INF, c.omega_count()));
    out
}

/// Class sizes with every infinite count cut to `copies`.
fn expand(c: &Character, copies: u64, cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (k, n) in entries(c) {
        let n = match n {
            Fin(n) => n,
            Omega => copies,
        };
        out.extend(std::iter::repeat_n(k.min(cap), n as usize));
    }
    out
}

fn finite_classes(c: &Character) -> u64 {
    entries(c).iter().filter_map(|(_, n)| n.finite()).sum()
}

fn max_finite_size(c: &Character) -> u64 {
    c.exceptions().keys().copied().max().unwrap_or(0)
}

/// Is there an injective `a_i -> b_j` with `a_i <= b_j`?
pub fn matches(a: &[u64], b: &[u64]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut owner: Vec<Option<usize>> = vec![None; b.len()];
    fn augment(i: usize, a: &[u64], b: &[u64], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..b.len() {
            if a[i] <= b[j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, a, b, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..a.len()).all(|i| augment(i, a, b, &mut vec![false; b.len()], &mut owner))
}

/// `a` embeds into `b`. More copies of an infinitely repeated class than
/// `b` has finite classes decide the question; `b` only needs as many
/// copies as `a` has classes.
pub fn embeds(a: &Character, b: &Character) -> bool {
    let ea = expand(a, finite_classes(b) + 1, INF);
    let eb = expand(b, ea.len() as u64, INF);
    matches(&ea, &eb)
}

/// Every finite substructure of `a` embeds into `b`: infinite classes of `a`
/// are cut just above the largest finite class of `b`, the hardest cut.
pub fn fin_embeds(a: &Character, b: &Character) -> bool {
    let ea = expand(a, finite_classes(b) + 1, max_finite_size(b) + 1);
    let eb = expand(b, ea.len() as u64, INF);
    matches(&ea, &eb)
}

/// All characters over sizes `{1, 2, 4}` plus infinite classes with counts
/// in `{0, 1, 3, ω}`, the empty one left out.
pub fn small_characters() -> Vec<Character> {
    let counts = [Fin(0), Fin(1), Fin(3), Omega];
    let mut out = Vec::new();
    for &a in &counts {
        for &b in &counts {
            for &d in &counts {
                for &w in &counts {
                    let listed: Vec<(u64, ExtNat)> =
                        [(1, a), (2, b), (4, d)].into_iter().filter(|(_, n)| !n.is_zero()).collect();
                    if listed.is_empty() && w.is_zero() {
                        continue;
                    }
                    out.push(Character::listed(&listed).with_omega_count(w));
                }
            }
        }
    }
    out
}
