use std::fmt;

use serde::{Deserialize, Serialize};

use crate::character::Character;
use crate::error::{Error, Result};
use crate::extnat::{ExtNat, Fin, Omega};

use super::perm::FinitePermutation;

/// How a size sequence continues after its head.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// The listed values, repeated forever.
    Cycle(Vec<ExtNat>),
    /// `from, from, ..., from + 1, ...`: each value `reps` times, the first
    /// one `reps - phase` times.
    Ascending { from: u64, reps: u64, phase: u64 },
}

impl Tail {
    fn at(&self, j: u64) -> ExtNat {
        match self {
            Tail::Cycle(v) => v[(j % v.len() as u64) as usize],
            Tail::Ascending { from, reps, phase } => Fin(from + (j + phase) / reps),
        }
    }

    fn period(&self) -> u64 {
        match self {
            Tail::Cycle(v) => v.len() as u64,
            Tail::Ascending { reps, .. } => *reps,
        }
    }

    /// Growth of the finite values over one period.
    fn rise(&self) -> u64 {
        match self {
            Tail::Cycle(_) => 0,
            Tail::Ascending { .. } => 1,
        }
    }

    /// The tail seen from `m` positions later.
    fn advance(&self, m: u64) -> Tail {
        match self {
            Tail::Cycle(v) => {
                let mut w = v.clone();
                w.rotate_left((m % v.len() as u64) as usize);
                Tail::Cycle(w)
            }
            Tail::Ascending { from, reps, phase } => {
                let p = phase + m;
                Tail::Ascending {
                    from: from + p / reps,
                    reps: *reps,
                    phase: p % reps,
                }
            }
        }
    }
}

/// A total map `i ↦ g(i)` into `ExtNat`, given by a finite head and a
/// periodic or slowly ascending tail. Kept in canonical form, so equal
/// maps are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeSequence {
    head: Vec<ExtNat>,
    tail: Tail,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SizeSequence {
    pub fn new(head: Vec<ExtNat>, tail: Tail) -> Result<Self> {
        match &tail {
            Tail::Cycle(v) if v.is_empty() => {
                return Err(Error::Representation("empty cycle".into()));
            }
            Tail::Ascending { reps, phase, .. } if *reps == 0 || phase >= reps => {
                return Err(Error::Representation("ascending tail needs 0 <= phase < reps".into()));
            }
            _ => {}
        }
        let mut s = SizeSequence { head, tail };
        s.normalize();
        Ok(s)
    }

    /// `g ≡ 0`.
    pub fn zero() -> Self {
        SizeSequence {
            head: Vec::new(),
            tail: Tail::Cycle(vec![Fin(0)]),
        }
    }

    pub fn head(&self) -> &[ExtNat] {
        &self.head
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn at(&self, i: u64) -> ExtNat {
        match self.head.get(i as usize) {
            Some(&v) => v,
            None => self.tail.at(i - self.head.len() as u64),
        }
    }

    fn normalize(&mut self) {
        if let Tail::Cycle(v) = &mut self.tail {
            let n = v.len();
            if let Some(p) = (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| v[i] == v[i % p])) {
                v.truncate(p);
            }
        }
        // Fold head entries that the tail would produce anyway.
        while let Some(&last) = self.head.last() {
            let folded = match &self.tail {
                Tail::Cycle(v) if v[v.len() - 1] == last => {
                    let mut w = v.clone();
                    w.rotate_right(1);
                    Tail::Cycle(w)
                }
                &Tail::Ascending { from, reps, phase } if phase > 0 && last == Fin(from) => Tail::Ascending {
                    from,
                    reps,
                    phase: phase - 1,
                },
                &Tail::Ascending { from, reps, phase: 0 } if from > 0 && last == Fin(from - 1) => {
                    Tail::Ascending {
                        from: from - 1,
                        reps,
                        phase: reps - 1,
                    }
                }
                _ => break,
            };
            self.head.pop();
            self.tail = folded;
        }
    }

    /// Same map with the head spelled out to at least `len` entries.
    fn unfolded(&self, len: usize) -> (Vec<ExtNat>, Tail) {
        let mut head = self.head.clone();
        let extra = len.saturating_sub(head.len());
        head.extend((0..extra as u64).map(|j| self.tail.at(j)));
        (head, self.tail.advance(extra as u64))
    }

    /// `g ∘ π`.
    pub fn compose(&self, pi: &FinitePermutation) -> SizeSequence {
        let reach = pi.support().last().map_or(0, |&m| m as usize + 1);
        let (mut head, tail) = self.unfolded(reach);
        for (&from, &to) in pi.moves() {
            head[from as usize] = self.at(to);
        }
        let mut s = SizeSequence { head, tail };
        s.normalize();
        s
    }

    /// `g(i) <= h(i)` for every `i`, decided exactly.
    pub fn pointwise_le(&self, other: &SizeSequence) -> bool {
        let t = self.head.len().max(other.head.len()) as u64;
        let (p1, p2) = (self.tail.period(), other.tail.period());
        let p = p1 / gcd(p1, p2) * p2;
        if !(0..t + p).all(|i| self.at(i) <= other.at(i)) {
            return false;
        }
        // Past `t`, both maps satisfy g(i + p) = g(i) + rise * p / period.
        let rise1 = self.tail.rise() * (p / p1);
        let rise2 = other.tail.rise() * (p / p2);
        (t..t + p).all(|i| match (self.at(i), other.at(i)) {
            (_, Omega) => true,
            (Omega, Fin(_)) => false,
            (Fin(_), Fin(_)) => rise1 <= rise2,
        })
    }

    /// `|{i : g(i) = a}|`.
    pub fn count_of(&self, a: ExtNat) -> ExtNat {
        let head = self.head.iter().filter(|&&v| v == a).count() as u64;
        let tail = match (&self.tail, a) {
            (Tail::Cycle(v), _) if v.contains(&a) => Omega,
            (Tail::Cycle(_), _) => Fin(0),
            (&Tail::Ascending { from, reps, phase }, Fin(k)) if k == from => Fin(reps - phase),
            (&Tail::Ascending { from, reps, .. }, Fin(k)) if k > from => Fin(reps),
            (Tail::Ascending { .. }, _) => Fin(0),
        };
        Fin(head) + tail
    }
}

impl fmt::Display for SizeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(ExtNat::to_string).collect();
        write!(f, "[{}", head.join(","))?;
        if !self.head.is_empty() {
            write!(f, "; ")?;
        }
        match &self.tail {
            Tail::Cycle(v) => {
                let v: Vec<String> = v.iter().map(ExtNat::to_string).collect();
                write!(f, "({})*]", v.join(","))
            }
            Tail::Ascending { from, reps, phase } => write!(f, "{from}.. x{reps} +{phase}]"),
        }
    }
}

/// The canonical `g_A` of a character: position `i` holds the size of the
/// `i`-th class, 0 past the last one.
///
/// With default count 0 the head lists the finitely many classes of each
/// finite size (ascending), then the finitely many infinite classes; sizes
/// with infinitely many classes repeat in the tail. With a finite default
/// `d > 0` every size up to the largest exception is spelled out and the
/// tail ascends with `d` copies of each size.
pub fn g_of_char(c: &Character) -> Result<SizeSequence> {
    let unrepresentable = || Error::Unrepresentable(format!("{c} has no size sequence of this shape"));
    let mut head = Vec::new();
    let tail = match c.default_count() {
        Fin(0) => {
            let mut cycle = Vec::new();
            for (&k, &n) in c.exceptions() {
                match n {
                    Fin(n) => head.extend(std::iter::repeat_n(Fin(k), n as usize)),
                    Omega => cycle.push(Fin(k)),
                }
            }
            match c.omega_count() {
                Fin(n) => head.extend(std::iter::repeat_n(Omega, n as usize)),
                Omega => cycle.push(Omega),
            }
            if cycle.is_empty() {
                cycle.push(Fin(0));
            }
            Tail::Cycle(cycle)
        }
        Fin(d) => {
            let Fin(w) = c.omega_count() else {
                return Err(unrepresentable());
            };
            head.extend(std::iter::repeat_n(Omega, w as usize));
            let top = c.max_listed_size();
            for k in 1..=top {
                let Fin(n) = c.count_at(k) else {
                    return Err(unrepresentable());
                };
                head.extend(std::iter::repeat_n(Fin(k), n as usize));
            }
            Tail::Ascending {
                from: top + 1,
                reps: d,
                phase: 0,
            }
        }
        Omega => return Err(unrepresentable()),
    };
    SizeSequence::new(head, tail)
}
