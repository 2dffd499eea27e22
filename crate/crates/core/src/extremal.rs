//! Search for sets avoiding `(x, x + P(y), x + Q(y), x + P(y) + Q(y))`.
//!
//! A shift `y` is admissible unless `P(y) = Q(y) = 0 mod N`; those `y`
//! give the one-point configuration contained in every nonempty set.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::Modulus;
use crate::error::{LabError, Result};
use crate::poly::IntPolynomial;

pub const EXACT_LIMIT: u64 = 19;

/// Subset of `Z/NZ` as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: u64,
    bits: Vec<u64>,
}

impl SubsetMask {
    pub fn empty(modulus: &Modulus) -> Self {
        Self {
            n: modulus.get(),
            bits: vec![0; modulus.size().div_ceil(64)],
        }
    }

    pub fn full(modulus: &Modulus) -> Self {
        let mut s = Self::empty(modulus);
        (0..modulus.get()).for_each(|r| s.insert(r));
        s
    }

    pub fn from_members(modulus: &Modulus, members: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self::empty(modulus);
        members
            .into_iter()
            .for_each(|r| s.insert(r % modulus.get()));
        s
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn contains(&self, r: u64) -> bool {
        self.bits[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    pub fn insert(&mut self, r: u64) {
        self.bits[(r / 64) as usize] |= 1 << (r % 64);
    }

    pub fn remove(&mut self, r: u64) {
        self.bits[(r / 64) as usize] &= !(1 << (r % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> Vec<u64> {
        (0..self.n).filter(|&r| self.contains(r)).collect()
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: u64,
    pub y: u64,
    pub points: [u64; 4],
}

/// `(P(y), Q(y))` for every admissible `y`, in increasing `y`.
fn admissible_shifts(n: u64, pp: &IntPolynomial, qq: &IntPolynomial) -> Vec<(u64, u64, u64)> {
    (0..n)
        .filter_map(|y| {
            let (a, b) = (pp.eval_mod(y, n), qq.eval_mod(y, n));
            (a != 0 || b != 0).then_some((y, a, b))
        })
        .collect()
}

pub fn is_admissible(y: u64, n: u64, pp: &IntPolynomial, qq: &IntPolynomial) -> bool {
    pp.eval_mod(y, n) != 0 || qq.eval_mod(y, n) != 0
}

/// First configuration in `(x, y)` lexicographic order.
pub fn find_progression(a: &SubsetMask, pp: &IntPolynomial, qq: &IntPolynomial) -> Option<Witness> {
    let n = a.modulus();
    let shifts = admissible_shifts(n, pp, qq);
    for x in a.members() {
        for &(y, p, q) in &shifts {
            let pts = [x, (x + p) % n, (x + q) % n, (x + p + q) % n];
            if pts[1..].iter().all(|&r| a.contains(r)) {
                return Some(Witness { x, y, points: pts });
            }
        }
    }
    None
}

/// Point sets of all configurations as bitmasks, minimal under inclusion.
fn minimal_configurations(n: u64, pp: &IntPolynomial, qq: &IntPolynomial) -> Vec<u32> {
    let mut masks: Vec<u32> = Vec::new();
    for &(_, p, q) in &admissible_shifts(n, pp, qq) {
        for x in 0..n {
            let m = [x, (x + p) % n, (x + q) % n, (x + p + q) % n]
                .iter()
                .fold(0u32, |acc, &r| acc | 1 << r);
            masks.push(m);
        }
    }
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut minimal: Vec<u32> = Vec::new();
    for m in masks {
        if !minimal.iter().any(|&s| s & !m == 0) {
            minimal.push(m);
        }
    }
    minimal
}

struct Search {
    order: Vec<u32>,
    touching: Vec<Vec<u32>>,
    best_size: usize,
    best: u32,
}

impl Search {
    fn run(&mut self, depth: usize, current: u32, size: usize) {
        if size > self.best_size {
            self.best_size = size;
            self.best = current;
        }
        if depth == self.order.len() || size + (self.order.len() - depth) <= self.best_size {
            return;
        }
        let v = self.order[depth];
        let with = current | 1 << v;
        if self.touching[v as usize].iter().all(|&c| c & with != c) {
            self.run(depth + 1, with, size + 1);
        }
        self.run(depth + 1, current, size);
    }
}

/// A maximum free set by branch and bound, for `N <= 19`.
pub fn max_free_exact(
    modulus: &Modulus,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<(usize, SubsetMask)> {
    let n = modulus.get();
    if n > EXACT_LIMIT {
        return Err(LabError::ExactTooLarge(n, EXACT_LIMIT));
    }
    let configs = minimal_configurations(n, pp, qq);
    let touching: Vec<Vec<u32>> = (0..n as u32)
        .map(|v| {
            configs
                .iter()
                .copied()
                .filter(|c| c >> v & 1 == 1)
                .collect()
        })
        .collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(touching[v as usize].len()), v));
    let mut search = Search {
        order,
        touching,
        best_size: 0,
        best: 0,
    };
    search.run(0, 0, 0);
    let set = SubsetMask::from_members(modulus, (0..n).filter(|&r| search.best >> r & 1 == 1));
    Ok((search.best_size, set))
}

/// Would inserting `v` into `a` create a configuration?
fn creates_configuration(a: &SubsetMask, v: u64, shifts: &[(u64, u64, u64)]) -> bool {
    let n = a.modulus();
    let has = |r: u64| r == v || a.contains(r);
    shifts.iter().any(|&(_, p, q)| {
        let offsets = [0, p, q, (p + q) % n];
        offsets.iter().any(|&o| {
            let x = (v + n - o) % n;
            offsets.iter().all(|&t| has((x + t) % n))
        })
    })
}

/// Random-order greedy growth of a free set.
pub fn grow_free_greedy(
    modulus: &Modulus,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
    seed: u64,
) -> SubsetMask {
    let n = modulus.get();
    let shifts = admissible_shifts(n, pp, qq);
    let mut order: Vec<u64> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut a = SubsetMask::empty(modulus);
    for v in order {
        if !creates_configuration(&a, v, &shifts) {
            a.insert(v);
        }
    }
    a
}
