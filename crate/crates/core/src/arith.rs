//! Prime moduli and residues.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Deterministic Miller-Rabin for all `u64` (bases from Jaeschke / Sinclair).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

struct ModulusInner {
    n: u64,
    roots: Vec<Complex64>,
}

/// The order N of the cyclic group, always a prime at least 5.
///
/// Cloning is cheap; the root-of-unity table `e_N(t) = exp(2 pi i t / N)`
/// for `t in 0..N` is built once at construction and shared.
#[derive(Clone)]
pub struct Modulus {
    inner: Arc<ModulusInner>,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 5 {
            return Err(LabError::ModulusTooSmall(n));
        }
        if !is_prime(n) {
            return Err(LabError::NotPrime(n));
        }
        // Upper half mirrors the lower half exactly: e_N(N - t) = conj e_N(t).
        let half: Vec<Complex64> = (0..=n / 2)
            .map(|t| {
                let theta = 2.0 * std::f64::consts::PI * (t as f64) / (n as f64);
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let roots = (0..n as usize)
            .map(|t| {
                if t <= n as usize / 2 {
                    half[t]
                } else {
                    half[n as usize - t].conj()
                }
            })
            .collect();
        Ok(Self {
            inner: Arc::new(ModulusInner { n, roots }),
        })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.inner.n
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.inner.n as usize
    }

    /// `e_N(t)` for a residue index `t in 0..N`.
    #[inline]
    pub fn root(&self, t: usize) -> Complex64 {
        self.inner.roots[t]
    }

    /// `e_N(t)` for an arbitrary integer `t`.
    #[inline]
    pub fn e(&self, t: i64) -> Complex64 {
        self.inner.roots[self.reduce(t) as usize]
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.inner.roots
    }

    #[inline]
    pub fn reduce(&self, t: i64) -> u64 {
        t.rem_euclid(self.inner.n as i64) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, t: i128) -> u64 {
        t.rem_euclid(self.inner.n as i128) as u64
    }

    pub fn residue(&self, t: i64) -> Residue {
        Residue {
            value: self.reduce(t),
            modulus: self.get(),
        }
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inverse(&self, a: u64) -> Option<u64> {
        let a = a % self.get();
        (a != 0).then(|| pow_mod(a, self.get() - 2, self.get()))
    }

    pub fn check_same(&self, other: &Modulus) -> Result<()> {
        if self.get() == other.get() {
            Ok(())
        } else {
            Err(LabError::ModulusMismatch(self.get(), other.get()))
        }
    }
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        self.get() == other.get()
    }
}

impl Eq for Modulus {}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.get())
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// An element of Z/NZ, stored as its representative in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: &Modulus) -> Self {
        modulus.residue(value)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn index(self) -> usize {
        self.value as usize
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
