//! Complex-valued functions on Z/NZ and their Fourier spectra.

use num_complex::Complex64;

use crate::arith::Modulus;
use crate::error::{LabError, Result};

pub const ONE_BOUNDED_SLACK: f64 = 1e-9;

/// A function `f: Z/NZ -> C`, indexed by residue.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFunction {
    modulus: Modulus,
    values: Vec<Complex64>,
    one_bounded: bool,
}

impl CyclicFunction {
    pub fn new(modulus: &Modulus, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != modulus.size() {
            return Err(LabError::LengthMismatch {
                expected: modulus.size(),
                got: values.len(),
            });
        }
        Ok(Self {
            modulus: modulus.clone(),
            values,
            one_bounded: false,
        })
    }

    pub fn from_fn(modulus: &Modulus, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            modulus: modulus.clone(),
            values: (0..modulus.size()).map(f).collect(),
            one_bounded: false,
        }
    }

    pub fn constant(modulus: &Modulus, c: Complex64) -> Self {
        Self::from_fn(modulus, |_| c)
    }

    pub fn ones(modulus: &Modulus) -> Self {
        Self::constant(modulus, Complex64::new(1.0, 0.0)).with_one_bounded_flag()
    }

    pub fn zero(modulus: &Modulus) -> Self {
        Self::constant(modulus, Complex64::new(0.0, 0.0)).with_one_bounded_flag()
    }

    /// Indicator function of a set of residues (duplicates allowed).
    pub fn indicator(modulus: &Modulus, members: impl IntoIterator<Item = u64>) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); modulus.size()];
        for r in members {
            values[(r % modulus.get()) as usize] = Complex64::new(1.0, 0.0);
        }
        Self {
            modulus: modulus.clone(),
            values,
            one_bounded: true,
        }
    }

    /// The character `x -> e_N(xi x)`.
    pub fn character(modulus: &Modulus, xi: i64) -> Self {
        let n = modulus.get();
        let xi = modulus.reduce(xi);
        Self::from_fn(modulus, |x| modulus.root(((x as u64 * xi) % n) as usize))
            .with_one_bounded_flag()
    }

    /// Check `max |f| <= 1 + 1e-9` and record the assertion.
    pub fn assert_one_bounded(mut self) -> Result<Self> {
        if let Some((x, v)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| v.norm() > 1.0 + ONE_BOUNDED_SLACK)
        {
            return Err(LabError::NotOneBounded(v.norm(), x));
        }
        self.one_bounded = true;
        Ok(self)
    }

    fn with_one_bounded_flag(mut self) -> Self {
        self.one_bounded = true;
        self
    }

    pub fn is_one_bounded(&self) -> bool {
        self.one_bounded
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `f(x)` with `x` taken modulo N.
    #[inline]
    pub fn at(&self, x: usize) -> Complex64 {
        self.values[x % self.values.len()]
    }

    pub fn check_same(&self, other: &CyclicFunction) -> Result<()> {
        self.modulus.check_same(&other.modulus)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64, keep_bound: bool) -> Self {
        Self {
            modulus: self.modulus.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            one_bounded: keep_bound && self.one_bounded,
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj(), true)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c, c.norm() <= 1.0)
    }

    /// `x -> f(x + a)`.
    pub fn shifted(&self, a: i64) -> Self {
        let n = self.size();
        let a = self.modulus.reduce(a) as usize;
        Self {
            modulus: self.modulus.clone(),
            values: (0..n).map(|x| self.values[(x + a) % n]).collect(),
            one_bounded: self.one_bounded,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            modulus: self.modulus.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            one_bounded: false,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = self.zip(other, |a, b| a * b)?;
        out.one_bounded = self.one_bounded && other.one_bounded;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.size() as f64
    }

    /// `(E_x |f(x)|^p)^(1/p)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (s / self.size() as f64).powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.size() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.size() as f64).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bilinear pairing `E_x f(x) g(x)` (no conjugation).
    pub fn pairing(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b)
            .sum::<Complex64>()
            / self.size() as f64)
    }

    /// Hermitian inner product `E_x f(x) conj(g(x))`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b.conj())
            .sum::<Complex64>()
            / self.size() as f64)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients `f^(xi) = E_x f(x) e_N(x xi)`, indexed by `xi in 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    modulus: Modulus,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(modulus: &Modulus, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != modulus.size() {
            return Err(LabError::LengthMismatch {
                expected: modulus.size(),
                got: coefficients.len(),
            });
        }
        Ok(Self {
            modulus: modulus.clone(),
            coefficients,
        })
    }

    pub(crate) fn from_raw(modulus: &Modulus, coefficients: Vec<Complex64>) -> Self {
        debug_assert_eq!(coefficients.len(), modulus.size());
        Self {
            modulus: modulus.clone(),
            coefficients,
        }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    /// Coefficient at a frequency taken modulo N (negative allowed).
    #[inline]
    pub fn at(&self, xi: i64) -> Complex64 {
        self.coefficients[self.modulus.reduce(xi) as usize]
    }

    /// `(sum_xi |f^(xi)|^p)^(1/p)`, counting measure on frequencies.
    pub fn ell_p(&self, p: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    pub fn ell1(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn sup(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}
