//! Multiplicative differences, Gowers uniformity norms, box inner products
//! and dual functions.
//!
//! Cube corners `omega in {0,1}^s` are bitmasks: bit `i` is the coefficient
//! of `h_{i+1}`. Corner `omega` is conjugated when `|omega|` is odd.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{Modulus, Residue};
use crate::error::{LabError, Result};
use crate::fourier::{dft, idft};
use crate::function::{CyclicFunction, Spectrum};
use crate::par;

pub const MAX_ORDER: usize = 6;
pub const NEGATIVE_SLACK: f64 = 1e-9;

/// Functions attached to cube corners.
pub type CornerFamily = BTreeMap<u32, CyclicFunction>;

/// `(h_1, ..., h_s)` with `s <= 6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftVector {
    components: Vec<Residue>,
}

impl ShiftVector {
    pub fn new(modulus: &Modulus, components: &[i64]) -> Result<Self> {
        if components.len() > MAX_ORDER {
            return Err(LabError::OrderOutOfRange(components.len(), 0, MAX_ORDER));
        }
        Ok(Self {
            components: components.iter().map(|&h| modulus.residue(h)).collect(),
        })
    }

    pub fn empty() -> Self {
        Self {
            components: Vec::new(),
        }
    }

    pub fn components(&self) -> &[Residue] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `omega . h` reduced mod N.
    pub fn dot(&self, omega: u32, n: u64) -> u64 {
        self.components
            .iter()
            .enumerate()
            .filter(|(i, _)| omega >> i & 1 == 1)
            .fold(0, |acc, (_, h)| (acc + h.value()) % n)
    }
}

/// The corner set `{0,1}^s`, or `{0,1}^s_*` when `star` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubePattern {
    pub s: usize,
    pub star: bool,
}

impl CubePattern {
    pub fn new(s: usize, star: bool) -> Result<Self> {
        if s > MAX_ORDER {
            return Err(LabError::OrderOutOfRange(s, 0, MAX_ORDER));
        }
        Ok(Self { s, star })
    }

    pub fn corners(&self) -> impl Iterator<Item = u32> {
        let start = u32::from(self.star);
        start..(1u32 << self.s)
    }

    pub fn count(&self) -> usize {
        (1usize << self.s) - usize::from(self.star)
    }

    /// Weight `|omega|`.
    pub fn weight(omega: u32) -> u32 {
        omega.count_ones()
    }

    /// Every corner filled with the same function.
    pub fn constant_family(&self, f: &CyclicFunction) -> CornerFamily {
        self.corners().map(|w| (w, f.clone())).collect()
    }
}

/// `Delta_h f(x) = conj(f(x + h)) f(x)`.
pub fn diff_op(f: &CyclicFunction, h: i64) -> CyclicFunction {
    let h = f.modulus().reduce(h) as usize;
    diff_raw(f, h)
}

fn diff_raw(f: &CyclicFunction, h: usize) -> CyclicFunction {
    let n = f.size();
    let v = f.values();
    let out = (0..n)
        .map(|x| {
            let y = if x + h >= n { x + h - n } else { x + h };
            v[y].conj() * v[x]
        })
        .collect();
    CyclicFunction::new(f.modulus(), out).expect("same length")
}

/// `Delta_{h_1} ... Delta_{h_s} f`, applied innermost-last.
pub fn diff_multi(f: &CyclicFunction, h: &ShiftVector) -> CyclicFunction {
    h.components()
        .iter()
        .rev()
        .fold(f.clone(), |acc, r| diff_raw(&acc, r.index()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GowersPath {
    Direct,
    RecursiveFft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GowersReport {
    pub s: usize,
    pub value: f64,
    pub path: GowersPath,
    #[serde(rename = "N")]
    pub n: u64,
}

fn check_order(s: usize, min: usize) -> Result<()> {
    if s < min || s > MAX_ORDER {
        return Err(LabError::OrderOutOfRange(s, min, MAX_ORDER));
    }
    Ok(())
}

fn root_of_average(avg: Complex64, s: usize) -> Result<f64> {
    if avg.re < -NEGATIVE_SLACK {
        return Err(LabError::NegativeAverage(avg.re));
    }
    Ok(avg.re.max(0.0).powf(1.0 / (1u64 << s) as f64))
}

/// `E_{x,h} Delta_h f(x)`, i.e. `||f||_{U^s}^{2^s}` before taking the root.
pub fn gowers_power(f: &CyclicFunction, s: usize) -> Complex64 {
    match s {
        0 => f.mean(),
        1 => Complex64::new(f.mean().norm_sqr(), 0.0),
        2 => Complex64::new(
            dft(f)
                .coefficients()
                .iter()
                .map(|c| c.norm_sqr().powi(2))
                .sum(),
            0.0,
        ),
        _ => {
            let n = f.size();
            par::block_sum(n, |h| gowers_power(&diff_raw(f, h), s - 1)) / n as f64
        }
    }
}

/// `||f||_{U^s}` through the spectral U^2 base and recursion on differences.
pub fn gowers_norm(f: &CyclicFunction, s: usize) -> Result<GowersReport> {
    check_order(s, 1)?;
    Ok(GowersReport {
        s,
        value: root_of_average(gowers_power(f, s), s)?,
        path: GowersPath::RecursiveFft,
        n: f.modulus().get(),
    })
}

/// `||f||_{U^s}` by summing `Delta_h f(x)` over every `(x, h)`.
pub fn gowers_norm_direct(f: &CyclicFunction, s: usize) -> Result<GowersReport> {
    check_order(s, 1)?;
    fn walk(f: &CyclicFunction, depth: usize) -> Complex64 {
        if depth == 0 {
            return f.values().iter().sum();
        }
        (0..f.size())
            .map(|h| walk(&diff_raw(f, h), depth - 1))
            .sum()
    }
    let n = f.size() as f64;
    let avg = walk(f, s) / n.powi(s as i32 + 1);
    Ok(GowersReport {
        s,
        value: root_of_average(avg, s)?,
        path: GowersPath::Direct,
        n: f.modulus().get(),
    })
}

/// `(sum_xi |f^(xi)|^4)^(1/4)`.
pub fn u2_via_spectrum(f: &CyclicFunction) -> f64 {
    dft(f).ell_p(4.0)
}

fn corners_as_vec(family: &CornerFamily, pattern: CubePattern) -> Result<Vec<CyclicFunction>> {
    let mut out = Vec::with_capacity(1 << pattern.s);
    let mut modulus: Option<&Modulus> = None;
    for w in 0..(1u32 << pattern.s) {
        if pattern.star && w == 0 {
            continue;
        }
        let f = family.get(&w).ok_or(LabError::MissingCorner(w))?;
        if let Some(m) = modulus {
            m.check_same(f.modulus())?;
        }
        modulus = Some(f.modulus());
        out.push(f.clone());
    }
    Ok(out)
}

/// `g_{omega'}(y) = f_{omega' 0}(y) conj(f_{omega' 1}(y + h))`, top bit peeled.
fn peel_top(fs: &[CyclicFunction], h: usize) -> Vec<CyclicFunction> {
    let half = fs.len() / 2;
    (0..half)
        .map(|w| {
            let lo = fs[w].values();
            let hi = fs[w + half].values();
            let n = lo.len();
            let vals = (0..n)
                .map(|x| {
                    let y = if x + h >= n { x + h - n } else { x + h };
                    lo[x] * hi[y].conj()
                })
                .collect();
            CyclicFunction::new(fs[w].modulus(), vals).expect("same length")
        })
        .collect()
}

fn inner_rec(fs: &[CyclicFunction]) -> Complex64 {
    match fs.len() {
        1 => fs[0].mean(),
        2 => fs[0].mean() * fs[1].mean().conj(),
        4 => {
            let a = dft(&fs[0]);
            let b = dft(&fs[1]);
            let c = dft(&fs[2]);
            let d = dft(&fs[3]);
            (0..fs[0].size())
                .map(|i| {
                    a.coefficients()[i]
                        * b.coefficients()[i].conj()
                        * c.coefficients()[i].conj()
                        * d.coefficients()[i]
                })
                .sum()
        }
        _ => {
            let n = fs[0].size();
            par::block_sum(n, |h| inner_rec(&peel_top(fs, h))) / n as f64
        }
    }
}

/// Box inner product `E_{x,h} prod_omega C^{|omega|} f_omega(x + omega.h)`.
pub fn gowers_inner(family: &CornerFamily, s: usize) -> Result<Complex64> {
    check_order(s, 0)?;
    let fs = corners_as_vec(family, CubePattern::new(s, false)?)?;
    Ok(inner_rec(&fs))
}

/// `fs[w - 1]` holds `f_w` for `w = 1 .. 2^s`.
fn dual_rec(fs: &[CyclicFunction], modulus: &Modulus) -> Vec<Complex64> {
    let n = modulus.size();
    match fs.len() {
        1 => vec![fs[0].mean().conj(); n],
        3 => {
            let b = dft(&fs[0]);
            let c = dft(&fs[1]);
            let d = dft(&fs[2]);
            // D(x) = sum_xi conj b^ conj c^ d^ e_N(xi x): synthesis of the reversed spectrum.
            let rev = (0..n)
                .map(|i| {
                    let j = (n - i) % n;
                    b.coefficients()[j].conj() * c.coefficients()[j].conj() * d.coefficients()[j]
                })
                .collect();
            idft(&Spectrum::new(modulus, rev).expect("length n")).into_values()
        }
        _ => {
            let half = fs.len().div_ceil(2);
            let top = &fs[half - 1];
            let blocks = n.div_ceil(par::BLOCK);
            let partials = par::map_indices(blocks, |b| {
                let mut acc = vec![Complex64::new(0.0, 0.0); n];
                for h in b * par::BLOCK..((b + 1) * par::BLOCK).min(n) {
                    // Corners without the top bit (starred, so index w - 1) and with it.
                    let mut full = Vec::with_capacity(2 * half);
                    full.push(CyclicFunction::ones(modulus));
                    full.extend(fs[..half - 1].iter().cloned());
                    full.push(CyclicFunction::ones(modulus));
                    full.extend(fs[half..].iter().cloned());
                    let g = peel_top(&full, h);
                    let inner = dual_rec(&g[1..], modulus);
                    let tv = top.values();
                    for (x, slot) in acc.iter_mut().enumerate() {
                        let y = if x + h >= n { x + h - n } else { x + h };
                        *slot += tv[y].conj() * inner[x];
                    }
                }
                acc
            });
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for p in partials {
                for (o, v) in out.iter_mut().zip(p) {
                    *o += v;
                }
            }
            let scale = 1.0 / n as f64;
            out.iter_mut().for_each(|v| *v *= scale);
            out
        }
    }
}

/// Dual function `D(x) = E_h prod_{omega != 0} C^{|omega|} f_omega(x + omega.h)`.
///
/// Normalized so that `pairing(f, dual_us(f, ..., f)) = ||f||_{U^s}^{2^s}`.
pub fn dual_us(family: &CornerFamily, s: usize) -> Result<CyclicFunction> {
    check_order(s, 1)?;
    let pattern = CubePattern::new(s, true)?;
    let fs = corners_as_vec(family, pattern)?;
    let modulus = fs[0].modulus().clone();
    CyclicFunction::new(&modulus, dual_rec(&fs, &modulus))
}

/// Result of the quadratic-phase correlation search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCorrelation {
    pub value: f64,
    pub alpha: u64,
    pub beta: u64,
}

/// `max_{alpha,beta} |E_x p(x) conj(e_N(alpha x^2 + beta x))|` over the full grid.
///
/// The reported `(alpha, beta)` is the quadratic phase that `p` matches;
/// the maximal value equals the sup of `|E_x p(x) e_N(alpha x^2 + beta x)|`
/// since negation permutes the grid. Ties go to the smallest `(alpha, beta)`.
pub fn u3_small(p: &CyclicFunction) -> QuadraticCorrelation {
    let m = p.modulus();
    let n = m.size();
    let nn = n as u128;
    let per_alpha = par::map_indices(n, |alpha| {
        let q = CyclicFunction::from_fn(m, |x| {
            let x2 = (x as u128 * x as u128) % nn;
            let t = (alpha as u128 * x2) % nn;
            p.values()[x] * m.root(((nn - t) % nn) as usize)
        });
        let s = dft(&q);
        // Correlation with e_N(beta x) is the coefficient at -beta.
        let mut best = (f64::NEG_INFINITY, 0usize);
        for beta in 0..n {
            let v = s.coefficients()[(n - beta) % n].norm();
            if v > best.0 + 1e-12 {
                best = (v, beta);
            }
        }
        best
    });
    let mut best = QuadraticCorrelation {
        value: f64::NEG_INFINITY,
        alpha: 0,
        beta: 0,
    };
    for (alpha, (v, beta)) in per_alpha.into_iter().enumerate() {
        if v > best.value + 1e-12 {
            best = QuadraticCorrelation {
                value: v,
                alpha: alpha as u64,
                beta: beta as u64,
            };
        }
    }
    best
}
