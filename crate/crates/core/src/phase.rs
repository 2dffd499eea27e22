//! Quadratic and bracket phases, the square-completion identity,
//! Fejér approximation on low-dimensional tori, and the major-arc scan.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::Modulus;
use crate::error::{LabError, Result};
use crate::fourier::dft;
use crate::function::CyclicFunction;
use crate::par;
use crate::poly::IntPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticPhase {
    pub alpha: u64,
    pub beta: u64,
}

/// `x -> e_N(alpha x^2 + beta x)`.
pub fn quad_phase(q: QuadraticPhase, modulus: &Modulus) -> CyclicFunction {
    let n = modulus.get() as u128;
    let (a, b) = (q.alpha as u128 % n, q.beta as u128 % n);
    CyclicFunction::from_fn(modulus, |x| {
        let x = x as u128;
        modulus.root(((a * (x * x % n) + b * x) % n) as usize)
    })
    .assert_one_bounded()
    .expect("unit modulus")
}

/// `{x} = x - [x]` where `[x]` rounds to nearest with halves going up.
pub fn bracket_part(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let e = lo - (s - hi);
        Self { hi: s, lo: e }
    }

    fn product(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        Self::new(s, err + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::product(self.hi, o.hi);
        Self::new(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    /// `{self}` in `[-1/2, 1/2)`.
    fn bracket(self) -> Self {
        let k = self.hi.floor();
        let t = Self::new(self.hi - k, self.lo);
        let t = if t.hi < 0.0 {
            Self::new(t.hi + 1.0, t.lo)
        } else {
            t
        };
        if (t.hi - 0.5) + t.lo >= 0.0 {
            Self::new(t.hi - 1.0, t.lo)
        } else {
            t
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketTerm {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// `B(n, m) = sum_i a_i {alpha_i n} {beta_i m}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BracketQuadratic {
    pub terms: Vec<BracketTerm>,
}

impl BracketQuadratic {
    fn dd_value(&self, n: i64, m: i64) -> DoubleDouble {
        self.terms
            .iter()
            .fold(DoubleDouble::new(0.0, 0.0), |acc, t| {
                let u = DoubleDouble::product(t.alpha, n as f64).bracket();
                let v = DoubleDouble::product(t.beta, m as f64).bracket();
                acc.add(u.mul(v).mul(DoubleDouble::new(t.a, 0.0)))
            })
    }

    /// `B(n, m)` evaluated in double-double arithmetic.
    pub fn value(&self, n: i64, m: i64) -> f64 {
        self.dd_value(n, m).value()
    }

    /// `sum_i |a_i| / 4`.
    pub fn bound(&self) -> f64 {
        self.terms.iter().map(|t| t.a.abs()).sum::<f64>() / 4.0
    }

    /// `e(B(n, n))` reduced mod 1 before the exponential.
    pub fn phase(&self, n: i64) -> Complex64 {
        let theta = self.dd_value(n, n).bracket().value();
        Complex64::from_polar(1.0, TAU * theta)
    }
}

/// `n -> e(B(n, n))` for `n in 0..N`.
pub fn bracket_function(b: &BracketQuadratic, modulus: &Modulus) -> CyclicFunction {
    CyclicFunction::from_fn(modulus, |n| b.phase(n as i64))
}

/// Residuals mod N of the square-completion identity and the linear one.
pub fn quad_identity_check(
    x: u64,
    y: u64,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
    modulus: &Modulus,
) -> (u64, u64) {
    let n = modulus.get() as u128;
    let x = x as u128 % n;
    let p = pp.eval_mod(y, modulus.get()) as u128;
    let q = qq.eval_mod(y, modulus.get()) as u128;
    let sq = |v: u128| v % n * (v % n) % n;
    let lhs = sq(x + p + q);
    let rhs = (sq(x + p) + sq(x + q) + n - sq(x) + 2 * p * q % n) % n;
    let lin_lhs = (x + p + q) % n;
    let lin_rhs = ((x + p) + (x + q) + n - x) % n;
    (
        ((lhs + n - rhs) % n) as u64,
        ((lin_lhs + n - lin_rhs) % n) as u64,
    )
}

/// Samples of a function on the uniform grid `(j_1/m, ..., j_d/m)` of `T^d`,
/// row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub d: usize,
    pub m: usize,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn sample(d: usize, m: usize, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        if !(1..=2).contains(&d) || m == 0 {
            return Err(LabError::InvalidArgument(format!("grid d={d}, m={m}")));
        }
        let mut values = Vec::with_capacity(m.pow(d as u32));
        let mut point = vec![0.0; d];
        for idx in 0..m.pow(d as u32) {
            let mut rest = idx;
            for axis in (0..d).rev() {
                point[axis] = (rest % m) as f64 / m as f64;
                rest /= m;
            }
            values.push(f(&point));
        }
        Ok(Self { d, m, values })
    }

    pub fn sample_real(d: usize, m: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::sample(d, m, |t| Complex64::new(f(t), 0.0))
    }

    pub fn pitch(&self) -> f64 {
        1.0 / self.m as f64
    }
}

pub const FEJER_C: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerPlan {
    pub d: usize,
    /// Cutoff actually used.
    pub r: usize,
    /// Cutoff given by the starting rule `ceil(C ((L + 1)/eps)^{1/d})`.
    pub initial_r: usize,
    pub c: f64,
    pub grid_error: f64,
    pub total_mass: f64,
}

impl FejerPlan {
    /// `m_R(k) = prod_j (1 - |k_j|/R)_+`.
    pub fn weight(&self, k: &[i64]) -> f64 {
        fejer_weight(self.r, k)
    }
}

pub fn fejer_weight(r: usize, k: &[i64]) -> f64 {
    k.iter()
        .map(|&kj| (1.0 - kj.unsigned_abs() as f64 / r as f64).max(0.0))
        .product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerCoefficient {
    pub k: Vec<i64>,
    pub weight: f64,
    pub a: Complex64,
}

struct Trig {
    m: usize,
    table: Vec<Complex64>,
}

impl Trig {
    fn new(m: usize) -> Self {
        Self {
            m,
            table: (0..m)
                .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / m as f64))
                .collect(),
        }
    }

    /// `e(k j / m)`.
    fn e(&self, k: i64, j: usize) -> Complex64 {
        let idx = (k.rem_euclid(self.m as i64) as usize * j) % self.m;
        self.table[idx]
    }
}

/// Grid transform `c(k) = m^{-d} sum_theta f(theta) e(-k . theta)` for `|k_j| < R`,
/// stored as a `(2R - 1)^d` array.
fn grid_transform(g: &GridFunction, r: usize, trig: &Trig) -> Vec<Complex64> {
    let m = g.m;
    let w = 2 * r - 1;
    let ks: Vec<i64> = (0..w).map(|i| i as i64 - (r as i64 - 1)).collect();
    let axis = |vals: &[Complex64], k: i64| -> Complex64 {
        vals.iter()
            .enumerate()
            .map(|(j, &v)| v * trig.e(-k, j))
            .sum::<Complex64>()
            / m as f64
    };
    if g.d == 1 {
        return ks.iter().map(|&k| axis(&g.values, k)).collect();
    }
    // Last axis first, then the first.
    let rows: Vec<Vec<Complex64>> = par::map_indices(m, |i| {
        let v = &g.values[i * m..(i + 1) * m];
        ks.iter().map(|&k| axis(v, k)).collect()
    });
    let mut out = vec![Complex64::new(0.0, 0.0); w * w];
    for (b, _) in ks.iter().enumerate() {
        let col: Vec<Complex64> = rows.iter().map(|r| r[b]).collect();
        for (a, &k1) in ks.iter().enumerate() {
            out[a * w + b] = axis(&col, k1);
        }
    }
    out
}

/// Evaluate `sum_k a(k) e(k . theta)` on the sample grid.
fn evaluate_on_grid(
    d: usize,
    m: usize,
    r: usize,
    coeffs: &[Complex64],
    trig: &Trig,
) -> Vec<Complex64> {
    let w = 2 * r - 1;
    let ks: Vec<i64> = (0..w).map(|i| i as i64 - (r as i64 - 1)).collect();
    if d == 1 {
        return (0..m)
            .map(|j| {
                ks.iter()
                    .zip(coeffs)
                    .map(|(&k, &a)| a * trig.e(k, j))
                    .sum::<Complex64>()
            })
            .collect();
    }
    // partial[j2][a] = sum_b coeffs[a][b] e(k_b j2 / m)
    let partial: Vec<Vec<Complex64>> = par::map_indices(m, |j2| {
        (0..w)
            .map(|a| (0..w).map(|b| coeffs[a * w + b] * trig.e(ks[b], j2)).sum())
            .collect()
    });
    let rows: Vec<Vec<Complex64>> = par::map_indices(m, |j1| {
        (0..m)
            .map(|j2| {
                (0..w)
                    .map(|a| partial[j2][a] * trig.e(ks[a], j1))
                    .sum::<Complex64>()
            })
            .collect()
    });
    rows.concat()
}

/// Fejér approximation of a Lipschitz function given by grid samples.
///
/// Starts from `R = ceil(C ((L + 1)/eps)^{1/d})` and doubles `R` until the
/// grid sup-error plus `sqrt(d) L * pitch` is at most `eps`.
pub fn fejer_approx(
    samples: &GridFunction,
    lipschitz: f64,
    eps: f64,
) -> Result<(FejerPlan, Vec<FejerCoefficient>)> {
    let d = samples.d;
    if !(1..=2).contains(&d) {
        return Err(LabError::InvalidArgument(format!(
            "dimension {d} not in 1..=2"
        )));
    }
    if samples.values.len() != samples.m.pow(d as u32) {
        return Err(LabError::LengthMismatch {
            expected: samples.m.pow(d as u32),
            got: samples.values.len(),
        });
    }
    if !(eps > 0.0 && lipschitz >= 0.0) {
        return Err(LabError::InvalidArgument("need eps > 0 and L >= 0".into()));
    }
    let pitch = samples.pitch();
    if lipschitz * pitch > eps / 10.0 {
        return Err(LabError::GridTooCoarse(format!(
            "pitch {pitch} exceeds eps/(10 L) = {}",
            eps / (10.0 * lipschitz)
        )));
    }
    let trig = Trig::new(samples.m);
    let initial_r = (FEJER_C * ((lipschitz + 1.0) / eps).powf(1.0 / d as f64)).ceil() as usize;
    let mut r = initial_r.max(1);
    loop {
        if 2 * r > samples.m {
            return Err(LabError::GridTooCoarse(format!(
                "cutoff {r} exceeds half the grid size {}",
                samples.m
            )));
        }
        let w = 2 * r - 1;
        let ks: Vec<i64> = (0..w).map(|i| i as i64 - (r as i64 - 1)).collect();
        let raw = grid_transform(samples, r, &trig);
        let coeffs: Vec<Complex64> = raw
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let k = if d == 1 {
                    vec![ks[idx]]
                } else {
                    vec![ks[idx / w], ks[idx % w]]
                };
                c * fejer_weight(r, &k)
            })
            .collect();
        let approx = evaluate_on_grid(d, samples.m, r, &coeffs, &trig);
        let grid_error = approx
            .iter()
            .zip(&samples.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if grid_error + (d as f64).sqrt() * lipschitz * pitch <= eps {
            let mut list = Vec::new();
            for (idx, &a) in coeffs.iter().enumerate() {
                if a.norm() <= 1e-13 {
                    continue;
                }
                let k = if d == 1 {
                    vec![ks[idx]]
                } else {
                    vec![ks[idx / w], ks[idx % w]]
                };
                list.push(FejerCoefficient {
                    weight: fejer_weight(r, &k),
                    k,
                    a,
                });
            }
            let total_mass = list.iter().map(|c| c.a.norm()).sum();
            let plan = FejerPlan {
                d,
                r,
                initial_r,
                c: FEJER_C,
                grid_error,
                total_mass,
            };
            return Ok((plan, list));
        }
        r *= 2;
    }
}

/// Evaluate `sum_i a_i e(n_i . theta)`.
pub fn fejer_eval(coeffs: &[FejerCoefficient], theta: &[f64]) -> Complex64 {
    coeffs
        .iter()
        .map(|c| {
            let phase: f64 = c.k.iter().zip(theta).map(|(&k, &t)| k as f64 * t).sum();
            c.a * Complex64::from_polar(1.0, TAU * phase.rem_euclid(1.0))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyHit {
    pub alpha: u64,
    pub beta: u64,
    pub correlation: f64,
}

fn rounded(c: f64) -> i64 {
    (c * 1e12).round() as i64
}

fn hit_order(a: &FrequencyHit, b: &FrequencyHit) -> std::cmp::Ordering {
    rounded(b.correlation)
        .cmp(&rounded(a.correlation))
        .then(a.alpha.cmp(&b.alpha))
        .then(a.beta.cmp(&b.beta))
}

/// The `top_k` pairs maximizing `|E_y e_N(alpha Q(y) + beta P(y)) K(y)|`.
///
/// For each `alpha` the values `K(y) e_N(alpha Q(y))` are bucketed by
/// `P(y)`; one transform per `alpha` then gives every `beta` at once.
pub fn major_arc_scan(
    kk: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
    top_k: usize,
) -> Result<Vec<FrequencyHit>> {
    if top_k == 0 {
        return Err(LabError::InvalidArgument("top_k must be at least 1".into()));
    }
    let m = kk.modulus();
    let n = m.size();
    let (tp, tq) = (pp.table(m), qq.table(m));
    let per_alpha = par::map_indices(n, |alpha| {
        let mut bucket = vec![Complex64::new(0.0, 0.0); n];
        for y in 0..n {
            let t = (alpha as u128 * tq[y] as u128 % n as u128) as usize;
            bucket[tp[y]] += kk.values()[y] * m.root(t);
        }
        let s = dft(&CyclicFunction::new(m, bucket).expect("length n"));
        let mut hits: Vec<FrequencyHit> = s
            .coefficients()
            .iter()
            .enumerate()
            .map(|(beta, c)| FrequencyHit {
                alpha: alpha as u64,
                beta: beta as u64,
                correlation: c.norm(),
            })
            .collect();
        hits.sort_by(hit_order);
        hits.truncate(top_k);
        hits
    });
    let mut all: Vec<FrequencyHit> = per_alpha.into_iter().flatten().collect();
    all.sort_by(hit_order);
    all.truncate(top_k);
    Ok(all)
}
