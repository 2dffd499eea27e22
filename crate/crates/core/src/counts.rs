//! Progression counting operators and their dual functions.
//!
//! All averages run over the full group: `y = 0` is included.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::Modulus;
use crate::error::{LabError, Result};
use crate::fourier::dft;
use crate::function::CyclicFunction;
use crate::gowers::{diff_multi, CornerFamily, ShiftVector};
use crate::par;
use crate::poly::{rational_rank, IntPolynomial};

/// Polynomials `(P_1, ..., P_s)` with a level `t` for the truncated cube patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressionFamily {
    polys: Vec<IntPolynomial>,
    t: usize,
    modulus: Modulus,
    tables: Vec<Vec<usize>>,
}

impl ProgressionFamily {
    pub fn new(modulus: &Modulus, polys: Vec<IntPolynomial>, t: usize) -> Result<Self> {
        let s = polys.len();
        if s == 0 || s > crate::gowers::MAX_ORDER {
            return Err(LabError::InvalidFamily(format!("{s} polynomials")));
        }
        if t > s {
            return Err(LabError::InvalidFamily(format!("level {t} exceeds {s}")));
        }
        for i in 0..s {
            for j in 0..i {
                if polys[i] == polys[j] {
                    return Err(LabError::InvalidFamily(format!("{} repeated", polys[i])));
                }
            }
        }
        if rational_rank(&polys) != s {
            return Err(LabError::InvalidFamily(
                "polynomials are linearly dependent over Q".into(),
            ));
        }
        let tables = polys.iter().map(|p| p.table(modulus)).collect();
        Ok(Self {
            polys,
            t,
            modulus: modulus.clone(),
            tables,
        })
    }

    pub fn polys(&self) -> &[IntPolynomial] {
        &self.polys
    }

    pub fn s(&self) -> usize {
        self.polys.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// `omega . P(y) mod N`.
    pub fn corner_shift(&self, omega: u32, y: usize) -> usize {
        let n = self.modulus.size();
        self.tables
            .iter()
            .enumerate()
            .filter(|(i, _)| omega >> i & 1 == 1)
            .fold(0, |acc, (_, t)| (acc + t[y]) % n)
    }
}

fn same_modulus(fs: &[&CyclicFunction]) -> Result<()> {
    for w in fs.windows(2) {
        w[0].check_same(w[1])?;
    }
    Ok(())
}

#[inline]
fn wrap(a: usize, n: usize) -> usize {
    if a >= n {
        a - n
    } else {
        a
    }
}

/// `E_{x,y} f(x) g(x + P(y)) k(x + Q(y)) p(x + P(y) + Q(y))`.
pub fn lambda(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    p: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<Complex64> {
    same_modulus(&[f, g, k, p])?;
    let m = f.modulus();
    let n = m.size();
    let (tp, tq) = (pp.table(m), qq.table(m));
    let (fv, gv, kv, pv) = (f.values(), g.values(), k.values(), p.values());
    let total = par::block_sum(n, |y| {
        let (a, b) = (tp[y], tq[y]);
        let c = wrap(a + b, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..n {
            acc += fv[x] * gv[wrap(x + a, n)] * kv[wrap(x + b, n)] * pv[wrap(x + c, n)];
        }
        acc
    });
    Ok(total / (n as f64 * n as f64))
}

/// `E_{x,y,z} f(x) g(x + y) k(x + z) p(x + y + z)`, evaluated as
/// `sum_xi f^(xi) g^(-xi) k^(-xi) p^(xi)`.
pub fn lambda1(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    p: &CyclicFunction,
) -> Result<Complex64> {
    same_modulus(&[f, g, k, p])?;
    let n = f.size();
    let (fh, gh, kh, ph) = (dft(f), dft(g), dft(k), dft(p));
    let (fc, gc, kc, pc) = (
        fh.coefficients(),
        gh.coefficients(),
        kh.coefficients(),
        ph.coefficients(),
    );
    Ok((0..n)
        .map(|xi| {
            let neg = (n - xi) % n;
            pc[xi] * fc[xi] * gc[neg] * kc[neg]
        })
        .sum())
}

/// `E_{x,y} f(x) g(x + P(y)) k(x + Q(y)) p(y)`.
pub fn lambda2(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    p: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<Complex64> {
    same_modulus(&[f, g, k, p])?;
    let m = f.modulus();
    let n = m.size();
    let (tp, tq) = (pp.table(m), qq.table(m));
    let (fv, gv, kv, pv) = (f.values(), g.values(), k.values(), p.values());
    let total = par::block_sum(n, |y| {
        let (a, b) = (tp[y], tq[y]);
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..n {
            acc += fv[x] * gv[wrap(x + a, n)] * kv[wrap(x + b, n)];
        }
        acc * pv[y]
    });
    Ok(total / (n as f64 * n as f64))
}

fn level_corners(
    s: usize,
    t: usize,
    functions: &CornerFamily,
    modulus: &Modulus,
) -> Result<Vec<(u32, CyclicFunction)>> {
    let mut out = Vec::new();
    for w in 0..(1u32 << s) {
        if w.count_ones() as usize > t {
            continue;
        }
        let f = functions.get(&w).ok_or(LabError::MissingCorner(w))?;
        modulus.check_same(f.modulus())?;
        out.push((w, f.clone()));
    }
    Ok(out)
}

/// `E_{x,y} prod_{|omega| <= t} f_omega(x + omega . P(y))`.
pub fn lambda_st(family: &ProgressionFamily, functions: &CornerFamily) -> Result<Complex64> {
    let m = family.modulus();
    let n = m.size();
    let corners = level_corners(family.s(), family.t(), functions, m)?;
    let total = par::block_sum(n, |y| {
        let shifts: Vec<(usize, &[Complex64])> = corners
            .iter()
            .map(|(w, f)| (family.corner_shift(*w, y), f.values()))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..n {
            let mut prod = Complex64::new(1.0, 0.0);
            for (sh, v) in &shifts {
                prod *= v[wrap(x + sh, n)];
            }
            acc += prod;
        }
        acc
    });
    Ok(total / (n as f64 * n as f64))
}

/// `E_{x, h} prod_{omega in S} f_omega(x + omega . h)` with `fs[omega] = None`
/// for corners outside `S`. No conjugation.
fn cube_average(fs: &[Option<CyclicFunction>], n: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mean = |f: &Option<CyclicFunction>| f.as_ref().map_or(one, |f| f.mean());
    match fs.len() {
        1 => mean(&fs[0]),
        2 => mean(&fs[0]) * mean(&fs[1]),
        4 if fs.iter().all(Option::is_some) => {
            let hs: Vec<_> = fs.iter().map(|f| dft(f.as_ref().unwrap())).collect();
            (0..n)
                .map(|xi| {
                    let neg = (n - xi) % n;
                    hs[0].coefficients()[xi]
                        * hs[1].coefficients()[neg]
                        * hs[2].coefficients()[neg]
                        * hs[3].coefficients()[xi]
                })
                .sum()
        }
        len => {
            let half = len / 2;
            par::block_sum(n, |h| {
                let peeled: Vec<Option<CyclicFunction>> = (0..half)
                    .map(|w| match (&fs[w], &fs[w + half]) {
                        (None, None) => None,
                        (Some(a), None) => Some(a.clone()),
                        (lo, Some(b)) => {
                            let bv = b.values();
                            Some(CyclicFunction::from_fn(b.modulus(), |x| {
                                let v = bv[wrap(x + h, n)];
                                lo.as_ref().map_or(v, |a| a.values()[x] * v)
                            }))
                        }
                    })
                    .collect();
                cube_average(&peeled, n)
            }) / n as f64
        }
    }
}

/// `E_{x, h_1..h_s} prod_{omega in {0,1}^s, |omega| <= t} f_omega(x + omega . h)`.
pub fn lambda1_st(family: &ProgressionFamily, functions: &CornerFamily) -> Result<Complex64> {
    let m = family.modulus();
    let s = family.s();
    let corners = level_corners(s, family.t(), functions, m)?;
    let mut fs: Vec<Option<CyclicFunction>> = vec![None; 1 << s];
    for (w, f) in corners {
        fs[w as usize] = Some(f);
    }
    Ok(cube_average(&fs, m.size()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeTerm {
    pub value: Complex64,
    pub product_of_means: Complex64,
    pub gap: f64,
}

/// `E_{x,y} f(x) g(x + P(y)) k(x + Q(y))` against `E f E g E k`.
pub fn three_term(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<ThreeTerm> {
    let one = CyclicFunction::ones(f.modulus());
    let value = lambda2(f, g, k, &one, pp, qq)?;
    let product_of_means = f.mean() * g.mean() * k.mean();
    Ok(ThreeTerm {
        value,
        product_of_means,
        gap: (value - product_of_means).norm(),
    })
}

/// `D(f, g, k)(x) = E_y f(x - P(y) - Q(y)) g(x - Q(y)) k(x - P(y))`.
pub fn dual_fgk(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<CyclicFunction> {
    same_modulus(&[f, g, k])?;
    let m = f.modulus();
    let n = m.size();
    let (tp, tq) = (pp.table(m), qq.table(m));
    let (fv, gv, kv) = (f.values(), g.values(), k.values());
    let vals = par::map_indices(n, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..n {
            let (a, b) = (tp[y], tq[y]);
            let xa = wrap(x + n - a, n);
            let xb = wrap(x + n - b, n);
            let xab = wrap(xa + n - b, n);
            acc += fv[xab] * gv[xb] * kv[xa];
        }
        acc / n as f64
    });
    CyclicFunction::new(m, vals)
}

/// `D(g, k, p)(x) = E_y g(x + P(y)) k(x + Q(y)) p(x + P(y) + Q(y))`.
pub fn dual_gkp(
    g: &CyclicFunction,
    k: &CyclicFunction,
    p: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<CyclicFunction> {
    same_modulus(&[g, k, p])?;
    let m = g.modulus();
    let n = m.size();
    let (tp, tq) = (pp.table(m), qq.table(m));
    let (gv, kv, pv) = (g.values(), k.values(), p.values());
    let vals = par::map_indices(n, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..n {
            let (a, b) = (tp[y], tq[y]);
            acc += gv[wrap(x + a, n)] * kv[wrap(x + b, n)] * pv[wrap(wrap(x + a, n) + b, n)];
        }
        acc / n as f64
    });
    CyclicFunction::new(m, vals)
}

/// `D_h(f, g, k) = D(Delta_h f, Delta_h g, Delta_h k)`.
pub fn dual_h_fgk(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    h: &ShiftVector,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<CyclicFunction> {
    same_modulus(&[f, g, k])?;
    dual_fgk(
        &diff_multi(f, h),
        &diff_multi(g, h),
        &diff_multi(k, h),
        pp,
        qq,
    )
}

/// Both counts of a quadruple and the distance between them.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub n: u64,
    pub p: IntPolynomial,
    pub q: IntPolynomial,
    pub lambda: Complex64,
    pub lambda1: Complex64,
    pub seconds_lambda: f64,
    pub seconds_lambda1: f64,
}

impl GapReport {
    pub fn gap(&self) -> f64 {
        (self.lambda - self.lambda1).norm()
    }
}

#[derive(Serialize)]
struct GapReportJson {
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "P")]
    p: String,
    #[serde(rename = "Q")]
    q: String,
    lambda: [f64; 2],
    lambda1: [f64; 2],
    gap: f64,
    seconds_lambda: f64,
    seconds_lambda1: f64,
}

impl Serialize for GapReport {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        GapReportJson {
            n: self.n,
            p: self.p.to_string(),
            q: self.q.to_string(),
            lambda: [self.lambda.re, self.lambda.im],
            lambda1: [self.lambda1.re, self.lambda1.im],
            gap: self.gap(),
            seconds_lambda: self.seconds_lambda,
            seconds_lambda1: self.seconds_lambda1,
        }
        .serialize(serializer)
    }
}

pub fn gap_report(
    f: &CyclicFunction,
    g: &CyclicFunction,
    k: &CyclicFunction,
    p: &CyclicFunction,
    pp: &IntPolynomial,
    qq: &IntPolynomial,
) -> Result<GapReport> {
    let t0 = Instant::now();
    let lam = lambda(f, g, k, p, pp, qq)?;
    let seconds_lambda = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let lam1 = lambda1(f, g, k, p)?;
    let seconds_lambda1 = t1.elapsed().as_secs_f64();
    Ok(GapReport {
        n: f.modulus().get(),
        p: pp.clone(),
        q: qq.clone(),
        lambda: lam,
        lambda1: lam1,
        seconds_lambda,
        seconds_lambda1,
    })
}
