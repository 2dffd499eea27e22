//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the transform, norm or counting code under test.

#![allow(dead_code)]

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szlab::{CyclicFunction, IntPolynomial, Modulus};

pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(2 pi i t / n)` straight from the trig functions.
pub fn e(t: i128, n: usize) -> C {
    let r = t.rem_euclid(n as i128) as f64;
    C::from_polar(1.0, TAU * r / n as f64)
}

pub fn disk(md: &Modulus, rng: &mut ChaCha8Rng) -> CyclicFunction {
    CyclicFunction::from_fn(md, |_| {
        C::from_polar(rng.random::<f64>().sqrt(), TAU * rng.random::<f64>())
    })
}

pub fn pm1(md: &Modulus, rng: &mut ChaCha8Rng) -> CyclicFunction {
    CyclicFunction::from_fn(md, |_| {
        C::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
    })
}

pub fn phases(md: &Modulus, rng: &mut ChaCha8Rng) -> CyclicFunction {
    CyclicFunction::from_fn(md, |_| C::from_polar(1.0, TAU * rng.random::<f64>()))
}

/// `P(y) mod n` for all `y`, by exact big-integer powers.
pub fn table(p: &IntPolynomial, n: usize) -> Vec<usize> {
    let nb = BigInt::from(n);
    (0..n)
        .map(|y| {
            let mut acc = BigInt::zero();
            for (d, &c) in p.coefficients().iter().enumerate() {
                acc += BigInt::from(c) * BigInt::from(y).pow(d as u32);
            }
            let r = ((acc % &nb) + &nb) % &nb;
            r.to_usize().unwrap()
        })
        .collect()
}

pub fn poly(s: &str) -> IntPolynomial {
    s.parse().unwrap()
}

pub fn naive_dft(v: &[C]) -> Vec<C> {
    let n = v.len();
    (0..n)
        .map(|xi| {
            v.iter()
                .enumerate()
                .map(|(x, &f)| f * e((x * xi) as i128, n))
                .sum::<C>()
                / n as f64
        })
        .collect()
}

pub fn mean(v: &[C]) -> C {
    v.iter().sum::<C>() / v.len() as f64
}

fn conj_if(v: C, odd: bool) -> C {
    if odd {
        v.conj()
    } else {
        v
    }
}

/// `E_{x,h} prod_w C^{|w|} f_w(x + w.h)` by enumerating every `(x, h)`.
pub fn box_inner(fs: &[&[C]], s: usize) -> C {
    let n = fs[0].len();
    let mut total = C::new(0.0, 0.0);
    let cells = n.pow(s as u32);
    let mut h = vec![0usize; s];
    for cell in 0..cells {
        let mut rest = cell;
        for slot in h.iter_mut() {
            *slot = rest % n;
            rest /= n;
        }
        for x in 0..n {
            let mut prod = C::new(1.0, 0.0);
            for (w, f) in fs.iter().enumerate() {
                let shift: usize = (0..s).filter(|i| w >> i & 1 == 1).map(|i| h[i]).sum();
                prod *= conj_if(f[(x + shift) % n], (w as u32).count_ones() % 2 == 1);
            }
            total += prod;
        }
    }
    total / (cells * n) as f64
}

/// `||f||_{U^s}` from the full `2^s`-fold sum.
pub fn gowers_direct(f: &[C], s: usize) -> f64 {
    let fs: Vec<&[C]> = vec![f; 1 << s];
    box_inner(&fs, s).re.max(0.0).powf(1.0 / (1u64 << s) as f64)
}

/// `||f||_{U^2}^4 = E_h |E_x conj f(x + h) f(x)|^2`.
pub fn u2_fourth_autocorrelation(f: &[C]) -> f64 {
    let n = f.len();
    (0..n)
        .map(|h| {
            let c: C = (0..n).map(|x| f[(x + h) % n].conj() * f[x]).sum::<C>() / n as f64;
            c.norm_sqr()
        })
        .sum::<f64>()
        / n as f64
}

pub fn lambda(f: &[C], g: &[C], k: &[C], p: &[C], tp: &[usize], tq: &[usize]) -> C {
    let n = f.len();
    let mut acc = C::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            acc += f[x] * g[(x + tp[y]) % n] * k[(x + tq[y]) % n] * p[(x + tp[y] + tq[y]) % n];
        }
    }
    acc / (n * n) as f64
}

pub fn lambda1(f: &[C], g: &[C], k: &[C], p: &[C]) -> C {
    let n = f.len();
    let mut acc = C::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                acc += f[x] * g[(x + y) % n] * k[(x + z) % n] * p[(x + y + z) % n];
            }
        }
    }
    acc / (n * n * n) as f64
}

pub fn lambda2(f: &[C], g: &[C], k: &[C], p: &[C], tp: &[usize], tq: &[usize]) -> C {
    let n = f.len();
    let mut acc = C::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            acc += f[x] * g[(x + tp[y]) % n] * k[(x + tq[y]) % n] * p[y];
        }
    }
    acc / (n * n) as f64
}

/// `E_{x,y} prod_{|w| <= t} f_w(x + w.P(y))`; `fs[w]` is ignored when `|w| > t`.
pub fn lambda_st(fs: &[Vec<C>], tables: &[Vec<usize>], t: usize) -> C {
    let n = tables[0].len();
    let mut acc = C::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            let mut prod = C::new(1.0, 0.0);
            for (w, f) in fs.iter().enumerate() {
                if (w as u32).count_ones() as usize > t {
                    continue;
                }
                let shift: usize = (0..tables.len())
                    .filter(|i| w >> i & 1 == 1)
                    .map(|i| tables[i][y])
                    .sum();
                prod *= f[(x + shift) % n];
            }
            acc += prod;
        }
    }
    acc / (n * n) as f64
}

/// `E_{x,h} prod_{|w| <= t} f_w(x + w.h)` over independent `h in (Z/N)^s`.
pub fn lambda1_st(fs: &[Vec<C>], s: usize, t: usize) -> C {
    let n = fs[0].len();
    let cells = n.pow(s as u32);
    let mut acc = C::new(0.0, 0.0);
    let mut h = vec![0usize; s];
    for cell in 0..cells {
        let mut rest = cell;
        for slot in h.iter_mut() {
            *slot = rest % n;
            rest /= n;
        }
        for x in 0..n {
            let mut prod = C::new(1.0, 0.0);
            for (w, f) in fs.iter().enumerate() {
                if (w as u32).count_ones() as usize > t {
                    continue;
                }
                let shift: usize = (0..s).filter(|i| w >> i & 1 == 1).map(|i| h[i]).sum();
                prod *= f[(x + shift) % n];
            }
            acc += prod;
        }
    }
    acc / (cells * n) as f64
}

pub fn dual_fgk(f: &[C], g: &[C], k: &[C], tp: &[usize], tq: &[usize]) -> Vec<C> {
    let n = f.len();
    (0..n)
        .map(|x| {
            let mut acc = C::new(0.0, 0.0);
            for y in 0..n {
                let (a, b) = (tp[y], tq[y]);
                acc += f[(x + 2 * n - a - b) % n] * g[(x + n - b) % n] * k[(x + n - a) % n];
            }
            acc / n as f64
        })
        .collect()
}

pub fn dual_gkp(g: &[C], k: &[C], p: &[C], tp: &[usize], tq: &[usize]) -> Vec<C> {
    let n = g.len();
    (0..n)
        .map(|x| {
            let mut acc = C::new(0.0, 0.0);
            for y in 0..n {
                let (a, b) = (tp[y], tq[y]);
                acc += g[(x + a) % n] * k[(x + b) % n] * p[(x + a + b) % n];
            }
            acc / n as f64
        })
        .collect()
}

pub fn delta(f: &[C], h: usize) -> Vec<C> {
    let n = f.len();
    (0..n).map(|x| f[(x + h) % n].conj() * f[x]).collect()
}

pub fn dual_h(f: &[C], g: &[C], k: &[C], hs: &[usize], tp: &[usize], tq: &[usize]) -> Vec<C> {
    let apply = |v: &[C]| hs.iter().fold(v.to_vec(), |acc, &h| delta(&acc, h));
    dual_fgk(&apply(f), &apply(g), &apply(k), tp, tq)
}

/// Maximizer of `|E_x p(x) conj e(a x^2 + b x)|` over the full grid; the
/// first strictly larger value (by more than 1e-12) wins.
pub fn u3_exhaustive(p: &[C]) -> (f64, usize, usize) {
    let n = p.len();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for a in 0..n {
        for b in 0..n {
            let v = (0..n)
                .map(|x| p[x] * e(-((a * x * x + b * x) as i128), n))
                .sum::<C>()
                .norm()
                / n as f64;
            if v > best.0 + 1e-12 {
                best = (v, a, b);
            }
        }
    }
    best
}

/// All `(alpha, beta, |E_y e(alpha Q + beta P) K|)`, sorted by rounded
/// correlation descending then `(alpha, beta)`.
pub fn scan_exhaustive(kk: &[C], tp: &[usize], tq: &[usize]) -> Vec<(usize, usize, f64)> {
    let n = kk.len();
    let mut all = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let v = (0..n)
                .map(|y| kk[y] * e((a * tq[y] + b * tp[y]) as i128, n))
                .sum::<C>()
                .norm()
                / n as f64;
            all.push((a, b, v));
        }
    }
    let key = |v: f64| (v * 1e12).round() as i64;
    all.sort_by(|x, y| {
        key(y.2)
            .cmp(&key(x.2))
            .then(x.0.cmp(&y.0))
            .then(x.1.cmp(&y.1))
    });
    all
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest free subset size by trying all `2^N` subsets.
pub fn max_free_bruteforce(n: usize, tp: &[usize], tq: &[usize]) -> usize {
    let configs: Vec<u32> = (0..n)
        .filter(|&y| tp[y] != 0 || tq[y] != 0)
        .flat_map(|y| {
            (0..n).map(move |x| {
                [x, (x + tp[y]) % n, (x + tq[y]) % n, (x + tp[y] + tq[y]) % n]
                    .iter()
                    .fold(0u32, |m, &r| m | 1 << r)
            })
        })
        .collect();
    let mut best = 0;
    for set in 0u32..(1 << n) {
        let size = set.count_ones() as usize;
        if size > best && configs.iter().all(|&c| c & set != c) {
            best = size;
        }
    }
    best
}
