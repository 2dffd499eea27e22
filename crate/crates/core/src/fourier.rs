//! Discrete Fourier transform on Z/NZ for prime N.
//!
//! Sign convention: analysis uses `e_N(+x xi)` with a `1/N` factor,
//! `f^(xi) = E_x f(x) e_N(x xi)`; synthesis uses `e_N(-xi x)` without one,
//! `f(x) = sum_xi f^(xi) e_N(-xi x)`.
//!
//! Below [`BLUESTEIN_THRESHOLD`] the transform is the direct `O(N^2)` sum
//! over the root table. From there on it is a chirp-z (Bluestein)
//! reduction to a power-of-two cyclic convolution. Because N is odd,
//! `x xi = 2^{-1} (x^2 + xi^2 - (xi - x)^2) mod N`, so the chirp is read
//! from the same root table and needs no half-integer angles.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::arith::Modulus;
use crate::function::{CyclicFunction, Spectrum};
use crate::par;

pub const BLUESTEIN_THRESHOLD: usize = 512;

/// `f^(xi) = (1/N) sum_x f(x) e_N(x xi)`.
pub fn dft(f: &CyclicFunction) -> Spectrum {
    let m = f.modulus();
    let scale = 1.0 / m.size() as f64;
    let mut raw = forward_sum(m, f.values());
    raw.iter_mut().for_each(|c| *c *= scale);
    Spectrum::from_raw(m, raw)
}

/// `f(x) = sum_xi S(xi) e_N(-xi x)`.
pub fn idft(s: &Spectrum) -> CyclicFunction {
    let m = s.modulus();
    let conj: Vec<Complex64> = s.coefficients().iter().map(|c| c.conj()).collect();
    let raw = forward_sum(m, &conj);
    CyclicFunction::new(m, raw.into_iter().map(|c| c.conj()).collect())
        .expect("transform preserves length")
}

/// `sum_x v(x) e_N(x xi)` for every `xi`, unnormalized.
pub fn forward_sum(m: &Modulus, values: &[Complex64]) -> Vec<Complex64> {
    if m.size() < BLUESTEIN_THRESHOLD {
        forward_sum_naive(m, values)
    } else {
        forward_sum_bluestein(m, values)
    }
}

/// Direct summation over the root table, pairing `x` with `-x` so that
/// the two terms share one root (`e_N(-t) = conj e_N(t)`).
pub fn forward_sum_naive(m: &Modulus, values: &[Complex64]) -> Vec<Complex64> {
    let n = m.size();
    let roots = m.roots();
    par::map_indices(n, |xi| {
        let mut acc = values[0];
        let mut idx = 0usize;
        for x in 1..=(n - 1) / 2 {
            idx += xi;
            if idx >= n {
                idx -= n;
            }
            let w = roots[idx];
            acc += values[x] * w + values[n - x] * w.conj();
        }
        acc
    })
}

struct BluesteinPlan {
    len: usize,
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl BluesteinPlan {
    fn new(m: &Modulus) -> Self {
        let n = m.size();
        let inv2 = m.inverse(2).expect("odd modulus") as u128;
        let nn = n as u128;
        let chirp: Vec<Complex64> = (0..n)
            .map(|t| {
                let tt = t as u128;
                m.root(((inv2 * ((tt * tt) % nn)) % nn) as usize)
            })
            .collect();
        let len = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut kernel = vec![Complex64::new(0.0, 0.0); len];
        kernel[0] = chirp[0].conj();
        for j in 1..n {
            kernel[j] = chirp[j].conj();
            kernel[len - j] = chirp[n - j].conj();
        }
        forward.process(&mut kernel);
        let scale = 1.0 / len as f64;
        kernel.iter_mut().for_each(|c| *c *= scale);
        Self {
            len,
            chirp,
            kernel_hat: kernel,
            forward,
            inverse,
        }
    }

    fn run(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.chirp.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (slot, (&v, &w)) in buf.iter_mut().zip(values.iter().zip(&self.chirp)) {
            *slot = v * w;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        (0..n).map(|xi| buf[xi] * self.chirp[xi]).collect()
    }
}

fn plan_for(m: &Modulus) -> Arc<BluesteinPlan> {
    static PLANS: OnceLock<Mutex<HashMap<u64, Arc<BluesteinPlan>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = plans.lock().expect("plan cache poisoned");
    guard
        .entry(m.get())
        .or_insert_with(|| Arc::new(BluesteinPlan::new(m)))
        .clone()
}

/// Chirp-z transform; valid for every odd prime, used above the threshold.
pub fn forward_sum_bluestein(m: &Modulus, values: &[Complex64]) -> Vec<Complex64> {
    plan_for(m).run(values)
}
