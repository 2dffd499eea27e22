use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use szlab::counts::{self, ProgressionFamily};
use szlab::fourier::{dft, idft};
use szlab::gowers::{self, CornerFamily, ShiftVector};
use szlab::phase::quad_identity_check;
use szlab::{CyclicFunction, IntPolynomial, Modulus};

use crate::cli::Suite;

const TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    /// Largest `lhs - rhs` (or error) seen.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    #[serde(rename = "N")]
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    trials: usize,
    violations: usize,
    worst: f64,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            trials: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, excess: f64) {
        self.trials += 1;
        if excess.is_nan() || excess > self.tolerance {
            self.violations += 1;
        }
        self.worst = if excess.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(excess)
        };
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            trials: self.trials,
            violations: self.violations,
            worst: if self.trials == 0 { 0.0 } else { self.worst },
            tolerance: self.tolerance,
            passed: self.violations == 0,
        }
    }
}

fn disk(m: &Modulus, r: &mut ChaCha8Rng) -> CyclicFunction {
    CyclicFunction::from_fn(m, |_| {
        Complex64::from_polar(
            r.random::<f64>().sqrt(),
            std::f64::consts::TAU * r.random::<f64>(),
        )
    })
}

fn corners(fs: &[CyclicFunction]) -> CornerFamily {
    fs.iter()
        .enumerate()
        .map(|(w, f)| (w as u32, f.clone()))
        .collect()
}

fn norm(f: &CyclicFunction, s: usize) -> f64 {
    gowers::gowers_norm(f, s).expect("order in range").value
}

fn pq() -> (IntPolynomial, IntPolynomial) {
    ("y".parse().unwrap(), "y^2".parse().unwrap())
}

fn inequalities(m: &Modulus, trials: usize, r: &mut ChaCha8Rng) -> Vec<Check> {
    let (pp, qq) = pq();
    let n = m.size();
    let mut csg = Tracker::new("cauchy-schwarz-gowers", TOL);
    let mut ddi = Tracker::new("dual-difference", TOL);
    let mut inverse = Tracker::new("u2-inverse", TOL);
    let mut chain = Tracker::new("monotone-chain", TOL);
    for trial in 0..trials {
        let s = 2 + trial % 2;
        let fs: Vec<CyclicFunction> = (0..1 << s).map(|_| disk(m, r)).collect();
        let lhs = gowers::gowers_inner(&corners(&fs), s)
            .expect("family complete")
            .norm();
        csg.record(lhs - fs.iter().map(|f| norm(f, s)).product::<f64>());

        let big = counts::dual_fgk(&fs[0], &fs[1], &fs[2], &pp, &qq).expect("same modulus");
        let lhs = norm(&big, s).powi(1 << (s + 1));
        let rhs = (0..n as i64)
            .map(|h| {
                let hv = ShiftVector::new(m, &[h]).expect("residue");
                let fh = counts::dual_h_fgk(&fs[0], &fs[1], &fs[2], &hv, &pp, &qq)
                    .expect("same modulus");
                norm(&fh, s - 1).powi(1 << (s - 1))
            })
            .sum::<f64>()
            / n as f64;
        ddi.record((lhs - rhs) / rhs.max(1.0));

        let f = &fs[0];
        inverse.record(norm(f, 2).powi(4) - f.l2_norm().powi(2) * dft(f).sup().powi(2));
        let u: Vec<f64> = (1..=3).map(|s| norm(f, s)).collect();
        chain.record((u[0] - u[1]).max(u[1] - u[2]));
    }
    vec![csg.finish(), ddi.finish(), inverse.finish(), chain.finish()]
}

fn identities(m: &Modulus, trials: usize, r: &mut ChaCha8Rng) -> Vec<Check> {
    let (pp, qq) = pq();
    let mut fgk = Tracker::new("pairing-fgk", 1e-12);
    let mut gkp = Tracker::new("pairing-gkp", 1e-12);
    let mut level = Tracker::new("lambda-vs-level-count", 1e-12);
    let family =
        ProgressionFamily::new(m, vec![pp.clone(), qq.clone()], 2).expect("independent pair");
    for _ in 0..trials {
        let fs: Vec<CyclicFunction> = (0..4).map(|_| disk(m, r)).collect();
        let l = counts::lambda(&fs[0], &fs[1], &fs[2], &fs[3], &pp, &qq).expect("same modulus");
        let d1 = counts::dual_fgk(&fs[0], &fs[1], &fs[2], &pp, &qq).expect("same modulus");
        let d2 = counts::dual_gkp(&fs[1], &fs[2], &fs[3], &pp, &qq).expect("same modulus");
        fgk.record((l - d1.pairing(&fs[3]).unwrap()).norm());
        gkp.record((l - fs[0].pairing(&d2).unwrap()).norm());
        level.record((l - counts::lambda_st(&family, &corners(&fs)).unwrap()).norm());
    }
    let mut quad = Tracker::new("square-completion-residues", 0.0);
    let n = m.get();
    for (a, b) in [("y", "y^2"), ("y^2", "y^3")] {
        let (a, b): (IntPolynomial, IntPolynomial) = (a.parse().unwrap(), b.parse().unwrap());
        for x in 0..n {
            for y in 0..n {
                let (r1, r2) = quad_identity_check(x, y, &a, &b, m);
                quad.record((r1 + r2) as f64);
            }
        }
    }
    vec![fgk.finish(), gkp.finish(), level.finish(), quad.finish()]
}

fn oracles(m: &Modulus, trials: usize, r: &mut ChaCha8Rng) -> Vec<Check> {
    let mut direct = Tracker::new("recursive-vs-direct-norm", TOL);
    let mut spectral = Tracker::new("u2-vs-l4-spectrum", TOL);
    let mut roundtrip = Tracker::new("dft-roundtrip", TOL);
    let max_s = if m.get() <= 17 { 3 } else { 2 };
    for trial in 0..trials {
        let f = disk(m, r);
        let s = 1 + trial % max_s;
        let d = gowers::gowers_norm_direct(&f, s).unwrap().value;
        direct.record((norm(&f, s) - d).abs());
        spectral.record((norm(&f, 2) - gowers::u2_via_spectrum(&f)).abs());
        roundtrip.record(idft(&dft(&f)).max_abs_diff(&f));
    }
    vec![direct.finish(), spectral.finish(), roundtrip.finish()]
}

pub fn run(suite: Suite, m: &Modulus, trials: usize, seed: u64) -> SuiteReport {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    if matches!(suite, Suite::Inequalities | Suite::All) {
        checks.extend(inequalities(m, trials, &mut r));
    }
    if matches!(suite, Suite::Identities | Suite::All) {
        checks.extend(identities(m, trials, &mut r));
    }
    if matches!(suite, Suite::Oracles | Suite::All) {
        checks.extend(oracles(m, trials, &mut r));
    }
    let passed = checks.iter().all(|c| c.passed);
    SuiteReport {
        suite,
        n: m.get(),
        trials,
        seed,
        checks,
        passed,
    }
}
