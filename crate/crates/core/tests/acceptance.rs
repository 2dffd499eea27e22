//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use szlab::counts::{self, ProgressionFamily};
use szlab::decompose::{dual_regularity_decompose, regularity_decompose, NormKind, Thresholds};
use szlab::extremal::{find_progression, grow_free_greedy, max_free_exact};
use szlab::fourier::{dft, idft};
use szlab::funcspec::make_function;
use szlab::gowers::{self, CornerFamily, ShiftVector};
use szlab::pet::pet_trace;
use szlab::phase::{self, fejer_approx, fejer_eval, fejer_weight, GridFunction};
use szlab::{CyclicFunction, LabError, Modulus};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn m(n: u64) -> Modulus {
    Modulus::new(n).unwrap()
}

/// Largest observed error and the number of cases beyond tolerance.
#[derive(Default)]
struct Tally {
    worst: f64,
    bad: usize,
    cases: usize,
    first_bad: Option<String>,
}

impl Tally {
    fn record(&mut self, err: f64, tol: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        if err.is_nan() || err > self.worst {
            self.worst = if err.is_nan() { f64::INFINITY } else { err };
        }
        if err.is_nan() || err > tol {
            self.bad += 1;
            if self.first_bad.is_none() {
                self.first_bad = Some(format!("{} (err {err:e})", label()));
            }
        }
    }

    fn summary(&self, what: &str) -> String {
        format!(
            "{what}: {} cases, worst {:.2e}, {} over",
            self.cases, self.worst, self.bad
        )
    }
}

fn finish(parts: Vec<(&str, &Tally)>, extra_ok: bool, extra: String) -> Outcome {
    let mut text: Vec<String> = parts.iter().map(|(w, t)| t.summary(w)).collect();
    if !extra.is_empty() {
        text.push(extra);
    }
    let failed: Vec<String> = parts
        .iter()
        .filter_map(|(_, t)| t.first_bad.clone())
        .collect();
    if failed.is_empty() && extra_ok {
        Ok(text.join("; "))
    } else {
        Err(format!(
            "{}; first failures: {}",
            text.join("; "),
            failed.join(", ")
        ))
    }
}

fn fourier_suite() -> Outcome {
    let start = Instant::now();
    let mut roundtrip = Tally::default();
    let mut parseval = Tally::default();
    let mut u2 = Tally::default();
    let mut naive = Tally::default();
    for (i, &n) in [5u64, 17, 101, 257, 1009].iter().enumerate() {
        let md = m(n);
        let mut r = rng(100 + i as u64);
        for trial in 0..100 {
            let f = disk(&md, &mut r);
            let spec = dft(&f);
            let back = idft(&spec);
            let scale = f.sup_norm().max(1e-300);
            roundtrip.record(back.max_abs_diff(&f) / scale, 1e-9, || {
                format!("N={n} trial {trial}")
            });
            let energy: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            parseval.record((spec.energy() - energy).abs() / energy, 1e-9, || {
                format!("N={n} trial {trial}")
            });
            let lib = gowers::gowers_norm(&f, 2).unwrap().value;
            let l4 = gowers::u2_via_spectrum(&f);
            let oracle = u2_fourth_autocorrelation(f.values()).powf(0.25);
            let rel = ((lib - l4).abs() / l4).max((lib - oracle).abs() / oracle);
            u2.record(rel, 1e-9, || format!("N={n} trial {trial}"));
            if n <= 257 {
                let reference = naive_dft(f.values());
                naive.record(max_diff(spec.coefficients(), &reference), 1e-10, || {
                    format!("N={n} trial {trial}")
                });
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    finish(
        vec![
            ("roundtrip", &roundtrip),
            ("parseval", &parseval),
            ("U2 vs l4", &u2),
            ("vs naive", &naive),
        ],
        secs < 10.0,
        format!("{secs:.2}s of 10s budget"),
    )
}

fn corner_vec(fs: &[CyclicFunction]) -> CornerFamily {
    fs.iter()
        .enumerate()
        .map(|(w, f)| (w as u32, f.clone()))
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let tol = 1e-9;
    let mut t_gowers = Tally::default();
    let mut t_counts = Tally::default();
    let mut t_st = Tally::default();
    let mut t_duals = Tally::default();
    let mut t_u3 = Tally::default();
    let mut t_scan = Tally::default();
    let mut r = rng(200);

    for n in [5u64, 7, 11, 13, 17] {
        let md = m(n);
        for s in 1..=4 {
            for trial in 0..3 {
                let f = disk(&md, &mut r);
                let lib = gowers::gowers_norm(&f, s).unwrap().value;
                let oracle = gowers_direct(f.values(), s);
                t_gowers.record((lib - oracle).abs(), tol, || {
                    format!("N={n} s={s} trial {trial}")
                });
            }
        }
    }

    let families = [("y", "y^2"), ("y^2", "y^3"), ("2*y", "y^2-y"), ("y^3", "y")];
    for n in [7u64, 11, 31] {
        let md = m(n);
        for (ps, qs) in families {
            let (pp, qq) = (poly(ps), poly(qs));
            let (tp, tq) = (table(&pp, n as usize), table(&qq, n as usize));
            for trial in 0..3 {
                let (f, g, k, p) = (
                    disk(&md, &mut r),
                    disk(&md, &mut r),
                    disk(&md, &mut r),
                    disk(&md, &mut r),
                );
                let label = || format!("N={n} ({ps},{qs}) trial {trial}");
                let (fv, gv, kv, pv) = (f.values(), g.values(), k.values(), p.values());
                let l = counts::lambda(&f, &g, &k, &p, &pp, &qq).unwrap();
                t_counts.record((l - lambda(fv, gv, kv, pv, &tp, &tq)).norm(), tol, label);
                let l1 = counts::lambda1(&f, &g, &k, &p).unwrap();
                t_counts.record((l1 - lambda1(fv, gv, kv, pv)).norm(), tol, label);
                let l2 = counts::lambda2(&f, &g, &k, &p, &pp, &qq).unwrap();
                t_counts.record((l2 - lambda2(fv, gv, kv, pv, &tp, &tq)).norm(), tol, label);

                let d = counts::dual_fgk(&f, &g, &k, &pp, &qq).unwrap();
                t_duals.record(
                    max_diff(d.values(), &dual_fgk(fv, gv, kv, &tp, &tq)),
                    tol,
                    label,
                );
                let d = counts::dual_gkp(&g, &k, &p, &pp, &qq).unwrap();
                t_duals.record(
                    max_diff(d.values(), &dual_gkp(gv, kv, pv, &tp, &tq)),
                    tol,
                    label,
                );
                for hs in [vec![3i64], vec![2, 5], vec![0]] {
                    let h = ShiftVector::new(&md, &hs).unwrap();
                    let hu: Vec<usize> = hs.iter().map(|&v| md.reduce(v) as usize).collect();
                    let d = counts::dual_h_fgk(&f, &g, &k, &h, &pp, &qq).unwrap();
                    t_duals.record(
                        max_diff(d.values(), &dual_h(fv, gv, kv, &hu, &tp, &tq)),
                        tol,
                        label,
                    );
                }
            }
        }
    }

    for (n, list) in [
        (7u64, vec!["y", "y^2"]),
        (31, vec!["y", "y^2"]),
        (7, vec!["y", "y^2", "y^3"]),
        (11, vec!["y^2", "y", "y^3"]),
    ] {
        let md = m(n);
        let polys: Vec<_> = list.iter().map(|s| poly(s)).collect();
        let tables: Vec<Vec<usize>> = polys.iter().map(|p| table(p, n as usize)).collect();
        let s = polys.len();
        for t in 0..=s {
            let fam = ProgressionFamily::new(&md, polys.clone(), t).unwrap();
            let fs: Vec<CyclicFunction> = (0..1 << s).map(|_| disk(&md, &mut r)).collect();
            let vs: Vec<Vec<Complex64>> = fs.iter().map(|f| f.values().to_vec()).collect();
            let label = || format!("N={n} s={s} t={t}");
            let lib = counts::lambda_st(&fam, &corner_vec(&fs)).unwrap();
            t_st.record((lib - lambda_st(&vs, &tables, t)).norm(), tol, label);
            if n <= 11 || s == 2 {
                let lib1 = counts::lambda1_st(&fam, &corner_vec(&fs)).unwrap();
                t_st.record((lib1 - lambda1_st(&vs, s, t)).norm(), tol, label);
            }
        }
    }

    for (n, kind) in [(31u64, "pm1"), (13, "disk"), (31, "quad"), (17, "pm1")] {
        let md = m(n);
        let p = match kind {
            "pm1" => pm1(&md, &mut r),
            "disk" => disk(&md, &mut r),
            _ => make_function("quad:alpha=7,beta=19", &md, 0).unwrap(),
        };
        let lib = gowers::u3_small(&p);
        let (v, a, b) = u3_exhaustive(p.values());
        let label = || format!("N={n} {kind}");
        t_u3.record((lib.value - v).abs(), tol, label);
        let same = lib.alpha == a as u64 && lib.beta == b as u64;
        t_u3.record(if same { 0.0 } else { 1.0 }, 0.5, || {
            format!(
                "N={n} {kind} argmax ({},{}) vs ({a},{b})",
                lib.alpha, lib.beta
            )
        });
    }

    for n in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
        let md = m(n);
        for (ps, qs) in [("y", "y^2"), ("y^2", "y^3"), ("y^3", "y")] {
            let (pp, qq) = (poly(ps), poly(qs));
            let kk = phases(&md, &mut r);
            let hits = phase::major_arc_scan(&kk, &pp, &qq, 5).unwrap();
            let oracle = scan_exhaustive(
                kk.values(),
                &table(&pp, n as usize),
                &table(&qq, n as usize),
            );
            for (i, h) in hits.iter().enumerate() {
                let (a, b, v) = oracle[i];
                t_scan.record((h.correlation - v).abs(), tol, || {
                    format!("N={n} ({ps},{qs}) rank {i}")
                });
                let same = h.alpha == a as u64 && h.beta == b as u64;
                t_scan.record(if same { 0.0 } else { 1.0 }, 0.5, || {
                    format!("N={n} ({ps},{qs}) rank {i} position")
                });
            }
        }
    }

    let secs = start.elapsed().as_secs_f64();
    finish(
        vec![
            ("gowers", &t_gowers),
            ("lambda/1/2", &t_counts),
            ("lambda_st/1_st", &t_st),
            ("duals", &t_duals),
            ("u3", &t_u3),
            ("scan", &t_scan),
        ],
        secs < 60.0,
        format!("{secs:.2}s of 60s budget"),
    )
}

fn exact_identities() -> Outcome {
    let mut pairing = Tally::default();
    let mut r = rng(300);
    let (pp, qq) = (poly("y"), poly("y^2"));
    for trial in 0..200 {
        let n = [7u64, 11, 31][trial % 3];
        let md = m(n);
        let (f, g, k, p) = (
            disk(&md, &mut r),
            disk(&md, &mut r),
            disk(&md, &mut r),
            disk(&md, &mut r),
        );
        let l = counts::lambda(&f, &g, &k, &p, &pp, &qq).unwrap();
        let d1 = counts::dual_fgk(&f, &g, &k, &pp, &qq).unwrap();
        let d2 = counts::dual_gkp(&g, &k, &p, &pp, &qq).unwrap();
        let via1 = d1.pairing(&p).unwrap();
        let via2 = f.pairing(&d2).unwrap();
        pairing.record((l - via1).norm().max((l - via2).norm()), 1e-12, || {
            format!("N={n} trial {trial}")
        });
    }
    let mut residues = Tally::default();
    for n in [31u64, 101] {
        let md = m(n);
        for (ps, qs) in [("y", "y^2"), ("y^2", "y^3")] {
            let (a, b) = (poly(ps), poly(qs));
            for x in 0..n {
                for y in 0..n {
                    let (r1, r2) = phase::quad_identity_check(x, y, &a, &b, &md);
                    residues.record((r1 + r2) as f64, 0.0, || {
                        format!("N={n} ({ps},{qs}) x={x} y={y}")
                    });
                }
            }
        }
    }
    finish(
        vec![("pairings", &pairing), ("identity residues", &residues)],
        true,
        String::new(),
    )
}

const SMALL_PRIMES: [u64; 13] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

fn inequality_suite() -> Outcome {
    let tol = 1e-9;
    let mut r = rng(400);
    let mut csg = Tally::default();
    for trial in 0..1000 {
        let s = 2 + trial % 2;
        let n = SMALL_PRIMES[r.random_range(0..SMALL_PRIMES.len())];
        let md = m(n);
        let fs: Vec<CyclicFunction> = if trial % 10 == 0 {
            vec![disk(&md, &mut r); 1 << s]
        } else {
            (0..1 << s).map(|_| disk(&md, &mut r)).collect()
        };
        let lhs = gowers::gowers_inner(&corner_vec(&fs), s).unwrap().norm();
        let rhs: f64 = fs
            .iter()
            .map(|f| gowers::gowers_norm(f, s).unwrap().value)
            .product();
        csg.record(lhs - rhs, tol, || format!("N={n} s={s} trial {trial}"));
    }

    let mut ddi = Tally::default();
    let (pp, qq) = (poly("y"), poly("y^2"));
    for trial in 0..1000 {
        let s = 2 + trial % 2;
        let n = [5u64, 7, 11, 13][r.random_range(0..4)];
        let md = m(n);
        let (f, g, k) = (disk(&md, &mut r), disk(&md, &mut r), disk(&md, &mut r));
        let big_f = counts::dual_fgk(&f, &g, &k, &pp, &qq).unwrap();
        let lhs = gowers::gowers_norm(&big_f, s)
            .unwrap()
            .value
            .powi(1 << (s + 1));
        let mut rhs = 0.0;
        for h in 0..n as i64 {
            let fh =
                counts::dual_h_fgk(&f, &g, &k, &ShiftVector::new(&md, &[h]).unwrap(), &pp, &qq)
                    .unwrap();
            rhs += gowers::gowers_norm(&fh, s - 1)
                .unwrap()
                .value
                .powi(1 << (s - 1));
        }
        rhs /= n as f64;
        ddi.record(lhs - rhs - tol * rhs.max(1.0) + tol, tol, || {
            format!("N={n} s={s} trial {trial}")
        });
    }

    let mut inverse = Tally::default();
    for trial in 0..1000 {
        let n = SMALL_PRIMES[r.random_range(0..SMALL_PRIMES.len())];
        let md = m(n);
        let mut f = disk(&md, &mut r);
        if trial % 3 == 0 {
            let chi = CyclicFunction::character(&md, r.random_range(0..n as i64));
            f = f
                .scale(Complex64::new(0.3, 0.0))
                .add(&chi.scale(Complex64::new(0.7, 0.0)))
                .unwrap();
        }
        let u2 = gowers::gowers_norm(&f, 2).unwrap().value;
        let rhs = f.l2_norm().powi(2) * dft(&f).sup().powi(2);
        inverse.record(u2.powi(4) - rhs, tol, || format!("N={n} trial {trial}"));
    }

    let mut chain = Tally::default();
    for trial in 0..1000 {
        let n = SMALL_PRIMES[r.random_range(0..8)];
        let md = m(n);
        let f = if trial % 2 == 0 {
            disk(&md, &mut r)
        } else {
            pm1(&md, &mut r)
        };
        let u: Vec<f64> = (1..=3)
            .map(|s| gowers::gowers_norm(&f, s).unwrap().value)
            .collect();
        chain.record((u[0] - u[1]).max(u[1] - u[2]), tol, || {
            format!("N={n} trial {trial}")
        });
    }
    finish(
        vec![
            ("CSG", &csg),
            ("dual-difference", &ddi),
            ("U2 inverse", &inverse),
            ("monotone chain", &chain),
        ],
        true,
        String::new(),
    )
}

fn regularity_suite() -> Outcome {
    let th = Thresholds::new(0.05, 0.05, 0.01, 0.2).unwrap();
    let mut r = rng(500);
    let mut recon = Tally::default();
    let mut norms = Tally::default();
    let mut emitted = 0;
    let mut structured = 0;
    let mut problems = Vec::new();
    for trial in 0..100 {
        let n = [17u64, 31, 61][trial % 3];
        let md = m(n);
        let noise = disk(&md, &mut r);
        let c = 3.0 * r.random::<f64>();
        let chi = CyclicFunction::character(&md, r.random_range(0..n as i64));
        let raw = noise.add(&chi.scale(Complex64::new(c, 0.0))).unwrap();
        let f = raw.scale(Complex64::new(1.0 / raw.l2_norm(), 0.0));
        match regularity_decompose(&f, NormKind::FourierLinf, th) {
            Ok(cert) => {
                emitted += 1;
                if cert.verify().is_err() {
                    problems.push(format!("trial {trial}: emitted certificate fails verify"));
                }
                let sum: Vec<Complex64> = (0..n as usize)
                    .map(|x| cert.f_a.values()[x] + cert.f_b.values()[x] + cert.f_c.values()[x])
                    .collect();
                recon.record(max_diff(&sum, f.values()), 1e-10, || {
                    format!("trial {trial}")
                });
                let a_hat = naive_dft(cert.f_a.values());
                let c_hat = naive_dft(cert.f_c.values());
                if a_hat.iter().any(|v| v.norm() > 1e-9) {
                    structured += 1;
                }
                let l1_a: f64 = a_hat.iter().map(|v| v.norm()).sum();
                let l1_b = cert.f_b.values().iter().map(|v| v.norm()).sum::<f64>() / n as f64;
                let linf_c = cert
                    .f_c
                    .values()
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
                let sup_c_hat = c_hat.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let over = [
                    l1_a - 1.0 / th.eps1,
                    l1_b - th.eps2,
                    linf_c - 1.0 / th.eps3,
                    sup_c_hat - th.eps4,
                ]
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
                norms.record(over.max(0.0), 1e-9, || format!("trial {trial}"));
            }
            Err(LabError::CertificationFailed { .. }) => {}
            Err(e) => problems.push(format!("trial {trial}: {e}")),
        }
    }

    let mut monotone = Tally::default();
    let mut dual_certs = 0;
    for trial in 0..20 {
        let n = [17u64, 31][trial % 2];
        let md = m(n);
        let raw = disk(&md, &mut r);
        let f = raw.scale(Complex64::new(1.0 / raw.l2_norm(), 0.0));
        match dual_regularity_decompose(&f, 2, th, 0.1) {
            Ok(d) => {
                dual_certs += 1;
                if d.certificate.verify().is_err() {
                    problems.push(format!("dual trial {trial}: certificate fails verify"));
                }
                let rise = d
                    .residual_norms
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(0.0, f64::max);
                monotone.record(rise, 0.0, || format!("dual trial {trial}"));
                let u2c = u2_fourth_autocorrelation(d.f3.values()).powf(0.25);
                norms.record((u2c - th.eps4).max(0.0), 1e-9, || {
                    format!("dual trial {trial} U2")
                });
                let sum: Vec<Complex64> = (0..n as usize)
                    .map(|x| d.f1.values()[x] + d.f2.values()[x] + d.f3.values()[x])
                    .collect();
                recon.record(max_diff(&sum, f.values()), 1e-10, || {
                    format!("dual trial {trial}")
                });
            }
            Err(e) => problems.push(format!("dual trial {trial}: {e}")),
        }
    }
    let extra = format!(
        "{emitted}/100 spectral certificates ({structured} with structured part), {dual_certs}/20 dual certificates"
    );
    let ok = problems.is_empty() && emitted == 100;
    let extra = if problems.is_empty() {
        extra
    } else {
        format!("{extra}; {}", problems.join("; "))
    };
    finish(
        vec![
            ("reconstruction", &recon),
            ("norm bounds", &norms),
            ("dual residual rise", &monotone),
        ],
        ok,
        extra,
    )
}

fn telescoping_model() -> Outcome {
    let (pp, qq) = (poly("y"), poly("y^2"));
    let mut identity = Tally::default();
    let mut bound = Tally::default();
    let mut lines = Vec::new();
    for n in [101u64, 1009, 10007] {
        let md = m(n);
        let (tp, tq) = (table(&pp, n as usize), table(&qq, n as usize));
        for alpha in [1i64, 2, 5] {
            let f = make_function(&format!("quad:alpha={alpha},beta=0"), &md, 0).unwrap();
            let g = make_function(&format!("quad:alpha={},beta=0", -alpha), &md, 0).unwrap();
            let l = counts::lambda(&f, &g, &g, &f, &pp, &qq).unwrap();
            let one_dim: Complex64 = (0..n as usize)
                .map(|y| {
                    e(
                        2 * alpha as i128 * tp[y] as i128 * tq[y] as i128,
                        n as usize,
                    )
                })
                .sum::<Complex64>()
                / n as f64;
            identity.record((l - one_dim).norm(), 1e-12, || {
                format!("N={n} alpha={alpha}")
            });
            let cap = 2.0 / (n as f64).sqrt();
            bound.record((l.norm() - cap).max(0.0), 0.0, || {
                format!("N={n} alpha={alpha} |L|={}", l.norm())
            });
            if alpha == 1 {
                lines.push(format!("N={n}: |L|={:.3e} vs {:.3e}", l.norm(), cap));
            }
        }
    }
    finish(
        vec![
            ("telescoping identity", &identity),
            ("2 N^-1/2 bound", &bound),
        ],
        true,
        lines.join(", "),
    )
}

fn complexity_decay() -> Outcome {
    let ladder = [101u64, 1009, 10007];
    let (pp, qq) = (poly("y"), poly("y^2"));
    let mut gap_ok = 0;
    let mut three_ok = 0;
    let mut slowest: f64 = 0.0;
    let mut rows = Vec::new();
    for seed in 0..10u64 {
        let mut gaps = Vec::new();
        let mut threes = Vec::new();
        for &n in &ladder {
            let md = m(n);
            let spec = |j: u64| make_function("random:unit", &md, 1000 * seed + j).unwrap();
            let (f, g, k, p) = (spec(1), spec(2), spec(3), spec(4));
            let t0 = Instant::now();
            let report = counts::gap_report(&f, &g, &k, &p, &pp, &qq).unwrap();
            if n == 10007 {
                slowest = slowest.max(t0.elapsed().as_secs_f64());
            }
            gaps.push(report.gap());
            threes.push(counts::three_term(&f, &g, &k, &pp, &qq).unwrap().gap);
        }
        if gaps.windows(2).all(|w| w[1] < w[0]) {
            gap_ok += 1;
        }
        if threes.windows(2).all(|w| w[1] < w[0]) {
            three_ok += 1;
        }
        if seed == 0 {
            rows.push(format!(
                "gaps {:.2e} {:.2e} {:.2e}",
                gaps[0], gaps[1], gaps[2]
            ));
        }
    }
    let ok = gap_ok >= 8 && three_ok >= 8 && slowest < 120.0;
    let text = format!(
        "gap decreasing for {gap_ok}/10, three-term for {three_ok}/10, lambda+lambda1 at N=10007 took {slowest:.2}s; {}",
        rows.join("")
    );
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn pet_engine() -> Outcome {
    let polys = vec![poly("y^2"), poly("y^3")];
    let first = pet_trace(&polys);
    let second = pet_trace(&polys);
    let deterministic = first == second;
    let golden_dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let pinned = std::fs::read_to_string(golden_dir.join("pet_y2_y3.txt")).unwrap_or_default();
    match first {
        Ok(t) => {
            let text = format!("final degree {} after {} steps", t.final_degree, t.cs_count);
            if t.final_degree <= 34 && deterministic {
                Ok(text)
            } else {
                Err(text)
            }
        }
        Err(LabError::PetCapExceeded { reason, partial }) => {
            let partial = partial.expect("cap errors carry the partial trace");
            let stable = pinned.starts_with(&partial.render_text());
            Err(format!(
                "no final degree: {reason} after {} steps (deterministic: {deterministic}, golden-stable: {stable})",
                partial.cs_count
            ))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn extremal_suite() -> Outcome {
    let mut mismatch = Tally::default();
    let mut rows = Vec::new();
    for n in [5u64, 7, 11, 13] {
        let md = m(n);
        for (ps, qs) in [("y", "y^2"), ("y^2", "y^3")] {
            let (pp, qq) = (poly(ps), poly(qs));
            let (tp, tq) = (table(&pp, n as usize), table(&qq, n as usize));
            let (size, set) = max_free_exact(&md, &pp, &qq).unwrap();
            let brute = max_free_bruteforce(n as usize, &tp, &tq);
            mismatch.record((size as f64 - brute as f64).abs(), 0.0, || {
                format!("N={n} ({ps},{qs}) exact {size} vs {brute}")
            });
            let free = find_progression(&set, &pp, &qq).is_none() && set.len() == size;
            mismatch.record(if free { 0.0 } else { 1.0 }, 0.0, || {
                format!("N={n} ({ps},{qs}) exact set not free")
            });
            for seed in 0..10 {
                let g = grow_free_greedy(&md, &pp, &qq, seed);
                let ok = find_progression(&g, &pp, &qq).is_none() && g.len() <= size;
                mismatch.record(if ok { 0.0 } else { 1.0 }, 0.0, || {
                    format!("N={n} ({ps},{qs}) greedy seed {seed}")
                });
            }
            if ps == "y" {
                rows.push(format!("N={n}: {size}"));
            }
        }
    }
    finish(
        vec![("exact/greedy", &mismatch)],
        true,
        format!("max free sizes for (y, y^2): {}", rows.join(", ")),
    )
}

fn torus_distance(t: f64) -> f64 {
    let f = t.rem_euclid(1.0);
    f.min(1.0 - f)
}

fn fejer_suite() -> Outcome {
    let mut weights = Tally::default();
    for k0 in [1i64, 2, 5] {
        let l = std::f64::consts::TAU * k0 as f64;
        let eps = 0.5;
        let mgrid = (10.0 * l / eps).ceil() as usize;
        let g = GridFunction::sample(1, mgrid, |t| {
            Complex64::from_polar(1.0, std::f64::consts::TAU * k0 as f64 * t[0])
        })
        .unwrap();
        let (plan, coeffs) = fejer_approx(&g, l, eps).unwrap();
        let exact = 1.0 - k0 as f64 / plan.r as f64;
        let ok = coeffs.len() == 1 && coeffs[0].k == vec![k0] && coeffs[0].weight == exact;
        weights.record(if ok { 0.0 } else { 1.0 }, 0.0, || format!("k0={k0}"));
        weights.record((coeffs[0].a.re - exact).abs(), 1e-12, || {
            format!("k0={k0} amplitude")
        });
    }
    for (k1, k2) in [(1i64, -2i64), (3, 0)] {
        let w = fejer_weight(7, &[k1, k2]);
        let exact = (1.0 - k1.abs() as f64 / 7.0) * (1.0 - k2.abs() as f64 / 7.0);
        weights.record((w - exact).abs(), 0.0, || format!("2d weight ({k1},{k2})"));
    }

    let mut sup = Tally::default();
    let mut r = rng(1000);
    for trial in 0..20 {
        let d = 1 + trial % 2;
        let terms = 3;
        let centers: Vec<Vec<f64>> = (0..terms)
            .map(|_| (0..d).map(|_| r.random::<f64>()).collect())
            .collect();
        let scales: Vec<f64> = (0..terms).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        let radii: Vec<f64> = (0..terms).map(|_| 0.15 + 0.3 * r.random::<f64>()).collect();
        let lip: f64 = scales.iter().map(|w| w.abs()).sum();
        let func = |t: &[f64]| -> f64 {
            (0..terms)
                .map(|j| {
                    let dist = t
                        .iter()
                        .zip(&centers[j])
                        .map(|(a, c)| torus_distance(a - c).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    scales[j] * (radii[j] - dist).max(0.0)
                })
                .sum()
        };
        let eps = if d == 1 { 0.02 } else { 0.05 };
        // Room for two doublings of the starting cutoff.
        let r0 = 2.0 * ((lip + 1.0) / eps).powf(1.0 / d as f64);
        let mgrid = ((10.0 * lip / eps).max(8.0 * r0)).ceil() as usize + 1;
        let g = GridFunction::sample_real(d, mgrid, func).unwrap();
        let (plan, coeffs) = match fejer_approx(&g, lip, eps) {
            Ok(v) => v,
            Err(e) => {
                sup.record(f64::INFINITY, eps, || format!("trial {trial} d={d}: {e}"));
                continue;
            }
        };
        let dense = if d == 1 { 7 * mgrid + 3 } else { 73 };
        let mut worst: f64 = 0.0;
        let mut point = vec![0.0; d];
        for idx in 0..dense.pow(d as u32) {
            let mut rest = idx;
            for axis in (0..d).rev() {
                point[axis] = ((rest % dense) as f64 + 0.37) / dense as f64;
                rest /= dense;
            }
            let approx = fejer_eval(&coeffs, &point);
            worst = worst.max((approx - Complex64::new(func(&point), 0.0)).norm());
        }
        sup.record(worst - eps, 0.0, || {
            format!("trial {trial} d={d} R={} sup-error {worst}", plan.r)
        });
    }
    finish(
        vec![("weights", &weights), ("dense sup-error over eps", &sup)],
        true,
        String::new(),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "fourier suite", fourier_suite),
        (2, "oracle equivalence", oracle_equivalence),
        (3, "exact identities", exact_identities),
        (4, "inequality suite", inequality_suite),
        (5, "regularity decompositions", regularity_suite),
        (6, "degree-lowering model case", telescoping_model),
        (7, "true-complexity decay", complexity_decay),
        (8, "PET engine", pet_engine),
        (9, "extremal search", extremal_suite),
        (10, "fejer approximation", fejer_suite),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || id.to_string() == *f)
        {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} [{secs:.1}s] {detail}"),
            Err(detail) => {
                println!("criterion {id:>2} FAIL  {name} [{secs:.1}s] {detail}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
