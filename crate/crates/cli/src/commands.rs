use std::collections::btree_map::Entry;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use szlab::counts::{self, ProgressionFamily};
use szlab::decompose::{dual_regularity_decompose, regularity_decompose, NormKind, Thresholds};
use szlab::extremal::{grow_free_greedy, max_free_exact, EXACT_LIMIT};
use szlab::funcspec::make_function;
use szlab::gowers::{self, CornerFamily, ShiftVector};
use szlab::pet::pet_trace;
use szlab::phase::{self, fejer_approx, fejer_eval, GridFunction};
use szlab::poly::rational_rank;
use szlab::{CyclicFunction, IntPolynomial, LabError, Modulus};

use crate::cli::{Command, Common, DecomposeKind, DualKind, Method};
use crate::verify;
use crate::CliError;

pub struct Outcome {
    pub payload: Value,
    pub csv: Option<String>,
    /// Set by the verification suites when some check failed.
    pub failed: bool,
}

impl Outcome {
    fn json(payload: Value) -> Self {
        Self {
            payload,
            csv: None,
            failed: false,
        }
    }
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn modulus(common: &Common) -> Result<Modulus, CliError> {
    let n = common
        .n
        .ok_or_else(|| CliError::Validation("--N is required for this command".into()))?;
    Ok(Modulus::new(n)?)
}

fn polynomial(spec: &str) -> Result<IntPolynomial, CliError> {
    Ok(spec.parse::<IntPolynomial>()?)
}

fn pair(common: &Common) -> Result<(IntPolynomial, IntPolynomial), CliError> {
    let (pp, qq) = (polynomial(&common.p_poly)?, polynomial(&common.q_poly)?);
    if rational_rank(&[pp.clone(), qq.clone()]) < 2 {
        return Err(CliError::Validation(format!(
            "--P {pp} and --Q {qq} are linearly dependent"
        )));
    }
    Ok((pp, qq))
}

fn poly_list(common: &Common, polys: &[String]) -> Result<Vec<IntPolynomial>, CliError> {
    if polys.is_empty() {
        Ok(vec![
            polynomial(&common.p_poly)?,
            polynomial(&common.q_poly)?,
        ])
    } else {
        polys.iter().map(|p| polynomial(p)).collect()
    }
}

/// The four role functions, seeded `seed`, `seed + 1`, `seed + 2`, `seed + 3`.
fn quadruple(common: &Common, m: &Modulus) -> Result<[CyclicFunction; 4], CliError> {
    let specs = [&common.f, &common.g, &common.k, &common.p];
    let mut out = Vec::with_capacity(4);
    for (i, spec) in specs.into_iter().enumerate() {
        out.push(make_function(spec, m, common.seed.wrapping_add(i as u64))?);
    }
    Ok(out.try_into().expect("four specs"))
}

fn gap_payload(report: &counts::GapReport) -> Value {
    serde_json::to_value(report).expect("gap report serializes")
}

pub fn dispatch(common: &Common, command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Norm { s, direct } => {
            let m = modulus(common)?;
            let f = make_function(&common.f, &m, common.seed)?;
            let report = if *direct {
                gowers::gowers_norm_direct(&f, *s)?
            } else {
                gowers::gowers_norm(&f, *s)?
            };
            Ok(Outcome::json(serde_json::to_value(report).unwrap()))
        }
        Command::U3 => {
            let m = modulus(common)?;
            let f = make_function(&common.f, &m, common.seed)?;
            let c = gowers::u3_small(&f);
            Ok(Outcome::json(
                json!({"N": m.get(), "value": c.value, "alpha": c.alpha, "beta": c.beta}),
            ))
        }
        Command::Count => {
            let m = modulus(common)?;
            let (pp, qq) = pair(common)?;
            let [f, g, k, p] = quadruple(common, &m)?;
            Ok(Outcome::json(gap_payload(&counts::gap_report(
                &f, &g, &k, &p, &pp, &qq,
            )?)))
        }
        Command::CountSt { polys, t, corners } => count_st(common, polys, *t, corners),
        Command::Gap { ladder } => gap(common, ladder),
        Command::ThreeTerm => {
            let m = modulus(common)?;
            let (pp, qq) = pair(common)?;
            let [f, g, k, _] = quadruple(common, &m)?;
            let t = counts::three_term(&f, &g, &k, &pp, &qq)?;
            Ok(Outcome::json(json!({
                "N": m.get(),
                "value": complex(t.value),
                "product_of_means": complex(t.product_of_means),
                "gap": t.gap,
            })))
        }
        Command::Dual { which, h } => {
            let m = modulus(common)?;
            let (pp, qq) = pair(common)?;
            let [f, g, k, p] = quadruple(common, &m)?;
            let (name, d) = match which {
                DualKind::Fgk => ("fgk", counts::dual_fgk(&f, &g, &k, &pp, &qq)?),
                DualKind::Gkp => ("gkp", counts::dual_gkp(&g, &k, &p, &pp, &qq)?),
                DualKind::H => {
                    let hv = ShiftVector::new(&m, h)?;
                    ("h", counts::dual_h_fgk(&f, &g, &k, &hv, &pp, &qq)?)
                }
            };
            Ok(Outcome::json(json!({
                "N": m.get(),
                "which": name,
                "h": h,
                "values": d.values().iter().map(|&z| complex(z)).collect::<Vec<_>>(),
                "sup_norm": d.sup_norm(),
                "l2_norm": d.l2_norm(),
            })))
        }
        Command::Decompose {
            kind,
            s,
            eps,
            eta,
            normalize,
        } => decompose(common, *kind, *s, eps, *eta, *normalize),
        Command::Fejer { d, shape, eps, m } => fejer(common, *d, shape, *eps, *m),
        Command::ScanPhase { top } => {
            let m = modulus(common)?;
            let (pp, qq) = pair(common)?;
            let kk = make_function(&common.k, &m, common.seed.wrapping_add(2))?;
            let hits = phase::major_arc_scan(&kk, &pp, &qq, *top)?;
            Ok(Outcome::json(json!({"N": m.get(), "hits": hits})))
        }
        Command::Pet { polys } => {
            let polys = poly_list(common, polys)?;
            let input: Vec<String> = polys.iter().map(|p| p.to_string()).collect();
            let (trace, stopped) = match pet_trace(&polys) {
                Ok(t) => (t, None),
                Err(LabError::PetCapExceeded {
                    reason,
                    partial: Some(t),
                }) => (*t, Some(reason)),
                Err(e) => return Err(e.into()),
            };
            Ok(Outcome::json(json!({
                "input": input,
                "complete": trace.complete,
                "final_degree": trace.complete.then_some(trace.final_degree),
                "trace": trace,
                "stopped": stopped,
            })))
        }
        Command::Extremal {
            method,
            ladder,
            seeds,
        } => extremal(common, *method, ladder, *seeds),
        Command::Verify { suite, trials } => {
            let m = match common.n {
                Some(_) => modulus(common)?,
                None => Modulus::new(31)?,
            };
            let report = verify::run(*suite, &m, *trials, common.seed);
            let failed = !report.passed;
            Ok(Outcome {
                payload: serde_json::to_value(report).unwrap(),
                csv: None,
                failed,
            })
        }
    }
}

fn count_st(
    common: &Common,
    polys: &[String],
    t: Option<usize>,
    corners: &[String],
) -> Result<Outcome, CliError> {
    let m = modulus(common)?;
    let polys = poly_list(common, polys)?;
    let s = polys.len();
    let t = t.unwrap_or(s);
    let family = ProgressionFamily::new(&m, polys.clone(), t)?;
    let mut fs = CornerFamily::new();
    for entry in corners {
        let (w, spec) = entry.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("corner `{entry}` should look like omega=spec"))
        })?;
        let w: u32 = w
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("corner index `{w}` is not an integer")))?;
        if w >= 1 << s {
            return Err(CliError::Validation(format!(
                "corner {w} is outside the cube of dimension {s}"
            )));
        }
        fs.insert(
            w,
            make_function(spec, &m, common.seed.wrapping_add(w as u64))?,
        );
    }
    for w in 0..1u32 << s {
        if let Entry::Vacant(slot) = fs.entry(w) {
            slot.insert(make_function(
                &common.f,
                &m,
                common.seed.wrapping_add(w as u64),
            )?);
        }
    }
    let l = counts::lambda_st(&family, &fs)?;
    let l1 = counts::lambda1_st(&family, &fs)?;
    Ok(Outcome::json(json!({
        "N": m.get(),
        "polys": polys.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "s": s,
        "t": t,
        "lambda_st": complex(l),
        "lambda1_st": complex(l1),
        "gap": (l - l1).norm(),
    })))
}

fn gap(common: &Common, ladder: &[u64]) -> Result<Outcome, CliError> {
    let ladder = if ladder.is_empty() {
        vec![common
            .n
            .ok_or_else(|| CliError::Validation("gap needs --N or --ladder".into()))?]
    } else {
        ladder.to_vec()
    };
    let (pp, qq) = pair(common)?;
    let mut rows = Vec::new();
    let mut csv = String::from("N,gap,log2(N)\n");
    for n in ladder {
        let m = Modulus::new(n)?;
        let [f, g, k, p] = quadruple(common, &m)?;
        let report = counts::gap_report(&f, &g, &k, &p, &pp, &qq)?;
        csv.push_str(&format!("{n},{:e},{}\n", report.gap(), (n as f64).log2()));
        rows.push(gap_payload(&report));
    }
    Ok(Outcome {
        payload: json!({"rows": rows}),
        csv: Some(csv),
        failed: false,
    })
}

fn decompose(
    common: &Common,
    kind: DecomposeKind,
    s: usize,
    eps: &[f64],
    eta: f64,
    normalize: bool,
) -> Result<Outcome, CliError> {
    let m = modulus(common)?;
    let &[e1, e2, e3, e4] = eps else {
        return Err(CliError::Validation(format!(
            "--eps needs four values, got {}",
            eps.len()
        )));
    };
    let thresholds = Thresholds::new(e1, e2, e3, e4)?;
    let mut f = make_function(&common.f, &m, common.seed)?;
    if normalize {
        let l2 = f.l2_norm();
        if l2 > 0.0 {
            f = f.scale(Complex64::new(1.0 / l2, 0.0));
        }
    }
    let (cert, residuals) = match kind {
        DecomposeKind::FourierLinf => (
            regularity_decompose(&f, NormKind::FourierLinf, thresholds)?,
            None,
        ),
        DecomposeKind::GowersUs => {
            let d = dual_regularity_decompose(&f, s, thresholds, eta)?;
            (d.certificate, Some(d.residual_norms))
        }
    };
    let verified = cert.verify().is_ok();
    let mut payload = cert.to_json();
    payload["verified"] = json!(verified);
    payload["residual_norms"] = json!(residuals);
    Ok(Outcome::json(payload))
}

fn torus_distance(t: f64) -> f64 {
    let f = t.rem_euclid(1.0);
    f.min(1.0 - f)
}

type TorusFn = dyn Fn(&[f64]) -> Complex64;

/// A sampled test function on the torus with a known Lipschitz constant.
struct Shape {
    lipschitz: f64,
    eval: Box<TorusFn>,
}

fn parse_shape(spec: &str, d: usize, seed: u64) -> Result<Shape, CliError> {
    let bad = |msg: &str| CliError::Validation(format!("shape `{spec}`: {msg}"));
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected mode:k=K or cones:count=C"))?;
    let (key, value) = body
        .split_once('=')
        .ok_or_else(|| bad("expected key=value"))?;
    let value: i64 = value
        .trim()
        .parse()
        .map_err(|_| bad("value is not an integer"))?;
    match (kind, key) {
        ("mode", "k") => {
            let k = value as f64;
            Ok(Shape {
                lipschitz: std::f64::consts::TAU * k.abs(),
                eval: Box::new(move |t| {
                    Complex64::from_polar(1.0, std::f64::consts::TAU * k * t[0])
                }),
            })
        }
        ("cones", "count") if value > 0 => {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let cones: Vec<(Vec<f64>, f64, f64)> = (0..value)
                .map(|_| {
                    let c: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
                    (
                        c,
                        r.random::<f64>() * 2.0 - 1.0,
                        0.15 + 0.3 * r.random::<f64>(),
                    )
                })
                .collect();
            let lipschitz = cones.iter().map(|c| c.1.abs()).sum();
            Ok(Shape {
                lipschitz,
                eval: Box::new(move |t| {
                    let v: f64 = cones
                        .iter()
                        .map(|(c, w, rad)| {
                            let dist = t
                                .iter()
                                .zip(c)
                                .map(|(a, b)| torus_distance(a - b).powi(2))
                                .sum::<f64>()
                                .sqrt();
                            w * (rad - dist).max(0.0)
                        })
                        .sum();
                    Complex64::new(v, 0.0)
                }),
            })
        }
        _ => Err(bad("unknown shape")),
    }
}

fn fejer(
    common: &Common,
    d: usize,
    shape: &str,
    eps: f64,
    m: Option<usize>,
) -> Result<Outcome, CliError> {
    if !(1..=3).contains(&d) {
        return Err(CliError::Validation(format!(
            "--d must be 1, 2 or 3, got {d}"
        )));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(CliError::Validation("--eps must be positive".into()));
    }
    let shape = parse_shape(shape, d, common.seed)?;
    let l = shape.lipschitz.max(1e-12);
    let r0 = 2.0 * ((l + 1.0) / eps).powf(1.0 / d as f64);
    let m = m.unwrap_or_else(|| ((10.0 * l / eps).max(8.0 * r0)).ceil() as usize + 1);
    let grid = GridFunction::sample(d, m, &*shape.eval)?;
    let (plan, coefficients) = fejer_approx(&grid, l, eps)?;
    let per_axis = match d {
        1 => (7 * m + 3).min(20_000),
        2 => 73,
        _ => 17,
    };
    let mut worst: f64 = 0.0;
    let mut point = vec![0.0; d];
    for idx in 0..per_axis.pow(d as u32) {
        let mut rest = idx;
        for axis in (0..d).rev() {
            point[axis] = ((rest % per_axis) as f64 + 0.37) / per_axis as f64;
            rest /= per_axis;
        }
        worst = worst.max((fejer_eval(&coefficients, &point) - (shape.eval)(&point)).norm());
    }
    Ok(Outcome::json(json!({
        "d": d,
        "m": m,
        "lipschitz": l,
        "eps": eps,
        "plan": plan,
        "coefficients": coefficients,
        "offset_grid_error": worst,
    })))
}

fn extremal(
    common: &Common,
    method: Method,
    ladder: &[u64],
    seeds: u64,
) -> Result<Outcome, CliError> {
    let ladder = if ladder.is_empty() {
        vec![common
            .n
            .ok_or_else(|| CliError::Validation("extremal needs --N or --ladder".into()))?]
    } else {
        ladder.to_vec()
    };
    let (pp, qq) = pair(common)?;
    let mut rows = Vec::new();
    let mut csv = String::from("N,method,size,size/N\n");
    for n in ladder {
        let m = Modulus::new(n)?;
        let want_exact = match method {
            Method::Exact => true,
            Method::Both => n <= EXACT_LIMIT,
            Method::Greedy => false,
        };
        if want_exact {
            let t0 = Instant::now();
            let (size, set) = max_free_exact(&m, &pp, &qq)?;
            csv.push_str(&format!("{n},exact,{size},{}\n", size as f64 / n as f64));
            rows.push(json!({
                "N": n,
                "method": "exact",
                "size": size,
                "density": size as f64 / n as f64,
                "set": set,
                "seconds": t0.elapsed().as_secs_f64(),
            }));
        }
        if method != Method::Exact {
            for i in 0..seeds {
                let seed = common.seed.wrapping_add(i);
                let set = grow_free_greedy(&m, &pp, &qq, seed);
                let size = set.len();
                csv.push_str(&format!("{n},greedy,{size},{}\n", size as f64 / n as f64));
                rows.push(json!({
                    "N": n,
                    "method": "greedy",
                    "seed": seed,
                    "size": size,
                    "density": size as f64 / n as f64,
                    "set": set,
                }));
            }
        }
    }
    Ok(Outcome {
        payload: json!({"rows": rows}),
        csv: Some(csv),
        failed: false,
    })
}
