//! Structured-plus-pseudorandom decompositions with checkable certificates.
//!
//! Every certificate carries the raw pieces; [`DecompositionCertificate::verify`]
//! recomputes each norm from them and trusts no stored field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{LabError, Result};
use crate::fourier::dft;
use crate::function::CyclicFunction;
use crate::gowers::{dual_us, gowers_norm, CornerFamily, CubePattern};

pub const RECONSTRUCTION_TOL: f64 = 1e-10;
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "s")]
pub enum NormKind {
    FourierLinf,
    GowersUs(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
}

impl Thresholds {
    pub fn new(eps1: f64, eps2: f64, eps3: f64, eps4: f64) -> Result<Self> {
        let t = Self {
            eps1,
            eps2,
            eps3,
            eps4,
        };
        t.check()?;
        Ok(t)
    }

    /// `eps2^-1 eps3 + eps4^-1 eps1`.
    pub fn admissibility(&self) -> f64 {
        self.eps3 / self.eps2 + self.eps1 / self.eps4
    }

    pub fn check(&self) -> Result<()> {
        let all = [self.eps1, self.eps2, self.eps3, self.eps4];
        if all.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(LabError::InvalidArgument(
                "thresholds must be positive and finite".into(),
            ));
        }
        let a = self.admissibility();
        if a > 0.5 + BOUND_SLACK {
            return Err(LabError::InadmissibleThresholds(a));
        }
        Ok(())
    }
}

/// Norm values of the pieces, in the order (structured dual norm,
/// `L^1` of `f_b`, `L^inf` of `f_c`, uniformity norm of `f_c`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormQuadruple {
    pub dual_a: f64,
    pub l1_b: f64,
    pub linf_c: f64,
    pub norm_c: f64,
}

impl NormQuadruple {
    fn within(&self, bound: &NormQuadruple) -> Option<&'static str> {
        let ok = |v: f64, b: f64| v <= b * (1.0 + BOUND_SLACK) + BOUND_SLACK;
        if !ok(self.dual_a, bound.dual_a) {
            Some("structured part")
        } else if !ok(self.l1_b, bound.l1_b) {
            Some("L1 part")
        } else if !ok(self.linf_c, bound.linf_c) {
            Some("L-infinity of the uniform part")
        } else if !ok(self.norm_c, bound.norm_c) {
            Some("uniformity of the uniform part")
        } else {
            None
        }
    }
}

/// One term `a_j D_{U^s}(f_{omega,j})`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualAtom {
    pub weight: f64,
    pub constituents: CornerFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualAtomCombination {
    pub s: usize,
    pub eta: f64,
    pub atoms: Vec<DualAtom>,
}

impl DualAtomCombination {
    pub fn weight_sum(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    /// `eta (eps1 eta)^{-2^s}`.
    pub fn weight_bound(&self, eps1: f64) -> f64 {
        self.eta * (eps1 * self.eta).powf(-((1u64 << self.s) as f64))
    }

    /// `sum_j a_j D(f_{omega,j})`.
    pub fn evaluate(&self, template: &CyclicFunction) -> Result<CyclicFunction> {
        let mut acc = CyclicFunction::zero(template.modulus());
        for atom in &self.atoms {
            let d = dual_us(&atom.constituents, self.s)?;
            acc = acc.add(&d.scale(Complex64::new(atom.weight, 0.0)))?;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCertificate {
    pub kind: NormKind,
    pub thresholds: Thresholds,
    pub f: CyclicFunction,
    pub f_a: CyclicFunction,
    pub f_b: CyclicFunction,
    pub f_c: CyclicFunction,
    pub bounds: NormQuadruple,
    pub achieved: NormQuadruple,
    pub atoms: Option<DualAtomCombination>,
}

fn uniformity(kind: NormKind, f: &CyclicFunction) -> Result<f64> {
    match kind {
        NormKind::FourierLinf => Ok(dft(f).sup()),
        NormKind::GowersUs(s) => Ok(gowers_norm(f, s)?.value),
    }
}

fn measure(
    kind: NormKind,
    f_a: &CyclicFunction,
    f_b: &CyclicFunction,
    f_c: &CyclicFunction,
    atoms: Option<&DualAtomCombination>,
) -> Result<NormQuadruple> {
    let dual_a = match (kind, atoms) {
        (NormKind::FourierLinf, _) => dft(f_a).ell1(),
        (NormKind::GowersUs(_), Some(c)) => c.weight_sum(),
        (NormKind::GowersUs(_), None) => {
            return Err(LabError::InvalidArgument(
                "gowers-us certificate needs its dual atoms".into(),
            ))
        }
    };
    Ok(NormQuadruple {
        dual_a,
        l1_b: f_b.l1_norm(),
        linf_c: f_c.sup_norm(),
        norm_c: uniformity(kind, f_c)?,
    })
}

fn failure(iterations: usize, diagnostic: String) -> LabError {
    LabError::CertificationFailed {
        iterations,
        diagnostic,
    }
}

impl DecompositionCertificate {
    /// Recompute reconstruction, admissibility and all four norms from the pieces.
    pub fn verify(&self) -> Result<()> {
        self.thresholds.check()?;
        let sum = self.f_a.add(&self.f_b)?.add(&self.f_c)?;
        let err = sum.max_abs_diff(&self.f);
        if err > RECONSTRUCTION_TOL {
            return Err(failure(0, format!("reconstruction error {err:e}")));
        }
        if let Some(c) = &self.atoms {
            if c.atoms.iter().any(|a| {
                a.constituents
                    .values()
                    .any(|u| u.sup_norm() > 1.0 + crate::function::ONE_BOUNDED_SLACK)
            }) {
                return Err(failure(0, "constituent is not one-bounded".into()));
            }
            let err = c.evaluate(&self.f)?.max_abs_diff(&self.f_a);
            if err > RECONSTRUCTION_TOL {
                return Err(failure(
                    0,
                    format!("structured part differs from its atoms by {err:e}"),
                ));
            }
        }
        let achieved = measure(
            self.kind,
            &self.f_a,
            &self.f_b,
            &self.f_c,
            self.atoms.as_ref(),
        )?;
        if let Some(which) = achieved.within(&self.bounds) {
            return Err(failure(
                0,
                format!(
                    "{which} exceeds its bound: {achieved:?} vs {:?}",
                    self.bounds
                ),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let values = |f: &CyclicFunction| -> Value {
            f.values().iter().map(|v| json!([v.re, v.im])).collect()
        };
        json!({
            "N": self.f.modulus().get(),
            "norm_kind": self.kind,
            "thresholds": self.thresholds,
            "bounds": self.bounds,
            "achieved": self.achieved,
            "atom_weights": self.atoms.as_ref().map(|c| c.atoms.iter().map(|a| a.weight).collect::<Vec<_>>()),
            "f_a": values(&self.f_a),
            "f_b": values(&self.f_b),
            "f_c": values(&self.f_c),
        })
    }
}

fn check_input(f: &CyclicFunction, thresholds: &Thresholds) -> Result<()> {
    thresholds.check()?;
    let l2 = f.l2_norm();
    if l2 > 1.0 + 1e-9 {
        return Err(LabError::NormTooLarge(l2));
    }
    Ok(())
}

/// `f = f_a + f_b + f_c` with `||f_a||* <= 1/eps1`, `||f_b||_1 <= eps2`,
/// `||f_c||_inf <= 1/eps3`, `||f_c|| <= eps4`.
pub fn regularity_decompose(
    f: &CyclicFunction,
    kind: NormKind,
    thresholds: Thresholds,
) -> Result<DecompositionCertificate> {
    check_input(f, &thresholds)?;
    let bounds = NormQuadruple {
        dual_a: 1.0 / thresholds.eps1,
        l1_b: thresholds.eps2,
        linf_c: 1.0 / thresholds.eps3,
        norm_c: thresholds.eps4,
    };
    match kind {
        NormKind::FourierLinf => spectral_threshold(f, thresholds, bounds),
        NormKind::GowersUs(s) => {
            let run = greedy_dual(f, s, thresholds, bounds, thresholds.eps2, bounds.dual_a)?;
            Ok(run.certificate)
        }
    }
}

fn spectral_threshold(
    f: &CyclicFunction,
    thresholds: Thresholds,
    bounds: NormQuadruple,
) -> Result<DecompositionCertificate> {
    let m = f.modulus();
    let spec = dft(f);
    let coeffs = spec.coefficients();
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&a, &b| {
        coeffs[b]
            .norm()
            .total_cmp(&coeffs[a].norm())
            .then(a.cmp(&b))
    });
    let zero = CyclicFunction::zero(m);
    let mut best: Option<NormQuadruple> = None;
    let mut taken = 0usize;
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let mut head = vec![Complex64::new(0.0, 0.0); coeffs.len()];
        for &xi in &order[..taken] {
            head[xi] = coeffs[xi];
        }
        let mut tail = coeffs.to_vec();
        for &xi in &order[..taken] {
            tail[xi] = Complex64::new(0.0, 0.0);
        }
        let f_a = crate::fourier::idft(&crate::function::Spectrum::new(m, head)?);
        // The remainder is taken in value space so the pieces sum to f exactly
        // up to one rounding.
        let f_c = f.sub(&f_a)?;
        let achieved = NormQuadruple {
            dual_a: order[..taken].iter().map(|&xi| coeffs[xi].norm()).sum(),
            l1_b: 0.0,
            linf_c: f_c.sup_norm(),
            norm_c: tail.iter().map(|c| c.norm()).fold(0.0, f64::max),
        };
        if achieved.within(&bounds).is_none() {
            let cert = DecompositionCertificate {
                kind: NormKind::FourierLinf,
                thresholds,
                f: f.clone(),
                f_a,
                f_b: zero.clone(),
                f_c,
                bounds,
                achieved,
                atoms: None,
            };
            if cert.verify().is_ok() {
                return Ok(cert);
            }
        }
        best = Some(match best {
            Some(b) if b.norm_c <= achieved.norm_c => b,
            _ => achieved,
        });
        if taken == order.len() {
            break;
        }
        // Modes of equal modulus enter together: the threshold sits strictly below them.
        let level = coeffs[order[taken]].norm();
        while taken < order.len() && coeffs[order[taken]].norm() >= level {
            taken += 1;
        }
    }
    Err(failure(
        iterations,
        format!("no spectral threshold certifies; best achieved {best:?}"),
    ))
}

/// Output of the dual-function greedy.
#[derive(Debug, Clone)]
pub struct DualDecomposition {
    pub combination: DualAtomCombination,
    pub f1: CyclicFunction,
    pub f2: CyclicFunction,
    pub f3: CyclicFunction,
    pub certificate: DecompositionCertificate,
    /// Residual uniformity norm before the first step and after each step.
    pub residual_norms: Vec<f64>,
}

/// `f = f_1 + f_2 + f_3` with `f_1` a weighted sum of dual functions.
pub fn dual_regularity_decompose(
    f: &CyclicFunction,
    s: usize,
    thresholds: Thresholds,
    eta: f64,
) -> Result<DualDecomposition> {
    check_input(f, &thresholds)?;
    if !(2..=4).contains(&s) {
        return Err(LabError::OrderOutOfRange(s, 2, 4));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(LabError::InvalidArgument("eta must be positive".into()));
    }
    let budget = eta * (thresholds.eps1 * eta).powf(-((1u64 << s) as f64));
    let bounds = NormQuadruple {
        dual_a: budget,
        l1_b: thresholds.eps2 + eta,
        linf_c: 1.0 / thresholds.eps3,
        norm_c: thresholds.eps4,
    };
    let mut run = greedy_dual(f, s, thresholds, bounds, eta, budget)?;
    run.combination.eta = eta;
    if let Some(c) = run.certificate.atoms.as_mut() {
        c.eta = eta;
    }
    Ok(run)
}

fn greedy_dual(
    f: &CyclicFunction,
    s: usize,
    thresholds: Thresholds,
    bounds: NormQuadruple,
    eta: f64,
    budget: f64,
) -> Result<DualDecomposition> {
    if !(1..=crate::gowers::MAX_ORDER).contains(&s) {
        return Err(LabError::OrderOutOfRange(s, 1, crate::gowers::MAX_ORDER));
    }
    let m = f.modulus();
    let pattern = CubePattern::new(s, true)?;
    let cap = thresholds.eps4.powf(-((1u64 << s) as f64)).ceil() as usize;
    let mut residual = f.clone();
    let mut norm = gowers_norm(&residual, s)?.value;
    let mut history = vec![norm];
    let mut combination = DualAtomCombination {
        s,
        eta,
        atoms: Vec::new(),
    };
    let mut iterations = 0;
    while norm > thresholds.eps4 {
        if iterations >= cap {
            return Err(failure(
                iterations,
                format!(
                    "residual U^{s} norm {norm} above {} at the iteration cap",
                    thresholds.eps4
                ),
            ));
        }
        iterations += 1;
        let sup = residual.sup_norm();
        let u = residual.scale(Complex64::new(1.0 / sup, 0.0)).conj();
        let constituents = pattern.constant_family(&u);
        let atom = dual_us(&constituents, s)?;
        let energy = atom.l2_norm().powi(2);
        let mut a = residual.inner(&atom)?.re / energy;
        let mut accepted = None;
        for _ in 0..40 {
            let next = residual.sub(&atom.scale(Complex64::new(a, 0.0)))?;
            let next_norm = gowers_norm(&next, s)?.value;
            if next_norm <= norm {
                accepted = Some((next, next_norm));
                break;
            }
            a *= 0.5;
        }
        let Some((next, next_norm)) = accepted else {
            return Err(failure(
                iterations,
                format!("no descent step from residual norm {norm}"),
            ));
        };
        if combination.weight_sum() + a.abs() > budget * (1.0 + BOUND_SLACK) {
            return Err(failure(
                iterations,
                format!("weight budget {budget} exhausted at residual norm {norm}"),
            ));
        }
        combination.atoms.push(DualAtom {
            weight: a,
            constituents,
        });
        residual = next;
        norm = next_norm;
        history.push(norm);
    }
    let f1 = combination.evaluate(f)?;
    let cap_c = 1.0 / thresholds.eps3;
    let f3 = CyclicFunction::new(
        m,
        residual
            .values()
            .iter()
            .map(|&v| {
                if v.norm() > cap_c {
                    v * (cap_c / v.norm())
                } else {
                    v
                }
            })
            .collect(),
    )?;
    let f2 = f.sub(&f1)?.sub(&f3)?;
    let kind = NormKind::GowersUs(s);
    let achieved = measure(kind, &f1, &f2, &f3, Some(&combination))?;
    let certificate = DecompositionCertificate {
        kind,
        thresholds,
        f: f.clone(),
        f_a: f1.clone(),
        f_b: f2.clone(),
        f_c: f3.clone(),
        bounds,
        achieved,
        atoms: Some(combination.clone()),
    };
    certificate
        .verify()
        .map_err(|e| failure(iterations, format!("final certificate rejected: {e}")))?;
    Ok(DualDecomposition {
        combination,
        f1,
        f2,
        f3,
        certificate,
        residual_norms: history,
    })
}
