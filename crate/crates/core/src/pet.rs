//! PET induction bookkeeping.
//!
//! The engine runs on the cube system `{omega . P : omega != 0}` generated
//! by the input polynomials (for `(P, Q)` this is `{P, Q, P + Q}`, the
//! non-trivial terms of the four-point pattern). One van der Corput step
//! against a pivot `q` replaces the system by
//! `{p(y + h) - q(y), p(y) - q(y)}` with `h` a fresh shift variable, after
//! dropping `y`-free terms and identifying forms that differ by a
//! `y`-constant.
//!
//! The pivot is a form of minimal degree, taken from the leading-coefficient
//! class of largest multiplicity at that degree; remaining ties go to the
//! smallest leading coefficient and then the smallest form. With this rule
//! the weight vector (distinct leading-coefficient classes per degree,
//! highest degree first) drops lexicographically at every step.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::poly::{rational_rank, IntPolynomial};

pub const MAX_DEGREE: usize = 8;
pub const MAX_FORMS: usize = 4096;
pub const MAX_STEPS: usize = 64;

/// Polynomial in the shift variables `h_1, h_2, ...`,
/// keyed by exponent vectors without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ShiftPoly(BTreeMap<Vec<u32>, i128>);

fn overflow() -> LabError {
    LabError::PetCapExceeded {
        reason: "coefficient overflow".into(),
        partial: None,
    }
}

impl ShiftPoly {
    pub fn constant(c: i128) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(Vec::new(), c);
        }
        Self(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: i128) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let slot = self.0.entry(exps.clone()).or_insert(0);
        *slot = slot.checked_add(c).ok_or_else(overflow)?;
        if *slot == 0 {
            self.0.remove(&exps);
        }
        Ok(())
    }

    fn axpy(&mut self, other: &Self, scale: i128) -> Result<()> {
        for (e, &c) in &other.0 {
            self.add_term(e.clone(), c.checked_mul(scale).ok_or_else(overflow)?)?;
        }
        Ok(())
    }

    /// `self * c * h_var^power` with `var` zero-based.
    fn times_monomial(&self, var: usize, power: u32, c: i128) -> Result<Self> {
        let mut out = Self::default();
        for (e, &v) in &self.0 {
            let mut e = e.clone();
            if power > 0 {
                if e.len() <= var {
                    e.resize(var + 1, 0);
                }
                e[var] += power;
            }
            out.add_term(e, v.checked_mul(c).ok_or_else(overflow)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for ShiftPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then reverse lexicographic exponents.
        let mut terms: Vec<(&Vec<u32>, &i128)> = self.0.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (i, (e, &c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(v, &p)| {
                    if p == 1 {
                        format!("h{}", v + 1)
                    } else {
                        format!("h{}^{p}", v + 1)
                    }
                })
                .collect();
            let sign = if c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let abs = c.unsigned_abs();
            if mono.is_empty() {
                write!(f, "{sign}{abs}")?;
            } else if abs == 1 {
                write!(f, "{sign}{}", mono.join("*"))?;
            } else {
                write!(f, "{sign}{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A polynomial in `y` with shift-polynomial coefficients and no
/// `y`-constant term; `coefficients[d]` multiplies `y^d`, index 0 unused.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    coefficients: Vec<ShiftPoly>,
}

impl Form {
    fn normalized(mut coefficients: Vec<ShiftPoly>) -> Option<Self> {
        if coefficients.is_empty() {
            return None;
        }
        coefficients[0] = ShiftPoly::default();
        while coefficients.len() > 1 && coefficients.last().unwrap().is_zero() {
            coefficients.pop();
        }
        (coefficients.len() > 1).then_some(Self { coefficients })
    }

    fn from_int(p: &IntPolynomial) -> Self {
        Self::normalized(
            p.coefficients()
                .iter()
                .map(|&c| ShiftPoly::constant(c as i128))
                .collect(),
        )
        .expect("degree at least one")
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> &ShiftPoly {
        self.coefficients.last().unwrap()
    }

    /// `self(y + h_var)`.
    fn shifted(&self, var: usize) -> Result<Vec<ShiftPoly>> {
        let d = self.degree();
        let mut out = vec![ShiftPoly::default(); d + 1];
        for (deg, c) in self.coefficients.iter().enumerate().skip(1) {
            let mut binom: i128 = 1;
            for j in (0..=deg).rev() {
                // term c * binom(deg, j) y^j h^{deg - j}
                let t = c.times_monomial(var, (deg - j) as u32, binom)?;
                out[j].axpy(&t, 1)?;
                binom = binom * j as i128 / (deg - j + 1) as i128;
            }
        }
        Ok(out)
    }

    fn minus(mut lhs: Vec<ShiftPoly>, q: &Form) -> Result<Option<Form>> {
        if lhs.len() < q.coefficients.len() {
            lhs.resize(q.coefficients.len(), ShiftPoly::default());
        }
        for (slot, c) in lhs.iter_mut().zip(&q.coefficients) {
            slot.axpy(c, -1)?;
        }
        Ok(Form::normalized(lhs))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let y = if d == 1 {
                "y".to_string()
            } else {
                format!("y^{d}")
            };
            write!(f, "({c})*{y}")?;
        }
        Ok(())
    }
}

/// The system during induction: each form with the shift variables
/// that have been substituted into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFormSystem {
    forms: BTreeMap<Form, BTreeSet<usize>>,
    top_degree: usize,
}

impl PolyFormSystem {
    fn from_generators(polys: &[IntPolynomial]) -> Self {
        let mut forms = BTreeMap::new();
        for mask in 1u32..(1 << polys.len()) {
            let mut sum = vec![ShiftPoly::default()];
            for (i, p) in polys.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let f = Form::from_int(p);
                    if sum.len() < f.coefficients.len() {
                        sum.resize(f.coefficients.len(), ShiftPoly::default());
                    }
                    for (s, c) in sum.iter_mut().zip(&f.coefficients) {
                        s.axpy(c, 1).expect("small input coefficients");
                    }
                }
            }
            if let Some(f) = Form::normalized(sum) {
                forms.entry(f).or_insert_with(BTreeSet::new);
            }
        }
        let top_degree = forms.keys().map(Form::degree).max().unwrap_or(1);
        Self { forms, top_degree }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = (&Form, &BTreeSet<usize>)> {
        self.forms.iter()
    }

    fn classes(&self) -> BTreeMap<usize, BTreeMap<&ShiftPoly, Vec<&Form>>> {
        let mut out: BTreeMap<usize, BTreeMap<&ShiftPoly, Vec<&Form>>> = BTreeMap::new();
        for f in self.forms.keys() {
            out.entry(f.degree())
                .or_default()
                .entry(f.leading())
                .or_default()
                .push(f);
        }
        out
    }

    /// Distinct leading-coefficient classes per degree, highest degree first.
    pub fn weight(&self) -> Vec<usize> {
        let classes = self.classes();
        (1..=self.top_degree)
            .rev()
            .map(|d| classes.get(&d).map_or(0, |c| c.len()))
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.forms.keys().map(Form::degree).max().unwrap_or(0)
    }

    fn pivot(&self) -> Option<Form> {
        let classes = self.classes();
        let (_, at_min) = classes.iter().next()?;
        let (_, members) = at_min
            .iter()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))?;
        members.iter().min().map(|f| (*f).clone())
    }

    fn step(&self, pivot: &Form, var: usize) -> Result<Self> {
        let mut forms: BTreeMap<Form, BTreeSet<usize>> = BTreeMap::new();
        for (p, tag) in &self.forms {
            let mut shifted_tag = tag.clone();
            shifted_tag.insert(var);
            for (lhs, t) in [
                (p.shifted(var)?, shifted_tag),
                (p.coefficients.clone(), tag.clone()),
            ] {
                if let Some(f) = Form::minus(lhs, pivot)? {
                    match forms.get_mut(&f) {
                        Some(existing) if *existing <= t => {}
                        Some(existing) => *existing = t,
                        None => {
                            forms.insert(f, t);
                        }
                    }
                }
            }
        }
        Ok(Self {
            forms,
            top_degree: self.top_degree,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetStep {
    pub pivot: String,
    pub weight_before: Vec<usize>,
    pub weight_after: Vec<usize>,
    pub forms_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetTrace {
    pub input: Vec<String>,
    pub initial_forms: Vec<String>,
    pub steps: Vec<PetStep>,
    pub cs_count: usize,
    /// Distinct slope classes of the final linear system.
    pub linear_classes: usize,
    /// `cs_count + linear_classes`; zero while the trace is incomplete.
    pub final_degree: usize,
    pub complete: bool,
}

impl PetTrace {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", self.input.join(", "));
        let _ = writeln!(out, "initial forms ({}):", self.initial_forms.len());
        for f in &self.initial_forms {
            let _ = writeln!(out, "  {f}");
        }
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "step {}: pivot {} | weight {:?} -> {:?} | {} forms",
                i + 1,
                s.pivot,
                s.weight_before,
                s.weight_after,
                s.forms_after
            );
        }
        if self.complete {
            let _ = writeln!(
                out,
                "linear classes: {}\ncauchy-schwarz steps: {}\nfinal degree: {}",
                self.linear_classes, self.cs_count, self.final_degree
            );
        } else {
            let _ = writeln!(out, "incomplete after {} steps", self.cs_count);
        }
        out
    }
}

/// Run PET induction on the cube system of `polys`.
pub fn pet_trace(polys: &[IntPolynomial]) -> Result<PetTrace> {
    if polys.is_empty() || polys.len() > 4 {
        return Err(LabError::InvalidFamily(format!(
            "{} polynomials, expected 1..=4",
            polys.len()
        )));
    }
    if polys.iter().any(|p| p.degree() > MAX_DEGREE) {
        return Err(LabError::InvalidFamily(format!(
            "degree above {MAX_DEGREE}"
        )));
    }
    if rational_rank(polys) != polys.len() {
        return Err(LabError::InvalidFamily(
            "polynomials are linearly dependent over Q".into(),
        ));
    }
    let mut system = PolyFormSystem::from_generators(polys);
    let mut trace = PetTrace {
        input: polys.iter().map(|p| p.to_string()).collect(),
        initial_forms: system.forms.keys().map(|f| f.to_string()).collect(),
        steps: Vec::new(),
        cs_count: 0,
        linear_classes: 0,
        final_degree: 0,
        complete: false,
    };
    let cap = |trace: &PetTrace, reason: String| LabError::PetCapExceeded {
        reason,
        partial: Some(Box::new(trace.clone())),
    };
    while system.max_degree() > 1 {
        if trace.steps.len() >= MAX_STEPS {
            return Err(cap(&trace, format!("more than {MAX_STEPS} steps")));
        }
        let pivot = system.pivot().expect("nonempty system");
        let before = system.weight();
        let next = system.step(&pivot, trace.steps.len())?;
        let after = next.weight();
        if after >= before {
            return Err(cap(
                &trace,
                format!("weight did not decrease: {before:?} -> {after:?}"),
            ));
        }
        trace.steps.push(PetStep {
            pivot: pivot.to_string(),
            weight_before: before,
            weight_after: after,
            forms_after: next.len(),
        });
        trace.cs_count += 1;
        system = next;
        if system.len() > MAX_FORMS {
            return Err(cap(
                &trace,
                format!("{} forms exceed the cap of {MAX_FORMS}", system.len()),
            ));
        }
    }
    trace.linear_classes = system.weight().last().copied().unwrap_or(0);
    trace.final_degree = trace.cs_count + trace.linear_classes;
    trace.complete = true;
    Ok(trace)
}
