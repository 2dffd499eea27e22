//! Integer polynomials in `y` with zero constant term.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Modulus;
use crate::error::{LabError, Result};

/// `P(y) = c_1 y + c_2 y^2 + ... + c_d y^d`, stored constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntPolynomial {
    coefficients: Vec<i64>,
}

impl IntPolynomial {
    /// Build from coefficients, constant term first. Trailing zeros are
    /// trimmed; the constant term must vanish and the degree must be at least 1.
    pub fn new(mut coefficients: Vec<i64>) -> Result<Self> {
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0 {
            coefficients.pop();
        }
        if coefficients.first().copied().unwrap_or(0) != 0 {
            return Err(LabError::InvalidPolynomial(
                "constant term must be zero".into(),
            ));
        }
        if coefficients.len() < 2 {
            return Err(LabError::InvalidPolynomial(
                "degree must be at least 1".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    /// The monomial `c * y^d`.
    pub fn monomial(c: i64, d: usize) -> Result<Self> {
        let mut v = vec![0; d + 1];
        v[d] = c;
        Self::new(v)
    }

    pub fn identity() -> Self {
        Self {
            coefficients: vec![0, 1],
        }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `P(y) mod N` in `[0, N)` by Horner's rule in 128-bit arithmetic.
    pub fn eval_mod(&self, y: u64, n: u64) -> u64 {
        let n = n as i128;
        let y = (y as i128).rem_euclid(n);
        let mut acc: i128 = 0;
        for &c in self.coefficients.iter().rev() {
            acc = (acc * y + c as i128).rem_euclid(n);
        }
        acc as u64
    }

    /// `P(y) mod N` for every `y` in `0..N`.
    pub fn table(&self, m: &Modulus) -> Vec<usize> {
        let n = m.get();
        (0..n).map(|y| self.eval_mod(y, n) as usize).collect()
    }

    /// Sum of two polynomials; `None` if the sum is identically zero.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let len = self.coefficients.len().max(other.coefficients.len());
        let v = (0..len)
            .map(|i| {
                self.coefficients.get(i).copied().unwrap_or(0)
                    + other.coefficients.get(i).copied().unwrap_or(0)
            })
            .collect();
        Self::new(v).ok()
    }

    /// Parse the mini-grammar: integer-coefficient expressions in `y` such as
    /// `y`, `y^2`, `3*y^2-2*y`. Constant terms are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        PolyParser::new(text).parse()
    }
}

impl TryFrom<Vec<i64>> for IntPolynomial {
    type Error = LabError;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IntPolynomial> for Vec<i64> {
    fn from(p: IntPolynomial) -> Self {
        p.coefficients
    }
}

impl std::str::FromStr for IntPolynomial {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let abs = c.unsigned_abs();
            let body = match (abs, d) {
                (1, 1) => "y".to_string(),
                (1, _) => format!("y^{d}"),
                (_, 1) => format!("{abs}*y"),
                _ => format!("{abs}*y^{d}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PolyParser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, start: usize, message: &str) -> LabError {
        let end = (start + 1).min(self.text.len()).max(start);
        let token = if start >= self.text.len() {
            "<end>".to_string()
        } else {
            self.text[start..end].to_string()
        };
        LabError::Parse {
            token,
            position: start,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.text[start..self.pos].parse().ok())?
    }

    fn parse(mut self) -> Result<IntPolynomial> {
        let mut coeffs: Vec<i64> = vec![0];
        let mut first = true;
        loop {
            self.skip_ws();
            if self.pos >= self.bytes.len() {
                if first {
                    return Err(self.error(self.pos, "empty polynomial"));
                }
                break;
            }
            let term_start = self.pos;
            let mut sign = 1i64;
            match self.bytes[self.pos] {
                b'+' => self.pos += 1,
                b'-' => {
                    sign = -1;
                    self.pos += 1
                }
                _ if !first => return Err(self.error(self.pos, "expected `+` or `-`")),
                _ => {}
            }
            self.skip_ws();
            let num_start = self.pos;
            let coef = self.number();
            if coef.is_none() && self.pos != num_start {
                return Err(self.error(num_start, "coefficient overflows i64"));
            }
            self.skip_ws();
            if coef.is_some() && self.pos < self.bytes.len() && self.bytes[self.pos] == b'*' {
                self.pos += 1;
                self.skip_ws();
            }
            let has_y = self.pos < self.bytes.len() && self.bytes[self.pos] == b'y';
            let degree = if has_y {
                self.pos += 1;
                self.skip_ws();
                if self.pos < self.bytes.len() && self.bytes[self.pos] == b'^' {
                    self.pos += 1;
                    self.skip_ws();
                    let exp_start = self.pos;
                    match self.number() {
                        Some(e) if (1..=64).contains(&e) => e as usize,
                        _ => return Err(self.error(exp_start, "expected exponent in 1..=64")),
                    }
                } else {
                    1
                }
            } else {
                match coef {
                    Some(_) => return Err(self.error(term_start, "constant terms are not allowed")),
                    None => return Err(self.error(self.pos, "expected a term in y")),
                }
            };
            let value = sign * coef.unwrap_or(1);
            if coeffs.len() <= degree {
                coeffs.resize(degree + 1, 0);
            }
            coeffs[degree] = coeffs[degree]
                .checked_add(value)
                .ok_or_else(|| self.error(term_start, "coefficient overflow"))?;
            first = false;
        }
        IntPolynomial::new(coeffs)
    }
}

/// Rank over the rationals of the coefficient matrix of `polys`
/// (fraction-free Gaussian elimination).
pub fn rational_rank(polys: &[IntPolynomial]) -> usize {
    let cols = polys
        .iter()
        .map(|p| p.coefficients().len())
        .max()
        .unwrap_or(0);
    let mut rows: Vec<Vec<i128>> = polys
        .iter()
        .map(|p| {
            let mut r: Vec<i128> = p.coefficients().iter().map(|&c| c as i128).collect();
            r.resize(cols, 0);
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let a = rows[rank][col];
                let b = rows[r][col];
                let g = gcd(a, b);
                let pivot_row = rows[rank].clone();
                for (v, q) in rows[r].iter_mut().zip(&pivot_row) {
                    *v = *v * (a / g) - q * (b / g);
                }
                let row_gcd = rows[r].iter().fold(0, |acc, &v| gcd(acc, v));
                if row_gcd > 1 {
                    rows[r].iter_mut().for_each(|v| *v /= row_gcd);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
