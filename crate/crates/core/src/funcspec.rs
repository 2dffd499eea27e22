//! Function-spec mini-language.
//!
//! ```text
//! const:<c>
//! char:xi=<k>
//! quad:alpha=<a>,beta=<b>
//! indicator:<r1>,<r2>,...
//! indicator-file:<path>        JSON array of residues
//! random:pm1[,seed=<s>]
//! random:unit[,seed=<s>]
//! ```
//!
//! `char:xi=k` is `x -> e_N(k x)`. A seed inside the spec overrides the
//! seed argument of [`make_function`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Modulus;
use crate::error::{LabError, Result};
use crate::function::CyclicFunction;

fn parse_error(token: &str, position: usize, message: &str) -> LabError {
    LabError::Parse {
        token: token.to_string(),
        position,
        message: message.to_string(),
    }
}

/// One `key=value` or bare item together with its byte offset in the spec.
struct Item<'a> {
    text: &'a str,
    position: usize,
}

fn split_items(body: &str, offset: usize) -> Vec<Item<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        if ch == ',' {
            out.push(Item {
                text: &body[start..i],
                position: offset + start,
            });
            start = i + 1;
        }
    }
    out.push(Item {
        text: &body[start..],
        position: offset + start,
    });
    out
}

fn parse_int(item: &Item<'_>, text: &str, position: usize) -> Result<i64> {
    text.trim()
        .parse::<i64>()
        .map_err(|_| parse_error(item.text, position, "expected an integer"))
}

fn keyed(items: &[Item<'_>], allowed: &[&str]) -> Result<Vec<(String, i64)>> {
    let mut out: Vec<(String, i64)> = Vec::new();
    for item in items {
        let Some((key, value)) = item.text.split_once('=') else {
            return Err(parse_error(item.text, item.position, "expected key=value"));
        };
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(parse_error(key, item.position, "unknown parameter"));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(parse_error(key, item.position, "duplicate parameter"));
        }
        let value = parse_int(item, value, item.position + key.len() + 1)?;
        out.push((key.to_string(), value));
    }
    Ok(out)
}

fn lookup(params: &[(String, i64)], key: &str) -> Option<i64> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
}

/// Build a function from a spec string. Deterministic in `(spec, N, seed)`.
pub fn make_function(spec: &str, modulus: &Modulus, seed: u64) -> Result<CyclicFunction> {
    let Some((kind, body)) = spec.split_once(':') else {
        return Err(parse_error(spec, 0, "expected <kind>:<arguments>"));
    };
    let offset = kind.len() + 1;
    let n = modulus.get();
    match kind.trim() {
        "const" => {
            let c: f64 = body
                .trim()
                .parse()
                .map_err(|_| parse_error(body, offset, "expected a real constant"))?;
            let f = CyclicFunction::constant(modulus, Complex64::new(c, 0.0));
            Ok(if c.abs() <= 1.0 {
                f.assert_one_bounded()?
            } else {
                f
            })
        }
        "char" => {
            let params = keyed(&split_items(body, offset), &["xi"])?;
            let xi =
                lookup(&params, "xi").ok_or_else(|| parse_error(body, offset, "missing xi"))?;
            Ok(CyclicFunction::character(modulus, xi))
        }
        "quad" => {
            let params = keyed(&split_items(body, offset), &["alpha", "beta"])?;
            let alpha = modulus.reduce(lookup(&params, "alpha").unwrap_or(0));
            let beta = modulus.reduce(lookup(&params, "beta").unwrap_or(0));
            let f = CyclicFunction::from_fn(modulus, |x| {
                let x = x as u128;
                let e = (alpha as u128 * ((x * x) % n as u128) + beta as u128 * x) % n as u128;
                modulus.root(e as usize)
            });
            f.assert_one_bounded()
        }
        "indicator" => {
            let mut members = Vec::new();
            if !body.trim().is_empty() {
                for item in split_items(body, offset) {
                    let v = parse_int(&item, item.text, item.position)?;
                    members.push(modulus.reduce(v));
                }
            }
            Ok(CyclicFunction::indicator(modulus, members))
        }
        "indicator-file" => {
            let path = body.trim();
            let text =
                std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{path}: {e}")))?;
            let values: Vec<i64> = serde_json::from_str(&text)
                .map_err(|e| parse_error(path, offset, &format!("residue array: {e}")))?;
            Ok(CyclicFunction::indicator(
                modulus,
                values.into_iter().map(|v| modulus.reduce(v)),
            ))
        }
        "random" => {
            let items = split_items(body, offset);
            let flavour = &items[0];
            let params = keyed(&items[1..], &["seed"])?;
            let seed = lookup(&params, "seed").map(|s| s as u64).unwrap_or(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = match flavour.text.trim() {
                "pm1" => CyclicFunction::from_fn(modulus, |_| {
                    Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
                }),
                "unit" => CyclicFunction::from_fn(modulus, |_| {
                    Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
                }),
                other => return Err(parse_error(other, flavour.position, "expected pm1 or unit")),
            };
            f.assert_one_bounded()
        }
        other => Err(parse_error(other, 0, "unknown function kind")),
    }
}
