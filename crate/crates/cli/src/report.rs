use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL: &str = "szlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: String,
    pub config: Value,
    pub timing: Timing,
    pub payload: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number,
    Text,
    Bool,
    Array,
    Object,
    /// `[re, im]`.
    Complex,
    /// Any JSON value, including null.
    Any,
}

use Kind::*;

fn required(command: &str) -> Option<&'static [(&'static str, Kind)]> {
    Some(match command {
        "norm" => &[
            ("N", Number),
            ("s", Number),
            ("value", Number),
            ("path", Text),
        ],
        "u3" => &[
            ("N", Number),
            ("value", Number),
            ("alpha", Number),
            ("beta", Number),
        ],
        "count" => &[
            ("N", Number),
            ("P", Text),
            ("Q", Text),
            ("lambda", Complex),
            ("lambda1", Complex),
            ("gap", Number),
            ("seconds_lambda", Number),
            ("seconds_lambda1", Number),
        ],
        "count-st" => &[
            ("N", Number),
            ("polys", Array),
            ("s", Number),
            ("t", Number),
            ("lambda_st", Complex),
            ("lambda1_st", Complex),
            ("gap", Number),
        ],
        "gap" | "extremal" => &[("rows", Array)],
        "three-term" => &[
            ("N", Number),
            ("value", Complex),
            ("product_of_means", Complex),
            ("gap", Number),
        ],
        "dual" => &[
            ("N", Number),
            ("which", Text),
            ("values", Array),
            ("sup_norm", Number),
            ("l2_norm", Number),
        ],
        "decompose" => &[
            ("N", Number),
            ("norm_kind", Object),
            ("thresholds", Object),
            ("bounds", Object),
            ("achieved", Object),
            ("f_a", Array),
            ("f_b", Array),
            ("f_c", Array),
            ("verified", Bool),
            ("residual_norms", Any),
        ],
        "fejer" => &[
            ("d", Number),
            ("m", Number),
            ("lipschitz", Number),
            ("eps", Number),
            ("plan", Object),
            ("coefficients", Array),
            ("offset_grid_error", Number),
        ],
        "scan-phase" => &[("N", Number), ("hits", Array)],
        "pet" => &[
            ("input", Array),
            ("complete", Bool),
            ("trace", Object),
            ("stopped", Any),
        ],
        "verify" => &[
            ("suite", Text),
            ("trials", Number),
            ("checks", Array),
            ("passed", Bool),
        ],
        _ => return None,
    })
}

fn matches(kind: Kind, v: &Value) -> bool {
    match kind {
        Number => v.is_number(),
        Text => v.is_string(),
        Bool => v.is_boolean(),
        Array => v.is_array(),
        Object => v.is_object(),
        Complex => v
            .as_array()
            .is_some_and(|a| a.len() == 2 && a.iter().all(Value::is_number)),
        Any => true,
    }
}

/// Check a payload against the versioned schema of `command`.
pub fn validate_payload(command: &str, payload: &Value) -> Result<(), String> {
    let fields = required(command).ok_or_else(|| format!("no schema for command `{command}`"))?;
    let obj: &Map<String, Value> = payload.as_object().ok_or("payload is not an object")?;
    for (key, kind) in fields {
        match obj.get(*key) {
            None => return Err(format!("payload misses `{key}`")),
            Some(v) if !matches(*kind, v) => {
                return Err(format!("`{key}` should be {kind:?}, got {v}"))
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn schema_id(command: &str) -> String {
    format!("{TOOL}.{command}.v1")
}
