//! JSON report assembly and the flat text rendering.
//!
//! `serde_json::Map` keeps keys sorted, so equal reports serialize to equal
//! bytes.

use num::rational::BigRational;
use num::bigint::BigInt;
use serde_json::{json, Map, Value};

use okv_core::degeneration::{FlatnessReport, Relation};
use okv_core::polytope::Halfspace;
use okv_core::{GradedPoint, RationalPolytope, ValuationVector};

use crate::job::JobSpec;

pub const TOOL_NAME: &str = "okv";

pub fn rational(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn integer(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

pub fn valuation(u: &ValuationVector) -> Value {
    json!(u.0)
}

pub fn graded_point(p: &GradedPoint) -> Value {
    json!(p.to_tuple())
}

fn halfspace(h: &Halfspace) -> Value {
    json!({
        "normal": h.normal.iter().map(rational).collect::<Vec<_>>(),
        "offset": rational(&h.offset),
    })
}

pub fn polytope(p: &RationalPolytope) -> Value {
    json!({
        "ambient_dim": p.ambient_dim(),
        "affine_dim": p.affine_dim(),
        "vertices": p
            .vertices()
            .iter()
            .map(|v| v.iter().map(rational).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "facets": p.facets().iter().map(halfspace).collect::<Vec<_>>(),
        "equations": p.equations().iter().map(halfspace).collect::<Vec<_>>(),
        "normalized_volume": p.normalized_volume().as_ref().map(rational),
    })
}

pub fn relation(r: &Relation) -> Value {
    json!({
        "relation": r.g.to_string(),
        "degree": graded_point(&r.degree),
        "initial_form": r.initial.to_string(),
        "weight": r.weight.as_ref().map(integer),
        "family": r.rees.as_ref().map(|p| p.to_string()),
    })
}

pub fn flatness(f: &FlatnessReport) -> Value {
    let rows: Vec<Value> = f
        .rows
        .iter()
        .map(|r| {
            json!({
                "degree": r.degree,
                "quotient_dim": r.quotient_dim,
                "initial_quotient_dim": r.initial_quotient_dim,
                "semigroup_count": r.semigroup_count,
                "toric_count": r.toric_count,
            })
        })
        .collect();
    json!({
        "checked_degree": f.max_degree,
        "rows": rows,
        "binomial_initial": f.binomial_initial,
        "verdict": f.verdict,
        "first_mismatch": f.first_mismatch().map(|(m, lo, hi)| json!({
            "degree": m,
            "smaller": lo,
            "larger": hi,
        })),
    })
}

/// Wraps a payload with the tool identity, job echo and caveats.
pub fn envelope(command: &str, job: &JobSpec, result: Value, caveats: Vec<String>) -> Value {
    let mut map = Map::new();
    map.insert(
        "tool".into(),
        json!({"name": TOOL_NAME, "version": env!("CARGO_PKG_VERSION")}),
    );
    map.insert("command".into(), Value::String(command.into()));
    map.insert("job".into(), serde_json::to_value(job).expect("job spec serializes"));
    map.insert("result".into(), result);
    map.insert("caveats".into(), json!(caveats));
    Value::Object(map)
}

pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// One `path = value` line per leaf.
pub fn to_text(v: &Value) -> String {
    fn walk(path: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) if !map.is_empty() => {
                for (k, x) in map {
                    let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(items) if !items.is_empty() => {
                for (i, x) in items.iter().enumerate() {
                    walk(&format!("{path}[{i}]"), x, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
            other => out.push_str(&format!("{path} = {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
