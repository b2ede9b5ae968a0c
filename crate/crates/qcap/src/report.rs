//! Deterministic report values: sorted keys and floats rounded to 12
//! significant digits.

use qcap_core::channels::DensityOperator;
use qcap_core::numerics::CMatrix;
use qcap_core::C64;
use serde_json::{Map, Value};

/// `x` rounded to 12 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(
            if x.is_nan() {
                "nan"
            } else if x > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .to_owned(),
        );
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // -0 and 0 must serialize identically
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().copied().map(complex).collect())
}

pub fn real_vector(v: &[f64]) -> Value {
    Value::Array(v.iter().copied().map(num).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(&m.as_slice()[i * m.cols()..(i + 1) * m.cols()])).collect())
}

pub fn state(rho: &DensityOperator) -> Value {
    matrix(rho.matrix())
}

/// Object builder over a sorted map.
#[derive(Default)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Obj(Map::new())
    }

    pub fn set(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.to_owned(), v.into());
        self
    }

    pub fn num(self, key: &str, x: f64) -> Self {
        self.set(key, num(x))
    }

    pub fn build(self) -> Value {
        Value::Object(self.0)
    }
}

/// Pretty JSON with a trailing newline. Keys are sorted because
/// `serde_json::Map` is ordered by key.
pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Indented `key: value` listing for terminals.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_text(v, 0, &mut out);
    out
}

fn write_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_leaf(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    write_text(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_leaf(x) {
                    out.push_str(&format!("{pad}- {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    write_text(x, indent + 1, out);
                }
            }
        }
        leaf => out.push_str(&format!("{pad}{}\n", inline(leaf))),
    }
}

/// Scalars and arrays without objects print on one line.
fn is_leaf(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.is_empty(),
        Value::Array(a) => a.iter().all(|x| !x.is_object()),
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
