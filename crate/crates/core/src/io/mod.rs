//! Text formats: JSON spec files, deterministic JSON reports and CSV grid data.
//!
//! Floats in JSON are written with 17 significant digits so that output is byte-stable and reads
//! back to the same `f64`.

mod schema;

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::function::{FunctionSpec, GridFunction, SequenceSpec};
use crate::measure::{LineMeasure, TorusMeasure};

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column) = if e.line() == 0 { closing_position(text) } else { (e.line(), e.column()) };
        Error::Parse {
            message: strip_position(&e.to_string()),
            line,
            column,
        }
    })
}

// Conversion errors on the outermost value come back without a position; point at its end.
fn closing_position(text: &str) -> (usize, usize) {
    let body = text.trim_end();
    let line = body.matches('\n').count() + 1;
    let column = body.rsplit('\n').next().map_or(0, |l| l.chars().count());
    (line, column)
}

// serde_json appends " at line L column C"; the position lives in dedicated fields instead.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn parse_function_spec(text: &str) -> Result<FunctionSpec> {
    parse::<schema::FunctionWire>(text).map(|w| w.0)
}

pub fn parse_sequence_spec(text: &str) -> Result<SequenceSpec> {
    parse::<schema::SequenceWire>(text).map(|w| w.0)
}

pub fn parse_measure_spec(text: &str) -> Result<TorusMeasure> {
    parse::<schema::TorusWire>(text).map(|w| w.0)
}

pub fn parse_line_measure(text: &str) -> Result<LineMeasure> {
    parse::<schema::LineWire>(text).map(|w| w.0)
}

pub fn function_to_value(f: &FunctionSpec) -> Value {
    schema::function_value(f)
}

pub fn sequence_to_value(s: &SequenceSpec) -> Value {
    schema::sequence_value(s)
}

pub fn measure_to_value(m: &TorusMeasure) -> Value {
    schema::torus_value(m)
}

pub fn line_measure_to_value(m: &LineMeasure) -> Value {
    schema::line_value(m)
}

pub fn function_to_json(f: &FunctionSpec) -> String {
    to_json_string(&function_to_value(f))
}

pub fn sequence_to_json(s: &SequenceSpec) -> String {
    to_json_string(&sequence_to_value(s))
}

pub fn measure_to_json(m: &TorusMeasure) -> String {
    to_json_string(&measure_to_value(m))
}

pub fn line_measure_to_json(m: &LineMeasure) -> String {
    to_json_string(&line_measure_to_value(m))
}

/// Any serializable report; non-finite floats become `null`.
pub fn report_to_json<T: Serialize>(report: &T) -> Result<String> {
    let v = serde_json::to_value(report).map_err(|e| Error::Structural(e.to_string()))?;
    Ok(to_json_string(&v))
}

/// `{:.16e}`: 17 significant digits, always valid JSON.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // keep −0 and +0 apart on the way back in
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{x:.16e}")
}

/// Pretty-printed JSON with two-space indent, sorted keys and fixed float formatting.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escapes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Flat numeric arrays stay on one line.
            if items.iter().all(|i| i.is_number() || i.is_null()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, i, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, i, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, val)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(key).expect("string escapes"));
                out.push_str(": ");
                write_value(out, val, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// `# tail_bound=<v>` then `xi,re,im` rows, shortest round-trip decimals.
pub fn grid_to_csv(g: &GridFunction) -> String {
    samples_to_csv(g.tail_bound, g.iter())
}

/// Samples `(ξ, value)` with the same layout as `grid_to_csv`.
pub fn samples_to_csv(tail_bound: Option<f64>, rows: impl IntoIterator<Item = (f64, num_complex::Complex64)>) -> String {
    let mut out = String::new();
    match tail_bound {
        Some(t) => {
            let _ = writeln!(out, "# tail_bound={t:?}");
        }
        None => out.push_str("# tail_bound=none\n"),
    }
    out.push_str("xi,re,im\n");
    for (x, v) in rows {
        let _ = writeln!(out, "{x:?},{:?},{:?}", v.re, v.im);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ClosedForm, DecayBound, DecayRule, Expr};
    use num_complex::Complex64;

    #[test]
    fn triangle_example() {
        let f = parse_function_spec(r#"{"kind":"triangle","params":[0,1]}"#).unwrap();
        assert_eq!(f, FunctionSpec::from(Expr::triangle(0.0, 1.0)));
    }

    #[test]
    fn dirac_example() {
        let m = parse_measure_spec(r#"{"atoms":[[0.0,1.0,0.0]],"density":null}"#).unwrap();
        assert_eq!(m, TorusMeasure::dirac(0.0).unwrap());
    }

    #[test]
    fn delta_sequence_example() {
        let s = parse_sequence_spec(r#"{"entries":{"0":[1,0]},"support_radius":0}"#).unwrap();
        assert_eq!(s, SequenceSpec::delta());
    }

    #[test]
    fn diagnostics_carry_position() {
        let text = "{\n  \"kind\": \"triangle\",\n  \"params\": [0, -1]\n}";
        match parse_function_spec(text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("halfwidth"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let nested = "{\"kind\":\"sum\",\"children\":[\n{\"kind\":\"blob\"}]}";
        match parse_function_spec(nested) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("blob"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_function_spec("{\"kind\": "), Err(Error::Parse { .. })));
        assert!(parse_sequence_spec(r#"{"entries":{"x":[1,0]}}"#).is_err());
        assert!(parse_sequence_spec(r#"{"entries":{"3":[1,0]},"support_radius":1}"#).is_err());
        assert!(parse_measure_spec(r#"{"atoms":[[1.5,1,0]]}"#).is_err());
    }

    #[test]
    fn round_trips() {
        let f = FunctionSpec::new(Expr::Sum(vec![
            Expr::gaussian(0.7).translate(0.3),
            Expr::Scale {
                factor: Complex64::new(0.1, -2.0),
                child: Box::new(Expr::poly_piece(vec![1.0, -0.5, 0.25], 0.0, 1.0)),
            },
        ]))
        .unwrap()
        .with_decay_bound(DecayBound { c: 10.0, k: 2.0 })
        .unwrap();
        assert_eq!(parse_function_spec(&function_to_json(&f)).unwrap(), f);

        let cf = ClosedForm {
            rule: DecayRule::AtomSum {
                atoms: vec![(0.25, Complex64::new(0.5, 0.1))],
            },
            scale: Complex64::new(2.0, 0.0),
            phase: 0.125,
            abel: 0.9,
        };
        let s = SequenceSpec::closed_with_corrections(cf, [(3, Complex64::new(0.0, 1.0))].into()).unwrap();
        assert_eq!(parse_sequence_spec(&sequence_to_json(&s)).unwrap(), s);

        let m = TorusMeasure::new(
            vec![crate::measure::TorusAtom {
                x: 1.0 / 3.0,
                weight: Complex64::new(0.2, 0.0),
            }],
            Some(FunctionSpec::from(Expr::constant(1.0))),
        )
        .unwrap();
        assert_eq!(parse_measure_spec(&measure_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-0.0), "-0.0");
        let v = serde_json::json!({"b": [1.0, 2], "a": null});
        assert_eq!(to_json_string(&v), "{\n  \"a\": null,\n  \"b\": [1.0000000000000000e0, 2]\n}\n");
    }

    #[test]
    fn csv_layout() {
        let g = GridFunction {
            origin: -0.5,
            step: 0.5,
            values: vec![Complex64::new(1.0, 0.0), Complex64::new(0.25, -1.0)],
            tail_bound: Some(0.0),
        };
        assert_eq!(grid_to_csv(&g), "# tail_bound=0.0\nxi,re,im\n-0.5,1.0,0.0\n0.0,0.25,-1.0\n");
    }
}
