use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::function::{ClosedForm, DecayBound, DecayRule, Expr, FunctionSpec, SequenceSpec};
use crate::measure::{LineAtom, LineMeasure, TorusAtom, TorusMeasure};

// Validation runs inside `try_from` so serde_json reports the position of the offending node.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    kind: String,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default)]
    children: Vec<Node>,
    #[serde(default)]
    decay_bound: Option<DecayBound>,
}

#[derive(Deserialize)]
#[serde(try_from = "RawNode")]
struct Node {
    expr: Expr,
    decay: Option<DecayBound>,
}

fn arity(kind: &str, params: &[f64], n: usize) -> Result<(), String> {
    if params.len() != n {
        return Err(format!("{kind} takes {n} params, got {}", params.len()));
    }
    Ok(())
}

fn one_child(kind: &str, mut children: Vec<Expr>) -> Result<Box<Expr>, String> {
    if children.len() != 1 {
        return Err(format!("{kind} takes exactly one child, got {}", children.len()));
    }
    Ok(Box::new(children.pop().expect("one child")))
}

impl TryFrom<RawNode> for Node {
    type Error = String;

    fn try_from(raw: RawNode) -> Result<Self, String> {
        let mut children = Vec::with_capacity(raw.children.len());
        for c in raw.children {
            if c.decay.is_some() {
                return Err("decay_bound is only allowed on the outermost node".into());
            }
            children.push(c.expr);
        }
        let kind = raw.kind.replace('-', "_");
        let p = &raw.params;
        let leaf = |n: usize| -> Result<(), String> {
            arity(&kind, p, n)?;
            if !children.is_empty() {
                return Err(format!("{kind} takes no children"));
            }
            Ok(())
        };
        let expr = match kind.as_str() {
            "indicator" => {
                leaf(2)?;
                Expr::Indicator { a: p[0], b: p[1] }
            }
            "triangle" => {
                leaf(2)?;
                Expr::Triangle {
                    center: p[0],
                    halfwidth: p[1],
                }
            }
            "gaussian" => {
                leaf(1)?;
                Expr::Gaussian { sigma: p[0] }
            }
            "raised_cosine" => {
                leaf(2)?;
                Expr::RaisedCosine { a: p[0], b: p[1] }
            }
            "poly_piece" => {
                if p.len() < 2 || !children.is_empty() {
                    return Err("poly_piece takes params [a, b, c0, c1, ...] and no children".into());
                }
                Expr::PolyPiece {
                    a: p[0],
                    b: p[1],
                    coeffs: p[2..].to_vec(),
                }
            }
            "sinc" => {
                leaf(1)?;
                Expr::Sinc { width: p[0] }
            }
            "sinc_squared" => {
                leaf(1)?;
                Expr::SincSquared { width: p[0] }
            }
            "raised_cosine_ft" => {
                leaf(1)?;
                Expr::RaisedCosineFt { halfwidth: p[0] }
            }
            "rational_decay" => {
                leaf(1)?;
                Expr::RationalDecay { exponent: p[0] }
            }
            "constant" => {
                leaf(1)?;
                Expr::Constant { value: p[0] }
            }
            "translate" => {
                arity(&kind, p, 1)?;
                Expr::Translate {
                    shift: p[0],
                    child: one_child(&kind, children)?,
                }
            }
            "modulate" => {
                arity(&kind, p, 1)?;
                Expr::Modulate {
                    freq: p[0],
                    child: one_child(&kind, children)?,
                }
            }
            "dilate" => {
                arity(&kind, p, 1)?;
                Expr::Dilate {
                    alpha: p[0],
                    child: one_child(&kind, children)?,
                }
            }
            "scale" => {
                let factor = match p.as_slice() {
                    [re] => Complex64::new(*re, 0.0),
                    [re, im] => Complex64::new(*re, *im),
                    _ => return Err(format!("scale takes [re] or [re, im], got {} params", p.len())),
                };
                Expr::Scale {
                    factor,
                    child: one_child(&kind, children)?,
                }
            }
            "sum" | "product" => {
                arity(&kind, p, 0)?;
                if kind == "sum" {
                    Expr::Sum(children)
                } else {
                    Expr::Product(children)
                }
            }
            "periodic" => {
                arity(&kind, p, 0)?;
                Expr::Periodic(one_child(&kind, children)?)
            }
            other => return Err(format!("unknown kind {other:?}")),
        };
        expr.validate().map_err(|e| e.to_string())?;
        Ok(Node {
            expr,
            decay: raw.decay_bound,
        })
    }
}

#[derive(Deserialize)]
#[serde(try_from = "Node")]
pub(super) struct FunctionWire(pub FunctionSpec);

impl TryFrom<Node> for FunctionWire {
    type Error = String;

    fn try_from(node: Node) -> Result<Self, String> {
        let f = FunctionSpec::new(node.expr).map_err(|e| e.to_string())?;
        let f = match node.decay {
            Some(d) => f.with_decay_bound(d).map_err(|e| e.to_string())?,
            None => f,
        };
        Ok(FunctionWire(f))
    }
}

pub(super) fn expr_value(e: &Expr) -> Value {
    let node = |kind: &str, params: Vec<f64>, children: Vec<Value>| {
        json!({ "kind": kind, "params": params, "children": children })
    };
    match e {
        Expr::Indicator { a, b } => node("indicator", vec![*a, *b], vec![]),
        Expr::Triangle { center, halfwidth } => node("triangle", vec![*center, *halfwidth], vec![]),
        Expr::Gaussian { sigma } => node("gaussian", vec![*sigma], vec![]),
        Expr::RaisedCosine { a, b } => node("raised_cosine", vec![*a, *b], vec![]),
        Expr::PolyPiece { coeffs, a, b } => {
            let mut p = vec![*a, *b];
            p.extend(coeffs);
            node("poly_piece", p, vec![])
        }
        Expr::Sinc { width } => node("sinc", vec![*width], vec![]),
        Expr::SincSquared { width } => node("sinc_squared", vec![*width], vec![]),
        Expr::RaisedCosineFt { halfwidth } => node("raised_cosine_ft", vec![*halfwidth], vec![]),
        Expr::RationalDecay { exponent } => node("rational_decay", vec![*exponent], vec![]),
        Expr::Constant { value } => node("constant", vec![*value], vec![]),
        Expr::Translate { shift, child } => node("translate", vec![*shift], vec![expr_value(child)]),
        Expr::Modulate { freq, child } => node("modulate", vec![*freq], vec![expr_value(child)]),
        Expr::Dilate { alpha, child } => node("dilate", vec![*alpha], vec![expr_value(child)]),
        Expr::Scale { factor, child } => node("scale", vec![factor.re, factor.im], vec![expr_value(child)]),
        Expr::Sum(cs) => node("sum", vec![], cs.iter().map(expr_value).collect()),
        Expr::Product(cs) => node("product", vec![], cs.iter().map(expr_value).collect()),
        Expr::Periodic(c) => node("periodic", vec![], vec![expr_value(c)]),
    }
}

pub(super) fn function_value(f: &FunctionSpec) -> Value {
    let mut v = expr_value(f.expr());
    if let Some(d) = f.declared_decay() {
        v["decay_bound"] = json!({ "c": d.c, "k": d.k });
    }
    v
}

fn function_or_null(f: Option<&FunctionSpec>) -> Value {
    f.map_or(Value::Null, function_value)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClosedForm {
    rule: String,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default)]
    atoms: Vec<[f64; 3]>,
    #[serde(default = "unit")]
    scale: [f64; 2],
    #[serde(default)]
    phase: f64,
    #[serde(default = "one")]
    abel: f64,
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawClosedForm> for ClosedForm {
    type Error = String;

    fn try_from(raw: RawClosedForm) -> Result<Self, String> {
        let rule_name = raw.rule.replace('-', "_");
        let p = &raw.params;
        let want = |n: usize| arity(&rule_name, p, n);
        if rule_name != "atom_sum" && !raw.atoms.is_empty() {
            return Err(format!("{rule_name} takes no atoms"));
        }
        let rule = match rule_name.as_str() {
            "constant" => want(0).map(|_| DecayRule::Constant)?,
            "alternating" => want(0).map(|_| DecayRule::Alternating)?,
            "geometric" => want(1).map(|_| DecayRule::Geometric { ratio: p[0] })?,
            "inverse_quadratic" => want(0).map(|_| DecayRule::InverseQuadratic)?,
            "power_decay" => want(1).map(|_| DecayRule::PowerDecay { exponent: p[0] })?,
            "atom_sum" => want(0).map(|_| DecayRule::AtomSum {
                atoms: raw.atoms.iter().map(|a| (a[0], Complex64::new(a[1], a[2]))).collect(),
            })?,
            other => return Err(format!("unknown decay rule {other:?}")),
        };
        Ok(ClosedForm {
            rule,
            scale: Complex64::new(raw.scale[0], raw.scale[1]),
            phase: raw.phase,
            abel: raw.abel,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    #[serde(default)]
    entries: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    support_radius: Option<u64>,
    #[serde(default)]
    closed_form: Option<RawClosedForm>,
}

#[derive(Deserialize)]
#[serde(try_from = "RawSequence")]
pub(super) struct SequenceWire(pub SequenceSpec);

impl TryFrom<RawSequence> for SequenceWire {
    type Error = String;

    fn try_from(raw: RawSequence) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (k, [re, im]) in raw.entries {
            let n: i64 = k
                .trim()
                .parse()
                .map_err(|_| format!("entry key {k:?} is not an integer"))?;
            entries.insert(n, Complex64::new(re, im));
        }
        let seq = match raw.closed_form {
            Some(cf) => {
                if raw.support_radius.is_some() {
                    return Err("support_radius must be null for a closed-form sequence".into());
                }
                SequenceSpec::closed_with_corrections(ClosedForm::try_from(cf)?, entries)
            }
            None => SequenceSpec::finite(entries, raw.support_radius),
        };
        seq.map(SequenceWire).map_err(|e| e.to_string())
    }
}

fn complex_pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub(super) fn sequence_value(s: &SequenceSpec) -> Value {
    let entries: Map<String, Value> = s
        .entries()
        .iter()
        .map(|(n, z)| (n.to_string(), complex_pair(*z)))
        .collect();
    let closed = s.closed_form().map_or(Value::Null, |cf| {
        let (rule, params, atoms): (&str, Vec<f64>, Vec<Value>) = match &cf.rule {
            DecayRule::Constant => ("constant", vec![], vec![]),
            DecayRule::Alternating => ("alternating", vec![], vec![]),
            DecayRule::Geometric { ratio } => ("geometric", vec![*ratio], vec![]),
            DecayRule::InverseQuadratic => ("inverse_quadratic", vec![], vec![]),
            DecayRule::PowerDecay { exponent } => ("power_decay", vec![*exponent], vec![]),
            DecayRule::AtomSum { atoms } => (
                "atom_sum",
                vec![],
                atoms.iter().map(|(x, w)| json!([x, w.re, w.im])).collect(),
            ),
        };
        json!({
            "rule": rule,
            "params": params,
            "atoms": atoms,
            "scale": complex_pair(cf.scale),
            "phase": cf.phase,
            "abel": cf.abel,
        })
    });
    json!({
        "entries": entries,
        "support_radius": s.support_radius(),
        "closed_form": closed,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTorus {
    #[serde(default)]
    atoms: Vec<[f64; 3]>,
    #[serde(default)]
    density: Option<FunctionWire>,
}

#[derive(Deserialize)]
#[serde(try_from = "RawTorus")]
pub(super) struct TorusWire(pub TorusMeasure);

impl TryFrom<RawTorus> for TorusWire {
    type Error = String;

    fn try_from(raw: RawTorus) -> Result<Self, String> {
        let atoms = raw
            .atoms
            .iter()
            .map(|a| TorusAtom {
                x: a[0],
                weight: Complex64::new(a[1], a[2]),
            })
            .collect();
        TorusMeasure::new(atoms, raw.density.map(|d| d.0))
            .map(TorusWire)
            .map_err(|e| e.to_string())
    }
}

pub(super) fn torus_value(m: &TorusMeasure) -> Value {
    let atoms: Vec<Value> = m.atoms().iter().map(|a| json!([a.x, a.weight.re, a.weight.im])).collect();
    json!({ "atoms": atoms, "density": function_or_null(m.density()) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLineAtom {
    y: f64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    #[serde(default)]
    atoms: Vec<RawLineAtom>,
    #[serde(default)]
    density: Option<FunctionWire>,
    #[serde(default)]
    tail_bound: Option<f64>,
}

#[derive(Deserialize)]
#[serde(try_from = "RawLine")]
pub(super) struct LineWire(pub LineMeasure);

impl TryFrom<RawLine> for LineWire {
    type Error = String;

    fn try_from(raw: RawLine) -> Result<Self, String> {
        if raw.atoms.iter().any(|a| !(a.y.is_finite() && a.re.is_finite() && a.im.is_finite())) {
            return Err("line atoms must be finite".into());
        }
        if raw.tail_bound.is_some_and(|t| !(t >= 0.0)) {
            return Err("tail_bound must be non-negative".into());
        }
        Ok(LineWire(LineMeasure {
            atoms: raw
                .atoms
                .iter()
                .map(|a| LineAtom::new(a.y, Complex64::new(a.re, a.im)))
                .collect(),
            density: raw.density.map(|d| d.0),
            tail_bound: raw.tail_bound,
        }))
    }
}

pub(super) fn line_value(m: &LineMeasure) -> Value {
    let atoms: Vec<Value> = m
        .atoms
        .iter()
        .map(|a| json!({ "y": a.y, "re": a.weight.re, "im": a.weight.im }))
        .collect();
    json!({
        "atoms": atoms,
        "density": function_or_null(m.density.as_ref()),
        "tail_bound": m.tail_bound,
    })
}
