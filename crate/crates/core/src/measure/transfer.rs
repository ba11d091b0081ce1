use num_complex::Complex64;

use super::types::{LineAtom, LineMeasure, TorusMeasure};
use crate::error::{Error, Result};
use crate::function::{Envelope, Expr, FunctionSpec, GridConfig};
use crate::norms::{classify_s1, classify_s2, s1_witness};

/// The integrable `g` with `ĝ = Λ`, after checking `Λ ∈ S_1⁰` and `δ_Λ < ∞`.
pub fn transfer_kernel(lambda: &FunctionSpec, grid: &GridConfig) -> Result<FunctionSpec> {
    let s1 = classify_s1(lambda, grid)?;
    if !s1.holds() {
        return Err(Error::with_report(
            "transfer needs Λ = ĝ with g integrable and δ_g finite",
            s1,
        ));
    }
    let s2 = classify_s2(lambda, grid)?;
    if !s2.holds() {
        return Err(Error::with_report("transfer needs δ_Λ finite", s2));
    }
    s1_witness(lambda).ok_or_else(|| Error::precondition("Λ has no integrable inverse transform"))
}

/// The line measure `μ` with `μ̂ = W_{ν̂,Λ}`.
///
/// Atoms `α_j` at `x_j` become atoms `α_j g(x_j + n)` at `x_j + n` (`ĝ = Λ`), over the support of
/// `g` or `|n| ≤ N` with a decay tail. A density `F` becomes `x ↦ F(frac x) g(x)`.
pub fn transfer(nu: &TorusMeasure, lambda: &FunctionSpec, grid: &GridConfig) -> Result<LineMeasure> {
    grid.validate()?;
    let g = transfer_kernel(lambda, grid)?;
    transfer_with(nu, &g, grid.truncation)
}

/// [`transfer`] with the kernel witness `g` already in hand.
pub fn transfer_with(nu: &TorusMeasure, g: &FunctionSpec, truncation: u64) -> Result<LineMeasure> {
    let env = g.envelope();
    let n_max = truncation as i64;
    type Range = Box<dyn Fn(f64) -> (i64, i64)>;
    let (range, tail_per_unit): (Range, f64) = match env {
        Envelope::Compact { lo, hi, .. } => (Box::new(move |x| ((lo - x).ceil() as i64, (hi - x).floor() as i64)), 0.0),
        Envelope::Decay { bound, .. } if bound.k > 1.0 => (Box::new(move |_| (-n_max, n_max)), bound.lattice_tail(truncation)),
        _ => {
            return Err(Error::NotCertifiable(
                "g needs compact support or decay k > 1 for the atom sum".into(),
            ))
        }
    };
    let mut atoms = Vec::new();
    for a in nu.atoms() {
        let (first, last) = range(a.x);
        for n in first..=last {
            let y = a.x + n as f64;
            let w = a.weight * g.eval(y);
            if w.norm() != 0.0 {
                atoms.push(LineAtom::new(y, w));
            }
        }
    }
    atoms.sort_by(|p, q| p.y.total_cmp(&q.y));
    let density = nu.density().map(|f| line_density(f, g)).transpose()?;
    Ok(LineMeasure {
        atoms,
        density,
        tail_bound: Some(nu.atom_variation() * tail_per_unit),
    })
}

/// `F(frac x) g(x)`. A trigonometric polynomial `F = Σ c_k e^{2πikx}` is already 1-periodic, so the
/// product is written as `Σ c_k e^{2πikx} g(x)`, whose transform stays in closed form.
fn line_density(f: &FunctionSpec, g: &FunctionSpec) -> Result<FunctionSpec> {
    let expr = match trig_terms(f.expr()) {
        Some(terms) => Expr::Sum(
            terms
                .into_iter()
                .map(|(c, k)| {
                    let mut e = g.expr().clone();
                    if k != 0.0 {
                        e = Expr::Modulate {
                            freq: k,
                            child: Box::new(e),
                        };
                    }
                    if c != Complex64::new(1.0, 0.0) {
                        e = Expr::Scale {
                            factor: c,
                            child: Box::new(e),
                        };
                    }
                    e
                })
                .collect(),
        ),
        None => Expr::Product(vec![f.expr().clone().periodic(), g.expr().clone()]),
    };
    FunctionSpec::new(expr)
}

/// `(c_k, k)` pairs when `e` is a finite sum of integer-frequency exponentials.
fn trig_terms(e: &Expr) -> Option<Vec<(Complex64, f64)>> {
    match e {
        Expr::Constant { value } => Some(vec![(Complex64::new(*value, 0.0), 0.0)]),
        Expr::Scale { factor, child } => {
            Some(trig_terms(child)?.into_iter().map(|(c, k)| (c * factor, k)).collect())
        }
        Expr::Modulate { freq, child } if freq.fract() == 0.0 => {
            Some(trig_terms(child)?.into_iter().map(|(c, k)| (c, k + freq)).collect())
        }
        Expr::Sum(children) => {
            let mut out = Vec::new();
            for c in children {
                out.extend(trig_terms(c)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// `α·g(x + n)` for a single atom, used as a closed-form oracle.
pub fn atom_weight(g: &FunctionSpec, alpha: Complex64, x: f64, n: i64) -> Complex64 {
    alpha * g.eval(x + n as f64)
}
