use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::function::{periodization_sup, FunctionSpec, GridConfig};
use crate::norms::l1_norm;

/// Clause-by-clause check that `Λ₁` is a decreasing radial `L¹` majorant of `Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantReport {
    /// (a) `Λ₁` is even and `|Λ₁|` is nonincreasing on `[0, L]`.
    pub radial_decreasing: bool,
    /// (b) `Λ₁ ∈ L¹`.
    pub integrable: bool,
    /// (c) `|Λ(ξ)| ≤ |Λ₁(|ξ|)|` on the grid.
    pub dominates: bool,
    /// `δ_{Λ₁}` certified finite.
    pub delta_finite: bool,
    pub l1_norm: Option<f64>,
    pub delta: Option<f64>,
    pub failures: Vec<String>,
}

impl MajorantReport {
    pub fn passes(&self) -> bool {
        self.radial_decreasing && self.integrable && self.dominates
    }
}

const SLACK: f64 = 1e-12;

pub fn radial_majorant_check(lambda: &FunctionSpec, majorant: &FunctionSpec, grid: &GridConfig) -> Result<MajorantReport> {
    grid.validate()?;
    let mut failures = Vec::new();
    let steps = (grid.halfwidth / grid.step).round() as usize;
    let half: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|j| majorant.eval(j as f64 * grid.step).norm())
        .collect();

    let even = majorant.expr().is_even();
    if !even {
        failures.push("(a) Λ₁ is not structurally radial (even)".to_string());
    }
    let decreasing = match half.windows(2).position(|w| w[1] > w[0] * (1.0 + SLACK) + SLACK) {
        None => true,
        Some(j) => {
            failures.push(format!(
                "(a) |Λ₁| increases between {} and {}",
                j as f64 * grid.step,
                (j + 1) as f64 * grid.step
            ));
            false
        }
    };

    let l1 = if majorant.is_integrable() {
        l1_norm(majorant, grid.tolerance).ok()
    } else {
        None
    };
    if l1.is_none() {
        failures.push("(b) Λ₁ is not certified integrable".to_string());
    }

    let violation = grid
        .points()
        .par_iter()
        .map(|&xi| {
            let bound = majorant.eval(xi.abs()).norm();
            let excess = lambda.eval(xi).norm() - bound;
            if excess > SLACK * (1.0 + bound) {
                Some((xi, excess))
            } else {
                None
            }
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(p), Some(q)) => Some(if q.0 < p.0 { q } else { p }),
            (p, q) => p.or(q),
        });
    if let Some((xi, excess)) = violation {
        failures.push(format!("(c) |Λ| exceeds Λ₁(|ξ|) by {excess:e} at ξ = {xi}"));
    }

    let delta = periodization_sup(majorant, grid).ok().map(|p| p.certified());
    Ok(MajorantReport {
        radial_decreasing: even && decreasing,
        integrable: l1.is_some(),
        dominates: violation.is_none(),
        delta_finite: delta.is_some(),
        l1_norm: l1,
        delta,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Expr;

    #[test]
    fn gaussian_majorises_itself() {
        let g = FunctionSpec::from(Expr::gaussian(1.0));
        let r = radial_majorant_check(&g, &g, &GridConfig::default()).unwrap();
        assert!(r.passes() && r.delta_finite, "{r:?}");
        assert!((r.l1_norm.unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn translated_majorant_is_not_radial() {
        let tri = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        let shifted = FunctionSpec::from(Expr::triangle(0.0, 1.0).translate(0.5));
        let r = radial_majorant_check(&tri, &shifted, &GridConfig::default()).unwrap();
        assert!(!r.radial_decreasing);
        assert!(r.failures.iter().any(|f| f.starts_with("(a)")));
    }

    #[test]
    fn modulation_keeps_domination() {
        let lam = FunctionSpec::from(Expr::gaussian(1.0).modulate(0.7));
        let g = FunctionSpec::from(Expr::gaussian(1.0));
        let r = radial_majorant_check(&lam, &g, &GridConfig::default()).unwrap();
        assert!(r.dominates);
    }
}
