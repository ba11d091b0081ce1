use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{FunctionSpec, GridConfig, GridFunction, PointEval, SequenceSpec};
use crate::measure::LineMeasure;
use crate::quadrature::{integrate_real, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// A multiplier norm value together with what kind of statement it is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub p: f64,
    pub value: f64,
    pub kind: CertificateKind,
    pub provenance: String,
    /// Set when the value omits an unquantified multiplicative constant (reported as 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unquantified_constant: Option<String>,
}

impl NormCertificate {
    pub fn new(p: f64, value: f64, kind: CertificateKind, provenance: impl Into<String>) -> Self {
        debug_assert!(value >= 0.0 || value.is_nan());
        debug_assert!(kind != CertificateKind::Exact || p == 1.0 || p == 2.0);
        Self {
            p,
            value,
            kind,
            provenance: provenance.into(),
            unquantified_constant: None,
        }
    }

    pub fn with_constant(mut self, name: impl Into<String>) -> Self {
        self.unquantified_constant = Some(name.into());
        self
    }
}

/// `‖Λ‖_{M_2(ℝ)} = ‖Λ‖_∞`, read off as the maximum over the window grid.
pub fn m2_norm<K: PointEval + ?Sized>(lambda: &K, grid: &GridConfig) -> Result<NormCertificate> {
    grid.validate()?;
    if !lambda.envelope().sup().is_finite() {
        return Err(Error::precondition("Λ is not bounded"));
    }
    let value = grid
        .points()
        .par_iter()
        .map(|&x| lambda.eval(x).norm())
        .reduce(|| 0.0, f64::max);
    Ok(NormCertificate::new(
        2.0,
        value,
        CertificateKind::Exact,
        "M_2 = L^inf: maximum of |Λ| over the window grid",
    ))
}

/// `M_2` norm of already-sampled multiplier values.
pub fn m2_norm_samples(samples: &GridFunction) -> Result<NormCertificate> {
    if samples.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::precondition("multiplier samples are not finite"));
    }
    Ok(NormCertificate::new(
        2.0,
        samples.max_abs(),
        CertificateKind::Exact,
        "M_2 = L^inf: maximum of sampled |Λ|",
    ))
}

/// `‖μ‖_{M_1(ℝ)}`: total variation of atoms plus `∫ |density|`.
pub fn m1_norm(mu: &LineMeasure, grid: &GridConfig) -> Result<NormCertificate> {
    grid.validate()?;
    let atoms: f64 = mu.atoms.iter().map(|a| a.weight.norm()).sum();
    let density = match &mu.density {
        None => 0.0,
        Some(f) => l1_norm(f, grid.tolerance)?,
    };
    Ok(NormCertificate::new(
        1.0,
        atoms + density,
        CertificateKind::Exact,
        "M_1 = M(R): total variation of atoms plus quadrature of |density|",
    ))
}

/// `∫ |f|` by adaptive quadrature over the certified window.
pub fn l1_norm(f: &FunctionSpec, tolerance: f64) -> Result<f64> {
    lp_norm_function(f, 1.0, tolerance)
}

/// `(∫ |f|^p)^{1/p}` by adaptive quadrature.
pub fn lp_norm_function(f: &FunctionSpec, p: f64, tolerance: f64) -> Result<f64> {
    let (lo, hi) = f
        .integration_window(0.5 * tolerance)
        .ok_or_else(|| Error::NotCertifiable("density is not certified integrable".into()))?;
    let bps = f.breakpoints(lo, hi);
    let opts = QuadOptions {
        abs_tol: 0.5 * tolerance,
        max_panel_width: 0.5,
        max_panels: 200_000,
    };
    let (v, _) = integrate_real(&|x| f.eval(x).norm().powf(p), lo, hi, &bps, &opts)?;
    Ok(v.powf(1.0 / p))
}

/// Upper bound on `‖φ‖_{M_p(ℤ)}`, valid for every `p`: `|c|` for (modulated) constants and
/// `‖φ‖_{ℓ_1}` otherwise. At `p = 2` the exact value `sup |φ|` is used.
pub fn sequence_multiplier_norm(phi: &SequenceSpec, p: f64) -> Result<NormCertificate> {
    use crate::function::DecayRule;
    if p == 2.0 {
        return Ok(NormCertificate::new(
            2.0,
            phi.sup_norm(),
            CertificateKind::Exact,
            "M_2(Z) = l^inf (Plancherel)",
        ));
    }
    if let Some(form) = phi.closed_form() {
        if phi.entries().is_empty() && form.abel == 1.0 {
            if let DecayRule::Constant | DecayRule::Alternating = form.rule {
                return Ok(NormCertificate::new(
                    p,
                    form.scale.norm(),
                    CertificateKind::UpperBound,
                    "constant multiplier up to modulation: identity operator scaled",
                ));
            }
        }
    }
    let l1 = phi
        .lp_norm(1.0)
        .ok_or_else(|| Error::precondition("φ has no computable M_p(Z) bound (not in l_1 and not constant)"))?;
    Ok(NormCertificate::new(
        p,
        l1,
        CertificateKind::UpperBound,
        "l_1 norm dominates every M_p(Z) norm",
    ))
}

pub(crate) fn witness<const N: usize>(items: [(&str, f64); N]) -> BTreeMap<String, f64> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Expr;
    use crate::measure::{LineAtom, LineMeasure};
    use num_complex::Complex64;

    #[test]
    fn m2_of_simple_kernels() {
        let g = GridConfig::default();
        let ind = FunctionSpec::from(Expr::indicator(0.0, 1.0));
        assert_eq!(m2_norm(&ind, &g).unwrap().value, 1.0);
        let tri = FunctionSpec::from(Expr::triangle(0.0, 1.0).scale(2.5));
        assert_eq!(m2_norm(&tri, &g).unwrap().value, 2.5);
    }

    #[test]
    fn m2_of_two_gaussians_matches_grid_max() {
        let g = GridConfig::default();
        let f = FunctionSpec::from(Expr::Sum(vec![Expr::gaussian(1.0), Expr::gaussian(1.0).translate(3.0)]));
        let oracle = (0..g.len())
            .map(|j| {
                let x = g.point(j);
                (-std::f64::consts::PI * x * x).exp() + (-std::f64::consts::PI * (x - 3.0).powi(2)).exp()
            })
            .fold(0.0, f64::max);
        assert!((m2_norm(&f, &g).unwrap().value - oracle).abs() < 1e-15);
    }

    #[test]
    fn m1_of_atoms_and_density() {
        let g = GridConfig::default();
        let delta = LineMeasure::atoms_only(vec![LineAtom::new(0.0, Complex64::new(1.0, 0.0))]);
        assert_eq!(m1_norm(&delta, &g).unwrap().value, 1.0);
        let two = LineMeasure::atoms_only(vec![
            LineAtom::new(0.0, Complex64::new(0.5, 0.0)),
            LineAtom::new(0.5, Complex64::new(-0.5, 0.0)),
        ]);
        assert_eq!(m1_norm(&two, &g).unwrap().value, 1.0);
        let dens = LineMeasure::density_only(FunctionSpec::from(Expr::indicator(0.0, 1.0)));
        assert!((m1_norm(&dens, &g).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequence_norms() {
        let two_point = SequenceSpec::from_pairs([(0, 1.0), (1, -1.0)]);
        assert_eq!(sequence_multiplier_norm(&two_point, 1.5).unwrap().value, 2.0);
        assert_eq!(sequence_multiplier_norm(&two_point, 2.0).unwrap().value, 1.0);
    }
}
