use std::collections::BTreeMap;

use serde::Serialize;

use super::qrange::QRange;
use crate::error::{Error, Result};
use crate::function::{check_quarter_support, extend, Expr, FunctionSpec, GridConfig, GridFunction, PointEval, SequenceSpec, Transform};
use crate::norms::{sequence_multiplier_norm, CertificateKind, NormCertificate};

/// Intermediate values of an extension construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConstructionTrace {
    /// `(r, sup_ξ |F̂_r(ξ) − W(ξ)|)` in schedule order.
    pub abel: Vec<(f64, f64)>,
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionResult {
    #[serde(skip)]
    pub w: GridFunction,
    pub bound: NormCertificate,
    /// Absent for constructions that stay at a single exponent.
    pub q_range: Option<QRange>,
    pub trace: ConstructionTrace,
}

/// Fourier-series mass of `S^#`: coefficients `(S^#)^(n) = Ŝ(n)` for `|n| ≤ 4N` plus a fitted
/// `C/n²` tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauEstimate {
    pub p: f64,
    /// `(Σ_n |Ŝ(n)|^p)^{1/p}` including the fitted tail.
    pub value: f64,
    pub head: f64,
    pub tail: f64,
    pub radius: u64,
    /// `C` in `|Ŝ(n)| ≤ C/n²`, fitted on `2N ≤ |n| ≤ 4N`.
    pub fitted_c: f64,
}

/// `τ_p = (Σ_n |(S^#)^(n)|^p)^{1/p}`; `p = 1` gives `τ`.
pub fn tau(s: &FunctionSpec, p: f64, grid: &GridConfig) -> Result<TauEstimate> {
    grid.validate()?;
    check_quarter_support(s)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("τ_p needs 1 ≤ p < ∞, got {p}")));
    }
    let ft = Transform::of(s, grid.tolerance)?;
    let n = grid.truncation.max(1);
    let radius = 4 * n;
    let r = radius as i64;
    let coeffs: Vec<f64> = (-r..=r).map(|k| ft.eval(k as f64).norm()).collect();
    let head: f64 = coeffs.iter().map(|c| c.powf(p)).sum();
    let fitted_c = (-r..=r)
        .filter(|k| k.unsigned_abs() >= 2 * n)
        .map(|k| coeffs[(k + r) as usize] * (k * k) as f64)
        .fold(0.0, f64::max);
    let m = radius as f64;
    // Σ_{|k|>M} (C/k²)^p ≤ 2 C^p M^{1−2p}/(2p − 1)
    let tail = 2.0 * fitted_c.powf(p) * m.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
    let value = (head + tail).powf(1.0 / p);
    if !value.is_finite() {
        return Err(Error::NotCertifiable(format!("τ_{p} diverges")));
    }
    Ok(TauEstimate {
        p,
        value,
        head: head.powf(1.0 / p),
        tail,
        radius,
        fitted_c,
    })
}

/// Piecewise constant (`order = 0`) or piecewise linear (`order = 1`) extension of φ.
pub fn jodeit_piecewise(phi: &SequenceSpec, order: u8, grid: &GridConfig) -> Result<GridFunction> {
    let kernel = match order {
        0 => Expr::indicator(0.0, 1.0),
        1 => Expr::triangle(0.0, 1.0),
        _ => return Err(Error::Domain(format!("piecewise order must be 0 or 1, got {order}"))),
    };
    if !phi.sup_norm().is_finite() {
        return Err(Error::precondition("φ is not bounded"));
    }
    extend(phi, &FunctionSpec::from(kernel), grid)
}

/// `W = W_{φ,Ŝ}` with the bound `C_p τ ‖φ‖_{M_p(ℤ)}`, where `‖φ‖` is the `ℓ₁`-type certificate.
pub fn jodeit_bound(phi: &SequenceSpec, s: &FunctionSpec, grid: &GridConfig) -> Result<ExtensionResult> {
    grid.validate()?;
    check_quarter_support(s)?;
    let t = tau(s, 1.0, grid)?;
    let phi_norm = sequence_multiplier_norm(phi, 1.0)?;
    let s_hat = Transform::of(s, grid.tolerance)?;
    let w = extend(phi, &s_hat, grid)?;
    let mut trace = ConstructionTrace::default();
    trace.values.insert("tau".into(), t.value);
    trace.values.insert("tau_tail".into(), t.tail);
    trace.values.insert("tau_fitted_c".into(), t.fitted_c);
    trace.values.insert("phi_norm".into(), phi_norm.value);
    trace.notes.push(format!("‖φ‖: {}", phi_norm.provenance));
    trace.notes.push("τ includes a fitted C/n² tail (estimate)".into());
    if !s_hat.is_analytic() {
        trace.notes.push("Ŝ evaluated by quadrature".into());
    }
    let bound = NormCertificate::new(
        1.0,
        t.value * phi_norm.value,
        CertificateKind::UpperBound,
        "Jodeit-type bound C_p·τ·‖φ‖ with τ = Σ|(S^#)^(n)|; the l_1 certificate for ‖φ‖ holds for every p",
    )
    .with_constant("C_p");
    Ok(ExtensionResult {
        w,
        bound,
        q_range: None,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ClosedForm, DecayRule};
    use num_complex::Complex64;

    fn grid() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn piecewise_examples() {
        let w = jodeit_piecewise(&SequenceSpec::delta(), 0, &grid()).unwrap();
        for (x, v) in w.iter() {
            assert_eq!(v.re, if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 });
        }
        let one = SequenceSpec::closed(ClosedForm::new(DecayRule::Constant)).unwrap();
        let w = jodeit_piecewise(&one, 1, &grid()).unwrap();
        assert!(w.values.iter().all(|v| (v.re - 1.0).abs() < 1e-15));
        let alt = SequenceSpec::closed(ClosedForm::new(DecayRule::Alternating)).unwrap();
        let w = jodeit_piecewise(&alt, 0, &grid()).unwrap();
        for (x, v) in w.iter() {
            let expected = if (x.floor() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert_eq!(v.re, expected, "ξ = {x}");
        }
        assert!(jodeit_piecewise(&one, 2, &grid()).is_err());
    }

    #[test]
    fn bound_for_delta_and_zero() {
        let s = FunctionSpec::from(Expr::raised_cosine(0.25, 0.75));
        let r = jodeit_bound(&SequenceSpec::delta(), &s, &grid()).unwrap();
        let t = tau(&s, 1.0, &grid()).unwrap();
        assert_eq!(r.bound.value, t.value);
        assert_eq!(r.bound.unquantified_constant.as_deref(), Some("C_p"));
        let z = jodeit_bound(&SequenceSpec::zero(), &s, &grid()).unwrap();
        assert_eq!(z.bound.value, 0.0);
        assert!(z.w.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn two_point_sequence() {
        let s = FunctionSpec::from(Expr::triangle(0.5, 0.25));
        let phi = SequenceSpec::from_pairs([(0, 1.0), (1, -1.0)]);
        let r = jodeit_bound(&phi, &s, &grid()).unwrap();
        let t = tau(&s, 1.0, &grid()).unwrap();
        assert!((r.bound.value - 2.0 * t.value).abs() < 1e-15);
        let s_hat = s.analytic_ft().unwrap();
        for (xi, v) in r.w.iter() {
            assert!((v - (s_hat.eval(xi) - s_hat.eval(xi - 1.0))).norm() < 1e-14);
        }
    }

    #[test]
    fn tau_of_raised_cosine_matches_direct_sum() {
        // Independent oracle: Ŝ(n) by trapezoid sums of S on [1/4, 3/4].
        let s = FunctionSpec::from(Expr::raised_cosine(0.25, 0.75));
        let m = 4000;
        let mut direct = 0.0;
        for n in -256i64..=256 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let x = 0.25 + 0.5 * (j as f64 + 0.5) / m as f64;
                acc += s.eval(x) * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * n as f64 * x);
            }
            direct += (acc * (0.5 / m as f64)).norm();
        }
        let t = tau(&s, 1.0, &grid()).unwrap();
        assert!((t.head - direct).abs() < 1e-6, "{} vs {direct}", t.head);
    }

    #[test]
    fn support_violation() {
        let s = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        assert!(matches!(
            jodeit_bound(&SequenceSpec::delta(), &s, &grid()),
            Err(Error::Precondition { .. })
        ));
    }
}
