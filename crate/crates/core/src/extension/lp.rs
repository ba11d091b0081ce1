use num_rational::Rational64;

use super::jodeit::{tau, ConstructionTrace, ExtensionResult};
use super::qrange::{q_range, to_rational, QRange};
use super::support::{support_normalize, support_radius};
use crate::error::{Error, Result};
use crate::function::{check_quarter_support, extend, poisson_constant, FunctionSpec, GridConfig, SequenceSpec, Transform};
use crate::norms::{lp_norm_function, CertificateKind, NormCertificate};

pub const DEFAULT_R_SCHEDULE: [f64; 4] = [0.5, 0.9, 0.99, 0.999];

/// Abel-regularised extension `F̂_r = W_{k̂_r, Ŝ}` with `k̂_r(n) = φ(n) r^{|n|}`, converging to
/// `W = W_{φ,Ŝ}` as `r → 1`, and the bound `C τ_p ‖φ‖_{p'}` into `M_q(ℝ)` for `q` in `q_range(p)`.
pub fn lp_extend(
    phi: &SequenceSpec,
    s: &FunctionSpec,
    p: f64,
    r_schedule: &[f64],
    grid: &GridConfig,
) -> Result<ExtensionResult> {
    grid.validate()?;
    check_quarter_support(s)?;
    let pr = to_rational(p)?;
    let qr = q_range(pr)?;
    if r_schedule.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Domain("every r in the schedule must lie in (0, 1)".into()));
    }
    let p_conj = p / (p - 1.0);
    let phi_norm = phi
        .lp_norm(p_conj)
        .ok_or_else(|| Error::precondition(format!("φ is not certified to lie in l_{p_conj}")))?;
    let tau_p = tau(s, p, grid)?;
    let s_hat = Transform::of(s, grid.tolerance)?;
    let w = extend(phi, &s_hat, grid)?;

    let mut trace = ConstructionTrace::default();
    for &r in r_schedule {
        let f_r = extend(&phi.abel(r), &s_hat, grid)?;
        trace.abel.push((r, f_r.sup_distance(&w)));
    }
    let monotone = trace
        .abel
        .windows(2)
        .all(|pair| pair[0].1 >= pair[1].1 - grid.tolerance);
    trace.values.insert("tau_p".into(), tau_p.value);
    trace.values.insert("tau_p_tail".into(), tau_p.tail);
    trace.values.insert("phi_lp_conjugate".into(), phi_norm);
    trace.values.insert("p_conjugate".into(), p_conj);
    trace.values.insert("abel_monotone".into(), if monotone { 1.0 } else { 0.0 });
    trace.notes.push("τ_p includes a fitted C/n² tail (estimate)".into());
    trace
        .notes
        .push("assumed: the dilation/restriction transfer from M_q(Z) to M_q(R) (not verified)".into());
    let bound = NormCertificate::new(
        p,
        tau_p.value * phi_norm,
        CertificateKind::UpperBound,
        "C·τ_p·‖φ‖_{p'} bound into M_q(R) for q in the q-range of p",
    )
    .with_constant("C");
    Ok(ExtensionResult {
        w,
        bound,
        q_range: Some(qr),
        trace,
    })
}

/// `W = W_{φ,Ŝ}` for compactly supported `S` and `1 < p < 2`, with the bound `C ‖φ‖_p ‖S‖_p`
/// valid into every `M_q(ℝ)`, `1 ≤ q < ∞`.
pub fn compact_support_lp(phi: &SequenceSpec, s: &FunctionSpec, p: f64, grid: &GridConfig) -> Result<ExtensionResult> {
    grid.validate()?;
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Domain(format!("compact_support_lp needs 1 < p < 2, got {p}")));
    }
    let n = support_radius(s)
        .ok_or_else(|| Error::precondition("S has no structurally compact support"))?;
    let s_n = support_normalize(s, n)?;
    let phi_norm = phi
        .lp_norm(p)
        .ok_or_else(|| Error::precondition(format!("φ is not certified to lie in l_{p}")))?;
    let s_norm = lp_norm_function(s, p, grid.tolerance)?;
    let s_hat = Transform::of(s, grid.tolerance)?;
    let w = extend(phi, &s_hat, grid)?;

    let mut trace = ConstructionTrace::default();
    trace.values.insert("support_radius".into(), n as f64);
    trace.values.insert("phi_lp".into(), phi_norm);
    trace.values.insert("s_lp".into(), s_norm);
    if let Some((lo, hi)) = s_n.support() {
        trace.values.insert("normalized_support_lo".into(), lo);
        trace.values.insert("normalized_support_hi".into(), hi);
    }
    if let Ok(report) = poisson_constant(&s_n, grid) {
        trace.values.insert("normalized_poisson_deviation".into(), report.max_deviation);
    }
    trace
        .notes
        .push(format!("constant C may depend on supp S ⊆ [−{n}, {n}]"));
    let bound = NormCertificate::new(
        p,
        phi_norm * s_norm,
        CertificateKind::UpperBound,
        "C·‖φ‖_p·‖S‖_p bound into M_q(R) for all 1 ≤ q < ∞ (multilinear interpolation)",
    )
    .with_constant("C");
    Ok(ExtensionResult {
        w,
        bound,
        q_range: Some(QRange::all_finite(to_rational(p).unwrap_or(Rational64::from_integer(1)))),
        trace,
    })
}
