//! Summability-kernel membership tests with holds / fails / undecided verdicts.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{m2_norm, witness};
use super::estimator::DiscreteMultiplier;
use crate::error::{Error, Result};
use crate::function::{
    partial_abs_sum, periodization_sup, Envelope, Expr, FunctionSpec, GridConfig, PointEval, PERIOD_SAMPLES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    S2,
    #[serde(rename = "S1_0")]
    S1Zero,
    #[serde(rename = "F_p")]
    Fp,
    #[serde(rename = "M_p_block")]
    MpBlock,
    #[serde(rename = "S_p_product")]
    SpProduct,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::S2 => "S2",
            Space::S1Zero => "S1_0",
            Space::Fp => "F_p",
            Space::MpBlock => "M_p_block",
            Space::SpProduct => "S_p_product",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub space: Space,
    pub verdict: Verdict,
    pub witness: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// The verdict rests on lower-bound evidence only (fiber norms for `p ∉ {1, 2}`).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub conditional: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<MembershipReport>,
}

impl MembershipReport {
    fn new(space: Space, verdict: Verdict, witness: BTreeMap<String, f64>) -> Self {
        Self {
            space,
            verdict,
            witness,
            reason: None,
            conditional: false,
            sub_reports: Vec::new(),
        }
    }

    fn undecided(space: Space, reason: impl Into<String>) -> Self {
        Self {
            reason: Some(reason.into()),
            ..Self::new(space, Verdict::Undecided, BTreeMap::new())
        }
    }

    fn because(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.witness.get(key).copied()
    }
}

/// Partial sums probed when `δ_Λ` cannot be certified.
pub const DIVERGENCE_RADII: [u64; 3] = [16, 64, 256];
const DIVERGENCE_PROBES: usize = 64;

/// Membership in `S_2 = S_2⁰`, decided by a certified finite `δ_Λ`.
pub fn classify_s2<K: PointEval + ?Sized>(lambda: &K, grid: &GridConfig) -> Result<MembershipReport> {
    grid.validate()?;
    match periodization_sup(lambda, grid) {
        Ok(per) => Ok(MembershipReport::new(
            Space::S2,
            Verdict::Holds,
            witness([
                ("delta", per.delta),
                ("tail_bound", per.tail_bound),
                ("delta_certified", per.certified()),
                ("argmax", per.argmax),
            ]),
        )),
        Err(Error::NotCertifiable(why)) => Ok(divergence_report(lambda, grid.tolerance, &why)),
        Err(e) => Err(e),
    }
}

/// Partial sums `max_t Σ_{|n|≤N} |Λ(t + n)|` at `N = 16, 64, 256`. Growth per fourfold radius
/// that stays at least 90% of the previous step and exceeds `10·ε` is reported as divergence.
fn divergence_report<K: PointEval + ?Sized>(lambda: &K, tol: f64, why: &str) -> MembershipReport {
    let sums: Vec<f64> = DIVERGENCE_RADII
        .iter()
        .map(|&n| {
            (0..DIVERGENCE_PROBES)
                .into_par_iter()
                .map(|i| partial_abs_sum(lambda, i as f64 / DIVERGENCE_PROBES as f64, n))
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let (d1, d2) = (sums[1] - sums[0], sums[2] - sums[1]);
    let ln4 = 4f64.ln();
    let slope = (sums[2] - sums[0]) / (2.0 * ln4);
    let mut w = witness([
        ("partial_sum_16", sums[0]),
        ("partial_sum_64", sums[1]),
        ("partial_sum_256", sums[2]),
        ("log_slope", slope),
    ]);
    if !sums.iter().all(|s| s.is_finite()) {
        w.retain(|_, v| v.is_finite());
        return MembershipReport::new(Space::S2, Verdict::Fails, w).because("partial sums are not finite");
    }
    let diverging = d1 > 10.0 * tol && d2 > 10.0 * tol && d2 >= 0.9 * d1;
    if diverging {
        MembershipReport::new(Space::S2, Verdict::Fails, w)
            .because("partial lattice sums grow at least logarithmically in N: δ_Λ = ∞")
    } else {
        MembershipReport::new(Space::S2, Verdict::Undecided, w).because(format!(
            "δ_Λ not certified ({why}) and partial sums show no divergence"
        ))
    }
}

/// The integrable `F` with `F̂ = Λ`, when the grammar provides one.
pub fn s1_witness(lambda: &FunctionSpec) -> Option<FunctionSpec> {
    lambda.inverse_ft().filter(|f| f.is_integrable())
}

/// Membership in `S_1⁰`: `Λ = F̂` structurally with `δ_F < ∞`. Records the `p = 1` bound `δ_F`.
pub fn classify_s1(lambda: &FunctionSpec, grid: &GridConfig) -> Result<MembershipReport> {
    grid.validate()?;
    let Some(f) = lambda.inverse_ft() else {
        return Ok(MembershipReport::undecided(
            Space::S1Zero,
            "no inverse Fourier transform in the grammar: Λ = F̂ with F ∈ L¹ has no witness",
        ));
    };
    if !f.is_integrable() {
        return Ok(MembershipReport::undecided(
            Space::S1Zero,
            "inverse transform F is not certified integrable (no compact support or decay k > 1)",
        ));
    }
    match periodization_sup(&f, grid) {
        Ok(per) => Ok(MembershipReport::new(
            Space::S1Zero,
            Verdict::Holds,
            witness([
                ("delta_f", per.delta),
                ("tail_bound", per.tail_bound),
                ("p1_extension_bound", per.certified()),
            ]),
        )),
        Err(Error::NotCertifiable(why)) => Ok(MembershipReport::undecided(
            Space::S1Zero,
            format!("δ_F not certified: {why}"),
        )),
        Err(e) => Err(e),
    }
}

/// Offsets `x` on `[0, 1)` at which fibers are formed.
pub const FIBER_POINTS: usize = 64;
/// Coarser sweep for the estimator-based fibers (`p ∉ {1, 2}`).
const FIBER_POINTS_LP: usize = 16;
const FIBER_SYMBOL_BINS: usize = 256;

/// Shift range for the fiber sums and the dropped-tail bound.
type ShiftRange = Box<dyn Fn(f64) -> (i64, i64) + Sync>;

fn shift_plan(env: Envelope, truncation: u64) -> Result<(ShiftRange, f64)> {
    match env {
        Envelope::Compact { lo, hi, .. } => Ok((
            Box::new(move |t| ((lo - t).ceil() as i64, (hi - t).floor() as i64)),
            0.0,
        )),
        Envelope::Decay { bound, .. } if bound.k > 1.0 => {
            let n = truncation as i64;
            Ok((Box::new(move |_| (-n, n)), bound.lattice_tail(truncation)))
        }
        _ => Err(Error::NotCertifiable(
            "fiber sums need compact support or decay k > 1".into(),
        )),
    }
}

/// Fibers `Λ_x^#`: their norms and the supremum over `x ∈ [0, 1)`.
///
/// `p = 2`: `sup_ξ |Σ_n e^{2πix(ξ+n)} Λ(ξ + n)|`. `p = 1`: `Σ_n |F(x + n)|` for the `S_1⁰` witness
/// `F`. Other `p` use the discretised estimator on the fiber symbol and yield a conditional verdict.
pub fn fiber_norms(lambda: &FunctionSpec, p: f64, grid: &GridConfig, seed: u64) -> Result<MembershipReport> {
    grid.validate()?;
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::Domain(format!("fiber norms need 1 ≤ p < ∞, got {p}")));
    }
    if p == 1.0 {
        let Some(f) = s1_witness(lambda) else {
            return Err(Error::with_report(
                "p = 1 fibers need the classify_s1 witness F",
                classify_s1(lambda, grid)?,
            ));
        };
        return Ok(match periodization_sup(&f, grid) {
            Ok(per) => MembershipReport::new(
                Space::Fp,
                Verdict::Holds,
                witness([
                    ("p", 1.0),
                    ("fiber_sup", per.delta),
                    ("tail_bound", per.tail_bound),
                    ("worst_x", per.argmax),
                ]),
            ),
            Err(Error::NotCertifiable(why)) => {
                MembershipReport::undecided(Space::Fp, format!("ℓ₁ fiber sums not certified: {why}"))
            }
            Err(e) => return Err(e),
        });
    }
    let (range, tail) = match shift_plan(lambda.envelope(), grid.truncation) {
        Ok(v) => v,
        Err(Error::NotCertifiable(why)) => {
            return Ok(MembershipReport::undecided(Space::Fp, format!("fibers not certified: {why}")))
        }
        Err(e) => return Err(e),
    };
    let fiber = |x: f64, xi: f64| -> Complex64 {
        let (a, b) = range(xi);
        (a..=b)
            .map(|n| {
                let t = xi + n as f64;
                lambda.eval(t) * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x * t)
            })
            .sum()
    };
    if p == 2.0 {
        let (sup, worst) = (0..FIBER_POINTS)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / FIBER_POINTS as f64;
                let m = (0..PERIOD_SAMPLES)
                    .map(|j| fiber(x, j as f64 / PERIOD_SAMPLES as f64).norm())
                    .fold(0.0, f64::max);
                (m, x)
            })
            .reduce(|| (0.0, 0.0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        let mut w = witness([("p", 2.0), ("fiber_sup", sup), ("tail_bound", tail), ("worst_x", worst)]);
        w.insert("fiber_sup_certified".into(), sup + tail);
        return Ok(MembershipReport::new(Space::Fp, Verdict::Holds, w));
    }
    let mut bounds = Vec::with_capacity(FIBER_POINTS_LP);
    for i in 0..FIBER_POINTS_LP {
        let x = i as f64 / FIBER_POINTS_LP as f64;
        let symbol: Vec<Complex64> = (0..FIBER_SYMBOL_BINS)
            .into_par_iter()
            .map(|k| fiber(x, k as f64 / FIBER_SYMBOL_BINS as f64))
            .collect();
        bounds.push((DiscreteMultiplier::new(symbol)?.lower_bound(p, seed), x));
    }
    let (lb, worst) = bounds
        .into_iter()
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    let mut report = MembershipReport::new(
        Space::Fp,
        Verdict::Undecided,
        witness([("p", p), ("fiber_lower_bound_sup", lb), ("tail_bound", tail), ("worst_x", worst)]),
    )
    .because("M_p(T) fiber norms for p ∉ {1, 2} are only bounded from below");
    report.conditional = true;
    Ok(report)
}

/// `Σ_{|k|≤K} ‖χ_{[k,k+1)} Λ‖_{M_p}` plus a decay-based tail.
///
/// For `p = 2` each block norm is `sup_{[k,k+1)} |Λ|` (right endpoint taken as a left limit), and
/// the tail beyond `K` is `2C K^{1−k}/(k−1)`. Other `p` sum lower bounds and stay undecided.
pub fn block_sum_criterion(
    lambda: &FunctionSpec,
    p: f64,
    grid: &GridConfig,
    radius: u64,
    seed: u64,
) -> Result<MembershipReport> {
    grid.validate()?;
    if radius == 0 {
        return Err(Error::Domain("block radius K must be positive".into()));
    }
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::Domain(format!("block criterion needs 1 ≤ p < ∞, got {p}")));
    }
    let k = radius as i64;
    let (blocks, tail) = match lambda.envelope() {
        Envelope::Compact { lo, hi, .. } => {
            let first = (lo.floor() as i64).max(-k);
            let last = ((hi.ceil() as i64) - 1).min(k);
            let covered = lo >= -(k as f64) && hi <= (k + 1) as f64;
            (first..=last, if covered { 0.0 } else { f64::INFINITY })
        }
        Envelope::Decay { bound, .. } if bound.k > 1.0 => {
            (-k..=k, 2.0 * bound.c * (radius as f64).powf(1.0 - bound.k) / (bound.k - 1.0))
        }
        _ => {
            return Ok(MembershipReport::undecided(
                Space::MpBlock,
                "no decay certificate: block norms cannot be summed",
            ))
        }
    };
    if !tail.is_finite() {
        return Ok(MembershipReport::undecided(
            Space::MpBlock,
            "support extends past the block radius and Λ has no decay certificate",
        ));
    }
    let blocks: Vec<i64> = blocks.collect();
    const BLOCK_SAMPLES: usize = 2048;
    let eta = 1e-12;
    if p == 2.0 {
        let norms: Vec<f64> = blocks
            .par_iter()
            .map(|&b| {
                (0..=BLOCK_SAMPLES)
                    .map(|j| {
                        let x = if j == BLOCK_SAMPLES {
                            (b + 1) as f64 - eta
                        } else {
                            b as f64 + j as f64 / BLOCK_SAMPLES as f64
                        };
                        lambda.eval(x).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let sum: f64 = norms.iter().sum();
        let nonzero = norms.iter().filter(|&&v| v > 0.0).count() as f64;
        return Ok(MembershipReport::new(
            Space::MpBlock,
            Verdict::Holds,
            witness([
                ("p", 2.0),
                ("block_sum", sum),
                ("tail_bound", tail),
                ("block_sum_certified", sum + tail),
                ("nonzero_blocks", nonzero),
            ]),
        ));
    }
    if p == 1.0 {
        return Ok(MembershipReport::undecided(
            Space::MpBlock,
            "block norms in M_1 need the measure behind each truncated block; not computed",
        ));
    }
    let mut sum = 0.0;
    let mut skipped = 0.0;
    for &b in &blocks {
        if (b as f64) < -grid.halfwidth || ((b + 1) as f64) > grid.halfwidth {
            skipped += 1.0;
            continue;
        }
        let block = FunctionSpec::from(Expr::indicator(b as f64, (b + 1) as f64))
            .map(|ind| Expr::Product(vec![ind, lambda.expr().clone()]));
        let cert = super::estimator::mp_norm_lower_bound(
            super::estimator::Multiplier::Function(&block),
            p,
            grid,
            seed,
        )?;
        sum += cert.value;
    }
    let mut report = MembershipReport::new(
        Space::MpBlock,
        Verdict::Undecided,
        witness([
            ("p", p),
            ("block_sum_lower_bound", sum),
            ("tail_bound", tail),
            ("blocks_outside_window", skipped),
        ]),
    )
    .because("M_p block norms for p ≠ 2 are lower bounds; the sum does not certify membership");
    report.conditional = true;
    Ok(report)
}

/// Product criterion: both factors in `𝔽_p ∩ A(ℝ)` gives `Λ₁Λ₂ ∈ S_p⁰`; if also `δ_{Λ_i} < ∞` for
/// one factor, `Λ₁Λ₂ ∈ S_p`. The product itself is returned for downstream use.
pub fn product_kernel(
    lambda1: &FunctionSpec,
    lambda2: &FunctionSpec,
    p: f64,
    grid: &GridConfig,
    seed: u64,
) -> Result<(MembershipReport, FunctionSpec)> {
    grid.validate()?;
    let product = FunctionSpec::new(Expr::Product(vec![lambda1.expr().clone(), lambda2.expr().clone()]))?;
    let mut subs = Vec::new();
    let mut w = BTreeMap::new();
    let mut fibers_hold = true;
    let mut conditional = false;
    let mut in_a = true;
    let mut some_delta = false;
    let mut reasons = Vec::new();

    for (i, lambda) in [lambda1, lambda2].into_iter().enumerate() {
        let tag = i + 1;
        let a_r = s1_witness(lambda).is_some();
        w.insert(format!("a_r_{tag}"), if a_r { 1.0 } else { 0.0 });
        if !a_r {
            in_a = false;
            reasons.push(format!(
                "factor {tag} has no integrable inverse transform in the grammar (A(R) membership unproven)"
            ));
        }
        let fiber = match fiber_norms(lambda, p, grid, seed) {
            Ok(r) => r,
            Err(Error::Precondition { reason, .. }) => MembershipReport::undecided(Space::Fp, reason),
            Err(e) => return Err(e),
        };
        if let Some(v) = fiber.get("fiber_sup") {
            w.insert(format!("fiber_sup_{tag}"), v);
        }
        if let Some(v) = fiber.get("fiber_lower_bound_sup") {
            w.insert(format!("fiber_lower_bound_sup_{tag}"), v);
        }
        if !fiber.holds() {
            fibers_hold = false;
            conditional |= fiber.conditional;
            if let Some(r) = &fiber.reason {
                reasons.push(format!("factor {tag}: {r}"));
            }
        }
        let s2 = classify_s2(lambda, grid)?;
        if s2.holds() {
            some_delta = true;
            w.insert(format!("delta_{tag}"), s2.get("delta_certified").unwrap_or(f64::NAN));
        }
        subs.push(fiber);
        subs.push(s2);
    }
    let sp0 = fibers_hold && in_a;
    w.insert("s_p0".into(), if sp0 { 1.0 } else { 0.0 });
    w.insert("s_p".into(), if sp0 && some_delta { 1.0 } else { 0.0 });
    w.insert("product_sup".into(), m2_norm(&product, grid)?.value);
    let mut report = MembershipReport::new(
        Space::SpProduct,
        if sp0 { Verdict::Holds } else { Verdict::Undecided },
        w,
    );
    report.sub_reports = subs;
    if !sp0 {
        report.conditional = conditional && in_a;
        report.reason = Some(reasons.join("; "));
    }
    Ok((report, product))
}
