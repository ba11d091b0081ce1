use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::qrange::{q_range, to_rational, QRange};
use crate::error::{Error, Result};
use crate::function::SequenceSpec;

/// Output radius when an input is infinitely supported.
pub const CONVOLUTION_RADIUS: u64 = 256;
/// Summation radius over the infinite factor.
const SUM_RADIUS: i64 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvolutionReport {
    pub r: f64,
    pub r_conjugate: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    /// `‖a‖_r ‖b‖_{r'}`: bounds `‖a ∗ b‖_∞` and the multiplier norm of `a ∗ b`.
    pub holder_bound: f64,
    pub sup_c: f64,
    /// Pointwise bound on the terms dropped from each computed entry.
    pub tail_bound: f64,
    /// Present when the output was cut to `|n| ≤ radius`.
    pub truncation_radius: Option<u64>,
    pub q_range: Option<QRange>,
}

/// `c = a ∗ b` with `a ∈ ℓ_r`, `b ∈ ℓ_{r'}`, `1 < r ≤ 2`.
pub fn convolve_sequences(a: &SequenceSpec, b: &SequenceSpec, r: f64) -> Result<(SequenceSpec, ConvolutionReport)> {
    if !(r > 1.0 && r <= 2.0) {
        return Err(Error::Domain(format!("convolution criterion needs 1 < r ≤ 2, got {r}")));
    }
    let rc = r / (r - 1.0);
    let norm_a = a
        .lp_norm(r)
        .ok_or_else(|| Error::precondition(format!("a is not certified to lie in l_{r}")))?;
    let norm_b = b
        .lp_norm(rc)
        .ok_or_else(|| Error::precondition(format!("b is not certified to lie in l_{rc}")))?;

    let (entries, tail, radius) = match (a.support(), b.support()) {
        (Some(sa), Some(sb)) => {
            let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
            for (m, x) in &sa {
                for (k, y) in &sb {
                    *out.entry(m + k).or_default() += x * y;
                }
            }
            (out, 0.0, None)
        }
        (Some(sa), None) => (truncated_by_finite(&sa, b), 0.0, Some(CONVOLUTION_RADIUS)),
        (None, Some(sb)) => (truncated_by_finite(&sb, a), 0.0, Some(CONVOLUTION_RADIUS)),
        (None, None) => {
            let tail = lp_tail(a, r, norm_a, SUM_RADIUS) * norm_b;
            let big = CONVOLUTION_RADIUS as i64;
            let a_vals: Vec<Complex64> = (-SUM_RADIUS..=SUM_RADIUS).map(|m| a.value(m)).collect();
            let out = (-big..=big)
                .map(|n| {
                    let v: Complex64 = (-SUM_RADIUS..=SUM_RADIUS)
                        .zip(&a_vals)
                        .map(|(m, x)| x * b.value(n - m))
                        .sum();
                    (n, v)
                })
                .collect();
            (out, tail, Some(CONVOLUTION_RADIUS))
        }
    };
    let entries: BTreeMap<i64, Complex64> = entries.into_iter().filter(|(_, v)| v.norm() != 0.0).collect();
    let c = SequenceSpec::finite(entries, radius)?;
    let sup_c = c.sup_norm();
    let q = q_range(to_rational(r)?).ok();
    Ok((
        c,
        ConvolutionReport {
            r,
            r_conjugate: rc,
            norm_a,
            norm_b,
            holder_bound: norm_a * norm_b,
            sup_c,
            tail_bound: tail,
            truncation_radius: radius,
            q_range: q,
        },
    ))
}

fn truncated_by_finite(finite: &[(i64, Complex64)], other: &SequenceSpec) -> BTreeMap<i64, Complex64> {
    let big = CONVOLUTION_RADIUS as i64;
    (-big..=big)
        .map(|n| (n, finite.iter().map(|(m, x)| x * other.value(n - m)).sum()))
        .collect()
}

/// Upper bound on `(Σ_{|m|>M} |a(m)|^r)^{1/r}` from a certified `‖a‖_r`.
fn lp_tail(a: &SequenceSpec, r: f64, norm: f64, m: i64) -> f64 {
    let head: f64 = (-m..=m).map(|k| a.value(k).norm().powf(r)).sum();
    (norm.powf(r) - head).max(0.0).powf(1.0 / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ClosedForm, DecayRule};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn delta_is_identity() {
        let b = SequenceSpec::from_pairs([(-2, 0.5), (0, 1.0), (3, -2.0)]);
        let (out, rep) = convolve_sequences(&SequenceSpec::delta(), &b, 1.5).unwrap();
        assert_eq!(out, b);
        assert_eq!(rep.tail_bound, 0.0);
    }

    #[test]
    fn box_with_itself() {
        let a = SequenceSpec::from_pairs([(0, 1.0), (1, 1.0)]);
        let (out, rep) = convolve_sequences(&a, &a, 2.0).unwrap();
        assert_eq!(out.support().unwrap(), vec![(0, c(1.0)), (1, c(2.0)), (2, c(1.0))]);
        assert!(rep.sup_c <= rep.holder_bound);
        assert_eq!(rep.q_range.unwrap().to_string(), "[1, inf)");
    }

    #[test]
    fn geometric_pair() {
        let a = SequenceSpec::closed(ClosedForm::new(DecayRule::Geometric { ratio: 0.5 })).unwrap();
        let b = SequenceSpec::closed(ClosedForm::new(DecayRule::Geometric { ratio: 1.0 / 3.0 })).unwrap();
        let (out, rep) = convolve_sequences(&a, &b, 1.5).unwrap();
        // Oracle: direct truncated sum over |m| ≤ 200.
        for n in [-5i64, 0, 1, 7] {
            let oracle: f64 = (-200i64..=200)
                .map(|m| 0.5f64.powi(m.abs() as i32) * (1.0 / 3.0f64).powi((n - m).abs() as i32))
                .sum();
            assert!((out.value(n).re - oracle).abs() < 1e-14 + rep.tail_bound);
        }
        assert!(rep.norm_a.is_finite() && rep.norm_b.is_finite());
        assert!(rep.sup_c <= rep.holder_bound + 1e-12);
    }

    #[test]
    fn exponent_checks() {
        let a = SequenceSpec::delta();
        assert!(convolve_sequences(&a, &a, 1.0).is_err());
        assert!(convolve_sequences(&a, &a, 3.0).is_err());
        let one = SequenceSpec::closed(ClosedForm::new(DecayRule::Constant)).unwrap();
        assert!(convolve_sequences(&one, &a, 1.5).is_err());
    }
}
