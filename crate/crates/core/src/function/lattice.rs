//! Lattice sums over integer translates: periodization, the extension series
//! `W(ξ) = Σ_n φ(n) Λ(ξ − n)`, and the Poisson constancy check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fourier::{PointEval, Transform};
use super::grid::{GridConfig, GridFunction, PERIOD_SAMPLES};
use super::sequence::SequenceSpec;
use super::spec::{Envelope, FunctionSpec};
use crate::error::{Error, Result};

/// `max_t Σ_n |f(t + n)|` over one period, with a certified bound on what truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Periodization {
    /// Grid maximum of the truncated sum (a lower estimate of the essential supremum).
    pub delta: f64,
    pub tail_bound: f64,
    /// Where on `[0, 1)` the maximum was attained.
    pub argmax: f64,
}

impl Periodization {
    /// Certified upper value `delta + tail_bound`.
    pub fn certified(&self) -> f64 {
        self.delta + self.tail_bound
    }
}

/// Which integer shifts to visit for a point in `[0, 1)` (or near it).
#[derive(Debug, Clone, Copy)]
enum Shifts {
    /// `t + n` ranges over the compact support `[lo, hi]`.
    Support { lo: f64, hi: f64 },
    /// `|n| ≤ N` with a uniform tail bound.
    Truncated { n: i64 },
}

impl Shifts {
    fn for_envelope(env: Envelope, truncation: u64) -> Result<(Self, f64)> {
        match env {
            Envelope::Compact { lo, hi, .. } => Ok((Shifts::Support { lo, hi }, 0.0)),
            Envelope::Decay { bound, .. } if bound.k > 1.0 => Ok((
                Shifts::Truncated { n: truncation as i64 },
                bound.lattice_tail(truncation),
            )),
            Envelope::Decay { bound, .. } => Err(Error::NotCertifiable(format!(
                "decay exponent k = {} does not make the lattice sum converge (need k > 1)",
                bound.k
            ))),
            Envelope::Bounded { .. } => Err(Error::NotCertifiable(
                "no decay certificate and unbounded support".into(),
            )),
        }
    }

    fn range(&self, t: f64) -> std::ops::RangeInclusive<i64> {
        match *self {
            Shifts::Support { lo, hi } => ((lo - t).ceil() as i64)..=((hi - t).floor() as i64),
            Shifts::Truncated { n } => -n..=n,
        }
    }
}

/// Σ_{|n| ≤ N} |f(t + n)| with no certification; used for divergence diagnostics.
pub fn partial_abs_sum<K: PointEval + ?Sized>(f: &K, t: f64, n: u64) -> f64 {
    let n = n as i64;
    (-n..=n).map(|k| f.eval(t + k as f64).norm()).sum()
}

fn period_points() -> impl IndexedParallelIterator<Item = f64> {
    (0..PERIOD_SAMPLES)
        .into_par_iter()
        .map(|i| i as f64 / PERIOD_SAMPLES as f64)
}

/// `δ_f = ess sup_ξ Σ_n |f(ξ + n)|`, approximated by the maximum over 2048 points of `[0, 1)`.
pub fn periodization_sup<K: PointEval + ?Sized>(f: &K, grid: &GridConfig) -> Result<Periodization> {
    grid.validate()?;
    let (shifts, tail_bound) = Shifts::for_envelope(f.envelope(), grid.truncation)?;
    let (delta, argmax) = period_points()
        .map(|t| {
            let s: f64 = shifts.range(t).map(|n| f.eval(t + n as f64).norm()).sum();
            (s, t)
        })
        .reduce(|| (f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    Ok(Periodization {
        delta,
        tail_bound,
        argmax,
    })
}

/// Samples of `f^#(t) = Σ_n f(t + n)` at `t = j·h` on `[0, 1)`.
pub fn periodize<K: PointEval + ?Sized>(f: &K, grid: &GridConfig) -> Result<GridFunction> {
    grid.validate()?;
    let (shifts, tail_bound) = Shifts::for_envelope(f.envelope(), grid.truncation)?;
    let count = (1.0 / grid.step).ceil() as usize;
    let values = (0..count)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 * grid.step;
            shifts.range(t).map(|n| f.eval(t + n as f64)).sum()
        })
        .collect();
    Ok(GridFunction {
        origin: 0.0,
        step: grid.step,
        values,
        tail_bound: Some(tail_bound),
    })
}

#[derive(Debug, Clone)]
enum Plan {
    /// Exact sum over the finite support of φ.
    Finite(Vec<(i64, Complex64)>),
    /// Sum over `n` with `ξ − n` inside the compact support of Λ.
    KernelSupport { lo: f64, hi: f64 },
    /// `|n − ⌊ξ⌋| ≤ N` with a uniform tail bound.
    Centered { n: i64 },
}

/// The extension series `W_{φ,Λ}(ξ) = Σ_n φ(n) Λ(ξ − n)` as a pointwise evaluator.
///
/// Finitely supported φ are summed exactly. For infinite φ the sum runs over the support of Λ when
/// it is compact, otherwise over the `2N + 1` shifts nearest to ξ, with the dropped terms bounded
/// by `sup|φ| · 2C N^{1−k}/(k−1)` from the decay certificate of Λ.
pub struct ExtensionSeries<'a, K: PointEval + ?Sized> {
    phi: &'a SequenceSpec,
    kernel: &'a K,
    plan: Plan,
    tail_bound: f64,
    cache: Option<(i64, Vec<Complex64>)>,
}

impl<'a, K: PointEval + ?Sized> ExtensionSeries<'a, K> {
    pub fn new(phi: &'a SequenceSpec, kernel: &'a K, truncation: u64) -> Result<Self> {
        if let Some(pairs) = phi.support() {
            return Ok(Self {
                phi,
                kernel,
                plan: Plan::Finite(pairs),
                tail_bound: 0.0,
                cache: None,
            });
        }
        let sup_phi = phi.sup_norm();
        if !sup_phi.is_finite() {
            return Err(Error::precondition("φ is not bounded"));
        }
        let (plan, tail_bound) = match kernel.envelope() {
            Envelope::Compact { lo, hi, .. } => (Plan::KernelSupport { lo, hi }, 0.0),
            Envelope::Decay { bound, .. } if bound.k > 1.0 => (
                Plan::Centered { n: truncation as i64 },
                sup_phi * bound.lattice_tail(truncation),
            ),
            _ => {
                return Err(Error::NotCertifiable(
                    "φ is infinitely supported and Λ has neither compact support nor decay with k > 1; \
                     the series cannot be certified to converge"
                        .into(),
                ))
            }
        };
        Ok(Self {
            phi,
            kernel,
            plan,
            tail_bound,
            cache: None,
        })
    }

    /// Precomputes `φ(n)` for every index a window `[lo, hi]` of ξ can touch.
    pub fn with_cache(mut self, lo: f64, hi: f64) -> Self {
        let (a, b) = match self.plan {
            Plan::Finite(_) => return self,
            Plan::KernelSupport { lo: klo, hi: khi } => ((lo - khi).floor() as i64 - 1, (hi - klo).ceil() as i64 + 1),
            Plan::Centered { n } => (lo.floor() as i64 - n - 1, hi.floor() as i64 + n + 1),
        };
        let values = (a..=b).map(|n| self.phi.value(n)).collect();
        self.cache = Some((a, values));
        self
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    fn phi_at(&self, n: i64) -> Complex64 {
        if let Some((start, values)) = &self.cache {
            let i = n - start;
            if i >= 0 && (i as usize) < values.len() {
                return values[i as usize];
            }
        }
        self.phi.value(n)
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        match &self.plan {
            Plan::Finite(pairs) => pairs
                .iter()
                .map(|(n, v)| v * self.kernel.eval(xi - *n as f64))
                .sum(),
            Plan::KernelSupport { lo, hi } => {
                let first = (xi - hi).ceil() as i64;
                let last = (xi - lo).floor() as i64;
                (first..=last)
                    .map(|n| self.phi_at(n) * self.kernel.eval(xi - n as f64))
                    .sum()
            }
            Plan::Centered { n } => {
                let m = xi.floor() as i64;
                ((m - n)..=(m + n))
                    .map(|k| self.phi_at(k) * self.kernel.eval(xi - k as f64))
                    .sum()
            }
        }
    }

    pub fn sample(&self, grid: &GridConfig) -> GridFunction {
        let values = grid.points().par_iter().map(|&x| self.eval(x)).collect();
        GridFunction::on_window(grid, values, Some(self.tail_bound))
    }
}

/// Samples of `W_{φ,Λ}` on the window grid.
pub fn extend<K: PointEval + ?Sized>(phi: &SequenceSpec, kernel: &K, grid: &GridConfig) -> Result<GridFunction> {
    grid.validate()?;
    let series = ExtensionSeries::new(phi, kernel, grid.truncation)?.with_cache(-grid.halfwidth, grid.halfwidth);
    Ok(series.sample(grid))
}

/// Outcome of the Poisson constancy check `Σ_n Ŝ(x + n) = S(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    /// Real part of the mean of the truncated sums.
    pub constant_estimate: f64,
    /// `max_x |Σ_{|n|≤N} Ŝ(x + n) − S(0)|` over the probe points.
    pub max_deviation: f64,
    pub s_at_zero: f64,
    pub tail_bound: f64,
    /// Accumulated quadrature error bound when Ŝ has no closed form, else zero.
    pub quadrature_error: f64,
    /// True when the tail bound comes from a fitted decay rather than a structural certificate.
    pub tail_is_estimate: bool,
    pub probes: usize,
}

/// Number of probe points on `[0, 1]` for the Poisson check.
pub const POISSON_PROBES: usize = 101;

const QUARTER_SUPPORT_SLACK: f64 = 1e-12;

/// Requires `supp S ⊆ [1/4, 3/4]` structurally.
pub fn check_quarter_support(s: &FunctionSpec) -> Result<()> {
    match s.support() {
        Some((lo, hi)) if lo >= 0.25 - QUARTER_SUPPORT_SLACK && hi <= 0.75 + QUARTER_SUPPORT_SLACK => Ok(()),
        Some((lo, hi)) => Err(Error::precondition(format!(
            "supp S = [{lo}, {hi}] is not inside [1/4, 3/4]; apply support_normalize first"
        ))),
        None => Err(Error::precondition(
            "S has no structurally compact support; apply support_normalize to a compactly supported S",
        )),
    }
}

pub fn poisson_constant(s: &FunctionSpec, grid: &GridConfig) -> Result<PoissonReport> {
    grid.validate()?;
    check_quarter_support(s)?;
    let terms = 2 * grid.truncation + 1;
    // Per-evaluation target so the summed quadrature error stays under the grid tolerance.
    let per_point = grid.tolerance / terms as f64;
    let ft = Transform::of(s, per_point)?;
    let quadrature_error = if ft.is_analytic() { 0.0 } else { grid.tolerance };
    let (shifts, tail_bound) = Shifts::for_envelope(ft.envelope(), grid.truncation)?;
    let s0 = s.eval(0.0).re;
    let sums: Vec<Complex64> = (0..POISSON_PROBES)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / (POISSON_PROBES - 1) as f64;
            let range = match shifts {
                Shifts::Support { .. } => shifts.range(x),
                Shifts::Truncated { n } => -n..=n,
            };
            range.map(|n| ft.eval(x + n as f64)).sum()
        })
        .collect();
    let mean: Complex64 = sums.iter().sum::<Complex64>() / sums.len() as f64;
    let max_deviation = sums
        .iter()
        .map(|v| (v - Complex64::new(s0, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(PoissonReport {
        constant_estimate: mean.re,
        max_deviation,
        s_at_zero: s0,
        tail_bound,
        quadrature_error,
        tail_is_estimate: ft.envelope_is_estimate(),
        probes: POISSON_PROBES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ClosedForm, DecayRule, Expr};

    fn grid() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn indicator_and_triangle_tile() {
        for e in [Expr::indicator(0.0, 1.0), Expr::triangle(0.0, 1.0)] {
            let f = FunctionSpec::from(e);
            let p = periodization_sup(&f, &grid()).unwrap();
            assert!((p.delta - 1.0).abs() < 1e-15);
            assert_eq!(p.tail_bound, 0.0);
            let per = periodize(&f, &grid()).unwrap();
            assert!(per.values.iter().all(|v| (v.re - 1.0).abs() < 1e-15 && v.im == 0.0));
        }
    }

    #[test]
    fn gaussian_theta_value() {
        // Independent oracle: θ(0) = Σ_{|n|≤6} e^{−π n²}.
        let theta: f64 = (-6..=6).map(|n: i32| (-std::f64::consts::PI * (n * n) as f64).exp()).sum();
        let f = FunctionSpec::from(Expr::gaussian(1.0));
        let p = periodization_sup(&f, &grid()).unwrap();
        assert!((p.delta - theta).abs() < 1e-14);
        assert_eq!(p.argmax, 0.0);
        assert!(p.tail_bound < 1e-10);
    }

    #[test]
    fn gaussian_periodization_symmetry() {
        let f = FunctionSpec::from(Expr::gaussian(1.0));
        let per = periodize(&f, &grid()).unwrap();
        let n = per.len();
        for j in 1..n {
            assert!((per.values[j] - per.values[n - j]).norm() < 1e-14);
        }
        // About 1/2: θ(1/2 + s) = θ(1/2 − s).
        for j in 0..n / 2 {
            assert!((per.values[n / 2 + j] - per.values[n / 2 - j]).norm() < 1e-14);
        }
    }

    #[test]
    fn translate_by_one_keeps_delta() {
        for e in [Expr::gaussian(0.7), Expr::triangle(0.3, 1.4), Expr::raised_cosine_ft(0.5)] {
            let f = FunctionSpec::from(e.clone());
            let g = FunctionSpec::from(e.translate(1.0));
            let a = periodization_sup(&f, &grid()).unwrap().delta;
            let b = periodization_sup(&g, &grid()).unwrap().delta;
            assert!((a - b).abs() <= grid().tolerance, "{a} vs {b}");
        }
    }

    #[test]
    fn slow_decay_is_rejected() {
        let f = FunctionSpec::from(Expr::rational_decay(1.0));
        assert!(matches!(periodization_sup(&f, &grid()), Err(Error::NotCertifiable(_))));
        let c = FunctionSpec::from(Expr::constant(1.0));
        assert!(periodize(&c, &grid()).is_err());
    }

    #[test]
    fn delta_sequence_reproduces_kernel() {
        let lam = FunctionSpec::from(Expr::gaussian(0.8).modulate(0.3));
        let w = extend(&SequenceSpec::delta(), &lam, &grid()).unwrap();
        for (xi, v) in w.iter() {
            assert_eq!(v, lam.eval(xi));
        }
        assert_eq!(w.tail_bound, Some(0.0));
    }

    #[test]
    fn constant_sequence_with_triangle_is_one() {
        let phi = SequenceSpec::closed(ClosedForm::new(DecayRule::Constant))
            .unwrap()
            .truncate(64);
        let lam = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        let w = extend(&phi, &lam, &grid()).unwrap();
        assert!(w.values.iter().all(|v| (v.re - 1.0).abs() < 1e-14));
    }

    #[test]
    fn infinite_sequence_needs_decay() {
        let one = SequenceSpec::closed(ClosedForm::new(DecayRule::Constant)).unwrap();
        let lam = FunctionSpec::from(Expr::sinc(1.0));
        assert!(extend(&one, &lam, &grid()).is_err());
        let ok = FunctionSpec::from(Expr::sinc_squared(1.0));
        let w = extend(&one, &ok, &grid()).unwrap();
        // Σ_n sinc²(ξ − n) = 1; the truncated sum stays within the certified tail.
        let tail = w.tail_bound.unwrap();
        assert!(w.values.iter().all(|v| (v.re - 1.0).abs() <= tail));
    }

    #[test]
    fn poisson_raised_cosine_is_zero() {
        let s = FunctionSpec::from(Expr::raised_cosine(0.25, 0.75));
        let r = poisson_constant(&s, &grid()).unwrap();
        assert_eq!(r.s_at_zero, 0.0);
        assert!(r.max_deviation <= r.tail_bound + grid().tolerance);
        assert!(r.constant_estimate.abs() <= r.tail_bound + grid().tolerance);
    }

    #[test]
    fn poisson_scales_linearly() {
        let s = FunctionSpec::from(Expr::triangle(0.5, 0.25));
        let s2 = FunctionSpec::from(Expr::triangle(0.5, 0.25).scale(2.0));
        let a = poisson_constant(&s, &grid()).unwrap();
        let b = poisson_constant(&s2, &grid()).unwrap();
        assert!(a.max_deviation <= a.tail_bound + 1e-8);
        assert!((b.max_deviation - 2.0 * a.max_deviation).abs() <= 1e-12 + 1e-9 * a.max_deviation);
    }

    #[test]
    fn poisson_rejects_bad_support() {
        let s = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        assert!(matches!(
            poisson_constant(&s, &grid()),
            Err(Error::Precondition { .. })
        ));
    }
}
