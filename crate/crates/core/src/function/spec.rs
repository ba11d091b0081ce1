use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use crate::error::{Error, Result};

/// Certificate `|f(x)| ≤ c / (1 + |x|)^k` for all real `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBound {
    pub c: f64,
    pub k: f64,
}

impl DecayBound {
    pub fn at(&self, x: f64) -> f64 {
        self.c * (1.0 + x.abs()).powf(-self.k)
    }

    /// Bound on `Σ_{|j| > n} |f(t + j)|` uniformly in `t ∈ [0, 1)`. Needs `k > 1` and `n ≥ 1`.
    pub fn lattice_tail(&self, n: u64) -> f64 {
        debug_assert!(self.k > 1.0);
        let n = n.max(1) as f64;
        2.0 * self.c * n.powf(1.0 - self.k) / (self.k - 1.0)
    }

    /// Bound on `∫_{|x| > l} |f|`. Needs `k > 1`.
    pub fn integral_tail(&self, l: f64) -> f64 {
        2.0 * self.c * (1.0 + l).powf(1.0 - self.k) / (self.k - 1.0)
    }

    /// Smallest window half-width whose outside integral is at most `tol`.
    pub fn window_for(&self, tol: f64) -> f64 {
        ((2.0 * self.c / ((self.k - 1.0) * tol)).powf(1.0 / (self.k - 1.0)) - 1.0).max(0.0)
    }
}

/// Structural envelope of an expression: where it lives and how fast it decays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Compact { lo: f64, hi: f64, sup: f64 },
    Decay { bound: DecayBound, sup: f64 },
    Bounded { sup: f64 },
}

impl Envelope {
    pub fn sup(&self) -> f64 {
        match *self {
            Envelope::Compact { sup, .. } | Envelope::Decay { sup, .. } | Envelope::Bounded { sup } => sup,
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Envelope::Compact { lo, hi, .. } => Some((lo, hi)),
            _ => None,
        }
    }

    /// A decay certificate with exponent `k`, also for compactly supported envelopes.
    fn as_decay(&self, k: f64) -> Option<DecayBound> {
        match *self {
            Envelope::Compact { lo, hi, sup } => {
                let r = lo.abs().max(hi.abs());
                Some(DecayBound {
                    c: sup * (1.0 + r).powf(k),
                    k,
                })
            }
            Envelope::Decay { bound, .. } => Some(bound),
            Envelope::Bounded { .. } => None,
        }
    }

    pub fn decay(&self) -> Option<DecayBound> {
        match *self {
            Envelope::Decay { bound, .. } => Some(bound),
            _ => None,
        }
    }

    /// Compact support or a decay certificate with `k > 1`.
    pub fn is_integrable(&self) -> bool {
        match *self {
            Envelope::Compact { .. } => true,
            Envelope::Decay { bound, .. } => bound.k > 1.0,
            Envelope::Bounded { .. } => false,
        }
    }
}

/// `(1 + t)^k e^{−π t²/σ²}` maximized over `t ≥ 0`.
fn gaussian_decay(sigma: f64, k: f64) -> DecayBound {
    let t = 0.5 * (-1.0 + (1.0 + 2.0 * k * sigma * sigma / PI).sqrt());
    DecayBound {
        c: (1.0 + t).powf(k) * (-PI * t * t / (sigma * sigma)).exp(),
        k,
    }
}

const GAUSSIAN_DECAY_EXPONENT: f64 = 8.0;

pub(crate) fn envelope_of(expr: &Expr) -> Envelope {
    match expr {
        Expr::Indicator { a, b } => Envelope::Compact { lo: *a, hi: *b, sup: 1.0 },
        Expr::Triangle { center, halfwidth } => Envelope::Compact {
            lo: center - halfwidth,
            hi: center + halfwidth,
            sup: 1.0,
        },
        Expr::RaisedCosine { a, b } => Envelope::Compact { lo: *a, hi: *b, sup: 1.0 },
        Expr::PolyPiece { coeffs, a, b } => {
            let r = a.abs().max(b.abs());
            let sup = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * r.powi(k as i32))
                .sum();
            Envelope::Compact { lo: *a, hi: *b, sup }
        }
        Expr::Gaussian { sigma } => Envelope::Decay {
            bound: gaussian_decay(*sigma, GAUSSIAN_DECAY_EXPONENT),
            sup: 1.0,
        },
        Expr::Sinc { width } => Envelope::Decay {
            bound: DecayBound {
                c: (2.0 * width).max(2.0 / PI),
                k: 1.0,
            },
            sup: *width,
        },
        Expr::SincSquared { width } => Envelope::Decay {
            bound: DecayBound {
                c: (4.0 * width).max(4.0 / (PI * PI * width)),
                k: 2.0,
            },
            sup: *width,
        },
        Expr::RaisedCosineFt { halfwidth } => {
            // |f| ≤ h everywhere; for |x| ≥ 1/h, |1 − 4h²x²| ≥ 3h²x² gives |f| ≤ 1/(6π h² |x|³).
            let h = *halfwidth;
            let t = (1.0 / h).max(1.0);
            let c = (h * (1.0 + t).powi(3)).max(8.0 / (6.0 * PI * h * h));
            Envelope::Decay {
                bound: DecayBound { c, k: 3.0 },
                sup: h,
            }
        }
        Expr::RationalDecay { exponent } => Envelope::Decay {
            bound: DecayBound { c: 1.0, k: *exponent },
            sup: 1.0,
        },
        Expr::Constant { value } => {
            if *value == 0.0 {
                Envelope::Compact { lo: 0.0, hi: 0.0, sup: 0.0 }
            } else {
                Envelope::Bounded { sup: value.abs() }
            }
        }
        Expr::Translate { shift, child } => match envelope_of(child) {
            Envelope::Compact { lo, hi, sup } => Envelope::Compact {
                lo: lo + shift,
                hi: hi + shift,
                sup,
            },
            Envelope::Decay { bound, sup } => Envelope::Decay {
                bound: DecayBound {
                    c: bound.c * (1.0 + shift.abs()).powf(bound.k),
                    k: bound.k,
                },
                sup,
            },
            b @ Envelope::Bounded { .. } => b,
        },
        Expr::Modulate { child, .. } => envelope_of(child),
        Expr::Dilate { alpha, child } => match envelope_of(child) {
            Envelope::Compact { lo, hi, sup } => {
                let (a, b) = (lo / alpha, hi / alpha);
                Envelope::Compact {
                    lo: a.min(b),
                    hi: a.max(b),
                    sup,
                }
            }
            Envelope::Decay { bound, sup } => {
                let c = if alpha.abs() >= 1.0 {
                    bound.c
                } else {
                    bound.c / alpha.abs().powf(bound.k)
                };
                Envelope::Decay {
                    bound: DecayBound { c, k: bound.k },
                    sup,
                }
            }
            b @ Envelope::Bounded { .. } => b,
        },
        Expr::Scale { factor, child } => {
            let s = factor.norm();
            match envelope_of(child) {
                Envelope::Compact { lo, hi, sup } => Envelope::Compact { lo, hi, sup: sup * s },
                Envelope::Decay { bound, sup } => Envelope::Decay {
                    bound: DecayBound {
                        c: bound.c * s,
                        k: bound.k,
                    },
                    sup: sup * s,
                },
                Envelope::Bounded { sup } => Envelope::Bounded { sup: sup * s },
            }
        }
        Expr::Sum(children) => {
            let envs: Vec<Envelope> = children.iter().map(envelope_of).collect();
            let sup: f64 = envs.iter().map(Envelope::sup).sum();
            if envs.iter().all(|e| matches!(e, Envelope::Compact { .. })) {
                let lo = envs.iter().filter_map(|e| e.support()).map(|s| s.0).fold(f64::INFINITY, f64::min);
                let hi = envs.iter().filter_map(|e| e.support()).map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
                return Envelope::Compact { lo, hi, sup };
            }
            if envs.iter().any(|e| matches!(e, Envelope::Bounded { .. })) {
                return Envelope::Bounded { sup };
            }
            let k = envs
                .iter()
                .filter_map(Envelope::decay)
                .map(|d| d.k)
                .fold(f64::INFINITY, f64::min);
            let c = envs
                .iter()
                .map(|e| e.as_decay(k).expect("compact or decaying").c)
                .sum();
            Envelope::Decay {
                bound: DecayBound { c, k },
                sup,
            }
        }
        Expr::Product(children) => {
            let envs: Vec<Envelope> = children.iter().map(envelope_of).collect();
            let sup: f64 = envs.iter().map(Envelope::sup).product();
            let compact: Vec<(f64, f64)> = envs.iter().filter_map(Envelope::support).collect();
            if !compact.is_empty() {
                let lo = compact.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
                let hi = compact.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
                let (lo, hi) = if lo <= hi { (lo, hi) } else { (lo, lo) };
                return Envelope::Compact { lo, hi, sup };
            }
            let decays: Vec<DecayBound> = envs.iter().filter_map(Envelope::decay).collect();
            if decays.is_empty() {
                return Envelope::Bounded { sup };
            }
            let mut c = 1.0;
            let mut k = 0.0;
            for e in &envs {
                match e.decay() {
                    Some(d) => {
                        c *= d.c;
                        k += d.k;
                    }
                    None => c *= e.sup(),
                }
            }
            Envelope::Decay {
                bound: DecayBound { c, k },
                sup,
            }
        }
        Expr::Periodic(child) => Envelope::Bounded {
            sup: envelope_of(child).sup(),
        },
    }
}

/// Closed-form Fourier transform `f̂(ξ) = ∫ f(x) e^{−2πiξx} dx` by structural recursion.
pub(crate) fn analytic_ft(expr: &Expr) -> Option<Expr> {
    Some(match expr {
        Expr::Indicator { a, b } => {
            if a == b {
                Expr::constant(0.0)
            } else {
                Expr::sinc(b - a).modulate(-0.5 * (a + b))
            }
        }
        Expr::Triangle { center, halfwidth } => Expr::sinc_squared(*halfwidth).modulate(-center),
        Expr::Gaussian { sigma } => Expr::gaussian(1.0 / sigma).scale(*sigma),
        Expr::RaisedCosine { a, b } => Expr::raised_cosine_ft(0.5 * (b - a)).modulate(-0.5 * (a + b)),
        Expr::Sinc { width } => Expr::indicator(-0.5 * width, 0.5 * width),
        Expr::SincSquared { width } => Expr::triangle(0.0, *width),
        Expr::RaisedCosineFt { halfwidth } => Expr::raised_cosine(-halfwidth, *halfwidth),
        Expr::Constant { value } if *value == 0.0 => Expr::constant(0.0),
        Expr::PolyPiece { .. } | Expr::RationalDecay { .. } | Expr::Constant { .. } | Expr::Periodic(_) => {
            return None
        }
        Expr::Translate { shift, child } => analytic_ft(child)?.modulate(-shift),
        Expr::Modulate { freq, child } => analytic_ft(child)?.translate(*freq),
        Expr::Dilate { alpha, child } => analytic_ft(child)?.dilate(1.0 / alpha).scale(1.0 / alpha.abs()),
        Expr::Scale { factor, child } => analytic_ft(child)?.scale(*factor),
        Expr::Sum(children) => Expr::Sum(children.iter().map(analytic_ft).collect::<Option<Vec<_>>>()?),
        Expr::Product(children) => {
            // Only constant multiples are expressible; convolution is not in the grammar.
            let mut factor = Complex64::new(1.0, 0.0);
            let mut rest = None;
            for c in children {
                match c {
                    Expr::Constant { value } => factor *= *value,
                    other if rest.is_none() => rest = Some(other),
                    _ => return None,
                }
            }
            analytic_ft(rest?)?.scale(factor)
        }
    })
}

/// A function on the real line given by an expression tree, with an optional user-declared
/// decay certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    expr: Expr,
    declared_decay: Option<DecayBound>,
}

impl FunctionSpec {
    pub fn new(expr: Expr) -> Result<Self> {
        expr.validate()?;
        Ok(Self {
            expr,
            declared_decay: None,
        })
    }

    /// Attaches a decay certificate after checking it against samples on `[−200, 200]`.
    pub fn with_decay_bound(mut self, bound: DecayBound) -> Result<Self> {
        if !(bound.c >= 0.0 && bound.c.is_finite() && bound.k > 0.0 && bound.k.is_finite()) {
            return Err(Error::Structural(format!(
                "decay bound needs c >= 0 and k > 0, got ({}, {})",
                bound.c, bound.k
            )));
        }
        let mut x = -200.0;
        while x <= 200.0 {
            let v = self.expr.eval(x).norm();
            if v > bound.at(x) * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::Structural(format!(
                    "declared decay bound violated at x = {x}: |f| = {v:e} > {:e}",
                    bound.at(x)
                )));
            }
            x += 0.37;
        }
        self.declared_decay = Some(bound);
        Ok(self)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn declared_decay(&self) -> Option<DecayBound> {
        self.declared_decay
    }

    pub fn into_expr(self) -> Expr {
        self.expr
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.expr.eval(x)
    }

    pub fn envelope(&self) -> Envelope {
        let structural = envelope_of(&self.expr);
        match (structural, self.declared_decay) {
            (Envelope::Bounded { sup }, Some(d)) => Envelope::Decay {
                bound: d,
                sup: sup.min(d.c),
            },
            (Envelope::Decay { bound, sup }, Some(d)) if d.k > bound.k => Envelope::Decay { bound: d, sup },
            (e, _) => e,
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.envelope().support()
    }

    pub fn sup_bound(&self) -> f64 {
        self.envelope().sup()
    }

    pub fn is_integrable(&self) -> bool {
        self.envelope().is_integrable()
    }

    pub fn analytic_ft(&self) -> Option<FunctionSpec> {
        analytic_ft(&self.expr).map(|expr| FunctionSpec {
            expr,
            declared_decay: None,
        })
    }

    /// `F` with `F̂ = self`, when the grammar can express it: the reflected transform.
    pub fn inverse_ft(&self) -> Option<FunctionSpec> {
        let ft = analytic_ft(&self.expr)?;
        let expr = if ft.is_even() { ft } else { ft.reflect() };
        Some(FunctionSpec {
            expr,
            declared_decay: None,
        })
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> FunctionSpec {
        let expr = if self.expr.is_even() {
            self.expr.clone()
        } else {
            self.expr.clone().reflect()
        };
        FunctionSpec {
            expr,
            declared_decay: self.declared_decay,
        }
    }

    /// Derived function without a declared certificate.
    pub fn map(&self, f: impl FnOnce(Expr) -> Expr) -> FunctionSpec {
        FunctionSpec {
            expr: f(self.expr.clone()),
            declared_decay: None,
        }
    }

    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.expr.breakpoints(lo, hi)
    }

    /// Finite interval that carries the integral of `|f|` up to `tol`, or `None` when the
    /// function is not certified integrable.
    pub fn integration_window(&self, tol: f64) -> Option<(f64, f64)> {
        match self.envelope() {
            Envelope::Compact { lo, hi, .. } => Some((lo, hi)),
            Envelope::Decay { bound, .. } if bound.k > 1.0 => {
                let l = bound.window_for(tol);
                Some((-l, l))
            }
            _ => None,
        }
    }
}

impl From<Expr> for FunctionSpec {
    /// Panics on an invalid tree; use [`FunctionSpec::new`] for untrusted input.
    fn from(expr: Expr) -> Self {
        FunctionSpec::new(expr).expect("valid expression tree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_certificate_holds() {
        for sigma in [0.3, 1.0, 2.5] {
            let f = Expr::gaussian(sigma);
            let b = gaussian_decay(sigma, GAUSSIAN_DECAY_EXPONENT);
            for i in 0..4000 {
                let x = -50.0 + 0.025 * i as f64;
                assert!(f.eval(x).re <= b.at(x) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn structural_certificates_hold_on_samples() {
        let cases = vec![
            Expr::sinc(0.7),
            Expr::sinc(3.0),
            Expr::sinc_squared(0.25),
            Expr::sinc_squared(2.0),
            Expr::raised_cosine_ft(0.25),
            Expr::raised_cosine_ft(1.0),
            Expr::raised_cosine_ft(3.0),
            Expr::gaussian(1.0).translate(3.0),
            Expr::gaussian(1.0).dilate(0.5),
            Expr::Sum(vec![Expr::gaussian(1.0), Expr::triangle(2.0, 1.0).scale(2.0)]),
            Expr::Product(vec![Expr::gaussian(1.0), Expr::sinc(1.0)]),
        ];
        for e in cases {
            let d = envelope_of(&e).decay().unwrap();
            for i in 0..20_000 {
                let x = -100.0 + 0.01 * i as f64 + 0.003;
                let v = e.eval(x).norm();
                assert!(v <= d.at(x) * (1.0 + 1e-9), "{e:?} at {x}: {v} > {}", d.at(x));
            }
        }
    }

    #[test]
    fn support_of_normalized_shapes() {
        let f = FunctionSpec::from(Expr::triangle(0.0, 1.0).dilate(4.0).translate(0.5));
        assert_eq!(f.support(), Some((0.25, 0.75)));
        let p = FunctionSpec::from(Expr::Product(vec![Expr::indicator(0.0, 2.0), Expr::gaussian(1.0)]));
        assert_eq!(p.support(), Some((0.0, 2.0)));
    }

    #[test]
    fn inverse_ft_of_sinc_squared_is_triangle() {
        let lam = FunctionSpec::from(Expr::sinc_squared(1.0));
        assert_eq!(lam.inverse_ft().unwrap().expr(), &Expr::triangle(0.0, 1.0));
        assert!(lam.inverse_ft().unwrap().is_integrable());
        let ind = FunctionSpec::from(Expr::indicator(0.0, 1.0));
        assert!(!ind.inverse_ft().unwrap().is_integrable());
    }

    #[test]
    fn declared_decay_is_checked() {
        let f = FunctionSpec::from(Expr::rational_decay(1.0));
        assert!(f.clone().with_decay_bound(DecayBound { c: 1.0, k: 2.0 }).is_err());
        let g = f.with_decay_bound(DecayBound { c: 1.0, k: 1.0 }).unwrap();
        assert!(!g.is_integrable());
    }
}
