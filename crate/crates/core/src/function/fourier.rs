use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{GridConfig, GridFunction};
use super::spec::{DecayBound, Envelope, FunctionSpec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Integration windows wider than this are refused instead of integrated.
const MAX_WINDOW: f64 = 4096.0;

/// Anything that can be evaluated pointwise and carries a structural envelope.
pub trait PointEval: Sync {
    fn eval(&self, x: f64) -> Complex64;
    fn envelope(&self) -> Envelope;
    /// True when the decay part of the envelope is fitted from samples rather than proven.
    fn envelope_is_estimate(&self) -> bool {
        false
    }
}

impl PointEval for FunctionSpec {
    fn eval(&self, x: f64) -> Complex64 {
        FunctionSpec::eval(self, x)
    }
    fn envelope(&self) -> Envelope {
        FunctionSpec::envelope(self)
    }
}

/// Fourier transform evaluated pointwise by adaptive quadrature.
#[derive(Debug, Clone)]
pub struct QuadratureFt {
    f: FunctionSpec,
    lo: f64,
    hi: f64,
    breakpoints: Vec<f64>,
    tolerance: f64,
    l1_norm: f64,
    fitted: Option<DecayBound>,
}

impl QuadratureFt {
    /// Per-point target `tolerance`: half goes to window truncation, half to quadrature.
    pub fn new(f: FunctionSpec, tolerance: f64) -> Result<Self> {
        let (lo, hi) = f.integration_window(0.5 * tolerance).ok_or_else(|| {
            Error::NotCertifiable(
                "Fourier transform needs compact support or a decay certificate with k > 1".into(),
            )
        })?;
        if hi - lo > 2.0 * MAX_WINDOW {
            return Err(Error::NotCertifiable(format!(
                "integration window [{lo:.3e}, {hi:.3e}] too wide for tolerance {tolerance:e}"
            )));
        }
        let breakpoints = f.breakpoints(lo, hi);
        let opts = QuadOptions {
            abs_tol: 1e-3 * tolerance,
            max_panel_width: 1.0,
            ..Default::default()
        };
        let l1_norm = integrate(&|x| Complex64::new(f.eval(x).norm(), 0.0), lo, hi, &breakpoints, &opts)?
            .value
            .re;
        let mut ft = Self {
            f,
            lo,
            hi,
            breakpoints,
            tolerance,
            l1_norm,
            fitted: None,
        };
        if matches!(ft.f.envelope(), Envelope::Compact { .. }) {
            ft.fitted = Some(ft.fit_decay()?);
        }
        Ok(ft)
    }

    pub fn function(&self) -> &FunctionSpec {
        &self.f
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    pub fn try_eval(&self, xi: f64) -> Result<Complex64> {
        let width = (2.0 / (1.0 + xi.abs())).min(1.0);
        let opts = QuadOptions {
            abs_tol: 0.5 * self.tolerance,
            max_panel_width: width,
            max_panels: 200_000,
        };
        let kernel = |x: f64| self.f.eval(x) * Complex64::from_polar(1.0, -2.0 * PI * xi * x);
        Ok(integrate(&kernel, self.lo, self.hi, &self.breakpoints, &opts)?.value)
    }

    /// `|f̂(ξ)| ≤ C/ξ²` fitted on `8 ≤ |ξ| ≤ 64`, then folded into `c/(1+|ξ|)²` with the
    /// `‖f‖₁` bound near the origin.
    fn fit_decay(&self) -> Result<DecayBound> {
        let mut c: f64 = 0.0;
        let mut xi = 8.0;
        while xi <= 64.0 {
            for s in [xi, -xi] {
                c = c.max(self.try_eval(s)?.norm() * s * s);
            }
            xi += 0.5;
        }
        Ok(DecayBound {
            c: 4.0 * (2.0 * c).max(self.l1_norm),
            k: 2.0,
        })
    }
}

impl PointEval for QuadratureFt {
    fn eval(&self, x: f64) -> Complex64 {
        self.try_eval(x).expect("quadrature converges on a certified window")
    }
    fn envelope(&self) -> Envelope {
        match self.fitted {
            Some(bound) => Envelope::Decay {
                bound,
                sup: self.l1_norm,
            },
            None => Envelope::Bounded { sup: self.l1_norm },
        }
    }
    fn envelope_is_estimate(&self) -> bool {
        self.fitted.is_some()
    }
}

/// The Fourier transform of a `FunctionSpec`: closed form when the grammar has one, quadrature
/// otherwise.
#[derive(Debug, Clone)]
pub enum Transform {
    Analytic(FunctionSpec),
    Quadrature(QuadratureFt),
}

impl Transform {
    pub fn of(f: &FunctionSpec, tolerance: f64) -> Result<Self> {
        match f.analytic_ft() {
            Some(ft) => Ok(Transform::Analytic(ft)),
            None => Ok(Transform::Quadrature(QuadratureFt::new(f.clone(), tolerance)?)),
        }
    }

    /// Forces the quadrature route even when a closed form exists.
    pub fn by_quadrature(f: &FunctionSpec, tolerance: f64) -> Result<Self> {
        Ok(Transform::Quadrature(QuadratureFt::new(f.clone(), tolerance)?))
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Transform::Analytic(_))
    }
}

impl PointEval for Transform {
    fn eval(&self, x: f64) -> Complex64 {
        match self {
            Transform::Analytic(f) => f.eval(x),
            Transform::Quadrature(q) => q.eval(x),
        }
    }
    fn envelope(&self) -> Envelope {
        match self {
            Transform::Analytic(f) => f.envelope(),
            Transform::Quadrature(q) => q.envelope(),
        }
    }
    fn envelope_is_estimate(&self) -> bool {
        match self {
            Transform::Analytic(_) => false,
            Transform::Quadrature(q) => q.envelope_is_estimate(),
        }
    }
}

/// Samples of `f̂` on the window grid. Uses the closed form when one exists; otherwise adaptive
/// quadrature with per-point error target `grid.tolerance`.
pub fn fourier_transform(f: &FunctionSpec, grid: &GridConfig) -> Result<GridFunction> {
    grid.validate()?;
    let t = Transform::of(f, grid.tolerance)?;
    sample(&t, grid)
}

/// Quadrature-only transform, used to cross-check closed forms.
pub fn fourier_transform_quadrature(f: &FunctionSpec, grid: &GridConfig) -> Result<GridFunction> {
    grid.validate()?;
    let q = QuadratureFt::new(f.clone(), grid.tolerance)?;
    let values = grid
        .points()
        .par_iter()
        .map(|&xi| q.try_eval(xi))
        .collect::<Result<Vec<_>>>()?;
    Ok(GridFunction::on_window(grid, values, None))
}

pub(crate) fn sample<K: PointEval + ?Sized>(f: &K, grid: &GridConfig) -> Result<GridFunction> {
    let values = grid.points().par_iter().map(|&x| f.eval(x)).collect();
    Ok(GridFunction::on_window(grid, values, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Expr;

    fn grid() -> GridConfig {
        GridConfig::new(4.0, 1.0 / 16.0, 64, 1e-8).unwrap()
    }

    #[test]
    fn indicator_transform_is_sinc() {
        let f = FunctionSpec::from(Expr::indicator(-0.5, 0.5));
        let ft = fourier_transform(&f, &grid()).unwrap();
        for (xi, v) in ft.iter() {
            let expected = if xi == 0.0 { 1.0 } else { (PI * xi).sin() / (PI * xi) };
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-14, "xi = {xi}");
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let f = FunctionSpec::from(Expr::gaussian(1.0));
        let ft = fourier_transform(&f, &grid()).unwrap();
        for (xi, v) in ft.iter() {
            assert!((v.re - (-PI * xi * xi).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn every_primitive_matches_quadrature() {
        let g = grid();
        let cases = vec![
            Expr::indicator(-0.3, 1.1),
            Expr::triangle(0.0, 1.0),
            Expr::triangle(0.4, 0.7),
            Expr::gaussian(1.0),
            Expr::gaussian(0.6).translate(1.5),
            Expr::raised_cosine(-1.0, 1.0),
            Expr::raised_cosine(0.25, 0.75),
            Expr::triangle(0.0, 1.0).modulate(0.75).dilate(-2.0).scale(Complex64::new(0.5, 1.0)),
            Expr::Sum(vec![Expr::gaussian(1.0), Expr::indicator(0.0, 1.0)]),
        ];
        for e in cases {
            let f = FunctionSpec::from(e.clone());
            let analytic = fourier_transform(&f, &g).unwrap();
            let quad = fourier_transform_quadrature(&f, &g).unwrap();
            let d = analytic.sup_distance(&quad);
            assert!(d <= g.tolerance, "{e:?}: deviation {d:e}");
        }
    }

    #[test]
    fn non_integrable_rejected() {
        let f = FunctionSpec::from(Expr::rational_decay(1.0));
        assert!(matches!(fourier_transform(&f, &grid()), Err(Error::NotCertifiable(_))));
        let c = FunctionSpec::from(Expr::constant(1.0));
        assert!(fourier_transform(&c, &grid()).is_err());
    }

    #[test]
    fn poly_piece_uses_quadrature() {
        // ∫_0^1 x dx = 1/2 at ξ = 0.
        let f = FunctionSpec::from(Expr::poly_piece(vec![0.0, 1.0], 0.0, 1.0));
        let t = Transform::of(&f, 1e-10).unwrap();
        assert!(!t.is_analytic());
        assert!((t.eval(0.0).re - 0.5).abs() < 1e-10);
        // ∫_0^1 x e^{−2πix} dx = i/(2π)
        assert!((t.eval(1.0) - Complex64::new(0.0, 1.0 / (2.0 * PI))).norm() < 1e-10);
    }
}
