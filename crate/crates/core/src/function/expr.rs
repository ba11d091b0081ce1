use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Expression tree over closed-form primitives on the real line.
///
/// Primitives carry their parameters inline; combinators own their children. Indicator and
/// polynomial pieces are half-open, `[a, b)`, so that unit translates tile the line.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// `1` on `[a, b)`.
    Indicator { a: f64, b: f64 },
    /// `max(0, 1 − |x − center| / halfwidth)`.
    Triangle { center: f64, halfwidth: f64 },
    /// `exp(−π x² / σ²)`; `σ = 1` is its own Fourier transform.
    Gaussian { sigma: f64 },
    /// `(1 + cos(2π (x − m) / (b − a))) / 2` on `[a, b]` with `m` the midpoint, zero elsewhere.
    RaisedCosine { a: f64, b: f64 },
    /// `Σ coeffs[k] x^k` on `[a, b)`.
    PolyPiece { coeffs: Vec<f64>, a: f64, b: f64 },
    /// `sin(π w x) / (π x)`, the transform of `indicator(−w/2, w/2)`.
    Sinc { width: f64 },
    /// `sin²(π w x) / (π² w x²)`, the transform of `triangle(0, w)`.
    SincSquared { width: f64 },
    /// Transform of `raised_cosine(−h, h)`: `sin(2π h x) / (2π x (1 − 4 h² x²))`.
    RaisedCosineFt { halfwidth: f64 },
    /// `(1 + |x|)^(−k)`.
    RationalDecay { exponent: f64 },
    Constant { value: f64 },
    /// `f(x − shift)`.
    Translate { shift: f64, child: Box<Expr> },
    /// `e^{2π i freq x} f(x)`.
    Modulate { freq: f64, child: Box<Expr> },
    /// `f(alpha x)`.
    Dilate { alpha: f64, child: Box<Expr> },
    Scale { factor: Complex64, child: Box<Expr> },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    /// `f(x − ⌊x⌋)`: the 1-periodic extension of `f` restricted to `[0, 1)`.
    Periodic(Box<Expr>),
}

/// `sin(π t) / (π t)` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    let u = PI * t;
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

fn raised_cosine_ft(halfwidth: f64, x: f64) -> f64 {
    let u = (2.0 * halfwidth * x).abs();
    let shape = if u <= 0.5 {
        sinc(u) / (1.0 - u * u)
    } else {
        // sin(πu) = sin(π(1 − u)) keeps the u → 1 limit stable.
        sinc(1.0 - u) / (u * (1.0 + u))
    };
    halfwidth * shape
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

impl Expr {
    pub fn indicator(a: f64, b: f64) -> Self {
        Expr::Indicator { a, b }
    }
    pub fn triangle(center: f64, halfwidth: f64) -> Self {
        Expr::Triangle { center, halfwidth }
    }
    pub fn gaussian(sigma: f64) -> Self {
        Expr::Gaussian { sigma }
    }
    pub fn raised_cosine(a: f64, b: f64) -> Self {
        Expr::RaisedCosine { a, b }
    }
    pub fn poly_piece(coeffs: Vec<f64>, a: f64, b: f64) -> Self {
        Expr::PolyPiece { coeffs, a, b }
    }
    pub fn sinc(width: f64) -> Self {
        Expr::Sinc { width }
    }
    pub fn sinc_squared(width: f64) -> Self {
        Expr::SincSquared { width }
    }
    pub fn raised_cosine_ft(halfwidth: f64) -> Self {
        Expr::RaisedCosineFt { halfwidth }
    }
    pub fn rational_decay(exponent: f64) -> Self {
        Expr::RationalDecay { exponent }
    }
    pub fn constant(value: f64) -> Self {
        Expr::Constant { value }
    }
    pub fn translate(self, shift: f64) -> Self {
        Expr::Translate {
            shift,
            child: Box::new(self),
        }
    }
    pub fn modulate(self, freq: f64) -> Self {
        Expr::Modulate {
            freq,
            child: Box::new(self),
        }
    }
    pub fn dilate(self, alpha: f64) -> Self {
        Expr::Dilate {
            alpha,
            child: Box::new(self),
        }
    }
    pub fn scale(self, factor: impl Into<Complex64>) -> Self {
        Expr::Scale {
            factor: factor.into(),
            child: Box::new(self),
        }
    }
    /// `x ↦ f(−x)`.
    pub fn reflect(self) -> Self {
        self.dilate(-1.0)
    }
    pub fn periodic(self) -> Self {
        Expr::Periodic(Box::new(self))
    }

    /// Checks parameter invariants throughout the tree.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Structural(msg));
        let finite = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Structural(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            Expr::Indicator { a, b } => {
                finite("indicator.a", *a)?;
                finite("indicator.b", *b)?;
                if a > b {
                    return bad(format!("indicator requires a <= b, got [{a}, {b}]"));
                }
            }
            Expr::Triangle { center, halfwidth } => {
                finite("triangle.center", *center)?;
                if !(*halfwidth > 0.0 && halfwidth.is_finite()) {
                    return bad(format!("triangle halfwidth must be positive, got {halfwidth}"));
                }
            }
            Expr::Gaussian { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("gaussian sigma must be positive, got {sigma}"));
                }
            }
            Expr::RaisedCosine { a, b } => {
                finite("raised_cosine.a", *a)?;
                finite("raised_cosine.b", *b)?;
                if a >= b {
                    return bad(format!("raised_cosine requires a < b, got [{a}, {b}]"));
                }
            }
            Expr::PolyPiece { coeffs, a, b } => {
                finite("poly_piece.a", *a)?;
                finite("poly_piece.b", *b)?;
                if a > b {
                    return bad(format!("poly_piece requires a <= b, got [{a}, {b}]"));
                }
                for c in coeffs {
                    finite("poly_piece coefficient", *c)?;
                }
            }
            Expr::Sinc { width } | Expr::SincSquared { width } => {
                if !(*width > 0.0 && width.is_finite()) {
                    return bad(format!("sinc width must be positive, got {width}"));
                }
            }
            Expr::RaisedCosineFt { halfwidth } => {
                if !(*halfwidth > 0.0 && halfwidth.is_finite()) {
                    return bad(format!("raised_cosine_ft halfwidth must be positive, got {halfwidth}"));
                }
            }
            Expr::RationalDecay { exponent } => {
                if !(*exponent > 0.0 && exponent.is_finite()) {
                    return bad(format!("rational_decay exponent must be positive, got {exponent}"));
                }
            }
            Expr::Constant { value } => finite("constant", *value)?,
            Expr::Translate { shift, child } => {
                finite("translate.shift", *shift)?;
                child.validate()?;
            }
            Expr::Modulate { freq, child } => {
                finite("modulate.freq", *freq)?;
                child.validate()?;
            }
            Expr::Dilate { alpha, child } => {
                if !(alpha.is_finite() && *alpha != 0.0) {
                    return bad(format!("dilate factor must be finite and nonzero, got {alpha}"));
                }
                child.validate()?;
            }
            Expr::Scale { factor, child } => {
                if !(factor.re.is_finite() && factor.im.is_finite()) {
                    return bad("scale factor must be finite".into());
                }
                child.validate()?;
            }
            Expr::Sum(children) | Expr::Product(children) => {
                if children.is_empty() {
                    return bad("sum/product needs at least one child".into());
                }
                for c in children {
                    c.validate()?;
                }
            }
            Expr::Periodic(child) => child.validate()?,
        }
        Ok(())
    }

    /// Pointwise evaluation. Assumes a validated tree.
    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Expr::Indicator { a, b } => real(if *a <= x && x < *b { 1.0 } else { 0.0 }),
            Expr::Triangle { center, halfwidth } => {
                real((1.0 - (x - center).abs() / halfwidth).max(0.0))
            }
            Expr::Gaussian { sigma } => real((-PI * x * x / (sigma * sigma)).exp()),
            Expr::RaisedCosine { a, b } => {
                if x < *a || x > *b {
                    real(0.0)
                } else {
                    let m = 0.5 * (a + b);
                    real(0.5 * (1.0 + (2.0 * PI * (x - m) / (b - a)).cos()))
                }
            }
            Expr::PolyPiece { coeffs, a, b } => {
                if *a <= x && x < *b {
                    real(coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))
                } else {
                    real(0.0)
                }
            }
            Expr::Sinc { width } => real(width * sinc(width * x)),
            Expr::SincSquared { width } => {
                let s = sinc(width * x);
                real(width * s * s)
            }
            Expr::RaisedCosineFt { halfwidth } => real(raised_cosine_ft(*halfwidth, x)),
            Expr::RationalDecay { exponent } => real((1.0 + x.abs()).powf(-exponent)),
            Expr::Constant { value } => real(*value),
            Expr::Translate { shift, child } => child.eval(x - shift),
            Expr::Modulate { freq, child } => {
                let v = child.eval(x);
                if v == Complex64::new(0.0, 0.0) {
                    v
                } else {
                    v * Complex64::from_polar(1.0, 2.0 * PI * freq * x)
                }
            }
            Expr::Dilate { alpha, child } => child.eval(alpha * x),
            Expr::Scale { factor, child } => factor * child.eval(x),
            Expr::Sum(children) => children.iter().map(|c| c.eval(x)).sum(),
            Expr::Product(children) => {
                let mut acc = real(1.0);
                for c in children {
                    acc *= c.eval(x);
                    if acc == Complex64::new(0.0, 0.0) {
                        break;
                    }
                }
                acc
            }
            Expr::Periodic(child) => child.eval(x - x.floor()),
        }
    }

    /// Structural evenness: true only when `f(−x) = f(x)` follows from the tree shape.
    pub fn is_even(&self) -> bool {
        match self {
            Expr::Indicator { .. } | Expr::PolyPiece { .. } | Expr::Periodic(_) => false,
            Expr::Triangle { center, .. } => *center == 0.0,
            Expr::RaisedCosine { a, b } => *a == -*b,
            Expr::Gaussian { .. }
            | Expr::Sinc { .. }
            | Expr::SincSquared { .. }
            | Expr::RaisedCosineFt { .. }
            | Expr::RationalDecay { .. }
            | Expr::Constant { .. } => true,
            Expr::Translate { shift, child } => *shift == 0.0 && child.is_even(),
            Expr::Modulate { freq, child } => *freq == 0.0 && child.is_even(),
            Expr::Dilate { child, .. } | Expr::Scale { child, .. } => child.is_even(),
            Expr::Sum(c) | Expr::Product(c) => c.iter().all(Expr::is_even),
        }
    }

    /// Points where the tree may have a jump or kink, restricted to `[lo, hi]`.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(lo, hi, &mut out);
        out.retain(|x| *x >= lo && *x <= hi);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        match self {
            Expr::Indicator { a, b } | Expr::RaisedCosine { a, b } | Expr::PolyPiece { a, b, .. } => {
                out.extend([*a, *b]);
            }
            Expr::Triangle { center, halfwidth } => {
                out.extend([center - halfwidth, *center, center + halfwidth]);
            }
            Expr::RationalDecay { .. } => out.push(0.0),
            Expr::Gaussian { .. }
            | Expr::Sinc { .. }
            | Expr::SincSquared { .. }
            | Expr::RaisedCosineFt { .. }
            | Expr::Constant { .. } => {}
            Expr::Translate { shift, child } => {
                let mut inner = Vec::new();
                child.collect_breakpoints(lo - shift, hi - shift, &mut inner);
                out.extend(inner.into_iter().map(|x| x + shift));
            }
            Expr::Modulate { child, .. } | Expr::Scale { child, .. } => {
                child.collect_breakpoints(lo, hi, out)
            }
            Expr::Dilate { alpha, child } => {
                let (a, b) = (alpha * lo, alpha * hi);
                let mut inner = Vec::new();
                child.collect_breakpoints(a.min(b), a.max(b), &mut inner);
                out.extend(inner.into_iter().map(|x| x / alpha));
            }
            Expr::Sum(children) | Expr::Product(children) => {
                for c in children {
                    c.collect_breakpoints(lo, hi, out);
                }
            }
            Expr::Periodic(child) => {
                let mut base = vec![0.0];
                child.collect_breakpoints(0.0, 1.0, &mut base);
                base.retain(|x| (0.0..1.0).contains(x));
                let (k_lo, k_hi) = (lo.floor(), hi.ceil());
                // Cap the replication so very long windows do not explode.
                if k_hi - k_lo <= 100_000.0 {
                    let mut k = k_lo;
                    while k <= k_hi {
                        out.extend(base.iter().map(|x| x + k));
                        k += 1.0;
                    }
                }
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Translate { child, .. }
            | Expr::Modulate { child, .. }
            | Expr::Dilate { child, .. }
            | Expr::Scale { child, .. }
            | Expr::Periodic(child) => 1 + child.size(),
            Expr::Sum(c) | Expr::Product(c) => 1 + c.iter().map(Expr::size).sum::<usize>(),
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_values() {
        assert_eq!(Expr::triangle(0.0, 1.0).eval(0.0), real(1.0));
        assert_eq!(Expr::indicator(0.0, 1.0).eval(0.5), real(1.0));
        assert_eq!(Expr::indicator(0.0, 1.0).eval(1.0), real(0.0));
        let g = Expr::gaussian(1.0).modulate(1.0);
        assert!((g.eval(0.0) - real(1.0)).norm() < 1e-15);
    }

    #[test]
    fn raised_cosine_ft_removable_points() {
        let h = 0.75;
        let f = Expr::raised_cosine_ft(h);
        assert!((f.eval(0.0).re - h).abs() < 1e-15);
        let at_pole = f.eval(1.0 / (2.0 * h)).re;
        assert!((at_pole - h / 2.0).abs() < 1e-12);
        let near = f.eval(1.0 / (2.0 * h) + 1e-9).re;
        assert!((near - h / 2.0).abs() < 1e-8);
        // Far field agrees with the unsimplified closed form.
        let x = 3.3;
        let direct = (2.0 * PI * h * x).sin() / (2.0 * PI * x * (1.0 - 4.0 * h * h * x * x));
        assert!((f.eval(x).re - direct).abs() < 1e-14);
    }

    #[test]
    fn validate_rejects_reversed_interval() {
        assert!(Expr::indicator(1.0, 0.0).validate().is_err());
        assert!(Expr::triangle(0.0, 0.0).validate().is_err());
        assert!(Expr::gaussian(1.0).dilate(0.0).validate().is_err());
        assert!(Expr::Sum(vec![]).validate().is_err());
    }

    #[test]
    fn periodic_wraps() {
        let f = Expr::poly_piece(vec![0.0, 1.0], 0.0, 1.0).periodic();
        assert!((f.eval(2.25).re - 0.25).abs() < 1e-15);
        assert!((f.eval(-0.25).re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn breakpoints_follow_transforms() {
        let f = Expr::triangle(0.0, 1.0).dilate(2.0).translate(3.0);
        assert_eq!(f.breakpoints(-10.0, 10.0), vec![2.5, 3.0, 3.5]);
    }

    #[test]
    fn evenness() {
        assert!(Expr::gaussian(2.0).is_even());
        assert!(!Expr::triangle(0.0, 1.0).translate(0.5).is_even());
        assert!(Expr::raised_cosine(-1.0, 1.0).is_even());
    }
}
