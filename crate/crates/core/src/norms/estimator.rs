//! Lower bounds on `M_p` norms by realising the multiplier on a periodic discretisation.
//!
//! A window grid `−L, −L + h, …, L − h` of `M = 2L/h` frequencies is exactly the DFT frequency set
//! of a length-`M` signal with spacing `1/(2L)`, so the multiplier samples act by a pointwise
//! product between a forward and an inverse FFT. The ratio `‖Tf‖_p / ‖f‖_p` is maximised over a
//! fixed family of test signals drawn from a seeded generator.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::certificate::{CertificateKind, NormCertificate};
use crate::error::{Error, Result};
use crate::function::{GridConfig, GridFunction, PointEval};

pub const DEFAULT_SEED: u64 = 42;

/// Size of each of the four test-signal groups.
const GROUP: usize = 16;

/// Multiplier input for [`mp_norm_lower_bound`].
pub enum Multiplier<'a, K: PointEval + ?Sized> {
    Function(&'a K),
    Samples(&'a GridFunction),
}

/// Discrete multiplier operator `f ↦ IFFT(m · FFT f)` on `ℂ^M`.
pub struct DiscreteMultiplier {
    symbol: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl DiscreteMultiplier {
    /// `symbol[k]` multiplies DFT bin `k` (frequency `k` for `k < M/2`, else `k − M`).
    pub fn new(symbol: Vec<Complex64>) -> Result<Self> {
        let m = symbol.len();
        if m < 4 {
            return Err(Error::Domain("discrete multiplier needs at least 4 bins".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            symbol,
        })
    }

    /// Symbol from samples on the window grid `ξ_j = −L + jh`, `j = 0..=2L/h`.
    pub fn from_window(samples: &[Complex64]) -> Result<Self> {
        let m = samples.len().saturating_sub(1);
        if !m.is_multiple_of(2) || m < 4 {
            return Err(Error::Domain(format!(
                "window sampling must have 2L/h + 1 points with 2L/h even, got {}",
                samples.len()
            )));
        }
        let half = m / 2;
        Self::new((0..m).map(|k| samples[(k + half) % m]).collect())
    }

    pub fn len(&self) -> usize {
        self.symbol.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbol.is_empty()
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.len() as f64;
        for (b, m) in buf.iter_mut().zip(&self.symbol) {
            *b *= m * scale;
        }
        self.inverse.process(&mut buf);
        buf
    }

    fn spectrum_to_signal(&self, mut spec: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spec);
        spec
    }

    fn sup(&self) -> f64 {
        self.symbol.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest ratio `‖Tf‖_p / ‖f‖_p` over the seeded test family.
    pub fn lower_bound(&self, p: f64, seed: u64) -> f64 {
        let family = test_family(self, seed);
        let best = family
            .par_iter()
            .map(|f| {
                let den = lp(f, p);
                if den == 0.0 {
                    0.0
                } else {
                    lp(&self.apply(f), p) / den
                }
            })
            .reduce(|| 0.0, f64::max);
        if p == 2.0 {
            // The discrete ℓ² operator norm is max|m_k|; rounding may push a ratio past it.
            best.min(self.sup())
        } else {
            best
        }
    }
}

fn lp(v: &[Complex64], p: f64) -> f64 {
    v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Four groups of `GROUP` signals: tones at the largest symbol bins, centred Gaussians of varying
/// width, boxes modulated to strong or random bins, and random ±1 spectra on contiguous bands.
fn test_family(op: &DiscreteMultiplier, seed: u64) -> Vec<Vec<Complex64>> {
    let m = op.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        op.symbol[b]
            .norm()
            .partial_cmp(&op.symbol[a].norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let top: Vec<usize> = order.iter().copied().take(GROUP).collect();
    let centre = (m / 2) as f64;
    let tone = |k: usize, j: usize| Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / m as f64);

    let mut family = Vec::with_capacity(4 * GROUP);
    for &k in &top {
        family.push((0..m).map(|j| tone(k, j)).collect());
    }
    for i in 0..GROUP {
        let width = 2.0 * (m as f64 / 8.0 / 2.0).powf(i as f64 / (GROUP - 1) as f64);
        let k = top[i % top.len()];
        family.push(
            (0..m)
                .map(|j| {
                    let u = (j as f64 - centre) / width;
                    let g = (-PI * u * u).exp();
                    if i % 2 == 0 {
                        Complex64::new(g, 0.0)
                    } else {
                        tone(k, j) * g
                    }
                })
                .collect(),
        );
    }
    for i in 0..GROUP {
        let half = 1 + rng.gen_range(0..(m / 4).max(1));
        let k = if i % 2 == 0 { top[i % top.len()] } else { rng.gen_range(0..m) };
        family.push(
            (0..m)
                .map(|j| {
                    if (j as f64 - centre).abs() <= half as f64 {
                        tone(k, j)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        );
    }
    for _ in 0..GROUP {
        let width = 1 + rng.gen_range(0..(m / 4).max(1));
        let start = rng.gen_range(0..m);
        let mut spec = vec![Complex64::new(0.0, 0.0); m];
        for b in 0..width {
            let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            spec[(start + b) % m] = Complex64::new(s, 0.0);
        }
        family.push(op.spectrum_to_signal(spec));
    }
    family
}

/// Lower bound on `‖Λ‖_{M_p(ℝ)}` for `1 < p < ∞` from the discretised operator.
pub fn mp_norm_lower_bound<K: PointEval + ?Sized>(
    lambda: Multiplier<'_, K>,
    p: f64,
    grid: &GridConfig,
    seed: u64,
) -> Result<NormCertificate> {
    if !(p > 1.0 && p < f64::INFINITY) {
        return Err(Error::Domain(format!(
            "p = {p} is outside (1, ∞); use m1_norm or m2_norm"
        )));
    }
    grid.validate()?;
    let samples: Vec<Complex64> = match lambda {
        Multiplier::Function(f) => {
            if !f.envelope().sup().is_finite() {
                return Err(Error::precondition("Λ is not bounded"));
            }
            grid.points().par_iter().map(|&x| f.eval(x)).collect()
        }
        Multiplier::Samples(g) => {
            if g.len() != grid.len() {
                return Err(Error::Domain(format!(
                    "multiplier has {} samples, window expects {}",
                    g.len(),
                    grid.len()
                )));
            }
            g.values.clone()
        }
    };
    if samples.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::precondition("multiplier samples are not finite"));
    }
    let op = DiscreteMultiplier::from_window(&samples)?;
    let value = op.lower_bound(p, seed);
    Ok(NormCertificate::new(
        p,
        value,
        CertificateKind::LowerBound,
        format!(
            "discretised multiplier on {} periodic points, max over {} test signals (seed {seed})",
            op.len(),
            4 * GROUP
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Expr, FunctionSpec};

    fn grid() -> GridConfig {
        GridConfig::new(8.0, 1.0 / 32.0, 64, 1e-8).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        let one = FunctionSpec::from(Expr::constant(1.0));
        for p in [1.5, 3.0, 2.0] {
            let c = mp_norm_lower_bound(Multiplier::Function(&one), p, &grid(), 42).unwrap();
            assert!(c.value >= 1.0 - 1e-12 && c.value <= 1.0 + 1e-12, "p = {p}: {}", c.value);
        }
    }

    #[test]
    fn rejects_endpoints() {
        let one = FunctionSpec::from(Expr::constant(1.0));
        assert!(mp_norm_lower_bound(Multiplier::Function(&one), 1.0, &grid(), 42).is_err());
        assert!(mp_norm_lower_bound(Multiplier::Function(&one), f64::INFINITY, &grid(), 42).is_err());
    }

    #[test]
    fn family_has_at_least_64_members() {
        let op = DiscreteMultiplier::new(vec![Complex64::new(1.0, 0.0); 64]).unwrap();
        assert!(test_family(&op, 1).len() >= 64);
    }

    #[test]
    fn window_mapping_puts_zero_frequency_in_bin_zero() {
        // Samples −2, −1, 0, 1, 2 (the last is dropped by periodicity).
        let s: Vec<Complex64> = (-2..=2).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let op = DiscreteMultiplier::from_window(&s).unwrap();
        let re: Vec<f64> = op.symbol().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![0.0, 1.0, -2.0, -1.0]);
    }

    #[test]
    fn triangle_bound_is_within_sup() {
        let tri = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        let a = mp_norm_lower_bound(Multiplier::Function(&tri), 4.0 / 3.0, &grid(), 42).unwrap();
        let b = mp_norm_lower_bound(Multiplier::Function(&tri), 4.0 / 3.0, &grid(), 42).unwrap();
        assert!(a.value > 0.0 && a.value <= 1.0 + 1e-12);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
