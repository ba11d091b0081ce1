//! Wiener-lemma averages of a Fourier–Stieltjes transform.
//!
//! `μ{y} = lim (1/2λ) ∫_{−λ}^{λ} μ̂(ξ) e^{2πiξy} dξ` and `Σ_y |μ{y}|² = lim (1/2λ) ∫_{−λ}^{λ} |μ̂|²`.
//! The transform is sampled once at Gauss–Kronrod nodes over the largest window; every `λ` in
//! the schedule is a panel boundary, so each average reuses a prefix of the same samples.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::kronrod_nodes;

pub const DEFAULT_LAMBDAS: [f64; 3] = [256.0, 1024.0, 4096.0];
pub const EPS_ATOM: f64 = 1e-3;
const PANEL_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerEstimate<T> {
    pub estimate: T,
    pub converged: bool,
    /// `(λ, average)` for every window in the schedule.
    pub trace: Vec<(f64, T)>,
}

/// `μ̂` sampled at quadrature nodes on `[−λ_max, λ_max]`.
pub struct SpectrumSamples {
    lambdas: Vec<f64>,
    /// Node, weight and value, ordered by `|ξ|` shells: shell `i` covers `λ_{i−1} < |ξ| ≤ λ_i`.
    nodes: Vec<(f64, f64, Complex64)>,
    /// `shell_end[i]`: nodes with index below it lie inside `[−λ_i, λ_i]`.
    shell_end: Vec<usize>,
}

impl SpectrumSamples {
    pub fn new<F>(spectrum: F, lambdas: &[f64]) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        if lambdas.is_empty() {
            return Err(Error::Domain("empty λ schedule".into()));
        }
        if lambdas.windows(2).any(|w| w[0] >= w[1]) || lambdas[0] <= 0.0 || !lambdas.iter().all(|l| l.is_finite()) {
            return Err(Error::Domain("λ schedule must be positive, finite and increasing".into()));
        }
        let mut panels: Vec<(f64, f64)> = Vec::new();
        let mut shell_panels = Vec::with_capacity(lambdas.len());
        let mut inner = 0.0;
        for &lam in lambdas {
            let count = ((lam - inner) / PANEL_WIDTH).ceil().max(1.0) as usize;
            let w = (lam - inner) / count as f64;
            for i in 0..count {
                let a = inner + i as f64 * w;
                let b = if i + 1 == count { lam } else { a + w };
                panels.push((a, b));
                panels.push((-b, -a));
            }
            shell_panels.push(panels.len());
            inner = lam;
        }
        let nodes: Vec<(f64, f64, Complex64)> = panels
            .par_iter()
            .flat_map_iter(|&(a, b)| kronrod_nodes(a, b).into_iter().map(|(x, w)| (x, w, spectrum(x))))
            .collect();
        if nodes.iter().any(|(_, _, v)| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NotCertifiable("μ̂ is not finite on the averaging window".into()));
        }
        let shell_end = shell_panels.into_iter().map(|p| p * 15).collect();
        Ok(Self {
            lambdas: lambdas.to_vec(),
            nodes,
            shell_end,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `(1/2λ) ∫_{−λ}^{λ} μ̂(ξ) e^{2πiξy} dξ` for every λ.
    pub fn atom_averages(&self, y: f64) -> Vec<Complex64> {
        self.cumulative(|xi, v| v * Complex64::from_polar(1.0, 2.0 * PI * xi * y))
    }

    /// `(1/2λ) ∫_{−λ}^{λ} |μ̂|²` for every λ.
    pub fn energy_averages(&self) -> Vec<f64> {
        self.cumulative(|_, v| Complex64::new(v.norm_sqr(), 0.0))
            .into_iter()
            .map(|z| z.re)
            .collect()
    }

    fn cumulative(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.lambdas.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let mut start = 0;
        for (&lam, &end) in self.lambdas.iter().zip(&self.shell_end) {
            acc += self.nodes[start..end].iter().map(|&(x, w, v)| f(x, v) * w).sum::<Complex64>();
            start = end;
            out.push(acc / (2.0 * lam));
        }
        out
    }

    pub fn atom(&self, y: f64, eps: f64) -> WienerEstimate<Complex64> {
        let avgs = self.atom_averages(y);
        finish(&self.lambdas, avgs, |a, b| (a - b).norm(), eps)
    }

    pub fn energy(&self, eps: f64) -> WienerEstimate<f64> {
        let avgs = self.energy_averages();
        finish(&self.lambdas, avgs, |a, b| (a - b).abs(), eps)
    }
}

fn finish<T: Copy>(lambdas: &[f64], avgs: Vec<T>, dist: impl Fn(T, T) -> f64, eps: f64) -> WienerEstimate<T> {
    let n = avgs.len();
    let estimate = avgs[n - 1];
    let converged = n >= 2 && dist(avgs[n - 1], avgs[n - 2]) <= eps;
    WienerEstimate {
        estimate,
        converged,
        trace: lambdas.iter().copied().zip(avgs).collect(),
    }
}

/// Atom mass of `μ` at `y` by Wiener's lemma.
pub fn wiener_atom<F>(spectrum: F, y: f64, lambdas: &[f64], eps: f64) -> Result<WienerEstimate<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    Ok(SpectrumSamples::new(spectrum, lambdas)?.atom(y, eps))
}

/// `Σ_y |μ{y}|²` by Wiener's lemma.
pub fn wiener_energy<F>(spectrum: F, lambdas: &[f64], eps: f64) -> Result<WienerEstimate<f64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    Ok(SpectrumSamples::new(spectrum, lambdas)?.energy(eps))
}
