use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{ClosedForm, DecayRule, Expr, FunctionSpec, PointEval, SequenceSpec, Transform};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusAtom {
    pub x: f64,
    pub weight: Complex64,
}

/// Measure on the torus `[0, 1)`: finitely many atoms plus an optional density.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusMeasure {
    atoms: Vec<TorusAtom>,
    density: Option<FunctionSpec>,
}

impl TorusMeasure {
    /// Atoms must lie in `[0, 1)`; equal locations are merged and zero weights dropped.
    pub fn new(atoms: Vec<TorusAtom>, density: Option<FunctionSpec>) -> Result<Self> {
        let mut merged: BTreeMap<u64, Complex64> = BTreeMap::new();
        for a in atoms {
            if !(a.x >= 0.0 && a.x < 1.0) {
                return Err(Error::Structural(format!("torus atom at {} is outside [0, 1)", a.x)));
            }
            if !(a.weight.re.is_finite() && a.weight.im.is_finite()) {
                return Err(Error::Structural("atom weights must be finite".into()));
            }
            // Non-negative finite floats order like their bit patterns (−0 folds into +0).
            *merged.entry((a.x + 0.0).to_bits()).or_default() += a.weight;
        }
        let atoms = merged
            .into_iter()
            .filter(|(_, w)| w.norm() != 0.0)
            .map(|(bits, weight)| TorusAtom {
                x: f64::from_bits(bits),
                weight,
            })
            .collect();
        Ok(Self { atoms, density })
    }

    pub fn atoms_only(atoms: Vec<TorusAtom>) -> Result<Self> {
        Self::new(atoms, None)
    }

    pub fn dirac(x: f64) -> Result<Self> {
        Self::atoms_only(vec![TorusAtom {
            x,
            weight: Complex64::new(1.0, 0.0),
        }])
    }

    /// Normalised Lebesgue measure on the torus.
    pub fn lebesgue() -> Self {
        Self {
            atoms: Vec::new(),
            density: Some(FunctionSpec::from(Expr::constant(1.0))),
        }
    }

    pub fn with_density(density: FunctionSpec) -> Self {
        Self {
            atoms: Vec::new(),
            density: Some(density),
        }
    }

    pub fn atoms(&self) -> &[TorusAtom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&FunctionSpec> {
        self.density.as_ref()
    }

    pub fn is_discrete(&self) -> bool {
        self.density.is_none()
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.norm()).sum()
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: Complex64, other: &TorusMeasure, b: Complex64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|t| TorusAtom { x: t.x, weight: a * t.weight })
            .chain(other.atoms.iter().map(|t| TorusAtom { x: t.x, weight: b * t.weight }))
            .collect();
        let density = combine_densities(self.density.as_ref(), a, other.density.as_ref(), b);
        Self::new(atoms, density)
    }

    /// `ν̂(n) = Σ_j α_j e^{−2πinx_j} + ∫_0^1 F(x) e^{−2πinx} dx`.
    ///
    /// The atomic part is kept in closed form. Density coefficients are computed by quadrature for
    /// `|n| ≤ radius` and dropped beyond it.
    pub fn fourier_coefficients(&self, radius: u64, tolerance: f64) -> Result<SequenceSpec> {
        let mut corrections = BTreeMap::new();
        if let Some(f) = &self.density {
            let bps = f.breakpoints(0.0, 1.0);
            let opts = QuadOptions {
                abs_tol: tolerance,
                max_panel_width: 0.125,
                max_panels: 100_000,
            };
            let r = radius as i64;
            for n in -r..=r {
                let v = integrate(
                    &|x| f.eval(x) * Complex64::from_polar(1.0, -2.0 * PI * n as f64 * x),
                    0.0,
                    1.0,
                    &bps,
                    &opts,
                )?
                .value;
                if v.norm() > 0.5 * tolerance {
                    corrections.insert(n, v);
                }
            }
        }
        if self.atoms.is_empty() {
            return SequenceSpec::finite(corrections, Some(radius));
        }
        let rule = DecayRule::AtomSum {
            atoms: self.atoms.iter().map(|a| (a.x, a.weight)).collect(),
        };
        SequenceSpec::closed_with_corrections(ClosedForm::new(rule), corrections)
    }
}

fn combine_densities(
    f: Option<&FunctionSpec>,
    a: Complex64,
    g: Option<&FunctionSpec>,
    b: Complex64,
) -> Option<FunctionSpec> {
    let scaled = |h: &FunctionSpec, c: Complex64| h.expr().clone().scale(c);
    match (f, g) {
        (None, None) => None,
        (Some(f), None) => Some(FunctionSpec::from(scaled(f, a))),
        (None, Some(g)) => Some(FunctionSpec::from(scaled(g, b))),
        (Some(f), Some(g)) => Some(FunctionSpec::from(Expr::Sum(vec![scaled(f, a), scaled(g, b)]))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineAtom {
    pub y: f64,
    pub weight: Complex64,
}

impl LineAtom {
    pub fn new(y: f64, weight: Complex64) -> Self {
        Self { y, weight }
    }
}

/// Measure on the line: atoms plus an optional density.
#[derive(Debug, Clone, PartialEq)]
pub struct LineMeasure {
    pub atoms: Vec<LineAtom>,
    pub density: Option<FunctionSpec>,
    /// Bound on the total variation of atoms dropped by truncation.
    pub tail_bound: Option<f64>,
}

impl LineMeasure {
    pub fn atoms_only(atoms: Vec<LineAtom>) -> Self {
        Self {
            atoms,
            density: None,
            tail_bound: None,
        }
    }

    pub fn density_only(density: FunctionSpec) -> Self {
        Self {
            atoms: Vec::new(),
            density: Some(density),
            tail_bound: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_none()
    }

    /// Total mass of the atoms at `y`.
    pub fn atom_at(&self, y: f64) -> Complex64 {
        self.atoms.iter().filter(|a| a.y == y).map(|a| a.weight).sum()
    }

    /// `a·self + b·other`; atoms at equal locations are merged, tails add.
    pub fn linear_combination(&self, a: Complex64, other: &LineMeasure, b: Complex64) -> Self {
        let mut merged: Vec<LineAtom> = Vec::new();
        for atom in self
            .atoms
            .iter()
            .map(|t| LineAtom::new(t.y, a * t.weight))
            .chain(other.atoms.iter().map(|t| LineAtom::new(t.y, b * t.weight)))
        {
            match merged.iter_mut().find(|m| m.y == atom.y) {
                Some(m) => m.weight += atom.weight,
                None => merged.push(atom),
            }
        }
        merged.retain(|m| m.weight.norm() != 0.0);
        merged.sort_by(|p, q| p.y.total_cmp(&q.y));
        let tail_bound = match (self.tail_bound, other.tail_bound) {
            (None, None) => None,
            (s, o) => Some(a.norm() * s.unwrap_or(0.0) + b.norm() * o.unwrap_or(0.0)),
        };
        Self {
            atoms: merged,
            density: combine_densities(self.density.as_ref(), a, other.density.as_ref(), b),
            tail_bound,
        }
    }

    /// Fourier–Stieltjes transform `μ̂(ξ) = Σ w e^{−2πiξy} + f̂(ξ)`.
    pub fn fourier_transform(&self, tolerance: f64) -> Result<LineSpectrum> {
        let density = match &self.density {
            None => None,
            Some(f) => Some(Transform::of(f, tolerance)?),
        };
        Ok(LineSpectrum {
            atoms: self.atoms.clone(),
            density,
        })
    }
}

/// Pointwise evaluator for `μ̂`.
#[derive(Debug, Clone)]
pub struct LineSpectrum {
    atoms: Vec<LineAtom>,
    density: Option<Transform>,
}

impl LineSpectrum {
    pub fn eval(&self, xi: f64) -> Complex64 {
        let atoms: Complex64 = self
            .atoms
            .iter()
            .map(|a| a.weight * Complex64::from_polar(1.0, -2.0 * PI * xi * a.y))
            .sum();
        match &self.density {
            None => atoms,
            Some(t) => atoms + t.eval(xi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn atoms_merge_and_validate() {
        let nu = TorusMeasure::atoms_only(vec![
            TorusAtom { x: 0.25, weight: c(1.0) },
            TorusAtom { x: 0.25, weight: c(0.5) },
            TorusAtom { x: 0.5, weight: c(1.0) },
            TorusAtom { x: 0.5, weight: c(-1.0) },
        ])
        .unwrap();
        assert_eq!(nu.atoms(), &[TorusAtom { x: 0.25, weight: c(1.5) }]);
        assert!(TorusMeasure::dirac(1.0).is_err());
        assert!(TorusMeasure::dirac(-0.1).is_err());
    }

    #[test]
    fn coefficients_of_atoms_and_lebesgue() {
        let nu = TorusMeasure::atoms_only(vec![
            TorusAtom { x: 0.0, weight: c(0.5) },
            TorusAtom { x: 0.5, weight: c(0.5) },
        ])
        .unwrap();
        let s = nu.fourier_coefficients(8, 1e-12).unwrap();
        for n in -5..=5 {
            let expected = if n % 2 == 0 { 1.0 } else { 0.0 };
            assert!((s.value(n) - c(expected)).norm() < 1e-14);
        }
        let leb = TorusMeasure::lebesgue().fourier_coefficients(8, 1e-12).unwrap();
        assert!((leb.value(0) - c(1.0)).norm() < 1e-12);
        assert!(leb.value(3).norm() < 1e-12);
    }

    #[test]
    fn line_spectrum_of_dirac() {
        let mu = LineMeasure::atoms_only(vec![LineAtom::new(0.0, c(1.0))]);
        let s = mu.fourier_transform(1e-10).unwrap();
        assert_eq!(s.eval(3.7), c(1.0));
    }

    #[test]
    fn line_combination_merges() {
        let a = LineMeasure::atoms_only(vec![LineAtom::new(1.0, c(1.0))]);
        let b = LineMeasure::atoms_only(vec![LineAtom::new(1.0, c(2.0)), LineAtom::new(2.0, c(1.0))]);
        let m = a.linear_combination(c(2.0), &b, c(-1.0));
        assert_eq!(m.atoms, vec![LineAtom::new(2.0, c(-1.0))]);
    }
}
