use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per unit period used wherever an essential supremum over one period is approximated.
pub const PERIOD_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Window half-width `L`: samples live on `[−L, L]`.
    pub halfwidth: f64,
    pub step: f64,
    /// Lattice truncation `N` for infinite sums.
    pub truncation: u64,
    pub tolerance: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            halfwidth: 8.0,
            step: 1.0 / 64.0,
            truncation: 64,
            tolerance: 1e-8,
        }
    }
}

impl GridConfig {
    pub fn new(halfwidth: f64, step: f64, truncation: u64, tolerance: f64) -> Result<Self> {
        let g = Self {
            halfwidth,
            step,
            truncation,
            tolerance,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Structural(format!("grid step must be positive, got {}", self.step)));
        }
        if !(self.halfwidth >= 0.0 && self.halfwidth.is_finite()) {
            return Err(Error::Structural(format!(
                "grid half-width must be non-negative, got {}",
                self.halfwidth
            )));
        }
        let ratio = self.halfwidth / self.step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Structural(format!(
                "grid half-width {} is not an integer multiple of step {}",
                self.halfwidth, self.step
            )));
        }
        if self.truncation < 1 {
            return Err(Error::Structural("lattice truncation must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Structural(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Number of samples, `2L/h + 1`.
    pub fn len(&self) -> usize {
        2 * (self.halfwidth / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.halfwidth + j as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    pub fn with_truncation(mut self, truncation: u64) -> Self {
        self.truncation = truncation;
        self
    }
}

/// Uniform samples `values[j]` at `origin + j·step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub origin: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
    /// Bound on the discarded part of a truncated lattice sum, when one applies.
    pub tail_bound: Option<f64>,
}

impl GridFunction {
    pub fn on_window(grid: &GridConfig, values: Vec<Complex64>, tail_bound: Option<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "sample count must match the window");
        Self {
            origin: -grid.halfwidth,
            step: grid.step,
            values,
            tail_bound,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.step
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(j, v)| (self.point(j), *v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise distance to another sampling of the same grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_and_points() {
        let g = GridConfig::new(2.0, 0.25, 8, 1e-8).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g.point(0), -2.0);
        assert_eq!(g.point(16), 2.0);
    }

    #[test]
    fn rejects_incommensurate_step() {
        assert!(GridConfig::new(1.0, 0.3, 8, 1e-8).is_err());
        assert!(GridConfig::new(1.0, 0.25, 0, 1e-8).is_err());
        assert!(GridConfig::new(1.0, 0.25, 4, 0.0).is_err());
    }
}
