use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Terms beyond this radius of a closed-form sequence are covered by analytic tail bounds.
const NORM_SUM_RADIUS: i64 = 4096;

/// Closed-form rules for infinitely supported sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayRule {
    /// `1`.
    Constant,
    /// `(−1)^n`.
    Alternating,
    /// `r^{|n|}` with `|r| ≤ 1`.
    Geometric { ratio: f64 },
    /// `1 / (1 + n²)`.
    InverseQuadratic,
    /// `(1 + |n|)^{−s}`.
    PowerDecay { exponent: f64 },
    /// `Σ_j α_j e^{−2πi n x_j}`: Fourier coefficients of a finite atomic measure on the torus.
    AtomSum { atoms: Vec<(f64, Complex64)> },
}

impl DecayRule {
    fn value(&self, n: i64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            DecayRule::Constant => re(1.0),
            DecayRule::Alternating => re(if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 }),
            DecayRule::Geometric { ratio } => re(ratio.powi(n.unsigned_abs() as i32)),
            DecayRule::InverseQuadratic => re(1.0 / (1.0 + (n as f64).powi(2))),
            DecayRule::PowerDecay { exponent } => re((1.0 + n.unsigned_abs() as f64).powf(-exponent)),
            DecayRule::AtomSum { atoms } => atoms
                .iter()
                .map(|(x, a)| a * Complex64::from_polar(1.0, -2.0 * PI * (n as f64) * x))
                .sum(),
        }
    }

    fn sup(&self) -> f64 {
        match self {
            DecayRule::AtomSum { atoms } => atoms.iter().map(|(_, a)| a.norm()).sum(),
            _ => 1.0,
        }
    }

    /// Envelope `|rule(n)| ≤ e(|n|)` as (`polynomial exponent`, `geometric ratio`); `None` parts
    /// mean no decay of that kind.
    fn decay_profile(&self) -> (Option<f64>, Option<f64>) {
        match self {
            DecayRule::Constant | DecayRule::Alternating | DecayRule::AtomSum { .. } => (None, None),
            DecayRule::Geometric { ratio } => {
                if ratio.abs() < 1.0 {
                    (None, Some(ratio.abs()))
                } else {
                    (None, None)
                }
            }
            DecayRule::InverseQuadratic => (Some(2.0), None),
            DecayRule::PowerDecay { exponent } => (Some(*exponent), None),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DecayRule::Geometric { ratio } if !(ratio.abs() <= 1.0) => Err(Error::Structural(format!(
                "geometric ratio must satisfy |r| <= 1 for a bounded sequence, got {ratio}"
            ))),
            DecayRule::PowerDecay { exponent } if !(*exponent >= 0.0 && exponent.is_finite()) => Err(
                Error::Structural(format!("power decay exponent must be non-negative, got {exponent}")),
            ),
            DecayRule::AtomSum { atoms } => {
                for (x, a) in atoms {
                    if !(x.is_finite() && a.re.is_finite() && a.im.is_finite()) {
                        return Err(Error::Structural("atom parameters must be finite".into()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `n ↦ scale · rule(n) · e^{−2πi·phase·n} · abel^{|n|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub rule: DecayRule,
    pub scale: Complex64,
    pub phase: f64,
    pub abel: f64,
}

impl ClosedForm {
    pub fn new(rule: DecayRule) -> Self {
        Self {
            rule,
            scale: Complex64::new(1.0, 0.0),
            phase: 0.0,
            abel: 1.0,
        }
    }

    pub fn scaled(mut self, scale: impl Into<Complex64>) -> Self {
        self.scale = scale.into();
        self
    }

    pub fn value(&self, n: i64) -> Complex64 {
        let mut v = self.scale * self.rule.value(n);
        if self.phase != 0.0 {
            v *= Complex64::from_polar(1.0, -2.0 * PI * self.phase * n as f64);
        }
        if self.abel != 1.0 {
            v *= self.abel.powi(n.unsigned_abs() as i32);
        }
        v
    }

    fn sup(&self) -> f64 {
        self.scale.norm() * self.rule.sup()
    }

    /// Upper bound on `(Σ_n |value(n)|^p)^{1/p}`, or `None` when the sequence is not in `ℓ_p`.
    fn lp_norm(&self, p: f64) -> Option<f64> {
        let (poly, geo) = self.rule.decay_profile();
        let geo = match (geo, self.abel < 1.0) {
            (Some(g), true) => Some(g * self.abel),
            (Some(g), false) => Some(g),
            (None, true) => Some(self.abel),
            (None, false) => None,
        };
        let sup = self.sup();
        let m = NORM_SUM_RADIUS;
        let tail = if let Some(q) = geo {
            // |v(n)| ≤ sup·q^{|n|}; geometric tail of the p-th powers.
            let qp = q.powf(p);
            2.0 * sup.powf(p) * qp.powi((m + 1) as i32) / (1.0 - qp)
        } else {
            let s = poly?;
            if s * p <= 1.0 {
                return None;
            }
            // |v(n)| ≤ sup·|n|^{−s}; integral test from m.
            2.0 * sup.powf(p) * (m as f64).powf(1.0 - s * p) / (s * p - 1.0)
        };
        let head: f64 = (-m..=m).map(|n| self.value(n).norm().powf(p)).sum();
        Some((head + tail).powf(1.0 / p))
    }
}

/// A complex sequence on `ℤ`.
///
/// Either finitely supported (`support_radius` present, every nonzero index within it) or given
/// by a closed form plus a finite correction in `entries`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    entries: BTreeMap<i64, Complex64>,
    support_radius: Option<u64>,
    closed_form: Option<ClosedForm>,
}

impl SequenceSpec {
    pub fn finite(entries: BTreeMap<i64, Complex64>, support_radius: Option<u64>) -> Result<Self> {
        let min_radius = entries
            .iter()
            .filter(|(_, v)| v.norm() != 0.0)
            .map(|(n, _)| n.unsigned_abs())
            .max()
            .unwrap_or(0);
        let radius = support_radius.unwrap_or(min_radius);
        if radius < min_radius {
            return Err(Error::Structural(format!(
                "entry at |n| = {min_radius} lies outside support radius {radius}"
            )));
        }
        if entries.values().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Structural("sequence entries must be finite".into()));
        }
        Ok(Self {
            entries,
            support_radius: Some(radius),
            closed_form: None,
        })
    }

    /// Finite sequence from `(index, value)` pairs; zero values are dropped.
    pub fn from_pairs<I, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, V)>,
        V: Into<Complex64>,
    {
        let entries: BTreeMap<i64, Complex64> = pairs
            .into_iter()
            .map(|(n, v)| (n, v.into()))
            .filter(|(_, v)| v.norm() != 0.0)
            .collect();
        Self::finite(entries, None).expect("finite entries")
    }

    /// `δ_{n,0}`.
    pub fn delta() -> Self {
        Self::from_pairs([(0, 1.0)])
    }

    pub fn zero() -> Self {
        Self::finite(BTreeMap::new(), Some(0)).expect("empty sequence")
    }

    pub fn closed(form: ClosedForm) -> Result<Self> {
        Self::closed_with_corrections(form, BTreeMap::new())
    }

    pub fn closed_with_corrections(form: ClosedForm, entries: BTreeMap<i64, Complex64>) -> Result<Self> {
        form.rule.validate()?;
        if !(form.abel > 0.0 && form.abel <= 1.0) {
            return Err(Error::Structural(format!(
                "Abel factor must lie in (0, 1], got {}",
                form.abel
            )));
        }
        if !(form.phase.is_finite() && form.scale.re.is_finite() && form.scale.im.is_finite()) {
            return Err(Error::Structural("closed-form parameters must be finite".into()));
        }
        Ok(Self {
            entries,
            support_radius: None,
            closed_form: Some(form),
        })
    }

    pub fn entries(&self) -> &BTreeMap<i64, Complex64> {
        &self.entries
    }

    pub fn support_radius(&self) -> Option<u64> {
        self.support_radius
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.closed_form.is_none()
    }

    pub fn value(&self, n: i64) -> Complex64 {
        let base = self.closed_form.as_ref().map_or(Complex64::new(0.0, 0.0), |c| c.value(n));
        base + self.entries.get(&n).copied().unwrap_or_default()
    }

    /// Nonzero `(n, φ(n))` pairs of a finitely supported sequence.
    pub fn support(&self) -> Option<Vec<(i64, Complex64)>> {
        if !self.is_finite() {
            return None;
        }
        Some(
            self.entries
                .iter()
                .filter(|(_, v)| v.norm() != 0.0)
                .map(|(n, v)| (*n, *v))
                .collect(),
        )
    }

    pub fn sup_norm(&self) -> f64 {
        let entries = self.entries.values().map(|v| v.norm()).fold(0.0, f64::max);
        match &self.closed_form {
            None => entries,
            Some(c) => c.sup() + entries,
        }
    }

    /// `ℓ_p` norm for `p ≥ 1` (`p = ∞` allowed). Exact for finite sequences, a certified upper
    /// bound for closed forms; `None` when membership in `ℓ_p` cannot be established.
    pub fn lp_norm(&self, p: f64) -> Option<f64> {
        if p.is_infinite() {
            return Some(self.sup_norm());
        }
        let finite_part: f64 = self.entries.values().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p);
        match &self.closed_form {
            None => Some(finite_part),
            Some(c) => Some(c.lp_norm(p)? + finite_part),
        }
    }

    /// `φ_x(n) = e^{−2πixn} φ(n)`.
    pub fn modulated(&self, x: f64) -> Self {
        let phase = |n: i64| Complex64::from_polar(1.0, -2.0 * PI * x * n as f64);
        let entries = self.entries.iter().map(|(n, v)| (*n, v * phase(*n))).collect();
        let closed_form = self.closed_form.clone().map(|mut c| {
            c.phase += x;
            c
        });
        Self {
            entries,
            support_radius: self.support_radius,
            closed_form,
        }
    }

    /// `n ↦ r^{|n|} φ(n)`.
    pub fn abel(&self, r: f64) -> Self {
        assert!(r > 0.0 && r <= 1.0, "Abel factor must lie in (0, 1]");
        let entries = self
            .entries
            .iter()
            .map(|(n, v)| (*n, v * r.powi(n.unsigned_abs() as i32)))
            .collect();
        let closed_form = self.closed_form.clone().map(|mut c| {
            c.abel *= r;
            c
        });
        Self {
            entries,
            support_radius: self.support_radius,
            closed_form,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let entries = self.entries.iter().map(|(n, v)| (*n, v * c)).collect();
        let closed_form = self.closed_form.clone().map(|mut f| {
            f.scale *= c;
            f
        });
        Self {
            entries,
            support_radius: self.support_radius,
            closed_form,
        }
    }

    /// `φ_N`: the restriction to `|n| ≤ radius`.
    pub fn truncate(&self, radius: u64) -> Self {
        let r = radius as i64;
        let entries = (-r..=r)
            .map(|n| (n, self.value(n)))
            .filter(|(_, v)| v.norm() != 0.0)
            .collect();
        Self {
            entries,
            support_radius: Some(radius),
            closed_form: None,
        }
    }

    /// Pointwise `a·self + b·other` for two finitely supported sequences.
    pub fn linear_combination(&self, a: Complex64, other: &SequenceSpec, b: Complex64) -> Result<Self> {
        if !(self.is_finite() && other.is_finite()) {
            return Err(Error::Domain("linear combination needs finitely supported sequences".into()));
        }
        let mut entries: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, v) in &self.entries {
            *entries.entry(*n).or_default() += a * v;
        }
        for (n, v) in &other.entries {
            *entries.entry(*n).or_default() += b * v;
        }
        let radius = self.support_radius.unwrap_or(0).max(other.support_radius.unwrap_or(0));
        Self::finite(entries, Some(radius))
    }
}

/// Fejér regularization `n ↦ max(0, 1 − |n|/(N+1)) φ(n)`, supported on `|n| ≤ N`.
pub fn fejer_regularize(phi: &SequenceSpec, n: u64) -> Result<SequenceSpec> {
    if n == 0 {
        return Err(Error::Domain("Fejér index must be a positive integer".into()));
    }
    let r = n as i64;
    let entries = (-r..=r)
        .map(|k| {
            let w = 1.0 - k.unsigned_abs() as f64 / (n + 1) as f64;
            (k, phi.value(k) * w)
        })
        .filter(|(_, v)| v.norm() != 0.0)
        .collect();
    SequenceSpec::finite(entries, Some(n))
}
