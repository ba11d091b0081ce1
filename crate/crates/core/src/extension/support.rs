use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{check_quarter_support, FunctionSpec};

/// `S_N(x) = S(4Nx − 2N)`, which maps `supp S ⊆ [−N, N]` into `[1/4, 3/4]`.
pub fn support_normalize(s: &FunctionSpec, n: u64) -> Result<FunctionSpec> {
    if n == 0 {
        return Err(Error::Domain("N must be a positive integer".into()));
    }
    let nf = n as f64;
    match s.support() {
        Some((lo, hi)) if lo >= -nf && hi <= nf => {}
        Some((lo, hi)) => {
            return Err(Error::precondition(format!(
                "supp S = [{lo}, {hi}] is not inside [−{n}, {n}]"
            )))
        }
        None => return Err(Error::precondition("S has no structurally compact support")),
    }
    let out = s.map(|e| e.dilate(4.0 * nf).translate(0.5));
    check_quarter_support(&out)?;
    Ok(out)
}

/// Smallest positive integer `N` with `supp S ⊆ [−N, N]`.
pub fn support_radius(s: &FunctionSpec) -> Option<u64> {
    let (lo, hi) = s.support()?;
    Some(lo.abs().max(hi.abs()).ceil().max(1.0) as u64)
}

/// A kernel together with the exponents `p` for which `Λ ∈ S_p(ℝ)` is known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRecord {
    #[serde(skip)]
    pub function: FunctionSpec,
    pub s_p_known: Vec<f64>,
    pub notes: Vec<String>,
}

impl KernelRecord {
    pub fn new(function: FunctionSpec) -> Self {
        Self {
            function,
            s_p_known: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_membership(mut self, p: f64, note: impl Into<String>) -> Self {
        if !self.s_p_known.contains(&p) {
            self.s_p_known.push(p);
        }
        self.notes.push(note.into());
        self
    }
}

/// `Λ ∘ A` with `A(x) = αx` for a nonzero integer `α`; known `S_p` memberships carry over.
pub fn rescale(kernel: &KernelRecord, alpha: f64) -> Result<KernelRecord> {
    if alpha == 0.0 || alpha.fract() != 0.0 || !alpha.is_finite() {
        return Err(Error::Domain(format!("rescale needs a nonzero integer α, got {alpha}")));
    }
    let function = if alpha == 1.0 {
        kernel.function.clone()
    } else if alpha == -1.0 {
        kernel.function.reflect()
    } else {
        kernel.function.map(|e| e.dilate(alpha))
    };
    let mut notes = kernel.notes.clone();
    if !kernel.s_p_known.is_empty() {
        notes.push(format!("S_p membership preserved under ξ ↦ {alpha}ξ (integer dilation)"));
    }
    Ok(KernelRecord {
        function,
        s_p_known: kernel.s_p_known.clone(),
        notes,
    })
}

/// Convenience for callers holding only a `FunctionSpec`.
pub fn rescale_function(f: &FunctionSpec, alpha: f64) -> Result<FunctionSpec> {
    Ok(rescale(&KernelRecord::new(f.clone()), alpha)?.function)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Expr;

    #[test]
    fn normalize_triangle() {
        let s = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        let s1 = support_normalize(&s, 1).unwrap();
        assert_eq!(s1.support(), Some((0.25, 0.75)));
        assert_eq!(s1.eval(0.5), s.eval(0.0));
        for x in [0.3, 0.41, 0.6, 0.7] {
            assert!((s1.eval(x) - s.eval(4.0 * x - 2.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn normalize_indicator() {
        let s = FunctionSpec::from(Expr::indicator(-2.0, 2.0));
        let s2 = support_normalize(&s, 2).unwrap();
        let (lo, hi) = s2.support().unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && (hi - 0.75).abs() < 1e-15);
        assert!(support_normalize(&s, 1).is_err());
    }

    #[test]
    fn rescale_cases() {
        let ind = FunctionSpec::from(Expr::indicator(0.0, 1.0));
        let r = rescale_function(&ind, 2.0).unwrap();
        assert_eq!(r.eval(0.49).re, 1.0);
        assert_eq!(r.eval(0.5).re, 0.0);
        let tri = FunctionSpec::from(Expr::triangle(0.0, 1.0));
        assert_eq!(rescale_function(&tri, -1.0).unwrap(), tri);
        assert_eq!(rescale_function(&tri, 1.0).unwrap(), tri);
        assert!(rescale_function(&tri, 0.0).is_err());
        assert!(rescale_function(&tri, 1.5).is_err());
    }

    #[test]
    fn flags_propagate() {
        let k = KernelRecord::new(FunctionSpec::from(Expr::triangle(0.0, 1.0))).with_membership(2.0, "δ_Λ = 1");
        let r = rescale(&k, 3.0).unwrap();
        assert_eq!(r.s_p_known, vec![2.0]);
        assert_eq!(r.notes.len(), 2);
    }
}
