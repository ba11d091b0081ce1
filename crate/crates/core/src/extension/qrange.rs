use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper end of a q-interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upper {
    /// Closed at a finite rational.
    Closed(Rational64),
    /// Open at infinity.
    Unbounded,
}

/// Exponents `q` for which the extension lands in `M_q(ℝ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRange {
    pub p: Rational64,
    pub lo: Rational64,
    pub hi: Upper,
}

impl QRange {
    /// `[1, ∞)`.
    pub fn all_finite(p: Rational64) -> Self {
        Self {
            p,
            lo: Rational64::from_integer(1),
            hi: Upper::Unbounded,
        }
    }

    pub fn contains(&self, q: Rational64) -> bool {
        q >= self.lo
            && match self.hi {
                Upper::Closed(h) => q <= h,
                Upper::Unbounded => true,
            }
    }

    /// `1/q_lo + 1/q_hi`, or `None` for an unbounded range.
    pub fn conjugate_sum(&self) -> Option<Rational64> {
        match self.hi {
            Upper::Closed(h) => Some(self.lo.recip() + h.recip()),
            Upper::Unbounded => None,
        }
    }
}

impl fmt::Display for QRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Upper::Closed(h) => write!(f, "[{}, {}]", self.lo, h),
            Upper::Unbounded => write!(f, "[{}, inf)", self.lo),
        }
    }
}

impl Serialize for QRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QRange", 4)?;
        st.serialize_field("p", &self.p.to_string())?;
        st.serialize_field("q_lo", &self.lo.to_string())?;
        match self.hi {
            Upper::Closed(h) => {
                st.serialize_field("q_hi", &h.to_string())?;
                st.serialize_field("upper_open", &false)?;
            }
            Upper::Unbounded => {
                st.serialize_field("q_hi", "inf")?;
                st.serialize_field("upper_open", &true)?;
            }
        }
        st.end()
    }
}

/// `[2p/(3p−2), 2p/(2−p)]` for `1 < p < 2`, `[1, ∞)` at `p = 2`, `[2p/(p+2), 2p/(p−2)]` for `p > 2`.
pub fn q_range(p: Rational64) -> Result<QRange> {
    let one = Rational64::from_integer(1);
    let two = Rational64::from_integer(2);
    let three = Rational64::from_integer(3);
    if p <= one {
        return Err(Error::Domain(format!("q_range needs 1 < p < ∞, got p = {p}")));
    }
    if p == two {
        return Ok(QRange::all_finite(p));
    }
    let twop = two * p;
    let (lo, hi) = if p < two {
        (twop / (three * p - two), twop / (two - p))
    } else {
        (twop / (p + two), twop / (p - two))
    };
    Ok(QRange {
        p,
        lo,
        hi: Upper::Closed(hi),
    })
}

/// `q_range` for a floating exponent, converted to the nearest small rational first.
pub fn q_range_f64(p: f64) -> Result<QRange> {
    if !p.is_finite() {
        return Err(Error::Domain(format!("q_range needs 1 < p < ∞, got p = {p}")));
    }
    q_range(to_rational(p)?)
}

pub(crate) fn to_rational(p: f64) -> Result<Rational64> {
    Rational64::approximate_float(p).ok_or_else(|| Error::Domain(format!("{p} has no rational approximation")))
}

/// Parses `"4/3"`, `"3"`, or a terminating decimal such as `"1.5"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    let bad = || Error::Domain(format!("cannot read {t:?} as a rational number"));
    if let Some((int, frac)) = t.split_once('.') {
        if t.contains('/') || frac.is_empty() && int.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > 15 {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" || int == "+" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let whole = Rational64::from_integer(int_part.abs()) + Rational64::new(num, den);
        return Ok(if neg { -whole } else { whole });
    }
    let r = Rational64::from_str(t).map_err(|_| bad())?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn known_ranges() {
        assert_eq!(q_range(r(2, 1)).unwrap().to_string(), "[1, inf)");
        let a = q_range(r(4, 3)).unwrap();
        assert_eq!((a.lo, a.hi), (r(4, 3), Upper::Closed(r(4, 1))));
        let b = q_range(r(4, 1)).unwrap();
        assert_eq!((b.lo, b.hi), (r(4, 3), Upper::Closed(r(4, 1))));
    }

    #[test]
    fn endpoints_are_conjugate() {
        for p in [r(4, 3), r(3, 2), r(5, 2), r(4, 1), r(199, 100), r(201, 100)] {
            assert_eq!(q_range(p).unwrap().conjugate_sum(), Some(r(1, 1)), "p = {p}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(q_range(r(1, 1)).is_err());
        assert!(q_range(r(1, 2)).is_err());
        assert!(q_range_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("4/3").unwrap(), r(4, 3));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert_eq!(parse_rational("1.5").unwrap(), r(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn near_two_is_exact() {
        let q = q_range(r(1999, 1000)).unwrap();
        assert_eq!(q.hi, Upper::Closed(r(3998, 1)));
    }
}
