//! Log-domain arithmetic.
//!
//! `-inf` is the log of zero and never participates in a reduction; a sum of
//! nothing but `-inf` terms stays `-inf`.

use serde::{Serialize, Serializer};

/// Streaming log-sum-exp accumulator. Order of `add` calls fixes the result
/// bit-for-bit.
#[derive(Clone, Copy, Debug)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    /// Merge another partial sum (used to combine per-partition folds).
    pub fn merge(&mut self, other: &LogSum) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            *self = *other;
            return;
        }
        if other.max > self.max {
            self.scaled = self.scaled * (self.max - other.max).exp() + other.scaled;
            self.max = other.max;
        } else {
            self.scaled += other.scaled * (other.max - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// `log(e^a + e^b)`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut acc = LogSum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Differences of log weights where both sides may be `-inf`.
///
/// `(-inf) - (-inf)` has no meaning for the additivity checks; callers get
/// `None` and skip the pair.
#[inline]
pub fn log_gap(whole: f64, parts: f64) -> Option<f64> {
    match (whole == f64::NEG_INFINITY, parts == f64::NEG_INFINITY) {
        (true, true) => None,
        (false, true) => Some(f64::INFINITY),
        (true, false) => Some(f64::NEG_INFINITY),
        (false, false) => Some(whole - parts),
    }
}

/// Snap floating residue around zero (relative to the magnitudes involved).
#[inline]
pub fn snap_zero(x: f64, scale: f64) -> f64 {
    if x.abs() <= 1e-12 * (1.0 + scale.abs()) {
        0.0
    } else {
        x
    }
}

/// Extended real for reports: finite values serialize as numbers, infinities
/// as the strings `"inf"` / `"-inf"`, NaN as `null`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_none()
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_matches_naive_in_range() {
        let (a, b) = (0.5f64, 2.0f64);
        let naive = (a.exp() + b.exp()).ln();
        assert!((log_add(a, b) - naive).abs() < 1e-15);
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        let v = log_add(1234.0, 1232.0);
        assert!((v - (1232.0 + (2f64.exp() + 1.0).ln())).abs() < 1e-12);
        assert!((v - 1234.126928011042972).abs() < 1e-12);
    }

    #[test]
    fn neg_infinity_is_neutral() {
        assert_eq!(log_add(f64::NEG_INFINITY, 3.0), 3.0);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        let mut acc = LogSum::new();
        acc.add(f64::NEG_INFINITY);
        assert_eq!(acc.value(), f64::NEG_INFINITY);
    }

    #[test]
    fn streaming_matches_merge() {
        let xs: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64 * 0.7 - 3.0).collect();
        let whole = log_sum_exp(&xs);
        let mut a = LogSum::new();
        let mut b = LogSum::new();
        for &x in &xs[..17] {
            a.add(x);
        }
        for &x in &xs[17..] {
            b.add(x);
        }
        a.merge(&b);
        assert!((a.value() - whole).abs() < 1e-13);
    }

    #[test]
    fn ext_real_serialization() {
        let s = serde_json::to_string(&[ExtReal(1.5), ExtReal(f64::NEG_INFINITY)]).unwrap();
        assert_eq!(s, "[1.5,\"-inf\"]");
    }
}
