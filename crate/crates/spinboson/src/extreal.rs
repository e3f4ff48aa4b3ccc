//! Reals extended with `+inf` / `-inf`, for divergent moment integrals and
//! pencil boundary limits.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// A real number extended with both infinities.
///
/// The total order is the usual one: `NegInf < Finite(x) < PosInf` and finite
/// values compare by value. `Finite` payloads are never NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(x: f64) -> Self {
        assert!(x.is_finite(), "ExtReal::finite requires a finite value");
        ExtReal::Finite(x)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Finite payload, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Maps to f64, sending the infinities to `f64::INFINITY` / `NEG_INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }

    /// `a + s*x` for a finite scale and offset; infinities absorb.
    pub fn affine(self, scale: f64, offset: f64) -> Self {
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(offset + scale * x),
            inf => {
                if scale >= 0.0 {
                    inf
                } else {
                    inf.neg()
                }
            }
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let rank = |e: &ExtReal| match e {
            ExtReal::NegInf => 0u8,
            ExtReal::Finite(_) => 1,
            ExtReal::PosInf => 2,
        };
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (a, b) => rank(a).partial_cmp(&rank(b)),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}
