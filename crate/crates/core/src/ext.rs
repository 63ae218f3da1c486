//! Extended reals `R ∪ {+∞}`.
//!
//! `+∞` is a separate variant rather than an IEEE infinity so that the cone
//! convention `0 · (+∞) = 0` never passes through a floating multiplication.
//! `-∞` and NaN are not representable.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `f64::INFINITY` to `PosInf`; rejects NaN and `-∞`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() || x == f64::NEG_INFINITY {
            None
        } else if x == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else {
            Some(ExtReal::Finite(x))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::PosInf => None,
        }
    }

    /// `+∞` is absorbing.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }

    /// Nonnegative scaling with `0 · a = 0` checked before any multiplication.
    pub fn scale(self, lambda: f64) -> Self {
        if lambda == 0.0 {
            return ExtReal::ZERO;
        }
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(lambda * a),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn le(self, other: Self) -> bool {
        match (self, other) {
            (_, ExtReal::PosInf) => true,
            (ExtReal::PosInf, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.le(other) {
            other
        } else {
            self
        }
    }

    /// Lossy view used for reporting; `+∞` becomes `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (ExtReal::le(*self, *other), ExtReal::le(*other, *self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x).expect("ExtReal from NaN or -inf")
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or \"+inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                ExtReal::from_f64(v).ok_or_else(|| E::custom("NaN and -inf are not extended reals"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v.trim() {
                    "+inf" | "inf" | "+∞" | "∞" | "infinity" | "+infinity" => Ok(ExtReal::PosInf),
                    other => other
                        .parse::<f64>()
                        .ok()
                        .and_then(ExtReal::from_f64)
                        .ok_or_else(|| E::custom(format!("not an extended real: {other}"))),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}
