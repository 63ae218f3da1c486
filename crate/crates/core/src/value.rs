use std::fmt;

use serde::Serialize;

use crate::ext::ExtReal;

/// Carrier value of a cone element.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Ext(ExtReal),
    Vector(VectorValue),
    Interval(Interval),
}

/// Element of a vector uc-cone: a point of `R^d` plus the scalar level that
/// carries the generating element `w = (0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorValue {
    pub coords: Vec<f64>,
    pub level: f64,
}

impl VectorValue {
    pub fn point(coords: Vec<f64>) -> Self {
        VectorValue { coords, level: 0.0 }
    }
}

/// Closed bounded interval `[lo, hi]`, `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo.is_finite() && hi.is_finite() && lo <= hi).then_some(Interval { lo, hi })
    }
}

impl Value {
    pub fn ext(x: f64) -> Self {
        Value::Ext(ExtReal::from(x))
    }

    pub fn as_ext(&self) -> Option<ExtReal> {
        match self {
            Value::Ext(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&VectorValue> {
        match self {
            Value::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_interval(&self) -> Option<Interval> {
        match self {
            Value::Interval(i) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Ext(x) => write!(f, "{x}"),
            Value::Vector(v) => {
                f.write_str("(")?;
                for (i, c) in v.coords.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                if v.level != 0.0 {
                    write!(f, "; level {}", v.level)?;
                }
                f.write_str(")")
            }
            Value::Interval(i) => write!(f, "[{}, {}]", i.lo, i.hi),
        }
    }
}
