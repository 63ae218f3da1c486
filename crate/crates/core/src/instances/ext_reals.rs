//! `R̄ = R ∪ {+∞}` and `R̄₊ = [0, +∞]` with `ξ = {ε > 0}`.

use rand::{Rng, RngCore};

use crate::cone::{CarrierKind, Cone, UpperBound, EQ_TOLERANCE};
use crate::ext::ExtReal;
use crate::value::Value;

#[derive(Debug, Clone, Copy)]
pub struct ExtendedReals {
    nonneg: bool,
}

impl ExtendedReals {
    pub fn new(nonneg: bool) -> Self {
        ExtendedReals { nonneg }
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }
}

fn ext(v: &Value) -> ExtReal {
    v.as_ext().expect("extended-real carrier")
}

impl Cone for ExtendedReals {
    fn name(&self) -> String {
        if self.nonneg {
            "ext-reals-nonneg".into()
        } else {
            "ext-reals".into()
        }
    }

    fn kind(&self) -> CarrierKind {
        if self.nonneg {
            CarrierKind::NonnegativeExtendedReal
        } else {
            CarrierKind::ExtendedReal
        }
    }

    fn validate(&self, value: &Value) -> Result<(), String> {
        match value {
            Value::Ext(ExtReal::Finite(x)) if !x.is_finite() => Err(format!("{x} is not finite")),
            Value::Ext(ExtReal::Finite(x)) if self.nonneg && *x < 0.0 => {
                Err(format!("{x} is negative"))
            }
            Value::Ext(_) => Ok(()),
            other => Err(format!("{other} is not an extended real")),
        }
    }

    fn zero(&self) -> Value {
        Value::Ext(ExtReal::ZERO)
    }

    fn add(&self, a: &Value, b: &Value) -> Value {
        Value::Ext(ext(a).add(ext(b)))
    }

    fn scale(&self, lambda: f64, a: &Value) -> Value {
        Value::Ext(ext(a).scale(lambda))
    }

    fn leq(&self, a: &Value, b: &Value) -> bool {
        ext(a).le(ext(b))
    }

    fn equal(&self, a: &Value, b: &Value) -> bool {
        match (ext(a), ext(b)) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs() <= EQ_TOLERANCE,
            (ExtReal::PosInf, ExtReal::PosInf) => true,
            _ => false,
        }
    }

    fn gap(&self, a: &Value, b: &Value) -> f64 {
        match (ext(a), ext(b)) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs(),
            (ExtReal::PosInf, ExtReal::PosInf) => 0.0,
            _ => f64::INFINITY,
        }
    }

    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> Vec<Value> {
        let mut out = vec![Value::Ext(ExtReal::ZERO), Value::Ext(ExtReal::PosInf)];
        let lo = if self.nonneg { 0.0 } else { -10.0 };
        while out.len() < n {
            let x = if rng.random_bool(0.25) {
                // dyadic values keep several law checks exact
                (rng.random_range(lo * 8.0..=80.0) as f64).round() / 8.0
            } else {
                rng.random_range(lo..10.0)
            };
            out.push(Value::Ext(ExtReal::Finite(x)));
        }
        out.truncate(n);
        out
    }

    fn generator(&self) -> Option<Value> {
        Some(Value::Ext(ExtReal::Finite(1.0)))
    }

    fn neighborhood_scale(&self, v: &Value) -> Option<f64> {
        match ext(v) {
            ExtReal::Finite(x) if x > 0.0 => Some(x),
            _ => None,
        }
    }

    fn is_separated(&self) -> bool {
        true
    }

    fn is_antisymmetric(&self) -> bool {
        true
    }

    fn upper_coefficient(&self, a: &Value) -> Option<UpperBound> {
        Some(match ext(a) {
            ExtReal::Finite(x) => UpperBound::At(x.max(0.0)),
            ExtReal::PosInf => UpperBound::Unbounded,
        })
    }

    fn lower_coefficient(&self, a: &Value) -> Option<f64> {
        Some(match ext(a) {
            ExtReal::Finite(x) => (-x).max(0.0),
            ExtReal::PosInf => 0.0,
        })
    }

    fn seminorm(&self, a: &Value) -> Option<ExtReal> {
        Some(match ext(a) {
            ExtReal::Finite(x) => ExtReal::Finite(x.abs()),
            ExtReal::PosInf => ExtReal::PosInf,
        })
    }

    fn leq_within_all(&self, a: &Value, b: &Value) -> Option<bool> {
        // a <= b + ε for every ε > 0 iff a <= b
        Some(ext(a).le(ext(b)))
    }
}
