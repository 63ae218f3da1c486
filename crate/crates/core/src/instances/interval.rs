//! Cone of nonempty closed bounded intervals.
//!
//! Minkowski addition, endpoint scaling, and the inclusion order
//! `[a₁, b₁] <= [a₂, b₂]` iff `a₂ <= a₁` and `b₁ <= b₂`. Neighborhoods are
//! generated by `w = [-1, 1]`.

use rand::{Rng, RngCore};

use crate::cone::{CarrierKind, Cone, UpperBound, EQ_TOLERANCE};
use crate::ext::ExtReal;
use crate::value::{Interval, Value};

#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalCone;

fn interval(v: &Value) -> Interval {
    v.as_interval().expect("interval carrier")
}

impl Cone for IntervalCone {
    fn name(&self) -> String {
        "intervals".into()
    }

    fn kind(&self) -> CarrierKind {
        CarrierKind::Interval
    }

    fn validate(&self, value: &Value) -> Result<(), String> {
        match value {
            Value::Interval(i) if Interval::new(i.lo, i.hi).is_some() => Ok(()),
            Value::Interval(i) => Err(format!("[{}, {}] is not a closed bounded interval", i.lo, i.hi)),
            other => Err(format!("{other} is not an interval")),
        }
    }

    fn zero(&self) -> Value {
        Value::Interval(Interval { lo: 0.0, hi: 0.0 })
    }

    fn add(&self, a: &Value, b: &Value) -> Value {
        let (a, b) = (interval(a), interval(b));
        Value::Interval(Interval {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
        })
    }

    fn scale(&self, lambda: f64, a: &Value) -> Value {
        let a = interval(a);
        Value::Interval(Interval {
            lo: lambda * a.lo,
            hi: lambda * a.hi,
        })
    }

    fn leq(&self, a: &Value, b: &Value) -> bool {
        let (a, b) = (interval(a), interval(b));
        b.lo <= a.lo && a.hi <= b.hi
    }

    fn equal(&self, a: &Value, b: &Value) -> bool {
        let (a, b) = (interval(a), interval(b));
        (a.lo - b.lo).abs() <= EQ_TOLERANCE && (a.hi - b.hi).abs() <= EQ_TOLERANCE
    }

    /// Hausdorff distance.
    fn gap(&self, a: &Value, b: &Value) -> f64 {
        let (a, b) = (interval(a), interval(b));
        (a.lo - b.lo).abs().max((a.hi - b.hi).abs())
    }

    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> Vec<Value> {
        let mut out = vec![self.zero(), Value::Interval(Interval { lo: -1.0, hi: 1.0 })];
        while out.len() < n {
            let lo: f64 = rng.random_range(-10.0..10.0);
            let width = if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.0..5.0)
            };
            out.push(Value::Interval(Interval { lo, hi: lo + width }));
        }
        out.truncate(n);
        out
    }

    fn generator(&self) -> Option<Value> {
        Some(Value::Interval(Interval { lo: -1.0, hi: 1.0 }))
    }

    fn neighborhood_scale(&self, v: &Value) -> Option<f64> {
        let v = interval(v);
        (v.hi > 0.0 && v.lo == -v.hi).then_some(v.hi)
    }

    fn is_separated(&self) -> bool {
        true
    }

    fn is_antisymmetric(&self) -> bool {
        true
    }

    fn upper_coefficient(&self, a: &Value) -> Option<UpperBound> {
        // [lo, hi] ⊆ [-t, t]
        let a = interval(a);
        Some(UpperBound::At((-a.lo).max(a.hi).max(0.0)))
    }

    fn lower_coefficient(&self, a: &Value) -> Option<f64> {
        // 0 ∈ [lo - t, hi + t]
        let a = interval(a);
        Some(a.lo.max(-a.hi).max(0.0))
    }

    fn seminorm(&self, a: &Value) -> Option<ExtReal> {
        let a = interval(a);
        Some(ExtReal::Finite(a.lo.abs().max(a.hi.abs())))
    }

    fn leq_within_all(&self, a: &Value, b: &Value) -> Option<bool> {
        Some(self.leq(a, b))
    }
}
