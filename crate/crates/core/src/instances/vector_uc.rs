//! Finite-dimensional vector space as a uc-cone.
//!
//! The carrier is `R^d × R`: a vector `x` plus a scalar level `t`, with
//! `(x, t) <= (y, s)` iff `‖x − y‖ <= s − t`. The generating element is
//! `w = (0, 1)`, so `x <= y + λw` iff `‖x − y‖ <= λ` and `w(0)w` is the closed
//! unit ball of the chosen norm. Plain vectors live at level 0, where the
//! seminorm of the uc-cone reduces to the vector norm.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::cone::{CarrierKind, Cone, UpperBound, EQ_TOLERANCE};
use crate::ext::ExtReal;
use crate::value::{Value, VectorValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Sup,
    Euclidean,
}

impl NormKind {
    pub fn norm(self, xs: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            NormKind::Sup => xs.into_iter().fold(0.0, |m, x| m.max(x.abs())),
            NormKind::Euclidean => xs.into_iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Sup => "sup",
            NormKind::Euclidean => "euclidean",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VectorUc {
    dim: usize,
    norm: NormKind,
}

impl VectorUc {
    /// `None` for `dim == 0`.
    pub fn new(dim: usize, norm: NormKind) -> Option<Self> {
        (dim > 0).then_some(VectorUc { dim, norm })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    fn diff_norm(&self, a: &VectorValue, b: &VectorValue) -> f64 {
        self.norm
            .norm(a.coords.iter().zip(&b.coords).map(|(x, y)| x - y))
    }
}

fn vector(v: &Value) -> &VectorValue {
    v.as_vector().expect("vector carrier")
}

impl Cone for VectorUc {
    fn name(&self) -> String {
        format!("vector-uc:{}:{}", self.dim, self.norm.as_str())
    }

    fn kind(&self) -> CarrierKind {
        CarrierKind::Vector
    }

    fn validate(&self, value: &Value) -> Result<(), String> {
        let v = value
            .as_vector()
            .ok_or_else(|| format!("{value} is not a vector"))?;
        if v.coords.len() != self.dim {
            return Err(format!(
                "expected dimension {}, got {}",
                self.dim,
                v.coords.len()
            ));
        }
        if !v.level.is_finite() || v.coords.iter().any(|c| !c.is_finite()) {
            return Err(format!("{value} has non-finite components"));
        }
        Ok(())
    }

    fn zero(&self) -> Value {
        Value::Vector(VectorValue::point(vec![0.0; self.dim]))
    }

    fn add(&self, a: &Value, b: &Value) -> Value {
        let (a, b) = (vector(a), vector(b));
        Value::Vector(VectorValue {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
            level: a.level + b.level,
        })
    }

    fn scale(&self, lambda: f64, a: &Value) -> Value {
        let a = vector(a);
        Value::Vector(VectorValue {
            coords: a.coords.iter().map(|x| lambda * x).collect(),
            level: lambda * a.level,
        })
    }

    fn leq(&self, a: &Value, b: &Value) -> bool {
        let (a, b) = (vector(a), vector(b));
        self.diff_norm(a, b) <= b.level - a.level + EQ_TOLERANCE
    }

    fn equal(&self, a: &Value, b: &Value) -> bool {
        let (a, b) = (vector(a), vector(b));
        (a.level - b.level).abs() <= EQ_TOLERANCE
            && a.coords.iter().zip(&b.coords).all(|(x, y)| (x - y).abs() <= EQ_TOLERANCE)
    }

    fn gap(&self, a: &Value, b: &Value) -> f64 {
        let (a, b) = (vector(a), vector(b));
        self.diff_norm(a, b) + (a.level - b.level).abs()
    }

    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> Vec<Value> {
        let mut out = vec![self.zero()];
        while out.len() < n {
            let coords = (0..self.dim).map(|_| rng.random_range(-10.0..10.0)).collect();
            let level = if rng.random_bool(0.5) {
                0.0
            } else {
                rng.random_range(-10.0..10.0)
            };
            out.push(Value::Vector(VectorValue { coords, level }));
        }
        out.truncate(n);
        out
    }

    fn generator(&self) -> Option<Value> {
        Some(Value::Vector(VectorValue {
            coords: vec![0.0; self.dim],
            level: 1.0,
        }))
    }

    fn neighborhood_scale(&self, v: &Value) -> Option<f64> {
        let v = vector(v);
        (v.level > 0.0 && v.coords.iter().all(|&c| c == 0.0)).then_some(v.level)
    }

    fn is_separated(&self) -> bool {
        true
    }

    fn is_antisymmetric(&self) -> bool {
        true
    }

    fn upper_coefficient(&self, a: &Value) -> Option<UpperBound> {
        let a = vector(a);
        let t = self.norm.norm(a.coords.iter().copied()) + a.level;
        Some(UpperBound::At(t.max(0.0)))
    }

    fn lower_coefficient(&self, a: &Value) -> Option<f64> {
        let a = vector(a);
        Some((self.norm.norm(a.coords.iter().copied()) - a.level).max(0.0))
    }

    fn seminorm(&self, a: &Value) -> Option<ExtReal> {
        let a = vector(a);
        Some(ExtReal::Finite(
            self.norm.norm(a.coords.iter().copied()) + a.level.abs(),
        ))
    }

    fn leq_within_all(&self, a: &Value, b: &Value) -> Option<bool> {
        let (a, b) = (vector(a), vector(b));
        Some(self.diff_norm(a, b) <= b.level - a.level)
    }

    fn subtract(&self, a: &Value, b: &Value) -> Option<Value> {
        let (a, b) = (vector(a), vector(b));
        Some(Value::Vector(VectorValue {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
            level: a.level - b.level,
        }))
    }
}
