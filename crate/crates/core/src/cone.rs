//! The abstract cone contract and the generic predicates built on it.
//!
//! A concrete cone implements [`Cone`] over raw [`Value`]s. Callers work with
//! [`ConeInstance`], which tags every [`Element`] with its owning instance and
//! rejects mixed-instance operations.

use std::fmt;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::search::{self, MIN_PROBE};
use crate::value::Value;

/// Absolute tolerance for element equality in floating mode.
pub const EQ_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

/// Depth of the default probe schedule `{2^-k w : k <= PROBE_DEPTH}`.
pub const PROBE_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarrierKind {
    ExtendedReal,
    NonnegativeExtendedReal,
    Vector,
    Interval,
}

/// Closed-form answer for "least `t >= 0` with `a <= t·w`".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperBound {
    At(f64),
    Unbounded,
}

/// Rules of one concrete cone, over raw carrier values.
///
/// Implementations may assume every value passed in has been accepted by
/// [`Cone::validate`]. The optional methods return `None` when the instance has
/// no closed form; generic code then falls back to search or probes.
pub trait Cone: fmt::Debug + Send + Sync {
    fn name(&self) -> String;
    fn kind(&self) -> CarrierKind;
    fn validate(&self, value: &Value) -> std::result::Result<(), String>;
    fn zero(&self) -> Value;
    fn add(&self, a: &Value, b: &Value) -> Value;
    /// Called with `lambda >= 0` only.
    fn scale(&self, lambda: f64, a: &Value) -> Value;
    fn leq(&self, a: &Value, b: &Value) -> bool;
    /// Value equality under the instance tolerance policy.
    fn equal(&self, a: &Value, b: &Value) -> bool;
    /// Symmetric gap measure: `+∞` when the two values are not within any
    /// finite neighborhood of each other.
    fn gap(&self, a: &Value, b: &Value) -> f64;
    fn sample(&self, rng: &mut dyn RngCore, n: usize) -> Vec<Value>;

    /// Generating element `w` of a uc-cone.
    fn generator(&self) -> Option<Value> {
        None
    }

    /// `Some(s)` when `v = s·w` with `s > 0`, i.e. `v` belongs to `V`.
    fn neighborhood_scale(&self, _v: &Value) -> Option<f64> {
        None
    }

    fn is_separated(&self) -> bool {
        false
    }

    fn is_antisymmetric(&self) -> bool {
        false
    }

    fn upper_coefficient(&self, _a: &Value) -> Option<UpperBound> {
        None
    }

    /// Least `t >= 0` with `0 <= a + t·w`.
    fn lower_coefficient(&self, _a: &Value) -> Option<f64> {
        None
    }

    fn seminorm(&self, _a: &Value) -> Option<ExtReal> {
        None
    }

    /// Decides `a <= b + εw` for every `ε > 0` in closed form.
    fn leq_within_all(&self, _a: &Value, _b: &Value) -> Option<bool> {
        None
    }

    /// `a - b` when the carrier is a real vector space.
    fn subtract(&self, _a: &Value, _b: &Value) -> Option<Value> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceTag(Arc<str>);

impl InstanceTag {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InstanceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A value of some cone's carrier, tagged with that cone.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    tag: InstanceTag,
    value: Value,
}

impl Element {
    pub fn tag(&self) -> &InstanceTag {
        &self.tag
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn into_value(self) -> Value {
        self.value
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value.serialize(s)
    }
}

/// A member of the abstract 0-neighborhood system.
///
/// `scale` is known when the element is a positive multiple of the instance
/// generator; closed-form shortcuts apply only then.
#[derive(Debug, Clone, PartialEq)]
pub struct Nbhd {
    element: Element,
    scale: Option<f64>,
}

impl Nbhd {
    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn scale(&self) -> Option<f64> {
        self.scale
    }
}

impl fmt::Display for Nbhd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.element.fmt(f)
    }
}

/// Quantifier over `v ∈ V` for closure and separation checks.
#[derive(Debug, Clone, Copy)]
pub enum Quantifier<'a> {
    /// Closed form from the instance.
    Analytic,
    /// Finite probe list.
    Probes(&'a [Nbhd]),
}

/// Shared, immutable handle to a concrete cone.
#[derive(Clone)]
pub struct ConeInstance {
    tag: InstanceTag,
    rules: Arc<dyn Cone>,
}

impl fmt::Debug for ConeInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ConeInstance").field(&self.tag.as_str()).finish()
    }
}

impl ConeInstance {
    pub fn new(rules: impl Cone + 'static) -> Self {
        let tag = InstanceTag(rules.name().into());
        ConeInstance {
            tag,
            rules: Arc::new(rules),
        }
    }

    pub fn tag(&self) -> &InstanceTag {
        &self.tag
    }

    pub fn name(&self) -> &str {
        self.tag.as_str()
    }

    pub fn kind(&self) -> CarrierKind {
        self.rules.kind()
    }

    pub fn rules(&self) -> &dyn Cone {
        self.rules.as_ref()
    }

    pub fn is_separated(&self) -> bool {
        self.rules.is_separated()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rules.is_antisymmetric()
    }

    pub fn is_uc(&self) -> bool {
        self.rules.generator().is_some()
    }

    pub fn is_vector_space(&self) -> bool {
        let zero = self.rules.zero();
        self.rules.subtract(&zero, &zero).is_some()
    }

    pub fn element(&self, value: Value) -> Result<Element> {
        self.rules
            .validate(&value)
            .map_err(|reason| Error::InvalidValue {
                instance: self.name().to_owned(),
                reason,
            })?;
        Ok(Element {
            tag: self.tag.clone(),
            value,
        })
    }

    fn wrap(&self, value: Value) -> Element {
        Element {
            tag: self.tag.clone(),
            value,
        }
    }

    pub fn zero(&self) -> Element {
        self.wrap(self.rules.zero())
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.tag == self.tag {
            Ok(())
        } else {
            Err(Error::InstanceMismatch {
                left: self.name().to_owned(),
                right: a.tag.to_string(),
            })
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(self.rules.add(&a.value, &b.value)))
    }

    pub fn scale(&self, lambda: f64, a: &Element) -> Result<Element> {
        self.check(a)?;
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::NegativeScalar(lambda));
        }
        Ok(self.wrap(self.rules.scale(lambda, &a.value)))
    }

    pub fn leq(&self, a: &Element, b: &Element) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.rules.leq(&a.value, &b.value))
    }

    pub fn equal(&self, a: &Element, b: &Element) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.rules.equal(&a.value, &b.value))
    }

    pub fn gap(&self, a: &Element, b: &Element) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.rules.gap(&a.value, &b.value))
    }

    /// `a - b`; only for vector-space carriers.
    pub fn subtract(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        self.rules
            .subtract(&a.value, &b.value)
            .map(|v| self.wrap(v))
            .ok_or_else(|| Error::NotVectorSpace(self.name().to_owned()))
    }

    pub fn generator(&self) -> Option<Element> {
        self.rules.generator().map(|w| self.wrap(w))
    }

    /// The neighborhood `scale·w` of a uc-cone.
    pub fn nbhd(&self, scale: f64) -> Result<Nbhd> {
        let w = self
            .rules
            .generator()
            .ok_or_else(|| Error::NotUcCone(self.name().to_owned()))?;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidNeighborhood(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Nbhd {
            element: self.wrap(self.rules.scale(scale, &w)),
            scale: Some(scale),
        })
    }

    /// Accepts any strictly positive element as a neighborhood element.
    pub fn nbhd_from_element(&self, element: Element) -> Result<Nbhd> {
        self.check(&element)?;
        let zero = self.rules.zero();
        if !(self.rules.leq(&zero, &element.value) && !self.rules.leq(&element.value, &zero)) {
            return Err(Error::InvalidNeighborhood(format!(
                "0 < v fails for v = {element}"
            )));
        }
        let scale = self.rules.neighborhood_scale(&element.value);
        Ok(Nbhd { element, scale })
    }

    pub fn scale_nbhd(&self, lambda: f64, v: &Nbhd) -> Result<Nbhd> {
        self.check(&v.element)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidNeighborhood(format!(
                "neighborhood scaling must be positive, got {lambda}"
            )));
        }
        Ok(Nbhd {
            element: self.wrap(self.rules.scale(lambda, &v.element.value)),
            scale: v.scale.map(|s| s * lambda),
        })
    }

    /// Generator scalings used when sampling neighborhood axioms.
    pub fn generators(&self) -> Vec<Nbhd> {
        if !self.is_uc() {
            return Vec::new();
        }
        [1.0 / 256.0, 1.0 / 16.0, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0]
            .iter()
            .map(|&s| self.nbhd(s).expect("positive scale"))
            .collect()
    }

    /// Probe schedule `{2^-k · scale · w : 0 <= k <= depth}`.
    pub fn probes(&self, scale: f64, depth: u32) -> Result<Vec<Nbhd>> {
        (0..=depth)
            .map(|k| self.nbhd(scale * 0.5f64.powi(k as i32)))
            .collect()
    }

    /// `b ∈ v(a)`, i.e. `b <= a + v`.
    pub fn in_upper_nbhd(&self, b: &Element, a: &Element, v: &Nbhd) -> Result<bool> {
        let shifted = self.add(a, &v.element)?;
        self.leq(b, &shifted)
    }

    /// `b ∈ (a)v`, i.e. `a <= b + v`.
    pub fn in_lower_nbhd(&self, b: &Element, a: &Element, v: &Nbhd) -> Result<bool> {
        let shifted = self.add(b, &v.element)?;
        self.leq(a, &shifted)
    }

    /// `b ∈ v(a)v`.
    pub fn in_symmetric_nbhd(&self, b: &Element, a: &Element, v: &Nbhd) -> Result<bool> {
        Ok(self.in_upper_nbhd(b, a, v)? && self.in_lower_nbhd(b, a, v)?)
    }

    /// Least `λ > 0` with `a <= λv`, `None` when `a` is not upper bounded.
    ///
    /// Elements below `0` report [`MIN_PROBE`].
    pub fn upper_bound_coefficient(&self, a: &Element, v: &Nbhd) -> Result<Option<f64>> {
        self.check(a)?;
        self.check(&v.element)?;
        if let (Some(s), Some(bound)) = (v.scale, self.rules.upper_coefficient(&a.value)) {
            return Ok(match bound {
                UpperBound::Unbounded => None,
                UpperBound::At(t) => Some(floor_probe(t / s)),
            });
        }
        self.upper_bound_coefficient_by_search(a, v)
    }

    /// Search-only route for [`Self::upper_bound_coefficient`].
    pub fn upper_bound_coefficient_by_search(&self, a: &Element, v: &Nbhd) -> Result<Option<f64>> {
        self.check(a)?;
        self.check(&v.element)?;
        Ok(search::min_coefficient(MIN_PROBE, |lambda| {
            let bound = self.rules.scale(lambda, &v.element.value);
            self.rules.leq(&a.value, &bound)
        }))
    }

    /// Least `ρ > 0` with `0 <= a + ρv`.
    pub fn lower_bound_coefficient(&self, a: &Element, v: &Nbhd) -> Result<f64> {
        self.check(a)?;
        self.check(&v.element)?;
        if let (Some(s), Some(t)) = (v.scale, self.rules.lower_coefficient(&a.value)) {
            return Ok(floor_probe(t / s));
        }
        self.lower_bound_coefficient_by_search(a, v)
    }

    pub fn lower_bound_coefficient_by_search(&self, a: &Element, v: &Nbhd) -> Result<f64> {
        self.check(a)?;
        self.check(&v.element)?;
        let zero = self.rules.zero();
        search::min_coefficient(MIN_PROBE, |rho| {
            let shifted = self.rules.add(&a.value, &self.rules.scale(rho, &v.element.value));
            self.rules.leq(&zero, &shifted)
        })
        .ok_or_else(|| {
            Error::InternalInconsistency(format!(
                "{a} is not bounded below in the full cone `{}`",
                self.name()
            ))
        })
    }

    /// Upper and lower bounded with respect to every generator scaling.
    pub fn is_bounded(&self, a: &Element) -> Result<bool> {
        let v = match self.generator() {
            Some(w) => self.nbhd_from_element(w)?,
            None => return Err(Error::NotUcCone(self.name().to_owned())),
        };
        Ok(self.upper_bound_coefficient(a, &v)?.is_some() && self.lower_bound_coefficient(a, &v).is_ok())
    }

    /// Sampled membership of `x` in the closure of `a`: `x ∈ v(a)` for every probe.
    pub fn closure_contains(&self, x: &Element, a: &Element, probes: &[Nbhd]) -> Result<bool> {
        if probes.is_empty() {
            return Err(Error::EmptyProbes);
        }
        for v in probes {
            if !self.in_upper_nbhd(x, a, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact closure membership when the instance decides "for all `v`".
    pub fn closure_contains_analytic(&self, x: &Element, a: &Element) -> Result<Option<bool>> {
        self.check(x)?;
        self.check(a)?;
        Ok(self.rules.leq_within_all(&x.value, &a.value))
    }

    /// `a <= b + v` for every `v` under the given quantifier.
    pub fn leq_within_all(&self, a: &Element, b: &Element, quantifier: Quantifier<'_>) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        match quantifier {
            Quantifier::Analytic => match self.rules.leq_within_all(&a.value, &b.value) {
                Some(holds) => Ok(holds),
                None => {
                    let w = self
                        .generator()
                        .ok_or_else(|| Error::NotUcCone(self.name().to_owned()))?;
                    let v = self.nbhd_from_element(w)?;
                    let scale = v.scale.unwrap_or(1.0);
                    let probes = self.probes(scale, PROBE_DEPTH)?;
                    self.closure_contains(a, b, &probes)
                }
            },
            Quantifier::Probes(probes) => self.closure_contains(a, b, probes),
        }
    }

    /// Separation lemma: if `a <= b + v` and `b <= a + v` for all `v`, then
    /// `a = b`. Returns whether the conclusion holds (vacuously when the
    /// hypothesis fails).
    pub fn separation_check(&self, a: &Element, b: &Element, quantifier: Quantifier<'_>) -> Result<bool> {
        let hypothesis =
            self.leq_within_all(a, b, quantifier)? && self.leq_within_all(b, a, quantifier)?;
        if !hypothesis {
            return Ok(true);
        }
        self.equal(a, b)
    }

    /// `q(a) = inf{μ > 0 : μ⁻¹a ∈ w(0)w}`.
    pub fn seminorm(&self, a: &Element) -> Result<ExtReal> {
        self.check(a)?;
        if self.rules.generator().is_none() {
            return Err(Error::NotUcCone(self.name().to_owned()));
        }
        if let Some(q) = self.rules.seminorm(&a.value) {
            return Ok(q);
        }
        self.seminorm_by_search(a)
    }

    /// Bisection over the membership predicate `μ ↦ [μ⁻¹a ∈ w(0)w]`.
    pub fn seminorm_by_search(&self, a: &Element) -> Result<ExtReal> {
        self.check(a)?;
        let w = self
            .rules
            .generator()
            .ok_or_else(|| Error::NotUcCone(self.name().to_owned()))?;
        let zero = self.rules.zero();
        let member = |mu: f64| {
            let b = self.rules.scale(1.0 / mu, &a.value);
            self.rules.leq(&b, &self.rules.add(&zero, &w)) && self.rules.leq(&zero, &self.rules.add(&b, &w))
        };
        let floor = 1.0 / (1u64 << 60) as f64;
        if member(floor) {
            return Ok(ExtReal::ZERO);
        }
        Ok(match search::min_coefficient(floor, member) {
            Some(mu) => ExtReal::Finite(mu),
            None => ExtReal::PosInf,
        })
    }

    /// Seeded pseudo-random sample of carrier elements.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<Element> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.rules
            .sample(&mut rng, n)
            .into_iter()
            .map(|v| self.wrap(v))
            .collect()
    }
}

fn floor_probe(t: f64) -> f64 {
    if t > 0.0 {
        t
    } else {
        MIN_PROBE
    }
}
