//! Reductions of the Jensen and linear stability problems to the Pexider engine.

use crate::cone::{ConeInstance, Nbhd};
use crate::domain::{Domain, Point, PointMap};
use crate::error::{Error, Result};

use super::PexiderInstance;

/// `g = h = x ↦ ½f(2x)`.
///
/// When `2f((x+y)/2) ∈ v(f(x)+f(y))v`, the resulting triple satisfies the
/// Pexider hypothesis with the same `v`.
pub fn jensen_adapter(target: &ConeInstance, domain: Domain, f: PointMap, v: Nbhd) -> Result<PexiderInstance> {
    for x in domain.points() {
        domain.check_depth(x, 1).map_err(|_| {
            Error::InvalidDomain(format!("domain is not closed under doubling at {x}"))
        })?;
    }
    let rules = target.clone();
    let inner = f.clone();
    let half_doubled = PointMap::new(move |x| rules.rules().scale(0.5, &inner.eval(&x.doubled(1))));
    PexiderInstance::new(target.clone(), domain, f, half_doubled.clone(), half_doubled, v)
}

/// `g(x) = αf(x/α)`, `h = f`.
///
/// When `f(αx+y) ∈ v(αf(x)+f(y))v`, the resulting triple satisfies the
/// Pexider hypothesis.
pub fn linear_adapter(target: &ConeInstance, domain: Domain, f: PointMap, alpha: f64, v: Nbhd) -> Result<PexiderInstance> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
    }
    for x in domain.points() {
        Point::new(x.scale(1.0 / alpha).coords().to_vec()).map_err(|_| {
            Error::InvalidDomain(format!("{x}/{alpha} is not a domain point"))
        })?;
    }
    let rules = target.clone();
    let inner = f.clone();
    let g = PointMap::new(move |x| rules.rules().scale(alpha, &inner.eval(&x.scale(1.0 / alpha))));
    PexiderInstance::new(target.clone(), domain, f.clone(), g, f, v)
}
