//! Brute-force reference for the dyadic limit, kept apart from the engine
//! iteration so the two can cross-check each other.

use crate::cone::{ConeInstance, Element};
use crate::domain::{Point, PointMap, Tabulation};
use crate::error::{Error, Result};

/// One direct evaluation `f(2ᴹx)/2ᴹ`.
pub fn oracle_limit(target: &ConeInstance, f: &PointMap, x: &Point, m: u32) -> Result<Element> {
    let factor = (m as f64).exp2();
    let far: Vec<f64> = x.coords().iter().map(|c| c * factor).collect();
    if far.iter().any(|c| !c.is_finite()) {
        return Err(Error::DomainExhausted {
            point: x.to_string(),
            requested: m,
            available: 0,
        });
    }
    let value = f.eval_in(target, &Point::new(far)?)?;
    target.scale(1.0 / factor, &value)
}

/// Largest gap between `table` and the oracle at depth `m` over the table's
/// points.
pub fn oracle_gap(table: &Tabulation, f: &PointMap, m: u32) -> Result<f64> {
    let target = table.target();
    let mut worst: f64 = 0.0;
    for (x, a) in table.entries() {
        worst = worst.max(target.gap(a, &oracle_limit(target, f, x, m)?)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::value::Value;

    #[test]
    fn additive_maps_are_their_own_limit() {
        let t = instances::make_extended_reals(false);
        let f = PointMap::new(|x| Value::ext(3.0 * x.total()));
        for x in [0.0, 0.25, 1.5, 7.0] {
            let x = Point::scalar(x).unwrap();
            assert_eq!(oracle_limit(&t, &f, &x, 30).unwrap().value(), &Value::ext(3.0 * x.total()));
        }
    }

    #[test]
    fn bounded_offsets_shrink_geometrically() {
        let t = instances::make_extended_reals(false);
        let f = PointMap::new(|x| Value::ext(x.total() + 0.5));
        let x = Point::scalar(2.0).unwrap();
        let a = oracle_limit(&t, &f, &x, 30).unwrap();
        assert_eq!(a.value(), &Value::ext(2.0 + 0.5 / (1u64 << 30) as f64));
    }
}
