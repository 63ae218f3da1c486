//! Minimal-coefficient search over monotone predicates.
//!
//! Used wherever an instance has no closed form for a bound coefficient or a
//! seminorm: bracket by doubling, then bisect.

/// Smallest positive coefficient ever reported.
pub const MIN_PROBE: f64 = 1.0 / (1u64 << 20) as f64;

/// Relative width at which bisection stops.
pub const RELATIVE_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

pub const MAX_BISECTIONS: u32 = 60;

/// Doublings allowed while bracketing before the predicate is declared
/// unsatisfiable.
pub const MAX_DOUBLINGS: u32 = 120;

/// Least `t >= floor` with `pred(t)`, for `pred` monotone (false then true).
///
/// Returns `floor` when the predicate already holds there and `None` when no
/// bracket is found. The returned value always satisfies `pred`.
pub fn min_coefficient(floor: f64, mut pred: impl FnMut(f64) -> bool) -> Option<f64> {
    debug_assert!(floor > 0.0);
    if pred(floor) {
        return Some(floor);
    }
    let mut lo = floor;
    let mut hi = floor * 2.0;
    let mut doublings = 1;
    while !pred(hi) {
        if doublings >= MAX_DOUBLINGS || !hi.is_finite() {
            return None;
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= RELATIVE_TOLERANCE * hi {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_threshold_to_relative_tolerance() {
        let t = min_coefficient(MIN_PROBE, |x| x >= 6.0).unwrap();
        assert!((6.0..=6.0 * (1.0 + 2.0 * RELATIVE_TOLERANCE)).contains(&t));
    }

    #[test]
    fn returns_floor_when_already_satisfied() {
        assert_eq!(min_coefficient(MIN_PROBE, |_| true), Some(MIN_PROBE));
    }

    #[test]
    fn never_satisfied_is_none() {
        assert_eq!(min_coefficient(MIN_PROBE, |_| false), None);
    }
}
