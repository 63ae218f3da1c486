//! Dyadic iteration kernel `x ↦ f(2ⁿx)/2ⁿ`, shared by both engines.

use crate::cone::{ConeInstance, Element};
use crate::domain::{pow2, Domain, Point, PointMap};
use crate::error::Result;

/// Terms `T_0 .. T_stop` of the dyadic sequence at one point.
#[derive(Debug, Clone)]
pub(crate) struct Trajectory {
    pub terms: Vec<Element>,
    pub converged: bool,
    /// Gap between `T_stop` and `T_{stop-2}` (or `T_0` when `stop < 2`).
    pub residual: f64,
}

impl Trajectory {
    pub fn stop(&self) -> u32 {
        (self.terms.len() - 1) as u32
    }

    pub fn limit(&self) -> &Element {
        self.terms.last().expect("trajectory has T_0")
    }
}

/// `2^-n · f(2^n x)`, with no domain check.
pub(crate) fn dyadic_term(target: &ConeInstance, f: &PointMap, x: &Point, n: u32) -> Result<Element> {
    let value = f.eval_in(target, &x.doubled(n))?;
    target.scale(pow2(-(n as i32)), &value)
}

/// Runs to `depth`, or stops at the first even depth whose two-step gap is
/// within `tolerance`.
pub(crate) fn trajectory(
    target: &ConeInstance,
    domain: &Domain,
    f: &PointMap,
    x: &Point,
    depth: u32,
    tolerance: Option<f64>,
) -> Result<Trajectory> {
    domain.check_depth(x, depth)?;
    let mut terms = vec![dyadic_term(target, f, x, 0)?];
    for n in 1..=depth {
        terms.push(dyadic_term(target, f, x, n)?);
        if let Some(tol) = tolerance {
            if n % 2 == 0 && target.gap(&terms[n as usize], &terms[n as usize - 2])? <= tol {
                break;
            }
        }
    }
    let stop = terms.len() - 1;
    let residual = match stop {
        0 => 0.0,
        1 => target.gap(&terms[1], &terms[0])?,
        s => target.gap(&terms[s], &terms[s - 2])?,
    };
    // +∞ limits are not bounded and never count as converged
    let bounded = match target.generator() {
        Some(w) => {
            let v = target.nbhd_from_element(w)?;
            target.upper_bound_coefficient(&terms[stop], &v)?.is_some()
        }
        None => true,
    };
    let converged = bounded && residual.is_finite() && tolerance.is_none_or(|tol| residual <= tol);
    Ok(Trajectory {
        terms,
        converged,
        residual: if bounded { residual } else { f64::INFINITY },
    })
}
