//! The classical route on targets that are also real vector spaces: bound the
//! residual in the seminorm `q`, telescope, and pass to the limit.

use serde::Serialize;

use crate::cone::{ConeInstance, Element};
use crate::domain::{pow2, Domain, Point, PointMap, Tabulation};
use crate::error::{Error, Result};
use crate::stabilizer::iteration::dyadic_term;
use crate::stabilizer::{
    compute_trajectories, summarize, verify_additivity, HypothesisReport, HypothesisWitness, StabilizeConfig,
};

/// Default slack factor `r > 1`.
pub const DEFAULT_R: f64 = 1.0 + 1.0 / 1024.0;

/// Absolute slack for comparisons of floating seminorm values.
pub const SEMINORM_SLACK: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone)]
pub struct NormedPexiderInstance {
    target: ConeInstance,
    domain: Domain,
    f: PointMap,
    g: PointMap,
    h: PointMap,
    epsilon: f64,
    r: f64,
}

impl NormedPexiderInstance {
    /// The target must be a uc-cone with vector-space carrier; `epsilon > 0`
    /// and `r > 1`.
    pub fn new(
        target: ConeInstance,
        domain: Domain,
        f: PointMap,
        g: PointMap,
        h: PointMap,
        epsilon: f64,
        r: f64,
    ) -> Result<Self> {
        if !target.is_vector_space() {
            return Err(Error::NotVectorSpace(target.name().to_owned()));
        }
        if !target.is_uc() {
            return Err(Error::NotUcCone(target.name().to_owned()));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::InvalidConfig(format!("r must exceed 1, got {r}")));
        }
        Ok(NormedPexiderInstance {
            target,
            domain,
            f,
            g,
            h,
            epsilon,
            r,
        })
    }

    pub fn target(&self) -> &ConeInstance {
        &self.target
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn f(&self, x: &Point) -> Result<Element> {
        self.f.eval_in(&self.target, x)
    }

    pub fn g(&self, x: &Point) -> Result<Element> {
        self.g.eval_in(&self.target, x)
    }

    pub fn h(&self, x: &Point) -> Result<Element> {
        self.h.eval_in(&self.target, x)
    }

    fn q(&self, a: &Element) -> Result<f64> {
        Ok(self.target.seminorm(a)?.to_f64())
    }

    /// `q(a - b - c)`.
    fn q_diff3(&self, a: &Element, b: &Element, c: &Element) -> Result<f64> {
        let t = &self.target;
        self.q(&t.subtract(&t.subtract(a, b)?, c)?)
    }
}

/// `q(f(x+y) - g(x) - h(y))`.
pub fn q_residual(p: &NormedPexiderInstance, x: &Point, y: &Point) -> Result<f64> {
    p.q_diff3(&p.f(&x.add(y))?, &p.g(x)?, &p.h(y)?)
}

/// Checks `q(f(x+y) - g(x) - h(y)) <= ε` over the pairs.
pub fn verify_normed_hypothesis(p: &NormedPexiderInstance, pairs: &[(Point, Point)]) -> Result<HypothesisReport> {
    let mut report = HypothesisReport {
        pairs_checked: 0,
        failures: 0,
        max_residual: 0.0,
        witnesses: Vec::new(),
    };
    for (x, y) in pairs {
        let q = q_residual(p, x, y)?;
        report.pairs_checked += 1;
        report.max_residual = report.max_residual.max(q);
        if !(q <= p.epsilon) {
            report.failures += 1;
            if report.witnesses.len() < 8 {
                report.witnesses.push(HypothesisWitness {
                    x: x.clone(),
                    y: y.clone(),
                    f_of_sum: p.f(&x.add(y))?,
                    g_plus_h: p.target.add(&p.g(x)?, &p.h(y)?)?,
                });
            }
        }
    }
    Ok(report)
}

/// The residual at the special pairs `(x, x)`, `(x, 0)`, `(0, x)`, `(0, 0)`,
/// and the combined `q(f(2x) - 2f(x) + f(0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedResiduals {
    pub diagonal: f64,
    pub right_zero: f64,
    pub left_zero: f64,
    pub origin: f64,
    pub combined: f64,
}

impl DerivedResiduals {
    /// The four residuals are within `ε` and the combined one within `4ε`.
    pub fn within(&self, epsilon: f64) -> bool {
        let each = epsilon + SEMINORM_SLACK;
        self.diagonal <= each
            && self.right_zero <= each
            && self.left_zero <= each
            && self.origin <= each
            && self.combined <= 4.0 * epsilon + SEMINORM_SLACK
    }
}

pub fn derived_residuals(p: &NormedPexiderInstance, x: &Point) -> Result<DerivedResiduals> {
    let t = &p.target;
    let zero = p.domain.zero();
    let (f0, g0, h0) = (p.f(&zero)?, p.g(&zero)?, p.h(&zero)?);
    let (fx, gx, hx) = (p.f(x)?, p.g(x)?, p.h(x)?);
    let f2x = p.f(&x.doubled(1))?;
    let combined = t.add(&t.subtract(&f2x, &t.scale(2.0, &fx)?)?, &f0)?;
    Ok(DerivedResiduals {
        diagonal: p.q_diff3(&f2x, &gx, &hx)?,
        right_zero: p.q_diff3(&fx, &gx, &h0)?,
        left_zero: p.q_diff3(&fx, &g0, &hx)?,
        origin: p.q_diff3(&f0, &g0, &h0)?,
        combined: p.q(&combined)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Telescoping {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates
///
/// `q(f(2ⁿ⁺¹x)/2ⁿ⁺¹ - f(2ᵐx)/2ᵐ + Σ_{k=m}^{n} f(0)/2ᵏ⁺¹) <= Σ_{k=m}^{n} 2ε/2ᵏ`.
pub fn telescoping_check(p: &NormedPexiderInstance, x: &Point, m: u32, n: u32) -> Result<Telescoping> {
    if m > n {
        return Err(Error::InvalidConfig(format!("telescoping needs m <= n, got m = {m}, n = {n}")));
    }
    p.domain.check_depth(x, n + 1)?;
    let t = &p.target;
    let f0 = p.f(&p.domain.zero())?;
    let far = dyadic_term(t, &p.f, x, n + 1)?;
    let near = dyadic_term(t, &p.f, x, m)?;
    let weight: f64 = (m..=n).map(|k| pow2(-(k as i32 + 1))).sum();
    let lhs = p.q(&t.add(&t.subtract(&far, &near)?, &t.scale(weight, &f0)?)?)?;
    let rhs: f64 = (m..=n).map(|k| 2.0 * p.epsilon * pow2(-(k as i32))).sum();
    Ok(Telescoping {
        lhs,
        rhs,
        holds: lhs <= rhs + SEMINORM_SLACK,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormedVerdicts {
    /// `A(x) ∈ ((4rε+β)v)(f(x))((4rε+β)v)`.
    pub containment_f: bool,
    /// `A(x) ∈ ((5rε+γ)v)(g(x))((5rε+γ)v)`.
    pub containment_g: bool,
    /// `A(x) ∈ ((5rε+δ)v)(h(x))((5rε+δ)v)`.
    pub containment_h: bool,
    /// `sup_q_f <= 4ε`, `sup_q_g <= 5ε`, `sup_q_h <= 5ε`.
    pub seminorm_bounds: bool,
}

impl NormedVerdicts {
    pub fn all(&self) -> bool {
        self.containment_f && self.containment_g && self.containment_h && self.seminorm_bounds
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormedReport {
    pub epsilon: f64,
    pub r: f64,
    /// `r·q(f(0))`.
    pub beta: f64,
    /// `r·q(f(0) - h(0))`.
    pub gamma: f64,
    /// `r·q(f(0) - g(0))`.
    pub delta_c: f64,
    pub constants: &'static str,
    /// `max q(A(x) + f(0) - f(x))`.
    pub sup_q_f: f64,
    /// `max q(A(x) + f(0) - g(x) - h(0))`.
    pub sup_q_g: f64,
    /// `max q(A(x) + f(0) - h(x) - g(0))`.
    pub sup_q_h: f64,
    pub verdicts: NormedVerdicts,
    pub iterations: u32,
    pub converged: bool,
    pub final_residual: f64,
    pub max_combined_residual: f64,
    pub additivity_max_violation: f64,
    pub additivity_passed: bool,
    pub hypothesis: HypothesisReport,
    pub table: Tabulation,
}

pub fn classical_stabilize(p: &NormedPexiderInstance, config: &StabilizeConfig) -> Result<NormedReport> {
    config.validate()?;
    let t = &p.target;
    let hypothesis = verify_normed_hypothesis(p, &p.domain.pairs())?;
    if let Some(w) = hypothesis.witnesses.first() {
        return Err(Error::HypothesisViolation {
            witness: format!(
                "x = {}, y = {}: q(f(x+y) - g(x) - h(y)) > {} with f(x+y) = {}, g(x)+h(y) = {}",
                w.x, w.y, p.epsilon, w.f_of_sum, w.g_plus_h
            ),
        });
    }

    let mut max_combined: f64 = 0.0;
    for x in p.domain.points() {
        let derived = derived_residuals(p, x)?;
        if !derived.within(p.epsilon) {
            return Err(Error::InternalInconsistency(format!(
                "specialized residuals exceed their bounds at x = {x}: {derived:?}"
            )));
        }
        max_combined = max_combined.max(derived.combined);
    }

    let trajectories = compute_trajectories(t, &p.domain, &p.f, config)?;
    let (iterations, _, residual) = summarize(&trajectories);
    if let Some(bad) = trajectories.iter().find(|tr| !tr.converged) {
        return Err(Error::NonConvergence {
            depth: bad.stop(),
            residual: bad.residual,
        });
    }
    let table = Tabulation::from_entries(
        t.clone(),
        p.domain
            .points()
            .iter()
            .cloned()
            .zip(trajectories.iter().map(|tr| tr.limit().clone()))
            .collect(),
    )?;

    let zero = p.domain.zero();
    let (f0, g0, h0) = (p.f(&zero)?, p.g(&zero)?, p.h(&zero)?);
    let (eps, r) = (p.epsilon, p.r);
    let beta = r * p.q(&f0)?;
    let gamma = r * p.q(&t.subtract(&f0, &h0)?)?;
    let delta_c = r * p.q(&t.subtract(&f0, &g0)?)?;
    let radius_f = t.nbhd(4.0 * r * eps + beta)?;
    let radius_g = t.nbhd(5.0 * r * eps + gamma)?;
    let radius_h = t.nbhd(5.0 * r * eps + delta_c)?;

    let (mut sup_f, mut sup_g, mut sup_h) = (0.0f64, 0.0f64, 0.0f64);
    let mut verdicts = NormedVerdicts {
        containment_f: true,
        containment_g: true,
        containment_h: true,
        seminorm_bounds: true,
    };
    for (x, a) in table.entries() {
        let (fx, gx, hx) = (p.f(x)?, p.g(x)?, p.h(x)?);
        let shifted = t.add(a, &f0)?;
        sup_f = sup_f.max(p.q(&t.subtract(&shifted, &fx)?)?);
        sup_g = sup_g.max(p.q_diff3(&shifted, &gx, &h0)?);
        sup_h = sup_h.max(p.q_diff3(&shifted, &hx, &g0)?);
        verdicts.containment_f &= t.in_symmetric_nbhd(a, &fx, &radius_f)?;
        verdicts.containment_g &= t.in_symmetric_nbhd(a, &gx, &radius_g)?;
        verdicts.containment_h &= t.in_symmetric_nbhd(a, &hx, &radius_h)?;
    }
    verdicts.seminorm_bounds = sup_f <= 4.0 * eps + SEMINORM_SLACK
        && sup_g <= 5.0 * eps + SEMINORM_SLACK
        && sup_h <= 5.0 * eps + SEMINORM_SLACK;

    let additivity = verify_additivity(&table, &p.domain.additive_pairs(), config.additivity_tolerance)?;

    Ok(NormedReport {
        epsilon: eps,
        r,
        beta,
        gamma,
        delta_c,
        constants: "artifact-minimal",
        sup_q_f: sup_f,
        sup_q_g: sup_g,
        sup_q_h: sup_h,
        verdicts,
        iterations,
        converged: true,
        final_residual: residual,
        max_combined_residual: max_combined,
        additivity_max_violation: additivity.max_violation,
        additivity_passed: additivity.passed,
        hypothesis,
        table,
    })
}
