//! Stabilization of the Pexider equation `f(x+y) = g(x) + h(y)` in a full
//! locally convex cone.
//!
//! Given `f(x+y) ∈ v(g(x)+h(y))v` on the sampled domain and a bounded `f(0)`,
//! [`stabilize`] builds `A(x) = lim f(2ⁿx)/2ⁿ` and certifies
//! `A(x) ∈ (δv)(f(x))(δv)` with `δ = 4(λ+2)`, together with the two `(1+δ)`
//! containments against `g(x)+h(0)` and `h(x)+g(0)`. No step subtracts: the
//! target is only a cone.

mod adapters;
pub(crate) mod iteration;

use rayon::prelude::*;
use serde::Serialize;

pub use adapters::{jensen_adapter, linear_adapter};

use crate::cone::{ConeInstance, Element, Nbhd, UpperBound};
use crate::domain::{pow2, Domain, Point, PointMap, Tabulation};
use crate::error::{Error, Result};
use crate::search::{self, MIN_PROBE};
use iteration::{dyadic_term, trajectory, Trajectory};

/// Largest supported iteration depth.
pub const MAX_DEPTH: u32 = 40;

/// Default early-stop tolerance on the two-step gap.
pub const DEFAULT_TOLERANCE: f64 = 1.0 / (1u64 << 30) as f64;

/// Default additivity tolerance.
pub const ADDITIVITY_TOLERANCE: f64 = 1.0 / (1u64 << 15) as f64;

/// Triple `(f, g, h)` on a sampled domain with its bounded neighborhood `v`.
#[derive(Debug, Clone)]
pub struct PexiderInstance {
    target: ConeInstance,
    domain: Domain,
    f: PointMap,
    g: PointMap,
    h: PointMap,
    v: Nbhd,
}

impl PexiderInstance {
    /// Rejects an unbounded `v` and an unbounded `f(0)`.
    pub fn new(
        target: ConeInstance,
        domain: Domain,
        f: PointMap,
        g: PointMap,
        h: PointMap,
        v: Nbhd,
    ) -> Result<Self> {
        if v.element().tag() != target.tag() {
            return Err(Error::InstanceMismatch {
                left: target.name().to_owned(),
                right: v.element().tag().to_string(),
            });
        }
        if !target.is_bounded(v.element())? {
            return Err(Error::Unbounded(v.to_string()));
        }
        let f0 = f.eval_in(&target, &domain.zero())?;
        if !target.is_bounded(&f0)? {
            return Err(Error::UnboundedAtOrigin);
        }
        Ok(PexiderInstance {
            target,
            domain,
            f,
            g,
            h,
            v,
        })
    }

    pub fn target(&self) -> &ConeInstance {
        &self.target
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn v(&self) -> &Nbhd {
        &self.v
    }

    pub fn f_map(&self) -> &PointMap {
        &self.f
    }

    pub fn g_map(&self) -> &PointMap {
        &self.g
    }

    pub fn h_map(&self) -> &PointMap {
        &self.h
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

    pub fn f0(&self) -> Result<Element> {
        self.f(&self.domain.zero())
    }

    /// The neighborhood `w = 4v`.
    pub fn w(&self) -> Result<Nbhd> {
        self.target.scale_nbhd(4.0, &self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisWitness {
    pub x: Point,
    pub y: Point,
    pub f_of_sum: Element,
    pub g_plus_h: Element,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub pairs_checked: usize,
    pub failures: usize,
    /// Largest gap between `f(x+y)` and `g(x)+h(y)`.
    pub max_residual: f64,
    /// First few failing pairs.
    pub witnesses: Vec<HypothesisWitness>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const MAX_WITNESSES: usize = 8;

/// Checks `f(x+y) ∈ v(g(x)+h(y))v` for every pair.
pub fn verify_hypothesis(p: &PexiderInstance, pairs: &[(Point, Point)]) -> Result<HypothesisReport> {
    let t = &p.target;
    let mut report = HypothesisReport {
        pairs_checked: 0,
        failures: 0,
        max_residual: 0.0,
        witnesses: Vec::new(),
    };
    for (x, y) in pairs {
        for z in [x, y] {
            if !p.domain.contains(z) {
                return Err(Error::OutsideDomain(z.to_string()));
            }
        }
        let lhs = p.f(&x.add(y))?;
        let rhs = t.add(&p.g(x)?, &p.h(y)?)?;
        report.pairs_checked += 1;
        report.max_residual = report.max_residual.max(t.gap(&lhs, &rhs)?);
        if !t.in_symmetric_nbhd(&lhs, &rhs, &p.v)? {
            report.failures += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(HypothesisWitness {
                    x: x.clone(),
                    y: y.clone(),
                    f_of_sum: lhs,
                    g_plus_h: rhs,
                });
            }
        }
    }
    Ok(report)
}

/// Outcome of the single-function reduction.
#[derive(Debug, Clone)]
pub struct SingleFunctionBounds {
    /// `w = 4v`.
    pub w: Nbhd,
    pub pairs_checked: usize,
}

/// Rechecks, for every pair, the two consequences of the hypothesis
///
/// `f(0) + f(x+y) <= 4v + f(x) + f(y)` and `f(x) + f(y) <= 4v + f(x+y) + f(0)`,
///
/// and returns `w = 4v`. A failure after a passing hypothesis means the
/// instance arithmetic is inconsistent, so it aborts.
pub fn derive_single_function_bounds(p: &PexiderInstance, pairs: &[(Point, Point)]) -> Result<SingleFunctionBounds> {
    let t = &p.target;
    let w = p.w()?;
    let f0 = p.f0()?;
    for (x, y) in pairs {
        let fx = p.f(x)?;
        let fy = p.f(y)?;
        let fxy = p.f(&x.add(y))?;
        let sum = t.add(&fx, &fy)?;
        let upper = t.leq(&t.add(&f0, &fxy)?, &t.add(w.element(), &sum)?)?;
        let lower = t.leq(&sum, &t.add(w.element(), &t.add(&fxy, &f0)?)?)?;
        if !(upper && lower) {
            return Err(Error::InternalInconsistency(format!(
                "single-function bound fails at x = {x}, y = {y}"
            )));
        }
    }
    Ok(SingleFunctionBounds {
        w,
        pairs_checked: pairs.len(),
    })
}

/// Least `λ >= 0` with `f0 <= λw` and `0 <= f0 + λw`.
pub fn find_lambda(target: &ConeInstance, f0: &Element, w: &Nbhd) -> Result<f64> {
    if let Some(s) = w.scale() {
        let rules = target.rules();
        if let (Some(upper), Some(lower)) = (
            rules.upper_coefficient(f0.value()),
            rules.lower_coefficient(f0.value()),
        ) {
            return match upper {
                UpperBound::Unbounded => Err(Error::UnboundedAtOrigin),
                UpperBound::At(t) => Ok((t / s).max(lower / s).max(0.0)),
            };
        }
    }
    find_lambda_by_search(target, f0, w)
}

/// Search-only route for [`find_lambda`].
pub fn find_lambda_by_search(target: &ConeInstance, f0: &Element, w: &Nbhd) -> Result<f64> {
    let zero = target.zero();
    let holds = |lambda: f64| -> Result<bool> {
        let lw = target.scale(lambda, w.element())?;
        Ok(target.leq(f0, &lw)? && target.leq(&zero, &target.add(f0, &lw)?)?)
    };
    if holds(0.0)? {
        return Ok(0.0);
    }
    search::min_coefficient(MIN_PROBE, |lambda| holds(lambda).unwrap_or(false)).ok_or(Error::UnboundedAtOrigin)
}

/// `f(2ⁿx)/2ⁿ`.
pub fn hyers_term(p: &PexiderInstance, x: &Point, n: u32) -> Result<Element> {
    p.domain.check_depth(x, n)?;
    dyadic_term(&p.target, &p.f, x, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub checks: usize,
    pub violations: usize,
    pub witness: Option<String>,
}

impl BoundReport {
    fn new() -> Self {
        BoundReport {
            checks: 0,
            violations: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            self.witness.get_or_insert_with(witness);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn merge(&mut self, other: BoundReport) {
        self.checks += other.checks;
        self.violations += other.violations;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}

/// For `n = 1..=n_max`, the two envelope inequalities
///
/// `f(2ⁿx)/2ⁿ <= f(x) + (1 − 2⁻ⁿ)(λ+1)w` and `f(x) <= f(2ⁿx)/2ⁿ + (1 − 2⁻ⁿ)(λ+1)w`.
pub fn check_induction_bounds(p: &PexiderInstance, lambda: f64, w: &Nbhd, x: &Point, n_max: u32) -> Result<BoundReport> {
    let t = &p.target;
    let fx = p.f(x)?;
    let mut report = BoundReport::new();
    for n in 1..=n_max {
        let term = hyers_term(p, x, n)?;
        let slack = t.scale((1.0 - pow2(-(n as i32))) * (lambda + 1.0), w.element())?;
        report.record(t.leq(&term, &t.add(&fx, &slack)?)?, || {
            format!("upper envelope fails at x = {x}, n = {n}: {term} vs {fx}")
        });
        report.record(t.leq(&fx, &t.add(&term, &slack)?)?, || {
            format!("lower envelope fails at x = {x}, n = {n}: {fx} vs {term}")
        });
    }
    Ok(report)
}

/// For `0 <= m <= m_max` and `m < m+k <= n_max`, the terms at depths `m+k`
/// and `m` are within `2⁻ᵐ(λ+1)w` of each other in both directions.
pub fn check_cauchy_rate(
    p: &PexiderInstance,
    lambda: f64,
    w: &Nbhd,
    x: &Point,
    m_max: u32,
    n_max: u32,
) -> Result<BoundReport> {
    let t = &p.target;
    let terms = (0..=n_max)
        .map(|n| hyers_term(p, x, n))
        .collect::<Result<Vec<_>>>()?;
    let mut report = BoundReport::new();
    for m in 0..=m_max.min(n_max) {
        let slack = t.scale(pow2(-(m as i32)) * (lambda + 1.0), w.element())?;
        let tm = &terms[m as usize];
        for deep in (m + 1)..=n_max {
            let tn = &terms[deep as usize];
            report.record(t.leq(tn, &t.add(tm, &slack)?)?, || {
                format!("x = {x}: T_{deep} exceeds T_{m} + 2^-{m}(λ+1)w")
            });
            report.record(t.leq(tm, &t.add(tn, &slack)?)?, || {
                format!("x = {x}: T_{m} exceeds T_{deep} + 2^-{m}(λ+1)w")
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizeConfig {
    /// Depth cap `N`.
    pub depth: u32,
    /// Early-stop threshold on the two-step gap; `None` runs every point to
    /// `depth`.
    pub tolerance: Option<f64>,
    pub additivity_tolerance: f64,
}

impl Default for StabilizeConfig {
    fn default() -> Self {
        StabilizeConfig {
            depth: MAX_DEPTH,
            tolerance: Some(DEFAULT_TOLERANCE),
            additivity_tolerance: ADDITIVITY_TOLERANCE,
        }
    }
}

impl StabilizeConfig {
    pub fn fixed_depth(depth: u32) -> Self {
        StabilizeConfig {
            depth,
            tolerance: None,
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return Err(Error::InvalidConfig(format!(
                "depth must be in 1..={MAX_DEPTH}, got {}",
                self.depth
            )));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    /// `A(x) ∈ (δv)(f(x))(δv)`.
    pub sandwich_f: bool,
    /// `A(x) ∈ (1+δ)v(g(x)+h(0))(1+δ)v`.
    pub sandwich_g: bool,
    /// `A(x) ∈ (1+δ)v(h(x)+g(0))(1+δ)v`.
    pub sandwich_h: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.sandwich_f && self.sandwich_g && self.sandwich_h
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizationReport {
    pub lambda: f64,
    pub w: Element,
    pub delta: f64,
    /// Deepest term used at any point.
    pub iterations: u32,
    pub converged: bool,
    pub final_residual: f64,
    /// Distance bound `2⁻ᵐ(λ+1)·|w|` between the tabulated value and the true
    /// limit, with `m` the shallowest stopping depth.
    pub certified_radius: Option<f64>,
    /// Per depth `n`, the largest gap between terms `n` and `n-1`.
    pub cauchy_residuals: Vec<f64>,
    pub verdicts: Verdicts,
    pub additivity_max_violation: f64,
    pub additivity_passed: bool,
    pub hypothesis: HypothesisReport,
    pub table: Tabulation,
}

/// Full pipeline: hypothesis, `w = 4v`, `λ`, dyadic limit, sandwich verdicts
/// and additivity.
pub fn stabilize(p: &PexiderInstance, config: &StabilizeConfig) -> Result<StabilizationReport> {
    config.validate()?;
    let t = &p.target;
    let pairs = p.domain.pairs();
    let hypothesis = verify_hypothesis(p, &pairs)?;
    if let Some(w) = hypothesis.witnesses.first() {
        return Err(Error::HypothesisViolation {
            witness: format!(
                "x = {}, y = {}: f(x+y) = {}, g(x)+h(y) = {}",
                w.x, w.y, w.f_of_sum, w.g_plus_h
            ),
        });
    }
    let bounds = derive_single_function_bounds(p, &pairs)?;
    let w = bounds.w;
    let lambda = find_lambda(t, &p.f0()?, &w)?;
    let delta = 4.0 * (lambda + 2.0);

    let trajectories = compute_trajectories(t, &p.domain, &p.f, config)?;
    let (iterations, shallowest, residual) = summarize(&trajectories);
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

    let verdicts = sandwich_verdicts(p, &table, delta)?;
    let additivity = verify_additivity(&table, &p.domain.additive_pairs(), config.additivity_tolerance)?;

    Ok(StabilizationReport {
        lambda,
        w: w.element().clone(),
        delta,
        iterations,
        converged: true,
        final_residual: residual,
        certified_radius: w.scale().map(|s| pow2(-(shallowest as i32)) * (lambda + 1.0) * s),
        cauchy_residuals: cauchy_residuals(t, &trajectories)?,
        verdicts,
        additivity_max_violation: additivity.max_violation,
        additivity_passed: additivity.passed,
        hypothesis,
        table,
    })
}

/// Per-point trajectories, evaluated in parallel and kept in point order.
pub(crate) fn compute_trajectories(
    target: &ConeInstance,
    domain: &Domain,
    f: &PointMap,
    config: &StabilizeConfig,
) -> Result<Vec<Trajectory>> {
    domain
        .points()
        .par_iter()
        .map(|x| trajectory(target, domain, f, x, config.depth, config.tolerance))
        .collect()
}

/// `(deepest stop, shallowest nonzero-point stop, worst residual)`.
pub(crate) fn summarize(trajectories: &[Trajectory]) -> (u32, u32, f64) {
    let deepest = trajectories.iter().map(Trajectory::stop).max().unwrap_or(0);
    let shallowest = trajectories.iter().map(Trajectory::stop).min().unwrap_or(0);
    let residual = trajectories.iter().map(|tr| tr.residual).fold(0.0, f64::max);
    (deepest, shallowest, residual)
}

fn cauchy_residuals(target: &ConeInstance, trajectories: &[Trajectory]) -> Result<Vec<f64>> {
    let deepest = trajectories.iter().map(Trajectory::stop).max().unwrap_or(0) as usize;
    let mut out = vec![0.0f64; deepest];
    for tr in trajectories {
        for n in 1..tr.terms.len() {
            out[n - 1] = out[n - 1].max(target.gap(&tr.terms[n], &tr.terms[n - 1])?);
        }
    }
    Ok(out)
}

fn sandwich_verdicts(p: &PexiderInstance, table: &Tabulation, delta: f64) -> Result<Verdicts> {
    let t = &p.target;
    let delta_v = t.scale_nbhd(delta, &p.v)?;
    let wide_v = t.scale_nbhd(1.0 + delta, &p.v)?;
    let zero = p.domain.zero();
    let (g0, h0) = (p.g(&zero)?, p.h(&zero)?);
    let mut verdicts = Verdicts {
        sandwich_f: true,
        sandwich_g: true,
        sandwich_h: true,
    };
    for (x, a) in table.entries() {
        verdicts.sandwich_f &= t.in_symmetric_nbhd(a, &p.f(x)?, &delta_v)?;
        verdicts.sandwich_g &= t.in_symmetric_nbhd(a, &t.add(&p.g(x)?, &h0)?, &wide_v)?;
        verdicts.sandwich_h &= t.in_symmetric_nbhd(a, &t.add(&p.h(x)?, &g0)?, &wide_v)?;
    }
    Ok(verdicts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityReport {
    pub pairs_checked: usize,
    pub max_violation: f64,
    pub passed: bool,
}

/// Largest gap between `A(x+y)` and `A(x) + A(y)` over the pairs.
pub fn verify_additivity(a: &Tabulation, pairs: &[(Point, Point)], tol: f64) -> Result<AdditivityReport> {
    let t = a.target();
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        let sum = t.add(a.get(x)?, a.get(y)?)?;
        worst = worst.max(t.gap(a.get(&x.add(y))?, &sum)?);
    }
    Ok(AdditivityReport {
        pairs_checked: pairs.len(),
        max_violation: worst,
        passed: worst <= tol,
    })
}

/// Compares two candidate additive approximants of `f`.
///
/// Each candidate must first be additive within `tol` and lie in the
/// `δ`-sandwich around `f`; otherwise it is rejected with
/// [`Error::Precondition`]. Returns whether the candidates agree within `tol`.
pub fn verify_uniqueness(p: &PexiderInstance, a1: &Tabulation, a2: &Tabulation, tol: f64) -> Result<bool> {
    let t = &p.target;
    let lambda = find_lambda(t, &p.f0()?, &p.w()?)?;
    let delta_v = t.scale_nbhd(4.0 * (lambda + 2.0), &p.v)?;
    for (label, candidate) in [("first", a1), ("second", a2)] {
        for (x, a) in candidate.entries() {
            if !t.in_symmetric_nbhd(a, &p.f(x)?, &delta_v)? {
                return Err(Error::Precondition(format!(
                    "{label} candidate leaves the δ-sandwich around f at x = {x}"
                )));
            }
        }
        let pairs: Vec<_> = p
            .domain
            .additive_pairs()
            .into_iter()
            .filter(|(x, y)| candidate.get(x).is_ok() && candidate.get(y).is_ok() && candidate.get(&x.add(y)).is_ok())
            .collect();
        let additivity = verify_additivity(candidate, &pairs, tol)?;
        if !additivity.passed {
            return Err(Error::Precondition(format!(
                "{label} candidate is not additive: violation {}",
                additivity.max_violation
            )));
        }
    }
    Ok(a1.max_gap(a2)? <= tol)
}

#[cfg(test)]
mod tests;
