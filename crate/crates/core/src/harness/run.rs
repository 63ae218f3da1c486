use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use serde::Serialize;

use crate::cone::{ConeInstance, Nbhd};
use crate::domain::{Domain, PointMap, Tabulation};
use crate::error::{Error, Result};
use crate::instances;
use crate::normed::{classical_stabilize, NormedPexiderInstance, NormedReport};
use crate::stabilizer::{stabilize, verify_hypothesis, HypothesisReport, PexiderInstance, StabilizationReport};
use crate::value::Value;

use super::config::ExperimentConfig;
use super::noise::{base_map, magnitude_warning, perturb};
use super::oracle::oracle_gap;

pub const SCHEMA: &str = "conestab/1";

/// Extra depth of the oracle over the engine depth.
pub const ORACLE_EXTRA_DEPTH: u32 = 10;

/// Everything a run needs, built from a config.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub target: ConeInstance,
    pub domain: Domain,
    pub base: PointMap,
    pub f: PointMap,
    pub g: PointMap,
    pub h: PointMap,
    pub v: Nbhd,
}

impl Experiment {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let target = instances::from_name(&config.instance_name)?;
        let grid = &config.domain;
        let domain = Domain::grid(grid.count, grid.spacing, grid.dimension, config.depth)?;
        let base = base_map(&target, &config.base_map);
        let (mut f, g, h) = perturb(&target, &config.base_map, config.noise);
        if let Some(f0) = config.f_at_zero {
            let inner = f;
            f = PointMap::new(move |x| if x.is_zero() { Value::Ext(f0) } else { inner.eval(x) });
        }
        let v = target.nbhd(config.v_scale)?;
        Ok(Experiment {
            target,
            domain,
            base,
            f,
            g,
            h,
            v,
        })
    }

    pub fn pexider(&self) -> Result<PexiderInstance> {
        PexiderInstance::new(
            self.target.clone(),
            self.domain.clone(),
            self.f.clone(),
            self.g.clone(),
            self.h.clone(),
            self.v.clone(),
        )
    }

    pub fn normed(&self, epsilon: f64, r: f64) -> Result<NormedPexiderInstance> {
        NormedPexiderInstance::new(
            self.target.clone(),
            self.domain.clone(),
            self.f.clone(),
            self.g.clone(),
            self.h.clone(),
            epsilon,
            r,
        )
    }

    /// The base map tabulated over the domain points.
    pub fn base_table(&self) -> Result<Tabulation> {
        let entries = self
            .domain
            .points()
            .iter()
            .map(|x| Ok((x.clone(), self.base.eval_in(&self.target, x)?)))
            .collect::<Result<Vec<_>>>()?;
        Tabulation::from_entries(self.target.clone(), entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for FailureReport {
    fn from(e: &Error) -> Self {
        FailureReport {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub status: Status,
    pub exit_code: i32,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone: Option<StabilizationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normed: Option<NormedReport>,
    /// Largest gap between a recovered table and the additive base.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery_error: Option<f64>,
    /// Largest gap between a recovered table and the brute-force limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_engine_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    fn new(config: &ExperimentConfig) -> Self {
        RunReport {
            schema: SCHEMA,
            status: Status::Ok,
            exit_code: 0,
            config: config.clone(),
            warnings: Vec::new(),
            hypothesis: None,
            cone: None,
            normed: None,
            recovery_error: None,
            oracle_error: None,
            oracle_depth: None,
            cross_engine_gap: None,
            failure: None,
            timing: None,
        }
    }

    fn fail(&mut self, e: &Error) {
        self.status = Status::Failure;
        self.exit_code = e.exit_code();
        self.failure = Some(FailureReport::from(e));
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Full pipeline. Engine errors and panics become a structured failure.
pub fn run(config: &ExperimentConfig) -> RunReport {
    let mut report = RunReport::new(config);
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| pipeline(config, &mut report)));
    let error = match outcome {
        Ok(Ok(())) => return report,
        Ok(Err(e)) => e,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Error::InternalInconsistency(message)
        }
    };
    log::warn!("run failed: {error}");
    report.fail(&error);
    report
}

/// [`run`] with wall-clock timing attached.
pub fn run_timed(config: &ExperimentConfig) -> RunReport {
    let start = Instant::now();
    let mut report = run(config);
    report.timing = Some(Timing {
        millis: start.elapsed().as_secs_f64() * 1e3,
    });
    report
}

fn pipeline(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    report.warnings.extend(magnitude_warning(&config.noise, config.v_scale));
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let experiment = Experiment::build(config)?;
    let stabilize_config = config.stabilize_config();
    let oracle_depth = config.depth + ORACLE_EXTRA_DEPTH;
    let base = experiment.base_table()?;
    let mut tables = Vec::new();

    let p = experiment.pexider()?;
    report.hypothesis = Some(verify_hypothesis(&p, &p.domain().pairs())?);

    if config.engine.runs_cone() {
        let cone = stabilize(&p, &stabilize_config)?;
        tables.push(cone.table.clone());
        report.cone = Some(cone);
    }
    if config.engine.runs_normed() {
        let normed = classical_stabilize(&experiment.normed(config.v_scale, config.r)?, &stabilize_config)?;
        tables.push(normed.table.clone());
        report.normed = Some(normed);
    }

    let mut recovery: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for table in &tables {
        recovery = recovery.max(table.max_gap(&base)?);
        oracle = oracle.max(oracle_gap(table, &experiment.f, oracle_depth)?);
    }
    report.recovery_error = Some(recovery);
    report.oracle_error = Some(oracle);
    report.oracle_depth = Some(oracle_depth);
    if let [a, b] = tables.as_slice() {
        report.cross_engine_gap = Some(a.max_gap(b)?);
    }
    Ok(())
}
