//! Structural quality metrics, time behaviour, the quality function and the
//! design-time threshold gate.

mod structural;
mod time;

use thiserror::Error;

pub use crate::resources::ContextSnapshot;
pub use structural::{cohesion, complexity, complexity_of_size, coupling, structural_mark, Mark};
pub use time::{tb_artifact, tbm};

use crate::families::{maac, FamilyError, Family, MaacRange};
use crate::model::{Configuration, Model, Resource};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("{resource} available to '{instance}' is zero")]
    ZeroResource { instance: String, resource: Resource },
    #[error("instance '{0}' is not deployed")]
    NotDeployed(String),
    #[error("unknown instance '{0}'")]
    UnknownInstance(String),
    #[error("no link from '{from}' to '{to}'")]
    NoRoute { from: String, to: String },
    #[error(transparent)]
    Adaptation(#[from] FamilyError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub coupling_max: f64,
    pub cohesion_min: f64,
    pub complexity_max: f64,
}

impl Thresholds {
    pub fn new(coupling_max: f64, cohesion_min: f64, complexity_max: f64) -> Self {
        Self {
            coupling_max,
            cohesion_min,
            complexity_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub coupling: f64,
    pub cohesion: f64,
    pub complexity: f64,
    pub tbm_ms: Option<f64>,
    pub maac: Option<MaacRange>,
    pub quality: Option<f64>,
}

impl MetricReport {
    pub fn structural(model: &Model, config: &Configuration) -> Self {
        Self {
            coupling: coupling(model, config),
            cohesion: cohesion(model, config),
            complexity: complexity(config),
            tbm_ms: None,
            maac: None,
            quality: None,
        }
    }

    pub fn mark(&self) -> Mark {
        Mark::from_metrics(self.coupling, self.cohesion, self.complexity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub decision: Decision,
    pub failed: Vec<String>,
    pub advisories: Vec<String>,
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        self.decision == Decision::Accept
    }
}

/// Coupling and complexity above their maxima reject; low cohesion only
/// raises an advisory.
pub fn gate(report: &MetricReport, thresholds: &Thresholds) -> Verdict {
    let mut failed = Vec::new();
    let mut advisories = Vec::new();
    if report.coupling > thresholds.coupling_max {
        failed.push("coupling".to_string());
    }
    if report.cohesion < thresholds.cohesion_min {
        advisories.push("cohesion".to_string());
    }
    if report.complexity > thresholds.complexity_max {
        failed.push("complexity".to_string());
    }
    Verdict {
        decision: if failed.is_empty() {
            Decision::Accept
        } else {
            Decision::Reject
        },
        failed,
        advisories,
    }
}

/// Time behaviour over regularised adaptation cost.
pub fn quality_score(tbm_ms: f64, maac: MaacRange) -> f64 {
    tbm_ms / (1.0 + maac.max as f64)
}

/// TBM, MaAC and the resulting quality score of a configuration.
///
/// Without a family, or with a family that declares no context states, the
/// adaptation cost is zero.
pub fn quality_parts(
    model: &Model,
    config: &Configuration,
    ctx: &ContextSnapshot,
    family: Option<&Family>,
) -> Result<(f64, MaacRange, f64), MetricError> {
    let t = tbm(model, config, ctx)?;
    let cost = match family {
        Some(f) if !f.context_states.is_empty() => maac(model, f, config)?,
        _ => MaacRange::ZERO,
    };
    Ok((t, cost, quality_score(t, cost)))
}

pub fn quality(
    model: &Model,
    config: &Configuration,
    ctx: &ContextSnapshot,
    family: Option<&Family>,
) -> Result<f64, MetricError> {
    quality_parts(model, config, ctx, family).map(|(_, _, q)| q)
}
