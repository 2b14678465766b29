//! Design-time evaluation and ranking of configurations.
//!
//! `evaluate` is the validation mode: metrics, diagnostics and an optional
//! gate verdict for one configuration. `select_best` is the selection mode:
//! candidates are scored by the quality function and the best one that is
//! free of well-formedness errors wins, the earliest on ties.

use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{gate, quality_parts, Decision, MetricError, MetricReport, Thresholds, Verdict};
use crate::model::{
    has_errors, validate_configuration, validate_universe, Diagnostic, Level, Model,
};
use crate::resources::ContextSnapshot;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("unknown configuration '{0}'")]
    UnknownConfiguration(String),
    #[error("no candidate configurations given")]
    NoCandidates,
    #[error("every candidate has well-formedness errors or cannot be scored")]
    AllCandidatesInvalid,
    #[error("configuration '{config}': {source}")]
    Metric {
        config: String,
        #[source]
        source: MetricError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub model_name: String,
    pub config_name: String,
    pub level: Level,
    pub metrics: MetricReport,
    pub verdict: Option<Verdict>,
    pub diagnostics: Vec<Diagnostic>,
}

impl QualityReport {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub winner_index: usize,
    pub reports: Vec<QualityReport>,
    /// Quality per candidate; `None` for candidates that were not eligible.
    pub scores: Vec<Option<f64>>,
}

impl SelectionResult {
    pub fn winner(&self) -> &QualityReport {
        &self.reports[self.winner_index]
    }
}

/// Evaluates one configuration.
///
/// Time behaviour, adaptation cost and quality are computed for CPIM
/// configurations when a context is given and the configuration has no
/// well-formedness errors. Any such error forces a Reject verdict.
pub fn evaluate(
    model: &Model,
    config_name: &str,
    ctx: Option<&ContextSnapshot>,
    thresholds: Option<&Thresholds>,
) -> Result<QualityReport, SelectionError> {
    let config = model
        .configuration(config_name)
        .ok_or_else(|| SelectionError::UnknownConfiguration(config_name.to_string()))?;
    let mut diagnostics = validate_configuration(model, config);
    diagnostics.extend(validate_universe(model));
    let invalid = has_errors(&diagnostics);

    let mut metrics = MetricReport::structural(model, config);
    if let (Level::Cpim, Some(ctx), false) = (config.level, ctx, invalid) {
        let (t, m, q) = quality_parts(model, config, ctx, model.family_of(&config.name))
            .map_err(|source| SelectionError::Metric {
                config: config.name.clone(),
                source,
            })?;
        metrics.tbm_ms = Some(t);
        metrics.maac = Some(m);
        metrics.quality = Some(q);
    }

    let verdict = thresholds.map(|t| {
        let mut v = gate(&metrics, t);
        if invalid {
            v.decision = Decision::Reject;
            v.failed.push("well-formedness".to_string());
        }
        v
    });
    Ok(QualityReport {
        model_name: model.name.clone(),
        config_name: config.name.clone(),
        level: config.level,
        metrics,
        verdict,
        diagnostics,
    })
}

/// Ranks candidates by quality under `ctx` and returns the best one.
///
/// Candidates with well-formedness errors, or whose time behaviour cannot be
/// computed, are never chosen. Candidates are evaluated in parallel; results
/// keep input order.
pub fn select_best(
    model: &Model,
    config_names: &[&str],
    ctx: &ContextSnapshot,
) -> Result<SelectionResult, SelectionError> {
    if config_names.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let thresholds = model.thresholds.as_ref();
    let results: Vec<Result<(QualityReport, bool), SelectionError>> = config_names
        .par_iter()
        .map(|name| match evaluate(model, name, Some(ctx), thresholds) {
            Ok(r) => Ok((r, true)),
            Err(SelectionError::Metric { .. }) => {
                evaluate(model, name, None, thresholds).map(|r| (r, false))
            }
            Err(e) => Err(e),
        })
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    let mut scores = Vec::with_capacity(results.len());
    for r in results {
        let (report, scored) = r?;
        scores.push(if scored && !report.has_errors() {
            report.metrics.quality
        } else {
            None
        });
        reports.push(report);
    }
    let mut winner: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if winner.is_none_or(|(_, best)| s > best) {
                winner = Some((i, s));
            }
        }
    }
    let (winner_index, _) = winner.ok_or(SelectionError::AllCandidatesInvalid)?;
    Ok(SelectionResult {
        winner_index,
        reports,
        scores,
    })
}
