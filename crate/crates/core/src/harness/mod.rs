//! Runs methods over a model and assembles comparison reports.
//!
//! A failing method never aborts a comparison: its row carries an error
//! record instead of diagnostics. Only a model that cannot be built is an
//! error of the run itself.

pub mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirac::{relative, GradedMatrix};
use crate::eriksen::{eriksen_transform_alt_with, eriksen_transform_with, DiagnosticSet, FwResult, Method};
use crate::error::{FwError, Result};
use crate::exact::{check_commutation_with, weak_field_sqrt, weak_field_strength, weak_field_transform, ExactCase, DEFAULT_COMMUTE_TOL};
use crate::matfunc::{self, principal_sqrt, DEFAULT_GAP_FACTOR};
use crate::models::{Model, ModelKind, ModelSpec};
use crate::stepwise::{stepwise_fw, StepwiseConfig, StopReason};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub gap_factor: f64,
    pub commute_tol: f64,
    pub stepwise: StepwiseConfig,
    /// Wall-clock timings make reports non-reproducible, so they are opt-in.
    pub record_timings: bool,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            gap_factor: DEFAULT_GAP_FACTOR,
            commute_tol: DEFAULT_COMMUTE_TOL,
            stepwise: StepwiseConfig::default(),
            record_timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl From<&FwError> for ErrorRecord {
    fn from(e: &FwError) -> Self {
        ErrorRecord {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: Method,
    pub diagnostics: Option<DiagnosticSet>,
    /// Method-specific numbers (iteration counts, square-root errors, ...).
    pub metrics: BTreeMap<String, f64>,
    pub stop_reason: Option<StopReason>,
    pub error: Option<ErrorRecord>,
    pub wall_time_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossRow {
    /// The first method is the reference the disagreements are normalized by.
    pub methods: [Method; 2],
    pub hamiltonian_disagreement: f64,
    pub transform_disagreement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportContext {
    pub mass: f64,
    pub dim: usize,
    pub commutation_residual: f64,
    pub is_commuting: bool,
    /// min |eigenvalue| of H
    pub spectral_gap: f64,
    /// ‖E‖_F / (m √dim)
    pub weak_field_strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub model: ModelSpec,
    pub context: ReportContext,
    pub rows: Vec<MethodRow>,
    pub cross: Vec<CrossRow>,
}

impl ComparisonReport {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    pub fn row(&self, method: Method) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn cross_row(&self, a: Method, b: Method) -> Option<&CrossRow> {
        self.cross
            .iter()
            .find(|c| c.methods == [a, b] || c.methods == [b, a])
    }
}

struct MethodOutcome {
    result: Option<FwResult>,
    row: MethodRow,
}

fn run_method(model: &Model, method: Method, tol: &ToleranceConfig) -> MethodOutcome {
    let start = Instant::now();
    let h = &model.hamiltonian;
    let d = &model.decomposition;
    let mut metrics = BTreeMap::new();
    let mut stop_reason = None;

    let outcome: Result<FwResult> = match method {
        Method::Eriksen => eriksen_transform_with(h, tol.gap_factor),
        Method::EriksenAlt => eriksen_transform_alt_with(h, tol.gap_factor),
        Method::ExactCase => ExactCase::new(d, tol.commute_tol, tol.gap_factor).and_then(|exact| {
            let result = exact.transform()?;
            metrics.insert(
                "fw_hamiltonian_residual".into(),
                relative(
                    (&result.transformed_hamiltonian - &exact.fw_hamiltonian()).norm(),
                    h.norm(),
                ),
            );
            Ok(result)
        }),
        Method::Stepwise => stepwise_fw(h, d.mass(), tol.stepwise).map(|(result, trace)| {
            metrics.insert("iterations".into(), trace.iterations.len() as f64);
            metrics.insert("final_odd_norm_ratio".into(), trace.final_odd_norm_ratio);
            stop_reason = Some(trace.stop_reason);
            result
        }),
        Method::WeakField => {
            metrics.insert("weak_field_strength".into(), weak_field_strength(d));
            let h2 = (h * h).hermitian_part();
            if let Ok(reference) = principal_sqrt(&h2) {
                let err = (&weak_field_sqrt(d) - &reference).norm();
                metrics.insert("sqrt_error".into(), err);
                metrics.insert("sqrt_relative_error".into(), relative(err, reference.norm()));
            }
            weak_field_transform(d, tol.gap_factor)
        }
    };

    let wall_time_seconds = tol.record_timings.then(|| start.elapsed().as_secs_f64());
    match outcome {
        Ok(result) => MethodOutcome {
            row: MethodRow {
                method,
                diagnostics: Some(result.diagnostics.clone()),
                metrics,
                stop_reason,
                error: None,
                wall_time_seconds,
            },
            result: Some(result),
        },
        Err(e) => MethodOutcome {
            result: None,
            row: MethodRow {
                method,
                diagnostics: None,
                metrics,
                stop_reason,
                error: Some(ErrorRecord::from(&e)),
                wall_time_seconds,
            },
        },
    }
}

fn context(model: &Model, tol: &ToleranceConfig) -> ReportContext {
    let d = &model.decomposition;
    let comm = check_commutation_with(d, tol.commute_tol);
    ReportContext {
        mass: d.mass(),
        dim: model.grading().dim(),
        commutation_residual: comm.commutator_residual,
        is_commuting: comm.is_commuting,
        spectral_gap: matfunc::spectral_gap(&model.hamiltonian, 0.0).min_abs_eigenvalue,
        weak_field_strength: weak_field_strength(d),
    }
}

/// Runs `methods` on an already built model. Rows follow the canonical
/// method order regardless of the order requested.
pub fn compare_model(
    spec: ModelSpec,
    model: &Model,
    methods: &BTreeSet<Method>,
    tol: &ToleranceConfig,
) -> ComparisonReport {
    let methods: Vec<Method> = methods.iter().copied().collect();
    let outcomes: Vec<MethodOutcome> = methods
        .par_iter()
        .map(|&m| run_method(model, m, tol))
        .collect();

    let mut cross = Vec::new();
    for (i, a) in outcomes.iter().enumerate() {
        for b in &outcomes[i + 1..] {
            if let (Some(ra), Some(rb)) = (&a.result, &b.result) {
                cross.push(CrossRow {
                    methods: [ra.method, rb.method],
                    hamiltonian_disagreement: disagreement(
                        &rb.transformed_hamiltonian,
                        &ra.transformed_hamiltonian,
                    ),
                    transform_disagreement: disagreement(&rb.transform, &ra.transform),
                });
            }
        }
    }

    ComparisonReport {
        model: spec,
        context: context(model, tol),
        rows: outcomes.into_iter().map(|o| o.row).collect(),
        cross,
    }
}

fn disagreement(candidate: &GradedMatrix, reference: &GradedMatrix) -> f64 {
    relative((candidate - reference).norm(), reference.norm())
}

/// Builds the model described by `spec` and compares `methods` on it.
pub fn run_comparison(
    spec: &ModelSpec,
    methods: &BTreeSet<Method>,
    tol: &ToleranceConfig,
) -> Result<ComparisonReport> {
    let model = spec.build()?;
    Ok(compare_model(spec.clone(), &model, methods, tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = FwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(FwError::InvalidModel(format!("unknown report format `{other}`"))),
        }
    }
}

/// Metric columns of the CSV format, one row per (method, metric).
pub const CSV_METRICS: [&str; 5] = [
    "unitarity_residual",
    "eriksen_condition_residual",
    "block_diagonality",
    "exponent_odd_residual",
    "spectrum_drift",
];

pub fn to_json(report: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn report_from_json(text: &str) -> Result<ComparisonReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_csv(report: &ComparisonReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "metric", "value", "status"])?;
    for row in &report.rows {
        for metric in CSV_METRICS {
            let value = row.diagnostics.as_ref().and_then(|d| match metric {
                "unitarity_residual" => Some(d.unitarity_residual),
                "eriksen_condition_residual" => Some(d.eriksen_condition_residual),
                "block_diagonality" => Some(d.block_diagonality),
                "exponent_odd_residual" => d.exponent_odd_residual,
                "spectrum_drift" => Some(d.spectrum_drift),
                _ => unreachable!(),
            });
            let status = match (&row.error, value) {
                (Some(e), _) => e.kind.clone(),
                (None, Some(_)) => "ok".to_string(),
                (None, None) => "undefined".to_string(),
            };
            let value = value.map(|v| format!("{v:?}")).unwrap_or_default();
            w.write_record([row.method.name(), metric, value.as_str(), status.as_str()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| FwError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Writes the report atomically in the requested format.
pub fn emit_report(report: &ComparisonReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        ReportFormat::Json => to_json(report)?,
        ReportFormat::Csv => to_csv(report)?,
    };
    io::write_atomic(path, text.as_bytes())
}

/// Empirical order log(e₁/e₂) / log(g₁/g₂) between consecutive sweep values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub from: f64,
    pub to: f64,
    pub order: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub parameter: String,
    pub values: Vec<f64>,
    pub weak_field_errors: Vec<Option<f64>>,
    pub weak_field_orders: Vec<OrderEntry>,
    pub stepwise_block_diagonality: Vec<Option<f64>>,
    pub stepwise_orders: Vec<OrderEntry>,
    pub stepwise_stop_reasons: Vec<Option<StopReason>>,
    pub stagnation: bool,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub reports: Vec<ComparisonReport>,
    pub summary: SweepSummary,
}

pub fn empirical_orders(values: &[f64], errors: &[Option<f64>]) -> Vec<OrderEntry> {
    values
        .windows(2)
        .zip(errors.windows(2))
        .filter_map(|(g, e)| match (e[0], e[1]) {
            (Some(e0), Some(e1)) if e0 > 0.0 && e1 > 0.0 && g[0] != g[1] => Some(OrderEntry {
                from: g[0],
                to: g[1],
                order: (e0 / e1).ln() / (g[0] / g[1]).ln(),
            }),
            _ => None,
        })
        .collect()
}

/// Replaces the potential strength of a lattice spec by each value in turn.
pub fn run_sweep(
    base: &ModelSpec,
    values: &[f64],
    methods: &BTreeSet<Method>,
    tol: &ToleranceConfig,
) -> Result<SweepOutcome> {
    if values.is_empty() {
        return Err(FwError::InvalidModel("sweep needs at least one value".into()));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(FwError::InvalidModel(format!("sweep values must be positive, got {bad}")));
    }
    let ModelKind::Lattice1d { sites, half_width, potential } = &base.model else {
        return Err(FwError::InvalidModel("sweeps run over lattice models".into()));
    };
    let specs: Vec<ModelSpec> = values
        .iter()
        .map(|&g| {
            Ok(ModelSpec {
                mass: base.mass,
                model: ModelKind::Lattice1d {
                    sites: *sites,
                    half_width: *half_width,
                    potential: potential.with_strength(g)?,
                },
                seed: base.seed,
            })
        })
        .collect::<Result<_>>()?;

    let reports: Vec<ComparisonReport> = specs
        .par_iter()
        .map(|s| run_comparison(s, methods, tol))
        .collect::<Result<_>>()?;

    let weak_field_errors: Vec<Option<f64>> = reports
        .iter()
        .map(|r| r.row(Method::WeakField).and_then(|row| row.metrics.get("sqrt_error").copied()))
        .collect();
    let stepwise_block_diagonality: Vec<Option<f64>> = reports
        .iter()
        .map(|r| {
            r.row(Method::Stepwise)
                .and_then(|row| row.diagnostics.as_ref())
                .map(|d| d.block_diagonality)
        })
        .collect();
    let stepwise_stop_reasons: Vec<Option<StopReason>> = reports
        .iter()
        .map(|r| r.row(Method::Stepwise).and_then(|row| row.stop_reason))
        .collect();

    let summary = SweepSummary {
        parameter: "g".into(),
        values: values.to_vec(),
        weak_field_orders: empirical_orders(values, &weak_field_errors),
        stepwise_orders: empirical_orders(values, &stepwise_block_diagonality),
        stagnation: stepwise_stop_reasons.contains(&Some(StopReason::Stagnation)),
        weak_field_errors,
        stepwise_block_diagonality,
        stepwise_stop_reasons,
    };
    Ok(SweepOutcome { reports, summary })
}
