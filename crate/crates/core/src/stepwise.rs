//! The classical step-by-step FW iteration.
//!
//! Each step splits the current Hamiltonian as βm + E_k + O_k, rotates with
//! U_k = exp(iS_k), S_k = −(i/2m)·β·O_k, and accumulates U = U_K···U_1. The
//! mass m stays fixed; any drift of the β coefficient lands in E_k.

use serde::{Deserialize, Serialize};

use crate::dirac::{make_beta, odd_norm_ratio, relative, split_even_odd, GradedMatrix};
use crate::eriksen::{eriksen_transform_with, DiagnosticSet, FwResult, Method};
use crate::error::{FwError, Result};
use crate::matfunc::{matrix_exp, DEFAULT_GAP_FACTOR};

/// Stagnation: the odd-norm ratio must shrink by at least this factor
/// over any window of `STAGNATION_WINDOW` steps.
pub const STAGNATION_FACTOR: f64 = 0.99;
pub const STAGNATION_WINDOW: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepwiseConfig {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        StepwiseConfig {
            tol: 1e-8,
            max_iterations: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ToleranceReached,
    MaxIterations,
    Stagnation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub iteration: usize,
    pub odd_norm_ratio_before: f64,
    /// ‖S_k‖_F
    pub exponent_norm: f64,
}

#[derive(Clone, Debug)]
pub struct StepwiseTrace {
    pub iterations: Vec<StepRecord>,
    pub composite_transform: GradedMatrix,
    pub final_odd_norm_ratio: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
}

pub fn stepwise_fw(h: &GradedMatrix, mass: f64, config: StepwiseConfig) -> Result<(FwResult, StepwiseTrace)> {
    if !(config.tol > 0.0) {
        return Err(FwError::InvalidModel(format!("stepwise tolerance must be positive, got {}", config.tol)));
    }
    // Validates mass and Hermiticity.
    split_even_odd(h, mass)?;

    let g = h.grading();
    let beta = make_beta(g);
    let mut current = h.clone();
    let mut composite = GradedMatrix::identity(g);
    let mut ratios = vec![odd_norm_ratio(&current)];
    let mut records = Vec::new();

    let stop_reason = loop {
        let ratio = *ratios.last().unwrap();
        if ratio <= config.tol {
            break StopReason::ToleranceReached;
        }
        let k = records.len();
        if k >= STAGNATION_WINDOW && ratio > STAGNATION_FACTOR * ratios[k - STAGNATION_WINDOW] {
            break StopReason::Stagnation;
        }
        if k >= config.max_iterations {
            break StopReason::MaxIterations;
        }

        let odd = split_even_odd(&current, mass)?.odd_part().clone();
        // iS_k = βO_k / 2m is anti-Hermitian.
        let generator = (&beta * &odd).scale(0.5 / mass);
        let step = matrix_exp(&generator);
        current = (&(&step * &current) * &step.adjoint()).hermitian_part();
        composite = &step * &composite;
        records.push(StepRecord {
            iteration: k + 1,
            odd_norm_ratio_before: ratio,
            exponent_norm: generator.norm(),
        });
        ratios.push(odd_norm_ratio(&current));
    };

    let result = FwResult::from_transform(Method::Stepwise, h, composite.clone())?;
    let trace = StepwiseTrace {
        iterations: records,
        composite_transform: composite,
        final_odd_norm_ratio: *ratios.last().unwrap(),
        converged: stop_reason == StopReason::ToleranceReached,
        stop_reason,
    };
    Ok((result, trace))
}

/// Stepwise and Eriksen results side by side on one Hamiltonian.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub eriksen: DiagnosticSet,
    pub stepwise: DiagnosticSet,
    /// ‖H_step − H_eriksen‖_F / ‖H_eriksen‖_F
    pub hamiltonian_disagreement: f64,
    /// ‖U_step − U_eriksen‖_F / ‖U_eriksen‖_F
    pub transform_disagreement: f64,
    pub trace: StepwiseTrace,
}

impl ComparisonRow {
    /// True when the Eriksen transform satisfies βU = U†β at least as well as the stepwise composite.
    pub fn eriksen_condition_ordered(&self) -> bool {
        self.eriksen.eriksen_condition_residual <= self.stepwise.eriksen_condition_residual
    }
}

pub fn stepwise_vs_eriksen(h: &GradedMatrix, mass: f64, config: StepwiseConfig) -> Result<ComparisonRow> {
    let exact = eriksen_transform_with(h, DEFAULT_GAP_FACTOR)?;
    let (approx, trace) = stepwise_fw(h, mass, config)?;
    Ok(ComparisonRow {
        hamiltonian_disagreement: relative(
            (&approx.transformed_hamiltonian - &exact.transformed_hamiltonian).norm(),
            exact.transformed_hamiltonian.norm(),
        ),
        transform_disagreement: approx.transform.relative_distance(&exact.transform),
        eriksen: exact.diagnostics,
        stepwise: approx.diagnostics,
        trace,
    })
}
