//! Exact (Eriksen) and step-by-step Foldy–Wouthuysen transformations for
//! finite-dimensional Dirac Hamiltonians, with the closed forms that hold
//! when the even and odd parts commute, and a harness for comparing them.

// `!(x <= tol)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac;
pub mod eriksen;
pub mod error;
pub mod exact;
pub mod harness;
pub mod matfunc;
pub mod models;
pub mod stepwise;

pub use dirac::{make_beta, odd_norm_ratio, split_even_odd, DiracDecomposition, Grading, GradedMatrix};
pub use eriksen::{eriksen_transform, eriksen_transform_alt, DiagnosticSet, FwResult, Method};
pub use error::{FwError, Result};
pub use exact::{check_commutation, ExactCase};
pub use harness::{run_comparison, ComparisonReport, ToleranceConfig};
pub use models::{Model, ModelKind, ModelSpec, Potential};
pub use stepwise::{stepwise_fw, StepwiseConfig, StepwiseTrace, StopReason};
