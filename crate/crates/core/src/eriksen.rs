//! The exact Foldy–Wouthuysen transformation in Eriksen's form, built from
//! the sign operator λ = H/√(H²):
//!
//! ```text
//! U = ½(1 + βλ) [1 + ¼(βλ + λβ − 2)]^{-1/2}          (canonical)
//! U = (1 + βλ) / √((1 + βλ)†(1 + βλ))                 (polar form)
//! ```
//!
//! Both are coded independently and are expected to agree to rounding. Every
//! transform produced by the crate is wrapped in an [`FwResult`] that records
//! how well it satisfies βU = U†β, whether U H U† is block-diagonal, and
//! whether the spectrum survived.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dirac::{make_beta, odd_norm_ratio, relative, CVector, GradedMatrix, NORM_FLOOR};
use crate::error::{FwError, Result};
use crate::matfunc::{
    self, hermitian_eigen, inv_sqrt_with, sign_operator_with, unitarity_residual, unitary_log,
    DEFAULT_GAP_FACTOR, UNITARY_TOL,
};

/// Minimum singular value of 1 + βλ accepted by the polar form.
pub const DEGENERATE_FACTOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Eriksen,
    EriksenAlt,
    ExactCase,
    Stepwise,
    WeakField,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Eriksen,
        Method::EriksenAlt,
        Method::ExactCase,
        Method::Stepwise,
        Method::WeakField,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Eriksen => "eriksen",
            Method::EriksenAlt => "eriksenalt",
            Method::ExactCase => "exactcase",
            Method::Stepwise => "stepwise",
            Method::WeakField => "weakfield",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = FwError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| FwError::InvalidModel(format!("unknown method `{s}`")))
    }
}

/// Residuals describing one transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSet {
    /// ‖U†U − I‖_F
    pub unitarity_residual: f64,
    /// ‖βU − U†β‖_F / ‖U‖_F
    pub eriksen_condition_residual: f64,
    /// odd-norm ratio of U H U†
    pub block_diagonality: f64,
    /// ‖½(S + βSβ)‖_F / ‖S‖_F for U = exp(iS); absent when the logarithm is undefined
    pub exponent_odd_residual: Option<f64>,
    /// max_k |e_k(H) − e_k(U H U†)| / max_k |e_k(H)|
    pub spectrum_drift: f64,
}

impl DiagnosticSet {
    pub fn evaluate(h: &GradedMatrix, u: &GradedMatrix, transformed: &GradedMatrix) -> Self {
        DiagnosticSet {
            unitarity_residual: unitarity_residual(u),
            eriksen_condition_residual: eriksen_condition_residual(u),
            block_diagonality: odd_norm_ratio(transformed),
            exponent_odd_residual: exponent_oddness(u).ok().map(|o| o.odd_residual),
            spectrum_drift: spectrum_drift(h, transformed),
        }
    }
}

/// A unitary transform, the Hamiltonian it produces, and its diagnostics.
#[derive(Clone, Debug)]
pub struct FwResult {
    pub transform: GradedMatrix,
    pub transformed_hamiltonian: GradedMatrix,
    pub method: Method,
    pub diagnostics: DiagnosticSet,
}

impl FwResult {
    /// Applies `u` to `h` and evaluates diagnostics. Rejects non-unitary `u`.
    pub fn from_transform(method: Method, h: &GradedMatrix, u: GradedMatrix) -> Result<Self> {
        let residual = unitarity_residual(&u);
        if !(residual <= UNITARY_TOL) {
            return Err(FwError::NotUnitary { residual });
        }
        let transformed = (&(&u * h) * &u.adjoint()).hermitian_part();
        let diagnostics = DiagnosticSet::evaluate(h, &u, &transformed);
        Ok(FwResult {
            transform: u,
            transformed_hamiltonian: transformed,
            method,
            diagnostics,
        })
    }
}

/// ‖βU − U†β‖_F / ‖U‖_F.
pub fn eriksen_condition_residual(u: &GradedMatrix) -> f64 {
    let beta = make_beta(u.grading());
    relative((&(&beta * u) - &(&u.adjoint() * &beta)).norm(), u.norm())
}

/// Largest sorted-eigenvalue difference, relative to the largest |eigenvalue| of `h`.
pub fn spectrum_drift(h: &GradedMatrix, transformed: &GradedMatrix) -> f64 {
    let before = matfunc::eigenvalues(h);
    let after = matfunc::eigenvalues(transformed);
    let scale = before.iter().fold(0.0f64, |acc, w| acc.max(w.abs()));
    let worst = before
        .iter()
        .zip(&after)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    relative(worst, scale)
}

/// Canonical Eriksen operator from a precomputed sign operator.
pub fn eriksen_operator_from_sign(lambda: &GradedMatrix, gap_factor: f64) -> Result<GradedMatrix> {
    let beta = make_beta(lambda.grading());
    let beta_lambda = &beta * lambda;
    let lambda_beta = lambda * &beta;
    // 1 + ¼(βλ + λβ − 2) = ½ + ¼(βλ + λβ)
    let inner = (&beta_lambda + &lambda_beta).scale(0.25).shift(0.5).hermitian_part();
    let root = inv_sqrt_with(&inner, gap_factor)?;
    Ok(&beta_lambda.shift(1.0).scale(0.5) * &root)
}

/// Polar-form Eriksen operator from a precomputed (approximate) sign operator.
pub fn eriksen_polar_from_sign(lambda: &GradedMatrix, gap_factor: f64) -> Result<GradedMatrix> {
    let beta = make_beta(lambda.grading());
    let factor = (&beta * lambda).shift(1.0);
    let gram = (&factor.adjoint() * &factor).hermitian_part();
    let smallest = hermitian_eigen(&gram).min();
    let min_singular_value = smallest.max(0.0).sqrt();
    if min_singular_value < DEGENERATE_FACTOR_TOL {
        return Err(FwError::DegenerateFactor { min_singular_value });
    }
    Ok(&factor * &inv_sqrt_with(&gram, gap_factor)?)
}

/// U from the canonical formula.
pub fn eriksen_operator(h: &GradedMatrix, gap_factor: f64) -> Result<GradedMatrix> {
    let lambda = sign_operator_with(h, gap_factor)?;
    eriksen_operator_from_sign(&lambda, gap_factor)
}

pub fn eriksen_transform(h: &GradedMatrix) -> Result<FwResult> {
    eriksen_transform_with(h, DEFAULT_GAP_FACTOR)
}

pub fn eriksen_transform_with(h: &GradedMatrix, gap_factor: f64) -> Result<FwResult> {
    let u = eriksen_operator(h, gap_factor)?;
    FwResult::from_transform(Method::Eriksen, h, u)
}

pub fn eriksen_transform_alt(h: &GradedMatrix) -> Result<FwResult> {
    eriksen_transform_alt_with(h, DEFAULT_GAP_FACTOR)
}

pub fn eriksen_transform_alt_with(h: &GradedMatrix, gap_factor: f64) -> Result<FwResult> {
    let lambda = sign_operator_with(h, gap_factor)?;
    let u = eriksen_polar_from_sign(&lambda, gap_factor)?;
    FwResult::from_transform(Method::EriksenAlt, h, u)
}

/// ‖[(1+βλ)†, 1+βλ]‖_F: the two factors under the polar-form root commute.
pub fn factor_commutator_residual(lambda: &GradedMatrix) -> f64 {
    let beta = make_beta(lambda.grading());
    let factor = (&beta * lambda).shift(1.0);
    factor.adjoint().commutator(&factor).norm()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentOddness {
    pub odd_residual: f64,
    pub hermiticity_residual: f64,
}

/// Writes U = exp(iS) and measures how far S is from Hermitian and odd.
pub fn exponent_oddness(u: &GradedMatrix) -> Result<ExponentOddness> {
    let s = unitary_log(u)?;
    let norm = s.norm().max(NORM_FLOOR);
    Ok(ExponentOddness {
        odd_residual: s.even_part().norm() / norm,
        hermiticity_residual: (&s - &s.adjoint()).norm() / norm,
    })
}

/// Ψ_FW = U Ψ.
pub fn transform_state(u: &GradedMatrix, psi: &CVector) -> Result<CVector> {
    u.apply(psi)
}
