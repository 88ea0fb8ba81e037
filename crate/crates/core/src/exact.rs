//! Closed-form FW transformation for Hamiltonians whose even and odd parts
//! commute, and the weak-field expansion of √(H²) for when they do not.
//!
//! With [E, O] = 0 and ε = √(m² + O²):
//!
//! ```text
//! √(H²) = ε + (βm + O) E ε⁻¹
//! λ     = (βm + O) ε⁻¹
//! U     = (ε + m + βO) / √(2ε(ε + m))
//! U H U† = βε + E
//! ```

use crate::dirac::{make_beta, relative, DiracDecomposition, GradedMatrix, NORM_FLOOR};
use crate::eriksen::{eriksen_polar_from_sign, FwResult, Method};
use crate::error::{FwError, Result};
use crate::matfunc::{hermitian_eigen, inv_positive, inv_sqrt_with, DEFAULT_GAP_FACTOR};

/// Default relative threshold on ‖[E, O]‖_F / (‖E‖_F ‖O‖_F).
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutationReport {
    pub commutator_residual: f64,
    pub is_commuting: bool,
}

pub fn check_commutation(d: &DiracDecomposition) -> CommutationReport {
    check_commutation_with(d, DEFAULT_COMMUTE_TOL)
}

pub fn check_commutation_with(d: &DiracDecomposition, commute_tol: f64) -> CommutationReport {
    let e = d.even_part();
    let o = d.odd_part();
    let residual = e.commutator(o).norm() / (e.norm() * o.norm() + NORM_FLOOR);
    CommutationReport {
        commutator_residual: residual,
        is_commuting: residual <= commute_tol,
    }
}

/// ε = √(m² + O²) and ε⁻¹ from a single eigendecomposition.
fn epsilon_pair(d: &DiracDecomposition) -> (GradedMatrix, GradedMatrix) {
    let o = d.odd_part();
    let m2 = d.mass() * d.mass();
    // O² is exactly even, so the kernel works block by block.
    let arg = (o * o).hermitian_part().shift(m2);
    let eig = hermitian_eigen(&arg);
    (
        arg.with_entries(eig.map(|w| w.max(0.0).sqrt())),
        arg.with_entries(eig.map(|w| 1.0 / w.sqrt())),
    )
}

/// ε = √(m² + O²).
pub fn epsilon_operator(d: &DiracDecomposition) -> GradedMatrix {
    epsilon_pair(d).0
}

/// The closed forms for one commuting decomposition, with ε cached.
#[derive(Clone, Debug)]
pub struct ExactCase<'a> {
    decomposition: &'a DiracDecomposition,
    epsilon: GradedMatrix,
    epsilon_inv: GradedMatrix,
    gap_factor: f64,
    pub commutation: CommutationReport,
}

impl<'a> ExactCase<'a> {
    /// Fails with `NotCommuting` unless [E, O] vanishes to `commute_tol`.
    pub fn new(d: &'a DiracDecomposition, commute_tol: f64, gap_factor: f64) -> Result<Self> {
        let commutation = check_commutation_with(d, commute_tol);
        if !commutation.is_commuting {
            return Err(FwError::NotCommuting {
                residual: commutation.commutator_residual,
            });
        }
        let (epsilon, epsilon_inv) = epsilon_pair(d);
        Ok(ExactCase {
            decomposition: d,
            epsilon,
            epsilon_inv,
            gap_factor,
            commutation,
        })
    }

    pub fn with_defaults(d: &'a DiracDecomposition) -> Result<Self> {
        Self::new(d, DEFAULT_COMMUTE_TOL, DEFAULT_GAP_FACTOR)
    }

    pub fn epsilon(&self) -> &GradedMatrix {
        &self.epsilon
    }

    /// ε + (βm + O) E ε⁻¹, rejected when it is not positive definite.
    pub fn sqrt_hd2(&self) -> Result<GradedMatrix> {
        let d = self.decomposition;
        let correction = &(&d.mass_plus_odd() * d.even_part()) * &self.epsilon_inv;
        let root = (&self.epsilon + &correction).hermitian_part();
        let smallest = hermitian_eigen(&root).min();
        if !(smallest >= self.gap_factor * root.norm()) {
            return Err(FwError::OutsideValidityDomain {
                min_eigenvalue: smallest,
            });
        }
        Ok(root)
    }

    /// (βm + O) ε⁻¹; E does not enter.
    pub fn lambda(&self) -> GradedMatrix {
        (&self.decomposition.mass_plus_odd() * &self.epsilon_inv).hermitian_part()
    }

    /// (ε + m + βO) [2ε(ε + m)]^{-1/2}.
    pub fn transform_operator(&self) -> Result<GradedMatrix> {
        let d = self.decomposition;
        let m = d.mass();
        let beta = make_beta(d.grading());
        let numerator = &self.epsilon.shift(m) + &(&beta * d.odd_part());
        let denominator = (&self.epsilon * &self.epsilon.shift(m)).scale(2.0).hermitian_part();
        Ok(&numerator * &inv_sqrt_with(&denominator, self.gap_factor)?)
    }

    pub fn transform(&self) -> Result<FwResult> {
        let u = self.transform_operator()?;
        FwResult::from_transform(Method::ExactCase, &self.decomposition.hamiltonian(), u)
    }

    /// βε + E.
    pub fn fw_hamiltonian(&self) -> GradedMatrix {
        let beta = make_beta(self.decomposition.grading());
        &(&beta * &self.epsilon) + self.decomposition.even_part()
    }
}

pub fn sqrt_hd2_exact(d: &DiracDecomposition) -> Result<GradedMatrix> {
    ExactCase::with_defaults(d)?.sqrt_hd2()
}

pub fn lambda_exact(d: &DiracDecomposition) -> Result<GradedMatrix> {
    Ok(ExactCase::with_defaults(d)?.lambda())
}

pub fn u_fw_exact(d: &DiracDecomposition) -> Result<FwResult> {
    ExactCase::with_defaults(d)?.transform()
}

pub fn h_fw_exact(d: &DiracDecomposition) -> Result<GradedMatrix> {
    Ok(ExactCase::with_defaults(d)?.fw_hamiltonian())
}

/// Weak-field square root keeping unary and binary commutators:
///
/// ```text
/// ε + ¼{ε⁻¹, {βm + O, E}} − ⅛{(βm + O)ε⁻¹, [ε, [ε, E]]}
/// ```
///
/// Valid for ‖E‖ ≪ m; nothing is enforced here.
pub fn weak_field_sqrt(d: &DiracDecomposition) -> GradedMatrix {
    let (eps, eps_inv) = epsilon_pair(d);
    let a = d.mass_plus_odd();
    let e = d.even_part();
    let first = eps_inv.anticommutator(&a.anticommutator(e)).scale(0.25);
    let nested = eps.commutator(&eps.commutator(e));
    let second = (&a * &eps_inv).anticommutator(&nested).scale(0.125);
    (&(&eps + &first) - &second).hermitian_part()
}

/// ‖E‖_F / (m √dim).
pub fn weak_field_strength(d: &DiracDecomposition) -> f64 {
    relative(
        d.even_part().norm(),
        d.mass() * (d.grading().dim() as f64).sqrt(),
    )
}

/// Polar-form Eriksen transform driven by the weak-field root:
/// λ ≈ H R⁻¹ with R the weak-field √(H²).
pub fn weak_field_transform(d: &DiracDecomposition, gap_factor: f64) -> Result<FwResult> {
    let root = weak_field_sqrt(d);
    let h = d.hamiltonian();
    let root_inv = inv_positive(&root, gap_factor).map_err(|e| match e {
        FwError::SingularOperand { min_eigenvalue, .. } => {
            FwError::OutsideValidityDomain { min_eigenvalue }
        }
        other => other,
    })?;
    let lambda = &h * &root_inv;
    let u = eriksen_polar_from_sign(&lambda, gap_factor)?;
    FwResult::from_transform(Method::WeakField, &h, u)
}
