//! Dense matrix functions built on a Hermitian eigendecomposition.
//!
//! Square roots, inverse square roots, the sign operator and the unitary
//! logarithm are all evaluated as `Q f(D) Q†`. Square roots always take the
//! principal (nonnegative) branch, so `√I = I`. The exponential
//! accepts any square matrix.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::dirac::{CMatrix, GradedMatrix, HERMITIAN_TOL};
use crate::error::{FwError, Result};

/// Default relative gap tolerance: an operand counts as singular when its
/// smallest eigenvalue is below `DEFAULT_GAP_FACTOR * ‖A‖_F`.
pub const DEFAULT_GAP_FACTOR: f64 = 1e-10;

/// Slack allowed on negative eigenvalues of a PSD operand, relative to ‖A‖_F.
pub const PSD_SLACK: f64 = 1e-12;

/// Hermiticity tolerance for operands of the kernels.
const KERNEL_HERMITIAN_TOL: f64 = 1e-10;

/// Unitarity tolerance on ‖U†U − I‖_F.
pub const UNITARY_TOL: f64 = 1e-10;

/// Eigenphases closer than this to ±π are rejected by [`unitary_log`].
pub const BRANCH_CUT_MARGIN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralGapReport {
    pub min_abs_eigenvalue: f64,
    /// All eigenvalues share one sign and clear the gap tolerance.
    pub is_definite: bool,
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Q f(D) Q†.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fw);
        }
        let out = scaled * self.vectors.adjoint();
        hermitize(&out)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |acc, w| acc.min(w.abs()))
    }
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

fn is_diagonal(m: &CMatrix) -> bool {
    let zero = Complex64::new(0.0, 0.0);
    m.column_iter()
        .enumerate()
        .all(|(j, col)| col.iter().enumerate().all(|(i, z)| i == j || *z == zero))
}

fn eigh_dense(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if is_diagonal(m) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re));
        let values = order.iter().map(|&i| m[(i, i)].re).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| {
            if i == order[j] {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        return HermitianEigen { values, vectors };
    }

    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// Eigendecomposition of a Hermitian graded matrix.
///
/// Exactly even inputs are split into their two diagonal blocks, so every
/// function of an even matrix comes back exactly even.
pub fn hermitian_eigen(a: &GradedMatrix) -> HermitianEigen {
    if !a.is_exactly_even() {
        return eigh_dense(a.entries());
    }
    let g = a.grading();
    let (nu, nl) = (g.upper_dim(), g.lower_dim());
    let upper = eigh_dense(&a.upper_block());
    let lower = eigh_dense(&a.lower_block());

    let mut tagged: Vec<(f64, usize, bool)> = upper
        .values
        .iter()
        .enumerate()
        .map(|(k, &w)| (w, k, true))
        .chain(lower.values.iter().enumerate().map(|(k, &w)| (w, k, false)))
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut vectors = CMatrix::zeros(g.dim(), g.dim());
    for (dst, &(_, k, is_upper)) in tagged.iter().enumerate() {
        if is_upper {
            vectors
                .view_mut((0, dst), (nu, 1))
                .copy_from(&upper.vectors.column(k));
        } else {
            vectors
                .view_mut((nu, dst), (nl, 1))
                .copy_from(&lower.vectors.column(k));
        }
    }
    HermitianEigen {
        values: tagged.iter().map(|t| t.0).collect(),
        vectors,
    }
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(a: &GradedMatrix) -> Vec<f64> {
    hermitian_eigen(a).values
}

/// f(A) for Hermitian `a` and real `f`.
pub fn apply_hermitian(a: &GradedMatrix, f: impl Fn(f64) -> f64) -> GradedMatrix {
    a.with_entries(hermitian_eigen(a).map(f))
}

pub fn spectral_gap(a: &GradedMatrix, gap_tol: f64) -> SpectralGapReport {
    let eig = hermitian_eigen(a);
    let min_abs = eig.min_abs();
    let is_definite = eig.values.is_empty()
        || eig.min() >= gap_tol
        || eig.max() <= -gap_tol;
    SpectralGapReport {
        min_abs_eigenvalue: if min_abs.is_finite() { min_abs } else { 0.0 },
        is_definite,
    }
}

fn check_hermitian(a: &GradedMatrix, tol: f64) -> Result<()> {
    let residual = a.hermiticity_residual();
    if residual > tol {
        return Err(FwError::NonHermitianInput { residual });
    }
    Ok(())
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
pub fn principal_sqrt(a: &GradedMatrix) -> Result<GradedMatrix> {
    check_hermitian(a, KERNEL_HERMITIAN_TOL)?;
    let eig = hermitian_eigen(a);
    if eig.min() < -PSD_SLACK * a.norm() {
        return Err(FwError::NotPositiveSemidefinite {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(a.with_entries(eig.map(|w| w.max(0.0).sqrt())))
}

/// A^{-1/2} with the default gap tolerance.
pub fn inv_sqrt(a: &GradedMatrix) -> Result<GradedMatrix> {
    inv_sqrt_with(a, DEFAULT_GAP_FACTOR)
}

/// A^{-1/2}; fails unless the smallest eigenvalue is at least
/// `gap_factor * ‖A‖_F`.
pub fn inv_sqrt_with(a: &GradedMatrix, gap_factor: f64) -> Result<GradedMatrix> {
    check_hermitian(a, KERNEL_HERMITIAN_TOL)?;
    let eig = hermitian_eigen(a);
    let gap_tol = gap_factor * a.norm();
    if eig.values.is_empty() || !(eig.min() >= gap_tol) {
        return Err(FwError::SingularOperand {
            min_eigenvalue: eig.min(),
            gap_tol,
        });
    }
    Ok(a.with_entries(eig.map(|w| 1.0 / w.sqrt())))
}

/// A^{-1} for Hermitian positive-definite `a`.
pub(crate) fn inv_positive(a: &GradedMatrix, gap_factor: f64) -> Result<GradedMatrix> {
    check_hermitian(a, KERNEL_HERMITIAN_TOL)?;
    let eig = hermitian_eigen(a);
    let gap_tol = gap_factor * a.norm();
    if eig.values.is_empty() || !(eig.min() >= gap_tol) {
        return Err(FwError::SingularOperand {
            min_eigenvalue: eig.min(),
            gap_tol,
        });
    }
    Ok(a.with_entries(eig.map(|w| 1.0 / w)))
}

/// λ = H (H²)^{-1/2} with the default gap tolerance.
pub fn sign_operator(h: &GradedMatrix) -> Result<GradedMatrix> {
    sign_operator_with(h, DEFAULT_GAP_FACTOR)
}

/// λ = H (H²)^{-1/2}. Fails with `SingularHamiltonian` when the smallest
/// eigenvalue of H² is below `gap_factor * ‖H²‖_F`.
pub fn sign_operator_with(h: &GradedMatrix, gap_factor: f64) -> Result<GradedMatrix> {
    check_hermitian(h, HERMITIAN_TOL)?;
    let h2 = (h * h).hermitian_part();
    let inv_root = inv_sqrt_with(&h2, gap_factor).map_err(|e| match e {
        FwError::SingularOperand {
            min_eigenvalue,
            gap_tol,
        } => FwError::SingularHamiltonian {
            min_eigenvalue,
            gap_tol,
        },
        other => other,
    })?;
    Ok((h * &inv_root).hermitian_part())
}

/// ‖U†U − I‖_F.
pub fn unitarity_residual(u: &GradedMatrix) -> f64 {
    (u.adjoint() * u).shift(-1.0).norm()
}

/// Hermitian S with U = exp(iS) and spectrum in (−π, π).
///
/// Works through the Cayley transform: A = i(I − U)(I + U)^{-1} is Hermitian
/// with eigenvalues tan(θ/2) for each eigenphase θ of U, so
/// S = 2·atan(A) on the principal branch.
pub fn unitary_log(u: &GradedMatrix) -> Result<GradedMatrix> {
    let residual = unitarity_residual(u);
    if !(residual <= UNITARY_TOL) {
        return Err(FwError::NotUnitary { residual });
    }
    let n = u.dim();
    let eye = CMatrix::identity(n, n);
    let plus = &eye + u.entries();
    let minus = &eye - u.entries();
    let Some(plus_inv) = plus.lu().try_inverse() else {
        return Err(FwError::BranchCutProximity {
            phase: std::f64::consts::PI,
        });
    };
    let cayley = (minus * plus_inv).map(|z| z * Complex64::new(0.0, 1.0));
    let cayley = u.with_entries(hermitize(&cayley));

    let eig = hermitian_eigen(&cayley);
    let phases: Vec<f64> = eig.values.iter().map(|t| 2.0 * t.atan()).collect();
    if let Some(&phase) = phases
        .iter()
        .find(|p| std::f64::consts::PI - p.abs() < BRANCH_CUT_MARGIN)
    {
        return Err(FwError::BranchCutProximity { phase });
    }
    Ok(u.with_entries(eig.map(|t| 2.0 * t.atan())))
}

/// exp(A) for any square A (nalgebra's Padé scaling and squaring).
pub fn matrix_exp(a: &GradedMatrix) -> GradedMatrix {
    a.with_entries(a.entries().exp())
}
