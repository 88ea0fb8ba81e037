//! Graded matrices and the even/odd calculus around the grading operator β.
//!
//! Every operator in this crate lives on a space split into an upper block
//! (β = +1) followed by a lower block (β = −1). An operator is *even* when it
//! commutes with β (block-diagonal) and *odd* when it anticommutes with β
//! (block-off-diagonal).

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FwError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Absolute floor used whenever a residual is normalized by a norm.
pub const NORM_FLOOR: f64 = 1e-300;

/// Relative Hermiticity tolerance applied to Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// `num / max(den, NORM_FLOOR)`.
#[inline]
pub fn relative(num: f64, den: f64) -> f64 {
    num / den.max(NORM_FLOOR)
}

/// Block structure of the grading operator β = diag(+I, −I).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grading {
    dim: usize,
    upper_dim: usize,
}

impl Grading {
    /// Only equal blocks are accepted: `dim == 2 * upper_dim`, `upper_dim > 0`.
    pub fn new(dim: usize, upper_dim: usize) -> Result<Self> {
        if upper_dim == 0 || dim != 2 * upper_dim {
            return Err(FwError::InvalidGrading { dim, upper_dim });
        }
        Ok(Grading { dim, upper_dim })
    }

    /// Grading with two blocks of size `half`.
    ///
    /// Panics if `half == 0`.
    pub fn equal_blocks(half: usize) -> Self {
        assert!(half > 0, "grading blocks must be nonempty");
        Grading {
            dim: 2 * half,
            upper_dim: half,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper_dim(&self) -> usize {
        self.upper_dim
    }

    pub fn lower_dim(&self) -> usize {
        self.dim - self.upper_dim
    }

    /// Diagonal entry of β at index `i`.
    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.upper_dim {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    fn same_block(&self, i: usize, j: usize) -> bool {
        (i < self.upper_dim) == (j < self.upper_dim)
    }
}

/// A dense complex square matrix tagged with the grading it lives under.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    grading: Grading,
    entries: CMatrix,
}

impl GradedMatrix {
    pub fn new(grading: Grading, entries: CMatrix) -> Result<Self> {
        if entries.nrows() != grading.dim() {
            return Err(FwError::DimensionMismatch {
                expected: grading.dim(),
                found: entries.nrows(),
            });
        }
        if entries.ncols() != grading.dim() {
            return Err(FwError::DimensionMismatch {
                expected: grading.dim(),
                found: entries.ncols(),
            });
        }
        Ok(GradedMatrix { grading, entries })
    }

    pub fn zeros(grading: Grading) -> Self {
        GradedMatrix {
            grading,
            entries: CMatrix::zeros(grading.dim(), grading.dim()),
        }
    }

    pub fn identity(grading: Grading) -> Self {
        GradedMatrix {
            grading,
            entries: CMatrix::identity(grading.dim(), grading.dim()),
        }
    }

    pub fn from_fn(grading: Grading, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        GradedMatrix {
            grading,
            entries: CMatrix::from_fn(grading.dim(), grading.dim(), f),
        }
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(grading: Grading, diag: &[f64]) -> Result<Self> {
        if diag.len() != grading.dim() {
            return Err(FwError::DimensionMismatch {
                expected: grading.dim(),
                found: diag.len(),
            });
        }
        Ok(GradedMatrix::from_fn(grading, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn dim(&self) -> usize {
        self.grading.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// Same grading, new entries. Panics on a shape mismatch.
    pub(crate) fn with_entries(&self, entries: CMatrix) -> Self {
        assert_eq!(entries.shape(), self.entries.shape());
        GradedMatrix {
            grading: self.grading,
            entries,
        }
    }

    pub fn adjoint(&self) -> Self {
        self.with_entries(self.entries.adjoint())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.with_entries(self.entries.map(|z| z * factor))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        self.with_entries(self.entries.map(|z| z * factor))
    }

    /// `self + shift * I`.
    pub fn shift(&self, shift: f64) -> Self {
        let mut out = self.entries.clone();
        for i in 0..self.dim() {
            out[(i, i)] += shift;
        }
        self.with_entries(out)
    }

    /// ½(A + A†).
    pub fn hermitian_part(&self) -> Self {
        let adj = self.entries.adjoint();
        self.with_entries((&self.entries + adj).map(|z| z * 0.5))
    }

    /// ‖A − A†‖_F / ‖A‖_F.
    pub fn hermiticity_residual(&self) -> f64 {
        relative(
            (&self.entries - self.entries.adjoint()).norm(),
            self.entries.norm(),
        )
    }

    /// βAβ; flips the sign of the off-diagonal blocks exactly.
    pub fn beta_conjugate(&self) -> Self {
        let g = self.grading;
        self.with_entries(CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if g.same_block(i, j) {
                self.entries[(i, j)]
            } else {
                -self.entries[(i, j)]
            }
        }))
    }

    /// ½(A + βAβ).
    pub fn even_part(&self) -> Self {
        let conj = self.beta_conjugate();
        self.with_entries((&self.entries + conj.entries).map(|z| z * 0.5))
    }

    /// ½(A − βAβ).
    pub fn odd_part(&self) -> Self {
        let conj = self.beta_conjugate();
        self.with_entries((&self.entries - conj.entries).map(|z| z * 0.5))
    }

    /// True if every off-diagonal block entry is exactly zero.
    pub fn is_exactly_even(&self) -> bool {
        let g = self.grading;
        (0..self.dim()).all(|j| {
            (0..self.dim()).all(|i| g.same_block(i, j) || self.entries[(i, j)] == Complex64::new(0.0, 0.0))
        })
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, other: &GradedMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    /// {A, B} = AB + BA.
    pub fn anticommutator(&self, other: &GradedMatrix) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        if psi.len() != self.dim() {
            return Err(FwError::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        Ok(&self.entries * psi)
    }

    /// ‖A − B‖_F / ‖B‖_F.
    pub fn relative_distance(&self, reference: &GradedMatrix) -> f64 {
        relative((self - reference).norm(), reference.norm())
    }

    /// Upper-left (β = +1) block.
    pub fn upper_block(&self) -> CMatrix {
        let n = self.grading.upper_dim();
        self.entries.view((0, 0), (n, n)).into_owned()
    }

    /// Lower-right (β = −1) block.
    pub fn lower_block(&self) -> CMatrix {
        let n = self.grading.upper_dim();
        let l = self.grading.lower_dim();
        self.entries.view((n, n), (l, l)).into_owned()
    }
}

fn check_same_grading(a: &GradedMatrix, b: &GradedMatrix) {
    assert_eq!(a.grading, b.grading, "graded matrices must share a grading");
}

impl<'a> Add<&'a GradedMatrix> for &'a GradedMatrix {
    type Output = GradedMatrix;
    fn add(self, rhs: &'a GradedMatrix) -> GradedMatrix {
        check_same_grading(self, rhs);
        self.with_entries(&self.entries + &rhs.entries)
    }
}

impl<'a> Sub<&'a GradedMatrix> for &'a GradedMatrix {
    type Output = GradedMatrix;
    fn sub(self, rhs: &'a GradedMatrix) -> GradedMatrix {
        check_same_grading(self, rhs);
        self.with_entries(&self.entries - &rhs.entries)
    }
}

impl<'a> Mul<&'a GradedMatrix> for &'a GradedMatrix {
    type Output = GradedMatrix;
    fn mul(self, rhs: &'a GradedMatrix) -> GradedMatrix {
        check_same_grading(self, rhs);
        self.with_entries(&self.entries * &rhs.entries)
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<GradedMatrix> for GradedMatrix {
            type Output = GradedMatrix;
            fn $method(self, rhs: GradedMatrix) -> GradedMatrix {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a GradedMatrix> for GradedMatrix {
            type Output = GradedMatrix;
            fn $method(self, rhs: &'a GradedMatrix) -> GradedMatrix {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<GradedMatrix> for &'a GradedMatrix {
            type Output = GradedMatrix;
            fn $method(self, rhs: GradedMatrix) -> GradedMatrix {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for &GradedMatrix {
    type Output = GradedMatrix;
    fn neg(self) -> GradedMatrix {
        self.with_entries(-&self.entries)
    }
}

/// β = diag(+1, …, +1, −1, …, −1).
pub fn make_beta(grading: Grading) -> GradedMatrix {
    GradedMatrix::from_fn(grading, |i, j| {
        if i == j {
            Complex64::new(grading.sign(i), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// ‖½(H − βHβ)‖_F / ‖H‖_F; zero exactly when `h` is block-diagonal.
pub fn odd_norm_ratio(h: &GradedMatrix) -> f64 {
    relative(h.odd_part().norm(), h.norm())
}

/// A Hamiltonian written as βm + E + O with E even and O odd.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracDecomposition {
    mass: f64,
    even: GradedMatrix,
    odd: GradedMatrix,
}

impl DiracDecomposition {
    /// Builds the decomposition from explicit parts. The parts are projected
    /// onto their blocks, so evenness of `even` and oddness of `odd` hold
    /// exactly; any entries outside those blocks are rejected.
    pub fn new(mass: f64, even: GradedMatrix, odd: GradedMatrix) -> Result<Self> {
        check_mass(mass)?;
        if even.grading() != odd.grading() {
            return Err(FwError::DimensionMismatch {
                expected: even.dim(),
                found: odd.dim(),
            });
        }
        let stray = even.odd_part().norm() + odd.even_part().norm();
        if stray > 0.0 {
            return Err(FwError::InvalidModel(format!(
                "even/odd parts carry {stray:e} weight in the wrong blocks"
            )));
        }
        for part in [&even, &odd] {
            let residual = part.hermiticity_residual();
            if residual > HERMITIAN_TOL {
                return Err(FwError::NonHermitianInput { residual });
            }
        }
        Ok(DiracDecomposition { mass, even, odd })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn grading(&self) -> Grading {
        self.even.grading()
    }

    /// E.
    pub fn even_part(&self) -> &GradedMatrix {
        &self.even
    }

    /// O.
    pub fn odd_part(&self) -> &GradedMatrix {
        &self.odd
    }

    /// βm.
    pub fn mass_term(&self) -> GradedMatrix {
        make_beta(self.grading()).scale(self.mass)
    }

    /// βm + O.
    pub fn mass_plus_odd(&self) -> GradedMatrix {
        &self.mass_term() + &self.odd
    }

    /// βm + E + O.
    pub fn hamiltonian(&self) -> GradedMatrix {
        &(&self.mass_term() + &self.even) + &self.odd
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(FwError::InvalidModel(format!("mass must be positive, got {mass}")));
    }
    Ok(())
}

/// Splits `h` into βm + E + O with X = H − βm, E = ½(X + βXβ), O = ½(X − βXβ).
pub fn split_even_odd(h: &GradedMatrix, mass: f64) -> Result<DiracDecomposition> {
    check_mass(mass)?;
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(FwError::NonHermitianInput { residual });
    }
    let x = h - &make_beta(h.grading()).scale(mass);
    Ok(DiracDecomposition {
        mass,
        even: x.even_part(),
        odd: x.odd_part(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 4×4 α₁ and α₃ in the Dirac representation.
    fn alpha(k: usize) -> GradedMatrix {
        let g = Grading::equal_blocks(2);
        let sigma = match k {
            1 => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            3 => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
            _ => unreachable!(),
        };
        GradedMatrix::from_fn(g, |i, j| {
            if (i < 2) != (j < 2) {
                sigma[i % 2][j % 2]
            } else {
                c(0., 0.)
            }
        })
    }

    #[test]
    fn beta_matches_definition() {
        let b = make_beta(Grading::new(4, 2).unwrap());
        let diag: Vec<f64> = (0..4).map(|i| b.entries()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(b.hermiticity_residual(), 0.0);

        let b2 = make_beta(Grading::new(2, 1).unwrap());
        assert_eq!(b2.entries()[(0, 0)].re, 1.0);
        assert_eq!(b2.entries()[(1, 1)].re, -1.0);

        let b8 = make_beta(Grading::equal_blocks(4));
        assert_eq!(&b8 * &b8, GradedMatrix::identity(Grading::equal_blocks(4)));
    }

    #[test]
    fn unequal_gradings_are_rejected() {
        assert!(Grading::new(4, 1).is_err());
        assert!(Grading::new(3, 1).is_err());
        assert!(Grading::new(0, 0).is_err());
    }

    #[test]
    fn pure_mass_term_has_no_even_or_odd_part() {
        let g = Grading::equal_blocks(2);
        let h = make_beta(g);
        let d = split_even_odd(&h, 1.0).unwrap();
        assert_eq!(d.even_part().norm(), 0.0);
        assert_eq!(d.odd_part().norm(), 0.0);
    }

    #[test]
    fn free_particle_split() {
        let g = Grading::equal_blocks(2);
        let h = &make_beta(g) + &alpha(3).scale(0.75);
        let d = split_even_odd(&h, 1.0).unwrap();
        assert_eq!(d.even_part().norm(), 0.0);
        assert_eq!(d.odd_part(), &alpha(3).scale(0.75));
        assert!(d.hamiltonian().relative_distance(&h) <= 1e-14);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let g = Grading::equal_blocks(1);
        let h = GradedMatrix::from_fn(g, |i, j| if i == 0 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(matches!(
            split_even_odd(&h, 1.0),
            Err(FwError::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn odd_norm_ratio_limits() {
        let g = Grading::equal_blocks(2);
        assert_eq!(odd_norm_ratio(&make_beta(g)), 0.0);
        assert_eq!(odd_norm_ratio(&alpha(1)), 1.0);
        assert_eq!(odd_norm_ratio(&GradedMatrix::zeros(g)), 0.0);
    }

    #[test]
    fn free_particle_odd_ratio_by_hand() {
        // ‖β‖_F = 2, ‖0.75 α₃‖_F = 1.5, and the two are orthogonal in the
        // Frobenius inner product, so the ratio is 1.5 / √(4 + 2.25) = 0.6.
        let h = &make_beta(Grading::equal_blocks(2)) + &alpha(3).scale(0.75);
        assert!((odd_norm_ratio(&h) - 0.6).abs() <= 1e-15);
    }

    #[test]
    fn decomposition_rejects_misplaced_blocks() {
        let g = Grading::equal_blocks(2);
        assert!(DiracDecomposition::new(1.0, alpha(1), alpha(1)).is_err());
        assert!(DiracDecomposition::new(-1.0, GradedMatrix::zeros(g), alpha(1)).is_err());
        assert!(DiracDecomposition::new(1.0, GradedMatrix::zeros(g), alpha(1)).is_ok());
    }

    #[test]
    fn apply_checks_dimension() {
        let g = Grading::equal_blocks(2);
        let psi = CVector::from_element(3, c(1.0, 0.0));
        assert!(matches!(
            GradedMatrix::identity(g).apply(&psi),
            Err(FwError::DimensionMismatch { expected: 4, found: 3 })
        ));
    }
}
