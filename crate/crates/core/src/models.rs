//! Test Hamiltonians: the 3D free particle, a 1D two-component lattice Dirac
//! operator with a scalar potential, explicit matrices read from disk, and
//! random models whose even and odd parts commute.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dirac::{make_beta, split_even_odd, DiracDecomposition, Grading, GradedMatrix};
use crate::error::{FwError, Result};
use crate::harness::io;

/// A Hamiltonian together with its βm + E + O split.
#[derive(Clone, Debug)]
pub struct Model {
    pub hamiltonian: GradedMatrix,
    pub decomposition: DiracDecomposition,
}

impl Model {
    pub fn grading(&self) -> Grading {
        self.hamiltonian.grading()
    }

    pub fn mass(&self) -> f64 {
        self.decomposition.mass()
    }

    fn from_parts(decomposition: DiracDecomposition) -> Self {
        Model {
            hamiltonian: decomposition.hamiltonian(),
            decomposition,
        }
    }
}

/// Scalar potential on the lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    Constant { value: f64 },
    /// g·exp(−(x/width)²)
    Gaussian { strength: f64, width: f64 },
    /// g for x ≥ edge, 0 otherwise
    Step { strength: f64, edge: f64 },
    /// g·x
    Linear { slope: f64 },
    Tabulated { source: String, values: Vec<f64> },
}

impl Potential {
    /// Parses `zero`, `constant:c`, `gaussian:g,width`, `step:g,edge`,
    /// `linear:g` or `file:path`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let (name, params) = match descriptor.split_once(':') {
            Some((n, p)) => (n, p),
            None => (descriptor, ""),
        };
        if name == "file" {
            if params.is_empty() {
                return Err(FwError::InvalidModel("file: needs a path".into()));
            }
            return Ok(Potential::Tabulated {
                source: params.to_string(),
                values: io::load_tabulated_potential(Path::new(params))?,
            });
        }
        let nums: Vec<f64> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|p| {
                    p.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| FwError::InvalidModel(format!("bad potential parameter `{p}`")))
                })
                .collect::<Result<_>>()?
        };
        let arity = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(FwError::InvalidModel(format!(
                    "potential `{name}` takes {n} parameter(s), got {}",
                    nums.len()
                )))
            }
        };
        match name {
            "zero" => arity(0).map(|_| Potential::Zero),
            "constant" => arity(1).map(|_| Potential::Constant { value: nums[0] }),
            "gaussian" => {
                arity(2)?;
                if nums[1] <= 0.0 {
                    return Err(FwError::InvalidModel("gaussian width must be positive".into()));
                }
                Ok(Potential::Gaussian {
                    strength: nums[0],
                    width: nums[1],
                })
            }
            "step" => arity(2).map(|_| Potential::Step {
                strength: nums[0],
                edge: nums[1],
            }),
            "linear" => arity(1).map(|_| Potential::Linear { slope: nums[0] }),
            other => Err(FwError::InvalidModel(format!("unknown potential `{other}`"))),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            Potential::Zero => vec![0.0; x.len()],
            Potential::Constant { value } => vec![*value; x.len()],
            Potential::Gaussian { strength, width } => x
                .iter()
                .map(|xi| strength * (-(xi / width).powi(2)).exp())
                .collect(),
            Potential::Step { strength, edge } => x
                .iter()
                .map(|xi| if *xi >= *edge { *strength } else { 0.0 })
                .collect(),
            Potential::Linear { slope } => x.iter().map(|xi| slope * xi).collect(),
            Potential::Tabulated { values, source } => {
                if values.len() != x.len() {
                    return Err(FwError::InvalidModel(format!(
                        "tabulated potential `{source}` has {} values for {} sites",
                        values.len(),
                        x.len()
                    )));
                }
                values.clone()
            }
        })
    }

    /// Overall strength g, for potentials that have one.
    pub fn strength(&self) -> Option<f64> {
        match self {
            Potential::Constant { value } => Some(*value),
            Potential::Gaussian { strength, .. } | Potential::Step { strength, .. } => Some(*strength),
            Potential::Linear { slope } => Some(*slope),
            Potential::Zero | Potential::Tabulated { .. } => None,
        }
    }

    pub fn with_strength(&self, g: f64) -> Result<Self> {
        let mut out = self.clone();
        match &mut out {
            Potential::Constant { value } => *value = g,
            Potential::Gaussian { strength, .. } | Potential::Step { strength, .. } => *strength = g,
            Potential::Linear { slope } => *slope = g,
            Potential::Zero | Potential::Tabulated { .. } => {
                return Err(FwError::InvalidModel(format!(
                    "potential `{self}` has no strength parameter"
                )))
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "zero"),
            Potential::Constant { value } => write!(f, "constant:{value}"),
            Potential::Gaussian { strength, width } => write!(f, "gaussian:{strength},{width}"),
            Potential::Step { strength, edge } => write!(f, "step:{strength},{edge}"),
            Potential::Linear { slope } => write!(f, "linear:{slope}"),
            Potential::Tabulated { source, .. } => write!(f, "file:{source}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    FreeParticle {
        momentum: [f64; 3],
    },
    Lattice1d {
        sites: usize,
        half_width: f64,
        potential: Potential,
    },
    ExplicitMatrix {
        path: String,
    },
    SyntheticCommuting {
        sites: usize,
        poly: Vec<f64>,
    },
}

/// Declarative description of a test Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub mass: f64,
    pub model: ModelKind,
    pub seed: Option<u64>,
}

impl ModelSpec {
    pub fn free_particle(mass: f64, momentum: [f64; 3]) -> Self {
        ModelSpec {
            mass,
            model: ModelKind::FreeParticle { momentum },
            seed: None,
        }
    }

    pub fn lattice(sites: usize, half_width: f64, mass: f64, potential: Potential) -> Self {
        ModelSpec {
            mass,
            model: ModelKind::Lattice1d {
                sites,
                half_width,
                potential,
            },
            seed: None,
        }
    }

    pub fn synthetic_commuting(sites: usize, mass: f64, poly: Vec<f64>, seed: u64) -> Self {
        ModelSpec {
            mass,
            model: ModelKind::SyntheticCommuting { sites, poly },
            seed: Some(seed),
        }
    }

    pub fn explicit(path: impl Into<String>, mass: f64) -> Self {
        ModelSpec {
            mass,
            model: ModelKind::ExplicitMatrix { path: path.into() },
            seed: None,
        }
    }

    pub fn build(&self) -> Result<Model> {
        match &self.model {
            ModelKind::FreeParticle { momentum } => build_free_particle(self.mass, *momentum),
            ModelKind::Lattice1d {
                sites,
                half_width,
                potential,
            } => build_lattice_1d(*sites, *half_width, self.mass, potential),
            ModelKind::ExplicitMatrix { path } => {
                let h = io::load_explicit_matrix(path)?;
                let decomposition = split_even_odd(&h, self.mass)?;
                Ok(Model {
                    hamiltonian: h,
                    decomposition,
                })
            }
            ModelKind::SyntheticCommuting { sites, poly } => {
                build_synthetic_commuting(*sites, self.mass, poly, self.seed.unwrap_or(0))
            }
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices σ₁, σ₂, σ₃.
fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        0 => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        1 => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        2 => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        _ => unreachable!("Pauli index out of range"),
    }
}

/// α_k = [[0, σ_k], [σ_k, 0]] in the Dirac representation (k = 0, 1, 2).
pub fn dirac_alpha(k: usize) -> GradedMatrix {
    let sigma = pauli(k);
    GradedMatrix::from_fn(Grading::equal_blocks(2), |i, j| {
        if (i < 2) != (j < 2) {
            sigma[i % 2][j % 2]
        } else {
            c(0., 0.)
        }
    })
}

/// H = βm + α·p, 4×4.
pub fn build_free_particle(mass: f64, momentum: [f64; 3]) -> Result<Model> {
    if momentum.iter().any(|p| !p.is_finite()) {
        return Err(FwError::InvalidModel("momentum must be finite".into()));
    }
    let g = Grading::equal_blocks(2);
    let mut odd = GradedMatrix::zeros(g);
    for (k, &p) in momentum.iter().enumerate() {
        odd = &odd + &dirac_alpha(k).scale(p);
    }
    DiracDecomposition::new(mass, GradedMatrix::zeros(g), odd).map(Model::from_parts)
}

/// Grid points x_j = −L + (j + ½)·2L/n.
pub fn lattice_grid(n: usize, half_width: f64) -> Vec<f64> {
    let dx = 2.0 * half_width / n as f64;
    (0..n).map(|j| -half_width + (j as f64 + 0.5) * dx).collect()
}

/// Two-component lattice Dirac operator on `n` periodic sites.
///
/// The basis is all upper components followed by all lower components, so
/// β = diag(I_n, −I_n). The kinetic term couples the two blocks through the
/// central-difference momentum p = −i(ψ_{j+1} − ψ_{j−1})/(2dx); the potential
/// enters the even part as diag(V, V).
pub fn build_lattice_1d(n: usize, half_width: f64, mass: f64, potential: &Potential) -> Result<Model> {
    if n < 4 || n % 2 != 0 {
        return Err(FwError::InvalidGrid(format!("site count must be even and at least 4, got {n}")));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(FwError::InvalidGrid(format!("half-width must be positive, got {half_width}")));
    }
    let x = lattice_grid(n, half_width);
    let v = potential.evaluate(&x)?;
    let dx = 2.0 * half_width / n as f64;
    let hop = 1.0 / (2.0 * dx);
    let g = Grading::equal_blocks(n);

    let odd = GradedMatrix::from_fn(g, |i, j| {
        if (i < n) == (j < n) {
            return c(0., 0.);
        }
        let (si, sj) = (i % n, j % n);
        if sj == (si + 1) % n {
            c(0., -hop)
        } else if sj == (si + n - 1) % n {
            c(0., hop)
        } else {
            c(0., 0.)
        }
    });
    let even = GradedMatrix::from_fn(g, |i, j| if i == j { c(v[i % n], 0.) } else { c(0., 0.) });
    DiracDecomposition::new(mass, even, odd).map(Model::from_parts)
}

/// Random Hermitian odd O (seeded) with E = Σ_k poly[k]·(O²)^k, so [E, O] = 0.
pub fn build_synthetic_commuting(n: usize, mass: f64, poly: &[f64], seed: u64) -> Result<Model> {
    if n < 2 {
        return Err(FwError::InvalidModel(format!("synthetic models need at least 2 sites, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let block: Vec<Complex64> = (0..n * n)
        .map(|_| c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)) * scale)
        .collect();
    let g = Grading::equal_blocks(n);
    let odd = GradedMatrix::from_fn(g, |i, j| match (i < n, j < n) {
        (true, false) => block[i * n + (j - n)],
        (false, true) => block[j * n + (i - n)].conj(),
        _ => c(0., 0.),
    });

    let odd_sq = (&odd * &odd).hermitian_part();
    let mut power = GradedMatrix::identity(g);
    let mut even = GradedMatrix::zeros(g);
    for &coeff in poly {
        even = &even + &power.scale(coeff);
        power = &power * &odd_sq;
    }
    DiracDecomposition::new(mass, even.hermitian_part(), odd).map(Model::from_parts)
}

/// β·m as a standalone model, handy for trivial checks.
pub fn mass_only(grading: Grading, mass: f64) -> Result<Model> {
    split_even_odd(&make_beta(grading).scale(mass), mass).map(|decomposition| Model {
        hamiltonian: decomposition.hamiltonian(),
        decomposition,
    })
}
