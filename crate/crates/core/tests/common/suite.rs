//! The seeded model suite shared by the acceptance and oracle tests.

use fwlab::models::{Model, ModelKind, ModelSpec, Potential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SuiteModel {
    pub label: String,
    pub spec: ModelSpec,
    pub model: Model,
}

fn round(x: f64) -> f64 {
    // Keep descriptors short and exactly reproducible in labels.
    (x * 1e4).round() / 1e4
}

/// 20 free-particle momenta, including rest and p = 0.75 along z.
pub fn free_particle_specs() -> Vec<ModelSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut specs = vec![
        ModelSpec::free_particle(1.0, [0.0, 0.0, 0.0]),
        ModelSpec::free_particle(1.0, [0.0, 0.0, 0.75]),
    ];
    while specs.len() < 20 {
        let mass = round(rng.random_range(0.5..2.0));
        let p = [0; 3].map(|_| round(rng.random_range(-2.0..2.0)));
        specs.push(ModelSpec::free_particle(mass, p));
    }
    specs
}

/// 10 lattice models with |V| < m/2 so that every one of them is gapped.
/// The first two have a zero and a constant potential and therefore commute.
pub fn lattice_specs() -> Vec<ModelSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut specs = Vec::new();
    for i in 0..10 {
        let sites = [8, 16, 32, 64][rng.random_range(0..4)];
        let half_width = round(rng.random_range(2.0..8.0));
        let mass = round(rng.random_range(0.5..2.0));
        let g = round(rng.random_range(-0.45..0.45) * mass);
        let potential = match i {
            0 => Potential::Zero,
            1 => Potential::Constant { value: g },
            _ => match rng.random_range(0..3) {
                0 => Potential::Gaussian {
                    strength: g,
                    width: round(rng.random_range(0.5..2.0)),
                },
                1 => Potential::Step {
                    strength: g,
                    edge: round(rng.random_range(-1.0..1.0)),
                },
                _ => Potential::Linear {
                    slope: round(g / half_width),
                },
            },
        };
        specs.push(ModelSpec::lattice(sites, half_width, mass, potential));
    }
    specs
}

/// 10 synthetic models with E a polynomial in O².
pub fn synthetic_specs() -> Vec<ModelSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    (0..10)
        .map(|i| {
            let sites = [4, 8, 16, 32][rng.random_range(0..4)];
            let mass = round(rng.random_range(0.5..2.0));
            let poly = vec![
                round(rng.random_range(-0.3..0.3) * mass),
                round(rng.random_range(-0.1..0.1)),
            ];
            ModelSpec::synthetic_commuting(sites, mass, poly, 1000 + i)
        })
        .collect()
}

pub fn all_specs() -> Vec<ModelSpec> {
    let mut specs = free_particle_specs();
    specs.extend(lattice_specs());
    specs.extend(synthetic_specs());
    specs
}

pub fn build_suite() -> Vec<SuiteModel> {
    all_specs()
        .into_iter()
        .map(|spec| {
            let model = spec.build().expect("suite model builds");
            SuiteModel {
                label: label(&spec),
                spec,
                model,
            }
        })
        .collect()
}

pub fn label(spec: &ModelSpec) -> String {
    let m = spec.mass;
    match &spec.model {
        ModelKind::FreeParticle { momentum: [x, y, z] } => format!("free m={m} p={x},{y},{z}"),
        ModelKind::Lattice1d { sites, half_width, potential } => {
            format!("lattice m={m} n={sites} L={half_width} {potential}")
        }
        ModelKind::SyntheticCommuting { sites, poly } => {
            format!("synthetic m={m} n={sites} poly={poly:?} seed={}", spec.seed.unwrap_or_default())
        }
        ModelKind::ExplicitMatrix { path } => format!("matrix m={m} {path}"),
    }
}
