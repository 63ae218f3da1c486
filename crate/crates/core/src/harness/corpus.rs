//! Seeded corpus of valid experiment configs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ext::ExtReal;

use super::config::{BaseMap, Engine, ExperimentConfig, GridSpec};
use super::noise::{NoiseKind, NoiseSpec};

pub const CORPUS_SEED: u64 = 0x00c0_ffee;
pub const CORPUS_SIZE: usize = 50;
pub const CORPUS_DEPTH: u32 = 24;

const INSTANCES: [&str; 8] = [
    "ext-reals",
    "ext-reals",
    "ext-reals-nonneg",
    "vector-uc:1:sup",
    "ext-reals",
    "vector-uc:3:sup",
    "intervals",
    "vector-uc:2:euclidean",
];

const NOISE: [NoiseKind; 4] = [
    NoiseKind::BoundedHash,
    NoiseKind::BoundedSin,
    NoiseKind::AdversarialStep,
    NoiseKind::None,
];

/// `count` configs with residuals inside `v` by construction, at fixed depth
/// [`CORPUS_DEPTH`].
pub fn corpus(seed: u64, count: usize) -> Vec<ExperimentConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| entry(&mut rng, i)).collect()
}

/// The standard corpus.
pub fn standard_corpus() -> Vec<ExperimentConfig> {
    corpus(CORPUS_SEED, CORPUS_SIZE)
}

fn entry(rng: &mut ChaCha8Rng, i: usize) -> ExperimentConfig {
    let name = INSTANCES[i % INSTANCES.len()];
    let vector_dim = name
        .strip_prefix("vector-uc:")
        .and_then(|rest| rest.split(':').next())
        .and_then(|d| d.parse::<usize>().ok());
    let dimension = if rng.random_bool(0.3) { 2 } else { 1 };
    let v_scale = [0.5, 1.0, 2.0][rng.random_range(0..3)];
    let noise = NoiseSpec::new(
        NOISE[(i / INSTANCES.len() + i) % NOISE.len()],
        v_scale * rng.random_range(0.1..=1.0) / 3.0,
        rng.random(),
    );
    let mut coefficient = || {
        let c: f64 = rng.random_range(-4.0..4.0);
        if name == "ext-reals-nonneg" {
            c.abs()
        } else {
            c
        }
    };
    let base_map = match (vector_dim, name) {
        (Some(d), _) => BaseMap::Matrix((0..d).map(|_| (0..dimension).map(|_| coefficient()).collect()).collect()),
        (None, "intervals") => BaseMap::Interval(
            (0..dimension)
                .map(|_| {
                    let (a, b) = (coefficient(), coefficient());
                    [a.min(b), a.max(b)]
                })
                .collect(),
        ),
        (None, _) => BaseMap::Coefficient(coefficient()),
    };
    let f_at_zero = (name == "ext-reals" && rng.random_bool(0.4)).then(|| ExtReal::Finite(v_scale * rng.random_range(-1.0..=1.0)));
    ExperimentConfig {
        base_map,
        noise,
        v_scale,
        depth: CORPUS_DEPTH,
        fixed_depth: true,
        domain: GridSpec {
            count: rng.random_range(4..=8),
            spacing: [0.25, 0.375, 0.5, 1.0][rng.random_range(0..4)],
            dimension,
        },
        engine: if vector_dim.is_some() { Engine::Both } else { Engine::Cone },
        f_at_zero,
        ..ExperimentConfig::new(name, BaseMap::Coefficient(0.0))
    }
}
