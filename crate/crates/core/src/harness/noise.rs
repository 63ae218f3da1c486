//! Bounded, seeded perturbations of additive base maps.

use serde::{Deserialize, Serialize};

use crate::cone::{CarrierKind, ConeInstance};
use crate::domain::{Point, PointMap};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::value::{Interval, Value, VectorValue};

use super::config::BaseMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    #[default]
    None,
    BoundedSin,
    BoundedHash,
    AdversarialStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub kind: NoiseKind,
    /// Pointwise bound `ε₀` on every perturbation.
    #[serde(default)]
    pub magnitude: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            magnitude: 0.0,
            seed: 0,
        }
    }
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, magnitude: f64, seed: u64) -> Self {
        NoiseSpec { kind, magnitude, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude >= 0.0) || !self.magnitude.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "noise magnitude must be finite and nonnegative, got {}",
                self.magnitude
            )));
        }
        Ok(())
    }

    /// Unit-range noise `u ∈ [-1, 1]` for one `(stream, coordinate)` at `x`,
    /// with `u(0) = 0`.
    pub fn unit(&self, stream: u64, coordinate: u64, x: &Point) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let key = mix(mix(self.seed, stream), coordinate);
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::BoundedHash => {
                let h = x.coords().iter().fold(key, |acc, c| mix(acc, c.to_bits()));
                to_unit(splitmix64(h))
            }
            NoiseKind::BoundedSin => {
                let phase = to_unit(splitmix64(key)) * std::f64::consts::PI;
                let freq = 1.0 + (splitmix64(key ^ 0x5bd1_e995) % 7) as f64 / 3.0;
                (phase + freq * x.total()).sin()
            }
            NoiseKind::AdversarialStep => {
                // f rises where g and h fall, so the residual reaches 3ε₀
                let sign = if stream == STREAM_F { 1.0 } else { -1.0 };
                if x.total() >= 1.0 {
                    sign
                } else {
                    -sign
                }
            }
        }
    }
}

pub const STREAM_F: u64 = 0;
pub const STREAM_G: u64 = 1;
pub const STREAM_H: u64 = 2;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(acc: u64, word: u64) -> u64 {
    splitmix64(acc ^ word.rotate_left(17))
}

/// Top 53 bits to `[-1, 1]`.
fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// The unperturbed additive map.
pub fn base_map(target: &ConeInstance, base: &BaseMap) -> PointMap {
    perturbed(target, base, NoiseSpec::default(), STREAM_F)
}

/// `(f, g, h) = (base + p_f, base + p_g, base + p_h)` with every `|p| <= ε₀`
/// in the target's gap measure and `p(0) = 0`. The residual
/// `f(x+y) - g(x) - h(y)` is then within `3ε₀` pointwise.
pub fn perturb(target: &ConeInstance, base: &BaseMap, noise: NoiseSpec) -> (PointMap, PointMap, PointMap) {
    (
        perturbed(target, base, noise, STREAM_F),
        perturbed(target, base, noise, STREAM_G),
        perturbed(target, base, noise, STREAM_H),
    )
}

/// Warning text when `v` may be too small for the noise to satisfy the
/// hypothesis.
pub fn magnitude_warning(noise: &NoiseSpec, v_scale: f64) -> Option<String> {
    (noise.kind != NoiseKind::None && v_scale < 3.0 * noise.magnitude).then(|| {
        format!(
            "v-scale {v_scale} is below 3·ε₀ = {}; the hypothesis may fail",
            3.0 * noise.magnitude
        )
    })
}

fn perturbed(target: &ConeInstance, base: &BaseMap, noise: NoiseSpec, stream: u64) -> PointMap {
    let base = base.clone();
    let kind = target.kind();
    let dim = target.zero().value().as_vector().map_or(1, |v| v.coords.len());
    let per_coordinate = match (kind, target.name().ends_with("euclidean")) {
        (CarrierKind::Vector, true) => noise.magnitude / (dim as f64).sqrt(),
        _ => noise.magnitude,
    };
    PointMap::new(move |x| {
        let p = |j: usize| per_coordinate * noise.unit(stream, j as u64, x);
        match kind {
            CarrierKind::ExtendedReal => Value::Ext(ExtReal::Finite(linear(&base, x, 0) + p(0))),
            // nonnegative targets take one-sided noise in [0, ε₀]
            CarrierKind::NonnegativeExtendedReal => {
                let shift = 0.5 * (per_coordinate + p(0));
                Value::Ext(ExtReal::Finite(linear(&base, x, 0) + if x.is_zero() { 0.0 } else { shift }))
            }
            CarrierKind::Vector => Value::Vector(VectorValue::point(
                (0..dim).map(|j| linear(&base, x, j) + p(j)).collect(),
            )),
            CarrierKind::Interval => {
                let (lo, hi) = interval(&base, x);
                let s = p(0);
                Value::Interval(Interval { lo: lo + s, hi: hi + s })
            }
        }
    })
}

/// Row `row` of the linear base at `x`.
fn linear(base: &BaseMap, x: &Point, row: usize) -> f64 {
    match base {
        BaseMap::Coefficient(c) => c * x.total(),
        BaseMap::Matrix(m) => m[row].iter().zip(x.coords()).map(|(a, b)| a * b).sum(),
        BaseMap::Interval(coeffs) => coeffs.iter().zip(x.coords()).map(|(c, b)| 0.5 * (c[0] + c[1]) * b).sum(),
    }
}

fn interval(base: &BaseMap, x: &Point) -> (f64, f64) {
    match base {
        BaseMap::Interval(coeffs) => coeffs
            .iter()
            .zip(x.coords())
            .fold((0.0, 0.0), |(lo, hi), (c, b)| (lo + c[0] * b, hi + c[1] * b)),
        other => {
            let v = linear(other, x, 0);
            (v, v)
        }
    }
}
