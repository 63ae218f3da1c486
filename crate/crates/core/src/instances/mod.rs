//! Concrete locally convex cones.

mod ext_reals;
mod interval;
mod vector_uc;

pub use ext_reals::ExtendedReals;
pub use interval::IntervalCone;
pub use vector_uc::{NormKind, VectorUc};

use crate::cone::ConeInstance;
use crate::error::{Error, Result};

pub fn make_extended_reals(nonneg: bool) -> ConeInstance {
    ConeInstance::new(ExtendedReals::new(nonneg))
}

pub fn make_vector_uc(dim: usize, norm: NormKind) -> Result<ConeInstance> {
    VectorUc::new(dim, norm)
        .map(ConeInstance::new)
        .ok_or_else(|| Error::InvalidConfig("vector dimension must be at least 1".into()))
}

pub fn make_interval_cone() -> ConeInstance {
    ConeInstance::new(IntervalCone)
}

/// Builds an instance from its configuration name: `ext-reals`,
/// `ext-reals-nonneg`, `vector-uc:<d>:<sup|euclidean>` or `intervals`.
pub fn from_name(name: &str) -> Result<ConeInstance> {
    match name.trim() {
        "ext-reals" => Ok(make_extended_reals(false)),
        "ext-reals-nonneg" => Ok(make_extended_reals(true)),
        "intervals" => Ok(make_interval_cone()),
        other => {
            let mut parts = other.split(':');
            if parts.next() != Some("vector-uc") {
                return Err(Error::UnknownInstance(other.to_owned()));
            }
            let dim = parts
                .next()
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| Error::UnknownInstance(other.to_owned()))?;
            let norm = match parts.next() {
                None | Some("sup") => NormKind::Sup,
                Some("euclidean") => NormKind::Euclidean,
                Some(_) => return Err(Error::UnknownInstance(other.to_owned())),
            };
            if parts.next().is_some() {
                return Err(Error::UnknownInstance(other.to_owned()));
            }
            make_vector_uc(dim, norm)
        }
    }
}

/// Names of the shipped instances, one per carrier kind.
pub const SHIPPED: [&str; 4] = ["ext-reals", "ext-reals-nonneg", "vector-uc:3:sup", "intervals"];
