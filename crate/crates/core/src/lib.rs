//! Hyers–Ulam stabilization of the Pexider equation in locally convex cones.
//!
//! * [`cone`] and [`instances`]: the cone contract and its concrete carriers.
//! * [`axioms`]: sampled verification of the cone laws.
//! * [`stabilizer`]: the order-theoretic engine, which never subtracts.
//! * [`normed`]: the seminorm engine for vector-space targets.
//! * [`harness`]: configs, perturbations, oracles and run reports.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod cone;
pub mod domain;
pub mod error;
pub mod ext;
pub mod harness;
pub mod instances;
pub mod normed;
pub mod search;
pub mod stabilizer;
pub mod value;

pub use cone::{ConeInstance, Element, Nbhd, Quantifier};
pub use domain::{Domain, Point, PointMap, Tabulation};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use value::{Interval, Value, VectorValue};
