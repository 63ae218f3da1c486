//! Sampled source domain: points of the nonnegative cone `R₊^k`, maps out of
//! it, and tabulations of maps over it.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::cone::{ConeInstance, Element};
use crate::error::{Error, Result};
use crate::value::Value;

/// A point of the source cone: finite, nonnegative coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

/// Bitwise identity of a point (`-0.0` folded into `0.0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointKey(Vec<u64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDomain("point has no coordinates".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidDomain(format!(
                "coordinate {c} is not a finite nonnegative number"
            )));
        }
        Ok(Point(coords.into_iter().map(|c| c + 0.0).collect()))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn zero(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Sum of coordinates.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `lambda · self` for `lambda >= 0`.
    pub fn scale(&self, lambda: f64) -> Point {
        debug_assert!(lambda >= 0.0);
        Point(self.0.iter().map(|c| lambda * c + 0.0).collect())
    }

    /// `2^n · self`, exact in binary floating point.
    pub fn doubled(&self, n: u32) -> Point {
        self.scale(pow2(n as i32))
    }

    pub fn key(&self) -> PointKey {
        PointKey(self.0.iter().map(|c| (c + 0.0).to_bits()).collect())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `2^n` as an exact float.
pub fn pow2(n: i32) -> f64 {
    2f64.powi(n)
}

/// Finite sample of the source cone, closed under doubling to `depth`.
///
/// Pairwise sums of base points are always evaluable; membership checks
/// apply to the points the engines iterate from.
#[derive(Debug, Clone)]
pub struct Domain {
    points: Vec<Point>,
    depth: u32,
    /// Least doubling level at which each key appears.
    levels: HashMap<PointKey, u32>,
}

impl Domain {
    /// Requires a nonempty list of equal-dimension points containing `0`.
    pub fn new(points: Vec<Point>, depth: u32) -> Result<Self> {
        let dim = points
            .first()
            .map(Point::dim)
            .ok_or_else(|| Error::InvalidDomain("no points".into()))?;
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidDomain("points of mixed dimension".into()));
        }
        if !points.iter().any(Point::is_zero) {
            return Err(Error::InvalidDomain("domain must contain 0".into()));
        }
        let mut levels = HashMap::new();
        for p in &points {
            for k in 0..=depth {
                levels
                    .entry(p.doubled(k).key())
                    .and_modify(|l: &mut u32| *l = (*l).min(k))
                    .or_insert(k);
            }
        }
        Ok(Domain {
            points,
            depth,
            levels,
        })
    }

    /// `count` collinear points `i·spacing·(1, 1/2, 1/4, …)`, `i = 0..count`.
    pub fn grid(count: usize, spacing: f64, dim: usize, depth: u32) -> Result<Self> {
        if count == 0 || dim == 0 {
            return Err(Error::InvalidDomain("grid needs at least one point and one dimension".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidDomain(format!("spacing must be positive, got {spacing}")));
        }
        let points = (0..count)
            .map(|i| Point::new((0..dim).map(|j| i as f64 * spacing * pow2(-(j as i32))).collect()))
            .collect::<Result<Vec<_>>>()?;
        Domain::new(points, depth)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn zero(&self) -> Point {
        Point::zero(self.dim())
    }

    /// Fails unless `2^n · x` lies within the sampled doubling depth.
    pub fn check_depth(&self, x: &Point, n: u32) -> Result<()> {
        match self.levels.get(&x.key()) {
            None => Err(Error::OutsideDomain(x.to_string())),
            Some(&level) if level + n > self.depth => Err(Error::DomainExhausted {
                point: x.to_string(),
                requested: n,
                available: self.depth - level,
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.levels.contains_key(&x.key())
    }

    /// All ordered pairs of base points.
    pub fn pairs(&self) -> Vec<(Point, Point)> {
        let mut out = Vec::with_capacity(self.points.len() * self.points.len());
        for x in &self.points {
            for y in &self.points {
                out.push((x.clone(), y.clone()));
            }
        }
        out
    }

    /// Ordered pairs whose sum is again a base point.
    pub fn additive_pairs(&self) -> Vec<(Point, Point)> {
        let base: HashMap<PointKey, ()> = self.points.iter().map(|p| (p.key(), ())).collect();
        self.pairs()
            .into_iter()
            .filter(|(x, y)| base.contains_key(&x.add(y).key()))
            .collect()
    }
}

type MapFn = dyn Fn(&Point) -> Value + Send + Sync;

/// A total map from source points to carrier values of some target cone.
#[derive(Clone)]
pub struct PointMap(Arc<MapFn>);

impl PointMap {
    pub fn new(f: impl Fn(&Point) -> Value + Send + Sync + 'static) -> Self {
        PointMap(Arc::new(f))
    }

    pub fn eval(&self, x: &Point) -> Value {
        (self.0)(x)
    }

    /// Evaluates and validates against `target`.
    pub fn eval_in(&self, target: &ConeInstance, x: &Point) -> Result<Element> {
        target.element(self.eval(x))
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PointMap(..)")
    }
}

/// Values of a map at finitely many points, in insertion order.
#[derive(Debug, Clone)]
pub struct Tabulation {
    target: ConeInstance,
    entries: Vec<(Point, Element)>,
    index: HashMap<PointKey, usize>,
}

impl Tabulation {
    pub fn new(target: ConeInstance) -> Self {
        Tabulation {
            target,
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn from_entries(target: ConeInstance, entries: Vec<(Point, Element)>) -> Result<Self> {
        let mut table = Tabulation::new(target);
        for (x, a) in entries {
            table.insert(x, a)?;
        }
        Ok(table)
    }

    pub fn target(&self) -> &ConeInstance {
        &self.target
    }

    pub fn insert(&mut self, x: Point, value: Element) -> Result<()> {
        if value.tag() != self.target.tag() {
            return Err(Error::InstanceMismatch {
                left: self.target.name().to_owned(),
                right: value.tag().to_string(),
            });
        }
        match self.index.get(&x.key()) {
            Some(&i) => self.entries[i].1 = value,
            None => {
                self.index.insert(x.key(), self.entries.len());
                self.entries.push((x, value));
            }
        }
        Ok(())
    }

    pub fn get(&self, x: &Point) -> Result<&Element> {
        self.index
            .get(&x.key())
            .map(|&i| &self.entries[i].1)
            .ok_or_else(|| Error::MissingTabulation(x.to_string()))
    }

    pub fn entries(&self) -> &[(Point, Element)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Applies `f` to every tabulated value.
    pub fn map(&self, mut f: impl FnMut(&Point, &Element) -> Result<Element>) -> Result<Tabulation> {
        let entries = self
            .entries
            .iter()
            .map(|(x, a)| Ok((x.clone(), f(x, a)?)))
            .collect::<Result<Vec<_>>>()?;
        Tabulation::from_entries(self.target.clone(), entries)
    }

    /// Largest gap between the two tabulations over this table's points.
    pub fn max_gap(&self, other: &Tabulation) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, a) in &self.entries {
            let b = other.get(x)?;
            worst = worst.max(self.target.gap(a, b)?);
        }
        Ok(worst)
    }
}

#[derive(Serialize)]
struct Row<'a> {
    x: &'a Point,
    #[serde(rename = "A_of_x")]
    a_of_x: &'a Element,
}

impl Serialize for Tabulation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for (x, a) in &self.entries {
            seq.serialize_element(&Row { x, a_of_x: a })?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_closed_under_doubling_to_depth() {
        let d = Domain::grid(5, 0.25, 1, 3).unwrap();
        let x = Point::scalar(0.5).unwrap();
        assert!(d.check_depth(&x, 3).is_ok());
        assert!(matches!(d.check_depth(&x, 4), Err(Error::DomainExhausted { .. })));
        // 8 = 2³·1 is the deepest doubling of the base point 1
        assert!(d.check_depth(&Point::scalar(8.0).unwrap(), 0).is_ok());
        assert!(d.check_depth(&Point::scalar(8.0).unwrap(), 1).is_err());
        assert!(matches!(
            d.check_depth(&Point::scalar(0.3).unwrap(), 0),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn domain_requires_origin_and_nonnegative_points() {
        assert!(Domain::new(vec![Point::scalar(1.0).unwrap()], 2).is_err());
        assert!(Point::scalar(-1.0).is_err());
        assert!(Point::scalar(f64::NAN).is_err());
    }

    #[test]
    fn additive_pairs_stay_inside_the_grid() {
        let d = Domain::grid(4, 1.0, 2, 1).unwrap();
        let pairs = d.additive_pairs();
        // sums i + j <= 3 over {0, 1, 2, 3}
        assert_eq!(pairs.len(), 10);
        for (x, y) in pairs {
            assert!(d.points().contains(&x.add(&y)));
        }
    }

    #[test]
    fn negative_zero_shares_the_key_of_zero() {
        assert_eq!(Point(vec![-0.0]).key(), Point::zero(1).key());
    }
}
