//! Exact planar points, the L1 and L∞ metrics, betweenness and pair classes.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible coordinate magnitude. Coordinate differences then fit
/// in `i64` and L1 distances fit in `u64`.
pub const COORD_LIMIT: i64 = 1 << 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn checked(x: i64, y: i64) -> Result<Self> {
        if x.unsigned_abs() > COORD_LIMIT as u64 || y.unsigned_abs() > COORD_LIMIT as u64 {
            return Err(Error::CoordinateRange { x, y });
        }
        Ok(Point { x, y })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L1,
    Linf,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::L1 => f.write_str("l1"),
            Metric::Linf => f.write_str("linf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    Increasing,
    Decreasing,
    Horizontal,
    Vertical,
}

/// A duplicate-free point set in canonical (lexicographic) order. Indices
/// used throughout the crate are positions in this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    /// Sorts the points canonically and rejects duplicates and out-of-range
    /// coordinates.
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut points: Vec<Point> = points.into_iter().collect();
        for p in &points {
            Point::checked(p.x, p.y)?;
        }
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0]));
        }
        Ok(PointSet { points })
    }

    pub fn from_coords(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Point::from(c)))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn get(&self, index: usize) -> Option<Point> {
        self.points.get(index).copied()
    }

    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.points.binary_search(&p).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().copied()
    }

    /// The subset at the given indices, re-sorted canonically.
    pub fn subset(&self, indices: &[usize]) -> Result<PointSet> {
        let mut pts = Vec::with_capacity(indices.len());
        for &i in indices {
            pts.push(self.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })?);
        }
        PointSet::new(pts)
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Result<PointSet> {
        let mut pts = Vec::with_capacity(self.len());
        for p in &self.points {
            let x = p.x.checked_add(dx).ok_or(Error::Overflow { x: p.x, y: p.y })?;
            let y = p.y.checked_add(dy).ok_or(Error::Overflow { x: p.x, y: p.y })?;
            pts.push(Point::checked(x, y)?);
        }
        PointSet::new(pts)
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<Point> {
        self.get(index).ok_or(Error::IndexOutOfRange { index, len: self.len() })
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

pub fn l1_distance(a: Point, b: Point) -> u64 {
    a.x.abs_diff(b.x)
        .checked_add(a.y.abs_diff(b.y))
        .expect("coordinates within COORD_LIMIT cannot overflow")
}

pub fn linf_distance(a: Point, b: Point) -> u64 {
    a.x.abs_diff(b.x).max(a.y.abs_diff(b.y))
}

pub fn distance(a: Point, b: Point, metric: Metric) -> u64 {
    match metric {
        Metric::L1 => l1_distance(a, b),
        Metric::Linf => linf_distance(a, b),
    }
}

/// `[a x b]`: `d(a, b) = d(a, x) + d(x, b)` in the chosen metric.
pub fn is_between(a: Point, x: Point, b: Point, metric: Metric) -> bool {
    let ab = distance(a, b, metric) as u128;
    ab == distance(a, x, metric) as u128 + distance(x, b, metric) as u128
}

/// Coordinate-wise form of L1 betweenness: `x` lies in the closed box
/// spanned by `a` and `b`.
pub fn in_box(a: Point, x: Point, b: Point) -> bool {
    a.x.min(b.x) <= x.x && x.x <= a.x.max(b.x) && a.y.min(b.y) <= x.y && x.y <= a.y.max(b.y)
}

pub fn classify_pair(a: Point, b: Point) -> Result<PairClass> {
    if a == b {
        return Err(Error::EqualPoints(a));
    }
    Ok(if a.y == b.y {
        PairClass::Horizontal
    } else if a.x == b.x {
        PairClass::Vertical
    } else if (a.x < b.x) == (a.y < b.y) {
        PairClass::Increasing
    } else {
        PairClass::Decreasing
    })
}

/// Strict dominance `a ≺ b` in the product order: the pair is increasing and
/// `a` is to the left.
pub fn dominated(a: Point, b: Point) -> bool {
    a.x < b.x && a.y < b.y
}

pub fn is_degenerate(set: &PointSet) -> bool {
    degeneracy_witness(set).is_some()
}

/// Some pair of indices sharing an x- or y-coordinate, if any.
pub fn degeneracy_witness(set: &PointSet) -> Option<(usize, usize)> {
    let mut xs: HashMap<i64, usize> = HashMap::with_capacity(set.len());
    let mut ys: HashMap<i64, usize> = HashMap::with_capacity(set.len());
    for (i, p) in set.iter().enumerate() {
        if let Some(&j) = xs.get(&p.x) {
            return Some((j, i));
        }
        if let Some(&j) = ys.get(&p.y) {
            return Some((j, i));
        }
        xs.insert(p.x, i);
        ys.insert(p.y, i);
    }
    None
}

/// The integral similarity `(x, y) ↦ (x + y, y − x)`.
pub fn rotate_point(p: Point) -> Result<Point> {
    let overflow = Error::Overflow { x: p.x, y: p.y };
    let x = p.x.checked_add(p.y).ok_or(overflow.clone())?;
    let y = p.y.checked_sub(p.x).ok_or(overflow.clone())?;
    Point::checked(x, y).map_err(|_| overflow)
}

/// The rotated set together with the index correspondence, since rotation
/// does not preserve the canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotatedSet {
    pub points: PointSet,
    /// `forward[i]` is the index in `points` of the image of original point `i`.
    pub forward: Vec<usize>,
}

impl RotatedSet {
    pub fn backward(&self) -> Vec<usize> {
        let mut back = vec![0; self.forward.len()];
        for (i, &j) in self.forward.iter().enumerate() {
            back[j] = i;
        }
        back
    }
}

/// Maps L∞ betweenness on `set` to L1 betweenness on the image: L1 distances
/// of images are exactly twice the L∞ distances of originals.
pub fn rotate_linf_to_l1(set: &PointSet) -> Result<RotatedSet> {
    let images: Vec<Point> = set.iter().map(rotate_point).collect::<Result<_>>()?;
    let points = PointSet::new(images.iter().copied())?;
    let forward = images
        .iter()
        .map(|&p| points.index_of(p).expect("image is present"))
        .collect();
    Ok(RotatedSet { points, forward })
}
