//! Lines as subsets of the host set, brute-force enumeration, and the
//! distance-matrix generalization.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_pair, distance, in_box, is_between, Metric, PairClass, PointSet};
use crate::members::MemberSet;

/// `⟨a, b⟩`: every `x` with `[x a b]`, `[a x b]` or `[a b x]`, plus `a` and `b`.
/// Identity is extensional; the defining pair is provenance only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Line {
    members: MemberSet,
    defining_pair: (usize, usize),
    /// `None` for lines of an abstract metric.
    pair_class: Option<PairClass>,
}

impl PartialEq for Line {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Line {}

impl Line {
    pub fn members(&self) -> &MemberSet {
        &self.members
    }

    pub fn defining_pair(&self) -> (usize, usize) {
        self.defining_pair
    }

    pub fn pair_class(&self) -> Option<PairClass> {
        self.pair_class
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_universal(&self) -> bool {
        self.members.is_full()
    }

    /// Relabels members and defining points through an index map.
    pub fn permuted(&self, map: &[usize]) -> Line {
        let (a, b) = self.defining_pair;
        let (a, b) = (map[a].min(map[b]), map[a].max(map[b]));
        Line {
            members: self.members.permuted(map),
            defining_pair: (a, b),
            pair_class: self.pair_class,
        }
    }
}

/// Canonical byte encoding of a line's member set: the sorted member indices
/// as little-endian `u32`s.
pub fn signature(line: &Line) -> Vec<u8> {
    member_signature(line.members())
}

pub fn member_signature(members: &MemberSet) -> Vec<u8> {
    members.iter().flat_map(|i| (i as u32).to_le_bytes()).collect()
}

fn check_pair(len: usize, a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::EqualIndices(a));
    }
    for i in [a, b] {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
    }
    Ok(())
}

pub fn line_points(set: &PointSet, a: usize, b: usize, metric: Metric) -> Result<Line> {
    check_pair(set.len(), a, b)?;
    Ok(line_unchecked(set, a, b, metric))
}

pub(crate) fn line_unchecked(set: &PointSet, a: usize, b: usize, metric: Metric) -> Line {
    let pts = set.points();
    let (pa, pb) = (pts[a], pts[b]);
    let mut members = MemberSet::empty(pts.len());
    for (i, &x) in pts.iter().enumerate() {
        let on = match metric {
            Metric::L1 => in_box(x, pa, pb) || in_box(pa, x, pb) || in_box(pa, pb, x),
            Metric::Linf => {
                is_between(x, pa, pb, metric) || is_between(pa, x, pb, metric) || is_between(pa, pb, x, metric)
            }
        };
        if on {
            members.insert(i);
        }
    }
    Line {
        members,
        defining_pair: (a.min(b), a.max(b)),
        pair_class: classify_pair(pa, pb).ok(),
    }
}

/// All `n(n−1)/2` lines of a point set or finite metric, with distinct
/// member sets and universal-line detection.
#[derive(Debug, Clone)]
pub struct LineCatalog {
    n: usize,
    host: Option<PointSet>,
    lines: Vec<Line>,
    distinct: Vec<MemberSet>,
    universal: Option<usize>,
}

impl LineCatalog {
    fn from_lines(n: usize, host: Option<PointSet>, lines: Vec<Line>) -> Self {
        let mut seen = HashSet::with_capacity(lines.len());
        let mut distinct = Vec::new();
        for l in &lines {
            if seen.insert(l.members()) {
                distinct.push(l.members().clone());
            }
        }
        let universal = lines.iter().position(Line::is_universal);
        LineCatalog {
            n,
            host,
            lines,
            distinct,
            universal,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn host(&self) -> Option<&PointSet> {
        self.host.as_ref()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Distinct member sets in order of first appearance.
    pub fn distinct(&self) -> &[MemberSet] {
        &self.distinct
    }

    pub fn distinct_count(&self) -> usize {
        self.distinct.len()
    }

    pub fn universal(&self) -> Option<&Line> {
        self.universal.map(|i| &self.lines[i])
    }

    pub fn has_universal(&self) -> bool {
        self.universal.is_some()
    }

    pub fn contains_members(&self, members: &MemberSet) -> bool {
        self.distinct.iter().any(|m| m == members)
    }

    pub fn distinct_set(&self) -> HashSet<&MemberSet> {
        self.distinct.iter().collect()
    }

    /// The line defined by the unordered pair `{a, b}`.
    pub fn line(&self, a: usize, b: usize) -> Option<&Line> {
        if a == b || a >= self.n || b >= self.n {
            return None;
        }
        let (i, j) = (a.min(b), a.max(b));
        let before = i * (2 * self.n - i - 1) / 2;
        self.lines.get(before + (j - i - 1))
    }

    /// Pair-by-pair equality of member sets, after relabeling `other`'s
    /// indices through `map` (`map[k]` is this catalog's index for `other`'s
    /// index `k`).
    pub fn same_family_as(&self, other: &LineCatalog, map: &[usize]) -> bool {
        if self.n != other.n || map.len() != self.n {
            return false;
        }
        other.lines.iter().all(|l| {
            let (a, b) = l.defining_pair();
            self.line(map[a], map[b])
                .is_some_and(|mine| *mine.members() == l.members().permuted(map))
        })
    }

    pub fn summary(&self) -> CatalogSummary {
        CatalogSummary {
            n: self.n,
            line_count: self.lines.len(),
            distinct_count: self.distinct_count(),
            universal: self.has_universal(),
        }
    }

    pub fn export(&self) -> CatalogExport {
        CatalogExport {
            n: self.n,
            lines: self
                .lines
                .iter()
                .map(|l| ExportedLine {
                    pair: [l.defining_pair.0, l.defining_pair.1],
                    members: l.members.to_vec(),
                })
                .collect(),
            distinct_count: self.distinct_count(),
            universal: self.has_universal(),
        }
    }

    /// Rebuilds a catalog from an export, re-deriving distinct count and the
    /// universal flag from the member lists.
    pub fn from_export(export: &CatalogExport) -> Result<Self> {
        let n = export.n;
        let expected = n * n.saturating_sub(1) / 2;
        if export.lines.len() != expected {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected {expected} lines, found {}", export.lines.len()),
            });
        }
        let mut lines = Vec::with_capacity(expected);
        for l in &export.lines {
            let [a, b] = l.pair;
            check_pair(n, a, b)?;
            if let Some(&bad) = l.members.iter().find(|&&m| m >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            lines.push(Line {
                members: MemberSet::from_indices(n, l.members.iter().copied()),
                defining_pair: (a.min(b), a.max(b)),
                pair_class: None,
            });
        }
        lines.sort_by_key(|l| l.defining_pair);
        Ok(Self::from_lines(n, None, lines))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub n: usize,
    pub line_count: usize,
    pub distinct_count: usize,
    pub universal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportedLine {
    pub pair: [usize; 2],
    pub members: Vec<usize>,
}

/// JSON shape of an exported catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogExport {
    pub n: usize,
    pub lines: Vec<ExportedLine>,
    pub distinct_count: usize,
    pub universal: bool,
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

// Below this size thread dispatch costs more than it saves.
const PARALLEL_THRESHOLD: usize = 96;

pub fn enumerate_lines(set: &PointSet, metric: Metric) -> Result<LineCatalog> {
    let n = set.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let pairs = all_pairs(n);
    let lines: Vec<Line> = if n >= PARALLEL_THRESHOLD {
        pairs
            .par_iter()
            .map(|&(a, b)| line_unchecked(set, a, b, metric))
            .collect()
    } else {
        pairs.iter().map(|&(a, b)| line_unchecked(set, a, b, metric)).collect()
    };
    Ok(LineCatalog::from_lines(n, Some(set.clone()), lines))
}

/// Some line of `set` containing every point, found without building the
/// whole catalog.
pub fn find_universal_line(set: &PointSet, metric: Metric) -> Option<Line> {
    let n = set.len();
    if n < 2 {
        return None;
    }
    all_pairs(n)
        .into_iter()
        .map(|(a, b)| line_unchecked(set, a, b, metric))
        .find(Line::is_universal)
}

/// A finite metric with non-negative integer distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u64>,
}

impl DistanceMatrix {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality, reporting a witness triple on failure.
    pub fn new(n: usize, d: Vec<u64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::PreconditionViolated(format!(
                "distance matrix of order {n} needs {} entries, got {}",
                n * n,
                d.len()
            )));
        }
        let at = |i: usize, j: usize| d[i * n + j];
        for i in 0..n {
            if at(i, i) != 0 {
                return Err(Error::MetricViolation {
                    i,
                    j: i,
                    k: i,
                    reason: "non-zero diagonal",
                });
            }
            for j in 0..n {
                if at(i, j) != at(j, i) {
                    return Err(Error::MetricViolation {
                        i,
                        j,
                        k: j,
                        reason: "asymmetric",
                    });
                }
                if i != j && at(i, j) == 0 {
                    return Err(Error::MetricViolation {
                        i,
                        j,
                        k: j,
                        reason: "zero distance between distinct points",
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if at(i, k) as u128 > at(i, j) as u128 + at(j, k) as u128 {
                        return Err(Error::MetricViolation {
                            i,
                            j,
                            k,
                            reason: "triangle inequality",
                        });
                    }
                }
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn from_points(set: &PointSet, metric: Metric) -> Self {
        let n = set.len();
        let pts = set.points();
        let mut d = Vec::with_capacity(n * n);
        for a in pts {
            for b in pts {
                d.push(distance(*a, *b, metric));
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.d.chunks(self.n.max(1))
    }

    fn between(&self, a: usize, x: usize, b: usize) -> bool {
        self.get(a, b) as u128 == self.get(a, x) as u128 + self.get(x, b) as u128
    }

    fn line(&self, a: usize, b: usize) -> Line {
        let members = MemberSet::from_indices(
            self.n,
            (0..self.n).filter(|&x| self.between(x, a, b) || self.between(a, x, b) || self.between(a, b, x)),
        );
        Line {
            members,
            defining_pair: (a, b),
            pair_class: None,
        }
    }
}

/// Brute-force catalog straight from a distance matrix; the independent route
/// for checking [`enumerate_lines`].
pub fn lines_from_matrix(dm: &DistanceMatrix) -> Result<LineCatalog> {
    // Re-validate: a matrix assembled without `new` must still be a metric.
    let dm = DistanceMatrix::new(dm.n, dm.d.clone())?;
    if dm.n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: dm.n });
    }
    let lines = all_pairs(dm.n).into_iter().map(|(a, b)| dm.line(a, b)).collect();
    Ok(LineCatalog::from_lines(dm.n, None, lines))
}
