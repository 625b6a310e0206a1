//! Sets where coordinates repeat: axis-parallel pair lines, thinning to a
//! coordinate-distinct subset, and the three-branch pipeline that combines
//! them.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::construction::{construct_on_subset, OrderConstruction};
use crate::error::{Error, Result};
use crate::family::{LineFamily, Rule};
use crate::geometry::{Metric, PointSet};
use crate::lines::{find_universal_line, line_unchecked, Line};
use crate::monotone::monotone_lines_decreasing;

/// Points grouped by shared x and by shared y. Groups are sorted by the
/// other coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxisGroups {
    pub by_x: BTreeMap<i64, Vec<usize>>,
    pub by_y: BTreeMap<i64, Vec<usize>>,
}

impl AxisGroups {
    pub fn new(set: &PointSet) -> Self {
        Self::of(set, 0..set.len())
    }

    /// Groups of the given indices only.
    pub fn of(set: &PointSet, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut by_x: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut by_y: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for i in indices {
            let p = set.points()[i];
            by_x.entry(p.x).or_default().push(i);
            by_y.entry(p.y).or_default().push(i);
        }
        let pts = set.points();
        for g in by_x.values_mut() {
            g.sort_by_key(|&i| pts[i].y);
        }
        for g in by_y.values_mut() {
            g.sort_by_key(|&i| pts[i].x);
        }
        AxisGroups { by_x, by_y }
    }
}

/// Thresholds `c` and `d` of the pipeline, as exact rationals in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PipelineConfig {
    pub c: Ratio<u64>,
    pub d: Ratio<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            c: Ratio::new(1, 37),
            d: Ratio::new(1, 9),
        }
    }
}

impl PipelineConfig {
    pub fn new(c: Ratio<u64>, d: Ratio<u64>) -> Result<Self> {
        for (name, v) in [("c", c), ("d", d)] {
            if v <= Ratio::from_integer(0) || v >= Ratio::from_integer(1) {
                return Err(Error::BadThreshold(format!("{name} = {v} is not in (0, 1)")));
            }
        }
        Ok(PipelineConfig { c, d })
    }

    /// Fraction of `n` the pipeline always reaches: the least of the three
    /// branch yields `c`, `d(1 − c)/4` and `(1 − c)(1 − d)/32`.
    pub fn guaranteed_fraction(&self) -> Ratio<u64> {
        let one = Ratio::from_integer(1);
        let vertical = self.c;
        let horizontal = (one - self.c) * self.d / 4;
        let distinct = (one - self.c) * (one - self.d) / 32;
        vertical.min(horizontal).min(distinct)
    }

    pub fn guaranteed_lines(&self, n: usize) -> usize {
        (self.guaranteed_fraction() * n as u64).ceil().to_integer() as usize
    }
}

/// All pairs two or more apart in a sorted group.
fn non_consecutive_pairs(group: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..group.len()).flat_map(move |i| (i + 2..group.len()).map(move |j| (group[i], group[j])))
}

fn pair_lines<'g>(host: &PointSet, groups: impl Iterator<Item = &'g Vec<usize>>, rule: Rule) -> LineFamily {
    let mut family = LineFamily::new();
    for g in groups {
        for (a, b) in non_consecutive_pairs(g) {
            family.push(line_unchecked(host, a, b, Metric::L1), rule);
        }
    }
    family
}

fn check_shared(groups: &BTreeMap<i64, Vec<usize>>, axis: &str) -> Result<()> {
    match groups.iter().find(|(_, g)| g.len() < 5) {
        Some((v, g)) => Err(Error::PreconditionViolated(format!(
            "point {} shares {axis} = {v} with only {} others",
            g[0],
            g.len() - 1
        ))),
        None => Ok(()),
    }
}

/// Lines of non-consecutive vertical pairs; every point must share its x
/// with at least four others. On a non-collinear set they are pairwise
/// distinct and number at least `|X|`.
pub fn vertical_pair_lines(set: &PointSet) -> Result<LineFamily> {
    let groups = AxisGroups::new(set);
    check_shared(&groups.by_x, "x")?;
    Ok(pair_lines(set, groups.by_x.values(), Rule::Vertical))
}

/// Mirror image of [`vertical_pair_lines`].
pub fn horizontal_pair_lines(set: &PointSet) -> Result<LineFamily> {
    let groups = AxisGroups::new(set);
    check_shared(&groups.by_y, "y")?;
    Ok(pair_lines(set, groups.by_y.values(), Rule::Horizontal))
}

/// Minimum-y member of every x-group among `indices`, in x order.
fn x_representatives(set: &PointSet, indices: &[usize], max_group: usize) -> Vec<usize> {
    AxisGroups::of(set, indices.iter().copied())
        .by_x
        .values()
        .filter(|g| g.len() <= max_group)
        .map(|g| g[0])
        .collect()
}

/// Minimum-x member of every y-group among `indices`, in host order.
fn y_representatives(set: &PointSet, indices: &[usize], max_group: usize) -> Vec<usize> {
    let mut out: Vec<usize> = AxisGroups::of(set, indices.iter().copied())
        .by_y
        .values()
        .filter(|g| g.len() <= max_group)
        .map(|g| g[0])
        .collect();
    out.sort_unstable();
    out
}

/// One point per x-value, the one with smallest y.
pub fn extract_unique_x(set: &PointSet) -> PointSet {
    let all: Vec<usize> = (0..set.len()).collect();
    let keep = x_representatives(set, &all, usize::MAX);
    set.subset(&keep).expect("representatives are valid indices")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Vertical pairs inside large x-groups.
    Vertical,
    /// Horizontal pairs inside large y-groups of the x-thinned set.
    Horizontal,
    /// Layer construction on the coordinate-distinct subset.
    Distinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistinctSource {
    /// Lines attached to layers above the bottom one.
    Layers,
    /// Lines forced by the bottom layer, a decreasing sequence.
    BottomLayer,
    /// A single point: any line through it.
    SinglePoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub branch: Branch,
    /// Points the branch works with.
    pub subset_size: usize,
    /// The proof's test for this branch held.
    pub fires: bool,
    pub distinct_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineResult {
    pub config: PipelineConfig,
    /// Branch the proof would take.
    pub proof_branch: Branch,
    /// Branch whose family is emitted: the largest, earliest on ties.
    pub chosen: Branch,
    pub branches: Vec<BranchReport>,
    /// Indices of the thinned sets, for inspection.
    pub unique_x: Vec<usize>,
    pub distinct_subset: Vec<usize>,
    pub distinct_source: Option<DistinctSource>,
    /// Layer construction on the coordinate-distinct subset, when non-empty.
    pub subset_construction: Option<OrderConstruction>,
    pub family: LineFamily,
    pub distinct_count: usize,
    pub guaranteed: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PipelineOutcome {
    Universal { line: Line },
    Lines(Box<PipelineResult>),
}

fn at_least(count: usize, ratio: Ratio<u64>, of: usize) -> bool {
    Ratio::from_integer(count as u64) >= ratio * of as u64
}

/// Axis-parallel lines or the layer construction on a coordinate-distinct
/// subset, whichever is largest.
pub fn theorem2_pipeline(set: &PointSet, cfg: PipelineConfig) -> Result<PipelineOutcome> {
    let n = set.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if let Some(line) = find_universal_line(set, Metric::L1) {
        return Ok(PipelineOutcome::Universal { line });
    }
    let all: Vec<usize> = (0..n).collect();

    let groups = AxisGroups::new(set);
    let big_x: Vec<&Vec<usize>> = groups.by_x.values().filter(|g| g.len() >= 5).collect();
    let in_big_x: usize = big_x.iter().map(|g| g.len()).sum();
    let vertical = pair_lines(set, big_x.into_iter(), Rule::Vertical).deduplicated();

    let unique_x = x_representatives(set, &all, 4);
    let groups2 = AxisGroups::of(set, unique_x.iter().copied());
    let big_y: Vec<&Vec<usize>> = groups2.by_y.values().filter(|g| g.len() >= 5).collect();
    let in_big_y: usize = big_y.iter().map(|g| g.len()).sum();
    let horizontal = pair_lines(set, big_y.into_iter(), Rule::Horizontal).deduplicated();

    let distinct_subset = y_representatives(set, &unique_x, 4);
    let (distinct, distinct_source, subset_construction) = distinct_lines(set, &distinct_subset)?;

    let fires_v = at_least(in_big_x, cfg.c, n);
    let fires_h = !fires_v && at_least(in_big_y, cfg.d, unique_x.len());
    let proof_branch = if fires_v {
        Branch::Vertical
    } else if fires_h {
        Branch::Horizontal
    } else {
        Branch::Distinct
    };
    let branches = vec![
        BranchReport {
            branch: Branch::Vertical,
            subset_size: in_big_x,
            fires: fires_v,
            distinct_count: vertical.len(),
        },
        BranchReport {
            branch: Branch::Horizontal,
            subset_size: in_big_y,
            fires: fires_h,
            distinct_count: horizontal.len(),
        },
        BranchReport {
            branch: Branch::Distinct,
            subset_size: distinct_subset.len(),
            fires: !fires_v && !fires_h,
            distinct_count: distinct.len(),
        },
    ];
    let (chosen, family) = [
        (Branch::Vertical, vertical),
        (Branch::Horizontal, horizontal),
        (Branch::Distinct, distinct),
    ]
    .into_iter()
    .rev()
    .max_by_key(|(_, f)| f.len())
    .expect("three branches");
    Ok(PipelineOutcome::Lines(Box::new(PipelineResult {
        config: cfg,
        proof_branch,
        chosen,
        branches,
        unique_x,
        distinct_subset,
        distinct_source,
        subset_construction,
        distinct_count: family.len(),
        family,
        guaranteed: cfg.guaranteed_lines(n),
    })))
}

type DistinctLines = (LineFamily, Option<DistinctSource>, Option<OrderConstruction>);

/// At least `⌈|Y|/2⌉` lines of the host from a coordinate-distinct subset `Y`
/// of a non-collinear host.
fn distinct_lines(set: &PointSet, subset: &[usize]) -> Result<DistinctLines> {
    match subset {
        [] => Ok((LineFamily::new(), None, None)),
        [p] => {
            let q = usize::from(*p == 0);
            let mut f = LineFamily::new();
            f.push(line_unchecked(set, *p, q, Metric::L1), Rule::MonotoneWhole);
            Ok((f, Some(DistinctSource::SinglePoint), None))
        }
        _ => {
            let oc = construct_on_subset(set, subset)?;
            let layers = oc.lines.deduplicated();
            let bottom = oc.decomposition.layer(0);
            let (family, source) = if bottom.len() >= 2 && bottom.len() > layers.len() {
                (
                    monotone_lines_decreasing(set, bottom)?.deduplicated(),
                    DistinctSource::BottomLayer,
                )
            } else {
                (layers, DistinctSource::Layers)
            };
            Ok((family, Some(source), Some(oc)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::degeneracy_witness;
    use crate::lines::enumerate_lines;
    use proptest::prelude::*;

    fn set(c: &[(i64, i64)]) -> PointSet {
        PointSet::from_coords(c).unwrap()
    }

    /// Columns `0..cols`, `rows` points each, odd columns shifted up by one.
    fn staggered(cols: i64, rows: i64) -> PointSet {
        let c: Vec<(i64, i64)> = (0..cols)
            .flat_map(|x| (0..rows).map(move |k| (x, 2 * k + x % 2)))
            .collect();
        set(&c)
    }

    fn assert_in_catalog(s: &PointSet, f: &LineFamily) {
        let cat = enumerate_lines(s, Metric::L1).unwrap();
        for l in f.lines() {
            assert!(cat.contains_members(l.members()));
        }
    }

    #[test]
    fn column_counts() {
        let s = set(&[(0, 0), (0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(vertical_pair_lines(&s).unwrap().len(), 6);
        let r = set(&[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]);
        assert_eq!(horizontal_pair_lines(&r).unwrap().len(), 6);
    }

    #[test]
    fn shared_coordinate_precondition() {
        let mut c: Vec<(i64, i64)> = (0..5).map(|y| (0, y)).collect();
        c.push((3, 7));
        assert!(matches!(
            vertical_pair_lines(&set(&c)),
            Err(Error::PreconditionViolated(_))
        ));
        let mut r: Vec<(i64, i64)> = (0..5).map(|x| (x, 0)).collect();
        r.extend([(0, 1), (1, 1), (2, 1)]);
        assert!(matches!(
            horizontal_pair_lines(&set(&r)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn two_columns_and_two_rows() {
        let s = staggered(2, 5);
        let f = vertical_pair_lines(&s).unwrap();
        assert_eq!(f.len(), 12);
        assert_eq!(f.distinct_count(), 12);
        assert_in_catalog(&s, &f);
        let t: Vec<(i64, i64)> = s.iter().map(|p| (p.y, p.x)).collect();
        let t = set(&t);
        let h = horizontal_pair_lines(&t).unwrap();
        assert_eq!(h.distinct_count(), 12);
        assert_in_catalog(&t, &h);
    }

    #[test]
    fn plain_grid_is_collinear() {
        let c: Vec<(i64, i64)> = (0..5).flat_map(|x| (0..5).map(move |y| (x, y))).collect();
        let out = theorem2_pipeline(&set(&c), PipelineConfig::default()).unwrap();
        assert!(matches!(out, PipelineOutcome::Universal { .. }));
    }

    #[test]
    fn staggered_grid_takes_vertical_branch() {
        let s = staggered(5, 5);
        let PipelineOutcome::Lines(r) = theorem2_pipeline(&s, PipelineConfig::default()).unwrap() else {
            panic!("no universal line expected");
        };
        assert_eq!(r.proof_branch, Branch::Vertical);
        assert!(r.distinct_count >= 25);
        assert_eq!(r.family.distinct_count(), r.distinct_count);
        assert_in_catalog(&s, &r.family);
    }

    #[test]
    fn non_degenerate_takes_distinct_branch() {
        let mut ys: Vec<i64> = (0..30).map(|k| (k * 17) % 31).collect();
        ys.dedup();
        let c: Vec<(i64, i64)> = ys.iter().enumerate().map(|(i, &y)| (i as i64, y)).collect();
        let s = set(&c);
        assert!(degeneracy_witness(&s).is_none());
        let PipelineOutcome::Lines(r) = theorem2_pipeline(&s, PipelineConfig::default()).unwrap() else {
            panic!("no universal line expected");
        };
        assert_eq!(r.proof_branch, Branch::Distinct);
        assert_eq!(r.distinct_subset.len(), 30);
        assert!(r.distinct_count >= 15);
        assert_in_catalog(&s, &r.family);
    }

    #[test]
    fn unique_x_extraction() {
        let s = set(&[(0, 5), (1, 2), (2, 9)]);
        assert_eq!(extract_unique_x(&s), s);
        let s = set(&[(0, 5), (0, 2), (0, 9), (3, 3)]);
        assert_eq!(extract_unique_x(&s), set(&[(0, 2), (3, 3)]));
    }

    #[test]
    fn unique_x_accounting() {
        // 40 points in x-groups of sizes 1..=4; nobody shares x with four others.
        let mut c = Vec::new();
        let mut x = 0;
        'outer: loop {
            for size in 1..=4 {
                for k in 0..size {
                    c.push((x, k * 7 + x));
                    if c.len() == 40 {
                        break 'outer;
                    }
                }
                x += 1;
            }
        }
        let s = set(&c);
        let cfg = PipelineConfig::default();
        let kept = extract_unique_x(&s).len() as u64;
        assert!(Ratio::from_integer(kept) >= (Ratio::from_integer(1) - cfg.c) * 40 / 4);
    }

    #[test]
    fn thresholds() {
        assert!(PipelineConfig::new(Ratio::new(0, 1), Ratio::new(1, 2)).is_err());
        assert!(PipelineConfig::new(Ratio::new(1, 2), Ratio::new(1, 1)).is_err());
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.guaranteed_fraction(), Ratio::new(1, 37));
        assert_eq!(cfg.guaranteed_lines(37), 1);
        assert_eq!(cfg.guaranteed_lines(38), 2);
    }

    proptest! {
        #[test]
        fn distinct_pair_lines(columns in proptest::collection::vec(proptest::collection::btree_set(0i64..10, 5..8), 3..6)) {
            let c: Vec<(i64, i64)> = columns
                .iter()
                .enumerate()
                .flat_map(|(x, ys)| ys.iter().map(move |&y| (x as i64 * 3, y * 8 + x as i64)))
                .collect();
            let s = set(&c);
            prop_assume!(find_universal_line(&s, Metric::L1).is_none());
            let f = vertical_pair_lines(&s).unwrap();
            prop_assert_eq!(f.distinct_count(), f.len());
            prop_assert!(f.len() >= s.len());
        }

        #[test]
        fn pipeline_meets_guarantee(pts in proptest::collection::btree_set((0i64..6, 0i64..6), 2..30)) {
            let pts: Vec<(i64, i64)> = pts.into_iter().collect();
            let s = PointSet::from_coords(&pts).unwrap();
            prop_assume!(s.len() >= 2);
            if let PipelineOutcome::Lines(r) = theorem2_pipeline(&s, PipelineConfig::default()).unwrap() {
                prop_assert!(r.distinct_count >= r.guaranteed);
                prop_assert_eq!(r.family.distinct_count(), r.distinct_count);
                let cat = enumerate_lines(&s, Metric::L1).unwrap();
                for l in r.family.lines() {
                    prop_assert!(cat.contains_members(l.members()));
                }
                let y = r.distinct_subset.len();
                let third = r.branches[2].distinct_count;
                prop_assert!(2 * third >= y);
            }
        }
    }
}
