//! Longest monotone sequences and the lines they force.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{LineFamily, Rule};
use crate::geometry::{degeneracy_witness, Metric, Point, PointSet};
use crate::lines::{find_universal_line, line_unchecked};

/// Longest increasing and decreasing sequences, as index lists sorted by x.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneResult {
    pub increasing: Vec<usize>,
    pub decreasing: Vec<usize>,
}

impl MonotoneResult {
    /// `I`.
    pub fn longest_increasing(&self) -> usize {
        self.increasing.len()
    }

    /// `D`.
    pub fn longest_decreasing(&self) -> usize {
        self.decreasing.len()
    }
}

/// Longest strictly increasing subsequence of `keys` (patience sorting),
/// returned as positions.
fn longest_increasing_run(keys: &[i64]) -> Vec<usize> {
    // tails[l]: position ending the best run of length l + 1 found so far.
    let mut tails: Vec<usize> = Vec::new();
    let mut prev: Vec<Option<usize>> = vec![None; keys.len()];
    for (i, &k) in keys.iter().enumerate() {
        let l = tails.partition_point(|&t| keys[t] < k);
        prev[i] = l.checked_sub(1).map(|j| tails[j]);
        if l == tails.len() {
            tails.push(i);
        } else {
            tails[l] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = prev[i];
    }
    out.reverse();
    out
}

/// Exact `I` and `D` with witnesses. Points are already sorted by x, so the
/// problem reduces to monotone subsequences of the y values.
pub fn longest_monotone(set: &PointSet) -> Result<MonotoneResult> {
    if let Some((i, j)) = degeneracy_witness(set) {
        return Err(Error::DegenerateInput(i, j));
    }
    let ys: Vec<i64> = set.iter().map(|p| p.y).collect();
    let neg: Vec<i64> = ys.iter().map(|&y| -y).collect();
    Ok(MonotoneResult {
        increasing: longest_increasing_run(&ys),
        decreasing: longest_increasing_run(&neg),
    })
}

fn identity(p: Point) -> Point {
    p
}

fn mirror_x(p: Point) -> Point {
    Point { x: -p.x, y: p.y }
}

fn frame_increasing(frame: fn(Point) -> Point, a: Point, b: Point) -> bool {
    let (a, b) = (frame(a), frame(b));
    (a.x < b.x && a.y < b.y) || (b.x < a.x && b.y < a.y)
}

fn frame_decreasing(frame: fn(Point) -> Point, a: Point, b: Point) -> bool {
    let (a, b) = (frame(a), frame(b));
    (a.x < b.x && a.y > b.y) || (b.x < a.x && b.y > a.y)
}

/// At least `k` distinct lines from a sequence of `k` points that is
/// increasing in `frame`: `k − 1` lines each meeting the sequence in one
/// point, then the line through its two ends.
fn lines_along(set: &PointSet, seq: &[usize], frame: fn(Point) -> Point) -> Result<LineFamily> {
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            got: seq.len(),
        });
    }
    for &i in seq {
        set.check_index(i)?;
    }
    let pts = set.points();
    let mut seq = seq.to_vec();
    seq.sort_by_key(|&i| frame(pts[i]).x);
    for (s, &a) in seq.iter().enumerate() {
        for &b in &seq[s + 1..] {
            if !frame_increasing(frame, pts[a], pts[b]) {
                return Err(Error::NotMonotone(a, b));
            }
        }
    }
    if find_universal_line(set, Metric::L1).is_some() {
        return Err(Error::CollinearHost);
    }

    let mut family = LineFamily::new();
    let mut survivor = seq[0];
    for &next in &seq[1..] {
        let pair = line_unchecked(set, survivor, next, Metric::L1);
        let p = (0..set.len())
            .find(|&p| !pair.contains(p))
            .ok_or(Error::CollinearHost)?;
        // One of the two is decreasing with p; the line through it keeps the
        // rest of the sequence out.
        let (partner, other) = if frame_decreasing(frame, pts[p], pts[survivor]) {
            (survivor, next)
        } else {
            (next, survivor)
        };
        debug_assert!(frame_decreasing(frame, pts[p], pts[partner]));
        family.push(line_unchecked(set, p, partner, Metric::L1), Rule::MonotoneSingle);
        survivor = other;
    }
    family.push(
        line_unchecked(set, seq[0], seq[seq.len() - 1], Metric::L1),
        Rule::MonotoneWhole,
    );
    Ok(family)
}

/// Lines forced by an increasing sequence of `X`.
pub fn monotone_lines(set: &PointSet, seq: &[usize]) -> Result<LineFamily> {
    lines_along(set, seq, identity)
}

/// Lines forced by a decreasing sequence of `X`.
pub fn monotone_lines_decreasing(set: &PointSet, seq: &[usize]) -> Result<LineFamily> {
    lines_along(set, seq, mirror_x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    /// Top-left and bottom-right quadrants.
    Anti,
    /// Bottom-left and top-right quadrants.
    Main,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrantOption {
    /// One long sequence formed by joining the two quadrants' sequences.
    Concatenated,
    /// Cross pairs of one sequence from each quadrant.
    Cross,
}

/// Median split construction. With `m` the smaller quadrant of the chosen
/// pair, the family has at least `(4m²)^{1/3}` lines, and `m ≥ ⌊n/4⌋`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadrantConstruction {
    pub diagonal: Diagonal,
    /// Points in the two chosen quadrants.
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub option: QuadrantOption,
    pub family: LineFamily,
}

impl QuadrantConstruction {
    pub fn m(&self) -> usize {
        self.first.len().min(self.second.len())
    }
}

pub fn quadrant_construction(set: &PointSet) -> Result<QuadrantConstruction> {
    let n = set.len();
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    if let Some((i, j)) = degeneracy_witness(set) {
        return Err(Error::DegenerateInput(i, j));
    }
    let pts = set.points();
    let half = n / 2;
    // Indices are sorted by x already; the first half is left of the split.
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by_key(|&i| pts[i].y);
    let mut below = vec![false; n];
    for &i in &by_y[..half] {
        below[i] = true;
    }
    let quadrant =
        |left: bool, low: bool| -> Vec<usize> { (0..n).filter(|&i| (i < half) == left && below[i] == low).collect() };
    let (tl, br, bl, tr) = (
        quadrant(true, false),
        quadrant(false, true),
        quadrant(true, true),
        quadrant(false, false),
    );
    let (diagonal, first, second) = if tl.len().min(br.len()) >= bl.len().min(tr.len()) {
        (Diagonal::Anti, tl, br)
    } else {
        (Diagonal::Main, bl, tr)
    };

    // Host indices ascend in canonical order, so subset positions line up.
    let lift = |idx: &[usize], local: &[usize]| -> Vec<usize> { local.iter().map(|&l| idx[l]).collect() };
    let m1 = longest_monotone(&set.subset(&first)?)?;
    let m2 = longest_monotone(&set.subset(&second)?)?;
    // On the anti-diagonal, quadrant points are decreasing with each other
    // across the split: decreasing runs join into one, increasing runs
    // cross. On the main diagonal the roles swap.
    let (join1, join2, cross1, cross2) = match diagonal {
        Diagonal::Anti => (&m1.decreasing, &m2.decreasing, &m1.increasing, &m2.increasing),
        Diagonal::Main => (&m1.increasing, &m2.increasing, &m1.decreasing, &m2.decreasing),
    };
    let joined: Vec<usize> = lift(&first, join1).into_iter().chain(lift(&second, join2)).collect();
    let (option, family) = if joined.len() >= cross1.len() * cross2.len() {
        let family = match diagonal {
            Diagonal::Anti => monotone_lines_decreasing(set, &joined)?,
            Diagonal::Main => monotone_lines(set, &joined)?,
        };
        (QuadrantOption::Concatenated, family)
    } else {
        let mut family = LineFamily::new();
        for a in lift(&first, cross1) {
            for b in lift(&second, cross2) {
                family.push(line_unchecked(set, a, b, Metric::L1), Rule::QuadrantCross);
            }
        }
        (QuadrantOption::Cross, family)
    };
    Ok(QuadrantConstruction {
        diagonal,
        first,
        second,
        option,
        family,
    })
}

/// `Ω(n^{2/3})` lines of a non-degenerate, non-collinear set.
pub fn quadrant_lines(set: &PointSet) -> Result<LineFamily> {
    quadrant_construction(set).map(|q| q.family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lines::enumerate_lines;
    use proptest::prelude::*;

    fn set(c: &[(i64, i64)]) -> PointSet {
        PointSet::from_coords(c).unwrap()
    }

    /// Exhaustive longest monotone run over all subsets.
    fn brute(s: &PointSet, inc: bool) -> usize {
        let n = s.len();
        let pts = s.points();
        (0u32..1 << n)
            .filter(|mask| {
                let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                idx.windows(2).all(|w| {
                    let (a, b) = (pts[w[0]], pts[w[1]]);
                    if inc {
                        a.y < b.y
                    } else {
                        a.y > b.y
                    }
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    fn non_degenerate(perm: Vec<usize>) -> PointSet {
        let c: Vec<(i64, i64)> = perm
            .iter()
            .enumerate()
            .map(|(i, &y)| (i as i64 * 3, y as i64 * 2))
            .collect();
        set(&c)
    }

    #[test]
    fn chain() {
        let s = set(&[(0, 0), (1, 1), (2, 2), (3, 3)]);
        let r = longest_monotone(&s).unwrap();
        assert_eq!((r.longest_increasing(), r.longest_decreasing()), (4, 1));
    }

    #[test]
    fn five_point_examples() {
        let y = set(&[(1, 2), (2, 1), (3, 4), (4, 3), (5, 5)]);
        let r = longest_monotone(&y).unwrap();
        assert_eq!(
            (r.longest_increasing(), r.longest_decreasing()),
            (brute(&y, true), brute(&y, false))
        );
        assert_eq!((r.longest_increasing(), r.longest_decreasing()), (3, 2));
        let corner = set(&[(0, 5), (1, 1), (2, 2), (3, 3), (4, 4)]);
        let r = longest_monotone(&corner).unwrap();
        assert_eq!((r.longest_increasing(), r.longest_decreasing()), (4, 2));
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(
            longest_monotone(&set(&[(0, 0), (0, 1)])),
            Err(Error::DegenerateInput(..))
        ));
    }

    #[test]
    fn lines_of_example_sequence() {
        let y = set(&[(1, 2), (2, 1), (3, 4), (4, 3), (5, 5)]);
        let seq = [0, 2, 4];
        let fam = monotone_lines(&y, &seq).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam.distinct_count(), 3);
        let cat = enumerate_lines(&y, Metric::L1).unwrap();
        for l in fam.lines() {
            assert!(cat.contains_members(l.members()));
        }
    }

    #[test]
    fn two_point_sequence() {
        let s = set(&[(0, 0), (2, 2), (1, 5)]);
        let fam = monotone_lines(&s, &[0, 2]).unwrap();
        assert!(fam.distinct_count() >= 2);
    }

    #[test]
    fn collinear_and_bad_sequences() {
        let chain = set(&[(0, 0), (1, 1), (2, 2)]);
        assert_eq!(monotone_lines(&chain, &[0, 1]).unwrap_err(), Error::CollinearHost);
        let s = set(&[(0, 3), (1, 1), (2, 2)]);
        assert_eq!(monotone_lines(&s, &[0, 1]).unwrap_err(), Error::NotMonotone(0, 1));
        assert!(matches!(monotone_lines(&s, &[1]), Err(Error::SequenceTooShort { .. })));
        assert!(monotone_lines_decreasing(&s, &[0, 1]).unwrap().distinct_count() >= 2);
    }

    #[test]
    fn one_point_per_quadrant() {
        let s = set(&[(0, 1), (1, 3), (2, 0), (3, 2)]);
        let q = quadrant_construction(&s).unwrap();
        assert!(q.family.distinct_count() >= 2);
        let cat = enumerate_lines(&s, Metric::L1).unwrap();
        assert!(q.family.lines().all(|l| cat.contains_members(l.members())));
    }

    #[test]
    fn perturbed_grid() {
        // 4×4 grid with a small shear so no coordinates repeat.
        let c: Vec<(i64, i64)> = (0..16)
            .map(|k| ((k % 4) * 10 + k / 4, (k / 4) * 10 + (k % 4) * 2))
            .collect();
        let s = set(&c);
        let q = quadrant_construction(&s).unwrap();
        let bound = (4.0 * (q.m() * q.m()) as f64).cbrt();
        assert!(q.m() >= 4);
        assert!(q.family.distinct_count() as f64 >= bound);
        let cat = enumerate_lines(&s, Metric::L1).unwrap();
        assert!(q.family.lines().all(|l| cat.contains_members(l.members())));
    }

    proptest! {
        #[test]
        fn matches_exhaustive_and_erdos_szekeres(perm in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle()) {
            let s = non_degenerate(perm);
            let r = longest_monotone(&s).unwrap();
            prop_assert_eq!(r.longest_increasing(), brute(&s, true));
            prop_assert_eq!(r.longest_decreasing(), brute(&s, false));
            prop_assert!(r.longest_increasing() * r.longest_decreasing() >= s.len());
            let pts = s.points();
            for w in r.increasing.windows(2) {
                prop_assert!(pts[w[0]].x < pts[w[1]].x && pts[w[0]].y < pts[w[1]].y);
            }
            for w in r.decreasing.windows(2) {
                prop_assert!(pts[w[0]].x < pts[w[1]].x && pts[w[0]].y > pts[w[1]].y);
            }
        }

        #[test]
        fn sequence_lines_are_distinct(perm in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle()) {
            let s = non_degenerate(perm);
            prop_assume!(find_universal_line(&s, Metric::L1).is_none());
            let r = longest_monotone(&s).unwrap();
            if r.increasing.len() >= 2 {
                let f = monotone_lines(&s, &r.increasing).unwrap();
                prop_assert!(f.distinct_count() >= r.increasing.len());
            }
            if r.decreasing.len() >= 2 {
                let f = monotone_lines_decreasing(&s, &r.decreasing).unwrap();
                prop_assert!(f.distinct_count() >= r.decreasing.len());
            }
        }

        #[test]
        fn quadrant_bound(perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
            let s = non_degenerate(perm);
            prop_assume!(find_universal_line(&s, Metric::L1).is_none());
            let q = quadrant_construction(&s).unwrap();
            prop_assert!(q.m() >= s.len() / 4);
            let k = q.family.distinct_count();
            prop_assert!(k * k * k >= 4 * q.m() * q.m());
        }
    }
}
