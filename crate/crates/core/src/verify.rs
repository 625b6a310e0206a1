//! Theorem-level checks of one instance against the brute-force catalog.

use std::time::Instant;

use serde::Serialize;

use crate::construction::{construct_theorem1, PropertyFailure, Theorem1Outcome};
use crate::degenerate::{theorem2_pipeline, PipelineConfig, PipelineOutcome};
use crate::error::Result;
use crate::geometry::{degeneracy_witness, rotate_linf_to_l1, Metric, PointSet};
use crate::lines::{enumerate_lines, lines_from_matrix, DistanceMatrix, Line, LineCatalog};

/// Which lower bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// L1, no shared coordinates: `n` lines.
    T1,
    /// L1, arbitrary: `⌈n/37⌉` lines.
    T2,
    /// L∞: `n` lines when no two points are at equal horizontal and vertical
    /// distance, otherwise the fractional bound.
    T3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub theorem: Theorem,
    pub required: usize,
    pub brute_force_ok: bool,
    pub constructed_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timings {
    pub oracle_ms: f64,
    pub construction_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub n: usize,
    pub metric: Metric,
    /// No shared coordinates (for L∞: after rotation).
    pub degenerate: bool,
    pub universal: bool,
    pub brute_force_distinct: usize,
    /// `None` when a universal line exists.
    pub constructed_distinct: Option<usize>,
    pub bound: Option<BoundCheck>,
    /// Every constructed line is in the catalog.
    pub sound: bool,
    /// Order or branch whose lines were counted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen: Option<String>,
    pub property_failures: Vec<PropertyFailure>,
    pub errors: Vec<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl VerificationReport {
    /// The bound holds for both counts and every constructed line is real.
    pub fn bound_ok(&self) -> bool {
        self.errors.is_empty()
            && self.sound
            && (self.universal || self.bound.is_some_and(|b| b.brute_force_ok && b.constructed_ok))
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub id: Option<String>,
    pub pipeline: PipelineConfig,
    pub timings: bool,
}

struct Constructed {
    lines: Vec<Line>,
    chosen: String,
    failures: Vec<PropertyFailure>,
    universal: bool,
}

/// Theorem 1 on a non-degenerate set, the pipeline otherwise.
fn construct_l1(set: &PointSet, cfg: PipelineConfig) -> Result<(Constructed, bool)> {
    let degenerate = degeneracy_witness(set).is_some();
    let out = if degenerate {
        match theorem2_pipeline(set, cfg)? {
            PipelineOutcome::Universal { line } => Constructed {
                lines: vec![line],
                chosen: "universal".into(),
                failures: Vec::new(),
                universal: true,
            },
            PipelineOutcome::Lines(r) => Constructed {
                lines: r.family.lines().cloned().collect(),
                chosen: format!("{:?}", r.chosen).to_lowercase(),
                failures: r.subset_construction.map(|c| c.failures).unwrap_or_default(),
                universal: false,
            },
        }
    } else {
        match construct_theorem1(set)? {
            Theorem1Outcome::Universal { line } => Constructed {
                lines: vec![line],
                chosen: "universal".into(),
                failures: Vec::new(),
                universal: true,
            },
            Theorem1Outcome::Constructed(r) => Constructed {
                lines: r.lines.lines().cloned().collect(),
                chosen: r.chosen.to_string(),
                failures: r.failures().cloned().collect(),
                universal: false,
            },
        }
    };
    Ok((out, degenerate))
}

pub fn verify_instance(set: &PointSet, metric: Metric) -> VerificationReport {
    verify_instance_with(set, metric, &VerifyOptions::default())
}

pub fn verify_instance_with(set: &PointSet, metric: Metric, opts: &VerifyOptions) -> VerificationReport {
    let n = set.len();
    let mut report = VerificationReport {
        id: opts.id.clone(),
        n,
        metric,
        degenerate: false,
        universal: false,
        brute_force_distinct: 0,
        constructed_distinct: None,
        bound: None,
        sound: true,
        chosen: None,
        property_failures: Vec::new(),
        errors: Vec::new(),
        pass: false,
        timings: None,
    };

    let t0 = Instant::now();
    let catalog = match enumerate_lines(set, metric) {
        Ok(c) => c,
        Err(e) => {
            report.errors.push(format!("oracle: {e}"));
            return report;
        }
    };
    let oracle_ms = t0.elapsed().as_secs_f64() * 1e3;
    report.brute_force_distinct = catalog.distinct_count();
    report.universal = catalog.has_universal();

    let t1 = Instant::now();
    let built = match metric {
        Metric::L1 => construct_l1(set, opts.pipeline),
        Metric::Linf => rotate_linf_to_l1(set).and_then(|rot| {
            let (mut c, degenerate) = construct_l1(&rot.points, opts.pipeline)?;
            let back = rot.backward();
            c.lines = c.lines.iter().map(|l| l.permuted(&back)).collect();
            Ok((c, degenerate))
        }),
    };
    let construction_ms = t1.elapsed().as_secs_f64() * 1e3;
    if opts.timings {
        report.timings = Some(Timings {
            oracle_ms,
            construction_ms,
        });
    }
    let (built, degenerate) = match built {
        Ok(b) => b,
        Err(e) => {
            report.errors.push(format!("construction: {e}"));
            return report;
        }
    };
    report.degenerate = degenerate;
    report.sound = built.lines.iter().all(|l| catalog.contains_members(l.members()));
    if built.universal != report.universal {
        report
            .errors
            .push("construction and oracle disagree on a universal line".into());
    }
    report.chosen = Some(built.chosen);
    report.property_failures = built.failures;
    if !report.universal {
        let distinct = distinct_members(&built.lines);
        report.constructed_distinct = Some(distinct);
        let (theorem, required) = match (metric, degenerate) {
            (Metric::L1, false) => (Theorem::T1, n),
            (Metric::L1, true) => (Theorem::T2, opts.pipeline.guaranteed_lines(n)),
            (Metric::Linf, false) => (Theorem::T3, n),
            (Metric::Linf, true) => (Theorem::T3, opts.pipeline.guaranteed_lines(n)),
        };
        report.bound = Some(BoundCheck {
            theorem,
            required,
            brute_force_ok: report.brute_force_distinct >= required,
            constructed_ok: distinct >= required,
        });
    }
    report.pass = report.bound_ok() && report.property_failures.is_empty();
    report
}

fn distinct_members(lines: &[Line]) -> usize {
    lines
        .iter()
        .map(Line::members)
        .collect::<std::collections::HashSet<_>>()
        .len()
}

/// The same lines, pair by pair, from coordinates and from the L1 distance
/// matrix.
pub fn oracle_cross_check(set: &PointSet) -> bool {
    let Ok(direct) = enumerate_lines(set, Metric::L1) else {
        return false;
    };
    let dm = DistanceMatrix::from_points(set, Metric::L1);
    let Ok(from_matrix) = lines_from_matrix(&dm) else {
        return false;
    };
    same_lines(&direct, &from_matrix)
}

fn same_lines(a: &LineCatalog, b: &LineCatalog) -> bool {
    a.n() == b.n()
        && a.lines().len() == b.lines().len()
        && a.lines()
            .iter()
            .zip(b.lines())
            .all(|(x, y)| x.defining_pair() == y.defining_pair() && x.members() == y.members())
}

/// `enumerate_lines(X, L∞)` against `enumerate_lines(rotate(X), L1)`, pair by
/// pair after relabelling.
pub fn rotation_cross_check(set: &PointSet) -> Result<bool> {
    let linf = enumerate_lines(set, Metric::Linf)?;
    let rot = rotate_linf_to_l1(set)?;
    let l1 = enumerate_lines(&rot.points, Metric::L1)?;
    let n = set.len();
    for a in 0..n {
        for b in a + 1..n {
            let want = linf.line(a, b).expect("pair in range");
            let got = l1
                .line(rot.forward[a], rot.forward[b])
                .expect("pair in range")
                .permuted(&rot.backward());
            if want.members() != got.members() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(c: &[(i64, i64)]) -> PointSet {
        PointSet::from_coords(c).unwrap()
    }

    fn staircase(n: i64) -> PointSet {
        let mut c = vec![(0, n)];
        c.extend((1..n).map(|i| (i, i)));
        set(&c)
    }

    #[test]
    fn staircase_is_tight() {
        let r = verify_instance(&staircase(6), Metric::L1);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.brute_force_distinct, 6);
        assert_eq!(r.constructed_distinct, Some(6));
        assert_eq!(r.bound.unwrap().theorem, Theorem::T1);
    }

    #[test]
    fn staggered_grid_meets_fractional_bound() {
        let c: Vec<(i64, i64)> = (0..5).flat_map(|x| (0..5).map(move |k| (x, 2 * k + x % 2))).collect();
        let r = verify_instance(&set(&c), Metric::L1);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.bound.unwrap().theorem, Theorem::T2);
        assert!(r.constructed_distinct.unwrap() >= 25);
    }

    #[test]
    fn plain_grid_and_collinear_pass_via_universal_line() {
        let c: Vec<(i64, i64)> = (0..5).flat_map(|x| (0..5).map(move |y| (x, y))).collect();
        let r = verify_instance(&set(&c), Metric::L1);
        assert!(r.pass && r.universal);
        let r = verify_instance(&set(&[(0, 0), (1, 1), (2, 2)]), Metric::L1);
        assert!(r.pass && r.universal);
        assert_eq!(r.brute_force_distinct, 1);
    }

    #[test]
    fn linf_instance() {
        // Rotating the L∞ set back gives a non-degenerate L1 set.
        let s = set(&[(0, 0), (3, 1), (1, 4), (5, 2), (2, 7)]);
        let r = verify_instance(&s, Metric::Linf);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.bound.map(|b| b.theorem), (!r.universal).then_some(Theorem::T3));
    }

    #[test]
    fn timings_only_on_request() {
        let s = staircase(4);
        assert!(verify_instance(&s, Metric::L1).timings.is_none());
        let opts = VerifyOptions {
            timings: true,
            ..VerifyOptions::default()
        };
        assert!(verify_instance_with(&s, Metric::L1, &opts).timings.is_some());
    }

    #[test]
    fn cross_checks() {
        let y = set(&[(1, 2), (2, 1), (3, 4), (4, 3), (5, 5)]);
        assert!(oracle_cross_check(&y));
        assert!(oracle_cross_check(&staircase(5)));
        assert!(oracle_cross_check(&set(&[(0, 0), (4, 1)])));
        assert!(rotation_cross_check(&y).unwrap());
    }
}
