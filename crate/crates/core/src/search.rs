//! Exhaustive and seeded random sweeps over small configurations.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{degeneracy_witness, Metric, Point, PointSet};
use crate::io::write_pts;
use crate::verify::{verify_instance_with, VerificationReport, VerifyOptions};

/// Which point sets a sweep admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    Any,
    /// No shared coordinates.
    NonDegenerate,
    /// Random mode: x drawn from a pool smaller than `n`, so x values collide.
    /// Exhaustive mode: at least one shared coordinate.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    /// Every set with minimum x and minimum y equal to 0; with `reflections`
    /// only one set per orbit of the four axis reflections.
    Exhaustive { reflections: bool },
    /// `trials` sets, set `i` drawn from stream `i` of `seed`.
    Random { seed: u64, trials: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchSpace {
    /// Coordinates range over `0..width` and `0..height`.
    pub width: i64,
    pub height: i64,
    pub n_min: usize,
    pub n_max: usize,
    pub mode: SearchMode,
    pub filter: Degeneracy,
    pub metric: Metric,
}

pub const EXHAUSTIVE_GRID_LIMIT: i64 = 7;
pub const EXHAUSTIVE_N_LIMIT: usize = 7;

impl SearchSpace {
    pub fn check(&self, force: bool) -> Result<()> {
        if self.width < 1 || self.height < 1 || self.n_min < 2 || self.n_min > self.n_max {
            return Err(Error::PreconditionViolated(format!(
                "empty search space: grid {}x{}, n {}..={}",
                self.width, self.height, self.n_min, self.n_max
            )));
        }
        if force {
            return Ok(());
        }
        if let SearchMode::Exhaustive { .. } = self.mode {
            if self.width > EXHAUSTIVE_GRID_LIMIT
                || self.height > EXHAUSTIVE_GRID_LIMIT
                || self.n_max > EXHAUSTIVE_N_LIMIT
            {
                return Err(Error::SpaceTooLarge(format!(
                    "exhaustive sweep of a {}x{} grid with n up to {} (limit {EXHAUSTIVE_GRID_LIMIT}x{EXHAUSTIVE_GRID_LIMIT}, n ≤ {EXHAUSTIVE_N_LIMIT})",
                    self.width, self.height, self.n_max
                )));
            }
        }
        Ok(())
    }
}

fn reflect(set: &PointSet, fx: bool, fy: bool) -> PointSet {
    let max_x = set.iter().map(|p| p.x).max().unwrap_or(0);
    let max_y = set.iter().map(|p| p.y).max().unwrap_or(0);
    PointSet::new(set.iter().map(|p| Point {
        x: if fx { max_x - p.x } else { p.x },
        y: if fy { max_y - p.y } else { p.y },
    }))
    .expect("reflection is a bijection")
}

fn is_orbit_minimum(set: &PointSet) -> bool {
    [(true, false), (false, true), (true, true)]
        .into_iter()
        .all(|(fx, fy)| set.points() <= reflect(set, fx, fy).points())
}

/// Exhaustive instances in a fixed order.
fn exhaustive_sets(space: &SearchSpace, reflections: bool) -> Box<dyn Iterator<Item = PointSet> + Send + '_> {
    let (w, h) = (space.width, space.height);
    let sets: Box<dyn Iterator<Item = PointSet> + Send> = match space.filter {
        Degeneracy::NonDegenerate => Box::new((space.n_min..=space.n_max).flat_map(move |n| {
            (0..w).combinations(n).filter(|c| c[0] == 0).flat_map(move |cols| {
                (0..h).combinations(n).filter(|r| r[0] == 0).flat_map(move |rows| {
                    let cols = cols.clone();
                    (0..n).permutations(n).map(move |perm| {
                        PointSet::new((0..n).map(|i| Point::new(cols[i], rows[perm[i]]))).expect("distinct cells")
                    })
                })
            })
        })),
        filter => {
            let cells: Vec<Point> = (0..w).flat_map(|x| (0..h).map(move |y| Point::new(x, y))).collect();
            Box::new((space.n_min..=space.n_max).flat_map(move |n| {
                cells
                    .clone()
                    .into_iter()
                    .combinations(n)
                    .filter(|c| c.iter().any(|p| p.x == 0) && c.iter().any(|p| p.y == 0))
                    .map(|c| PointSet::new(c).expect("distinct cells"))
                    .filter(move |s| filter == Degeneracy::Any || degeneracy_witness(s).is_some())
            }))
        }
    };
    if reflections {
        Box::new(sets.filter(is_orbit_minimum))
    } else {
        sets
    }
}

/// Instance `i` of a random sweep.
pub fn random_instance(space: &SearchSpace, seed: u64, i: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let (w, h) = (space.width, space.height);
    match space.filter {
        Degeneracy::NonDegenerate => {
            let cap = space.n_max.min(w as usize).min(h as usize);
            let n = rng.gen_range(space.n_min.min(cap)..=cap);
            let mut xs: Vec<i64> = index::sample(&mut rng, w as usize, n)
                .into_iter()
                .map(|v| v as i64)
                .collect();
            let ys: Vec<i64> = index::sample(&mut rng, h as usize, n)
                .into_iter()
                .map(|v| v as i64)
                .collect();
            xs.sort_unstable();
            PointSet::new(xs.into_iter().zip(ys).map(|(x, y)| Point::new(x, y))).expect("distinct x values")
        }
        Degeneracy::Degenerate => {
            // An x pool smaller than n forces shared x. Tall columns almost
            // always leave two points with an empty strip between them, hence
            // a universal line, so most pools keep columns short. Half the
            // time y is drawn from the whole range, otherwise from a pool.
            let cap = space.n_max.min((w * h) as usize);
            let n = rng.gen_range(space.n_min.min(cap)..=cap);
            let low = if rng.gen_bool(0.25) { 1 } else { (n / 2).max(1) };
            let kx = rng.gen_range(low..n.max(2)).min(w as usize);
            let ky = if rng.gen_bool(0.5) {
                h as usize
            } else {
                rng.gen_range(n.div_ceil(kx)..=n).min(h as usize)
            };
            let n = n.min(kx * ky);
            let xs = pool(&mut rng, w, kx);
            let ys = if ky < h as usize {
                pool(&mut rng, h, ky)
            } else {
                Vec::new()
            };
            let y = |c: usize| ys.get(c).copied().unwrap_or(c as i64);
            let cells = index::sample(&mut rng, kx * ky, n);
            PointSet::new(cells.into_iter().map(|c| Point::new(xs[c / ky], y(c % ky)))).expect("distinct cells")
        }
        Degeneracy::Any => {
            let cap = space.n_max.min((w * h) as usize);
            let n = rng.gen_range(space.n_min.min(cap)..=cap);
            let mut pts = BTreeSet::new();
            while pts.len() < n {
                pts.insert(Point::new(rng.gen_range(0..w), rng.gen_range(0..h)));
            }
            PointSet::new(pts).expect("set has no duplicates")
        }
    }
}

fn pool(rng: &mut ChaCha8Rng, range: i64, k: usize) -> Vec<i64> {
    let k = k.min(range as usize);
    index::sample(rng, range as usize, k)
        .into_iter()
        .map(|v| v as i64)
        .collect()
}

/// Instance that attains the smallest brute-force count relative to `n`.
#[derive(Debug, Clone, Serialize)]
pub struct Extremal {
    pub id: u64,
    pub n: usize,
    pub distinct: usize,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Flagged {
    pub id: u64,
    pub points: Vec<Point>,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub space: SearchSpace,
    pub instances: usize,
    pub universal: usize,
    /// Bound violated, unsound construction or internal error.
    pub violations: Vec<Flagged>,
    /// Instances whose construction broke a checked property.
    pub property_failure_instances: usize,
    pub property_failures_by_check: BTreeMap<String, usize>,
    /// First few instances with property failures.
    pub property_examples: Vec<Flagged>,
    /// Smallest `distinct / n` among instances without a universal line.
    pub min_ratio: Option<Extremal>,
}

impl SearchReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.property_failure_instances == 0
    }
}

const PROPERTY_EXAMPLES: usize = 8;
const BATCH: usize = 2048;

#[derive(Default)]
struct Acc {
    instances: usize,
    universal: usize,
    violations: Vec<Flagged>,
    property_failure_instances: usize,
    by_check: BTreeMap<String, usize>,
    property_examples: Vec<Flagged>,
    min_ratio: Option<Extremal>,
}

impl Acc {
    fn add(&mut self, id: u64, set: &PointSet, r: VerificationReport) {
        self.instances += 1;
        if r.universal {
            self.universal += 1;
        } else {
            let better = match &self.min_ratio {
                None => true,
                // a/b < c/d with ids breaking ties.
                Some(m) => (r.brute_force_distinct * m.n, id) < (m.distinct * r.n, m.id),
            };
            if better {
                self.min_ratio = Some(Extremal {
                    id,
                    n: r.n,
                    distinct: r.brute_force_distinct,
                    points: set.points().to_vec(),
                });
            }
        }
        if !r.property_failures.is_empty() {
            self.property_failure_instances += 1;
            for f in &r.property_failures {
                *self.by_check.entry(f.check.clone()).or_default() += 1;
            }
        }
        let flagged = || Flagged {
            id,
            points: set.points().to_vec(),
            report: r.clone(),
        };
        if !r.bound_ok() {
            self.violations.push(flagged());
        } else if !r.property_failures.is_empty() {
            self.property_examples.push(flagged());
        }
    }

    /// Order-independent merge; lists are re-sorted by id.
    fn merge(mut self, other: Acc) -> Acc {
        self.instances += other.instances;
        self.universal += other.universal;
        self.violations.extend(other.violations);
        self.violations.sort_by_key(|f| f.id);
        self.property_failure_instances += other.property_failure_instances;
        for (k, v) in other.by_check {
            *self.by_check.entry(k).or_default() += v;
        }
        self.property_examples.extend(other.property_examples);
        self.property_examples.sort_by_key(|f| f.id);
        self.property_examples.truncate(PROPERTY_EXAMPLES);
        self.min_ratio = match (self.min_ratio, other.min_ratio) {
            (Some(a), Some(b)) => Some(if (b.distinct * a.n, b.id) < (a.distinct * b.n, a.id) {
                b
            } else {
                a
            }),
            (a, b) => a.or(b),
        };
        self
    }
}

fn run_batch(batch: Vec<(u64, PointSet)>, space: &SearchSpace, opts: &VerifyOptions) -> Acc {
    batch
        .into_par_iter()
        .map(|(id, set)| {
            let o = VerifyOptions {
                id: Some(id.to_string()),
                ..opts.clone()
            };
            let r = verify_instance_with(&set, space.metric, &o);
            let mut acc = Acc::default();
            acc.add(id, &set, r);
            acc
        })
        .reduce(Acc::default, Acc::merge)
}

/// Verifies every instance of the space. The result does not depend on
/// thread count.
pub fn search(space: &SearchSpace, opts: &VerifyOptions, force: bool) -> Result<SearchReport> {
    space.check(force)?;
    let mut acc = Acc::default();
    let instances: Box<dyn Iterator<Item = (u64, PointSet)> + Send> = match space.mode {
        SearchMode::Exhaustive { reflections } => Box::new((0u64..).zip(exhaustive_sets(space, reflections))),
        SearchMode::Random { seed, trials } => {
            Box::new((0..trials as u64).map(move |i| (i, random_instance(space, seed, i))))
        }
    };
    for chunk in &instances.chunks(BATCH) {
        acc = acc.merge(run_batch(chunk.collect(), space, opts));
    }
    Ok(SearchReport {
        space: *space,
        instances: acc.instances,
        universal: acc.universal,
        violations: acc.violations,
        property_failure_instances: acc.property_failure_instances,
        property_failures_by_check: acc.by_check,
        property_examples: acc.property_examples,
        min_ratio: acc.min_ratio,
    })
}

fn save<T: Serialize>(dir: &Path, stem: &str, points: &[Point], report: &T, out: &mut Vec<PathBuf>) -> Result<()> {
    let set = PointSet::new(points.iter().copied())?;
    let pts = dir.join(format!("{stem}.pts"));
    std::fs::write(&pts, write_pts(&set))?;
    let js = dir.join(format!("{stem}.json"));
    std::fs::write(&js, serde_json::to_string_pretty(report).expect("report serializes"))?;
    out.push(pts);
    out.push(js);
    Ok(())
}

/// Writes violations, property-failure examples and the extremal instance as
/// "pts v1" files with JSON reports beside them.
pub fn write_artifacts(report: &SearchReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in &report.violations {
        save(dir, &format!("violation-{}", f.id), &f.points, f, &mut written)?;
    }
    for f in &report.property_examples {
        save(dir, &format!("property-{}", f.id), &f.points, f, &mut written)?;
    }
    if let Some(m) = &report.min_ratio {
        save(dir, &format!("extremal-{}", m.id), &m.points, m, &mut written)?;
    }
    Ok(written)
}
