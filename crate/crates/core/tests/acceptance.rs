//! Acceptance sweeps. Prints one PASS/FAIL line per criterion.
//!
//! Exits non-zero on a failure only when `ACCEPTANCE_STRICT=1` is set, so the
//! workspace test run reports every outcome without hiding any of them.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use metric_lines::construction::construct_order;
use metric_lines::layers::OrderVariant;
use metric_lines::lines::find_universal_line;
use metric_lines::monotone::{longest_monotone, monotone_lines, monotone_lines_decreasing};
use metric_lines::search::{random_instance, search, Degeneracy, SearchMode, SearchReport, SearchSpace};
use metric_lines::verify::{oracle_cross_check, rotation_cross_check, VerifyOptions};
use metric_lines::{enumerate_lines, Metric, PointSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn space(w: i64, h: i64, n: (usize, usize), mode: SearchMode, filter: Degeneracy, metric: Metric) -> SearchSpace {
    SearchSpace {
        width: w,
        height: h,
        n_min: n.0,
        n_max: n.1,
        mode,
        filter,
        metric,
    }
}

fn random(seed: u64, trials: usize) -> SearchMode {
    SearchMode::Random { seed, trials }
}

fn sweep(s: &SearchSpace) -> SearchReport {
    search(s, &VerifyOptions::default(), true).expect("valid search space")
}

fn bound_summary(r: &SearchReport) -> String {
    let first = r
        .violations
        .first()
        .map(|f| format!("; first violation id {} {:?}", f.id, f.points))
        .unwrap_or_default();
    format!(
        "{} instances, {} universal, {} violations{first}",
        r.instances,
        r.universal,
        r.violations.len()
    )
}

fn sound(r: &SearchReport) -> bool {
    r.violations.iter().all(|f| f.report.sound)
}

fn exhaustive() -> SearchReport {
    let s = space(
        5,
        5,
        (3, 5),
        SearchMode::Exhaustive { reflections: false },
        Degeneracy::NonDegenerate,
        Metric::L1,
    );
    sweep(&s)
}

fn random_nondegenerate() -> SearchReport {
    let s = space(
        1_000_001,
        1_000_001,
        (2, 40),
        random(SEED, 10_000),
        Degeneracy::NonDegenerate,
        Metric::L1,
    );
    sweep(&s)
}

fn random_degenerate() -> SearchReport {
    let s = space(
        1_000_001,
        1_000_001,
        (2, 60),
        random(SEED + 1, 10_000),
        Degeneracy::Degenerate,
        Metric::L1,
    );
    sweep(&s)
}

fn criterion_rotation() -> Outcome {
    let s = space(25, 25, (2, 16), random(SEED + 2, 1_000), Degeneracy::Any, Metric::Linf);
    let bad: Vec<u64> = (0..1_000u64)
        .filter(|&i| !rotation_cross_check(&random_instance(&s, SEED + 2, i)).unwrap_or(false))
        .collect();
    outcome(bad.is_empty(), format!("1000 sets, {} mismatches {:?}", bad.len(), bad))
}

/// Corner point above an increasing chain.
fn staircase(n: i64) -> PointSet {
    let mut c = vec![(0, n)];
    c.extend((1..n).map(|i| (i, i)));
    PointSet::from_coords(&c).expect("distinct points")
}

fn criterion_staircase() -> Outcome {
    let mut problems = Vec::new();
    for n in 4..=10 {
        let s = staircase(n);
        let distinct = enumerate_lines(&s, Metric::L1).expect("catalog").distinct_count();
        if distinct != n as usize {
            problems.push(format!("n={n}: {distinct} distinct lines"));
        }
        let complete: Vec<OrderVariant> = OrderVariant::ALL
            .into_iter()
            .filter(|&o| construct_order(&s, o).expect("non-degenerate").is_complete_case())
            .collect();
        if complete.len() != 1 {
            problems.push(format!("n={n}: complete case under {complete:?}"));
        }
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "n = 4..10".into()
        } else {
            problems.join("; ")
        },
    )
}

fn criterion_properties(reports: &[(&str, &SearchReport)]) -> Outcome {
    let mut total = 0;
    let mut by_check: BTreeMap<String, usize> = BTreeMap::new();
    let mut parts = Vec::new();
    for (name, r) in reports {
        total += r.property_failure_instances;
        for (k, v) in &r.property_failures_by_check {
            *by_check.entry(k.clone()).or_default() += v;
        }
        parts.push(format!("{name}: {} of {}", r.property_failure_instances, r.instances));
    }
    let example = reports
        .iter()
        .flat_map(|(_, r)| r.property_examples.first())
        .next()
        .map(|f| format!("; e.g. {:?} {}", f.points, f.report.property_failures[0].detail))
        .unwrap_or_default();
    outcome(
        total == 0,
        format!(
            "instances with failures {}; by check {by_check:?}{example}",
            parts.join(", ")
        ),
    )
}

/// Longest strictly monotone subsequence of the y values by trying every
/// subset, sign +1 for increasing and -1 for decreasing.
fn brute_longest(ys: &[i64], sign: i64) -> usize {
    (0u32..1 << ys.len())
        .filter(|mask| {
            let picked: Vec<i64> = (0..ys.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| ys[i] * sign)
                .collect();
            picked.windows(2).all(|w| w[0] < w[1])
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

fn is_monotone(set: &PointSet, seq: &[usize], sign: i64) -> bool {
    let p = set.points();
    seq.windows(2)
        .all(|w| p[w[0]].x < p[w[1]].x && sign * (p[w[1]].y - p[w[0]].y) > 0)
}

fn criterion_monotone() -> Outcome {
    let mut problems = Vec::new();
    let s = space(
        8,
        8,
        (2, 8),
        random(SEED + 3, 1_000),
        Degeneracy::NonDegenerate,
        Metric::L1,
    );
    for i in 0..1_000u64 {
        let set = random_instance(&s, SEED + 3, i);
        let r = longest_monotone(&set).expect("non-degenerate");
        let ys: Vec<i64> = set.iter().map(|p| p.y).collect();
        let (inc, dec) = (brute_longest(&ys, 1), brute_longest(&ys, -1));
        if r.longest_increasing() != inc
            || r.longest_decreasing() != dec
            || !is_monotone(&set, &r.increasing, 1)
            || !is_monotone(&set, &r.decreasing, -1)
            || inc * dec < set.len()
        {
            problems.push(format!("set {i}"));
        }
    }

    let hosts = space(
        40,
        40,
        (3, 20),
        random(SEED + 4, 0),
        Degeneracy::NonDegenerate,
        Metric::L1,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut cases = 0;
    let mut i = 0u64;
    while cases < 1_000 {
        let set = random_instance(&hosts, SEED + 4, i);
        i += 1;
        if find_universal_line(&set, Metric::L1).is_some() {
            continue;
        }
        let r = longest_monotone(&set).expect("non-degenerate");
        let decreasing = cases % 2 == 1;
        let full = if decreasing { r.decreasing } else { r.increasing };
        if full.len() < 2 {
            continue;
        }
        let k = rng.gen_range(2..=full.len());
        let mut seq: Vec<usize> = full.choose_multiple(&mut rng, k).copied().collect();
        seq.sort_unstable();
        let family = if decreasing {
            monotone_lines_decreasing(&set, &seq)
        } else {
            monotone_lines(&set, &seq)
        };
        let catalog = enumerate_lines(&set, Metric::L1).expect("catalog");
        match family {
            Ok(f) => {
                let distinct: HashSet<_> = f.lines().map(|l| l.members().clone()).collect();
                if distinct.len() < k || !f.lines().all(|l| catalog.contains_members(l.members())) {
                    problems.push(format!("host {i}: {} distinct lines for k = {k}", distinct.len()));
                }
            }
            Err(e) => problems.push(format!("host {i}: {e}")),
        }
        cases += 1;
    }
    let first = problems.iter().take(5).cloned().collect::<Vec<_>>().join("; ");
    outcome(
        problems.is_empty(),
        format!("1000 sets and 1000 sequences, {} problems {first}", problems.len()),
    )
}

fn criterion_oracle() -> Outcome {
    let s = space(12, 12, (2, 14), random(SEED + 5, 1_000), Degeneracy::Any, Metric::L1);
    let bad: Vec<u64> = (0..1_000u64)
        .filter(|&i| !oracle_cross_check(&random_instance(&s, SEED + 5, i)))
        .collect();
    outcome(bad.is_empty(), format!("1000 sets, {} mismatches {:?}", bad.len(), bad))
}

fn report(no: usize, name: &str, o: &Outcome, took: Duration) -> bool {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {no} [{tag}] {name}: {} ({:.1}s)",
        o.detail,
        took.as_secs_f64()
    );
    o.pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() {
    let mut results = Vec::new();

    let (ex, t1) = timed(exhaustive);
    let o = outcome(
        ex.violations.is_empty() && t1 <= Duration::from_secs(600),
        bound_summary(&ex),
    );
    results.push(report(1, "exhaustive non-degenerate 5x5, n = 3..5", &o, t1));

    let (rn, t2) = timed(random_nondegenerate);
    let o = outcome(rn.violations.is_empty() && sound(&rn), bound_summary(&rn));
    results.push(report(2, "random non-degenerate, n <= 40", &o, t2));

    let (rd, t3) = timed(random_degenerate);
    let o = outcome(rd.violations.is_empty() && sound(&rd), bound_summary(&rd));
    results.push(report(3, "random with shared coordinates, n <= 60", &o, t3));

    let (o, t) = timed(criterion_rotation);
    results.push(report(4, "L-infinity against rotated L1", &o, t));

    let (o, t) = timed(criterion_staircase);
    results.push(report(5, "staircase tightness", &o, t));

    let (o, t) = timed(|| criterion_properties(&[("exhaustive", &ex), ("non-degenerate", &rn), ("degenerate", &rd)]));
    results.push(report(6, "property predicates on criteria 1-3", &o, t));

    let (o, t) = timed(criterion_monotone);
    results.push(report(7, "monotone sequences", &o, t));

    let (o, t) = timed(criterion_oracle);
    results.push(report(8, "distance-matrix oracle", &o, t));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed < results.len() && std::env::var("ACCEPTANCE_STRICT").as_deref() == Ok("1") {
        std::process::exit(1);
    }
}
