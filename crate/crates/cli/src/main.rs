use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use metric_lines::construction::{construct_theorem1_orders, Theorem1Outcome};
use metric_lines::degenerate::{theorem2_pipeline, PipelineConfig, PipelineOutcome};
use metric_lines::io::{catalog_from_json, catalog_to_json, read_dmat, read_pts, write_pts};
use metric_lines::layers::OrderVariant;
use metric_lines::lines::{find_universal_line, lines_from_matrix};
use metric_lines::monotone::{longest_monotone, monotone_lines};
use metric_lines::search::{search, write_artifacts, Degeneracy, SearchMode, SearchSpace};
use metric_lines::verify::{verify_instance_with, VerifyOptions};
use metric_lines::{enumerate_lines, geometry::rotate_linf_to_l1, LineCatalog, Metric, PointSet};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "metric-lines", version, about = "Lines of planar point sets under L1 and L∞")]
struct Cli {
    /// Print JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force line catalog of a .pts, .dmat or catalog .json file.
    Lines {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::L1)]
        metric: MetricArg,
        /// List every distinct line.
        #[arg(long)]
        full: bool,
    },
    /// Layer construction under one or all four orders.
    Construct {
        file: PathBuf,
        /// 1, 2, 3, 4 or all.
        #[arg(long, default_value = "all", value_parser = parse_orders)]
        order: OrderArg,
    },
    /// Lower-bound check against the brute-force catalog.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::L1)]
        metric: MetricArg,
        #[command(flatten)]
        thresholds: Thresholds,
        /// Include timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Axis-parallel lines or the construction on a coordinate-distinct subset.
    Pipeline {
        file: PathBuf,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Longest monotone sequences and the lines along the increasing one.
    Monotone { file: PathBuf },
    /// Verifies every instance of a grid, exhaustively or at random.
    Search(SearchArgs),
    /// Writes the image of an L∞ set under (x, y) ↦ (x + y, y − x).
    Rotate {
        file: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Thresholds {
    /// Share threshold for axis groups, a fraction such as 1/37.
    #[arg(long, value_parser = parse_ratio)]
    c: Option<Ratio<u64>>,
    /// Share threshold for the coordinate-distinct subset.
    #[arg(long, value_parser = parse_ratio)]
    d: Option<Ratio<u64>>,
}

impl Thresholds {
    fn config(&self) -> metric_lines::Result<PipelineConfig> {
        let def = PipelineConfig::default();
        PipelineConfig::new(self.c.unwrap_or(def.c), self.d.unwrap_or(def.d))
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Grid size WxH; coordinates range over 0..W and 0..H.
    #[arg(long, value_parser = parse_grid)]
    grid: (i64, i64),
    /// Point counts A..B (inclusive).
    #[arg(long, value_parser = parse_range)]
    n: (usize, usize),
    #[arg(long, conflicts_with = "random")]
    exhaustive: bool,
    /// Keep one set per orbit of the axis reflections (exhaustive only).
    #[arg(long, requires = "exhaustive")]
    reflections: bool,
    /// Number of random trials.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FilterArg::Any)]
    filter: FilterArg,
    #[arg(long, value_enum, default_value_t = MetricArg::L1)]
    metric: MetricArg,
    /// Directory for violation and extremal artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow exhaustive sweeps beyond the size limit.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    L1,
    Linf,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::L1 => Metric::L1,
            MetricArg::Linf => Metric::Linf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Any,
    Nondegenerate,
    Degenerate,
}

impl From<FilterArg> for Degeneracy {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::Any => Degeneracy::Any,
            FilterArg::Nondegenerate => Degeneracy::NonDegenerate,
            FilterArg::Degenerate => Degeneracy::Degenerate,
        }
    }
}

#[derive(Clone)]
struct OrderArg(Vec<OrderVariant>);

fn parse_orders(s: &str) -> Result<OrderArg, String> {
    if s == "all" {
        return Ok(OrderArg(OrderVariant::ALL.to_vec()));
    }
    s.parse()
        .ok()
        .and_then(OrderVariant::from_number)
        .map(|o| OrderArg(vec![o]))
        .ok_or_else(|| format!("expected 1, 2, 3, 4 or all, got {s:?}"))
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    s.parse()
        .map_err(|_| format!("expected a fraction such as 1/37, got {s:?}"))
}

fn parse_grid(s: &str) -> Result<(i64, i64), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    match (w.parse(), h.parse()) {
        (Ok(w), Ok(h)) => Ok((w, h)),
        _ => Err(format!("expected WxH, got {s:?}")),
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected A..B or N, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        None => s.parse().map(|n| (n, n)).map_err(|_| bad()),
    }
}

/// How a command ended, mapped to the process exit code.
enum Failure {
    /// Bad input, unreadable file or a library error: exit 2.
    Usage(String),
    /// The run completed but a bound or property check failed: exit 1.
    Check,
}

impl From<metric_lines::Error> for Failure {
    fn from(e: metric_lines::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn check(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn load_points(path: &Path) -> Result<PointSet, Failure> {
    match extension(path) {
        "pts" => Ok(read_pts(path)?),
        other => Err(Failure::Usage(format!(
            "{}: expected a .pts point set, got {:?}",
            path.display(),
            other
        ))),
    }
}

fn load_catalog(path: &Path, metric: Metric) -> Result<LineCatalog, Failure> {
    match extension(path) {
        "pts" => Ok(enumerate_lines(&read_pts(path)?, metric)?),
        "dmat" => Ok(lines_from_matrix(&read_dmat(path)?)?),
        "json" => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(catalog_from_json(&text)?)
        }
        other => Err(Failure::Usage(format!(
            "{}: unknown input type {other:?} (expected .pts, .dmat or .json)",
            path.display()
        ))),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn members(m: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<String> = m.into_iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn cmd_lines(cli: &Cli, file: &Path, metric: MetricArg, full: bool) -> Outcome {
    let cat = load_catalog(file, metric.into())?;
    if cli.json {
        println!("{}", catalog_to_json(&cat));
        return Ok(());
    }
    let s = cat.summary();
    println!(
        "n = {}, pairs = {}, distinct lines = {}",
        s.n, s.line_count, s.distinct_count
    );
    if let Some(u) = cat.universal() {
        let (a, b) = u.defining_pair();
        println!("universal line <{a}, {b}>");
    }
    if full {
        for m in cat.distinct() {
            println!("{}", members(m.iter()));
        }
    }
    Ok(())
}

fn cmd_construct(cli: &Cli, file: &Path, orders: &[OrderVariant]) -> Outcome {
    let set = load_points(file)?;
    let n = set.len();
    let out = construct_theorem1_orders(&set, orders)?;
    if cli.json {
        print_json(&out);
    }
    match out {
        Theorem1Outcome::Universal { line } => {
            if !cli.json {
                let (a, b) = line.defining_pair();
                println!("universal line <{a}, {b}>");
            }
            Ok(())
        }
        Theorem1Outcome::Constructed(r) => {
            let failures = r.failures().count();
            if !cli.json {
                for o in &r.orders {
                    println!(
                        "order {}: layers {:?}, {} distinct lines, {} property failures{}",
                        o.order.number(),
                        o.layer_sizes(),
                        o.distinct_count,
                        o.failures.len(),
                        if o.is_complete_case() { ", complete case" } else { "" }
                    );
                    for f in &o.failures {
                        println!("  {}: {}", f.check, f.detail);
                    }
                }
                println!(
                    "chosen order {}: {} distinct lines for n = {n}",
                    r.chosen.number(),
                    r.distinct_count
                );
            }
            check(r.distinct_count >= n && failures == 0)
        }
    }
}

fn cmd_verify(cli: &Cli, file: &Path, metric: MetricArg, thresholds: &Thresholds, timings: bool) -> Outcome {
    let set = load_points(file)?;
    let opts = VerifyOptions {
        id: Some(file.display().to_string()),
        pipeline: thresholds.config()?,
        timings,
    };
    let r = verify_instance_with(&set, metric.into(), &opts);
    if cli.json {
        print_json(&r);
    } else {
        println!(
            "n = {}, metric {}, brute-force distinct = {}",
            r.n, r.metric, r.brute_force_distinct
        );
        if r.universal {
            println!("universal line");
        }
        if let Some(c) = r.constructed_distinct {
            println!("constructed distinct = {c} ({})", r.chosen.as_deref().unwrap_or("-"));
        }
        if let Some(b) = r.bound {
            println!(
                "{:?}: required {}, brute force {}, construction {}",
                b.theorem,
                b.required,
                ok_word(b.brute_force_ok),
                ok_word(b.constructed_ok)
            );
        }
        if !r.sound {
            println!("some constructed line is not in the catalog");
        }
        for f in &r.property_failures {
            println!("property failure {}: {}", f.check, f.detail);
        }
        for e in &r.errors {
            println!("error: {e}");
        }
        if let Some(t) = r.timings {
            println!("oracle {:.2} ms, construction {:.2} ms", t.oracle_ms, t.construction_ms);
        }
        println!("{}", if r.pass { "PASS" } else { "FAIL" });
    }
    check(r.pass)
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "short"
    }
}

fn cmd_pipeline(cli: &Cli, file: &Path, thresholds: &Thresholds) -> Outcome {
    let set = load_points(file)?;
    let out = theorem2_pipeline(&set, thresholds.config()?)?;
    if cli.json {
        print_json(&out);
    }
    match out {
        PipelineOutcome::Universal { line } => {
            if !cli.json {
                let (a, b) = line.defining_pair();
                println!("universal line <{a}, {b}>");
            }
            Ok(())
        }
        PipelineOutcome::Lines(r) => {
            if !cli.json {
                for b in &r.branches {
                    println!(
                        "{:?}: {} points, {}, {} distinct lines",
                        b.branch,
                        b.subset_size,
                        if b.fires { "fires" } else { "does not fire" },
                        b.distinct_count
                    );
                }
                println!(
                    "proof branch {:?}, emitted {:?}: {} distinct lines, guaranteed {}",
                    r.proof_branch, r.chosen, r.distinct_count, r.guaranteed
                );
            }
            check(r.distinct_count >= r.guaranteed)
        }
    }
}

#[derive(Serialize)]
struct MonotoneReport {
    n: usize,
    longest_increasing: usize,
    longest_decreasing: usize,
    increasing: Vec<usize>,
    decreasing: Vec<usize>,
    /// Distinct lines along the increasing sequence; absent for a collinear
    /// set or a sequence shorter than two.
    family_distinct: Option<usize>,
}

fn cmd_monotone(cli: &Cli, file: &Path) -> Outcome {
    let set = load_points(file)?;
    let r = longest_monotone(&set)?;
    let family_distinct = if r.increasing.len() >= 2 && find_universal_line(&set, Metric::L1).is_none() {
        Some(monotone_lines(&set, &r.increasing)?.distinct_count())
    } else {
        None
    };
    let report = MonotoneReport {
        n: set.len(),
        longest_increasing: r.longest_increasing(),
        longest_decreasing: r.longest_decreasing(),
        increasing: r.increasing,
        decreasing: r.decreasing,
        family_distinct,
    };
    if cli.json {
        print_json(&report);
    } else {
        println!("n = {}", report.n);
        println!(
            "I = {} {}",
            report.longest_increasing,
            members(report.increasing.iter().copied())
        );
        println!(
            "D = {} {}",
            report.longest_decreasing,
            members(report.decreasing.iter().copied())
        );
        match report.family_distinct {
            Some(k) => println!("lines along the increasing sequence: {k}"),
            None => println!("lines along the increasing sequence: none (collinear set or I < 2)"),
        }
    }
    Ok(())
}

fn cmd_search(cli: &Cli, a: &SearchArgs) -> Outcome {
    let mode = match (a.exhaustive, a.random) {
        (true, None) => SearchMode::Exhaustive {
            reflections: a.reflections,
        },
        (false, Some(trials)) => SearchMode::Random { seed: a.seed, trials },
        _ => {
            return Err(Failure::Usage(
                "search needs exactly one of --exhaustive or --random T".into(),
            ))
        }
    };
    let space = SearchSpace {
        width: a.grid.0,
        height: a.grid.1,
        n_min: a.n.0,
        n_max: a.n.1,
        mode,
        filter: a.filter.into(),
        metric: a.metric.into(),
    };
    if matches!(mode, SearchMode::Random { .. }) {
        eprintln!("seed {}", a.seed);
    }
    let report = search(&space, &VerifyOptions::default(), a.force)?;
    if let Some(dir) = &a.out {
        let written = write_artifacts(&report, dir)?;
        eprintln!("wrote {} files to {}", written.len(), dir.display());
    }
    if cli.json {
        print_json(&report);
    } else {
        println!(
            "{} instances, {} with a universal line, {} violations, {} with property failures",
            report.instances,
            report.universal,
            report.violations.len(),
            report.property_failure_instances
        );
        for (check, count) in &report.property_failures_by_check {
            println!("  {check}: {count}");
        }
        for v in &report.violations {
            println!("violation {}: {:?}", v.id, v.points);
        }
        if let Some(m) = &report.min_ratio {
            println!(
                "smallest ratio: {} lines for n = {} (instance {})",
                m.distinct, m.n, m.id
            );
        }
    }
    check(report.ok())
}

fn cmd_rotate(file: &Path, out: Option<&Path>) -> Outcome {
    let set = load_points(file)?;
    let text = write_pts(&rotate_linf_to_l1(&set)?.points);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Lines { file, metric, full } => cmd_lines(cli, file, *metric, *full),
        Command::Construct { file, order } => cmd_construct(cli, file, &order.0),
        Command::Verify {
            file,
            metric,
            thresholds,
            timings,
        } => cmd_verify(cli, file, *metric, thresholds, *timings),
        Command::Pipeline { file, thresholds } => cmd_pipeline(cli, file, thresholds),
        Command::Monotone { file } => cmd_monotone(cli, file),
        Command::Search(a) => cmd_search(cli, a),
        Command::Rotate { file, out } => cmd_rotate(file, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
