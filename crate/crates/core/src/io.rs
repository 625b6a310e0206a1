//! Text formats: "pts v1" point sets and "dmat v1" distance matrices, plus
//! catalog JSON.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet};
use crate::lines::{CatalogExport, DistanceMatrix, LineCatalog};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn int(token: &str, line: usize) -> Result<i64> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("not an integer: {token:?}")))
}

/// Parses "pts v1". Points come back in canonical order, which need not be
/// file order.
pub fn parse_pts(text: &str) -> Result<PointSet> {
    let mut pts = Vec::new();
    for (ln, line) in content_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [x, y] = tokens[..] else {
            return Err(parse_err(ln, format!("expected two integers, found {}", tokens.len())));
        };
        let p = Point::checked(int(x, ln)?, int(y, ln)?).map_err(|e| parse_err(ln, e.to_string()))?;
        pts.push(p);
    }
    PointSet::new(pts)
}

pub fn write_pts(set: &PointSet) -> String {
    let mut out = String::from("# pts v1\n");
    for p in set {
        writeln!(out, "{} {}", p.x, p.y).unwrap();
    }
    out
}

/// Parses "dmat v1" and validates the metric axioms.
pub fn parse_dmat(text: &str) -> Result<DistanceMatrix> {
    let mut lines = content_lines(text);
    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let n: usize = first
        .parse()
        .map_err(|_| parse_err(ln, format!("bad size {first:?}")))?;
    let mut d = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (ln, line) in lines {
        if rows == n {
            return Err(parse_err(ln, "more rows than declared"));
        }
        let row: Vec<u64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("not a distance: {t:?}"))))
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(parse_err(ln, format!("expected {n} entries, found {}", row.len())));
        }
        d.extend(row);
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(0, format!("expected {n} rows, found {rows}")));
    }
    DistanceMatrix::new(n, d)
}

pub fn write_dmat(dm: &DistanceMatrix) -> String {
    let mut out = format!("{}\n", dm.n());
    for row in dm.rows() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_pts(path: &Path) -> Result<PointSet> {
    parse_pts(&std::fs::read_to_string(path)?)
}

pub fn read_dmat(path: &Path) -> Result<DistanceMatrix> {
    parse_dmat(&std::fs::read_to_string(path)?)
}

pub fn catalog_to_json(cat: &LineCatalog) -> String {
    serde_json::to_string_pretty(&cat.export()).expect("catalog export serializes")
}

pub fn catalog_from_json(text: &str) -> Result<LineCatalog> {
    let export: CatalogExport = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    LineCatalog::from_export(&export)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Metric;
    use crate::lines::enumerate_lines;
    use proptest::prelude::*;

    #[test]
    fn pts_round_trip_and_comments() {
        let s = parse_pts("# staircase\n0 4\n\n1 1\n  2 2\n3 3\n").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(parse_pts(&write_pts(&s)).unwrap(), s);
    }

    #[test]
    fn pts_errors() {
        assert_eq!(
            parse_pts("0 0\n1 1\n0 0\n").unwrap_err(),
            Error::DuplicatePoint(Point::new(0, 0))
        );
        assert!(matches!(parse_pts("0 0\n1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_pts("0 0\n1 a\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_pts("1 2 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_pts("4611686018427387904 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn dmat_round_trip_and_errors() {
        let dm = parse_dmat("3\n0 1 2\n1 0 1\n2 1 0\n").unwrap();
        assert_eq!(dm.get(0, 2), 2);
        assert_eq!(parse_dmat(&write_dmat(&dm)).unwrap(), dm);
        assert!(matches!(parse_dmat("2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_dmat("2\n0 1\n1 0 3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_dmat("2\n0 1\n2 0\n"),
            Err(Error::MetricViolation { .. })
        ));
        assert!(matches!(parse_dmat(""), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn catalog_json_round_trip(pts in proptest::collection::btree_set((-20i64..20, -20i64..20), 2..9)) {
            let pts: Vec<(i64, i64)> = pts.into_iter().collect();
            let s = PointSet::from_coords(&pts).unwrap();
            let cat = enumerate_lines(&s, Metric::L1).unwrap();
            let back = catalog_from_json(&catalog_to_json(&cat)).unwrap();
            prop_assert_eq!(back.summary(), cat.summary());
            prop_assert_eq!(back.export(), cat.export());
        }
    }
}
