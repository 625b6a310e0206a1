//! Provenance-labelled collections of constructed lines.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::lines::Line;
use crate::members::MemberSet;

/// Which construction rule produced a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// `⟨φ(q_s), φ(q_t)⟩` inside layer family `i`.
    FamilyDecreasing {
        layer: usize,
    },
    /// `⟨p, q⟩` with `p` of degree > 1 in the cover graph of layer `i`.
    FamilyIncreasing {
        layer: usize,
    },
    PlusTwoInPrevLayer {
        layer: usize,
    },
    PlusSpecial {
        layer: usize,
    },
    PlusC2Case {
        layer: usize,
    },
    /// Increasing line out of a zero-layer point of degree ≤ 1.
    ZeroIncreasing,
    /// Anchored decreasing line `⟨u_k, q_k^1⟩` (1-based `k`).
    ZeroDecreasing {
        k: usize,
    },
    /// Extra line when exactly one neighbour class exists: anchored.
    ExtraAnchored,
    /// Extra line through two zero-layer points.
    ExtraZeroPair,
    Vertical,
    Horizontal,
    /// Monotone-sequence line meeting the sequence in exactly one point.
    MonotoneSingle,
    /// Monotone-sequence line containing the whole sequence.
    MonotoneWhole,
    /// Cross line between two increasing sequences in opposite quadrants.
    QuadrantCross,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEntry {
    pub line: Line,
    #[serde(flatten)]
    pub rule: Rule,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LineFamily {
    entries: Vec<FamilyEntry>,
}

impl LineFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, line: Line, rule: Rule) {
        self.entries.push(FamilyEntry { line, rule });
    }

    pub fn extend(&mut self, other: &LineFamily) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn entries(&self) -> &[FamilyEntry] {
        &self.entries
    }

    pub fn lines(&self) -> impl Iterator<Item = &Line> {
        self.entries.iter().map(|e| &e.line)
    }

    /// Number of entries, duplicates included.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_count(&self) -> usize {
        self.lines().map(Line::members).collect::<HashSet<_>>().len()
    }

    pub fn distinct_members(&self) -> Vec<MemberSet> {
        let mut seen = HashSet::new();
        self.lines()
            .map(Line::members)
            .filter(|m| seen.insert(*m))
            .cloned()
            .collect()
    }

    /// Pairs of entry positions whose lines coincide as point sets.
    pub fn duplicate_pairs(&self) -> Vec<(usize, usize)> {
        let mut first: HashMap<&MemberSet, usize> = HashMap::new();
        let mut dups = Vec::new();
        for (i, l) in self.lines().enumerate() {
            match first.get(l.members()) {
                Some(&j) => dups.push((j, i)),
                None => {
                    first.insert(l.members(), i);
                }
            }
        }
        dups
    }

    /// Keeps the first entry of every member set.
    pub fn deduplicated(&self) -> LineFamily {
        let mut seen = HashSet::new();
        LineFamily {
            entries: self
                .entries
                .iter()
                .filter(|e| seen.insert(e.line.members().clone()))
                .cloned()
                .collect(),
        }
    }
}

impl FromIterator<FamilyEntry> for LineFamily {
    fn from_iter<T: IntoIterator<Item = FamilyEntry>>(iter: T) -> Self {
        LineFamily {
            entries: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Metric, PointSet};
    use crate::lines::line_points;

    #[test]
    fn dedup_keeps_first_and_reports_duplicates() {
        let s = PointSet::from_coords(&[(0, 0), (1, 0), (2, 0), (1, 5)]).unwrap();
        let l = |a, b| line_points(&s, a, b, Metric::L1).unwrap();
        let mut f = LineFamily::new();
        f.push(l(0, 1), Rule::Horizontal);
        f.push(l(1, 2), Rule::Horizontal);
        f.push(l(0, 3), Rule::Vertical);
        f.push(l(0, 1), Rule::Horizontal);
        assert_eq!(f.len(), 4);
        assert!(f.duplicate_pairs().contains(&(0, 3)));
        let d = f.deduplicated();
        assert_eq!(d.len(), f.distinct_count());
        assert_eq!(d.entries()[0].line.defining_pair(), (0, 1));
    }
}
