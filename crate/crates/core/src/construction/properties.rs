//! Executable forms of the structural properties every constructed line is
//! claimed to have. Each predicate is evaluated literally against the layer
//! decomposition and cover graphs; none relies on how the line was built.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::Rule;
use crate::layers::{CoverGraph, LayerDecomposition, OrderVariant};
use crate::lines::Line;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    D1,
    D2,
    D3,
    D1Prime,
    D2Prime,
    D1Second,
    D2Second,
    D3Second,
    I1,
    I2,
    I2Prime,
    I3,
    I4,
    I1Second,
    I4Second,
}

impl Property {
    pub const ALL: [Property; 15] = [
        Self::D1,
        Self::D2,
        Self::D3,
        Self::D1Prime,
        Self::D2Prime,
        Self::D1Second,
        Self::D2Second,
        Self::D3Second,
        Self::I1,
        Self::I2,
        Self::I2Prime,
        Self::I3,
        Self::I4,
        Self::I1Second,
        Self::I4Second,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::D3 => "D3",
            Self::D1Prime => "D1'",
            Self::D2Prime => "D2'",
            Self::D1Second => "D1''",
            Self::D2Second => "D2''",
            Self::D3Second => "D3''",
            Self::I1 => "I1",
            Self::I2 => "I2",
            Self::I2Prime => "I2'",
            Self::I3 => "I3",
            Self::I4 => "I4",
            Self::I1Second => "I1''",
            Self::I4Second => "I4''",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Property {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// What a constructed line is supposed to be, with the points its properties
/// refer to. All indices are host indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    /// Decreasing line attached to layer `i`.
    Decreasing { layer: usize },
    /// `⟨lower, upper⟩` with `lower ∈ A_{i−1}`, `upper ∈ A_i`.
    Increasing { layer: usize, lower: usize, upper: usize },
    /// `⟨r, p⟩` where `r` is not decreasing with `p`.
    SpecialIncreasing { layer: usize },
    /// `⟨p_{a−1}, q_2⟩`.
    C2Case { layer: usize, q2: usize, p_prev: usize },
    /// `⟨p, q⟩`, `p ∈ A_0`, `q ∈ A_h`.
    ZeroIncreasing { p: usize, q: usize, h: usize },
    /// `⟨u_k, q_k^1⟩` excluding `p_k`.
    ZeroDecreasing { anchor: usize, target: usize, p_k: usize },
    /// Line through two points of `A_0`.
    ZeroPair,
}

impl Role {
    pub fn properties(&self) -> &'static [Property] {
        use Property::*;
        match self {
            Role::Decreasing { .. } => &[D1, D2, D3],
            Role::Increasing { .. } => &[I1, I2, I3, I4],
            Role::SpecialIncreasing { .. } => &[I2Prime, I3],
            Role::C2Case { .. } => &[D1Prime, D2Prime, D3],
            Role::ZeroIncreasing { .. } => &[I1Second, I4Second],
            Role::ZeroDecreasing { .. } => &[D1Second, D2Second, D3Second],
            Role::ZeroPair => &[D1],
        }
    }

    fn layer(&self) -> usize {
        match *self {
            Role::Decreasing { layer }
            | Role::Increasing { layer, .. }
            | Role::SpecialIncreasing { layer }
            | Role::C2Case { layer, .. } => layer,
            _ => 1,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Role::Decreasing { .. } => "decreasing",
            Role::Increasing { .. } => "increasing",
            Role::SpecialIncreasing { .. } => "special_increasing",
            Role::C2Case { .. } => "c2_case",
            Role::ZeroIncreasing { .. } => "zero_increasing",
            Role::ZeroDecreasing { .. } => "zero_decreasing",
            Role::ZeroPair => "zero_pair",
        }
    }
}

/// A line as produced by the construction, with its rule and role.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructedLine {
    pub line: Line,
    #[serde(flatten)]
    pub rule: Rule,
    pub role: Role,
}

/// The decomposition and its cover graphs, which together determine every
/// predicate.
pub struct PropertyContext<'a> {
    dec: &'a LayerDecomposition,
    /// `graphs[i − 1]` is `G_i`.
    graphs: &'a [CoverGraph],
}

impl<'a> PropertyContext<'a> {
    pub fn new(dec: &'a LayerDecomposition, graphs: &'a [CoverGraph]) -> Self {
        PropertyContext { dec, graphs }
    }

    fn graph(&self, i: usize) -> Option<&CoverGraph> {
        i.checked_sub(1).and_then(|k| self.graphs.get(k))
    }

    fn layer(&self, i: usize) -> &[usize] {
        self.dec.layer(i)
    }

    fn adjacent(&self, i: usize, lower: usize, upper: usize) -> bool {
        self.graph(i).is_some_and(|g| g.has_edge(lower, upper))
    }

    /// `A_j ∩ ℓ`.
    fn meet(&self, line: &Line, j: usize) -> Vec<usize> {
        self.layer(j).iter().copied().filter(|&v| line.contains(v)).collect()
    }

    /// An increasing sequence `p_0 ≺ … ≺ p_j = v`, `p_s ∈ A_s`, avoiding the
    /// line below `v`.
    fn chain_avoiding(&self, line: &Line, v: usize) -> bool {
        let Some(j) = self.dec.layer_of(v) else {
            return true;
        };
        if j == 0 {
            return true;
        }
        let mut reach: Vec<usize> = self.meet_complement(line, 0);
        for s in 1..j {
            reach = self
                .layer(s)
                .iter()
                .copied()
                .filter(|&u| !line.contains(u) && reach.iter().any(|&w| self.dec.precedes(w, u)))
                .collect();
        }
        reach.iter().any(|&w| self.dec.precedes(w, v))
    }

    fn meet_complement(&self, line: &Line, j: usize) -> Vec<usize> {
        self.layer(j).iter().copied().filter(|&v| !line.contains(v)).collect()
    }

    /// Upward closure of the line from layer `from` on.
    fn closed_upward(&self, line: &Line, from: usize) -> bool {
        (from..self.dec.top()).all(|j| {
            self.meet(line, j).into_iter().all(|a| {
                self.layer(j + 1)
                    .iter()
                    .all(|&b| !self.dec.precedes(a, b) || line.contains(b))
            })
        })
    }
}

pub fn check_property(ctx: &PropertyContext, line: &Line, role: &Role, tag: Property) -> Result<bool> {
    use Property::*;
    if !role.properties().contains(&tag) {
        return Err(Error::BadContext {
            tag: tag.name().to_owned(),
            role: role.name().to_owned(),
        });
    }
    let i = role.layer();
    let (a, b) = line.defining_pair();
    Ok(match (tag, *role) {
        (D1, _) => ctx.layer(i - 1).iter().all(|&p| line.contains(p)),
        (D2, _) => ctx
            .layer(i)
            .iter()
            .all(|&q| line.contains(q) || ctx.adjacent(i, a, q) || ctx.adjacent(i, b, q)),
        (D3, _) => [a, b].into_iter().all(|v| ctx.chain_avoiding(line, v)),
        (D1Prime, Role::C2Case { q2, .. }) => ctx
            .layer(i - 1)
            .iter()
            .all(|&p| line.contains(p) || ctx.adjacent(i, p, q2)),
        (D2Prime, Role::C2Case { p_prev, .. }) => ctx
            .layer(i)
            .iter()
            .all(|&q| line.contains(q) || ctx.adjacent(i, p_prev, q)),
        (I1, Role::Increasing { lower, upper, .. }) => ctx.meet(line, i - 1) == [lower] && ctx.meet(line, i) == [upper],
        (I2, Role::Increasing { lower, .. }) => ctx
            .layer(i)
            .iter()
            .any(|&q| ctx.dec.precedes(lower, q) && !line.contains(q)),
        (I2Prime, _) => ctx.meet(line, i).is_empty(),
        (I3, _) => (0..i).all(|j| !ctx.meet(line, j).is_empty()),
        (I4, _) => ctx.closed_upward(line, i),
        (I1Second, Role::ZeroIncreasing { p, q, h }) => {
            ctx.meet(line, 0) == [p] && ctx.meet(line, h) == [q] && (1..h).all(|j| ctx.meet(line, j).is_empty())
        }
        (I4Second, Role::ZeroIncreasing { h, .. }) => ctx.closed_upward(line, h),
        (D1Second, Role::ZeroDecreasing { p_k, .. }) => ctx.layer(0).iter().all(|&p| line.contains(p) == (p != p_k)),
        (D2Second, _) => ctx.layer(1).iter().any(|&q| !line.contains(q)),
        (D3Second, _) => ctx
            .layer(1)
            .iter()
            .all(|&q| line.contains(q) || ctx.layer(0).iter().any(|&p| ctx.dec.precedes(p, q) && line.contains(p))),
        _ => unreachable!("tag/role pairs are filtered above"),
    })
}

/// One failed check: a property predicate, a counting lemma, or a broken
/// construction invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyFailure {
    pub order: OrderVariant,
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    pub detail: String,
}

/// Per-tag tallies of checked and failed predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropertyTally {
    pub checked: BTreeMap<String, usize>,
    pub failed: BTreeMap<String, usize>,
}

impl PropertyTally {
    pub fn record(&mut self, check: &str, ok: bool) {
        *self.checked.entry(check.to_owned()).or_default() += 1;
        if !ok {
            *self.failed.entry(check.to_owned()).or_default() += 1;
        }
    }

    pub fn merge(&mut self, other: &PropertyTally) {
        for (k, v) in &other.checked {
            *self.checked.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.failed {
            *self.failed.entry(k.clone()).or_default() += v;
        }
    }

    pub fn total_failed(&self) -> usize {
        self.failed.values().sum()
    }
}

/// Runs every predicate of the line's role, recording tallies and failures.
pub(crate) fn audit_line(
    ctx: &PropertyContext,
    cl: &ConstructedLine,
    order: OrderVariant,
    tally: &mut PropertyTally,
    failures: &mut Vec<PropertyFailure>,
) {
    for &tag in cl.role.properties() {
        let ok = check_property(ctx, &cl.line, &cl.role, tag).expect("tag belongs to role");
        tally.record(tag.name(), ok);
        if !ok {
            failures.push(PropertyFailure {
                order,
                check: tag.name().to_owned(),
                rule: Some(cl.rule),
                pair: Some(cl.line.defining_pair()),
                detail: format!("{:?} violates {}", cl.role, tag),
            });
        }
    }
}
