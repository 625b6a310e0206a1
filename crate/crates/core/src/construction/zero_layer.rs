//! Extra lines for the bottom two layers when the whole host is the
//! non-degenerate set being layered.

use serde::Serialize;

use crate::family::Rule;
use crate::geometry::PointSet;
use crate::layers::{CoverGraph, LayerDecomposition};

use super::layer_family::make_line;
use super::properties::{ConstructedLine, Role};

/// `A_0 = A00 ∪ A0h ∪ A0− ∪ A0+`, each part sorted by frame x.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ZeroLayerPartition {
    /// In no comparable pair at all.
    pub a00: Vec<usize>,
    /// Comparable with something, but with nothing in `A_1`.
    pub a0h: Vec<usize>,
    /// Degree 1 in `G_1`.
    pub a0minus: Vec<usize>,
    /// Degree at least 2 in `G_1`.
    pub a0plus: Vec<usize>,
}

pub fn zero_layer_partition(dec: &LayerDecomposition, g1: Option<&CoverGraph>) -> ZeroLayerPartition {
    let mut part = ZeroLayerPartition::default();
    for &p in dec.layer(0) {
        let degree = g1.map_or(0, |g| g.degree(p));
        match degree {
            0 if dec.subset().iter().any(|&q| dec.precedes(p, q)) => part.a0h.push(p),
            0 => part.a00.push(p),
            1 => part.a0minus.push(p),
            _ => part.a0plus.push(p),
        }
    }
    part
}

/// Sub-structure of `G_1` used to anchor the zero-layer decreasing lines.
#[derive(Debug, Clone, Default, Serialize)]
pub struct OneLayerStructure {
    /// Points of `A_1` whose neighbours all have degree 1.
    pub a1c: Vec<usize>,
    pub a1d: Vec<usize>,
    /// Edges of `G' = G_1[A1d, A0+]` as (lower, upper).
    pub gprime: Vec<(usize, usize)>,
    /// Points of `A1d` of degree 1 in `G_1`.
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// `G'`-neighbours of `a`, by x: `p_1..p_s`.
    pub c: Vec<usize>,
    pub d: Vec<usize>,
    /// `targets[k]`: neighbours of `p_{k+1}` in `a`, by x.
    pub targets: Vec<Vec<usize>>,
    /// `u_k`, when one exists.
    pub anchors: Vec<Option<usize>>,
}

impl OneLayerStructure {
    pub fn s(&self) -> usize {
        self.c.len()
    }
}

pub fn one_layer_structure(
    dec: &LayerDecomposition,
    g1: Option<&CoverGraph>,
    part: &ZeroLayerPartition,
) -> OneLayerStructure {
    let Some(g1) = g1 else {
        return OneLayerStructure::default();
    };
    let (a1c, a1d): (Vec<usize>, Vec<usize>) = dec
        .layer(1)
        .iter()
        .partition(|&&q| g1.neighbors(q).iter().all(|&p| g1.degree(p) == 1));
    let in_plus = |p: &usize| part.a0plus.contains(p);
    let gprime: Vec<(usize, usize)> = g1
        .edges()
        .iter()
        .copied()
        .filter(|(p, q)| in_plus(p) && a1d.contains(q))
        .collect();
    let gp_neighbors = |v: usize| -> Vec<usize> {
        gprime
            .iter()
            .filter_map(|&(p, q)| {
                if p == v {
                    Some(q)
                } else if q == v {
                    Some(p)
                } else {
                    None
                }
            })
            .collect()
    };
    // A point of A1d with one neighbour in G_1 has that neighbour in A0+, so
    // this is also degree 1 in G'. Points of degree 1 in G' that also see
    // A0- stay in B.
    let (a, b): (Vec<usize>, Vec<usize>) = a1d.iter().partition(|&&q| g1.degree(q) == 1);
    let c: Vec<usize> = part
        .a0plus
        .iter()
        .copied()
        .filter(|&p| gp_neighbors(p).iter().any(|q| a.contains(q)))
        .collect();
    let d = part.a0plus.iter().copied().filter(|p| !c.contains(p)).collect();

    let targets: Vec<Vec<usize>> = c
        .iter()
        .map(|&p| {
            let mut t: Vec<usize> = gp_neighbors(p).into_iter().filter(|q| a.contains(q)).collect();
            t.sort_by_key(|&q| dec.frame_point(q).x);
            t
        })
        .collect();

    let mut candidates: Vec<usize> = part.a0minus.iter().chain(&part.a0plus).copied().collect();
    candidates.sort_by_key(|&v| dec.frame_point(v).x);
    let anchors = targets
        .iter()
        .map(|t| {
            let first = dec.frame_point(t[0]);
            let last = dec.frame_point(*t.last().unwrap());
            candidates
                .iter()
                .rev()
                .find(|&&u| dec.frame_point(u).y > first.y)
                .or_else(|| candidates.iter().find(|&&u| dec.frame_point(u).x > last.x))
                .copied()
        })
        .collect();

    OneLayerStructure {
        a1c,
        a1d,
        gprime,
        a,
        b,
        c,
        d,
        targets,
        anchors,
    }
}

/// Smallest layer index holding a successor of `p`.
pub(crate) fn first_successor_layer(dec: &LayerDecomposition, p: usize) -> Option<usize> {
    dec.subset()
        .iter()
        .filter(|&&q| dec.precedes(p, q))
        .filter_map(|&q| dec.layer_of(q))
        .min()
}

pub fn build_l0_incr(dec: &LayerDecomposition, part: &ZeroLayerPartition, host: &PointSet) -> Vec<ConstructedLine> {
    let mut sources: Vec<usize> = part.a0minus.iter().chain(&part.a0h).copied().collect();
    sources.sort_by_key(|&p| dec.frame_point(p).x);
    let mut out = Vec::new();
    for p in sources {
        let Some(h) = first_successor_layer(dec, p) else {
            continue;
        };
        for &q in dec.layer(h) {
            if dec.precedes(p, q) {
                out.push(make_line(
                    host,
                    p,
                    q,
                    Rule::ZeroIncreasing,
                    Role::ZeroIncreasing { p, q, h },
                ));
            }
        }
    }
    out
}

/// `⟨u_k, q_k^1⟩` for every `k` when `s ≥ 2`. The second component lists the
/// (1-based) `k` with no anchor.
pub fn build_l0_decr(structure: &OneLayerStructure, host: &PointSet) -> (Vec<ConstructedLine>, Vec<usize>) {
    let mut lines = Vec::new();
    let mut missing = Vec::new();
    if structure.s() < 2 {
        return (lines, missing);
    }
    for (k, (&p_k, targets)) in structure.c.iter().zip(&structure.targets).enumerate() {
        match structure.anchors[k] {
            Some(u) => lines.push(anchored_line(
                host,
                u,
                targets[0],
                p_k,
                Rule::ZeroDecreasing { k: k + 1 },
            )),
            None => missing.push(k + 1),
        }
    }
    (lines, missing)
}

pub(crate) fn anchored_line(host: &PointSet, anchor: usize, target: usize, p_k: usize, rule: Rule) -> ConstructedLine {
    make_line(host, anchor, target, rule, Role::ZeroDecreasing { anchor, target, p_k })
}
