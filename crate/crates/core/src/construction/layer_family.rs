use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Rule;
use crate::geometry::{classify_pair, Metric, PairClass, PointSet};
use crate::layers::{cover_graph, CoverGraph, LayerDecomposition};
use crate::lines::{line_unchecked, Line};

use super::properties::{ConstructedLine, Role};

/// The lines attached to layer `i ≥ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyLi {
    pub layer: usize,
    /// Points of `A_i` all of whose neighbours have degree 1, by x.
    pub special_targets: Vec<usize>,
    /// `(q_s, φ(q_s))`, `φ` picking the leftmost neighbour.
    pub phi: Vec<(usize, usize)>,
    pub decreasing: Vec<ConstructedLine>,
    pub increasing: Vec<ConstructedLine>,
    pub c: usize,
    pub d: usize,
}

impl FamilyLi {
    pub fn lines(&self) -> impl Iterator<Item = &ConstructedLine> {
        self.decreasing.iter().chain(&self.increasing)
    }

    pub fn len(&self) -> usize {
        self.decreasing.len() + self.increasing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlusKind {
    TwoInPrevLayer,
    Special,
    C2Case,
}

/// The extra line `ℓ_i⁺` for layers with `c_i ∈ {1, 2}`.
#[derive(Debug, Clone, Serialize)]
pub struct PlusLine {
    pub layer: usize,
    pub kind: PlusKind,
    pub line: ConstructedLine,
}

pub(crate) fn frame_class(dec: &LayerDecomposition, a: usize, b: usize) -> PairClass {
    classify_pair(dec.frame_point(a), dec.frame_point(b)).expect("distinct host points")
}

pub(crate) fn make_line(host: &PointSet, a: usize, b: usize, rule: Rule, role: Role) -> ConstructedLine {
    ConstructedLine {
        line: line_unchecked(host, a, b, Metric::L1),
        rule,
        role,
    }
}

pub fn build_family(dec: &LayerDecomposition, i: usize, host: &PointSet) -> Result<FamilyLi> {
    let g = cover_graph(dec, i)?;
    Ok(build_family_with(dec, &g, host))
}

pub(crate) fn build_family_with(dec: &LayerDecomposition, g: &CoverGraph, host: &PointSet) -> FamilyLi {
    let i = g.layer();
    let special_targets: Vec<usize> = g
        .upper()
        .iter()
        .copied()
        .filter(|&q| g.neighbors(q).iter().all(|&p| g.degree(p) == 1))
        .collect();
    let phi: Vec<(usize, usize)> = special_targets.iter().map(|&q| (q, g.neighbors(q)[0])).collect();

    let mut decreasing = Vec::new();
    for (s, &(_, a)) in phi.iter().enumerate() {
        for &(_, b) in &phi[s + 1..] {
            decreasing.push(make_line(
                host,
                a,
                b,
                Rule::FamilyDecreasing { layer: i },
                Role::Decreasing { layer: i },
            ));
        }
    }
    let increasing = g
        .edges()
        .iter()
        .filter(|&&(p, _)| g.degree(p) > 1)
        .map(|&(p, q)| {
            make_line(
                host,
                p,
                q,
                Rule::FamilyIncreasing { layer: i },
                Role::Increasing {
                    layer: i,
                    lower: p,
                    upper: q,
                },
            )
        })
        .collect();
    let c = special_targets.len();
    FamilyLi {
        layer: i,
        d: dec.layer(i).len() - c,
        special_targets,
        phi,
        decreasing,
        increasing,
        c,
    }
}

pub fn build_plus_line(
    dec: &LayerDecomposition,
    i: usize,
    family: &FamilyLi,
    host: &PointSet,
) -> Result<Option<PlusLine>> {
    let g = cover_graph(dec, i)?;
    build_plus_line_with(dec, &g, family, host)
}

pub(crate) fn build_plus_line_with(
    dec: &LayerDecomposition,
    g: &CoverGraph,
    family: &FamilyLi,
    host: &PointSet,
) -> Result<Option<PlusLine>> {
    let i = family.layer;
    let lower = dec.layer(i - 1);
    let plus = match family.c {
        1 if lower.len() >= 2 => PlusLine {
            layer: i,
            kind: PlusKind::TwoInPrevLayer,
            line: make_line(
                host,
                lower[0],
                lower[1],
                Rule::PlusTwoInPrevLayer { layer: i },
                Role::Decreasing { layer: i },
            ),
        },
        1 => {
            let p = lower[0];
            let q = dec.layer(i)[0];
            let pq = line_unchecked(host, p, q, Metric::L1);
            let r = (0..host.len()).find(|&r| !pq.contains(r)).ok_or(Error::CollinearHost)?;
            let role = if frame_class(dec, r, p) == PairClass::Decreasing {
                Role::Decreasing { layer: i }
            } else {
                Role::SpecialIncreasing { layer: i }
            };
            PlusLine {
                layer: i,
                kind: PlusKind::Special,
                line: make_line(host, r, p, Rule::PlusSpecial { layer: i }, role),
            }
        }
        2 => {
            let q2 = family.special_targets[1];
            let a = lower
                .iter()
                .position(|&p| g.has_edge(p, q2))
                .expect("every upper-layer point has a neighbour");
            if a == 0 {
                return Err(Error::PreconditionViolated(format!(
                    "layer {i}: leftmost neighbour of q_2 is the first point of the previous layer"
                )));
            }
            let p_prev = lower[a - 1];
            PlusLine {
                layer: i,
                kind: PlusKind::C2Case,
                line: make_line(
                    host,
                    p_prev,
                    q2,
                    Rule::PlusC2Case { layer: i },
                    Role::C2Case { layer: i, q2, p_prev },
                ),
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(plus))
}

impl PlusLine {
    pub fn as_line(&self) -> &Line {
        &self.line.line
    }
}
