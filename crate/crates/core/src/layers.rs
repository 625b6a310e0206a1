//! The four dominance-type partial orders, layer decomposition by repeated
//! removal of minimal elements, and the bipartite cover graphs between
//! consecutive layers.
//!
//! Every order is handled as the plain product order `p ≺ q ⇔ p.x < q.x ∧
//! p.y < q.y` on a reflected copy of the coordinates (its *frame*). Axis
//! reflections preserve L1 betweenness, so lines are unaffected; only the
//! words "left", "above", "increasing" are read in the frame.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dominated, Point, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderVariant {
    /// Increasing pairs, smaller x first.
    O1,
    /// Reverse of `O1`.
    O2,
    /// Decreasing pairs, smaller x first.
    O3,
    /// Reverse of `O3`.
    O4,
}

impl OrderVariant {
    pub const ALL: [OrderVariant; 4] = [Self::O1, Self::O2, Self::O3, Self::O4];

    pub fn number(self) -> u8 {
        match self {
            Self::O1 => 1,
            Self::O2 => 2,
            Self::O3 => 3,
            Self::O4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    /// The reflection under which this order becomes the product order.
    pub fn frame_point(self, p: Point) -> Point {
        match self {
            Self::O1 => p,
            Self::O2 => Point::new(-p.x, -p.y),
            Self::O3 => Point::new(p.x, -p.y),
            Self::O4 => Point::new(-p.x, p.y),
        }
    }

    /// `p ≺ q` under this order, in original coordinates.
    pub fn precedes(self, p: Point, q: Point) -> bool {
        dominated(self.frame_point(p), self.frame_point(q))
    }
}

impl fmt::Display for OrderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O{}", self.number())
    }
}

/// Layers `A_0..A_k` of a non-degenerate subset `Y` of a host set. All
/// indices are host indices; every layer is sorted by frame x.
#[derive(Debug, Clone, Serialize)]
pub struct LayerDecomposition {
    order: OrderVariant,
    #[serde(skip)]
    frame: Vec<Point>,
    subset: Vec<usize>,
    layers: Vec<Vec<usize>>,
    #[serde(skip)]
    layer_of: Vec<Option<usize>>,
}

impl LayerDecomposition {
    pub fn order(&self) -> OrderVariant {
        self.order
    }

    /// Host indices of `Y`, ascending.
    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn host_len(&self) -> usize {
        self.frame.len()
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> &[usize] {
        self.layers.get(i).map_or(&[], Vec::as_slice)
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Index of the last layer.
    pub fn top(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn layer_of(&self, host: usize) -> Option<usize> {
        self.layer_of.get(host).copied().flatten()
    }

    pub fn in_subset(&self, host: usize) -> bool {
        self.layer_of(host).is_some()
    }

    pub fn frame_point(&self, host: usize) -> Point {
        self.frame[host]
    }

    /// `a ≺ b` in the active order.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        dominated(self.frame[a], self.frame[b])
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }
}

pub fn decompose(set: &PointSet, order: OrderVariant) -> Result<LayerDecomposition> {
    let all: Vec<usize> = (0..set.len()).collect();
    decompose_subset(set, &all, order)
}

/// Layers of the subset `subset` (host indices) of `host`. The subset must be
/// non-degenerate; the rest of the host only matters for line membership.
pub fn decompose_subset(host: &PointSet, subset: &[usize], order: OrderVariant) -> Result<LayerDecomposition> {
    for &i in subset {
        host.check_index(i)?;
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    check_non_degenerate(host, &subset)?;

    let frame: Vec<Point> = host.iter().map(|p| order.frame_point(p)).collect();
    let mut by_x = subset.clone();
    by_x.sort_by_key(|&i| frame[i].x);

    // Height of the longest chain ending at each point; peeling minimal
    // elements assigns exactly this layer.
    let mut height = vec![0usize; by_x.len()];
    for v in 0..by_x.len() {
        height[v] = (0..v)
            .filter(|&u| dominated(frame[by_x[u]], frame[by_x[v]]))
            .map(|u| height[u] + 1)
            .max()
            .unwrap_or(0);
    }
    let top = height.iter().copied().max().map_or(0, |h| h + 1);
    let mut layers = vec![Vec::new(); top];
    let mut layer_of = vec![None; host.len()];
    for (pos, &h) in height.iter().enumerate() {
        layers[h].push(by_x[pos]);
        layer_of[by_x[pos]] = Some(h);
    }
    Ok(LayerDecomposition {
        order,
        frame,
        subset,
        layers,
        layer_of,
    })
}

fn check_non_degenerate(host: &PointSet, subset: &[usize]) -> Result<()> {
    let mut xs = BTreeMap::new();
    let mut ys = BTreeMap::new();
    for &i in subset {
        let p = host.points()[i];
        if let Some(&j) = xs.get(&p.x) {
            return Err(Error::DegenerateInput(j, i));
        }
        if let Some(&j) = ys.get(&p.y) {
            return Err(Error::DegenerateInput(j, i));
        }
        xs.insert(p.x, i);
        ys.insert(p.y, i);
    }
    Ok(())
}

/// `G_i`: comparable pairs between `A_{i−1}` (lower) and `A_i` (upper).
#[derive(Debug, Clone, Serialize)]
pub struct CoverGraph {
    layer: usize,
    lower: Vec<usize>,
    upper: Vec<usize>,
    /// Edges as (lower, upper) host indices, ordered by lower then upper x.
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    neighbors: BTreeMap<usize, Vec<usize>>,
}

impl CoverGraph {
    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of a vertex on either side, sorted by frame x. Empty for
    /// points outside the two layers.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        self.neighbors.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn is_vertex(&self, v: usize) -> bool {
        self.neighbors.contains_key(&v)
    }

    pub fn has_edge(&self, lower: usize, upper: usize) -> bool {
        self.neighbors(lower).contains(&upper)
    }
}

pub fn cover_graph(dec: &LayerDecomposition, i: usize) -> Result<CoverGraph> {
    if i == 0 || i >= dec.layer_count() {
        return Err(Error::BadLayerIndex {
            index: i,
            max: dec.top(),
        });
    }
    let lower = dec.layer(i - 1).to_vec();
    let upper = dec.layer(i).to_vec();
    let mut neighbors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut edges = Vec::new();
    for &v in lower.iter().chain(&upper) {
        neighbors.insert(v, Vec::new());
    }
    for &p in &lower {
        for &q in &upper {
            if dec.precedes(p, q) {
                edges.push((p, q));
                neighbors.get_mut(&p).unwrap().push(q);
                neighbors.get_mut(&q).unwrap().push(p);
            }
        }
    }
    Ok(CoverGraph {
        layer: i,
        lower,
        upper,
        edges,
        neighbors,
    })
}
