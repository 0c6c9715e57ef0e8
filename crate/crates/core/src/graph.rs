//! Bipartite edge-colored graphs: the carrier for bubbles and gluings.
//!
//! A graph stores a color `0..=d` per edge. Bubbles use colors `1..=d` only;
//! color 0 is the gluing color. Adjacency is kept per vertex as a fixed
//! array indexed by color, so face tracing is a sequence of O(1) lookups.
//!
//! ```
//! use coltri_core::ColoredGraph;
//!
//! let melon = ColoredGraph::elementary_melon(3);
//! assert!(melon.validate().passed());
//! assert_eq!(melon.faces().unwrap().total(), 3);
//! assert_eq!(melon.gurau_degree().unwrap(), 0);
//! ```

use crate::canon;
use crate::{Error, Rat, Result};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shade {
    White,
    Black,
}

impl Shade {
    pub fn opposite(self) -> Shade {
        match self {
            Shade::White => Shade::Black,
            Shade::Black => Shade::White,
        }
    }
}

/// An edge joins a white vertex to a black vertex and carries one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub color: u8,
    pub white: usize,
    pub black: usize,
}

#[derive(Debug, Clone)]
pub struct ColoredGraph {
    d: u8,
    shades: Vec<Shade>,
    edges: Vec<Edge>,
    /// `adj[v][c]` is the index into `edges` of the color-`c` edge at `v`.
    adj: Vec<Vec<Option<usize>>>,
    has_color_zero: bool,
}

impl ColoredGraph {
    /// Build a graph, checking only what makes adjacency well defined:
    /// endpoint shades, color range and one edge per (vertex, color) slot.
    /// Regularity and flag consistency are `validate`'s business.
    pub fn new(
        d: u8,
        shades: Vec<Shade>,
        mut edges: Vec<Edge>,
        has_color_zero: bool,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadParameter(format!("d must be >= 2, got {d}")));
        }
        let n = shades.len();
        edges.sort();
        let mut adj = vec![vec![None; d as usize + 1]; n];
        for (i, e) in edges.iter().enumerate() {
            if e.color > d {
                return Err(Error::InvalidGraph(format!(
                    "edge color {} out of range 0..={}",
                    e.color, d
                )));
            }
            if e.white >= n || e.black >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge endpoint out of range: ({}, {})",
                    e.white, e.black
                )));
            }
            if shades[e.white] != Shade::White || shades[e.black] != Shade::Black {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}, {}) does not join a white vertex to a black vertex",
                    e.color, e.white, e.black
                )));
            }
            for v in [e.white, e.black] {
                if adj[v][e.color as usize].is_some() {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} has two edges of color {}",
                        e.color
                    )));
                }
                adj[v][e.color as usize] = Some(i);
            }
        }
        Ok(ColoredGraph { d, shades, edges, adj, has_color_zero })
    }

    /// A bubble: colors `1..=d` only.
    pub fn bubble(d: u8, shades: Vec<Shade>, edges: Vec<Edge>) -> Result<Self> {
        Self::new(d, shades, edges, false)
    }

    /// A graph that may carry color-0 edges (closed or open gluing).
    pub fn gluing(d: u8, shades: Vec<Shade>, edges: Vec<Edge>) -> Result<Self> {
        Self::new(d, shades, edges, true)
    }

    /// The 2-vertex bubble: one white, one black, all `d` colors in parallel.
    pub fn two_vertex_bubble(d: u8) -> Self {
        let edges = (1..=d).map(|c| Edge { color: c, white: 0, black: 1 }).collect();
        Self::bubble(d, vec![Shade::White, Shade::Black], edges).unwrap()
    }

    /// The elementary melon: the 2-vertex bubble closed by a color-0 edge.
    pub fn elementary_melon(d: u8) -> Self {
        let edges = (0..=d).map(|c| Edge { color: c, white: 0, black: 1 }).collect();
        Self::gluing(d, vec![Shade::White, Shade::Black], edges).unwrap()
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn has_color_zero(&self) -> bool {
        self.has_color_zero
    }

    pub fn num_vertices(&self) -> usize {
        self.shades.len()
    }

    pub fn shade(&self, v: usize) -> Shade {
        self.shades[v]
    }

    pub fn shades(&self) -> &[Shade] {
        &self.shades
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_at(&self, v: usize, color: u8) -> Option<&Edge> {
        self.adj[v][color as usize].map(|i| &self.edges[i])
    }

    /// The other endpoint of the color-`c` edge at `v`, if present.
    pub fn neighbor(&self, v: usize, color: u8) -> Option<usize> {
        self.edge_at(v, color).map(|e| if e.white == v { e.black } else { e.white })
    }

    /// Number of black vertices, the `p` appearing in enhancement formulas.
    pub fn black_count(&self) -> usize {
        self.shades.iter().filter(|s| **s == Shade::Black).count()
    }

    pub fn white_count(&self) -> usize {
        self.shades.len() - self.black_count()
    }

    pub fn zero_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.color == 0).count()
    }

    /// Vertices with no incident color-0 edge.
    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.adj[v][0].is_none()).collect()
    }

    /// Closed means: flagged for color 0 and every vertex carries it.
    pub fn is_closed(&self) -> bool {
        self.has_color_zero && self.free_vertices().is_empty()
    }

    /// Connected components over the given colors; each component is a sorted
    /// vertex list, components ordered by smallest vertex.
    pub fn components_on_colors(&self, colors: &[u8]) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &c in colors {
                    if let Some(u) = self.neighbor(v, c) {
                        if !seen[u] {
                            seen[u] = true;
                            comp.push(u);
                            stack.push(u);
                        }
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let colors: Vec<u8> = (0..=self.d).collect();
        self.components_on_colors(&colors)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Maximal connected subgraphs over colors `1..=d`: the bubbles of a gluing.
    pub fn bubble_components(&self) -> Vec<Vec<usize>> {
        let colors: Vec<u8> = (1..=self.d).collect();
        self.components_on_colors(&colors)
    }

    /// Extract the induced subgraph on `vertices` keeping only `colors`,
    /// relabelling vertices densely in sorted order.
    pub fn induced(&self, vertices: &[usize], colors: &[u8], has_color_zero: bool) -> Result<Self> {
        let mut sorted: Vec<usize> = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let index_of = |v: usize| sorted.binary_search(&v).ok();
        let shades = sorted.iter().map(|&v| self.shades[v]).collect();
        let keep: BTreeSet<u8> = colors.iter().copied().collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            if !keep.contains(&e.color) {
                continue;
            }
            if let (Some(w), Some(b)) = (index_of(e.white), index_of(e.black)) {
                edges.push(Edge { color: e.color, white: w, black: b });
            }
        }
        Self::new(self.d, shades, edges, has_color_zero)
    }

    /// Apply a relabelling `perm[old] = new` (a bijection on vertex ids).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_vertices();
        if perm.len() != n {
            return Err(Error::BadParameter("relabelling has wrong length".into()));
        }
        let mut shades = vec![Shade::White; n];
        for v in 0..n {
            shades[perm[v]] = self.shades[v];
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { color: e.color, white: perm[e.white], black: perm[e.black] })
            .collect();
        Self::new(self.d, shades, edges, self.has_color_zero)
    }

    /// Return a copy with extra color-0 edges `(white, black)` added.
    pub fn with_zero_edges(&self, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = self.edges.clone();
        for &(w, b) in pairs {
            edges.push(Edge { color: 0, white: w, black: b });
        }
        Self::new(self.d, self.shades.clone(), edges, true)
    }

    /// Report-style invariant check.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.has_color_zero && self.zero_edge_count() > 0 {
            violations.push(Violation::UnexpectedColorZero);
        }
        for v in 0..self.num_vertices() {
            for c in 1..=self.d {
                if self.adj[v][c as usize].is_none() {
                    violations.push(Violation::MissingColor { vertex: v, color: c });
                }
            }
        }
        for comp in self.components() {
            let blacks = comp.iter().filter(|&&v| self.shades[v] == Shade::Black).count();
            if 2 * blacks != comp.len() {
                violations.push(Violation::ShadeImbalance { component_min_vertex: comp[0] });
            }
        }
        ValidationReport { violations }
    }

    /// Census of the `(0c)` faces, plus the open alternating paths of an
    /// open graph (they are exactly the boundary-bubble edges).
    pub fn faces(&self) -> Result<FaceCensus> {
        if !self.has_color_zero && self.zero_edge_count() > 0 {
            return Err(Error::UnexpectedColorZero);
        }
        let n = self.num_vertices();
        let mut per_color = vec![0usize; self.d as usize];
        let mut open_paths = Vec::new();
        for c in 1..=self.d {
            let mut visited = vec![false; n];
            // open paths start at free white vertices and end at free blacks
            for w in 0..n {
                if self.shades[w] != Shade::White || visited[w] || self.adj[w][0].is_some() {
                    continue;
                }
                let mut cur = w;
                visited[cur] = true;
                let black_end = loop {
                    let b = self.neighbor(cur, c).ok_or_else(|| {
                        Error::InvalidGraph(format!("vertex {cur} missing color {c}"))
                    })?;
                    visited[b] = true;
                    match self.neighbor(b, 0) {
                        Some(next_w) => {
                            visited[next_w] = true;
                            cur = next_w;
                        }
                        None => break b,
                    }
                };
                open_paths.push(OpenPath { color: c, white_end: w, black_end });
            }
            // everything else lies on closed alternating cycles
            for start in 0..n {
                if visited[start] || self.shades[start] != Shade::White {
                    continue;
                }
                per_color[c as usize - 1] += 1;
                let mut cur = start;
                loop {
                    visited[cur] = true;
                    let b = self.neighbor(cur, 0).ok_or_else(|| {
                        Error::InvalidGraph(format!("vertex {cur} missing color 0"))
                    })?;
                    visited[b] = true;
                    let w = self.neighbor(b, c).ok_or_else(|| {
                        Error::InvalidGraph(format!("vertex {b} missing color {c}"))
                    })?;
                    if w == start {
                        break;
                    }
                    cur = w;
                }
            }
        }
        Ok(FaceCensus { d: self.d, per_color, open_paths })
    }

    /// Gurau degree `ω(G) = d − Σ_c F_0c + (d−1)(E − b)` of a closed
    /// connected gluing, with `b` the number of bubbles.
    pub fn gurau_degree(&self) -> Result<i64> {
        if !self.is_closed() {
            return Err(Error::NotClosed("the Gurau degree is defined for closed gluings".into()));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let census = self.faces()?;
        let f = census.total() as i64;
        let e = self.zero_edge_count() as i64;
        let b = self.bubble_components().len() as i64;
        Ok(self.d as i64 - f + (self.d as i64 - 1) * (e - b))
    }

    /// Boundary bubble of an open gluing: vertices are the free vertices,
    /// edges are the open `(0c)` paths.
    pub fn boundary_bubble(&self) -> Result<ColoredGraph> {
        let free = self.free_vertices();
        if free.is_empty() {
            return Err(Error::NotOpen);
        }
        let census = self.faces()?;
        let index_of = |v: usize| free.binary_search(&v).unwrap();
        let shades = free.iter().map(|&v| self.shades[v]).collect();
        let edges = census
            .open_paths()
            .iter()
            .map(|p| Edge { color: p.color, white: index_of(p.white_end), black: index_of(p.black_end) })
            .collect();
        let boundary = Self::bubble(self.d, shades, edges)?;
        if !boundary.validate().passed() {
            return Err(Error::InvalidGraph(
                "open paths do not assemble into a regular bubble".into(),
            ));
        }
        Ok(boundary)
    }

    /// Deterministic isomorphism-invariant key: two graphs get equal keys
    /// iff they are related by a color- and shade-preserving isomorphism.
    pub fn canonical_key(&self) -> String {
        canon::canonical_key(self)
    }

    /// The relabelling realising the canonical key: `perm[old] = new`.
    pub fn canonical_labeling(&self) -> Vec<usize> {
        canon::canonical_labeling(self)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serialisation cannot fail")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&GraphJson::from(self)).expect("graph serialisation cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(s)?;
        raw.into_graph()
    }
}

/// On-disk format. Vertex ids are dense nonnegative integers; parsing and
/// re-serialising a graph with sorted edge lists is byte-stable.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    d: u8,
    vertices: Vec<VertexJson>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    shade: Shade,
}

impl From<&ColoredGraph> for GraphJson {
    fn from(g: &ColoredGraph) -> Self {
        GraphJson {
            d: g.d,
            vertices: (0..g.num_vertices())
                .map(|id| VertexJson { id, shade: g.shades[id] })
                .collect(),
            edges: g.edges.clone(),
        }
    }
}

impl GraphJson {
    fn into_graph(self) -> Result<ColoredGraph> {
        let n = self.vertices.len();
        let mut shades = vec![None; n];
        for v in &self.vertices {
            if v.id >= n {
                return Err(Error::InvalidGraph(format!(
                    "vertex ids must be dense 0..{n}, got {}",
                    v.id
                )));
            }
            if shades[v.id].replace(v.shade).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
            }
        }
        let shades = shades.into_iter().map(Option::unwrap).collect();
        let has_zero = self.edges.iter().any(|e| e.color == 0);
        ColoredGraph::new(self.d, shades, self.edges, has_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnexpectedColorZero,
    MissingColor { vertex: usize, color: u8 },
    ShadeImbalance { component_min_vertex: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UnexpectedColorZero => {
                write!(f, "color-0 edges present on a graph not flagged for color 0")
            }
            Violation::MissingColor { vertex, color } => {
                write!(f, "vertex {vertex} missing color {color}")
            }
            Violation::ShadeImbalance { component_min_vertex } => {
                write!(f, "component containing vertex {component_min_vertex} has unequal shade counts")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// An open alternating `(0c)` path between two free vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenPath {
    pub color: u8,
    pub white_end: usize,
    pub black_end: usize,
}

/// Face counts per color pair `(0, c)`.
#[derive(Debug, Clone)]
pub struct FaceCensus {
    d: u8,
    per_color: Vec<usize>,
    open_paths: Vec<OpenPath>,
}

impl FaceCensus {
    /// `F_0c`, the number of closed cycles alternating colors 0 and `c`.
    pub fn f_0c(&self, c: u8) -> usize {
        assert!(c >= 1 && c <= self.d, "face color out of range");
        self.per_color[c as usize - 1]
    }

    /// Total face count `F = Σ_c F_0c`.
    pub fn total(&self) -> usize {
        self.per_color.iter().sum()
    }

    pub fn per_color(&self) -> &[usize] {
        &self.per_color
    }

    pub fn open_paths(&self) -> &[OpenPath] {
        &self.open_paths
    }
}

/// The exponent bookkeeping of a gluing: `δ = F − (d−1)E + Σ_i s_i b_i`.
#[derive(Debug, Clone)]
pub struct GraphPower {
    pub faces: i64,
    pub zero_edges: i64,
    /// `(count, enhancement)` per bubble type.
    pub bubbles: Vec<(i64, Rat)>,
    pub delta: Rat,
}

impl GraphPower {
    pub fn new(d: u8, faces: i64, zero_edges: i64, bubbles: Vec<(i64, Rat)>) -> Self {
        let mut delta = Rat::from_integer((faces - (d as i64 - 1) * zero_edges).into());
        for (count, s) in &bubbles {
            delta += s * Rat::from_integer((*count).into());
        }
        GraphPower { faces, zero_edges, bubbles, delta }
    }

    /// Power of a closed gluing with one bubble type of enhancement `s`.
    pub fn of_uniform(g: &ColoredGraph, s: &Rat) -> Result<Self> {
        if !g.is_closed() {
            return Err(Error::NotClosed("graph powers are defined for closed gluings".into()));
        }
        let census = g.faces()?;
        let b = g.bubble_components().len() as i64;
        Ok(Self::new(
            g.d(),
            census.total() as i64,
            g.zero_edge_count() as i64,
            vec![(b, s.clone())],
        ))
    }

    pub fn delta_is_at_most(&self, bound: i64) -> bool {
        self.delta <= Rat::from_integer(bound.into())
    }
}

impl Default for GraphPower {
    fn default() -> Self {
        GraphPower { faces: 0, zero_edges: 0, bubbles: Vec::new(), delta: Rat::zero() }
    }
}
