//! Bubble constructors (melonic and necklace families), melonicity testing
//! and pairing machinery.

use crate::graph::{ColoredGraph, Edge, Shade};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How a bubble was constructed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BubbleFamily {
    /// Iterated dipole insertions starting from the 2-vertex bubble.
    Melonic { insertions: Vec<(usize, u8)> },
    /// Cycle of `2p` vertices, adjacent vertices joined by `d/2` parallel
    /// edges alternating the two halves of a color split.
    Necklace { p: usize, split: Vec<u8> },
    Custom,
}

/// A constructed bubble together with its construction parameters.
#[derive(Debug, Clone)]
pub struct BubbleSpec {
    pub family: BubbleFamily,
    pub graph: ColoredGraph,
}

impl BubbleSpec {
    pub fn d(&self) -> u8 {
        self.graph.d()
    }

    pub fn is_melonic(&self) -> Result<bool> {
        is_melonic(&self.graph)
    }
}

/// Melonic bubble from a sequence of dipole insertions. Each step names an
/// edge (by index into the current sorted edge list) and its color; the
/// inserted dipole carries the `d−1` complementary colors.
pub fn melonic_bubble(d: u8, insertions: &[(usize, u8)]) -> Result<BubbleSpec> {
    let mut g = ColoredGraph::two_vertex_bubble(d);
    for &(edge_idx, color) in insertions {
        let edge = *g.edges().get(edge_idx).ok_or(Error::NoSuchEdge(edge_idx))?;
        if edge.color != color {
            return Err(Error::BadParameter(format!(
                "edge {edge_idx} has color {}, not {color}",
                edge.color
            )));
        }
        let n = g.num_vertices();
        let (new_white, new_black) = (n, n + 1);
        let mut shades = g.shades().to_vec();
        shades.push(Shade::White);
        shades.push(Shade::Black);
        let mut edges: Vec<Edge> = g.edges().iter().filter(|e| **e != edge).copied().collect();
        edges.push(Edge { color, white: edge.white, black: new_black });
        edges.push(Edge { color, white: new_white, black: edge.black });
        for c in 1..=d {
            if c != color {
                edges.push(Edge { color: c, white: new_white, black: new_black });
            }
        }
        g = ColoredGraph::bubble(d, shades, edges)?;
    }
    Ok(BubbleSpec { family: BubbleFamily::Melonic { insertions: insertions.to_vec() }, graph: g })
}

/// The 4-vertex melonic bubble `B_c`.
pub fn quartic_melonic(d: u8, color: u8) -> Result<BubbleSpec> {
    if color == 0 || color > d {
        return Err(Error::BadParameter(format!("color {color} out of range 1..={d}")));
    }
    melonic_bubble(d, &[(color as usize - 1, color)])
}

/// Necklace bubble: a cycle of `2p` vertices, adjacent vertices joined by
/// `d/2` parallel edges, alternating the two halves of the color split.
pub fn necklace_bubble(d: u8, p: usize, split: &[u8]) -> Result<BubbleSpec> {
    if !d.is_multiple_of(2) {
        return Err(Error::BadParameter(format!("necklaces need even d, got {d}")));
    }
    if p == 0 {
        return Err(Error::BadParameter("necklace length p must be >= 1".into()));
    }
    let mut split: Vec<u8> = split.to_vec();
    split.sort_unstable();
    split.dedup();
    if split.len() != d as usize / 2 || split.iter().any(|&c| c == 0 || c > d) {
        return Err(Error::BadParameter(format!(
            "split must be half of the colors 1..={d}, got {split:?}"
        )));
    }
    let complement: Vec<u8> = (1..=d).filter(|c| !split.contains(c)).collect();
    let mut shades = Vec::with_capacity(2 * p);
    for _ in 0..p {
        shades.push(Shade::White);
        shades.push(Shade::Black);
    }
    let mut edges = Vec::new();
    for i in 0..p {
        let (w, b, w_next) = (2 * i, 2 * i + 1, 2 * ((i + 1) % p));
        for &c in &split {
            edges.push(Edge { color: c, white: w, black: b });
        }
        for &c in &complement {
            edges.push(Edge { color: c, white: w_next, black: b });
        }
    }
    let graph = ColoredGraph::bubble(d, shades, edges)?;
    Ok(BubbleSpec { family: BubbleFamily::Necklace { p, split }, graph })
}

/// The quartic necklace of the dominant-map analysis: `d = 4`, `p = 2`.
pub fn quartic_necklace(split: &[u8]) -> Result<BubbleSpec> {
    necklace_bubble(4, 2, split)
}

/// Melonicity: true iff iterated removal of maximal dipoles reduces the
/// graph to the 2-vertex one. Works on bubbles (colors `1..=d`) and on
/// closed gluings (colors `0..=d`): a dipole is a pair of vertices joined by
/// all but one of the relevant colors.
pub fn is_melonic(g: &ColoredGraph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let colors: Vec<u8> = if g.has_color_zero() {
        if !g.is_closed() {
            return Err(Error::NotClosed(
                "melonicity of gluings is defined for closed graphs".into(),
            ));
        }
        (0..=g.d()).collect()
    } else {
        (1..=g.d()).collect()
    };
    if !g.validate().passed() {
        return Err(Error::InvalidGraph("melonicity needs a valid regular graph".into()));
    }
    Ok(reduce_by_dipoles(g.clone(), &colors))
}

fn dipoles(g: &ColoredGraph, colors: &[u8]) -> Vec<(usize, usize, u8)> {
    let mut found = Vec::new();
    for w in 0..g.num_vertices() {
        if g.shade(w) != Shade::White {
            continue;
        }
        // group this white vertex's edges by black endpoint
        for b in 0..g.num_vertices() {
            if g.shade(b) != Shade::Black {
                continue;
            }
            let joining: Vec<u8> =
                colors.iter().copied().filter(|&c| g.neighbor(w, c) == Some(b)).collect();
            if joining.len() + 1 == colors.len() {
                let missing = colors.iter().copied().find(|c| !joining.contains(c)).unwrap();
                found.push((w, b, missing));
            }
        }
    }
    found
}

fn contract_dipole(g: &ColoredGraph, w: usize, b: usize, missing: u8) -> ColoredGraph {
    let far_black = g.neighbor(w, missing).expect("regular graph");
    let far_white = g.neighbor(b, missing).expect("regular graph");
    let keep: Vec<usize> = (0..g.num_vertices()).filter(|&v| v != w && v != b).collect();
    let idx = |v: usize| keep.binary_search(&v).unwrap();
    let shades = keep.iter().map(|&v| g.shade(v)).collect();
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| e.white != w && e.black != b)
        .map(|e| Edge { color: e.color, white: idx(e.white), black: idx(e.black) })
        .collect();
    edges.push(Edge { color: missing, white: idx(far_white), black: idx(far_black) });
    ColoredGraph::new(g.d(), shades, edges, g.has_color_zero())
        .expect("dipole contraction preserves validity")
}

/// Greedy elimination first; on failure, backtrack over every dipole choice
/// so that no reduction order is missed.
fn reduce_by_dipoles(g: ColoredGraph, colors: &[u8]) -> bool {
    if g.num_vertices() == 2 {
        return colors.iter().all(|&c| g.neighbor(0, c).is_some() || g.neighbor(1, c).is_some());
    }
    for (w, b, missing) in dipoles(&g, colors) {
        if reduce_by_dipoles(contract_dipole(&g, w, b, missing), colors) {
            return true;
        }
    }
    false
}

/// A black/white perfect matching on a bubble's vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    /// `(white, black)` pairs, sorted by white vertex.
    pub pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Pairing { pairs }
    }

    pub fn check(&self, g: &ColoredGraph) -> Result<()> {
        let n = g.num_vertices();
        let mut seen = vec![false; n];
        for &(w, b) in &self.pairs {
            if w >= n || b >= n || g.shade(w) != Shade::White || g.shade(b) != Shade::Black {
                return Err(Error::BadParameter(format!("pair ({w}, {b}) is not white/black")));
            }
            for v in [w, b] {
                if seen[v] {
                    return Err(Error::BadParameter(format!("vertex {v} appears in two pairs")));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::BadParameter("pairing does not cover every vertex".into()));
        }
        Ok(())
    }

    /// The colors joining each pair's two vertices inside the bubble.
    pub fn internal_colors(&self, g: &ColoredGraph) -> Vec<Vec<u8>> {
        self.pairs
            .iter()
            .map(|&(w, b)| (1..=g.d()).filter(|&c| g.neighbor(w, c) == Some(b)).collect())
            .collect()
    }

    /// `B^π`: the bubble closed by one color-0 edge inside each pair.
    pub fn closure(&self, g: &ColoredGraph) -> Result<ColoredGraph> {
        self.check(g)?;
        g.with_zero_edges(&self.pairs)
    }
}

/// All `p!` pairings of a bubble.
pub fn all_pairings(g: &ColoredGraph) -> Vec<Pairing> {
    let whites: Vec<usize> =
        (0..g.num_vertices()).filter(|&v| g.shade(v) == Shade::White).collect();
    let blacks: Vec<usize> =
        (0..g.num_vertices()).filter(|&v| g.shade(v) == Shade::Black).collect();
    let mut result = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; blacks.len()];
    permute(&whites, &blacks, 0, &mut used, &mut current, &mut result);
    result
}

fn permute(
    whites: &[usize],
    blacks: &[usize],
    i: usize,
    used: &mut Vec<bool>,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Pairing>,
) {
    if i == whites.len() {
        out.push(Pairing::new(current.clone()));
        return;
    }
    for j in 0..blacks.len() {
        if !used[j] {
            used[j] = true;
            current.push((whites[i], blacks[j]));
            permute(whites, blacks, i + 1, used, current, out);
            current.pop();
            used[j] = false;
        }
    }
}

pub const PAIRING_ENUMERATION_CAP: usize = 8;

/// Exhaustive search for a pairing maximizing `F(B^π)`; ties are broken by
/// the canonical key of the closure, so the result is deterministic.
pub fn best_pairing(g: &ColoredGraph) -> Result<(Pairing, usize)> {
    best_pairing_capped(g, PAIRING_ENUMERATION_CAP)
}

pub fn best_pairing_capped(g: &ColoredGraph, cap: usize) -> Result<(Pairing, usize)> {
    let p = g.black_count();
    if p != g.white_count() {
        return Err(Error::InvalidGraph("pairings need equal shade counts".into()));
    }
    if p > cap {
        return Err(Error::PairingCapExceeded { got: p, cap });
    }
    let mut best: Option<(Pairing, usize, String)> = None;
    for pairing in all_pairings(g) {
        let closure = pairing.closure(g)?;
        let faces = closure.faces()?.total();
        let key = closure.canonical_key();
        let better = match &best {
            None => true,
            Some((_, best_faces, best_key)) => {
                faces > *best_faces || (faces == *best_faces && key < *best_key)
            }
        };
        if better {
            best = Some((pairing, faces, key));
        }
    }
    let (pairing, faces, _) = best.expect("a bubble has at least one pairing");
    Ok((pairing, faces))
}
