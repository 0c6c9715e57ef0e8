//! Dart-based combinatorial maps and the bijection between closed gluings
//! and stuffed Walsh maps.
//!
//! Darts are numbered from 1; `sigma` is the counter-clockwise successor at
//! a vertex, `alpha` the edge involution, faces are orbits of `σ∘α`. Edges
//! carry a color set, vertices a kind: blue vertices stand for pairs of a
//! pairing, box vertices for fixed-color cycles, black vertices for cycles
//! of pairs and color-0 edges, plain vertices for collapsed bubble maps.

use crate::bubbles::Pairing;
use crate::canon;
use crate::graph::{ColoredGraph, Edge, Shade};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Dart = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Blue,
    Box(u8),
    Black,
    Plain,
}

impl VertexKind {
    fn label(&self) -> String {
        match self {
            VertexKind::Blue => "blue".into(),
            VertexKind::Box(c) => format!("box:{c}"),
            VertexKind::Black => "black".into(),
            VertexKind::Plain => "plain".into(),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "blue" => Ok(VertexKind::Blue),
            "black" => Ok(VertexKind::Black),
            "plain" => Ok(VertexKind::Plain),
            _ => s
                .strip_prefix("box:")
                .and_then(|c| c.parse().ok())
                .map(VertexKind::Box)
                .ok_or_else(|| Error::MalformedMap(format!("unknown vertex kind {s}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CombinatorialMap {
    /// `sigma[d]` for darts `1..=2E`; index 0 unused.
    sigma: Vec<Dart>,
    alpha: Vec<Dart>,
    vertex_of: Vec<usize>,
    /// Sorted color set per dart (shared by the two darts of an edge).
    colors: Vec<Vec<u8>>,
    kinds: Vec<VertexKind>,
    root: Option<Dart>,
}

/// Incremental construction: edges append darts to each endpoint's rotation
/// in call order, which therefore *is* the counter-clockwise order.
pub struct MapBuilder {
    kinds: Vec<VertexKind>,
    rotations: Vec<Vec<Dart>>,
    dart_vertex: Vec<usize>,
    dart_colors: Vec<Vec<u8>>,
}

impl MapBuilder {
    pub fn new() -> Self {
        MapBuilder { kinds: Vec::new(), rotations: Vec::new(), dart_vertex: Vec::new(), dart_colors: Vec::new() }
    }

    pub fn add_vertex(&mut self, kind: VertexKind) -> usize {
        self.kinds.push(kind);
        self.rotations.push(Vec::new());
        self.kinds.len() - 1
    }

    pub fn add_edge(&mut self, v: usize, u: usize, mut colors: Vec<u8>) -> (Dart, Dart) {
        colors.sort_unstable();
        colors.dedup();
        let d1 = self.dart_vertex.len() + 1;
        let d2 = d1 + 1;
        self.dart_vertex.push(v);
        self.dart_vertex.push(u);
        self.dart_colors.push(colors.clone());
        self.dart_colors.push(colors);
        self.rotations[v].push(d1);
        self.rotations[u].push(d2);
        (d1, d2)
    }

    pub fn build(self, root: Option<Dart>) -> CombinatorialMap {
        let n_darts = self.dart_vertex.len();
        let mut sigma = vec![0; n_darts + 1];
        for rot in &self.rotations {
            for (i, &d) in rot.iter().enumerate() {
                sigma[d] = rot[(i + 1) % rot.len()];
            }
        }
        let mut alpha = vec![0; n_darts + 1];
        for d in (1..=n_darts).step_by(2) {
            alpha[d] = d + 1;
            alpha[d + 1] = d;
        }
        let mut colors = vec![Vec::new(); n_darts + 1];
        let mut vertex_of = vec![0; n_darts + 1];
        for d in 1..=n_darts {
            colors[d] = self.dart_colors[d - 1].clone();
            vertex_of[d] = self.dart_vertex[d - 1];
        }
        CombinatorialMap { sigma, alpha, vertex_of, colors, kinds: self.kinds, root }
    }
}

impl Default for MapBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl CombinatorialMap {
    /// Build from an explicit rotation permutation over darts `1..=2E`
    /// (index 0 unused); `alpha` pairs dart `2i−1` with dart `2i`, and edge
    /// `i` carries `edge_colors[i−1]`. Vertices are the sigma orbits, all of
    /// the given kind.
    pub fn from_rotation_system(
        sigma: Vec<Dart>,
        edge_colors: &[Vec<u8>],
        kind: VertexKind,
        root: Option<Dart>,
    ) -> Result<Self> {
        let n = sigma.len().saturating_sub(1);
        if !n.is_multiple_of(2) || n != 2 * edge_colors.len() {
            return Err(Error::MalformedMap("need one color set per dart pair".into()));
        }
        let mut hit = vec![false; n + 1];
        for d in 1..=n {
            let img = sigma[d];
            if img == 0 || img > n || hit[img] {
                return Err(Error::MalformedMap("sigma is not a permutation".into()));
            }
            hit[img] = true;
        }
        let mut alpha = vec![0; n + 1];
        let mut colors = vec![Vec::new(); n + 1];
        for i in 0..n / 2 {
            let (d1, d2) = (2 * i + 1, 2 * i + 2);
            alpha[d1] = d2;
            alpha[d2] = d1;
            let mut set = edge_colors[i].clone();
            set.sort_unstable();
            set.dedup();
            colors[d1] = set.clone();
            colors[d2] = set;
        }
        let mut vertex_of = vec![usize::MAX; n + 1];
        let mut kinds = Vec::new();
        for orbit in orbits(n, |d| sigma[d]) {
            for &d in &orbit {
                vertex_of[d] = kinds.len();
            }
            kinds.push(kind);
        }
        if let Some(r) = root {
            if r == 0 || r > n {
                return Err(Error::MalformedMap("root dart out of range".into()));
            }
        }
        Ok(CombinatorialMap { sigma, alpha, vertex_of, colors, kinds, root })
    }

    /// A map with one vertex and no edges.
    pub fn vertex_only(kind: VertexKind) -> Self {
        CombinatorialMap {
            sigma: vec![0],
            alpha: vec![0],
            vertex_of: vec![usize::MAX],
            colors: vec![Vec::new()],
            kinds: vec![kind],
            root: None,
        }
    }

    pub fn num_darts(&self) -> usize {
        self.sigma.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.num_darts() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.kinds.len()
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[d]
    }

    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub fn root(&self) -> Option<Dart> {
        self.root
    }

    pub fn edge_colors(&self, d: Dart) -> &[u8] {
        &self.colors[d]
    }

    /// Darts at `v` in rotation order.
    pub fn darts_at(&self, v: usize) -> Vec<Dart> {
        let mut first = None;
        for d in 1..=self.num_darts() {
            if self.vertex_of[d] == v {
                first = Some(d);
                break;
            }
        }
        let Some(start) = first else { return Vec::new() };
        let mut out = vec![start];
        let mut cur = self.sigma[start];
        while cur != start {
            out.push(cur);
            cur = self.sigma[cur];
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts_at(v).len()
    }

    /// Orbits of `σ∘α`: the faces of the full map.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        orbits(self.num_darts(), |d| self.sigma[self.alpha[d]])
    }

    /// Connected components as (vertex set, dart set); isolated vertices form
    /// their own components.
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<Dart>)> {
        let n = self.num_vertices();
        let mut comp_of = vec![usize::MAX; n];
        let mut comps: Vec<(Vec<usize>, Vec<Dart>)> = Vec::new();
        for start in 0..n {
            if comp_of[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            comps.push((Vec::new(), Vec::new()));
            let mut stack = vec![start];
            comp_of[start] = id;
            while let Some(v) = stack.pop() {
                comps[id].0.push(v);
                for d in self.darts_at(v) {
                    comps[id].1.push(d);
                    let u = self.vertex_of[self.alpha[d]];
                    if comp_of[u] == usize::MAX {
                        comp_of[u] = id;
                        stack.push(u);
                    }
                }
            }
        }
        for (vs, ds) in &mut comps {
            vs.sort_unstable();
            ds.sort_unstable();
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Genus per component from Euler's relation; errors on a non-integer
    /// or negative genus, which would mean a malformed rotation system.
    pub fn genus_per_component(&self) -> Result<Vec<i64>> {
        let faces = self.faces();
        let mut face_comp: BTreeMap<Dart, usize> = BTreeMap::new();
        let comps = self.components();
        for (id, (_, darts)) in comps.iter().enumerate() {
            for &d in darts {
                face_comp.insert(d, id);
            }
        }
        let mut f_count = vec![0i64; comps.len()];
        for face in &faces {
            f_count[face_comp[&face[0]]] += 1;
        }
        let mut genera = Vec::new();
        for (id, (vs, ds)) in comps.iter().enumerate() {
            let v = vs.len() as i64;
            let e = (ds.len() / 2) as i64;
            let f = if ds.is_empty() { 1 } else { f_count[id] };
            let euler = v - e + f;
            if euler > 2 || (2 - euler) % 2 != 0 {
                return Err(Error::MalformedMap(format!(
                    "component has Euler characteristic {euler}"
                )));
            }
            genera.push((2 - euler) / 2);
        }
        Ok(genera)
    }

    pub fn genus_total(&self) -> Result<i64> {
        Ok(self.genus_per_component()?.iter().sum())
    }

    /// Submap with the darts satisfying `keep`, rotation order induced.
    /// All vertices are retained (possibly isolated).
    pub fn submap(&self, keep: impl Fn(Dart) -> bool) -> CombinatorialMap {
        let kept: Vec<Dart> = (1..=self.num_darts()).filter(|&d| keep(d) && keep(self.alpha[d])).collect();
        // renumber so that alpha pairs stay adjacent: rebuild edge by edge
        let mut pairs = Vec::new();
        let mut seen = BTreeSet::new();
        for &d in &kept {
            if seen.contains(&d) {
                continue;
            }
            let a = self.alpha[d];
            seen.insert(d);
            seen.insert(a);
            pairs.push((d, a));
        }
        let mut new_id = BTreeMap::new();
        for (i, &(d, a)) in pairs.iter().enumerate() {
            new_id.insert(d, 2 * i + 1);
            new_id.insert(a, 2 * i + 2);
        }
        let n_darts = 2 * pairs.len();
        let mut sigma = vec![0; n_darts + 1];
        let mut alpha = vec![0; n_darts + 1];
        let mut vertex_of = vec![0; n_darts + 1];
        let mut colors = vec![Vec::new(); n_darts + 1];
        for (&old, &new) in &new_id {
            // next kept dart in the rotation at this vertex
            let mut nxt = self.sigma[old];
            while !new_id.contains_key(&nxt) {
                nxt = self.sigma[nxt];
            }
            sigma[new] = new_id[&nxt];
            alpha[new] = new_id[&self.alpha[old]];
            vertex_of[new] = self.vertex_of[old];
            colors[new] = self.colors[old].clone();
        }
        CombinatorialMap {
            sigma,
            alpha,
            vertex_of,
            colors,
            kinds: self.kinds.clone(),
            root: None,
        }
    }

    /// Submap of the edges whose color set contains `c`.
    pub fn color_submap(&self, c: u8) -> CombinatorialMap {
        self.submap(|d| self.colors[d].contains(&c))
    }

    /// Face count of the color-`c` submap in the stuffed-map convention:
    /// face orbits over the retained darts, plus one face for every black
    /// vertex none of whose edges carries `c` (its alternating cycle stays
    /// internal to the pairs it traverses).
    pub fn color_face_count(&self, c: u8) -> usize {
        let sub = self.color_submap(c);
        let orbit_faces = sub.faces().len();
        let mut covered = vec![false; self.num_vertices()];
        for d in 1..=sub.num_darts() {
            covered[sub.vertex_of[d]] = true;
        }
        let lonely_black = (0..self.num_vertices())
            .filter(|&v| matches!(self.kinds[v], VertexKind::Black) && !covered[v])
            .count();
        orbit_faces + lonely_black
    }

    /// Cyclomatic number `E − V + C` of the subgraph spanned by the edges
    /// whose color set contains `c` (isolated vertices are immaterial).
    pub fn color_cyclomatic(&self, c: u8) -> i64 {
        let sub = self.color_submap(c);
        let e = sub.num_edges() as i64;
        let touched: BTreeSet<usize> = (1..=sub.num_darts()).map(|d| sub.vertex_of[d]).collect();
        let v = touched.len() as i64;
        let comps = sub
            .components()
            .iter()
            .filter(|(_, darts)| !darts.is_empty())
            .count() as i64;
        e - v + comps
    }

    /// Sum of the component genera of the color-`c` submap.
    pub fn color_genus(&self, c: u8) -> Result<i64> {
        self.color_submap(c).genus_total()
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.num_edges() + 1 == self.num_vertices()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MapJson::from(self)).expect("map serialisation cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: MapJson = serde_json::from_str(s)?;
        raw.into_map()
    }
}

fn orbits(n_darts: usize, next: impl Fn(Dart) -> Dart) -> Vec<Vec<Dart>> {
    let mut seen = vec![false; n_darts + 1];
    let mut out = Vec::new();
    for start in 1..=n_darts {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut cur = next(start);
        while cur != start {
            seen[cur] = true;
            orbit.push(cur);
            cur = next(cur);
        }
        out.push(orbit);
    }
    out
}

/// On-disk map format: permutations as dart-indexed arrays (1-based values).
#[derive(Serialize, Deserialize)]
struct MapJson {
    darts: usize,
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    colors: BTreeMap<String, Vec<u8>>,
    kinds: BTreeMap<String, String>,
    root: Option<usize>,
}

impl From<&CombinatorialMap> for MapJson {
    fn from(m: &CombinatorialMap) -> Self {
        // vertex identity in the JSON is implied by sigma orbits, so number
        // vertices by smallest incident dart (isolated vertices last)
        let mut new_id = vec![usize::MAX; m.num_vertices()];
        let mut next = 0usize;
        for d in 1..=m.num_darts() {
            let v = m.vertex_of[d];
            if new_id[v] == usize::MAX {
                new_id[v] = next;
                next += 1;
            }
        }
        for id in new_id.iter_mut() {
            if *id == usize::MAX {
                *id = next;
                next += 1;
            }
        }
        MapJson {
            darts: m.num_darts(),
            sigma: m.sigma[1..].to_vec(),
            alpha: m.alpha[1..].to_vec(),
            colors: (1..=m.num_darts()).map(|d| (d.to_string(), m.colors[d].clone())).collect(),
            kinds: (0..m.num_vertices())
                .map(|v| (new_id[v].to_string(), m.kinds[v].label()))
                .collect(),
            root: m.root,
        }
    }
}

impl MapJson {
    fn into_map(self) -> Result<CombinatorialMap> {
        let n = self.darts;
        if self.sigma.len() != n || self.alpha.len() != n {
            return Err(Error::MalformedMap("sigma/alpha length mismatch".into()));
        }
        let mut sigma = vec![0; n + 1];
        let mut alpha = vec![0; n + 1];
        for d in 1..=n {
            sigma[d] = self.sigma[d - 1];
            alpha[d] = self.alpha[d - 1];
            if sigma[d] == 0 || sigma[d] > n || alpha[d] == 0 || alpha[d] > n {
                return Err(Error::MalformedMap("dart out of range".into()));
            }
        }
        // sigma must be a permutation, alpha a fixed-point-free involution
        let mut hit = vec![false; n + 1];
        for d in 1..=n {
            if hit[sigma[d]] {
                return Err(Error::MalformedMap("sigma is not a permutation".into()));
            }
            hit[sigma[d]] = true;
            if alpha[d] == d || alpha[alpha[d]] != d {
                return Err(Error::MalformedMap("alpha is not a fixed-point-free involution".into()));
            }
        }
        let num_vertices = self.kinds.len();
        let mut kinds = vec![VertexKind::Plain; num_vertices];
        for (k, v) in &self.kinds {
            let idx: usize = k
                .parse()
                .map_err(|_| Error::MalformedMap(format!("bad vertex id {k}")))?;
            if idx >= num_vertices {
                return Err(Error::MalformedMap("vertex ids must be dense".into()));
            }
            kinds[idx] = VertexKind::parse(v)?;
        }
        let mut colors = vec![Vec::new(); n + 1];
        for (k, set) in &self.colors {
            let d: usize =
                k.parse().map_err(|_| Error::MalformedMap(format!("bad dart id {k}")))?;
            if d == 0 || d > n {
                return Err(Error::MalformedMap("color entry for unknown dart".into()));
            }
            let mut set = set.clone();
            set.sort_unstable();
            colors[d] = set;
        }
        for d in 1..=n {
            if colors[d] != colors[alpha[d]] {
                return Err(Error::MalformedMap(format!(
                    "darts {d} and {} disagree on the edge color set",
                    alpha[d]
                )));
            }
        }
        // vertices = orbits of sigma
        let mut vertex_of = vec![usize::MAX; n + 1];
        let mut next_free = 0usize;
        for orbit in orbits(n, |d| sigma[d]) {
            for &d in &orbit {
                vertex_of[d] = next_free;
            }
            next_free += 1;
        }
        if next_free > num_vertices {
            return Err(Error::MalformedMap(format!(
                "{next_free} sigma orbits but only {num_vertices} vertex kinds"
            )));
        }
        Ok(CombinatorialMap { sigma, alpha, vertex_of, colors, kinds, root: self.root })
    }
}

/// Pair-level description shared by the bubble map and the stuffed map.
struct PairScheme {
    /// Internal colors per pair.
    internal: Vec<Vec<u8>>,
    /// For each color, the cycles of `B_π` as ordered pair-index lists.
    cycles: Vec<(u8, Vec<usize>)>,
}

fn pair_scheme(b: &ColoredGraph, pairing: &Pairing) -> Result<PairScheme> {
    pairing.check(b)?;
    let internal = pairing.internal_colors(b);
    let pair_of_black: BTreeMap<usize, usize> =
        pairing.pairs.iter().enumerate().map(|(i, &(_, bl))| (bl, i)).collect();
    let mut cycles = Vec::new();
    for c in 1..=b.d() {
        let mut seen = vec![false; pairing.pairs.len()];
        for start in 0..pairing.pairs.len() {
            if seen[start] || internal[start].contains(&c) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                seen[cur] = true;
                cycle.push(cur);
                let white = pairing.pairs[cur].0;
                let to_black = b.neighbor(white, c).ok_or_else(|| {
                    Error::InvalidGraph(format!("vertex {white} missing color {c}"))
                })?;
                cur = pair_of_black[&to_black];
                if cur == start {
                    break;
                }
            }
            cycles.push((c, cycle));
        }
    }
    Ok(PairScheme { internal, cycles })
}

/// The map `M(B, π)`: one blue vertex per pair, one box vertex per
/// fixed-color cycle of `B_π`, box edges in cycle order. Colors around a
/// blue vertex are attached in ascending order (the order between distinct
/// colors there is immaterial and fixed for determinism).
pub fn bubble_map(b: &ColoredGraph, pairing: &Pairing) -> Result<CombinatorialMap> {
    let scheme = pair_scheme(b, pairing)?;
    let mut builder = MapBuilder::new();
    let blues: Vec<usize> =
        (0..pairing.pairs.len()).map(|_| builder.add_vertex(VertexKind::Blue)).collect();
    for (color, cycle) in &scheme.cycles {
        let boxv = builder.add_vertex(VertexKind::Box(*color));
        for &pair in cycle {
            builder.add_edge(boxv, blues[pair], vec![*color]);
        }
    }
    Ok(builder.build(None))
}

/// A stuffed Walsh map: copies of `M(B, π)` joined at black vertices.
#[derive(Debug, Clone)]
pub struct StuffedWalshMap {
    pub map: CombinatorialMap,
    d: u8,
    /// Blue vertex → (copy index, pair index).
    blue_pairs: Vec<(usize, usize)>,
    copies: usize,
}

impl StuffedWalshMap {
    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// `F(W^{(c)})`.
    pub fn face_count(&self, c: u8) -> usize {
        self.map.color_face_count(c)
    }

    /// `F(W) = Σ_c F(W^{(c)})`: the image of the total face count.
    pub fn total_faces(&self) -> usize {
        (1..=self.d).map(|c| self.face_count(c)).sum()
    }

    pub fn blue_count(&self) -> usize {
        self.blue_pairs.len()
    }

    pub fn black_vertices(&self) -> Vec<usize> {
        (0..self.map.num_vertices())
            .filter(|&v| matches!(self.map.kind(v), VertexKind::Black))
            .collect()
    }

    /// The projected map `PW`: every copy of `M(B, π)` collapsed to one
    /// plain vertex, keeping the blue→black edges in blue-vertex order.
    pub fn projected(&self) -> CombinatorialMap {
        let mut builder = MapBuilder::new();
        let plains: Vec<usize> =
            (0..self.copies).map(|_| builder.add_vertex(VertexKind::Plain)).collect();
        let blacks: Vec<usize> = self.black_vertices();
        let black_new: BTreeMap<usize, usize> =
            blacks.iter().map(|&v| (v, builder.add_vertex(VertexKind::Black))).collect();
        // walk black vertices in their rotation order so the cyclic order at
        // black vertices is preserved; plain vertices collect edges in blue order
        let mut pending: Vec<(usize, usize, Vec<u8>, Dart)> = Vec::new();
        for (blue, &(copy, _)) in self.blue_pairs.iter().enumerate() {
            for d in self.map.darts_at(blue) {
                let other = self.map.vertex_of(self.map.alpha(d));
                if matches!(self.map.kind(other), VertexKind::Black) {
                    pending.push((copy, other, self.map.edge_colors(d).to_vec(), d));
                }
            }
        }
        // insert edges grouped by black vertex in its rotation order
        for &bv in &blacks {
            for d in self.map.darts_at(bv) {
                let a = self.map.alpha(d);
                if let Some(pos) = pending.iter().position(|&(_, _, _, pd)| pd == a) {
                    let (copy, _, colors, _) = pending[pos].clone();
                    builder.add_edge(black_new[&bv], plains[copy], colors);
                    pending.remove(pos);
                }
            }
        }
        builder.build(None)
    }
}

/// Forward direction of the bijection: a closed gluing whose bubbles are all
/// isomorphic to `B` becomes a stuffed Walsh map. The pairing is transported
/// to every copy along the canonical isomorphism (lowest canonical key),
/// which also resolves any automorphism ambiguity deterministically.
pub fn to_stuffed_map(
    g: &ColoredGraph,
    b: &ColoredGraph,
    pairing: &Pairing,
) -> Result<StuffedWalshMap> {
    if !g.is_closed() {
        return Err(Error::NotClosed("the bijection takes closed gluings".into()));
    }
    let scheme = pair_scheme(b, pairing)?;
    let d = g.d();
    let colors: Vec<u8> = (1..=d).collect();
    let b_key = b.canonical_key();

    // transported pair endpoints, globally indexed
    let mut global_pairs: Vec<(usize, usize)> = Vec::new();
    let mut blue_pairs: Vec<(usize, usize)> = Vec::new();
    let comps = g.bubble_components();
    for (copy, comp) in comps.iter().enumerate() {
        let bubble = g.induced(comp, &colors, false)?;
        let iso = canon::find_isomorphism(b, &bubble).ok_or_else(|| Error::BubbleMismatch {
            expected: b_key.clone(),
            got: bubble.canonical_key(),
        })?;
        for (pair_idx, &(w, bl)) in pairing.pairs.iter().enumerate() {
            global_pairs.push((comp[iso[w]], comp[iso[bl]]));
            blue_pairs.push((copy, pair_idx));
        }
    }
    let pair_of_white: BTreeMap<usize, usize> =
        global_pairs.iter().enumerate().map(|(i, &(w, _))| (w, i)).collect();

    let mut builder = MapBuilder::new();
    let blues: Vec<usize> =
        (0..global_pairs.len()).map(|_| builder.add_vertex(VertexKind::Blue)).collect();
    // box vertices per copy, in ascending color order (fixes blue rotations)
    for copy in 0..comps.len() {
        let offset = copy * pairing.pairs.len();
        for (color, cycle) in &scheme.cycles {
            let boxv = builder.add_vertex(VertexKind::Box(*color));
            for &pair in cycle {
                builder.add_edge(boxv, blues[offset + pair], vec![*color]);
            }
        }
    }
    // black vertices: cycles alternating color-0 edges and pairs
    let n_pairs = global_pairs.len();
    let mut seen = vec![false; n_pairs];
    for start in 0..n_pairs {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            seen[cur] = true;
            cycle.push(cur);
            let black = global_pairs[cur].1;
            let next_white = g
                .neighbor(black, 0)
                .ok_or_else(|| Error::NotClosed(format!("vertex {black} missing color 0")))?;
            cur = pair_of_white[&next_white];
            if cur == start {
                break;
            }
        }
        let black_vertex = builder.add_vertex(VertexKind::Black);
        for &pair in &cycle {
            let (_, pair_idx) = blue_pairs[pair];
            let internal = &scheme.internal[pair_idx];
            let complement: Vec<u8> = (1..=d).filter(|c| !internal.contains(c)).collect();
            builder.add_edge(black_vertex, blues[pair], complement);
        }
    }
    Ok(StuffedWalshMap { map: builder.build(None), d, blue_pairs, copies: comps.len() })
}

/// Inverse direction: rebuild the colored graph from the map structure
/// alone. Copies are the components of the blue/box submap; bubble edges are
/// read off internal colors and box cycles; color-0 edges follow the black
/// vertices' rotations. The result is checked against `B`.
pub fn from_stuffed_map(
    map: &CombinatorialMap,
    b: &ColoredGraph,
    pairing: &Pairing,
) -> Result<ColoredGraph> {
    let d = b.d();
    let full: BTreeSet<u8> = (1..=d).collect();
    // blue vertices and their unique black edge
    let mut blue_ids = Vec::new();
    for v in 0..map.num_vertices() {
        if matches!(map.kind(v), VertexKind::Blue) {
            blue_ids.push(v);
        }
    }
    let blue_index: BTreeMap<usize, usize> =
        blue_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // colored-graph vertices: white = 2i, black = 2i+1 per blue vertex
    let mut shades = Vec::new();
    for _ in &blue_ids {
        shades.push(Shade::White);
        shades.push(Shade::Black);
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut black_edge_of_blue = vec![None; blue_ids.len()];
    for (i, &v) in blue_ids.iter().enumerate() {
        let mut external: BTreeSet<u8> = BTreeSet::new();
        for dart in map.darts_at(v) {
            let other = map.vertex_of(map.alpha(dart));
            match map.kind(other) {
                VertexKind::Box(c) => {
                    if !external.insert(c) {
                        return Err(Error::MalformedMap(format!(
                            "blue vertex {v} meets color {c} at two box vertices"
                        )));
                    }
                    if map.edge_colors(dart) != [c] {
                        return Err(Error::MalformedMap(format!(
                            "box edge at blue vertex {v} has color set {:?}",
                            map.edge_colors(dart)
                        )));
                    }
                }
                VertexKind::Black => {
                    if black_edge_of_blue[i].replace(dart).is_some() {
                        return Err(Error::MalformedMap(format!(
                            "blue vertex {v} meets two black vertices"
                        )));
                    }
                }
                _ => {
                    return Err(Error::MalformedMap(format!(
                        "blue vertex {v} joined to a non-box, non-black vertex"
                    )))
                }
            }
        }
        let dart = black_edge_of_blue[i].ok_or_else(|| {
            Error::MalformedMap(format!("blue vertex {v} has no black edge"))
        })?;
        let decorated: BTreeSet<u8> = map.edge_colors(dart).iter().copied().collect();
        if decorated != external {
            return Err(Error::MalformedMap(format!(
                "blue vertex {v}: black edge colors {decorated:?} != external colors {external:?}"
            )));
        }
        // internal colors close the pair inside the bubble
        for &c in full.difference(&external) {
            edges.push(Edge { color: c, white: 2 * i, black: 2 * i + 1 });
        }
    }
    // box cycles give the external bubble edges, oriented white → black
    for v in 0..map.num_vertices() {
        let VertexKind::Box(c) = map.kind(v) else { continue };
        let cycle: Vec<usize> = map
            .darts_at(v)
            .iter()
            .map(|&dart| blue_index[&map.vertex_of(map.alpha(dart))])
            .collect();
        for (pos, &pair) in cycle.iter().enumerate() {
            let next = cycle[(pos + 1) % cycle.len()];
            edges.push(Edge { color: c, white: 2 * pair, black: 2 * next + 1 });
        }
    }
    // black cycles give the color-0 edges
    for v in 0..map.num_vertices() {
        if !matches!(map.kind(v), VertexKind::Black) {
            continue;
        }
        let cycle: Vec<usize> = map
            .darts_at(v)
            .iter()
            .map(|&dart| blue_index[&map.vertex_of(map.alpha(dart))])
            .collect();
        if cycle.is_empty() {
            return Err(Error::MalformedMap(format!("black vertex {v} has no edges")));
        }
        for (pos, &pair) in cycle.iter().enumerate() {
            let next = cycle[(pos + 1) % cycle.len()];
            edges.push(Edge { color: 0, white: 2 * next, black: 2 * pair + 1 });
        }
    }
    let g = ColoredGraph::gluing(d, shades, edges)?;
    if !g.validate().passed() {
        return Err(Error::MalformedMap("reconstructed graph fails validation".into()));
    }
    // every bubble must be a copy of B, and the blue internal-color multiset
    // must be the pairing's, repeated once per copy
    let colors: Vec<u8> = (1..=d).collect();
    let b_key = b.canonical_key();
    let copies = g.bubble_components().len();
    for comp in g.bubble_components() {
        let bubble = g.induced(&comp, &colors, false)?;
        let key = bubble.canonical_key();
        if key != b_key {
            return Err(Error::BubbleMismatch { expected: b_key, got: key });
        }
    }
    let mut expected: Vec<Vec<u8>> = Vec::new();
    for internal in pairing.internal_colors(b) {
        for _ in 0..copies {
            expected.push(internal.clone());
        }
    }
    expected.sort();
    let mut got: Vec<Vec<u8>> = (0..blue_ids.len())
        .map(|i| {
            (1..=d)
                .filter(|&c| {
                    edges_contains(&g, c, 2 * i, 2 * i + 1)
                })
                .collect()
        })
        .collect();
    got.sort();
    if got != expected {
        return Err(Error::MalformedMap(
            "blue internal colors do not match the pairing".into(),
        ));
    }
    Ok(g)
}

fn edges_contains(g: &ColoredGraph, color: u8, white: usize, black: usize) -> bool {
    g.neighbor(white, color) == Some(black)
}

/// `F(W) = (F(B^π) − d)·V∘ + d`, the face count of any stuffed Walsh map
/// whose projected map is a tree with `V∘` copies of `M(B, π)`.
pub fn tree_face_count(b: &ColoredGraph, pairing: &Pairing, v_copies: usize) -> Result<i64> {
    let closure = pairing.closure(b)?;
    let f_bpi = closure.faces()?.total() as i64;
    let d = b.d() as i64;
    Ok((f_bpi - d) * v_copies as i64 + d)
}

/// Chain gluing of `copies` copies of a bubble with at least two pairs:
/// consecutive copies share a degree-2 black cycle (a ladder of two color-0
/// edges) through pairs 1 and 0; every other pair closes onto itself.
/// The projected map is a path, hence a tree.
pub fn chain_gluing(b: &ColoredGraph, pairing: &Pairing, copies: usize) -> Result<ColoredGraph> {
    pairing.check(b)?;
    if copies >= 2 && pairing.pairs.len() < 2 {
        return Err(Error::BadParameter("chains need bubbles with at least two pairs".into()));
    }
    let n = b.num_vertices();
    let mut shades = Vec::new();
    let mut edges = Vec::new();
    for copy in 0..copies {
        let off = copy * n;
        shades.extend_from_slice(b.shades());
        edges.extend(b.edges().iter().map(|e| Edge {
            color: e.color,
            white: e.white + off,
            black: e.black + off,
        }));
    }
    let pair = |copy: usize, idx: usize| -> (usize, usize) {
        let (w, bl) = pairing.pairs[idx];
        (w + copy * n, bl + copy * n)
    };
    for copy in 0..copies {
        let linked_back = copy > 0;
        let linked_forward = copy + 1 < copies;
        for idx in 0..pairing.pairs.len() {
            let (w, bl) = pair(copy, idx);
            if idx == 0 && linked_back {
                // ladder with the previous copy's pair 1
                let (pw, pb) = pair(copy - 1, 1);
                edges.push(Edge { color: 0, white: w, black: pb });
                edges.push(Edge { color: 0, white: pw, black: bl });
            } else if idx == 1 && linked_forward {
                // handled by the next copy
            } else {
                edges.push(Edge { color: 0, white: w, black: bl });
            }
        }
    }
    ColoredGraph::gluing(b.d(), shades, edges)
}

/// Star gluing: one black cycle of length `copies` through pair 0 of every
/// copy; all other pairs close onto themselves. The projected map is a star.
pub fn star_gluing(b: &ColoredGraph, pairing: &Pairing, copies: usize) -> Result<ColoredGraph> {
    pairing.check(b)?;
    let n = b.num_vertices();
    let mut shades = Vec::new();
    let mut edges = Vec::new();
    for copy in 0..copies {
        let off = copy * n;
        shades.extend_from_slice(b.shades());
        edges.extend(b.edges().iter().map(|e| Edge {
            color: e.color,
            white: e.white + off,
            black: e.black + off,
        }));
    }
    for copy in 0..copies {
        let next = (copy + 1) % copies;
        let (_, bl) = pairing.pairs[0];
        let (w_next, _) = pairing.pairs[0];
        edges.push(Edge { color: 0, white: w_next + next * n, black: bl + copy * n });
        for idx in 1..pairing.pairs.len() {
            let (w, b2) = pairing.pairs[idx];
            edges.push(Edge { color: 0, white: w + copy * n, black: b2 + copy * n });
        }
    }
    ColoredGraph::gluing(b.d(), shades, edges)
}

/// The `d = 2` reduction: shrink every bubble (a cycle alternating colors 1
/// and 2) to a locally embedded vertex whose rotation is the cyclic order of
/// the color-0 slots along the cycle; edges are the color-0 edges.
pub fn map_of_two_colored(g: &ColoredGraph) -> Result<CombinatorialMap> {
    if g.d() != 2 {
        return Err(Error::BadParameter("the map reduction applies at d = 2".into()));
    }
    if !g.is_closed() {
        return Err(Error::NotClosed("map reduction needs a closed gluing".into()));
    }
    let comps = g.bubble_components();
    let mut builder = MapBuilder::new();
    let mut map_vertex: BTreeMap<usize, usize> = BTreeMap::new(); // graph vertex -> map vertex
    let mut rotations: Vec<Vec<usize>> = Vec::new(); // cycle order of graph vertices
    for comp in &comps {
        let mv = builder.add_vertex(VertexKind::Plain);
        // walk the cycle: white --1--> black --2--> white ...
        let start = *comp.iter().find(|&&v| g.shade(v) == Shade::White).unwrap();
        let mut order = Vec::new();
        let mut cur = start;
        loop {
            order.push(cur);
            let b = g
                .neighbor(cur, 1)
                .ok_or_else(|| Error::InvalidGraph(format!("vertex {cur} missing color 1")))?;
            order.push(b);
            let w = g
                .neighbor(b, 2)
                .ok_or_else(|| Error::InvalidGraph(format!("vertex {b} missing color 2")))?;
            if w == start {
                break;
            }
            cur = w;
        }
        for &v in &order {
            map_vertex.insert(v, mv);
        }
        rotations.push(order);
    }
    // add the color-0 edges, then rewrite each collapsed vertex's rotation
    // to follow the cycle order of the 0-slots along its bubble
    let mut dart_of: BTreeMap<usize, Dart> = BTreeMap::new(); // graph vertex -> its 0-dart
    for e in g.edges() {
        if e.color == 0 {
            let (dw, db) = builder.add_edge(map_vertex[&e.white], map_vertex[&e.black], vec![0]);
            dart_of.insert(e.white, dw);
            dart_of.insert(e.black, db);
        }
    }
    let mut map = builder.build(None);
    for rot in &rotations {
        let in_order: Vec<Dart> = rot.iter().map(|v| dart_of[v]).collect();
        for (pos, &d) in in_order.iter().enumerate() {
            map.sigma[d] = in_order[(pos + 1) % in_order.len()];
        }
    }
    Ok(map)
}
