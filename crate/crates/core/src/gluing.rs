//! Exhaustive enumeration of the gluings of a fixed multiset of bubbles,
//! face maximizers, empirical enhancements and the melonic 2-point series.
//!
//! A gluing is a perfect matching between white and black vertices across
//! labeled copies of the bubbles, realised as color-0 edges. Matchings are
//! iterated in lexicographic order with connectivity pruning: a partial
//! matching that saturates a proper sub-component is abandoned early.

use crate::bubbles::is_melonic;
use crate::graph::{ColoredGraph, Edge, Shade};
use crate::series::PowerSeries;
use crate::{rat, Error, Rat, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluingMode {
    /// Count matchings on labeled copies.
    Labeled,
    /// Weight each class by `labeled · E / Π b_i!`, the marked-edge
    /// (2-point function) convention; automorphism-free by construction.
    Rooted,
    /// One row per isomorphism class.
    Unlabeled,
}

/// One isomorphism class of closed gluings.
#[derive(Debug, Clone)]
pub struct GluingOutcome {
    pub key: String,
    pub f_per_color: Vec<usize>,
    pub f_total: usize,
    pub zero_edges: usize,
    pub omega: i64,
    pub melonic: bool,
    pub labeled_count: u64,
    /// Mode-dependent weight (labeled count, rooted weight, or 1).
    pub count: Rat,
}

#[derive(Debug, Clone)]
pub struct GluingEnumeration {
    pub d: u8,
    pub bubble_count: usize,
    pub mode: GluingMode,
    /// Classes sorted by canonical key.
    pub outcomes: Vec<GluingOutcome>,
    pub f_max: usize,
    /// Number of connected matchings on labeled copies (all classes).
    pub labeled_connected_total: u64,
    pub total_weight: Rat,
}

impl GluingEnumeration {
    pub fn max_face_outcomes(&self) -> impl Iterator<Item = &GluingOutcome> {
        self.outcomes.iter().filter(move |o| o.f_total == self.f_max)
    }

    pub fn rooted_weight_where(&self, pred: impl Fn(&GluingOutcome) -> bool) -> Rat {
        self.outcomes
            .iter()
            .filter(|o| pred(o))
            .map(|o| o.count.clone())
            .fold(Rat::zero(), |acc, w| acc + w)
    }
}

/// Default cap on the total number of color-0 edges of an enumeration.
pub const GLUING_EDGE_CAP: usize = 10;

/// Enumerate all connected closed gluings of `b` copies of one bubble.
pub fn enumerate_gluings(
    bubble: &ColoredGraph,
    b: usize,
    mode: GluingMode,
) -> Result<GluingEnumeration> {
    let copies = vec![bubble.clone(); b];
    enumerate_gluings_of(&copies, mode, GLUING_EDGE_CAP)
}

/// Enumerate connected closed gluings of an explicit multiset of bubbles.
pub fn enumerate_gluings_of(
    copies: &[ColoredGraph],
    mode: GluingMode,
    edge_cap: usize,
) -> Result<GluingEnumeration> {
    if copies.is_empty() {
        return Err(Error::BadParameter("need at least one bubble".into()));
    }
    let d = copies[0].d();
    for c in copies {
        if c.d() != d {
            return Err(Error::BadParameter("bubbles must share the same d".into()));
        }
        if c.has_color_zero() || !c.validate().passed() || !c.is_connected() {
            return Err(Error::InvalidGraph("gluings take valid connected bubbles".into()));
        }
    }

    // stack the copies into one open graph
    let mut shades = Vec::new();
    let mut edges = Vec::new();
    let mut offsets = Vec::new();
    for c in copies {
        offsets.push(shades.len());
        let off = shades.len();
        shades.extend_from_slice(c.shades());
        edges.extend(c.edges().iter().map(|e| Edge {
            color: e.color,
            white: e.white + off,
            black: e.black + off,
        }));
    }
    let n = shades.len();
    let whites: Vec<usize> = (0..n).filter(|&v| shades[v] == Shade::White).collect();
    let blacks: Vec<usize> = (0..n).filter(|&v| shades[v] == Shade::Black).collect();
    if whites.len() != blacks.len() {
        return Err(Error::InvalidGraph("unequal shade counts across the bubble set".into()));
    }
    if whites.len() > edge_cap {
        return Err(Error::CapExceeded(format!(
            "{} color-0 edges > cap {edge_cap}",
            whites.len()
        )));
    }

    // copy index per vertex, for the connectivity union-find
    let mut copy_of = vec![0usize; n];
    for (i, &off) in offsets.iter().enumerate() {
        let end = offsets.get(i + 1).copied().unwrap_or(n);
        for item in copy_of.iter_mut().take(end).skip(off) {
            *item = i;
        }
    }

    let open = ColoredGraph::new(d, shades, edges, true)?;
    let mut classes: BTreeMap<String, (u64, ColoredGraph)> = BTreeMap::new();
    let mut state = MatchState {
        open: &open,
        whites: &whites,
        blacks: &blacks,
        copy_of: &copy_of,
        num_copies: copies.len(),
        chosen: Vec::new(),
        used: vec![false; blacks.len()],
        labeled_connected: 0,
    };
    let mut uf = UnionFind::new(copies.len());
    for (i, c) in copies.iter().enumerate() {
        uf.open_slots[i] = c.num_vertices();
    }
    state.recurse(0, uf, &mut classes);
    let labeled_connected_total = state.labeled_connected;

    // rooted weights divide by the multiplicities of isomorphic copies
    let mut type_counts: BTreeMap<String, u64> = BTreeMap::new();
    for c in copies {
        *type_counts.entry(c.canonical_key()).or_insert(0) += 1;
    }
    let mut sym = Rat::one();
    for &m in type_counts.values() {
        for i in 1..=m {
            sym *= Rat::from_integer(i.into());
        }
    }
    let zero_edges = whites.len();

    let mut outcomes = Vec::new();
    let mut f_max = 0;
    let mut total_weight = Rat::zero();
    for (key, (labeled_count, rep)) in classes {
        let census = rep.faces()?;
        let omega = rep.gurau_degree()?;
        let melonic = is_melonic(&rep)?;
        let f_total = census.total();
        f_max = f_max.max(f_total);
        let count = match mode {
            GluingMode::Labeled => Rat::from_integer(labeled_count.into()),
            GluingMode::Unlabeled => Rat::one(),
            GluingMode::Rooted => {
                Rat::from_integer((labeled_count * zero_edges as u64).into()) / sym.clone()
            }
        };
        total_weight += count.clone();
        outcomes.push(GluingOutcome {
            key,
            f_per_color: census.per_color().to_vec(),
            f_total,
            zero_edges,
            omega,
            melonic,
            labeled_count,
            count,
        });
    }
    Ok(GluingEnumeration {
        d,
        bubble_count: copies.len(),
        mode,
        outcomes,
        f_max,
        labeled_connected_total,
        total_weight,
    })
}

#[derive(Clone)]
struct UnionFind {
    parent: Vec<usize>,
    /// Unmatched vertices (either shade) remaining in the component.
    open_slots: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), open_slots: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.open_slots[rb] += self.open_slots[ra];
        }
    }
}

struct MatchState<'a> {
    open: &'a ColoredGraph,
    whites: &'a [usize],
    blacks: &'a [usize],
    copy_of: &'a [usize],
    num_copies: usize,
    chosen: Vec<(usize, usize)>,
    used: Vec<bool>,
    labeled_connected: u64,
}

impl MatchState<'_> {
    fn recurse(
        &mut self,
        i: usize,
        uf: UnionFind,
        classes: &mut BTreeMap<String, (u64, ColoredGraph)>,
    ) {
        if i == self.whites.len() {
            let mut probe = uf;
            let root = probe.find(0);
            if (0..self.num_copies).all(|c| probe.find(c) == root) {
                self.labeled_connected += 1;
                let glued = self.open.with_zero_edges(&self.chosen).expect("matching is valid");
                let key = glued.canonical_key();
                classes.entry(key).or_insert_with(|| (0, glued)).0 += 1;
            }
            return;
        }
        let remaining = self.whites.len() - i;
        let w = self.whites[i];
        for j in 0..self.blacks.len() {
            if self.used[j] {
                continue;
            }
            let b = self.blacks[j];
            let mut next = uf.clone();
            // a matched pair consumes one open slot on each side
            let (cw, cb) = (self.copy_of[w], self.copy_of[b]);
            next.union(cw, cb);
            let root = next.find(cw);
            next.open_slots[root] = next.open_slots[root].saturating_sub(2);
            // prune: a saturated proper sub-component can never reconnect
            if next.open_slots[root] == 0 && remaining > 1 {
                continue;
            }
            self.used[j] = true;
            self.chosen.push((w, b));
            self.recurse(i + 1, next, classes);
            self.chosen.pop();
            self.used[j] = false;
        }
    }
}

/// Fit `F_max(b) = slope·b + intercept` over `b = 1..=b_max` and read off
/// the empirical enhancement `s = (d−1)p(B) − slope`. The fit must be exact
/// on every sampled `b`; any deviation is flagged, never averaged away.
#[derive(Debug, Clone)]
pub struct EmpiricalEnhancement {
    pub f_max_per_b: Vec<usize>,
    pub slope: i64,
    pub intercept: i64,
    pub exact_fit: bool,
    pub s: Rat,
    pub delta_max: Rat,
}

pub fn empirical_enhancement(bubble: &ColoredGraph, b_max: usize) -> Result<EmpiricalEnhancement> {
    if b_max < 2 {
        return Err(Error::BadParameter("need b_max >= 2 to fit a slope".into()));
    }
    let mut f_max_per_b = Vec::new();
    for b in 1..=b_max {
        let en = enumerate_gluings(bubble, b, GluingMode::Labeled)?;
        f_max_per_b.push(en.f_max);
    }
    let slope = f_max_per_b[1] as i64 - f_max_per_b[0] as i64;
    let intercept = f_max_per_b[0] as i64 - slope;
    let exact_fit = f_max_per_b
        .iter()
        .enumerate()
        .all(|(idx, &f)| f as i64 == slope * (idx as i64 + 1) + intercept);
    let d = bubble.d() as i64;
    let p = bubble.black_count() as i64;
    let s = rat((d - 1) * p - slope, 1);
    Ok(EmpiricalEnhancement {
        f_max_per_b,
        slope,
        intercept,
        exact_fit,
        s,
        delta_max: rat(intercept, 1),
    })
}

/// Split the degree of a `d = 4` gluing of necklaces as `ω = 4g + Σ (p−1)b_p`.
///
/// All necklaces must share one color split; shrinking each parallel pair of
/// edges to a single edge yields a 3-colored graph whose genus is read off
/// from `2 − 2g = F_0a + F_0b − Σ (p−1) b_p`.
pub fn necklace_degree_split(g: &ColoredGraph) -> Result<(i64, i64)> {
    if g.d() != 4 {
        return Err(Error::BadParameter("the degree split is defined at d = 4".into()));
    }
    if !g.is_closed() || !g.is_connected() {
        return Err(Error::NotClosed("degree split needs a closed connected gluing".into()));
    }
    let mut shared_split: Option<(Vec<u8>, Vec<u8>)> = None;
    let mut sum_p_minus_1 = 0i64;
    for comp in g.bubble_components() {
        let (p, split) = necklace_structure(g, &comp)?;
        sum_p_minus_1 += p as i64 - 1;
        if let Some(split) = split {
            match &shared_split {
                None => shared_split = Some(split),
                Some(existing) if *existing == split => {}
                Some(_) => {
                    return Err(Error::BadParameter(
                        "necklaces with different color splits cannot be reduced together".into(),
                    ))
                }
            }
        }
    }
    let (side_a, side_b) =
        shared_split.unwrap_or_else(|| (vec![1, 2], vec![3, 4]));
    let census = g.faces()?;
    for side in [&side_a, &side_b] {
        let f0 = census.f_0c(side[0]);
        if side.iter().any(|&c| census.f_0c(c) != f0) {
            return Err(Error::InvalidGraph(
                "parallel colors disagree on face counts; not a necklace gluing".into(),
            ));
        }
    }
    let f_a = census.f_0c(side_a[0]) as i64;
    let f_b = census.f_0c(side_b[0]) as i64;
    let euler = f_a + f_b - sum_p_minus_1;
    if euler > 2 || (2 - euler) % 2 != 0 {
        return Err(Error::InvalidGraph(format!("impossible Euler characteristic {euler}")));
    }
    let genus = (2 - euler) / 2;
    let omega = g.gurau_degree()?;
    if omega != 4 * genus + sum_p_minus_1 {
        return Err(Error::InvalidGraph(format!(
            "degree split mismatch: ω = {omega} but 4g + Σ(p−1)b_p = {}",
            4 * genus + sum_p_minus_1
        )));
    }
    Ok((genus, sum_p_minus_1))
}

/// Recognise one bubble component as a necklace; returns `(p, split)` where
/// the split is `None` for the ambiguous 2-vertex case.
fn necklace_structure(
    g: &ColoredGraph,
    comp: &[usize],
) -> Result<(usize, Option<(Vec<u8>, Vec<u8>)>)> {
    let d = g.d();
    let p = comp.len() / 2;
    if !comp.len().is_multiple_of(2) {
        return Err(Error::InvalidGraph("odd component".into()));
    }
    if p == 1 {
        return Ok((1, None));
    }
    let start = *comp.iter().find(|&&v| g.shade(v) == Shade::White).unwrap();
    let colors_to = |v: usize, u: usize| -> Vec<u8> {
        (1..=d).filter(|&c| g.neighbor(v, c) == Some(u)).collect()
    };
    let neighbors = |v: usize| -> Vec<usize> {
        let mut ns: Vec<usize> = (1..=d).filter_map(|c| g.neighbor(v, c)).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    };
    let first_nbrs = neighbors(start);
    if first_nbrs.len() != 2 {
        return Err(Error::BadParameter(format!(
            "bubble component at vertex {start} is not a necklace"
        )));
    }
    let side_a = colors_to(start, first_nbrs[0]);
    let side_b = colors_to(start, first_nbrs[1]);
    if side_a.len() != d as usize / 2 || side_b.len() != d as usize / 2 {
        return Err(Error::BadParameter(format!(
            "bubble component at vertex {start} is not a necklace"
        )));
    }
    // walk the cycle checking strict alternation of the two sides
    let mut visited = 1usize;
    let mut prev = start;
    let mut cur = first_nbrs[0];
    let mut expect = &side_b;
    while cur != start {
        visited += 1;
        let ns = neighbors(cur);
        if ns.len() != 2 {
            return Err(Error::BadParameter(format!(
                "bubble component at vertex {cur} is not a necklace"
            )));
        }
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        if colors_to(cur, next) != *expect {
            return Err(Error::BadParameter(format!(
                "bubble component at vertex {cur} does not alternate a fixed color split"
            )));
        }
        expect = if expect == &side_a { &side_b } else { &side_a };
        prev = cur;
        cur = next;
    }
    if visited != comp.len() {
        return Err(Error::BadParameter("necklace walk did not cover the component".into()));
    }
    let split = if side_a < side_b { (side_a, side_b) } else { (side_b, side_a) };
    Ok((p, Some(split)))
}

/// The melonic 2-point series `G_2(λ)`: unique solution of
/// `1 − G_2 − λ Σ_i p_i t_i G_2^{p_i} = 0` with `G_2(0) = 1`, by fixed-point
/// iteration in exact arithmetic.
#[derive(Debug, Clone)]
pub struct MelonicSeries {
    pub exponents: Vec<u32>,
    pub couplings: Vec<Rat>,
    pub series: PowerSeries,
}

pub fn melonic_g2_series(exponents: &[u32], couplings: &[Rat], order: usize) -> MelonicSeries {
    assert_eq!(exponents.len(), couplings.len(), "one coupling per exponent");
    let one = PowerSeries::one("lambda", order);
    let mut g = one.clone();
    for _ in 0..=order {
        let mut sum = PowerSeries::zero("lambda", order);
        for (&p, t) in exponents.iter().zip(couplings) {
            let weight = Rat::from_integer(p.into()) * t;
            sum = sum.add(&g.pow(p).scale(&weight));
        }
        g = one.sub(&sum.shift(1));
    }
    debug_assert_eq!(g.coeff(0), Rat::one());
    MelonicSeries { exponents: exponents.to_vec(), couplings: couplings.to_vec(), series: g }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubbles::{necklace_bubble, quartic_melonic, quartic_necklace};

    #[test]
    fn quartic_bubble_has_two_labeled_closures() {
        let b = quartic_melonic(3, 1).unwrap().graph;
        let en = enumerate_gluings(&b, 1, GluingMode::Labeled).unwrap();
        assert_eq!(en.labeled_connected_total, 2);
        let mut faces: Vec<usize> = en.outcomes.iter().map(|o| o.f_total).collect();
        faces.sort_unstable();
        assert_eq!(faces, vec![4, 5]);
        assert_eq!(en.f_max, 5);
        let omegas: Vec<i64> = en.outcomes.iter().map(|o| o.omega).collect();
        assert!(omegas.contains(&0) && omegas.contains(&1));
    }

    #[test]
    fn two_vertex_bubble_has_one_gluing() {
        let b = ColoredGraph::two_vertex_bubble(3);
        let en = enumerate_gluings(&b, 1, GluingMode::Labeled).unwrap();
        assert_eq!(en.labeled_connected_total, 1);
        assert_eq!(en.f_max, 3);
        assert_eq!(en.outcomes[0].omega, 0);
    }

    #[test]
    fn quartic_necklace_face_maximum_at_one_bubble() {
        let n = quartic_necklace(&[1, 3]).unwrap().graph;
        let en = enumerate_gluings(&n, 1, GluingMode::Labeled).unwrap();
        assert_eq!(en.f_max, 6);
    }

    #[test]
    fn rooted_melonic_counts_match_the_series() {
        let b = quartic_melonic(3, 1).unwrap().graph;
        let expected = [2u64, 8, 40];
        for (b_count, &want) in (1..=3).zip(&expected) {
            let en = enumerate_gluings(&b, b_count, GluingMode::Rooted).unwrap();
            let rooted = en.rooted_weight_where(|o| o.melonic);
            assert_eq!(rooted, rat(want as i64, 1), "b = {b_count}");
        }
    }

    #[test]
    fn degree_zero_iff_melonic_up_to_three_bubbles() {
        let b = quartic_melonic(3, 1).unwrap().graph;
        for count in 1..=3 {
            let en = enumerate_gluings(&b, count, GluingMode::Unlabeled).unwrap();
            for o in &en.outcomes {
                assert!(o.omega >= 0);
                assert_eq!(o.omega == 0, o.melonic, "class {}", o.key);
            }
        }
    }

    #[test]
    fn empirical_enhancement_of_the_quartic_melonic() {
        let b = quartic_melonic(3, 1).unwrap().graph;
        let fit = empirical_enhancement(&b, 3).unwrap();
        assert!(fit.exact_fit);
        assert_eq!(fit.f_max_per_b, vec![5, 7, 9]);
        assert_eq!((fit.slope, fit.intercept), (2, 3));
        assert_eq!(fit.s, rat(2, 1));
        assert_eq!(fit.delta_max, rat(3, 1));
    }

    #[test]
    fn empirical_enhancement_of_the_quartic_necklace() {
        let n = quartic_necklace(&[1, 3]).unwrap().graph;
        let fit = empirical_enhancement(&n, 3).unwrap();
        assert!(fit.exact_fit);
        assert_eq!(fit.f_max_per_b, vec![6, 8, 10]);
        assert_eq!((fit.slope, fit.intercept), (2, 4));
        assert_eq!(fit.s, rat(4, 1));
    }

    #[test]
    fn empirical_enhancement_of_the_two_vertex_bubble() {
        let b = ColoredGraph::two_vertex_bubble(3);
        let fit = empirical_enhancement(&b, 4).unwrap();
        assert!(fit.exact_fit);
        assert_eq!(fit.slope, 0);
        assert_eq!(fit.intercept, 3);
        assert_eq!(fit.s, rat(2, 1));
    }

    #[test]
    fn uniqueness_of_the_enhancement_slope() {
        // raising s by one makes the power strictly increasing in b
        let b = quartic_melonic(3, 1).unwrap().graph;
        let fit = empirical_enhancement(&b, 3).unwrap();
        let d = 3i64;
        let p = 2i64;
        let s_up = fit.s.clone() + Rat::one();
        let mut last = None;
        for (idx, &f) in fit.f_max_per_b.iter().enumerate() {
            let b_count = idx as i64 + 1;
            let delta = rat(f as i64, 1)
                - (rat((d - 1) * p, 1) - s_up.clone()) * rat(b_count, 1);
            if let Some(prev) = last {
                assert!(delta > prev);
            }
            last = Some(delta);
        }
    }

    #[test]
    fn necklace_split_of_planar_closures() {
        let n = quartic_necklace(&[1, 3]).unwrap().graph;
        let en = enumerate_gluings(&n, 1, GluingMode::Unlabeled).unwrap();
        for o in &en.outcomes {
            assert_eq!(o.omega, 1);
        }
        let planar = n.with_zero_edges(&[(0, 1), (2, 3)]).unwrap();
        assert_eq!(necklace_degree_split(&planar).unwrap(), (0, 1));
    }

    #[test]
    fn necklace_split_finds_the_genus_one_closure() {
        // at p = 3 the cyclic matching twists the necklace onto the torus
        let n = necklace_bubble(4, 3, &[1, 3]).unwrap().graph;
        let twisted = n.with_zero_edges(&[(0, 3), (2, 5), (4, 1)]).unwrap();
        let (genus, linear) = necklace_degree_split(&twisted).unwrap();
        assert_eq!((genus, linear), (1, 2));
        assert_eq!(twisted.gurau_degree().unwrap(), 6);

        // and the full b = 1 enumeration contains both genera
        let en = enumerate_gluings(&n, 1, GluingMode::Unlabeled).unwrap();
        let mut genera: Vec<i64> = Vec::new();
        for o in &en.outcomes {
            genera.push((o.omega - 2) / 4);
        }
        genera.sort_unstable();
        genera.dedup();
        assert_eq!(genera, vec![0, 1]);
    }

    #[test]
    fn chain_of_two_necklaces_is_planar_with_linear_term_two() {
        let n = quartic_necklace(&[1, 3]).unwrap().graph;
        let en = enumerate_gluings(&n, 2, GluingMode::Unlabeled).unwrap();
        let best = en.max_face_outcomes().next().unwrap();
        assert_eq!(best.f_total, 8);
        // rebuild one maximizer explicitly: a chain glued straight through
        let chain = two_copies_chain(&n);
        assert_eq!(chain.faces().unwrap().total(), 8);
        assert_eq!(necklace_degree_split(&chain).unwrap(), (0, 2));
        assert_eq!(chain.gurau_degree().unwrap(), 2);
    }

    fn two_copies_chain(n: &ColoredGraph) -> ColoredGraph {
        let mut shades = n.shades().to_vec();
        shades.extend_from_slice(n.shades());
        let mut edges = n.edges().to_vec();
        for e in n.edges() {
            edges.push(Edge { color: e.color, white: e.white + 4, black: e.black + 4 });
        }
        // cross-links 0<->5, 4<->1; self-links 2-3, 6-7
        for (w, b) in [(0usize, 5usize), (4, 1), (2, 3), (6, 7)] {
            edges.push(Edge { color: 0, white: w, black: b });
        }
        ColoredGraph::gluing(4, shades, edges).unwrap()
    }

    #[test]
    fn melonic_series_single_quartic_coupling() {
        let ms = melonic_g2_series(&[2], &[rat(1, 1)], 4);
        let want = [1i64, -2, 8, -40, 224];
        for (n, &w) in want.iter().enumerate() {
            assert_eq!(ms.series.coeff(n), rat(w, 1));
        }
    }

    #[test]
    fn melonic_series_with_zero_couplings_is_one() {
        let ms = melonic_g2_series(&[2, 3], &[rat(0, 1), rat(0, 1)], 6);
        assert_eq!(ms.series, PowerSeries::one("lambda", 6));
    }

    fn six_vertex_melonic() -> ColoredGraph {
        let b = quartic_melonic(3, 1).unwrap().graph;
        let idx = b.edges().iter().position(|e| e.color == 2).unwrap();
        crate::bubbles::melonic_bubble(3, &[(0, 1), (idx, 2)]).unwrap().graph
    }

    #[test]
    fn mixed_coupling_series_matches_multiset_rooted_counts() {
        // two melonic bubble types at d = 3, p = 2 and p = 3, unit couplings:
        // G2 = 1 − 5λ + 65λ² + ...
        let ms = melonic_g2_series(&[2, 3], &[rat(1, 1), rat(1, 1)], 2);
        assert_eq!(ms.series.coeff(1), rat(-5, 1));
        assert_eq!(ms.series.coeff(2), rat(65, 1));

        let b2 = quartic_melonic(3, 1).unwrap().graph;
        let b3 = six_vertex_melonic();
        // order λ¹: one bubble of either type
        let rooted = |copies: &[ColoredGraph]| {
            let en = enumerate_gluings_of(copies, GluingMode::Rooted, GLUING_EDGE_CAP).unwrap();
            en.rooted_weight_where(|o| o.melonic)
        };
        let first = rooted(&[b2.clone()]) + rooted(&[b3.clone()]);
        assert_eq!(first, rat(5, 1));
        // order λ²: all multisets with two bubbles
        let second = rooted(&[b2.clone(), b2.clone()])
            + rooted(&[b2.clone(), b3.clone()])
            + rooted(&[b3.clone(), b3.clone()]);
        assert_eq!(second, rat(65, 1));
    }

    #[test]
    fn mixed_melonic_and_necklace_gluings_respect_the_enhanced_bound() {
        // the combined d = 4 model: melonic bubbles enhanced by s = 3,
        // necklaces by s = 4; every mixed gluing has power at most 4
        let melonic = quartic_melonic(4, 1).unwrap().graph;
        let necklace = quartic_necklace(&[1, 3]).unwrap().graph;
        let mel_key = melonic.canonical_key();
        for copies in [
            vec![melonic.clone(), necklace.clone()],
            vec![melonic.clone(), melonic.clone(), necklace.clone()],
        ] {
            let en = enumerate_gluings_of(&copies, GluingMode::Labeled, GLUING_EDGE_CAP).unwrap();
            let mut saturated = false;
            let colors: Vec<u8> = (1..=4).collect();
            exhaustive_over(&copies, &mut |g| {
                let mut mel = 0i64;
                let mut neck = 0i64;
                for comp in g.bubble_components() {
                    let bubble = g.induced(&comp, &colors, false).unwrap();
                    if bubble.canonical_key() == mel_key {
                        mel += 1;
                    } else {
                        neck += 1;
                    }
                }
                let power = crate::graph::GraphPower::new(
                    4,
                    g.faces().unwrap().total() as i64,
                    g.zero_edge_count() as i64,
                    vec![(mel, rat(3, 1)), (neck, rat(4, 1))],
                );
                assert!(power.delta <= rat(4, 1), "{}", g.canonical_key());
                if power.delta == rat(4, 1) {
                    saturated = true;
                }
            });
            assert!(saturated, "the enhanced bound must be attained");
            assert!(en.f_max > 0);
        }
    }

    fn exhaustive_over(copies: &[ColoredGraph], f: &mut impl FnMut(&ColoredGraph)) {
        let d = copies[0].d();
        let mut shades = Vec::new();
        let mut edges = Vec::new();
        for (i, c) in copies.iter().enumerate() {
            let off: usize = copies[..i].iter().map(|b| b.num_vertices()).sum();
            shades.extend_from_slice(c.shades());
            edges.extend(c.edges().iter().map(|e| Edge {
                color: e.color,
                white: e.white + off,
                black: e.black + off,
            }));
        }
        let open = ColoredGraph::bubble(d, shades, edges).unwrap();
        let whites: Vec<usize> =
            (0..open.num_vertices()).filter(|&v| open.shade(v) == Shade::White).collect();
        let blacks: Vec<usize> =
            (0..open.num_vertices()).filter(|&v| open.shade(v) == Shade::Black).collect();
        let mut perm: Vec<usize> = (0..blacks.len()).collect();
        fn rec(
            open: &ColoredGraph,
            whites: &[usize],
            blacks: &[usize],
            perm: &mut Vec<usize>,
            k: usize,
            f: &mut impl FnMut(&ColoredGraph),
        ) {
            if k == perm.len() {
                let pairs: Vec<(usize, usize)> =
                    whites.iter().zip(perm.iter()).map(|(&w, &j)| (w, blacks[j])).collect();
                let g = open.with_zero_edges(&pairs).unwrap();
                if g.is_connected() {
                    f(&g);
                }
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                rec(open, whites, blacks, perm, k + 1, f);
                perm.swap(k, i);
            }
        }
        rec(&open, &whites, &blacks, &mut perm, 0, f);
    }

    #[test]
    fn degree_split_with_mixed_necklace_lengths() {
        // a p = 2 and a p = 3 necklace (same split) glued in a planar chain:
        // ω = 4·0 + (1 + 2)
        let short = quartic_necklace(&[1, 3]).unwrap().graph;
        let long = necklace_bubble(4, 3, &[1, 3]).unwrap().graph;
        let mut shades = short.shades().to_vec();
        shades.extend_from_slice(long.shades());
        let mut edges = short.edges().to_vec();
        for e in long.edges() {
            edges.push(Edge { color: e.color, white: e.white + 4, black: e.black + 4 });
        }
        // one straight cross-link pair, the rest closed onto themselves
        for (w, b) in [(0usize, 5usize), (4, 1), (2, 3), (6, 7), (8, 9)] {
            edges.push(Edge { color: 0, white: w, black: b });
        }
        let g = ColoredGraph::gluing(4, shades, edges).unwrap();
        let (genus, linear) = necklace_degree_split(&g).unwrap();
        assert_eq!((genus, linear), (0, 3));
        assert_eq!(g.gurau_degree().unwrap(), 3);

        // mixed splits cannot be reduced together
        let other = quartic_necklace(&[1, 2]).unwrap().graph;
        let mut shades = short.shades().to_vec();
        shades.extend_from_slice(other.shades());
        let mut edges = short.edges().to_vec();
        for e in other.edges() {
            edges.push(Edge { color: e.color, white: e.white + 4, black: e.black + 4 });
        }
        for (w, b) in [(0usize, 5usize), (4, 1), (2, 3), (6, 7)] {
            edges.push(Edge { color: 0, white: w, black: b });
        }
        let g = ColoredGraph::gluing(4, shades, edges).unwrap();
        assert!(necklace_degree_split(&g).is_err());
    }

    #[test]
    fn rooted_count_of_the_six_vertex_melonic_bubble() {
        let b3 = six_vertex_melonic();
        let en = enumerate_gluings(&b3, 1, GluingMode::Rooted).unwrap();
        // p = 3 rooted melonic closures: the λ-coefficient contribution 3t₃
        assert_eq!(en.rooted_weight_where(|o| o.melonic), rat(3, 1));
    }
}
