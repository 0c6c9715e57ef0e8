//! Closed-form enhancement calculus.
//!
//! Three routes to the enhancement exponent `s_B` of a bubble, each with its
//! own provenance: inherited from a boundary-bubble presentation, assembled
//! from color slices, or read off a pairing via the tree face-count formula.
//! Whenever two routes apply to one bubble they must agree exactly —
//! enhancements are unique — and the records keep enough supporting data to
//! check that.

use crate::bubbles::Pairing;
use crate::gluing::empirical_enhancement;
use crate::graph::ColoredGraph;
use crate::{rat, Error, Rat, Result};
use serde::Serialize;

/// Serialize rationals as display strings ("5", "25/432").
pub mod rat_string {
    use crate::Rat;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }
}

/// Serialize rational vectors as display strings.
pub mod rat_vec_string {
    use crate::Rat;
    use serde::{ser::SerializeSeq, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingStatus {
    /// Formula value only; tree dominance for this `(B, π)` not established.
    Candidate,
    /// Agrees with the empirical slope over the sampled bubble counts.
    Verified,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// `s = d − 1`, the degree-theorem value for melonic bubbles.
    Theorem,
    Inherited {
        p_boundary: usize,
        p_base: usize,
        copies: usize,
        faces_internal: usize,
        #[serde(with = "rat_string")]
        s_base: Rat,
    },
    Slice {
        partition: Vec<Vec<u8>>,
        #[serde(with = "rat_vec_string")]
        per_slice: Vec<Rat>,
    },
    Empirical {
        slope: i64,
        intercept: i64,
    },
    PairingFormula {
        closure_faces: usize,
        status: PairingStatus,
    },
}

/// An enhancement exponent with its derivation trail.
#[derive(Debug, Clone, Serialize)]
pub struct EnhancementRecord {
    pub bubble_key: String,
    #[serde(with = "rat_string")]
    pub s: Rat,
    pub provenance: Provenance,
}

/// Enhancement of `∂H` inherited from the enhancement of the bubble glued
/// into the open graph `H`:
/// `s_∂H = (d−1)(p(∂H) − p(B)·b(H)) + s_B·b(H) + F(H)`.
///
/// `H` must be open and connected, with all bubbles isomorphic; `F(H)` and
/// `b(H)` are computed here, not trusted from the caller.
pub fn inherited_enhancement(h: &ColoredGraph, s_base: &Rat) -> Result<EnhancementRecord> {
    if h.free_vertices().is_empty() {
        return Err(Error::NotOpen);
    }
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let comps = h.bubble_components();
    let copies = comps.len();
    let colors: Vec<u8> = (1..=h.d()).collect();
    let mut base_key = None;
    let mut p_base = 0;
    for comp in &comps {
        let bubble = h.induced(comp, &colors, false)?;
        let key = bubble.canonical_key();
        match &base_key {
            None => {
                p_base = bubble.black_count();
                base_key = Some(key);
            }
            Some(expected) if *expected != key => {
                return Err(Error::BubbleMismatch { expected: expected.clone(), got: key })
            }
            _ => {}
        }
    }
    let faces_internal = h.faces()?.total();
    let boundary = h.boundary_bubble()?;
    let p_boundary = boundary.black_count();
    let d = rat(h.d() as i64, 1);
    let s = (d - Rat::from_integer(1.into()))
        * (rat(p_boundary as i64, 1) - rat((p_base * copies) as i64, 1))
        + s_base * rat(copies as i64, 1)
        + rat(faces_internal as i64, 1);
    Ok(EnhancementRecord {
        bubble_key: boundary.canonical_key(),
        s,
        provenance: Provenance::Inherited {
            p_boundary,
            p_base,
            copies,
            faces_internal,
            s_base: s_base.clone(),
        },
    })
}

/// Enhancement via a partition of the colors into slices:
/// `s_B = (L−1)·p(B) + Σ_k s_{λ_k}`, defaulting `s_{λ_k} = |λ_k| − 1`.
///
/// Every part needs at least two colors and every sub-bubble must be
/// connected; the relaxed disconnected case is out of scope and rejected.
pub fn slice_enhancement(
    bubble: &ColoredGraph,
    partition: &[Vec<u8>],
    per_slice: Option<&[Rat]>,
) -> Result<EnhancementRecord> {
    let d = bubble.d();
    let mut seen = vec![false; d as usize + 1];
    for part in partition {
        if part.len() < 2 {
            return Err(Error::BadParameter(format!(
                "slice {part:?} has fewer than two colors"
            )));
        }
        for &c in part {
            if c == 0 || c > d || seen[c as usize] {
                return Err(Error::BadParameter(format!(
                    "slices must partition the colors 1..={d}"
                )));
            }
            seen[c as usize] = true;
        }
    }
    if seen[1..].iter().any(|s| !s) {
        return Err(Error::BadParameter(format!("slices must cover all colors 1..={d}")));
    }
    for part in partition {
        if bubble.components_on_colors(part).len() != 1 {
            return Err(Error::DisconnectedSlice(part.clone()));
        }
    }
    let slices: Vec<Rat> = match per_slice {
        Some(values) => {
            if values.len() != partition.len() {
                return Err(Error::BadParameter("one s value per slice expected".into()));
            }
            values.to_vec()
        }
        None => partition.iter().map(|part| rat(part.len() as i64 - 1, 1)).collect(),
    };
    let l = partition.len() as i64;
    let p = bubble.black_count() as i64;
    let mut s = rat((l - 1) * p, 1);
    for v in &slices {
        s += v;
    }
    Ok(EnhancementRecord {
        bubble_key: bubble.canonical_key(),
        s,
        provenance: Provenance::Slice { partition: partition.to_vec(), per_slice: slices },
    })
}

/// Candidate enhancement from a pairing: `s_B = d + (d−1)p(B) − F(B^π)`.
/// The value is only proven when maps projecting on trees dominate, so the
/// record is flagged `Candidate` until verified against enumeration.
pub fn pairing_enhancement(bubble: &ColoredGraph, pairing: &Pairing) -> Result<EnhancementRecord> {
    let closure = pairing.closure(bubble)?;
    let closure_faces = closure.faces()?.total();
    let d = bubble.d() as i64;
    let p = bubble.black_count() as i64;
    let s = rat(d + (d - 1) * p - closure_faces as i64, 1);
    Ok(EnhancementRecord {
        bubble_key: bubble.canonical_key(),
        s,
        provenance: Provenance::PairingFormula {
            closure_faces,
            status: PairingStatus::Candidate,
        },
    })
}

/// Upgrade a pairing-formula record to `Verified` when the empirical slope
/// over `b = 1..=b_max` reproduces the same exponent exactly.
pub fn verify_pairing_enhancement(
    bubble: &ColoredGraph,
    record: &mut EnhancementRecord,
    b_max: usize,
) -> Result<bool> {
    let fit = empirical_enhancement(bubble, b_max)?;
    let agrees = fit.exact_fit && fit.s == record.s;
    if agrees {
        if let Provenance::PairingFormula { status, .. } = &mut record.provenance {
            *status = PairingStatus::Verified;
        }
    }
    Ok(agrees)
}

/// Record for a melonic bubble straight from the degree theorem: `s = d−1`.
pub fn theorem_enhancement(bubble: &ColoredGraph) -> Result<EnhancementRecord> {
    if !crate::bubbles::is_melonic(bubble)? {
        return Err(Error::BadParameter(
            "the degree-theorem enhancement d−1 is tight only for melonic bubbles".into(),
        ));
    }
    Ok(EnhancementRecord {
        bubble_key: bubble.canonical_key(),
        s: rat(bubble.d() as i64 - 1, 1),
        provenance: Provenance::Theorem,
    })
}

/// Build the open ring of `p` quartic necklaces whose boundary bubble is the
/// length-`2p` necklace: consecutive copies joined by one color-0 edge.
pub fn necklace_chain(p: usize, split: &[u8]) -> Result<ColoredGraph> {
    if p < 1 {
        return Err(Error::BadParameter("need at least one necklace".into()));
    }
    let necklace = crate::bubbles::quartic_necklace(split)?.graph;
    let mut shades = Vec::new();
    let mut edges = Vec::new();
    for i in 0..p {
        let off = 4 * i;
        shades.extend_from_slice(necklace.shades());
        edges.extend(necklace.edges().iter().map(|e| crate::graph::Edge {
            color: e.color,
            white: e.white + off,
            black: e.black + off,
        }));
    }
    for i in 0..p {
        // black 0 of copy i to white 0 of copy i+1
        let b = 4 * i + 1;
        let w = 4 * ((i + 1) % p);
        edges.push(crate::graph::Edge { color: 0, white: w, black: b });
    }
    ColoredGraph::gluing(4, shades, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubbles::{best_pairing, necklace_bubble, quartic_melonic, quartic_necklace};
    use crate::graph::{Edge, Shade};

    fn tree_of_quartic_bubbles(copies: usize) -> ColoredGraph {
        // chain of quartic melonic bubbles, consecutive copies joined by one
        // color-0 edge (a tree gluing, F(H) = 0)
        let b = quartic_melonic(3, 1).unwrap().graph;
        let mut shades = Vec::new();
        let mut edges = Vec::new();
        for i in 0..copies {
            let off = 4 * i;
            shades.extend_from_slice(b.shades());
            edges.extend(b.edges().iter().map(|e| Edge {
                color: e.color,
                white: e.white + off,
                black: e.black + off,
            }));
        }
        for i in 0..copies.saturating_sub(1) {
            edges.push(Edge { color: 0, white: 4 * (i + 1), black: 4 * i + 1 });
        }
        ColoredGraph::gluing(3, shades, edges).unwrap()
    }

    #[test]
    fn melonic_trees_inherit_d_minus_one() {
        for p in 2..=4 {
            let h = tree_of_quartic_bubbles(p - 1);
            let record = inherited_enhancement(&h, &rat(2, 1)).unwrap();
            assert_eq!(record.s, rat(2, 1), "p = {p}");
        }
    }

    #[test]
    fn necklace_chains_inherit_p_plus_two() {
        for p in 1..=4 {
            let h = necklace_chain(p, &[1, 3]).unwrap();
            // one closed face of colors (01) and one of colors (03)
            assert_eq!(h.faces().unwrap().total(), 2);
            let record = inherited_enhancement(&h, &rat(4, 1)).unwrap();
            assert_eq!(record.s, rat(p as i64 + 2, 1), "p = {p}");
            // and the boundary really is the length-2p necklace
            let expected = necklace_bubble(4, p, &[1, 3]).unwrap().graph;
            assert_eq!(record.bubble_key, expected.canonical_key());
        }
    }

    #[test]
    fn single_bubble_inherits_its_own_enhancement() {
        let b = quartic_necklace(&[1, 3]).unwrap().graph;
        let record = inherited_enhancement(&b, &rat(4, 1)).unwrap();
        assert_eq!(record.s, rat(4, 1));
        assert_eq!(record.bubble_key, b.canonical_key());
    }

    /// A 4-vertex bubble at d = 5 whose {1,2,3} sub-bubble is melonic and
    /// whose {4,5} sub-bubble is a connected cycle.
    fn slice_example_bubble() -> ColoredGraph {
        ColoredGraph::bubble(
            5,
            vec![Shade::White, Shade::Black, Shade::White, Shade::Black],
            vec![
                Edge { color: 1, white: 0, black: 3 },
                Edge { color: 1, white: 2, black: 1 },
                Edge { color: 2, white: 0, black: 1 },
                Edge { color: 2, white: 2, black: 3 },
                Edge { color: 3, white: 0, black: 1 },
                Edge { color: 3, white: 2, black: 3 },
                Edge { color: 4, white: 0, black: 1 },
                Edge { color: 4, white: 2, black: 3 },
                Edge { color: 5, white: 0, black: 3 },
                Edge { color: 5, white: 2, black: 1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn slice_enhancement_of_the_d5_example_is_five() {
        let b = slice_example_bubble();
        assert!(b.validate().passed());
        let record =
            slice_enhancement(&b, &[vec![1, 2, 3], vec![4, 5]], None).unwrap();
        assert_eq!(record.s, rat(5, 1));
    }

    #[test]
    fn trivial_partition_recovers_d_minus_one() {
        let b = quartic_melonic(3, 1).unwrap().graph;
        let record = slice_enhancement(&b, &[vec![1, 2, 3]], None).unwrap();
        assert_eq!(record.s, rat(2, 1));
    }

    #[test]
    fn d6_two_melonic_slices_give_p_plus_four() {
        // 2-vertex bubble at d = 6: both 3-color slices are melonic, p = 1
        let b = ColoredGraph::two_vertex_bubble(6);
        let record =
            slice_enhancement(&b, &[vec![1, 2, 3], vec![4, 5, 6]], None).unwrap();
        assert_eq!(record.s, rat(1 + 4, 1));
    }

    #[test]
    fn small_and_disconnected_slices_are_rejected() {
        let b = slice_example_bubble();
        assert!(matches!(
            slice_enhancement(&b, &[vec![1], vec![2, 3, 4, 5]], None),
            Err(Error::BadParameter(_))
        ));
        // colors 1 and 5 run in parallel on this bubble, so the {1,5}
        // sub-bubble splits into two components
        assert!(matches!(
            slice_enhancement(&b, &[vec![1, 5], vec![2, 3, 4]], None),
            Err(Error::DisconnectedSlice(_))
        ));
    }

    #[test]
    fn slice_default_bound_and_monotonicity() {
        let b = slice_example_bubble();
        let default_record =
            slice_enhancement(&b, &[vec![1, 2, 3], vec![4, 5]], None).unwrap();
        let l = 2i64;
        let p = b.black_count() as i64;
        let bound = rat((l - 1) * p + 5 - l, 1);
        assert!(default_record.s <= bound);
        // raising one slice exponent raises the total
        let bumped = slice_enhancement(
            &b,
            &[vec![1, 2, 3], vec![4, 5]],
            Some(&[rat(2, 1), rat(3, 2)]),
        )
        .unwrap();
        assert!(bumped.s > default_record.s);
    }

    #[test]
    fn pairing_formula_on_the_three_reference_bubbles() {
        let b = quartic_melonic(3, 1).unwrap().graph;
        let (pairing, _) = best_pairing(&b).unwrap();
        let mut record = pairing_enhancement(&b, &pairing).unwrap();
        assert_eq!(record.s, rat(2, 1));
        assert!(verify_pairing_enhancement(&b, &mut record, 3).unwrap());
        assert!(matches!(
            record.provenance,
            Provenance::PairingFormula { status: PairingStatus::Verified, .. }
        ));

        let n = quartic_necklace(&[1, 3]).unwrap().graph;
        let (pairing, _) = best_pairing(&n).unwrap();
        let record = pairing_enhancement(&n, &pairing).unwrap();
        assert_eq!(record.s, rat(4, 1));

        let two = ColoredGraph::two_vertex_bubble(3);
        let (pairing, _) = best_pairing(&two).unwrap();
        let record = pairing_enhancement(&two, &pairing).unwrap();
        assert_eq!(record.s, rat(2, 1));
    }

    #[test]
    fn best_pairing_gives_the_smallest_candidate() {
        // the formula value decreases in F(B^π), so the face-maximizing
        // pairing yields the smallest candidate — the only one that can be
        // the actual enhancement
        let b = quartic_melonic(3, 1).unwrap().graph;
        let (best, _) = best_pairing(&b).unwrap();
        let best_s = pairing_enhancement(&b, &best).unwrap().s;
        for pairing in crate::bubbles::all_pairings(&b) {
            let s = pairing_enhancement(&b, &pairing).unwrap().s;
            assert!(s >= best_s);
        }
        // and that smallest candidate is the true enhancement
        assert_eq!(best_s, empirical_enhancement(&b, 3).unwrap().s);
    }

    #[test]
    fn slice_example_model_saturates_its_enhancement() {
        // with s = 5 the power of a gluing of the d = 5 example bubble is
        // bounded by d, attained on graphs whose maximizer count follows the
        // quartic-melonic 2-point series (both slices optimal at once)
        use crate::gluing::{enumerate_gluings, melonic_g2_series, GluingMode};
        use num_traits::Signed;
        let b = slice_example_bubble();
        let s = slice_enhancement(&b, &[vec![1, 2, 3], vec![4, 5]], None).unwrap().s;
        assert_eq!(s, rat(5, 1));
        let series = melonic_g2_series(&[2], &[rat(1, 1)], 2).series;
        for count in 1..=2usize {
            let en = enumerate_gluings(&b, count, GluingMode::Rooted).unwrap();
            let bound = rat(5, 1);
            let mut best = None;
            for o in &en.outcomes {
                let delta = rat(o.f_total as i64, 1)
                    - (rat(4 * 2, 1) - s.clone()) * rat(count as i64, 1);
                assert!(delta <= bound, "power bound violated on {}", o.key);
                if best.as_ref().map(|b| &delta > b).unwrap_or(true) {
                    best = Some(delta);
                }
            }
            assert_eq!(best, Some(bound.clone()), "bound attained at b = {count}");
            let maximizers = en.rooted_weight_where(|o| {
                rat(o.f_total as i64, 1) - rat(3 * count as i64, 1) == bound
            });
            assert_eq!(maximizers, series.coeff(count).abs(), "b = {count}");
        }
    }

    #[test]
    fn cross_consistency_of_provenance_paths() {
        // the quartic necklace: inherited (chain at p = 2), pairing formula
        // and empirical slope must agree exactly
        let n = quartic_necklace(&[1, 3]).unwrap().graph;
        let inherited = inherited_enhancement(&necklace_chain(2, &[1, 3]).unwrap(), &rat(4, 1))
            .unwrap();
        let (pairing, _) = best_pairing(&n).unwrap();
        let paired = pairing_enhancement(&n, &pairing).unwrap();
        let empirical = empirical_enhancement(&n, 3).unwrap();
        assert_eq!(inherited.s, paired.s);
        assert_eq!(paired.s, empirical.s);

        // same for the quartic melonic bubble via the theorem value
        let b = quartic_melonic(3, 1).unwrap().graph;
        let theorem = theorem_enhancement(&b).unwrap();
        let (pairing, _) = best_pairing(&b).unwrap();
        assert_eq!(theorem.s, pairing_enhancement(&b, &pairing).unwrap().s);
    }
}
