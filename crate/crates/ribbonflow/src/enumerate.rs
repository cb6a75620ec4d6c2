//! Exhaustive enumeration of ribbon-graph isomorphism classes realising a
//! surface type.
//!
//! The edge count of a candidate graph is forced: with `L` legs and Euler
//! characteristic `chi`, a graph with all internal valencies `>= 3` has
//! `E_int <= L - 3*chi`, so the search space is finite. For each admissible
//! internal-valency multiset we fix `sigma` in block form (legs first, then
//! one consecutive cycle per internal vertex) and run over all pairings
//! `iota`, filtering by connectivity and surface invariants and deduplicating
//! by canonical form.

use std::collections::BTreeMap;

use crate::graph::{Leg, RibbonGraph, SurfaceType};

/// All isomorphism-class representatives (canonical forms) realising `s`,
/// optionally capped at `max_valency` for internal vertices. An empty result
/// means the type is not realised; it is not an error.
pub fn enumerate_ribbon_graphs(s: &SurfaceType, max_valency: Option<usize>) -> Vec<RibbonGraph> {
    let legs = s.leg_count();
    let chi = s.euler_char();
    let mut found: BTreeMap<Vec<usize>, RibbonGraph> = BTreeMap::new();

    // Graphs without internal vertices: a single bare edge joining two legs.
    if chi == 1 && legs == 2 {
        for (a, b) in [(0usize, 1usize), (1, 0)] {
            let g = RibbonGraph::from_cycles(
                2,
                &[vec![0], vec![1]],
                &[(0, 1)],
                vec![
                    Leg {
                        half_edge: a,
                        dir: s.dirs[0],
                    },
                    Leg {
                        half_edge: b,
                        dir: s.dirs[1],
                    },
                ],
            )
            .expect("bare edge");
            if &g.surface_invariants().surface_type == s {
                let (canon, _) = g.canonical_form();
                found.insert(canon.canonical_key(), canon);
            }
        }
    }

    let e_int_max = legs as i64 - 3 * chi;
    for e_int in 0..=e_int_max.max(-1) {
        let v_int = e_int + chi;
        if v_int < 1 {
            continue;
        }
        let (e_int, v_int) = (e_int as usize, v_int as usize);
        let total_internal_halves = 2 * e_int + legs;
        for valencies in partitions(
            total_internal_halves,
            v_int,
            max_valency.unwrap_or(usize::MAX),
        ) {
            collect_for_valencies(s, &valencies, &mut found);
        }
    }

    found.into_values().collect()
}

/// `true` iff at least one admissible graph realises the type.
pub fn is_admissible(s: &SurfaceType) -> bool {
    !enumerate_ribbon_graphs(s, None).is_empty()
}

/// Partitions of `total` into exactly `parts` parts, each in `3..=max_val`,
/// non-increasing.
fn partitions(total: usize, parts: usize, max_val: usize) -> Vec<Vec<usize>> {
    fn rec(
        total: usize,
        parts: usize,
        cap: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        if total < 3 * parts {
            return;
        }
        let hi = cap.min(total.saturating_sub(3 * (parts - 1)));
        for v in (3..=hi).rev() {
            acc.push(v);
            rec(total - v, parts - 1, v, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, max_val, &mut Vec::new(), &mut out);
    out
}

fn collect_for_valencies(
    s: &SurfaceType,
    valencies: &[usize],
    found: &mut BTreeMap<Vec<usize>, RibbonGraph>,
) {
    let legs = s.leg_count();
    let n = legs + valencies.iter().sum::<usize>();
    // sigma: legs are fixed points 0..legs, then one block per vertex.
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut start = legs;
    for &val in valencies {
        for i in 0..val {
            sigma[start + i] = start + (i + 1) % val;
        }
        start += val;
    }
    let leg_table: Vec<Leg> = (0..legs)
        .map(|slot| Leg {
            half_edge: slot,
            dir: s.dirs[slot],
        })
        .collect();

    // Backtrack over pairings; legs must pair into internal half-edges.
    let mut iota: Vec<usize> = vec![usize::MAX; n];
    let mut check = |iota: &[usize]| {
        let g = RibbonGraph::new(sigma.clone(), iota.to_vec(), leg_table.clone())
            .expect("tables are well-formed");
        if !g.is_connected() {
            return;
        }
        if &g.surface_invariants().surface_type != s {
            return;
        }
        let (canon, _) = g.canonical_form();
        found.entry(canon.canonical_key()).or_insert(canon);
    };
    fn rec(iota: &mut Vec<usize>, legs: usize, check: &mut impl FnMut(&[usize])) {
        let Some(h) = iota.iter().position(|&x| x == usize::MAX) else {
            check(iota);
            return;
        };
        let n = iota.len();
        for p in h + 1..n {
            if iota[p] != usize::MAX {
                continue;
            }
            if h < legs && p < legs && n > legs + 1 {
                // A leg-leg edge disconnects once internal vertices exist.
                continue;
            }
            iota[h] = p;
            iota[p] = h;
            rec(iota, legs, check);
            iota[h] = usize::MAX;
            iota[p] = usize::MAX;
        }
    }
    rec(&mut iota, legs, &mut check);
}

/// Surface types whose top (trivalent) cells have at most `max_edges` edges.
/// Sweeps small genus and boundary counts with every placement of the marked
/// points (all flagged incoming; the cell structure does not depend on the
/// direction flags).
pub fn surface_types_with_top_edges_at_most(max_edges: usize) -> Vec<SurfaceType> {
    use crate::graph::Direction;
    let mut out = Vec::new();
    for genus in 0..=2usize {
        for m in 1..=4usize {
            for legs in 0..=6usize {
                let chi = 2i64 - 2 * genus as i64 - m as i64;
                let e_top = 2 * legs as i64 - 3 * chi;
                let has_bare = chi == 1 && legs == 2;
                if e_top < 1 && !has_bare {
                    continue;
                }
                if e_top.max(1) as usize > max_edges {
                    continue;
                }
                let dirs = vec![Direction::In; legs];
                for placement in placements(legs, m) {
                    if let Ok(st) = SurfaceType::new(genus, placement, dirs.clone()) {
                        if is_admissible(&st) {
                            out.push(st);
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|s| s.to_string());
    out.dedup();
    out
}

/// All ways to distribute slots `0..legs` into `m` unordered boundary
/// components, each carrying a cyclic order.
fn placements(legs: usize, m: usize) -> Vec<Vec<Vec<usize>>> {
    // Insert slots one at a time: each slot either opens a new component or
    // goes after any existing element, which yields every cyclic order once.
    fn rec(
        slot: usize,
        legs: usize,
        m: usize,
        acc: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if slot == legs {
            if acc.len() <= m {
                let mut full = acc.clone();
                while full.len() < m {
                    full.push(Vec::new());
                }
                out.push(full);
            }
            return;
        }
        for i in 0..acc.len() {
            for pos in 0..acc[i].len() {
                acc[i].insert(pos + 1, slot);
                rec(slot + 1, legs, m, acc, out);
                acc[i].remove(pos + 1);
            }
        }
        if acc.len() < m {
            acc.push(vec![slot]);
            rec(slot + 1, legs, m, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, legs, m, &mut Vec::new(), &mut out);
    out
}

/// Convenience constructors for the surface types used in the examples.
pub mod types {
    use crate::graph::{Direction, SurfaceType};

    /// Disk with `dirs.len()` marked points in the given cyclic order.
    pub fn disk(dirs: &[Direction]) -> SurfaceType {
        SurfaceType::new(0, vec![(0..dirs.len()).collect()], dirs.to_vec()).expect("disk type")
    }

    /// Disk with two incoming and one outgoing point (cup product).
    pub fn disk3() -> SurfaceType {
        disk(&[Direction::In, Direction::In, Direction::Out])
    }

    /// Disk with three incoming and one outgoing point.
    pub fn disk4() -> SurfaceType {
        disk(&[
            Direction::In,
            Direction::In,
            Direction::In,
            Direction::Out,
        ])
    }

    /// Annulus with both marked points on the same boundary component.
    pub fn annulus2(dirs: [Direction; 2]) -> SurfaceType {
        SurfaceType::new(0, vec![vec![0, 1], vec![]], dirs.to_vec()).expect("annulus type")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Direction;

    #[test]
    fn disk3_is_the_tripod() {
        let st = types::disk3();
        let graphs = enumerate_ribbon_graphs(&st, None);
        assert_eq!(graphs.len(), 1);
        let (tripod_canon, _) = crate::graph::samples::tripod().canonical_form();
        assert_eq!(graphs[0].canonical_key(), tripod_canon.canonical_key());
    }

    #[test]
    fn disk4_has_three_classes() {
        let st = types::disk4();
        let graphs = enumerate_ribbon_graphs(&st, None);
        let trivalent = graphs
            .iter()
            .filter(|g| g.vertices().iter().all(|c| c.len() != 4))
            .count();
        assert_eq!(graphs.len(), 3);
        assert_eq!(trivalent, 2);
    }

    #[test]
    fn annulus2_has_five_classes() {
        let st = types::annulus2([Direction::In, Direction::Out]);
        let graphs = enumerate_ribbon_graphs(&st, None);
        assert_eq!(graphs.len(), 5);
        let two_trivalent = graphs
            .iter()
            .filter(|g| g.internal_vertices().len() == 2)
            .count();
        let one_fourvalent = graphs
            .iter()
            .filter(|g| g.internal_vertices().len() == 1)
            .count();
        assert_eq!(two_trivalent, 3);
        assert_eq!(one_fourvalent, 2);
        for g in &graphs {
            assert_eq!(g.automorphisms().len(), 1);
        }
    }

    #[test]
    fn enumeration_is_closed_under_collapse() {
        for st in [
            types::disk4(),
            types::annulus2([Direction::In, Direction::Out]),
        ] {
            let graphs = enumerate_ribbon_graphs(&st, None);
            let keys: std::collections::BTreeSet<_> =
                graphs.iter().map(|g| g.canonical_key()).collect();
            for g in &graphs {
                for e in g.internal_edges() {
                    if g.is_loop(e) {
                        continue;
                    }
                    let (c, _) = g.collapse_edge(e).unwrap().canonical_form();
                    assert!(keys.contains(&c.canonical_key()));
                }
            }
        }
    }

    #[test]
    fn euler_relation_holds_for_enumerated_graphs() {
        let st = types::annulus2([Direction::In, Direction::Out]);
        for g in enumerate_ribbon_graphs(&st, None) {
            let inv = g.surface_invariants();
            let v = g.vertex_count() as i64;
            let e = g.edge_count() as i64;
            let f = inv.boundary_components as i64;
            assert_eq!(v - e + f, 2 - 2 * inv.genus as i64);
            assert_eq!(inv.euler_char, 2 - 2 * inv.genus as i64 - f);
        }
    }

    #[test]
    fn disk2_is_the_bare_edge() {
        let st = types::disk(&[Direction::In, Direction::Out]);
        let graphs = enumerate_ribbon_graphs(&st, None);
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].edge_count(), 1);
    }

    #[test]
    fn unrealisable_type_is_empty_not_error() {
        let st = SurfaceType::new(0, vec![vec![0]], vec![Direction::In]).unwrap();
        assert!(enumerate_ribbon_graphs(&st, None).is_empty());
        assert!(!is_admissible(&st));
    }

    #[test]
    fn theta_types_are_found_without_legs() {
        let st = SurfaceType::new(0, vec![vec![], vec![], vec![]], vec![]).unwrap();
        let graphs = enumerate_ribbon_graphs(&st, None);
        assert!(!graphs.is_empty());
        let (theta_canon, _) = crate::graph::samples::theta_planar().canonical_form();
        assert!(graphs
            .iter()
            .any(|g| g.canonical_key() == theta_canon.canonical_key()));
    }
}
