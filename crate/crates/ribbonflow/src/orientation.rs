//! Orientation data on moduli cells and the associated sign calculus.
//!
//! A trivialization over a cell is pinned by four finite choices: an
//! orientation of every internal edge, a linear order on the internal
//! vertices, a linear order on all edges, and a linear order on the incoming
//! legs. Two sign functionals act on this data:
//!
//! * the `DetOr` level, where every elementary move (one edge reversal, one
//!   adjacent transposition in any of the three orders) contributes `-1`;
//!   this is the rank-one local system used by the cellular boundary;
//! * the `FlowSpace` level, where a reversal or an adjacent internal-vertex
//!   swap contributes `(-1)^d` and an adjacent edge swap contributes
//!   `(-1)^(k_i k_j)` with `k = d+1` on internal edges, `d-ind+1` on incoming
//!   and `ind+1` on outgoing legs; this governs the induced orientation of
//!   the flow-graph spaces over the cell.
//!
//! Boundary attachments move the collapsing edge to the front of the edge
//! order and project it out, and transport the vertices-plus-half-edges
//! orientation through the collapse; the merged vertex inherits the head
//! vertex of the collapsed edge and is placed first.

use crate::error::GraphError;
use crate::exact::{koszul_sign, permutation_sign};
use crate::graph::{Direction, RibbonGraph};

/// Trivialization data over the cell of a ribbon graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationData {
    /// Per edge id: (tail half-edge, head half-edge). External edges carry
    /// their natural orientation (incoming: marked point to graph; outgoing:
    /// graph to marked point).
    pub edge_orientation: Vec<(usize, usize)>,
    /// Internal vertex ids in order.
    pub vertex_order: Vec<usize>,
    /// All edge ids in order.
    pub edge_order: Vec<usize>,
    /// Incoming leg slots in order.
    pub incoming_leg_order: Vec<usize>,
}

/// Which sign functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignLevel<'a> {
    DetOr,
    /// Flow-space level for a manifold of dimension `dim`; `leg_index[slot]`
    /// is the Morse index of the critical point at that leg.
    FlowSpace { dim: usize, leg_index: &'a [usize] },
}

/// The natural orientation of an external edge: incoming edges point from
/// the marked point into the graph, outgoing edges point out of it.
pub fn natural_external_orientation(g: &RibbonGraph, edge: usize) -> Option<(usize, usize)> {
    let (a, b) = g.edges()[edge];
    let (leg_half, other, dir) = if let Some(slot) = g.slot_of(a) {
        (a, b, g.legs()[slot].dir)
    } else if let Some(slot) = g.slot_of(b) {
        (b, a, g.legs()[slot].dir)
    } else {
        return None;
    };
    Some(match dir {
        Direction::In => (leg_half, other),
        Direction::Out => (other, leg_half),
    })
}

impl OrientationData {
    /// Reference data of a cell: edges in id order oriented (min, max) on
    /// internal edges, internal vertices ascending, incoming legs ascending.
    pub fn reference(g: &RibbonGraph) -> OrientationData {
        let edges = g.edges();
        let edge_orientation = (0..edges.len())
            .map(|e| natural_external_orientation(g, e).unwrap_or(edges[e]))
            .collect();
        OrientationData {
            edge_orientation,
            vertex_order: g.internal_vertices(),
            edge_order: (0..edges.len()).collect(),
            incoming_leg_order: (0..g.legs().len())
                .filter(|&s| g.legs()[s].dir == Direction::In)
                .collect(),
        }
    }

    /// Checks consistency with the graph.
    pub fn validate(&self, g: &RibbonGraph) -> Result<(), GraphError> {
        let edges = g.edges();
        let mismatch = |m: String| Err(GraphError::OrientationMismatch(m));
        if self.edge_orientation.len() != edges.len() || self.edge_order.len() != edges.len() {
            return mismatch("edge tables have the wrong length".into());
        }
        for (e, &(t, h)) in self.edge_orientation.iter().enumerate() {
            let (a, b) = edges[e];
            if (t, h) != (a, b) && (t, h) != (b, a) {
                return mismatch(format!("edge {e} oriented by foreign half-edges"));
            }
            if let Some(nat) = natural_external_orientation(g, e) {
                if (t, h) != nat {
                    return mismatch(format!("external edge {e} must keep its natural orientation"));
                }
            }
        }
        let mut sorted = self.vertex_order.clone();
        sorted.sort_unstable();
        if sorted != g.internal_vertices() {
            return mismatch("vertex order is not a permutation of the internal vertices".into());
        }
        let mut es = self.edge_order.clone();
        es.sort_unstable();
        if es != (0..edges.len()).collect::<Vec<_>>() {
            return mismatch("edge order is not a permutation of the edges".into());
        }
        let mut ls = self.incoming_leg_order.clone();
        ls.sort_unstable();
        let expect: Vec<usize> = (0..g.legs().len())
            .filter(|&s| g.legs()[s].dir == Direction::In)
            .collect();
        if ls != expect {
            return mismatch("incoming leg order is not a permutation of the incoming slots".into());
        }
        Ok(())
    }

    /// Transport through a half-edge relabeling `map` (old to new) onto the
    /// relabeled graph.
    pub fn transported(
        &self,
        before: &RibbonGraph,
        after: &RibbonGraph,
        map: &[usize],
    ) -> OrientationData {
        let before_edges = before.edges();
        let before_vertex_of = before.vertex_of_table();
        let after_vertex_of = after.vertex_of_table();
        let mut edge_orientation = vec![(0, 0); before_edges.len()];
        let mut edge_id_map = vec![0usize; before_edges.len()];
        for (e, &(a, _)) in before_edges.iter().enumerate() {
            edge_id_map[e] = after.edge_of(map[a]);
        }
        for (e, &(t, h)) in self.edge_orientation.iter().enumerate() {
            edge_orientation[edge_id_map[e]] = (map[t], map[h]);
        }
        let vertex_id = |v: usize| -> usize {
            let h = before
                .vertices()
                .into_iter()
                .nth(v)
                .expect("vertex exists")[0];
            after_vertex_of[map[h]]
        };
        let _ = &before_vertex_of;
        OrientationData {
            edge_orientation,
            vertex_order: self.vertex_order.iter().map(|&v| vertex_id(v)).collect(),
            edge_order: self.edge_order.iter().map(|&e| edge_id_map[e]).collect(),
            incoming_leg_order: self.incoming_leg_order.clone(),
        }
    }
}

fn reorder_positions(reference: &[usize], other: &[usize]) -> Vec<usize> {
    other
        .iter()
        .map(|x| reference.iter().position(|y| y == x).expect("same sets"))
        .collect()
}

/// Sign relating two trivializations of the same cell.
pub fn relabel_sign(
    g: &RibbonGraph,
    a: &OrientationData,
    b: &OrientationData,
    level: SignLevel,
) -> Result<i64, GraphError> {
    a.validate(g)?;
    b.validate(g)?;
    let reversals = a
        .edge_orientation
        .iter()
        .zip(&b.edge_orientation)
        .filter(|(x, y)| x != y)
        .count();
    let vperm = reorder_positions(&a.vertex_order, &b.vertex_order);
    let eperm = reorder_positions(&a.edge_order, &b.edge_order);
    Ok(match level {
        SignLevel::DetOr => {
            let lperm = reorder_positions(&a.incoming_leg_order, &b.incoming_leg_order);
            let rev = if reversals % 2 == 1 { -1 } else { 1 };
            rev * permutation_sign(&vperm) * permutation_sign(&eperm) * permutation_sign(&lperm)
        }
        SignLevel::FlowSpace { dim, leg_index } => {
            let rev = if (dim * reversals) % 2 == 1 { -1 } else { 1 };
            let vsign = if dim % 2 == 1 {
                permutation_sign(&vperm)
            } else {
                1
            };
            // Degrees follow a.edge_order so they index the reference list.
            let degrees: Vec<usize> = a
                .edge_order
                .iter()
                .map(|&e| edge_degree(g, e, dim, leg_index))
                .collect();
            rev * vsign * koszul_sign(&eperm, &degrees)
        }
    })
}

/// The grading of an edge in the flow-space orientation rules.
pub fn edge_degree(g: &RibbonGraph, edge: usize, dim: usize, leg_index: &[usize]) -> usize {
    let (a, b) = g.edges()[edge];
    let slot = g.slot_of(a).or_else(|| g.slot_of(b));
    match slot {
        None => dim + 1,
        Some(s) => match g.legs()[s].dir {
            Direction::In => dim - leg_index[s] + 1,
            Direction::Out => leg_index[s] + 1,
        },
    }
}

/// Basis element of the vertices-plus-half-edges space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VH {
    Vertex(usize),
    HalfEdge(usize),
}

/// Ordered basis of vertices and half-edges induced by orientation data:
/// internal vertices in order, external vertices by leg slot, then per edge
/// in edge order the tail and head half-edges.
pub fn vh_basis(g: &RibbonGraph, od: &OrientationData) -> Vec<VH> {
    let vertex_of = g.vertex_of_table();
    let mut out: Vec<VH> = od.vertex_order.iter().map(|&v| VH::Vertex(v)).collect();
    for leg in g.legs() {
        out.push(VH::Vertex(vertex_of[leg.half_edge]));
    }
    for &e in &od.edge_order {
        let (t, h) = od.edge_orientation[e];
        out.push(VH::HalfEdge(t));
        out.push(VH::HalfEdge(h));
    }
    out
}

fn vh_id(g: &RibbonGraph, x: VH) -> usize {
    match x {
        VH::Vertex(v) => v,
        VH::HalfEdge(h) => g.vertex_count() + h,
    }
}

/// Parity of the permutation carrying `from` to `to` (same element sets).
pub fn vh_parity(g: &RibbonGraph, from: &[VH], to: &[VH]) -> i64 {
    let from_ids: Vec<usize> = from.iter().map(|&x| vh_id(g, x)).collect();
    let perm: Vec<usize> = to
        .iter()
        .map(|&x| {
            let id = vh_id(g, x);
            from_ids.iter().position(|&y| y == id).expect("same sets")
        })
        .collect();
    permutation_sign(&perm)
}

/// Canonical Conant-Vogtmann ordering of vertices and half-edges, defined
/// when every vertex has odd valency: per-vertex blocks `[v, its half-edges
/// in cyclic order from the minimum]`, vertices ascending. For odd valencies
/// the block is even-sized and the cyclic start drops out, so the class is
/// natural.
pub fn conant_vogtmann_orientation(g: &RibbonGraph) -> Result<Vec<VH>, GraphError> {
    let vertices = g.vertices();
    for (v, cyc) in vertices.iter().enumerate() {
        if cyc.len() % 2 == 0 {
            return Err(GraphError::EvenValency(v, cyc.len()));
        }
    }
    let mut out = Vec::new();
    for (v, cyc) in vertices.iter().enumerate() {
        out.push(VH::Vertex(v));
        for &h in cyc {
            out.push(VH::HalfEdge(h));
        }
    }
    Ok(out)
}

/// Sign of an automorphism `phi` (a half-edge map) on the Conant-Vogtmann
/// class: the parity of the induced permutation of vertices and half-edges.
pub fn cv_automorphism_sign(g: &RibbonGraph, phi: &[usize]) -> Result<i64, GraphError> {
    let basis = conant_vogtmann_orientation(g)?;
    let vertex_of = g.vertex_of_table();
    let image: Vec<VH> = basis
        .iter()
        .map(|&x| match x {
            VH::Vertex(v) => {
                let h = g.vertices()[v][0];
                VH::Vertex(vertex_of[phi[h]])
            }
            VH::HalfEdge(h) => VH::HalfEdge(phi[h]),
        })
        .collect();
    Ok(vh_parity(g, &basis, &image))
}

/// Sign comparing a cell's reference trivialization of the vertices-plus-
/// half-edges factor with the Conant-Vogtmann class.
pub fn cv_normalization(g: &RibbonGraph, od: &OrientationData) -> Result<i64, GraphError> {
    let cv = conant_vogtmann_orientation(g)?;
    Ok(vh_parity(g, &cv, &vh_basis(g, od)))
}

/// Action of an automorphism on the DetOr trivialization; `-1` detects cells
/// that are zero objects of the complex.
pub fn detor_automorphism_sign(
    g: &RibbonGraph,
    od: &OrientationData,
    phi: &[usize],
) -> Result<i64, GraphError> {
    let transported = od.transported(g, g, phi);
    relabel_sign(g, od, &transported, SignLevel::DetOr)
}

/// Outcome of collapsing an edge with the transported orientation data.
#[derive(Debug, Clone)]
pub struct CollapseData {
    pub collapsed: RibbonGraph,
    pub induced: OrientationData,
    /// Sign from moving the collapsing edge first in the edge order and
    /// projecting the vertices-plus-half-edges factor.
    pub local_sign: i64,
    pub half_edge_map: Vec<Option<usize>>,
}

/// Sign relating two trivializations at the level of cellular chain
/// coefficients. The cell orientation (an ordering of the Met coordinates)
/// and the edge-order factor of the local system are the same wedge, so
/// edge reorderings cancel; what remains is the parity of the vertices-plus-
/// half-edges comparison (which sees vertex reorder and edge reversals and is
/// neutral for edge reorder, half-edges moving in pairs) times the incoming-
/// leg permutation sign.
pub fn cell_matching_sign(
    g: &RibbonGraph,
    a: &OrientationData,
    b: &OrientationData,
) -> Result<i64, GraphError> {
    a.validate(g)?;
    b.validate(g)?;
    let lperm = reorder_positions(&a.incoming_leg_order, &b.incoming_leg_order);
    Ok(vh_parity(g, &vh_basis(g, a), &vh_basis(g, b)) * permutation_sign(&lperm))
}

/// Collapses internal non-loop edge `e`, producing the induced orientation
/// data on the collapsed graph and the local boundary sign.
///
/// The sign is the parity of pulling the collapsed edge's half-edges and its
/// tail vertex to the front of the vertices-plus-half-edges basis, with the
/// surviving head vertex (the merged vertex downstairs) placed first in the
/// induced order. The Met coordinate of `e` is projected out against the
/// same edge-order wedge in the local system, so no positional edge factor
/// appears.
pub fn collapse_attachment(
    g: &RibbonGraph,
    e: usize,
    od: &OrientationData,
) -> Result<CollapseData, GraphError> {
    od.validate(g)?;
    let (collapsed, map) = g.collapse_edge_with_map(e)?;
    let vertex_of = g.vertex_of_table();
    let (h_tail, h_head) = od.edge_orientation[e];
    let (v_tail, v_head) = (vertex_of[h_tail], vertex_of[h_head]);

    // Pull (h_tail, h_head, v_tail) to the front with the surviving head
    // vertex next, then project the leading block out.
    let basis = vh_basis(g, od);
    let mut target = vec![
        VH::HalfEdge(h_tail),
        VH::HalfEdge(h_head),
        VH::Vertex(v_tail),
        VH::Vertex(v_head),
    ];
    for &x in &basis {
        if !target.contains(&x) {
            target.push(x);
        }
    }
    let s = vh_parity(g, &basis, &target);

    // Induced data on the collapsed graph.
    let before_edges = g.edges();
    let mut edge_id_map = vec![usize::MAX; before_edges.len()];
    for (f, &(a, _)) in before_edges.iter().enumerate() {
        if f != e {
            edge_id_map[f] = collapsed.edge_of(map[a].expect("surviving half-edge"));
        }
    }
    let mut edge_orientation = vec![(0, 0); collapsed.edge_count()];
    for (f, &(t, h)) in od.edge_orientation.iter().enumerate() {
        if f != e {
            edge_orientation[edge_id_map[f]] = (
                map[t].expect("surviving half-edge"),
                map[h].expect("surviving half-edge"),
            );
        }
    }
    let after_vertex_of = collapsed.vertex_of_table();
    let surviving_half = g.vertices()[v_head]
        .iter()
        .copied()
        .find(|&h| map[h].is_some())
        .expect("head vertex has surviving half-edges");
    let merged = after_vertex_of[map[surviving_half].unwrap()];
    let mut vertex_order = vec![merged];
    for &v in &od.vertex_order {
        if v == v_tail || v == v_head {
            continue;
        }
        let h = g.vertices()[v][0];
        vertex_order.push(after_vertex_of[map[h].expect("internal half survives")]);
    }
    let induced = OrientationData {
        edge_orientation,
        vertex_order,
        edge_order: od
            .edge_order
            .iter()
            .filter(|&&f| f != e)
            .map(|&f| edge_id_map[f])
            .collect(),
        incoming_leg_order: od.incoming_leg_order.clone(),
    };
    Ok(CollapseData {
        collapsed,
        induced,
        local_sign: s,
        half_edge_map: map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_od(g: &RibbonGraph, rng: &mut ChaCha8Rng) -> OrientationData {
        let mut od = OrientationData::reference(g);
        for e in 0..g.edge_count() {
            if natural_external_orientation(g, e).is_none() && rng.gen_bool(0.5) {
                let (t, h) = od.edge_orientation[e];
                od.edge_orientation[e] = (h, t);
            }
        }
        od.vertex_order.shuffle(rng);
        od.edge_order.shuffle(rng);
        od.incoming_leg_order.shuffle(rng);
        od
    }

    #[test]
    fn identity_relabel_is_plus_one() {
        let g = caterpillar4();
        let od = OrientationData::reference(&g);
        assert_eq!(relabel_sign(&g, &od, &od, SignLevel::DetOr).unwrap(), 1);
        assert_eq!(
            relabel_sign(
                &g,
                &od,
                &od,
                SignLevel::FlowSpace {
                    dim: 2,
                    leg_index: &[1, 1, 1, 2]
                }
            )
            .unwrap(),
            1
        );
    }

    #[test]
    fn adjacent_vertex_swap_is_minus_one_at_detor_level() {
        let g = caterpillar4();
        let a = OrientationData::reference(&g);
        let mut b = a.clone();
        b.vertex_order.swap(0, 1);
        assert_eq!(relabel_sign(&g, &a, &b, SignLevel::DetOr).unwrap(), -1);
    }

    #[test]
    fn edge_reversal_at_flow_level_scales_by_dimension_parity() {
        let g = caterpillar4();
        let a = OrientationData::reference(&g);
        let mut b = a.clone();
        let e = g.internal_edges()[0];
        let (t, h) = b.edge_orientation[e];
        b.edge_orientation[e] = (h, t);
        assert_eq!(relabel_sign(&g, &a, &b, SignLevel::DetOr).unwrap(), -1);
        let leg_index = [1usize, 1, 1, 2];
        for (dim, expect) in [(1usize, -1i64), (2, 1), (3, -1)] {
            assert_eq!(
                relabel_sign(
                    &g,
                    &a,
                    &b,
                    SignLevel::FlowSpace {
                        dim,
                        leg_index: &leg_index
                    }
                )
                .unwrap(),
                expect
            );
        }
    }

    #[test]
    fn relabel_sign_is_a_cocycle() {
        let g = caterpillar4();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let leg_index = [0usize, 1, 2, 1];
        for _ in 0..200 {
            let a = random_od(&g, &mut rng);
            let b = random_od(&g, &mut rng);
            let c = random_od(&g, &mut rng);
            for level in [
                SignLevel::DetOr,
                SignLevel::FlowSpace {
                    dim: 2,
                    leg_index: &leg_index,
                },
                SignLevel::FlowSpace {
                    dim: 3,
                    leg_index: &leg_index,
                },
            ] {
                let ab = relabel_sign(&g, &a, &b, level).unwrap();
                let bc = relabel_sign(&g, &b, &c, level).unwrap();
                let ac = relabel_sign(&g, &a, &c, level).unwrap();
                assert_eq!(ab * bc, ac);
                assert_eq!(relabel_sign(&g, &b, &a, level).unwrap(), ab);
            }
        }
    }

    #[test]
    fn cv_orientation_needs_odd_valencies() {
        assert!(conant_vogtmann_orientation(&tripod()).is_ok());
        assert!(matches!(
            conant_vogtmann_orientation(&star4()),
            Err(GraphError::EvenValency(_, 4))
        ));
    }

    #[test]
    fn cv_automorphism_signs_match_brute_parity() {
        // Brute-force parity oracle on the vertices ⊔ half-edges set.
        fn brute(g: &RibbonGraph, phi: &[usize]) -> i64 {
            let vertex_of = g.vertex_of_table();
            let nv = g.vertex_count();
            let mut perm: Vec<usize> = Vec::new();
            for v in 0..nv {
                let h = g.vertices()[v][0];
                perm.push(vertex_of[phi[h]]);
            }
            for h in 0..g.half_edge_count() {
                perm.push(nv + phi[h]);
            }
            crate::exact::permutation_sign(&perm)
        }
        let g = theta_same();
        for phi in g.automorphisms() {
            assert_eq!(cv_automorphism_sign(&g, &phi).unwrap(), brute(&g, &phi));
            // Odd valency everywhere: automorphisms preserve the class.
            assert_eq!(cv_automorphism_sign(&g, &phi).unwrap(), 1);
        }
        assert_eq!(
            cv_automorphism_sign(&tripod(), &tripod().automorphisms()[0]).unwrap(),
            1
        );
    }

    #[test]
    fn collapse_attachment_is_covariant_under_relabeling() {
        // Changing the top-cell trivialization rescales the attachment sign
        // by exactly the cell-level matching sign.
        let g = caterpillar4();
        let e = g.internal_edges()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = collapse_attachment(&g, e, &OrientationData::reference(&g)).unwrap();
        for _ in 0..50 {
            let od = random_od(&g, &mut rng);
            let alt = collapse_attachment(&g, e, &od).unwrap();
            let rel_top =
                cell_matching_sign(&g, &OrientationData::reference(&g), &od).unwrap();
            let rel_bottom =
                cell_matching_sign(&base.collapsed, &base.induced, &alt.induced).unwrap();
            assert_eq!(alt.local_sign * rel_top, base.local_sign * rel_bottom);
        }
    }
}
