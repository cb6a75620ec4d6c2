//! The cellular model of the moduli space of a surface type.
//!
//! One cell per enumerated ribbon graph; the dimension of a cell is its edge
//! count (external-edge lengths carry the marked-point labels, so they count
//! as coordinates). Attachments collapse single internal non-loop edges and
//! carry the induced DetOr signs. Cells with an orientation-reversing
//! automorphism are zero objects: they are kept for bookkeeping but chains
//! supported on them vanish.

use std::collections::BTreeMap;

use num::Zero;

use crate::enumerate::enumerate_ribbon_graphs;
use crate::error::GraphError;
use crate::exact::Rational64;
use crate::graph::{Direction, Leg, RibbonGraph, SurfaceType};
use crate::orientation::{
    cell_matching_sign, collapse_attachment, cv_normalization, OrientationData,
};

/// Attachment of a cell onto the collapse of one internal non-loop edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub edge: usize,
    pub target: usize,
    pub sign: i64,
}

/// A cell of the moduli complex.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Canonical representative of the isomorphism class.
    pub graph: RibbonGraph,
    pub key: Vec<usize>,
    /// Total dimension: edge count, marked-point labels included.
    pub dim: usize,
    /// Label-free dimension: internal plus boundary-length moduli only.
    pub moduli_dim: usize,
    pub reference: OrientationData,
    pub automorphisms: Vec<Vec<usize>>,
    /// True if some automorphism reverses the DetOr trivialization.
    pub degenerate: bool,
    pub attachments: Vec<Attachment>,
}

/// Cellular model of the moduli space of a surface type.
#[derive(Debug, Clone)]
pub struct ModuliComplex {
    pub surface: SurfaceType,
    pub cells: Vec<Cell>,
    index: BTreeMap<Vec<usize>, usize>,
}

/// Formal sum of cells with rational coefficients, relative to each cell's
/// reference orientation data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellularChain {
    pub terms: BTreeMap<usize, Rational64>,
}

impl CellularChain {
    pub fn zero() -> Self {
        CellularChain::default()
    }

    pub fn from_cell(cell: usize) -> Self {
        let mut c = CellularChain::zero();
        c.add(cell, Rational64::from_integer(1));
        c
    }

    pub fn add(&mut self, cell: usize, coeff: Rational64) {
        let entry = self.terms.entry(cell).or_insert_with(Rational64::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&cell);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl ModuliComplex {
    /// Builds the complex of a surface type: one cell per isomorphism class,
    /// attachments by single-edge collapse with induced signs.
    pub fn build(s: &SurfaceType) -> Result<ModuliComplex, GraphError> {
        let mut graphs = enumerate_ribbon_graphs(s, None);
        if graphs.is_empty() {
            return Err(GraphError::EmptySurfaceType(s.to_string()));
        }
        graphs.sort_by_key(|g| (g.edge_count(), g.canonical_key()));
        let index: BTreeMap<Vec<usize>, usize> = graphs
            .iter()
            .enumerate()
            .map(|(i, g)| (g.canonical_key(), i))
            .collect();
        let mut cells = Vec::with_capacity(graphs.len());
        for g in &graphs {
            let reference = OrientationData::reference(g);
            let automorphisms = g.automorphisms();
            let degenerate = automorphisms
                .iter()
                .map(|phi| {
                    let transported = reference.transported(g, g, phi);
                    cell_matching_sign(g, &reference, &transported)
                })
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .any(|s| s == -1);
            cells.push(Cell {
                key: g.canonical_key(),
                dim: g.edge_count(),
                moduli_dim: g.edge_count() - g.legs().len(),
                reference,
                automorphisms,
                degenerate,
                attachments: Vec::new(),
                graph: g.clone(),
            });
        }
        let mut complex = ModuliComplex {
            surface: s.clone(),
            cells,
            index,
        };
        for i in 0..complex.cells.len() {
            let g = complex.cells[i].graph.clone();
            let reference = complex.cells[i].reference.clone();
            let mut attachments = Vec::new();
            for e in g.internal_edges() {
                if g.is_loop(e) {
                    continue;
                }
                let data = collapse_attachment(&g, e, &reference)?;
                let (canon, rel) = data.collapsed.canonical_form();
                let target = *complex
                    .index
                    .get(&canon.canonical_key())
                    .expect("enumeration is closed under collapse");
                let transported = data.induced.transported(&data.collapsed, &canon, &rel);
                let matching = cell_matching_sign(
                    &canon,
                    &transported,
                    &complex.cells[target].reference,
                )?;
                attachments.push(Attachment {
                    edge: e,
                    target,
                    sign: data.local_sign * matching,
                });
            }
            complex.cells[i].attachments = attachments;
        }
        Ok(complex)
    }

    pub fn cell_index(&self, key: &[usize]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn top_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Indices of the trivalent (top-dimensional) cells.
    pub fn top_cells(&self) -> Vec<usize> {
        let top = self.top_dim();
        (0..self.cells.len())
            .filter(|&i| self.cells[i].dim == top)
            .collect()
    }

    pub fn codim1_cells(&self) -> Vec<usize> {
        let top = self.top_dim();
        (0..self.cells.len())
            .filter(|&i| self.cells[i].dim + 1 == top)
            .collect()
    }

    /// Boundary of a chain: signed sum over single-edge collapses. Chains on
    /// degenerate cells vanish, and terms landing on degenerate cells are
    /// dropped.
    pub fn boundary(&self, chain: &CellularChain) -> CellularChain {
        let mut out = CellularChain::zero();
        for (&cell, &coeff) in &chain.terms {
            if self.cells[cell].degenerate {
                continue;
            }
            for att in &self.cells[cell].attachments {
                if self.cells[att.target].degenerate {
                    continue;
                }
                out.add(att.target, coeff * Rational64::from_integer(att.sign));
            }
        }
        out
    }

    /// Verifies that the boundary operator squares to zero on every cell.
    pub fn check_boundary_squared(&self) -> Result<(), String> {
        for i in 0..self.cells.len() {
            let d = self.boundary(&CellularChain::from_cell(i));
            let dd = self.boundary(&d);
            if !dd.is_zero() {
                return Err(format!(
                    "dd != 0 on cell {i} ({}): {:?}",
                    self.cells[i].graph.to_compact(),
                    dd.terms
                ));
            }
        }
        Ok(())
    }

    /// Pairwise cancellation report: every non-degenerate codimension-1 cell
    /// with a unique 4-valent vertex receives exactly two attachment
    /// contributions from expanding top cells, with opposite induced signs
    /// after normalising the top trivializations against their natural
    /// (Conant-Vogtmann) classes.
    pub fn collapse_pair_report(&self) -> Vec<CollapsePair> {
        let mut out = Vec::new();
        for &c in &self.codim1_cells() {
            if self.cells[c].degenerate {
                continue;
            }
            let mut contributions = Vec::new();
            for &t in &self.top_cells() {
                let cell = &self.cells[t];
                if cell.degenerate {
                    continue;
                }
                let cv = cv_normalization(&cell.graph, &cell.reference)
                    .expect("top cells are trivalent");
                for att in &cell.attachments {
                    if att.target == c {
                        contributions.push((t, att.edge, att.sign * cv));
                    }
                }
            }
            let cancels = contributions.len() == 2
                && contributions[0].2 + contributions[1].2 == 0;
            out.push(CollapsePair {
                cell: c,
                contributions,
                cancels,
            });
        }
        out
    }

    /// Line-delimited dump: one record per cell.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.cells.iter().enumerate() {
            let attach = c
                .attachments
                .iter()
                .map(|a| format!("e{}>{}:{:+}", a.edge, a.target, a.sign))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!(
                "cell={i}\tdim={}\tmdim={}\taut={}\tdegen={}\tattach={}\tgraph={}\n",
                c.dim,
                c.moduli_dim,
                c.automorphisms.len(),
                u8::from(c.degenerate),
                if attach.is_empty() { "-" } else { &attach },
                c.graph.to_compact(),
            ));
        }
        out
    }
}

/// One codimension-1 cancellation record.
#[derive(Debug, Clone)]
pub struct CollapsePair {
    pub cell: usize,
    /// (top cell, collapsing edge, attachment sign normalised by the top
    /// cell's Conant-Vogtmann comparison).
    pub contributions: Vec<(usize, usize, i64)>,
    pub cancels: bool,
}

/// Result of gluing two graphs: the glued graph (raw labels), the slot map of
/// the surviving legs, and the neck edges created by the attachment pairs.
#[derive(Debug, Clone)]
pub struct GluedGraph {
    pub graph: RibbonGraph,
    /// For each result slot: (0 for the left factor, 1 for the right) and the
    /// original slot there.
    pub slot_origin: Vec<(u8, usize)>,
    /// Edge index in `graph` of the neck created by each pairing entry.
    pub neck_edges: Vec<usize>,
    /// Half-edge maps from the factors into the glued graph (`None` on the
    /// erased leg half-edges).
    pub left_map: Vec<Option<usize>>,
    pub right_map: Vec<Option<usize>>,
}

/// Attaches outgoing legs of `g1` to incoming legs of `g2` and erases the
/// transient bivalent vertices, so each glued pair becomes a single edge.
/// `pairing` lists (out-slot of g1, in-slot of g2).
pub fn glue(
    g1: &RibbonGraph,
    g2: &RibbonGraph,
    pairing: &[(usize, usize)],
) -> Result<GluedGraph, GraphError> {
    if pairing.is_empty() {
        return Err(GraphError::GluingMismatch(
            "at least one attachment pair is required".into(),
        ));
    }
    let mut used1 = vec![false; g1.legs().len()];
    let mut used2 = vec![false; g2.legs().len()];
    for &(s1, s2) in pairing {
        let l1 = g1
            .legs()
            .get(s1)
            .ok_or_else(|| GraphError::GluingMismatch(format!("no out slot {s1}")))?;
        let l2 = g2
            .legs()
            .get(s2)
            .ok_or_else(|| GraphError::GluingMismatch(format!("no in slot {s2}")))?;
        if l1.dir != Direction::Out {
            return Err(GraphError::GluingMismatch(format!(
                "left slot {s1} is not outgoing"
            )));
        }
        if l2.dir != Direction::In {
            return Err(GraphError::GluingMismatch(format!(
                "right slot {s2} is not incoming"
            )));
        }
        if used1[s1] || used2[s2] {
            return Err(GraphError::GluingMismatch("slot paired twice".into()));
        }
        used1[s1] = true;
        used2[s2] = true;
    }
    let n1 = g1.half_edge_count();
    let n2 = g2.half_edge_count();
    let erased1: Vec<bool> = (0..n1)
        .map(|h| {
            g1.slot_of(h)
                .map(|s| used1[s])
                .unwrap_or(false)
        })
        .collect();
    let erased2: Vec<bool> = (0..n2)
        .map(|h| {
            g2.slot_of(h)
                .map(|s| used2[s])
                .unwrap_or(false)
        })
        .collect();
    let mut left_map: Vec<Option<usize>> = vec![None; n1];
    let mut right_map: Vec<Option<usize>> = vec![None; n2];
    let mut next = 0;
    for h in 0..n1 {
        if !erased1[h] {
            left_map[h] = Some(next);
            next += 1;
        }
    }
    for h in 0..n2 {
        if !erased2[h] {
            right_map[h] = Some(next);
            next += 1;
        }
    }
    let total = next;
    let mut sigma = vec![0usize; total];
    let mut iota = vec![0usize; total];
    for h in 0..n1 {
        let Some(nh) = left_map[h] else { continue };
        sigma[nh] = left_map[g1.sigma(h)].expect("legs are sigma-fixed");
        if !erased1[g1.iota(h)] {
            iota[nh] = left_map[g1.iota(h)].unwrap();
        }
    }
    for h in 0..n2 {
        let Some(nh) = right_map[h] else { continue };
        sigma[nh] = right_map[g2.sigma(h)].expect("legs are sigma-fixed");
        if !erased2[g2.iota(h)] {
            iota[nh] = right_map[g2.iota(h)].unwrap();
        }
    }
    for &(s1, s2) in pairing {
        let a1 = g1.iota(g1.legs()[s1].half_edge);
        let a2 = g2.iota(g2.legs()[s2].half_edge);
        let (na1, na2) = (left_map[a1].unwrap(), right_map[a2].unwrap());
        iota[na1] = na2;
        iota[na2] = na1;
    }
    let mut legs = Vec::new();
    let mut slot_origin = Vec::new();
    for (s, leg) in g1.legs().iter().enumerate() {
        if !used1[s] {
            legs.push(Leg {
                half_edge: left_map[leg.half_edge].unwrap(),
                dir: leg.dir,
            });
            slot_origin.push((0u8, s));
        }
    }
    for (s, leg) in g2.legs().iter().enumerate() {
        if !used2[s] {
            legs.push(Leg {
                half_edge: right_map[leg.half_edge].unwrap(),
                dir: leg.dir,
            });
            slot_origin.push((1u8, s));
        }
    }
    let graph = RibbonGraph::new(sigma, iota, legs)?;
    let neck_edges = pairing
        .iter()
        .map(|&(s1, _)| graph.edge_of(left_map[g1.iota(g1.legs()[s1].half_edge)].unwrap()))
        .collect();
    Ok(GluedGraph {
        graph,
        slot_origin,
        neck_edges,
        left_map,
        right_map,
    })
}

/// Chain on a product of two moduli complexes, indexed by cell pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProductChain {
    pub terms: BTreeMap<(usize, usize), Rational64>,
}

impl ProductChain {
    pub fn add(&mut self, cell: (usize, usize), coeff: Rational64) {
        let entry = self.terms.entry(cell).or_insert_with(Rational64::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&cell);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Boundary on the product complex by the graded Leibniz rule.
pub fn product_boundary(
    chain: &ProductChain,
    left: &ModuliComplex,
    right: &ModuliComplex,
) -> ProductChain {
    let mut out = ProductChain::default();
    for (&(a, b), &coeff) in &chain.terms {
        let da = left.boundary(&CellularChain::from_cell(a));
        for (&a2, &s) in &da.terms {
            out.add((a2, b), coeff * s);
        }
        let sign = if left.cells[a].dim % 2 == 1 { -1 } else { 1 };
        let db = right.boundary(&CellularChain::from_cell(b));
        for (&b2, &s) in &db.terms {
            out.add((a, b2), coeff * s * Rational64::from_integer(sign));
        }
    }
    out
}

/// The transfer data of a gluing pattern: which glued cells decompose as a
/// product of factor cells, with the induced sign.
#[derive(Debug, Clone)]
pub struct GluingMap {
    pub pairing: Vec<(usize, usize)>,
    /// glued cell -> (left cell, right cell, lift sign)
    pub decomposition: BTreeMap<usize, (usize, usize, i64)>,
    /// Result-slot origins, identical for every decomposable cell.
    pub slot_origin: Vec<(u8, usize)>,
}

/// Builds the transfer data by gluing every pair of factor cells and locating
/// the image in the glued complex.
pub fn build_gluing_map(
    left: &ModuliComplex,
    right: &ModuliComplex,
    glued: &ModuliComplex,
    pairing: &[(usize, usize)],
) -> Result<GluingMap, GraphError> {
    let mut decomposition = BTreeMap::new();
    let mut slot_origin = None;
    for (i, ci) in left.cells.iter().enumerate() {
        for (j, cj) in right.cells.iter().enumerate() {
            let g = glue(&ci.graph, &cj.graph, pairing)?;
            let (canon, rel) = g.graph.canonical_form();
            let Some(target) = glued.cell_index(&canon.canonical_key()) else {
                continue;
            };
            let od = glued_orientation(&g, ci, cj, pairing);
            let transported = od.transported(&g.graph, &canon, &rel);
            let sign = cell_matching_sign(
                &canon,
                &transported,
                &glued.cells[target].reference,
            )?;
            if let Some(prev) = decomposition.insert(target, (i, j, sign)) {
                return Err(GraphError::GluingMismatch(format!(
                    "glued cell {target} decomposes both as {prev:?} and as ({i},{j})"
                )));
            }
            if slot_origin.is_none() {
                slot_origin = Some(g.slot_origin.clone());
            }
        }
    }
    Ok(GluingMap {
        pairing: pairing.to_vec(),
        decomposition,
        slot_origin: slot_origin.unwrap_or_default(),
    })
}

/// Orientation data on a glued graph assembled from the factor references:
/// left edges in left order, then the necks in pairing order, then right
/// edges; vertices left-then-right; incoming legs left-then-right.
fn glued_orientation(
    glued: &GluedGraph,
    left: &Cell,
    right: &Cell,
    pairing: &[(usize, usize)],
) -> OrientationData {
    let g = &glued.graph;
    let g1 = &left.graph;
    let g2 = &right.graph;
    let mut edge_orientation = vec![(usize::MAX, usize::MAX); g.edge_count()];
    let mut edge_order = Vec::new();
    let glued_out: Vec<usize> = pairing.iter().map(|&(s1, _)| s1).collect();
    let glued_in: Vec<usize> = pairing.iter().map(|&(_, s2)| s2).collect();
    for &e in &left.reference.edge_order {
        let (t, h) = left.reference.edge_orientation[e];
        let (mt, mh) = (glued.left_map[t], glued.left_map[h]);
        let (Some(mt), Some(mh)) = (mt, mh) else {
            continue; // glued leg edge, handled as a neck
        };
        let ne = g.edge_of(mt);
        edge_orientation[ne] = (mt, mh);
        edge_order.push(ne);
    }
    for (k, &(s1, s2)) in pairing.iter().enumerate() {
        let a1 = g1.iota(g1.legs()[s1].half_edge);
        let a2 = g2.iota(g2.legs()[s2].half_edge);
        let (na1, na2) = (
            glued.left_map[a1].expect("neck half survives"),
            glued.right_map[a2].expect("neck half survives"),
        );
        let ne = glued.neck_edges[k];
        // Both halves of the former legs point from the left factor into the
        // right factor, so the neck inherits that orientation.
        edge_orientation[ne] = (na1, na2);
        edge_order.push(ne);
    }
    for &e in &right.reference.edge_order {
        let (t, h) = right.reference.edge_orientation[e];
        let (mt, mh) = (glued.right_map[t], glued.right_map[h]);
        let (Some(mt), Some(mh)) = (mt, mh) else {
            continue;
        };
        let ne = g.edge_of(mt);
        edge_orientation[ne] = (mt, mh);
        edge_order.push(ne);
    }
    let vertex_of = g.vertex_of_table();
    let mut vertex_order = Vec::new();
    for &v in &left.reference.vertex_order {
        let h = g1.vertices()[v][0];
        vertex_order.push(vertex_of[glued.left_map[h].expect("internal half survives")]);
    }
    for &v in &right.reference.vertex_order {
        let h = g2.vertices()[v][0];
        vertex_order.push(vertex_of[glued.right_map[h].expect("internal half survives")]);
    }
    // Result slots: left unglued (in original order), then right unglued.
    let mut incoming_leg_order = Vec::new();
    for &s in &left.reference.incoming_leg_order {
        if !glued_out.contains(&s) {
            let pos = glued
                .slot_origin
                .iter()
                .position(|&(side, orig)| side == 0 && orig == s)
                .expect("unglued left slot survives");
            incoming_leg_order.push(pos);
        }
    }
    for &s in &right.reference.incoming_leg_order {
        if !glued_in.contains(&s) {
            let pos = glued
                .slot_origin
                .iter()
                .position(|&(side, orig)| side == 1 && orig == s)
                .expect("unglued right slot survives");
            incoming_leg_order.push(pos);
        }
    }
    OrientationData {
        edge_orientation,
        vertex_order,
        edge_order,
        incoming_leg_order,
    }
}

/// Transfer of a cellular chain on the glued complex to the product complex:
/// terms outside the image of the gluing drop; image cells lift with one
/// length-splitting coordinate per glued edge (degree `+n`).
pub fn transfer(chain: &CellularChain, map: &GluingMap) -> ProductChain {
    let mut out = ProductChain::default();
    for (&cell, &coeff) in &chain.terms {
        if let Some(&(i, j, sign)) = map.decomposition.get(&cell) {
            out.add((i, j), coeff * Rational64::from_integer(sign));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::types;
    use crate::graph::samples;

    #[test]
    fn annulus_complex_shape() {
        let st = types::annulus2([Direction::In, Direction::Out]);
        let cx = ModuliComplex::build(&st).unwrap();
        assert_eq!(cx.cells.len(), 5);
        assert_eq!(cx.top_cells().len(), 3);
        assert_eq!(cx.codim1_cells().len(), 2);
        // Dimensions: top cells have 4 edges (2 moduli + 2 labels).
        for &t in &cx.top_cells() {
            assert_eq!(cx.cells[t].dim, 4);
            assert_eq!(cx.cells[t].moduli_dim, 2);
        }
        cx.check_boundary_squared().unwrap();
    }

    #[test]
    fn disk4_complex_shape_and_dd() {
        let cx = ModuliComplex::build(&types::disk4()).unwrap();
        assert_eq!(cx.cells.len(), 3);
        assert_eq!(cx.top_cells().len(), 2);
        assert_eq!(cx.codim1_cells().len(), 1);
        cx.check_boundary_squared().unwrap();
    }

    #[test]
    fn disk3_complex_is_a_single_cell() {
        let cx = ModuliComplex::build(&types::disk3()).unwrap();
        assert_eq!(cx.cells.len(), 1);
        assert!(cx.cells[0].attachments.is_empty());
    }

    #[test]
    fn empty_surface_type_is_an_error() {
        let st = SurfaceType::new(0, vec![vec![0]], vec![Direction::In]).unwrap();
        assert!(matches!(
            ModuliComplex::build(&st),
            Err(GraphError::EmptySurfaceType(_))
        ));
    }

    #[test]
    fn collapse_pairs_cancel_on_annulus_and_disk4() {
        for st in [
            types::annulus2([Direction::In, Direction::Out]),
            types::disk4(),
        ] {
            let cx = ModuliComplex::build(&st).unwrap();
            let report = cx.collapse_pair_report();
            assert!(!report.is_empty());
            for pair in report {
                assert_eq!(pair.contributions.len(), 2, "{pair:?}");
                assert!(pair.cancels, "{pair:?}");
            }
        }
    }

    #[test]
    fn chain_with_only_loop_edges_has_zero_boundary() {
        // Torus with one marked point: the top cells include graphs whose
        // internal edges may be loops; boundary drops loop collapses.
        let st = SurfaceType::new(1, vec![vec![0]], vec![Direction::In]).unwrap();
        let cx = ModuliComplex::build(&st).unwrap();
        cx.check_boundary_squared().unwrap();
        for cell in &cx.cells {
            for att in &cell.attachments {
                assert!(!cell.graph.is_loop(att.edge));
            }
        }
    }

    #[test]
    fn glue_tripods_into_caterpillar() {
        let t1 = samples::tripod();
        let t2 = samples::tripod();
        let glued = glue(&t1, &t2, &[(2, 0)]).unwrap();
        glued.graph.validate().unwrap();
        let inv = glued.graph.surface_invariants();
        assert_eq!(inv.genus, 0);
        assert_eq!(inv.boundary_components, 1);
        assert_eq!(glued.graph.legs().len(), 4);
        assert_eq!(glued.neck_edges.len(), 1);
        // The glued graph is one of the trivalent disk-4 classes.
        let cx = ModuliComplex::build(&types::disk4()).unwrap();
        let (canon, _) = glued.graph.canonical_form();
        assert!(cx.cell_index(&canon.canonical_key()).is_some());
    }

    #[test]
    fn glue_rejects_bad_pairings() {
        let t = samples::tripod();
        assert!(glue(&t, &t, &[]).is_err());
        // Out leg paired with out leg.
        assert!(glue(&t, &t, &[(2, 2)]).is_err());
        assert!(glue(&t, &t, &[(0, 0)]).is_err());
    }

    #[test]
    fn transfer_commutes_with_boundary_on_glued_disks() {
        let disk3 = ModuliComplex::build(&types::disk3()).unwrap();
        for pairing in [vec![(2usize, 0usize)], vec![(2usize, 1usize)]] {
            // The glued surface type depends on which input receives the
            // output; build the complex it actually produces.
            let rep = glue(&disk3.cells[0].graph, &disk3.cells[0].graph, &pairing).unwrap();
            let glued_type = rep.graph.surface_invariants().surface_type;
            let glued = ModuliComplex::build(&glued_type).unwrap();
            let gm = build_gluing_map(&disk3, &disk3, &glued, &pairing).unwrap();
            // The image of the gluing is a single top cell.
            assert_eq!(gm.decomposition.len(), 1);
            for i in 0..glued.cells.len() {
                let chain = CellularChain::from_cell(i);
                let lhs = transfer(&glued.boundary(&chain), &gm);
                let rhs = product_boundary(&transfer(&chain, &gm), &disk3, &disk3);
                assert_eq!(lhs, rhs, "cell {i} pairing {pairing:?}");
            }
        }
    }

    #[test]
    fn transfer_commutes_with_boundary_on_annulus_gluings() {
        // Glue the annulus (in,out) to a tripod along its out leg; the image
        // includes cells with internal edges on both sides.
        let ann = ModuliComplex::build(&types::annulus2([Direction::In, Direction::Out])).unwrap();
        let disk3 = ModuliComplex::build(&types::disk3()).unwrap();
        let pairing = vec![(1usize, 0usize)];
        let rep = glue(&ann.cells[4].graph, &disk3.cells[0].graph, &pairing).unwrap();
        let glued_type = rep.graph.surface_invariants().surface_type;
        let glued = ModuliComplex::build(&glued_type).unwrap();
        let gm = build_gluing_map(&ann, &disk3, &glued, &pairing).unwrap();
        assert!(!gm.decomposition.is_empty());
        for i in 0..glued.cells.len() {
            let chain = CellularChain::from_cell(i);
            let lhs = transfer(&glued.boundary(&chain), &gm);
            let rhs = product_boundary(&transfer(&chain, &gm), &ann, &disk3);
            assert_eq!(lhs, rhs, "cell {i}");
        }
    }

    #[test]
    fn dump_is_deterministic() {
        let cx = ModuliComplex::build(&types::disk4()).unwrap();
        assert_eq!(cx.dump(), ModuliComplex::build(&types::disk4()).unwrap().dump());
        assert!(cx.dump().lines().count() == 3);
    }
}
