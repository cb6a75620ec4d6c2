//! Half-edge ribbon graphs.
//!
//! A ribbon graph is stored as a pair of permutations on a finite half-edge
//! set `0..n`: `iota` is a fixed-point-free involution pairing half-edges into
//! edges, and `sigma` is the permutation whose cycles are the vertices with
//! their cyclic order. External legs are sigma-fixed half-edges (univalent
//! vertices) carried in an ordered slot table with in/out direction flags; an
//! isomorphism must fix every slot, which models embeddings up to isotopy
//! constant on the marked points.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::GraphError;

/// Direction flag of an external leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::In => Direction::Out,
            Direction::Out => Direction::In,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::In => write!(f, "in"),
            Direction::Out => write!(f, "out"),
        }
    }
}

/// An external leg: the sigma-fixed half-edge at a univalent vertex plus its
/// direction flag. The slot index is the position in `RibbonGraph::legs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Leg {
    pub half_edge: usize,
    pub dir: Direction,
}

/// Ribbon graph as a permutation pair plus the ordered leg table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RibbonGraph {
    sigma: Vec<usize>,
    iota: Vec<usize>,
    legs: Vec<Leg>,
}

/// Non-negative edge lengths, indexed like `RibbonGraph::edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricStructure {
    pub lengths: Vec<f64>,
}

impl MetricStructure {
    pub fn uniform(graph: &RibbonGraph, value: f64) -> Self {
        MetricStructure {
            lengths: vec![value; graph.edge_count()],
        }
    }

    /// Open-cell validity: every length strictly positive.
    pub fn validate_open(&self, graph: &RibbonGraph) -> Result<(), GraphError> {
        self.check_len(graph)?;
        if let Some(i) = self.lengths.iter().position(|&l| l <= 0.0) {
            return Err(GraphError::BadMetric(format!(
                "edge {i} has non-positive length"
            )));
        }
        Ok(())
    }

    /// Degenerate-closure validity: lengths non-negative and no cycle of
    /// zero-length edges (total length in any cycle stays positive).
    pub fn validate_closure(&self, graph: &RibbonGraph) -> Result<(), GraphError> {
        self.check_len(graph)?;
        if let Some(i) = self.lengths.iter().position(|&l| l < 0.0) {
            return Err(GraphError::BadMetric(format!(
                "edge {i} has negative length"
            )));
        }
        // Union-find over vertices; a zero edge closing a cycle is invalid.
        let vertex_of = graph.vertex_of_table();
        let mut parent: Vec<usize> = (0..graph.vertex_count()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, (a, b)) in graph.edges().iter().enumerate() {
            if self.lengths[i] == 0.0 {
                let (ra, rb) = (
                    find(&mut parent, vertex_of[*a]),
                    find(&mut parent, vertex_of[*b]),
                );
                if ra == rb {
                    return Err(GraphError::BadMetric(format!(
                        "zero-length edges contain a cycle through edge {i}"
                    )));
                }
                parent[ra] = rb;
            }
        }
        Ok(())
    }

    fn check_len(&self, graph: &RibbonGraph) -> Result<(), GraphError> {
        if self.lengths.len() != graph.edge_count() {
            return Err(GraphError::BadMetric(format!(
                "{} lengths for {} edges",
                self.lengths.len(),
                graph.edge_count()
            )));
        }
        Ok(())
    }
}

/// Topological type of the thickened surface: genus, the cyclic sequences of
/// leg slots on each boundary component, and the per-slot direction flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceType {
    pub genus: usize,
    /// One entry per boundary component: leg slots in boundary-cyclic order,
    /// rotated so the minimal slot comes first; components sorted.
    pub boundaries: Vec<Vec<usize>>,
    /// Direction of each leg slot, indexed by slot.
    pub dirs: Vec<Direction>,
}

impl SurfaceType {
    pub fn new(
        genus: usize,
        boundaries: Vec<Vec<usize>>,
        dirs: Vec<Direction>,
    ) -> Result<Self, GraphError> {
        let mut seen = vec![false; dirs.len()];
        for b in &boundaries {
            for &s in b {
                if s >= dirs.len() || seen[s] {
                    return Err(GraphError::Parse(format!(
                        "slot {s} missing a direction or repeated"
                    )));
                }
                seen[s] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::Parse("slot not placed on any boundary".into()));
        }
        let mut st = SurfaceType {
            genus,
            boundaries,
            dirs,
        };
        st.canonicalize();
        Ok(st)
    }

    fn canonicalize(&mut self) {
        for b in &mut self.boundaries {
            if !b.is_empty() {
                let k = b
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &s)| s)
                    .map(|(i, _)| i)
                    .unwrap();
                b.rotate_left(k);
            }
        }
        self.boundaries.sort();
    }

    pub fn boundary_components(&self) -> usize {
        self.boundaries.len()
    }

    pub fn leg_count(&self) -> usize {
        self.dirs.len()
    }

    pub fn n_in(&self) -> usize {
        self.dirs.iter().filter(|d| **d == Direction::In).count()
    }

    pub fn n_out(&self) -> usize {
        self.dirs.iter().filter(|d| **d == Direction::Out).count()
    }

    /// Euler characteristic `2 - 2g - m` of the bordered surface.
    pub fn euler_char(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_components() as i64
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={}", self.genus)?;
        write!(f, " b=")?;
        for b in &self.boundaries {
            write!(f, "[")?;
            for (i, s) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "]")?;
        }
        write!(f, " d=")?;
        for d in &self.dirs {
            write!(f, "{}", if *d == Direction::In { 'i' } else { 'o' })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for SurfaceType {
    type Err = GraphError;

    /// Parses the `Display` form, e.g. `g=0 b=[0 1][] d=io`.
    fn from_str(s: &str) -> Result<Self, GraphError> {
        let bad = |m: &str| GraphError::Parse(format!("surface type: {m} in {s:?}"));
        let mut genus = None;
        let mut boundaries = None;
        let mut dirs: Option<Vec<Direction>> = None;
        for tok in s.split_whitespace() {
            if let Some(g) = tok.strip_prefix("g=") {
                genus = Some(g.parse::<usize>().map_err(|_| bad("bad genus"))?);
            } else if let Some(b) = tok.strip_prefix("b=") {
                let mut comps = Vec::new();
                let inner = b.trim();
                let mut rest = inner;
                while !rest.is_empty() {
                    let close = rest.find(']').ok_or_else(|| bad("unclosed ["))?;
                    if !rest.starts_with('[') {
                        return Err(bad("expected ["));
                    }
                    let body = &rest[1..close];
                    let comp: Result<Vec<usize>, _> = body
                        .split(|c: char| c == ' ' || c == ',')
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<usize>())
                        .collect();
                    comps.push(comp.map_err(|_| bad("bad slot"))?);
                    rest = &rest[close + 1..];
                }
                boundaries = Some(comps);
            } else if let Some(d) = tok.strip_prefix("d=") {
                let mut v = Vec::new();
                for c in d.chars() {
                    v.push(match c {
                        'i' => Direction::In,
                        'o' => Direction::Out,
                        _ => return Err(bad("direction must be i or o")),
                    });
                }
                dirs = Some(v);
            } else {
                return Err(bad("unknown token"));
            }
        }
        SurfaceType::new(
            genus.ok_or_else(|| bad("missing g="))?,
            boundaries.ok_or_else(|| bad("missing b="))?,
            dirs.unwrap_or_default(),
        )
    }
}

/// Invariants computed from a graph: genus, boundary count, Euler
/// characteristic and the placement of legs on boundary cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub genus: usize,
    pub boundary_components: usize,
    pub euler_char: i64,
    pub surface_type: SurfaceType,
}

impl RibbonGraph {
    /// Builds a graph from raw permutation tables. `legs` lists the
    /// sigma-fixed half-edges in slot order.
    pub fn new(sigma: Vec<usize>, iota: Vec<usize>, legs: Vec<Leg>) -> Result<Self, GraphError> {
        let g = RibbonGraph { sigma, iota, legs };
        g.check_tables()?;
        Ok(g)
    }

    /// Builds a graph from sigma given as vertex cycles and iota as pairs.
    pub fn from_cycles(
        n: usize,
        vertex_cycles: &[Vec<usize>],
        edge_pairs: &[(usize, usize)],
        legs: Vec<Leg>,
    ) -> Result<Self, GraphError> {
        let mut sigma: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for cyc in vertex_cycles {
            for i in 0..cyc.len() {
                let h = cyc[i];
                if h >= n || seen[h] {
                    return Err(GraphError::NotAPermutation);
                }
                seen[h] = true;
                sigma[h] = cyc[(i + 1) % cyc.len()];
            }
        }
        let mut iota: Vec<usize> = (0..n).collect();
        for &(a, b) in edge_pairs {
            if a >= n || b >= n {
                return Err(GraphError::NotAPermutation);
            }
            iota[a] = b;
            iota[b] = a;
        }
        RibbonGraph::new(sigma, iota, legs)
    }

    fn check_tables(&self) -> Result<(), GraphError> {
        let n = self.sigma.len();
        if self.iota.len() != n || n == 0 {
            return Err(GraphError::NotAPermutation);
        }
        let mut hit = vec![false; n];
        for &x in &self.sigma {
            if x >= n || hit[x] {
                return Err(GraphError::NotAPermutation);
            }
            hit[x] = true;
        }
        hit.iter_mut().for_each(|b| *b = false);
        for (h, &x) in self.iota.iter().enumerate() {
            if x >= n || hit[x] {
                return Err(GraphError::NotAPermutation);
            }
            hit[x] = true;
            if self.iota[x] != h {
                return Err(GraphError::NotAPermutation);
            }
        }
        let mut slot_of = vec![None; n];
        for (slot, leg) in self.legs.iter().enumerate() {
            if leg.half_edge >= n {
                return Err(GraphError::NotAPermutation);
            }
            if slot_of[leg.half_edge].is_some() {
                return Err(GraphError::DuplicateLeg(slot, leg.half_edge));
            }
            slot_of[leg.half_edge] = Some(slot);
        }
        Ok(())
    }

    pub fn half_edge_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self, h: usize) -> usize {
        self.sigma[h]
    }

    pub fn iota(&self, h: usize) -> usize {
        self.iota[h]
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// Slot index of a half-edge if it is a leg.
    pub fn slot_of(&self, h: usize) -> Option<usize> {
        self.legs.iter().position(|l| l.half_edge == h)
    }

    pub fn is_leg_half(&self, h: usize) -> bool {
        self.slot_of(h).is_some()
    }

    /// Vertices as sigma-cycles, each rotated to start at its minimal
    /// half-edge, ordered by that minimum.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        let n = self.sigma.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut h = start;
            loop {
                seen[h] = true;
                cyc.push(h);
                h = self.sigma[h];
                if h == start {
                    break;
                }
            }
            out.push(cyc);
        }
        out
    }

    /// Table mapping each half-edge to its vertex index (in `vertices` order).
    pub fn vertex_of_table(&self) -> Vec<usize> {
        let mut t = vec![0; self.sigma.len()];
        for (v, cyc) in self.vertices().iter().enumerate() {
            for &h in cyc {
                t[h] = v;
            }
        }
        t
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    /// Edges as half-edge pairs `(min, max)`, sorted by the minimum.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for h in 0..self.sigma.len() {
            let p = self.iota[h];
            if h < p {
                out.push((h, p));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.sigma.len() / 2
    }

    /// Index of the edge containing half-edge `h` in `edges` order.
    pub fn edge_of(&self, h: usize) -> usize {
        let m = h.min(self.iota[h]);
        (0..m).filter(|&x| x < self.iota[x]).count()
    }

    /// An edge is external iff one of its half-edges is a leg.
    pub fn is_external_edge(&self, e: usize) -> bool {
        let (a, b) = self.edges()[e];
        self.is_leg_half(a) || self.is_leg_half(b)
    }

    pub fn internal_edges(&self) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| !self.is_external_edge(e))
            .collect()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.edges()[e];
        let vt = self.vertex_of_table();
        vt[a] == vt[b]
    }

    /// Vertex indices that are not univalent leg endpoints.
    pub fn internal_vertices(&self) -> Vec<usize> {
        self.vertices()
            .iter()
            .enumerate()
            .filter(|(_, c)| !(c.len() == 1 && self.is_leg_half(c[0])))
            .map(|(v, _)| v)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.sigma.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(h) = stack.pop() {
            for nb in [self.sigma[h], self.iota[h]] {
                if !seen[nb] {
                    seen[nb] = true;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
        count == n
    }

    /// Full invariant check for a moduli-cell graph.
    pub fn validate(&self) -> Result<(), GraphError> {
        self.check_tables()?;
        for h in 0..self.iota.len() {
            if self.iota[h] == h {
                return Err(GraphError::InvolutionFixedPoint(h));
            }
        }
        for (slot, leg) in self.legs.iter().enumerate() {
            if self.sigma[leg.half_edge] != leg.half_edge {
                return Err(GraphError::LegNotUnivalent(slot));
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        for (v, cyc) in self.vertices().iter().enumerate() {
            if cyc.len() == 1 && !self.is_leg_half(cyc[0]) {
                return Err(GraphError::UnregisteredUnivalent(cyc[0]));
            }
            if cyc.len() == 2 {
                return Err(GraphError::LowValencyInternal(v, 2));
            }
        }
        Ok(())
    }

    /// Face permutation `h -> sigma(iota(h))`; its cycles are the boundary
    /// components of the thickened surface.
    pub fn face_of(&self, h: usize) -> usize {
        self.sigma[self.iota[h]]
    }

    /// Boundary cycles as half-edge sequences, each rotated to its minimum.
    pub fn boundary_cycles(&self) -> Vec<Vec<usize>> {
        let n = self.sigma.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut h = start;
            loop {
                seen[h] = true;
                cyc.push(h);
                h = self.face_of(h);
                if h == start {
                    break;
                }
            }
            out.push(cyc);
        }
        out
    }

    /// Genus, boundary count, Euler characteristic and leg placement.
    pub fn surface_invariants(&self) -> SurfaceInvariants {
        let v = self.vertex_count() as i64;
        let e = self.edge_count() as i64;
        let faces = self.boundary_cycles();
        let f = faces.len() as i64;
        let genus = ((2 - (v - e + f)) / 2) as usize;
        let mut boundaries = Vec::new();
        for cyc in &faces {
            let mut slots = Vec::new();
            for &h in cyc {
                if let Some(s) = self.slot_of(h) {
                    slots.push(s);
                }
            }
            boundaries.push(slots);
        }
        let dirs = self.legs.iter().map(|l| l.dir).collect();
        let surface_type = SurfaceType::new(genus, boundaries, dirs)
            .expect("leg placement from faces is a partition");
        SurfaceInvariants {
            genus,
            boundary_components: f as usize,
            euler_char: v - e,
            surface_type,
        }
    }

    /// Collapses an internal non-loop edge, merging the cyclic orders at its
    /// endpoints. Returns the collapsed graph and the half-edge relabeling
    /// (`None` for the two removed half-edges).
    pub fn collapse_edge_with_map(
        &self,
        e: usize,
    ) -> Result<(RibbonGraph, Vec<Option<usize>>), GraphError> {
        let edges = self.edges();
        let &(a, b) = edges.get(e).ok_or(GraphError::NoSuchEdge(e))?;
        if self.is_external_edge(e) {
            return Err(GraphError::ExternalCollapse(e));
        }
        if self.is_loop(e) {
            return Err(GraphError::LoopCollapse(e));
        }
        let n = self.sigma.len();
        let mut map: Vec<Option<usize>> = Vec::with_capacity(n);
        let mut next = 0;
        for h in 0..n {
            if h == a || h == b {
                map.push(None);
            } else {
                map.push(Some(next));
                next += 1;
            }
        }
        let mut sigma = vec![0; next];
        let mut iota = vec![0; next];
        for h in 0..n {
            let Some(nh) = map[h] else { continue };
            let mut s = self.sigma[h];
            let mut guard = 0;
            while s == a || s == b {
                s = if s == a { self.sigma[b] } else { self.sigma[a] };
                guard += 1;
                assert!(guard <= 2, "collapse of a bare edge");
            }
            sigma[nh] = map[s].expect("sigma target survives");
            iota[nh] = map[self.iota[h]].expect("internal edge endpoints are not legs");
        }
        let legs = self
            .legs
            .iter()
            .map(|l| Leg {
                half_edge: map[l.half_edge].expect("legs survive collapse"),
                dir: l.dir,
            })
            .collect();
        Ok((RibbonGraph { sigma, iota, legs }, map))
    }

    pub fn collapse_edge(&self, e: usize) -> Result<RibbonGraph, GraphError> {
        self.collapse_edge_with_map(e).map(|(g, _)| g)
    }

    /// The two ribbon-compatible splittings of a 4-valent vertex into two
    /// trivalent vertices. Each result comes with the index of the new edge.
    /// Trivalent vertices have no expansions; valency 5 and higher is
    /// unsupported.
    pub fn expansions(&self, v: usize) -> Result<Vec<(RibbonGraph, usize)>, GraphError> {
        let vertices = self.vertices();
        let cyc = vertices.get(v).ok_or(GraphError::NoSuchVertex(v))?;
        if cyc.len() == 1 && self.is_leg_half(cyc[0]) {
            return Err(GraphError::NotInternal(v));
        }
        match cyc.len() {
            3 => Ok(Vec::new()),
            4 => {
                let n = self.sigma.len();
                let (h, s) = (cyc.clone(), ());
                let _ = s;
                let mut out = Vec::new();
                // Splits (h0 h1 | h2 h3) and (h1 h2 | h3 h0); the crossing
                // split is incompatible with the cyclic order.
                for offset in 0..2 {
                    let g1 = [h[offset], h[(offset + 1) % 4]];
                    let g2 = [h[(offset + 2) % 4], h[(offset + 3) % 4]];
                    let (a, b) = (n, n + 1);
                    let mut sigma = self.sigma.clone();
                    sigma.extend_from_slice(&[0, 0]);
                    let mut iota = self.iota.clone();
                    iota.extend_from_slice(&[b, a]);
                    // New cycles (g1[0] g1[1] a) and (g2[0] g2[1] b).
                    sigma[g1[0]] = g1[1];
                    sigma[g1[1]] = a;
                    sigma[a] = g1[0];
                    sigma[g2[0]] = g2[1];
                    sigma[g2[1]] = b;
                    sigma[b] = g2[0];
                    let g = RibbonGraph {
                        sigma,
                        iota,
                        legs: self.legs.clone(),
                    };
                    let e = g.edge_of(a);
                    out.push((g, e));
                }
                Ok(out)
            }
            k => Err(GraphError::UnsupportedValency(k)),
        }
    }

    /// Deterministic relabeling from a traversal rooted at `root`:
    /// half-edges are numbered in first-visit order following `sigma` then
    /// `iota`. Returns the map old -> new.
    fn traversal_relabel(&self, root: usize) -> Vec<usize> {
        let n = self.sigma.len();
        let mut label = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        label[root] = 0;
        order.push(root);
        let mut i = 0;
        while i < order.len() {
            let h = order[i];
            i += 1;
            for nb in [self.sigma[h], self.iota[h]] {
                if label[nb] == usize::MAX {
                    label[nb] = order.len();
                    order.push(nb);
                }
            }
        }
        label
    }

    fn encode_under(&self, relabel: &[usize]) -> Vec<usize> {
        let n = self.sigma.len();
        let mut inv = vec![0; n];
        for (old, &new) in relabel.iter().enumerate() {
            inv[new] = old;
        }
        let mut enc = Vec::with_capacity(2 * n + 2 * self.legs.len() + 1);
        enc.push(n);
        for new in 0..n {
            enc.push(relabel[self.sigma[inv[new]]]);
        }
        for new in 0..n {
            enc.push(relabel[self.iota[inv[new]]]);
        }
        for leg in &self.legs {
            enc.push(relabel[leg.half_edge]);
            enc.push(if leg.dir == Direction::In { 0 } else { 1 });
        }
        enc
    }

    /// Canonical encoding: minimum over all traversal roots. Two graphs are
    /// isomorphic (by a leg-slot-fixing isomorphism) iff their keys agree.
    pub fn canonical_key(&self) -> Vec<usize> {
        (0..self.sigma.len())
            .map(|r| self.encode_under(&self.traversal_relabel(r)))
            .min()
            .expect("nonempty graph")
    }

    /// Canonically relabeled copy together with the relabeling used.
    pub fn canonical_form(&self) -> (RibbonGraph, Vec<usize>) {
        let (_, relabel) = (0..self.sigma.len())
            .map(|r| {
                let rel = self.traversal_relabel(r);
                (self.encode_under(&rel), rel)
            })
            .min_by(|a, b| a.0.cmp(&b.0))
            .expect("nonempty graph");
        (self.relabeled(&relabel), relabel)
    }

    /// Copy with half-edge `h` renamed to `relabel[h]`.
    pub fn relabeled(&self, relabel: &[usize]) -> RibbonGraph {
        let n = self.sigma.len();
        let mut sigma = vec![0; n];
        let mut iota = vec![0; n];
        for h in 0..n {
            sigma[relabel[h]] = relabel[self.sigma[h]];
            iota[relabel[h]] = relabel[self.iota[h]];
        }
        let legs = self
            .legs
            .iter()
            .map(|l| Leg {
                half_edge: relabel[l.half_edge],
                dir: l.dir,
            })
            .collect();
        RibbonGraph { sigma, iota, legs }
    }

    /// All isomorphisms `self -> other` fixing each leg slot, as half-edge
    /// maps. For `self == other` this is the automorphism group.
    pub fn isomorphisms(&self, other: &RibbonGraph) -> Vec<Vec<usize>> {
        if self.sigma.len() != other.sigma.len() || self.legs.len() != other.legs.len() {
            return Vec::new();
        }
        let n = self.sigma.len();
        let (min_enc, rel_a) = (0..n)
            .map(|r| {
                let rel = self.traversal_relabel(r);
                (self.encode_under(&rel), rel)
            })
            .min_by(|a, b| a.0.cmp(&b.0))
            .expect("nonempty");
        let mut out = Vec::new();
        for r in 0..n {
            let rel_b = other.traversal_relabel(r);
            if other.encode_under(&rel_b) == min_enc {
                let mut inv_b = vec![0; n];
                for (old, &new) in rel_b.iter().enumerate() {
                    inv_b[new] = old;
                }
                let phi: Vec<usize> = (0..n).map(|h| inv_b[rel_a[h]]).collect();
                out.push(phi);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.isomorphisms(self)
    }

    /// Multi-line literal: sigma and iota in cycle notation plus the leg table.
    pub fn to_literal(&self) -> String {
        format!(
            "sigma {}\niota {}\nlegs{}\n",
            cycles_string(&self.vertices()),
            pairs_string(&self.edges()),
            self.legs
                .iter()
                .map(|l| format!(" {}:{}", l.half_edge, l.dir))
                .collect::<String>()
        )
    }

    /// Single-line literal used inside dump records.
    pub fn to_compact(&self) -> String {
        format!(
            "sigma={} iota={} legs={}",
            cycles_string(&self.vertices()).replace(' ', ","),
            pairs_string(&self.edges()).replace(' ', ","),
            if self.legs.is_empty() {
                "-".to_string()
            } else {
                self.legs
                    .iter()
                    .map(|l| format!("{}:{}", l.half_edge, l.dir))
                    .collect::<Vec<_>>()
                    .join(",")
            }
        )
    }

    /// Parses either the multi-line or the compact literal form.
    pub fn parse(text: &str) -> Result<RibbonGraph, GraphError> {
        let bad = |m: String| GraphError::Parse(m);
        let mut sigma_src = None;
        let mut iota_src = None;
        let mut legs_src: Option<String> = None;
        if text.contains("sigma=") {
            for tok in text.split_whitespace() {
                if let Some(v) = tok.strip_prefix("sigma=") {
                    sigma_src = Some(v.replace(',', " "));
                } else if let Some(v) = tok.strip_prefix("iota=") {
                    iota_src = Some(v.replace(',', " "));
                } else if let Some(v) = tok.strip_prefix("legs=") {
                    legs_src = Some(if v == "-" {
                        String::new()
                    } else {
                        v.replace(',', " ")
                    });
                }
            }
        } else {
            for line in text.lines() {
                let line = line.trim();
                if let Some(v) = line.strip_prefix("sigma") {
                    sigma_src = Some(v.trim().to_string());
                } else if let Some(v) = line.strip_prefix("iota") {
                    iota_src = Some(v.trim().to_string());
                } else if let Some(v) = line.strip_prefix("legs") {
                    legs_src = Some(v.trim().to_string());
                }
            }
        }
        let sigma_cycles = parse_cycles(&sigma_src.ok_or_else(|| bad("missing sigma".into()))?)?;
        let iota_cycles = parse_cycles(&iota_src.ok_or_else(|| bad("missing iota".into()))?)?;
        let mut legs = Vec::new();
        for tok in legs_src.unwrap_or_default().split_whitespace() {
            let (h, d) = tok
                .split_once(':')
                .ok_or_else(|| bad(format!("leg entry {tok:?}")))?;
            let half_edge = h
                .parse::<usize>()
                .map_err(|_| bad(format!("leg half-edge {h:?}")))?;
            let dir = match d {
                "in" => Direction::In,
                "out" => Direction::Out,
                _ => return Err(bad(format!("leg direction {d:?}"))),
            };
            legs.push(Leg { half_edge, dir });
        }
        let n = sigma_cycles
            .iter()
            .chain(iota_cycles.iter())
            .flatten()
            .max()
            .map(|m| m + 1)
            .ok_or_else(|| bad("empty permutations".into()))?;
        let mut pairs = Vec::new();
        for cyc in &iota_cycles {
            match cyc.len() {
                2 => pairs.push((cyc[0], cyc[1])),
                1 => return Err(GraphError::InvolutionFixedPoint(cyc[0])),
                _ => return Err(bad("iota cycle of length > 2".into())),
            }
        }
        RibbonGraph::from_cycles(n, &sigma_cycles, &pairs, legs)
    }
}

fn cycles_string(cycles: &[Vec<usize>]) -> String {
    cycles
        .iter()
        .map(|c| {
            format!(
                "({})",
                c.iter()
                    .map(|h| h.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )
        })
        .collect()
}

fn pairs_string(pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("({a} {b})"))
        .collect()
}

fn parse_cycles(src: &str) -> Result<Vec<Vec<usize>>, GraphError> {
    let mut out = Vec::new();
    let mut rest = src.trim();
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(GraphError::Parse(format!("expected ( in {src:?}")));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| GraphError::Parse(format!("unclosed ( in {src:?}")))?;
        let body = &rest[1..close];
        let cyc: Result<Vec<usize>, _> = body
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect();
        out.push(cyc.map_err(|_| GraphError::Parse(format!("bad half-edge in {body:?}")))?);
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

/// Canonical-form cache keyed by the raw tables; enumeration hits the same
/// graphs repeatedly.
#[derive(Default)]
pub struct CanonicalCache {
    map: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl CanonicalCache {
    pub fn key(&mut self, g: &RibbonGraph) -> Vec<usize> {
        let raw = g.encode_under(&(0..g.half_edge_count()).collect::<Vec<_>>());
        if let Some(k) = self.map.get(&raw) {
            return k.clone();
        }
        let k = g.canonical_key();
        self.map.insert(raw, k.clone());
        k
    }
}

/// Standard small graphs used throughout the tests and docs.
pub mod samples {
    use super::{Direction, Leg, RibbonGraph};

    /// One trivalent internal vertex with three legs (slots 0,1 in, 2 out).
    pub fn tripod() -> RibbonGraph {
        RibbonGraph::from_cycles(
            6,
            &[vec![0, 1, 2], vec![3], vec![4], vec![5]],
            &[(0, 3), (1, 4), (2, 5)],
            vec![
                Leg {
                    half_edge: 3,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 4,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 5,
                    dir: Direction::Out,
                },
            ],
        )
        .expect("tripod is valid")
    }

    /// Tripod with prescribed leg directions.
    pub fn tripod_dirs(dirs: [Direction; 3]) -> RibbonGraph {
        RibbonGraph::from_cycles(
            6,
            &[vec![0, 1, 2], vec![3], vec![4], vec![5]],
            &[(0, 3), (1, 4), (2, 5)],
            (0..3)
                .map(|i| Leg {
                    half_edge: 3 + i,
                    dir: dirs[i],
                })
                .collect(),
        )
        .expect("tripod is valid")
    }

    /// Theta graph with opposite cyclic orders at the two vertices
    /// (pair of pants, three boundary cycles). No legs.
    pub fn theta_planar() -> RibbonGraph {
        RibbonGraph::from_cycles(
            6,
            &[vec![0, 1, 2], vec![5, 4, 3]],
            &[(0, 3), (1, 4), (2, 5)],
            vec![],
        )
        .expect("theta is valid")
    }

    /// Theta graph with identical cyclic orders (torus minus a disk).
    pub fn theta_same() -> RibbonGraph {
        RibbonGraph::from_cycles(
            6,
            &[vec![0, 1, 2], vec![3, 4, 5]],
            &[(0, 3), (1, 4), (2, 5)],
            vec![],
        )
        .expect("theta is valid")
    }

    /// Trivalent 4-leaf tree: two internal vertices joined by an internal
    /// edge, legs 0,1 at one vertex and 2,3 at the other (all in except 3).
    pub fn caterpillar4() -> RibbonGraph {
        RibbonGraph::from_cycles(
            10,
            &[
                vec![0, 1, 2],
                vec![3, 4, 5],
                vec![6],
                vec![7],
                vec![8],
                vec![9],
            ],
            &[(2, 3), (0, 6), (1, 7), (4, 8), (5, 9)],
            vec![
                Leg {
                    half_edge: 6,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 7,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 8,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 9,
                    dir: Direction::Out,
                },
            ],
        )
        .expect("caterpillar is valid")
    }

    /// Single 4-valent vertex with four legs.
    pub fn star4() -> RibbonGraph {
        RibbonGraph::from_cycles(
            8,
            &[vec![0, 1, 2, 3], vec![4], vec![5], vec![6], vec![7]],
            &[(0, 4), (1, 5), (2, 6), (3, 7)],
            vec![
                Leg {
                    half_edge: 4,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 5,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 6,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 7,
                    dir: Direction::Out,
                },
            ],
        )
        .expect("star is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    #[test]
    fn tripod_is_valid() {
        tripod().validate().unwrap();
    }

    #[test]
    fn bivalent_internal_vertex_is_rejected() {
        // Path with a bivalent middle vertex: legs 2,5; middle (0,1); pairs.
        let g = RibbonGraph::from_cycles(
            6,
            &[vec![0, 1], vec![2], vec![3], vec![4, 5]],
            &[(0, 2), (1, 4), (3, 5)],
            vec![
                Leg {
                    half_edge: 2,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 3,
                    dir: Direction::Out,
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            g.validate(),
            Err(GraphError::LowValencyInternal(_, 2))
        ));
    }

    #[test]
    fn involution_fixed_point_is_rejected() {
        let g = RibbonGraph::new(vec![1, 0, 2], vec![1, 0, 2], vec![]).unwrap();
        assert!(matches!(
            g.validate(),
            Err(GraphError::InvolutionFixedPoint(2))
        ));
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = RibbonGraph::from_cycles(
            12,
            &[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![9, 10, 11]],
            &[(0, 3), (1, 4), (2, 5), (6, 9), (7, 10), (8, 11)],
            vec![],
        )
        .unwrap();
        assert!(matches!(g.validate(), Err(GraphError::Disconnected)));
    }

    #[test]
    fn tripod_has_one_boundary_cycle() {
        assert_eq!(tripod().boundary_cycles().len(), 1);
    }

    #[test]
    fn theta_faces_match_traversal_oracle() {
        // Independent oracle: count cycles of the composed permutation
        // computed directly from the tables.
        fn face_cycles_oracle(g: &RibbonGraph) -> usize {
            let n = g.half_edge_count();
            let perm: Vec<usize> = (0..n).map(|h| g.sigma(g.iota(h))).collect();
            let mut seen = vec![false; n];
            let mut c = 0;
            for s in 0..n {
                if !seen[s] {
                    c += 1;
                    let mut h = s;
                    while !seen[h] {
                        seen[h] = true;
                        h = perm[h];
                    }
                }
            }
            c
        }
        assert_eq!(face_cycles_oracle(&theta_planar()), 3);
        assert_eq!(theta_planar().boundary_cycles().len(), 3);
        assert_eq!(face_cycles_oracle(&theta_same()), 1);
        assert_eq!(theta_same().boundary_cycles().len(), 1);
    }

    #[test]
    fn surface_invariants_examples() {
        let t = tripod().surface_invariants();
        assert_eq!((t.genus, t.boundary_components, t.euler_char), (0, 1, 1));
        let p = theta_planar().surface_invariants();
        assert_eq!((p.genus, p.boundary_components, p.euler_char), (0, 3, -1));
        let s = theta_same().surface_invariants();
        assert_eq!((s.genus, s.boundary_components, s.euler_char), (1, 1, -1));
    }

    #[test]
    fn collapse_caterpillar_gives_star() {
        let g = caterpillar4();
        let internal = g.internal_edges();
        assert_eq!(internal.len(), 1);
        let collapsed = g.collapse_edge(internal[0]).unwrap();
        collapsed.validate().unwrap();
        let before = g.surface_invariants();
        let after = collapsed.surface_invariants();
        assert_eq!(before.surface_type, after.surface_type);
        assert_eq!(collapsed.vertex_count(), g.vertex_count() - 1);
        assert_eq!(collapsed.edge_count(), g.edge_count() - 1);
        // Same class as the 4-valent star with matching leg directions.
        let star = RibbonGraph::from_cycles(
            8,
            &[vec![0, 1, 2, 3], vec![4], vec![5], vec![6], vec![7]],
            &[(0, 4), (1, 5), (2, 6), (3, 7)],
            vec![
                Leg {
                    half_edge: 5,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 6,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 7,
                    dir: Direction::In,
                },
                Leg {
                    half_edge: 4,
                    dir: Direction::Out,
                },
            ],
        )
        .unwrap();
        // Not asserting slot placement here, only that the collapsed graph is
        // a one-vertex tree with four legs.
        assert_eq!(collapsed.internal_vertices().len(), 1);
        assert_eq!(star.internal_vertices().len(), 1);
    }

    #[test]
    fn collapse_rejects_loops_and_external_edges() {
        // One trivalent vertex with a loop and one leg.
        let g = RibbonGraph::from_cycles(
            4,
            &[vec![0, 1, 2], vec![3]],
            &[(0, 1), (2, 3)],
            vec![Leg {
                half_edge: 3,
                dir: Direction::In,
            }],
        )
        .unwrap();
        let loop_edge = g
            .edges()
            .iter()
            .position(|&(a, b)| a == 0 && b == 1)
            .unwrap();
        assert!(matches!(
            g.collapse_edge(loop_edge),
            Err(GraphError::LoopCollapse(_))
        ));
        let ext_edge = g
            .edges()
            .iter()
            .position(|&(a, b)| a == 2 && b == 3)
            .unwrap();
        assert!(matches!(
            g.collapse_edge(ext_edge),
            Err(GraphError::ExternalCollapse(_))
        ));
    }

    #[test]
    fn expansions_round_trip() {
        let g = star4();
        let exps = g.expansions(0).unwrap();
        assert_eq!(exps.len(), 2);
        let key = g.canonical_key();
        for (h, e) in &exps {
            h.validate().unwrap();
            let back = h.collapse_edge(*e).unwrap();
            assert_eq!(back.canonical_key(), key);
        }
        // The two expansions are distinct classes.
        assert_ne!(exps[0].0.canonical_key(), exps[1].0.canonical_key());
        // Trivalent vertices expand to nothing.
        assert!(tripod().expansions(0).unwrap().is_empty());
    }

    #[test]
    fn isomorphisms_identity_and_theta_automorphisms() {
        let t = tripod();
        let autos = t.automorphisms();
        assert_eq!(autos.len(), 1);
        assert!(autos[0].iter().enumerate().all(|(i, &j)| i == j));

        // Brute-force oracle over all half-edge bijections for the theta.
        fn brute_force_autos(g: &RibbonGraph) -> usize {
            let n = g.half_edge_count();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut count = 0;
            permute(&mut perm, 0, &mut |p| {
                let ok = (0..n).all(|h| {
                    p[g.sigma(h)] == g.sigma(p[h]) && p[g.iota(h)] == g.iota(p[h])
                }) && g.legs().iter().all(|l| p[l.half_edge] == l.half_edge);
                if ok {
                    count += 1;
                }
            });
            fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
                if k == p.len() {
                    f(p);
                    return;
                }
                for i in k..p.len() {
                    p.swap(k, i);
                    permute(p, k + 1, f);
                    p.swap(k, i);
                }
            }
            count
        }
        let theta = theta_same();
        assert_eq!(theta.automorphisms().len(), brute_force_autos(&theta));
        let planar = theta_planar();
        assert_eq!(planar.automorphisms().len(), brute_force_autos(&planar));
    }

    #[test]
    fn canonical_form_is_isomorphism_invariant() {
        let g = caterpillar4();
        // Apply an arbitrary relabeling and compare canonical keys.
        let n = g.half_edge_count();
        let relabel: Vec<usize> = (0..n).map(|h| (h * 7 + 3) % n).collect();
        let h = g.relabeled(&relabel);
        assert_eq!(g.canonical_key(), h.canonical_key());
        assert!(!g.isomorphisms(&h).is_empty());
    }

    #[test]
    fn literal_round_trip() {
        for g in [tripod(), theta_same(), caterpillar4()] {
            let lit = g.to_literal();
            let back = RibbonGraph::parse(&lit).unwrap();
            assert_eq!(back.canonical_key(), g.canonical_key());
            let compact = g.to_compact();
            let back2 = RibbonGraph::parse(&compact).unwrap();
            assert_eq!(back2.canonical_key(), g.canonical_key());
        }
    }

    #[test]
    fn metric_closure_rejects_zero_cycles() {
        let g = theta_same();
        let mut m = MetricStructure::uniform(&g, 1.0);
        m.validate_closure(&g).unwrap();
        m.lengths[0] = 0.0;
        m.lengths[1] = 0.0;
        // Two zero edges between the same two vertices form a cycle.
        assert!(m.validate_closure(&g).is_err());
        m.lengths[1] = 1.0;
        m.validate_closure(&g).unwrap();
        assert!(m.validate_open(&g).is_err());
    }

    #[test]
    fn surface_type_display_parse() {
        let st = tripod().surface_invariants().surface_type;
        let s = st.to_string();
        let back: SurfaceType = s.parse().unwrap();
        assert_eq!(st, back);
    }
}
