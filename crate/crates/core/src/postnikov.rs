//! Postnikov diagrams in their dual, face-combinatorial encoding.
//!
//! A diagram is stored as its quiver `Q̄` (external arrows present at the
//! clockwise boundary markers only) together with the list of oriented faces:
//! each face is a directed cycle of the quiver bounding an oriented region,
//! tagged clockwise or anticlockwise. A boundary region at an anticlockwise
//! marker has no closing arrow in `Q̄`; it is stored as an *open* face whose
//! cycle is closed by a [`Edge::Gap`] running anticlockwise along the boundary.
//!
//! Conventions:
//!
//! * Frozen vertices `f_1, …, f_n` (vertex ids `n_exch + 1, …, n_exch + n`)
//!   are the boundary alternating regions in clockwise order; marker `i` lies
//!   between `f_{i-1}` and `f_i`.
//! * Clockwise faces lie to the right of their arrows, anticlockwise faces to
//!   the left, so every arrow shared by two faces separates a clockwise face
//!   from an anticlockwise one.
//! * The marker edge of a clockwise marker `i` is an external arrow
//!   `f_{i-1} → f_i`; the marker edge of an anticlockwise marker is the gap
//!   `f_i → f_{i-1}`, which becomes an arrow in the dimer-algebra variant.
//!
//! Strands are recovered as zigzag walks through the faces, which yields the
//! trip permutation (expected `i ↦ i + k`) and the Plücker labels of regions.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::path::{canonical_rotation, Path, Potential};
use crate::qp::{Iqp, QpError};
use crate::quiver::{ArrowId, IcedQuiver, QuiverError, Vertex};
use crate::rational::Q;

/// Errors of diagram construction and surgery.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PostnikovError {
    #[error("need 2 <= k <= n - 2, got k = {k}, n = {n}")]
    OutOfRange { k: u32, n: u32 },
    #[error("vertex {0} is frozen")]
    FrozenVertex(Vertex),
    #[error("vertex {0} is not a quadrilateral alternating cell")]
    NotQuadrilateral(Vertex),
    #[error("face {face} is not a directed cycle")]
    BrokenFace { face: usize },
    #[error("surgery produced an inconsistent boundary at vertex {0}")]
    BoundaryMismatch(Vertex),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Qp(#[from] QpError),
}

/// Orientation of an oriented region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Clockwise,
    Anticlockwise,
}

impl Orientation {
    /// The opposite orientation.
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Clockwise => Orientation::Anticlockwise,
            Orientation::Anticlockwise => Orientation::Clockwise,
        }
    }

    /// Sign of the face in the potential: `+1` clockwise, `-1` anticlockwise.
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Clockwise => 1,
            Orientation::Anticlockwise => -1,
        }
    }
}

/// An edge on the boundary of a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Edge {
    /// An arrow of `Q̄`.
    Arrow(ArrowId),
    /// The missing boundary edge `f_i → f_{i-1}` at anticlockwise marker `i`.
    Gap(u32),
}

/// An oriented face: its edges in traversal order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub edges: Vec<Edge>,
    pub orientation: Orientation,
}

impl Face {
    /// True when every edge is an arrow of `Q̄`.
    pub fn is_closed(&self) -> bool {
        self.edges.iter().all(|e| matches!(e, Edge::Arrow(_)))
    }

    /// The same face starting at its smallest edge.
    pub fn normalized(&self) -> Face {
        let k = (0..self.edges.len()).min_by_key(|&i| self.edges[i]).unwrap_or(0);
        let mut edges = self.edges[k..].to_vec();
        edges.extend_from_slice(&self.edges[..k]);
        Face { edges, orientation: self.orientation }
    }

    fn position(&self, e: Edge) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    fn succ(&self, pos: usize) -> Edge {
        self.edges[(pos + 1) % self.edges.len()]
    }
}

/// Local configuration of the strands at a boundary marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MarkerKind {
    /// Strands run clockwise; `Q̄` has the external arrow `f_{i-1} → f_i`.
    Clockwise,
    /// Strands run anticlockwise; only the dimer-algebra variant has `f_i → f_{i-1}`.
    Anticlockwise,
}

/// The quiver variants attached to a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// `Q(D)`: no external arrows.
    TypeI,
    /// `Q^pr(D)`: the principal part.
    TypeII,
    /// `Q̄(D)`: external arrows at clockwise markers.
    TypeIII,
    /// `Q̄̄(D)`: external arrows at all markers (dimer-algebra quiver).
    Bkm,
}

/// Class of a fundamental cycle by the arrows it contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CycleClass {
    /// Only internal arrows.
    Internal,
    /// Some boundary arrow, no external arrow.
    Boundary,
    /// Contains an external arrow.
    External,
}

/// A fundamental cycle of a quiver variant: the boundary of one oriented region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalCycle {
    /// Index into [`FaceDiagram::faces`].
    pub face: usize,
    pub class: CycleClass,
    pub orientation: Orientation,
    /// Canonical rotation of the cycle.
    pub cycle: Path,
    /// Level in the initial diagram, when known.
    pub level: Option<u32>,
}

/// A violated invariant reported by [`FaceDiagram::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A face's edges do not compose to a cycle.
    FaceNotCycle { face: usize },
    /// An edge lies in the wrong number of faces.
    EdgeFaceCount { edge: Edge, count: usize },
    /// An arrow separates two faces of the same orientation.
    NotAlternating { arrow: ArrowId },
    /// A gap lies in a clockwise face, or a marker arrow in an anticlockwise one.
    MarkerOrientation { marker: u32 },
    /// Marker `i` has no marker edge, or more than one.
    MarkerEdges { marker: u32, count: usize },
    /// An external arrow that is not a marker edge.
    StrayExternal { arrow: ArrowId },
    /// `V - E + F ≠ 1`.
    Euler { vertices: i64, edges: i64, faces: i64 },
    /// The faces around a vertex do not form a disk (or half-disk at the boundary).
    Rotation { vertex: Vertex },
    /// A strand did not reach the boundary.
    BrokenStrand { marker: u32 },
    /// The trip permutation is not `i ↦ i + k`.
    TripPermutation { trip: Vec<u32> },
}

/// Result of [`FaceDiagram::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// True when no invariant is violated.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A Postnikov diagram in dual encoding, see the module documentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDiagram {
    k: u32,
    quiver: IcedQuiver,
    faces: Vec<Face>,
    markers: Vec<MarkerKind>,
    rotation: Vec<Vec<Edge>>,
    levels: Vec<Option<u32>>,
    coordinates: BTreeMap<Vertex, (u32, u32)>,
}

impl FaceDiagram {
    /// Assembles a diagram from `Q̄` and its faces; markers and the rotation
    /// system are derived from the faces. Call [`FaceDiagram::validate`] to
    /// check the diagram axioms.
    pub fn new(k: u32, quiver: IcedQuiver, faces: Vec<Face>) -> FaceDiagram {
        let n = quiver.n_frozen();
        let gaps: BTreeSet<u32> =
            faces.iter().flat_map(|f| f.edges.iter()).filter_map(|e| match e {
                Edge::Gap(i) => Some(*i),
                Edge::Arrow(_) => None,
            })
            .collect();
        let markers = (1..=n)
            .map(|i| if gaps.contains(&i) { MarkerKind::Anticlockwise } else { MarkerKind::Clockwise })
            .collect();
        let nf = faces.len();
        let mut fd = FaceDiagram {
            k,
            quiver,
            faces,
            markers,
            rotation: Vec::new(),
            levels: vec![None; nf],
            coordinates: BTreeMap::new(),
        };
        fd.rotation = fd.compute_rotation().unwrap_or_default();
        fd
    }

    /// Attaches per-face levels (initial diagrams).
    pub fn with_levels(mut self, levels: Vec<Option<u32>>) -> FaceDiagram {
        assert_eq!(levels.len(), self.faces.len(), "one level per face");
        self.levels = levels;
        self
    }

    /// Attaches grid coordinates of exchangeable vertices (initial diagrams).
    pub fn with_coordinates(mut self, coordinates: BTreeMap<Vertex, (u32, u32)>) -> FaceDiagram {
        self.coordinates = coordinates;
        self
    }

    /// Strand shift `k`.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of boundary markers (= frozen vertices).
    pub fn n(&self) -> u32 {
        self.quiver.n_frozen()
    }

    /// The quiver `Q̄`.
    pub fn quiver(&self) -> &IcedQuiver {
        &self.quiver
    }

    /// Oriented faces.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Marker configurations, index `i - 1` for marker `i`.
    pub fn markers(&self) -> &[MarkerKind] {
        &self.markers
    }

    /// Level of each face, when known.
    pub fn levels(&self) -> &[Option<u32>] {
        &self.levels
    }

    /// Grid coordinates of exchangeable vertices, when known.
    pub fn coordinates(&self) -> &BTreeMap<Vertex, (u32, u32)> {
        &self.coordinates
    }

    /// Rotation system: for each vertex `v` (index `v - 1`), its incident edges
    /// in anticlockwise order; at frozen vertices the list runs from one marker
    /// edge to the other.
    pub fn rotation(&self) -> &[Vec<Edge>] {
        &self.rotation
    }

    /// The frozen vertex `f_i`, with `i` taken cyclically.
    pub fn frozen(&self, i: i64) -> Vertex {
        let n = self.n() as i64;
        self.quiver.n_exchangeable() + (((i - 1).rem_euclid(n)) + 1) as Vertex
    }

    /// Index `i` of the frozen vertex `f_i`.
    pub fn frozen_index(&self, v: Vertex) -> Option<u32> {
        self.quiver.is_frozen(v).then(|| v - self.quiver.n_exchangeable())
    }

    /// Source and target of an edge.
    pub fn edge_ends(&self, e: Edge) -> Option<(Vertex, Vertex)> {
        match e {
            Edge::Arrow(a) => self.quiver.arrow(a).map(|x| (x.source, x.target)),
            Edge::Gap(i) => Some((self.frozen(i as i64), self.frozen(i as i64 - 1))),
        }
    }

    /// Marker index of a marker edge: a gap, or an external arrow `f_{i-1} → f_i`.
    fn marker_of(&self, e: Edge) -> Option<u32> {
        match e {
            Edge::Gap(i) => Some(i),
            Edge::Arrow(a) => {
                let x = self.quiver.arrow(a)?;
                let (s, t) = (self.frozen_index(x.source)?, self.frozen_index(x.target)?);
                (t == s % self.n() + 1).then_some(t)
            }
        }
    }

    /// Faces containing each edge, with the edge's position in the face.
    pub fn edge_faces(&self) -> BTreeMap<Edge, Vec<(usize, usize)>> {
        let mut map: BTreeMap<Edge, Vec<(usize, usize)>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for (pos, &e) in f.edges.iter().enumerate() {
                map.entry(e).or_default().push((fi, pos));
            }
        }
        map
    }

    fn compute_rotation(&self) -> Option<Vec<Vec<Edge>>> {
        let nv = self.quiver.n_vertices() as usize;
        // next_ccw[v]: edge -> following edge in anticlockwise order around v.
        let mut next: Vec<BTreeMap<Edge, Edge>> = vec![BTreeMap::new(); nv + 1];
        for f in &self.faces {
            let len = f.edges.len();
            for pos in 0..len {
                let (e_in, e_out) = (f.edges[pos], f.edges[(pos + 1) % len]);
                let v = self.edge_ends(e_in)?.1;
                let (a, b) = match f.orientation {
                    Orientation::Clockwise => (e_in, e_out),
                    Orientation::Anticlockwise => (e_out, e_in),
                };
                if next[v as usize].insert(a, b).is_some() {
                    return None;
                }
            }
        }
        let mut out = Vec::with_capacity(nv);
        for succ in &next[1..=nv] {
            let targets: BTreeSet<Edge> = succ.values().copied().collect();
            let start = succ.keys().find(|e| !targets.contains(e)).or_else(|| succ.keys().next());
            let mut order = Vec::new();
            if let Some(&s) = start {
                let mut cur = s;
                loop {
                    order.push(cur);
                    match succ.get(&cur) {
                        Some(&nx) if nx != s && order.len() <= succ.len() + 1 => cur = nx,
                        _ => break,
                    }
                }
            }
            out.push(order);
        }
        Some(out)
    }

    fn incident_edges(&self) -> Vec<BTreeSet<Edge>> {
        let nv = self.quiver.n_vertices() as usize;
        let mut inc = vec![BTreeSet::new(); nv + 1];
        for a in self.quiver.arrows() {
            inc[a.source as usize].insert(Edge::Arrow(a.id));
            inc[a.target as usize].insert(Edge::Arrow(a.id));
        }
        for (i, m) in self.markers.iter().enumerate() {
            if *m == MarkerKind::Anticlockwise {
                let g = Edge::Gap(i as u32 + 1);
                let (s, t) = self.edge_ends(g).expect("gap");
                inc[s as usize].insert(g);
                inc[t as usize].insert(g);
            }
        }
        inc
    }

    /// The marker edge of each marker (index `i - 1`), if unique.
    fn marker_edges(&self) -> Vec<Vec<Edge>> {
        let mut out = vec![Vec::new(); self.n() as usize];
        let ef = self.edge_faces();
        for (&e, faces) in &ef {
            if faces.len() != 1 {
                continue;
            }
            if let Some(i) = self.marker_of(e) {
                out[i as usize - 1].push(e);
            }
        }
        out
    }

    /// Follows every strand from its starting marker; entry `i - 1` is the
    /// list of edges crossed by strand `i` (first and last are marker edges),
    /// paired with the face entered after crossing each edge.
    fn strands(&self) -> Vec<Option<Vec<(Edge, usize)>>> {
        let ef = self.edge_faces();
        let markers = self.marker_edges();
        let limit = 4 * (self.quiver.arrows().len() + self.n() as usize) + 8;
        let mut out = Vec::new();
        for edges in &markers {
            if edges.len() != 1 {
                out.push(None);
                continue;
            }
            let e0 = edges[0];
            let (mut face, mut pos) = ef[&e0][0];
            let mut walk = vec![(e0, face)];
            let mut ok = false;
            for _ in 0..limit {
                let e = self.faces[face].succ(pos);
                let inc = match ef.get(&e) {
                    Some(x) => x,
                    None => break,
                };
                if inc.len() == 1 {
                    if self.marker_of(e).is_some() {
                        walk.push((e, face));
                        ok = true;
                    }
                    break;
                }
                match inc.iter().find(|(f, _)| *f != face) {
                    Some(&(g, p)) => {
                        face = g;
                        pos = p;
                        walk.push((e, g));
                    }
                    None => break,
                }
            }
            out.push(ok.then_some(walk));
        }
        out
    }

    /// Trip permutation: entry `i - 1` is the marker where strand `i` ends.
    pub fn trip_permutation(&self) -> Option<Vec<u32>> {
        self.strands()
            .into_iter()
            .map(|s| {
                let s = s?;
                self.marker_of(s.last()?.0)
            })
            .collect()
    }

    /// Plücker labels of all vertices (index `v - 1`): the `k`-subset of strands
    /// having the region on their left. `None` if the strands are inconsistent.
    pub fn labels(&self) -> Option<Vec<Vec<u32>>> {
        let strands: Vec<Vec<(Edge, usize)>> = self.strands().into_iter().collect::<Option<_>>()?;
        let nv = self.quiver.n_vertices() as usize;
        let inc = self.incident_edges();
        let mut left_sets: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for (si, walk) in strands.iter().enumerate() {
            let crossed: BTreeSet<Edge> = walk.iter().map(|(e, _)| *e).collect();
            let mut side = vec![0i8; nv + 1];
            let mut queue = VecDeque::new();
            for (e, g) in &walk[1..walk.len() - 1] {
                let (s, t) = self.edge_ends(*e)?;
                let (l, r) = match self.faces[*g].orientation {
                    Orientation::Anticlockwise => (s, t),
                    Orientation::Clockwise => (t, s),
                };
                for (v, val) in [(l, 1i8), (r, -1i8)] {
                    if side[v as usize] == -val {
                        return None;
                    }
                    if side[v as usize] == 0 {
                        side[v as usize] = val;
                        queue.push_back(v);
                    }
                }
            }
            while let Some(v) = queue.pop_front() {
                let val = side[v as usize];
                for &e in &inc[v as usize] {
                    if crossed.contains(&e) {
                        continue;
                    }
                    let (s, t) = self.edge_ends(e)?;
                    let w = if s == v { t } else { s };
                    if side[w as usize] == -val {
                        return None;
                    }
                    if side[w as usize] == 0 {
                        side[w as usize] = val;
                        queue.push_back(w);
                    }
                }
            }
            for v in 1..=nv {
                match side[v] {
                    1 => left_sets[v - 1].push(si as u32 + 1),
                    0 => return None,
                    _ => {}
                }
            }
        }
        let k = self.k as usize;
        if left_sets.iter().all(|s| s.len() == k) {
            return Some(left_sets);
        }
        let n = self.n();
        let right: Vec<Vec<u32>> =
            left_sets.iter().map(|s| (1..=n).filter(|i| !s.contains(i)).collect()).collect();
        right.iter().all(|s| s.len() == k).then_some(right)
    }

    /// Checks every diagram invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let len = f.edges.len();
            let ok = len >= 2
                && (0..len).all(|p| match (self.edge_ends(f.edges[p]), self.edge_ends(f.edges[(p + 1) % len])) {
                    (Some((_, t)), Some((s, _))) => t == s,
                    _ => false,
                });
            if !ok {
                violations.push(Violation::FaceNotCycle { face: fi });
            }
        }
        let ef = self.edge_faces();
        for a in self.quiver.arrows() {
            let e = Edge::Arrow(a.id);
            let faces = ef.get(&e).map(Vec::as_slice).unwrap_or(&[]);
            let external = !self.quiver.is_unexternal(a.id);
            let expected = if external { 1 } else { 2 };
            if faces.len() != expected {
                if external && faces.len() == 2 {
                    violations.push(Violation::StrayExternal { arrow: a.id });
                } else {
                    violations.push(Violation::EdgeFaceCount { edge: e, count: faces.len() });
                }
                continue;
            }
            if faces.len() == 2 && self.faces[faces[0].0].orientation == self.faces[faces[1].0].orientation {
                violations.push(Violation::NotAlternating { arrow: a.id });
            }
            if external {
                match self.marker_of(e) {
                    Some(_) if self.faces[faces[0].0].orientation == Orientation::Clockwise => {}
                    Some(i) => violations.push(Violation::MarkerOrientation { marker: i }),
                    None => violations.push(Violation::StrayExternal { arrow: a.id }),
                }
            }
        }
        for (&e, faces) in &ef {
            if let Edge::Gap(i) = e {
                if faces.len() != 1 {
                    violations.push(Violation::EdgeFaceCount { edge: e, count: faces.len() });
                } else if self.faces[faces[0].0].orientation != Orientation::Anticlockwise {
                    violations.push(Violation::MarkerOrientation { marker: i });
                }
            } else if let Edge::Arrow(a) = e {
                if self.quiver.arrow(a).is_none() {
                    violations.push(Violation::EdgeFaceCount { edge: e, count: 0 });
                }
            }
        }
        for (i, edges) in self.marker_edges().iter().enumerate() {
            if edges.len() != 1 {
                violations.push(Violation::MarkerEdges { marker: i as u32 + 1, count: edges.len() });
            }
        }
        let gaps = self.markers.iter().filter(|m| **m == MarkerKind::Anticlockwise).count() as i64;
        let vertices = self.quiver.n_vertices() as i64;
        let edges = self.quiver.arrows().len() as i64 + gaps;
        let faces = self.faces.len() as i64;
        if vertices - edges + faces != 1 {
            violations.push(Violation::Euler { vertices, edges, faces });
        }
        let inc = self.incident_edges();
        match self.compute_rotation() {
            None => violations.extend(self.quiver.vertices().map(|v| Violation::Rotation { vertex: v }).take(1)),
            Some(rot) => {
                for v in self.quiver.vertices() {
                    let order = &rot[v as usize - 1];
                    let set: BTreeSet<Edge> = order.iter().copied().collect();
                    if set.len() != order.len() || set != inc[v as usize] {
                        violations.push(Violation::Rotation { vertex: v });
                    }
                }
            }
        }
        let strands = self.strands();
        for (i, s) in strands.iter().enumerate() {
            if s.is_none() {
                violations.push(Violation::BrokenStrand { marker: i as u32 + 1 });
            }
        }
        if let Some(trip) = self.trip_permutation() {
            let n = self.n();
            let expected: Vec<u32> = (1..=n).map(|i| (i - 1 + self.k) % n + 1).collect();
            if trip != expected {
                violations.push(Violation::TripPermutation { trip });
            }
        }
        ValidationReport { violations }
    }

    /// Arrow ids given to the gap edges in the dimer-algebra variant, by marker.
    pub fn gap_arrows(&self) -> BTreeMap<u32, ArrowId> {
        let mut next = self.quiver.next_id();
        let mut out = BTreeMap::new();
        for (i, m) in self.markers.iter().enumerate() {
            if *m == MarkerKind::Anticlockwise {
                out.insert(i as u32 + 1, next);
                next += 1;
            }
        }
        out
    }

    /// The quiver of the requested variant. Arrow ids are shared with `Q̄`;
    /// the extra arrows of [`Variant::Bkm`] get the ids of [`FaceDiagram::gap_arrows`].
    pub fn variant_quiver(&self, v: Variant) -> IcedQuiver {
        let q = &self.quiver;
        match v {
            Variant::TypeIII => q.clone(),
            Variant::TypeI => {
                let mut out = q.clone();
                out.retain_arrows(|a| q.is_unexternal(a.id));
                out
            }
            Variant::TypeII => q.principal_part(),
            Variant::Bkm => {
                let mut triples: Vec<(ArrowId, Vertex, Vertex)> =
                    q.arrows().iter().map(|a| (a.id, a.source, a.target)).collect();
                for (i, id) in self.gap_arrows() {
                    let (s, t) = self.edge_ends(Edge::Gap(i)).expect("gap");
                    triples.push((id, s, t));
                }
                IcedQuiver::new(q.n_exchangeable(), q.n_frozen(), triples).expect("valid variant")
            }
        }
    }

    fn face_cycle(&self, f: &Face, v: Variant) -> Option<Path> {
        let gaps = self.gap_arrows();
        let q = self.variant_quiver(v);
        let mut ids = Vec::with_capacity(f.edges.len());
        for e in &f.edges {
            let id = match (e, v) {
                (Edge::Arrow(a), _) => *a,
                (Edge::Gap(i), Variant::Bkm) => gaps[i],
                (Edge::Gap(_), _) => return None,
            };
            q.arrow(id)?;
            ids.push(id);
        }
        let p = Path::from_traversal(&q, &ids).ok()?;
        canonical_rotation(&p).ok()
    }

    /// Fundamental cycles of the variant: one per face all of whose edges are
    /// arrows of that variant.
    pub fn fundamental_cycles(&self, v: Variant) -> Vec<FundamentalCycle> {
        let q = self.variant_quiver(v);
        let mut out = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let Some(cycle) = self.face_cycle(f, v) else { continue };
            let class = cycle_class(&q, &cycle);
            out.push(FundamentalCycle {
                face: fi,
                class,
                orientation: f.orientation,
                cycle,
                level: self.levels[fi],
            });
        }
        out
    }

    /// The potential: clockwise fundamental cycles minus anticlockwise ones.
    pub fn face_potential(&self, v: Variant, cap: u32) -> Potential {
        let mut w = Potential::zero(cap);
        for fc in self.fundamental_cycles(v) {
            w.add_cycle(&fc.cycle, Q::from_int(fc.orientation.sign())).expect("faces are cycles");
        }
        w
    }

    /// The iced quiver with potential of the variant.
    pub fn iqp(&self, v: Variant, cap: u32) -> Result<Iqp, PostnikovError> {
        Ok(Iqp::new(self.variant_quiver(v), self.face_potential(v, cap))?)
    }

    /// True when `a` is an exchangeable quadrilateral alternating cell: four
    /// incident arrows, alternating in and out around it, and no 2-cycle at `a`.
    pub fn is_exchangeable(&self, a: Vertex) -> bool {
        self.check_exchangeable(a).is_ok()
    }

    fn check_exchangeable(&self, a: Vertex) -> Result<(), PostnikovError> {
        if self.quiver.is_frozen(a) {
            return Err(PostnikovError::FrozenVertex(a));
        }
        if a == 0 || a > self.quiver.n_vertices() {
            return Err(QuiverError::VertexOutOfRange { vertex: a, max: self.quiver.n_vertices() }.into());
        }
        let ins = self.quiver.in_arrows(a).count();
        let outs = self.quiver.out_arrows(a).count();
        let rot = self.rotation.get(a as usize - 1).ok_or(PostnikovError::NotQuadrilateral(a))?;
        if ins != 2 || outs != 2 || rot.len() != 4 {
            return Err(PostnikovError::NotQuadrilateral(a));
        }
        let into = |e: &Edge| self.edge_ends(*e).is_some_and(|(_, t)| t == a);
        if (0..4).any(|p| into(&rot[p]) == into(&rot[(p + 1) % 4])) {
            return Err(PostnikovError::NotQuadrilateral(a));
        }
        Ok(())
    }

    /// Exchangeable vertices at which [`FaceDiagram::geometric_exchange`] applies.
    pub fn exchangeable_cells(&self) -> Vec<Vertex> {
        (1..=self.quiver.n_exchangeable()).filter(|&v| self.is_exchangeable(v)).collect()
    }

    /// Geometric exchange at the quadrilateral cell `a`, performed as surgery
    /// on faces.
    ///
    /// The new arrows are those of the quiver pre-mutation at `a` (with the
    /// same ids). Every face corner `x → a → y` is shortened to the composite
    /// `[yx]`, and a triangle `[yx], y*, x*` of the opposite orientation is
    /// inserted. Faces shortened to two edges are digons and are cancelled,
    /// smallest composite first: an ordinary digon deletes both arrows and
    /// merges the two neighbouring faces; a digon with an external arrow
    /// opens the triangle into a boundary face; a digon with a gap turns the
    /// composite into the external arrow of a new clockwise marker.
    pub fn geometric_exchange(&self, a: Vertex) -> Result<FaceDiagram, PostnikovError> {
        self.geometric_exchange_ordered(a, false)
    }

    /// [`FaceDiagram::geometric_exchange`] with digons cancelled largest
    /// composite first; the result must agree (used to test order independence).
    pub fn geometric_exchange_reversed(&self, a: Vertex) -> Result<FaceDiagram, PostnikovError> {
        self.geometric_exchange_ordered(a, true)
    }

    fn geometric_exchange_ordered(&self, a: Vertex, reversed: bool) -> Result<FaceDiagram, PostnikovError> {
        self.check_exchangeable(a)?;
        let pm = self.quiver.premutation(a)?;
        let mut quiver = pm.quiver.clone();
        let mut faces: Vec<Face> = Vec::new();
        let mut levels: Vec<Option<u32>> = Vec::new();
        let mut composites: Vec<ArrowId> = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let through = f.edges.iter().any(|e| self.edge_ends(*e).is_some_and(|(_, t)| t == a));
            if !through {
                faces.push(f.clone());
                levels.push(self.levels[fi]);
                continue;
            }
            let len = f.edges.len();
            let start = (0..len)
                .find(|&p| self.edge_ends(f.edges[p]).is_some_and(|(s, _)| s != a))
                .and_then(|p| (0..len).map(|d| (p + d) % len).find(|&q| {
                    self.edge_ends(f.edges[q]).is_some_and(|(_, t)| t != a)
                }))
                .map(|q| (q + 1) % len)
                .ok_or(PostnikovError::BrokenFace { face: fi })?;
            let mut edges = Vec::new();
            let mut p = 0;
            while p < len {
                let e = f.edges[(start + p) % len];
                let (_, t) = self.edge_ends(e).ok_or(PostnikovError::BrokenFace { face: fi })?;
                if t == a {
                    let (Edge::Arrow(x), Edge::Arrow(y)) = (e, f.edges[(start + p + 1) % len]) else {
                        return Err(PostnikovError::BrokenFace { face: fi });
                    };
                    let c = pm.composite(y, x).ok_or(PostnikovError::BrokenFace { face: fi })?;
                    edges.push(Edge::Arrow(c));
                    composites.push(c);
                    let (ys, xs) = (pm.star(y).expect("star"), pm.star(x).expect("star"));
                    faces.push(Face {
                        edges: vec![Edge::Arrow(c), Edge::Arrow(ys), Edge::Arrow(xs)],
                        orientation: f.orientation.flip(),
                    });
                    levels.push(None);
                    p += 2;
                } else {
                    edges.push(e);
                    p += 1;
                }
            }
            faces.push(Face { edges, orientation: f.orientation });
            levels.push(None);
        }
        composites.sort_unstable();
        if reversed {
            composites.reverse();
        }
        let mut fd = FaceDiagram {
            k: self.k,
            quiver: quiver.clone(),
            faces,
            markers: self.markers.clone(),
            rotation: Vec::new(),
            levels,
            coordinates: BTreeMap::new(),
        };
        for c in composites {
            let Some(di) = fd
                .faces
                .iter()
                .position(|f| f.edges.len() == 2 && f.edges.contains(&Edge::Arrow(c)))
            else {
                continue;
            };
            let digon = fd.faces[di].clone();
            let z = if digon.edges[0] == Edge::Arrow(c) { digon.edges[1] } else { digon.edges[0] };
            let other_of = |fd: &FaceDiagram, e: Edge, skip: usize| {
                fd.faces.iter().enumerate().position(|(i, f)| i != skip && f.edges.contains(&e))
            };
            let t_face = other_of(&fd, Edge::Arrow(c), di).ok_or(PostnikovError::BrokenFace { face: di })?;
            match z {
                Edge::Gap(i) => {
                    // The composite becomes the external arrow at marker i.
                    fd.remove_face(di);
                    fd.markers[i as usize - 1] = MarkerKind::Clockwise;
                }
                Edge::Arrow(zid) => match other_of(&fd, z, di) {
                    Some(fz) => {
                        if fz == t_face {
                            return Err(PostnikovError::BrokenFace { face: fz });
                        }
                        let mut tf = rotate_to_end(&fd.faces[t_face], Edge::Arrow(c));
                        let zf = rotate_to_end(&fd.faces[fz], z);
                        tf.edges.pop();
                        tf.edges.extend_from_slice(&zf.edges[..zf.edges.len() - 1]);
                        let level = None;
                        let (lo, hi) = if t_face < fz { (t_face, fz) } else { (fz, t_face) };
                        fd.faces[lo] = tf;
                        fd.levels[lo] = level;
                        fd.faces.remove(hi);
                        fd.levels.remove(hi);
                        let di = if di > hi { di - 1 } else { di };
                        fd.remove_face(di);
                        quiver.remove_arrows(&[c, zid]);
                    }
                    None => {
                        // External z: the triangle opens at the marker of z reversed.
                        let (s, _) = fd.edge_ends(Edge::Arrow(c)).expect("composite");
                        let i = fd.frozen_index(s).ok_or(PostnikovError::BoundaryMismatch(s))?;
                        let gap = Edge::Gap(i);
                        if fd.edge_ends(gap) != fd.edge_ends(Edge::Arrow(c)) {
                            return Err(PostnikovError::BoundaryMismatch(s));
                        }
                        let pos = fd.faces[t_face].position(Edge::Arrow(c)).expect("composite in face");
                        fd.faces[t_face].edges[pos] = gap;
                        fd.remove_face(di);
                        fd.markers[i as usize - 1] = MarkerKind::Anticlockwise;
                        quiver.remove_arrows(&[c, zid]);
                    }
                },
            }
            fd.quiver = quiver.clone();
        }
        fd.quiver = quiver;
        fd.rotation = fd.compute_rotation().unwrap_or_default();
        Ok(fd)
    }

    fn remove_face(&mut self, i: usize) {
        self.faces.remove(i);
        self.levels.remove(i);
    }

    /// Multiset of faces described by vertex cycles (canonical rotation) and
    /// orientation; equal for diagrams related by arrow renaming.
    pub fn face_signature(&self) -> Vec<(Vec<Vertex>, Orientation)> {
        let mut out: Vec<(Vec<Vertex>, Orientation)> = self
            .faces
            .iter()
            .map(|f| {
                let vs: Vec<Vertex> =
                    f.edges.iter().map(|e| self.edge_ends(*e).map_or(0, |(s, _)| s)).collect();
                let k = (0..vs.len())
                    .min_by(|&x, &y| vs[x..].iter().chain(&vs[..x]).cmp(vs[y..].iter().chain(&vs[..y])))
                    .unwrap_or(0);
                let mut r = vs[k..].to_vec();
                r.extend_from_slice(&vs[..k]);
                (r, f.orientation)
            })
            .collect();
        out.sort();
        out
    }
}

fn rotate_to_end(f: &Face, e: Edge) -> Face {
    let p = f.position(e).expect("edge in face");
    let len = f.edges.len();
    let edges = (0..len).map(|d| f.edges[(p + 1 + d) % len]).collect();
    Face { edges, orientation: f.orientation }
}

/// Class of a cycle by its arrow classes: external wins over boundary, which
/// wins over internal.
pub fn cycle_class(q: &IcedQuiver, c: &Path) -> CycleClass {
    use crate::quiver::ArrowClass;
    let mut class = CycleClass::Internal;
    for &a in c.arrows() {
        match q.classify_arrow(a) {
            Ok(ArrowClass::External) => return CycleClass::External,
            Ok(ArrowClass::Boundary) => class = CycleClass::Boundary,
            _ => {}
        }
    }
    class
}

/// A point `(i, j)` of the grid underlying the initial diagram.
type GridPoint = (u32, u32);

/// The initial diagram of `Gr(k, n)`.
///
/// It is built on the grid of points `(i, j)`, `0 ≤ i ≤ k`, `0 ≤ j ≤ n - k`,
/// with checkerboard orientation: the unit square `(i, j)` is a clockwise
/// cycle when `i + j` is even and anticlockwise otherwise. Interior points are
/// the exchangeable vertices. The `2n` points on the rim, read clockwise from
/// `(0, 0)`, are merged in consecutive pairs `(r_{2t-1}, r_{2t})` into the
/// frozen vertex `f_t`; the merged rim edges disappear (their squares become
/// triangles) and the remaining rim edges are the marker edges: external arrows
/// on clockwise squares and gaps on anticlockwise ones. The square `(i, j)`
/// lies on level `j + 1`.
pub fn initial_diagram(k: u32, n: u32) -> Result<FaceDiagram, PostnikovError> {
    if k < 2 || n < k + 2 {
        return Err(PostnikovError::OutOfRange { k, n });
    }
    let h = n - k;
    let n_exch = (k - 1) * (h - 1);
    // Rim in clockwise order from (0,0): up the left side, along the top,
    // down the right side, back along the bottom.
    let mut rim: Vec<(u32, u32)> = Vec::new();
    rim.extend((0..=h).map(|j| (0, j)));
    rim.extend((1..=k).map(|i| (i, h)));
    rim.extend((0..h).rev().map(|j| (k, j)));
    rim.extend((1..k).rev().map(|i| (i, 0)));
    let rim_len = rim.len();
    debug_assert_eq!(rim_len as u32, 2 * n);
    let mut vertex_of: BTreeMap<(u32, u32), Vertex> = BTreeMap::new();
    let mut coordinates = BTreeMap::new();
    for j in 1..h {
        for i in 1..k {
            let v = (j - 1) * (k - 1) + i;
            vertex_of.insert((i, j), v);
            coordinates.insert(v, (i, j));
        }
    }
    let mut rim_pos: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (p, &pt) in rim.iter().enumerate() {
        rim_pos.insert(pt, p);
        // Pair (r_{2t-1}, r_{2t}) is frozen vertex t; r_0 pairs with r_{2n-1}.
        let t = if p == 0 { n } else { (p as u32).div_ceil(2) };
        vertex_of.insert(pt, n_exch + t);
    }
    let merged = |p: (u32, u32), q: (u32, u32)| -> bool {
        match (rim_pos.get(&p), rim_pos.get(&q)) {
            (Some(&a), Some(&b)) => vertex_of[&p] == vertex_of[&q] && (a + 1) % rim_len == b || (b + 1) % rim_len == a && vertex_of[&p] == vertex_of[&q],
            _ => false,
        }
    };
    let on_rim = |p: (u32, u32), q: (u32, u32)| -> bool {
        match (rim_pos.get(&p), rim_pos.get(&q)) {
            (Some(&a), Some(&b)) => (a + 1) % rim_len == b || (b + 1) % rim_len == a,
            _ => false,
        }
    };
    // Directed grid edges: horizontal (i,j)->(i+1,j) iff i+j odd, vertical
    // (i,j)->(i,j+1) iff i+j even.
    let directed = |p: (u32, u32), q: (u32, u32)| -> ((u32, u32), (u32, u32)) {
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let forward = if lo.1 == hi.1 { (lo.0 + lo.1) % 2 == 1 } else { (lo.0 + lo.1) % 2 == 0 };
        if forward { (lo, hi) } else { (hi, lo) }
    };
    let mut triples: Vec<(ArrowId, Vertex, Vertex)> = Vec::new();
    let mut arrow_of: BTreeMap<(GridPoint, GridPoint), Edge> = BTreeMap::new();
    let mut add_edge = |p: (u32, u32), q: (u32, u32), square_cw: bool, triples: &mut Vec<(ArrowId, Vertex, Vertex)>| {
        let (s, t) = directed(p, q);
        let key = (s, t);
        if arrow_of.contains_key(&key) || merged(p, q) {
            return;
        }
        let (vs, vt) = (vertex_of[&s], vertex_of[&t]);
        if on_rim(p, q)
            && !square_cw {
                let gi = vs - n_exch;
                arrow_of.insert(key, Edge::Gap(gi));
                return;
            }
        let id = triples.len() as ArrowId + 1;
        triples.push((id, vs, vt));
        arrow_of.insert(key, Edge::Arrow(id));
    };
    let mut squares = Vec::new();
    for j in 0..h {
        for i in 0..k {
            let cw = (i + j) % 2 == 0;
            // Corners in clockwise order: bottom-left, top-left, top-right, bottom-right.
            let corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)];
            for c in 0..4 {
                add_edge(corners[c], corners[(c + 1) % 4], cw, &mut triples);
            }
            squares.push((i, j, cw, corners));
        }
    }
    let quiver = IcedQuiver::new(n_exch, n, triples)?;
    let mut faces = Vec::new();
    let mut levels = Vec::new();
    for (_, j, cw, corners) in squares {
        let mut seq: Vec<(u32, u32)> = corners.to_vec();
        if !cw {
            seq.reverse();
        }
        let mut edges = Vec::new();
        for c in 0..4 {
            let (p, q) = (seq[c], seq[(c + 1) % 4]);
            if merged(p, q) {
                continue;
            }
            let key = directed(p, q);
            debug_assert_eq!(key, (p, q), "square edges run along the face");
            edges.push(arrow_of[&key]);
        }
        faces.push(Face {
            edges,
            orientation: if cw { Orientation::Clockwise } else { Orientation::Anticlockwise },
        });
        levels.push(Some(j + 1));
    }
    Ok(FaceDiagram::new(k, quiver, faces).with_levels(levels).with_coordinates(coordinates))
}
