//! Iced quivers and Fomin–Zelevinsky mutation.
//!
//! Vertices are numbered `1..=n+m`; the frozen vertices are exactly the suffix
//! `n+1..=n+m`. Arrows are stored individually with stable integer ids, so
//! parallel arrows stay distinguishable and potentials can name them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// A vertex index, `1..=n+m`.
pub type Vertex = u32;
/// A stable arrow identifier.
pub type ArrowId = u32;

/// An arrow `source → target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: Vertex,
    pub target: Vertex,
}

/// Arrow classes determined by which endpoints are frozen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArrowClass {
    /// Both endpoints exchangeable.
    Internal,
    /// Exactly one endpoint frozen.
    Boundary,
    /// Both endpoints frozen.
    External,
}

/// Failures of quiver construction and mutation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("arrow {id} is a loop at vertex {vertex}")]
    Loop { id: ArrowId, vertex: Vertex },
    #[error("arrow id {0} is used twice")]
    DuplicateArrowId(ArrowId),
    #[error("vertex {vertex} is out of range 1..={max}")]
    VertexOutOfRange { vertex: Vertex, max: u32 },
    #[error("unknown arrow id {0}")]
    UnknownArrow(ArrowId),
    #[error("vertex {0} is frozen")]
    FrozenVertex(Vertex),
    #[error("vertex {0} lies on a 2-cycle")]
    TwoCycleAt(Vertex),
}

/// A quiver with a frozen suffix of vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IcedQuiver {
    n: u32,
    m: u32,
    arrows: Vec<Arrow>,
    next_id: ArrowId,
}

/// The composite arrow `[αβ]` created for the 2-path `β` then `α` through the mutated vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Composite {
    pub id: ArrowId,
    /// The arrow leaving the mutated vertex (`α`).
    pub outer: ArrowId,
    /// The arrow entering the mutated vertex (`β`).
    pub inner: ArrowId,
}

/// The reversed arrow `α*` replacing an arrow `α` incident to the mutated vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Star {
    pub id: ArrowId,
    pub original: ArrowId,
}

/// The first two steps of mutation: composites added, incident arrows reversed.
///
/// The transcript names every new arrow after the arrows that generated it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverPremutation {
    pub quiver: IcedQuiver,
    pub vertex: Vertex,
    pub composites: Vec<Composite>,
    pub stars: Vec<Star>,
}

impl QuiverPremutation {
    /// Id of the composite `[αβ]`, if it exists.
    pub fn composite(&self, outer: ArrowId, inner: ArrowId) -> Option<ArrowId> {
        self.composites.iter().find(|c| c.outer == outer && c.inner == inner).map(|c| c.id)
    }

    /// Id of `α*`, if `α` was incident to the mutated vertex.
    pub fn star(&self, original: ArrowId) -> Option<ArrowId> {
        self.stars.iter().find(|s| s.original == original).map(|s| s.id)
    }
}

impl IcedQuiver {
    /// Builds a quiver from `(id, source, target)` triples.
    pub fn new(
        n_exchangeable: u32,
        n_frozen: u32,
        arrows: impl IntoIterator<Item = (ArrowId, Vertex, Vertex)>,
    ) -> Result<IcedQuiver, QuiverError> {
        let max = n_exchangeable + n_frozen;
        let mut list: Vec<Arrow> = Vec::new();
        for (id, source, target) in arrows {
            for v in [source, target] {
                if v == 0 || v > max {
                    return Err(QuiverError::VertexOutOfRange { vertex: v, max });
                }
            }
            if source == target {
                return Err(QuiverError::Loop { id, vertex: source });
            }
            list.push(Arrow { id, source, target });
        }
        list.sort();
        for w in list.windows(2) {
            if w[0].id == w[1].id {
                return Err(QuiverError::DuplicateArrowId(w[0].id));
            }
        }
        let next_id = list.last().map_or(1, |a| a.id + 1);
        Ok(IcedQuiver { n: n_exchangeable, m: n_frozen, arrows: list, next_id })
    }

    /// Builds a quiver from `(source, target)` pairs, numbering arrows `1, 2, …` in order.
    pub fn from_pairs(
        n_exchangeable: u32,
        n_frozen: u32,
        pairs: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<IcedQuiver, QuiverError> {
        IcedQuiver::new(
            n_exchangeable,
            n_frozen,
            pairs.into_iter().enumerate().map(|(i, (s, t))| (i as ArrowId + 1, s, t)),
        )
    }

    /// Number of exchangeable vertices `n`.
    pub fn n_exchangeable(&self) -> u32 {
        self.n
    }

    /// Number of frozen vertices `m`.
    pub fn n_frozen(&self) -> u32 {
        self.m
    }

    /// Total vertex count `n + m`.
    pub fn n_vertices(&self) -> u32 {
        self.n + self.m
    }

    /// All vertices in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n + self.m
    }

    /// True when `v` is in the frozen suffix.
    pub fn is_frozen(&self, v: Vertex) -> bool {
        v > self.n
    }

    /// Arrows sorted by id.
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// The smallest id that has never been allocated by this quiver's counter.
    pub fn next_id(&self) -> ArrowId {
        self.next_id
    }

    /// Looks an arrow up by id.
    pub fn arrow(&self, id: ArrowId) -> Option<Arrow> {
        self.arrows.binary_search_by_key(&id, |a| a.id).ok().map(|i| self.arrows[i])
    }

    /// Looks an arrow up by id, failing on unknown ids.
    pub fn get(&self, id: ArrowId) -> Result<Arrow, QuiverError> {
        self.arrow(id).ok_or(QuiverError::UnknownArrow(id))
    }

    /// Classifies an arrow as internal, boundary or external.
    pub fn classify_arrow(&self, id: ArrowId) -> Result<ArrowClass, QuiverError> {
        let a = self.get(id)?;
        Ok(match (self.is_frozen(a.source), self.is_frozen(a.target)) {
            (false, false) => ArrowClass::Internal,
            (true, true) => ArrowClass::External,
            _ => ArrowClass::Boundary,
        })
    }

    /// True for internal and boundary arrows.
    pub fn is_unexternal(&self, id: ArrowId) -> bool {
        matches!(self.classify_arrow(id), Ok(ArrowClass::Internal | ArrowClass::Boundary))
    }

    /// Arrows leaving `v`, by id.
    pub fn out_arrows(&self, v: Vertex) -> impl Iterator<Item = Arrow> + '_ {
        self.arrows.iter().copied().filter(move |a| a.source == v)
    }

    /// Arrows entering `v`, by id.
    pub fn in_arrows(&self, v: Vertex) -> impl Iterator<Item = Arrow> + '_ {
        self.arrows.iter().copied().filter(move |a| a.target == v)
    }

    /// Number of arrows `u → v`.
    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        self.arrows.iter().filter(|a| a.source == u && a.target == v).count()
    }

    /// Adds an arrow with a freshly allocated id.
    pub fn add_arrow(&mut self, source: Vertex, target: Vertex) -> Result<ArrowId, QuiverError> {
        let max = self.n_vertices();
        for v in [source, target] {
            if v == 0 || v > max {
                return Err(QuiverError::VertexOutOfRange { vertex: v, max });
            }
        }
        if source == target {
            return Err(QuiverError::Loop { id: self.next_id, vertex: source });
        }
        let id = self.next_id;
        self.next_id += 1;
        self.arrows.push(Arrow { id, source, target });
        Ok(id)
    }

    /// Removes arrows by id; unknown ids are ignored.
    pub fn remove_arrows(&mut self, ids: &[ArrowId]) {
        self.arrows.retain(|a| !ids.contains(&a.id));
    }

    /// Keeps only the arrows satisfying `keep`; the id counter is unchanged.
    pub fn retain_arrows(&mut self, mut keep: impl FnMut(&Arrow) -> bool) {
        self.arrows.retain(|a| keep(a));
    }

    /// Raises the id counter so that future ids are at least `next`.
    pub fn reserve_ids(&mut self, next: ArrowId) {
        self.next_id = self.next_id.max(next);
    }

    /// The full subquiver on the exchangeable vertices; arrow ids are preserved.
    pub fn principal_part(&self) -> IcedQuiver {
        IcedQuiver {
            n: self.n,
            m: 0,
            arrows: self
                .arrows
                .iter()
                .copied()
                .filter(|a| !self.is_frozen(a.source) && !self.is_frozen(a.target))
                .collect(),
            next_id: self.next_id,
        }
    }

    /// Every arrow reversed, ids preserved.
    pub fn opposite(&self) -> IcedQuiver {
        IcedQuiver {
            n: self.n,
            m: self.m,
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow { id: a.id, source: a.target, target: a.source })
                .collect(),
            next_id: self.next_id,
        }
    }

    /// Sorted `(source, target)` list: the quiver up to arrow-id renaming.
    pub fn arrow_multiset(&self) -> Vec<(Vertex, Vertex)> {
        let mut v: Vec<_> = self.arrows.iter().map(|a| (a.source, a.target)).collect();
        v.sort_unstable();
        v
    }

    /// Same vertices and frozen set and the same arrows up to id renaming.
    pub fn same_up_to_ids(&self, other: &IcedQuiver) -> bool {
        self.n == other.n && self.m == other.m && self.arrow_multiset() == other.arrow_multiset()
    }

    fn check_mutable(&self, i: Vertex) -> Result<(), QuiverError> {
        if i == 0 || i > self.n_vertices() {
            return Err(QuiverError::VertexOutOfRange { vertex: i, max: self.n_vertices() });
        }
        if self.is_frozen(i) {
            return Err(QuiverError::FrozenVertex(i));
        }
        let ins: Vec<Vertex> = self.in_arrows(i).map(|a| a.source).collect();
        if self.out_arrows(i).any(|a| ins.contains(&a.target)) {
            return Err(QuiverError::TwoCycleAt(i));
        }
        Ok(())
    }

    /// Steps (1) and (2) of mutation at `i`: composites for every 2-path through
    /// `i`, then every arrow at `i` replaced by its reverse.
    ///
    /// Composites are allocated first, ordered by (incoming id, outgoing id), then
    /// stars in increasing order of the original id.
    pub fn premutation(&self, i: Vertex) -> Result<QuiverPremutation, QuiverError> {
        self.check_mutable(i)?;
        let ins: Vec<Arrow> = self.in_arrows(i).collect();
        let outs: Vec<Arrow> = self.out_arrows(i).collect();
        let mut q = self.clone();
        q.retain_arrows(|a| a.source != i && a.target != i);
        let mut composites = Vec::new();
        for beta in &ins {
            for alpha in &outs {
                let id = q.add_arrow(beta.source, alpha.target)?;
                composites.push(Composite { id, outer: alpha.id, inner: beta.id });
            }
        }
        let mut incident: Vec<Arrow> = ins.iter().chain(outs.iter()).copied().collect();
        incident.sort();
        let mut stars = Vec::new();
        for a in incident {
            let id = q.add_arrow(a.target, a.source)?;
            stars.push(Star { id, original: a.id });
        }
        Ok(QuiverPremutation { quiver: q, vertex: i, composites, stars })
    }

    /// Repeatedly deletes the 2-cycle whose smaller arrow id is minimal, until none remain.
    ///
    /// Returns the deleted pairs in deletion order.
    pub fn remove_two_cycles(&mut self) -> Vec<(ArrowId, ArrowId)> {
        let mut removed = Vec::new();
        loop {
            let mut best: Option<(ArrowId, ArrowId)> = None;
            for a in &self.arrows {
                for b in &self.arrows {
                    if a.id < b.id && a.source == b.target && a.target == b.source {
                        let cand = (a.id, b.id);
                        if best.is_none_or(|x| cand < x) {
                            best = Some(cand);
                        }
                    }
                }
            }
            match best {
                Some((a, b)) => {
                    self.remove_arrows(&[a, b]);
                    removed.push((a, b));
                }
                None => return removed,
            }
        }
    }

    /// Fomin–Zelevinsky mutation at the exchangeable vertex `i`.
    pub fn mutate_quiver(&self, i: Vertex) -> Result<IcedQuiver, QuiverError> {
        let mut q = self.premutation(i)?.quiver;
        q.remove_two_cycles();
        Ok(q)
    }

    /// Renumbers arrows `1, 2, …` in `(source, target, old id)` order.
    pub fn normalized(&self) -> IcedQuiver {
        let mut arrows = self.arrows.clone();
        arrows.sort_by_key(|a| (a.source, a.target, a.id));
        IcedQuiver::new(
            self.n,
            self.m,
            arrows.iter().enumerate().map(|(i, a)| (i as ArrowId + 1, a.source, a.target)),
        )
        .expect("renumbering preserves validity")
    }

    fn multiplicity_matrix(&self) -> Vec<Vec<u32>> {
        let size = self.n_vertices() as usize + 1;
        let mut m = vec![vec![0u32; size]; size];
        for a in &self.arrows {
            m[a.source as usize][a.target as usize] += 1;
        }
        m
    }

    /// Searches for a vertex bijection `φ` (returned as `φ[v-1]`) preserving
    /// arrow multiplicities between every ordered vertex pair and mapping frozen
    /// vertices to frozen vertices; pointwise on frozen vertices when `fix_frozen`.
    pub fn are_isomorphic(&self, other: &IcedQuiver, fix_frozen: bool) -> Option<Vec<Vertex>> {
        if self.n != other.n || self.m != other.m || self.arrows.len() != other.arrows.len() {
            return None;
        }
        let size = self.n_vertices() as usize;
        let ma = self.multiplicity_matrix();
        let mb = other.multiplicity_matrix();
        let sig = |m: &Vec<Vec<u32>>, v: usize| {
            let out: u32 = m[v].iter().sum();
            let inn: u32 = m.iter().map(|row| row[v]).sum();
            let mut outs: Vec<u32> = m[v].iter().copied().filter(|&x| x > 0).collect();
            let mut ins: Vec<u32> = m.iter().map(|row| row[v]).filter(|&x| x > 0).collect();
            outs.sort_unstable();
            ins.sort_unstable();
            (out, inn, outs, ins)
        };
        let sa: Vec<_> = (0..=size).map(|v| sig(&ma, v)).collect();
        let sb: Vec<_> = (0..=size).map(|v| sig(&mb, v)).collect();
        let mut image = vec![0 as Vertex; size + 1];
        let mut used = vec![false; size + 1];
        if fix_frozen {
            for v in self.n as usize + 1..=size {
                if sa[v] != sb[v] {
                    return None;
                }
                image[v] = v as Vertex;
                used[v] = true;
            }
        }
        // Order: most constrained (highest degree) first among unassigned vertices.
        let mut order: Vec<usize> = (1..=size).filter(|&v| image[v] == 0).collect();
        order.sort_by_key(|&v| core::cmp::Reverse(sa[v].0 + sa[v].1));
        let n = self.n as usize;
        #[allow(clippy::too_many_arguments)]
        fn extend(
            depth: usize,
            order: &[usize],
            image: &mut Vec<Vertex>,
            used: &mut Vec<bool>,
            ma: &[Vec<u32>],
            mb: &[Vec<u32>],
            ok: &dyn Fn(usize, usize) -> bool,
            size: usize,
        ) -> bool {
            if depth == order.len() {
                return true;
            }
            let v = order[depth];
            for w in 1..=size {
                if used[w] || !ok(v, w) {
                    continue;
                }
                let consistent = (1..=size).all(|u| {
                    let iu = image[u] as usize;
                    if iu == 0 && u != v {
                        return true;
                    }
                    let iu = if u == v { w } else { iu };
                    ma[v][u] == mb[w][iu] && ma[u][v] == mb[iu][w]
                });
                if !consistent {
                    continue;
                }
                image[v] = w as Vertex;
                used[w] = true;
                if extend(depth + 1, order, image, used, ma, mb, ok, size) {
                    return true;
                }
                image[v] = 0;
                used[w] = false;
            }
            false
        }
        let ok = |v: usize, w: usize| (v > n) == (w > n) && sa[v] == sb[w];
        if extend(0, &order, &mut image, &mut used, &ma, &mb, &ok, size) {
            Some(image[1..].to_vec())
        } else {
            None
        }
    }
}

impl fmt::Display for IcedQuiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quiver(n={}, m={}; ", self.n, self.m)?;
        for (i, a) in self.arrows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}→{}", a.id, a.source, a.target)?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_of_single_boundary_arrow() {
        let q = IcedQuiver::from_pairs(1, 1, [(1, 2)]).unwrap();
        assert_eq!(q.classify_arrow(1), Ok(ArrowClass::Boundary));
        assert_eq!(q.classify_arrow(9), Err(QuiverError::UnknownArrow(9)));
    }

    #[test]
    fn construction_rejects_loops_and_duplicates() {
        assert!(matches!(IcedQuiver::new(2, 0, [(1, 1, 1)]), Err(QuiverError::Loop { .. })));
        assert_eq!(IcedQuiver::new(2, 0, [(1, 1, 2), (1, 2, 1)]), Err(QuiverError::DuplicateArrowId(1)));
        assert!(matches!(IcedQuiver::new(2, 0, [(1, 1, 3)]), Err(QuiverError::VertexOutOfRange { .. })));
    }

    #[test]
    fn premutation_names_new_arrows() {
        // α:1→2, β:2→3 ; composite through 2 is [βα]:1→3.
        let q = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3)]).unwrap();
        let p = q.premutation(2).unwrap();
        assert_eq!(p.composites, vec![Composite { id: 3, outer: 2, inner: 1 }]);
        assert_eq!(p.star(1), Some(4));
        assert_eq!(p.star(2), Some(5));
        assert_eq!(p.quiver.arrow(3), Some(Arrow { id: 3, source: 1, target: 3 }));
        assert_eq!(p.quiver.arrow(4), Some(Arrow { id: 4, source: 2, target: 1 }));
    }

    #[test]
    fn two_cycle_removal_prefers_smallest_id() {
        let mut q = IcedQuiver::from_pairs(2, 0, [(1, 2), (1, 2), (2, 1)]).unwrap();
        assert_eq!(q.remove_two_cycles(), vec![(1, 3)]);
        assert_eq!(q.arrows().len(), 1);
        assert_eq!(q.arrows()[0].id, 2);
    }
}
