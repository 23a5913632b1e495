//! Truncated Jacobian ideals.
//!
//! For a truncation degree `N`, [`IdealBasis`] is an echelon basis of
//! `(J + 𝔪^{N+1}) / 𝔪^{N+1}` inside the span of paths of length `≤ N`, where `J`
//! is the closed two-sided ideal generated by the cyclic derivatives of the
//! potential along internal and boundary arrows.
//!
//! Paths are indexed in *(length, then traversal lexicographic)* order and every
//! basis row's pivot is its smallest path. With this order the number of pivots
//! of length `L` is the dimension of the degree-`L` layer `(J ∩ 𝔪^L + 𝔪^{L+1}) / 𝔪^{L+1}`,
//! independently of how the basis was generated. If for some `L` every path of
//! length `L` is a pivot, then `𝔪^L ⊆ J + 𝔪^{L+1}` and hence `𝔪^L ⊆ J` (a
//! Nakayama argument using that `J` is closed); the quotient is then known
//! exactly. This is the stabilization certificate used throughout.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::path::{cyclic_derivative, min_rotation_offset, Path, PathSum};
use crate::qp::Iqp;
use crate::quiver::{ArrowId, IcedQuiver, Vertex};
use crate::rational::Q;

const NONE: u32 = u32::MAX;

/// Failures of truncated ideal computations.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum JacobianError {
    #[error("element needs degree {needed} but the basis is truncated at {cap} and not stabilized")]
    CapExceeded { needed: usize, cap: u32 },
    #[error("path uses an arrow unknown to the quiver")]
    UnknownPath,
}

/// All paths of length `≤ cap`, numbered in (length, traversal-lex) order.
#[derive(Clone, Debug)]
pub struct PathIndex {
    cap: u32,
    source: Vec<Vertex>,
    target: Vec<Vertex>,
    parent: Vec<u32>,
    last: Vec<ArrowId>,
    child_start: Vec<u32>,
    level_start: Vec<usize>,
    out_arrows: Vec<Vec<ArrowId>>,
    out_rank: hashbrown::HashMap<ArrowId, u32>,
    arrow_ends: hashbrown::HashMap<ArrowId, (Vertex, Vertex)>,
}

impl PathIndex {
    /// Enumerates every path of `q` with at most `cap` arrows.
    pub fn new(q: &IcedQuiver, cap: u32) -> PathIndex {
        let nv = q.n_vertices() as usize;
        let mut out_arrows = vec![Vec::new(); nv + 1];
        let mut out_rank = hashbrown::HashMap::new();
        let mut arrow_ends = hashbrown::HashMap::new();
        for a in q.arrows() {
            out_rank.insert(a.id, out_arrows[a.source as usize].len() as u32);
            out_arrows[a.source as usize].push(a.id);
            arrow_ends.insert(a.id, (a.source, a.target));
        }
        let mut idx = PathIndex {
            cap,
            source: Vec::new(),
            target: Vec::new(),
            parent: Vec::new(),
            last: Vec::new(),
            child_start: Vec::new(),
            level_start: vec![0],
            out_arrows,
            out_rank,
            arrow_ends,
        };
        for v in 1..=nv as Vertex {
            idx.source.push(v);
            idx.target.push(v);
            idx.parent.push(NONE);
            idx.last.push(0);
        }
        for _level in 0..cap {
            let lo = *idx.level_start.last().unwrap();
            let hi = idx.source.len();
            idx.level_start.push(hi);
            for p in lo..hi {
                idx.child_start.push(idx.source.len() as u32);
                let t = idx.target[p] as usize;
                for k in 0..idx.out_arrows[t].len() {
                    let a = idx.out_arrows[t][k];
                    let (_, at) = idx.arrow_ends[&a];
                    idx.source.push(idx.source[p]);
                    idx.target.push(at);
                    idx.parent.push(p as u32);
                    idx.last.push(a);
                }
            }
        }
        idx.level_start.push(idx.source.len());
        idx
    }

    /// Truncation degree.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Number of indexed paths.
    pub fn len(&self) -> usize {
        self.source.len()
    }

    /// True when no paths are indexed (no vertices).
    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// Index range of paths of length `l`.
    pub fn level(&self, l: usize) -> core::ops::Range<usize> {
        self.level_start[l]..self.level_start[l + 1]
    }

    /// Length of the path with index `i`.
    pub fn length(&self, i: u32) -> usize {
        self.level_start.partition_point(|&s| s <= i as usize) - 1
    }

    /// Source of path `i`.
    pub fn source(&self, i: u32) -> Vertex {
        self.source[i as usize]
    }

    /// Target of path `i`.
    pub fn target(&self, i: u32) -> Vertex {
        self.target[i as usize]
    }

    /// Index of the trivial path `e_v`.
    pub fn trivial(&self, v: Vertex) -> u32 {
        v - 1
    }

    /// Index of path `i` followed by arrow `a`, if within the cap and composable.
    pub fn extend(&self, i: u32, a: ArrowId) -> Option<u32> {
        let (s, _) = *self.arrow_ends.get(&a)?;
        if s != self.target[i as usize] || self.length(i) >= self.cap as usize {
            return None;
        }
        Some(self.child_start[i as usize] + self.out_rank[&a])
    }

    /// Index of the path `i` followed by the arrows `arrows` (traversal order).
    pub fn extend_all(&self, mut i: u32, arrows: &[ArrowId]) -> Option<u32> {
        for &a in arrows {
            i = self.extend(i, a)?;
        }
        Some(i)
    }

    /// Index of an arbitrary path, `None` if it is longer than the cap.
    pub fn index_of(&self, p: &Path) -> Option<u32> {
        self.extend_all(self.trivial(p.source()), p.arrows())
    }

    /// Arrows of path `i` in traversal order.
    pub fn arrows(&self, mut i: u32) -> Vec<ArrowId> {
        let mut out = Vec::new();
        while self.parent[i as usize] != NONE {
            out.push(self.last[i as usize]);
            i = self.parent[i as usize];
        }
        out.reverse();
        out
    }

    /// Path `i` as a [`Path`].
    pub fn path(&self, i: u32) -> Path {
        let arrows = self.arrows(i);
        let mut vertices = vec![self.source(i)];
        for a in &arrows {
            vertices.push(self.arrow_ends[a].1);
        }
        Path::from_raw(arrows, vertices)
    }

    /// Out-arrows of `v` in id order.
    pub fn out_arrows(&self, v: Vertex) -> &[ArrowId] {
        &self.out_arrows[v as usize]
    }
}

type Row = Vec<(u32, Q)>;

fn axpy(x: &Row, lambda: &Q, y: &Row) -> Row {
    // x + λ·y, both sorted by index.
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i == x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, lambda * &y[j].1));
            j += 1;
        } else {
            let c = &x[i].1 + &(lambda * &y[j].1);
            if !c.is_zero() {
                out.push((x[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Echelon basis of a subspace of a finite-dimensional space with ordered
/// coordinates; every row's pivot is its smallest coordinate.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<Row>,
    pivot_row: hashbrown::HashMap<u32, u32>,
}

impl Echelon {
    fn reduce(&self, mut v: Row) -> Row {
        while let Some((p, c)) = v.first() {
            match self.pivot_row.get(p) {
                Some(&r) => {
                    let row = &self.rows[r as usize];
                    let lambda = -(c / &row[0].1);
                    v = axpy(&v, &lambda, row);
                }
                None => break,
            }
        }
        v
    }

    /// Inserts `v` if independent; returns the new row's index.
    fn insert(&mut self, v: Row) -> Option<u32> {
        let v = self.reduce(v);
        if v.is_empty() {
            return None;
        }
        let lead = v[0].1.clone();
        let v: Row = if lead.is_one() {
            v
        } else {
            let inv = lead.recip();
            v.into_iter().map(|(i, c)| (i, &c * &inv)).collect()
        };
        let r = self.rows.len() as u32;
        self.pivot_row.insert(v[0].0, r);
        self.rows.push(v);
        Some(r)
    }

    fn contains(&self, v: Row) -> bool {
        self.reduce(v).is_empty()
    }
}

/// The generators `∂_a W` for every internal or boundary arrow `a`, in arrow-id order.
pub fn jacobian_generators(p: &Iqp) -> Vec<PathSum> {
    let q = p.quiver();
    q.arrows()
        .iter()
        .filter(|a| q.is_unexternal(a.id))
        .map(|a| cyclic_derivative(p.potential(), a.id))
        .collect()
}

/// Echelon basis of the Jacobian ideal truncated at degree `cap`.
#[derive(Clone, Debug)]
pub struct IdealBasis {
    index: PathIndex,
    echelon: Echelon,
    surviving: Vec<usize>,
    max_generator_degree: usize,
}

impl IdealBasis {
    /// Computes the basis for `p` at truncation degree `cap`.
    ///
    /// The potential must be exact through degree `cap + 1` (finite potentials
    /// whose longest cycle fits the potential's own cap always are).
    pub fn new(p: &Iqp, cap: u32) -> IdealBasis {
        let index = PathIndex::new(p.quiver(), cap);
        let gens = jacobian_generators(p);
        let max_generator_degree = gens.iter().map(PathSum::max_len).max().unwrap_or(0);
        let mut echelon = Echelon::default();
        let mut queue: VecDeque<u32> = VecDeque::new();
        for g in &gens {
            let mut row: Row = g
                .terms()
                .filter_map(|(path, c)| index.index_of(path).map(|i| (i, c.clone())))
                .collect();
            row.sort_by_key(|t| t.0);
            if let Some(r) = echelon.insert(row) {
                queue.push_back(r);
            }
        }
        // Close the span under left and right multiplication by arrows.
        while let Some(r) = queue.pop_front() {
            let row = echelon.rows[r as usize].clone();
            let (s, t) = (index.source(row[0].0), index.target(row[0].0));
            // Traverse the row, then an arrow leaving t (left multiplication).
            for &a in index.out_arrows(t) {
                let mut v: Row = row
                    .iter()
                    .filter_map(|(i, c)| index.extend(*i, a).map(|j| (j, c.clone())))
                    .collect();
                v.sort_by_key(|x| x.0);
                if let Some(nr) = echelon.insert(v) {
                    queue.push_back(nr);
                }
            }
            // Traverse an arrow entering s, then the row (right multiplication).
            for b in p.quiver().in_arrows(s) {
                let mut v: Row = row
                    .iter()
                    .filter_map(|(i, c)| {
                        let mut arrows = vec![b.id];
                        arrows.extend(index.arrows(*i));
                        index.extend_all(index.trivial(b.source), &arrows).map(|j| (j, c.clone()))
                    })
                    .collect();
                v.sort_by_key(|x| x.0);
                if let Some(nr) = echelon.insert(v) {
                    queue.push_back(nr);
                }
            }
        }
        let mut surviving = Vec::new();
        for l in 0..=cap as usize {
            let range = index.level(l);
            let killed = range.clone().filter(|i| echelon.pivot_row.contains_key(&(*i as u32))).count();
            surviving.push(range.len() - killed);
        }
        IdealBasis { index, echelon, surviving, max_generator_degree }
    }

    /// Truncation degree.
    pub fn cap(&self) -> u32 {
        self.index.cap()
    }

    /// The path index underlying the basis.
    pub fn index(&self) -> &PathIndex {
        &self.index
    }

    /// Number of basis rows, i.e. `dim (J + 𝔪^{N+1})/𝔪^{N+1}`.
    pub fn rank(&self) -> usize {
        self.echelon.rows.len()
    }

    /// Largest term length among the generators.
    pub fn max_generator_degree(&self) -> usize {
        self.max_generator_degree
    }

    /// Surviving (non-pivot) path counts per length `0..=cap`: the dimensions of
    /// the graded pieces `𝔪^L𝒫 / 𝔪^{L+1}𝒫` of the Jacobian algebra.
    pub fn surviving_per_degree(&self) -> &[usize] {
        &self.surviving
    }

    /// The smallest `L ≥ 1` with no surviving path of length `L`, if `L ≤ cap`;
    /// then `𝔪^L ⊆ J` and all computations against this basis are exact.
    pub fn killed_degree(&self) -> Option<usize> {
        (1..self.surviving.len()).find(|&l| self.surviving[l] == 0)
    }

    /// True when [`IdealBasis::killed_degree`] exists.
    pub fn is_stabilized(&self) -> bool {
        self.killed_degree().is_some()
    }

    /// Dimension of the quotient by the ideal in degrees `< n`.
    pub fn quotient_dimension_below(&self, n: usize) -> usize {
        self.surviving.iter().take(n).sum()
    }

    /// Surviving paths: a basis of the truncated Jacobian algebra.
    pub fn quotient_basis(&self) -> Vec<Path> {
        (0..self.index.len() as u32)
            .filter(|i| !self.echelon.pivot_row.contains_key(i))
            .map(|i| self.index.path(i))
            .collect()
    }

    fn row_of(&self, x: &PathSum) -> Result<Row, JacobianError> {
        let mut row = Vec::new();
        for (p, c) in x.terms() {
            if p.len() > self.cap() as usize {
                match self.killed_degree() {
                    Some(l) if l <= p.len() => continue,
                    _ => return Err(JacobianError::CapExceeded { needed: p.len(), cap: self.cap() }),
                }
            }
            let i = self.index.index_of(p).ok_or(JacobianError::UnknownPath)?;
            row.push((i, c.clone()));
        }
        row.sort_by_key(|t| t.0);
        Ok(row)
    }

    /// Membership of `x` in `J + 𝔪^{N+1}`; exact membership in `J` when stabilized.
    ///
    /// Terms longer than the cap are accepted only when the basis is stabilized
    /// (they then lie in `𝔪^L ⊆ J`).
    pub fn is_in_ideal(&self, x: &PathSum) -> Result<bool, JacobianError> {
        Ok(self.echelon.contains(self.row_of(x)?))
    }
}

/// Membership oracle, see [`IdealBasis::is_in_ideal`].
pub fn is_in_ideal(x: &PathSum, basis: &IdealBasis) -> Result<bool, JacobianError> {
    basis.is_in_ideal(x)
}

/// Dimension of the Jacobian algebra in path lengths `< n`, and whether this is
/// certified to be the full dimension.
pub fn quotient_dimension(p: &Iqp, n: u32) -> (usize, bool) {
    let b = IdealBasis::new(p, n.saturating_sub(1));
    (b.quotient_dimension_below(n as usize), b.is_stabilized())
}

/// Outcome of a Jacobi-finiteness probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JacobiVerdict {
    /// Certified finite dimension.
    Stabilized(usize),
    /// No certificate up to the largest cap tried.
    GrowingThrough(u32),
}

/// Quotient dimensions over several caps together with the verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiProbe {
    /// `(cap, dimension in lengths < cap, stabilized)` per requested cap.
    pub dimensions: Vec<(u32, usize, bool)>,
    pub verdict: JacobiVerdict,
}

/// Runs [`quotient_dimension`] over `caps`, from a single basis at the largest cap.
///
/// Graded layer dimensions do not depend on the truncation, so one basis yields
/// every smaller cap.
pub fn jacobi_finite_probe(p: &Iqp, caps: &[u32]) -> JacobiProbe {
    let max = caps.iter().copied().max().unwrap_or(2);
    let b = IdealBasis::new(p, max.saturating_sub(1));
    let dimensions: Vec<(u32, usize, bool)> = caps
        .iter()
        .map(|&n| {
            let stab = b.killed_degree().is_some_and(|l| l < n as usize);
            (n, b.quotient_dimension_below(n as usize), stab)
        })
        .collect();
    let verdict = match b.killed_degree() {
        Some(_) => JacobiVerdict::Stabilized(b.quotient_dimension_below(b.surviving.len())),
        None => JacobiVerdict::GrowingThrough(max),
    };
    JacobiProbe { dimensions, verdict }
}

/// Result of [`rigidity_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub cap: u32,
    /// Every cycle of length `≤ cap` lies in `J + C` (modulo `𝔪^{cap+1}`).
    pub rigid_up_to_cap: bool,
    /// The quotient is certified finite, so the check covers all cycles.
    pub stabilized: bool,
    /// Canonical representatives of the failing rotation classes.
    pub witnesses: Vec<Path>,
}

impl RigidityReport {
    /// Rigidity certified: all cycles pass and the quotient is stabilized.
    pub fn is_certified_rigid(&self) -> bool {
        self.rigid_up_to_cap && self.stabilized
    }
}

/// Index of the canonical rotation of cycle `i`.
fn class_of(index: &PathIndex, i: u32) -> u32 {
    let arrows = index.arrows(i);
    let k = min_rotation_offset(&arrows);
    let mut rot = arrows[k..].to_vec();
    rot.extend_from_slice(&arrows[..k]);
    let start = if k == 0 { index.source(i) } else { index.arrow_ends[&arrows[k]].0 };
    index.extend_all(index.trivial(start), &rot).expect("rotation has the same length")
}

/// Checks every cycle of length `≤ cap` for membership in `J + C`, where `C` is
/// spanned by rotation differences.
///
/// A cycle `l` lies in `J + C` iff its rotation class lies in the image of
/// `J ∩ span(cycles)` under the map sending a cycle to its class; since the
/// generators are sums of parallel paths, `J ∩ span(cycles)` is spanned by the
/// basis rows supported on cycles. Failures at length `≤ cap` are genuine
/// non-memberships; with stabilization, passes are genuine memberships.
pub fn rigidity_certificate(p: &Iqp, cap: u32) -> RigidityReport {
    let basis = IdealBasis::new(p, cap);
    rigidity_from_basis(&basis)
}

/// [`rigidity_certificate`] from an existing basis.
pub fn rigidity_from_basis(basis: &IdealBasis) -> RigidityReport {
    let index = &basis.index;
    let mut classes = Echelon::default();
    for row in &basis.echelon.rows {
        let (s, t) = (index.source(row[0].0), index.target(row[0].0));
        if s != t {
            continue;
        }
        let mut v: Row = Vec::new();
        for (i, c) in row {
            if index.length(*i) == 0 {
                continue;
            }
            v.push((class_of(index, *i), c.clone()));
        }
        v.sort_by_key(|x| x.0);
        let mut merged: Row = Vec::new();
        for (i, c) in v {
            match merged.last_mut() {
                Some((j, d)) if *j == i => *d = &*d + &c,
                _ => merged.push((i, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        classes.insert(merged);
    }
    let mut witnesses = Vec::new();
    for l in 1..=basis.cap() as usize {
        for i in index.level(l) {
            let i = i as u32;
            if index.source(i) != index.target(i) || class_of(index, i) != i {
                continue;
            }
            if !classes.contains(vec![(i, Q::one())]) {
                witnesses.push(index.path(i));
            }
        }
    }
    RigidityReport {
        cap: basis.cap(),
        rigid_up_to_cap: witnesses.is_empty(),
        stabilized: basis.is_stabilized(),
        witnesses,
    }
}

/// Essential length of a cycle `l`: the smallest `m` with `l - ω^m ∈ J` for a
/// fundamental cycle `ω` through `l`'s base vertex (taken as the rotation of
/// `ω` starting there), together with that `ω`.
///
/// * If `l` is literally a power `ω^m`, that `m` is returned.
/// * If `l ∈ J` (it vanishes in the Jacobian algebra) the comparison with
///   powers is degenerate and `None` is returned: every sufficiently high power
///   vanishes too.
/// * Otherwise powers are tried in increasing `m`; `None` if no power matches.
///   Without a stabilized basis, powers beyond the cap raise `CapExceeded`.
pub fn essential_length(
    l: &Path,
    fundamental: &[Path],
    basis: &IdealBasis,
) -> Result<Option<(usize, Path)>, JacobianError> {
    let v = l.source();
    let mut candidates: Vec<Path> = Vec::new();
    for f in fundamental {
        for (k, &u) in f.vertices()[..f.len()].iter().enumerate() {
            if u == v {
                candidates.push(f.rotation(k));
            }
        }
    }
    for w in &candidates {
        if l.len().is_multiple_of(w.len()) && w.power(l.len() / w.len()).ok().as_ref() == Some(l) {
            return Ok(Some((l.len() / w.len(), w.clone())));
        }
    }
    let cap = basis.cap() as usize;
    let lp = PathSum::path(l.clone(), u32::MAX);
    if basis.is_in_ideal(&lp)? {
        return Ok(None);
    }
    let max_m = candidates.iter().map(|w| cap / w.len() + 1).max().unwrap_or(0);
    for m in 1..=max_m {
        for w in &candidates {
            if m * w.len() > cap + 1 && !basis.is_stabilized() {
                return Err(JacobianError::CapExceeded { needed: m * w.len(), cap: basis.cap() });
            }
            let wm = w.power(m).expect("cycle");
            let mut diff = lp.clone();
            diff.add_term(wm, -Q::one());
            if basis.is_in_ideal(&diff)? {
                return Ok(Some((m, w.clone())));
            }
        }
    }
    Ok(None)
}
