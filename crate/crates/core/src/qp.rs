//! Iced quivers with potentials: pre-mutation, splitting, mutation, direct sums
//! and equivalence of potentials up to arrow sign changes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use thiserror::Error;

use crate::path::{canonical_rotation, cyclic_derivative, Endomorphism, Path, PathError, PathSum, Potential};
use crate::quiver::{ArrowId, IcedQuiver, QuiverError, QuiverPremutation, Vertex};
use crate::rational::Q;

/// Failures of IQP construction, mutation and reduction.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QpError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("potential term {0} uses only external arrows")]
    TermWithoutUnexternalArrow(Path),
    #[error("potential term {0} does not match the quiver's arrows")]
    TermNotInQuiver(Path),
    #[error("reduction still changing terms at degree {degree} when the cap {cap} was reached")]
    CapTooSmall { degree: usize, cap: u32 },
    #[error("vertex sets differ")]
    VertexMismatch,
    #[error("computation cancelled")]
    Cancelled,
}

/// A cooperative cancellation flag for long-running reductions.
#[derive(Debug, Default)]
pub struct CancelToken(AtomicBool);

impl CancelToken {
    /// A fresh, unset token.
    pub fn new() -> CancelToken {
        CancelToken(AtomicBool::new(false))
    }

    /// Requests cancellation.
    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    /// True once cancellation was requested.
    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

fn check_cancel(token: Option<&CancelToken>) -> Result<(), QpError> {
    match token {
        Some(t) if t.is_cancelled() => Err(QpError::Cancelled),
        _ => Ok(()),
    }
}

/// An iced quiver with potential `(Q, F, W)`, truncated at the potential's cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iqp {
    quiver: IcedQuiver,
    potential: Potential,
}

fn term_matches_quiver(q: &IcedQuiver, p: &Path) -> bool {
    p.arrows().iter().enumerate().all(|(k, &a)| {
        q.arrow(a)
            .is_some_and(|x| x.source == p.vertices()[k] && x.target == p.vertices()[k + 1])
    })
}

impl Iqp {
    /// Pairs a quiver with a potential, checking that every term is a cycle of
    /// the quiver containing at least one unexternal arrow.
    pub fn new(quiver: IcedQuiver, potential: Potential) -> Result<Iqp, QpError> {
        for (p, _) in potential.terms() {
            if !term_matches_quiver(&quiver, p) {
                return Err(QpError::TermNotInQuiver(p.clone()));
            }
            if !p.arrows().iter().any(|&a| quiver.is_unexternal(a)) {
                return Err(QpError::TermWithoutUnexternalArrow(p.clone()));
            }
        }
        Ok(Iqp { quiver, potential })
    }

    /// Like [`Iqp::new`] but admits terms made only of external arrows; such
    /// terms occur transiently in pre-mutations (a composite closing a 2-cycle
    /// with an external arrow) and are removed by [`split`].
    pub fn new_transient(quiver: IcedQuiver, potential: Potential) -> Result<Iqp, QpError> {
        for (p, _) in potential.terms() {
            if !term_matches_quiver(&quiver, p) {
                return Err(QpError::TermNotInQuiver(p.clone()));
            }
        }
        Ok(Iqp { quiver, potential })
    }

    /// The quiver.
    pub fn quiver(&self) -> &IcedQuiver {
        &self.quiver
    }

    /// The potential.
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Truncation degree.
    pub fn cap(&self) -> u32 {
        self.potential.cap()
    }

    /// Same IQP at another truncation degree (terms beyond it are dropped).
    pub fn with_cap(&self, cap: u32) -> Iqp {
        let mut w = Potential::zero(cap);
        for (p, c) in self.potential.terms() {
            w.add_cycle(p, c.clone()).expect("terms are cycles");
        }
        Iqp { quiver: self.quiver.clone(), potential: w }
    }
}

/// Renames arrows of a path through `f` (endpoints unchanged).
pub(crate) fn rename_path(p: &Path, f: &impl Fn(ArrowId) -> ArrowId) -> Path {
    Path::from_raw(p.arrows().iter().map(|&a| f(a)).collect(), p.vertices().to_vec())
}

/// Renames arrows of a potential through `f`, re-canonicalizing.
pub fn rename_potential(w: &Potential, f: impl Fn(ArrowId) -> ArrowId) -> Potential {
    let mut out = Potential::zero(w.cap());
    for (p, c) in w.terms() {
        out.add_cycle(&rename_path(p, &f), c.clone()).expect("renaming keeps cycles");
    }
    out
}

/// Pre-mutation `μ̃_i`: composites `[αβ]` replace every passage `β` then `α`
/// through `i` in `W` (giving `W̃₁`), and `W̃₂ = Σ [αβ]β*α*` is added.
pub fn premutate(p: &Iqp, i: Vertex) -> Result<(Iqp, QuiverPremutation), QpError> {
    let pre = p.quiver.premutation(i)?;
    let composite: BTreeMap<(ArrowId, ArrowId), ArrowId> =
        pre.composites.iter().map(|c| ((c.outer, c.inner), c.id)).collect();
    let mut w = Potential::zero(p.cap());
    for (l, c) in p.potential.terms() {
        let len = l.len();
        let start = (0..len).find(|&k| l.vertices()[k] != i).expect("no loops at i");
        let r = l.rotation(start);
        let mut arrows = Vec::with_capacity(len);
        let mut vertices = vec![r.source()];
        let mut k = 0;
        while k < len {
            let a = r.arrows()[k];
            if r.vertices()[k + 1] == i {
                let b = r.arrows()[k + 1];
                arrows.push(composite[&(b, a)]);
                vertices.push(r.vertices()[k + 2]);
                k += 2;
            } else {
                arrows.push(a);
                vertices.push(r.vertices()[k + 1]);
                k += 1;
            }
        }
        w.add_cycle(&Path::from_raw(arrows, vertices), c.clone())?;
    }
    for comp in &pre.composites {
        let alpha = p.quiver.get(comp.outer)?;
        let beta = p.quiver.get(comp.inner)?;
        let alpha_star = pre.star(comp.outer).expect("star exists");
        let beta_star = pre.star(comp.inner).expect("star exists");
        let cyc = Path::from_raw(
            vec![alpha_star, beta_star, comp.id],
            vec![alpha.target, i, beta.source, alpha.target],
        );
        w.add_cycle(&cyc, Q::one())?;
    }
    Ok((Iqp::new_transient(pre.quiver.clone(), w)?, pre))
}

/// One elementary right-equivalence recorded during reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TranscriptStep {
    /// `a ↦ -a`.
    SignFlip(ArrowId),
    /// `a ↦ a + Σ λ a'` with `a'` parallel arrows, used to diagonalize the quadratic part.
    LinearChange { arrow: ArrowId, image: PathSum },
    /// Simultaneous `a ↦ a + (terms of degree ≥ 2)`.
    Unitriangular(Endomorphism),
}

/// The ordered list of maps witnessing `W ≃ W_triv ⊕ W_red`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivalenceTranscript {
    pub steps: Vec<TranscriptStep>,
}

impl EquivalenceTranscript {
    /// Applies every step in order to `w` inside quiver `q`.
    pub fn replay(&self, q: &IcedQuiver, w: &Potential) -> Result<Potential, QpError> {
        let mut w = w.clone();
        for step in &self.steps {
            let phi = match step {
                TranscriptStep::SignFlip(a) => Endomorphism::sign_flip(q, *a)?,
                TranscriptStep::LinearChange { arrow, image } => {
                    let mut e = Endomorphism::identity();
                    e.set(q, *arrow, image.clone())?;
                    e
                }
                TranscriptStep::Unitriangular(e) => e.clone(),
            };
            w = phi.apply_potential(&w);
        }
        Ok(w)
    }
}

/// Result of [`split`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub trivial: Iqp,
    pub reduced: Iqp,
    pub transcript: EquivalenceTranscript,
}

fn arrow_path(q: &IcedQuiver, a: ArrowId) -> Path {
    Path::from_traversal(q, &[a]).expect("arrow exists")
}

/// Splits an IQP into a trivial and a reduced part (the splitting theorem made effective).
pub fn split(p: &Iqp) -> Result<Split, QpError> {
    split_with(p, None)
}

/// [`split`] with a cooperative cancellation token.
pub fn split_with(p: &Iqp, cancel: Option<&CancelToken>) -> Result<Split, QpError> {
    let q = &p.quiver;
    let cap = p.cap();
    let mut w = p.potential.clone();
    let mut steps = Vec::new();
    let mut pairs: Vec<(ArrowId, ArrowId, Q)> = Vec::new();
    let mut used: BTreeSet<ArrowId> = BTreeSet::new();

    // (a) Diagonalize the quadratic part, pivoting on the smallest arrow ids.
    loop {
        check_cancel(cancel)?;
        let pivot = w
            .terms()
            .filter(|(l, _)| l.len() == 2 && !l.arrows().iter().any(|a| used.contains(a)))
            .map(|(l, c)| (l.arrows()[0].min(l.arrows()[1]), l.arrows()[0].max(l.arrows()[1]), c.clone()))
            .min_by_key(|t| (t.0, t.1));
        let Some((a, b, c)) = pivot else { break };
        for (moving, partner) in [(a, b), (b, a)] {
            // Clear every other quadratic term containing `partner`.
            let mut image = PathSum::path(arrow_path(q, moving), cap);
            let mut changed = false;
            for (l, c2) in w.terms() {
                if l.len() != 2 || !l.arrows().contains(&partner) {
                    continue;
                }
                let other = if l.arrows()[0] == partner { l.arrows()[1] } else { l.arrows()[0] };
                if other == moving {
                    continue;
                }
                image.add_term(arrow_path(q, other), -(c2 / &c));
                changed = true;
            }
            if changed {
                let mut e = Endomorphism::identity();
                e.set(q, moving, image.clone())?;
                w = e.apply_potential(&w);
                steps.push(TranscriptStep::LinearChange { arrow: moving, image });
            }
        }
        used.insert(a);
        used.insert(b);
        pairs.push((a, b, c));
    }

    // (b) Unitriangular elimination of pair arrows from all higher terms.
    let mut trivial_w = Potential::zero(cap);
    for (a, b, c) in &pairs {
        let cyc = arrow_path(q, *a).then(&arrow_path(q, *b)).expect("2-cycle");
        trivial_w.add_cycle(&cyc, c.clone()).expect("cycle");
    }
    let mut clean = false;
    for _pass in 0..=cap + 1 {
        check_cancel(cancel)?;
        let rest = w.checked_add(&trivial_w.scale(&-Q::one()))?;
        let dirty: Option<usize> = rest
            .terms()
            .filter(|(l, _)| l.arrows().iter().any(|x| used.contains(x)))
            .map(|(l, _)| l.len())
            .min();
        if dirty.is_none() {
            clean = true;
            w = rest;
            break;
        }
        let mut e = Endomorphism::identity();
        for (a, b, c) in &pairs {
            let da = cyclic_derivative(&rest, *a);
            let db = cyclic_derivative(&rest, *b);
            let inv = -c.recip();
            if !db.is_zero() {
                e.set(q, *a, &PathSum::path(arrow_path(q, *a), cap) + &db.scale(&inv))?;
            }
            if !da.is_zero() {
                e.set(q, *b, &PathSum::path(arrow_path(q, *b), cap) + &da.scale(&inv))?;
            }
        }
        w = e.apply_potential(&w);
        steps.push(TranscriptStep::Unitriangular(e));
    }
    if !clean {
        let rest = w.checked_add(&trivial_w.scale(&-Q::one()))?;
        let degree = rest
            .terms()
            .filter(|(l, _)| l.arrows().iter().any(|x| used.contains(x)))
            .map(|(l, _)| l.len())
            .min()
            .unwrap_or(0);
        return Err(QpError::CapTooSmall { degree, cap });
    }

    let mut tq = q.clone();
    tq.retain_arrows(|x| used.contains(&x.id));
    let mut rq = q.clone();
    rq.retain_arrows(|x| !used.contains(&x.id));
    Ok(Split {
        trivial: Iqp::new_transient(tq, trivial_w)?,
        reduced: Iqp::new(rq, w)?,
        transcript: EquivalenceTranscript { steps },
    })
}

/// Mutation of an IQP: the reduced part of its pre-mutation.
pub fn mutate(p: &Iqp, i: Vertex) -> Result<Iqp, QpError> {
    mutate_with(p, i, None)
}

/// [`mutate`] with a cooperative cancellation token.
pub fn mutate_with(p: &Iqp, i: Vertex, cancel: Option<&CancelToken>) -> Result<Iqp, QpError> {
    let (pre, _) = premutate(p, i)?;
    Ok(split_with(&pre, cancel)?.reduced)
}

/// Direct sum over a common vertex set. Arrows of `b` whose ids collide with
/// `a` are renumbered, in increasing old-id order, from the first id unused by either.
pub fn direct_sum(a: &Iqp, b: &Iqp) -> Result<Iqp, QpError> {
    if a.quiver.n_exchangeable() != b.quiver.n_exchangeable() || a.quiver.n_frozen() != b.quiver.n_frozen() {
        return Err(QpError::VertexMismatch);
    }
    if a.cap() != b.cap() {
        return Err(PathError::CapMismatch(a.cap(), b.cap()).into());
    }
    let mut next = a.quiver.next_id().max(b.quiver.next_id());
    let mut rename = BTreeMap::new();
    for x in b.quiver.arrows() {
        if a.quiver.arrow(x.id).is_some() {
            rename.insert(x.id, next);
            next += 1;
        }
    }
    let f = |id: ArrowId| *rename.get(&id).unwrap_or(&id);
    let arrows = a
        .quiver
        .arrows()
        .iter()
        .map(|x| (x.id, x.source, x.target))
        .chain(b.quiver.arrows().iter().map(|x| (f(x.id), x.source, x.target)));
    let mut q = IcedQuiver::new(a.quiver.n_exchangeable(), a.quiver.n_frozen(), arrows)?;
    q.reserve_ids(next);
    let w = a.potential.checked_add(&rename_potential(&b.potential, f))?;
    Iqp::new_transient(q, w)
}

/// True when every term has an unexternal arrow and every cyclic derivative
/// along an unexternal arrow has order at least 2.
pub fn is_reduced(p: &Iqp) -> bool {
    let q = &p.quiver;
    p.potential.terms().all(|(l, _)| l.arrows().iter().any(|&a| q.is_unexternal(a)))
        && q.arrows().iter().filter(|a| q.is_unexternal(a.id)).all(|a| {
            cyclic_derivative(&p.potential, a.id).m_adic_order().is_none_or(|o| o >= 2)
        })
}

/// Searches for signs `ξ(a) ∈ {±1}` with `ξ(W1) = W2` modulo cyclic equivalence.
///
/// Returns the sign of every arrow of `q` (free choices set to `+1`), or `None`
/// if supports differ, some coefficient ratio is not `±1`, or the system over
/// the two-element field is inconsistent.
pub fn equivalent_up_to_signs(w1: &Potential, w2: &Potential, q: &IcedQuiver) -> Option<BTreeMap<ArrowId, i8>> {
    if w1.len() != w2.len() {
        return None;
    }
    let ids: Vec<ArrowId> = q.arrows().iter().map(|a| a.id).collect();
    let col: BTreeMap<ArrowId, usize> = ids.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let words = ids.len().div_ceil(64) + 1; // last word holds the right-hand side
    let rhs_bit = ids.len();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (l, c1) in w1.terms() {
        let c2 = w2.as_pathsum().coeff(l);
        if c2.is_zero() {
            return None;
        }
        let ratio = &c2 / c1;
        let flip = if ratio == Q::one() {
            false
        } else if ratio == -Q::one() {
            true
        } else {
            return None;
        };
        let mut row = vec![0u64; words + 1];
        for a in l.arrows() {
            let j = *col.get(a)?;
            row[j / 64] ^= 1 << (j % 64);
        }
        if flip {
            row[rhs_bit / 64] ^= 1 << (rhs_bit % 64);
        }
        rows.push(row);
    }
    // Gaussian elimination over GF(2).
    let bit = |r: &Vec<u64>, j: usize| (r[j / 64] >> (j % 64)) & 1 == 1;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for j in 0..ids.len() {
        let Some(pr) = (rank..rows.len()).find(|&r| bit(&rows[r], j)) else { continue };
        rows.swap(rank, pr);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && bit(row, j) {
                for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x ^= *y;
                }
            }
        }
        pivots.push((rank, j));
        rank += 1;
    }
    if rows[rank..].iter().any(|r| bit(r, rhs_bit)) {
        return None;
    }
    let mut xi: BTreeMap<ArrowId, i8> = ids.iter().map(|&a| (a, 1)).collect();
    for (r, j) in pivots {
        if bit(&rows[r], rhs_bit) {
            xi.insert(ids[j], -1);
        }
    }
    Some(xi)
}

/// Applies the sign map `ξ` to `w`.
pub fn apply_signs(w: &Potential, xi: &BTreeMap<ArrowId, i8>) -> Potential {
    let mut out = Potential::zero(w.cap());
    for (l, c) in w.terms() {
        let neg = l.arrows().iter().filter(|a| xi.get(a) == Some(&-1)).count() % 2 == 1;
        out.add_cycle(l, if neg { -c } else { c.clone() }).expect("cycle");
    }
    out
}

/// Induced cycles (full subquivers that are exactly one simple cycle) with no
/// cyclically equivalent term in the potential.
pub fn check_induced_cycle_condition(p: &Iqp) -> Vec<Path> {
    let q = &p.quiver;
    let nv = q.n_vertices() as usize;
    let mut between = vec![vec![0u32; nv + 1]; nv + 1];
    for a in q.arrows() {
        between[a.source as usize][a.target as usize] += 1;
    }
    let mut violations = Vec::new();
    // Simple cycles are enumerated once each, from their smallest vertex.
    for s in 1..=nv {
        let mut stack: Vec<(Vec<Vertex>, Vec<ArrowId>)> = vec![(vec![s as Vertex], vec![])];
        while let Some((vs, arrs)) = stack.pop() {
            let last = *vs.last().unwrap();
            for a in q.out_arrows(last) {
                let v = a.target;
                let mut nvs = vs.clone();
                nvs.push(v);
                let mut narr = arrs.clone();
                narr.push(a.id);
                if v as usize == s {
                    let induced_arrows: u32 =
                        vs.iter().flat_map(|&x| vs.iter().map(move |&y| (x, y))).map(|(x, y)| between[x as usize][y as usize]).sum();
                    if induced_arrows as usize == vs.len() {
                        let c = canonical_rotation(&Path::from_raw(narr, nvs)).expect("cycle");
                        if p.potential.coeff(&c).is_zero() {
                            violations.push(c);
                        }
                    }
                } else if v as usize > s && !vs.contains(&v) {
                    stack.push((nvs, narr));
                }
            }
        }
    }
    violations.sort();
    violations.dedup();
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    /// α:1→2, β:2→3, γ:3→1 with W = γβα.
    fn triangle_qp(cap: u32) -> Iqp {
        let q = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap();
        let mut w = Potential::zero(cap);
        w.add_cycle(&Path::from_traversal(&q, &[1, 2, 3]).unwrap(), Q::one()).unwrap();
        Iqp::new(q, w).unwrap()
    }

    #[test]
    fn premutation_of_triangle() {
        let (p, pre) = premutate(&triangle_qp(6), 2).unwrap();
        // [βα] = 4 : 1→3; α* = 5 : 2→1; β* = 6 : 3→2.
        assert_eq!(pre.composite(2, 1), Some(4));
        assert_eq!(pre.star(1), Some(5));
        assert_eq!(pre.star(2), Some(6));
        let q = p.quiver();
        let expected_terms = [
            Path::from_written(q, &[3, 4]).unwrap(),    // γ[βα]
            Path::from_written(q, &[4, 5, 6]).unwrap(), // [βα]α*β*
        ];
        assert_eq!(p.potential().len(), 2);
        for t in &expected_terms {
            assert_eq!(p.potential().coeff(t), Q::one());
        }
    }

    #[test]
    fn mutation_of_triangle_is_path() {
        let m = mutate(&triangle_qp(6), 2).unwrap();
        assert!(m.potential().is_zero());
        assert_eq!(m.quiver().arrow_multiset(), vec![(2, 1), (3, 2)]);
    }

    #[test]
    fn split_of_reduced_is_identity() {
        let p = triangle_qp(6);
        let s = split(&p).unwrap();
        assert_eq!(s.reduced, p);
        assert!(s.transcript.steps.is_empty());
        assert!(s.trivial.quiver().arrows().is_empty());
    }

    #[test]
    fn signs_of_single_term() {
        let p = triangle_qp(6);
        let neg = p.potential().scale(&-Q::one());
        let xi = equivalent_up_to_signs(p.potential(), &neg, p.quiver()).unwrap();
        assert_eq!(apply_signs(p.potential(), &xi), neg);
        assert_eq!(xi.values().filter(|&&s| s == -1).count(), 1);
    }

    #[test]
    fn induced_cycle_condition_on_triangle() {
        assert!(check_induced_cycle_condition(&triangle_qp(6)).is_empty());
        let p = triangle_qp(6);
        let empty = Iqp::new(p.quiver().clone(), Potential::zero(6)).unwrap();
        assert_eq!(check_induced_cycle_condition(&empty).len(), 1);
    }
}
