//! Truncated noncommutative path-algebra arithmetic.
//!
//! Paths are written right to left, so `αβ` means "first `β`, then `α`"; the
//! product `p·q` requires `s(p) = t(q)`. Internally a [`Path`] stores its
//! arrows in *traversal order* (first arrow first), the reverse of the written
//! order, together with the visited vertices. Every [`PathSum`] carries its
//! truncation degree `N`: terms longer than `N` are dropped, so a value
//! represents an element of the complete path algebra modulo `𝔪^{N+1}`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::quiver::{ArrowId, IcedQuiver, Vertex};
use crate::rational::Q;

/// Failures in path-algebra operations.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("arrows {first} and {second} are not composable")]
    NotComposable { first: ArrowId, second: ArrowId },
    #[error("unknown arrow id {0}")]
    UnknownArrow(ArrowId),
    #[error("empty arrow list")]
    Empty,
    #[error("path is not a cycle")]
    NotACycle,
    #[error("truncation caps differ ({0} vs {1})")]
    CapMismatch(u32, u32),
    #[error("substitution for arrow {0} is not parallel to it")]
    NotParallel(ArrowId),
}

/// A path: a trivial path `e_v` or a composable arrow sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    arrows: Vec<ArrowId>,
    /// `vertices[j]` is the vertex before arrow `j`; one more entry than arrows.
    vertices: Vec<Vertex>,
}

impl Path {
    /// The trivial path `e_v`.
    pub fn trivial(v: Vertex) -> Path {
        Path { arrows: Vec::new(), vertices: alloc::vec![v] }
    }

    /// A path from arrows listed in traversal order (first arrow first).
    pub fn from_traversal(q: &IcedQuiver, arrows: &[ArrowId]) -> Result<Path, PathError> {
        let first = *arrows.first().ok_or(PathError::Empty)?;
        let a0 = q.arrow(first).ok_or(PathError::UnknownArrow(first))?;
        let mut vertices = Vec::with_capacity(arrows.len() + 1);
        vertices.push(a0.source);
        vertices.push(a0.target);
        for w in arrows.windows(2) {
            let b = q.arrow(w[1]).ok_or(PathError::UnknownArrow(w[1]))?;
            if b.source != *vertices.last().unwrap() {
                return Err(PathError::NotComposable { first: w[0], second: w[1] });
            }
            vertices.push(b.target);
        }
        Ok(Path { arrows: arrows.to_vec(), vertices })
    }

    /// A path from arrows in written order (`α_r … α_1`, rightmost traversed first).
    pub fn from_written(q: &IcedQuiver, written: &[ArrowId]) -> Result<Path, PathError> {
        let mut t = written.to_vec();
        t.reverse();
        Path::from_traversal(q, &t)
    }

    /// Trusted constructor from traversal arrows and the visited vertices.
    pub(crate) fn from_raw(arrows: Vec<ArrowId>, vertices: Vec<Vertex>) -> Path {
        debug_assert_eq!(arrows.len() + 1, vertices.len());
        Path { arrows, vertices }
    }

    /// Arrows in traversal order.
    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }

    /// Visited vertices `s(p) = v_0, …, v_len = t(p)`.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Arrows in written (right-to-left) order.
    pub fn written(&self) -> Vec<ArrowId> {
        self.arrows.iter().rev().copied().collect()
    }

    /// Start vertex `s(p)`.
    pub fn source(&self) -> Vertex {
        self.vertices[0]
    }

    /// End vertex `t(p)`.
    pub fn target(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    /// Number of arrows.
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    /// True when the path has no arrows (same as [`Path::is_trivial`]).
    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// True for trivial paths.
    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// True when `s = t` and the path has at least one arrow.
    pub fn is_cycle(&self) -> bool {
        !self.arrows.is_empty() && self.source() == self.target()
    }

    /// Traverse `self`, then `next`; in written notation this is `next · self`.
    pub fn then(&self, next: &Path) -> Option<Path> {
        if self.target() != next.source() {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&next.arrows);
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&next.vertices[1..]);
        Some(Path { arrows, vertices })
    }

    /// The written product `self · rhs` (traverse `rhs` first).
    pub fn compose(&self, rhs: &Path) -> Option<Path> {
        rhs.then(self)
    }

    /// The subpath of arrows at traversal positions `range`.
    pub fn slice(&self, from: usize, to: usize) -> Path {
        Path { arrows: self.arrows[from..to].to_vec(), vertices: self.vertices[from..=to].to_vec() }
    }

    /// Number of occurrences of `a`.
    pub fn count(&self, a: ArrowId) -> usize {
        self.arrows.iter().filter(|&&x| x == a).count()
    }

    /// The cycle repeated `k ≥ 1` times.
    pub fn power(&self, k: usize) -> Result<Path, PathError> {
        if !self.is_cycle() || k == 0 {
            return Err(PathError::NotACycle);
        }
        let mut p = self.clone();
        for _ in 1..k {
            p = p.then(self).expect("cycle composes with itself");
        }
        Ok(p)
    }

    /// The rotation of a cycle whose first traversed arrow is the one at position `k`.
    pub fn rotation(&self, k: usize) -> Path {
        debug_assert!(self.is_cycle());
        let len = self.arrows.len();
        let mut arrows = Vec::with_capacity(len);
        arrows.extend_from_slice(&self.arrows[k..]);
        arrows.extend_from_slice(&self.arrows[..k]);
        let mut vertices = Vec::with_capacity(len + 1);
        vertices.extend_from_slice(&self.vertices[k..len]);
        vertices.extend_from_slice(&self.vertices[..=k]);
        Path { arrows, vertices }
    }

    /// All rotations of a cycle in order of starting position.
    pub fn rotations(&self) -> impl Iterator<Item = Path> + '_ {
        (0..self.arrows.len()).map(move |k| self.rotation(k))
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arrows.is_empty() {
            write!(f, "e{}", self.source())
        } else {
            f.write_str("(")?;
            for (i, a) in self.arrows.iter().rev().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Offset of the lexicographically minimal rotation of `seq`; the smallest such offset on ties.
pub(crate) fn min_rotation_offset<T: Ord>(seq: &[T]) -> usize {
    let n = seq.len();
    let mut best = 0;
    for k in 1..n {
        for j in 0..n {
            let a = &seq[(k + j) % n];
            let b = &seq[(best + j) % n];
            if a != b {
                if a < b {
                    best = k;
                }
                break;
            }
        }
    }
    best
}

/// The representative of a cycle's rotation class: the rotation whose
/// traversal-order id sequence is lexicographically minimal.
pub fn canonical_rotation(c: &Path) -> Result<Path, PathError> {
    if !c.is_cycle() {
        return Err(PathError::NotACycle);
    }
    Ok(c.rotation(min_rotation_offset(&c.arrows)))
}

/// True when two cycles are rotations of each other.
pub fn cyclically_equivalent(c1: &Path, c2: &Path) -> Result<bool, PathError> {
    Ok(canonical_rotation(c1)? == canonical_rotation(c2)?)
}

/// An exact linear combination of paths, truncated at degree `cap`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PathSum {
    cap: u32,
    terms: BTreeMap<Path, Q>,
}

impl PathSum {
    /// Zero at truncation degree `cap`.
    pub fn zero(cap: u32) -> PathSum {
        PathSum { cap, terms: BTreeMap::new() }
    }

    /// `c · p`, or zero when `p` is longer than the cap.
    pub fn term(p: Path, c: Q, cap: u32) -> PathSum {
        let mut s = PathSum::zero(cap);
        s.add_term(p, c);
        s
    }

    /// `1 · p`.
    pub fn path(p: Path, cap: u32) -> PathSum {
        PathSum::term(p, Q::one(), cap)
    }

    /// Truncation degree.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Terms in path order.
    pub fn terms(&self) -> impl Iterator<Item = (&Path, &Q)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no terms (same as [`PathSum::is_zero`]).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `p`.
    pub fn coeff(&self, p: &Path) -> Q {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    /// Adds `c · p`, dropping it if longer than the cap.
    pub fn add_term(&mut self, p: Path, c: Q) {
        if p.len() > self.cap as usize || c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// The same element at a smaller cap.
    pub fn truncate(&self, cap: u32) -> PathSum {
        let mut s = PathSum::zero(cap);
        for (p, c) in &self.terms {
            s.add_term(p.clone(), c.clone());
        }
        s
    }

    /// `λ · self`.
    pub fn scale(&self, l: &Q) -> PathSum {
        let mut s = PathSum::zero(self.cap);
        if !l.is_zero() {
            for (p, c) in &self.terms {
                s.terms.insert(p.clone(), c * l);
            }
        }
        s
    }

    /// Sum, failing when caps differ.
    pub fn checked_add(&self, other: &PathSum) -> Result<PathSum, PathError> {
        if self.cap != other.cap {
            return Err(PathError::CapMismatch(self.cap, other.cap));
        }
        let mut s = self.clone();
        for (p, c) in &other.terms {
            s.add_term(p.clone(), c.clone());
        }
        Ok(s)
    }

    /// Difference, failing when caps differ.
    pub fn checked_sub(&self, other: &PathSum) -> Result<PathSum, PathError> {
        self.checked_add(&other.scale(&-Q::one()))
    }

    /// Written product `self · other` (terms of `other` traversed first), failing when caps differ.
    pub fn checked_mul(&self, other: &PathSum) -> Result<PathSum, PathError> {
        if self.cap != other.cap {
            return Err(PathError::CapMismatch(self.cap, other.cap));
        }
        let mut s = PathSum::zero(self.cap);
        for (p, c) in &self.terms {
            for (r, d) in &other.terms {
                if p.len() + r.len() > self.cap as usize {
                    continue;
                }
                if let Some(pr) = r.then(p) {
                    s.add_term(pr, c * d);
                }
            }
        }
        Ok(s)
    }

    /// Smallest term length; `None` encodes `+∞` for zero.
    pub fn m_adic_order(&self) -> Option<usize> {
        self.terms.keys().map(Path::len).min()
    }

    /// Largest term length, 0 for zero.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }
}

impl Add for &PathSum {
    type Output = PathSum;
    /// # Panics
    /// Panics when caps differ.
    fn add(self, rhs: &PathSum) -> PathSum {
        self.checked_add(rhs).expect("adding path sums with different caps")
    }
}

impl Sub for &PathSum {
    type Output = PathSum;
    /// # Panics
    /// Panics when caps differ.
    fn sub(self, rhs: &PathSum) -> PathSum {
        self.checked_sub(rhs).expect("subtracting path sums with different caps")
    }
}

impl Mul for &PathSum {
    type Output = PathSum;
    /// # Panics
    /// Panics when caps differ.
    fn mul(self, rhs: &PathSum) -> PathSum {
        self.checked_mul(rhs).expect("multiplying path sums with different caps")
    }
}

impl Neg for &PathSum {
    type Output = PathSum;
    fn neg(self) -> PathSum {
        self.scale(&-Q::one())
    }
}

impl fmt::Debug for PathSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PathSum {
    /// Signed sum of written arrow-id sequences, e.g. `(3 2 1) - 1/2·(5 4)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}·")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// A potential: a truncated sum of cycles, each stored in canonical rotation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Potential(PathSum);

impl Potential {
    /// The zero potential.
    pub fn zero(cap: u32) -> Potential {
        Potential(PathSum::zero(cap))
    }

    /// Canonicalizes every term; fails on a non-cycle term.
    pub fn from_pathsum(x: &PathSum) -> Result<Potential, PathError> {
        let mut w = Potential::zero(x.cap());
        for (p, c) in x.terms() {
            w.add_cycle(p, c.clone())?;
        }
        Ok(w)
    }

    /// Adds `c · [l]`.
    pub fn add_cycle(&mut self, l: &Path, c: Q) -> Result<(), PathError> {
        let r = canonical_rotation(l)?;
        self.0.add_term(r, c);
        Ok(())
    }

    /// The underlying path sum.
    pub fn as_pathsum(&self) -> &PathSum {
        &self.0
    }

    /// Truncation degree.
    pub fn cap(&self) -> u32 {
        self.0.cap()
    }

    /// Terms as canonical cycles.
    pub fn terms(&self) -> impl Iterator<Item = (&Path, &Q)> {
        self.0.terms()
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when there are no terms (same as [`Potential::is_zero`]).
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coefficient of the rotation class of `l`.
    pub fn coeff(&self, l: &Path) -> Q {
        canonical_rotation(l).map(|r| self.0.coeff(&r)).unwrap_or_default()
    }

    /// Sum of potentials.
    pub fn checked_add(&self, other: &Potential) -> Result<Potential, PathError> {
        Ok(Potential(self.0.checked_add(&other.0)?))
    }

    /// `λ · W`.
    pub fn scale(&self, l: &Q) -> Potential {
        Potential(self.0.scale(l))
    }

    /// Same potential at a smaller cap.
    pub fn truncate(&self, cap: u32) -> Potential {
        Potential(self.0.truncate(cap))
    }

    /// The length of the longest cycle (GLS `long(W)`), 0 for zero.
    pub fn longest_cycle_len(&self) -> usize {
        self.0.max_len()
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Path) -> bool) -> Potential {
        let mut w = Potential::zero(self.cap());
        for (p, c) in self.terms() {
            if keep(p) {
                w.0.add_term(p.clone(), c.clone());
            }
        }
        w
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Cyclic derivative `∂_a W`: each occurrence `l = p a q` contributes `q p`
/// (traverse the rest of the cycle starting right after `a`).
pub fn cyclic_derivative(w: &Potential, a: ArrowId) -> PathSum {
    let mut out = PathSum::zero(w.cap());
    for (l, c) in w.terms() {
        for (k, &x) in l.arrows().iter().enumerate() {
            if x == a {
                let r = l.rotation((k + 1) % l.len());
                out.add_term(r.slice(0, l.len() - 1), c.clone());
            }
        }
    }
    out
}

/// A vertex-fixing algebra endomorphism given by arrow images.
///
/// Arrows without an explicit image are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    images: BTreeMap<ArrowId, PathSum>,
}

impl Endomorphism {
    /// The identity.
    pub fn identity() -> Endomorphism {
        Endomorphism { images: BTreeMap::new() }
    }

    /// Sets `φ(a) = image`; the image must be a sum of paths parallel to `a`.
    pub fn set(&mut self, q: &IcedQuiver, a: ArrowId, image: PathSum) -> Result<(), PathError> {
        let arrow = q.arrow(a).ok_or(PathError::UnknownArrow(a))?;
        for (p, _) in image.terms() {
            if p.is_trivial() || p.source() != arrow.source || p.target() != arrow.target {
                return Err(PathError::NotParallel(a));
            }
        }
        self.images.insert(a, image);
        Ok(())
    }

    /// Explicit arrow images.
    pub fn images(&self) -> impl Iterator<Item = (&ArrowId, &PathSum)> {
        self.images.iter()
    }

    /// The sign change `a ↦ -a`.
    pub fn sign_flip(q: &IcedQuiver, a: ArrowId) -> Result<Endomorphism, PathError> {
        let arrow = q.arrow(a).ok_or(PathError::UnknownArrow(a))?;
        let p = Path::from_raw(alloc::vec![a], alloc::vec![arrow.source, arrow.target]);
        let mut e = Endomorphism::identity();
        e.images.insert(a, PathSum::term(p, -Q::one(), u32::MAX));
        Ok(e)
    }

    /// Image of a single path at truncation `cap`.
    pub fn apply_path(&self, p: &Path, cap: u32) -> PathSum {
        let mut acc = PathSum::path(Path::trivial(p.source()), cap);
        for (k, &a) in p.arrows().iter().enumerate() {
            let img = match self.images.get(&a) {
                Some(img) => img.truncate(cap),
                None => PathSum::path(p.slice(k, k + 1), cap),
            };
            acc = &img * &acc;
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Image of `x` at truncation `cap`.
    pub fn apply(&self, x: &PathSum, cap: u32) -> PathSum {
        let mut out = PathSum::zero(cap);
        for (p, c) in x.terms() {
            let img = self.apply_path(p, cap);
            for (r, d) in img.terms() {
                out.add_term(r.clone(), d * c);
            }
        }
        out
    }

    /// Image of a potential, re-canonicalized.
    pub fn apply_potential(&self, w: &Potential) -> Potential {
        let img = self.apply(w.as_pathsum(), w.cap());
        Potential::from_pathsum(&img).expect("parallel substitutions map cycles to cycles")
    }
}

/// `φ(x)` truncated at `cap`.
pub fn apply_endomorphism(phi: &Endomorphism, x: &PathSum, cap: u32) -> PathSum {
    phi.apply(x, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> IcedQuiver {
        // α:1→2, β:2→3, γ:3→1
        IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap()
    }

    #[test]
    fn canonical_rotation_is_lex_minimal() {
        let q = triangle();
        let c = Path::from_traversal(&q, &[2, 3, 1]).unwrap();
        let r = canonical_rotation(&c).unwrap();
        assert_eq!(r.arrows(), &[1, 2, 3]);
        assert_eq!(r.source(), 1);
        assert_eq!(canonical_rotation(&Path::from_traversal(&q, &[1, 2]).unwrap()), Err(PathError::NotACycle));
    }

    #[test]
    fn periodic_rotation_picks_smallest_offset() {
        assert_eq!(min_rotation_offset(&[1, 2, 1, 2]), 0);
        assert_eq!(min_rotation_offset(&[2, 1, 2, 1]), 1);
    }

    #[test]
    fn derivative_of_triangle() {
        let q = triangle();
        let mut w = Potential::zero(5);
        w.add_cycle(&Path::from_traversal(&q, &[1, 2, 3]).unwrap(), Q::one()).unwrap();
        // ∂_γ(γβα) = βα: traverse α then β.
        let d = cyclic_derivative(&w, 3);
        assert_eq!(d.len(), 1);
        assert_eq!(d.terms().next().unwrap().0.arrows(), &[1, 2]);
        assert!(cyclic_derivative(&w, 99).is_zero());
    }

    #[test]
    fn product_respects_cap_and_composability() {
        let q = triangle();
        let a = PathSum::path(Path::from_traversal(&q, &[1]).unwrap(), 1);
        let b = PathSum::path(Path::from_traversal(&q, &[2]).unwrap(), 1);
        assert!((&b * &a).is_zero(), "length 2 exceeds cap 1");
        let a2 = a.truncate(2);
        let b2 = b.truncate(2);
        assert_eq!((&b2 * &a2).len(), 1);
        assert!((&a2 * &b2).is_zero(), "α·β needs t(β) = s(α)");
    }
}
