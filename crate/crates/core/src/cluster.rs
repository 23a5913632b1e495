//! Seeds, exchange relations and exchange-graph exploration.
//!
//! Cluster variables are kept as Laurent polynomials with integer
//! coefficients in the initial variables `x_1, …, x_{n+m}`. By the Laurent
//! phenomenon every cluster variable has this form, so each mutation is an
//! exact division in the Laurent polynomial ring; a failed division is
//! reported as [`ClusterError::NotLaurent`]. The representation is a normal
//! form, so seeds can be compared structurally.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::quiver::{IcedQuiver, QuiverError, Vertex};
use crate::rational::Q;

/// Failures of seed mutation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("exchange at vertex {0} did not produce a Laurent polynomial")]
    NotLaurent(Vertex),
}

/// A Laurent polynomial with integer coefficients: exponent vector (one entry
/// per initial variable, possibly negative) to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Laurent {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, BigInt>,
}

impl Laurent {
    /// The constant `c`.
    pub fn constant(nvars: usize, c: i64) -> Laurent {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(vec![0; nvars], BigInt::from(c));
        }
        Laurent { nvars, terms }
    }

    /// The initial variable `x_v` (1-based).
    pub fn variable(nvars: usize, v: usize) -> Laurent {
        let mut e = vec![0; nvars];
        e[v - 1] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigInt::one());
        Laurent { nvars, terms }
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms, by exponent vector.
    pub fn terms(&self) -> &BTreeMap<Vec<i32>, BigInt> {
        &self.terms
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is positive.
    pub fn has_positive_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// True when the polynomial is a single monomial with coefficient one.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|c| c.is_one())
    }

    /// Sum.
    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Laurent { nvars: self.nvars, terms }
    }

    /// Product.
    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut terms: BTreeMap<Vec<i32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e.clone()).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        Laurent { nvars: self.nvars, terms }
    }

    fn min_exponents(&self) -> Vec<i32> {
        let mut m = vec![i32::MAX; self.nvars];
        for e in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    fn shift(&self, by: &[i32]) -> Laurent {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        Laurent { nvars: self.nvars, terms }
    }

    /// Exact quotient `self / d` in the Laurent polynomial ring, if it exists.
    ///
    /// Monomial content is split off, then polynomial long division is run in
    /// lexicographic order; a nonzero remainder means the quotient is not a
    /// Laurent polynomial.
    pub fn checked_div(&self, d: &Laurent) -> Option<Laurent> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let (ma, md) = (self.min_exponents(), d.min_exponents());
        let a = self.shift(&ma.iter().map(|x| -x).collect::<Vec<_>>());
        let dd = d.shift(&md.iter().map(|x| -x).collect::<Vec<_>>());
        let (lead_e, lead_c) = dd.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = a;
        let mut quot = Laurent { nvars: self.nvars, terms: BTreeMap::new() };
        while let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead_e).any(|(x, y)| x < y) {
                return None;
            }
            let (qc, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return None;
            }
            let qe: Vec<i32> = e.iter().zip(&lead_e).map(|(x, y)| x - y).collect();
            let mut mono = BTreeMap::new();
            mono.insert(qe, qc);
            let mono = Laurent { nvars: self.nvars, terms: mono };
            rem = rem.add(&mono.mul(&dd).scale(-1));
            quot = quot.add(&mono);
        }
        let back: Vec<i32> = ma.iter().zip(&md).map(|(a, b)| a - b).collect();
        Some(quot.shift(&back))
    }

    fn scale(&self, c: i64) -> Laurent {
        let c = BigInt::from(c);
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * &c)).collect();
        Laurent { nvars: self.nvars, terms }
    }

    /// Evaluation at a point with nonzero rational coordinates.
    pub fn eval(&self, point: &[Q]) -> Q {
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut t = Q::from_bigints(c.clone(), BigInt::one());
            for (x, &k) in point.iter().zip(e) {
                let base = if k < 0 { x.recip() } else { x.clone() };
                for _ in 0..k.unsigned_abs() {
                    t = &t * &base;
                }
            }
            total = &total + &t;
        }
        total
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            let constant = e.iter().all(|&x| x == 0);
            if !a.is_one() || constant {
                write!(f, "{a}")?;
            }
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "x{}", v + 1)?,
                    _ => write!(f, "x{}^{}", v + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// How frozen vertices carry variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// Frozen variables are the indeterminates `x_{n+1}, …, x_{n+m}`.
    Geometric,
    /// Frozen variables are set to `1`.
    Trivial,
}

/// A seed: an iced quiver with one cluster variable per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    quiver: IcedQuiver,
    variables: Vec<Laurent>,
}

impl Seed {
    /// The initial seed of `q`: `x_v` at every vertex, or `1` at frozen
    /// vertices with trivial coefficients.
    pub fn initial(q: &IcedQuiver, coefficients: Coefficients) -> Seed {
        let nv = q.n_vertices() as usize;
        let variables = (1..=nv)
            .map(|v| match coefficients {
                Coefficients::Trivial if q.is_frozen(v as Vertex) => Laurent::constant(nv, 1),
                _ => Laurent::variable(nv, v),
            })
            .collect();
        Seed { quiver: q.clone(), variables }
    }

    /// The quiver.
    pub fn quiver(&self) -> &IcedQuiver {
        &self.quiver
    }

    /// Variables, index `v - 1`.
    pub fn variables(&self) -> &[Laurent] {
        &self.variables
    }

    /// Variable at vertex `v`.
    pub fn variable(&self, v: Vertex) -> &Laurent {
        &self.variables[v as usize - 1]
    }

    /// The cluster: the exchangeable variables as a set.
    pub fn cluster(&self) -> BTreeSet<Laurent> {
        self.variables[..self.quiver.n_exchangeable() as usize].iter().cloned().collect()
    }

    /// Equality of variables and of quivers up to arrow ids.
    pub fn same_up_to_ids(&self, other: &Seed) -> bool {
        self.variables == other.variables && self.quiver.same_up_to_ids(&other.quiver)
    }

    /// The two monomials of the exchange relation at `i`: the product over
    /// arrows leaving `i` of their targets and over arrows entering `i` of
    /// their sources.
    pub fn exchange_monomials(&self, i: Vertex) -> (Laurent, Laurent) {
        let nv = self.variables.len();
        let mut out = Laurent::constant(nv, 1);
        for a in self.quiver.out_arrows(i) {
            out = out.mul(self.variable(a.target));
        }
        let mut inn = Laurent::constant(nv, 1);
        for a in self.quiver.in_arrows(i) {
            inn = inn.mul(self.variable(a.source));
        }
        (out, inn)
    }
}

/// Seed mutation at the exchangeable vertex `i`.
pub fn mutate_seed(s: &Seed, i: Vertex) -> Result<Seed, ClusterError> {
    let quiver = s.quiver.mutate_quiver(i)?;
    let (out, inn) = s.exchange_monomials(i);
    let new = out.add(&inn).checked_div(s.variable(i)).ok_or(ClusterError::NotLaurent(i))?;
    let mut variables = s.variables.clone();
    variables[i as usize - 1] = new;
    Ok(Seed { quiver, variables })
}

/// True when every mutation along `path` succeeds with Laurent variables.
pub fn laurent_check(s0: &Seed, path: &[Vertex]) -> bool {
    let mut s = s0.clone();
    for &i in path {
        match mutate_seed(&s, i) {
            Ok(t) => s = t,
            Err(_) => return false,
        }
    }
    true
}

/// Summary of a bounded exchange-graph search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeGraphReport {
    /// Number of seeds if the search closed within the bound.
    pub seed_count: Option<usize>,
    /// Seeds discovered (at most the bound).
    pub seeds_seen: usize,
    /// Distinct exchangeable cluster variables among the discovered seeds.
    pub cluster_variables: usize,
    /// Largest breadth-first distance from the initial seed.
    pub max_depth: usize,
    /// Quiver isomorphism classes (frozen vertices fixed) among discovered seeds.
    pub quiver_classes: usize,
}

/// Breadth-first exploration of the exchange graph; seeds are identified by
/// their clusters (unordered sets of exchangeable variables).
pub fn explore_exchange_graph(s: &Seed, max_seeds: usize) -> Result<ExchangeGraphReport, ClusterError> {
    let mut seen: BTreeMap<BTreeSet<Laurent>, usize> = BTreeMap::new();
    let mut seeds: Vec<Seed> = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(s.cluster(), 0);
    seeds.push(s.clone());
    queue.push_back((0usize, 0usize));
    let mut max_depth = 0;
    let mut closed = true;
    while let Some((idx, depth)) = queue.pop_front() {
        max_depth = max_depth.max(depth);
        for i in 1..=s.quiver.n_exchangeable() {
            let t = mutate_seed(&seeds[idx], i)?;
            let key = t.cluster();
            if seen.contains_key(&key) {
                continue;
            }
            if seeds.len() >= max_seeds {
                closed = false;
                break;
            }
            seen.insert(key, seeds.len());
            queue.push_back((seeds.len(), depth + 1));
            seeds.push(t);
        }
        if !closed {
            break;
        }
    }
    let nx = s.quiver.n_exchangeable() as usize;
    let variables: BTreeSet<&Laurent> = seeds.iter().flat_map(|t| t.variables[..nx].iter()).collect();
    let mut classes: Vec<&IcedQuiver> = Vec::new();
    for t in &seeds {
        if !classes.iter().any(|c| c.are_isomorphic(&t.quiver, true).is_some()) {
            classes.push(&t.quiver);
        }
    }
    Ok(ExchangeGraphReport {
        seed_count: closed.then_some(seeds.len()),
        seeds_seen: seeds.len(),
        cluster_variables: variables.len(),
        max_depth,
        quiver_classes: classes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_exchange() {
        let q = IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap();
        let s = Seed::initial(&q, Coefficients::Trivial);
        let t = mutate_seed(&s, 1).unwrap();
        // (x2 + 1) / x1
        let expect = Laurent::variable(2, 2)
            .add(&Laurent::constant(2, 1))
            .checked_div(&Laurent::variable(2, 1))
            .unwrap();
        assert_eq!(t.variable(1), &expect);
        assert!(mutate_seed(&t, 1).unwrap().same_up_to_ids(&s));
    }

    #[test]
    fn division_detects_non_laurent() {
        let x = Laurent::variable(2, 1);
        let one_plus_x = x.add(&Laurent::constant(2, 1));
        assert!(Laurent::constant(2, 1).checked_div(&one_plus_x).is_none());
        let sq = one_plus_x.mul(&one_plus_x);
        assert_eq!(sq.checked_div(&one_plus_x), Some(one_plus_x));
    }

    #[test]
    fn a2_pentagon() {
        let q = IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap();
        let s = Seed::initial(&q, Coefficients::Trivial);
        let r = explore_exchange_graph(&s, 100).unwrap();
        assert_eq!(r.seed_count, Some(5));
        assert_eq!(r.cluster_variables, 5);
    }
}
