//! Builds a [`FaceDiagram`] from a planar drawing of its quiver.
//!
//! Vertices are given polar positions (angle in degrees, radius) and every
//! edge a bend angle: it leaves its source at `bend` degrees to the left of the
//! straight line to its target and arrives symmetrically. This determines the
//! rotation system; faces are traced by always turning sharpest left, so each
//! bounded face is traversed anticlockwise and the outer face (smallest signed
//! area) is discarded. A face traversed along its arrows is anticlockwise, a
//! face traversed against all its arrows is clockwise.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use iqp_core::postnikov::{Edge, Face, FaceDiagram, Orientation};
use iqp_core::quiver::{ArrowId, IcedQuiver, QuiverError, Vertex};
use thiserror::Error;

/// Inconsistent drawings.
#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("vertex {0} has no position")]
    MissingPosition(Vertex),
    #[error("gap {from} -> {to} does not run from f_i to f_(i-1)")]
    BadGap { from: Vertex, to: Vertex },
    #[error("face through {0:?} is not a directed cycle")]
    MixedFace(Vec<Vertex>),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// A drawn edge: an arrow of the quiver or a boundary gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrawnEdge {
    pub source: Vertex,
    pub target: Vertex,
    /// Departure angle to the left of the straight line, in degrees.
    pub bend: f64,
}

/// A drawing of a diagram's quiver `Q̄` together with its gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct Drawing {
    pub k: u32,
    pub n_exchangeable: u32,
    pub n_frozen: u32,
    /// `(angle in degrees, radius)` of vertex `v` at index `v - 1`.
    pub positions: Vec<(f64, f64)>,
    /// Arrows, given ids `1, 2, …` in order.
    pub arrows: Vec<DrawnEdge>,
    /// Gaps `f_i → f_{i-1}` at anticlockwise markers.
    pub gaps: Vec<DrawnEdge>,
}

struct Dart {
    tail: Vertex,
    head: Vertex,
    angle: f64,
}

impl Drawing {
    fn point(&self, v: Vertex) -> Result<(f64, f64), EmbeddingError> {
        let &(deg, r) = self.positions.get(v as usize - 1).ok_or(EmbeddingError::MissingPosition(v))?;
        let a = deg.to_radians();
        Ok((r * a.cos(), r * a.sin()))
    }

    fn gap_marker(&self, g: &DrawnEdge) -> Result<u32, EmbeddingError> {
        let bad = EmbeddingError::BadGap { from: g.source, to: g.target };
        let (nx, m) = (self.n_exchangeable, self.n_frozen);
        if g.source <= nx || g.target <= nx {
            return Err(bad);
        }
        let i = g.source - nx;
        let prev = if i == 1 { m } else { i - 1 };
        if g.target - nx != prev {
            return Err(bad);
        }
        Ok(i)
    }

    /// The diagram of the drawing. Run [`FaceDiagram::validate`] on the result
    /// to check the diagram axioms.
    pub fn build(&self) -> Result<FaceDiagram, EmbeddingError> {
        let quiver = IcedQuiver::new(
            self.n_exchangeable,
            self.n_frozen,
            self.arrows.iter().enumerate().map(|(i, a)| (i as ArrowId + 1, a.source, a.target)),
        )?;
        let mut edges: Vec<(Edge, DrawnEdge)> =
            self.arrows.iter().enumerate().map(|(i, a)| (Edge::Arrow(i as ArrowId + 1), *a)).collect();
        for g in &self.gaps {
            edges.push((Edge::Gap(self.gap_marker(g)?), *g));
        }
        // Dart 2e runs along edge e, dart 2e + 1 against it.
        let mut darts = Vec::with_capacity(2 * edges.len());
        for (_, d) in &edges {
            let (ps, pt) = (self.point(d.source)?, self.point(d.target)?);
            let fwd = (pt.1 - ps.1).atan2(pt.0 - ps.0) + d.bend.to_radians();
            let bwd = (ps.1 - pt.1).atan2(ps.0 - pt.0) - d.bend.to_radians();
            darts.push(Dart { tail: d.source, head: d.target, angle: fwd });
            darts.push(Dart { tail: d.target, head: d.source, angle: bwd });
        }
        let mut rotation: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
        for (i, d) in darts.iter().enumerate() {
            rotation.entry(d.tail).or_default().push(i);
        }
        for list in rotation.values_mut() {
            list.sort_by(|&a, &b| darts[a].angle.rem_euclid(TAU).total_cmp(&darts[b].angle.rem_euclid(TAU)));
        }
        let next = |d: usize| -> usize {
            let rev = d ^ 1;
            let list = &rotation[&darts[d].head];
            let p = list.iter().position(|&x| x == rev).expect("reverse dart at head");
            list[(p + list.len() - 1) % list.len()]
        };
        let mut seen = vec![false; darts.len()];
        let mut traced: Vec<(Vec<usize>, f64)> = Vec::new();
        for start in 0..darts.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                cycle.push(d);
                d = next(d);
            }
            let mut area = 0.0;
            for &d in &cycle {
                let (a, b) = (self.point(darts[d].tail)?, self.point(darts[d].head)?);
                area += a.0 * b.1 - a.1 * b.0;
            }
            traced.push((cycle, area / 2.0));
        }
        let outer = traced
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .expect("at least one face");
        let mut faces = Vec::new();
        for (i, (cycle, _)) in traced.iter().enumerate() {
            if i == outer {
                continue;
            }
            let forward = cycle.iter().all(|d| d % 2 == 0);
            let backward = cycle.iter().all(|d| d % 2 == 1);
            let face = if forward {
                Face { edges: cycle.iter().map(|d| edges[d / 2].0).collect(), orientation: Orientation::Anticlockwise }
            } else if backward {
                Face { edges: cycle.iter().rev().map(|d| edges[d / 2].0).collect(), orientation: Orientation::Clockwise }
            } else {
                return Err(EmbeddingError::MixedFace(cycle.iter().map(|&d| darts[d].tail).collect()));
            };
            faces.push(face);
        }
        Ok(FaceDiagram::new(self.k, quiver, faces))
    }
}
