//! Exact computations with iced quivers with potentials for Grassmannian
//! cluster algebras.
//!
//! The crate is `no_std` (it needs only `alloc`) and purely algorithmic:
//!
//! * [`quiver`] — iced quivers, arrow classes, Fomin–Zelevinsky mutation, isomorphism;
//! * [`path`] — truncated path-algebra arithmetic, potentials, cyclic derivatives;
//! * [`qp`] — pre-mutation, splitting into trivial ⊕ reduced parts, mutation of
//!   iced quivers with potentials, and sign-map equivalence of potentials;
//! * [`jacobian`] — truncated Jacobian ideals: quotient dimensions, membership,
//!   rigidity certificates, essential length;
//! * [`postnikov`] — the face-combinatorial encoding of Postnikov diagrams,
//!   quiver variants, face potentials, geometric exchange and initial diagrams;
//! * [`cluster`] — seeds with Laurent-polynomial cluster variables and
//!   exchange-graph exploration.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cluster;
pub mod jacobian;
pub mod path;
pub mod postnikov;
pub mod qp;
pub mod quiver;
pub mod rational;

pub use path::{Path, PathSum, Potential};
pub use quiver::{Arrow, ArrowClass, ArrowId, IcedQuiver, Vertex};
pub use rational::Q;
