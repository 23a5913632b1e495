//! Truncated Jacobian ideals: generators, quotient dimensions, membership,
//! rigidity, essential lengths and finiteness probes.

use iqp_core::jacobian::*;
use iqp_core::path::{Path, PathSum, Potential};
use iqp_core::postnikov::{initial_diagram, Variant};
use iqp_core::qp::Iqp;
use iqp_core::quiver::IcedQuiver;
use iqp_core::Q;

fn triangle() -> Iqp {
    let q = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap();
    let mut w = Potential::zero(8);
    w.add_cycle(&Path::from_traversal(&q, &[1, 2, 3]).unwrap(), Q::one()).unwrap();
    Iqp::new(q, w).unwrap()
}

fn bare(q: IcedQuiver) -> Iqp {
    Iqp::new(q, Potential::zero(8)).unwrap()
}

#[test]
fn generators_follow_unexternal_arrows() {
    let t = triangle();
    assert_eq!(jacobian_generators(&t).len(), 3);
    let fd = initial_diagram(3, 7).unwrap();
    let p = fd.iqp(Variant::TypeIII, 10).unwrap();
    let unexternal = p.quiver().arrows().iter().filter(|a| p.quiver().is_unexternal(a.id)).count();
    assert_eq!(jacobian_generators(&p).len(), unexternal);
    assert!(unexternal < p.quiver().arrows().len());
    let zero = bare(p.quiver().clone());
    assert!(jacobian_generators(&zero).iter().all(PathSum::is_zero));
}

#[test]
fn quotient_dimensions_of_small_quivers() {
    assert_eq!(quotient_dimension(&bare(IcedQuiver::from_pairs(1, 0, []).unwrap()), 4), (1, true));
    assert_eq!(quotient_dimension(&bare(IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap()), 4), (3, true));
    // Vertices and arrows survive; every path of length 2 is a derivative.
    assert_eq!(quotient_dimension(&triangle(), 4), (6, true));
}

#[test]
fn ideal_membership() {
    let t = triangle();
    let b = IdealBasis::new(&t, 6);
    let q = t.quiver();
    // ∂_γ W is the path α then β.
    assert!(b.is_in_ideal(&PathSum::path(Path::from_traversal(q, &[1, 2]).unwrap(), 8)).unwrap());
    assert!(!b.is_in_ideal(&PathSum::path(Path::from_traversal(q, &[1]).unwrap(), 8)).unwrap());
    assert!(is_in_ideal(&PathSum::zero(8), &b).unwrap());
    // Beyond the cap, membership is still decided once the basis is stabilized.
    let long = Path::from_traversal(q, &[1, 2, 3, 1, 2, 3, 1, 2]).unwrap();
    assert!(b.is_in_ideal(&PathSum::path(long, 16)).unwrap());
}

#[test]
fn membership_beyond_an_unstabilized_cap_is_an_error() {
    // The Kronecker-like 2-cycle with W = 0 never stabilizes.
    let q = IcedQuiver::from_pairs(2, 0, [(1, 2), (2, 1)]).unwrap();
    let b = IdealBasis::new(&bare(q.clone()), 3);
    assert!(!b.is_stabilized());
    let long = Path::from_traversal(&q, &[1, 2, 1, 2]).unwrap();
    assert!(matches!(b.is_in_ideal(&PathSum::path(long, 8)), Err(JacobianError::CapExceeded { .. })));
}

#[test]
fn rigidity_examples() {
    assert!(rigidity_certificate(&triangle(), 6).is_certified_rigid());
    let fd = initial_diagram(3, 6).unwrap();
    let r = rigidity_certificate(&fd.iqp(Variant::TypeIII, 12).unwrap(), 10);
    assert!(r.is_certified_rigid(), "{:?}", r.witnesses.first());
    let bkm = rigidity_certificate(&fd.iqp(Variant::Bkm, 12).unwrap(), 8);
    assert!(!bkm.rigid_up_to_cap);
    // A 2-cycle with W = 0 is not rigid: the cycle itself is a witness.
    let two = bare(IcedQuiver::from_pairs(2, 0, [(1, 2), (2, 1)]).unwrap());
    let r = rigidity_certificate(&two, 4);
    assert_eq!(r.witnesses.first().map(Path::len), Some(2));
}

#[test]
fn essential_lengths_of_fundamental_cycles_and_powers() {
    let fd = initial_diagram(3, 6).unwrap();
    let p = fd.iqp(Variant::TypeIII, 14).unwrap();
    let b = IdealBasis::new(&p, 12);
    assert!(b.is_stabilized());
    let fundamental: Vec<Path> = fd.fundamental_cycles(Variant::TypeIII).into_iter().map(|f| f.cycle).collect();
    for f in &fundamental {
        let (m, w) = essential_length(f, &fundamental, &b).unwrap().unwrap();
        assert_eq!(m, 1);
        assert_eq!(&w, f);
        let (m, _) = essential_length(&f.power(3).unwrap(), &fundamental, &b).unwrap().unwrap();
        assert_eq!(m, 3);
    }
}

#[test]
fn essential_length_of_a_cycle_in_the_ideal_is_undefined() {
    let t = triangle();
    let b = IdealBasis::new(&t, 6);
    let q = t.quiver();
    let f = Path::from_traversal(q, &[1, 2, 3]).unwrap();
    // A cycle based at another vertex is matched by a rotation of the fundamental cycle.
    let rotated = Path::from_traversal(q, &[2, 3, 1]).unwrap();
    assert_eq!(essential_length(&rotated, std::slice::from_ref(&f), &b).unwrap().map(|x| x.0), Some(1));
    // Without fundamental cycles the triangle lies in J, so nothing is defined.
    assert_eq!(essential_length(&f, &[], &b).unwrap(), None);
}

#[test]
fn finiteness_probe_of_acyclic_quiver_counts_paths() {
    // A3 linear: 3 + 2 + 1 paths.
    let p = bare(IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3)]).unwrap());
    let probe = jacobi_finite_probe(&p, &[4, 6]);
    assert_eq!(probe.verdict, JacobiVerdict::Stabilized(6));
    assert_eq!(probe.dimensions, vec![(4, 6, true), (6, 6, true)]);
}

#[test]
fn finiteness_probe_of_a_free_cycle_keeps_growing() {
    let p = bare(IcedQuiver::from_pairs(2, 0, [(1, 2), (2, 1)]).unwrap());
    let probe = jacobi_finite_probe(&p, &[4, 6]);
    assert_eq!(probe.verdict, JacobiVerdict::GrowingThrough(6));
    assert_eq!(probe.dimensions, vec![(4, 8, false), (6, 12, false)]);
}

#[test]
fn jacobian_of_gr25_is_finite() {
    let p = initial_diagram(2, 5).unwrap().iqp(Variant::TypeIII, 16).unwrap();
    let probe = jacobi_finite_probe(&p, &[8, 10, 12]);
    assert_eq!(probe.verdict, JacobiVerdict::Stabilized(38));
    assert!(probe.dimensions.iter().all(|&(_, d, s)| d == 38 && s));
}
