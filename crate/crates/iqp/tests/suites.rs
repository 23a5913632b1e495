//! Suite behaviour beyond the acceptance run: negative controls, determinism
//! and independent oracles.

use iqp::suites::*;
use iqp_core::postnikov::Variant;
use iqp_core::Q;

#[test]
fn corrupted_potential_is_detected_with_witness() {
    let r = verify_compat(2, 5, 10, 6, 3, true).unwrap();
    assert!(!r.pass());
    assert_eq!(r.witnesses.len(), 10);
    assert!(r.witnesses.iter().all(|w| w.step == 0 && w.reason.starts_with("potentials differ")));
}

#[test]
fn compat_is_deterministic_in_the_seed() {
    let a = verify_compat(3, 6, 10, 6, 42, false).unwrap();
    let b = verify_compat(3, 6, 10, 6, 42, false).unwrap();
    assert_eq!(a, b);
    assert!(a.pass());
    // Both pipelines allocate arrow ids identically.
    assert_eq!(a.identical_ids, a.steps);
}

#[test]
fn compat_on_larger_grassmannians() {
    for (k, n) in [(2, 7), (3, 8), (4, 8)] {
        let r = verify_compat(k, n, 10, 6, 5, false).unwrap();
        assert!(r.pass(), "Gr({k},{n}): {:?}", r.witnesses.first());
    }
}

#[test]
fn potentials_match_detects_sign_inconsistency() {
    use iqp_core::path::{Path, Potential};
    use iqp_core::quiver::IcedQuiver;
    // Two triangles sharing arrow 1: 1→2→3→1 and 1→2→4→1.
    let q = IcedQuiver::from_pairs(4, 0, [(1, 2), (2, 3), (3, 1), (2, 4), (4, 1)]).unwrap();
    let t1 = Path::from_traversal(&q, &[1, 2, 3]).unwrap();
    let t2 = Path::from_traversal(&q, &[1, 4, 5]).unwrap();
    let w = |a: i64, b: i64| {
        let mut w = Potential::zero(6);
        w.add_cycle(&t1, Q::from_int(a)).unwrap();
        w.add_cycle(&t2, Q::from_int(b)).unwrap();
        w
    };
    assert!(potentials_match(&q, &w(1, -1), &q, &w(-1, 1)));
    assert!(potentials_match(&q, &w(1, 1), &q, &w(-1, 1)));
    assert!(!potentials_match(&q, &w(1, 1), &q, &w(2, 1)));
}

#[test]
fn plucker_relations_on_larger_grassmannians() {
    for (k, n) in [(2, 6), (3, 6), (3, 7)] {
        let r = plucker(k, n, 3, 5, 17).unwrap();
        assert!(r.pass(), "Gr({k},{n}): {:?}", r.failures.first());
    }
}

#[test]
fn determinant_oracle() {
    let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect();
    assert_eq!(determinant(m(&[&[1, 2], &[3, 4]])), Q::from_int(-2));
    assert_eq!(determinant(m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])), Q::from_int(-1));
    assert_eq!(determinant(m(&[&[1, 2], &[2, 4]])), Q::zero());
    // Three-term relation for 2 × 4 minors: Δ13 Δ24 = Δ12 Δ34 + Δ14 Δ23.
    let a = m(&[&[1, 3, -2, 5], &[4, -1, 7, 2]]);
    let d = |c: &[u32]| minor(&a, c);
    assert_eq!(&d(&[1, 3]) * &d(&[2, 4]), &(&d(&[1, 2]) * &d(&[3, 4])) + &(&d(&[1, 4]) * &d(&[2, 3])));
}

#[test]
fn random_cycles_are_cycles() {
    let fd = iqp_core::postnikov::initial_diagram(3, 6).unwrap();
    let q = fd.variant_quiver(Variant::TypeIII);
    let mut r = rng(1);
    for _ in 0..50 {
        let c = random_cycle(&q, 12, &mut r);
        assert!(c.is_cycle() && !c.is_trivial() && c.len() <= 12);
    }
}

#[test]
fn exchange_graph_of_gr27_is_type_a4() {
    // Gr(2,7) is of cluster type A4: 42 seeds and 14 cluster variables.
    let r = exchange_graph(2, 7, 1000).unwrap();
    assert_eq!(r.seed_count, Some(42));
    assert_eq!(r.cluster_variables, 14);
}

#[test]
fn gr36_exchange_graph_cluster_variables() {
    // Type D4: 50 seeds and 16 cluster variables.
    let r = exchange_graph(3, 6, 10_000).unwrap();
    assert_eq!(r.seed_count, Some(50));
    assert_eq!(r.cluster_variables, 16);
}
