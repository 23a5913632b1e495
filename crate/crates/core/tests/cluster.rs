//! Seeds, Laurent cluster variables, exchange graphs and the Laurent phenomenon.

use iqp_core::cluster::*;
use iqp_core::postnikov::initial_diagram;
use iqp_core::quiver::IcedQuiver;
use iqp_core::Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn a2() -> Seed {
    Seed::initial(&IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap(), Coefficients::Trivial)
}

#[test]
fn a2_exchange_relation() {
    let s = a2();
    let t = mutate_seed(&s, 2).unwrap();
    // x2' = (x1 + 1) / x2
    let expected = Laurent::variable(2, 1).add(&Laurent::constant(2, 1)).checked_div(&Laurent::variable(2, 2)).unwrap();
    assert_eq!(t.variable(2), &expected);
    assert_eq!(t.variable(1), s.variable(1));
    assert!(t.variable(2).has_positive_coefficients());
    assert!(mutate_seed(&t, 2).unwrap().same_up_to_ids(&s));
}

#[test]
fn a2_period_five_returns_to_the_initial_cluster() {
    let mut s = a2();
    for i in [1, 2, 1, 2, 1] {
        s = mutate_seed(&s, i).unwrap();
    }
    // After five alternating mutations the variables come back, swapped.
    assert_eq!(s.cluster(), a2().cluster());
    assert_eq!(s.variable(1), a2().variable(2));
}

#[test]
fn frozen_vertices_cannot_be_mutated() {
    let q = IcedQuiver::from_pairs(1, 1, [(1, 2)]).unwrap();
    let s = Seed::initial(&q, Coefficients::Geometric);
    assert!(mutate_seed(&s, 2).is_err());
    // With a frozen coefficient x2: x1' = (x2 + 1) / x1.
    let t = mutate_seed(&s, 1).unwrap();
    assert_eq!(t.variable(1).terms().len(), 2);
    assert_eq!(t.variable(2), s.variable(2));
}

#[test]
fn plucker_coordinates_follow_exchange_in_gr25() {
    // Evaluate at the 2 × 2 minors of a fixed integer matrix.
    let m: [[i64; 5]; 2] = [[1, 2, -1, 3, 5], [2, -3, 4, 1, -2]];
    let det = |c: &[u32]| {
        let (a, b) = (c[0] as usize - 1, c[1] as usize - 1);
        Q::from_int(m[0][a] * m[1][b] - m[0][b] * m[1][a])
    };
    let fd = initial_diagram(2, 5).unwrap();
    let labels = fd.labels().unwrap();
    let point: Vec<Q> = labels.iter().map(|l| det(l)).collect();
    assert!(point.iter().all(|x| !x.is_zero()));
    let s = Seed::initial(fd.quiver(), Coefficients::Geometric);
    for a in fd.exchangeable_cells() {
        let t = mutate_seed(&s, a).unwrap();
        let new_label = fd.geometric_exchange(a).unwrap().labels().unwrap()[a as usize - 1].clone();
        assert_eq!(t.variable(a).eval(&point), det(&new_label), "vertex {a}, label {new_label:?}");
    }
}

#[test]
fn exchange_graph_sizes() {
    let single = Seed::initial(&IcedQuiver::from_pairs(1, 0, []).unwrap(), Coefficients::Trivial);
    let r = explore_exchange_graph(&single, 10).unwrap();
    assert_eq!((r.seed_count, r.cluster_variables), (Some(2), 2));
    // Gr(2,5) is of type A2, Gr(3,6) of type D4.
    let r = explore_exchange_graph(&Seed::initial(initial_diagram(2, 5).unwrap().quiver(), Coefficients::Trivial), 100).unwrap();
    assert_eq!((r.seed_count, r.cluster_variables), (Some(5), 5));
    let r = explore_exchange_graph(&Seed::initial(initial_diagram(3, 6).unwrap().quiver(), Coefficients::Trivial), 1000).unwrap();
    assert_eq!((r.seed_count, r.cluster_variables), (Some(50), 16));
}

#[test]
fn exchange_graph_stops_at_the_bound() {
    let s = Seed::initial(initial_diagram(3, 6).unwrap().quiver(), Coefficients::Trivial);
    let r = explore_exchange_graph(&s, 10).unwrap();
    assert_eq!(r.seed_count, None);
    assert_eq!(r.seeds_seen, 10);
}

#[test]
fn laurent_phenomenon_along_paths() {
    assert!(laurent_check(&a2(), &[]));
    assert!(laurent_check(&a2(), &[1, 2, 1, 2, 1]));
    assert!(!laurent_check(&a2(), &[3]));
    let s = Seed::initial(initial_diagram(2, 6).unwrap().quiver(), Coefficients::Geometric);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let len = rng.gen_range(1..=8);
        let path: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=3)).collect();
        assert!(laurent_check(&s, &path), "{path:?}");
    }
}
