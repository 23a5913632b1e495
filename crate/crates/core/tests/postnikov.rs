//! Postnikov diagrams in face encoding: initial diagrams, validation, quiver
//! variants, face potentials and geometric exchange.

use std::collections::BTreeSet;

use iqp_core::postnikov::*;
use iqp_core::qp::mutate;
use iqp_core::{ArrowClass, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arrow_ids(q: &iqp_core::IcedQuiver) -> BTreeSet<u32> {
    q.arrows().iter().map(|a| a.id).collect()
}

#[test]
fn initial_diagrams_validate() {
    for n in 4..=10u32 {
        for k in 2..=n - 2 {
            let fd = initial_diagram(k, n).unwrap();
            let r = fd.validate();
            assert!(r.is_valid(), "Gr({k},{n}): {:?}", r.violations);
            assert_eq!(fd.quiver().n_exchangeable(), (k - 1) * (n - k - 1), "Gr({k},{n})");
            assert_eq!(fd.quiver().n_frozen(), n, "Gr({k},{n})");
        }
    }
}

#[test]
fn out_of_range_parameters_are_rejected() {
    assert_eq!(initial_diagram(1, 5), Err(PostnikovError::OutOfRange { k: 1, n: 5 }));
    assert_eq!(initial_diagram(3, 4), Err(PostnikovError::OutOfRange { k: 3, n: 4 }));
}

#[test]
fn frozen_labels_are_cyclic_intervals() {
    for (k, n) in [(2, 5), (3, 6), (3, 7), (4, 9)] {
        let fd = initial_diagram(k, n).unwrap();
        let labels = fd.labels().unwrap();
        let nx = fd.quiver().n_exchangeable() as usize;
        for i in 1..=n {
            let mut expected: Vec<u32> = (0..k).map(|j| (i + 2 * n - k + j) % n + 1).collect();
            expected.sort();
            assert_eq!(labels[nx + i as usize - 1], expected, "Gr({k},{n}) f_{i}");
        }
        let distinct: BTreeSet<&Vec<u32>> = labels.iter().collect();
        assert_eq!(distinct.len(), labels.len(), "Gr({k},{n}) labels repeat");
    }
}

#[test]
fn trip_permutation_of_gr36() {
    let fd = initial_diagram(3, 6).unwrap();
    assert_eq!(fd.trip_permutation(), Some(vec![4, 5, 6, 1, 2, 3]));
}

#[test]
fn variant_inclusions() {
    for (k, n) in [(2, 5), (3, 6), (3, 7), (4, 8)] {
        let fd = initial_diagram(k, n).unwrap();
        let [i, ii, iii, bkm] = [Variant::TypeI, Variant::TypeII, Variant::TypeIII, Variant::Bkm].map(|v| fd.variant_quiver(v));
        assert!(arrow_ids(&i).is_subset(&arrow_ids(&iii)));
        assert!(arrow_ids(&iii).is_subset(&arrow_ids(&bkm)));
        assert_eq!(ii, iii.principal_part());
        assert!(i.arrows().iter().all(|a| i.is_unexternal(a.id)));
        let gaps = fd.markers().iter().filter(|m| **m == MarkerKind::Anticlockwise).count();
        assert_eq!(bkm.arrows().len(), iii.arrows().len() + gaps);
    }
}

#[test]
fn principal_part_of_gr25() {
    let q = initial_diagram(2, 5).unwrap().variant_quiver(Variant::TypeII);
    assert_eq!((q.n_vertices(), q.arrows().len()), (2, 1));
}

#[test]
fn face_potentials_have_unit_coefficients_and_one_term_per_closed_face() {
    for (k, n) in [(2, 5), (3, 6), (3, 7), (4, 8)] {
        let fd = initial_diagram(k, n).unwrap();
        // Euler characteristic of the disk, gaps counted as edges.
        let gaps = fd.markers().iter().filter(|m| **m == MarkerKind::Anticlockwise).count();
        let v = fd.quiver().n_vertices() as usize;
        let e = fd.quiver().arrows().len() + gaps;
        assert_eq!(fd.faces().len(), 1 + e - v);
        let closed = fd.faces().iter().filter(|f| f.is_closed()).count();
        let w = fd.face_potential(Variant::TypeIII, 12);
        assert_eq!(w.len(), closed);
        assert!(w.terms().all(|(_, c)| *c == Q::one() || *c == -Q::one()));
        assert_eq!(fd.face_potential(Variant::Bkm, 12).len(), fd.faces().len());
        // Without external arrows only the faces with none remain.
        let q = fd.quiver();
        let internal = fd
            .faces()
            .iter()
            .filter(|f| f.edges.iter().all(|e| matches!(e, Edge::Arrow(a) if q.is_unexternal(*a))))
            .count();
        assert_eq!(fd.face_potential(Variant::TypeI, 12).len(), internal);
    }
}

#[test]
fn fundamental_cycle_classes() {
    let fd = initial_diagram(3, 7).unwrap();
    let q = fd.variant_quiver(Variant::TypeIII);
    for fc in fd.fundamental_cycles(Variant::TypeIII) {
        let has = |c: ArrowClass| fc.cycle.arrows().iter().any(|&a| q.classify_arrow(a) == Ok(c));
        let expected = if has(ArrowClass::External) {
            CycleClass::External
        } else if has(ArrowClass::Boundary) {
            CycleClass::Boundary
        } else {
            CycleClass::Internal
        };
        assert_eq!(fc.class, expected);
    }
    assert!(fd.fundamental_cycles(Variant::TypeI).iter().all(|fc| fc.class != CycleClass::External));
}

#[test]
fn flipped_face_breaks_alternation() {
    let fd = initial_diagram(3, 6).unwrap();
    let mut faces = fd.faces().to_vec();
    let inner = faces.iter().position(|f| f.is_closed() && f.edges.iter().all(|e| matches!(e, Edge::Arrow(a) if fd.quiver().is_unexternal(*a)))).unwrap();
    faces[inner].orientation = faces[inner].orientation.flip();
    let broken = FaceDiagram::new(3, fd.quiver().clone(), faces);
    let r = broken.validate();
    assert!(r.violations.iter().any(|v| matches!(v, Violation::NotAlternating { .. })), "{:?}", r.violations);
}

#[test]
fn exchange_rejects_frozen_and_non_quadrilateral_vertices() {
    let fd = initial_diagram(2, 5).unwrap();
    assert_eq!(fd.geometric_exchange(3), Err(PostnikovError::FrozenVertex(3)));
    // Every interior grid vertex starts quadrilateral; one exchange changes
    // the degrees of its neighbours.
    let fd = initial_diagram(3, 7).unwrap();
    assert_eq!(fd.exchangeable_cells().len(), 6);
    let fd = fd.geometric_exchange(3).unwrap();
    let cells = fd.exchangeable_cells();
    let blocked: Vec<u32> = (1..=fd.quiver().n_exchangeable()).filter(|v| !cells.contains(v)).collect();
    assert!(!blocked.is_empty());
    for v in blocked {
        assert_eq!(fd.geometric_exchange(v), Err(PostnikovError::NotQuadrilateral(v)));
    }
}

#[test]
fn exchange_is_an_involution_and_independent_of_digon_order() {
    for (k, n) in [(2, 5), (3, 6), (3, 7), (4, 8)] {
        let fd = initial_diagram(k, n).unwrap();
        for a in fd.exchangeable_cells() {
            let once = fd.geometric_exchange(a).unwrap();
            assert_eq!(once.face_signature(), fd.geometric_exchange_reversed(a).unwrap().face_signature());
            let twice = once.geometric_exchange(a).unwrap();
            assert_eq!(twice.face_signature(), fd.face_signature(), "Gr({k},{n}) at {a}");
            assert!(twice.quiver().same_up_to_ids(fd.quiver()));
        }
    }
}

#[test]
fn random_exchanges_stay_valid_and_follow_mutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let mut fd = initial_diagram(3, 7).unwrap();
        for step in 0..6 {
            let cells = fd.exchangeable_cells();
            let a = cells[rng.gen_range(0..cells.len())];
            let p = fd.iqp(Variant::TypeIII, 12).unwrap();
            let next = fd.geometric_exchange(a).unwrap();
            let r = next.validate();
            assert!(r.is_valid(), "step {step} at {a}: {:?}", r.violations);
            assert!(next.labels().is_some());
            let m = mutate(&p, a).unwrap();
            assert_eq!(m.quiver(), next.quiver(), "step {step} at {a}");
            fd = next;
        }
    }
}

#[test]
fn exchange_replaces_one_label() {
    // The new label at the exchanged vertex is the only change; the others stay.
    let fd = initial_diagram(3, 7).unwrap();
    let before = fd.labels().unwrap();
    for a in fd.exchangeable_cells() {
        let after = fd.geometric_exchange(a).unwrap().labels().unwrap();
        let changed: Vec<usize> = (0..before.len()).filter(|&i| before[i] != after[i]).collect();
        assert_eq!(changed, vec![a as usize - 1]);
    }
}
