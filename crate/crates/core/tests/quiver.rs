//! Iced quivers: arrow classes, principal parts, mutation, isomorphism.

use iqp_core::quiver::{ArrowClass, IcedQuiver};

/// Labels of the hand-drawn Gr(3,7) diagram: six exchangeable regions, then
/// the frozen regions `f_1, …, f_7`.
const LABELS: [&str; 13] = ["267", "126", "256", "125", "356", "235", "671", "712", "123", "234", "345", "456", "567"];

fn v(label: &str) -> u32 {
    LABELS.iter().position(|&l| l == label).unwrap() as u32 + 1
}

/// `Q̄` of the hand-drawn Gr(3,7) diagram; arrow ids follow the list order.
fn gr37() -> IcedQuiver {
    let pairs = [
        ("671", "267"), ("267", "567"), ("267", "126"), ("126", "712"), ("125", "126"),
        ("123", "125"), ("126", "256"), ("256", "267"), ("256", "125"), ("256", "356"),
        ("567", "256"), ("356", "456"), ("356", "235"), ("235", "256"), ("125", "235"),
        ("235", "345"), ("345", "356"), ("234", "235"), ("235", "123"),
        ("712", "123"), ("123", "234"), ("456", "567"), ("567", "671"),
    ];
    IcedQuiver::from_pairs(6, 7, pairs.iter().map(|(s, t)| (v(s), v(t)))).unwrap()
}

fn arrow_between(q: &IcedQuiver, s: &str, t: &str) -> u32 {
    q.arrows().iter().find(|a| a.source == v(s) && a.target == v(t)).unwrap().id
}

#[test]
fn arrow_classes_in_gr37() {
    let q = gr37();
    assert_eq!(q.classify_arrow(arrow_between(&q, "267", "126")), Ok(ArrowClass::Internal));
    assert_eq!(q.classify_arrow(arrow_between(&q, "712", "123")), Ok(ArrowClass::External));
    assert_eq!(q.classify_arrow(arrow_between(&q, "126", "712")), Ok(ArrowClass::Boundary));
    let count = |c| q.arrows().iter().filter(|a| q.classify_arrow(a.id) == Ok(c)).count();
    assert_eq!((count(ArrowClass::Internal), count(ArrowClass::Boundary), count(ArrowClass::External)), (9, 10, 4));
}

#[test]
fn arrow_class_of_single_boundary_arrow() {
    let q = IcedQuiver::from_pairs(1, 1, [(1, 2)]).unwrap();
    assert_eq!(q.classify_arrow(1), Ok(ArrowClass::Boundary));
    assert!(q.classify_arrow(2).is_err());
}

#[test]
fn principal_parts() {
    let q = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap();
    assert_eq!(q.principal_part(), q);
    let p = gr37().principal_part();
    assert_eq!((p.n_exchangeable(), p.n_frozen()), (6, 0));
    assert_eq!(p.arrows().len(), 9);
    let single = IcedQuiver::from_pairs(1, 1, [(1, 2)]).unwrap().principal_part();
    assert_eq!((single.n_vertices(), single.arrows().len()), (1, 0));
}

#[test]
fn mutation_examples() {
    let q = IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap();
    assert_eq!(q.mutate_quiver(1).unwrap().arrow_multiset(), vec![(2, 1)]);
    // 3-cycle at 2: the composite 1→3 cancels 3→1, leaving 3→2→1.
    let t = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap();
    assert_eq!(t.mutate_quiver(2).unwrap().arrow_multiset(), vec![(2, 1), (3, 2)]);
    let kronecker = IcedQuiver::from_pairs(2, 0, [(1, 2), (1, 2)]).unwrap();
    assert_eq!(kronecker.mutate_quiver(2).unwrap().arrow_multiset(), vec![(2, 1), (2, 1)]);
}

#[test]
fn mutation_rejects_frozen_and_two_cycles() {
    let q = IcedQuiver::from_pairs(1, 1, [(1, 2)]).unwrap();
    assert!(q.mutate_quiver(2).is_err());
    let two = IcedQuiver::from_pairs(2, 0, [(1, 2), (2, 1)]).unwrap();
    assert!(two.mutate_quiver(1).is_err());
}

#[test]
fn mutation_is_an_involution_on_gr37() {
    let q = gr37();
    for i in 1..=6 {
        if let Ok(m) = q.mutate_quiver(i) {
            assert!(m.mutate_quiver(i).unwrap().same_up_to_ids(&q), "vertex {i}");
        }
    }
}

#[test]
fn isomorphism_examples() {
    let t = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap();
    assert_eq!(t.are_isomorphic(&t, false), Some(vec![1, 2, 3]));
    let a = IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap();
    let b = IcedQuiver::from_pairs(2, 0, [(2, 1)]).unwrap();
    assert_eq!(a.are_isomorphic(&b, false), Some(vec![2, 1]));
    let path = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (1, 3)]).unwrap();
    assert_eq!(t.are_isomorphic(&path, false), None);
}

#[test]
fn isomorphism_fixing_frozen_vertices() {
    // Swapping the two frozen vertices is an isomorphism only when they may move.
    let a = IcedQuiver::from_pairs(1, 2, [(1, 2), (3, 1)]).unwrap();
    let b = IcedQuiver::from_pairs(1, 2, [(1, 3), (2, 1)]).unwrap();
    assert!(a.are_isomorphic(&b, false).is_some());
    assert!(a.are_isomorphic(&b, true).is_none());
}

#[test]
fn opposite_examples() {
    let q = gr37();
    assert_eq!(q.opposite().opposite(), q);
    let a = IcedQuiver::from_pairs(2, 0, [(1, 2)]).unwrap();
    assert_eq!(a.opposite().arrow_multiset(), vec![(2, 1)]);
    let t = IcedQuiver::from_pairs(3, 0, [(1, 2), (2, 3), (3, 1)]).unwrap();
    assert_eq!(t.opposite().arrow_multiset(), vec![(1, 3), (2, 1), (3, 2)]);
}

#[test]
fn normalized_renumbers_by_endpoints() {
    let q = IcedQuiver::new(2, 0, [(7, 2, 1), (3, 1, 2)]).unwrap();
    let n = q.normalized();
    assert_eq!(n.arrows().iter().map(|a| (a.id, a.source, a.target)).collect::<Vec<_>>(), vec![(1, 1, 2), (2, 2, 1)]);
    assert!(n.same_up_to_ids(&q));
}
