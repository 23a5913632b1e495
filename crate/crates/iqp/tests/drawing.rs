//! A hand-drawn Gr(3,7) diagram: built from vertex positions and bent edges,
//! it must be a valid diagram whose strands reproduce the drawn labels.

use iqp::embedding::{DrawnEdge, Drawing};
use iqp_core::postnikov::{MarkerKind, Variant};
use iqp_core::quiver::ArrowClass;

/// Vertex labels: six exchangeable regions, then `f_1, …, f_7`.
const LABELS: [&str; 13] = ["267", "126", "256", "125", "356", "235", "671", "712", "123", "234", "345", "456", "567"];

fn vertex(label: &str) -> u32 {
    LABELS.iter().position(|&l| l == label).expect("known label") as u32 + 1
}

fn edges(list: &[(&str, &str, f64)]) -> Vec<DrawnEdge> {
    list.iter().map(|&(s, t, bend)| DrawnEdge { source: vertex(s), target: vertex(t), bend }).collect()
}

fn drawing() -> Drawing {
    let mut positions = vec![(104.0, 0.58), (63.0, 0.47), (160.0, 0.25), (15.0, 0.3), (220.0, 0.52), (295.0, 0.4)];
    positions.extend((1..=7).map(|t| (150.7 - 51.4 * t as f64 - 25.0, 1.0)));
    let mut arrows = edges(&[
        ("671", "267", -47.0),
        ("267", "567", 44.0),
        ("267", "126", 18.0),
        ("126", "712", 47.0),
        ("125", "126", -8.0),
        ("123", "125", -52.0),
        ("126", "256", 3.0),
        ("256", "267", -3.0),
        ("256", "125", -4.0),
        ("256", "356", -25.0),
        ("567", "256", -44.0),
        ("356", "456", 31.0),
        ("356", "235", -2.0),
        ("235", "256", 12.0),
        ("125", "235", 2.0),
        ("235", "345", 35.0),
        ("345", "356", -54.0),
        ("234", "235", -62.0),
        ("235", "123", 47.0),
    ]);
    arrows.extend(edges(&[("712", "123", 20.0), ("123", "234", 20.0), ("456", "567", 20.0), ("567", "671", 20.0)]));
    let gaps = edges(&[("712", "671", -20.0), ("345", "234", -20.0), ("456", "345", -20.0)]);
    Drawing { k: 3, n_exchangeable: 6, n_frozen: 7, positions, arrows, gaps }
}

fn parse(label: &str) -> Vec<u32> {
    let mut v: Vec<u32> = label.chars().map(|c| c.to_digit(10).unwrap()).collect();
    v.sort_unstable();
    v
}

#[test]
fn drawn_diagram_is_valid() {
    let fd = drawing().build().unwrap();
    let report = fd.validate();
    assert!(report.is_valid(), "{:?}", report.violations);
    assert_eq!(fd.trip_permutation(), Some(vec![4, 5, 6, 7, 1, 2, 3]));
}

#[test]
fn drawn_markers_and_variants() {
    let fd = drawing().build().unwrap();
    let cw: Vec<u32> = (1..=7).filter(|&i| fd.markers()[i as usize - 1] == MarkerKind::Clockwise).collect();
    assert_eq!(cw, vec![1, 3, 4, 7]);
    let external = |v: Variant| {
        let q = fd.variant_quiver(v);
        q.arrows().iter().filter(|a| q.classify_arrow(a.id) == Ok(ArrowClass::External)).count()
    };
    assert_eq!(external(Variant::TypeIII), 4);
    assert_eq!(external(Variant::Bkm), 7);
    assert_eq!(fd.variant_quiver(Variant::TypeII).n_vertices(), 6);
    let internal = fd.quiver().arrows().iter().filter(|a| fd.quiver().classify_arrow(a.id) == Ok(ArrowClass::Internal)).count();
    assert_eq!(internal, 9);
    assert_eq!(fd.quiver().n_vertices(), 13);
}

#[test]
fn drawn_labels_match_strands() {
    let fd = drawing().build().unwrap();
    let labels = fd.labels().expect("consistent strands");
    let expected: Vec<Vec<u32>> = LABELS.iter().map(|l| parse(l)).collect();
    assert_eq!(labels, expected);
}

#[test]
fn drawn_diagram_exchanges_compatibly() {
    use iqp::suites::potentials_match;
    use iqp_core::qp::mutate;
    let fd = drawing().build().unwrap();
    let p = fd.iqp(Variant::TypeIII, 16).unwrap();
    for a in fd.exchangeable_cells() {
        let g = fd.geometric_exchange(a).unwrap();
        assert!(g.validate().is_valid());
        let m = mutate(&p, a).unwrap();
        assert!(potentials_match(m.quiver(), m.potential(), g.quiver(), &g.face_potential(Variant::TypeIII, 16)));
    }
}
