//! Graphviz DOT and TikZ renderings.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write;

use iqp_core::postnikov::{Edge, FaceDiagram, Orientation};
use iqp_core::quiver::{ArrowClass, IcedQuiver, Vertex};

fn set_label(s: &[u32]) -> String {
    s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// DOT digraph of an iced quiver: frozen vertices boxed, external arrows
/// dashed. `labels[v - 1]`, when given, is shown under the vertex number.
pub fn quiver_dot(q: &IcedQuiver, labels: Option<&[Vec<u32>]>) -> String {
    let mut s = String::from("digraph quiver {\n");
    for v in q.vertices() {
        let shape = if q.is_frozen(v) { "box" } else { "circle" };
        let label = match labels {
            Some(l) => format!("{v}\\n{}", set_label(&l[v as usize - 1])),
            None => v.to_string(),
        };
        writeln!(s, "  {v} [shape={shape}, label=\"{label}\"];").unwrap();
    }
    for a in q.arrows() {
        let style = match q.classify_arrow(a.id) {
            Ok(ArrowClass::External) => ", style=dashed",
            _ => "",
        };
        writeln!(s, "  {} -> {} [label=\"{}\"{style}];", a.source, a.target, a.id).unwrap();
    }
    s.push_str("}\n");
    s
}

/// DOT digraph of a diagram's quiver with Plücker labels.
pub fn diagram_dot(fd: &FaceDiagram) -> String {
    quiver_dot(fd.quiver(), fd.labels().as_deref())
}

/// Drawing positions: frozen vertices on the unit circle, clockwise from the
/// top; exchangeable vertices from grid coordinates when known, otherwise on
/// an inner circle.
pub fn layout(fd: &FaceDiagram) -> BTreeMap<Vertex, (f64, f64)> {
    let q = fd.quiver();
    let nx = q.n_exchangeable();
    let n = fd.n() as f64;
    let mut pos = BTreeMap::new();
    for t in 1..=fd.n() {
        let theta = PI / 2.0 - 2.0 * PI * (t as f64 - 0.5) / n;
        pos.insert(nx + t, (theta.cos(), theta.sin()));
    }
    let (k, h) = (fd.k() as f64, (fd.n() - fd.k()) as f64);
    for v in 1..=nx {
        let p = match fd.coordinates().get(&v) {
            Some(&(i, j)) => (1.2 * (j as f64 / h - 0.5), 1.2 * (0.5 - i as f64 / k)),
            None => {
                let theta = PI / 2.0 - 2.0 * PI * (v as f64 - 1.0) / nx as f64;
                (0.5 * theta.cos(), 0.5 * theta.sin())
            }
        };
        pos.insert(v, p);
    }
    pos
}

/// TikZ picture of the diagram: clockwise faces shaded, anticlockwise faces
/// blank, external arrows dashed and gaps dotted.
pub fn diagram_tikz(fd: &FaceDiagram) -> String {
    let pos = layout(fd);
    let mut s = String::from("\\begin{tikzpicture}[scale=4, >=stealth]\n");
    for (v, (x, y)) in &pos {
        writeln!(s, "  \\coordinate (v{v}) at ({x:.3}, {y:.3});").unwrap();
    }
    for f in fd.faces() {
        if f.orientation != Orientation::Clockwise {
            continue;
        }
        let corners: Vec<String> =
            f.edges.iter().filter_map(|e| fd.edge_ends(*e)).map(|(s, _)| format!("(v{s})")).collect();
        writeln!(s, "  \\fill[gray!25] {} -- cycle;", corners.join(" -- ")).unwrap();
    }
    let q = fd.quiver();
    for a in q.arrows() {
        let style = match q.classify_arrow(a.id) {
            Ok(ArrowClass::External) => "->, dashed",
            _ => "->",
        };
        writeln!(s, "  \\draw[{style}] (v{}) -- (v{});", a.source, a.target).unwrap();
    }
    for (i, _) in fd.gap_arrows() {
        if let Some((u, w)) = fd.edge_ends(Edge::Gap(i)) {
            writeln!(s, "  \\draw[->, dotted] (v{u}) -- (v{w});").unwrap();
        }
    }
    let labels = fd.labels();
    for v in q.vertices() {
        let text = labels.as_ref().map_or(v.to_string(), |l| set_label(&l[v as usize - 1]));
        let shape = if q.is_frozen(v) { "draw, rectangle" } else { "draw, circle" };
        writeln!(s, "  \\node[{shape}, fill=white, inner sep=1pt, font=\\tiny] at (v{v}) {{{text}}};").unwrap();
    }
    s.push_str("\\end{tikzpicture}\n");
    s
}
