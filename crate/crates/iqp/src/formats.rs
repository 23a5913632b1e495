//! JSON file formats.
//!
//! * `quiver.v1` — `{"n": int, "m": int, "arrows": [[id, source, target], ...]}`.
//! * `pathsum.v1` — `[[num, den, [arrow ids]], ...]`, arrows in traversal
//!   order (the path runs through the listed arrows first to last). Numerators
//!   and denominators are JSON integers, or decimal strings when they do not
//!   fit in 64 bits.
//! * `iqp.v1` — `{"quiver": quiver.v1, "cap": int, "potential": pathsum.v1}`.
//! * `facediagram.v1` — the fields of `quiver.v1` plus `"k"`, `"rotation"`
//!   (per vertex, incident edges anticlockwise), `"faces"` (`[[edges], "CW" |
//!   "ACW", closed]`) and `"markers"` (`"CW"` / `"ACW"` per marker). An edge is
//!   an arrow id, or `-i` for the gap at marker `i`.
//! * `seed.v1` — `{"quiver": quiver.v1, "variables": [[[coeff, [exponents]], ...], ...]}`
//!   with one Laurent polynomial per vertex.

use std::collections::BTreeMap;

use iqp_core::cluster::{Laurent, Seed};
use iqp_core::path::{Path, PathSum, Potential};
use iqp_core::postnikov::{Edge, Face, FaceDiagram, MarkerKind, Orientation};
use iqp_core::qp::Iqp;
use iqp_core::quiver::{ArrowId, IcedQuiver, Vertex};
use iqp_core::Q;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// Failures while reading a file format.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },
}

fn invalid(what: &'static str, detail: impl ToString) -> FormatError {
    FormatError::Invalid { what, detail: detail.to_string() }
}

/// `quiver.v1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverV1 {
    pub n: u32,
    pub m: u32,
    pub arrows: Vec<(ArrowId, Vertex, Vertex)>,
}

impl From<&IcedQuiver> for QuiverV1 {
    fn from(q: &IcedQuiver) -> QuiverV1 {
        QuiverV1 {
            n: q.n_exchangeable(),
            m: q.n_frozen(),
            arrows: q.arrows().iter().map(|a| (a.id, a.source, a.target)).collect(),
        }
    }
}

impl QuiverV1 {
    /// The quiver described by this record.
    pub fn to_quiver(&self) -> Result<IcedQuiver, FormatError> {
        IcedQuiver::new(self.n, self.m, self.arrows.iter().copied()).map_err(|e| invalid("quiver", e))
    }
}

fn int_value(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn parse_int(v: &Value) -> Result<BigInt, FormatError> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| invalid("integer", n)),
        Value::String(s) => s.parse().map_err(|_| invalid("integer", s)),
        other => Err(invalid("integer", other)),
    }
}

/// Encodes a path sum as `pathsum.v1`.
pub fn pathsum_to_json<'a>(terms: impl Iterator<Item = (&'a Path, &'a Q)>) -> Value {
    Value::Array(
        terms
            .map(|(p, c)| json!([int_value(&c.numer()), int_value(&c.denom()), p.arrows()]))
            .collect(),
    )
}

fn parse_terms(v: &Value, q: &IcedQuiver) -> Result<Vec<(Path, Q)>, FormatError> {
    let items = v.as_array().ok_or_else(|| invalid("pathsum", "expected an array"))?;
    let mut out = Vec::new();
    for item in items {
        let t = item.as_array().filter(|t| t.len() == 3).ok_or_else(|| invalid("term", item))?;
        let (num, den) = (parse_int(&t[0])?, parse_int(&t[1])?);
        if den == BigInt::from(0) {
            return Err(invalid("term", "zero denominator"));
        }
        let ids: Vec<ArrowId> = serde_json::from_value(t[2].clone())?;
        let p = Path::from_traversal(q, &ids).map_err(|e| invalid("path", e))?;
        out.push((p, Q::from_bigints(num, den)));
    }
    Ok(out)
}

/// Decodes `pathsum.v1` against a quiver.
pub fn pathsum_from_json(v: &Value, q: &IcedQuiver, cap: u32) -> Result<PathSum, FormatError> {
    let mut x = PathSum::zero(cap);
    for (p, c) in parse_terms(v, q)? {
        x.add_term(p, c);
    }
    Ok(x)
}

/// Encodes an IQP as `iqp.v1`.
pub fn iqp_to_json(p: &Iqp) -> Value {
    json!({
        "quiver": QuiverV1::from(p.quiver()),
        "cap": p.cap(),
        "potential": pathsum_to_json(p.potential().terms()),
    })
}

/// Decodes `iqp.v1`.
pub fn iqp_from_json(v: &Value) -> Result<Iqp, FormatError> {
    let q: QuiverV1 = serde_json::from_value(v["quiver"].clone())?;
    let q = q.to_quiver()?;
    let cap = v["cap"].as_u64().ok_or_else(|| invalid("iqp", "missing cap"))? as u32;
    let mut w = Potential::zero(cap);
    for (p, c) in parse_terms(&v["potential"], &q)? {
        w.add_cycle(&p, c).map_err(|e| invalid("potential", e))?;
    }
    Iqp::new(q, w).map_err(|e| invalid("iqp", e))
}

fn edge_code(e: &Edge) -> i64 {
    match e {
        Edge::Arrow(a) => *a as i64,
        Edge::Gap(i) => -(*i as i64),
    }
}

fn edge_decode(x: i64) -> Edge {
    if x < 0 {
        Edge::Gap((-x) as u32)
    } else {
        Edge::Arrow(x as ArrowId)
    }
}

fn orientation_tag(o: Orientation) -> &'static str {
    match o {
        Orientation::Clockwise => "CW",
        Orientation::Anticlockwise => "ACW",
    }
}

/// Encodes a face diagram as `facediagram.v1`.
pub fn facediagram_to_json(fd: &FaceDiagram) -> Value {
    let q = QuiverV1::from(fd.quiver());
    json!({
        "n": q.n,
        "m": q.m,
        "arrows": q.arrows,
        "k": fd.k(),
        "rotation": fd.rotation().iter().map(|r| r.iter().map(edge_code).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "faces": fd.faces().iter().map(|f| json!([
            f.edges.iter().map(edge_code).collect::<Vec<_>>(),
            orientation_tag(f.orientation),
            f.is_closed(),
        ])).collect::<Vec<_>>(),
        "markers": fd.markers().iter().map(|m| match m {
            MarkerKind::Clockwise => "CW",
            MarkerKind::Anticlockwise => "ACW",
        }).collect::<Vec<_>>(),
        "levels": fd.levels(),
    })
}

/// Decodes `facediagram.v1`; rotation and markers are re-derived from the faces
/// and checked against the stored ones.
pub fn facediagram_from_json(v: &Value) -> Result<FaceDiagram, FormatError> {
    let q: QuiverV1 = serde_json::from_value(json!({"n": v["n"], "m": v["m"], "arrows": v["arrows"]}))?;
    let q = q.to_quiver()?;
    let k = v["k"].as_u64().ok_or_else(|| invalid("facediagram", "missing k"))? as u32;
    let faces_v = v["faces"].as_array().ok_or_else(|| invalid("facediagram", "missing faces"))?;
    let mut faces = Vec::new();
    for f in faces_v {
        let codes: Vec<i64> = serde_json::from_value(f[0].clone())?;
        let orientation = match f[1].as_str() {
            Some("CW") => Orientation::Clockwise,
            Some("ACW") => Orientation::Anticlockwise,
            _ => return Err(invalid("face orientation", &f[1])),
        };
        faces.push(Face { edges: codes.into_iter().map(edge_decode).collect(), orientation });
    }
    let mut fd = FaceDiagram::new(k, q, faces);
    if let Some(levels) = v.get("levels").filter(|l| !l.is_null()) {
        let levels: Vec<Option<u32>> = serde_json::from_value(levels.clone())?;
        if levels.len() == fd.faces().len() {
            fd = fd.with_levels(levels);
        }
    }
    if let Some(markers) = v.get("markers").and_then(Value::as_array) {
        let stored: Vec<&str> = markers.iter().filter_map(Value::as_str).collect();
        let derived: Vec<&str> = fd
            .markers()
            .iter()
            .map(|m| if *m == MarkerKind::Clockwise { "CW" } else { "ACW" })
            .collect();
        if stored != derived {
            return Err(invalid("markers", "do not match the faces"));
        }
    }
    Ok(fd)
}

/// Encodes a Laurent polynomial as `[[coeff, [exponents]], ...]`.
pub fn laurent_to_json(x: &Laurent) -> Value {
    Value::Array(x.terms().iter().map(|(e, c)| json!([int_value(c), e])).collect())
}

/// Encodes a seed as `seed.v1`.
pub fn seed_to_json(s: &Seed) -> Value {
    json!({
        "quiver": QuiverV1::from(s.quiver()),
        "variables": s.variables().iter().map(laurent_to_json).collect::<Vec<_>>(),
    })
}

/// Summary rows of exchange-graph runs, for CSV export.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExchangeGraphRow {
    pub k: u32,
    pub n: u32,
    pub max_seeds: usize,
    pub seed_count: Option<usize>,
    pub cluster_variables: usize,
    pub max_depth: usize,
    pub quiver_classes: usize,
}

/// Writes exchange-graph rows as CSV.
pub fn exchange_graph_csv(rows: &[ExchangeGraphRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Map from marker index to tag, convenient for reports.
pub fn marker_tags(fd: &FaceDiagram) -> BTreeMap<u32, &'static str> {
    fd.markers()
        .iter()
        .enumerate()
        .map(|(i, m)| (i as u32 + 1, if *m == MarkerKind::Clockwise { "CW" } else { "ACW" }))
        .collect()
}
