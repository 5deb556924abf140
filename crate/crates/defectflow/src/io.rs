//! JSON document schemas for the command line and other front ends.
//!
//! Every document is a single JSON object; readers pick out the fields they
//! need, so one file can carry a lattice, a vertex field, and a run report
//! side by side, and subcommands can be chained by feeding one's output to
//! the next.
//!
//! * Complex: `"vertices": [{"id", "x", "y"}]` and `"edges": [[a, b]]`, one
//!   entry per unordered bond.  Emitted complexes also carry `"faces"`
//!   (per bounded face, the indices into `"edges"` of its cycle) and
//!   `"boundary"` (edge indices along the outer cycle, walk order).
//! * Lattice: the complex fields plus `"epsilon"` and `"cells": [[ix, iy]]`
//!   (anchor corners in lattice coordinates).  The cells are authoritative;
//!   when a vertex table is also present it is cross-checked.
//! * Vertex function: `"values": [[id, value]]`.
//! * Boundary vector field: `"vectors": [[id, vx, vy]]`.
//! * 1-form: `"form": {"edges": [[a, b, value]]}` on canonical
//!   orientations.
//! * Dual graph: the graph schema plus `"dual_of"`, a table of
//!   `[[a, b], [p, q]]` rows pairing each primal edge with its dual edge.
//!   Dual vertex coordinates are for display only: faces sit at their cycle
//!   centroid, pendants outside the midpoint of their boundary edge.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::complex::PlanarComplex;
use crate::dual::{DualForm, DualGraph};
use crate::error::{Error, Result};
use crate::forms::{OneForm, VertexFunction};
use crate::lattice::{LatticeDomain, VorticityMeasure};
use crate::pipeline::{self, PipelineReport};
use crate::removal::X0Rule;

/// Read a JSON document from disk.
pub fn read_document(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Write a JSON document to disk, pretty-printed.
pub fn write_document(path: &Path, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn field<'v>(doc: &'v Value, name: &str) -> Result<&'v Value> {
    doc.get(name)
        .ok_or_else(|| Error::InvalidInput(format!("document has no \"{name}\" field")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a JSON array")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a number")))
}

fn as_u32(v: &Value, what: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a small nonnegative integer")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be an integer")))
}

/// Does the document carry the lattice fields?
pub fn has_lattice(doc: &Value) -> bool {
    doc.get("epsilon").is_some() && doc.get("cells").is_some()
}

/// Build a complex from the document's vertex and edge tables.
pub fn complex_from_value(doc: &Value) -> Result<PlanarComplex> {
    let mut vertices = Vec::new();
    for (k, item) in as_array(field(doc, "vertices")?, "\"vertices\"")?
        .iter()
        .enumerate()
    {
        let id = as_u32(field(item, "id")?, &format!("vertex {k}: \"id\""))?;
        let x = as_f64(field(item, "x")?, &format!("vertex {k}: \"x\""))?;
        let y = as_f64(field(item, "y")?, &format!("vertex {k}: \"y\""))?;
        vertices.push((id, x, y));
    }
    let mut edges = Vec::new();
    for (k, item) in as_array(field(doc, "edges")?, "\"edges\"")?
        .iter()
        .enumerate()
    {
        let pair = as_array(item, &format!("edge {k}"))?;
        if pair.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "edge {k} must be a pair [a, b]"
            )));
        }
        let a = as_u32(&pair[0], &format!("edge {k}: endpoint"))?;
        let b = as_u32(&pair[1], &format!("edge {k}: endpoint"))?;
        edges.push((a, b));
    }
    PlanarComplex::build(&vertices, &edges)
}

/// Serialize a complex, including the derived face and boundary tables.
pub fn complex_to_value(c: &PlanarComplex) -> Value {
    let mut vertices = Vec::new();
    for id in c.vertex_ids() {
        let p = c.point(id).unwrap();
        vertices.push(json!({"id": id, "x": p.x, "y": p.y}));
    }
    let pairs: Vec<(u32, u32)> = c.edge_pairs().collect();
    let index: BTreeMap<(u32, u32), usize> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| ((a.min(b), a.max(b)), k))
        .collect();
    let edges: Vec<Value> = pairs.iter().map(|&(a, b)| json!([a, b])).collect();
    let faces: Vec<Value> = (0..c.face_count())
        .map(|f| {
            let cycle: Vec<usize> = c
                .face_cycle(f)
                .iter()
                .map(|&(a, b)| index[&(a.min(b), a.max(b))])
                .collect();
            json!(cycle)
        })
        .collect();
    let boundary: Vec<usize> = c
        .boundary_edges()
        .iter()
        .map(|&(a, b)| index[&(a.min(b), a.max(b))])
        .collect();
    json!({
        "vertices": vertices,
        "edges": edges,
        "faces": faces,
        "boundary": boundary,
    })
}

/// Rebuild a lattice domain from the document's `epsilon` and `cells`.
/// When a vertex table is also present, it must agree with the cells.
pub fn lattice_from_value(doc: &Value) -> Result<LatticeDomain> {
    let epsilon = as_f64(field(doc, "epsilon")?, "\"epsilon\"")?;
    let mut cells = std::collections::BTreeSet::new();
    for (k, item) in as_array(field(doc, "cells")?, "\"cells\"")?
        .iter()
        .enumerate()
    {
        let pair = as_array(item, &format!("cell {k}"))?;
        if pair.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "cell {k} must be a pair [ix, iy]"
            )));
        }
        let ix = as_i64(&pair[0], &format!("cell {k}: coordinate"))?;
        let iy = as_i64(&pair[1], &format!("cell {k}: coordinate"))?;
        if !cells.insert((ix, iy)) {
            return Err(Error::InvalidInput(format!(
                "cell ({ix}, {iy}) is listed twice"
            )));
        }
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "\"epsilon\" must be a positive finite number, got {epsilon}"
        )));
    }
    let dom = LatticeDomain::from_cells(epsilon, cells)?;
    if let Some(listed) = doc.get("vertices") {
        let listed = as_array(listed, "\"vertices\"")?;
        if listed.len() != dom.complex().vertex_count() {
            return Err(Error::InvalidInput(format!(
                "the vertex table lists {} vertices but the cells induce {}",
                listed.len(),
                dom.complex().vertex_count()
            )));
        }
        for item in listed {
            let id = as_u32(field(item, "id")?, "vertex \"id\"")?;
            let x = as_f64(field(item, "x")?, "vertex \"x\"")?;
            let y = as_f64(field(item, "y")?, "vertex \"y\"")?;
            let (px, py) = dom
                .position(id)
                .ok_or_else(|| Error::InvalidInput(format!("vertex {id} is not on the lattice")))?;
            if (px - x).abs() > 1e-9 || (py - y).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "vertex {id} is listed at ({x}, {y}) but the cells place it at ({px}, {py})"
                )));
            }
        }
    }
    Ok(dom)
}

/// Serialize a lattice domain (complex fields plus `epsilon` and `cells`).
pub fn lattice_to_value(dom: &LatticeDomain) -> Value {
    let mut doc = complex_to_value(dom.complex());
    let obj = doc.as_object_mut().unwrap();
    obj.insert("epsilon".into(), json!(dom.epsilon()));
    let cells: Vec<Value> = dom.cells().map(|(x, y)| json!([x, y])).collect();
    obj.insert("cells".into(), json!(cells));
    doc
}

/// Read a vertex function from the document's `values` table.
pub fn values_from_value(doc: &Value) -> Result<VertexFunction> {
    let mut u = VertexFunction::new();
    for (k, item) in as_array(field(doc, "values")?, "\"values\"")?
        .iter()
        .enumerate()
    {
        let pair = as_array(item, &format!("values entry {k}"))?;
        if pair.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "values entry {k} must be a pair [id, value]"
            )));
        }
        let id = as_u32(&pair[0], &format!("values entry {k}: id"))?;
        let v = as_f64(&pair[1], &format!("values entry {k}: value"))?;
        if u.get(id).is_some() {
            return Err(Error::InvalidInput(format!(
                "vertex {id} has two values"
            )));
        }
        u.set(id, v);
    }
    Ok(u)
}

/// Serialize a vertex function as `[[id, value]]`, sorted by id.
pub fn values_to_value(u: &VertexFunction) -> Value {
    let rows: Vec<Value> = u.iter().map(|(id, v)| json!([id, v])).collect();
    json!(rows)
}

/// Read a boundary vector field from the document's `vectors` table.
pub fn vectors_from_value(doc: &Value) -> Result<BTreeMap<u32, (f64, f64)>> {
    let mut map = BTreeMap::new();
    for (k, item) in as_array(field(doc, "vectors")?, "\"vectors\"")?
        .iter()
        .enumerate()
    {
        let row = as_array(item, &format!("vectors entry {k}"))?;
        if row.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "vectors entry {k} must be a triple [id, vx, vy]"
            )));
        }
        let id = as_u32(&row[0], &format!("vectors entry {k}: id"))?;
        let vx = as_f64(&row[1], &format!("vectors entry {k}: component"))?;
        let vy = as_f64(&row[2], &format!("vectors entry {k}: component"))?;
        if map.insert(id, (vx, vy)).is_some() {
            return Err(Error::InvalidInput(format!(
                "vertex {id} has two vectors"
            )));
        }
    }
    Ok(map)
}

/// Read a 1-form from the document's `form` object.
pub fn form_from_value(doc: &Value) -> Result<OneForm> {
    let form = field(doc, "form")?;
    let mut out = OneForm::new();
    for (k, item) in as_array(field(form, "edges")?, "\"form.edges\"")?
        .iter()
        .enumerate()
    {
        let row = as_array(item, &format!("form edge {k}"))?;
        if row.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "form edge {k} must be a triple [a, b, value]"
            )));
        }
        let a = as_u32(&row[0], &format!("form edge {k}: endpoint"))?;
        let b = as_u32(&row[1], &format!("form edge {k}: endpoint"))?;
        let v = as_f64(&row[2], &format!("form edge {k}: value"))?;
        out.set(a, b, v);
    }
    Ok(out)
}

/// Serialize a 1-form on canonical orientations.
pub fn form_to_value(form: &OneForm) -> Value {
    let rows: Vec<Value> = form
        .iter()
        .map(|((a, b), v)| json!([a, b, v]))
        .collect();
    json!({"edges": rows})
}

/// Serialize the dual graph.  Coordinates are for display only; `phi`, when
/// given, is attached as a form on the dual edges.
pub fn dual_to_value(dual: &DualGraph, c: &PlanarComplex, phi: Option<&DualForm>) -> Value {
    let mut vertices = Vec::new();
    for f in 0..dual.face_count() {
        let cycle = c.face_cycle(f);
        let mut cx = 0.0;
        let mut cy = 0.0;
        for &(a, _) in &cycle {
            let p = c.point(a).unwrap();
            cx += p.x;
            cy += p.y;
        }
        let n = cycle.len() as f64;
        vertices.push(json!({"id": dual.face_vertex(f), "x": cx / n, "y": cy / n}));
    }
    for (k, &(a, b)) in dual.boundary_edges().iter().enumerate() {
        let pa = c.point(a).unwrap();
        let pb = c.point(b).unwrap();
        // Boundary darts keep the interior on their left, so the outward
        // normal is the dart direction rotated clockwise.
        let (dx, dy) = (pb.x - pa.x, pb.y - pa.y);
        let x = (pa.x + pb.x) / 2.0 + dy / 2.0;
        let y = (pa.y + pb.y) / 2.0 - dx / 2.0;
        vertices.push(json!({"id": dual.boundary_vertex(k), "x": x, "y": y}));
    }
    let edges: Vec<Value> = dual
        .edges()
        .iter()
        .map(|e| json!([e.src, e.dst]))
        .collect();
    let dual_of: Vec<Value> = dual
        .edges()
        .iter()
        .map(|e| json!([[e.along.0, e.along.1], [e.src, e.dst]]))
        .collect();
    let mut doc = Map::new();
    doc.insert("vertices".into(), json!(vertices));
    doc.insert("edges".into(), json!(edges));
    doc.insert("dual_of".into(), json!(dual_of));
    if let Some(phi) = phi {
        let rows: Vec<Value> = dual
            .edges()
            .iter()
            .zip(&phi.values)
            .map(|(e, &v)| json!([e.src, e.dst, v]))
            .collect();
        doc.insert("form".into(), json!({ "edges": rows }));
    }
    Value::Object(doc)
}

/// Serialize a vorticity measure as `{"charges": [[ix, iy, q]], "total"}`.
pub fn vorticity_to_value(m: &VorticityMeasure) -> Value {
    let rows: Vec<Value> = m.iter().map(|((x, y), q)| json!([x, y, q])).collect();
    json!({"charges": rows, "total": m.total()})
}

/// Serialize a pipeline report.  `singular_cell` carries the lattice cell
/// of the singular face when the run happened on a lattice domain.
pub fn report_to_value(report: &PipelineReport, singular_cell: Option<(i64, i64)>) -> Value {
    let wrapped: Vec<Value> = report
        .boundary
        .wrapped
        .iter()
        .map(|&(a, b)| json!([a, b]))
        .collect();
    json!({
        "boundary": {
            "wrapped": wrapped,
            "single_wrap": report.boundary.single_wrap,
            "winding": report.boundary.winding,
            "projected_tv": report.boundary.projected_tv,
            "dipole_class": report.boundary.dipole_class,
            "vortex_class": report.boundary.vortex_class,
        },
        "dual_flux": report.dual_flux,
        "dual_boundary_tv": report.dual_boundary_tv,
        "certificate": {
            "flux": report.certificate.flux,
            "boundary_variation": report.certificate.boundary_variation,
            "max_edge_ratio": report.certificate.max_edge_ratio,
            "recursion_depth": report.certificate.recursion_depth,
            "positive_charges": report.certificate.positive_charges,
        },
        "singular_face": report.singular_face,
        "singular_cell": singular_cell.map(|(x, y)| json!([x, y])),
        "singular_charge": report.singular_charge,
        "witness": report.witness.map(|(a, b)| json!([a, b])),
        "max_edge_ratio": report.max_edge_ratio,
    })
}

/// What [`run_pipeline_document`] hands back: the updated document, the
/// typed report, and the lattice cell of the kept charge when the run
/// happened on a lattice.
pub type PipelineDocumentOutcome = (Value, PipelineReport, Option<(i64, i64)>);

/// Run the dipole-removal pipeline on a whole document.
///
/// The document must carry a complex (or lattice) and `"values"`.  On
/// success a copy of the document comes back with the rebuilt values and a
/// `"report"` field.
pub fn run_pipeline_document(
    doc: &Value,
    tolerance: f64,
    rule: X0Rule,
) -> Result<PipelineDocumentOutcome> {
    let u = values_from_value(doc)?;
    let (out, report, cell) = if has_lattice(doc) {
        let dom = lattice_from_value(doc)?;
        let (out, report) = pipeline::run_with(dom.complex(), &u, tolerance, rule)?;
        let cell = report.singular_face.and_then(|f| dom.cell_of_face(f));
        (out, report, cell)
    } else {
        let c = complex_from_value(doc)?;
        let (out, report) = pipeline::run_with(&c, &u, tolerance, rule)?;
        (out, report, None)
    };
    let mut doc = doc.clone();
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::InvalidInput("the document must be a JSON object".into()))?;
    obj.insert("values".into(), values_to_value(&out));
    obj.insert("report".into(), report_to_value(&report, cell));
    Ok((doc, report, cell))
}
