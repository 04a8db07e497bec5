//! Line-oriented `plmesh 1` text format.
//!
//! ```text
//! plmesh 1
//! v 0
//! v 1
//! v 2
//! f 0 1 2
//! len 0 1 1.0      # optional; if present, every edge needs one
//! ```
//!
//! Blank lines and `#` comments are ignored. Vertex ids must be dense in
//! `[0, |V|)`; edges are inferred from faces.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{MeshError, Triangulation};

/// A parsed mesh file: incidence plus optional per-edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDocument {
    pub mesh: Triangulation,
    /// Indexed by edge id of `mesh`.
    pub lengths: Option<Vec<f64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_mesh(text: &str) -> Result<MeshDocument, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, "plmesh 1")) => {}
        Some((n, other)) => {
            return Err(parse_err(
                n,
                format!("expected header `plmesh 1`, found `{other}`"),
            ))
        }
        None => return Err(MeshError::Empty),
    }

    let mut vertex_ids: Vec<usize> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut face_lines: Vec<usize> = Vec::new();
    let mut lens: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (n, line) in lines {
        let mut toks = line.split_whitespace();
        let kind = toks.next().unwrap_or("");
        match kind {
            "v" => vertex_ids.push(parse_field(toks.next(), n, "vertex id")?),
            "f" => {
                let a = parse_field(toks.next(), n, "face vertex")?;
                let b = parse_field(toks.next(), n, "face vertex")?;
                let c = parse_field(toks.next(), n, "face vertex")?;
                faces.push([a, b, c]);
                face_lines.push(n);
            }
            "len" => {
                let a = parse_field(toks.next(), n, "edge endpoint")?;
                let b = parse_field(toks.next(), n, "edge endpoint")?;
                let x: f64 = parse_field(toks.next(), n, "length")?;
                lens.push((n, a, b, x));
            }
            other => return Err(parse_err(n, format!("unknown record `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(n, "trailing tokens"));
        }
    }

    if vertex_ids.is_empty() {
        return Err(MeshError::Empty);
    }
    let count = vertex_ids.len();
    let mut present = vec![false; count];
    for &id in &vertex_ids {
        if id >= count {
            let missing = present.iter().position(|p| !p).unwrap_or(0);
            return Err(MeshError::NonDenseVertexIds { count, missing });
        }
        if present[id] {
            return Err(MeshError::DuplicateVertex(id));
        }
        present[id] = true;
    }

    let mesh = Triangulation::from_faces(count, &faces)?;

    let lengths = if lens.is_empty() {
        None
    } else {
        let mut out = vec![f64::NAN; mesh.num_edges()];
        for (n, a, b, x) in lens {
            let e = mesh
                .edge_between(a, b)
                .ok_or_else(|| parse_err(n, format!("length given for non-edge {a}-{b}")))?;
            if !out[e].is_nan() {
                return Err(parse_err(n, format!("duplicate length for edge {a}-{b}")));
            }
            if !(x.is_finite() && x > 0.0) {
                return Err(parse_err(
                    n,
                    format!("edge length must be positive, got {x}"),
                ));
            }
            out[e] = x;
        }
        if let Some(e) = out.iter().position(|x| x.is_nan()) {
            let [a, b] = mesh.edge(e);
            return Err(parse_err(0, format!("missing length for edge {a}-{b}")));
        }
        Some(out)
    };
    Ok(MeshDocument { mesh, lengths })
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<MeshDocument, MeshError> {
    parse_mesh(&fs::read_to_string(path)?)
}

/// Renders `t` (and optional per-edge lengths) in the `plmesh 1` format.
pub fn write_mesh(t: &Triangulation, lengths: Option<&[f64]>) -> String {
    let mut out = String::from("plmesh 1\n");
    for v in 0..t.num_vertices() {
        let _ = writeln!(out, "v {v}");
    }
    for &[a, b, c] in t.faces() {
        let _ = writeln!(out, "f {a} {b} {c}");
    }
    if let Some(lengths) = lengths {
        for (e, &[a, b]) in t.edges().iter().enumerate() {
            let _ = writeln!(out, "len {a} {b} {}", lengths[e]);
        }
    }
    out
}

pub fn save_mesh(
    t: &Triangulation,
    lengths: Option<&[f64]>,
    path: impl AsRef<Path>,
) -> Result<(), MeshError> {
    fs::write(path, write_mesh(t, lengths))?;
    Ok(())
}
