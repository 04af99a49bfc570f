//! Text formats: framework and path documents (JSON) and Gram traces (CSV).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::deformation::{DeformationPath, Sample};
use crate::framework::{EdgeOrbit, PeriodicFramework, QuotientGraph};
use crate::symcone::{eigen_sym, LinearMap, SymMatrix};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported format version {found}; this reader handles version {expected}")]
    Version { found: u64, expected: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error("framework fails validation: {}", .0.join("; "))]
    Validation(Vec<String>),
}

/// How unknown fields are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Unknown fields are reported as warnings.
    #[default]
    Lenient,
    /// Unknown fields are errors.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub value: T,
    pub metadata: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexDoc {
    id: i64,
    position: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    u: i64,
    v: i64,
    gamma: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameworkDoc {
    format_version: u64,
    dim: usize,
    vertices: Vec<VertexDoc>,
    /// Lattice generators, one per entry.
    lattice: Vec<Vec<f64>>,
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleDoc {
    tau: f64,
    positions: Vec<Vec<f64>>,
    lattice: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PathDoc {
    format_version: u64,
    framework: FrameworkDoc,
    samples: Vec<SampleDoc>,
    /// Upper triangles (row-major) of dω/dτ at each sample, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gram_velocities: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

const FRAMEWORK_KEYS: &[&str] = &["format_version", "dim", "vertices", "lattice", "edges", "metadata"];
const VERTEX_KEYS: &[&str] = &["id", "position"];
const EDGE_KEYS: &[&str] = &["u", "v", "gamma", "length"];
const PATH_KEYS: &[&str] = &["format_version", "framework", "samples", "gram_velocities", "metadata"];
const SAMPLE_KEYS: &[&str] = &["tau", "positions", "lattice"];

fn parse_error(e: serde_json::Error) -> FormatError {
    FormatError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn unknown_keys(v: &Value, allowed: &[&str], at: &str, out: &mut Vec<String>) {
    if let Value::Object(map) = v {
        for k in map.keys() {
            if !allowed.contains(&k.as_str()) {
                out.push(format!("unknown field `{k}` in {at}"));
            }
        }
    }
}

fn framework_unknowns(v: &Value, at: &str, out: &mut Vec<String>) {
    unknown_keys(v, FRAMEWORK_KEYS, at, out);
    for (list, keys, name) in [("vertices", VERTEX_KEYS, "vertex"), ("edges", EDGE_KEYS, "edge")] {
        if let Some(Value::Array(items)) = v.get(list) {
            for (i, item) in items.iter().enumerate() {
                unknown_keys(item, keys, &format!("{at}{name} {i}"), out);
            }
        }
    }
}

fn check_unknowns(found: Vec<String>, mode: ParseMode) -> Result<Vec<String>, FormatError> {
    match (mode, found.first()) {
        (ParseMode::Strict, Some(first)) => Err(FormatError::Invalid(first.clone())),
        _ => Ok(found),
    }
}

fn check_version(found: u64) -> Result<(), FormatError> {
    if found != FORMAT_VERSION {
        return Err(FormatError::Version { found, expected: FORMAT_VERSION });
    }
    Ok(())
}

fn version_of(v: &Value) -> Result<(), FormatError> {
    match v.get("format_version").and_then(Value::as_u64) {
        Some(found) => check_version(found),
        None => Err(FormatError::Invalid("missing or non-integer `format_version`".into())),
    }
}

fn lattice_from_doc(cols: &[Vec<f64>], dim: usize, what: &str) -> Result<LinearMap, FormatError> {
    if cols.len() != dim || cols.iter().any(|c| c.len() != dim) {
        return Err(FormatError::Invalid(format!("{what} must list {dim} generators of {dim} coordinates")));
    }
    LinearMap::from_columns(cols).map_err(|e| FormatError::Invalid(format!("{what}: {e}")))
}

fn lattice_to_doc(l: &LinearMap) -> Vec<Vec<f64>> {
    l.columns()
}

fn framework_from_doc(doc: FrameworkDoc) -> Result<PeriodicFramework, FormatError> {
    check_version(doc.format_version)?;
    let d = doc.dim;
    let lattice = lattice_from_doc(&doc.lattice, d, "lattice")?;
    let mut index = BTreeMap::new();
    let mut positions = Vec::with_capacity(doc.vertices.len());
    for (i, v) in doc.vertices.iter().enumerate() {
        if v.position.len() != d {
            return Err(FormatError::Invalid(format!("vertex {} has {} coordinates, expected {d}", v.id, v.position.len())));
        }
        if index.insert(v.id, i).is_some() {
            return Err(FormatError::Invalid(format!("vertex id {} appears twice", v.id)));
        }
        positions.push(v.position.clone());
    }
    let n = positions.len();
    let mut f = PeriodicFramework {
        graph: QuotientGraph { dim: d, n_vertex_orbits: n, edges: Vec::new() },
        positions,
        lattice,
    };
    for (k, e) in doc.edges.iter().enumerate() {
        let lookup = |id: i64| {
            index.get(&id).copied().ok_or_else(|| {
                FormatError::Invalid(format!("edge {k} references vertex id {id}, but the file defines {n} vertices"))
            })
        };
        let (u, v) = (lookup(e.u)?, lookup(e.v)?);
        if e.gamma.len() != d {
            return Err(FormatError::Invalid(format!("edge {k} has a period of length {}, expected {d}", e.gamma.len())));
        }
        let orbit = EdgeOrbit::new(u, v, e.gamma.clone(), 0.0);
        let length = match e.length {
            Some(l) => l,
            None => crate::framework::norm(&f.edge_vector(&orbit)),
        };
        f.graph.edges.push(EdgeOrbit { length, ..orbit });
    }
    let violations = f.validate();
    if !violations.is_empty() {
        return Err(FormatError::Validation(violations.iter().map(|v| v.to_string()).collect()));
    }
    Ok(f)
}

fn framework_to_doc(f: &PeriodicFramework, metadata: &BTreeMap<String, String>) -> FrameworkDoc {
    FrameworkDoc {
        format_version: FORMAT_VERSION,
        dim: f.dim(),
        vertices: f.positions.iter().enumerate().map(|(i, p)| VertexDoc { id: i as i64, position: p.clone() }).collect(),
        lattice: lattice_to_doc(&f.lattice),
        edges: f
            .edges()
            .iter()
            .map(|e| EdgeDoc { u: e.u as i64, v: e.v as i64, gamma: e.gamma.clone(), length: Some(e.length) })
            .collect(),
        metadata: metadata.clone(),
    }
}

fn to_text<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Reads a framework document.
pub fn parse_framework(text: &str, mode: ParseMode) -> Result<Loaded<PeriodicFramework>, FormatError> {
    let raw: Value = serde_json::from_str(text).map_err(parse_error)?;
    version_of(&raw)?;
    let mut found = Vec::new();
    framework_unknowns(&raw, "", &mut found);
    let warnings = check_unknowns(found, mode)?;
    let doc: FrameworkDoc = serde_json::from_str(text).map_err(parse_error)?;
    let metadata = doc.metadata.clone();
    Ok(Loaded { value: framework_from_doc(doc)?, metadata, warnings })
}

/// Writes a framework document. Floats use the shortest representation that
/// reads back to the same value.
pub fn framework_to_string(f: &PeriodicFramework, metadata: &BTreeMap<String, String>) -> String {
    to_text(&framework_to_doc(f, metadata))
}

/// Reads a path document.
pub fn parse_path(text: &str, mode: ParseMode) -> Result<Loaded<DeformationPath>, FormatError> {
    let raw: Value = serde_json::from_str(text).map_err(parse_error)?;
    version_of(&raw)?;
    let mut found = Vec::new();
    unknown_keys(&raw, PATH_KEYS, "path", &mut found);
    if let Some(fw) = raw.get("framework") {
        framework_unknowns(fw, "framework ", &mut found);
    }
    if let Some(Value::Array(items)) = raw.get("samples") {
        for (i, item) in items.iter().enumerate() {
            unknown_keys(item, SAMPLE_KEYS, &format!("sample {i}"), &mut found);
        }
    }
    let warnings = check_unknowns(found, mode)?;
    let doc: PathDoc = serde_json::from_str(text).map_err(parse_error)?;
    let metadata = doc.metadata.clone();
    let f0 = framework_from_doc(doc.framework)?;
    let d = f0.dim();
    let samples = doc
        .samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(Sample { tau: s.tau, positions: s.positions, lattice: lattice_from_doc(&s.lattice, d, &format!("sample {i}"))? })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let velocities = match doc.gram_velocities {
        None => None,
        Some(rows) => Some(
            rows.into_iter()
                .map(|u| SymMatrix::from_upper(d, u).map_err(|e| FormatError::Invalid(format!("gram velocity: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let mut path = DeformationPath::new(f0, samples).map_err(|e| FormatError::Invalid(e.to_string()))?;
    if let Some(v) = velocities {
        if v.len() != path.len() {
            return Err(FormatError::Invalid("one Gram velocity per sample is required".into()));
        }
        path.gram_velocities = Some(v);
    }
    Ok(Loaded { value: path, metadata, warnings })
}

pub fn path_to_string(p: &DeformationPath, metadata: &BTreeMap<String, String>) -> String {
    let doc = PathDoc {
        format_version: FORMAT_VERSION,
        framework: framework_to_doc(&p.framework0, &BTreeMap::new()),
        samples: p
            .samples
            .iter()
            .map(|s| SampleDoc { tau: s.tau, positions: s.positions.clone(), lattice: lattice_to_doc(&s.lattice) })
            .collect(),
        gram_velocities: p.gram_velocities.as_ref().map(|v| v.iter().map(|m| m.upper().to_vec()).collect()),
        metadata: metadata.clone(),
    };
    to_text(&doc)
}

/// Fixed-width scientific notation used in traces; negative zero prints as zero.
pub fn fmt_sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.9e}")
}

fn trace_header(d: usize) -> Vec<String> {
    let mut h = vec!["tau".to_string()];
    for i in 0..d {
        for j in i..d {
            h.push(format!("w{}{}", i + 1, j + 1));
        }
    }
    h.push("det_w".into());
    h.push("min_eig_dw".into());
    h
}

/// CSV trace of the Gram curve: τ, upper triangle of ω, det ω and the least
/// eigenvalue of dω/dτ, one row per sample.
pub fn gram_trace_csv(p: &DeformationPath) -> crate::Result<String> {
    let d = p.framework0.dim();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let csv_err = |e: csv::Error| crate::Error::InvalidInput(e.to_string());
    w.write_record(trace_header(d)).map_err(csv_err)?;
    for ((s, g), v) in p.samples.iter().zip(p.grams()).zip(p.gram_velocities()) {
        let mut row = vec![fmt_sci(s.tau)];
        row.extend(g.upper().iter().map(|&x| fmt_sci(x)));
        row.push(fmt_sci(g.determinant()));
        row.push(fmt_sci(eigen_sym(&v)?.values[0]));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
}

/// Upper Cholesky factor R with RᵀR = ω, used as a lattice basis.
fn lattice_with_gram(g: &SymMatrix) -> Option<LinearMap> {
    let d = g.dim();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| g.get(i, j));
    let l = nalgebra::Cholesky::new(m)?.l();
    let r = l.transpose();
    LinearMap::from_column_major(d, r.as_slice().to_vec()).ok()
}

/// Rebuilds a bare-lattice path from a Gram trace. Each lattice is the
/// Cholesky factor of the recorded Gram matrix, so Gram-based verdicts match
/// the original path up to the printed precision.
pub fn parse_gram_trace(text: &str) -> Result<DeformationPath, FormatError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| FormatError::Invalid(e.to_string()))?.clone();
    let cols = header.len();
    let d = (1..=crate::symcone::MAX_DIM)
        .find(|d| d * (d + 1) / 2 + 3 == cols)
        .ok_or_else(|| FormatError::Invalid(format!("{cols} columns do not match any dimension")))?;
    let expected = trace_header(d);
    if header.iter().zip(&expected).any(|(a, b)| a != b) {
        return Err(FormatError::Invalid(format!("header must be {}", expected.join(","))));
    }
    let mut taus = Vec::new();
    let mut lattices = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(row + 2);
            FormatError::Parse { line, column: 1, message: e.to_string() }
        })?;
        let nums = rec
            .iter()
            .enumerate()
            .map(|(c, x)| {
                x.trim().parse::<f64>().map_err(|_| FormatError::Parse {
                    line: row + 2,
                    column: c + 1,
                    message: format!("`{x}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n_upper = d * (d + 1) / 2;
        let g = SymMatrix::from_upper(d, nums[1..1 + n_upper].to_vec()).map_err(|e| FormatError::Invalid(e.to_string()))?;
        let l = lattice_with_gram(&g)
            .ok_or_else(|| FormatError::Invalid(format!("row {} holds a Gram matrix that is not positive definite", row + 1)))?;
        taus.push(nums[0]);
        lattices.push(l);
    }
    DeformationPath::lattice_only(&taus, lattices).map_err(|e| FormatError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{check_path_psd, PsdVerdict};
    use crate::framework::{catalog, CatalogId, CatalogKind};

    #[test]
    fn framework_round_trip_is_exact() {
        for kind in CatalogKind::ALL {
            let f = catalog(&CatalogId::new(kind)).unwrap();
            let text = framework_to_string(&f, &BTreeMap::new());
            let back = parse_framework(&text, ParseMode::Strict).unwrap();
            assert!(back.warnings.is_empty());
            assert_eq!(back.value.gram(), f.gram());
            assert_eq!(back.value, f);
            assert_eq!(framework_to_string(&back.value, &BTreeMap::new()), text);
        }
    }

    const SMALL: &str = r#"{
  "format_version": 1,
  "dim": 2,
  "vertices": [{"id": 0, "position": [0.0, 0.0]}, {"id": 1, "position": [0.5, 0.5]}],
  "lattice": [[1.0, 0.0], [0.0, 1.0]],
  "edges": [{"u": 0, "v": 1, "gamma": [0, 0]}]
}"#;

    #[test]
    fn lengths_are_derived_when_absent() {
        let f = parse_framework(SMALL, ParseMode::Strict).unwrap().value;
        assert!((f.edges()[0].length - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn missing_vertex_is_named() {
        let text = SMALL.replace("\"v\": 1", "\"v\": 99");
        let err = parse_framework(&text, ParseMode::Lenient).unwrap_err();
        assert!(err.to_string().contains("edge 0 references vertex id 99"), "{err}");
    }

    #[test]
    fn unknown_fields_by_mode() {
        let text = SMALL.replace("\"dim\": 2,", "\"dim\": 2, \"colour\": \"red\",");
        let lenient = parse_framework(&text, ParseMode::Lenient).unwrap();
        assert_eq!(lenient.warnings, vec!["unknown field `colour` in ".to_string()]);
        assert!(matches!(parse_framework(&text, ParseMode::Strict), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let text = SMALL.replace("\"dim\": 2,", "\"dim\": 2,,");
        match parse_framework(&text, ParseMode::Lenient) {
            Err(FormatError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 12)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_is_checked() {
        let text = SMALL.replace("\"format_version\": 1", "\"format_version\": 7");
        assert_eq!(parse_framework(&text, ParseMode::Lenient), Err(FormatError::Version { found: 7, expected: 1 }));
    }

    #[test]
    fn path_round_trip() {
        let p = DeformationPath::silica_tilt(CatalogKind::QuartzBeta, 1.0, 0.2, 12).unwrap();
        let text = path_to_string(&p, &BTreeMap::new());
        let back = parse_path(&text, ParseMode::Strict).unwrap().value;
        assert_eq!(back, p);
        assert_eq!(path_to_string(&back, &BTreeMap::new()), text);
    }

    #[test]
    fn trace_reimport_keeps_verdict() {
        for (from, to) in [(1.0, 0.05), (0.05, 1.0)] {
            let p = DeformationPath::silica_tilt(CatalogKind::CristobaliteBeta, from, to, 60).unwrap();
            let csv = gram_trace_csv(&p).unwrap();
            assert!(csv.starts_with("tau,w11,w12,w13,w22,w23,w33,det_w,min_eig_dw\r\n"));
            let q = parse_gram_trace(&csv).unwrap();
            assert_eq!(q.len(), 60);
            let a = check_path_psd(&p, 1e-9).unwrap();
            let b = check_path_psd(&q, 1e-9).unwrap();
            assert_eq!(a.is_auxetic(), b.is_auxetic());
            assert_eq!(a == PsdVerdict::Auxetic, b == PsdVerdict::Auxetic);
        }
    }
}
