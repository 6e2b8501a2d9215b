//! File formats.
//!
//! * Edge list CSV, header `i,j`: one row per undirected edge, 0-based ids.
//! * Covariate CSV, header `id,y,x1,...,xk`: one row per agent; this file
//!   fixes `n` (isolated agents are allowed).
//! * Sample JSON bundling both, plus latent draws when present.
//! * Codegree matrix as dense CSV (header `j0,...,j{n-1}`) or as a binary
//!   fixture: `n` as little-endian `u64`, then `n²` little-endian `f64`
//!   in row-major order.
//! * λ̂ CSV, header `id,lambda_hat` (empty cell when not estimable).
//!
//! All writers go through [`write_atomic`]: a temporary file in the target
//! directory renamed into place, so failed runs leave no partial output.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distance::CodegreeMatrix;
use crate::error::{Error, Result};
use crate::model::{Adjacency, LatentDraws, NetworkSample};

/// Writes `bytes` to `path` via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn parse_err(path: &Path, line: u64, column: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        file: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    parse_err(path, line, 0, e.to_string())
}

fn check_header(path: &Path, got: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    for (c, want) in expected.iter().enumerate() {
        match got.get(c) {
            Some(h) if h == *want => {}
            other => {
                return Err(parse_err(
                    path,
                    1,
                    c as u64 + 1,
                    format!("expected header `{want}`, found `{}`", other.unwrap_or("")),
                ))
            }
        }
    }
    Ok(())
}

fn field<T: std::str::FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    column: usize,
    what: &str,
) -> Result<T> {
    let line = record.position().map(|p| p.line()).unwrap_or(0);
    let raw = record.get(column).ok_or_else(|| {
        parse_err(path, line, column as u64 + 1, format!("missing {what}"))
    })?;
    raw.parse().map_err(|_| {
        parse_err(path, line, column as u64 + 1, format!("invalid {what} `{raw}`"))
    })
}

/// Reads an edge list. Self-links are rejected with the offending line.
pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize)>> {
    let mut rdr = csv_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    check_header(path, &header, &["i", "j"])?;
    if header.len() != 2 {
        return Err(parse_err(path, 1, 3, "edge list has exactly two columns"));
    }
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let i: usize = field(path, &rec, 0, "agent id")?;
        let j: usize = field(path, &rec, 1, "agent id")?;
        if i == j {
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            return Err(Error::Validation(format!(
                "{}:{line}: self-link ({i},{i}) is not allowed",
                path.display()
            )));
        }
        edges.push((i.min(j), i.max(j)));
    }
    Ok(edges)
}

pub fn edges_to_csv(adj: &Adjacency) -> String {
    let mut out = String::from("i,j\n");
    for (i, j) in adj.edges() {
        out.push_str(&format!("{i},{j}\n"));
    }
    out
}

/// Covariates and outcomes ordered by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    pub x: DMatrix<f64>,
    pub y: Vec<u8>,
}

/// Reads `id,y,x1,...,xk`. Ids must cover `0..n` exactly once.
pub fn read_covariates(path: &Path) -> Result<Covariates> {
    let mut rdr = csv_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let k = header.len().saturating_sub(2);
    if k == 0 {
        return Err(parse_err(path, 1, 3, "need at least one covariate column x1"));
    }
    let names: Vec<String> = (1..=k).map(|c| format!("x{c}")).collect();
    let mut expected = vec!["id", "y"];
    expected.extend(names.iter().map(String::as_str));
    check_header(path, &header, &expected)?;

    let mut rows: Vec<Option<(u8, Vec<f64>)>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let id: usize = field(path, &rec, 0, "id")?;
        let y: u8 = field(path, &rec, 1, "outcome")?;
        if y > 1 {
            return Err(parse_err(path, line, 2, format!("outcome {y} is not 0/1")));
        }
        let mut xs = Vec::with_capacity(k);
        for c in 0..k {
            let v: f64 = field(path, &rec, c + 2, "covariate")?;
            if !v.is_finite() {
                return Err(parse_err(path, line, c as u64 + 3, "covariate is not finite"));
            }
            xs.push(v);
        }
        if id >= rows.len() {
            rows.resize(id + 1, None);
        }
        if rows[id].is_some() {
            return Err(parse_err(path, line, 1, format!("duplicate id {id}")));
        }
        rows[id] = Some((y, xs));
    }
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(Error::Validation(format!(
            "{}: ids must be contiguous from 0; id {missing} is missing",
            path.display()
        )));
    }
    let n = rows.len();
    let mut x = DMatrix::zeros(n, k);
    let mut y = Vec::with_capacity(n);
    for (i, row) in rows.into_iter().enumerate() {
        let (yi, xs) = row.expect("checked above");
        y.push(yi);
        for (c, v) in xs.into_iter().enumerate() {
            x[(i, c)] = v;
        }
    }
    Ok(Covariates { x, y })
}

pub fn covariates_to_csv(x: &DMatrix<f64>, y: &[u8]) -> String {
    let mut out = String::from("id,y");
    for c in 1..=x.ncols() {
        out.push_str(&format!(",x{c}"));
    }
    out.push('\n');
    for (i, yi) in y.iter().enumerate() {
        out.push_str(&format!("{i},{yi}"));
        for c in 0..x.ncols() {
            out.push_str(&format!(",{}", x[(i, c)]));
        }
        out.push('\n');
    }
    out
}

/// Joins an edge list with covariates; the covariate file fixes `n`.
pub fn assemble_sample(edges: &[(usize, usize)], cov: Covariates) -> Result<NetworkSample> {
    let n = cov.y.len();
    if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
        let id = if i >= n { i } else { j };
        return Err(Error::Validation(format!(
            "edge ({i},{j}) references id {id}, which has no covariate row (n = {n})"
        )));
    }
    NetworkSample::new(cov.x, cov.y, Adjacency::from_edges(n, edges)?, None)
}

pub fn load_sample(edges_path: &Path, covariates_path: &Path) -> Result<NetworkSample> {
    let edges = read_edges(edges_path)?;
    let cov = read_covariates(covariates_path)?;
    assemble_sample(&edges, cov)
}

#[derive(Debug, Serialize, Deserialize)]
struct LatentDoc {
    w: Vec<f64>,
    eps: Vec<f64>,
    eta: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleDoc {
    n: usize,
    k: usize,
    edges: Vec<(usize, usize)>,
    y: Vec<u8>,
    x: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    latent: Option<LatentDoc>,
}

pub fn sample_to_json(sample: &NetworkSample) -> Result<String> {
    let (n, k) = (sample.n(), sample.k());
    let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|c| m[(i, c)]).collect())
            .collect()
    };
    let doc = SampleDoc {
        n,
        k,
        edges: sample.adjacency().edges(),
        y: sample.y().to_vec(),
        x: rows(sample.x()),
        latent: sample.latent().map(|l| LatentDoc {
            w: l.w.clone(),
            eps: l.eps.clone(),
            eta: rows(&l.eta),
        }),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn sample_from_json(text: &str) -> Result<NetworkSample> {
    let doc: SampleDoc = serde_json::from_str(text)?;
    let (n, k) = (doc.n, doc.k);
    if doc.x.len() != n || doc.x.iter().any(|r| r.len() != k) {
        return Err(Error::Validation("covariate rows do not match n x k".into()));
    }
    let x = DMatrix::from_fn(n, k, |i, c| doc.x[i][c]);
    let latent = match doc.latent {
        Some(l) => {
            if l.eta.len() != n || l.eta.iter().any(|r| r.len() != n) {
                return Err(Error::Validation("latent eta is not n x n".into()));
            }
            Some(LatentDraws {
                w: l.w,
                eps: l.eps,
                eta: DMatrix::from_fn(n, n, |i, j| l.eta[i][j]),
            })
        }
        None => None,
    };
    NetworkSample::new(x, doc.y, Adjacency::from_edges(n, &doc.edges)?, latent)
}

pub fn codegree_to_csv(c: &CodegreeMatrix) -> String {
    let n = c.n();
    let header: Vec<String> = (0..n).map(|j| format!("j{j}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", c.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn codegree_to_bytes(c: &CodegreeMatrix) -> Vec<u8> {
    let n = c.n();
    let mut out = Vec::with_capacity(8 + 8 * n * n);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for i in 0..n {
        for j in 0..n {
            out.extend_from_slice(&c.get(i, j).to_le_bytes());
        }
    }
    out
}

pub fn codegree_from_bytes(bytes: &[u8]) -> Result<CodegreeMatrix> {
    let bad = |m: &str| Error::Validation(format!("codegree fixture: {m}"));
    let head: [u8; 8] = bytes
        .get(..8)
        .ok_or_else(|| bad("missing size prefix"))?
        .try_into()
        .expect("8 bytes");
    let n = u64::from_le_bytes(head) as usize;
    let body = &bytes[8..];
    if n.checked_mul(n).and_then(|c| c.checked_mul(8)) != Some(body.len()) {
        return Err(bad("payload length does not match n"));
    }
    let vals: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    CodegreeMatrix::from_values(DMatrix::from_row_slice(n, n, &vals))
}

pub fn lambda_to_csv(values: &[Option<f64>]) -> String {
    let mut out = String::from("id,lambda_hat\n");
    for (i, v) in values.iter().enumerate() {
        match v {
            Some(v) => out.push_str(&format!("{i},{v}\n")),
            None => out.push_str(&format!("{i},\n")),
        }
    }
    out
}
