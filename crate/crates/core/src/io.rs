//! On-disk formats.
//!
//! - Domain specs: JSON `{"dimension", "lattice_basis" (row-major), "cells":
//!   [{"box": [[a, b], ..], "offsets": [[..], ..]}]}`. Unknown keys are rejected.
//! - Samples: CSV `cell_id,u_1..u_d,re_F0,im_F0,..` plus a JSON sidecar
//!   `<file>.meta.json` carrying `delta`, `eta`, `(v, q)` and the per-cell index
//!   order of the `F` columns.
//! - Results: CSV `y_1..y_d,re_f,im_f,residual`.
//!
//! JSON written here is canonical: keys sorted, floats with 17 significant
//! digits, so serialising a parsed file reproduces it byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{Cell, MultiTileDomain};
use crate::error::Error;
use crate::lattice::Lattice;
use crate::reconstruction::{Provenance, SpectralData, SpectralSample};
use crate::system::ShiftSet;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Domain(#[from] Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub offsets: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpecFile {
    pub dimension: usize,
    pub lattice_basis: Vec<Vec<f64>>,
    pub cells: Vec<CellSpec>,
}

impl DomainSpecFile {
    pub fn parse(text: &str) -> IoResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_domain(&self) -> IoResult<MultiTileDomain> {
        let d = self.dimension;
        if d == 0 || self.lattice_basis.len() != d {
            return Err(IoError::Format(format!(
                "lattice_basis must have {d} rows for dimension {d}"
            )));
        }
        let lattice = Lattice::from_rows(&self.lattice_basis)?;
        let cells = self
            .cells
            .iter()
            .map(|c| {
                Cell::new(
                    c.bounds.iter().map(|b| b[0]).collect(),
                    c.bounds.iter().map(|b| b[1]).collect(),
                    c.offsets.clone(),
                )
            })
            .collect();
        Ok(MultiTileDomain::new(lattice, cells)?)
    }

    pub fn from_domain(domain: &MultiTileDomain) -> Self {
        Self {
            dimension: domain.dim(),
            lattice_basis: domain.lattice().basis_rows(),
            cells: domain
                .cells()
                .iter()
                .map(|c| CellSpec {
                    bounds: c.lower().iter().zip(c.upper()).map(|(&a, &b)| [a, b]).collect(),
                    offsets: c.offsets().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("plain data serialises"))
    }
}

pub fn read_domain(path: &Path) -> IoResult<MultiTileDomain> {
    DomainSpecFile::parse(&read_text(path)?)?.to_domain()
}

fn read_text(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Sorted keys, integers as integers, floats as `{:.16e}`.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out.push('\n');
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> IoResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let wrap = |source| IoError::File {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(wrap)?;
    tmp.write_all(bytes).map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellIndexMeta {
    pub cell: usize,
    pub indices: Vec<Vec<usize>>,
}

/// Sidecar metadata of a samples file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesMeta {
    pub dimension: usize,
    pub k: usize,
    pub delta: Vec<f64>,
    pub eta: Vec<i64>,
    pub v: Vec<f64>,
    pub q: Vec<u64>,
    /// `"exact-pointwise"` or `"coefficient-truncated"`.
    pub provenance: String,
    pub radius: Option<i64>,
    pub cells: Vec<CellIndexMeta>,
}

impl SamplesMeta {
    pub fn new(shifts: &ShiftSet, v: &[f64], q: &[u64], provenance: Provenance, ncells: usize) -> Self {
        let (provenance, radius) = match provenance {
            Provenance::ExactPointwise => ("exact-pointwise".to_string(), None),
            Provenance::CoefficientTruncated { radius } => ("coefficient-truncated".to_string(), Some(radius)),
        };
        Self {
            dimension: shifts.delta().len(),
            k: shifts.indices(0).len(),
            delta: shifts.delta().to_vec(),
            eta: shifts.eta_coords().to_vec(),
            v: v.to_vec(),
            q: q.to_vec(),
            provenance,
            radius,
            cells: (0..ncells)
                .map(|c| CellIndexMeta {
                    cell: c,
                    indices: shifts.indices(c).0.clone(),
                })
                .collect(),
        }
    }

    pub fn provenance(&self) -> IoResult<Provenance> {
        match (self.provenance.as_str(), self.radius) {
            ("exact-pointwise", _) => Ok(Provenance::ExactPointwise),
            ("coefficient-truncated", Some(radius)) => Ok(Provenance::CoefficientTruncated { radius }),
            (other, _) => Err(IoError::Format(format!("unknown provenance {other:?}"))),
        }
    }
}

pub fn meta_path(samples: &Path) -> PathBuf {
    let mut s = samples.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn samples_header(d: usize, k: usize) -> Vec<String> {
    let mut h = vec!["cell_id".to_string()];
    h.extend((1..=d).map(|i| format!("u_{i}")));
    for s in 0..k {
        h.push(format!("re_F{s}"));
        h.push(format!("im_F{s}"));
    }
    h
}

/// Writes the samples CSV and its sidecar.
pub fn write_samples(path: &Path, data: &SpectralData, meta: &SamplesMeta) -> IoResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(samples_header(meta.dimension, meta.k))?;
    for s in &data.samples {
        let mut rec = vec![s.cell.to_string()];
        rec.extend(s.u.iter().map(|x| format_float(*x)));
        for z in &s.values {
            rec.push(format_float(z.re));
            rec.push(format_float(z.im));
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Format(e.to_string()))?;
    write_atomic(path, &bytes)?;
    let meta_json = canonical_json(&serde_json::to_value(meta)?);
    write_atomic(&meta_path(path), meta_json.as_bytes())
}

/// Reads a samples file, re-ordering each row's `F` columns into the
/// shift-index order of `shifts` when the sidecar lists a different order.
pub fn read_samples(path: &Path, domain: &MultiTileDomain, shifts: &ShiftSet) -> IoResult<(SpectralData, SamplesMeta)> {
    let meta: SamplesMeta = serde_json::from_str(&read_text(&meta_path(path))?)?;
    let (d, k) = (domain.dim(), domain.k());
    if meta.dimension != d || meta.k != k {
        return Err(IoError::Format(format!(
            "sidecar describes d={}, k={} but the domain has d={d}, k={k}",
            meta.dimension, meta.k
        )));
    }
    if meta.cells.len() != domain.cells().len() {
        return Err(IoError::Format("sidecar cell count does not match the domain".into()));
    }
    let mut perms = Vec::with_capacity(meta.cells.len());
    for (c, cm) in meta.cells.iter().enumerate() {
        let ours = shifts.indices(c);
        let perm: Option<Vec<usize>> = ours
            .iter()
            .map(|j| cm.indices.iter().position(|x| x == j))
            .collect();
        match perm {
            Some(p) if cm.indices.len() == k && cm.cell == c => perms.push(p),
            _ => {
                return Err(IoError::Format(format!(
                    "cell {c}: sidecar index set does not match the shift index set of the certificate"
                )))
            }
        }
    }

    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != samples_header(d, k) {
        return Err(IoError::Format(format!(
            "expected {} columns (cell_id, u_1..u_{d}, re/im pairs F0..F{}), found header {:?}",
            1 + d + 2 * k,
            k - 1,
            header
        )));
    }
    let mut samples = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> IoResult<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| IoError::Format(format!("row {}: column {} is not a number", line + 1, i + 1)))
        };
        let cell: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("row {}: bad cell_id", line + 1)))?;
        if cell >= perms.len() {
            return Err(IoError::Format(format!("row {}: cell_id {cell} out of range", line + 1)));
        }
        let u = (1..=d).map(num).collect::<IoResult<Vec<f64>>>()?;
        let file_values = (0..k)
            .map(|s| Ok(Complex64::new(num(1 + d + 2 * s)?, num(2 + d + 2 * s)?)))
            .collect::<IoResult<Vec<Complex64>>>()?;
        let values = perms[cell].iter().map(|&p| file_values[p]).collect();
        samples.push(SpectralSample { cell, u, values });
    }
    Ok((
        SpectralData {
            provenance: meta.provenance()?,
            samples,
        },
        meta,
    ))
}

/// One row of a result file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub y: Vec<f64>,
    pub value: Complex64,
    pub residual: f64,
}

pub fn write_results(path: &Path, d: usize, rows: &[ResultRow]) -> IoResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=d).map(|i| format!("y_{i}")).collect();
    header.extend(["re_f", "im_f", "residual"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.y.iter().map(|x| format_float(*x)).collect();
        rec.push(format_float(r.value.re));
        rec.push(format_float(r.value.im));
        rec.push(format_float(r.residual));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Format(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_results(path: &Path) -> IoResult<Vec<ResultRow>> {
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let ncols = reader.headers()?.len();
    if ncols < 4 {
        return Err(IoError::Format("result file needs y_1.., re_f, im_f, residual".into()));
    }
    let d = ncols - 3;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| IoError::Format(format!("bad number {s:?}"))))
            .collect::<IoResult<_>>()?;
        rows.push(ResultRow {
            y: nums[..d].to_vec(),
            value: Complex64::new(nums[d], nums[d + 1]),
            residual: nums[d + 2],
        });
    }
    Ok(rows)
}
