//! File formats and content hashing.
//!
//! * Posture CSV: header of joint names, one posture per row, radians,
//!   `.` decimal separator. Values are written in shortest round-trip form,
//!   so save/load is lossless.
//! * Synergy JSON: subset, mean, row-major eigenvectors with explicit dims,
//!   eigenvalues, centering, source hash and joint names, plus an optional
//!   `fdms` block carrying the label and function assignment.
//!
//! Hashes are SHA-256, hex encoded. The hash of a posture sequence is the
//! hash of its canonical CSV text.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fdms::{AssignmentSpec, FdmsModel, FunctionAssignment};
use crate::synergy::{Centering, JointSubset, PostureSequence, SynergyModel};

pub const HASH_ALGORITHM: &str = "sha256";

/// Digest of the empty input.
pub const EMPTY_DIGEST: &str = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";

pub const SYNERGY_FORMAT: &str = "fdms-synergy";
pub const FORMAT_VERSION: u32 = 1;

/// Orthonormality slack accepted when reading synergy files.
pub const LOAD_ORTHONORMAL_TOL: f64 = 1e-6;

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sequence_hash(seq: &PostureSequence) -> String {
    content_hash(posture_csv_string(seq).as_bytes())
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn posture_csv_string(seq: &PostureSequence) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(seq.joint_names()).expect("write to memory");
    let data = seq.data();
    for i in 0..seq.nrows() {
        w.write_record((0..seq.ncols()).map(|j| data[(i, j)].to_string()))
            .expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}

/// Parses posture CSV text. Rows and columns in errors are 1-based data
/// coordinates (the header is not counted).
pub fn parse_posture_csv(bytes: &[u8], provenance: &str) -> Result<PostureSequence> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| Error::Csv {
            row: 0,
            col: 0,
            message: e.to_string(),
        })?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].trim().is_empty()) {
        return Err(Error::EmptyFile);
    }
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::Schema(format!("empty joint name in column {}", i + 1)));
        }
        if names[..i].contains(name) {
            return Err(Error::Schema(format!("duplicate joint name {name:?}")));
        }
    }
    let d = names.len();
    let mut values = Vec::new();
    let mut n = 0;
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| Error::Csv {
            row,
            col: 0,
            message: e.to_string(),
        })?;
        if record.len() != d {
            return Err(Error::RaggedRow {
                row,
                expected: d,
                actual: record.len(),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Csv {
                row,
                col: c + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    row,
                    col: c + 1,
                    message: format!("non-finite value {cell:?}"),
                });
            }
            values.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyFile);
    }
    PostureSequence::new(DMatrix::from_row_slice(n, d, &values), names, provenance)
}

pub fn load_posture_csv(path: impl AsRef<Path>) -> Result<PostureSequence> {
    let path = path.as_ref();
    parse_posture_csv(&read_file(path)?, &path.display().to_string())
}

pub fn save_posture_csv(seq: &PostureSequence, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), posture_csv_string(seq).as_bytes())
}

/// Contents of a synergy file.
#[derive(Debug, Clone, PartialEq)]
pub enum SynergyDocument {
    Plain(SynergyModel),
    Fdms(FdmsModel),
}

impl SynergyDocument {
    pub fn model(&self) -> &SynergyModel {
        match self {
            SynergyDocument::Plain(m) => m,
            SynergyDocument::Fdms(f) => &f.base,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            SynergyDocument::Plain(_) => None,
            SynergyDocument::Fdms(f) => Some(&f.label),
        }
    }
}

impl From<SynergyModel> for SynergyDocument {
    fn from(m: SynergyModel) -> Self {
        SynergyDocument::Plain(m)
    }
}

impl From<FdmsModel> for SynergyDocument {
    fn from(m: FdmsModel) -> Self {
        SynergyDocument::Fdms(m)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FdmsDoc {
    label: String,
    assignment: AssignmentSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynergyFileDoc {
    format: String,
    version: u32,
    hash_algorithm: String,
    source_hash: String,
    centering: Centering,
    subset: Vec<usize>,
    joint_names: Vec<String>,
    mean: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fdms: Option<FdmsDoc>,
}

pub fn synergy_json_string(doc: &SynergyDocument) -> String {
    let m = doc.model();
    let v = m.eigenvectors();
    let mut data = Vec::with_capacity(v.len());
    for i in 0..v.nrows() {
        data.extend(v.row(i).iter().copied());
    }
    let file = SynergyFileDoc {
        format: SYNERGY_FORMAT.into(),
        version: FORMAT_VERSION,
        hash_algorithm: HASH_ALGORITHM.into(),
        source_hash: m.source_hash().into(),
        centering: m.centering(),
        subset: m.subset().indices().to_vec(),
        joint_names: m.joint_names().to_vec(),
        mean: m.mean().iter().copied().collect(),
        eigenvalues: m.eigenvalues().iter().copied().collect(),
        eigenvectors: MatrixDoc {
            rows: v.nrows(),
            cols: v.ncols(),
            data,
        },
        fdms: match doc {
            SynergyDocument::Plain(_) => None,
            SynergyDocument::Fdms(f) => Some(FdmsDoc {
                label: f.label.clone(),
                assignment: f.assignment.spec().clone(),
            }),
        },
    };
    let mut text = serde_json::to_string_pretty(&file).expect("synergy serializes");
    text.push('\n');
    text
}

/// Parses and re-validates a synergy file.
pub fn parse_synergy(bytes: &[u8]) -> Result<SynergyDocument> {
    let file: SynergyFileDoc = serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))?;
    if file.format != SYNERGY_FORMAT || file.version != FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "unsupported format {:?} v{}",
            file.format, file.version
        )));
    }
    if file.hash_algorithm != HASH_ALGORITHM {
        return Err(Error::Schema(format!(
            "unsupported hash algorithm {:?}",
            file.hash_algorithm
        )));
    }
    let ev = &file.eigenvectors;
    if ev.rows.checked_mul(ev.cols) != Some(ev.data.len()) {
        return Err(Error::Schema("eigenvector dims do not match data length".into()));
    }
    let subset = JointSubset::new(file.subset)?;
    let model = SynergyModel::from_parts(
        subset.clone(),
        file.joint_names,
        DVector::from_vec(file.mean),
        DMatrix::from_row_slice(ev.rows, ev.cols, &ev.data),
        DVector::from_vec(file.eigenvalues),
        file.centering,
        file.source_hash,
        LOAD_ORTHONORMAL_TOL,
    )?;
    Ok(match file.fdms {
        None => SynergyDocument::Plain(model),
        Some(f) => {
            if f.label.is_empty() {
                return Err(Error::Schema("empty fdms label".into()));
            }
            SynergyDocument::Fdms(FdmsModel {
                base: model,
                assignment: FunctionAssignment::from_stored(f.assignment, subset),
                label: f.label,
            })
        }
    })
}

pub fn load_synergy(path: impl AsRef<Path>) -> Result<SynergyDocument> {
    parse_synergy(&read_file(path.as_ref())?)
}

pub fn save_synergy(doc: &SynergyDocument, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), synergy_json_string(doc).as_bytes())
}
