//! Versioned JSON files for states, certificates and reports.
//!
//! Complex entries are `[re, im]` pairs. Floats are written with the
//! shortest decimal that parses back to the same `f64`, so a file survives
//! any number of load/save cycles unchanged.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::separability::{Certificate, CertificateTerm, RankWindow, SeparabilityReport};
use crate::shape::SystemShape;
use crate::states::{Basis, StateRecord};

pub const STATE_SCHEMA: &str = "bose-state-v1";
pub const REPORT_SCHEMA: &str = "bose-report-v1";
pub const CERTIFICATE_SCHEMA: &str = "bose-certificate-v1";

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Parse(format!(
            "schema {found:?}, expected {expected:?}"
        )));
    }
    Ok(())
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub schema: String,
    pub n: usize,
    pub k: usize,
    pub basis: Basis,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub provenance: String,
}

impl StateFile {
    pub fn from_record(state: &StateRecord) -> Self {
        let m = &state.matrix;
        StateFile {
            schema: STATE_SCHEMA.into(),
            n: state.shape.n(),
            k: state.shape.k(),
            basis: state.basis,
            matrix: (0..m.rows())
                .map(|r| m.row(r).iter().copied().map(pair).collect())
                .collect(),
            provenance: state.provenance.clone(),
        }
    }

    /// Checks the schema and dimensions; physical invariants are left to
    /// [`StateRecord::validate`].
    pub fn to_record(&self) -> Result<StateRecord> {
        check_schema(&self.schema, STATE_SCHEMA)?;
        let shape = SystemShape::new(self.n, self.k)?;
        let rows = self.matrix.len();
        if let Some(bad) = self.matrix.iter().position(|row| row.len() != rows) {
            return Err(Error::ShapeError(format!(
                "row {bad} has {} entries, expected {rows}",
                self.matrix[bad].len()
            )));
        }
        let data = self.matrix.iter().flatten().copied().map(complex).collect();
        StateRecord::new(
            shape,
            self.basis,
            ComplexMatrix::new(rows, rows, data)?,
            self.provenance.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermFile {
    pub weight: f64,
    pub vector: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermFile>,
    pub trace_distance: f64,
}

impl CertificateFile {
    pub fn from_certificate(cert: &Certificate) -> Self {
        CertificateFile {
            schema: CERTIFICATE_SCHEMA.into(),
            n: cert.shape.n(),
            k: cert.shape.k(),
            terms: cert
                .terms
                .iter()
                .map(|t| TermFile {
                    weight: t.weight,
                    vector: t.vector.iter().copied().map(pair).collect(),
                })
                .collect(),
            trace_distance: cert.trace_distance,
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate> {
        check_schema(&self.schema, CERTIFICATE_SCHEMA)?;
        let shape = SystemShape::new(self.n, self.k)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.vector.len() != shape.n() {
                    return Err(Error::ShapeError(format!(
                        "term vector has length {}, expected {}",
                        t.vector.len(),
                        shape.n()
                    )));
                }
                Ok(CertificateTerm {
                    weight: t.weight,
                    vector: t.vector.iter().copied().map(complex).collect(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Certificate {
            shape,
            terms,
            trace_distance: self.trace_distance,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub report: SeparabilityReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateFile>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<RankWindow>,
}

impl ReportFile {
    pub fn new(report: SeparabilityReport, certificate: Option<&Certificate>) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.into(),
            window: report.window,
            report,
            certificate: certificate.map(CertificateFile::from_certificate),
        }
    }
}

/// Compact single-line JSON.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// Writes compact JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&fs::read_to_string(path)?)
}

pub fn read_state(path: &Path) -> Result<StateRecord> {
    read_json::<StateFile>(path)?.to_record()
}

pub fn write_state(path: &Path, state: &StateRecord) -> Result<()> {
    write_json(path, &StateFile::from_record(state))
}
