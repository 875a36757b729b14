//! JSON result records.
//!
//! Matrices are stored as `{rows, cols, entries}` with row-major `[re, im]`
//! pairs. Everything that varies between identical runs lives under the
//! top-level `timing` key.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::objective::Frame;
use crate::solver::{MultistartOutcome, OuterStep, SolveStatus, SolverConfig};
use crate::subspace::{StructureSubspace, SubspaceKind};
use crate::verify::VerificationReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixRecord {
    fn from(m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Schema(format!(
                "{}×{} matrix with {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.entries.iter().map(|e| C64::new(e[0], e[1])),
        ))
    }
}

/// One line per start of a multistart run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub index: usize,
    pub lambda0: Option<C64>,
    pub distance: f64,
    pub lambda: C64,
    pub feasible: bool,
    pub status: SolveStatus,
    pub verified: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_start_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub source: String,
    /// Structure selector the subspace was built from.
    pub structure: String,
    pub subspace: SubspaceKind,
    pub subspace_dim: usize,
    pub config: SolverConfig,
    pub n: usize,
    pub distance: f64,
    pub lambda: C64,
    pub residual: f64,
    pub gradnorm: f64,
    pub status: SolveStatus,
    pub feasible: bool,
    pub stagnated: bool,
    pub start_index: usize,
    pub lambda0: Option<C64>,
    pub delta: MatrixRecord,
    pub frame: MatrixRecord,
    pub outer_trace: Vec<OuterStep>,
    pub verification: VerificationReport,
    pub starts: Vec<StartRecord>,
    pub timing: Timing,
}

impl ResultRecord {
    pub fn new(
        source: &str,
        structure: &str,
        s: &StructureSubspace,
        cfg: &SolverConfig,
        outcome: &MultistartOutcome,
    ) -> Self {
        let best = outcome.best_result();
        let starts = outcome
            .results
            .iter()
            .map(|r| StartRecord {
                index: r.start_index,
                lambda0: r.lambda0,
                distance: r.distance,
                lambda: r.lambda,
                feasible: r.feasible,
                status: r.status,
                verified: r.verification.passed,
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            source: source.to_string(),
            structure: structure.to_string(),
            subspace: s.kind(),
            subspace_dim: s.dim(),
            config: cfg.clone(),
            n: best.delta.nrows(),
            distance: best.distance,
            lambda: best.lambda,
            residual: best.residual,
            gradnorm: best.gradnorm,
            status: best.status,
            feasible: best.feasible,
            stagnated: best.stagnated,
            start_index: best.start_index,
            lambda0: best.lambda0,
            delta: (&best.delta).into(),
            frame: best.frame.matrix().into(),
            outer_trace: best.outer_trace.clone(),
            verification: best.verification.clone(),
            starts,
            timing: Timing {
                total_seconds: outcome.results.iter().map(|r| r.wall_time).sum(),
                per_start_seconds: outcome.results.iter().map(|r| r.wall_time).collect(),
            },
        }
    }

    pub fn delta(&self) -> Result<CMatrix> {
        self.delta.to_matrix()
    }

    pub fn frame(&self) -> Result<Frame> {
        Frame::new(self.frame.to_matrix()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            None => return Err(Error::Schema("missing schema_version".into())),
            Some(v) if v != u64::from(SCHEMA_VERSION) => {
                return Err(Error::Schema(format!("schema_version {v}, expected {SCHEMA_VERSION}")))
            }
            Some(_) => {}
        }
        Ok(serde_json::from_value(value)?)
    }
}

pub fn write_result(record: &ResultRecord, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, record.to_json()?)?;
    Ok(())
}

pub fn read_result(path: impl AsRef<Path>) -> Result<ResultRecord> {
    ResultRecord::from_json(&fs::read_to_string(path)?)
}

/// The record as JSON with the `timing` key removed, for comparing runs.
pub fn without_timing(text: &str) -> Result<String> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    if let Some(obj) = value.as_object_mut() {
        obj.remove("timing");
    }
    Ok(serde_json::to_string(&value)?)
}
