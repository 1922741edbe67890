//! JSON interchange.
//!
//! Complex numbers are `[re, im]` pairs. An algebra element is a list with
//! one entry per summand, each the row-major list of its `m × m` block's
//! entries. Frame files list the frame column by column; matrices list
//! their entries row by row.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSpec, C64};
use crate::error::{FrameError, Result};
use crate::frames::{Factorization, Frame};
use crate::hilbert::AMatrix;
use crate::linalg::CMatrix;
use crate::optimize::{IterateRecord, OptimizerConfig, OptimizerTrace};

pub type ElementJson = Vec<Vec<[f64; 2]>>;

pub fn element_to_json(e: &AlgebraElement) -> ElementJson {
    e.blocks()
        .iter()
        .map(|b| {
            let m = b.nrows();
            (0..m * m).map(|t| {
                let z = b[(t / m, t % m)];
                [z.re, z.im]
            })
            .collect()
        })
        .collect()
}

pub fn element_from_json(spec: &AlgebraSpec, json: &ElementJson) -> Result<AlgebraElement> {
    if json.len() != spec.num_summands() {
        return Err(FrameError::Parse(format!(
            "element has {} blocks, algebra {spec} needs {}",
            json.len(),
            spec.num_summands()
        )));
    }
    let blocks = json
        .iter()
        .zip(spec.summand_dims())
        .map(|(values, &m)| {
            if values.len() != m * m {
                return Err(FrameError::Parse(format!(
                    "block of size {m} needs {} entries, got {}",
                    m * m,
                    values.len()
                )));
            }
            Ok(CMatrix::from_row_iterator(m, m, values.iter().map(|&[re, im]| C64::new(re, im))))
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraElement::new(spec.clone(), blocks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AMatrixJson {
    pub algebra: Vec<usize>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ElementJson>,
}

impl AMatrixJson {
    pub fn from_matrix(m: &AMatrix) -> Self {
        AMatrixJson {
            algebra: m.spec().summand_dims().to_vec(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(element_to_json).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<AMatrix> {
        let spec = AlgebraSpec::new(self.algebra.clone())?;
        if self.entries.len() != self.rows * self.cols {
            return Err(FrameError::Parse(format!(
                "{}×{} matrix needs {} entries, got {}",
                self.rows,
                self.cols,
                self.rows * self.cols,
                self.entries.len()
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|e| element_from_json(&spec, e))
            .collect::<Result<Vec<_>>>()?;
        AMatrix::from_entries(&spec, self.rows, self.cols, &entries)
    }
}

/// A frame in matrix form, tagged `"kind": "frame"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub kind: String,
    #[serde(flatten)]
    pub matrix: AMatrixJson,
}

impl FrameJson {
    pub fn from_frame(f: &Frame) -> Self {
        FrameJson { kind: "frame".into(), matrix: AMatrixJson::from_matrix(f.matrix()) }
    }

    pub fn to_frame(&self) -> Result<Frame> {
        if self.kind != "frame" {
            return Err(FrameError::Parse(format!("expected kind \"frame\", got {:?}", self.kind)));
        }
        Frame::new(self.matrix.to_matrix()?)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

/// On-disk frame: `columns[l][i]` is entry `i` of frame vector `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub algebra: Vec<usize>,
    pub n: usize,
    pub k: usize,
    pub columns: Vec<Vec<ElementJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<FrameMetadata>,
}

impl FrameFile {
    pub fn from_frame(frame: &Frame, metadata: Option<FrameMetadata>) -> Self {
        let m = frame.matrix();
        let columns = (0..frame.k())
            .map(|l| (0..frame.n()).map(|i| element_to_json(&m.entry(i, l))).collect())
            .collect();
        FrameFile {
            algebra: frame.spec().summand_dims().to_vec(),
            n: frame.n(),
            k: frame.k(),
            columns,
            metadata,
        }
    }

    pub fn to_frame(&self) -> Result<Frame> {
        let spec = AlgebraSpec::new(self.algebra.clone())?;
        if self.columns.len() != self.k {
            return Err(FrameError::Parse(format!("k = {} but {} columns given", self.k, self.columns.len())));
        }
        let mut entries = vec![AlgebraElement::zero(&spec); self.n * self.k];
        for (l, col) in self.columns.iter().enumerate() {
            if col.len() != self.n {
                return Err(FrameError::Parse(format!("column {} has {} entries, n = {}", l + 1, col.len(), self.n)));
            }
            for (i, e) in col.iter().enumerate() {
                entries[i * self.k + l] = element_from_json(&spec, e)?;
            }
        }
        Frame::new(AMatrix::from_entries(&spec, self.n, self.k, &entries)?)
    }
}

/// Parses either a [`FrameFile`] or a [`FrameJson`] document.
pub fn parse_frame(text: &str) -> Result<(Frame, Option<FrameMetadata>)> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("columns").is_some() {
        let file: FrameFile = serde_json::from_value(value)?;
        let frame = file.to_frame()?;
        Ok((frame, file.metadata))
    } else {
        let fj: FrameJson = serde_json::from_value(value)?;
        Ok((fj.to_frame()?, None))
    }
}

pub fn read_frame(path: &Path) -> Result<(Frame, Option<FrameMetadata>)> {
    let text = fs::read_to_string(path).map_err(|e| FrameError::Parse(format!("{}: {e}", path.display())))?;
    parse_frame(&text)
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_pretty(value)).map_err(|e| FrameError::Parse(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub b: f64,
    pub n: usize,
    pub k: usize,
    pub reconstruction_residual: f64,
    pub unitary: AMatrixJson,
}

impl FactorizationJson {
    pub fn new(fact: &Factorization, n: usize) -> Self {
        FactorizationJson {
            b: fact.b,
            n,
            k: fact.unitary.cols(),
            reconstruction_residual: fact.reconstruction_residual,
            unitary: AMatrixJson::from_matrix(&fact.unitary),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub config: OptimizerConfig,
    pub algebra: Vec<usize>,
    pub n: usize,
    pub k: usize,
    pub radius: f64,
    pub converged: bool,
    pub iterations: usize,
    pub reseeds: usize,
    pub final_potential: f64,
    pub final_residual: f64,
    /// Every 50th iterate plus the last.
    pub iterates: Vec<IterateRecord>,
    pub final_frame: FrameJson,
}

impl TraceJson {
    pub fn new(trace: &OptimizerTrace) -> Self {
        let last = trace.final_record();
        let f = &trace.final_frame;
        TraceJson {
            config: trace.config.clone(),
            algebra: f.spec().summand_dims().to_vec(),
            n: f.n(),
            k: f.k(),
            radius: trace.radius,
            converged: trace.converged,
            iterations: last.iteration,
            reseeds: trace.reseeds,
            final_potential: last.potential,
            final_residual: last.residual,
            iterates: trace.decimated(),
            final_frame: FrameJson::from_frame(f),
        }
    }
}
