//! Finite-dimensional C*-algebras `A = M_{m1}(C) ⊕ … ⊕ M_{ms}(C)`.
//!
//! Every finite-dimensional C*-algebra is of this form, so an element is
//! just a list of square complex blocks. The C*-norm is the largest
//! singular value over all blocks, and the involution is the blockwise
//! conjugate transpose.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{FrameError, Result};
use crate::linalg::{self, CMatrix};
use crate::rng::gaussian_matrix;

pub type C64 = nalgebra::Complex<f64>;

/// Block sizes `[m1, …, ms]` of a finite-dimensional C*-algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    dims: Vec<usize>,
}

impl AlgebraSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(FrameError::InvalidSpec("at least one summand is required".into()));
        }
        if dims.contains(&0) {
            return Err(FrameError::InvalidSpec(format!("summand sizes must be positive, got {dims:?}")));
        }
        Ok(AlgebraSpec { dims })
    }

    /// The complex numbers, `[1]`.
    pub fn scalar() -> Self {
        AlgebraSpec { dims: vec![1] }
    }

    /// `M_m(C)`.
    pub fn matrix(m: usize) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn summand_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_summands(&self) -> usize {
        self.dims.len()
    }

    /// Complex dimension `Σ mⱼ²`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().map(|m| m * m).sum()
    }

    /// `Σ mⱼ`, the trace of the unit.
    pub fn unit_trace(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_scalar(&self) -> bool {
        self.dims == [1]
    }

    pub(crate) fn check_same(&self, other: &AlgebraSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(FrameError::Shape(format!("algebra mismatch: {self} vs {other}")))
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|m| m.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Parses `"2,1"` or `"[2, 1]"`.
impl FromStr for AlgebraSpec {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let dims = trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| FrameError::InvalidSpec(format!("cannot parse {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraSpec::new(dims)
    }
}

/// An element of `A`, one `mⱼ × mⱼ` block per summand.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    spec: AlgebraSpec,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn new(spec: AlgebraSpec, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != spec.num_summands() {
            return Err(FrameError::Shape(format!(
                "expected {} blocks, got {}",
                spec.num_summands(),
                blocks.len()
            )));
        }
        for (j, (b, &m)) in blocks.iter().zip(spec.summand_dims()).enumerate() {
            if b.shape() != (m, m) {
                return Err(FrameError::Shape(format!(
                    "block {j} has shape {:?}, expected ({m}, {m})",
                    b.shape()
                )));
            }
        }
        Ok(AlgebraElement { spec, blocks })
    }

    pub(crate) fn from_blocks_unchecked(spec: AlgebraSpec, blocks: Vec<CMatrix>) -> Self {
        AlgebraElement { spec, blocks }
    }

    pub fn zero(spec: &AlgebraSpec) -> Self {
        let blocks = spec.summand_dims().iter().map(|&m| DMatrix::zeros(m, m)).collect();
        AlgebraElement { spec: spec.clone(), blocks }
    }

    pub fn one(spec: &AlgebraSpec) -> Self {
        Self::scalar(spec, C64::new(1.0, 0.0))
    }

    /// `z · 1_A`.
    pub fn scalar(spec: &AlgebraSpec, z: C64) -> Self {
        let blocks = spec
            .summand_dims()
            .iter()
            .map(|&m| DMatrix::identity(m, m) * z)
            .collect();
        AlgebraElement { spec: spec.clone(), blocks }
    }

    /// Independent standard complex Gaussian entries in every block.
    pub fn random<R: Rng + ?Sized>(spec: &AlgebraSpec, rng: &mut R) -> Self {
        let blocks = spec
            .summand_dims()
            .iter()
            .map(|&m| gaussian_matrix(rng, m, m))
            .collect();
        AlgebraElement { spec: spec.clone(), blocks }
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.spec.check_same(&other.spec)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(AlgebraElement { spec: self.spec.clone(), blocks })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, z: C64) -> Self {
        let blocks = self.blocks.iter().map(|b| b * z).collect();
        AlgebraElement { spec: self.spec.clone(), blocks }
    }

    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        AlgebraElement { spec: self.spec.clone(), blocks }
    }

    /// The C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.blocks
            .iter()
            .all(|b| linalg::spectral_norm(&(b - b.adjoint())) <= tol)
    }

    /// Hermitian within `tol` with spectrum bounded below by `−tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self
                .blocks
                .iter()
                .all(|b| linalg::min_hermitian_eigenvalue(b) >= -tol)
    }

    /// `(Σⱼ tr bⱼ) / (Σⱼ mⱼ)`, so that `τ(1_A) = 1`.
    pub fn normalized_trace(&self) -> C64 {
        let total: C64 = self.blocks.iter().map(|b| b.trace()).sum();
        total / self.spec.unit_trace() as f64
    }

    /// C*-norm of `self − other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.norm())
    }
}
