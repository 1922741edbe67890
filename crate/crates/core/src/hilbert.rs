//! Matrices over `A` and the Hilbert module `Aⁿ`.
//!
//! An `r × c` matrix over `A = ⊕ M_{mⱼ}(C)` is stored as its flattened
//! form: for each summand `j` a complex `(r·mⱼ) × (c·mⱼ)` matrix whose
//! `(i, l)` block of size `mⱼ × mⱼ` is the `j`-th block of entry `(i, l)`.
//! Flattening is a *-isomorphism, so products, adjoints and norms are all
//! computed per summand. A vector of `Aⁿ` is an `n × 1` matrix, and the
//! module is a right `A`-module with `⟨v, w⟩ = Σ vᵢ* wᵢ`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::algebra::{AlgebraElement, AlgebraSpec, C64};
use crate::error::{FrameError, Result};
use crate::linalg::{self, CMatrix};

/// Per-summand complex matrices of an [`AMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlatView {
    pub blocks: Vec<CMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AMatrix {
    spec: AlgebraSpec,
    rows: usize,
    cols: usize,
    blocks: Vec<CMatrix>,
}

impl AMatrix {
    pub fn zeros(spec: &AlgebraSpec, rows: usize, cols: usize) -> Self {
        let blocks = spec
            .summand_dims()
            .iter()
            .map(|&m| DMatrix::zeros(rows * m, cols * m))
            .collect();
        AMatrix { spec: spec.clone(), rows, cols, blocks }
    }

    pub fn identity(spec: &AlgebraSpec, n: usize) -> Self {
        let blocks = spec
            .summand_dims()
            .iter()
            .map(|&m| DMatrix::identity(n * m, n * m))
            .collect();
        AMatrix { spec: spec.clone(), rows: n, cols: n, blocks }
    }

    /// Builds a matrix from `rows · cols` entries in row-major order.
    pub fn from_entries(
        spec: &AlgebraSpec,
        rows: usize,
        cols: usize,
        entries: &[AlgebraElement],
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(FrameError::Shape(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let mut out = AMatrix::zeros(spec, rows, cols);
        for (idx, e) in entries.iter().enumerate() {
            spec.check_same(e.spec())?;
            out.set_entry(idx / cols, idx % cols, e);
        }
        Ok(out)
    }

    /// Inverse of [`AMatrix::flatten`].
    pub fn unflatten(view: FlatView, rows: usize, cols: usize, spec: &AlgebraSpec) -> Result<Self> {
        if view.blocks.len() != spec.num_summands() {
            return Err(FrameError::Shape(format!(
                "expected {} flattened blocks, got {}",
                spec.num_summands(),
                view.blocks.len()
            )));
        }
        for (b, &m) in view.blocks.iter().zip(spec.summand_dims()) {
            if b.shape() != (rows * m, cols * m) {
                return Err(FrameError::Shape(format!(
                    "flattened block has shape {:?}, expected {:?}",
                    b.shape(),
                    (rows * m, cols * m)
                )));
            }
        }
        Ok(AMatrix { spec: spec.clone(), rows, cols, blocks: view.blocks })
    }

    pub(crate) fn from_blocks_unchecked(spec: &AlgebraSpec, rows: usize, cols: usize, blocks: Vec<CMatrix>) -> Self {
        debug_assert!(blocks
            .iter()
            .zip(spec.summand_dims())
            .all(|(b, &m)| b.shape() == (rows * m, cols * m)));
        AMatrix { spec: spec.clone(), rows, cols, blocks }
    }

    /// Entries drawn as independent standard complex Gaussians.
    pub fn random<R: Rng + ?Sized>(spec: &AlgebraSpec, rows: usize, cols: usize, rng: &mut R) -> Self {
        // Entry-major draw order keeps the sample independent of layout.
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            entries.push(AlgebraElement::random(spec, rng));
        }
        AMatrix::from_entries(spec, rows, cols, &entries).expect("shapes conform")
    }

    /// Unitary drawn per summand as the QR factor of a Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(spec: &AlgebraSpec, n: usize, rng: &mut R) -> Self {
        let blocks = spec
            .summand_dims()
            .iter()
            .map(|&m| linalg::haar_unitary(rng, n * m))
            .collect();
        AMatrix { spec: spec.clone(), rows: n, cols: n, blocks }
    }

    /// Column permutation matrix `Π` with `(F·Π)` column `i` equal to column
    /// `perm[i]` of `F`.
    pub fn permutation(spec: &AlgebraSpec, perm: &[usize]) -> Result<Self> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(FrameError::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut out = AMatrix::zeros(spec, k, k);
        let one = AlgebraElement::one(spec);
        for (i, &p) in perm.iter().enumerate() {
            out.set_entry(p, i, &one);
        }
        Ok(out)
    }

    /// `Q_I`: the diagonal projection onto the coordinates in `indices`.
    pub fn coordinate_projection(spec: &AlgebraSpec, k: usize, indices: &[usize]) -> Result<Self> {
        let mut out = AMatrix::zeros(spec, k, k);
        let one = AlgebraElement::one(spec);
        for &i in indices {
            if i >= k {
                return Err(FrameError::IndexOutOfRange { index: i, k });
            }
            out.set_entry(i, i, &one);
        }
        Ok(out)
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Per-summand complex matrices, borrowed.
    pub fn flat_blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn flatten(&self) -> FlatView {
        FlatView { blocks: self.blocks.clone() }
    }

    pub fn entry(&self, i: usize, l: usize) -> AlgebraElement {
        assert!(i < self.rows && l < self.cols, "entry ({i}, {l}) out of bounds");
        let blocks = self
            .spec
            .summand_dims()
            .iter()
            .zip(&self.blocks)
            .map(|(&m, b)| b.view((i * m, l * m), (m, m)).into_owned())
            .collect();
        AlgebraElement::from_blocks_unchecked(self.spec.clone(), blocks)
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<AlgebraElement> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |l| (i, l)))
            .map(|(i, l)| self.entry(i, l))
            .collect()
    }

    pub fn set_entry(&mut self, i: usize, l: usize, value: &AlgebraElement) {
        assert!(i < self.rows && l < self.cols, "entry ({i}, {l}) out of bounds");
        for ((&m, b), v) in self.spec.summand_dims().iter().zip(self.blocks.iter_mut()).zip(value.blocks()) {
            b.view_mut((i * m, l * m), (m, m)).copy_from(v);
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.spec.check_same(&other.spec)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(FrameError::Shape(format!(
                "{}×{} vs {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn map_blocks(&self, rows: usize, cols: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        AMatrix {
            spec: self.spec.clone(),
            rows,
            cols,
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.spec.check_same(&other.spec)?;
        if self.cols != other.rows {
            return Err(FrameError::Shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Ok(AMatrix { spec: self.spec.clone(), rows: self.rows, cols: other.cols, blocks })
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(self.cols, self.rows, |b| b.adjoint())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(AMatrix { blocks, ..self.clone() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Ok(AMatrix { blocks, ..self.clone() })
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_blocks(self.rows, self.cols, |b| b * C64::new(s, 0.0))
    }

    /// Right module action: every entry multiplied on the right by `a`.
    pub fn right_mul(&self, a: &AlgebraElement) -> Result<Self> {
        self.spec.check_same(a.spec())?;
        let blocks = self
            .blocks
            .iter()
            .zip(a.blocks())
            .zip(self.spec.summand_dims())
            .map(|((b, ab), &m)| {
                let mut out = b.clone();
                for l in 0..self.cols {
                    let cols = b.columns(l * m, m) * ab;
                    out.columns_mut(l * m, m).copy_from(&cols);
                }
                out
            })
            .collect();
        Ok(AMatrix { blocks, ..self.clone() })
    }

    /// Operator norm: the largest spectral norm over the flattened summands.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    /// Sum of squared Frobenius norms of the flattened summands.
    pub fn frobenius_squared(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.norm())
    }

    /// `max(‖MM* − I‖, ‖M*M − I‖)`.
    pub fn unitarity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(FrameError::Shape(format!(
                "unitarity needs a square matrix, got {}×{}",
                self.rows, self.cols
            )));
        }
        Ok(self
            .blocks
            .iter()
            .map(|b| linalg::coisometry_defect(b).max(linalg::coisometry_defect(&b.adjoint())))
            .fold(0.0, f64::max))
    }

    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        Ok(self.unitarity_defect()? <= tol)
    }

    /// `‖MM* − I‖` over all summands.
    pub fn coisometry_defect(&self) -> f64 {
        self.blocks.iter().map(linalg::coisometry_defect).fold(0.0, f64::max)
    }

    /// `‖M M* M − M‖ ≤ tol · max(1, ‖M‖)`.
    pub fn is_partial_isometry(&self, tol: f64) -> bool {
        let defect = self
            .blocks
            .iter()
            .map(|b| linalg::spectral_norm(&(b * b.adjoint() * b - b)))
            .fold(0.0, f64::max);
        defect <= tol * self.norm().max(1.0)
    }

    /// Extends an `n × k` coisometry (`MM* = I_n`, `n ≤ k`) to a `k × k`
    /// unitary whose first `n` rows are `M`.
    ///
    /// The rows of `M` are first replaced by the nearest orthonormal rows;
    /// the remaining rows come from [`linalg::row_space_complement`], so the
    /// completion is deterministic and `W_{k,n}` completes to `I_k`.
    pub fn complete_to_unitary(&self, tol: f64) -> Result<Self> {
        let (n, k) = (self.rows, self.cols);
        if n > k {
            return Err(FrameError::Shape(format!("cannot complete {n}×{k}: more rows than columns")));
        }
        let residual = self.coisometry_defect();
        if residual > tol {
            return Err(FrameError::NotCoisometric { residual });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let top = linalg::orthonormalize_rows(b);
                let rest = linalg::row_space_complement(&top).adjoint();
                let mut u = CMatrix::zeros(b.ncols(), b.ncols());
                u.rows_mut(0, top.nrows()).copy_from(&top);
                u.rows_mut(top.nrows(), rest.nrows()).copy_from(&rest);
                u
            })
            .collect();
        Ok(AMatrix { spec: self.spec.clone(), rows: k, cols: k, blocks })
    }

    /// Columns `indices` in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.cols {
                return Err(FrameError::IndexOutOfRange { index: i, k: self.cols });
            }
        }
        let blocks = self
            .blocks
            .iter()
            .zip(self.spec.summand_dims())
            .map(|(b, &m)| {
                let mut out = CMatrix::zeros(b.nrows(), indices.len() * m);
                for (t, &i) in indices.iter().enumerate() {
                    out.columns_mut(t * m, m).copy_from(&b.columns(i * m, m));
                }
                out
            })
            .collect();
        Ok(AMatrix { spec: self.spec.clone(), rows: self.rows, cols: indices.len(), blocks })
    }

    pub fn column(&self, i: usize) -> Result<Self> {
        self.select_columns(&[i])
    }

    /// Block-diagonal sum `diag(M₁, M₂, …)`.
    pub fn block_diagonal(parts: &[AMatrix]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| FrameError::InvalidArgument("no blocks given".into()))?;
        let spec = first.spec.clone();
        for p in parts {
            spec.check_same(&p.spec)?;
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = AMatrix::zeros(&spec, rows, cols);
        for (j, &m) in spec.summand_dims().iter().enumerate() {
            let (mut r0, mut c0) = (0, 0);
            for p in parts {
                out.blocks[j]
                    .view_mut((r0 * m, c0 * m), (p.rows * m, p.cols * m))
                    .copy_from(&p.blocks[j]);
                r0 += p.rows;
                c0 += p.cols;
            }
        }
        Ok(out)
    }
}

/// The `A`-valued inner product `⟨v, w⟩ = Σᵢ vᵢ* wᵢ` of two vectors in `Aⁿ`.
pub fn inner_product(v: &AMatrix, w: &AMatrix) -> Result<AlgebraElement> {
    v.spec.check_same(&w.spec)?;
    if v.cols != 1 || w.cols != 1 || v.rows != w.rows {
        return Err(FrameError::Shape(format!(
            "inner product needs two vectors of equal length, got {}×{} and {}×{}",
            v.rows, v.cols, w.rows, w.cols
        )));
    }
    let blocks = v.blocks.iter().zip(&w.blocks).map(|(a, b)| a.adjoint() * b).collect();
    Ok(AlgebraElement::from_blocks_unchecked(v.spec.clone(), blocks))
}
