//! Orthogonal splittings of tight frames.
//!
//! For a tight frame `F` with Gram matrix `G = F*F`, the coordinate
//! projection `Q_I` commutes with `G` exactly when the columns indexed by
//! `I` and by its complement are mutually orthogonal. In that case both
//! sub-frames are tight, with the constant of `F`, on complementary
//! orthogonal submodules: `F_I F_I* = b P` and `F_{Iᶜ} F_{Iᶜ}* = b (I − P)`.
//! [`verify_orthogonal_split`] evaluates the two sides independently.
//!
//! The finest such splitting is the set of connected components of the
//! Gram support graph (`i ~ j` iff `⟨fᵢ, fⱼ⟩ ≠ 0`).

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::corpus::gcd;
use crate::error::{FrameError, Result};
use crate::frames::{check_tight, gram_matrix, is_spherical, Frame, SphericalMode, SphericalReport, TightnessReport};
use crate::hilbert::AMatrix;
use crate::linalg::{self, CMatrix};
use crate::partition::Partition;

fn check_indices(indices: &[usize], k: usize) -> Result<()> {
    match indices.iter().find(|&&i| i >= k) {
        Some(&index) => Err(FrameError::IndexOutOfRange { index, k }),
        None => Ok(()),
    }
}

/// Sorted, deduplicated complement of `indices` in `0..k`.
pub fn complement(indices: &[usize], k: usize) -> Vec<usize> {
    (0..k).filter(|i| !indices.contains(i)).collect()
}

fn commutator_norm(gram: &AMatrix, indices: &[usize]) -> Result<f64> {
    let q = AMatrix::coordinate_projection(gram.spec(), gram.rows(), indices)?;
    let qg = q.matmul(gram)?;
    let gq = gram.matmul(&q)?;
    Ok(qg.try_sub(&gq)?.norm())
}

/// `‖Q_I G − G Q_I‖` with `G = F*F`.
pub fn commutation_residual(frame: &Frame, indices: &[usize]) -> Result<f64> {
    check_indices(indices, frame.k())?;
    commutator_norm(&gram_matrix(frame), indices)
}

/// Connected components of the graph with an edge `i ~ j` whenever
/// `‖⟨fᵢ, fⱼ⟩‖ > edge_tol`.
pub fn support_partition(gram: &AMatrix, edge_tol: f64) -> Partition {
    let k = gram.rows();
    let mut uf = UnionFind::<usize>::new(k);
    for i in 0..k {
        for j in i + 1..k {
            if gram.entry(i, j).norm() > edge_tol {
                uf.union(i, j);
            }
        }
    }
    Partition::from_labels(&uf.into_labeling())
}

/// Finest orthogonal splitting of a tight frame.
///
/// Gram entries count as zero below `tol · ‖F‖²`.
pub fn ortho_decompose(frame: &Frame, tol: f64) -> Result<Partition> {
    let report = check_tight(frame, tol);
    if !report.is_tight {
        return Err(FrameError::NotTight { residual: report.residual, b: report.b });
    }
    let norm = frame.matrix().norm();
    Ok(support_partition(&gram_matrix(frame), tol * norm * norm))
}

/// Sub-frame of the columns in `indices`, in ascending original order.
pub fn restrict(frame: &Frame, indices: &[usize]) -> Result<Frame> {
    if indices.is_empty() {
        return Err(FrameError::EmptyIndexSet);
    }
    check_indices(indices, frame.k())?;
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Frame::new(frame.matrix().select_columns(&sorted)?)
}

/// Orthogonal projection onto the submodule spanned by the columns of `F`,
/// dropping singular values at or below `tol · max(1, ‖F‖)`.
pub fn range_projection(frame: &Frame, tol: f64) -> AMatrix {
    projection_of(frame.matrix(), tol)
}

fn projection_of(m: &AMatrix, tol: f64) -> AMatrix {
    let cutoff = tol * m.norm().max(1.0);
    let blocks = m
        .flat_blocks()
        .iter()
        .map(|b| linalg::column_space_projector(b, cutoff))
        .collect();
    AMatrix::from_blocks_unchecked(m.spec(), m.rows(), m.rows(), blocks)
}

/// Columns `indices` of `F` as a matrix, allowing the empty selection.
fn sub_matrix(frame: &Frame, indices: &[usize]) -> Result<AMatrix> {
    frame.matrix().select_columns(indices)
}

/// `‖M M* − b P‖`.
fn tight_on_range_residual(m: &AMatrix, b: f64, projection: &AMatrix) -> Result<f64> {
    let s = m.matmul(&m.adjoint())?;
    Ok(s.try_sub(&projection.scale(b))?.norm())
}

/// Both sides of the commutation/splitting equivalence for one index set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    /// 1-based.
    pub indices: Vec<usize>,
    pub b: f64,
    /// `Q_I` commutes with `F*F`.
    pub commutes: bool,
    /// Both sub-frames are tight with constant `b` on orthogonal ranges.
    pub splits: bool,
    pub commutation_residual: f64,
    pub subset_residual: f64,
    pub complement_residual: f64,
    pub orthogonality_residual: f64,
}

impl SplitReport {
    pub fn agrees(&self) -> bool {
        self.commutes == self.splits
    }
}

/// Evaluates, for a tight frame `F` and index set `I`:
///
/// - commutation: `‖Q_I G − G Q_I‖ ≤ tol · max(1, b)`;
/// - splitting: with `P` the range projection of `F_I` and `P′` that of
///   `F_{Iᶜ}`, `‖F_I F_I* − b P‖`, `‖F_{Iᶜ} F_{Iᶜ}* − b (I − P)‖` and
///   `‖P P′‖` are all within tolerance.
pub fn verify_orthogonal_split(frame: &Frame, indices: &[usize], tol: f64) -> Result<SplitReport> {
    verify_orthogonal_split_with_gram(frame, &gram_matrix(frame), indices, tol)
}

/// [`verify_orthogonal_split`] with the commutation side evaluated on a
/// caller-supplied Gram matrix. Used for fault injection in the self-test.
pub fn verify_orthogonal_split_with_gram(
    frame: &Frame,
    gram: &AMatrix,
    indices: &[usize],
    tol: f64,
) -> Result<SplitReport> {
    check_indices(indices, frame.k())?;
    let mut subset = indices.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let rest = complement(&subset, frame.k());
    let b = check_tight(frame, tol).b;
    let scaled_tol = tol * b.max(1.0);

    let commutation_residual = commutator_norm(gram, &subset)?;

    let f_sub = sub_matrix(frame, &subset)?;
    let f_rest = sub_matrix(frame, &rest)?;
    let p = projection_of(&f_sub, tol);
    let p_rest = projection_of(&f_rest, tol);
    let id = AMatrix::identity(frame.spec(), frame.n());
    let subset_residual = tight_on_range_residual(&f_sub, b, &p)?;
    let complement_residual = tight_on_range_residual(&f_rest, b, &id.try_sub(&p)?)?;
    let orthogonality_residual = p.matmul(&p_rest)?.norm();

    Ok(SplitReport {
        indices: subset.iter().map(|i| i + 1).collect(),
        b,
        commutes: commutation_residual <= scaled_tol,
        splits: subset_residual <= scaled_tol && complement_residual <= scaled_tol && orthogonality_residual <= tol,
        commutation_residual,
        subset_residual,
        complement_residual,
        orthogonality_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityReport {
    pub d: usize,
    pub k_prime: usize,
    /// Per block: size divisible by `k′`.
    pub flags: Vec<bool>,
}

impl DivisibilityReport {
    pub fn all_divisible(&self) -> bool {
        self.flags.iter().all(|&f| f)
    }
}

/// `d = gcd(k, n)`, `k′ = k / d`, and whether each block size is a multiple of `k′`.
pub fn divisibility_check(partition: &Partition, k: usize, n: usize) -> Result<DivisibilityReport> {
    if partition.k() != k {
        return Err(FrameError::InvalidPartition(format!(
            "partition is of {} elements, expected {k}",
            partition.k()
        )));
    }
    if k == 0 || n == 0 {
        return Err(FrameError::InvalidArgument("k and n must be positive".into()));
    }
    let d = gcd(k, n);
    let k_prime = k / d;
    let flags = partition.blocks().iter().map(|b| b.len() % k_prime == 0).collect();
    Ok(DivisibilityReport { d, k_prime, flags })
}

/// The decomposition type of a tight frame and whether it lies in `P(k, k′)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub partition: Partition,
    pub admissible: bool,
    pub divisibility: DivisibilityReport,
}

pub fn classify_sigma(frame: &Frame, tol: f64) -> Result<Stratum> {
    let partition = ortho_decompose(frame, tol)?;
    let divisibility = divisibility_check(&partition, frame.k(), frame.n())?;
    Ok(Stratum { admissible: divisibility.all_divisible(), partition, divisibility })
}

/// Frame on `A^{Σnᵢ}` with part `i` placed in the `i`-th coordinate block.
/// Every part must be tight with constant `b`.
pub fn direct_sum_frames(parts: &[Frame], b: f64, tol: f64) -> Result<Frame> {
    for (idx, part) in parts.iter().enumerate() {
        let report = check_tight(part, tol);
        if !report.is_tight {
            return Err(FrameError::NotTight { residual: report.residual, b: report.b });
        }
        if (report.b - b).abs() > tol * b.max(1.0) {
            return Err(FrameError::MismatchedConstant { expected: b, found: report.b, part: idx });
        }
    }
    let matrices: Vec<AMatrix> = parts.iter().map(|p| p.matrix().clone()).collect();
    Frame::new(AMatrix::block_diagonal(&matrices)?)
}

/// One block of a [`DecompositionReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    /// 1-based.
    pub indices: Vec<usize>,
    pub size: usize,
    /// Frame constant of the block on its range.
    pub b: f64,
    /// `‖F_I F_I* − b P‖`.
    pub residual: f64,
    pub is_tight: bool,
    pub commutation_residual: f64,
    pub divisible: bool,
    /// Rank of the range projection in each flattened summand.
    pub range_ranks: Vec<usize>,
    #[serde(skip)]
    pub range_projection: Option<AMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub algebra: Vec<usize>,
    pub n: usize,
    pub k: usize,
    pub tightness: TightnessReport,
    pub spherical: SphericalReport,
    /// 1-based blocks.
    pub partition: Vec<Vec<usize>>,
    pub d: usize,
    pub k_prime: usize,
    pub divisibility: Vec<bool>,
    /// Partition lies in `P(k, k′)`.
    pub admissible: bool,
    pub blocks: Vec<BlockReport>,
}

fn projection_rank(p: &CMatrix) -> usize {
    p.trace().re.round().max(0.0) as usize
}

fn block_report(frame: &Frame, indices: &[usize], divisible: bool, tol: f64) -> Result<BlockReport> {
    let sub = restrict(frame, indices)?;
    let p = range_projection(&sub, tol);
    let s = sub.matrix().matmul(&sub.matrix().adjoint())?;
    let range_ranks: Vec<usize> = p.flat_blocks().iter().map(projection_rank).collect();
    let estimates: Vec<f64> = s
        .flat_blocks()
        .iter()
        .zip(&range_ranks)
        .filter(|(_, &r)| r > 0)
        .map(|(blk, &r)| blk.trace().re / r as f64)
        .collect();
    let b = if estimates.is_empty() { 0.0 } else { estimates.iter().sum::<f64>() / estimates.len() as f64 };
    let residual = tight_on_range_residual(sub.matrix(), b, &p)?;
    Ok(BlockReport {
        indices: indices.iter().map(|i| i + 1).collect(),
        size: indices.len(),
        b,
        residual,
        is_tight: b > tol && residual <= tol * b.max(1.0),
        commutation_residual: commutation_residual(frame, indices)?,
        divisible,
        range_ranks,
        range_projection: Some(p),
    })
}

/// Tightness, strict sphericity, the finest orthogonal splitting with
/// per-block data, and divisibility of the block sizes.
pub fn analyze(frame: &Frame, tol: f64) -> Result<DecompositionReport> {
    let tightness = check_tight(frame, tol);
    if !tightness.is_tight {
        return Err(FrameError::NotTight { residual: tightness.residual, b: tightness.b });
    }
    let spherical = is_spherical(frame, tol, SphericalMode::Strict);
    let stratum = classify_sigma(frame, tol)?;
    let blocks = stratum
        .partition
        .blocks()
        .iter()
        .zip(&stratum.divisibility.flags)
        .map(|(b, &div)| block_report(frame, b, div, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionReport {
        algebra: frame.spec().summand_dims().to_vec(),
        n: frame.n(),
        k: frame.k(),
        tightness,
        spherical,
        partition: stratum.partition.one_based(),
        d: stratum.divisibility.d,
        k_prime: stratum.divisibility.k_prime,
        divisibility: stratum.divisibility.flags.clone(),
        admissible: stratum.admissible,
        blocks,
    })
}
