//! Dense complex helpers used by every layer above the algebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::algebra::C64;
use crate::rng::gaussian_matrix;

pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    if m.is_empty() {
        return (Vec::new(), m.clone());
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m)
        .0
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// `f(H)` for the Hermitian part `H` of `m`, via its spectral decomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let scaled = DVector::from_iterator(values.len(), values.iter().map(|&v| c(f(v))));
    let mut left = vectors.clone();
    for (j, mut col) in left.column_iter_mut().enumerate() {
        col *= scaled[j];
    }
    left * vectors.adjoint()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Spectral norm of `m m* − I`.
pub fn coisometry_defect(m: &CMatrix) -> f64 {
    spectral_norm(&(m * m.adjoint() - identity(m.nrows())))
}

/// Nearest matrix with orthonormal rows, `(m m*)^{-1/2} m`.
pub fn orthonormalize_rows(m: &CMatrix) -> CMatrix {
    let gram = m * m.adjoint();
    hermitian_function(&gram, |x| 1.0 / x.max(f64::MIN_POSITIVE).sqrt()) * m
}

/// Multiplies `v` by a unit scalar so that its first component of modulus
/// above `1e-10` is real and positive.
pub fn fix_phase(v: &mut DVector<C64>) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-10).copied() {
        let phase = first.conj() / first.norm();
        *v *= phase;
    }
}

/// Orthonormal basis (as columns) of the orthogonal complement of the row
/// space of `rows`, which must have orthonormal rows.
///
/// Column-pivoted Gram–Schmidt on the complementary projector `I − M*M`:
/// the column with the largest residual is taken next, ties going to the
/// lowest index, and every basis vector gets the phase convention of
/// [`fix_phase`]. When `rows = [I | 0]` this returns the trailing standard
/// basis vectors in order.
pub fn row_space_complement(rows: &CMatrix) -> CMatrix {
    let dim = rows.ncols();
    let want = dim.saturating_sub(rows.nrows());
    let projector = identity(dim) - rows.adjoint() * rows;
    let mut residuals: Vec<DVector<C64>> = (0..dim).map(|i| projector.column(i).into_owned()).collect();
    let mut used = vec![false; dim];
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(want);
    for _ in 0..want {
        let mut best = None;
        let mut best_norm = -1.0;
        for (i, r) in residuals.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nr = r.norm();
            if nr > best_norm {
                best_norm = nr;
                best = Some(i);
            }
        }
        let Some(pivot) = best else { break };
        used[pivot] = true;
        let mut q = residuals[pivot].clone();
        // second pass keeps the basis orthonormal to working precision
        for prev in &basis {
            let proj = prev.dotc(&q);
            q -= prev * proj;
        }
        let norm = q.norm();
        if norm <= f64::EPSILON {
            break;
        }
        q /= c(norm);
        for r in residuals.iter_mut() {
            let proj = q.dotc(r);
            *r -= &q * proj;
        }
        basis.push(q);
    }
    let mut out = CMatrix::zeros(dim, basis.len());
    for (j, mut q) in basis.into_iter().enumerate() {
        fix_phase(&mut q);
        out.set_column(j, &q);
    }
    out
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// diagonal of `R` made real positive.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Orthogonal projector onto the column space of `m`, keeping singular
/// values above `cutoff`.
pub fn column_space_projector(m: &CMatrix, cutoff: f64) -> CMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return CMatrix::zeros(rows, rows);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut p = CMatrix::zeros(rows, rows);
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let col = u.column(j);
            p += col * col.adjoint();
        }
    }
    p
}
