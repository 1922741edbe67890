//! Tight frames in `Aⁿ`.
//!
//! A frame is an `n × k` matrix over `A` whose columns are the frame
//! vectors. It is tight with constant `b` when its frame operator
//! `S = F F*` equals `b · I_n`; equivalently `b^{-1/2} F` is a coisometry,
//! and then `F = √b · W_{k,n} · U` for a `k × k` unitary `U`, where
//! `W_{k,n} = [I_n | 0]`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSpec};
use crate::error::{FrameError, Result};
use crate::hilbert::{inner_product, AMatrix};
use crate::linalg;
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    matrix: AMatrix,
}

impl Frame {
    pub fn new(matrix: AMatrix) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(FrameError::Shape(format!(
                "a frame needs n ≥ 1 and k ≥ 1, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Frame { matrix })
    }

    /// Frame from its column vectors, each an `n × 1` matrix.
    pub fn from_columns(columns: &[AMatrix]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| FrameError::Shape("a frame needs at least one column".into()))?;
        let spec = first.spec().clone();
        let n = first.rows();
        let mut entries = vec![AlgebraElement::zero(&spec); n * columns.len()];
        for (l, col) in columns.iter().enumerate() {
            spec.check_same(col.spec())?;
            if col.rows() != n || col.cols() != 1 {
                return Err(FrameError::Shape(format!("column {l} is not an {n}×1 vector")));
            }
            for i in 0..n {
                entries[i * columns.len() + l] = col.entry(i, 0);
            }
        }
        Frame::new(AMatrix::from_entries(&spec, n, columns.len(), &entries)?)
    }

    pub fn matrix(&self) -> &AMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> AMatrix {
        self.matrix
    }

    pub fn spec(&self) -> &AlgebraSpec {
        self.matrix.spec()
    }

    /// Dimension of the ambient module `Aⁿ`.
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of frame vectors.
    pub fn k(&self) -> usize {
        self.matrix.cols()
    }

    /// Frame vector `i` (0-based) as an `n × 1` matrix.
    pub fn column(&self, i: usize) -> Result<AMatrix> {
        self.matrix.column(i)
    }

    pub fn scaled(&self, s: f64) -> Frame {
        Frame { matrix: self.matrix.scale(s) }
    }
}

/// Outcome of [`check_tight`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub b: f64,
    pub residual: f64,
    pub is_tight: bool,
    pub per_summand_b: Vec<f64>,
}

/// `S = F F*`.
pub fn frame_operator(frame: &Frame) -> AMatrix {
    frame.matrix.matmul(&frame.matrix.adjoint()).expect("shapes conform")
}

/// `G = F* F`, whose `(i, j)` entry is `⟨fᵢ, fⱼ⟩`.
pub fn gram_matrix(frame: &Frame) -> AMatrix {
    frame.matrix.adjoint().matmul(&frame.matrix).expect("shapes conform")
}

/// Tests `F F* = b · I`.
///
/// Per summand `bⱼ = tr(Sⱼ) / (n mⱼ)`; `b` is their mean and the residual is
/// `maxⱼ ‖Sⱼ − b I‖`. Tight means the residual is at most `tol · max(1, b)`,
/// every `bⱼ` is within `tol · max(1, b)` of `b`, and `b > tol`.
pub fn check_tight(frame: &Frame, tol: f64) -> TightnessReport {
    let n = frame.n();
    let s = frame_operator(frame);
    let per_summand_b: Vec<f64> = s
        .flat_blocks()
        .iter()
        .zip(frame.spec().summand_dims())
        .map(|(block, &m)| block.trace().re / (n * m) as f64)
        .collect();
    let b = per_summand_b.iter().sum::<f64>() / per_summand_b.len() as f64;
    let residual = s
        .flat_blocks()
        .iter()
        .map(|block| linalg::spectral_norm(&(block - linalg::identity(block.nrows()) * linalg::c(b))))
        .fold(0.0, f64::max);
    let scale = b.max(1.0);
    let agree = per_summand_b.iter().all(|bj| (bj - b).abs() <= tol * scale);
    let is_tight = b > tol && residual <= tol * scale && agree;
    TightnessReport { b, residual, is_tight, per_summand_b }
}

/// Diagnostic comparing the scalar-norm form of tightness,
/// `Σᵢ ‖⟨v, fᵢ⟩‖² = b ‖⟨v, v⟩‖`, on random vectors `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarDefinitionReport {
    pub samples: usize,
    /// `max |Δ(v)|`.
    pub max_equality_deviation: f64,
    /// Number of samples with `Δ(v) < −tol`.
    pub inequality_violations: usize,
    pub min_gap: f64,
    pub max_gap: f64,
}

/// `Δ(v) = Σᵢ ‖⟨v, fᵢ⟩‖² − b ‖⟨v, v⟩‖`.
pub fn definition_gap(frame: &Frame, b: f64, v: &AMatrix) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..frame.k() {
        let x = inner_product(v, &frame.column(i)?)?.norm();
        sum += x * x;
    }
    Ok(sum - b * inner_product(v, v)?.norm())
}

/// Samples `num_samples` Gaussian vectors, sample `t` drawn from stream `t`
/// of `seed`.
pub fn scalar_definition_check(
    frame: &Frame,
    b: f64,
    num_samples: usize,
    seed: u64,
    tol: f64,
) -> ScalarDefinitionReport {
    let mut report = ScalarDefinitionReport {
        samples: num_samples,
        max_equality_deviation: 0.0,
        inequality_violations: 0,
        min_gap: f64::INFINITY,
        max_gap: f64::NEG_INFINITY,
    };
    for t in 0..num_samples {
        let mut r = rng::stream(seed, t as u64);
        let v = AMatrix::random(frame.spec(), frame.n(), 1, &mut r);
        let gap = definition_gap(frame, b, &v).expect("vector matches frame shape");
        report.max_equality_deviation = report.max_equality_deviation.max(gap.abs());
        report.min_gap = report.min_gap.min(gap);
        report.max_gap = report.max_gap.max(gap);
        if gap < -tol {
            report.inequality_violations += 1;
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphericalMode {
    /// `⟨fᵢ, fᵢ⟩ = r · 1_A` for one common `r > 0`.
    Strict,
    /// `‖⟨fᵢ, fᵢ⟩‖` constant.
    EqualNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalReport {
    pub mode: SphericalMode,
    pub is_spherical: bool,
    /// Common radius estimate (mean over columns).
    pub radius: f64,
    /// Largest deviation of a column from the common radius.
    pub max_deviation: f64,
    /// Per column: normalized trace (strict) or norm (equal-norm) of `⟨fᵢ, fᵢ⟩`.
    pub column_radii: Vec<f64>,
}

pub fn is_spherical(frame: &Frame, tol: f64, mode: SphericalMode) -> SphericalReport {
    let spec = frame.spec();
    let norms: Vec<AlgebraElement> = (0..frame.k())
        .map(|i| {
            let f = frame.column(i).expect("index in range");
            inner_product(&f, &f).expect("same shape")
        })
        .collect();
    let column_radii: Vec<f64> = match mode {
        SphericalMode::Strict => norms.iter().map(|e| e.normalized_trace().re).collect(),
        SphericalMode::EqualNorm => norms.iter().map(AlgebraElement::norm).collect(),
    };
    let radius = column_radii.iter().sum::<f64>() / column_radii.len() as f64;
    let max_deviation = match mode {
        SphericalMode::Strict => {
            let target = AlgebraElement::scalar(spec, linalg::c(radius));
            norms
                .iter()
                .map(|e| e.distance(&target).expect("same spec"))
                .fold(0.0, f64::max)
        }
        SphericalMode::EqualNorm => column_radii.iter().map(|r| (r - radius).abs()).fold(0.0, f64::max),
    };
    let is_spherical = radius > tol && max_deviation <= tol * radius.max(1.0);
    SphericalReport { mode, is_spherical, radius, max_deviation, column_radii }
}

/// `W_{k,n} = [I_n | 0]`, an `n × k` matrix.
pub fn w_matrix(spec: &AlgebraSpec, k: usize, n: usize) -> Result<AMatrix> {
    if k < n {
        return Err(FrameError::Shape(format!("W_{{k,n}} needs k ≥ n, got k = {k}, n = {n}")));
    }
    let one = AlgebraElement::one(spec);
    let mut w = AMatrix::zeros(spec, n, k);
    for i in 0..n {
        w.set_entry(i, i, &one);
    }
    Ok(w)
}

/// `√b · W_{k,n} · U` for a `k × k` unitary `U`.
pub fn canonical_frame(n: usize, b: f64, unitary: &AMatrix, tol: f64) -> Result<Frame> {
    if !(b > 0.0) {
        return Err(FrameError::InvalidArgument(format!("frame constant must be positive, got {b}")));
    }
    let residual = unitary.unitarity_defect()?;
    if residual > tol {
        return Err(FrameError::NotUnitary { residual });
    }
    let w = w_matrix(unitary.spec(), unitary.cols(), n)?;
    Frame::new(w.matmul(unitary)?.scale(b.sqrt()))
}

/// `F = √b · W_{k,n} · U`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub b: f64,
    pub unitary: AMatrix,
    /// `‖F − √b · W_{k,n} · U‖`.
    pub reconstruction_residual: f64,
}

impl Factorization {
    pub fn reconstruct(&self, n: usize) -> Result<Frame> {
        let w = w_matrix(self.unitary.spec(), self.unitary.cols(), n)?;
        Frame::new(w.matmul(&self.unitary)?.scale(self.b.sqrt()))
    }
}

/// Writes a tight frame in the normal form `√b · W_{k,n} · U`.
pub fn factorize(frame: &Frame, tol: f64) -> Result<Factorization> {
    let report = check_tight(frame, tol);
    if !report.is_tight {
        return Err(FrameError::NotTight { residual: report.residual, b: report.b });
    }
    let b = report.b;
    let g = frame.matrix.scale(1.0 / b.sqrt());
    let unitary = g.complete_to_unitary(tol * b.max(1.0) / b)?;
    let mut fact = Factorization { b, unitary, reconstruction_residual: 0.0 };
    fact.reconstruction_residual = frame.matrix.distance(fact.reconstruct(frame.n())?.matrix())?;
    Ok(fact)
}

/// `canonical_frame` with a Haar-random unitary, seeded.
pub fn random_tight_frame(spec: &AlgebraSpec, k: usize, n: usize, b: f64, seed: u64) -> Result<Frame> {
    if k < n || n == 0 {
        return Err(FrameError::Shape(format!("need 1 ≤ n ≤ k, got k = {k}, n = {n}")));
    }
    let mut r = rng::seeded(seed);
    let u = AMatrix::random_unitary(spec, k, &mut r);
    canonical_frame(n, b, &u, 1e-9)
}

/// `F · diag(u₁, …, u_k)`: column `i` multiplied on the right by `units[i]`.
pub fn right_scale_columns(frame: &Frame, units: &[AlgebraElement]) -> Result<Frame> {
    if units.len() != frame.k() {
        return Err(FrameError::Shape(format!("need {} column factors, got {}", frame.k(), units.len())));
    }
    let mut d = AMatrix::zeros(frame.spec(), frame.k(), frame.k());
    for (i, u) in units.iter().enumerate() {
        d.set_entry(i, i, u);
    }
    Frame::new(frame.matrix.matmul(&d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{mercedes_benz, orthonormal_basis, scalar_frame};
    use crate::linalg::c;

    fn scalar() -> AlgebraSpec {
        AlgebraSpec::scalar()
    }

    #[test]
    fn frame_operator_of_w_is_identity() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let f = Frame::new(w_matrix(&spec, 5, 3).unwrap()).unwrap();
        assert_eq!(frame_operator(&f), AMatrix::identity(&spec, 3));
    }

    #[test]
    fn repeated_vector_has_operator_two() {
        let f = scalar_frame(&scalar(), &[vec![c(1.0), c(1.0)]]).unwrap();
        let s = frame_operator(&f);
        assert_eq!(s.entry(0, 0).blocks()[0][(0, 0)], c(2.0));
        let report = check_tight(&f, 1e-9);
        assert!(report.is_tight);
        assert_eq!(report.b, 2.0);
    }

    #[test]
    fn mercedes_benz_operator_matches_hand_sum() {
        // Σ uᵢ uᵢᵀ accumulated in plain reals.
        let mut s = [[0.0_f64; 2]; 2];
        for deg in [90.0_f64, 210.0, 330.0] {
            let u = [deg.to_radians().cos(), deg.to_radians().sin()];
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] += u[i] * u[j];
                }
            }
        }
        assert!((s[0][0] - 1.5).abs() < 1e-15 && (s[1][1] - 1.5).abs() < 1e-15 && s[0][1].abs() < 1e-15);
        for spec in [scalar(), AlgebraSpec::matrix(2).unwrap(), AlgebraSpec::new(vec![1, 1]).unwrap()] {
            let f = mercedes_benz(&spec);
            let op = frame_operator(&f);
            for i in 0..2 {
                for j in 0..2 {
                    let expected = AlgebraElement::scalar(&spec, c(s[i][j]));
                    assert!(op.entry(i, j).distance(&expected).unwrap() < 1e-14);
                }
            }
            let report = check_tight(&f, 1e-9);
            assert!(report.is_tight);
            assert!((report.b - 1.5).abs() < 1e-14);
        }
    }

    #[test]
    fn unbalanced_frame_is_not_tight() {
        let f = scalar_frame(&scalar(), &[vec![c(1.0), c(0.0), c(1.0)], vec![c(0.0), c(1.0), c(0.0)]]).unwrap();
        let report = check_tight(&f, 1e-9);
        assert!(!report.is_tight);
        assert!((report.b - 1.5).abs() < 1e-15);
        assert!((report.residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn differing_summand_constants_are_not_tight() {
        let spec = AlgebraSpec::new(vec![1, 1]).unwrap();
        let e = AlgebraElement::new(spec.clone(), vec![linalg::identity(1), linalg::identity(1) * c(2.0)]).unwrap();
        let f = Frame::new(AMatrix::from_entries(&spec, 1, 1, &[e]).unwrap()).unwrap();
        let report = check_tight(&f, 1e-9);
        assert_eq!(report.per_summand_b, vec![1.0, 4.0]);
        assert!(!report.is_tight);
    }

    #[test]
    fn canonical_frames_are_tight_with_their_constant() {
        let mut r = rng::seeded(3);
        for dims in [vec![1], vec![2], vec![2, 1]] {
            let spec = AlgebraSpec::new(dims).unwrap();
            for b in [0.5, 1.0, 2.0] {
                let u = AMatrix::random_unitary(&spec, 5, &mut r);
                let f = canonical_frame(3, b, &u, 1e-9).unwrap();
                let report = check_tight(&f, 1e-9);
                assert!(report.is_tight);
                assert!(report.residual < 1e-10);
                assert!((report.b - b).abs() < 1e-10 * b);
            }
        }
    }

    #[test]
    fn canonical_frame_edge_cases() {
        let spec = AlgebraSpec::matrix(2).unwrap();
        let id = AMatrix::identity(&spec, 3);
        let f = canonical_frame(2, 4.0, &id, 1e-9).unwrap();
        assert_eq!(f.matrix(), &w_matrix(&spec, 3, 2).unwrap().scale(2.0));
        let basis = canonical_frame(3, 1.0, &id, 1e-9).unwrap();
        assert_eq!(basis, orthonormal_basis(&spec, 3, 1.0));
        assert!(matches!(canonical_frame(2, 0.0, &id, 1e-9), Err(FrameError::InvalidArgument(_))));
        assert!(matches!(canonical_frame(2, 1.0, &id.scale(2.0), 1e-9), Err(FrameError::NotUnitary { .. })));
        assert!(matches!(canonical_frame(4, 1.0, &id, 1e-9), Err(FrameError::Shape(_))));
    }

    #[test]
    fn w_matrix_shapes() {
        let spec = scalar();
        let w = w_matrix(&spec, 3, 2).unwrap();
        let expected: Vec<_> = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]
            .iter()
            .map(|&x| AlgebraElement::scalar(&spec, c(x)))
            .collect();
        assert_eq!(w.entries(), expected);
        assert_eq!(w_matrix(&spec, 4, 4).unwrap(), AMatrix::identity(&spec, 4));
        assert_eq!(w.matmul(&w.adjoint()).unwrap(), AMatrix::identity(&spec, 2));
        assert!(matches!(w_matrix(&spec, 2, 3), Err(FrameError::Shape(_))));
    }

    #[test]
    fn factorize_scaled_w() {
        let spec = scalar();
        let f = Frame::new(w_matrix(&spec, 3, 2).unwrap().scale(2f64.sqrt())).unwrap();
        let fact = factorize(&f, 1e-9).unwrap();
        assert!((fact.b - 2.0).abs() < 1e-15);
        assert!(fact.unitary.distance(&AMatrix::identity(&spec, 3)).unwrap() < 1e-14);
        assert!(fact.reconstruction_residual < 1e-14);
    }

    #[test]
    fn factorize_mercedes_benz() {
        for spec in [scalar(), AlgebraSpec::matrix(2).unwrap()] {
            let f = mercedes_benz(&spec);
            let fact = factorize(&f, 1e-9).unwrap();
            assert!((fact.b - 1.5).abs() < 1e-12);
            assert!(fact.unitary.is_unitary(1e-10).unwrap());
            assert!(fact.reconstruction_residual < 1e-10);
        }
    }

    #[test]
    fn factorize_rejects_non_tight() {
        let f = scalar_frame(&scalar(), &[vec![c(1.0), c(0.0), c(1.0)], vec![c(0.0), c(1.0), c(0.0)]]).unwrap();
        assert!(matches!(factorize(&f, 1e-9), Err(FrameError::NotTight { .. })));
    }

    #[test]
    fn factorize_round_trips_random_frames() {
        for (s, dims) in [vec![1], vec![3], vec![1, 1], vec![2, 1]].into_iter().enumerate() {
            let spec = AlgebraSpec::new(dims).unwrap();
            let f = random_tight_frame(&spec, 6, 4, 0.7, s as u64).unwrap();
            let fact = factorize(&f, 1e-9).unwrap();
            assert!((fact.b - 0.7).abs() < 1e-12);
            assert!(fact.unitary.unitarity_defect().unwrap() < 1e-10);
            assert!(fact.reconstruction_residual < 1e-10);
        }
    }

    #[test]
    fn random_tight_frame_is_deterministic() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let a = random_tight_frame(&spec, 5, 2, 1.0, 11).unwrap();
        let b = random_tight_frame(&spec, 5, 2, 1.0, 11).unwrap();
        let other = random_tight_frame(&spec, 5, 2, 1.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert!(random_tight_frame(&spec, 2, 5, 1.0, 0).is_err());
    }

    #[test]
    fn square_random_tight_frame_has_unitary_columns() {
        let spec = AlgebraSpec::matrix(2).unwrap();
        let f = random_tight_frame(&spec, 4, 4, 3.0, 5).unwrap();
        assert!(f.scaled(1.0 / 3f64.sqrt()).matrix().is_unitary(1e-12).unwrap());
    }

    #[test]
    fn spherical_predicates() {
        let spec = scalar();
        let w = Frame::new(w_matrix(&spec, 3, 2).unwrap()).unwrap();
        assert!(!is_spherical(&w, 1e-9, SphericalMode::Strict).is_spherical);
        assert!(!is_spherical(&w, 1e-9, SphericalMode::EqualNorm).is_spherical);

        let mb = is_spherical(&mercedes_benz(&AlgebraSpec::matrix(2).unwrap()), 1e-9, SphericalMode::Strict);
        assert!(mb.is_spherical);
        assert!((mb.radius - 1.0).abs() < 1e-14);

        let generic = random_tight_frame(&spec, 5, 3, 1.0, 2).unwrap();
        let report = is_spherical(&generic, 1e-9, SphericalMode::EqualNorm);
        assert!(!report.is_spherical);
        assert_eq!(report.column_radii.len(), 5);
    }

    #[test]
    fn equal_norm_is_weaker_than_strict() {
        // ⟨f, f⟩ = diag(1, 0) has norm 1 but is not a multiple of 1_A.
        let spec = AlgebraSpec::matrix(2).unwrap();
        let mut p = linalg::identity(2);
        p[(1, 1)] = c(0.0);
        let e = AlgebraElement::new(spec.clone(), vec![p]).unwrap();
        let f = Frame::new(AMatrix::from_entries(&spec, 1, 2, &[e.clone(), e]).unwrap()).unwrap();
        assert!(is_spherical(&f, 1e-9, SphericalMode::EqualNorm).is_spherical);
        assert!(!is_spherical(&f, 1e-9, SphericalMode::Strict).is_spherical);
    }

    #[test]
    fn scalar_definition_holds_with_equality_over_c() {
        let spec = scalar();
        let w = Frame::new(w_matrix(&spec, 3, 2).unwrap()).unwrap();
        let e1 = AMatrix::from_entries(&spec, 2, 1, &[AlgebraElement::one(&spec), AlgebraElement::zero(&spec)]).unwrap();
        assert_eq!(definition_gap(&w, 1.0, &e1).unwrap(), 0.0);

        let f = random_tight_frame(&spec, 5, 3, 2.0, 4).unwrap();
        let report = scalar_definition_check(&f, 2.0, 500, 9, 1e-9);
        assert!(report.max_equality_deviation < 1e-9, "{report:?}");
        assert_eq!(report.inequality_violations, 0);
    }

    #[test]
    fn scalar_definition_is_an_inequality_over_m2() {
        let spec = AlgebraSpec::matrix(2).unwrap();
        let f = random_tight_frame(&spec, 4, 2, 1.0, 8).unwrap();
        let report = scalar_definition_check(&f, 1.0, 500, 1, 1e-9);
        assert_eq!(report.inequality_violations, 0);
        assert!(report.min_gap >= -1e-9);
        assert!(report.max_gap > 1e-3, "{report:?}");
    }

    #[test]
    fn right_scale_columns_checks_length() {
        let spec = scalar();
        let f = mercedes_benz(&spec);
        assert!(right_scale_columns(&f, &[AlgebraElement::one(&spec)]).is_err());
        let same = right_scale_columns(&f, &vec![AlgebraElement::one(&spec); 3]).unwrap();
        assert_eq!(same, f);
    }
}
