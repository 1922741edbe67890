//! Named frames and seeded frame families used by tests and the self-test.

use std::f64::consts::PI;

use rand::Rng;

use crate::algebra::{AlgebraElement, AlgebraSpec, C64};
use crate::decomposition::direct_sum_frames;
use crate::error::{FrameError, Result};
use crate::frames::{random_tight_frame, right_scale_columns, Frame};
use crate::hilbert::AMatrix;
use crate::linalg;
use crate::rng::{self, SeededRng};

/// Frame with scalar entries `values[i][l]` (row `i`, column `l`), each
/// embedded as a multiple of `1_A`.
pub fn scalar_frame(spec: &AlgebraSpec, values: &[Vec<C64>]) -> Result<Frame> {
    let n = values.len();
    let k = values.first().map_or(0, Vec::len);
    if values.iter().any(|row| row.len() != k) {
        return Err(FrameError::Shape("ragged rows".into()));
    }
    let entries: Vec<_> = values
        .iter()
        .flatten()
        .map(|&z| AlgebraElement::scalar(spec, z))
        .collect();
    Frame::new(AMatrix::from_entries(spec, n, k, &entries)?)
}

/// Three unit vectors in `C²` at 90°, 210° and 330°, tensored with `1_A`.
/// Tight with `b = 3/2`.
pub fn mercedes_benz(spec: &AlgebraSpec) -> Frame {
    let angles = [90.0_f64, 210.0, 330.0].map(f64::to_radians);
    let row = |f: fn(f64) -> f64| angles.iter().map(|&t| linalg::c(f(t))).collect::<Vec<_>>();
    scalar_frame(spec, &[row(f64::cos), row(f64::sin)]).expect("fixed shape")
}

/// Two Mercedes-Benz frames in `A² ⊕ A²`: `k = 6`, `n = 4`, `b = 3/2`.
pub fn double_mercedes_benz(spec: &AlgebraSpec) -> Frame {
    let mb = mercedes_benz(spec);
    direct_sum_frames(&[mb.clone(), mb], 1.5, 1e-9).expect("equal constants")
}

/// `√b · I_n`: an orthogonal basis frame with `k = n`.
pub fn orthonormal_basis(spec: &AlgebraSpec, n: usize, b: f64) -> Frame {
    Frame::new(AMatrix::identity(spec, n).scale(b.sqrt())).expect("n ≥ 1")
}

/// Harmonic frame: column `l` is `(ω^{l·s})_{s ∈ freqs} / √k` with
/// `ω = e^{2πi/k}`. Tight with `b = 1` and strict-spherical with radius `n/k`.
pub fn harmonic_frame(spec: &AlgebraSpec, k: usize, freqs: &[usize]) -> Result<Frame> {
    let n = freqs.len();
    if n == 0 || n > k {
        return Err(FrameError::Shape(format!("need 1 ≤ n ≤ k, got k = {k}, n = {n}")));
    }
    let scale = 1.0 / (k as f64).sqrt();
    let values: Vec<Vec<C64>> = freqs
        .iter()
        .map(|&s| {
            (0..k)
                .map(|l| C64::from_polar(scale, 2.0 * PI * ((l * s) % k) as f64 / k as f64))
                .collect()
        })
        .collect();
    scalar_frame(spec, &values)
}

/// Random `n`-subset of `0..k`, sorted.
fn random_subset(rng: &mut SeededRng, k: usize, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..k).collect();
    for i in 0..n {
        let j = rng.random_range(i..k);
        pool.swap(i, j);
    }
    let mut out = pool[..n].to_vec();
    out.sort_unstable();
    out
}

fn random_unitary_element(spec: &AlgebraSpec, rng: &mut SeededRng) -> AlgebraElement {
    let blocks = spec
        .summand_dims()
        .iter()
        .map(|&m| linalg::haar_unitary(rng, m))
        .collect();
    AlgebraElement::new(spec.clone(), blocks).expect("shapes conform")
}

/// Random permutation of `0..k`.
pub fn random_permutation(rng: &mut SeededRng, k: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// `V · F · diag(u₁, …, u_k)` for a random unitary `V` on `Aⁿ` and random
/// unitary elements `uᵢ`. Tightness, sphericity and the Gram support pattern
/// are all preserved.
pub fn randomly_rotated(frame: &Frame, rng: &mut SeededRng) -> Result<Frame> {
    let spec = frame.spec().clone();
    let v = AMatrix::random_unitary(&spec, frame.n(), rng);
    let units: Vec<_> = (0..frame.k()).map(|_| random_unitary_element(&spec, rng)).collect();
    let rotated = Frame::new(v.matmul(frame.matrix())?)?;
    right_scale_columns(&rotated, &units)
}

/// Strict-spherical tight frame assembled as a rotated, column-shuffled
/// direct sum of harmonic pieces. Every piece `(kᵢ, nᵢ)` must have the same
/// ratio `kᵢ / nᵢ`.
pub fn spherical_direct_sum(spec: &AlgebraSpec, pieces: &[(usize, usize)], seed: u64) -> Result<Frame> {
    let mut r = rng::seeded(seed);
    let parts = pieces
        .iter()
        .map(|&(k, n)| {
            let freqs = random_subset(&mut r, k, n);
            randomly_rotated(&harmonic_frame(spec, k, &freqs)?, &mut r)
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = direct_sum_frames(&parts, 1.0, 1e-9)?;
    let perm = random_permutation(&mut r, sum.k());
    let shuffled = Frame::new(sum.matrix().select_columns(&perm)?)?;
    randomly_rotated(&shuffled, &mut r)
}

/// Direct sum of random (non-spherical) tight frames with common constant
/// `b`, rotated by a random unitary on the ambient module.
pub fn tight_direct_sum(spec: &AlgebraSpec, pieces: &[(usize, usize)], b: f64, seed: u64) -> Result<Frame> {
    let mut r = rng::seeded(seed);
    let parts = pieces
        .iter()
        .map(|&(k, n)| random_tight_frame(spec, k, n, b, r.random()))
        .collect::<Result<Vec<_>>>()?;
    let sum = direct_sum_frames(&parts, b, 1e-9)?;
    let perm = random_permutation(&mut r, sum.k());
    let v = AMatrix::random_unitary(spec, sum.n(), &mut r);
    Frame::new(v.matmul(&sum.matrix().select_columns(&perm)?)?)
}

/// Piece shapes `(kᵢ, nᵢ)` with a common ratio whose totals satisfy `k ≤ max_k`.
pub fn direct_sum_shapes(max_k: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for k1 in 1..=max_k {
        for n1 in 1..=k1 {
            if gcd(k1, n1) != 1 {
                continue;
            }
            // multiples (a·k1, a·n1) for pieces, at least two pieces
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
            while let Some((mults, used)) = stack.pop() {
                if mults.len() >= 2 {
                    out.push(mults.iter().map(|&a| (a * k1, a * n1)).collect());
                }
                let start = mults.last().copied().unwrap_or(1);
                for a in start.. {
                    if used + a * k1 > max_k {
                        break;
                    }
                    let mut next = mults.clone();
                    next.push(a);
                    stack.push((next, used + a * k1));
                }
            }
        }
    }
    out.sort();
    out
}

/// Labelled tight frames with `k ≤ max_k` over `C`, `M₂(C)` and `C ⊕ C`:
/// generic frames, orthogonal block fixtures and the `k = n` boundary.
pub fn split_corpus(max_k: usize, seed: u64) -> Result<Vec<(String, Frame)>> {
    let generic = [(3, 2), (4, 3), (5, 2), (6, 4), (7, 3), (8, 5)];
    let boundary = [(2, 2), (4, 4), (6, 6)];
    let blocks: [&[(usize, usize)]; 5] = [
        &[(3, 2), (3, 2)],
        &[(2, 1), (3, 2)],
        &[(1, 1), (3, 2)],
        &[(4, 3), (4, 1)],
        &[(3, 1), (2, 2), (3, 2)],
    ];
    let specs = [vec![1], vec![2], vec![1, 1]];
    let mut out = Vec::new();
    let mut r = rng::seeded(seed);
    for dims in specs {
        let spec = AlgebraSpec::new(dims.clone())?;
        let tag = format!("{spec}");
        for &(k, n) in generic.iter().filter(|s| s.0 <= max_k) {
            for rep in 0..2 {
                let b = [0.5, 1.0, 2.0][rep % 3 + (k % 2)];
                out.push((format!("generic k={k} n={n} #{rep} {tag}"), random_tight_frame(&spec, k, n, b, r.random())?));
            }
        }
        for &(k, n) in boundary.iter().filter(|s| s.0 <= max_k) {
            out.push((format!("boundary k=n={n} {tag}"), random_tight_frame(&spec, k, n, 1.0, r.random())?));
        }
        for pieces in blocks.iter().filter(|p| p.iter().map(|q| q.0).sum::<usize>() <= max_k) {
            out.push((format!("blocks {pieces:?} {tag}"), tight_direct_sum(&spec, pieces, 1.5, r.random())?));
        }
        out.push((format!("mercedes-benz {tag}"), mercedes_benz(&spec)));
        if max_k >= 6 {
            out.push((format!("double mercedes-benz {tag}"), double_mercedes_benz(&spec)));
        }
    }
    Ok(out)
}

/// Matrix unit `E_{ab}` of `M₂(C)`.
fn matrix_unit(a: usize, b: usize) -> AlgebraElement {
    let mut m = linalg::CMatrix::zeros(2, 2);
    m[(a, b)] = linalg::c(1.0);
    AlgebraElement::new(AlgebraSpec::matrix(2).expect("m = 2"), vec![m]).expect("2×2 block")
}

/// Tight frame over `M₂(C)` with `n = 1`, `k = 2`: `f₁ = E₁₁`, `f₂ = E₂₂`.
/// For `v = 1_A` the norm form of tightness is strict:
/// `Σᵢ ‖⟨v, fᵢ⟩‖² = 2 > 1 = b ‖⟨v, v⟩‖`.
pub fn matrix_unit_frame() -> Frame {
    let spec = AlgebraSpec::matrix(2).expect("m = 2");
    let entries = [matrix_unit(0, 0), matrix_unit(1, 1)];
    Frame::new(AMatrix::from_entries(&spec, 1, 2, &entries).expect("1×2")).expect("nonempty")
}

/// Strict-spherical tight frame over `M₂(C)` with `k = 6`, `n = 3`, `b = 2`
/// whose finest orthogonal splitting is `{1,2,3 | 4,5,6}`.
///
/// Column `i ≤ 3` uses matrix units in the first row and is an isometry
/// from `C²` onto the coordinate plane of `C³ ⊗ e₁` that omits `eᵢ`;
/// columns 4 to 6 repeat this in the second row. The three planes cover each
/// axis twice, so `F F* = 2 I`. Block size 3 is not a multiple of
/// `k / gcd(k, n) = 2`: the ranges of the blocks are not free submodules.
pub fn coordinate_planes_frame() -> Frame {
    let spec = AlgebraSpec::matrix(2).expect("m = 2");
    let mut entries = vec![AlgebraElement::zero(&spec); 3 * 6];
    for row in 0..2 {
        for omit in 0..3 {
            let col = 3 * row + omit;
            let others: Vec<usize> = (0..3).filter(|&i| i != omit).collect();
            entries[others[0] * 6 + col] = matrix_unit(row, 0);
            entries[others[1] * 6 + col] = matrix_unit(row, 1);
        }
    }
    Frame::new(AMatrix::from_entries(&spec, 3, 6, &entries).expect("3×6")).expect("nonempty")
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
