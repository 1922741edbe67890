//! Spherical tight frames by descent on the frame potential.
//!
//! The frame potential `FP(F) = Σⱼ ‖(F*F)ⱼ‖²_HS` is bounded below by
//! `Σⱼ tr(Sⱼ)² / (n mⱼ)` with equality exactly when every flattened frame
//! operator is scalar. On the constraint set `⟨fᵢ, fᵢ⟩ = r · 1_A` the trace
//! is fixed, so minimizers with a common constant are the spherical tight
//! frames with `b = k r / n`. The optimizer takes projected gradient steps
//! on that set, retracting each column with `f ↦ f (⟨f, f⟩ / r)^{-1/2}`.
//!
//! Near a minimizer the potential differs from its bound by the square of
//! the tightness residual, far below the rounding error of the potential
//! itself. The line search therefore compares the excess
//! `Σⱼ ‖Sⱼ − μⱼ I‖²_HS` (with `μⱼ = tr Sⱼ / (n mⱼ)`), which equals the
//! potential minus its bound and is computed without cancellation; the
//! logged potential is the constraint-set bound plus that excess.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSpec;
use crate::error::{FrameError, Result};
use crate::frames::{check_tight, gram_matrix, Frame};
use crate::hilbert::AMatrix;
use crate::linalg::{self, CMatrix};
use crate::rng::{self, gaussian_matrix, SeededRng};

/// Attempts to redraw a degenerate starting column before giving up.
const MAX_RESEEDS: usize = 10;
/// Smallest trial step before the line search gives up.
const MIN_STEP: f64 = 1e-18;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub step_size: f64,
    pub max_iters: usize,
    pub tight_tol: f64,
    pub seed: u64,
    /// Target `⟨fᵢ, fᵢ⟩ = r · 1_A`; `None` means `n / k`, giving `b = 1`.
    pub radius: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { step_size: 0.05, max_iters: 20_000, tight_tol: 1e-8, seed: 0, radius: None }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !(self.tight_tol > 0.0) || self.max_iters == 0 {
            return Err(FrameError::InvalidArgument(format!(
                "step_size, tight_tol and max_iters must be positive: {self:?}"
            )));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return Err(FrameError::InvalidArgument(format!("radius must be positive, got {r}")));
            }
        }
        Ok(())
    }

    pub fn radius_for(&self, k: usize, n: usize) -> f64 {
        self.radius.unwrap_or(n as f64 / k as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub iteration: usize,
    pub potential: f64,
    /// Potential minus its lower bound.
    pub excess: f64,
    pub residual: f64,
    /// Step length accepted by the line search (0 for the starting point).
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerTrace {
    pub config: OptimizerConfig,
    pub radius: f64,
    /// Every accepted iterate, starting with iteration 0.
    pub iterates: Vec<IterateRecord>,
    pub final_frame: Frame,
    pub converged: bool,
    /// Starting columns redrawn because they were degenerate.
    pub reseeds: usize,
}

impl OptimizerTrace {
    pub fn final_record(&self) -> &IterateRecord {
        self.iterates.last().expect("trace holds the starting point")
    }

    pub fn final_residual(&self) -> f64 {
        self.final_record().residual
    }

    /// Every 50th iterate plus the last one.
    pub fn decimated(&self) -> Vec<IterateRecord> {
        let mut out: Vec<_> = self.iterates.iter().filter(|r| r.iteration % 50 == 0).copied().collect();
        let last = *self.final_record();
        if out.last().map(|r| r.iteration) != Some(last.iteration) {
            out.push(last);
        }
        out
    }
}

/// `Σⱼ ‖(F*F)ⱼ‖²_HS`.
pub fn frame_potential(frame: &Frame) -> f64 {
    gram_matrix(frame).frobenius_squared()
}

/// `Σⱼ tr(Sⱼ)² / (n mⱼ)`, the minimum of the potential at fixed traces.
pub fn potential_lower_bound(frame: &Frame) -> f64 {
    frame
        .matrix()
        .flat_blocks()
        .iter()
        .zip(frame.spec().summand_dims())
        .map(|(b, &m)| {
            let t = b.norm_squared();
            t * t / (frame.n() * m) as f64
        })
        .sum()
}

/// `Σⱼ ‖Sⱼ − μⱼ I‖²_HS` with `Sⱼ` the flattened frame operator and
/// `μⱼ = tr Sⱼ / (n mⱼ)`; equal to `frame_potential − potential_lower_bound`.
pub fn potential_excess(frame: &Frame) -> f64 {
    frame
        .matrix()
        .flat_blocks()
        .iter()
        .map(|f| {
            let s = f * f.adjoint();
            let mu = s.trace().re / s.nrows() as f64;
            (s - linalg::identity(f.nrows()) * linalg::c(mu)).norm_squared()
        })
        .sum()
}

/// Lower bound of the potential on `{⟨fᵢ, fᵢ⟩ = r 1_A}`: `Σⱼ (k r)² mⱼ / n`.
pub fn constrained_lower_bound(spec: &AlgebraSpec, k: usize, n: usize, radius: f64) -> f64 {
    let kr = k as f64 * radius;
    spec.summand_dims().iter().map(|&m| kr * kr * m as f64 / n as f64).sum()
}

/// Gradient of [`frame_potential`] in the flattened real coordinates,
/// `4 F (F*F)` per summand.
pub fn potential_gradient(frame: &Frame) -> AMatrix {
    let blocks = frame
        .matrix()
        .flat_blocks()
        .iter()
        .map(|f| f * (f.adjoint() * f) * linalg::c(4.0))
        .collect();
    AMatrix::from_blocks_unchecked(frame.spec(), frame.n(), frame.k(), blocks)
}

/// Projects `direction` onto the tangent space of `{⟨fᵢ, fᵢ⟩ = r 1_A}` at
/// `frame`: `ξᵢ ↦ ξᵢ − fᵢ · herm(fᵢ* ξᵢ) / r`.
pub fn project_tangent(frame: &Frame, direction: &AMatrix, radius: f64) -> Result<AMatrix> {
    if direction.rows() != frame.n() || direction.cols() != frame.k() {
        return Err(FrameError::Shape("direction must have the frame's shape".into()));
    }
    frame.spec().check_same(direction.spec())?;
    let blocks = frame
        .matrix()
        .flat_blocks()
        .iter()
        .zip(direction.flat_blocks())
        .zip(frame.spec().summand_dims())
        .map(|((f, d), &m)| {
            let mut out = d.clone();
            for i in 0..frame.k() {
                let fi = f.columns(i * m, m);
                let di = d.columns(i * m, m);
                let sym = linalg::hermitian_part(&(fi.adjoint() * di));
                let corrected = di - fi * sym * linalg::c(1.0 / radius);
                out.columns_mut(i * m, m).copy_from(&corrected);
            }
            out
        })
        .collect();
    Ok(AMatrix::from_blocks_unchecked(frame.spec(), frame.n(), frame.k(), blocks))
}

/// Replaces every column by `fᵢ (⟨fᵢ, fᵢ⟩ / r)^{-1/2}`.
///
/// Fails with [`FrameError::DegenerateColumn`] when some `⟨fᵢ, fᵢ⟩` has an
/// eigenvalue at or below `tol`.
pub fn retract_spherical(frame: &Frame, radius: f64, tol: f64) -> Result<Frame> {
    let k = frame.k();
    let mut blocks: Vec<CMatrix> = frame.matrix().flat_blocks().to_vec();
    for (block, &m) in blocks.iter_mut().zip(frame.spec().summand_dims()) {
        for i in 0..k {
            let fi = block.columns(i * m, m).into_owned();
            let h = fi.adjoint() * &fi;
            let min_eigenvalue = linalg::min_hermitian_eigenvalue(&h);
            if min_eigenvalue <= tol {
                return Err(FrameError::DegenerateColumn { index: i, min_eigenvalue });
            }
            let inv_sqrt = linalg::hermitian_function(&h, |x| (radius / x).sqrt());
            block.columns_mut(i * m, m).copy_from(&(fi * inv_sqrt));
        }
    }
    Frame::new(AMatrix::from_blocks_unchecked(frame.spec(), frame.n(), k, blocks))
}

fn redraw_column(frame: &Frame, index: usize, rng: &mut SeededRng) -> Frame {
    let blocks = frame
        .matrix()
        .flat_blocks()
        .iter()
        .zip(frame.spec().summand_dims())
        .map(|(b, &m)| {
            let mut out = b.clone();
            out.columns_mut(index * m, m).copy_from(&gaussian_matrix(rng, b.nrows(), m));
            out
        })
        .collect();
    Frame::new(AMatrix::from_blocks_unchecked(frame.spec(), frame.n(), frame.k(), blocks)).expect("same shape")
}

/// Random starting point on the constraint set, redrawing degenerate columns.
fn starting_frame(spec: &AlgebraSpec, k: usize, n: usize, radius: f64, rng: &mut SeededRng) -> Result<(Frame, usize)> {
    let mut frame = Frame::new(AMatrix::random(spec, n, k, rng))?;
    let mut reseeds = vec![0usize; k];
    loop {
        match retract_spherical(&frame, radius, 1e-12) {
            Ok(f) => return Ok((f, reseeds.iter().sum())),
            Err(FrameError::DegenerateColumn { index, .. }) => {
                reseeds[index] += 1;
                if reseeds[index] > MAX_RESEEDS {
                    return Err(FrameError::Optimizer(format!(
                        "column {index} stayed degenerate after {MAX_RESEEDS} redraws"
                    )));
                }
                frame = redraw_column(&frame, index, rng);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Projected gradient descent with backtracking on the strict-spherical
/// constraint set. Stops once the tightness residual is at most
/// `config.tight_tol`, after `max_iters` iterations, or when no step
/// decreases the potential.
pub fn minimize(spec: &AlgebraSpec, k: usize, n: usize, config: &OptimizerConfig) -> Result<OptimizerTrace> {
    config.validate()?;
    if n == 0 || k < n {
        return Err(FrameError::Shape(format!("need 1 ≤ n ≤ k, got k = {k}, n = {n}")));
    }
    let radius = config.radius_for(k, n);
    let mut r = rng::seeded(config.seed);
    let (mut frame, reseeds) = starting_frame(spec, k, n, radius, &mut r)?;
    let retract_tol = 1e-12 * radius;

    let bound = constrained_lower_bound(spec, k, n, radius);
    let mut excess = potential_excess(&frame);
    let mut residual = check_tight(&frame, config.tight_tol).residual;
    let mut iterates = vec![IterateRecord { iteration: 0, potential: bound + excess, excess, residual, step: 0.0 }];

    for iteration in 1..=config.max_iters {
        if residual <= config.tight_tol {
            break;
        }
        let direction = project_tangent(&frame, &potential_gradient(&frame), radius)?;
        let mut step = config.step_size;
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial = Frame::new(frame.matrix().try_sub(&direction.scale(step))?)?;
            if let Ok(candidate) = retract_spherical(&trial, radius, retract_tol) {
                let e = potential_excess(&candidate);
                if e < excess {
                    accepted = Some((candidate, e));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((candidate, e)) = accepted else { break };
        frame = candidate;
        excess = e;
        residual = check_tight(&frame, config.tight_tol).residual;
        iterates.push(IterateRecord { iteration, potential: bound + excess, excess, residual, step });
    }

    Ok(OptimizerTrace {
        config: config.clone(),
        radius,
        converged: residual <= config.tight_tol,
        iterates,
        final_frame: frame,
        reseeds,
    })
}
