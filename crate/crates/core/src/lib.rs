//! Spherical tight frames in finitely generated Hilbert modules over
//! finite-dimensional C*-algebras.
//!
//! The algebra `A = M_{m1}(C) ⊕ … ⊕ M_{ms}(C)` is modelled by
//! [`AlgebraSpec`]/[`AlgebraElement`]; matrices over `A` by [`AMatrix`],
//! stored as one complex matrix per summand. On top of that sit
//!
//! - [`frames`]: tightness, the normal form `F = √b · W_{k,n} · U`, factorization;
//! - [`decomposition`]: Gram commutation with coordinate projections,
//!   ortho-decomposition, divisibility and partition strata;
//! - [`optimize`]: frame-potential descent producing spherical tight frames;
//! - [`json`]: the interchange encoding used by the command-line tool.

pub mod algebra;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod frames;
pub mod hilbert;
pub mod json;
pub mod linalg;
pub mod optimize;
pub mod partition;
pub mod rng;
pub mod selftest;

pub use algebra::{AlgebraElement, AlgebraSpec, C64};
pub use decomposition::{DecompositionReport, DivisibilityReport, SplitReport};
pub use error::{FrameError, Result};
pub use frames::{Factorization, Frame, SphericalMode, SphericalReport, TightnessReport};
pub use hilbert::{inner_product, AMatrix, FlatView};
pub use optimize::{OptimizerConfig, OptimizerTrace};
pub use partition::Partition;

/// Default relative tolerance used throughout the library.
pub const DEFAULT_TOL: f64 = 1e-9;
