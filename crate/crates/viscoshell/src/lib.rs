//! Viscoelastic flexural shells.
//!
//! - [`geometry`]: midsurface charts and the scaled 3D shell chart.
//! - [`material`]: Kelvin–Voigt tensors and the 2D flexural tensors with memory.
//! - [`kinematics`]: change of metric/curvature and scaled 3D strains.
//! - [`flexural`]: the 2D flexural model (Hermite elements, memory recurrence).
//! - [`shell3d`]: the scaled 3D problem on `ω × (−1, 1)`.
//! - [`harness`]: convergence sweeps, identity checks, reports, and the CLI.

// Tensor components are indexed explicitly; NaN-rejecting `!(x > 0.0)` checks are deliberate.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod flexural;
pub mod geometry;
pub mod harness;
pub mod hermite;
pub mod kinematics;
pub mod loads;
pub mod material;
pub mod mesh;
pub mod quadrature;
pub mod shell3d;
pub mod sparse;

pub use error::{Error, Result};
