//! The scaled 3D problem on `Ω = ω × (−1, 1)`: trilinear hexahedra on the
//! extruded grid, implicit Euler in time, and the averaging/Korn diagnostics.

pub mod diagnostics;
pub mod element;
pub mod solver;

pub use diagnostics::{bilinear_eval, bilinear_norms_sq, extrude, field_norms_sq, korn_ratio, transverse_average};
pub use element::{assemble3d, basis_strains, field_strain, gauss_points, load3d, Layout3D, ShearStrain};
pub use solver::{solve3d, Shell3DSetup, Shell3DSolution};
