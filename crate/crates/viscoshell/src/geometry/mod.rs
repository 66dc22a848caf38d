//! Midsurface charts, fundamental forms, Christoffel symbols, and the scaled
//! 3D shell chart `Θ = θ + εx₃a₃` with its small-`ε` expansions.

pub mod chart;
pub mod surface;
pub mod volume;

pub use chart::{ChartJet, Cylinder, Domain, FiniteDifferenceChart, Graph, HemispherePatch, Height, Plate, SurfaceChart, V3};
pub use surface::{surface_eval, SurfacePointData};
pub use volume::{asymptotic_check, fit_order, volume_eval, volume_eval_at, AsymptoticReport, Order, VolumePointData};
