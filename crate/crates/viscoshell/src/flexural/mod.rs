//! The 2D flexural model: Hermite bicubic elements on a structured grid,
//! implicit Euler for the viscous term, and an exponential recurrence for
//! the memory term.

pub mod assemble;
pub mod layout;
pub mod memory;
pub mod solver;

pub use assemble::{
    assemble_bending, assemble_flexural, assemble_membrane_penalty, assemble_tensor_forms, broken_h2_error_sq,
    load_vector, Scaling, StrainKind,
};
pub use layout::{DofLayout2D, Model2D};
pub use memory::{direct_memory_sum, MemoryState, ScalarSurrogate};
pub use solver::{integrate, solve2d, step_count, DisplacementHistory, Flexural2DSetup, Flexural2DSolution, FlexuralSystem, Stepper};
