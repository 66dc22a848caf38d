//! Guide chapters, compiled so that their code blocks run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("../../../book/src/material.md")]
pub mod material {}
#[doc = include_str!("../../../book/src/flexural.md")]
pub mod flexural {}
#[doc = include_str!("../../../book/src/shell3d.md")]
pub mod shell3d {}
#[doc = include_str!("../../../book/src/convergence.md")]
pub mod convergence {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
