//! Periodic bar-and-joint frameworks and their auxetic and expansive
//! deformations.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod deformation;
pub mod error;
pub mod framework;
pub mod io;
pub mod planar;
pub mod render;
pub mod study3d;
pub mod symcone;

pub use error::{Error, Result};
