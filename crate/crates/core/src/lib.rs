//! Comparison spaces over hyperbolic space and numerical verification of
//! extrinsic-ball inequalities for surfaces immersed in `H^n(b)`.

pub mod comparison_space;
pub mod error;
pub mod extrinsic_analysis;
pub mod immersed_surface;
pub mod model_space;
pub mod radial_math;

pub use error::{GeomError, Result};
