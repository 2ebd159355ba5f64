//! Numerical laboratory for the Szegő and Bergman kernels of the model
//! hypersurfaces `Im z₂ = (Re z₁)^{2m}`.
//!
//! The crate evaluates the entire function `φ`, locates its imaginary zeros,
//! builds the singular solutions attached to them, and computes the kernels by
//! two independent routes: a direct integral representation and a Borel-summed
//! residue expansion.

pub mod error;
pub mod kernel;
pub mod numerics;
pub mod phi;
pub mod profile;
pub mod singular;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use phi::ModelOrder;
