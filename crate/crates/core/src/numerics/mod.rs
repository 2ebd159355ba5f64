//! Quadrature, log-gamma and summation primitives.

pub mod gamma;
pub mod legendre;
pub mod quad;
pub mod sum;

pub use gamma::{ln_gamma_complex, log_gamma, recip_gamma};
pub use quad::{
    integrate_decaying_halfline, integrate_halfline_scaled, integrate_oscillatory_halfline,
    integrate_path, integrate_segment, integrate_segment_endpoint, ContourSegment, QuadResult,
    QuadSpec,
};
pub use sum::{sum_descending, NeumaierSum};
