//! Grünwald–Letnikov weights, edge directions and the directional mask
//! banks built from them.

mod coeffs;
mod direction;
mod mask;

pub(crate) use coeffs::check_order;
pub use coeffs::{frac_derivative_1d, gl_coefficients, FracCoeffs};
pub use direction::{estimate_edge_direction, EdgeDirection, FLAT_THRESHOLD};
pub use mask::{
    build_mask_banks, select_mask, FracMask, LinePoint, MaskBank, MaskBanks, MaskKind,
    MaskResponse, Tap,
};
