//! Cylinder functions needed by the partial-wave amplitudes.

mod bessel;
mod hankel;

pub use bessel::{
    bessel_j, bessel_j_derivative, bessel_j_scaled_sequence, bessel_j_sequence, IM_GUARD,
    MAX_ORDER, SERIES_RADIUS,
};
pub use hankel::{hankel1, hankel1_derivative, CylinderTable, ASYMPTOTIC_MIN};

pub(crate) use bessel::{derivative_entry, signed_entry};

/// `a / b` with both operands rescaled first, so `|b|²` cannot overflow or
/// underflow.
pub(crate) fn scaled_div(
    a: num_complex::Complex64,
    b: num_complex::Complex64,
) -> num_complex::Complex64 {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 || !s.is_finite() {
        return a / b;
    }
    (a / s) / (b / s)
}
