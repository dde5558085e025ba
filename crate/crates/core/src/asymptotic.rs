//! Thick-wire limit: a locally flat surface emitting with `1 - |R|²`,
//! averaged over the emission angle with a `cos φ` weight.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::ComplexPermittivity;
use crate::quadrature::{CompensatedSum, GaussLegendre};

pub const DEFAULT_ANGULAR_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub r_te: Complex64,
    pub r_tm: Complex64,
    pub angle: f64,
}

fn upper_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Reflection coefficients at angle `φ` from the surface normal. TE keeps
/// the electric field in the plane of incidence (orthogonal to the wire
/// axis), TM along the axis.
pub fn fresnel_coefficients(eps: ComplexPermittivity, phi: f64) -> Result<FresnelPair> {
    if !(phi.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain(format!(
            "angle must lie in (-π/2, π/2), got {phi}"
        )));
    }
    let e = eps.0;
    let c = phi.cos();
    let root = upper_sqrt(e - 1.0 + c * c);
    Ok(FresnelPair {
        r_te: (e * c - root) / (e * c + root),
        r_tm: (c - root) / (c + root),
        angle: phi,
    })
}

/// Angle-averaged `(ē_te, ē_tm)`, each `∫ cos φ (1 - |R|²) dφ` over
/// `(-π/2, π/2)`.
pub fn thick_wire_emissivities(eps: ComplexPermittivity, nodes: usize) -> Result<(f64, f64)> {
    if nodes == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    let rule = GaussLegendre::new(nodes);
    let mut te = CompensatedSum::default();
    let mut tm = CompensatedSum::default();
    for (phi, w) in rule.mapped(0.0, std::f64::consts::FRAC_PI_2) {
        let r = fresnel_coefficients(eps, phi)?;
        let c = phi.cos();
        te.add(w * c * (1.0 - r.r_te.norm_sqr()));
        tm.add(w * c * (1.0 - r.r_tm.norm_sqr()));
    }
    Ok((2.0 * te.total(), 2.0 * tm.total()))
}

/// `P ≈ ∫cos φ (|R_tm|² - |R_te|²) / ∫cos φ (2 - |R_te|² - |R_tm|²)`.
pub fn thick_wire_polarization(eps: ComplexPermittivity, nodes: usize) -> Result<f64> {
    let (te, tm) = thick_wire_emissivities(eps, nodes)?;
    let den = te + tm;
    if den < 1e-15 {
        return Err(Error::Degenerate(format!(
            "surface does not emit (∫ = {den:e})"
        )));
    }
    Ok(((te - tm) / den).clamp(-1.0, 1.0))
}
