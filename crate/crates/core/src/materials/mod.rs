//! Drude-type permittivity models for metals.
//!
//! The model sums damped bound-electron resonances and free-electron
//! conduction terms, both parameterized by vacuum wavelength:
//!
//! ```text
//! ε(λ) = 1 + Σ_p K0_p λ² / (λ² - λs_p² - i δ_p λs_p λ)
//!          - λ²/(2πcε0) Σ_q σ_q / (λr_q + i λ)
//! ```
//!
//! The tabulated fits are quoted in the `exp(+iωt)` convention (absorption
//! shows up as `Im ε < 0`). Everything else in this crate uses outgoing
//! `H^(1)` waves, i.e. `exp(-iωt)`, so evaluation returns the complex
//! conjugate of the quoted expression and absorbers have `Im ε > 0`.

mod db;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use db::{
    BoundedTermPolicy, MaterialDatabase, MaterialRecord, DATABASE_ENV, DEFAULT_DATABASE,
    TEMPERATURE_WINDOW_K,
};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity (CODATA 2018), F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Wavelength window (microns) covered by the optical measurements behind
/// the tungsten fits.
pub const FITTED_RANGE_UM: (f64, f64) = (0.365, 2.65);

/// One damped bound-electron resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerm {
    /// Oscillator strength `K0`.
    pub strength: f64,
    /// Resonance wavelength `λs`, microns.
    pub resonance_um: f64,
    /// Dimensionless damping `δ`.
    pub damping: f64,
}

/// One free-electron (Drude) conduction term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeTerm {
    /// Conductivity `σ`, ohm⁻¹ m⁻¹.
    pub sigma: f64,
    /// Relaxation wavelength `λr = 2πcτ`, microns.
    pub relaxation_um: f64,
    pub tentative: bool,
    /// `λr` is only known as an upper bound.
    pub upper_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrudePermittivityModel {
    pub element: String,
    pub temperature_k: f64,
    pub bound_terms: Vec<BoundTerm>,
    pub free_terms: Vec<FreeTerm>,
}

impl DrudePermittivityModel {
    pub fn vacuum() -> Self {
        Self {
            element: "vacuum".into(),
            temperature_k: 298.0,
            bound_terms: Vec::new(),
            free_terms: Vec::new(),
        }
    }

    /// Zero-frequency limit `σ0 = Σ σ_q`.
    pub fn dc_conductivity(&self) -> f64 {
        self.free_terms.iter().map(|t| t.sigma).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.bound_terms {
            if !(t.strength > 0.0 && t.resonance_um > 0.0 && t.damping > 0.0) {
                return Err(Error::MaterialData(format!(
                    "{} at {} K: bound term parameters must be positive: {t:?}",
                    self.element, self.temperature_k
                )));
            }
        }
        for t in &self.free_terms {
            if !(t.sigma > 0.0 && t.relaxation_um > 0.0) {
                return Err(Error::MaterialData(format!(
                    "{} at {} K: free term parameters must be positive: {t:?}",
                    self.element, self.temperature_k
                )));
            }
        }
        Ok(())
    }

    /// Copy without the free terms whose relaxation wavelength is only an
    /// upper bound.
    pub fn without_bounded_terms(&self) -> Self {
        let mut out = self.clone();
        out.free_terms.retain(|t| !t.upper_bound);
        out
    }

    pub fn in_fitted_range(wavelength_um: f64) -> bool {
        (FITTED_RANGE_UM.0..=FITTED_RANGE_UM.1).contains(&wavelength_um)
    }
}

/// Relative permittivity in the `exp(-iωt)` convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity(pub Complex64);

impl ComplexPermittivity {
    pub fn value(self) -> Complex64 {
        self.0
    }
}

pub fn permittivity(
    model: &DrudePermittivityModel,
    wavelength_um: f64,
) -> Result<ComplexPermittivity> {
    if !(wavelength_um > 0.0) || !wavelength_um.is_finite() {
        return Err(Error::domain(format!(
            "wavelength must be finite and > 0, got {wavelength_um}"
        )));
    }
    let lam = wavelength_um;
    let lam2 = lam * lam;
    let mut eps = Complex64::new(1.0, 0.0);
    for t in &model.bound_terms {
        let ls = t.resonance_um;
        let denom = Complex64::new(lam2 - ls * ls, -t.damping * ls * lam);
        eps += t.strength * lam2 / denom;
    }
    // the conduction term needs metres: λ²/λ leaves one length
    let lam_m = lam * 1e-6;
    let prefactor =
        lam_m * lam_m / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * VACUUM_PERMITTIVITY);
    for t in &model.free_terms {
        let denom = Complex64::new(t.relaxation_um * 1e-6, lam_m);
        eps -= prefactor * t.sigma / denom;
    }
    Ok(ComplexPermittivity(eps))
}

/// `n = sqrt(ε)` on the branch `Im n ≥ 0`.
pub fn refraction_index(eps: ComplexPermittivity) -> Complex64 {
    let n = eps.0.sqrt();
    if n.im < 0.0 {
        -n
    } else {
        n
    }
}
