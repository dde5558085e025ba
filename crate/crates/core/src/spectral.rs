//! Planck weighting, stepwise filters and band-averaged polarization.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::{permittivity, refraction_index, DrudePermittivityModel};
use crate::quadrature::{CompensatedSum, GaussLegendre};
use crate::scattering::{emissivities, DEFAULT_TOLERANCE};
use crate::sweep;

/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub use crate::materials::SPEED_OF_LIGHT;

/// `σ = 2π⁵k⁴/(15h³c²)`, W m⁻² K⁻⁴.
pub fn stefan_boltzmann() -> f64 {
    let pi = std::f64::consts::PI;
    2.0 * pi.powi(5) * BOLTZMANN.powi(4) / (15.0 * PLANCK.powi(3) * SPEED_OF_LIGHT.powi(2))
}

/// Hemispherical spectral exitance `2πhc²/λ⁵ / (exp(hc/λkT) - 1)` in W m⁻³,
/// for a wavelength in microns.
pub fn planck_radiance(wavelength_um: f64, temperature_k: f64) -> f64 {
    let lam = wavelength_um * 1e-6;
    let x = PLANCK * SPEED_OF_LIGHT / (lam * BOLTZMANN * temperature_k);
    let prefactor =
        2.0 * std::f64::consts::PI * PLANCK * SPEED_OF_LIGHT * SPEED_OF_LIGHT / lam.powi(5);
    prefactor / x.exp_m1()
}

/// Stepwise-constant transmission: `transmission` inside the band, zero
/// outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandFilter {
    pub lambda_lo_um: f64,
    pub lambda_hi_um: f64,
    pub transmission: f64,
}

impl BandFilter {
    pub fn new(lambda_lo_um: f64, lambda_hi_um: f64, transmission: f64) -> Result<Self> {
        if !(lambda_lo_um > 0.0 && lambda_lo_um < lambda_hi_um && lambda_hi_um.is_finite()) {
            return Err(Error::domain(format!(
                "filter band needs 0 < lo < hi, got [{lambda_lo_um}, {lambda_hi_um}]"
            )));
        }
        if !(transmission > 0.0 && transmission <= 1.0) {
            return Err(Error::domain(format!(
                "filter transmission must lie in (0, 1], got {transmission}"
            )));
        }
        Ok(Self {
            lambda_lo_um,
            lambda_hi_um,
            transmission,
        })
    }

    /// 0.50 to 0.75 µm, the band used for the computed averages.
    pub fn visible() -> Self {
        Self::new(0.5, 0.75, 1.0).expect("valid preset")
    }

    /// 0.45 to 0.75 µm, the nominal band of the instrument filter.
    pub fn wide_visible() -> Self {
        Self::new(0.45, 0.75, 1.0).expect("valid preset")
    }

    pub fn transmission_at(&self, wavelength_um: f64) -> f64 {
        if (self.lambda_lo_um..=self.lambda_hi_um).contains(&wavelength_um) {
            self.transmission
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub nodes: usize,
    /// Node count of the re-evaluation used for the error estimate.
    pub check_nodes: usize,
    /// Largest acceptable `|𝓟(nodes) - 𝓟(check_nodes)|`.
    pub target: f64,
    /// Truncation tolerance of each partial-wave sum.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: 64,
            check_nodes: 128,
            target: 1e-6,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandAveragedResult {
    pub p_avg: f64,
    /// Band-normalized weighted emissivities.
    pub e_te_bar: f64,
    pub e_tm_bar: f64,
    pub quadrature_nodes: usize,
    pub est_quadrature_error: f64,
    /// Largest partial-wave truncation estimate over all nodes.
    pub max_truncation_error: f64,
}

/// Emissivities at one wavelength plus the truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEmissivity {
    pub e_te: f64,
    pub e_tm: f64,
    pub truncation_error: f64,
}

struct Weighted {
    te: f64,
    tm: f64,
    norm: f64,
    truncation: f64,
}

fn weighted_sums<F>(
    filter: &BandFilter,
    temperature_k: f64,
    nodes: usize,
    emissivity_at: &F,
) -> Result<Weighted>
where
    F: Fn(f64) -> Result<NodeEmissivity> + Sync + Send,
{
    let rule = GaussLegendre::new(nodes);
    let points: Vec<(f64, f64)> = rule
        .mapped(filter.lambda_lo_um, filter.lambda_hi_um)
        .collect();
    let values = sweep::try_map(&points, |&(lam, w)| {
        let weight = w * filter.transmission_at(lam) * planck_radiance(lam, temperature_k);
        emissivity_at(lam).map(|e| (weight, e))
    })?;
    let mut te = CompensatedSum::default();
    let mut tm = CompensatedSum::default();
    let mut norm = CompensatedSum::default();
    let mut truncation = 0.0f64;
    for (weight, e) in values {
        te.add(weight * e.e_te);
        tm.add(weight * e.e_tm);
        norm.add(weight);
        truncation = truncation.max(e.truncation_error);
    }
    Ok(Weighted {
        te: te.total(),
        tm: tm.total(),
        norm: norm.total(),
        truncation,
    })
}

fn ratio(te: f64, tm: f64) -> Result<f64> {
    let sum = te + tm;
    if !(sum.abs() > 0.0) {
        return Err(Error::Degenerate(format!(
            "band-averaged emissivities vanish (te = {te:e}, tm = {tm:e})"
        )));
    }
    Ok((te - tm) / sum)
}

/// Band average with caller-supplied emissivities, e.g. constants for
/// checking the weighting.
pub fn band_average_with<F>(
    filter: &BandFilter,
    temperature_k: f64,
    config: &QuadratureConfig,
    emissivity_at: F,
) -> Result<BandAveragedResult>
where
    F: Fn(f64) -> Result<NodeEmissivity> + Sync + Send,
{
    if !(temperature_k > 0.0) {
        return Err(Error::domain(format!(
            "temperature must be > 0, got {temperature_k}"
        )));
    }
    if config.nodes == 0 || config.check_nodes == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    let main = weighted_sums(filter, temperature_k, config.nodes, &emissivity_at)?;
    let check = weighted_sums(filter, temperature_k, config.check_nodes, &emissivity_at)?;
    let e_te_bar = main.te / main.norm;
    let e_tm_bar = main.tm / main.norm;
    let p_avg = ratio(e_te_bar, e_tm_bar)?;
    let p_check = ratio(check.te / check.norm, check.tm / check.norm)?;
    let est = (p_avg - p_check).abs();
    if !(est <= config.target) {
        return Err(Error::Quadrature {
            nodes: config.nodes + config.check_nodes,
            estimate: est,
            target: config.target,
        });
    }
    Ok(BandAveragedResult {
        p_avg,
        e_te_bar,
        e_tm_bar,
        quadrature_nodes: config.nodes,
        est_quadrature_error: est,
        max_truncation_error: main.truncation.max(check.truncation),
    })
}

/// Emissivities of a wire of radius `a` (microns) at one wavelength.
pub fn wire_emissivity(
    model: &DrudePermittivityModel,
    radius_um: f64,
    wavelength_um: f64,
    tol: f64,
) -> Result<NodeEmissivity> {
    let n: Complex64 = refraction_index(permittivity(model, wavelength_um)?);
    let k = 2.0 * std::f64::consts::PI / wavelength_um;
    let e = emissivities(k, radius_um, n, tol)?;
    Ok(NodeEmissivity {
        e_te: e.e_te,
        e_tm: e.e_tm,
        truncation_error: e.truncation_error_estimate,
    })
}

/// Planck- and filter-weighted polarization of a wire of radius `a`.
pub fn band_averaged_polarization(
    radius_um: f64,
    temperature_k: f64,
    filter: &BandFilter,
    model: &DrudePermittivityModel,
    config: &QuadratureConfig,
) -> Result<BandAveragedResult> {
    if !(radius_um > 0.0) {
        return Err(Error::domain(format!(
            "wire radius must be > 0, got {radius_um}"
        )));
    }
    band_average_with(filter, temperature_k, config, |lam| {
        wire_emissivity(model, radius_um, lam, config.tolerance)
    })
}
