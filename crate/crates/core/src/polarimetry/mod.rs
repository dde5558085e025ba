//! Rotating-analyzer polarimetry: simulated scans, cosine-squared fits and
//! the two-step extraction that cancels a constant background.
//!
//! Angles are degrees at every interface and radians inside.

mod scan;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub use scan::PolarimeterScan;

/// Fewest samples accepted by [`fit_cos_squared`].
pub const MIN_SAMPLES: usize = 6;
/// Smallest angular span that still separates the two harmonics.
pub const MIN_SPAN_DEG: f64 = 90.0;
/// Phase mismatch above which extraction reports a warning.
pub const PHASE_WARNING_DEG: f64 = 0.5;
/// Default sampling step of one rotation.
pub const DEFAULT_STEP_DEG: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    pub i_polarized: f64,
    pub i_unpolarized: f64,
    pub polarization_axis_deg: f64,
    pub ir_background: f64,
}

impl SourceModel {
    pub fn new(
        i_polarized: f64,
        i_unpolarized: f64,
        polarization_axis_deg: f64,
        ir_background: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("polarized intensity", i_polarized),
            ("unpolarized intensity", i_unpolarized),
            ("background", ir_background),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !polarization_axis_deg.is_finite() {
            return Err(Error::domain("polarization axis must be finite"));
        }
        Ok(Self {
            i_polarized,
            i_unpolarized,
            polarization_axis_deg,
            ir_background,
        })
    }

    /// Source with total visible intensity `total` and degree `p`.
    pub fn with_polarization(p: f64, total: f64, axis_deg: f64, background: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!(
                "degree of polarization must lie in [0, 1], got {p}"
            )));
        }
        Self::new(p * total, (1.0 - p) * total, axis_deg, background)
    }

    /// `I_P / (I_P + I_U)`.
    pub fn polarization(&self) -> Result<f64> {
        let total = self.i_polarized + self.i_unpolarized;
        if total <= 0.0 {
            return Err(Error::Degenerate("source has no visible intensity".into()));
        }
        Ok(self.i_polarized / total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optics {
    AnalyzerOnly,
    /// Fixed polarizer ahead of the analyzer; `throughput` scales the
    /// visible light it passes.
    PolarizerAt {
        angle_deg: f64,
        throughput: f64,
    },
}

impl Optics {
    pub fn polarizer_at(angle_deg: f64) -> Self {
        Optics::PolarizerAt {
            angle_deg,
            throughput: 1.0,
        }
    }
}

fn cos2_deg(d: f64) -> f64 {
    let c = d.to_radians().cos();
    c * c
}

/// Noiseless detector signal at analyzer angle `theta_deg`.
pub fn ideal_intensity(source: &SourceModel, optics: Optics, theta_deg: f64) -> f64 {
    let s = source;
    match optics {
        Optics::AnalyzerOnly => {
            s.i_polarized * cos2_deg(theta_deg - s.polarization_axis_deg)
                + 0.5 * s.i_unpolarized
                + s.ir_background
        }
        Optics::PolarizerAt {
            angle_deg,
            throughput,
        } => {
            let passed = s.i_polarized * cos2_deg(angle_deg - s.polarization_axis_deg)
                + 0.5 * s.i_unpolarized;
            throughput * passed * cos2_deg(theta_deg - angle_deg) + s.ir_background
        }
    }
}

/// One full rotation sampled every `step_deg`, starting at 0°, with additive
/// Gaussian noise drawn from a generator seeded by `seed`.
pub fn simulate_scan(
    source: &SourceModel,
    optics: Optics,
    step_deg: f64,
    noise_rms: f64,
    seed: u64,
) -> Result<PolarimeterScan> {
    if !(step_deg > 0.0) || step_deg > 180.0 {
        return Err(Error::domain(format!(
            "scan step must lie in (0, 180], got {step_deg}"
        )));
    }
    if !(noise_rms >= 0.0) || !noise_rms.is_finite() {
        return Err(Error::domain(format!(
            "noise rms must be finite and >= 0, got {noise_rms}"
        )));
    }
    let count = (360.0 / step_deg).round().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_rms).map_err(|e| Error::domain(e.to_string()))?;
    let samples = (0..count)
        .map(|i| {
            let theta = i as f64 * step_deg;
            let mut v = ideal_intensity(source, optics, theta);
            if noise_rms > 0.0 {
                v += noise.sample(&mut rng);
            }
            (theta, v)
        })
        .collect();
    PolarimeterScan::with_step(samples, step_deg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineSquaredFit {
    pub amplitude: f64,
    /// In `[0, 180)`; zero when `degenerate`.
    pub theta0_deg: f64,
    pub offset: f64,
    pub residual_rms: f64,
    /// The amplitude vanished and the phase carries no information.
    pub degenerate: bool,
}

impl CosineSquaredFit {
    pub fn value_at(&self, theta_deg: f64) -> f64 {
        self.amplitude * cos2_deg(theta_deg - self.theta0_deg) + self.offset
    }

    /// Root-mean-square residual of this model on `scan`.
    pub fn rms_on(&self, scan: &PolarimeterScan) -> f64 {
        rms_of(scan, |t| self.value_at(t))
    }
}

fn rms_of<F: Fn(f64) -> f64>(scan: &PolarimeterScan, model: F) -> f64 {
    let n = scan.samples().len() as f64;
    let ss: f64 = scan
        .samples()
        .iter()
        .map(|&(t, y)| (y - model(t)).powi(2))
        .sum();
    (ss / n).sqrt()
}

/// Linear least squares on `c0 + c1 cos 2θ + c2 sin 2θ`, then
/// `A = 2√(c1² + c2²)`, `θ0 = atan2(c2, c1)/2`, `F = c0 - A/2`.
pub fn fit_cos_squared(scan: &PolarimeterScan) -> Result<CosineSquaredFit> {
    let samples = scan.samples();
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Identifiability(format!(
            "{} samples, at least {MIN_SAMPLES} needed",
            samples.len()
        )));
    }
    let span = scan.span_deg();
    if span < MIN_SPAN_DEG {
        return Err(Error::Identifiability(format!(
            "angles span {span}°, at least {MIN_SPAN_DEG}° needed"
        )));
    }
    let n = samples.len();
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let t = 2.0 * samples[i].0.to_radians();
        match j {
            0 => 1.0,
            1 => t.cos(),
            _ => t.sin(),
        }
    });
    let rhs = DVector::from_iterator(n, samples.iter().map(|s| s.1));
    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-10 * smax) {
        return Err(Error::Identifiability(
            "design matrix is rank deficient".into(),
        ));
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Identifiability(e.to_string()))?;
    let (c0, c1, c2) = (coef[0], coef[1], coef[2]);
    let amplitude = 2.0 * c1.hypot(c2);
    let scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let mut fit = if amplitude <= 1e-12 * scale || amplitude == 0.0 {
        CosineSquaredFit {
            amplitude: 0.0,
            theta0_deg: 0.0,
            offset: c0,
            residual_rms: 0.0,
            degenerate: true,
        }
    } else {
        let mut theta0 = 0.5 * c2.atan2(c1).to_degrees();
        if theta0 < 0.0 {
            theta0 += 180.0;
        }
        if theta0 >= 180.0 {
            theta0 -= 180.0;
        }
        CosineSquaredFit {
            amplitude,
            theta0_deg: theta0,
            offset: c0 - 0.5 * amplitude,
            residual_rms: 0.0,
            degenerate: false,
        }
    };
    fit.residual_rms = rms_of(scan, |t| {
        let r = 2.0 * t.to_radians();
        c0 + c1 * r.cos() + c2 * r.sin()
    });
    Ok(fit)
}

/// Distance between two axis angles modulo 180°.
pub fn axis_separation_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub polarization: f64,
    pub fit_a: CosineSquaredFit,
    pub fit_b: CosineSquaredFit,
    /// `|θ_a - θ*|`, when `θ*` was given and the fit has a phase.
    pub phase_offset_a_deg: Option<f64>,
    /// `|θ_b - (θ* + 90°)|`, likewise.
    pub phase_offset_b_deg: Option<f64>,
    pub warnings: Vec<String>,
}

/// `(A_a - A_b)/(A_a + A_b)` from scans with the polarizer at `θ*` and at
/// `θ* + 90°`.
pub fn extract_polarization(
    scan_a: &PolarimeterScan,
    scan_b: &PolarimeterScan,
    theta_star_deg: Option<f64>,
) -> Result<Extraction> {
    let fit_a = fit_cos_squared(scan_a)?;
    let fit_b = fit_cos_squared(scan_b)?;
    let sum = fit_a.amplitude + fit_b.amplitude;
    if !(sum > 0.0) {
        return Err(Error::Degenerate("both fitted amplitudes vanish".into()));
    }
    let mut warnings = Vec::new();
    let mut offset = |fit: &CosineSquaredFit, expected: f64, label: &str| -> Option<f64> {
        if fit.degenerate {
            return None;
        }
        let d = axis_separation_deg(fit.theta0_deg, expected);
        if d > PHASE_WARNING_DEG {
            warnings.push(format!(
                "scan {label}: fitted phase {:.3}° is {d:.3}° from the expected {:.3}°",
                fit.theta0_deg,
                expected.rem_euclid(180.0)
            ));
        }
        Some(d)
    };
    let (phase_offset_a_deg, phase_offset_b_deg) = match theta_star_deg {
        Some(t) => (offset(&fit_a, t, "a"), offset(&fit_b, t + 90.0, "b")),
        None => (None, None),
    };
    Ok(Extraction {
        polarization: (fit_a.amplitude - fit_b.amplitude) / sum,
        fit_a,
        fit_b,
        phase_offset_a_deg,
        phase_offset_b_deg,
        warnings,
    })
}

/// Simulate both polarizer scans for `source` and extract `𝓟`.
pub fn simulate_and_extract(
    source: &SourceModel,
    step_deg: f64,
    noise_rms: f64,
    seed: u64,
) -> Result<(PolarimeterScan, PolarimeterScan, Extraction)> {
    let axis = source.polarization_axis_deg;
    let a = simulate_scan(
        source,
        Optics::polarizer_at(axis),
        step_deg,
        noise_rms,
        seed,
    )?;
    let b = simulate_scan(
        source,
        Optics::polarizer_at(axis + 90.0),
        step_deg,
        noise_rms,
        seed.wrapping_add(1),
    )?;
    let ex = extract_polarization(&a, &b, Some(axis))?;
    Ok((a, b, ex))
}
