use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::{BoundTerm, DrudePermittivityModel, FreeTerm};
use crate::error::{Error, Result};

/// The database shipped with the crate.
pub const DEFAULT_DATABASE: &str = include_str!("../../data/materials.toml");

/// Environment variable naming a replacement database file.
pub const DATABASE_ENV: &str = "WIREPOL_MATERIAL_DB";

const SUPPORTED_VERSION: u32 = 1;

/// Requested temperatures outside this window are rejected before snapping.
pub const TEMPERATURE_WINDOW_K: (f64, f64) = (250.0, 3400.0);

/// Relative tolerance between `Σ σ_q` and the quoted `sigma0`.
const SIGMA0_TOLERANCE: f64 = 0.02;

/// What to do with free terms whose relaxation wavelength is only bounded
/// from above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundedTermPolicy {
    /// Drop those terms from the model.
    #[default]
    Exclude,
    /// Keep them with the relaxation wavelength set at the bound.
    AtBound,
}

impl FromStr for BoundedTermPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exclude" => Ok(Self::Exclude),
            "at-bound" => Ok(Self::AtBound),
            other => Err(format!(
                "unknown bounded-term policy '{other}' (expected exclude|at-bound)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialRecord {
    pub model: DrudePermittivityModel,
    /// Quoted dc conductivity, ohm⁻¹ m⁻¹.
    pub sigma0: f64,
    pub provenance: String,
    /// Temperature whose bound terms this record reuses, if any.
    pub bound_terms_from_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialDatabase {
    pub format_version: u32,
    pub records: Vec<MaterialRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatabase {
    format_version: u32,
    record: Vec<RawRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    element: String,
    #[serde(rename = "temperature_K")]
    temperature_k: f64,
    sigma0: f64,
    provenance: String,
    bound_terms: Option<Vec<RawBound>>,
    #[serde(rename = "bound_terms_from_K")]
    bound_terms_from_k: Option<f64>,
    free_terms: Vec<RawFree>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBound {
    k0: f64,
    lambda_s_um: f64,
    delta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFree {
    sigma: f64,
    lambda_r_um: f64,
    #[serde(default)]
    tentative: bool,
    #[serde(default)]
    upper_bound: bool,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl MaterialDatabase {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDatabase = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        if raw.format_version != SUPPORTED_VERSION {
            return Err(Error::MaterialData(format!(
                "unsupported format_version {} (expected {SUPPORTED_VERSION})",
                raw.format_version
            )));
        }

        let mut records = Vec::with_capacity(raw.record.len());
        for r in &raw.record {
            let bound_terms = match (&r.bound_terms, r.bound_terms_from_k) {
                (Some(list), None) => list
                    .iter()
                    .map(|b| BoundTerm {
                        strength: b.k0,
                        resonance_um: b.lambda_s_um,
                        damping: b.delta,
                    })
                    .collect(),
                (None, Some(from)) => {
                    let source = raw
                        .record
                        .iter()
                        .find(|o| o.element == r.element && o.temperature_k == from)
                        .and_then(|o| o.bound_terms.as_ref())
                        .ok_or_else(|| {
                            Error::MaterialData(format!(
                                "{} at {} K: bound_terms_from_K = {from} has no explicit bound terms",
                                r.element, r.temperature_k
                            ))
                        })?;
                    source
                        .iter()
                        .map(|b| BoundTerm {
                            strength: b.k0,
                            resonance_um: b.lambda_s_um,
                            damping: b.delta,
                        })
                        .collect()
                }
                _ => {
                    return Err(Error::MaterialData(format!(
                        "{} at {} K: give exactly one of bound_terms, bound_terms_from_K",
                        r.element, r.temperature_k
                    )))
                }
            };
            let model = DrudePermittivityModel {
                element: r.element.clone(),
                temperature_k: r.temperature_k,
                bound_terms,
                free_terms: r
                    .free_terms
                    .iter()
                    .map(|f| FreeTerm {
                        sigma: f.sigma,
                        relaxation_um: f.lambda_r_um,
                        tentative: f.tentative,
                        upper_bound: f.upper_bound,
                    })
                    .collect(),
            };
            model.validate()?;
            if !(r.temperature_k > 0.0) {
                return Err(Error::MaterialData(format!(
                    "{}: temperature must be positive, got {}",
                    r.element, r.temperature_k
                )));
            }
            let sum = model.dc_conductivity();
            if (sum - r.sigma0).abs() > SIGMA0_TOLERANCE * r.sigma0.abs() {
                return Err(Error::MaterialData(format!(
                    "{} at {} K: Σσ = {sum:e} disagrees with sigma0 = {:e}",
                    r.element, r.temperature_k, r.sigma0
                )));
            }
            records.push(MaterialRecord {
                model,
                sigma0: r.sigma0,
                provenance: r.provenance.clone(),
                bound_terms_from_k: r.bound_terms_from_k,
            });
        }
        Ok(Self {
            format_version: raw.format_version,
            records,
        })
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_DATABASE).expect("bundled material database is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The file named by [`DATABASE_ENV`] if set, else the bundled data.
    pub fn from_env_or_builtin() -> Result<Self> {
        match std::env::var_os(DATABASE_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn elements(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.model.element.as_str()) {
                out.push(&r.model.element);
            }
        }
        out
    }

    /// Record at the tabulated temperature nearest to `temperature_k`
    /// (ties go to the colder column).
    pub fn record_for_temperature(
        &self,
        element: &str,
        temperature_k: f64,
    ) -> Result<&MaterialRecord> {
        let (lo, hi) = TEMPERATURE_WINDOW_K;
        if !(lo..=hi).contains(&temperature_k) {
            return Err(Error::TemperatureOutOfRange(temperature_k));
        }
        self.records
            .iter()
            .filter(|r| r.model.element == element)
            .min_by(|a, b| {
                let da = (a.model.temperature_k - temperature_k).abs();
                let db = (b.model.temperature_k - temperature_k).abs();
                da.total_cmp(&db)
                    .then(a.model.temperature_k.total_cmp(&b.model.temperature_k))
            })
            .ok_or_else(|| Error::UnknownMaterial(element.to_string()))
    }

    pub fn model_for_temperature(
        &self,
        element: &str,
        temperature_k: f64,
        policy: BoundedTermPolicy,
    ) -> Result<DrudePermittivityModel> {
        let rec = self.record_for_temperature(element, temperature_k)?;
        Ok(match policy {
            BoundedTermPolicy::AtBound => rec.model.clone(),
            BoundedTermPolicy::Exclude => rec.model.without_bounded_terms(),
        })
    }
}
