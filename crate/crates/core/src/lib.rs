//! Polarized thermal emission from thin metal wires.
//!
//! The pipeline runs from complex Bessel functions through cylinder
//! partial-wave amplitudes and Drude permittivities to Planck-weighted band
//! averages, with a thick-wire Fresnel limit as a cross-check and a
//! simulator for the rotating-analyzer measurement.
//!
//! ```
//! use wirepol::materials::{BoundedTermPolicy, MaterialDatabase};
//! use wirepol::spectral::{band_averaged_polarization, BandFilter, QuadratureConfig};
//!
//! let model = MaterialDatabase::builtin()
//!     .model_for_temperature("tungsten", 2400.0, BoundedTermPolicy::default())
//!     .unwrap();
//! let r = band_averaged_polarization(2.5, 2400.0, &BandFilter::visible(), &model, &QuadratureConfig::default())
//!     .unwrap();
//! assert!((r.p_avg - 0.2435).abs() < 0.003);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod error;
pub mod materials;
pub mod polarimetry;
pub mod quadrature;
pub mod scattering;
pub mod special;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use materials::{
    BoundedTermPolicy, ComplexPermittivity, DrudePermittivityModel, MaterialDatabase,
};
pub use scattering::{Polarization, PolarizedEmissivity, TransitionAmplitude, WireGeometry};
pub use spectral::{BandAveragedResult, BandFilter, QuadratureConfig};
