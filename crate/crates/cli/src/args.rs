use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wirepol::materials::BoundedTermPolicy;

#[derive(Parser, Debug)]
#[command(
    name = "wirepol",
    version,
    about = "Polarization of thermal light from thin metal wires"
)]
pub struct Cli {
    /// Worker threads for sweeps (results do not depend on it)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// File of `key = value` lines supplying defaults for any flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Treatment of free-electron terms whose relaxation wavelength is only
    /// an upper bound: `exclude` or `at-bound`
    #[arg(long, global = true, value_name = "POLICY")]
    pub bounded_terms: Option<BoundedTermPolicy>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Polarization of one wire at one wavelength or averaged over a band
    Point(PointArgs),
    /// Polarization along a radius, wavelength or temperature grid, as CSV
    Sweep(SweepArgs),
    /// Compare computed band averages with measured values
    Compare(CompareArgs),
    /// Simulate the two-step polarimeter protocol and extract the polarization
    Polsim(PolsimArgs),
    /// Inspect the material database
    Material {
        #[command(subcommand)]
        action: MaterialCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum MaterialCommand {
    /// Print the model parameters (and optionally ε, n at one wavelength)
    Show(MaterialShowArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PhysicsArgs {
    #[arg(long, value_name = "UM", conflicts_with = "radius_um")]
    pub diameter_um: Option<f64>,

    #[arg(long, value_name = "UM")]
    pub radius_um: Option<f64>,

    /// Single wavelength instead of a band average
    #[arg(long, value_name = "UM", conflicts_with = "band")]
    pub wavelength_um: Option<f64>,

    /// Filter band `lo:hi` in microns, or `visible` (0.5:0.75) or
    /// `wide-visible` (0.45:0.75); default `visible`
    #[arg(long, value_name = "LO:HI", value_parser = parse_band)]
    pub band: Option<(f64, f64)>,

    /// Temperature(s) in kelvin, comma separated
    #[arg(long, value_name = "K", value_delimiter = ',')]
    pub temp_k: Vec<f64>,

    #[arg(long, default_value = "tungsten")]
    pub material: String,

    /// Relative truncation tolerance of the partial-wave sums
    #[arg(long, default_value_t = wirepol::scattering::DEFAULT_TOLERANCE)]
    pub tol: f64,

    /// Gauss-Legendre nodes for band averages
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,

    /// Output file; standard output when absent or `-`
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    /// `table2`: band-averaged values for the four reference diameters at 2400 K
    #[arg(long, value_enum)]
    pub preset: Option<PointPreset>,

    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointPreset {
    Table2,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, conflicts_with = "variable")]
    pub preset: Option<SweepPreset>,

    #[arg(long, value_enum, requires_all = ["lo", "hi"])]
    pub variable: Option<SweepVariable>,

    #[arg(long)]
    pub lo: Option<f64>,

    #[arg(long)]
    pub hi: Option<f64>,

    #[arg(long, default_value_t = 50)]
    pub points: usize,

    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    pub spacing: Spacing,

    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPreset {
    Figure1,
    Figure4,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Wire radius in microns
    Radius,
    /// Wire diameter in microns
    Diameter,
    /// Wavelength in microns (single-wavelength mode)
    Wavelength,
    /// Temperature in kelvin
    Temperature,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// CSV of `diameter_um,p_measured,error`; `#` lines are comments.
    /// Built-in reference measurements when absent
    #[arg(long, value_name = "FILE")]
    pub measurements: Option<PathBuf>,

    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(Args, Debug)]
pub struct PolsimArgs {
    /// Degree of polarization of the simulated source
    #[arg(long, default_value_t = 0.241)]
    pub polarization: f64,

    /// Visible intensity `I_P + I_U`
    #[arg(long, default_value_t = 1.0)]
    pub total: f64,

    #[arg(long, default_value_t = 0.0)]
    pub axis_deg: f64,

    /// Constant infrared background reaching the detector
    #[arg(long, default_value_t = 0.0)]
    pub background: f64,

    #[arg(long, default_value_t = 0.0)]
    pub noise_rms: f64,

    #[arg(long, default_value_t = wirepol::polarimetry::DEFAULT_STEP_DEG)]
    pub step_deg: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Directory for the three scan files
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MaterialShowArgs {
    #[arg(long = "material", value_name = "ELEMENT", default_value = "tungsten")]
    pub material: String,

    /// Same as --material
    #[arg(value_name = "ELEMENT", conflicts_with = "material")]
    pub element: Option<String>,

    /// Only the record nearest this temperature
    #[arg(long, value_name = "K")]
    pub temp_k: Option<f64>,

    /// Also print ε and n at this wavelength
    #[arg(long, value_name = "UM")]
    pub wavelength_um: Option<f64>,

    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

pub fn parse_band(s: &str) -> Result<(f64, f64), String> {
    match s {
        "visible" => return Ok((0.5, 0.75)),
        "wide-visible" => return Ok((0.45, 0.75)),
        _ => {}
    }
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("band lower edge: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("band upper edge: {e}"))?;
    Ok((lo, hi))
}
