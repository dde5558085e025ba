use std::collections::BTreeSet;
use std::path::Path;

use wirepol::materials::{
    permittivity, refraction_index, BoundedTermPolicy, DrudePermittivityModel, MaterialDatabase,
};
use wirepol::polarimetry::{
    fit_cos_squared, simulate_and_extract, simulate_scan, Optics, SourceModel,
};
use wirepol::scattering::emissivities;
use wirepol::spectral::{band_averaged_polarization, BandFilter, QuadratureConfig};
use wirepol::sweep;

use crate::args::{
    CompareArgs, MaterialShowArgs, PhysicsArgs, PointArgs, PointPreset, PolsimArgs, Spacing,
    SweepArgs, SweepPreset, SweepVariable,
};
use crate::output::{emit, num, Table};
use crate::Failure;

const TAU: f64 = 2.0 * std::f64::consts::PI;
const DEFAULT_TEMPERATURE_K: f64 = 2400.0;
const DEFAULT_BAND: (f64, f64) = (0.5, 0.75);

/// Reference diameters of the thin-wire comparison, with measured averages
/// and their errors.
pub const REFERENCE_MEASUREMENTS: [(f64, f64, f64); 4] = [
    (5.0, 0.241, 0.005),
    (17.0, 0.221, 0.003),
    (35.0, 0.208, 0.003),
    (100.0, 0.199, 0.004),
];

pub struct Context {
    pub db: MaterialDatabase,
    pub policy: BoundedTermPolicy,
    /// Arguments that determine the output, for the metadata header.
    pub command_line: String,
}

fn policy_name(p: BoundedTermPolicy) -> &'static str {
    match p {
        BoundedTermPolicy::Exclude => "exclude",
        BoundedTermPolicy::AtBound => "at-bound",
    }
}

impl Context {
    fn metadata(&self) -> Vec<String> {
        vec![
            format!("wirepol {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command_line),
            format!("bounded terms: {}", policy_name(self.policy)),
        ]
    }

    fn model(
        &self,
        material: &str,
        temperature_k: f64,
        notes: &mut Notes,
    ) -> Result<DrudePermittivityModel, Failure> {
        let rec = self.db.record_for_temperature(material, temperature_k)?;
        let m = self
            .db
            .model_for_temperature(material, temperature_k, self.policy)?;
        if m.temperature_k != temperature_k {
            notes.warn(format!(
                "no {material} data at {temperature_k} K; using the {} K model",
                m.temperature_k
            ));
        }
        notes.meta(format!(
            "material: {material} {} K; {}",
            m.temperature_k, rec.provenance
        ));
        Ok(m)
    }
}

/// Warnings for standard error and extra metadata lines, deduplicated and
/// ordered.
#[derive(Default)]
struct Notes {
    warnings: BTreeSet<String>,
    metadata: BTreeSet<String>,
}

impl Notes {
    fn warn(&mut self, w: String) {
        self.warnings.insert(w);
    }
    fn meta(&mut self, m: String) {
        self.metadata.insert(m);
    }
    fn check_wavelength(&mut self, lam: f64) {
        if !DrudePermittivityModel::in_fitted_range(lam) {
            let (lo, hi) = wirepol::materials::FITTED_RANGE_UM;
            self.warn(format!(
                "wavelength {lam} µm is outside the fitted range [{lo}, {hi}] µm"
            ));
        }
    }
    fn flush(&self) {
        for w in &self.warnings {
            eprintln!("warning: {w}");
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Spectrum {
    Line(f64),
    Band(BandFilter),
}

#[derive(Clone, Debug)]
struct Job {
    radius_um: f64,
    spectrum: Spectrum,
    temperature_k: f64,
    model: DrudePermittivityModel,
    label: Option<f64>,
}

const LINE_HEADER: [&str; 9] = [
    "radius_um",
    "diameter_um",
    "wavelength_um",
    "temperature_k",
    "p",
    "e_te",
    "e_tm",
    "terms_used",
    "truncation_error",
];

const BAND_HEADER: [&str; 11] = [
    "radius_um",
    "diameter_um",
    "band_lo_um",
    "band_hi_um",
    "temperature_k",
    "p_avg",
    "e_te_bar",
    "e_tm_bar",
    "quadrature_nodes",
    "quadrature_error",
    "truncation_error",
];

struct Settings {
    tol: f64,
    nodes: usize,
}

fn quadrature(s: &Settings) -> QuadratureConfig {
    QuadratureConfig {
        nodes: s.nodes,
        check_nodes: 2 * s.nodes,
        tolerance: s.tol,
        ..QuadratureConfig::default()
    }
}

fn evaluate(job: &Job, s: &Settings) -> wirepol::Result<Vec<String>> {
    let a = job.radius_um;
    match job.spectrum {
        Spectrum::Line(lam) => {
            let n = refraction_index(permittivity(&job.model, lam)?);
            let e = emissivities(TAU / lam, a, n, s.tol)?;
            let p = e.polarization()?;
            Ok(vec![
                num(a),
                num(2.0 * a),
                num(lam),
                num(job.temperature_k),
                num(p),
                num(e.e_te),
                num(e.e_tm),
                e.terms_used.to_string(),
                num(e.truncation_error_estimate),
            ])
        }
        Spectrum::Band(f) => {
            let r =
                band_averaged_polarization(a, job.temperature_k, &f, &job.model, &quadrature(s))?;
            Ok(vec![
                num(a),
                num(2.0 * a),
                num(f.lambda_lo_um),
                num(f.lambda_hi_um),
                num(job.temperature_k),
                num(r.p_avg),
                num(r.e_te_bar),
                num(r.e_tm_bar),
                r.quadrature_nodes.to_string(),
                num(r.est_quadrature_error),
                num(r.max_truncation_error),
            ])
        }
    }
}

fn describe(job: &Job) -> String {
    let spectrum = match job.spectrum {
        Spectrum::Line(l) => format!("λ = {l} µm"),
        Spectrum::Band(f) => format!("band {}:{} µm", f.lambda_lo_um, f.lambda_hi_um),
    };
    format!(
        "radius {} µm, {spectrum}, T = {} K",
        job.radius_um, job.temperature_k
    )
}

fn run_jobs(jobs: &[Job], s: &Settings) -> Result<Vec<Vec<String>>, Failure> {
    let results = sweep::map(jobs, |j| evaluate(j, s).map_err(|e| (describe(j), e)));
    results
        .into_iter()
        .map(|r| r.map_err(|(at, e)| Failure::from(e).context(&at)))
        .collect()
}

fn radius(p: &PhysicsArgs) -> Result<Option<f64>, Failure> {
    let r = match (p.radius_um, p.diameter_um) {
        (Some(r), _) => Some(r),
        (None, Some(d)) => Some(d / 2.0),
        (None, None) => None,
    };
    if let Some(r) = r {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Failure::Usage(format!("wire radius must be > 0, got {r}")));
        }
    }
    Ok(r)
}

fn spectrum(p: &PhysicsArgs, notes: &mut Notes) -> Result<Spectrum, Failure> {
    if let Some(l) = p.wavelength_um {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Failure::Usage(format!("wavelength must be > 0, got {l}")));
        }
        notes.check_wavelength(l);
        return Ok(Spectrum::Line(l));
    }
    let (lo, hi) = p.band.unwrap_or(DEFAULT_BAND);
    let f = BandFilter::new(lo, hi, 1.0).map_err(|e| Failure::Usage(e.to_string()))?;
    notes.check_wavelength(lo);
    notes.check_wavelength(hi);
    Ok(Spectrum::Band(f))
}

fn temperatures(p: &PhysicsArgs) -> Result<Vec<f64>, Failure> {
    let ts = if p.temp_k.is_empty() {
        vec![DEFAULT_TEMPERATURE_K]
    } else {
        p.temp_k.clone()
    };
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Failure::Usage(format!("temperature must be > 0, got {t}")));
    }
    Ok(ts)
}

fn settings(p: &PhysicsArgs) -> Result<Settings, Failure> {
    if !(p.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be > 0, got {}", p.tol)));
    }
    if p.nodes == 0 {
        return Err(Failure::Usage("--nodes must be at least 1".into()));
    }
    Ok(Settings {
        tol: p.tol,
        nodes: p.nodes,
    })
}

fn header_for(s: Spectrum) -> &'static [&'static str] {
    match s {
        Spectrum::Line(_) => &LINE_HEADER,
        Spectrum::Band(_) => &BAND_HEADER,
    }
}

fn finish(
    ctx: &Context,
    notes: &Notes,
    header: &[&str],
    rows: Vec<Vec<String>>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut meta = ctx.metadata();
    meta.extend(notes.metadata.iter().cloned());
    let mut table = Table::new(meta, header);
    for r in rows {
        table.push(r);
    }
    notes.flush();
    emit(&table.render()?, out)
}

pub fn point(ctx: &Context, args: &PointArgs) -> Result<(), Failure> {
    let p = &args.physics;
    let mut notes = Notes::default();
    let s = settings(p)?;
    let (radii, spec, temps) = if args.preset == Some(PointPreset::Table2) {
        let radii: Vec<f64> = REFERENCE_MEASUREMENTS.iter().map(|m| m.0 / 2.0).collect();
        (
            radii,
            Spectrum::Band(BandFilter::visible()),
            vec![DEFAULT_TEMPERATURE_K],
        )
    } else {
        let r =
            radius(p)?.ok_or_else(|| Failure::Usage("give --diameter-um or --radius-um".into()))?;
        (vec![r], spectrum(p, &mut notes)?, temperatures(p)?)
    };
    let mut jobs = Vec::new();
    for &t in &temps {
        let model = ctx.model(&p.material, t, &mut notes)?;
        for &r in &radii {
            jobs.push(Job {
                radius_um: r,
                spectrum: spec,
                temperature_k: t,
                model: model.clone(),
                label: None,
            });
        }
    }
    let rows = run_jobs(&jobs, &s)?;
    finish(ctx, &notes, header_for(spec), rows, p.output.as_deref())
}

fn grid(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>, Failure> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Failure::Usage(format!(
            "sweep needs lo < hi, got {lo} and {hi}"
        )));
    }
    if points < 2 {
        return Err(Failure::Usage(format!(
            "sweep needs at least 2 points, got {points}"
        )));
    }
    if spacing == Spacing::Log && !(lo > 0.0) {
        return Err(Failure::Usage(format!(
            "log spacing needs lo > 0, got {lo}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                return hi;
            }
            let t = i as f64 / last;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * t,
                Spacing::Log => lo * (hi / lo).powf(t),
            }
        })
        .collect())
}

pub fn sweep(ctx: &Context, args: &SweepArgs) -> Result<(), Failure> {
    let p = &args.physics;
    let mut notes = Notes::default();
    let s = settings(p)?;
    let mut jobs = Vec::new();
    let mut label_column = None;

    match (args.preset, args.variable) {
        (Some(SweepPreset::Figure1), _) => {
            let lam = 0.5;
            let model = ctx.model(&p.material, DEFAULT_TEMPERATURE_K, &mut notes)?;
            label_column = Some("log10_ka");
            for i in 0..200 {
                let x = -2.0 + 5.0 * i as f64 / 199.0;
                jobs.push(Job {
                    radius_um: 10f64.powf(x) * lam / TAU,
                    spectrum: Spectrum::Line(lam),
                    temperature_k: DEFAULT_TEMPERATURE_K,
                    model: model.clone(),
                    label: Some(x),
                });
            }
        }
        (Some(SweepPreset::Figure4), _) => {
            let diameters = grid(0.5, 120.0, 120, Spacing::Log)?;
            for t in [298.0, 1600.0, 2400.0] {
                let model = ctx.model(&p.material, t, &mut notes)?;
                for &d in &diameters {
                    jobs.push(Job {
                        radius_um: d / 2.0,
                        spectrum: Spectrum::Band(BandFilter::visible()),
                        temperature_k: t,
                        model: model.clone(),
                        label: None,
                    });
                }
            }
        }
        (None, Some(var)) => {
            let (lo, hi) = (
                args.lo.expect("required by clap"),
                args.hi.expect("required by clap"),
            );
            let values = grid(lo, hi, args.points, args.spacing)?;
            let temps = temperatures(p)?;
            let fixed_radius = radius(p)?;
            let need_radius = || {
                fixed_radius
                    .ok_or_else(|| Failure::Usage("give --diameter-um or --radius-um".into()))
            };
            match var {
                SweepVariable::Radius | SweepVariable::Diameter => {
                    let spec = spectrum(p, &mut notes)?;
                    for &t in &temps {
                        let model = ctx.model(&p.material, t, &mut notes)?;
                        for &v in &values {
                            jobs.push(Job {
                                radius_um: if var == SweepVariable::Radius {
                                    v
                                } else {
                                    v / 2.0
                                },
                                spectrum: spec,
                                temperature_k: t,
                                model: model.clone(),
                                label: None,
                            });
                        }
                    }
                }
                SweepVariable::Wavelength => {
                    if p.band.is_some() {
                        return Err(Failure::Usage(
                            "a wavelength sweep cannot use --band".into(),
                        ));
                    }
                    let r = need_radius()?;
                    for &t in &temps {
                        let model = ctx.model(&p.material, t, &mut notes)?;
                        for &lam in &values {
                            notes.check_wavelength(lam);
                            jobs.push(Job {
                                radius_um: r,
                                spectrum: Spectrum::Line(lam),
                                temperature_k: t,
                                model: model.clone(),
                                label: None,
                            });
                        }
                    }
                }
                SweepVariable::Temperature => {
                    if !p.temp_k.is_empty() {
                        return Err(Failure::Usage(
                            "a temperature sweep cannot use --temp-k".into(),
                        ));
                    }
                    let r = need_radius()?;
                    let spec = spectrum(p, &mut notes)?;
                    for &t in &values {
                        let model = ctx.model(&p.material, t, &mut notes)?;
                        jobs.push(Job {
                            radius_um: r,
                            spectrum: spec,
                            temperature_k: t,
                            model,
                            label: None,
                        });
                    }
                }
            }
        }
        (None, None) => {
            return Err(Failure::Usage(
                "give --preset or --variable with --lo and --hi".into(),
            ))
        }
    }

    let spec = jobs
        .first()
        .map(|j| j.spectrum)
        .expect("sweeps have at least two points");
    let rows = run_jobs(&jobs, &s)?;
    let mut header: Vec<&str> = Vec::new();
    if let Some(l) = label_column {
        header.push(l);
    }
    header.extend_from_slice(header_for(spec));
    let rows = rows
        .into_iter()
        .zip(&jobs)
        .map(|(row, job)| match job.label {
            Some(x) => std::iter::once(num(x)).chain(row).collect(),
            None => row,
        })
        .collect();
    finish(ctx, &notes, &header, rows, p.output.as_deref())
}

fn read_measurements(path: &Path) -> Result<Vec<(f64, f64, f64)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let bad = |line: u64, msg: String| {
            Failure::Io(format!(
                "{}: parse error at line {line}: {msg}",
                path.display()
            ))
        };
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            bad(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 3 {
            return Err(bad(
                line,
                format!("expected 3 columns, found {}", rec.len()),
            ));
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                if !(v[0] > 0.0 && v[2] > 0.0) {
                    return Err(bad(line, "diameter and error must be > 0".into()));
                }
                out.push((v[0], v[1], v[2]));
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(bad(line, e.to_string())),
        }
    }
    Ok(out)
}

pub fn compare(ctx: &Context, args: &CompareArgs) -> Result<(), Failure> {
    let p = &args.physics;
    let mut notes = Notes::default();
    let s = settings(p)?;
    let measured = match &args.measurements {
        Some(path) => read_measurements(path)?,
        None => REFERENCE_MEASUREMENTS.to_vec(),
    };
    let temps = temperatures(p)?;
    if temps.len() != 1 {
        return Err(Failure::Usage("compare takes a single --temp-k".into()));
    }
    let t = temps[0];
    if p.wavelength_um.is_some() {
        return Err(Failure::Usage(
            "compare uses band averages; drop --wavelength-um".into(),
        ));
    }
    let spec = spectrum(p, &mut notes)?;
    let model = ctx.model(&p.material, t, &mut notes)?;
    let jobs: Vec<Job> = measured
        .iter()
        .map(|m| Job {
            radius_um: m.0 / 2.0,
            spectrum: spec,
            temperature_k: t,
            model: model.clone(),
            label: None,
        })
        .collect();
    let results = sweep::map(&jobs, |j| {
        let Spectrum::Band(f) = j.spectrum else {
            unreachable!()
        };
        band_averaged_polarization(j.radius_um, t, &f, &j.model, &quadrature(&s))
            .map_err(|e| (describe(j), e))
    });
    let mut rows = Vec::new();
    for (m, r) in measured.iter().zip(results) {
        let r = r.map_err(|(at, e)| Failure::from(e).context(&at))?;
        let dev = (m.1 - r.p_avg).abs() / m.2;
        rows.push(vec![num(m.0), num(m.1), num(m.2), num(r.p_avg), num(dev)]);
    }
    finish(
        ctx,
        &notes,
        &[
            "diameter_um",
            "p_measured",
            "p_error",
            "p_computed",
            "deviation_sigma",
        ],
        rows,
        p.output.as_deref(),
    )
}

pub fn polsim(ctx: &Context, args: &PolsimArgs) -> Result<(), Failure> {
    let source = SourceModel::with_polarization(
        args.polarization,
        args.total,
        args.axis_deg,
        args.background,
    )
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let step1 = simulate_scan(
        &source,
        Optics::AnalyzerOnly,
        args.step_deg,
        args.noise_rms,
        args.seed,
    )
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let fit1 = fit_cos_squared(&step1)?;
    let (a, b, ex) = simulate_and_extract(
        &source,
        args.step_deg,
        args.noise_rms,
        args.seed.wrapping_add(1),
    )?;
    let naive = fit1.amplitude / (fit1.amplitude + 2.0 * fit1.offset);

    if let Some(dir) = &args.output_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        let common = vec![
            format!("wirepol {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", ctx.command_line),
        ];
        for (name, scan, what) in [
            ("step1.txt", &step1, "analyzer only"),
            ("step2a.txt", &a, "polarizer at the polarization axis"),
            ("step2b.txt", &b, "polarizer at the axis + 90 degrees"),
        ] {
            let mut c = common.clone();
            c.push(what.to_string());
            let path = dir.join(name);
            scan.save(&path, &c)
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    for w in &ex.warnings {
        eprintln!("warning: {w}");
    }
    let mut table = Table::new(
        ctx.metadata(),
        &[
            "p_true",
            "p_extracted",
            "p_analyzer_only",
            "amplitude_a",
            "amplitude_b",
            "theta_a_deg",
            "theta_b_deg",
            "offset_a",
            "offset_b",
            "residual_rms_a",
            "residual_rms_b",
        ],
    );
    table.push(vec![
        num(args.polarization),
        num(ex.polarization),
        num(naive),
        num(ex.fit_a.amplitude),
        num(ex.fit_b.amplitude),
        num(ex.fit_a.theta0_deg),
        num(ex.fit_b.theta0_deg),
        num(ex.fit_a.offset),
        num(ex.fit_b.offset),
        num(ex.fit_a.residual_rms),
        num(ex.fit_b.residual_rms),
    ]);
    emit(&table.render()?, args.output.as_deref())
}

pub fn material_show(ctx: &Context, args: &MaterialShowArgs) -> Result<(), Failure> {
    let material = args.element.as_deref().unwrap_or(&args.material);
    let mut records: Vec<_> = match args.temp_k {
        Some(t) => vec![ctx.db.record_for_temperature(material, t)?],
        None => ctx
            .db
            .records
            .iter()
            .filter(|r| r.model.element == material)
            .collect(),
    };
    if records.is_empty() {
        return Err(wirepol::Error::UnknownMaterial(material.to_string()).into());
    }
    records.sort_by(|a, b| a.model.temperature_k.total_cmp(&b.model.temperature_k));
    let mut meta = ctx.metadata();
    meta.push(format!("database format version {}", ctx.db.format_version));
    for r in &records {
        meta.push(format!(
            "{} {} K: sigma0 = {} ohm^-1 m^-1; {}",
            r.model.element,
            r.model.temperature_k,
            num(r.sigma0),
            r.provenance
        ));
    }
    let table = if let Some(lam) = args.wavelength_um {
        let mut t = Table::new(
            meta,
            &[
                "element",
                "temperature_k",
                "wavelength_um",
                "eps_re",
                "eps_im",
                "n_re",
                "n_im",
            ],
        );
        for r in &records {
            let m = ctx
                .db
                .model_for_temperature(material, r.model.temperature_k, ctx.policy)?;
            let eps = permittivity(&m, lam)?;
            let n = refraction_index(eps);
            t.push(vec![
                m.element.clone(),
                num(m.temperature_k),
                num(lam),
                num(eps.0.re),
                num(eps.0.im),
                num(n.re),
                num(n.im),
            ]);
        }
        if !DrudePermittivityModel::in_fitted_range(lam) {
            eprintln!("warning: wavelength {lam} µm is outside the fitted range");
        }
        t
    } else {
        let mut t = Table::new(
            meta,
            &[
                "element",
                "temperature_k",
                "term",
                "index",
                "strength_or_sigma",
                "wavelength_um",
                "damping",
                "tentative",
                "upper_bound",
            ],
        );
        for r in &records {
            let m = &r.model;
            for (i, b) in m.bound_terms.iter().enumerate() {
                t.push(vec![
                    m.element.clone(),
                    num(m.temperature_k),
                    "bound".into(),
                    (i + 1).to_string(),
                    num(b.strength),
                    num(b.resonance_um),
                    num(b.damping),
                    "false".into(),
                    "false".into(),
                ]);
            }
            for (i, f) in m.free_terms.iter().enumerate() {
                t.push(vec![
                    m.element.clone(),
                    num(m.temperature_k),
                    "free".into(),
                    (i + 1).to_string(),
                    num(f.sigma),
                    num(f.relaxation_um),
                    String::new(),
                    f.tentative.to_string(),
                    f.upper_bound.to_string(),
                ]);
            }
        }
        t
    };
    emit(&table.render()?, args.output.as_deref())
}
