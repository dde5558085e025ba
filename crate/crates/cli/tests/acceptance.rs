//! One line per acceptance criterion. Exits nonzero if any criterion fails
//! outside the documented known deviations.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wirepol::asymptotic::{fresnel_coefficients, thick_wire_polarization};
use wirepol::materials::{permittivity, refraction_index, BoundedTermPolicy, MaterialDatabase};
use wirepol::polarimetry::{simulate_and_extract, SourceModel};
use wirepol::quadrature::integrate_adaptive;
use wirepol::scattering::{linear_polarization, PartialWaves, Polarization};
use wirepol::special::{bessel_j, bessel_j_derivative, hankel1, hankel1_derivative};
use wirepol::spectral::{planck_radiance, stefan_boltzmann};

type Criterion = (&'static str, fn() -> Outcome);

const BIN: &str = env!("CARGO_BIN_EXE_wirepol");
const TAU: f64 = 2.0 * std::f64::consts::PI;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure is a documented deviation and does not fail the run.
    known: bool,
}

fn wirepol(args: &[&str]) -> String {
    let out = Command::new(BIN)
        .args(args)
        .env_remove("WIREPOL_MATERIAL_DB")
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().parse().unwrap())
        .collect()
}

fn reference_diameters() -> Outcome {
    let start = Instant::now();
    let csv = wirepol(&["point", "--preset", "table2"]);
    let elapsed = start.elapsed().as_secs_f64();
    let p = column(&csv, "p_avg");
    let want = [(5.0, 0.2435), (17.0, 0.222), (35.0, 0.209), (100.0, 0.20)];
    let mut detail = Vec::new();
    let mut pass = true;
    let mut only_known = true;
    for ((d, w), got) in want.iter().zip(&p) {
        let ok = (got - w).abs() <= 0.003;
        pass &= ok;
        if !ok && *d != 100.0 {
            only_known = false;
        }
        detail.push(format!(
            "d={d}: {got:.4} vs {w} ({})",
            if ok { "ok" } else { "out" }
        ));
    }
    let fast = elapsed < 10.0;
    pass &= fast;
    detail.push(format!("{elapsed:.2} s"));
    Outcome {
        pass,
        detail: detail.join(", "),
        known: only_known && fast,
    }
}

fn consistency() -> Outcome {
    let hot = column(
        &wirepol(&["compare", "--temp-k", "2400"]),
        "deviation_sigma",
    );
    let cold = column(&wirepol(&["compare", "--temp-k", "298"]), "deviation_sigma");
    let max_hot = hot.iter().cloned().fold(0.0, f64::max);
    let max_cold = cold.iter().cloned().fold(0.0, f64::max);
    Outcome {
        pass: max_hot <= 1.5 && max_cold > 3.0,
        detail: format!("max deviation {max_hot:.2} sigma at 2400 K, {max_cold:.2} sigma at 298 K"),
        known: false,
    }
}

fn crossover() -> Outcome {
    let csv = wirepol(&["sweep", "--preset", "figure1"]);
    let x = column(&csv, "log10_ka");
    let p = column(&csv, "p");
    let zeros: Vec<f64> = (1..p.len())
        .filter(|&i| p[i - 1].signum() != p[i].signum())
        .map(|i| {
            let t = p[i - 1] / (p[i - 1] - p[i]);
            x[i - 1] + t * (x[i] - x[i - 1])
        })
        .collect();
    Outcome {
        pass: zeros.len() == 1 && zeros[0] > -1.0 && zeros[0] < 1.0,
        detail: format!("{} sign change(s) at log10(ka) = {zeros:.3?}", zeros.len()),
        known: false,
    }
}

fn interior_maximum() -> Outcome {
    let csv = wirepol(&["sweep", "--preset", "figure4"]);
    let t = column(&csv, "temperature_k");
    let d = column(&csv, "diameter_um");
    let p = column(&csv, "p_avg");
    let rows: Vec<(f64, f64)> = (0..t.len())
        .filter(|&i| t[i] == 2400.0)
        .map(|i| (d[i], p[i]))
        .collect();
    let (imax, &(dmax, pmax)) = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .unwrap();
    let interior = imax > 0 && imax + 1 < rows.len();
    let local = interior && rows[imax - 1].1 < pmax && rows[imax + 1].1 < pmax;
    Outcome {
        pass: local && (2.0..=6.0).contains(&dmax),
        detail: format!("maximum {pmax:.4} at d = {dmax:.2} µm"),
        known: false,
    }
}

fn thick_wire() -> Outcome {
    let db = MaterialDatabase::builtin();
    let model = db
        .model_for_temperature("tungsten", 2400.0, BoundedTermPolicy::default())
        .unwrap();
    let eps = permittivity(&model, 0.5).unwrap();
    let pw = linear_polarization(TAU / 0.5, 50.0, refraction_index(eps), 1e-10).unwrap();
    let fr = thick_wire_polarization(eps, 64).unwrap();
    Outcome {
        pass: (pw - fr).abs() <= 0.01,
        detail: format!(
            "partial waves {pw:.5}, Fresnel limit {fr:.5}, difference {:.5}",
            (pw - fr).abs()
        ),
        known: false,
    }
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut failures = Vec::new();

    let mut worst_wronskian = 0.0_f64;
    for _ in 0..500 {
        let m = rng.gen_range(0..40);
        let x: f64 = 10f64.powf(rng.gen_range(-1.0..2.0));
        let z = Complex64::new(x, 0.0);
        let j = bessel_j(m, z).unwrap().re;
        let dj = bessel_j_derivative(m, z).unwrap().re;
        let y = hankel1(m, x).unwrap().im;
        let dy = hankel1_derivative(m, x).unwrap().im;
        let w = j * dy - dj * y;
        let want = 2.0 / (std::f64::consts::PI * x);
        worst_wronskian = worst_wronskian.max(((w - want) / want).abs());
    }
    if worst_wronskian > 1e-10 {
        failures.push(format!("Wronskian {worst_wronskian:e}"));
    }

    let mut worst_term = f64::INFINITY;
    let mut symmetric = true;
    for _ in 0..200 {
        let n = Complex64::new(rng.gen_range(0.05..8.0), rng.gen_range(0.0..8.0));
        let a = 10f64.powf(rng.gen_range(-2.0..1.5));
        let k = TAU / rng.gen_range(0.4..2.0);
        let waves = PartialWaves::new(k, a, n, 60).unwrap();
        for m in 0..=60i64 {
            for pol in Polarization::BOTH {
                let t = waves.term(m, pol).unwrap();
                worst_term = worst_term.min(t);
                symmetric &= t == waves.term(-m, pol).unwrap();
            }
        }
    }
    if worst_term < -1e-12 {
        failures.push(format!("passivity {worst_term:e}"));
    }
    if !symmetric {
        failures.push("m-fold symmetry".into());
    }

    let t = 2400.0;
    let total = integrate_adaptive(
        |u| {
            let lam = u.exp();
            planck_radiance(lam, t) * lam * 1e-6
        },
        0.01f64.ln(),
        1e6f64.ln(),
        1e-10,
        2000,
    )
    .unwrap()
    .value;
    let sb = stefan_boltzmann() * t.powi(4);
    let sb_err = ((total - sb) / sb).abs();
    if sb_err > 1e-6 {
        failures.push(format!("Stefan-Boltzmann {sb_err:e}"));
    }

    let mut fresnel_ok = true;
    for _ in 0..200 {
        let eps = wirepol::materials::ComplexPermittivity(Complex64::new(
            rng.gen_range(-50.0..50.0),
            rng.gen_range(0.0..50.0),
        ));
        let normal = fresnel_coefficients(eps, 0.0).unwrap();
        fresnel_ok &= (normal.r_te.norm() - normal.r_tm.norm()).abs() <= 1e-12;
        let phi = rng.gen_range(-1.5..1.5);
        let f = fresnel_coefficients(eps, phi).unwrap();
        fresnel_ok &= f.r_te.norm_sqr() <= 1.0 + 1e-12 && f.r_tm.norm_sqr() <= 1.0 + 1e-12;
    }
    if !fresnel_ok {
        failures.push("Fresnel bounds".into());
    }

    let mut worst_round_trip = 0.0_f64;
    let mut worst_background = 0.0_f64;
    for _ in 0..50 {
        let p = rng.gen_range(0.0..1.0);
        let axis = rng.gen_range(0.0..180.0);
        let clean = SourceModel::with_polarization(p, 1.0, axis, 0.0).unwrap();
        let lit = SourceModel::with_polarization(p, 1.0, axis, rng.gen_range(0.1..10.0)).unwrap();
        let a = simulate_and_extract(&clean, 0.5, 0.0, 1)
            .unwrap()
            .2
            .polarization;
        let b = simulate_and_extract(&lit, 0.5, 0.0, 1)
            .unwrap()
            .2
            .polarization;
        worst_round_trip = worst_round_trip.max((a - p).abs());
        worst_background = worst_background.max((a - b).abs());
    }
    if worst_round_trip > 1e-9 {
        failures.push(format!("polarimetry round trip {worst_round_trip:e}"));
    }
    if worst_background > 1e-9 {
        failures.push(format!("background invariance {worst_background:e}"));
    }

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "Wronskian {worst_wronskian:.1e}, min term {worst_term:.1e}, Stefan-Boltzmann {sb_err:.1e}, \
                 round trip {worst_round_trip:.1e}, background {worst_background:.1e}"
            )
        } else {
            failures.join("; ")
        },
        known: false,
    }
}

fn determinism() -> Outcome {
    let sweep = [
        "sweep",
        "--variable",
        "diameter",
        "--lo",
        "0.5",
        "--hi",
        "60",
        "--points",
        "40",
        "--spacing",
        "log",
    ];
    let with = |extra: &[&str]| {
        let mut args: Vec<&str> = extra.to_vec();
        args.extend_from_slice(&sweep);
        wirepol(&args)
    };
    let runs = [
        with(&[]),
        with(&[]),
        with(&["--threads", "1"]),
        with(&["--threads", "4"]),
    ];
    let f1 = [
        wirepol(&["sweep", "--preset", "figure1", "--threads", "1"]),
        wirepol(&["--threads", "3", "sweep", "--preset", "figure1"]),
    ];
    let same = runs.iter().all(|r| r == &runs[0]) && f1[0] == f1[1];
    Outcome {
        pass: same,
        detail: format!(
            "{} sweep outputs compared byte for byte",
            runs.len() + f1.len()
        ),
        known: false,
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("reference diameters", reference_diameters),
        ("experimental consistency", consistency),
        ("sign crossover", crossover),
        ("interior maximum", interior_maximum),
        ("thick-wire consistency", thick_wire),
        ("property suites", properties),
        ("determinism", determinism),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let status = match (o.pass, o.known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known deviation)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {}: {status}: {name}: {}", i + 1, o.detail);
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
