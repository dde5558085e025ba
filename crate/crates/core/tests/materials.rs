use std::io::Write;

use num_complex::Complex64;
use proptest::prelude::*;
use wirepol::materials::{
    permittivity, refraction_index, BoundedTermPolicy, ComplexPermittivity, MaterialDatabase,
    DEFAULT_DATABASE, FITTED_RANGE_UM,
};
use wirepol::Error;

#[test]
fn hot_column_matches_hand_evaluation() {
    let m = MaterialDatabase::builtin()
        .model_for_temperature("tungsten", 2400.0, BoundedTermPolicy::AtBound)
        .unwrap();
    let lam: f64 = 0.5;
    let i = Complex64::i();
    let l2 = lam * lam;
    // tabulated (exp(+iωt)) form, written out term by term, then conjugated
    let bound = 10.9 * l2 / (l2 - 1.40 * 1.40 + i * 1.0 * 1.40 * lam)
        + 13.4 * l2 / (l2 - 0.57 * 0.57 + i * 1.2 * 0.57 * lam)
        + 12.0 * l2 / (l2 - 0.25 * 0.25 + i * 1.0 * 0.25 * lam);
    let lam_m = lam * 1e-6;
    let pre = lam_m * lam_m / (2.0 * std::f64::consts::PI * 299_792_458.0 * 8.854_187_812_8e-12);
    let free = pre * (1.19e6 / (3.66e-6 - i * lam_m) + 0.25e6 / (0.36e-6 - i * lam_m));
    let want = (1.0 + bound - free).conj();
    let got = permittivity(&m, lam).unwrap().0;
    assert!(
        (got - want).norm() <= 1e-12 * want.norm(),
        "{got} vs {want}"
    );
}

#[test]
fn default_policy_drops_bounded_relaxation_terms() {
    let db = MaterialDatabase::builtin();
    let all = db
        .model_for_temperature("tungsten", 2400.0, BoundedTermPolicy::AtBound)
        .unwrap();
    let kept = db
        .model_for_temperature("tungsten", 2400.0, BoundedTermPolicy::default())
        .unwrap();
    assert_eq!(all.free_terms.len(), 2);
    assert_eq!(kept.free_terms.len(), 1);
    assert_eq!(kept.free_terms[0].sigma, 1.19e6);
    // room temperature has no bounded entry, so both policies agree
    assert_eq!(
        db.model_for_temperature("tungsten", 298.0, BoundedTermPolicy::AtBound)
            .unwrap(),
        db.model_for_temperature("tungsten", 298.0, BoundedTermPolicy::Exclude)
            .unwrap()
    );
}

#[test]
fn room_temperature_column() {
    let m = MaterialDatabase::builtin()
        .model_for_temperature("tungsten", 298.0, BoundedTermPolicy::default())
        .unwrap();
    assert_eq!(m.free_terms[0].sigma, 17.50e6);
    assert_eq!(m.free_terms[0].relaxation_um, 45.5);
    assert_eq!(m.bound_terms[0].strength, 12.0);
    assert_eq!(m.bound_terms[0].resonance_um, 1.26);
    assert_eq!(m.bound_terms[0].damping, 0.6);
    assert_eq!(m.bound_terms.len(), 3);
}

#[test]
fn hot_columns_share_intermediate_bound_terms() {
    let db = MaterialDatabase::builtin();
    let p = BoundedTermPolicy::default();
    let base = db
        .model_for_temperature("tungsten", 1600.0, p)
        .unwrap()
        .bound_terms;
    for t in [2000.0, 2400.0, 2350.0] {
        assert_eq!(
            db.model_for_temperature("tungsten", t, p)
                .unwrap()
                .bound_terms,
            base
        );
    }
    assert_eq!(
        db.model_for_temperature("tungsten", 2350.0, p)
            .unwrap()
            .temperature_k,
        2400.0
    );
    assert!(matches!(
        db.model_for_temperature("tungsten", 3500.0, p),
        Err(Error::TemperatureOutOfRange(_))
    ));
    assert!(matches!(
        db.model_for_temperature("tungsten", 200.0, p),
        Err(Error::TemperatureOutOfRange(_))
    ));
    assert!(matches!(
        db.model_for_temperature("gold", 298.0, p),
        Err(Error::UnknownMaterial(_))
    ));
}

#[test]
fn tabulated_conductivity_sums() {
    let db = MaterialDatabase::builtin();
    for t in [298.0, 1100.0, 1600.0] {
        let rec = db.record_for_temperature("tungsten", t).unwrap();
        let sum = rec.model.dc_conductivity();
        assert!(
            (sum - rec.sigma0).abs() <= 0.02 * rec.sigma0,
            "T={t}: {sum} vs {}",
            rec.sigma0
        );
    }
}

#[test]
fn refraction_index_examples() {
    let one = refraction_index(ComplexPermittivity(Complex64::new(1.0, 0.0)));
    assert_eq!(one, Complex64::new(1.0, 0.0));
    let n = refraction_index(ComplexPermittivity(Complex64::new(-1.0, 1e-4)));
    assert!((n.im - 1.0).abs() < 1e-6 && n.re.abs() < 1e-4);

    let m = MaterialDatabase::builtin()
        .model_for_temperature("tungsten", 2400.0, BoundedTermPolicy::default())
        .unwrap();
    let eps = permittivity(&m, 0.6).unwrap().0;
    let n = refraction_index(ComplexPermittivity(eps));
    assert!(n.im > 0.0);
    assert!((n * n - eps).norm() <= 1e-14 * eps.norm());
}

#[test]
fn database_file_round_trip_and_env_override() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(DEFAULT_DATABASE.as_bytes()).unwrap();
    let loaded = MaterialDatabase::load(f.path()).unwrap();
    assert_eq!(loaded, MaterialDatabase::builtin());

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    bad.write_all(b"format_version = 1\n\n[[record]]\nelement = \"w\"\ncolour = 3\n")
        .unwrap();
    let err = MaterialDatabase::load(bad.path()).unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "{err}");

    assert!(matches!(
        MaterialDatabase::load(std::path::Path::new("/nonexistent/db.toml")),
        Err(Error::Io(_))
    ));
}

#[test]
fn in_fitted_range_flags_extrapolation() {
    use wirepol::materials::DrudePermittivityModel as M;
    assert!(M::in_fitted_range(0.6));
    assert!(M::in_fitted_range(FITTED_RANGE_UM.1));
    assert!(!M::in_fitted_range(0.3));
    assert!(!M::in_fitted_range(5.0));
}

proptest! {
    #[test]
    fn square_root_round_trip(re in -1e3f64..1e3, im in 0.0f64..1e3) {
        let eps = Complex64::new(re, im);
        let n = refraction_index(ComplexPermittivity(eps));
        prop_assert!(n.im >= 0.0);
        prop_assert!((n * n - eps).norm() <= 1e-14 * eps.norm().max(1e-300));
        let back = refraction_index(ComplexPermittivity(n * n));
        prop_assert!((back - n).norm() <= 1e-14 * n.norm().max(1e-300));
    }
}
