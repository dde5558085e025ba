//! Normal-incidence scattering by a homogeneous circular cylinder and the
//! thermal emissivity that follows from it through Kirchhoff's law.
//!
//! For each angular momentum `m` and polarization the transition amplitude
//! `T_m = (1 - S_m)/2` is a quotient of Bessel and Hankel factors at `ka`
//! and `nka`. The emissivity is `4 Σ_m [Re T_m - |T_m|²]`, folded onto
//! `m ≥ 0` with `T_{-m} = T_m` and truncated adaptively.
//!
//! Wavenumbers are in inverse microns and radii in microns; only the
//! product `ka` matters.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{
    bessel_j_scaled_sequence, derivative_entry, scaled_div, signed_entry, CylinderTable,
};

/// Default relative truncation tolerance of the partial-wave sums.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Emissivities below this (both polarizations) make `P` undefined.
pub const DEGENERATE_EMISSIVITY: f64 = 1e-15;

/// Smallest allowed ceiling of the partial-wave sum.
const MIN_CEILING: usize = 5;

/// Consecutive small terms required before the sum is truncated.
const SMALL_TERMS_TO_STOP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Electric field orthogonal to the wire axis.
    Te,
    /// Electric field parallel to the wire axis.
    Tm,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Te, Polarization::Tm];
}

/// Wire dimensions and observation distance for the far-field check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireGeometry {
    pub radius_um: f64,
    pub length_mm: Option<f64>,
    pub observation_distance_m: Option<f64>,
}

impl WireGeometry {
    pub fn new(radius_um: f64) -> Result<Self> {
        if !(radius_um > 0.0) || !radius_um.is_finite() {
            return Err(Error::domain(format!(
                "wire radius must be > 0, got {radius_um}"
            )));
        }
        Ok(Self {
            radius_um,
            length_mm: None,
            observation_distance_m: None,
        })
    }

    pub fn with_length_mm(mut self, length_mm: f64) -> Self {
        self.length_mm = Some(length_mm);
        self
    }

    pub fn with_observation_distance_m(mut self, r: f64) -> Self {
        self.observation_distance_m = Some(r);
        self
    }
}

/// Outcome of the `a² ≪ λr ≪ l²` check, with the two ratios that decide it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldCheck {
    pub valid: bool,
    /// `λr / a²`
    pub near_ratio: f64,
    /// `l² / λr`
    pub far_ratio: f64,
}

/// True when `a²·margin ≤ λr` and `λr·margin ≤ l²`.
pub fn validate_far_field(
    geom: &WireGeometry,
    wavelength_um: f64,
    margin: f64,
) -> Result<FarFieldCheck> {
    let (Some(length_mm), Some(r)) = (geom.length_mm, geom.observation_distance_m) else {
        return Err(Error::domain(
            "far-field check needs wire length and observation distance",
        ));
    };
    let a = geom.radius_um * 1e-6;
    let l = length_mm * 1e-3;
    let lam_r = wavelength_um * 1e-6 * r;
    let a2 = a * a;
    let l2 = l * l;
    Ok(FarFieldCheck {
        valid: a2 * margin <= lam_r && lam_r * margin <= l2,
        near_ratio: lam_r / a2,
        far_ratio: l2 / lam_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionAmplitude {
    pub order: i64,
    pub polarization: Polarization,
    pub value: Complex64,
}

impl TransitionAmplitude {
    /// `Re T - |T|²`, non-negative for a passive cylinder.
    pub fn emission_term(&self) -> f64 {
        self.value.re - self.value.norm_sqr()
    }
}

/// Emissivity for one polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emissivity {
    pub polarization: Polarization,
    pub value: f64,
    pub terms_used: usize,
    pub truncation_error_estimate: f64,
}

/// Emissivities for both polarizations from one pass over `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedEmissivity {
    pub e_te: f64,
    pub e_tm: f64,
    pub terms_used: usize,
    /// Largest of the trailing terms relative to the sum, over both
    /// polarizations.
    pub truncation_error_estimate: f64,
}

impl PolarizedEmissivity {
    /// `(e_te - e_tm)/(e_te + e_tm)`.
    pub fn polarization(&self) -> Result<f64> {
        linear_polarization_from(self.e_te, self.e_tm)
    }
}

/// `P = (e_te - e_tm)/(e_te + e_tm)`; positive means orthogonal to the wire.
pub fn linear_polarization_from(e_te: f64, e_tm: f64) -> Result<f64> {
    if e_te.abs() < DEGENERATE_EMISSIVITY && e_tm.abs() < DEGENERATE_EMISSIVITY {
        return Err(Error::Degenerate(format!(
            "both emissivities vanish (e_te = {e_te:e}, e_tm = {e_tm:e})"
        )));
    }
    Ok(((e_te - e_tm) / (e_te + e_tm)).clamp(-1.0, 1.0))
}

/// Hard ceiling on the partial-wave index, from the larger of `ka` and
/// `|n|ka`.
pub fn order_ceiling(ka: f64, n: Complex64) -> usize {
    let x = n.norm().max(1.0) * ka;
    let c = x.ceil() + (10.0 * x.cbrt()).ceil() + 20.0;
    (c as usize).max(MIN_CEILING)
}

/// Bessel and Hankel tables at `ka` and `nka`, shared by all orders and
/// both polarizations.
#[derive(Debug, Clone)]
pub struct PartialWaves {
    ka: f64,
    n: Complex64,
    nka: Complex64,
    /// `J_k(nka)`, up to a common positive factor.
    inner: Vec<Complex64>,
    /// `J_k(nka) / J_{k-1}(nka)`, index 0 unused.
    inner_ratio: Vec<Complex64>,
    outer_j: Vec<Complex64>,
    outer_h: Vec<Complex64>,
}

impl PartialWaves {
    /// Tables for orders `0..=max_order`.
    pub fn new(k: f64, a: f64, n: Complex64, max_order: usize) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::domain(format!("wavenumber must be > 0, got {k}")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("radius must be > 0, got {a}")));
        }
        if !(n.im >= 0.0) || !n.re.is_finite() || !n.im.is_finite() {
            return Err(Error::domain(format!(
                "refraction index must be finite with Im n >= 0, got {n}"
            )));
        }
        let ka = k * a;
        let nka = n * ka;
        let top = max_order + 1;
        let wrap = |e: Error| Error::PartialWave {
            m: top as i64,
            ka,
            nka,
            source: Box::new(e),
        };
        let table = CylinderTable::new(top, ka).map_err(wrap)?;
        let inner = if nka.im == 0.0 && nka.re > 0.0 {
            // real index: share the real-argument tables so n = 1 cancels exactly
            if nka.re == ka {
                table.j.iter().map(|&v| Complex64::new(v, 0.0)).collect()
            } else {
                CylinderTable::new(top, nka.re)
                    .map_err(wrap)?
                    .j
                    .into_iter()
                    .map(|v| Complex64::new(v, 0.0))
                    .collect()
            }
        } else {
            bessel_j_scaled_sequence(top, nka).map_err(wrap)?
        };
        Ok(Self {
            ka,
            n,
            nka,
            inner_ratio: bessel_ratios(top, nka),
            inner,
            outer_j: table.j.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            outer_h: table.hankel_table(),
        })
    }

    pub fn ka(&self) -> f64 {
        self.ka
    }

    pub fn max_order(&self) -> usize {
        self.inner.len() - 2
    }

    /// `T_m` for any `|m| ≤ max_order`.
    pub fn amplitude(&self, m: i64, polarization: Polarization) -> Result<TransitionAmplitude> {
        let n = self.n;
        let ji = signed_entry(&self.inner, m);
        let dji = derivative_entry(&self.inner, m);
        let jo = signed_entry(&self.outer_j, m);
        let djo = derivative_entry(&self.outer_j, m);
        let ho = signed_entry(&self.outer_h, m);
        let dho = derivative_entry(&self.outer_h, m);
        if !(ho.im.is_finite() && dho.im.is_finite()) {
            // |T| ~ 1/(π m Y_m²) is far below the smallest double once Y_m overflows
            return Ok(TransitionAmplitude {
                order: m,
                polarization,
                value: Complex64::new(0.0, 0.0),
            });
        }
        let (num, den) = if is_negligible(ji) && is_negligible(dji) {
            // J_m(nka) underflowed: divide it out and use J'_m/J_m instead
            let d = self.log_derivative(m.unsigned_abs() as usize);
            match polarization {
                Polarization::Te => (d * jo - n * djo, d * ho - n * dho),
                Polarization::Tm => (djo - n * d * jo, dho - n * d * ho),
            }
        } else {
            match polarization {
                Polarization::Te => (dji * jo - n * djo * ji, dji * ho - n * ji * dho),
                Polarization::Tm => (ji * djo - n * dji * jo, ji * dho - n * dji * ho),
            }
        };
        let value = scaled_div(num, den);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::PartialWave {
                m,
                ka: self.ka,
                nka: self.nka,
                source: Box::new(Error::Range {
                    z: self.nka,
                    reason: "transition amplitude is not finite",
                }),
            });
        }
        Ok(TransitionAmplitude {
            order: m,
            polarization,
            value,
        })
    }

    /// `J'_m(nka) / J_m(nka)` for `m ≥ 0`; even in `m`.
    fn log_derivative(&self, m: usize) -> Complex64 {
        if m == 0 {
            -self.inner_ratio[1]
        } else {
            1.0 / self.inner_ratio[m] - m as f64 / self.nka
        }
    }

    /// `Re T_m - |T_m|²`.
    pub fn term(&self, m: i64, polarization: Polarization) -> Result<f64> {
        Ok(self.amplitude(m, polarization)?.emission_term())
    }
}

fn is_negligible(v: Complex64) -> bool {
    v.re.abs().max(v.im.abs()) < 1e-280
}

/// Backward recurrence `ρ_k = 1 / (2k/z - ρ_{k+1})` for `ρ_k = J_k/J_{k-1}`,
/// `k = 1..=top`, started well above `top`.
fn bessel_ratios(top: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); top + 1];
    if z.norm() == 0.0 {
        return out;
    }
    let abs_z = z.norm();
    let start = top.max(abs_z.ceil() as usize) + (15.0 * abs_z.cbrt()).ceil() as usize + 40;
    let mut rho = Complex64::new(0.0, 0.0);
    for k in (1..=start).rev() {
        rho = scaled_div(Complex64::new(1.0, 0.0), 2.0 * k as f64 / z - rho);
        if k <= top {
            out[k] = rho;
        }
    }
    out
}

pub fn transition_amplitude(
    m: i64,
    polarization: Polarization,
    k: f64,
    a: f64,
    n: Complex64,
) -> Result<TransitionAmplitude> {
    let waves = PartialWaves::new(k, a, n, m.unsigned_abs() as usize)?;
    waves.amplitude(m, polarization)
}

/// Running state of one truncated, folded sum.
#[derive(Debug, Default)]
struct FoldedSum {
    sum: f64,
    small_run: usize,
    trailing_max: f64,
    done: bool,
}

impl FoldedSum {
    fn push(&mut self, m: usize, term: f64, tol: f64) {
        if self.done {
            return;
        }
        let weighted = if m == 0 { term } else { 2.0 * term };
        self.sum += weighted;
        if weighted.abs() < tol * (self.sum.abs() + 1e-300) {
            self.small_run += 1;
            self.trailing_max = self.trailing_max.max(weighted.abs());
        } else {
            self.small_run = 0;
            self.trailing_max = 0.0;
        }
        if self.small_run >= SMALL_TERMS_TO_STOP {
            self.done = true;
        }
    }

    fn relative_tail(&self) -> f64 {
        if self.trailing_max == 0.0 {
            0.0
        } else {
            self.trailing_max / self.sum.abs().max(1e-300)
        }
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Both emissivities, sharing one set of Bessel tables.
pub fn emissivities(k: f64, a: f64, n: Complex64, tol: f64) -> Result<PolarizedEmissivity> {
    check_tolerance(tol)?;
    let ceiling = order_ceiling(k * a, n);
    let waves = PartialWaves::new(k, a, n, ceiling)?;
    let mut te = FoldedSum::default();
    let mut tm = FoldedSum::default();
    let mut last = 0.0f64;
    for m in 0..=ceiling {
        last = 0.0;
        if !te.done {
            let t = waves.term(m as i64, Polarization::Te)?;
            te.push(m, t, tol);
            last = last.max(t.abs());
        }
        if !tm.done {
            let t = waves.term(m as i64, Polarization::Tm)?;
            tm.push(m, t, tol);
            last = last.max(t.abs());
        }
        if te.done && tm.done {
            return Ok(PolarizedEmissivity {
                e_te: 4.0 * te.sum,
                e_tm: 4.0 * tm.sum,
                terms_used: m + 1,
                truncation_error_estimate: te.relative_tail().max(tm.relative_tail()),
            });
        }
    }
    Err(Error::NotConverged {
        m_max: ceiling,
        last_term: last,
    })
}

/// Emissivity for one polarization.
pub fn emissivity(
    polarization: Polarization,
    k: f64,
    a: f64,
    n: Complex64,
    tol: f64,
) -> Result<Emissivity> {
    check_tolerance(tol)?;
    let ceiling = order_ceiling(k * a, n);
    let waves = PartialWaves::new(k, a, n, ceiling)?;
    let mut acc = FoldedSum::default();
    let mut last = 0.0;
    for m in 0..=ceiling {
        let t = waves.term(m as i64, polarization)?;
        last = t.abs();
        acc.push(m, t, tol);
        if acc.done {
            return Ok(Emissivity {
                polarization,
                value: 4.0 * acc.sum,
                terms_used: m + 1,
                truncation_error_estimate: acc.relative_tail(),
            });
        }
    }
    Err(Error::NotConverged {
        m_max: ceiling,
        last_term: last,
    })
}

/// Single-wavelength linear polarization `P(k)`.
pub fn linear_polarization(k: f64, a: f64, n: Complex64, tol: f64) -> Result<f64> {
    emissivities(k, a, n, tol)?.polarization()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_derivative_matches_table_quotient() {
        for n in [c(4.5, 2.8), c(0.1, 0.001), c(1.3, 0.0)] {
            let waves = PartialWaves::new(1.0, 20.0, n, 60).unwrap();
            for m in 0..=60usize {
                let direct = derivative_entry(&waves.inner, m as i64) / waves.inner[m];
                let d = waves.log_derivative(m);
                assert!(
                    (d - direct).norm() <= 1e-10 * direct.norm().max(1.0),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn underflowed_interior_values_give_finite_amplitudes() {
        let ka = 901.7972287845605;
        let n = c(0.1, 0.01);
        let waves = PartialWaves::new(1.0, ka, n, 520).unwrap();
        assert_eq!(waves.inner[513], c(0.0, 0.0));
        for p in Polarization::BOTH {
            let t = waves.term(513, p).unwrap();
            assert!((-1e-12..=1.0).contains(&t));
        }
    }

    #[test]
    fn vacuum_wire_has_zero_amplitudes() {
        for m in -6..=6 {
            for p in Polarization::BOTH {
                let t = transition_amplitude(m, p, 2.0, 1.3, c(1.0, 0.0)).unwrap();
                assert_eq!(t.value, c(0.0, 0.0), "m={m} {p:?}");
            }
        }
        let e = emissivities(2.0, 1.3, c(1.0, 0.0), DEFAULT_TOLERANCE).unwrap();
        assert_eq!((e.e_te, e.e_tm), (0.0, 0.0));
        assert!(matches!(e.polarization(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn amplitudes_are_even_in_m() {
        let n = c(2.0, 1.0);
        let waves = PartialWaves::new(1.0, 2.0, n, 10).unwrap();
        for p in Polarization::BOTH {
            let plus = waves.amplitude(3, p).unwrap().value;
            let minus = waves.amplitude(-3, p).unwrap().value;
            assert!((plus - minus).norm() <= 1e-12 * plus.norm());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let n = c(2.0, 1.0);
        assert!(matches!(
            transition_amplitude(0, Polarization::Te, 0.0, 1.0, n),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            transition_amplitude(0, Polarization::Te, 1.0, -1.0, n),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            transition_amplitude(0, Polarization::Te, 1.0, 1.0, c(2.0, -0.1)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            emissivities(1.0, 1.0, n, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn far_field_with_apparatus_numbers() {
        let g = WireGeometry::new(2.5)
            .unwrap()
            .with_length_mm(7.0)
            .with_observation_distance_m(0.5);
        let check = validate_far_field(&g, 0.6, 10.0).unwrap();
        assert!(check.valid);
        assert!((check.near_ratio - 3e-7 / 6.25e-12).abs() < 1e-6 * check.near_ratio);
        assert!((check.far_ratio - 4.9e-5 / 3e-7).abs() < 1e-9 * check.far_ratio);

        let at_origin = g.with_observation_distance_m(0.0);
        assert!(!validate_far_field(&at_origin, 0.6, 10.0).unwrap().valid);
        assert!(validate_far_field(&WireGeometry::new(1.0).unwrap(), 0.6, 1.0).is_err());
    }

    #[test]
    fn far_field_margin_one_is_plain_ordering() {
        // a² = λr exactly at margin 1
        let g = WireGeometry::new(1.0)
            .unwrap()
            .with_length_mm(1.0)
            .with_observation_distance_m(1e-6);
        assert!(validate_far_field(&g, 1.0, 1.0).unwrap().valid);
        assert!(!validate_far_field(&g, 1.0, 1.0 + 1e-9).unwrap().valid);
        assert!(WireGeometry::new(0.0).is_err());
    }

    #[test]
    fn polarization_ratio_is_scale_invariant() {
        let p = linear_polarization_from(3.0, 1.0).unwrap();
        for s in [1e-6, 0.5, 7.0, 1e9] {
            assert!((linear_polarization_from(3.0 * s, 1.0 * s).unwrap() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn tiny_wire_still_converges() {
        let e = emissivities(
            2.0 * std::f64::consts::PI / 0.5,
            1e-4,
            c(3.3, 2.7),
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert!(e.e_te >= 0.0 && e.e_tm >= 0.0);
        assert!(e.terms_used >= SMALL_TERMS_TO_STOP);
    }
}
