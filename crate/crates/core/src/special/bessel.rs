//! Integer-order Bessel functions of the first kind for complex argument.
//!
//! Small arguments use the ascending series order by order. Everything else
//! goes through Miller's backward recurrence, normalized with the generating
//! function identity `exp(∓iz) = J_0 + 2 Σ (∓i)^k J_k`, whose terms carry
//! no cancellation on the half-plane selected by the sign. The recurrence
//! keeps a running decimal exponent so high orders neither overflow nor lose
//! their relative precision.
//!
//! The sequence entry point returns exponentially scaled values
//! `J_k(z)·exp(-|Im z|)`, which stay finite for arbitrarily large `Im z`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order any routine in this module will produce.
pub const MAX_ORDER: usize = 200_000;

/// Unscaled evaluations reject `|Im z|` beyond this (exp overflow).
pub const IM_GUARD: f64 = 700.0;

/// Ascending series is used for `|z|` up to this radius.
pub const SERIES_RADIUS: f64 = 12.0;

const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

fn check_argument(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Range {
            z,
            reason: "non-finite argument",
        });
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            ceiling: MAX_ORDER,
        });
    }
    Ok(())
}

/// `J_k(z)·exp(-|Im z|)` for `k = 0..=max_order`.
pub fn bessel_j_scaled_sequence(max_order: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_argument(z)?;
    check_order(max_order)?;
    if z.re == 0.0 && z.im == 0.0 {
        let mut out = vec![Complex64::new(0.0, 0.0); max_order + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    if z.norm() <= SERIES_RADIUS {
        let damp = (-z.im.abs()).exp();
        let mut out = series_sequence(max_order, z);
        for v in &mut out {
            *v *= damp;
        }
        Ok(out)
    } else {
        Ok(miller_scaled(max_order, z))
    }
}

/// `J_k(z)` for `k = 0..=max_order`; rejects `|Im z| > IM_GUARD`.
pub fn bessel_j_sequence(max_order: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_argument(z)?;
    if z.im.abs() > IM_GUARD {
        return Err(Error::Range {
            z,
            reason: "|Im z| exceeds the overflow guard",
        });
    }
    let grow = z.im.abs().exp();
    let mut out = bessel_j_scaled_sequence(max_order, z)?;
    for v in &mut out {
        *v *= grow;
    }
    Ok(out)
}

/// `J_m(z)` for any integer order.
pub fn bessel_j(order: i32, z: Complex64) -> Result<Complex64> {
    let m = order.unsigned_abs() as usize;
    let seq = bessel_j_sequence(m, z)?;
    Ok(signed_entry(&seq, order as i64))
}

/// `J'_m(z) = (J_{m-1}(z) - J_{m+1}(z)) / 2`.
pub fn bessel_j_derivative(order: i32, z: Complex64) -> Result<Complex64> {
    let m = order.unsigned_abs() as usize;
    let seq = bessel_j_sequence(m + 1, z)?;
    Ok(derivative_entry(&seq, order as i64))
}

/// Entry of order `k` (possibly negative) from a non-negative order table,
/// using `C_{-k} = (-1)^k C_k`.
pub(crate) fn signed_entry(seq: &[Complex64], k: i64) -> Complex64 {
    let v = seq[k.unsigned_abs() as usize];
    if k < 0 && k % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `(C_{k-1} - C_{k+1}) / 2` from a table covering order `|k| + 1`.
pub(crate) fn derivative_entry(seq: &[Complex64], k: i64) -> Complex64 {
    (signed_entry(seq, k - 1) - signed_entry(seq, k + 1)) * 0.5
}

/// Ascending series for each order, sharing the leading factor `(z/2)^k / k!`.
fn series_sequence(max_order: usize, z: Complex64) -> Vec<Complex64> {
    let half = z * 0.5;
    let q = -half * half;
    let mut out = Vec::with_capacity(max_order + 1);
    let mut lead = Complex64::new(1.0, 0.0);
    for m in 0..=max_order {
        if m > 0 {
            lead *= half / m as f64;
        }
        if lead.re == 0.0 && lead.im == 0.0 {
            out.resize(max_order + 1, Complex64::new(0.0, 0.0));
            break;
        }
        let mut term = lead;
        let mut sum = lead;
        for j in 1..400usize {
            term *= q / ((j * (j + m)) as f64);
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        out.push(sum);
    }
    out
}

fn miller_start(max_order: usize, abs_z: f64) -> usize {
    let base = (max_order as f64).max(abs_z.ceil());
    (base + 15.0 * abs_z.cbrt() + 40.0).ceil() as usize
}

/// Backward recurrence, normalized to `exp(-|Im z|)`-scaled values.
fn miller_scaled(max_order: usize, z: Complex64) -> Vec<Complex64> {
    let start = miller_start(max_order, z.norm());
    let two_over_z = 2.0 / z;

    // powers of w = -i (Im z >= 0) or +i (Im z < 0), cycled by k mod 4
    let upper = z.im >= 0.0;
    let weight = |k: usize| -> Complex64 {
        let c = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
        if upper {
            c
        } else {
            c.conj()
        }
    };

    let mut stored = vec![Complex64::new(0.0, 0.0); max_order + 1];
    let mut stored_scale = vec![0u32; max_order + 1];
    let mut scale = 0u32;

    let mut above = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    let mut norm_sum = Complex64::new(0.0, 0.0);

    for k in (1..=start).rev() {
        if k <= max_order {
            stored[k] = cur;
            stored_scale[k] = scale;
        }
        norm_sum += 2.0 * weight(k) * cur;
        let below = two_over_z * (k as f64) * cur - above;
        above = cur;
        cur = below;
        if cur.re.abs().max(cur.im.abs()) > RESCALE_AT {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            norm_sum *= RESCALE_BY;
            scale += 1;
        }
    }
    stored[0] = cur;
    stored_scale[0] = scale;
    norm_sum += cur;

    // scaled target: exp(∓iz)·exp(-|Im z|) = exp(∓i Re z)
    let target = if upper {
        Complex64::from_polar(1.0, -z.re)
    } else {
        Complex64::from_polar(1.0, z.re)
    };
    let factor = super::scaled_div(target, norm_sum);

    stored
        .iter()
        .zip(&stored_scale)
        .map(|(&f, &s)| {
            let mut v = f * factor;
            for _ in s..scale {
                if v.re == 0.0 && v.im == 0.0 {
                    break;
                }
                v *= RESCALE_BY;
            }
            v
        })
        .collect()
}
