//! Bessel functions of real positive argument and the Hankel function
//! `H^(1)_m(x) = J_m(x) + i Y_m(x)`.
//!
//! `J_m` comes from a real Miller recurrence. The same backward pass
//! accumulates the Neumann sums that give `Y_0` and `Y_1` for moderate `x`;
//! above [`ASYMPTOTIC_MIN`] the two seeds come from Hankel's asymptotic
//! expansion instead. Higher `Y_m` follow by upward recurrence, which is
//! stable for the dominant solution.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::bessel::{derivative_entry, signed_entry, MAX_ORDER};
use crate::error::{Error, Result};

/// Seeds `Y_0`, `Y_1` switch to the asymptotic expansion at this argument.
pub const ASYMPTOTIC_MIN: f64 = 25.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_k(x)` and `Y_k(x)` tables for `k = 0..=max_order`.
///
/// `Y_k` may reach `-inf` at orders far above `x`; callers that only need
/// the low orders can ignore those entries.
#[derive(Debug, Clone)]
pub struct CylinderTable {
    pub j: Vec<f64>,
    pub y: Vec<f64>,
}

impl CylinderTable {
    pub fn new(max_order: usize, x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain(format!(
                "Hankel argument must be finite and > 0, got {x}"
            )));
        }
        if max_order > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: max_order,
                ceiling: MAX_ORDER,
            });
        }
        let top = max_order.max(1);
        let pass = miller_real(top, x);
        let (y0, y1) = if x >= ASYMPTOTIC_MIN {
            let h0 = hankel_asymptotic(0.0, x);
            let h1 = hankel_asymptotic(1.0, x);
            (h0.im, h1.im)
        } else {
            (pass.y0, pass.y1)
        };
        let mut y = Vec::with_capacity(top + 1);
        y.push(y0);
        y.push(y1);
        for k in 1..top {
            let next = (2.0 * k as f64 / x) * y[k] - y[k - 1];
            y.push(if next.is_finite() {
                next
            } else {
                f64::NEG_INFINITY
            });
        }
        let mut j = pass.j;
        j.truncate(max_order + 1);
        y.truncate(max_order + 1);
        Ok(Self { j, y })
    }

    pub fn hankel(&self, k: usize) -> Complex64 {
        Complex64::new(self.j[k], self.y[k])
    }

    /// Hankel values as a complex table.
    pub fn hankel_table(&self) -> Vec<Complex64> {
        self.j
            .iter()
            .zip(&self.y)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    }
}

/// `H^(1)_m(x)` for `x > 0`.
pub fn hankel1(order: i32, x: f64) -> Result<Complex64> {
    let m = order.unsigned_abs() as usize;
    let table = CylinderTable::new(m, x)?.hankel_table();
    finite_or_range(signed_entry(&table, order as i64), x)
}

/// `H^(1)'_m(x) = (H_{m-1}(x) - H_{m+1}(x)) / 2`.
pub fn hankel1_derivative(order: i32, x: f64) -> Result<Complex64> {
    let m = order.unsigned_abs() as usize;
    let table = CylinderTable::new(m + 1, x)?.hankel_table();
    finite_or_range(derivative_entry(&table, order as i64), x)
}

fn finite_or_range(v: Complex64, x: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range {
            z: Complex64::new(x, 0.0),
            reason: "Y_m overflows double precision at this order",
        })
    }
}

struct RealPass {
    j: Vec<f64>,
    y0: f64,
    y1: f64,
}

/// Backward recurrence for real `x`, normalized by `J_0 + 2 Σ J_{2k} = 1`.
fn miller_real(max_order: usize, x: f64) -> RealPass {
    let start = {
        let base = (max_order as f64).max(x.ceil());
        (base + 15.0 * x.cbrt() + 40.0).ceil() as usize
    };
    let two_over_x = 2.0 / x;
    let mut stored = vec![0.0; max_order + 1];
    let mut stored_scale = vec![0u32; max_order + 1];
    let mut scale = 0u32;

    let mut above = 0.0f64;
    let mut cur = 1e-30f64;
    let mut norm = 0.0f64;
    // Σ (-1)^{k/2} J_k / k over even k, and Σ (-1)^{k/2} k/(k²-1) J_k over odd k ≥ 3
    let mut even_sum = 0.0f64;
    let mut odd_sum = 0.0f64;

    for k in (1..=start).rev() {
        if k <= max_order {
            stored[k] = cur;
            stored_scale[k] = scale;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            norm += 2.0 * cur;
            even_sum += sign * cur / k as f64;
        } else if k > 1 {
            let kf = k as f64;
            odd_sum += sign * kf / (kf * kf - 1.0) * cur;
        }
        let below = two_over_x * k as f64 * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE_AT {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            even_sum *= RESCALE_BY;
            odd_sum *= RESCALE_BY;
            scale += 1;
        }
    }
    stored[0] = cur;
    stored_scale[0] = scale;
    norm += cur;

    let j: Vec<f64> = stored
        .iter()
        .zip(&stored_scale)
        .map(|(&f, &s)| {
            let mut v = f / norm;
            for _ in s..scale {
                if v == 0.0 {
                    break;
                }
                v *= RESCALE_BY;
            }
            v
        })
        .collect();

    let log_term = (x / 2.0).ln() + EULER_GAMMA;
    let y0 = 2.0 / PI * (log_term * j[0] - 4.0 * even_sum / norm);
    let y1 = 2.0 / PI * ((log_term - 1.0) * j[1] - j[0] / x - 4.0 * odd_sum / norm);
    RealPass { j, y0, y1 }
}

/// Hankel's expansion `sqrt(2/(πx)) e^{i(x - νπ/2 - π/4)} Σ i^k a_k(ν) / x^k`.
fn hankel_asymptotic(nu: f64, x: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= Complex64::new(0.0, (mu - odd * odd) / (8.0 * k as f64 * x));
        let size = term.norm();
        if size >= prev {
            break;
        }
        sum += term;
        prev = size;
        if size < 1e-18 {
            break;
        }
    }
    let carrier =
        Complex64::from_polar(1.0, x) * Complex64::from_polar(1.0, -(nu * PI / 2.0 + FRAC_PI_4));
    (2.0 / (PI * x)).sqrt() * carrier * sum
}
