//! Extended-precision reference values: ascending series summed in binary
//! fixed point with 640 fractional bits.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

const FRAC_BITS: u32 = 640;

#[derive(Clone, Debug)]
struct Fixed {
    re: BigInt,
    im: BigInt,
}

fn from_f64(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = if exp == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    };
    let shift = exp - 1075 + FRAC_BITS as i64;
    let m = BigInt::from(mant) * sign;
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn to_f64(x: &BigInt) -> f64 {
    let bits = x.bits() as i64;
    let keep = 60i64;
    if bits <= keep {
        return x.to_f64().unwrap() / 2f64.powi(FRAC_BITS as i32);
    }
    let drop = bits - keep;
    let top = (x >> drop as usize).to_f64().unwrap();
    top * 2f64.powi((drop - FRAC_BITS as i64) as i32)
}

impl Fixed {
    fn new(z: Complex64) -> Self {
        Self {
            re: from_f64(z.re),
            im: from_f64(z.im),
        }
    }
    fn one() -> Self {
        Self {
            re: BigInt::one() << FRAC_BITS as usize,
            im: BigInt::zero(),
        }
    }
    fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }
    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed {
            re: (&self.re * &o.re - &self.im * &o.im) >> FRAC_BITS as usize,
            im: (&self.re * &o.im + &self.im * &o.re) >> FRAC_BITS as usize,
        }
    }
    fn div_int(&self, d: u64) -> Fixed {
        Fixed {
            re: &self.re / d,
            im: &self.im / d,
        }
    }
    fn add(&self, o: &Fixed) -> Fixed {
        Fixed {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    fn neg(&self) -> Fixed {
        Fixed {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn is_negligible(&self) -> bool {
        self.re.abs().bits() < 8 && self.im.abs().bits() < 8
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

/// `Σ_j (-z²/4)^j (z/2)^m / (j!(j+m)!)` for `m ≥ 0`.
pub fn bessel_j_series(m: u32, z: Complex64) -> Complex64 {
    let half = Fixed::new(z * 0.5);
    let mut lead = Fixed::one();
    for k in 1..=m {
        lead = lead.mul(&half).div_int(k as u64);
    }
    let q = half.mul(&half).neg();
    let mut term = lead.clone();
    let mut sum = lead;
    for j in 1u64.. {
        term = term.mul(&q).div_int(j * (j + m as u64));
        sum = sum.add(&term);
        if term.is_negligible() && j > 4 {
            break;
        }
    }
    sum.to_c64()
}

/// `Y_n(x)` from its ascending series; the logarithm and Euler's constant
/// enter in double precision.
pub fn bessel_y_series(n: u32, x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let pi = std::f64::consts::PI;
    let jn = bessel_j_series(n, Complex64::new(x, 0.0)).re;
    let half = Fixed::new(Complex64::new(x * 0.5, 0.0));

    // finite sum Σ_{k<n} (n-k-1)!/k! (x/2)^{2k-n}, in f64 (few terms)
    let h = x * 0.5;
    let mut finite = 0.0;
    for k in 0..n {
        let mut c = 1.0;
        for i in 1..=(n - k - 1) {
            c *= i as f64;
        }
        for i in 1..=k {
            c /= i as f64;
        }
        finite += c * h.powi(2 * k as i32 - n as i32);
    }

    // Σ_k (-1)^k [ψ(k+1) + ψ(n+k+1)] (x/2)^{2k+n}/(k!(n+k)!), with
    // ψ(j+1) = H_j - γ; the -2γ part folds into the J_n log term.
    let mut lead = Fixed::one();
    for k in 1..=n {
        lead = lead.mul(&half).div_int(k as u64);
    }
    let q = half.mul(&half).neg();
    let mut term = lead;
    let mut sum = Fixed::zero();
    let harmonic = |j: u64| -> Fixed {
        // H_j exactly in fixed point
        let mut acc = Fixed::zero();
        for i in 1..=j {
            acc = acc.add(&Fixed::one().div_int(i));
        }
        acc
    };
    for k in 0u64.. {
        if k > 0 {
            term = term.mul(&q).div_int(k * (k + n as u64));
        }
        let weight = harmonic(k).add(&harmonic(k + n as u64));
        sum = sum.add(&term.mul(&weight));
        if term.is_negligible() && k > 4 {
            break;
        }
    }
    let series = sum.to_c64().re;
    (2.0 / pi) * ((x * 0.5).ln() + EULER) * jn - finite / pi - series / pi
}

pub fn hankel1_series(n: u32, x: f64) -> Complex64 {
    Complex64::new(
        bessel_j_series(n, Complex64::new(x, 0.0)).re,
        bessel_y_series(n, x),
    )
}

pub fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}
