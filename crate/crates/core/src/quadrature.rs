//! Gauss–Legendre rules, an adaptive integrator built on them, and a
//! fixed-order compensated sum.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on `P_n`, started from the
    /// Tricomi approximation of each root.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            if dp != 0.0 {
                deriv = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[lo, hi]`, in ascending node order.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let mut acc = CompensatedSum::default();
        for (x, w) in self.mapped(lo, hi) {
            acc.add(w * f(x));
        }
        acc.total()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Neumaier's compensated summation. The result depends only on the order
/// in which terms are added.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Result of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive bisection with a 15-point rule checked against its two
/// halves. Stops once the summed error estimate is below
/// `rel_tol · |value|`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<AdaptiveEstimate> {
    struct Piece {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }

    let rule = GaussLegendre::new(15);
    let mut evaluations = 0usize;
    let mut refine = |a: f64, b: f64, whole: f64, f: &mut F| -> [Piece; 2] {
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, &mut *f);
        let right = rule.integrate(m, b, &mut *f);
        evaluations += 2 * rule.len();
        let error = 0.5 * (left + right - whole).abs();
        [
            Piece {
                a,
                b: m,
                value: left,
                error,
            },
            Piece {
                a: m,
                b,
                value: right,
                error,
            },
        ]
    };

    let whole = rule.integrate(lo, hi, &mut f);
    let mut pieces: Vec<Piece> = refine(lo, hi, whole, &mut f).into();
    loop {
        let value = pieces
            .iter()
            .map(|p| p.value)
            .collect::<CompensatedSum>()
            .total();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if error <= rel_tol * value.abs() {
            return Ok(AdaptiveEstimate {
                value,
                error,
                evaluations: evaluations + rule.len(),
            });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::Quadrature {
                nodes: evaluations + rule.len(),
                estimate: error / value.abs(),
                target: rel_tol,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = pieces.swap_remove(worst);
        pieces.extend(refine(p.a, p.b, p.value, &mut f));
    }
}
