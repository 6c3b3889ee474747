//! Cardinal B-splines `N_m`.
//!
//! `N_1` is the indicator of `[0, 1)` and `N_m(x) = ∫₀¹ N_{m-1}(x - y) dy`. The
//! spline is supported on `[0, m]`, is a polynomial of degree `m - 1` on every
//! `[k, k + 1)` and belongs to `C^{m-2}`.
//!
//! Point evaluation uses the two-term recurrence
//! `N_m(x) = (x N_{m-1}(x) + (m - x) N_{m-1}(x - 1)) / (m - 1)`. The piecewise
//! form is built independently by integrating the pieces of `N_{m-1}` exactly,
//! so the two routes check each other.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order `m` of a cardinal B-spline (degree `m - 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SplineOrder(u32);

impl SplineOrder {
    /// Largest order accepted. Factorials of `2m - 1` stay finite in `f64` well past this.
    pub const MAX: u32 = 32;

    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder { m, min: 1 });
        }
        if m > Self::MAX {
            return Err(Error::OrderTooLarge { m, max: Self::MAX });
        }
        Ok(SplineOrder(m))
    }

    /// Order valid for wavelet-level operations (`m >= 2`).
    pub fn wavelet(m: u32) -> Result<Self> {
        let order = Self::new(m)?;
        order.require_wavelet()?;
        Ok(order)
    }

    pub fn require_wavelet(self) -> Result<()> {
        if self.0 < 2 {
            return Err(Error::InvalidOrder { m: self.0, min: 2 });
        }
        Ok(())
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }
}

impl TryFrom<u32> for SplineOrder {
    type Error = Error;

    fn try_from(m: u32) -> Result<Self> {
        SplineOrder::new(m)
    }
}

impl From<SplineOrder> for u32 {
    fn from(m: SplineOrder) -> u32 {
        m.0
    }
}

impl fmt::Display for SplineOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `N_m(x)`, right-continuous at the knots.
pub fn eval_bspline(m: SplineOrder, x: f64) -> f64 {
    let m = m.as_usize();
    if !(x >= 0.0 && x < m as f64) {
        return 0.0;
    }
    let k = x.floor() as usize;
    let t = x - k as f64;
    // v[s] holds N_d(t + s) for s = 0..d-1
    let mut v = vec![0.0; m];
    v[0] = 1.0;
    for d in 2..=m {
        let inv = 1.0 / (d - 1) as f64;
        for s in (0..d).rev() {
            let y = t + s as f64;
            let left = if s < d - 1 { v[s] } else { 0.0 };
            let right = if s >= 1 { v[s - 1] } else { 0.0 };
            v[s] = (y * left + (d as f64 - y) * right) * inv;
        }
    }
    v[k]
}

/// Exact values `N_m(0), ..., N_m(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSampleVector {
    pub m: SplineOrder,
    pub samples: Vec<BigRational>,
}

impl RationalSampleVector {
    /// `N_m(k)` for any integer `k`; zero off the support.
    pub fn at(&self, k: i64) -> BigRational {
        if k < 0 || k as usize >= self.samples.len() {
            BigRational::zero()
        } else {
            self.samples[k as usize].clone()
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.samples.iter().map(rational_to_f64).collect()
    }
}

/// Exact integer samples of `N_m`, from the same recurrence run in rationals.
pub fn integer_samples(m: SplineOrder) -> RationalSampleVector {
    let m_us = m.as_usize();
    let mut cur = vec![BigRational::one(), BigRational::zero()];
    for d in 2..=m_us {
        let denom = int(d as i64 - 1);
        let mut next = Vec::with_capacity(d + 1);
        for x in 0..=d {
            let left = cur.get(x).cloned().unwrap_or_else(BigRational::zero);
            let right = if x >= 1 {
                cur[x - 1].clone()
            } else {
                BigRational::zero()
            };
            let value = (int(x as i64) * left + int(d as i64 - x as i64) * right) / denom.clone();
            next.push(value);
        }
        cur = next;
    }
    RationalSampleVector { m, samples: cur }
}

/// `N_m` as one polynomial per unit interval.
///
/// `pieces[k][p]` is the coefficient of `t^p` on `[k, k + 1)` with `t = x - k`.
#[derive(Clone, Debug)]
pub struct PiecewisePolynomial {
    pub m: SplineOrder,
    pub pieces: Vec<Vec<BigRational>>,
    pieces_f64: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    fn new(m: SplineOrder, pieces: Vec<Vec<BigRational>>) -> Self {
        let pieces_f64 = pieces
            .iter()
            .map(|row| row.iter().map(rational_to_f64).collect())
            .collect();
        PiecewisePolynomial { m, pieces, pieces_f64 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = self.m.as_usize();
        if !(x >= 0.0 && x < m as f64) {
            return 0.0;
        }
        let k = x.floor() as usize;
        let t = x - k as f64;
        self.pieces_f64[k].iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Exact value of the `order`-th derivative of piece `k` at local `t`.
    fn derivative_at(&self, k: usize, order: usize, t: &BigRational) -> BigRational {
        let row = &self.pieces[k];
        let mut value = BigRational::zero();
        let mut tp = BigRational::one();
        for (p, c) in row.iter().enumerate().skip(order) {
            let falling: i64 = ((p - order + 1)..=p).map(|v| v as i64).product();
            value += c * int(falling.max(1)) * tp.clone();
            tp *= t;
        }
        value
    }

    /// Largest jump of the `order`-th derivative over the knots `0, 1, ..., m`.
    pub fn continuity_defect(&self, order: usize) -> f64 {
        let m = self.m.as_usize();
        let zero = BigRational::zero();
        let one = BigRational::one();
        let mut worst = 0.0_f64;
        for knot in 0..=m {
            let left = if knot == 0 {
                BigRational::zero()
            } else {
                self.derivative_at(knot - 1, order, &one)
            };
            let right = if knot == m {
                BigRational::zero()
            } else {
                self.derivative_at(knot, order, &zero)
            };
            let jump = rational_to_f64(&(left - right)).abs();
            worst = worst.max(jump);
        }
        worst
    }
}

/// Antiderivative `F(t) = ∫₀ᵗ p(s) ds` of a coefficient row.
fn antiderivative(row: &[BigRational]) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(row.len() + 1);
    out.push(BigRational::zero());
    for (p, c) in row.iter().enumerate() {
        out.push(c / int(p as i64 + 1));
    }
    out
}

fn row_at_one(row: &[BigRational]) -> BigRational {
    row.iter().fold(BigRational::zero(), |acc, c| acc + c)
}

/// Piecewise-polynomial form of `N_m`, built by exact repeated integration.
pub fn piecewise_form(m: SplineOrder) -> PiecewisePolynomial {
    let mut pieces: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    for d in 2..=m.as_usize() {
        // N_d(k + t) = F_k(t) + F_{k-1}(1) - F_{k-1}(t)
        let anti: Vec<Vec<BigRational>> = pieces.iter().map(|row| antiderivative(row)).collect();
        let mut next = Vec::with_capacity(d);
        for k in 0..d {
            let mut row = vec![BigRational::zero(); d];
            if k < anti.len() {
                for (p, c) in anti[k].iter().enumerate() {
                    row[p] += c;
                }
            }
            if k >= 1 && k - 1 < anti.len() {
                let prev = &anti[k - 1];
                row[0] += row_at_one(prev);
                for (p, c) in prev.iter().enumerate() {
                    row[p] -= c;
                }
            }
            next.push(row);
        }
        pieces = next;
    }
    PiecewisePolynomial::new(m, pieces)
}

/// `∫ N_m(x) N_m(x - n) dx = N_{2m}(m + n)`, exactly.
pub fn autocorrelation_at(m: SplineOrder, n: i64) -> BigRational {
    let doubled = SplineOrder(2 * m.get());
    integer_samples(doubled).at(m.as_i64() + n)
}

/// All nonzero autocorrelations, indexed by `n + m - 1` for `n = -(m-1)..=m-1`.
pub fn autocorrelation_row(m: SplineOrder) -> Vec<BigRational> {
    let doubled = SplineOrder(2 * m.get());
    let samples = integer_samples(doubled);
    let mi = m.as_i64();
    (-(mi - 1)..=(mi - 1)).map(|n| samples.at(mi + n)).collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `∫ x^p N_m(x) dx`, exactly.
pub fn moment(m: SplineOrder, p: u32) -> BigRational {
    let form = piecewise_form(m);
    let p = p as usize;
    let mut total = BigRational::zero();
    for (k, row) in form.pieces.iter().enumerate() {
        // (k + t)^p = Σ_q binom(p, q) k^{p-q} t^q, then ∫₀¹ t^{q+s} dt = 1 / (q + s + 1)
        for q in 0..=p {
            let weight = BigRational::from_integer(binomial(p, q) * BigInt::from(k).pow((p - q) as u32));
            if weight.is_zero() {
                continue;
            }
            for (s, c) in row.iter().enumerate() {
                total += weight.clone() * c / int((q + s + 1) as i64);
            }
        }
    }
    total
}
