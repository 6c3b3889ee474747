//! Euler–Frobenius polynomial `E_{2m-1}` and the decay exponent derived from its roots.
//!
//! `E_{2m-1}(z) = (2m-1)! z^{m-1} Σ_{k=-m+1}^{m-1} N_{2m}(m+k) z^k` has palindromic
//! positive integer coefficients (Eulerian numbers) and `2m - 2` simple negative
//! roots that pair up as `λ_k λ_{2m-1-k} = 1`. Only the `m - 1` roots inside
//! `(-1, 0)` are searched; the rest are taken as reciprocals.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bspline::{integer_samples, SplineOrder};
use crate::error::{Error, Result};

/// Unreduced `f64` pair `hi + lo` used for compensated polynomial evaluation.
#[derive(Clone, Copy, Debug, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn quick_two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    DoubleDouble { hi: s, lo: b - (s - a) }
}

impl DoubleDouble {
    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return DoubleDouble { hi, lo: 0.0 };
        }
        // `hi` is an integer-valued double, so the remainder is exact in BigInt
        let hi_int = BigInt::from(hi as i128);
        let lo = (n - hi_int).to_f64().unwrap_or(0.0);
        DoubleDouble { hi, lo }
    }

    fn mul_f64(self, x: f64) -> Self {
        let p = self.hi * x;
        let e = self.hi.mul_add(x, -p) + self.lo * x;
        quick_two_sum(p, e)
    }

    fn add(self, other: DoubleDouble) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        quick_two_sum(s, e + self.lo + other.lo)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Integer polynomial in ascending powers with compensated evaluation.
#[derive(Clone, Debug)]
struct IntPoly {
    coeffs: Vec<DoubleDouble>,
    abs_coeffs: Vec<f64>,
    deriv: Vec<DoubleDouble>,
}

impl IntPoly {
    fn new(coeffs: &[BigInt]) -> Self {
        let dd: Vec<_> = coeffs.iter().map(DoubleDouble::from_bigint).collect();
        let abs_coeffs = dd.iter().map(|c| c.value().abs()).collect();
        let deriv = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| DoubleDouble::from_bigint(&(c * BigInt::from(k))))
            .collect();
        IntPoly {
            coeffs: dd,
            abs_coeffs,
            deriv,
        }
    }

    fn horner(coeffs: &[DoubleDouble], z: f64) -> f64 {
        coeffs
            .iter()
            .rev()
            .fold(DoubleDouble::default(), |acc, &c| acc.mul_f64(z).add(c))
            .value()
    }

    fn eval(&self, z: f64) -> f64 {
        Self::horner(&self.coeffs, z)
    }

    fn eval_deriv(&self, z: f64) -> f64 {
        Self::horner(&self.deriv, z)
    }

    /// `Σ |a_k| |z|^k`, the natural magnitude scale for residuals at `z`.
    fn magnitude(&self, z: f64) -> f64 {
        let az = z.abs();
        self.abs_coeffs.iter().rev().fold(0.0, |acc, &c| acc * az + c)
    }

    fn relative_residual(&self, z: f64) -> f64 {
        self.eval(z).abs() / self.magnitude(z)
    }
}

/// Coefficients of `E_{2m-1}` after removing `z^{m-1}`, lowest power first.
///
/// Entry `k + m - 1` is `(2m-1)! N_{2m}(m + k)` for `k = -m+1..=m-1`.
pub fn ef_coefficients(m: SplineOrder) -> Result<Vec<BigInt>> {
    m.require_wavelet()?;
    let doubled = SplineOrder::new(2 * m.get())?;
    let samples = integer_samples(doubled);
    let factorial: BigInt = (1..2 * m.get() as u64).map(BigInt::from).product();
    let mi = m.as_i64();
    let coeffs = (-(mi - 1)..=(mi - 1))
        .map(|k| {
            let scaled = samples.at(mi + k) * num_rational::BigRational::from_integer(factorial.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect();
    Ok(coeffs)
}

/// Roots of `E_{2m-1}` and the quantities derived from them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EFSpectrum {
    pub m: SplineOrder,
    /// Exact coefficients, lowest power first.
    #[serde(with = "bigint_strings")]
    pub coefficients: Vec<BigInt>,
    /// `λ_1 > λ_2 > ... > λ_{2m-2}`, all negative.
    pub roots: Vec<f64>,
    /// `|E(λ_k)| / Σ |a_i| |λ_k|^i` for every root.
    pub residuals: Vec<f64>,
    /// `μ_i = (λ_i + 1)² / (4 |λ_i|)` for `i = 1..m-1`.
    pub mu: Vec<f64>,
    pub alpha0: f64,
}

mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|n| n.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

const GRID_SPAN: f64 = 60.0;
const GRID_STEP: f64 = 0.01;
const BISECTION_RTOL: f64 = 1e-14;

fn bisect(poly: &IntPoly, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = poly.eval(lo);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || (hi - lo) <= BISECTION_RTOL * mid.abs() {
            return mid;
        }
        let f_mid = poly.eval(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

/// Two Newton steps, each kept only if it stays in the bracket and lowers the residual.
fn polish(poly: &IntPoly, mut z: f64, lo: f64, hi: f64) -> f64 {
    for _ in 0..2 {
        let f = poly.eval(z);
        let df = poly.eval_deriv(z);
        if f == 0.0 || df == 0.0 {
            break;
        }
        let candidate = z - f / df;
        if candidate >= lo.min(hi) && candidate <= lo.max(hi) && poly.eval(candidate).abs() <= f.abs() {
            z = candidate;
        }
    }
    z
}

/// Roots in `(-1, 0)`, sorted so that `0 > λ_1 > ... > λ_{m-1} > -1`.
fn inner_roots(m: SplineOrder, poly: &IntPoly) -> Result<Vec<f64>> {
    let expected = m.as_usize() - 1;
    // z = -exp(-s): s -> 0 approaches -1, large s approaches 0
    let steps = (GRID_SPAN / GRID_STEP) as usize;
    let mut roots = Vec::with_capacity(expected);
    let mut prev_z = -1.0;
    let mut prev_f = poly.eval(prev_z);
    for i in 1..=steps {
        let z = -(-(i as f64) * GRID_STEP).exp();
        let f = poly.eval(z);
        if f == 0.0 {
            roots.push(z);
        } else if (f > 0.0) != (prev_f > 0.0) && prev_f != 0.0 {
            let root = bisect(poly, prev_z, z);
            roots.push(polish(poly, root, prev_z, z));
        }
        prev_z = z;
        prev_f = f;
    }
    if roots.len() != expected {
        return Err(Error::RootIsolation {
            m: m.get(),
            found: roots.len(),
            expected,
        });
    }
    roots.sort_by(|a, b| b.partial_cmp(a).expect("finite roots"));
    Ok(roots)
}

pub fn mu_from_root(lambda: f64) -> f64 {
    (lambda + 1.0).powi(2) / (4.0 * lambda.abs())
}

/// `ln[(√(μ+1) + √μ) / (√(μ+1) - √μ)]`.
pub fn alpha0_from_mu(mu: f64) -> f64 {
    let a = (mu + 1.0).sqrt();
    let b = mu.sqrt();
    // (a + b)/(a - b) = (a + b)², since a² - b² = 1
    2.0 * (a + b).ln()
}

/// The same exponent written directly in the root: `-ln |λ_{m-1}|`.
pub fn alpha0_from_root(lambda: f64) -> f64 {
    -(lambda.abs()).ln()
}

impl EFSpectrum {
    pub fn compute(m: SplineOrder) -> Result<Self> {
        let coefficients = ef_coefficients(m)?;
        let poly = IntPoly::new(&coefficients);
        let inner = inner_roots(m, &poly)?;
        let mut roots = inner.clone();
        roots.extend(inner.iter().rev().map(|l| 1.0 / l));
        let residuals = roots.iter().map(|&z| poly.relative_residual(z)).collect();
        let mu: Vec<f64> = inner.iter().map(|&l| mu_from_root(l)).collect();
        let alpha0 = alpha0_from_mu(*mu.last().expect("m >= 2 gives at least one root"));
        Ok(EFSpectrum {
            m,
            coefficients,
            roots,
            residuals,
            mu,
            alpha0,
        })
    }

    /// `λ_1..λ_{m-1}`, the roots inside `(-1, 0)`.
    pub fn inner_roots(&self) -> &[f64] {
        &self.roots[..self.m.as_usize() - 1]
    }

    /// `μ_{m-1}`, the smallest `μ`, which fixes the decay rate.
    pub fn mu_last(&self) -> f64 {
        *self.mu.last().expect("nonempty")
    }

    pub fn lambda_last(&self) -> f64 {
        self.inner_roots()[self.m.as_usize() - 2]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// `E_{2m-1}(z) / z^{m-1}` in compensated arithmetic.
    pub fn eval(&self, z: f64) -> f64 {
        IntPoly::new(&self.coefficients).eval(z)
    }

    pub fn relative_residual(&self, z: f64) -> f64 {
        IntPoly::new(&self.coefficients).relative_residual(z)
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|c| {
                if c.is_zero() {
                    0.0
                } else {
                    c.to_f64().unwrap_or(f64::NAN)
                }
            })
            .collect()
    }
}

/// All `2m - 2` negative roots, descending.
pub fn negative_roots(m: SplineOrder) -> Result<Vec<f64>> {
    Ok(EFSpectrum::compute(m)?.roots)
}

pub fn mu_values(m: SplineOrder) -> Result<Vec<f64>> {
    Ok(EFSpectrum::compute(m)?.mu)
}

pub fn alpha0(m: SplineOrder) -> Result<f64> {
    Ok(EFSpectrum::compute(m)?.alpha0)
}
