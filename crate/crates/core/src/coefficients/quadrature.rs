//! The symbol `P_m` and trapezoid-rule Fourier coefficients of `P_m^{∓1/2}`.

use std::f64::consts::PI;

use crate::bspline::{autocorrelation_row, rational_to_f64, SplineOrder};
use crate::error::Result;
use crate::euler_frobenius::EFSpectrum;
use crate::numeric::Neumaier;

/// Default number of trapezoid nodes.
pub const DEFAULT_NODES: usize = 4096;
/// Below this magnitude a quadrature coefficient is dominated by rounding.
pub const ROUNDOFF_FLOOR: f64 = 5e-15;

/// `P_m` in two independent forms: the root product and the cosine sum.
#[derive(Clone, Debug)]
pub struct PmSymbol {
    pub m: SplineOrder,
    /// `N_{2m}(m+k)` for `k = 0..m-1`.
    cosine: Vec<f64>,
    /// `λ_1..λ_{m-1}`.
    roots: Vec<f64>,
    inv_factorial: f64,
}

impl PmSymbol {
    pub fn new(m: SplineOrder) -> Result<Self> {
        let roots = if m.get() >= 2 {
            EFSpectrum::compute(m)?.inner_roots().to_vec()
        } else {
            Vec::new()
        };
        Ok(Self::with_roots(m, roots))
    }

    pub fn from_spectrum(spectrum: &EFSpectrum) -> Self {
        Self::with_roots(spectrum.m, spectrum.inner_roots().to_vec())
    }

    fn with_roots(m: SplineOrder, roots: Vec<f64>) -> Self {
        let row = autocorrelation_row(m);
        let mm = m.as_usize();
        let cosine = row[mm - 1..].iter().map(rational_to_f64).collect();
        let inv_factorial = (-libm::lgamma(2.0 * m.get() as f64)).exp();
        PmSymbol {
            m,
            cosine,
            roots,
            inv_factorial,
        }
    }

    /// `(1/(2m-1)!) Π_k (1 - 2 λ_k cos θ + λ_k²) / |λ_k|`.
    pub fn product(&self, theta: f64) -> f64 {
        let c = theta.cos();
        self.roots
            .iter()
            .map(|&l| (1.0 - 2.0 * l * c + l * l) / l.abs())
            .product::<f64>()
            * self.inv_factorial
    }

    /// `Σ_{|k|<m} N_{2m}(m+k) cos kθ`.
    pub fn cosine_sum(&self, theta: f64) -> f64 {
        let mut acc = Neumaier::default();
        acc.add(self.cosine[0]);
        for (k, s) in self.cosine.iter().enumerate().skip(1) {
            acc.add(2.0 * s * (k as f64 * theta).cos());
        }
        acc.value()
    }

    /// Cosine coefficients `N_{2m}(m+k)`, `k = 0..m-1`.
    pub fn cosine_coefficients(&self) -> &[f64] {
        &self.cosine
    }
}

/// `P_m` at `θ` through the product over Euler–Frobenius roots.
pub fn pm_eval(m: SplineOrder, theta: f64) -> Result<f64> {
    Ok(PmSymbol::new(m)?.product(theta))
}

/// `P_m` at `θ` through the autocorrelation cosine sum.
pub fn pm_cosine_sum(m: SplineOrder, theta: f64) -> f64 {
    PmSymbol::with_roots(m, Vec::new()).cosine_sum(theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    /// `P_m^{-1/2}`, whose coefficients are `c_j`.
    InverseSqrt,
    /// `P_m^{1/2}`, whose coefficients are `b_j`.
    Sqrt,
}

/// One trapezoid coefficient and whether it sits under the rounding floor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureValue {
    pub value: f64,
    pub below_floor: bool,
}

/// Samples of `P_m^{∓1/2}` on a uniform periodic grid with a cosine lookup table.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub m: SplineOrder,
    pub nodes: usize,
    inv_sqrt: Vec<f64>,
    sqrt: Vec<f64>,
    cos: Vec<f64>,
}

impl QuadratureGrid {
    /// Grid with `max(nodes, 32 jmax)` points, rounded up to a multiple of 4.
    pub fn new(m: SplineOrder, nodes: usize, jmax: usize) -> Self {
        let n = nodes.max(32 * jmax).max(8).next_multiple_of(4);
        let cos: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
        let row = autocorrelation_row(m);
        let coeffs: Vec<f64> = row[m.as_usize() - 1..].iter().map(rational_to_f64).collect();
        let p: Vec<f64> = (0..n)
            .map(|i| {
                let mut acc = Neumaier::default();
                acc.add(coeffs[0]);
                for (k, s) in coeffs.iter().enumerate().skip(1) {
                    acc.add(2.0 * s * cos[(k * i) % n]);
                }
                acc.value()
            })
            .collect();
        QuadratureGrid {
            m,
            nodes: n,
            inv_sqrt: p.iter().map(|v| 1.0 / v.sqrt()).collect(),
            sqrt: p.iter().map(|v| v.sqrt()).collect(),
            cos,
        }
    }

    pub fn coefficient(&self, symbol: Symbol, j: i64) -> QuadratureValue {
        let f = match symbol {
            Symbol::InverseSqrt => &self.inv_sqrt,
            Symbol::Sqrt => &self.sqrt,
        };
        let n = self.nodes;
        let ju = j.unsigned_abs() as usize % n;
        let mut acc = Neumaier::default();
        for (i, v) in f.iter().enumerate() {
            acc.add(v * self.cos[(ju * i) % n]);
        }
        let value = acc.value() / n as f64;
        QuadratureValue {
            value,
            below_floor: value.abs() < ROUNDOFF_FLOOR,
        }
    }
}

/// `c_j = (1/2π) ∫ cos(jθ) P_m^{-1/2} dθ` by the trapezoid rule.
pub fn c_quadrature(m: SplineOrder, j: i64) -> Result<QuadratureValue> {
    m.require_wavelet()?;
    let grid = QuadratureGrid::new(m, DEFAULT_NODES, j.unsigned_abs() as usize);
    Ok(grid.coefficient(Symbol::InverseSqrt, j))
}

/// `b_j = (1/2π) ∫ cos(jθ) P_m^{1/2} dθ` by the trapezoid rule.
pub fn b_quadrature(m: SplineOrder, j: i64) -> Result<QuadratureValue> {
    m.require_wavelet()?;
    let grid = QuadratureGrid::new(m, DEFAULT_NODES, j.unsigned_abs() as usize);
    Ok(grid.coefficient(Symbol::Sqrt, j))
}
