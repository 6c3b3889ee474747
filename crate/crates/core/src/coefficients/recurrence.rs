//! The product-expansion recurrences `B_k^l`, `C_k^l` and the amplitude constants.
//!
//! Writing `x = sin²(θ/2)`, the symbol `1/√P_m` factors as
//! `A Π_i (1 - x/(μ_i+1))^{-1/2}`. The coefficient of `x^k` in that product is
//! `|binom(-1/2,k)| (μ_{m-1}+1)^{-k} (1 + B_k^{m-2})`, and `B` is built one factor
//! at a time. `√P_m` gives `C` the same way with exponent `+1/2`.

use rayon::prelude::*;

use super::binomial::{ln_abs_binom_half, ln_abs_binom_minus_half, sign_binom_half};
use crate::bspline::SplineOrder;
use crate::error::{Error, Result};
use crate::euler_frobenius::EFSpectrum;

/// Initial recurrence depth.
pub const DEFAULT_DEPTH: usize = 2048;
/// Depth is doubled up to this value when the limit certificate is too loose.
pub const MAX_DEPTH: usize = 16384;
/// Number of dyadic depths combined in the limit extrapolation.
pub const RICHARDSON_LEVELS: usize = 5;
/// Relative tolerance for the extrapolated limit certificate.
pub const LIMIT_RTOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrenceKind {
    B,
    C,
}

/// `x_k = B_k^{m-2}` or `C_k^{m-2}` for `k = 0..=depth`, with `x_0 = 0`.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    pub kind: RecurrenceKind,
    pub m: SplineOrder,
    pub depth: usize,
    pub values: Vec<f64>,
    /// Limit `k -> ∞`, extrapolated from the dyadic depths `depth/16 ..= depth`.
    pub limit: f64,
    /// `|limit(depth) - limit(depth/2)|`.
    pub certificate: f64,
}

impl RecurrenceTable {
    /// True for `m = 2`, where the product has one factor and every `x_k` is zero.
    pub fn is_trivial(&self) -> bool {
        self.m.get() == 2
    }

    /// `1 + x_k`; errors past the computed depth.
    pub fn one_plus(&self, k: usize) -> Result<f64> {
        if self.is_trivial() {
            return Ok(1.0);
        }
        self.values.get(k).map(|v| 1.0 + v).ok_or(Error::InsufficientDepth {
            have: self.depth,
            need: k,
        })
    }

    /// Raw defect `x_K - x_{K/2}` between the last entry and the midpoint.
    pub fn cauchy_defect(&self) -> f64 {
        if self.is_trivial() {
            return 0.0;
        }
        self.values[self.depth] - self.values[self.depth / 2]
    }
}

/// Polynomial extrapolation to `h = 0` in `h = 1/k` over `k = depth / 2^i`.
pub fn richardson(values: &[f64], depth: usize, levels: usize) -> f64 {
    let ks: Vec<usize> = (0..levels).rev().map(|i| depth >> i).collect();
    let hs: Vec<f64> = ks.iter().map(|&k| 1.0 / k as f64).collect();
    let mut p: Vec<f64> = ks.iter().map(|&k| values[k]).collect();
    for lev in 1..levels {
        for i in (lev..levels).rev() {
            p[i] = (hs[i - lev] * p[i] - hs[i] * p[i - 1]) / (hs[i - lev] - hs[i]);
        }
    }
    p[levels - 1]
}

fn recurrence_values(spectrum: &EFSpectrum, kind: RecurrenceKind, depth: usize) -> Vec<f64> {
    let len = depth + 1;
    let (ln_b, sign): (Vec<f64>, fn(usize) -> f64) = match kind {
        RecurrenceKind::B => (ln_abs_binom_minus_half(len), |_| 1.0),
        RecurrenceKind::C => (ln_abs_binom_half(len), sign_binom_half),
    };
    let mu = &spectrum.mu;
    let mut prev = vec![0.0; len];
    for l in 1..mu.len() {
        let ln_rho = ((mu[l] + 1.0) / (mu[l - 1] + 1.0)).ln();
        let cur: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    return 0.0;
                }
                let sk = sign(k);
                (1..=k)
                    .map(|j| {
                        let s = sign(j) * sign(k - j) * sk;
                        s * (ln_b[j] + ln_b[k - j] - ln_b[k] + j as f64 * ln_rho).exp() * (1.0 + prev[j])
                    })
                    .sum()
            })
            .collect();
        prev = cur;
    }
    prev
}

fn min_depth() -> usize {
    1 << (RICHARDSON_LEVELS + 1)
}

/// Recurrence table at exactly `depth` (a multiple of `2^(levels+1)`), without a tolerance check.
pub fn recurrence_at_depth(spectrum: &EFSpectrum, kind: RecurrenceKind, depth: usize) -> Result<RecurrenceTable> {
    spectrum.m.require_wavelet()?;
    if spectrum.m.get() == 2 {
        return Ok(RecurrenceTable {
            kind,
            m: spectrum.m,
            depth: 0,
            values: Vec::new(),
            limit: 0.0,
            certificate: 0.0,
        });
    }
    if depth < min_depth() || depth % min_depth() != 0 {
        return Err(Error::InvalidArgument(format!(
            "recurrence depth must be a positive multiple of {}, got {depth}",
            min_depth()
        )));
    }
    let values = recurrence_values(spectrum, kind, depth);
    let limit = richardson(&values, depth, RICHARDSON_LEVELS);
    let half = richardson(&values, depth / 2, RICHARDSON_LEVELS);
    Ok(RecurrenceTable {
        kind,
        m: spectrum.m,
        depth,
        values,
        limit,
        certificate: (limit - half).abs(),
    })
}

/// Recurrence table deep enough that the extrapolated limit is certified to
/// `LIMIT_RTOL (1 + |limit|)`, starting at `depth` and doubling up to `MAX_DEPTH`.
pub fn recurrence(spectrum: &EFSpectrum, kind: RecurrenceKind, depth: usize) -> Result<RecurrenceTable> {
    let mut d = depth.max(min_depth()).next_power_of_two();
    loop {
        let table = recurrence_at_depth(spectrum, kind, d)?;
        let tol = LIMIT_RTOL * (1.0 + table.limit.abs());
        if table.certificate <= tol {
            return Ok(table);
        }
        if d >= MAX_DEPTH {
            return Err(Error::NonConvergence {
                what: match kind {
                    RecurrenceKind::B => "recurrence B",
                    RecurrenceKind::C => "recurrence C",
                },
                depth: d,
                defect: table.certificate,
                tol,
            });
        }
        d *= 2;
    }
}

pub fn recurrence_b(spectrum: &EFSpectrum, depth: usize) -> Result<RecurrenceTable> {
    recurrence(spectrum, RecurrenceKind::B, depth)
}

pub fn recurrence_c(spectrum: &EFSpectrum, depth: usize) -> Result<RecurrenceTable> {
    recurrence(spectrum, RecurrenceKind::C, depth)
}

/// `A = 2^{-(m-1)} √((2m-1)!) Π (μ_i+1)^{-1/2}`.
pub fn constant_a(spectrum: &EFSpectrum) -> f64 {
    let m = spectrum.m.get() as f64;
    let ln = -(m - 1.0) * std::f64::consts::LN_2 + 0.5 * libm::lgamma(2.0 * m)
        - 0.5 * spectrum.mu.iter().map(|u| (u + 1.0).ln()).sum::<f64>();
    ln.exp()
}

/// Constants of the decay laws for `c` and `b`.
#[derive(Clone, Debug)]
pub struct RecurrenceLimits {
    pub m: SplineOrder,
    pub a: f64,
    pub b_table: RecurrenceTable,
    pub b: f64,
    pub c_table: RecurrenceTable,
    pub c: f64,
    pub k_c: f64,
    pub k_b: f64,
    pub mu_last: f64,
    pub alpha0: f64,
}

impl RecurrenceLimits {
    pub fn from_spectrum(spectrum: &EFSpectrum, depth: usize) -> Result<Self> {
        use crate::error::{Stage, StageExt};
        let b_table = recurrence_b(spectrum, depth).stage(Stage::RecurrenceB)?;
        let c_table = recurrence_c(spectrum, depth).stage(Stage::RecurrenceC)?;
        Ok(Self::assemble(spectrum, b_table, c_table))
    }

    pub(crate) fn assemble(spectrum: &EFSpectrum, b_table: RecurrenceTable, c_table: RecurrenceTable) -> Self {
        let a = constant_a(spectrum);
        let mu = spectrum.mu_last();
        let b = b_table.limit;
        let c = c_table.limit;
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let k_c = a * (1.0 + b) / sqrt_pi * (1.0 + 1.0 / mu).powf(0.25);
        let k_b = (1.0 + c) / (2.0 * a * sqrt_pi) * (1.0 + 1.0 / mu).powf(-0.25);
        RecurrenceLimits {
            m: spectrum.m,
            a,
            b,
            c,
            b_table,
            c_table,
            k_c,
            k_b,
            mu_last: mu,
            alpha0: spectrum.alpha0,
        }
    }

    /// Replace the `B` table with a deeper one, keeping the constants.
    pub fn with_b_depth(&self, spectrum: &EFSpectrum, depth: usize) -> Result<Self> {
        if self.b_table.is_trivial() || depth <= self.b_table.depth {
            return Ok(self.clone());
        }
        let d = depth.next_power_of_two();
        let mut out = self.clone();
        out.b_table = recurrence_at_depth(spectrum, RecurrenceKind::B, d)?;
        // keep the certified limit from the original table
        out.b_table.limit = self.b_table.limit;
        out.b_table.certificate = self.b_table.certificate;
        Ok(out)
    }
}

/// Spectrum and recurrence constants at the default depth.
pub fn amplitude_constants(m: SplineOrder) -> Result<RecurrenceLimits> {
    use crate::error::{Stage, StageExt};
    let spectrum = EFSpectrum::compute(m).stage(Stage::Spectrum)?;
    RecurrenceLimits::from_spectrum(&spectrum, DEFAULT_DEPTH)
}
