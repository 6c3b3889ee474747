//! Deep-tail evaluation of `c_j` from the binomial product expansion.

use serde::{Deserialize, Serialize};

use super::binomial::ln_abs_binom;
use super::recurrence::RecurrenceLimits;
use crate::error::{Error, Result};
use crate::numeric::Neumaier;

/// Relative size of the neglected geometric tail.
pub const SERIES_RTOL: f64 = 1e-18;
const TRIVIAL_MAX_TERMS: usize = 1 << 22;
const RESCALE: f64 = 1e200;

/// `c_j = sign · exp(log_magnitude)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub sign: f64,
    pub log_magnitude: f64,
}

impl SeriesValue {
    pub fn value(&self) -> f64 {
        self.sign * self.log_magnitude.exp()
    }
}

/// `c_j = (-1)^j A Σ_{k≥j} |binom(-1/2,k)| binom(2k,k-j) (4(μ_{m-1}+1))^{-k} (1+B_k)`.
///
/// Every term is positive, so the sum is accumulated as ratios to the first term and
/// the logarithm is taken at the end. Summation stops once the geometric bound on
/// the remainder falls below `SERIES_RTOL` of the partial sum.
pub fn c_series(limits: &RecurrenceLimits, j: u64) -> Result<SeriesValue> {
    let mu = limits.mu_last;
    let table = &limits.b_table;
    let q_inf = 1.0 / (mu + 1.0);
    let ln_scale = (4.0 * (mu + 1.0)).ln();
    let jf = j as f64;

    let ju = j as usize;
    let first_b = table.one_plus(ju)?;
    let ln_first = ln_abs_binom(-0.5, j).1 - jf * ln_scale + first_b.ln();

    let max_k = if table.is_trivial() {
        ju + TRIVIAL_MAX_TERMS
    } else {
        table.depth
    };
    let mut sum = Neumaier::default();
    let mut ln_offset = 0.0;
    let mut term = 1.0;
    let mut prev_b = first_b;
    sum.add(term);
    let mut k = ju;
    loop {
        if k >= max_k {
            return Err(Error::InsufficientDepth {
                have: table.depth,
                need: 2 * k.max(1),
            });
        }
        let kf = k as f64;
        let next_b = table.one_plus(k + 1)?;
        let ratio = (kf + 0.5) / (kf + 1.0) * (2.0 * kf + 2.0) * (2.0 * kf + 1.0)
            / ((kf + 1.0 - jf) * (kf + 1.0 + jf))
            / (4.0 * (mu + 1.0))
            * (next_b / prev_b);
        term *= ratio;
        sum.add(term);
        prev_b = next_b;
        k += 1;
        if sum.value() > RESCALE {
            sum = {
                let mut s = Neumaier::default();
                s.add(sum.value() / RESCALE);
                s
            };
            term /= RESCALE;
            ln_offset += RESCALE.ln();
        }
        if ratio < 1.0 {
            let q = ratio.max(q_inf) * 1.001;
            if q < 1.0 && term * q / (1.0 - q) < SERIES_RTOL * sum.value() {
                break;
            }
        }
    }
    let log_magnitude = limits.a.ln() + ln_first + ln_offset + sum.value().ln();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(SeriesValue { sign, log_magnitude })
}

/// Number of `B_k` entries `c_series` reads for index `j`, without evaluating it.
pub fn series_depth_needed(mu_last: f64, j: u64) -> usize {
    // the terms peak near k = j / √μ and then decay like (μ+1)^{-k}
    let peak = j as f64 / mu_last.sqrt();
    let tail = SERIES_RTOL.ln() / (-(1.0 + mu_last).ln()) * 1.2;
    (peak + tail + 64.0) as usize
}
