//! The sequences `c_j`, `b_j`, `a_j`, `γ_j` and the constants behind their decay.
//!
//! `c` and `b` are the Fourier coefficients of `P_m^{-1/2}` and `P_m^{1/2}`, so
//! `φ_m = Σ c_j N_m(· - j)` and `N_m = Σ b_j φ_m(· - j)`. The refinement mask `a`
//! and the wavelet coefficients `γ` are discrete convolutions of those two.

pub mod binomial;
pub mod quadrature;
pub mod recurrence;
pub mod series;
pub mod table;

use std::cell::RefCell;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::bspline::SplineOrder;
use crate::error::{Error, Result};
use crate::numeric::Neumaier;

pub use binomial::{binom, ln_abs_binom, ratio_r, ratio_s};
pub use quadrature::{
    b_quadrature, c_quadrature, pm_cosine_sum, pm_eval, PmSymbol, QuadratureGrid, QuadratureValue, Symbol,
    DEFAULT_NODES, ROUNDOFF_FLOOR,
};
pub use recurrence::{
    amplitude_constants, constant_a, recurrence_at_depth, recurrence_b, recurrence_c, richardson, RecurrenceKind,
    RecurrenceLimits, RecurrenceTable, DEFAULT_DEPTH,
};
pub use series::{c_series, series_depth_needed, SeriesValue};
pub use table::{CoefficientKind, CoefficientTable, TableMethod};

/// Factor applied to the asymptotic constants when they are used as bounds.
pub const ENVELOPE_SAFETY: f64 = 2.0;
/// Absolute error allowance for a single trapezoid coefficient.
pub const QUADRATURE_NOISE: f64 = 2e-16;
/// Consecutive indices that must sit under the tolerance before a window is accepted.
const WINDOW_CONFIRM: i64 = 8;
const WINDOW_SEARCH_LIMIT: i64 = 5000;

/// `|x_j| <= constant e^{-rate |j|} / |j|^power` for `|j| >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailLaw {
    pub constant: f64,
    pub rate: f64,
    pub power: f64,
}

impl TailLaw {
    pub fn c(limits: &RecurrenceLimits) -> Self {
        TailLaw {
            constant: ENVELOPE_SAFETY * limits.k_c,
            rate: limits.alpha0,
            power: 0.5,
        }
    }

    pub fn b(limits: &RecurrenceLimits) -> Self {
        TailLaw {
            constant: ENVELOPE_SAFETY * limits.k_b,
            rate: limits.alpha0,
            power: 1.5,
        }
    }

    pub fn at(&self, j: i64) -> f64 {
        let s = j.unsigned_abs().max(1) as f64;
        self.constant * (-self.rate * s).exp() / s.powf(self.power)
    }

    /// Smallest `J >= 1` with `at(J + 1) <= eps`; the law decreases for `|j| >= 1`.
    pub fn window_for(&self, eps: f64) -> i64 {
        let mut j = 1;
        while self.at(j + 1) > eps && j < WINDOW_SEARCH_LIMIT {
            j += 1;
        }
        j
    }
}

/// Bound on `|x_j|` for every integer `j`: table values inside the window, the law outside.
#[derive(Clone, Copy, Debug)]
pub struct Envelope<'a> {
    pub table: &'a CoefficientTable,
    pub noise: f64,
    pub law: TailLaw,
}

impl Envelope<'_> {
    pub fn at(&self, j: i64) -> f64 {
        if self.table.contains(j) {
            self.table.get_or_zero(j).abs() + self.noise
        } else {
            self.law.at(j)
        }
    }
}

/// `c` table by trapezoid quadrature on `-window..=window`.
pub fn c_table_quadrature(limits: &RecurrenceLimits, window: i64, nodes: usize) -> CoefficientTable {
    quadrature_table(limits, window, nodes, Symbol::InverseSqrt)
}

/// `b` table by trapezoid quadrature on `-window..=window`.
pub fn b_table_quadrature(limits: &RecurrenceLimits, window: i64, nodes: usize) -> CoefficientTable {
    quadrature_table(limits, window, nodes, Symbol::Sqrt)
}

fn quadrature_table(limits: &RecurrenceLimits, window: i64, nodes: usize, symbol: Symbol) -> CoefficientTable {
    let (kind, law) = match symbol {
        Symbol::InverseSqrt => (CoefficientKind::C, TailLaw::c(limits)),
        Symbol::Sqrt => (CoefficientKind::B, TailLaw::b(limits)),
    };
    let grid = QuadratureGrid::new(limits.m, nodes, window as usize);
    let half: Vec<f64> = (0..=window)
        .into_par_iter()
        .map(|j| grid.coefficient(symbol, j).value)
        .collect();
    let values = mirror(&half);
    CoefficientTable::new(
        kind,
        limits.m,
        window,
        values,
        law.at(window + 1),
        TableMethod::Quadrature,
    )
    .expect("quadrature values are finite")
}

/// `c` table from the binomial series; `limits.b_table` must be deep enough.
pub fn c_table_series(limits: &RecurrenceLimits, window: i64) -> Result<CoefficientTable> {
    let half: Vec<f64> = (0..=window)
        .into_par_iter()
        .map(|j| c_series(limits, j as u64).map(|s| s.value()))
        .collect::<Result<_>>()?;
    let law = TailLaw::c(limits);
    CoefficientTable::new(
        CoefficientKind::C,
        limits.m,
        window,
        mirror(&half),
        law.at(window + 1),
        TableMethod::Series,
    )
}

fn mirror(half: &[f64]) -> Vec<f64> {
    half.iter().rev().chain(half.iter().skip(1)).copied().collect()
}

/// `2^{1-m} binom(m, i)` for `i = 0..=m`: `N_m(x) = Σ_i w_i N_m(2x - i)`.
pub fn spline_mask(m: SplineOrder) -> Vec<f64> {
    let mm = m.as_usize();
    let scale = 2f64.powi(1 - m.get() as i32);
    let mut w = vec![1.0; mm + 1];
    for i in 1..=mm {
        w[i] = w[i - 1] * (mm + 1 - i) as f64 / i as f64;
    }
    w.iter().map(|v| v * scale).collect()
}

fn check_tail(tables: &[&CoefficientTable], tail_eps: f64) -> Result<()> {
    let floor = tables.iter().map(|t| t.tail_bound).fold(0.0, f64::max);
    if floor > tail_eps {
        return Err(Error::ToleranceFloor {
            requested: tail_eps,
            floor,
        });
    }
    Ok(())
}

fn a_value(c: &CoefficientTable, b: &CoefficientTable, mask: &[f64], j: i64) -> f64 {
    let mut acc = Neumaier::default();
    for (i, w) in mask.iter().enumerate() {
        for (p, cp) in c.iter() {
            let q = j - i as i64 - 2 * p;
            if b.contains(q) {
                acc.add(w * cp * b.get_or_zero(q));
            }
        }
    }
    acc.value()
}

/// `a_j = 2^{1-m} Σ_{i=0}^{m} binom(m,i) Σ_p c_p b_{j-i-2p}` over the table windows.
pub fn a_coeff(c: &CoefficientTable, b: &CoefficientTable, j: i64, tail_eps: f64) -> Result<f64> {
    check_tail(&[c, b], tail_eps)?;
    Ok(a_value(c, b, &spline_mask(c.m), j))
}

fn gamma_value(a: &CoefficientTable, c: &CoefficientTable, j: i64) -> f64 {
    let mut acc = Neumaier::default();
    for (k, ck) in c.iter() {
        let n = k - j + 1;
        if a.contains(n) {
            let s = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            acc.add(s * a.get_or_zero(n) * ck);
        }
    }
    let s = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    s * acc.value()
}

/// `γ_j = (-1)^j Σ_k (-1)^k a_{k-j+1} c_k` over the table windows.
pub fn gamma_coeff(a: &CoefficientTable, c: &CoefficientTable, j: i64, tail_eps: f64) -> Result<f64> {
    check_tail(&[a, c], tail_eps)?;
    Ok(gamma_value(a, c, j))
}

/// Bounds for the composed sequences, memoized over indices.
struct ComposedEnvelope<'a> {
    c: Envelope<'a>,
    b: Envelope<'a>,
    mask: Vec<f64>,
    reach: i64,
    a_cache: RefCell<HashMap<i64, f64>>,
    a_table: Option<(CoefficientTable, f64)>,
}

impl<'a> ComposedEnvelope<'a> {
    fn new(c: Envelope<'a>, b: Envelope<'a>) -> Self {
        let rate = c.law.rate.min(b.law.rate);
        let reach = c.table.window.max(b.table.window) + (45.0 / rate).ceil() as i64;
        ComposedEnvelope {
            mask: spline_mask(c.table.m),
            c,
            b,
            reach,
            a_cache: RefCell::new(HashMap::new()),
            a_table: None,
        }
    }

    /// Bound on `|a_j|` from the envelopes of `c` and `b` alone, plus the part of
    /// that bound coming from index pairs outside the two tables.
    fn a_split(&self, j: i64) -> (f64, f64) {
        let span = j.abs() + self.reach;
        let mut total = 0.0;
        let mut outside = 0.0;
        for (i, w) in self.mask.iter().enumerate() {
            for p in -span..=span {
                let q = j - i as i64 - 2 * p;
                let t = w * self.c.at(p) * self.b.at(q);
                total += t;
                if !(self.c.table.contains(p) && self.b.table.contains(q)) {
                    outside += t;
                }
            }
        }
        (total, outside)
    }

    fn a_sum(&self, j: i64) -> f64 {
        if let Some(v) = self.a_cache.borrow().get(&j) {
            return *v;
        }
        let v = self.a_split(j).0;
        self.a_cache.borrow_mut().insert(j, v);
        v
    }

    /// Bound on `|a_j|`, using table values (plus their error) where available.
    fn a_at(&self, j: i64) -> f64 {
        match &self.a_table {
            Some((t, noise)) if t.contains(j) => t.get_or_zero(j).abs() + noise,
            _ => self.a_sum(j),
        }
    }

    fn gamma_at(&self, j: i64) -> f64 {
        let span = j.abs() + self.reach;
        (-span..=span).map(|k| self.c.at(k) * self.a_at(k - j + 1)).sum()
    }
}

/// Smallest window `J` such that `bound(j) <= eps` for `J < |j| <= J + WINDOW_CONFIRM`.
fn composed_window(eps: f64, min: i64, bound: impl Fn(i64) -> f64) -> Result<(i64, f64)> {
    let mut last_above = min;
    let mut smallest = f64::INFINITY;
    let mut j = 0;
    while j <= last_above + WINDOW_CONFIRM {
        let e = bound(j).max(bound(-j));
        smallest = smallest.min(e);
        if e > eps {
            last_above = last_above.max(j);
        }
        j += 1;
        if j > WINDOW_SEARCH_LIMIT {
            return Err(Error::ToleranceFloor {
                requested: eps,
                floor: smallest,
            });
        }
    }
    let tail = (last_above + 1..=last_above + WINDOW_CONFIRM)
        .map(|j| bound(j).max(bound(-j)))
        .fold(0.0, f64::max);
    Ok((last_above, tail))
}

/// The `a` and `γ` tables composed from `c` and `b`, with windows chosen so that the
/// envelope bound outside each window is at most `eps`.
pub fn compose_tables(c: Envelope<'_>, b: Envelope<'_>, eps: f64) -> Result<(CoefficientTable, CoefficientTable)> {
    let m = c.table.m;
    let mask = spline_mask(m);
    let mut env = ComposedEnvelope::new(c, b);

    let (a_window, a_tail) = composed_window(eps, m.as_i64(), |j| env.a_sum(j))?;
    let a_values: Vec<f64> = (-a_window..=a_window)
        .into_par_iter()
        .map(|j| a_value(c.table, b.table, &mask, j))
        .collect();
    let a_noise = (-a_window..=a_window).map(|j| env.a_split(j).1).fold(0.0, f64::max) + 4.0 * f64::EPSILON;
    let a_table = CoefficientTable::new(CoefficientKind::A, m, a_window, a_values, a_tail, TableMethod::Composed)?;

    env.a_table = Some((a_table.clone(), a_noise));
    let (g_window, g_tail) = composed_window(eps, m.as_i64(), |j| env.gamma_at(j))?;
    let g_values: Vec<f64> = (-g_window..=g_window)
        .into_par_iter()
        .map(|j| gamma_value(&a_table, c.table, j))
        .collect();
    let g_table = CoefficientTable::new(
        CoefficientKind::Gamma,
        m,
        g_window,
        g_values,
        g_tail,
        TableMethod::Composed,
    )?;
    Ok((a_table, g_table))
}
