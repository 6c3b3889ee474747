//! The verification battery run by `cardwave verify`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::profile::{asymptotic_profile, ClassKey, Parity, RIndex, SignClass};
use super::series_values;
use super::WaveletSystem;
use crate::coefficients::{b_table_quadrature, CoefficientTable};
use crate::error::Result;
use crate::numeric::{linear_fit, ser_f64, Neumaier};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `|measured - target| <= tolerance`.
    Absolute,
    /// `|measured - target| <= tolerance |target|`.
    Relative,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(serialize_with = "ser_f64")]
    pub measured: f64,
    #[serde(serialize_with = "ser_f64")]
    pub target: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl CheckResult {
    pub fn absolute(name: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        let pass = (measured - target).abs() <= tolerance;
        CheckResult {
            name: name.to_string(),
            measured,
            target,
            tolerance,
            comparison: Comparison::Absolute,
            pass,
        }
    }

    pub fn relative(name: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        let pass = (measured - target).abs() <= tolerance * target.abs();
        CheckResult {
            name: name.to_string(),
            measured,
            target,
            tolerance,
            comparison: Comparison::Relative,
            pass,
        }
    }

    /// Deviation in the units of the tolerance.
    pub fn deviation(&self) -> f64 {
        let d = (self.measured - self.target).abs();
        match self.comparison {
            Comparison::Absolute => d,
            Comparison::Relative => d / self.target.abs(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub m: u32,
    #[serde(serialize_with = "ser_f64")]
    pub eps: f64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(m: u32, eps: f64, checks: Vec<CheckResult>) -> Self {
        VerificationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            m,
            eps,
            passed: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verification m={} eps={:e}", self.m, self.eps)?;
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let cmp = match c.comparison {
                Comparison::Absolute => "abs",
                Comparison::Relative => "rel",
            };
            writeln!(
                f,
                "{} {:<width$}  measured {:>24.16e}  target {:>24.16e}  tol {:.1e} {cmp}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.target,
                c.tolerance,
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed {
                "all checks passed"
            } else {
                "some checks failed"
            }
        )
    }
}

/// Windows and tolerances of the battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub gram_shifts: i64,
    pub cross_gram_shifts: i64,
    pub gram_tol: f64,
    pub cross_gram_tol: f64,
    pub grid_half_width: f64,
    pub grid_points: usize,
    pub two_scale_tol: f64,
    pub psi_paths_tol: f64,
    pub conv_shifts: i64,
    pub conv_tol: f64,
    pub sum_tol: f64,
    pub mask_orth_tol: f64,
    pub c_fit: (i64, i64),
    pub c_slope_tol: f64,
    pub c_plateau_tol: f64,
    pub b_fit: (i64, i64),
    pub b_slope_tol: f64,
    pub b_plateau_tol: f64,
    /// Largest relative slope change allowed when the fit window is halved from either end.
    pub slope_stability_tol: f64,
    pub profile_range: (i64, i64),
    pub ratio_tol: f64,
    pub d_plateau_tol: f64,
    pub e_plateau_tol: f64,
    pub moment0_tol: f64,
    pub moment_tol: f64,
}

impl VerifyConfig {
    /// Defaults for order `m`. The plateau windows move outwards and the plateau
    /// tolerances widen as `m` grows, since `α₀` shrinks and the `O(1/r)` terms last longer.
    pub fn for_order(m: u32) -> Self {
        let base = VerifyConfig {
            gram_shifts: 8,
            cross_gram_shifts: 6,
            gram_tol: 1e-8,
            cross_gram_tol: 1e-7,
            grid_half_width: 8.0,
            grid_points: 1000,
            two_scale_tol: 1e-6,
            psi_paths_tol: 1e-7,
            conv_shifts: 10,
            conv_tol: 1e-8,
            sum_tol: 1e-8,
            mask_orth_tol: 1e-7,
            c_fit: (20, 60),
            c_slope_tol: 0.005,
            c_plateau_tol: 0.01,
            b_fit: (8, 18),
            b_slope_tol: 0.03,
            b_plateau_tol: 0.05,
            slope_stability_tol: 0.001,
            profile_range: (14, 20),
            ratio_tol: 0.02,
            d_plateau_tol: 0.03,
            e_plateau_tol: 0.05,
            moment0_tol: 1e-8,
            moment_tol: 1e-6,
        };
        match m {
            0..=2 => base,
            3 | 4 => VerifyConfig {
                b_fit: (10, 24),
                profile_range: (20, 30),
                ..base
            },
            _ => VerifyConfig {
                b_fit: (10, 24),
                profile_range: (2 * m as i64 + 20, 2 * m as i64 + 36),
                d_plateau_tol: 0.05,
                e_plateau_tol: 0.08,
                ..base
            },
        }
    }
}

pub fn verify(sys: &WaveletSystem) -> VerificationReport {
    verify_with(sys, &VerifyConfig::for_order(sys.m.get()))
}

fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn delta(k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        0.0
    }
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter()
        .fold(0.0, |acc, x| if x.is_nan() { f64::NAN } else { acc.max(x.abs()) })
}

/// Least-squares slope of `y` against `j`.
fn slope(js: &[i64], ys: &[f64]) -> f64 {
    let x: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    linear_fit(&x, ys).0
}

/// Largest relative change of the slope when the window loses its first or last half.
fn slope_stability(js: &[i64], ys: &[f64]) -> f64 {
    let full = slope(js, ys);
    let h = js.len() / 2;
    let front = slope(&js[h..], &ys[h..]);
    let back = slope(&js[..=h], &ys[..=h]);
    ((front - full) / full).abs().max(((back - full) / full).abs())
}

/// Value at `1/r = 0` of the straight line through `(1/r, p)`.
fn extrapolate(rs: &[f64], ps: &[f64]) -> f64 {
    let x: Vec<f64> = rs.iter().map(|r| 1.0 / r).collect();
    linear_fit(&x, ps).1
}

/// Measured plateaus `x_j (-1)^r √r e^{α₀ r}` of one class over `lo..=hi`, keyed by `r`.
fn plateaus(
    table: &CoefficientTable,
    class: ClassKey,
    map: RIndex,
    m: i64,
    alpha0: f64,
    lo: i64,
    hi: i64,
) -> (Vec<f64>, Vec<f64>) {
    let (mut rs, mut ps) = (Vec::new(), Vec::new());
    for mag in lo..=hi {
        let j = match class.sign {
            SignClass::Positive => mag,
            SignClass::Negative => -mag,
        };
        if ClassKey::of(j) != class || !table.contains(j) {
            continue;
        }
        let r = map.r(m, j);
        if r < 1 {
            continue;
        }
        let rf = r as f64;
        rs.push(rf);
        ps.push(table.get_or_zero(j) * sign_pow(r) * rf.sqrt() * (alpha0 * rf).exp());
    }
    (rs, ps)
}

/// Worst relative deviation of `x_{j+2}/x_j √((r+1)/r)` from `-e^{-α₀}` over both signs of `j`.
/// Each deviation is weighted by the size of its class constant against the largest one, so a
/// class with a small constant, whose `O(1/r)` terms dominate longer, does not swamp the test.
fn ratio_defect(
    table: &CoefficientTable,
    map: RIndex,
    m: i64,
    alpha0: f64,
    lo: i64,
    hi: i64,
    constants: &[(ClassKey, f64)],
) -> f64 {
    let target = -(-alpha0).exp();
    let scale = constants.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for mag in lo..=hi {
        for (j, step) in [(mag, 2), (-mag, -2)] {
            let class = ClassKey::of(j);
            let weight = constants
                .iter()
                .find(|(k, _)| *k == class)
                .map_or(0.0, |(_, v)| v.abs() / scale);
            if weight <= 1e-6 {
                continue;
            }
            let (x0, x1) = (table.get_or_zero(j), table.get_or_zero(j + step));
            let (r0, r1) = (map.r(m, j) as f64, map.r(m, j + step) as f64);
            if x0 == 0.0 || r0 < 1.0 {
                continue;
            }
            let ratio = x1 / x0 * (r1 / r0).sqrt();
            worst = worst.max(weight * ((ratio - target) / target).abs());
        }
    }
    worst
}

pub fn verify_with(sys: &WaveletSystem, cfg: &VerifyConfig) -> VerificationReport {
    let m = sys.m.as_i64();
    let alpha0 = sys.alpha0();
    let mut checks = Vec::new();

    // orthonormality
    let g = max_abs((-cfg.gram_shifts..=cfg.gram_shifts).map(|k| sys.gram_phi(k) - delta(k)));
    checks.push(CheckResult::absolute("gram_phi", g, 0.0, cfg.gram_tol));
    let g = max_abs((-cfg.cross_gram_shifts..=cfg.cross_gram_shifts).map(|k| sys.gram_psi_phi(k)));
    checks.push(CheckResult::absolute("gram_psi_phi", g, 0.0, cfg.cross_gram_tol));
    let g = max_abs((-cfg.cross_gram_shifts..=cfg.cross_gram_shifts).map(|k| sys.gram_psi(k) - delta(k)));
    checks.push(CheckResult::absolute("gram_psi", g, 0.0, cfg.cross_gram_tol));

    // refinement and the two routes to ψ
    let n = cfg.grid_points.max(2);
    let xs: Vec<f64> = (0..n)
        .map(|i| -cfg.grid_half_width + 2.0 * cfg.grid_half_width * i as f64 / (n - 1) as f64)
        .collect();
    let r = max_abs(xs.iter().map(|&x| sys.phi_raw(x) - sys.phi_refined(x)));
    checks.push(CheckResult::absolute("two_scale_residual", r, 0.0, cfg.two_scale_tol));
    let r = max_abs(xs.iter().map(|&x| sys.psi_raw(x) - sys.psi_from_mask(x)));
    checks.push(CheckResult::absolute("psi_paths", r, 0.0, cfg.psi_paths_tol));

    let r = max_abs((-cfg.conv_shifts..=cfg.conv_shifts).map(|k| sys.convolution_inverse(k) - delta(k)));
    checks.push(CheckResult::absolute("convolution_inverse", r, 0.0, cfg.conv_tol));

    // sums over the mask and γ
    let a = &sys.a_table;
    let sum = |f: &dyn Fn(i64, f64) -> f64, t: &CoefficientTable| {
        let mut acc = Neumaier::default();
        for (j, v) in t.iter() {
            acc.add(f(j, v));
        }
        acc.value()
    };
    checks.push(CheckResult::absolute("mask_sum", sum(&|_, v| v, a), 2.0, cfg.sum_tol));
    checks.push(CheckResult::absolute(
        "mask_alternating_sum",
        sum(&|j, v| sign_pow(j) * v, a),
        0.0,
        cfg.sum_tol,
    ));
    let orth = max_abs(
        (-cfg.gram_shifts..=cfg.gram_shifts).map(|k| sum(&|j, v| v * a.get_or_zero(j - 2 * k), a) - 2.0 * delta(k)),
    );
    checks.push(CheckResult::absolute(
        "mask_orthogonality",
        orth,
        0.0,
        cfg.mask_orth_tol,
    ));
    checks.push(CheckResult::absolute(
        "gamma_sum",
        sum(&|_, v| v, &sys.gamma_table),
        0.0,
        cfg.sum_tol,
    ));

    // decay of c along the series path
    c_checks(sys, cfg, &mut checks);

    // decay of b along the quadrature path
    let (lo, hi) = cfg.b_fit;
    let b = b_table_quadrature(&sys.limits, hi.max(1), sys.options.nodes);
    let js: Vec<i64> = (lo..=hi).collect();
    let ys: Vec<f64> = js
        .iter()
        .map(|&j| (b.get_or_zero(j).abs() * (j as f64).powf(1.5)).ln())
        .collect();
    checks.push(CheckResult::relative(
        "b_slope",
        slope(&js, &ys),
        -alpha0,
        cfg.b_slope_tol,
    ));
    checks.push(CheckResult::absolute(
        "b_slope_stability",
        slope_stability(&js, &ys),
        0.0,
        cfg.slope_stability_tol,
    ));
    let wrong = js
        .iter()
        .filter(|&&j| b.get_or_zero(j) * sign_pow(j + 1) <= 0.0)
        .count();
    checks.push(CheckResult::absolute("b_sign_law", wrong as f64, 0.0, 0.0));
    let rs: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let ps: Vec<f64> = js
        .iter()
        .map(|&j| sign_pow(j + 1) * b.get_or_zero(j) * (j as f64).powf(1.5) * (alpha0 * j as f64).exp())
        .collect();
    checks.push(CheckResult::relative(
        "b_plateau",
        extrapolate(&rs, &ps),
        sys.limits.k_b,
        cfg.b_plateau_tol,
    ));

    profile_checks(sys, cfg, &mut checks);

    // moments of ψ
    checks.push(CheckResult::absolute(
        "psi_moment_0",
        sys.psi_moment(0),
        0.0,
        cfg.moment0_tol,
    ));
    for p in 1..m as u32 {
        checks.push(CheckResult::absolute(
            &format!("psi_moment_{p}"),
            sys.psi_moment(p),
            0.0,
            cfg.moment_tol,
        ));
    }

    VerificationReport::new(sys.m.get(), sys.eps(), checks)
}

fn c_checks(sys: &WaveletSystem, cfg: &VerifyConfig, checks: &mut Vec<CheckResult>) {
    let alpha0 = sys.alpha0();
    let (lo, hi) = cfg.c_fit;
    let values = match series_values(&sys.spectrum, &sys.limits, lo as u64..=hi as u64) {
        Ok((_, v)) => v,
        Err(_) => {
            for name in ["c_slope", "c_slope_stability", "c_plateau"] {
                checks.push(CheckResult::absolute(name, f64::NAN, 0.0, 0.0));
            }
            return;
        }
    };
    let js: Vec<i64> = (lo..=hi).collect();
    // log-magnitudes straight from the series, so the fit never sees underflow
    let ys: Vec<f64> = js
        .iter()
        .zip(&values)
        .map(|(&j, v)| v.log_magnitude + 0.5 * (j as f64).ln())
        .collect();
    checks.push(CheckResult::relative(
        "c_slope",
        slope(&js, &ys),
        -alpha0,
        cfg.c_slope_tol,
    ));
    checks.push(CheckResult::absolute(
        "c_slope_stability",
        slope_stability(&js, &ys),
        0.0,
        cfg.slope_stability_tol,
    ));
    let k_c = sys.limits.k_c;
    let worst = js
        .iter()
        .zip(&values)
        .map(|(&j, v)| {
            let p = sign_pow(j) * v.sign * (v.log_magnitude + 0.5 * (j as f64).ln() + alpha0 * j as f64).exp();
            (p - k_c) / k_c
        })
        .fold(0.0f64, |acc, d| if d.abs() > acc.abs() { d } else { acc });
    checks.push(CheckResult::relative(
        "c_plateau",
        k_c * (1.0 + worst),
        k_c,
        cfg.c_plateau_tol,
    ));
}

/// Classes whose constant is negligible next to the largest one; their leading term vanishes.
fn vanishing(constants: &[(ClassKey, f64)]) -> Vec<ClassKey> {
    let scale = constants.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    constants
        .iter()
        .filter(|(_, v)| v.abs() <= 1e-6 * scale)
        .map(|(k, _)| *k)
        .collect()
}

fn class_tag(class: ClassKey) -> String {
    format!(
        "{}_{}",
        match class.sign {
            SignClass::Positive => "pos",
            SignClass::Negative => "neg",
        },
        match class.parity {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    )
}

fn profile_checks(sys: &WaveletSystem, cfg: &VerifyConfig, checks: &mut Vec<CheckResult>) {
    let m = sys.m.as_i64();
    let alpha0 = sys.alpha0();
    let (lo, hi) = cfg.profile_range;
    let profile = match asymptotic_profile(sys) {
        Ok(p) => p,
        Err(_) => {
            checks.push(CheckResult::absolute("profile", f64::NAN, 0.0, 0.0));
            return;
        }
    };
    let ds: Vec<(ClassKey, f64)> = ClassKey::ALL.iter().map(|&k| (k, profile.d_of(k).d)).collect();
    let es: Vec<(ClassKey, f64)> = ClassKey::ALL.iter().map(|&k| (k, profile.e_of(k).e)).collect();
    let e_zero = vanishing(&es);
    checks.push(CheckResult::absolute(
        "a_ratio",
        ratio_defect(&sys.a_table, RIndex::Mask, m, alpha0, lo, hi, &ds),
        0.0,
        cfg.ratio_tol,
    ));
    checks.push(CheckResult::absolute(
        "gamma_ratio",
        ratio_defect(&sys.gamma_table, RIndex::Gamma, m, alpha0, lo, hi, &es),
        0.0,
        cfg.ratio_tol,
    ));
    let mut wrong = 0usize;
    for mag in lo..=hi {
        for j in [mag, -mag] {
            let e = profile.e_for(j);
            if e_zero.contains(&ClassKey::of(j)) {
                continue;
            }
            let predicted = sign_pow(RIndex::Gamma.r(m, j)) * e.signum();
            if sys.gamma_table.get_or_zero(j) * predicted <= 0.0 {
                wrong += 1;
            }
        }
    }
    checks.push(CheckResult::absolute("gamma_sign_law", wrong as f64, 0.0, 0.0));

    let d_scale = ds.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let e_scale = es.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    for class in ClassKey::ALL {
        let tag = class_tag(class);
        // deviations are measured against the largest constant of the family, so a class
        // whose constant vanishes is held to the same absolute standard as the others
        let (rs, ps) = plateaus(&sys.a_table, class, RIndex::Mask, m, alpha0, lo, hi);
        let d = profile.d_of(class).d;
        checks.push(CheckResult::absolute(
            &format!("d_plateau_{tag}"),
            (extrapolate(&rs, &ps) - d) / d_scale,
            0.0,
            cfg.d_plateau_tol,
        ));
        let (rs, ps) = plateaus(&sys.gamma_table, class, RIndex::Gamma, m, alpha0, lo, hi);
        let e = profile.e_of(class).e;
        checks.push(CheckResult::absolute(
            &format!("e_plateau_{tag}"),
            (extrapolate(&rs, &ps) - e) / e_scale,
            0.0,
            cfg.e_plateau_tol,
        ));
    }
}
