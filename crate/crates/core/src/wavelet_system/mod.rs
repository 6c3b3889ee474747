//! Assembled scaling function `φ_m`, wavelet `ψ_m`, their decay profile and checks.

mod profile;
mod verify;

pub use profile::{
    asymptotic_profile, asymptotic_profile_with, class_constants_at, AsymptoticProfile, ClassKey, DEntry, EEntry,
    KTerm, Parity, ProfileOptions, RIndex, SignClass,
};
pub use verify::{verify, verify_with, CheckResult, VerificationReport, VerifyConfig};

use serde::{Deserialize, Serialize};

use crate::bspline::{autocorrelation_row, eval_bspline, moment, rational_to_f64, SplineOrder};
use crate::coefficients::{
    b_table_quadrature, c_series, c_table_quadrature, c_table_series, compose_tables, series_depth_needed, spline_mask,
    CoefficientKind, CoefficientTable, Envelope, RecurrenceLimits, SeriesValue, TailLaw, DEFAULT_DEPTH, DEFAULT_NODES,
    QUADRATURE_NOISE,
};
use crate::error::{Error, Result, Stage, StageExt};
use crate::euler_frobenius::EFSpectrum;
use crate::numeric::Neumaier;

/// Smallest tail tolerance that trapezoid quadrature can certify in double precision.
pub const QUADRATURE_EPS_FLOOR: f64 = 1e-12;
/// Tolerance used for the `b`, `a` and `γ` windows when a smaller one is requested in series mode.
pub const COMPOSED_EPS_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    /// `c` by trapezoid quadrature.
    Quadrature,
    /// `c` by the binomial series, which reaches below the double-precision floor.
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub eps: f64,
    pub nodes: usize,
    pub depth: usize,
    pub mode: CoefficientMode,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            eps: 1e-12,
            nodes: DEFAULT_NODES,
            depth: DEFAULT_DEPTH,
            mode: CoefficientMode::Quadrature,
        }
    }
}

impl BuildOptions {
    pub fn with_eps(eps: f64) -> Self {
        BuildOptions {
            eps,
            ..Default::default()
        }
    }

    /// Tolerance used for the `b`, `a`, `γ` windows.
    pub fn composed_eps(&self) -> f64 {
        self.eps.max(COMPOSED_EPS_FLOOR)
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.nodes < 16 {
            return Err(Error::InvalidArgument(format!(
                "need at least 16 quadrature nodes, got {}",
                self.nodes
            )));
        }
        if self.mode == CoefficientMode::Quadrature && self.eps < QUADRATURE_EPS_FLOOR {
            return Err(Error::ToleranceFloor {
                requested: self.eps,
                floor: QUADRATURE_EPS_FLOOR,
            });
        }
        Ok(())
    }
}

/// Scaling function and wavelet of order `m` through their coefficient tables.
#[derive(Clone, Debug)]
pub struct WaveletSystem {
    pub m: SplineOrder,
    pub options: BuildOptions,
    pub spectrum: EFSpectrum,
    pub limits: RecurrenceLimits,
    pub c_table: CoefficientTable,
    pub b_table: CoefficientTable,
    pub a_table: CoefficientTable,
    pub gamma_table: CoefficientTable,
    /// `N_{2m}(m + d)` for `d = -(m-1)..=m-1`.
    autocorrelation: Vec<f64>,
    /// `φ(x) = Σ_n phi_fine_n N_m(2x - n)`.
    phi_fine: CoefficientTable,
}

/// Build with default options and tail tolerance `eps`.
pub fn build_system(m: SplineOrder, eps: f64) -> Result<WaveletSystem> {
    build_system_with(m, &BuildOptions::with_eps(eps))
}

/// Spectrum and recurrence constants, the first two build stages.
pub fn build_constants(m: SplineOrder, depth: usize) -> Result<(EFSpectrum, RecurrenceLimits)> {
    m.require_wavelet()?;
    let spectrum = EFSpectrum::compute(m).stage(Stage::Spectrum)?;
    let limits = RecurrenceLimits::from_spectrum(&spectrum, depth)?;
    Ok((spectrum, limits))
}

/// `c_j` by the series for every `j` in `js`, deepening the `B` table until it suffices.
/// Returns the deepened constants with the values.
pub(crate) fn series_values(
    spectrum: &EFSpectrum,
    limits: &RecurrenceLimits,
    js: impl Iterator<Item = u64> + Clone,
) -> Result<(RecurrenceLimits, Vec<SeriesValue>)> {
    let top = js.clone().max().unwrap_or(0);
    let mut deep = limits.with_b_depth(spectrum, series_depth_needed(limits.mu_last, top))?;
    loop {
        match js.clone().map(|j| c_series(&deep, j)).collect::<Result<Vec<_>>>() {
            Err(Error::InsufficientDepth { need, .. }) if need <= 1 << 20 => {
                deep = deep.with_b_depth(spectrum, need)?;
            }
            other => return other.map(|v| (deep, v)),
        }
    }
}

/// `c` table for the requested mode.
fn build_c_table(spectrum: &EFSpectrum, limits: &RecurrenceLimits, opts: &BuildOptions) -> Result<CoefficientTable> {
    let window = TailLaw::c(limits).window_for(opts.eps);
    match opts.mode {
        CoefficientMode::Quadrature => Ok(c_table_quadrature(limits, window, opts.nodes)),
        CoefficientMode::Series => {
            // the depth needed grows with j, so the outermost index settles it
            let (deep, _) = series_values(spectrum, limits, std::iter::once(window as u64))?;
            c_table_series(&deep, window)
        }
    }
}

pub fn build_system_with(m: SplineOrder, opts: &BuildOptions) -> Result<WaveletSystem> {
    m.require_wavelet()?;
    opts.validate()?;
    let (spectrum, limits) = build_constants(m, opts.depth)?;
    let c_table = build_c_table(&spectrum, &limits, opts).stage(Stage::CTable)?;
    let eps_b = opts.composed_eps();
    let b_window = TailLaw::b(&limits).window_for(eps_b);
    let b_table = b_table_quadrature(&limits, b_window, opts.nodes);
    let (a_table, gamma_table) = compose_tables(
        Envelope {
            table: &c_table,
            noise: QUADRATURE_NOISE,
            law: TailLaw::c(&limits),
        },
        Envelope {
            table: &b_table,
            noise: QUADRATURE_NOISE,
            law: TailLaw::b(&limits),
        },
        eps_b,
    )
    .stage(Stage::ATable)?;
    WaveletSystem::from_parts(*opts, spectrum, limits, [c_table, b_table, a_table, gamma_table])
}

impl WaveletSystem {
    /// Assemble from precomputed tables (ordered `c, b, a, γ`), checking that they belong together.
    pub fn from_parts(
        options: BuildOptions,
        spectrum: EFSpectrum,
        limits: RecurrenceLimits,
        tables: [CoefficientTable; 4],
    ) -> Result<Self> {
        let m = spectrum.m;
        let [c_table, b_table, a_table, gamma_table] = tables;
        let expected = [
            (&c_table, CoefficientKind::C, options.eps),
            (&b_table, CoefficientKind::B, options.composed_eps()),
            (&a_table, CoefficientKind::A, options.composed_eps()),
            (&gamma_table, CoefficientKind::Gamma, options.composed_eps()),
        ];
        for (t, kind, eps) in expected {
            if t.kind != kind || t.m != m || limits.m != m {
                return Err(Error::Shape(format!(
                    "table of kind {} for m = {} cannot serve as the {kind} table of m = {m}",
                    t.kind, t.m
                )));
            }
            if t.tail_bound > eps {
                return Err(Error::ToleranceFloor {
                    requested: eps,
                    floor: t.tail_bound,
                });
            }
        }
        let autocorrelation = autocorrelation_row(m).iter().map(rational_to_f64).collect();
        let phi_fine = fine_expansion(&c_table, m)?;
        Ok(WaveletSystem {
            m,
            options,
            spectrum,
            limits,
            c_table,
            b_table,
            a_table,
            gamma_table,
            autocorrelation,
            phi_fine,
        })
    }

    pub fn eps(&self) -> f64 {
        self.options.eps
    }

    pub fn alpha0(&self) -> f64 {
        self.spectrum.alpha0
    }

    pub fn table(&self, kind: CoefficientKind) -> &CoefficientTable {
        match kind {
            CoefficientKind::C => &self.c_table,
            CoefficientKind::B => &self.b_table,
            CoefficientKind::A => &self.a_table,
            CoefficientKind::Gamma => &self.gamma_table,
        }
    }

    /// Largest `|x|` at which `phi_eval` is certified.
    pub fn phi_limit(&self) -> f64 {
        (self.c_table.window - self.m.as_i64()) as f64
    }

    /// Largest `|x|` at which `psi_eval` is certified.
    pub fn psi_limit(&self) -> f64 {
        (self.gamma_table.window - self.m.as_i64()) as f64 / 2.0
    }

    fn spline_sum(&self, table: &CoefficientTable, x: f64) -> f64 {
        // N_m(x - j) vanishes unless x - m < j <= x
        let top = x.floor() as i64;
        let mut acc = Neumaier::default();
        for j in (top - self.m.as_i64() + 1)..=top {
            let v = table.get_or_zero(j);
            if v != 0.0 {
                acc.add(v * eval_bspline(self.m, x - j as f64));
            }
        }
        acc.value()
    }

    /// `Σ_j c_j N_m(x - j)` with `c` taken as zero outside its window.
    pub fn phi_raw(&self, x: f64) -> f64 {
        self.spline_sum(&self.c_table, x)
    }

    /// `Σ_j γ_j N_m(2x - j)` with `γ` taken as zero outside its window.
    pub fn psi_raw(&self, x: f64) -> f64 {
        self.spline_sum(&self.gamma_table, 2.0 * x)
    }

    pub fn phi_eval(&self, x: f64) -> Result<f64> {
        let limit = self.phi_limit();
        if x.is_nan() || x.abs() > limit {
            return Err(Error::OutOfRange { x, limit });
        }
        Ok(self.phi_raw(x))
    }

    pub fn psi_eval(&self, x: f64) -> Result<f64> {
        let limit = self.psi_limit();
        if x.is_nan() || x.abs() > limit {
            return Err(Error::OutOfRange { x, limit });
        }
        Ok(self.psi_raw(x))
    }

    /// `Σ_j a_j φ(2x - j)`, the right side of the refinement relation.
    pub fn phi_refined(&self, x: f64) -> f64 {
        let mut acc = Neumaier::default();
        for (j, a) in self.a_table.iter() {
            acc.add(a * self.phi_raw(2.0 * x - j as f64));
        }
        acc.value()
    }

    /// `ψ(x) = Σ_l (-1)^l a_{1-l} φ(2x - l)`, the wavelet straight from the mask.
    pub fn psi_from_mask(&self, x: f64) -> f64 {
        let mut acc = Neumaier::default();
        for (n, a) in self.a_table.iter() {
            let l = 1 - n;
            let s = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            acc.add(s * a * self.phi_raw(2.0 * x - l as f64));
        }
        acc.value()
    }

    /// `Σ_{p,q} u_p v_q N_{2m}(m + p - q - k)`, the exact inner product of two spline series.
    fn cross_gram(&self, u: &CoefficientTable, v: &CoefficientTable, k: i64) -> f64 {
        let mm = self.m.as_i64();
        let mut acc = Neumaier::default();
        for (p, up) in u.iter() {
            for d in -(mm - 1)..=(mm - 1) {
                let q = p - k - d;
                let vq = v.get_or_zero(q);
                if vq != 0.0 {
                    acc.add(up * vq * self.autocorrelation[(d + mm - 1) as usize]);
                }
            }
        }
        acc.value()
    }

    /// `⟨φ, φ(· - k)⟩`.
    pub fn gram_phi(&self, k: i64) -> f64 {
        self.cross_gram(&self.c_table, &self.c_table, k)
    }

    /// `⟨ψ, φ(· - k)⟩`, both sides written over `N_m(2x - n)`.
    pub fn gram_psi_phi(&self, k: i64) -> f64 {
        0.5 * self.cross_gram(&self.gamma_table, &self.phi_fine, 2 * k)
    }

    /// `⟨ψ, ψ(· - k)⟩`.
    pub fn gram_psi(&self, k: i64) -> f64 {
        0.5 * self.cross_gram(&self.gamma_table, &self.gamma_table, 2 * k)
    }

    /// `∫ x^p ψ(x) dx = 2^{-p-1} Σ_j γ_j Σ_q binom(p,q) j^{p-q} ∫ x^q N_m`.
    pub fn psi_moment(&self, p: u32) -> f64 {
        let spline: Vec<f64> = (0..=p).map(|q| rational_to_f64(&moment(self.m, q))).collect();
        let mut binom = vec![1.0; p as usize + 1];
        for q in 1..=p as usize {
            binom[q] = binom[q - 1] * (p as usize + 1 - q) as f64 / q as f64;
        }
        let mut acc = Neumaier::default();
        for (j, g) in self.gamma_table.iter() {
            let jf = j as f64;
            for q in 0..=p as usize {
                acc.add(g * binom[q] * jf.powi((p as usize - q) as i32) * spline[q]);
            }
        }
        acc.value() / 2f64.powi(p as i32 + 1)
    }

    /// `Σ_k c_k b_{n-k}`, which is `δ_{n0}` for exact sequences.
    pub fn convolution_inverse(&self, n: i64) -> f64 {
        let mut acc = Neumaier::default();
        for (k, c) in self.c_table.iter() {
            acc.add(c * self.b_table.get_or_zero(n - k));
        }
        acc.value()
    }
}

/// Coefficients of `Σ_p c_p N_m(x - p)` on the half-integer translates `N_m(2x - n)`.
fn fine_expansion(c: &CoefficientTable, m: SplineOrder) -> Result<CoefficientTable> {
    let mask = spline_mask(m);
    let window = 2 * c.window + m.as_i64();
    let mut values = vec![0.0; (2 * window + 1) as usize];
    for (p, cp) in c.iter() {
        for (i, w) in mask.iter().enumerate() {
            values[(2 * p + i as i64 + window) as usize] += cp * w;
        }
    }
    CoefficientTable::new(c.kind, m, window, values, c.tail_bound, c.method)
}
