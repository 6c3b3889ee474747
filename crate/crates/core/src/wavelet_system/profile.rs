//! Decay constants `D` of the mask `a_j` and `E` of the wavelet coefficients `γ_j`.
//!
//! Both sequences decay like `(-1)^r C e^{-α₀ r} / √r`, where `r` is roughly `|j|/2`
//! and the constant `C` depends only on the sign and parity of `j`. Three index
//! maps `j -> r` are in use and are kept apart (see [`RIndex`]).

use serde::{Deserialize, Serialize};

use super::series_values;
use super::WaveletSystem;
use crate::coefficients::{b_table_quadrature, spline_mask, CoefficientTable};
use crate::error::{Error, Result, Stage, StageExt};
use crate::numeric::{ser_f64, Neumaier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignClass {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassKey {
    pub sign: SignClass,
    pub parity: Parity,
}

impl ClassKey {
    pub const ALL: [ClassKey; 4] = [
        ClassKey {
            sign: SignClass::Positive,
            parity: Parity::Even,
        },
        ClassKey {
            sign: SignClass::Positive,
            parity: Parity::Odd,
        },
        ClassKey {
            sign: SignClass::Negative,
            parity: Parity::Even,
        },
        ClassKey {
            sign: SignClass::Negative,
            parity: Parity::Odd,
        },
    ];

    pub fn of(j: i64) -> Self {
        ClassKey {
            sign: if j >= 0 {
                SignClass::Positive
            } else {
                SignClass::Negative
            },
            parity: if j.rem_euclid(2) == 0 {
                Parity::Even
            } else {
                Parity::Odd
            },
        }
    }

    /// A far-out index of this class, standing in for `|j| -> ∞`.
    pub fn representative(self) -> i64 {
        const FAR: i64 = 1 << 40;
        let p = match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        match self.sign {
            SignClass::Positive => FAR + p,
            SignClass::Negative => -(FAR + p),
        }
    }

    fn index(self) -> usize {
        ClassKey::ALL.iter().position(|k| *k == self).expect("listed")
    }
}

impl std::fmt::Display for ClassKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = match self.sign {
            SignClass::Positive => "positive",
            SignClass::Negative => "negative",
        };
        let parity = match self.parity {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        write!(f, "{sign}-{parity}")
    }
}

/// The maps `j -> r` used in the three decay statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RIndex {
    /// `r = floor(|j - m| / 2)`, for the mask `a_j`.
    Mask,
    /// `r = floor((|j| + 1) / 2)`, for `γ_j`.
    Gamma,
    /// `r = floor(|j| / 2)`, for the combined statement about `ψ_m(x)`.
    Bracket,
}

impl RIndex {
    pub fn r(self, m: i64, j: i64) -> i64 {
        match self {
            RIndex::Mask => (j - m).abs() / 2,
            RIndex::Gamma => (j.abs() + 1) / 2,
            RIndex::Bracket => j.abs() / 2,
        }
    }
}

/// One partial constant `K_i = K_c Σ_k (-1)^k e^{-α₀k} b_{2k + offset}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KTerm {
    pub i: usize,
    /// `2^{1-m} binom(m, i)`.
    #[serde(serialize_with = "ser_f64")]
    pub weight: f64,
    /// `i = m + 2 n_i` or `i = m + 1 + 2 n_i`.
    pub n_i: i64,
    /// True when `i ≡ m (mod 2)`.
    pub same_parity_as_m: bool,
    pub offset: i64,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DEntry {
    pub class: ClassKey,
    #[serde(serialize_with = "ser_f64")]
    pub d: f64,
    /// Sum over `i ≡ m`.
    #[serde(serialize_with = "ser_f64")]
    pub d_m: f64,
    /// Sum over `i ≡ m + 1`.
    #[serde(serialize_with = "ser_f64")]
    pub d_m1: f64,
    pub terms: Vec<KTerm>,
    /// Change of `d` when the `b` window is shortened, relative to the absolute sum.
    #[serde(serialize_with = "ser_f64")]
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EEntry {
    pub class: ClassKey,
    /// Constant for `r = floor((|j|+1)/2)`.
    #[serde(serialize_with = "ser_f64")]
    pub e: f64,
    /// The same constant renormalized for `r = floor(|j|/2)`.
    #[serde(serialize_with = "ser_f64")]
    pub e_bracket: f64,
    #[serde(serialize_with = "ser_f64")]
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticProfile {
    pub m: u32,
    #[serde(serialize_with = "ser_f64")]
    pub alpha0: f64,
    #[serde(serialize_with = "ser_f64")]
    pub k_c: f64,
    #[serde(serialize_with = "ser_f64")]
    pub k_b: f64,
    pub d: Vec<DEntry>,
    pub e: Vec<EEntry>,
    /// Window of the `b` table used in the `K_i` sums.
    pub b_window: i64,
    /// Number of `c_k` on each side used in the `E` sums.
    pub c_reach: i64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileOptions {
    /// Relative convergence demanded of the truncated `K_i` and `E` sums.
    pub tolerance: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { tolerance: 1e-6 }
    }
}

fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl AsymptoticProfile {
    pub fn d_of(&self, class: ClassKey) -> &DEntry {
        &self.d[class.index()]
    }

    pub fn e_of(&self, class: ClassKey) -> &EEntry {
        &self.e[class.index()]
    }

    /// `D` for the class of index `j`.
    pub fn d_for(&self, j: i64) -> f64 {
        self.d_of(ClassKey::of(j)).d
    }

    pub fn e_for(&self, j: i64) -> f64 {
        self.e_of(ClassKey::of(j)).e
    }

    pub fn e_bracket_for(&self, j: i64) -> f64 {
        self.e_of(ClassKey::of(j)).e_bracket
    }

    /// Predicted `a_j`.
    pub fn a_model(&self, j: i64) -> f64 {
        let r = RIndex::Mask.r(self.m as i64, j) as f64;
        sign_pow(r as i64) * self.d_for(j) * (-self.alpha0 * r).exp() / r.sqrt()
    }

    /// Predicted `γ_j`.
    pub fn gamma_model(&self, j: i64) -> f64 {
        let r = RIndex::Gamma.r(self.m as i64, j) as f64;
        sign_pow(r as i64) * self.e_for(j) * (-self.alpha0 * r).exp() / r.sqrt()
    }
}

/// `K_c Σ_k (-1)^k e^{-α₀ k} b_{2k + t}` over the `k` with `|2k + t| <= reach`, and its absolute sum.
fn k_sum(b: &CoefficientTable, k_c: f64, alpha0: f64, t: i64, reach: i64) -> (f64, f64) {
    let lo = (-reach - t).div_euclid(2) - 1;
    let hi = (reach - t).div_euclid(2) + 1;
    let mut acc = Neumaier::default();
    let mut abs = 0.0;
    for k in lo..=hi {
        let idx = 2 * k + t;
        if idx.abs() > reach {
            continue;
        }
        let term = sign_pow(k) * (-alpha0 * k as f64).exp() * b.get_or_zero(idx);
        acc.add(term);
        abs += term.abs();
    }
    (k_c * acc.value(), k_c * abs)
}

fn d_entry(sys: &WaveletSystem, b: &CoefficientTable, j: i64) -> DEntry {
    let m = sys.m.as_i64();
    let class = ClassKey::of(j);
    let r = RIndex::Mask.r(m, j);
    let k_c = sys.limits.k_c;
    let alpha0 = sys.alpha0();
    let mask = spline_mask(sys.m);
    let mut terms = Vec::with_capacity(mask.len());
    let (mut d, mut d_m, mut d_m1) = (0.0, 0.0, 0.0);
    let (mut short, mut scale) = (0.0, 0.0);
    for (i, &w) in mask.iter().enumerate() {
        let ii = i as i64;
        let offset = match class.sign {
            SignClass::Positive => 2 * r - j + ii,
            SignClass::Negative => 2 * r + j - ii,
        };
        let (value, abs) = k_sum(b, k_c, alpha0, offset, b.window);
        let (shortened, _) = k_sum(b, k_c, alpha0, offset, b.window - 4);
        let same = (ii - m).rem_euclid(2) == 0;
        d += w * value;
        short += w * shortened;
        scale += w * abs;
        if same {
            d_m += w * value;
        } else {
            d_m1 += w * value;
        }
        terms.push(KTerm {
            i,
            weight: w,
            n_i: (ii - m).div_euclid(2),
            same_parity_as_m: same,
            offset,
            value,
        });
    }
    DEntry {
        class,
        d,
        d_m,
        d_m1,
        terms,
        defect: (d - short).abs() / scale.max(f64::MIN_POSITIVE),
    }
}

/// `E = (-1)^j Σ_k (-1)^k c_k (-1)^δ D_{class(n)} e^{-α₀ δ}` with `n = k - j + 1` and
/// `δ = r_mask(n) - r_gamma(j)`, evaluated at a far representative `j`.
fn e_value(sys: &WaveletSystem, d: &[DEntry], c: &[f64], j: i64, reach: i64) -> (f64, f64) {
    let m = sys.m.as_i64();
    let big_r = RIndex::Gamma.r(m, j);
    let alpha0 = sys.alpha0();
    let mut acc = Neumaier::default();
    let mut abs = 0.0;
    for k in -reach..=reach {
        let n = k - j + 1;
        let delta = RIndex::Mask.r(m, n) - big_r;
        let dn = d[ClassKey::of(n).index()].d;
        let term = sign_pow(k) * c[k.unsigned_abs() as usize] * sign_pow(delta) * dn * (-alpha0 * delta as f64).exp();
        acc.add(term);
        abs += term.abs();
    }
    (sign_pow(j) * acc.value(), abs)
}

/// Profile with default options.
pub fn asymptotic_profile(sys: &WaveletSystem) -> Result<AsymptoticProfile> {
    asymptotic_profile_with(sys, &ProfileOptions::default())
}

pub fn asymptotic_profile_with(sys: &WaveletSystem, opts: &ProfileOptions) -> Result<AsymptoticProfile> {
    build_profile(sys, opts).stage(Stage::Profile)
}

/// Tables shared by every evaluation of the class constants.
struct Inputs {
    b: CoefficientTable,
    c: Vec<f64>,
    reach: i64,
}

fn inputs(sys: &WaveletSystem) -> Result<Inputs> {
    let alpha0 = sys.alpha0();
    // Past |j| ≈ 2 ln(10^8.5)/α₀ the amplification e^{α₀|k|} of quadrature noise in b
    // outweighs the truncation it removes.
    let b_window = (2.0 * 8.5 * std::f64::consts::LN_10 / alpha0).ceil() as i64;
    let b = b_table_quadrature(&sys.limits, b_window, sys.options.nodes);
    // terms decay like e^{-α₀|k|/2}; reach 1e-14 of the leading term
    let reach = (2.0 * 14.0 * std::f64::consts::LN_10 / alpha0).ceil() as i64 + 8;
    let (_, values) = series_values(&sys.spectrum, &sys.limits, 0..=reach as u64)?;
    let c = values.iter().map(|v| v.value()).collect();
    Ok(Inputs { b, c, reach })
}

fn checked_d(sys: &WaveletSystem, inp: &Inputs, j: i64, opts: &ProfileOptions) -> Result<DEntry> {
    let entry = d_entry(sys, &inp.b, j);
    if entry.defect > opts.tolerance {
        return Err(Error::NonConvergence {
            what: "partial constants K_i",
            depth: inp.b.window as usize,
            defect: entry.defect,
            tol: opts.tolerance,
        });
    }
    Ok(entry)
}

fn checked_e(sys: &WaveletSystem, inp: &Inputs, d: &[DEntry], j: i64, opts: &ProfileOptions) -> Result<EEntry> {
    let m = sys.m.as_i64();
    let (value, abs) = e_value(sys, d, &inp.c, j, inp.reach);
    let (shorter, _) = e_value(sys, d, &inp.c, j, inp.reach - 8);
    let defect = (value - shorter).abs() / abs.max(f64::MIN_POSITIVE);
    if defect > opts.tolerance {
        return Err(Error::NonConvergence {
            what: "wavelet constant E",
            depth: inp.reach as usize,
            defect,
            tol: opts.tolerance,
        });
    }
    let shift = RIndex::Gamma.r(m, j) - RIndex::Bracket.r(m, j);
    let e_bracket = value * sign_pow(shift) * (-sys.alpha0() * shift as f64).exp();
    Ok(EEntry {
        class: ClassKey::of(j),
        e: value,
        e_bracket,
        defect,
    })
}

/// `D` and `E` evaluated at the index `j` itself instead of a far representative of its class.
/// Admissible indices satisfy `|j| > m + reach`, where `reach` is the `c` reach of the profile.
pub fn class_constants_at(sys: &WaveletSystem, j: i64) -> Result<(DEntry, EEntry)> {
    let opts = ProfileOptions::default();
    let run = || -> Result<(DEntry, EEntry)> {
        let inp = inputs(sys)?;
        if j.abs() <= sys.m.as_i64() + inp.reach {
            return Err(Error::InvalidArgument(format!(
                "index {j} is too close to the origin; need |j| > {}",
                sys.m.as_i64() + inp.reach
            )));
        }
        let d_j = checked_d(sys, &inp, j, &opts)?;
        // E at j needs D of the classes of k - j + 1, which all lie on the far side of j
        let d: Vec<DEntry> = ClassKey::ALL
            .iter()
            .map(|&k| checked_d(sys, &inp, k.representative(), &opts))
            .collect::<Result<_>>()?;
        let e_j = checked_e(sys, &inp, &d, j, &opts)?;
        Ok((d_j, e_j))
    };
    run().stage(Stage::Profile)
}

fn build_profile(sys: &WaveletSystem, opts: &ProfileOptions) -> Result<AsymptoticProfile> {
    let inp = inputs(sys)?;
    let d: Vec<DEntry> = ClassKey::ALL
        .iter()
        .map(|&k| checked_d(sys, &inp, k.representative(), opts))
        .collect::<Result<_>>()?;
    let e: Vec<EEntry> = ClassKey::ALL
        .iter()
        .map(|&k| checked_e(sys, &inp, &d, k.representative(), opts))
        .collect::<Result<_>>()?;
    Ok(AsymptoticProfile {
        m: sys.m.get(),
        alpha0: sys.alpha0(),
        k_c: sys.limits.k_c,
        k_b: sys.limits.k_b,
        d,
        e,
        b_window: inp.b.window,
        c_reach: inp.reach,
    })
}
