//! Orthonormal filter pair from the mask and a periodic multi-level DWT.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize, Serializer};

use crate::bspline::SplineOrder;
use crate::error::{Error, Result, Stage, StageExt};
use crate::numeric::{format17, ser_f64, ser_f64_seq, Neumaier};
use crate::wavelet_system::WaveletSystem;

pub const DWT_SCHEMA_VERSION: u32 = 1;

/// Lowpass `h_j = a_j/√2` and highpass `g_j = (-1)^j h_{1-j}`, both truncated where `|h_j| <= eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    pub m: SplineOrder,
    /// Index of `lowpass[0]`.
    pub low_start: i64,
    #[serde(serialize_with = "ser_f64_seq")]
    pub lowpass: Vec<f64>,
    /// Index of `highpass[0]`.
    pub high_start: i64,
    #[serde(serialize_with = "ser_f64_seq")]
    pub highpass: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub truncation_eps: f64,
    /// Even shift subtracted from every filter index, putting the lowpass energy centroid near 0.
    pub center: i64,
}

/// Defects of the filter-pair identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterDefects {
    /// `|Σ h_j - √2|`.
    pub lowpass_sum: f64,
    /// `|Σ g_j|`.
    pub highpass_sum: f64,
    /// `max_k |Σ_j h_j h_{j-2k} - δ_{k0}|`.
    pub orthogonality: f64,
    /// `max_k |Σ_j h_j g_{j-2k}|`.
    pub cross: f64,
}

impl FilterPair {
    pub fn h(&self, j: i64) -> f64 {
        tap(&self.lowpass, self.low_start, j)
    }

    pub fn g(&self, j: i64) -> f64 {
        tap(&self.highpass, self.high_start, j)
    }

    pub fn len(&self) -> usize {
        self.lowpass.len().max(self.highpass.len())
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Identity defects over the shifts `|k| <= shifts`.
    pub fn defects(&self, shifts: i64) -> FilterDefects {
        let lo = self.low_start;
        let hi = lo + self.lowpass.len() as i64;
        let corr = |f: &dyn Fn(i64) -> f64, k: i64| {
            let mut acc = Neumaier::default();
            for j in lo..hi {
                acc.add(self.h(j) * f(j - 2 * k));
            }
            acc.value()
        };
        let mut orthogonality = 0.0f64;
        let mut cross = 0.0f64;
        for k in -shifts..=shifts {
            let d = if k == 0 { 1.0 } else { 0.0 };
            orthogonality = orthogonality.max((corr(&|j| self.h(j), k) - d).abs());
            cross = cross.max(corr(&|j| self.g(j), k).abs());
        }
        let sum = |v: &[f64]| {
            v.iter().fold(Neumaier::default(), |mut a, &x| {
                a.add(x);
                a
            })
        };
        FilterDefects {
            lowpass_sum: (sum(&self.lowpass).value() - std::f64::consts::SQRT_2).abs(),
            highpass_sum: sum(&self.highpass).value().abs(),
            orthogonality,
            cross,
        }
    }
}

fn tap(v: &[f64], start: i64, j: i64) -> f64 {
    let i = j - start;
    if i < 0 || i >= v.len() as i64 {
        0.0
    } else {
        v[i as usize]
    }
}

/// Filter pair from the mask of `sys`, truncated at `eps`.
pub fn derive_filters(sys: &WaveletSystem, eps: f64) -> Result<FilterPair> {
    filters_from_mask(sys, eps).stage(Stage::Filters)
}

fn filters_from_mask(sys: &WaveletSystem, eps: f64) -> Result<FilterPair> {
    let a = &sys.a_table;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let floor = a.tail_bound / std::f64::consts::SQRT_2;
    if eps < floor {
        return Err(Error::ToleranceFloor { requested: eps, floor });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kept: Vec<i64> = a.iter().filter(|(_, v)| (v * s).abs() > eps).map(|(j, _)| j).collect();
    let (lo, hi) = match (kept.first(), kept.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::InvalidArgument(format!("eps {eps:e} removes every filter tap"))),
    };
    let raw: Vec<f64> = (lo..=hi).map(|j| a.get_or_zero(j) * s).collect();

    let energy: f64 = raw.iter().map(|v| v * v).sum();
    let centroid: f64 = raw
        .iter()
        .enumerate()
        .map(|(i, v)| (lo + i as i64) as f64 * v * v)
        .sum::<f64>()
        / energy;
    // an even shift keeps the two-fold downsampling phase
    let center = 2 * (centroid / 2.0).round() as i64;

    let lowpass = raw;
    let high_start = 1 - hi;
    let highpass: Vec<f64> = (high_start..=1 - lo)
        .map(|j| {
            let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * tap(&lowpass, lo, 1 - j)
        })
        .collect();
    Ok(FilterPair {
        m: sys.m,
        low_start: lo,
        lowpass,
        high_start,
        highpass,
        truncation_eps: eps,
        center,
    })
}

fn ser_bands<S: Serializer>(bands: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Band<'a>(&'a [f64]);
    impl Serialize for Band<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_f64_seq(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(bands.len()))?;
    for b in bands {
        seq.serialize_element(&Band(b))?;
    }
    seq.end()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
}

/// Output of `levels` analysis steps. `details[0]` is the finest band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DwtResult {
    pub schema_version: u32,
    pub levels: usize,
    #[serde(serialize_with = "ser_bands")]
    pub details: Vec<Vec<f64>>,
    #[serde(serialize_with = "ser_f64_seq")]
    pub approximation: Vec<f64>,
    pub boundary: Boundary,
}

impl DwtResult {
    /// Number of stored coefficients, which equals the analyzed signal length.
    pub fn len(&self) -> usize {
        self.approximation.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn energy(&self) -> f64 {
        let mut acc = Neumaier::default();
        for v in self.details.iter().flatten().chain(&self.approximation) {
            acc.add(v * v);
        }
        acc.value()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_reader<R: Read>(r: R) -> Result<Self> {
        let doc: DwtResult = serde_json::from_reader(r)?;
        if doc.schema_version != DWT_SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported dwt schema_version {}",
                doc.schema_version
            )));
        }
        doc.check_shape()?;
        Ok(doc)
    }

    fn check_shape(&self) -> Result<()> {
        if self.details.len() != self.levels {
            return Err(Error::Shape(format!(
                "{} detail bands for {} levels",
                self.details.len(),
                self.levels
            )));
        }
        let mut expect = self.approximation.len();
        for (l, band) in self.details.iter().enumerate().rev() {
            if band.len() != expect {
                return Err(Error::Shape(format!(
                    "detail band {} has length {}, expected {expect}",
                    l + 1,
                    band.len()
                )));
            }
            expect *= 2;
        }
        Ok(())
    }
}

/// One periodic analysis step: `(Σ_j h_j x_{2k+j}, Σ_j g_j x_{2k+j})` with indices shifted by the center.
fn analyze_step(fp: &FilterPair, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len() as i64;
    let half = x.len() / 2;
    let band = |taps: &[f64], start: i64| -> Vec<f64> {
        (0..half as i64)
            .map(|k| {
                let mut acc = Neumaier::default();
                for (i, t) in taps.iter().enumerate() {
                    let idx = (2 * k + start + i as i64 - fp.center).rem_euclid(n);
                    acc.add(t * x[idx as usize]);
                }
                acc.value()
            })
            .collect()
    };
    (band(&fp.lowpass, fp.low_start), band(&fp.highpass, fp.high_start))
}

/// Adjoint of `analyze_step`.
fn synthesize_step(fp: &FilterPair, approx: &[f64], detail: &[f64]) -> Vec<f64> {
    let n = 2 * approx.len() as i64;
    let mut out = vec![Neumaier::default(); n as usize];
    for (coeffs, taps, start) in [
        (approx, &fp.lowpass, fp.low_start),
        (detail, &fp.highpass, fp.high_start),
    ] {
        for (k, &c) in coeffs.iter().enumerate() {
            for (i, t) in taps.iter().enumerate() {
                let idx = (2 * k as i64 + start + i as i64 - fp.center).rem_euclid(n);
                out[idx as usize].add(t * c);
            }
        }
    }
    out.iter().map(Neumaier::value).collect()
}

pub fn dwt_analyze(fp: &FilterPair, signal: &[f64], levels: usize) -> Result<DwtResult> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be at least 1".into()));
    }
    let block = 1usize.checked_shl(levels as u32).filter(|b| *b <= signal.len().max(1));
    if block.map_or(true, |b| signal.len() % b != 0) || signal.is_empty() {
        return Err(Error::Shape(format!(
            "signal length {} is not divisible by 2^{levels}",
            signal.len()
        )));
    }
    if signal.len() < fp.len() {
        return Err(Error::Shape(format!(
            "signal length {} is shorter than the filter length {}",
            signal.len(),
            fp.len()
        )));
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("signal sample {i} is not finite")));
    }
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analyze_step(fp, &approx);
        details.push(d);
        approx = a;
    }
    Ok(DwtResult {
        schema_version: DWT_SCHEMA_VERSION,
        levels,
        details,
        approximation: approx,
        boundary: Boundary::Periodic,
    })
}

pub fn dwt_synthesize(fp: &FilterPair, result: &DwtResult) -> Result<Vec<f64>> {
    result.check_shape()?;
    let mut approx = result.approximation.clone();
    for detail in result.details.iter().rev() {
        approx = synthesize_step(fp, &approx, detail);
    }
    Ok(approx)
}

/// Relative ℓ₂ error of analysis followed by synthesis.
pub fn round_trip_error(fp: &FilterPair, signal: &[f64], levels: usize) -> Result<f64> {
    let back = dwt_synthesize(fp, &dwt_analyze(fp, signal, levels)?)?;
    let num: f64 = signal.iter().zip(&back).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = signal.iter().map(|a| a * a).sum();
    Ok((num / den).sqrt())
}

/// Single-column CSV; a non-numeric first row is taken as a header.
pub fn read_signal_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(r);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 1 {
            return Err(Error::Shape(format!(
                "line {}: expected one column, found {}",
                line + 1,
                rec.len()
            )));
        }
        let field = rec[0].trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if line == 0 => {}
            Err(_) => {
                return Err(Error::InvalidArgument(format!(
                    "line {}: {field:?} is not a number",
                    line + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Single-column CSV with a `value` header.
pub fn write_signal_csv<W: Write>(w: W, signal: &[f64]) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(["value"])?;
    for v in signal {
        out.write_record([format17(*v)])?;
    }
    out.flush()?;
    Ok(())
}
