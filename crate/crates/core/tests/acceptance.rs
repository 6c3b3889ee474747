//! Acceptance battery: one PASS/FAIL line per criterion, with diagnostics underneath.
//!
//! Exits 0 after printing the report. Set `CARDWAVE_ACCEPTANCE_STRICT=1` to exit 1
//! when any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use cardwave::bspline::autocorrelation_at;
use cardwave::coefficients::{
    b_quadrature, b_table_quadrature, c_series, c_table_quadrature, pm_eval, ratio_r, recurrence_at_depth,
    series_depth_needed, PmSymbol, RecurrenceKind, DEFAULT_NODES,
};
use cardwave::transform::round_trip_error;
use cardwave::wavelet_system::{asymptotic_profile, class_constants_at, RIndex};
use cardwave::{build_system, derive_filters, dwt_analyze, EFSpectrum, SplineOrder, WaveletSystem};
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            summary: String::new(),
            notes: Vec::new(),
        }
    }

    /// Record one sub-check; the criterion passes only if all of them do.
    fn part(&mut self, label: &str, ok: bool, detail: String) {
        self.pass &= ok;
        self.notes
            .push(format!("{} {label}: {detail}", if ok { "ok  " } else { "MISS" }));
    }

    fn note(&mut self, text: String) {
        self.notes.push(format!("     {text}"));
    }
}

fn order(m: u32) -> SplineOrder {
    SplineOrder::new(m).unwrap()
}

fn system(m: u32) -> WaveletSystem {
    build_system(order(m), 1e-12).unwrap()
}

fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Least-squares slope, computed here rather than borrowed from the library.
fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `N_m(x)` by the Cox–de Boor recurrence, as an oracle independent of the library's spline code.
fn bspline(m: u32, x: f64) -> f64 {
    if m == 1 {
        return if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
    }
    let mf = m as f64;
    (x * bspline(m - 1, x) + (mf - x) * bspline(m - 1, x - 1.0)) / (mf - 1.0)
}

fn c1_alpha0() -> Outcome {
    let mut o = Outcome::new();
    let s = EFSpectrum::compute(order(2)).unwrap();
    // z² + 4z + 1 has root -2 + √3, so μ = (λ+1)²/(4|λ|) = 1/2
    let lambda = -2.0 + 3f64.sqrt();
    let oracle = (2.0 + 3f64.sqrt()).ln();
    o.part(
        "alpha0(2)",
        (s.alpha0 - oracle).abs() <= 1e-10,
        format!("{:.16e} vs {oracle:.16e}", s.alpha0),
    );
    o.note(format!(
        "root {:.16e} vs {lambda:.16e}, mu {:.16e}",
        s.inner_roots()[0],
        s.mu[0]
    ));
    o.summary = format!("alpha0(2) = {:.12}", s.alpha0);
    o
}

fn c2_spectrum() -> Outcome {
    let mut o = Outcome::new();
    let mut worst_pair = 0.0f64;
    let mut worst_res = 0.0f64;
    for m in 2..=8u32 {
        let s = EFSpectrum::compute(order(m)).unwrap();
        let roots = &s.roots;
        let n = roots.len();
        let pairs = (0..n)
            .map(|k| (roots[k] * roots[n - 1 - k] - 1.0).abs())
            .fold(0.0, f64::max);
        let inside = roots.iter().filter(|&&z| z > -1.0 && z < 0.0).count();
        let coeffs: Vec<f64> = s.coefficients.iter().map(|c| c.to_f64().unwrap()).collect();
        // f64 Horner with a running-error denominator, independent of the library's compensated one
        let res = roots
            .iter()
            .map(|&z| {
                let (mut p, mut q) = (0.0f64, 0.0f64);
                for c in coeffs.iter().rev() {
                    p = p * z + c;
                    q = q * z.abs() + c.abs();
                }
                p.abs() / q
            })
            .fold(0.0, f64::max);
        let distinct = roots.windows(2).all(|w| w[0] > w[1]);
        worst_pair = worst_pair.max(pairs);
        worst_res = worst_res.max(res);
        o.part(
            &format!("m={m}"),
            pairs <= 1e-10 && inside == (m - 1) as usize && res <= 1e-11 && distinct && n == 2 * m as usize - 2,
            format!("{n} roots, {inside} in (-1,0), pairing {pairs:.1e}, residual {res:.1e}"),
        );
    }
    o.summary = format!("pairing <= {worst_pair:.1e}, residual <= {worst_res:.1e}");
    o
}

fn c3_symbol() -> Outcome {
    let mut o = Outcome::new();
    let grid: Vec<f64> = (0..1000).map(|i| -PI + 2.0 * PI * i as f64 / 1000.0).collect();
    let mut worst = 0.0f64;
    for m in 2..=8u32 {
        let symbol = PmSymbol::new(order(m)).unwrap();
        // cosine sum from exact autocorrelations
        let coef: Vec<f64> = (0..m as i64)
            .map(|k| cardwave::bspline::rational_to_f64(&autocorrelation_at(order(m), k)))
            .collect();
        let d = grid
            .iter()
            .map(|&t| {
                let cs = coef[0]
                    + coef
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, v)| 2.0 * v * (k as f64 * t).cos())
                        .sum::<f64>();
                (symbol.product(t) - cs).abs()
            })
            .fold(0.0, f64::max);
        worst = worst.max(d);
        o.part(&format!("product vs cosine sum m={m}"), d <= 1e-10, format!("{d:.1e}"));
    }
    let quartic = |t: f64| {
        let c2 = (t / 2.0).cos().powi(2);
        2.0 / 15.0 + 11.0 / 15.0 * c2 + 2.0 / 15.0 * c2 * c2
    };
    let quadratic = |t: f64| {
        let c2 = (t / 2.0).cos().powi(2);
        1.0 / 3.0 + 2.0 / 3.0 * c2
    };
    let dev = |m: u32, f: &dyn Fn(f64) -> f64| {
        let symbol = PmSymbol::new(order(m)).unwrap();
        grid.iter()
            .map(|&t| (symbol.product(t) - f(t)).abs())
            .fold(0.0, f64::max)
    };
    let d2 = grid
        .iter()
        .map(|&t| (pm_eval(order(2), t).unwrap() - quartic(t)).abs())
        .fold(0.0, f64::max);
    o.part(
        "pm_eval(2) vs explicit quartic-in-cos polynomial",
        d2 <= 1e-12,
        format!("{d2:.3e}"),
    );
    o.note(format!(
        "pm_eval(2) vs explicit quadratic-in-cos polynomial {:.1e}; pm_eval(3) vs quartic-in-cos polynomial {:.1e}",
        dev(2, &quadratic),
        dev(3, &quartic)
    ));
    o.summary = format!("cross-validation <= {worst:.1e}, pm_eval(2) vs quartic polynomial {d2:.2e}");
    o
}

fn c4_convolution() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    for m in 2..=5u32 {
        let s = system(m);
        let c = c_table_quadrature(&s.limits, 60, DEFAULT_NODES);
        let b = b_table_quadrature(&s.limits, 60, DEFAULT_NODES);
        let d = (-10..=10i64)
            .map(|n| {
                let v: f64 = (-60..=60).map(|k| c.get_or_zero(k) * b.get_or_zero(n - k)).sum();
                (v - if n == 0 { 1.0 } else { 0.0 }).abs()
            })
            .fold(0.0, f64::max);
        worst = worst.max(d);
        o.part(&format!("m={m}"), d <= 1e-8, format!("{d:.1e}"));
    }
    o.summary = format!("max defect {worst:.1e}");
    o
}

fn c5_gram() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    for m in 2..=5u32 {
        let s = system(m);
        let d = (-8..=8i64)
            .map(|k| (s.gram_phi(k) - if k == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        worst = worst.max(d);
        o.part(&format!("m={m}"), d <= 1e-8, format!("{d:.1e}"));
        // φ·φ(·-k) is a polynomial of degree 2m-2 on each unit interval, so 5-point Gauss-Legendre is exact there
        let gauss = [
            (0.0, 128.0 / 225.0),
            (0.5384693101056831, 0.4786286704993665),
            (-0.5384693101056831, 0.4786286704993665),
            (0.906179845938664, 0.2369268850561891),
            (-0.906179845938664, 0.2369268850561891),
        ];
        let reach = s.phi_limit() as i64;
        let brute = |k: i64| -> f64 {
            (-reach..reach)
                .flat_map(|cell| gauss.iter().map(move |&(t, w)| (cell as f64 + 0.5 + 0.5 * t, 0.5 * w)))
                .map(|(x, w)| w * s.phi_raw(x) * s.phi_raw(x - k as f64))
                .sum()
        };
        let q = (-3..=3i64)
            .map(|k| (brute(k) - s.gram_phi(k)).abs())
            .fold(0.0, f64::max);
        o.note(format!(
            "m={m}: exact route vs cell-wise Gauss quadrature, |k| <= 3: {q:.1e}"
        ));
    }
    o.summary = format!("max Gram defect {worst:.1e}");
    o
}

fn c6_two_scale() -> Outcome {
    let mut o = Outcome::new();
    let grid: Vec<f64> = (0..1000).map(|i| -8.0 + 16.0 * i as f64 / 999.0).collect();
    let mut summary = Vec::new();
    for m in 2..=4u32 {
        let s = system(m);
        let mm = m as i64;
        // ψ along the mask path, assembled here from the mask and the c table with an independent spline
        let phi = |x: f64| -> f64 {
            let top = x.floor() as i64;
            ((top - mm + 1)..=top)
                .map(|j| s.c_table.get_or_zero(j) * bspline(m, x - j as f64))
                .sum()
        };
        let refine = grid
            .iter()
            .map(|&x| (phi(x) - s.a_table.iter().map(|(j, a)| a * phi(2.0 * x - j as f64)).sum::<f64>()).abs())
            .fold(0.0, f64::max);
        let paths = grid
            .iter()
            .map(|&x| {
                let direct: f64 = s
                    .a_table
                    .iter()
                    .map(|(n, a)| sign_pow(1 - n) * a * phi(2.0 * x - (1 - n) as f64))
                    .sum();
                (direct - s.psi_eval(x).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        o.part(&format!("two-scale m={m}"), refine <= 1e-6, format!("{refine:.1e}"));
        o.part(
            &format!("mask path vs gamma path m={m}"),
            paths <= 1e-7,
            format!("{paths:.1e}"),
        );
        summary.push(format!("m={m}: {refine:.0e}/{paths:.0e}"));
    }
    o.summary = summary.join(", ");
    o
}

fn series_values(s: &WaveletSystem, js: std::ops::RangeInclusive<u64>) -> Vec<(u64, f64, f64)> {
    let mut limits = s
        .limits
        .with_b_depth(&s.spectrum, series_depth_needed(s.limits.mu_last, *js.end()))
        .unwrap();
    loop {
        match js
            .clone()
            .map(|j| c_series(&limits, j).map(|v| (j, v.sign, v.log_magnitude)))
            .collect()
        {
            Ok(v) => return v,
            Err(cardwave::Error::InsufficientDepth { need, .. }) => {
                limits = limits.with_b_depth(&s.spectrum, need).unwrap()
            }
            Err(e) => panic!("{e}"),
        }
    }
}

fn c7_c_decay() -> Outcome {
    let mut o = Outcome::new();
    let mut summary = Vec::new();
    for m in [2u32, 3] {
        let s = system(m);
        let a0 = s.alpha0();
        let vals = series_values(&s, 20..=60);
        let x: Vec<f64> = vals.iter().map(|v| v.0 as f64).collect();
        let y: Vec<f64> = vals.iter().map(|v| v.2 + 0.5 * (v.0 as f64).ln()).collect();
        let slope = ls_slope(&x, &y);
        let rel = (slope + a0).abs() / a0;
        o.part(
            &format!("slope m={m}"),
            rel <= 0.005,
            format!("{slope:.8} vs {:.8} ({:.3}%)", -a0, 100.0 * rel),
        );
        let k_c = s.limits.k_c;
        let worst = vals
            .iter()
            .map(|&(j, sg, lm)| {
                let p = sign_pow(j as i64) * sg * (lm + 0.5 * (j as f64).ln() + a0 * j as f64).exp();
                (p - k_c).abs() / k_c
            })
            .fold(0.0, f64::max);
        o.part(
            &format!("plateau m={m}"),
            worst <= 0.01,
            format!("max {:.3}% off K_c = {k_c:.8}", 100.0 * worst),
        );
        summary.push(format!("m={m} slope {:.3}% plateau {:.2}%", 100.0 * rel, 100.0 * worst));
    }
    let k2 = system(2).limits.k_c;
    let oracle = 3f64.powf(0.25) / PI.sqrt();
    o.part(
        "K_c(2) closed form",
        (k2 - oracle).abs() / oracle <= 0.01,
        format!("{k2:.12} vs {oracle:.12}"),
    );
    o.summary = summary.join(", ");
    o
}

fn c8_b_decay() -> Outcome {
    let mut o = Outcome::new();
    let mut summary = Vec::new();
    for m in 2..=4u32 {
        let a0 = EFSpectrum::compute(order(m)).unwrap().alpha0;
        let js: Vec<i64> = (8..=18).collect();
        let b: Vec<f64> = js.iter().map(|&j| b_quadrature(order(m), j).unwrap().value).collect();
        let x: Vec<f64> = js.iter().map(|&j| j as f64).collect();
        let y: Vec<f64> = js
            .iter()
            .zip(&b)
            .map(|(&j, v)| (v.abs() * (j as f64).powf(1.5)).ln())
            .collect();
        let slope = ls_slope(&x, &y);
        let rel = (slope + a0).abs() / a0;
        let signs = js.iter().zip(&b).all(|(&j, v)| v * sign_pow(j + 1) > 0.0);
        o.part(
            &format!("m={m}"),
            rel <= 0.03 && signs,
            format!(
                "slope {slope:.6} vs {:.6} ({:.2}%), signs {}",
                -a0,
                100.0 * rel,
                if signs { "ok" } else { "wrong" }
            ),
        );
        summary.push(format!("m={m} {:.2}%", 100.0 * rel));
    }
    o.summary = summary.join(", ");
    o
}

fn c9_a_gamma() -> Outcome {
    let mut o = Outcome::new();
    let s = system(2);
    let m = 2i64;
    let a0 = s.alpha0();
    let target = -(-a0).exp();
    let p = asymptotic_profile(&s).unwrap();
    let (mut ra, mut rg, mut pd, mut pe) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for j in 14..=20i64 {
        let a = s.a_table.get(j).unwrap();
        let a2 = s.a_table.get(j + 2).unwrap();
        let g = s.gamma_table.get(j).unwrap();
        let g2 = s.gamma_table.get(j + 2).unwrap();
        ra = ra.max(((a2 / a - target) / target).abs());
        rg = rg.max(((g2 / g - target) / target).abs());
        let r = RIndex::Mask.r(m, j) as f64;
        let plateau = a * sign_pow(r as i64) * r.sqrt() * (a0 * r).exp();
        pd = pd.max(((plateau - p.d_for(j)) / p.d_for(j)).abs());
        let r = RIndex::Gamma.r(m, j) as f64;
        let plateau = g * sign_pow(r as i64) * r.sqrt() * (a0 * r).exp();
        pe = pe.max(((plateau - p.e_for(j)) / p.e_for(j)).abs());
    }
    o.part("a ratio", ra <= 0.02, format!("max {:.2}%", 100.0 * ra));
    o.part("gamma ratio", rg <= 0.02, format!("max {:.2}%", 100.0 * rg));
    o.part("a plateau vs D", pd <= 0.03, format!("max {:.2}%", 100.0 * pd));
    o.part("gamma plateau vs E", pe <= 0.05, format!("max {:.2}%", 100.0 * pe));
    let mut spread = 0.0f64;
    for j in [200i64, 201, -200, -201] {
        let (d0, e0) = class_constants_at(&s, j).unwrap();
        let (d1, e1) = class_constants_at(&s, j + j.signum() * 34).unwrap();
        spread = spread.max((d0.d - d1.d).abs()).max((e0.e - e1.e).abs());
    }
    o.part("D, E constant per class", spread <= 1e-9, format!("{spread:.1e}"));
    // envelope-corrected ratio, for comparison
    let corrected = (14..=20i64)
        .map(|j| {
            let (r0, r1) = (RIndex::Mask.r(m, j) as f64, RIndex::Mask.r(m, j + 2) as f64);
            let q = s.a_table.get(j + 2).unwrap() / s.a_table.get(j).unwrap() * (r1 / r0).sqrt();
            ((q - target) / target).abs()
        })
        .fold(0.0, f64::max);
    o.note(format!(
        "a ratio with the 1/sqrt(r) envelope removed: max {:.2}%",
        100.0 * corrected
    ));
    o.note(format!(
        "D even {:.7} odd {:.7}, E even {:.7} odd {:.7}",
        p.d_for(14),
        p.d_for(15),
        p.e_for(14),
        p.e_for(15)
    ));
    o.summary = format!(
        "ratios {:.1}%/{:.1}%, plateaus {:.1}%/{:.1}%, class spread {spread:.0e}",
        100.0 * ra,
        100.0 * rg,
        100.0 * pd,
        100.0 * pe
    );
    o
}

fn c10_bracket() -> Outcome {
    let mut o = Outcome::new();
    let s = system(2);
    let m = 2u32;
    let a0 = s.alpha0();
    let p = asymptotic_profile(&s).unwrap();
    let term = |j: i64| {
        let r = RIndex::Bracket.r(m as i64, j) as f64;
        sign_pow(r as i64) * p.e_bracket_for(j) * (-a0 * r).exp() / r.sqrt()
    };
    let (mut worst, mut worst_literal) = (0.0f64, 0.0f64);
    for i in 0..=12 {
        let x = 8.0 + 0.5 * i as f64;
        let psi = s.psi_eval(x).unwrap();
        // ψ is expanded over N_m(2x - j), so the bracket runs over 2x - m <= j <= 2x
        let y = 2.0 * x;
        let bracket: f64 = ((y - m as f64).ceil() as i64..=y.floor() as i64)
            .map(|j| term(j) * bspline(m, y - j as f64))
            .sum();
        let literal: f64 = ((x - m as f64).ceil() as i64..=x.floor() as i64)
            .map(|j| term(j) * bspline(m, x - j as f64))
            .sum();
        let rel = ((psi - bracket) / psi).abs();
        worst = worst.max(rel);
        worst_literal = worst_literal.max(((psi - literal) / psi).abs());
        o.note(format!(
            "x={x:>4}: psi {psi:+.6e} bracket {bracket:+.6e} ({:.1}%)",
            100.0 * rel
        ));
    }
    o.part(
        "psi vs bracket on [8,14]",
        worst <= 0.05,
        format!("max {:.1}%", 100.0 * worst),
    );
    o.note(format!(
        "with N_m(x - j) in place of N_m(2x - j): max relative gap {worst_literal:.2e}"
    ));
    o.summary = format!("max relative gap {:.1}%", 100.0 * worst);
    o
}

fn c11_sums() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = [0.0f64; 4];
    for m in 2..=5u32 {
        let s = system(m);
        let a = &s.a_table;
        let sum: f64 = a.iter().map(|(_, v)| v).sum();
        let alt: f64 = a.iter().map(|(j, v)| sign_pow(j) * v).sum();
        let orth = (-8..=8i64)
            .map(|k| {
                let v: f64 = a.iter().map(|(j, v)| v * a.get_or_zero(j - 2 * k)).sum();
                (v - if k == 0 { 2.0 } else { 0.0 }).abs()
            })
            .fold(0.0, f64::max);
        let gsum: f64 = s.gamma_table.iter().map(|(_, v)| v).sum();
        let d = [(sum - 2.0).abs(), alt.abs(), orth, gsum.abs()];
        o.part(
            &format!("m={m}"),
            d[0] <= 1e-8 && d[1] <= 1e-8 && d[2] <= 1e-7 && d[3] <= 1e-8,
            format!(
                "sum {:.1e}, alternating {:.1e}, orthogonality {:.1e}, gamma {:.1e}",
                d[0], d[1], d[2], d[3]
            ),
        );
        for i in 0..4 {
            worst[i] = worst[i].max(d[i]);
        }
    }
    o.summary = format!(
        "defects {:.0e} {:.0e} {:.0e} {:.0e}",
        worst[0], worst[1], worst[2], worst[3]
    );
    o
}

fn c12_transform() -> Outcome {
    let mut o = Outcome::new();
    let s = system(2);
    let fp = derive_filters(&s, 1e-9).unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let x: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
    let err = round_trip_error(&fp, &x, 3).unwrap();
    let r = dwt_analyze(&fp, &x, 3).unwrap();
    let e_in: f64 = x.iter().map(|v| v * v).sum();
    let e_rel = (r.energy() - e_in).abs() / e_in;
    o.part("round trip", err <= 1e-6, format!("{err:.2e}"));
    o.part("energy", e_rel <= 1e-6, format!("{e_rel:.2e}"));
    o.note(format!("{} lowpass taps, center {}", fp.lowpass.len(), fp.center));
    o.summary = format!("round trip {err:.1e}, energy {e_rel:.1e}");
    o
}

fn c13_certificates() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    for m in 3..=6u32 {
        let s = EFSpectrum::compute(order(m)).unwrap();
        for kind in [RecurrenceKind::B, RecurrenceKind::C] {
            let t = recurrence_at_depth(&s, kind, 256).unwrap();
            let d = (t.one_plus(200).unwrap() - t.one_plus(100).unwrap()).abs();
            worst = worst.max(d);
            o.part(
                &format!("{kind:?} Cauchy m={m}"),
                d <= 1e-10,
                format!("|x_200 - x_100| = {d:.2e}"),
            );
        }
    }
    // |binom(-1/2, n)| = Π_{i<=n} (2i-1)/(2i), by direct products
    let mut bn = vec![1.0f64; 201];
    for n in 1..=200 {
        bn[n] = bn[n - 1] * (2 * n - 1) as f64 / (2 * n) as f64;
    }
    let bound = (2.0 * 3f64.exp()).sqrt();
    let (mut rmax, mut lib_gap) = (0.0f64, 0.0f64);
    for k in 1..=200usize {
        for j in 0..=k {
            let r = bn[j] * bn[k - j] / bn[k];
            rmax = rmax.max(r);
            lib_gap = lib_gap.max((ratio_r(j as u64, k as u64) - r).abs() / r);
        }
    }
    o.part(
        "R(j,k) bound, k <= 200",
        rmax <= bound,
        format!("max {rmax:.6} vs sqrt(2e^3) = {bound:.6}"),
    );
    o.note(format!(
        "library R agrees with the product oracle to {lib_gap:.1e} relative"
    ));
    o.summary = format!("max Cauchy defect {worst:.1e}, max R {rmax:.4}");
    o
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1", "alpha0 closed form", c1_alpha0),
        ("2", "spectrum integrity", c2_spectrum),
        ("3", "P_m cross-validation", c3_symbol),
        ("4", "convolution inverse", c4_convolution),
        ("5", "orthonormality", c5_gram),
        ("6", "two-scale and wavelet paths", c6_two_scale),
        ("7", "decay law for c", c7_c_decay),
        ("8", "decay law for b", c8_b_decay),
        ("9", "decay laws for a and gamma", c9_a_gamma),
        ("10", "asymptotic bracket for psi", c10_bracket),
        ("11", "mask and gamma sums", c11_sums),
        ("12", "transform round trip", c12_transform),
        ("13", "recurrence certificates", c13_certificates),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome {
                pass: false,
                summary: format!("panicked: {msg}"),
                notes: Vec::new(),
            }
        });
        println!(
            "[{}] criterion {id:>2} {name}: {} ({:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            start.elapsed().as_secs_f64()
        );
        for n in &outcome.notes {
            println!("        {n}");
        }
        if !outcome.pass {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {}/13 criteria pass; failing: {}",
        13 - failed.len(),
        if failed.is_empty() {
            "none".to_string()
        } else {
            failed.join(", ")
        }
    );
    if !failed.is_empty() && std::env::var("CARDWAVE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
