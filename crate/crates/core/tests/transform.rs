use cardwave::transform::{read_signal_csv, round_trip_error, write_signal_csv};
use cardwave::{
    build_system, derive_filters, dwt_analyze, dwt_synthesize, DwtResult, Error, FilterPair, SplineOrder, Stage,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn filters(m: u32, eps: f64) -> FilterPair {
    derive_filters(&build_system(SplineOrder::new(m).unwrap(), 1e-12).unwrap(), eps).unwrap()
}

fn random_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[test]
fn filter_identities() {
    for m in 2..=4 {
        let fp = filters(m, 1e-9);
        let d = fp.defects(6);
        assert!(d.lowpass_sum < 1e-7, "m={m} {d:?}");
        assert!(d.highpass_sum < 1e-7, "m={m} {d:?}");
        assert!(d.orthogonality < 1e-7, "m={m} {d:?}");
        assert!(d.cross < 1e-7, "m={m} {d:?}");
        assert_eq!(fp.center % 2, 0);
    }
}

#[test]
fn highpass_is_alternating_flip() {
    let fp = filters(3, 1e-9);
    for j in -30..=30 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(fp.g(j), sign * fp.h(1 - j));
    }
}

#[test]
fn constant_signal_has_empty_details() {
    let fp = filters(2, 1e-9);
    let x = vec![3.5; 128];
    let r = dwt_analyze(&fp, &x, 3).unwrap();
    for band in &r.details {
        assert!(band.iter().all(|v| v.abs() <= 1e-7 * 3.5));
    }
    let want = 3.5 * 2f64.powf(1.5);
    assert!(r.approximation.iter().all(|v| (v - want).abs() <= 1e-7 * want));
}

#[test]
fn random_signal_round_trip_and_energy() {
    let fp = filters(2, 1e-9);
    let x = random_signal(256, 7);
    let r = dwt_analyze(&fp, &x, 3).unwrap();
    assert_eq!(r.details.iter().map(Vec::len).collect::<Vec<_>>(), vec![128, 64, 32]);
    assert!((r.energy() / energy(&x) - 1.0).abs() <= 1e-6);
    let back = dwt_synthesize(&fp, &r).unwrap();
    let err = (energy(&x.iter().zip(&back).map(|(a, b)| a - b).collect::<Vec<_>>()) / energy(&x)).sqrt();
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn round_trip_error_scales_with_truncation() {
    let sys = build_system(SplineOrder::new(2).unwrap(), 1e-12).unwrap();
    let x = random_signal(256, 11);
    let eps = [1e-6, 1e-9, 1e-12];
    let errs: Vec<f64> = eps
        .iter()
        .map(|&e| round_trip_error(&derive_filters(&sys, e).unwrap(), &x, 3).unwrap())
        .collect();
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (slope, _) = cardwave::numeric::linear_fit(&lx, &ly);
    assert!((slope - 1.0).abs() <= 0.2, "slope {slope}, errors {errs:?}");
}

#[test]
fn shift_by_two_moves_coefficients_by_one() {
    let fp = filters(3, 1e-9);
    let x = random_signal(128, 3);
    let shifted: Vec<f64> = (0..128).map(|i| x[(i + 128 - 2) % 128]).collect();
    let a = dwt_analyze(&fp, &x, 1).unwrap();
    let b = dwt_analyze(&fp, &shifted, 1).unwrap();
    for k in 0..64 {
        assert!((b.approximation[(k + 1) % 64] - a.approximation[k]).abs() < 1e-12);
        assert!((b.details[0][(k + 1) % 64] - a.details[0][k]).abs() < 1e-12);
    }
}

#[test]
fn incompatible_lengths_are_rejected() {
    let fp = filters(2, 1e-9);
    assert!(matches!(
        dwt_analyze(&fp, &random_signal(100, 1), 3),
        Err(Error::Shape(_))
    ));
    assert!(matches!(
        dwt_analyze(&fp, &random_signal(8, 1), 1),
        Err(Error::Shape(_))
    ));
    assert!(dwt_analyze(&fp, &random_signal(64, 1), 0).is_err());
}

#[test]
fn eps_below_table_floor_is_rejected() {
    let sys = build_system(SplineOrder::new(2).unwrap(), 1e-8).unwrap();
    let err = derive_filters(&sys, 1e-12).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Filters));
    assert!(matches!(err.root(), Error::ToleranceFloor { .. }));
}

#[test]
fn result_json_round_trip() {
    let fp = filters(2, 1e-9);
    let r = dwt_analyze(&fp, &random_signal(64, 5), 2).unwrap();
    let text = r.to_json_string().unwrap();
    assert!(text.contains("\"schema_version\": 1"));
    let back = DwtResult::from_json_reader(text.as_bytes()).unwrap();
    assert_eq!(back, r);

    let mut broken: serde_json::Value = serde_json::from_str(&text).unwrap();
    broken["details"][1].as_array_mut().unwrap().pop();
    assert!(DwtResult::from_json_reader(broken.to_string().as_bytes()).is_err());
}

#[test]
fn signal_csv_round_trip() {
    let x = random_signal(16, 9);
    let mut buf = Vec::new();
    write_signal_csv(&mut buf, &x).unwrap();
    assert!(buf.starts_with(b"value\n"));
    assert_eq!(read_signal_csv(buf.as_slice()).unwrap(), x);
    assert_eq!(read_signal_csv("1.5\n2\n".as_bytes()).unwrap(), vec![1.5, 2.0]);
    assert!(read_signal_csv("value\n1\nabc\n".as_bytes()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perfect_reconstruction(seed in any::<u64>(), m in 2u32..=3, levels in 1usize..=3) {
        let fp = filters(m, 1e-9);
        let x = random_signal(128, seed);
        prop_assert!(round_trip_error(&fp, &x, levels).unwrap() <= 1e-6);
    }

    #[test]
    fn analysis_is_linear(seed in any::<u64>(), s in -3.0f64..3.0) {
        let fp = filters(2, 1e-9);
        let x = random_signal(64, seed);
        let y = random_signal(64, seed ^ 0xff);
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + s * b).collect();
        let (rx, ry, rz) = (
            dwt_analyze(&fp, &x, 2).unwrap(),
            dwt_analyze(&fp, &y, 2).unwrap(),
            dwt_analyze(&fp, &z, 2).unwrap(),
        );
        for k in 0..rz.approximation.len() {
            prop_assert!((rz.approximation[k] - rx.approximation[k] - s * ry.approximation[k]).abs() < 1e-12);
        }
    }
}
