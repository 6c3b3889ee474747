use cardwave::coefficients::{
    b_table_quadrature, c_quadrature, c_series, c_table_quadrature, c_table_series, spline_mask, DEFAULT_NODES,
};
use cardwave::wavelet_system::{build_system_with, BuildOptions, CoefficientMode};
use cardwave::{build_system, CoefficientKind, CoefficientTable, Error, RecurrenceLimits, SplineOrder, TableMethod};

fn order(m: u32) -> SplineOrder {
    SplineOrder::new(m).unwrap()
}

fn limits(m: u32) -> RecurrenceLimits {
    cardwave::wavelet_system::build_constants(order(m), cardwave::coefficients::recurrence::DEFAULT_DEPTH)
        .unwrap()
        .1
}

#[test]
fn linear_c_is_even_and_alternates() {
    let c = c_table_quadrature(&limits(2), 20, DEFAULT_NODES);
    for j in 0..=20 {
        assert_eq!(c.get(j).unwrap(), c.get(-j).unwrap());
    }
    for j in 3..=20 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        assert!(sign * c.get(j).unwrap() > 0.0, "j={j}");
    }
}

#[test]
fn linear_c0_against_direct_integral() {
    // c_0 = (1/π) ∫_0^π (1/3 + 2/3 cos²(θ/2))^{-1/2} dθ, midpoint rule
    let n = 200_000;
    let h = std::f64::consts::PI / n as f64;
    let integral: f64 = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            let c2 = (t / 2.0).cos().powi(2);
            (1.0 / 3.0 + 2.0 / 3.0 * c2).powf(-0.5)
        })
        .sum::<f64>()
        * h
        / std::f64::consts::PI;
    let c0 = c_quadrature(order(2), 0).unwrap().value;
    assert!((c0 - integral).abs() < 1e-9, "{c0} vs {integral}");
}

#[test]
fn series_and_quadrature_agree() {
    for m in [2, 3, 4] {
        let l = limits(m);
        let q = c_table_quadrature(&l, 30, DEFAULT_NODES);
        for j in 0..=30u64 {
            let s = match c_series(&l, j) {
                Ok(v) => v.value(),
                Err(Error::InsufficientDepth { need, .. }) => {
                    let spectrum = cardwave::EFSpectrum::compute(order(m)).unwrap();
                    c_series(&l.with_b_depth(&spectrum, need).unwrap(), j).unwrap().value()
                }
                Err(e) => panic!("{e}"),
            };
            let d = (s - q.get(j as i64).unwrap()).abs();
            assert!(d < 1e-12, "m={m} j={j}: {d:e}");
        }
    }
}

#[test]
fn series_table_reaches_below_quadrature_floor() {
    let opts = BuildOptions {
        eps: 1e-15,
        mode: CoefficientMode::Series,
        ..Default::default()
    };
    let sys = build_system_with(order(2), &opts).unwrap();
    assert_eq!(sys.c_table.method, TableMethod::Series);
    assert!(sys.c_table.tail_bound <= 1e-15);
    let far = sys.c_table.get(sys.c_table.window).unwrap().abs();
    assert!(far > 0.0 && far < 1e-13);
    let quad = build_system(order(2), 1e-12).unwrap();
    assert!(sys.c_table.window > quad.c_table.window);
}

#[test]
fn quadrature_mode_refuses_eps_below_floor() {
    let err = build_system(order(2), 1e-14).unwrap_err();
    assert!(matches!(err.root(), Error::ToleranceFloor { .. }), "{err}");
}

#[test]
fn series_table_matches_quadrature_table() {
    let l = limits(3);
    let q = c_table_quadrature(&l, 25, DEFAULT_NODES);
    let spectrum = cardwave::EFSpectrum::compute(order(3)).unwrap();
    let deep = l.with_b_depth(&spectrum, 1 << 14).unwrap();
    let s = c_table_series(&deep, 25).unwrap();
    for j in -25..=25 {
        assert!((q.get(j).unwrap() - s.get(j).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn c_and_b_are_convolution_inverses() {
    for m in 2..=5 {
        let l = limits(m);
        let c = c_table_quadrature(&l, 60, DEFAULT_NODES);
        let b = b_table_quadrature(&l, 60, DEFAULT_NODES);
        for n in -10..=10i64 {
            let v: f64 = (-60..=60).map(|k| c.get_or_zero(k) * b.get_or_zero(n - k)).sum();
            let want = if n == 0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-8, "m={m} n={n}");
        }
    }
}

#[test]
fn b_follows_sign_law() {
    let b = b_table_quadrature(&limits(3), 20, DEFAULT_NODES);
    for j in 4..=18i64 {
        let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
        assert!(sign * b.get(j).unwrap() > 0.0, "j={j}");
    }
}

#[test]
fn spline_mask_sums_to_two() {
    for m in 1..=8 {
        let mask = spline_mask(order(m));
        assert_eq!(mask.len(), m as usize + 1);
        assert!((mask.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }
}

#[test]
fn mask_and_gamma_identities() {
    for m in 2..=4 {
        let sys = build_system(order(m), 1e-12).unwrap();
        let a = &sys.a_table;
        let sum: f64 = a.values.iter().sum();
        let alt: f64 = a.iter().map(|(j, v)| if j % 2 == 0 { v } else { -v }).sum();
        let gsum: f64 = sys.gamma_table.values.iter().sum();
        assert!((sum - 2.0).abs() < 1e-8);
        assert!(alt.abs() < 1e-8);
        assert!(gsum.abs() < 1e-8);
        for k in -4..=4i64 {
            let v: f64 = a.iter().map(|(j, x)| x * a.get_or_zero(j - 2 * k)).sum();
            let want = if k == 0 { 2.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-7, "m={m} k={k}");
        }
    }
}

#[test]
fn tail_bounds_cover_dropped_values() {
    let sys = build_system(order(3), 1e-10).unwrap();
    for kind in [
        CoefficientKind::C,
        CoefficientKind::B,
        CoefficientKind::A,
        CoefficientKind::Gamma,
    ] {
        let t = sys.table(kind);
        assert!(t.tail_bound <= 1e-10, "{kind}: {}", t.tail_bound);
        let r = t.restricted(t.window / 2);
        let dropped = t
            .iter()
            .filter(|(j, _)| j.abs() > t.window / 2)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        assert!(r.tail_bound >= dropped);
    }
}

#[test]
fn json_round_trip_is_exact() {
    let sys = build_system(order(2), 1e-12).unwrap();
    for kind in [CoefficientKind::C, CoefficientKind::Gamma] {
        let t = sys.table(kind);
        let text = t.to_json_string().unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        let back = CoefficientTable::from_json_reader(text.as_bytes()).unwrap();
        assert_eq!(&back, t);
        assert_eq!(back.to_json_string().unwrap(), text);
    }
}

#[test]
fn csv_has_header_and_lf_endings() {
    let sys = build_system(order(2), 1e-12).unwrap();
    let text = sys.c_table.restricted(3).to_csv_string().unwrap();
    let lines: Vec<&str> = text.split('\n').collect();
    assert_eq!(lines[0], "j,value");
    assert_eq!(lines.len(), 2 + 7);
    assert!(!text.contains('\r'));
    assert!(lines[1].starts_with("-3,"));
}

#[test]
fn window_access_errors() {
    let sys = build_system(order(2), 1e-12).unwrap();
    let w = sys.c_table.window;
    assert!(matches!(sys.c_table.get(w + 1), Err(Error::IndexOutOfWindow { .. })));
    assert_eq!(sys.c_table.get_or_zero(w + 1), 0.0);
}
