//! Generalized binomial coefficients in log form with explicit sign.

/// `(sign, ln |binom(alpha, k)|)` for real `alpha` and integer `k >= 0`.
///
/// Returns sign 0 when the coefficient vanishes (integer `alpha` with `k > alpha >= 0`).
pub fn ln_abs_binom(alpha: f64, k: u64) -> (i8, f64) {
    if k == 0 {
        return (1, 0.0);
    }
    let kf = k as f64;
    let top = alpha + 1.0;
    let bottom = alpha - kf + 1.0;
    if alpha >= 0.0 && alpha.fract() == 0.0 && kf > alpha {
        return (0, f64::NEG_INFINITY);
    }
    let (lg_top, s_top) = libm::lgamma_r(top);
    let (lg_bottom, s_bottom) = libm::lgamma_r(bottom);
    let lg_k = libm::lgamma(kf + 1.0);
    let sign = if s_top * s_bottom > 0 { 1 } else { -1 };
    (sign, lg_top - lg_k - lg_bottom)
}

/// `binom(alpha, k)` as a plain float.
pub fn binom(alpha: f64, k: u64) -> f64 {
    let (s, l) = ln_abs_binom(alpha, k);
    s as f64 * l.exp()
}

/// `ln |binom(-1/2, n)|` for `n = 0..=len-1`.
pub fn ln_abs_binom_minus_half(len: usize) -> Vec<f64> {
    (0..len as u64).map(|n| ln_abs_binom(-0.5, n).1).collect()
}

/// `ln |binom(1/2, n)|` for `n = 0..=len-1`.
pub fn ln_abs_binom_half(len: usize) -> Vec<f64> {
    (0..len as u64).map(|n| ln_abs_binom(0.5, n).1).collect()
}

/// Sign of `binom(1/2, n)`: positive at 0 and 1, then alternating.
pub fn sign_binom_half(n: usize) -> f64 {
    if n == 0 || n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `R(j, k) = |binom(-1/2, j)| |binom(-1/2, k-j)| / |binom(-1/2, k)|`.
pub fn ratio_r(j: u64, k: u64) -> f64 {
    assert!(j <= k);
    let (_, a) = ln_abs_binom(-0.5, j);
    let (_, b) = ln_abs_binom(-0.5, k - j);
    let (_, c) = ln_abs_binom(-0.5, k);
    (a + b - c).exp()
}

/// `S(i, k) = binom(1/2, i) binom(1/2, k-i) / binom(1/2, k)`, negative for `0 < i < k`.
pub fn ratio_s(i: u64, k: u64) -> f64 {
    assert!(i <= k);
    let (sa, a) = ln_abs_binom(0.5, i);
    let (sb, b) = ln_abs_binom(0.5, k - i);
    let (sc, c) = ln_abs_binom(0.5, k);
    (sa * sb * sc) as f64 * (a + b - c).exp()
}

/// `ln binom(n, k)` for integers.
pub fn ln_binom_int(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}
