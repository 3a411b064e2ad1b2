//! `L^p` norms of one-variable polynomials on the unit disc, used for the
//! partial-sum experiments.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::quadrature::{abs_pow, gauss::gauss_legendre, pairwise_sum};

/// Coefficients of `sum_{k=1}^{n} w^k / k`.
pub fn log_series(n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / k as f64, 0.0)
            }
        })
        .collect()
}

/// `||g||_{L^p(D)}` for `g(w) = sum_k c[k] w^k`.
///
/// Angles are sampled with an FFT of the coefficients at each radius; for
/// even integer `p` the resulting radial integrand is a polynomial and the
/// Gauss rule is exact up to rounding.
pub fn disc_lp_norm(c: &[Complex64], p: f64) -> f64 {
    let deg = c
        .iter()
        .rposition(|v| *v != Complex64::new(0.0, 0.0))
        .unwrap_or(0);
    let even = p.fract() == 0.0 && (p as i64) % 2 == 0;
    let band = (p.ceil() as usize) * deg / 2 + 1;
    let m = (2 * band + 2)
        .max(if even { 8 } else { 4 * deg + 64 })
        .next_power_of_two();
    let fft = FftPlanner::new().plan_fft_inverse(m);
    // radial integrand r * int |g(r e^{it})|^p dt
    let ring = |r: f64| -> f64 {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut rk = 1.0;
        for (k, ck) in c.iter().enumerate().take(deg + 1) {
            buf[k % m] += ck * rk;
            rk *= r;
        }
        fft.process(&mut buf);
        let vals: Vec<Complex64> = buf
            .iter()
            .map(|v| Complex64::new(abs_pow(*v, p), 0.0))
            .collect();
        pairwise_sum(&vals).re * TAU / m as f64 * r
    };
    let total: f64 = if even {
        let rule = gauss_legendre((p as usize) * deg / 2 + 2);
        rule.on_interval(0.0, 1.0).map(|(r, w)| ring(r) * w).sum()
    } else {
        // cells graded toward the boundary, where |g| varies fastest
        let rule = gauss_legendre((deg / 2 + 16).min(256));
        let mut acc = 0.0;
        let mut lo = 0.0;
        for j in 1..=10 {
            let hi = if j == 10 { 1.0 } else { 1.0 - 0.5f64.powi(j) };
            acc += rule
                .on_interval(lo, hi)
                .map(|(r, w)| ring(r) * w)
                .sum::<f64>();
            lo = hi;
        }
        acc
    };
    total.powf(1.0 / p)
}
