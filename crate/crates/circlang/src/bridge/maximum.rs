//! Law of `ω* = max_{s∈[0,1]} |ω_s|` for a Brownian bridge (the Kolmogorov
//! distribution) and exact sampling of `ω*` given a discretised path.

use std::f64::consts::PI;

use rand::Rng;

use super::BridgePath;

/// Switch between the two series representations.
const SWITCH: f64 = 0.8;

/// Absolute size of the first neglected term.
const SERIES_TAIL: f64 = 1e-17;

/// `P(ω* < y) = 1 + 2Σ_{n≥1}(−1)ⁿ·exp(−2n²y²)`; converges fast for large `y`.
pub fn wstar_cdf_alternating(y: f64) -> f64 {
    if !(y > 0.0) {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut n = 1.0;
    loop {
        let term = (-2.0 * n * n * y * y).exp();
        sum += if (n as u64) % 2 == 1 { -term } else { term };
        if term < SERIES_TAIL || n > 1e4 {
            break;
        }
        n += 1.0;
    }
    1.0 + 2.0 * sum
}

/// `P(ω* < y) = (√(2π)/y)·Σ_{k≥1} exp(−(2k−1)²π²/(8y²))` (theta transform of
/// the alternating series); converges fast for small `y`.
pub fn wstar_cdf_dual(y: f64) -> f64 {
    if !(y > 0.0) {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        let m = 2.0 * k - 1.0;
        let term = (-(m * m) * PI * PI / (8.0 * y * y)).exp();
        sum += term;
        if term < SERIES_TAIL * y || k > 1e4 {
            break;
        }
        k += 1.0;
    }
    (2.0 * PI).sqrt() / y * sum
}

/// `P(ω* < y)`, choosing the faster series.
pub fn wstar_cdf(y: f64) -> f64 {
    if y >= SWITCH {
        wstar_cdf_alternating(y)
    } else {
        wstar_cdf_dual(y)
    }
}

/// `max |ω|` of a bridge through the grid values of `path`.
///
/// On each interval of length `h` with end values `a`, `b`, the maximum of the
/// interpolating bridge is `(a + b + √((b − a)² − 2h·ln U))/2` with `U`
/// uniform, and symmetrically for the minimum; both are drawn from their
/// exact conditional laws.
pub fn sample_abs_max<R: Rng + ?Sized>(path: &BridgePath, rng: &mut R) -> f64 {
    let v = path.values();
    let h = 1.0 / path.n_steps() as f64;
    let mut best: f64 = 0.0;
    for pair in v.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let d2 = (b - a) * (b - a);
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = 1.0 - rng.random::<f64>();
        let hi = 0.5 * (a + b + (d2 - 2.0 * h * u1.ln()).sqrt());
        let lo = 0.5 * (a + b - (d2 - 2.0 * h * u2.ln()).sqrt());
        best = best.max(hi).max(-lo);
    }
    best
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::mc::path_rng;
    use crate::bridge::sample_bridge;

    #[test]
    fn series_agree() {
        for y in [0.5, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0] {
            let (a, b) = (wstar_cdf_alternating(y), wstar_cdf_dual(y));
            assert!((a - b).abs() <= 1e-12, "y = {y}: {a} vs {b}");
        }
        assert_eq!(wstar_cdf(0.0), 0.0);
        assert!(wstar_cdf(0.05) >= 0.0 && wstar_cdf(0.05) < 1e-100);
        assert!((wstar_cdf(10.0) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn tail_bound() {
        for t in [0.5, 1.0, 2.0, 4.0] {
            assert!(1.0 - wstar_cdf(f64::sqrt(t)) < 2.0 * (-2.0 * t).exp());
        }
    }

    #[test]
    fn monotone() {
        let mut prev = 0.0;
        for i in 1..400 {
            let v = wstar_cdf(i as f64 * 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn sampled_maximum_matches_law() {
        let mut sample: Vec<f64> = (0..20_000u64)
            .map(|i| {
                let mut rng = path_rng(11, i);
                let p = sample_bridge(64, &mut rng).unwrap();
                sample_abs_max(&p, &mut rng)
            })
            .collect();
        assert!(ks_distance(&mut sample, wstar_cdf) < 0.015);
    }
}
