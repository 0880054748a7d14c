//! Direct quadrature of the singular-case axis integral
//!
//! ```text
//! I_ε(y, z) = 2·Re ∫₀^∞ exp[i·ν·x − κ·ratio(0, x)]·Φ(x) dx,
//! ν = (ε − y)/ε²,  κ = z²/(2ε³),
//! ```
//!
//! and of the modulus integral `∫₀^∞ |Φ(x)| dx`.
//!
//! The integrand is cut where its modulus falls below [`TAIL_CUT`] of its
//! peak (`|Φ(x)| = O(x·e^{−√(x/8)})`), split into panels no longer than one
//! oscillation period, integrated panel by panel in parallel and summed in a
//! fixed pairwise order. For small `ε` the result is exponentially small
//! against `∫|integrand|`; once the ratio exceeds [`CANCELLATION_LIMIT`] the
//! computation is refused with [`Error::Cancellation`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::constants::pairwise_sum;
use super::gk::{gauss_legendre, Adaptive, GaussKronrod};
use super::{QuadFlags, QuadResult, CANCELLATION_LIMIT};
use crate::error::{Error, Result};
use crate::specfun::{phi_axis, ratio};

/// Relative level (to the peak modulus) at which the integrand is truncated.
pub const TAIL_CUT: f64 = 1e-18;

/// Largest abscissa scanned for the truncation point.
const MAX_CUT: f64 = 1e7;

/// Truncation point: first point of a geometric scan past the peak where the
/// envelope `g` drops below `TAIL_CUT·peak`.
fn truncation_point(g: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let mut x = 1e-3;
    let mut peak: f64 = 0.0;
    while x < MAX_CUT {
        let v = g(x);
        peak = peak.max(v);
        if peak > 0.0 && v < TAIL_CUT * peak && x > 1.0 {
            return Ok((x, peak));
        }
        x *= 1.05;
    }
    Err(Error::NonConvergence { op: "tail truncation", reason: format!("envelope above {TAIL_CUT:e} of peak up to x = {MAX_CUT:e}") })
}

/// Splits `[0, end]` into panels no longer than `length`.
fn panels(end: f64, length: f64) -> Vec<(f64, f64)> {
    let n = (end / length).ceil().max(1.0) as usize;
    let h = end / n as f64;
    (0..n).map(|i| (i as f64 * h, if i + 1 == n { end } else { (i + 1) as f64 * h })).collect()
}

/// `I_ε(y, z)` by direct oscillatory quadrature to absolute tolerance `tol`.
///
/// Fails with [`Error::Cancellation`] when `∫|integrand| / |I_ε|` exceeds
/// [`CANCELLATION_LIMIT`], which happens for small `ε` where `I_ε` is
/// exponentially small.
pub fn i_eps_direct(eps: f64, y: f64, z: f64, tol: f64) -> Result<QuadResult<f64>> {
    if !(eps > 0.0) || !eps.is_finite() || !y.is_finite() || !z.is_finite() {
        return Err(Error::domain("i_eps_direct", format!("need eps > 0 and finite y, z; got ({eps}, {y}, {z})")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("i_eps_direct", format!("need tol > 0, got {tol}")));
    }
    let nu = (eps - y) / (eps * eps);
    let kappa = z * z / (2.0 * eps.powi(3));
    let integrand = |x: f64| -> Complex64 {
        let (Ok(phi), Ok(r)) = (phi_axis(x), ratio(0.0, x)) else {
            return Complex64::new(f64::NAN, f64::NAN);
        };
        (Complex64::new(-kappa * r.re, nu * x - kappa * r.im)).exp() * phi
    };
    let (end, _) = truncation_point(|x| integrand(x).norm())?;
    // The phase advances at rate ≈ ν − κ for large x (Im ratio ≈ x); also
    // keep panels short compared with the slow variation of Φ itself.
    let rate = nu.abs().max((nu - kappa).abs()).max(1.0);
    let pieces = panels(end, TAU / rate);
    let per_panel = (0.5 * tol / pieces.len() as f64).max(1e-16);
    let adaptive = Adaptive::new(GaussKronrod::QK21, per_panel).with_rel_tol(0.0).with_max_panels(200);
    let results: Vec<QuadResult<Complex64>> = pieces.par_iter().map(|&(a, b)| adaptive.integrate(&integrand, a, b)).collect();
    if results.iter().any(|q| !q.value.re.is_finite() || !q.value.im.is_finite()) {
        return Err(Error::NonConvergence { op: "i_eps_direct", reason: "integrand not finite".into() });
    }
    let re: Vec<f64> = results.iter().map(|q| q.value.re).collect();
    let value = 2.0 * pairwise_sum(&re);
    let abs_integral = 2.0 * pairwise_sum(&results.iter().map(|q| q.abs_integral).collect::<Vec<_>>());
    let err = 2.0 * results.iter().map(|q| q.abs_error_estimate).sum::<f64>();
    let n_evals = results.iter().map(|q| q.n_evals).sum();
    let ratio = if value == 0.0 { f64::INFINITY } else { abs_integral / value.abs() };
    if ratio > CANCELLATION_LIMIT {
        return Err(Error::Cancellation { op: "i_eps_direct", ratio, limit: CANCELLATION_LIMIT });
    }
    let converged = err <= tol && results.iter().all(|q| q.flags.converged);
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        n_evals,
        abs_integral,
        flags: QuadFlags { converged, tail_extrapolated: false, cancellation_suspect: ratio > 1e4 },
    })
}

/// Strategy for [`phi_axis_l1_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Strategy {
    /// Adaptive Gauss–Kronrod on unit panels in `x`.
    Adaptive,
    /// `x = u²` and fixed composite Gauss–Legendre panels in `u`.
    SquareRoot,
}

/// `∫₀^∞ |Φ(x)| dx` by the default ([`L1Strategy::Adaptive`]) strategy.
pub fn phi_axis_l1(tol: f64) -> Result<QuadResult<f64>> {
    phi_axis_l1_with(L1Strategy::Adaptive, tol)
}

/// `∫₀^∞ |Φ(x)| dx` by an explicit strategy.
pub fn phi_axis_l1_with(strategy: L1Strategy, tol: f64) -> Result<QuadResult<f64>> {
    let modulus = |x: f64| phi_axis(x).map(|p| p.norm()).unwrap_or(f64::NAN);
    let (end, peak) = truncation_point(modulus)?;
    let values: Vec<(f64, f64, usize, bool)> = match strategy {
        L1Strategy::Adaptive => {
            let pieces = panels(end, 8.0);
            let adaptive = Adaptive::new(GaussKronrod::QK61, (tol / pieces.len() as f64).max(1e-17)).with_rel_tol(0.0);
            pieces
                .par_iter()
                .map(|&(a, b)| {
                    let q = adaptive.integrate(&modulus, a, b);
                    (q.value, q.abs_error_estimate, q.n_evals, q.flags.converged)
                })
                .collect()
        }
        L1Strategy::SquareRoot => {
            let (nodes, weights) = gauss_legendre(32);
            let u_end = end.sqrt();
            let pieces = panels(u_end, 0.25);
            let rule = |a: f64, b: f64| -> f64 {
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                nodes.iter().zip(&weights).map(|(t, w)| {
                    let u = mid + half * t;
                    w * 2.0 * u * modulus(u * u)
                }).sum::<f64>() * half
            };
            pieces
                .par_iter()
                .map(|&(a, b)| {
                    let whole = rule(a, b);
                    let m = 0.5 * (a + b);
                    let split = rule(a, m) + rule(m, b);
                    let err = (whole - split).abs();
                    (split, err, 96, err <= tol)
                })
                .collect()
        }
    };
    let value = pairwise_sum(&values.iter().map(|v| v.0).collect::<Vec<_>>());
    let err = values.iter().map(|v| v.1).sum::<f64>() + TAIL_CUT * peak * end;
    if !value.is_finite() {
        return Err(Error::NonConvergence { op: "phi_axis_l1", reason: "integrand not finite".into() });
    }
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        n_evals: values.iter().map(|v| v.2).sum(),
        abs_integral: value,
        flags: QuadFlags { converged: err <= tol && values.iter().all(|v| v.3), tail_extrapolated: false, cancellation_suspect: false },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_dual_strategies_agree() {
        let a = phi_axis_l1_with(L1Strategy::Adaptive, 1e-9).unwrap();
        let b = phi_axis_l1_with(L1Strategy::SquareRoot, 1e-9).unwrap();
        assert!(a.value.is_finite() && a.value > 0.0);
        assert!((a.value - b.value).abs() < 1e-6, "{} vs {}", a.value, b.value);
        assert!(a.flags.converged, "{a:?}");
    }

    /// `ν = (ε − y)/ε²` for a given `ε`.
    fn y_for(eps: f64, nu: f64) -> f64 {
        eps - nu * eps * eps
    }

    #[test]
    fn small_frequency_converges_and_is_stable() {
        let y = y_for(0.5, 0.1);
        let q = i_eps_direct(0.5, y, 0.0, 1e-8).unwrap();
        assert!(q.flags.converged, "{q:?}");
        assert!(q.value > 0.0);
        let h = i_eps_direct(0.5, y, 0.0, 5e-9).unwrap();
        assert!((q.value - h.value).abs() <= q.abs_error_estimate + h.abs_error_estimate + 1e-12);
    }

    #[test]
    fn decay_rate_matches_singular_saddle() {
        // I_ε ~ e^{−4π²ν}: the log-slope between ν = 0.3 and 0.4 is close to −4π².
        let a = i_eps_direct(0.5, y_for(0.5, 0.3), 0.0, 1e-10).unwrap().value;
        let b = i_eps_direct(0.5, y_for(0.5, 0.4), 0.0, 1e-10).unwrap().value;
        let slope = (b.ln() - a.ln()) / 0.1;
        let target = -4.0 * std::f64::consts::PI.powi(2);
        assert!((slope - target).abs() < 0.1 * target.abs(), "slope {slope}");
    }

    #[test]
    fn unit_frequency_is_beyond_double_precision() {
        // At ν = 1 the value is ~e^{−4π²} against ∫|integrand| = O(10).
        match i_eps_direct(0.5, y_for(0.5, 1.0), 0.0, 1e-8) {
            Err(Error::Cancellation { ratio, .. }) => assert!(ratio > 1e12),
            other => panic!("expected cancellation error, got {other:?}"),
        }
        assert!(matches!(i_eps_direct(0.5, 0.0, 0.2, 1e-8), Err(Error::Cancellation { .. })));
    }

    #[test]
    fn damped_case_converges() {
        let q = i_eps_direct(1.0, 0.9, 0.3, 1e-8).unwrap();
        assert!(q.flags.converged, "{q:?}");
        assert!(q.value.is_finite());
        let h = i_eps_direct(1.0, 0.9, 0.3, 5e-9).unwrap();
        assert!((q.value - h.value).abs() <= q.abs_error_estimate + h.abs_error_estimate + 1e-12);
    }

    #[test]
    fn small_eps_is_refused() {
        match i_eps_direct(0.02, 0.0, 0.0, 1e-10) {
            Err(Error::Cancellation { ratio, .. }) => assert!(ratio > CANCELLATION_LIMIT),
            other => panic!("expected cancellation error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(i_eps_direct(0.0, 0.0, 0.0, 1e-8).is_err());
        assert!(i_eps_direct(0.1, 0.0, 0.0, 0.0).is_err());
    }
}
