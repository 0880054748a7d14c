//! The transform `Φ` on the imaginary axis and its analytic lift to the strip
//! `χ > −4θ₁²`, with the continuous argument correction `φ̃`.
//!
//! `Φ(χ, x)` is `e^{iφ}·ψ·√(2π·ratio)` where the square root follows `arg ratio`
//! continuously along the real segment from `(0, x)` to `(χ, x)`. The
//! continuous argument is assembled as
//! `φ̃(χ, x) = arg ratio(0, x) − (3/2)·arctan(χ/x) + ∫₀^χ T(S−M) / (|z|·C·D) dχ′`
//! with `C = cosh a + cos b`, `M = cosh a − cos b`, `S = a sinh a + b sin b`,
//! `T = b sinh a − a sin b` and `D = (a²+b²)·C·|f|²`.
//!
//! The integrand has Lorentzian spikes of width `~x` at the poles of `f`
//! (`χ ≈ −(2k+1)²π²`) and a `(3/2)·x/|z|²` spike at the origin; both are
//! integrated after a `tan` substitution or analytically.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{
    f_of, f_over_z_log_derivative, ln_cosh_minus_cos, ln_cosh_plus_cos, phi_of, ratio, scaled,
    sqrt_halfplane, theta_root, LiftedComplex,
};
use crate::error::{Error, Result};
use crate::quad::{Adaptive, GaussKronrod};

/// Absolute tolerance of every piece of the `φ̃` integral.
const LIFT_TOL: f64 = 1e-10;

/// Below this `x` the origin spike is integrated analytically.
const ORIGIN_WINDOW_X: f64 = 0.25;

/// Half-width of the analytic window around the origin.
const ORIGIN_WINDOW: f64 = 0.25;

/// Below this `x` the pole spikes get a `tan`-substituted window.
const SPIKE_WINDOW_X: f64 = 1.0;

/// Maximal half-width of a spike window.
const SPIKE_WINDOW: f64 = 0.5;

/// Spike windows span at most this many spike widths `x` on either side;
/// beyond that the Lorentzian tail is left to the plain adaptive rule.
const SPIKE_WIDTHS: f64 = 100.0;

/// Relative distance to a branch point treated as hitting it.
const BRANCH_TOL: f64 = 1e-12;

/// `Φ(x)` on the imaginary axis:
/// `e^{iφ(0,x)} · [2x/(cosh√(2x) − cos√(2x))]^{1/4} · √(2π·ratio(0,x))`,
/// with the principal square root (`arg ratio(0, x) ∈ [0, π/2]`).
pub fn phi_axis(x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("phi_axis", format!("need x > 0, got {x}")));
    }
    let quarter_bracket = (0.25 * ln_axis_bracket(x)).exp();
    let r = ratio(0.0, x)?;
    let phase = phi_of(0.0, x)? + 0.5 * r.arg();
    Ok(Complex64::from_polar(quarter_bracket * (TAU * r.norm()).sqrt(), phase))
}

/// `ln[2x / (cosh s − cos s)]`, `s = √(2x)`.
fn ln_axis_bracket(x: f64) -> f64 {
    let s = (2.0 * x).sqrt();
    if x < 0.5 {
        // cosh s − cos s = 2 Σ_k s^{4k+2}/(4k+2)!  ⇒  bracket = 1/(2 Σ_k (4x²)^k/(4k+2)!).
        let q = 4.0 * x * x;
        let mut term = 0.5; // 1/2!
        let mut sum = term;
        let mut k = 0.0;
        while term > 1e-18 * sum {
            let n = 4.0 * k + 2.0;
            term *= q / ((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0));
            sum += term;
            k += 1.0;
        }
        -(2.0 * sum).ln()
    } else {
        (2.0 * x).ln() - ln_cosh_minus_cos(s, s)
    }
}

/// Continuous argument correction `φ̃(χ, x)`: the argument of `ratio(χ, x)`
/// followed continuously along the real segment from `(0, x)`.
///
/// At `x = 0` the value is the limit `x → 0⁺`: zero for `χ ≥ 0` and `π` per
/// pole `−(2k+1)²π²` passed for `χ < 0`; the points `χ = −4k²π²`, `−4θ_k²` and
/// `−(2k+1)²π²` are branch points there.
pub fn phi_tilde(chi: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !chi.is_finite() {
        return Err(Error::domain("phi_tilde", format!("need finite chi and x >= 0, got ({chi}, {x})")));
    }
    if x == 0.0 {
        return phi_tilde_on_axis(chi);
    }
    let base = ratio(0.0, x)?.arg() - 1.5 * (chi / x).atan();
    Ok(base + lift_integral(chi, x)?)
}

fn phi_tilde_on_axis(chi: f64) -> Result<f64> {
    if chi >= 0.0 {
        return Ok(0.0);
    }
    let b = (-chi).sqrt();
    let near = |c: f64| (b - c).abs() <= BRANCH_TOL * c.max(1.0);
    let mut passed = 0u32;
    let mut k = 0u32;
    loop {
        let pole = (2 * k + 1) as f64 * PI;
        let even = (2 * k + 2) as f64 * PI;
        let root = 2.0 * theta_root(k + 1)?.value;
        if near(pole) || near(even) || near(root) {
            return Err(Error::Branch { op: "phi_tilde", chi, x: 0.0 });
        }
        if pole < b {
            passed += 1;
        } else {
            break;
        }
        k += 1;
    }
    Ok(PI * passed as f64)
}

/// Integrand of the `φ̃` correction, `T(S−M) / (|z|·C·D)`, in overflow-free form.
fn lift_integrand(chi: f64, x: f64) -> f64 {
    let Ok(d) = sqrt_halfplane(chi, x) else { return 0.0 };
    let Ok(f) = f_of(chi, x) else { return 0.0 };
    let (a, b) = (d.a, d.b);
    let s = scaled(a, b);
    // Everything divided by cosh a (numerator and C by cosh² a overall).
    let t = b * s.tanh_a - a * s.sin_b;
    let s_minus_m = a * s.tanh_a + b * s.sin_b - s.cos_minus;
    let den = chi.hypot(x) * d.norm_sqr() * s.cos_plus * s.cos_plus * f.norm_sqr();
    t * s_minus_m / den
}

/// `∫₀^χ` of the lift integrand at fixed `x > 0`.
fn lift_integral(chi: f64, x: f64) -> Result<f64> {
    if chi == 0.0 {
        return Ok(0.0);
    }
    let sign = chi.signum();
    let span = chi.abs();
    let adaptive = Adaptive::new(GaussKronrod::QK61, LIFT_TOL).with_max_panels(4000);
    let mut total = 0.0;

    // Origin window: integrand = (3/2)x/|z|² − Im h(z), h = (f/z)′/(f/z).
    let mut inner = 0.0;
    if x < ORIGIN_WINDOW_X {
        let w0 = ORIGIN_WINDOW.min(span);
        let smooth = |c: f64| f_over_z_log_derivative(Complex64::new(c, x)).im;
        let q = adaptive.integrate(&smooth, 0.0, sign * w0);
        check(&q, "phi_tilde origin window")?;
        total += 1.5 * (sign * w0 / x).atan() - q.value;
        inner = w0;
    }
    if inner >= span {
        return Ok(total);
    }

    // Remaining interval [lo, hi] in absolute χ, oriented from the origin outward.
    let (lo, hi) = if sign > 0.0 { (inner, span) } else { (-span, -inner) };
    let mut cuts: Vec<(f64, f64, Option<f64>)> = Vec::new();
    if x < SPIKE_WINDOW_X {
        let mut k = 0u32;
        loop {
            let bk = (2 * k + 1) as f64 * PI;
            let centre = x * x / (4.0 * bk * bk) - bk * bk;
            if centre < lo {
                break;
            }
            if centre < hi {
                let w = SPIKE_WINDOW.min(SPIKE_WIDTHS * x).min(0.5 * (centre - lo)).min(0.5 * (hi - centre));
                if w > 0.0 {
                    cuts.push((centre - w, centre + w, Some(centre)));
                }
            }
            k += 1;
        }
    }
    cuts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut pieces = Vec::new();
    let mut cursor = lo;
    for (a, b, centre) in cuts {
        pieces.push((cursor, a, None));
        pieces.push((a, b, centre));
        cursor = b;
    }
    pieces.push((cursor, hi, None));

    let integrand = |c: f64| lift_integrand(c, x);
    let mut outer = 0.0;
    for (a, b, centre) in pieces {
        if b <= a {
            continue;
        }
        let value = match centre {
            None => {
                let q = adaptive.integrate(&integrand, a, b);
                check(&q, "phi_tilde segment")?;
                q.value
            }
            Some(c) => {
                // χ = c + x·tan t flattens the Lorentzian of width x.
                let t0 = ((a - c) / x).atan();
                let t1 = ((b - c) / x).atan();
                let g = |t: f64| {
                    let sec = 1.0 / t.cos();
                    lift_integrand(c + x * t.tan(), x) * x * sec * sec
                };
                // χ itself is only resolved to ulp(c), i.e. to a relative
                // ε·|c|/x of the spike width; no tolerance below that is reachable.
                let floor = f64::EPSILON * c.abs() / x * (t1 - t0);
                let q = Adaptive::new(GaussKronrod::QK61, LIFT_TOL.max(floor)).with_max_panels(4000).integrate(&g, t0, t1);
                check(&q, "phi_tilde spike window")?;
                q.value
            }
        };
        outer += value;
    }
    // `outer` integrates upward in χ; orient it from the origin to χ.
    Ok(total + sign * outer)
}

fn check(q: &crate::quad::QuadResult<f64>, op: &'static str) -> Result<()> {
    if q.flags.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            op,
            reason: format!("error estimate {:.3e} above tolerance", q.abs_error_estimate),
        })
    }
}

/// Analytically lifted `Φ(χ, x)` as modulus and continuous argument.
///
/// `|Φ| = √(2π)·(a²+b²)·(cosh a − cos b)^{−1/4}·D^{−1/4}` with
/// `D = (a²+b²)(cosh a + cos b) − 4(a sinh a + b sin b) + 4(cosh a − cos b)`,
/// and `arg Φ = φ(χ, x) + φ̃(χ, x)/2`. Defined for `χ > −4θ₁²`, `x ≥ 0`; the
/// value at the origin is the limit `√(24π)`.
pub fn phi_lift_polar(chi: f64, x: f64) -> Result<LiftedComplex> {
    let t1 = theta_root(1)?.value;
    if !(chi > -4.0 * t1 * t1) || !(x >= 0.0) || !x.is_finite() || !chi.is_finite() {
        return Err(Error::domain("phi_lift", format!("need chi > -4θ₁² and x >= 0, got ({chi}, {x})")));
    }
    if chi == 0.0 && x == 0.0 {
        return Ok(LiftedComplex { modulus: (24.0 * PI).sqrt(), argument: 0.0 });
    }
    let argument = phi_of(chi, x)? + 0.5 * phi_tilde(chi, x)?;
    let d = sqrt_halfplane(chi, x)?;
    let f = f_of(chi, x)?;
    let n2 = d.norm_sqr();
    // D = (a²+b²)·C·|f|² (exact identity, free of cancellation near the origin).
    let ln_d = n2.ln() + ln_cosh_plus_cos(d.a, d.b) + f.norm_sqr().ln();
    let ln_mod = 0.5 * TAU.ln() + n2.ln() - 0.25 * ln_cosh_minus_cos(d.a, d.b) - 0.25 * ln_d;
    if !ln_mod.is_finite() {
        return Err(Error::Branch { op: "phi_lift", chi, x });
    }
    Ok(LiftedComplex { modulus: ln_mod.exp(), argument })
}

/// Analytically lifted `Φ(χ, x)` (see [`phi_lift_polar`]).
pub fn phi_lift(chi: f64, x: f64) -> Result<Complex64> {
    phi_lift_polar(chi, x).map(|l| l.to_complex())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Sign-continuous oracle: Φ² = 2π·(γ/sinh γ)·(γ²/f) is single valued; step
    /// along χ and keep the square root nearest to the previous value.
    fn continuation_oracle(chi: f64, x: f64, steps: usize) -> Complex64 {
        let mut cur = phi_axis(x).unwrap();
        for i in 1..=steps {
            let c = chi * i as f64 / steps as f64;
            let z = Complex64::new(c, x);
            let g = z.sqrt();
            let sq = (g / g.sinh()) * (z / f_of(c, x).unwrap()) * TAU;
            let r = sq.sqrt();
            cur = if (r - cur).norm() < (r + cur).norm() { r } else { -r };
        }
        cur
    }

    #[test]
    fn lift_agrees_with_axis() {
        for x in [0.5, 1.0, 5.0] {
            let axis = phi_axis(x).unwrap();
            let lift = phi_lift(0.0, x).unwrap();
            assert!((axis - lift).norm() < 1e-9 * axis.norm(), "x = {x}: {axis} vs {lift}");
        }
    }

    #[test]
    fn axis_two_assembly_routes() {
        // Route B: sinh_lift modulus for the bracket, real-form f, sinh_lift phase.
        let x: f64 = 1.0;
        let d = sqrt_halfplane(0.0, x).unwrap();
        let sl = super::super::sinh_lift(d.a, d.b).unwrap();
        let bracket = d.norm_sqr() / (sl.modulus * sl.modulus);
        let f = super::super::f_real_form(&d, 0.0, x).unwrap();
        let r = Complex64::new(0.0, x) / f;
        let phase = 0.5 * d.b.atan2(d.a) - 0.5 * sl.argument + 0.5 * r.arg();
        let b_route = Complex64::from_polar(bracket.powf(0.25) * (TAU * r.norm()).sqrt(), phase);
        assert!((phi_axis(x).unwrap() - b_route).norm() < 1e-12 * b_route.norm());
    }

    #[test]
    fn axis_small_x_limit() {
        let v = phi_axis(1e-10).unwrap();
        assert_relative_eq!(v.re, (24.0 * PI).sqrt(), max_relative = 1e-8);
        assert!(v.im.abs() < 1e-8);
    }

    #[test]
    fn lift_matches_continuation_oracle() {
        for (chi, x) in [(-3.0, 1.0), (-12.0, 0.5), (-30.0, 0.2), (-38.0, 0.05), (-39.0, 1.0), (3.0, 2.0), (5.0, 0.3)] {
            let lift = phi_lift(chi, x).unwrap();
            let oracle = continuation_oracle(chi, x, 100_000);
            assert!((lift - oracle).norm() < 1e-6 * oracle.norm().max(1e-3), "({chi}, {x}): {lift} vs {oracle}");
        }
    }

    #[test]
    fn phi_tilde_is_continuous_in_chi() {
        let x = 0.05;
        let mut prev = phi_tilde(0.0, x).unwrap();
        for i in 1..=400 {
            let chi = -0.1 * i as f64;
            let cur = phi_tilde(chi, x).unwrap();
            assert!((cur - prev).abs() < std::f64::consts::FRAC_PI_2, "jump at chi = {chi}");
            prev = cur;
        }
    }

    #[test]
    fn phi_tilde_axis_limit() {
        for chi in [-5.0, -20.0, 3.0] {
            let at_zero = phi_tilde(chi, 0.0).unwrap();
            let near = phi_tilde(chi, 1e-9).unwrap();
            assert!((at_zero - near).abs() < 1e-6, "chi = {chi}: {at_zero} vs {near}");
        }
        assert!(matches!(phi_tilde(-PI * PI, 0.0), Err(Error::Branch { .. })));
        assert!(matches!(phi_tilde(-4.0 * PI * PI, 0.0), Err(Error::Branch { .. })));
    }

    #[test]
    fn lift_domain() {
        assert!(phi_lift(-100.0, 1.0).is_err());
        assert_relative_eq!(phi_lift(0.0, 0.0).unwrap().re, (24.0 * PI).sqrt());
    }
}
