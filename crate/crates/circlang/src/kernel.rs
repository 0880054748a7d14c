//! Regime classification and the three small-time log-density equivalents of
//! the heat kernel `p_ε(start; target)`.
//!
//! Everything is returned in log space: at small `ε` the exponents reach
//! `−10⁴` and would underflow if exponentiated.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::malliavin::{delta, homogenize, psi_quad, TargetPoint};
use crate::quad::{sigma_const, sigma_prime_const};

/// Which equivalent governs a (homogenized) target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `w ≠ 0`: Gaussian-type behaviour driven by `Δ(w)` and `ψ`.
    NonDegenerate,
    /// `w = 0`, `z = 0`, `y ≤ 0`.
    DegenerateAxis,
    /// `w = 0` and (`z ≠ 0` or `y > 0`).
    DegenerateGeneric,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::NonDegenerate => "NonDegenerate",
            Regime::DegenerateAxis => "DegenerateAxis",
            Regime::DegenerateGeneric => "DegenerateGeneric",
        };
        f.write_str(s)
    }
}

/// `log p_ε ≈ log_prefactor + exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDensityAsymptote {
    pub regime: Regime,
    /// Log of the non-exponential factor, all powers of `ε` included.
    pub log_prefactor: f64,
    /// The leading exponential argument.
    pub exponent: f64,
    pub epsilon: f64,
}

impl LogDensityAsymptote {
    /// `log_prefactor + exponent`.
    pub fn log_density(&self) -> f64 {
        self.log_prefactor + self.exponent
    }
}

/// Regime of a homogenized target; `w` is compared to zero exactly.
pub fn classify(p: TargetPoint) -> Regime {
    if p.w != 0.0 {
        Regime::NonDegenerate
    } else if p.z == 0.0 && p.y <= 0.0 {
        Regime::DegenerateAxis
    } else {
        Regime::DegenerateGeneric
    }
}

/// Tolerance at which the cached constants are computed.
const CONSTANT_TOL: f64 = 1e-10;

/// `σ = ∫₀^∞ sin(π/8 + x − ½ arctan x)/(1+x²)^{1/4} dx`, computed once.
pub fn sigma() -> f64 {
    static SIGMA: OnceLock<f64> = OnceLock::new();
    *SIGMA.get_or_init(|| sigma_const(CONSTANT_TOL).value)
}

/// `σ′ = ∫₀^∞ sin(3π/16 + x)/x^{1/4} dx`, computed once.
pub fn sigma_prime() -> f64 {
    static SIGMA_PRIME: OnceLock<f64> = OnceLock::new();
    *SIGMA_PRIME.get_or_init(|| sigma_prime_const(CONSTANT_TOL).value)
}

/// `π − 2 tanh(π/2)`, the curvature coefficient of the generic singular regime.
pub fn curvature_gap() -> f64 {
    PI - 2.0 * (0.5 * PI).tanh()
}

/// Diagnostic constant `π(π cosh π − 3 sinh π + 2π) / (4(π cosh(π/2) − 2 sinh(π/2))²)`.
pub fn c_squared_diagnostic() -> f64 {
    let num = PI * (PI * PI.cosh() - 3.0 * PI.sinh() + 2.0 * PI);
    let den = 4.0 * (PI * (0.5 * PI).cosh() - 2.0 * (0.5 * PI).sinh()).powi(2);
    num / den
}

fn check_eps(op: &'static str, eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("epsilon must be positive and finite, got {eps}")))
    }
}

/// Non-degenerate regime `w ≠ 0`:
/// `p_ε ≈ w²/(π ε³ √(2πεΔ(w))) · exp[−(w²/ε)(½ + ψ(w, y/ε, z/ε)/Δ(w))]`.
pub fn p_case_i(eps: f64, w: f64, y: f64, z: f64) -> Result<LogDensityAsymptote> {
    check_eps("p_case_i", eps)?;
    let d = delta(w)?;
    let psi = psi_quad(w, y / eps, z / eps)?;
    let w2 = w * w;
    let log_prefactor = w2.ln() - PI.ln() - 3.0 * eps.ln() - 0.5 * (2.0 * PI * eps * d).ln();
    let exponent = -(w2 / eps) * (0.5 + psi / d);
    Ok(LogDensityAsymptote { regime: Regime::NonDegenerate, log_prefactor, exponent, epsilon: eps })
}

/// Axis regime `w = 0, z = 0, y ≤ 0`:
/// `p_ε ≈ 2√2·e·σ/(ε³√(ε − y)) · exp[−4π²(ε − y)/ε²]`.
pub fn p_case_ii(eps: f64, y: f64) -> Result<LogDensityAsymptote> {
    check_eps("p_case_ii", eps)?;
    if !(y <= 0.0) {
        return Err(Error::domain("p_case_ii", format!("the axis regime needs y <= 0, got {y}")));
    }
    let log_prefactor = (2.0 * std::f64::consts::SQRT_2 * std::f64::consts::E * sigma()).ln()
        - 3.0 * eps.ln()
        - 0.5 * (eps - y).ln();
    let exponent = -4.0 * PI * PI * (eps - y) / (eps * eps);
    Ok(LogDensityAsymptote { regime: Regime::DegenerateAxis, log_prefactor, exponent, epsilon: eps })
}

/// `C_ε(y, z) = πz²/(2(π − 2 tanh(π/2))ε³) + (y − ε)/ε²`.
pub fn c_eps(eps: f64, y: f64, z: f64) -> f64 {
    PI * z * z / (2.0 * curvature_gap() * eps.powi(3)) + (y - eps) / (eps * eps)
}

/// Generic singular regime `w = 0`, `z ≠ 0` or `y > 0`:
/// `p_ε ≈ (2π/sinh π)^{1/4} σ′ / (√(π − 2 tanh(π/2)) ε⁴ C_ε^{3/4}) · exp[−π² C_ε]`.
pub fn p_case_iii(eps: f64, y: f64, z: f64) -> Result<LogDensityAsymptote> {
    check_eps("p_case_iii", eps)?;
    if z == 0.0 && y <= 0.0 {
        return Err(Error::domain("p_case_iii", "z = 0, y <= 0 belongs to the axis regime"));
    }
    let c = c_eps(eps, y, z);
    if !(c > 0.0) {
        return Err(Error::domain("p_case_iii", format!("C_eps = {c} is not positive")));
    }
    let log_prefactor = 0.25 * (2.0 * PI / PI.sinh()).ln() + sigma_prime().ln()
        - 0.5 * curvature_gap().ln()
        - 4.0 * eps.ln()
        - 0.75 * c.ln();
    let exponent = -PI * PI * c;
    Ok(LogDensityAsymptote { regime: Regime::DegenerateGeneric, log_prefactor, exponent, epsilon: eps })
}

/// Homogenizes, classifies and dispatches to the matching equivalent.
pub fn p_general(eps: f64, start: TargetPoint, target: TargetPoint) -> Result<LogDensityAsymptote> {
    let p = homogenize(start, target);
    match classify(p) {
        Regime::NonDegenerate => p_case_i(eps, p.w, p.y, p.z),
        Regime::DegenerateAxis => p_case_ii(eps, p.y),
        Regime::DegenerateGeneric => p_case_iii(eps, p.y, p.z),
    }
}

/// `true` iff `(y, z)` lies in the closed disc of radius `ε`, outside of which
/// the density at time `ε` vanishes.
pub fn support_indicator(eps: f64, y: f64, z: f64) -> bool {
    y * y + z * z <= eps * eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::{compose, psi_zero_point};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn classification_examples() {
        assert_eq!(classify(TargetPoint::new(1.0, 0.2, 0.1)), Regime::NonDegenerate);
        assert_eq!(classify(TargetPoint::new(0.0, -0.5, 0.0)), Regime::DegenerateAxis);
        assert_eq!(classify(TargetPoint::new(0.0, 0.3, 0.0)), Regime::DegenerateGeneric);
        assert_eq!(classify(TargetPoint::new(0.0, 0.0, 0.0)), Regime::DegenerateAxis);
    }

    proptest! {
        #[test]
        fn regimes_partition_space(w in prop::sample::select(vec![0.0, 1.0, -2.5]),
                                   y in prop::sample::select(vec![-1.0, 0.0, 0.5]),
                                   z in prop::sample::select(vec![0.0, 0.3, -0.2])) {
            let p = TargetPoint::new(w, y, z);
            let hits = [
                w != 0.0,
                w == 0.0 && z == 0.0 && y <= 0.0,
                w == 0.0 && (z != 0.0 || y > 0.0),
            ];
            prop_assert_eq!(hits.iter().filter(|h| **h).count(), 1);
            let expected = [Regime::NonDegenerate, Regime::DegenerateAxis, Regime::DegenerateGeneric]
                [hits.iter().position(|h| *h).unwrap()];
            prop_assert_eq!(classify(p), expected);
        }

        #[test]
        fn case_i_scale_invariance(w in 0.2f64..4.0, yh in -0.9f64..0.9, zh in -0.9f64..0.9) {
            let reference = w * w * (0.5 + psi_quad(w, yh, zh).unwrap() / delta(w).unwrap());
            for eps in [0.3, 0.1, 0.01] {
                let a = p_case_i(eps, w, eps * yh, eps * zh).unwrap();
                prop_assert!((-eps * a.exponent - reference).abs() <= 1e-10 * reference);
            }
        }

        #[test]
        fn case_i_reflection_symmetry(w in 0.1f64..5.0, y in -0.1f64..0.1, z in -0.1f64..0.1) {
            let a = p_case_i(0.1, w, y, z).unwrap();
            let b = p_case_i(0.1, -w, y, -z).unwrap();
            prop_assert!((a.log_density() - b.log_density()).abs() <= 1e-9 * a.log_density().abs());
        }

        #[test]
        fn group_shift_commutes(sw in -3.0f64..3.0, sy in -1.0f64..1.0, sz in -1.0f64..1.0,
                                gw in -3.0f64..3.0, gy in -1.0f64..1.0, gz in -1.0f64..1.0,
                                tw in -3.0f64..3.0) {
            let s = TargetPoint::new(sw, sy, sz);
            let g = TargetPoint::new(gw, gy, gz);
            let t = TargetPoint::new(tw, 0.3, -0.2);
            let direct = p_general(0.5, s, t).unwrap();
            let shifted = p_general(0.5, compose(g, s), compose(g, t)).unwrap();
            prop_assert!((direct.log_density() - shifted.log_density()).abs() <= 1e-8 * direct.log_density().abs().max(1.0));
        }
    }

    #[test]
    fn case_i_zero_point_exponent() {
        for w in [0.5, 1.0, 3.0] {
            let eps = 0.1;
            let (y0, z0) = psi_zero_point(w);
            let a = p_case_i(eps, w, eps * y0, eps * z0).unwrap();
            assert_relative_eq!(a.exponent, -w * w / (2.0 * eps), max_relative = 1e-12);
        }
    }

    #[test]
    fn case_ii_examples() {
        let a = p_case_ii(0.3, 0.0).unwrap();
        assert_relative_eq!(a.exponent, -4.0 * PI * PI / 0.3, max_relative = 1e-15);
        let a = p_case_ii(0.05, -1.0).unwrap();
        assert_relative_eq!(a.exponent, -4.0 * PI * PI * 1.05 / 0.0025, max_relative = 1e-14);
        assert!(sigma() > 0.1);
        assert!(p_case_ii(0.1, 0.1).is_err());
    }

    #[test]
    fn case_iii_examples() {
        let (eps, y) = (0.02, 0.5);
        assert_relative_eq!(c_eps(eps, y, 0.0), (y - eps) / (eps * eps), max_relative = 1e-15);
        assert!(sigma_prime() > 0.1);
        // Against the simplified on-axis (z = 0) form ε^{−5/2} y^{−3/4}(…)·e^{−π²(y−ε)/ε²}: the
        // two differ exactly by (y/(y − ε))^{3/4}, which tends to 1 as ε → 0.
        let on_axis = -2.5 * eps.ln() - 0.75 * y.ln() + 0.25 * (2.0 * PI / PI.sinh()).ln()
            - 0.5 * curvature_gap().ln()
            + sigma_prime().ln()
            - PI * PI * (y - eps) / (eps * eps);
        let a = p_case_iii(eps, y, 0.0).unwrap();
        let expected_gap = 0.75 * (y / (y - eps)).ln();
        assert!((a.log_density() - on_axis - expected_gap).abs() < 1e-10 * on_axis.abs());
        assert!(p_case_iii(0.1, 0.05, 0.0).is_err());
    }

    #[test]
    fn case_iii_continuous_in_z() {
        let a = p_case_iii(0.05, 0.2, 0.0).unwrap();
        let b = p_case_iii(0.05, 0.2, 1e-9).unwrap();
        assert!((a.log_density() - b.log_density()).abs() < 1e-6);
    }

    #[test]
    fn general_dispatch() {
        let direct = p_case_i(0.1, 1.0, 0.08, 0.03).unwrap();
        let general = p_general(0.1, TargetPoint::ORIGIN, TargetPoint::new(1.0, 0.08, 0.03)).unwrap();
        assert_eq!(direct, general);
        let start = TargetPoint::new(PI / 2.0, 1.0, 1.0);
        let target = TargetPoint::new(PI / 2.0 + 1.0, 1.08, 1.03);
        let h = homogenize(start, target);
        assert_eq!(p_general(0.1, start, target).unwrap(), p_case_i(0.1, h.w, h.y, h.z).unwrap());
    }

    #[test]
    fn support_examples() {
        assert!(support_indicator(1.0, 0.6, 0.6));
        assert!(!support_indicator(1.0, 1.0, 0.1));
    }

    #[test]
    fn exponents_non_positive_and_prefactors_finite() {
        for eps in [0.5, 0.1, 0.01] {
            for w in [-2.0, -0.5, 0.5, 2.0] {
                let a = p_case_i(eps, w, 0.3 * eps, -0.2 * eps).unwrap();
                assert!(a.exponent <= 0.0 && a.log_prefactor.is_finite());
            }
            let a = p_case_ii(eps, -0.3).unwrap();
            assert!(a.exponent <= 0.0 && a.log_prefactor.is_finite());
            let a = p_case_iii(eps, 0.8, 0.1).unwrap();
            assert!(a.exponent <= 0.0 && a.log_prefactor.is_finite());
        }
    }

    #[test]
    fn c_squared_is_a_finite_diagnostic() {
        let c2 = c_squared_diagnostic();
        assert!((c2 - 0.5879015739378239).abs() < 1e-12);
    }
}
