//! Complex special functions with explicit continuous branch lifts.
//!
//! Everything here is a function of the complex parameter `z = χ + i·x` with
//! `x ≥ 0`, written through its principal square root `γ = a + i·b`
//! (`a, b ≥ 0`, see [`sqrt_halfplane`]). The key objects are
//!
//! * `f(χ, x) = 1 − tanh(γ/2)/(γ/2)` and `ratio(χ, x) = z / f(χ, x)`;
//! * the phase `φ(χ, x)` built from the continuous argument of `sinh γ`;
//! * the modulus factor `ψ(χ, x) = [|γ|² / |sinh γ|²]^{1/4}`;
//! * the transform `Φ`, on the imaginary axis ([`phi_axis`]) and lifted to
//!   the strip ([`phi_lift`]), whose argument is tracked continuously.
//!
//! Near `z = 0` the closed forms cancel catastrophically; there the functions
//! switch to Taylor series of `tanh t / t` (radius `|z| < π²`).

mod lift;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use lift::{phi_axis, phi_lift, phi_lift_polar, phi_tilde};

/// Principal square root `a + i·b` of `χ + i·x` in the closed first quadrant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtDecomp {
    pub a: f64,
    pub b: f64,
}

impl SqrtDecomp {
    /// `|γ|² = a² + b² = |χ + i·x|`.
    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b
    }

    /// The square root as a complex number.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }
}

/// A complex number carried as modulus and an argument that is *not* reduced
/// modulo `2π`, so that it can be followed continuously along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedComplex {
    pub modulus: f64,
    pub argument: f64,
}

impl LiftedComplex {
    /// Converts to an ordinary complex number.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.argument)
    }

    /// Continuous square root: halves the lifted argument.
    pub fn sqrt(&self) -> LiftedComplex {
        LiftedComplex { modulus: self.modulus.sqrt(), argument: 0.5 * self.argument }
    }
}

/// The `k`-th positive root of `tan θ = θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRoot {
    pub index: u32,
    pub value: f64,
}

/// Taylor coefficients of `tanh t / t = Σ c_n t^{2n}`.
const TANH_OVER_T: [f64; 31] = [
    1.0,
    -0.3333333333333333,
    0.13333333333333333,
    -0.05396825396825397,
    0.021869488536155203,
    -0.008863235529902197,
    0.003592128036572481,
    -0.0014558343870513183,
    0.000590027440945586,
    -0.00023912911424355248,
    9.691537956929451e-05,
    -3.927832388331683e-05,
    1.5918905069328964e-05,
    -6.451689215655431e-06,
    2.6147711512907546e-06,
    -1.0597268320104654e-06,
    4.294911078273806e-07,
    -1.7406618963571648e-07,
    7.054636946400968e-08,
    -2.859136662305254e-08,
    1.1587644432798853e-08,
    -4.6962953982309016e-09,
    1.903336833931276e-09,
    -7.713933635359062e-10,
    3.126339545892087e-10,
    -1.26705769303054e-10,
    5.135191408039368e-11,
    -2.0812146867700473e-11,
    8.434845419094337e-12,
    -3.4185140868111557e-12,
    1.385471574294847e-12,
];

/// Below this `|z|` the series branch is used for `f`, `ratio` and `f/z`.
const SERIES_RADIUS: f64 = 2.0;

/// Above this `a` the hyperbolic functions are handled in scaled form.
const LARGE_A: f64 = 20.0;

/// Square root of `χ + i·x` in the first quadrant.
///
/// The larger of `a`, `b` comes from `√((|z| ± χ)/2)`, the smaller from
/// `2ab = x`, which avoids cancellation when `x ≪ |χ|`.
pub fn sqrt_halfplane(chi: f64, x: f64) -> Result<SqrtDecomp> {
    if !(x >= 0.0) || !chi.is_finite() || !x.is_finite() {
        return Err(Error::domain("sqrt_halfplane", format!("need finite chi and x >= 0, got ({chi}, {x})")));
    }
    if chi == 0.0 && x == 0.0 {
        return Err(Error::domain("sqrt_halfplane", "the origin has no distinguished square root"));
    }
    let r = chi.hypot(x);
    if chi >= 0.0 {
        let a = (0.5 * (r + chi)).sqrt();
        Ok(SqrtDecomp { a, b: x / (2.0 * a) })
    } else {
        let b = (0.5 * (r - chi)).sqrt();
        Ok(SqrtDecomp { a: x / (2.0 * b), b })
    }
}

/// `ln(cosh a + cos b)` without overflow or cancellation.
pub(crate) fn ln_cosh_plus_cos(a: f64, b: f64) -> f64 {
    if a > LARGE_A {
        let e = (-a).exp();
        a - std::f64::consts::LN_2 + (e * e + 2.0 * b.cos() * e).ln_1p()
    } else {
        let s = (0.5 * a).sinh();
        let c = (0.5 * b).cos();
        (2.0 * (s * s + c * c)).ln()
    }
}

/// `ln(cosh a − cos b)` without overflow or cancellation.
pub(crate) fn ln_cosh_minus_cos(a: f64, b: f64) -> f64 {
    if a > LARGE_A {
        let e = (-a).exp();
        a - std::f64::consts::LN_2 + (e * e - 2.0 * b.cos() * e).ln_1p()
    } else {
        let s = (0.5 * a).sinh();
        let c = (0.5 * b).sin();
        (2.0 * (s * s + c * c)).ln()
    }
}

/// Hyperbolic pieces scaled by `1/cosh a`:
/// `(tanh a, sin b/cosh a, (cosh a + cos b)/cosh a, (cosh a − cos b)/cosh a)`.
pub(crate) struct Scaled {
    pub tanh_a: f64,
    pub sin_b: f64,
    pub cos_plus: f64,
    pub cos_minus: f64,
}

pub(crate) fn scaled(a: f64, b: f64) -> Scaled {
    let ch = a.cosh();
    if a > LARGE_A {
        Scaled {
            tanh_a: a.tanh(),
            sin_b: b.sin() / ch,
            cos_plus: 1.0 + b.cos() / ch,
            cos_minus: 1.0 - b.cos() / ch,
        }
    } else {
        let s = (0.5 * a).sinh();
        let (sb, cb) = (0.5 * b).sin_cos();
        Scaled {
            tanh_a: a.tanh(),
            sin_b: b.sin() / ch,
            cos_plus: 2.0 * (s * s + cb * cb) / ch,
            cos_minus: 2.0 * (s * s + sb * sb) / ch,
        }
    }
}

/// Continuous argument `φ_a(b)` of `sinh(a + i·b)` along `β ∈ [0, b]`.
///
/// Closed piecewise form `kπ + arctan(coth a · tan(b − kπ))` with
/// `k = round(b/π)`; at `b − kπ = ±π/2` the exact value `b` is returned.
/// The limit `a → 0⁺` is supported (`±π/2` jumps located at `b ∈ πℕ`).
pub(crate) fn sinh_phase(a: f64, b: f64) -> f64 {
    let k = (b / PI).round();
    let r = b - k * PI;
    if r.abs() >= FRAC_PI_2 {
        return b;
    }
    if r == 0.0 {
        return k * PI;
    }
    let ta = a.tanh();
    if ta == 0.0 {
        return k * PI + FRAC_PI_2.copysign(r);
    }
    k * PI + (r.tan() / ta).atan()
}

/// Lifted `sinh(a + i·b)`: modulus `√((cosh 2a − cos 2b)/2)` and the
/// continuous argument `φ_a(b) = ∫₀^b sinh 2a/(cosh 2a − cos 2β) dβ`.
pub fn sinh_lift(a: f64, b: f64) -> Result<LiftedComplex> {
    if !(a > 0.0) || !(b >= 0.0) {
        return Err(Error::domain("sinh_lift", format!("need a > 0 and b >= 0, got ({a}, {b})")));
    }
    Ok(LiftedComplex { modulus: a.sinh().hypot(b.sin()), argument: sinh_phase(a, b) })
}

/// `g(z) = f(z)/z` by its Taylor series (valid for `|z| < π²`).
pub(crate) fn f_over_z_series(z: Complex64) -> Complex64 {
    // f = −Σ_{n≥1} c_n (z/4)^n  ⇒  f/z = −Σ_{n≥1} c_n z^{n−1}/4^n.
    let q = z * 0.25;
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in TANH_OVER_T[1..].iter().rev() {
        acc = acc * q + c;
    }
    -acc * 0.25
}

/// Logarithmic derivative `g′/g` of `g = f/z` by its Taylor series.
pub(crate) fn f_over_z_log_derivative(z: Complex64) -> Complex64 {
    let q = z * 0.25;
    let mut g = Complex64::new(0.0, 0.0);
    let mut dg = Complex64::new(0.0, 0.0);
    // g = −¼ Σ_{m≥0} c_{m+1} q^m, g′ = −(1/16) Σ_{m≥1} m c_{m+1} q^{m−1}.
    for (m, &c) in TANH_OVER_T[1..].iter().enumerate().rev() {
        g = g * q + c;
        if m >= 1 {
            dg = dg * q + c * m as f64;
        }
    }
    dg * 0.25 / g
}

/// `f(χ, x) = 1 − tanh(γ/2)/(γ/2)` with `γ² = χ + i·x`.
///
/// Uses the real form
/// `1 − [a·sinh a + b·sin b + i(a·sin b − b·sinh a)] / [(a²+b²)(cosh a + cos b)/2]`
/// (all hyperbolic terms scaled by `1/cosh a`) away from the origin and the
/// Taylor series for `|z| < 2`.
pub fn f_of(chi: f64, x: f64) -> Result<Complex64> {
    let z = Complex64::new(chi, x);
    let d = sqrt_halfplane(chi, x)?;
    if z.norm() < SERIES_RADIUS {
        return Ok(f_over_z_series(z) * z);
    }
    f_real_form(&d, chi, x)
}

pub(crate) fn f_real_form(d: &SqrtDecomp, chi: f64, x: f64) -> Result<Complex64> {
    let (a, b) = (d.a, d.b);
    let s = scaled(a, b);
    if s.cos_plus == 0.0 {
        return Err(Error::Pole { op: "f_of", chi, x });
    }
    let num = Complex64::new(a * s.tanh_a + b * s.sin_b, a * s.sin_b - b * s.tanh_a);
    let den = 0.5 * d.norm_sqr() * s.cos_plus;
    Ok(Complex64::new(1.0, 0.0) - num / den)
}

/// `ratio(χ, x) = (χ + i·x) / f(χ, x)`; on the axis this is `i·x/f(0, x)`.
///
/// The limit at the origin is `12`. Fails with [`Error::Pole`] at the zeros of
/// `f`, i.e. `(χ, x) = (−4θ_k², 0)`.
pub fn ratio(chi: f64, x: f64) -> Result<Complex64> {
    let z = Complex64::new(chi, x);
    if chi == 0.0 && x == 0.0 {
        return Ok(Complex64::new(12.0, 0.0));
    }
    if z.norm() < SERIES_RADIUS {
        return Ok(f_over_z_series(z).inv());
    }
    let f = f_of(chi, x)?;
    if f.norm() < 1e-14 {
        return Err(Error::Pole { op: "ratio", chi, x });
    }
    Ok(z / f)
}

/// `φ(χ, x) = ½·arg(γ) − ½·φ_a(b)`, with `φ(0, 0) = 0`.
///
/// At `x = 0`, `χ < 0` the value is the one-sided limit `x → 0⁺`; it is
/// piecewise constant in `b = √(−χ)` with jumps at `b ∈ πℕ`, which are rejected.
pub fn phi_of(chi: f64, x: f64) -> Result<f64> {
    if chi == 0.0 && x == 0.0 {
        return Ok(0.0);
    }
    let d = sqrt_halfplane(chi, x)?;
    if x == 0.0 && chi < 0.0 {
        // The one-sided limit jumps where sin b changes sign.
        let r = d.b - (d.b / PI).round() * PI;
        if r.abs() <= 1e-12 * d.b.max(1.0) {
            return Err(Error::Branch { op: "phi_of", chi, x });
        }
    }
    Ok(0.5 * d.b.atan2(d.a) - 0.5 * sinh_phase(d.a, d.b))
}

/// `ψ(χ, x) = [2|z| / (cosh 2a − cos 2b)]^{1/4} = [|γ|²/|sinh γ|²]^{1/4}`.
pub fn psi_of(chi: f64, x: f64) -> Result<f64> {
    if chi == 0.0 && x == 0.0 {
        return Ok(1.0);
    }
    let d = sqrt_halfplane(chi, x)?;
    let ln = d.norm_sqr().ln() - ln_cosh_plus_cos(d.a, d.b) - ln_cosh_minus_cos(d.a, d.b);
    Ok((0.25 * ln).exp())
}

/// The `k`-th positive root of `tan θ = θ`, located in `(kπ, kπ + π/2)`.
///
/// Bisection on `sin θ − θ cos θ` followed by Newton polishing.
pub fn theta_root(k: u32) -> Result<ThetaRoot> {
    if k == 0 {
        return Err(Error::domain("theta_root", "index must be positive"));
    }
    let h = |t: f64| t.sin() - t * t.cos();
    let mut lo = k as f64 * PI;
    let mut hi = lo + FRAC_PI_2;
    let h_lo = h(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (h(mid) > 0.0) == (h_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        // h′(t) = t sin t.
        let step = h(t) / (t * t.sin());
        if step.is_finite() {
            t -= step;
        }
    }
    Ok(ThetaRoot { index: k, value: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn direct_f(chi: f64, x: f64) -> Complex64 {
        let g = Complex64::new(chi, x).sqrt() * 0.5;
        Complex64::new(1.0, 0.0) - g.tanh() / g
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_halfplane(1.0, 0.0).unwrap(), SqrtDecomp { a: 1.0, b: 0.0 });
        let d = sqrt_halfplane(0.0, 2.0).unwrap();
        assert_relative_eq!(d.a, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.b, 1.0, epsilon = 1e-15);
        let d = sqrt_halfplane(-PI * PI, 0.0).unwrap();
        assert_eq!(d.a, 0.0);
        assert_relative_eq!(d.b, PI, epsilon = 1e-15);
        assert!(sqrt_halfplane(0.0, 0.0).is_err());
    }

    #[test]
    fn sqrt_small_x_no_cancellation() {
        let d = sqrt_halfplane(-4.0, 1e-12).unwrap();
        assert_relative_eq!(d.a, 0.25e-12, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(chi in -1e3f64..1e3, x in 0.0f64..1e3) {
            prop_assume!(chi != 0.0 || x != 0.0);
            let d = sqrt_halfplane(chi, x).unwrap();
            let sq = d.to_complex() * d.to_complex();
            let scale = chi.hypot(x);
            prop_assert!((sq - Complex64::new(chi, x)).norm() <= 1e-12 * scale);
        }

        #[test]
        fn sinh_lift_matches_direct_sinh(a in 0.01f64..5.0, b in 0.0f64..20.0) {
            let l = sinh_lift(a, b).unwrap();
            let s = Complex64::new(a, b).sinh();
            prop_assert!((l.modulus - s.norm()).abs() <= 1e-12 * s.norm());
            let diff = (l.argument - s.arg()).rem_euclid(2.0 * PI);
            prop_assert!(diff < 1e-9 || 2.0 * PI - diff < 1e-9);
        }

        #[test]
        fn f_matches_complex_tanh(chi in -70.0f64..200.0, x in 0.0f64..200.0) {
            prop_assume!(chi.hypot(x) > 1e-3);
            let f = f_of(chi, x).unwrap();
            let g = direct_f(chi, x);
            prop_assert!((f - g).norm() <= 1e-10 * g.norm().max(1e-3));
        }

        #[test]
        fn axis_ratio_in_first_quadrant(x in 1e-6f64..1e4) {
            let r = ratio(0.0, x).unwrap();
            prop_assert!(r.re > 0.0 && r.im > 0.0);
        }
    }

    #[test]
    fn sinh_lift_examples() {
        let l = sinh_lift(1.0, 0.0).unwrap();
        assert_relative_eq!(l.modulus, 1f64.sinh(), max_relative = 1e-15);
        assert_eq!(l.argument, 0.0);
        for k in 1..=3 {
            let b = k as f64 * FRAC_PI_2;
            assert_relative_eq!(sinh_lift(1.0, b).unwrap().argument, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn sinh_lift_matches_defining_integral() {
        use crate::quad::{Adaptive, GaussKronrod};
        let a: f64 = 0.7;
        let integrand = |beta: f64| (2.0 * a).sinh() / ((2.0 * a).cosh() - (2.0 * beta).cos());
        let q = Adaptive::new(GaussKronrod::QK61, 1e-13).integrate(&integrand, 0.0, 2.3);
        assert!((sinh_lift(a, 2.3).unwrap().argument - q.value).abs() < 1e-10);
    }

    #[test]
    fn sinh_lift_is_continuous_and_increasing() {
        let mut prev = 0.0;
        for i in 1..=20000 {
            let b = i as f64 * 1e-3;
            let phase = sinh_lift(0.05, b).unwrap().argument;
            assert!(phase > prev && phase - prev < FRAC_PI_2);
            prev = phase;
        }
    }

    #[test]
    fn f_examples() {
        let f = f_of(1.0, 0.0).unwrap();
        assert_relative_eq!(f.re, 1.0 - 0.5f64.tanh() / 0.5, max_relative = 1e-14);
        assert_eq!(f.im, 0.0);
        let f = f_of(PI * PI, 0.0).unwrap();
        assert_relative_eq!(f.re, 1.0 - (2.0 / PI) * FRAC_PI_2.tanh(), max_relative = 1e-14);
        for x in [0.3, 1.0, 4.0] {
            let f = f_of(4.0 * x * x, 0.0).unwrap();
            assert_relative_eq!(f.re, 1.0 - x.tanh() / x, max_relative = 1e-12);
            // √(−4x²)/2 = ix and tanh(ix)/(ix) = tan x / x.
            let f = f_of(-4.0 * x * x, 0.0).unwrap();
            assert_relative_eq!(f.re, 1.0 - x.tan() / x, max_relative = 1e-12);
        }
    }

    #[test]
    fn series_and_real_form_agree_on_overlap() {
        for (chi, x) in [(1.5, 0.8), (-1.0, 1.5), (0.0, 1.9), (-1.9, 0.1)] {
            let z = Complex64::new(chi, x);
            let series = f_over_z_series(z) * z;
            let d = sqrt_halfplane(chi, x).unwrap();
            let real = f_real_form(&d, chi, x).unwrap();
            assert!((series - real).norm() < 1e-14, "{chi} {x}");
        }
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let z = Complex64::new(-0.1, 0.2);
        let h = 1e-6;
        let g = |z: Complex64| f_over_z_series(z).ln();
        let fd = (g(z + h) - g(z - h)) / (2.0 * h);
        assert!((fd - f_over_z_log_derivative(z)).norm() < 1e-8);
    }

    #[test]
    fn ratio_limit_and_pole() {
        assert_eq!(ratio(0.0, 0.0).unwrap(), Complex64::new(12.0, 0.0));
        let t1 = theta_root(1).unwrap().value;
        assert!(matches!(ratio(-4.0 * t1 * t1, 0.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_of(0.0, 0.0).unwrap(), 0.0);
        assert!(phi_of(0.0, 1e-12).unwrap().abs() < 1e-12);
        for chi in [-0.5, -2.0, -PI * PI / 4.0, -6.0, -9.0] {
            assert!(phi_of(chi, 0.0).unwrap().abs() < 1e-15, "chi = {chi}");
        }
        assert!(matches!(phi_of(-PI * PI, 0.0), Err(Error::Branch { .. })));
    }

    #[test]
    fn phi_axis_derivative_closed_form() {
        let x: f64 = 1.0;
        let h = 1e-5;
        let fd = (phi_of(0.0, x + h).unwrap() - phi_of(0.0, x - h).unwrap()) / (2.0 * h);
        // d/dx of −½·arg sinh(t(1+i)), t = √(x/2): −(sinh s − sin s)/(cosh s − cos s)/(4s), s = √(2x).
        let s = (2.0 * x).sqrt();
        let exact = -(s.sinh() - s.sin()) / (s.cosh() - s.cos()) / (4.0 * s);
        assert!((fd - exact).abs() < 1e-7, "{fd} vs {exact}");
    }

    #[test]
    fn psi_limits() {
        assert_eq!(psi_of(0.0, 0.0).unwrap(), 1.0);
        let g: f64 = 1.3;
        assert_relative_eq!(psi_of(g * g, 0.0).unwrap(), (g / g.sinh()).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(psi_of(g * g, 1e-12).unwrap(), (g / g.sinh()).sqrt(), max_relative = 1e-10);
        // Large arguments stay finite.
        assert!(psi_of(1e6, 3.0).unwrap() > 0.0);
    }

    #[test]
    fn theta_roots() {
        let t = theta_root(1).unwrap();
        assert!(t.value > 4.0 * PI / 3.0 && t.value < 1.5 * PI);
        assert!((t.value.tan() - t.value).abs() < 1e-10);
        assert!((t.value - 4.493409458).abs() < 1e-8);
        let t2 = theta_root(2).unwrap();
        assert!(t2.value > 1.5 * PI && t2.value < 2.5 * PI);
        assert!((t2.value.tan() - t2.value).abs() < 1e-10);
        assert!(theta_root(0).is_err());
    }

    #[test]
    fn theta_root_matches_bisection_oracle() {
        // Plain bisection on tan θ − θ inside (π, 3π/2), run to exhaustion.
        let (mut lo, mut hi) = (PI + 0.1, 1.5 * PI - 1e-9);
        while hi - lo > 1e-15 {
            let m = 0.5 * (lo + hi);
            if m.tan() - m > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        assert!((theta_root(1).unwrap().value - lo).abs() < 1e-12);
    }
}
