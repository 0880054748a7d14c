//! Laplace and Fourier transforms of linear-plus-quadratic bridge functionals.
//!
//! With `ω` a standard Brownian bridge on `[0, 1]`:
//!
//! * [`laplace_const`]: `E exp(α∫ω − ½γ²∫ω²) = √(γ/sinh γ)·exp[(α²/γ³)(γ/2 − tanh(γ/2))]`;
//! * [`laplace_imaginary`]: `E exp(β∫ω²) = √(γ/sin γ)`, `γ = √(2β)`, for `β < π²/2`;
//! * [`laplace_general`]: `E exp(∫α(s)ω_s ds + ∫γ(s)ω_s² ds)` for `γ ≤ 0`, via the
//!   linear ODE `u″ = −2γu`, `u(0) = 1`, `u′(0) = 0` ([`solve_riccati`]);
//! * [`fourier_laplace_complex`]: `E exp(iξ∫ω − ½(χ + ix)∫ω²)`;
//! * [`gauss_linear`] and [`e0_gaussian`]: `E exp(∫u ω)` for deterministic
//!   complex `u`, and its special case behind the limiting covariance `DU⁰`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::malliavin::du0;
use crate::specfun::{f_of, phi_of, psi_of};

/// Default number of fixed RK4 steps on `[0, 1]`.
pub const ODE_STEPS: usize = 4096;

/// `ln(γ/sinh γ)` without overflow.
fn ln_gamma_over_sinh(g: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else if g < 20.0 {
        (g / g.sinh()).ln()
    } else {
        g.ln() - g - (0.5 * (-(-2.0 * g).exp_m1())).ln()
    }
}

/// `(t − tanh t)/t³`, with its Taylor series for small `t`.
fn t_minus_tanh_over_cube(t: f64) -> f64 {
    if t.abs() < 1e-2 {
        let t2 = t * t;
        1.0 / 3.0 + t2 * (-2.0 / 15.0 + t2 * (17.0 / 315.0 + t2 * (-62.0 / 2835.0 + t2 * 1382.0 / 155_925.0)))
    } else {
        (t - t.tanh()) / (t * t * t)
    }
}

/// `E exp(α∫₀¹ω − ½γ²∫₀¹ω²)` for constants `α`, `γ ≥ 0`.
pub fn laplace_const(alpha: f64, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !gamma.is_finite() || !alpha.is_finite() {
        return Err(Error::domain("laplace_const", format!("need finite alpha and gamma >= 0, got ({alpha}, {gamma})")));
    }
    // (α²/γ³)(γ/2 − tanh(γ/2)) = α²·(t − tanh t)/(8t³),  t = γ/2.
    let exponent = alpha * alpha * t_minus_tanh_over_cube(0.5 * gamma) / 8.0;
    Ok((0.5 * ln_gamma_over_sinh(gamma) + exponent).exp())
}

/// `E exp(β∫₀¹ω²)`, finite exactly for `β < π²/2`.
pub fn laplace_imaginary(beta: f64) -> Result<f64> {
    let limit = 0.5 * std::f64::consts::PI.powi(2);
    if !(beta < limit) {
        return Err(Error::domain("laplace_imaginary", format!("diverges for beta >= π²/2, got {beta}")));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    let g = (2.0 * beta.abs()).sqrt();
    if beta > 0.0 {
        Ok((g / g.sin()).sqrt())
    } else {
        Ok((0.5 * ln_gamma_over_sinh(g)).exp())
    }
}

/// Solution of `u″ = −2γ(s)·u`, `u(0) = 1`, `u′(0) = 0` on a uniform grid;
/// `g = −u′/u` solves the associated Riccati equation.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

/// State `(u, u′, B, Q0, Q1, Q2)` with `B′ = α·u`, `Q0′ = 1/u²`, `Q1′ = B/u²`,
/// `Q2′ = B²/u²`.
type State = [f64; 6];

fn derivative(s: &State, alpha: f64, gamma: f64) -> State {
    let inv2 = 1.0 / (s[0] * s[0]);
    [s[1], -2.0 * gamma * s[0], alpha * s[0], inv2, s[2] * inv2, s[2] * s[2] * inv2]
}

fn integrate(alpha: &dyn Fn(f64) -> f64, gamma: &dyn Fn(f64) -> f64, n: usize) -> Result<(RiccatiSolution, State)> {
    let h = 1.0 / n as f64;
    let mut s: State = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut sol = RiccatiSolution { grid: Vec::with_capacity(n + 1), u: Vec::with_capacity(n + 1), du: Vec::with_capacity(n + 1) };
    sol.grid.push(0.0);
    sol.u.push(1.0);
    sol.du.push(0.0);
    let add = |a: &State, k: &State, c: f64| -> State { std::array::from_fn(|i| a[i] + c * k[i]) };
    for j in 0..n {
        let t = j as f64 * h;
        let (a0, a1, a2) = (alpha(t), alpha(t + 0.5 * h), alpha(t + h));
        let (g0, g1, g2) = (gamma(t), gamma(t + 0.5 * h), gamma(t + h));
        let k1 = derivative(&s, a0, g0);
        let k2 = derivative(&add(&s, &k1, 0.5 * h), a1, g1);
        let k3 = derivative(&add(&s, &k2, 0.5 * h), a1, g1);
        let k4 = derivative(&add(&s, &k3, h), a2, g2);
        s = std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if !(s[0] > 0.0) || !s.iter().all(|v| v.is_finite()) {
            return Err(Error::Validity { op: "solve_riccati", reason: format!("u = {} at s = {}", s[0], t + h) });
        }
        sol.grid.push((j + 1) as f64 * h);
        sol.u.push(s[0]);
        sol.du.push(s[1]);
    }
    Ok((sol, s))
}

/// Solves `u″ = −2γu` with `n_steps` fixed RK4 steps; fails with a validity
/// error if `u` reaches zero.
pub fn solve_riccati(gamma: impl Fn(f64) -> f64, n_steps: usize) -> Result<RiccatiSolution> {
    if n_steps < 1 {
        return Err(Error::domain("solve_riccati", "need at least one step"));
    }
    Ok(integrate(&|_| 0.0, &gamma, n_steps)?.0)
}

/// `E exp(∫₀¹α(s)ω_s ds + ∫₀¹γ(s)ω_s² ds)` for `γ ≤ 0`.
///
/// With `e^{∫_τ^s g} = u(τ)/u(s)`, `B(s) = ∫₀^s αu` and `K = (B(1) − B)/u`,
/// the transform is
/// `exp[½∫K² − (∫K·u(1)/u)²/(2∫(u(1)/u)²)]·√u(1) / √(∫(u(1)/u)²)`,
/// and all the integrals are moments `∫1/u², ∫B/u², ∫B²/u²` carried along
/// with the ODE.
pub fn laplace_general(alpha: impl Fn(f64) -> f64, gamma: impl Fn(f64) -> f64) -> Result<f64> {
    let (_, s) = integrate(&alpha, &gamma, ODE_STEPS)?;
    let (u1, b1, q0, q1, q2) = (s[0], s[2], s[3], s[4], s[5]);
    let k2 = b1 * b1 * q0 - 2.0 * b1 * q1 + q2;
    let k_dot_end = u1 * (b1 * q0 - q1);
    let end2 = u1 * u1 * q0;
    let log = 0.5 * k2 - k_dot_end * k_dot_end / (2.0 * end2) + 0.5 * u1.ln() - 0.5 * end2.ln();
    Ok(log.exp())
}

/// `E exp(iξ∫ω − ½(χ + ix)∫ω²) = e^{iφ(χ,x)}·ψ(χ,x)·exp[−ξ²f(χ,x)/(2(χ+ix))]`
/// for `χ > −π²`, `x > 0`.
pub fn fourier_laplace_complex(xi: f64, chi: f64, x: f64) -> Result<Complex64> {
    let limit = -std::f64::consts::PI.powi(2);
    if !(chi > limit) || !(x > 0.0) || !xi.is_finite() || !chi.is_finite() || !x.is_finite() {
        return Err(Error::domain("fourier_laplace_complex", format!("need chi > −π², x > 0; got ({chi}, {x})")));
    }
    let z = Complex64::new(chi, x);
    let f = f_of(chi, x)?;
    let gaussian = (-xi * xi * f / (2.0 * z)).exp();
    Ok(Complex64::from_polar(psi_of(chi, x)?, phi_of(chi, x)?) * gaussian)
}

/// `E exp(∫₀¹u(s)ω_s ds) = exp(½[∫₀¹K² − (∫₀¹K)²])`, `K(s) = ∫_s¹u`, for a
/// deterministic complex `u`.
pub fn gauss_linear(u: impl Fn(f64) -> Complex64) -> Complex64 {
    // RK4 on (B, ∫B, ∫B²) with B(s) = ∫₀^s u; the u-stages only depend on t.
    let n = ODE_STEPS;
    let h = 1.0 / n as f64;
    let zero = Complex64::new(0.0, 0.0);
    let (mut b, mut ib, mut ib2) = (zero, zero, zero);
    for j in 0..n {
        let t = j as f64 * h;
        let (u0, um, u1) = (u(t), u(t + 0.5 * h), u(t + h));
        let bm = b + 0.5 * h * u0;
        let bm2 = b + 0.5 * h * um;
        let be = b + h * um;
        ib += h / 6.0 * (b + 2.0 * bm + 2.0 * bm2 + be);
        ib2 += h / 6.0 * (b * b + 2.0 * bm * bm + 2.0 * bm2 * bm2 + be * be);
        b += h / 6.0 * (u0 + 4.0 * um + u1);
    }
    let k2 = b * b - 2.0 * b * ib + ib2;
    let k1 = b - ib;
    (0.5 * (k2 - k1 * k1)).exp()
}

/// `exp(−½·(ξ′, ξ)·DU⁰(w)·(ξ′, ξ)ᵗ)`, the characteristic function of the
/// limiting Gaussian pair `(−∫sin(ws)ω, ∫cos(ws)ω)` at `(ξ′, ξ)`.
pub fn e0_gaussian(xi_prime: f64, xi: f64, w: f64) -> f64 {
    (-0.5 * du0(w).quadratic_form([xi_prime, xi])).exp()
}
