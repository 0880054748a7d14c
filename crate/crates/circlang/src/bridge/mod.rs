//! Brownian bridges on `[0, 1]` and the expectations built on them.
//!
//! * exact sampling of the bridge on a uniform grid ([`sample_bridge`]);
//! * closed-form and ODE-based Laplace/Fourier transforms of linear plus
//!   quadratic functionals ([`transforms`]);
//! * reproducible parallel Monte Carlo ([`mc`]) and the pinned Fourier
//!   transform field ([`pinned`]);
//! * the law of `max|ω|` ([`maximum`]) and direct simulation of the diffusion
//!   endpoint ([`diffusion`]).

pub mod diffusion;
pub mod maximum;
pub mod mc;
pub mod pinned;
pub mod transforms;

use rand::Rng;
use rand_distr::StandardNormal;

pub use diffusion::{simulate_endpoint, Endpoint};
pub use maximum::{sample_abs_max, wstar_cdf, wstar_cdf_alternating, wstar_cdf_dual};
pub use mc::{mc_estimate, mc_estimate_field, McConfig, MCEstimate};
pub use pinned::{p_eps_mc, XiGrid};
pub use transforms::{
    e0_gaussian, fourier_laplace_complex, gauss_linear, laplace_const, laplace_general, laplace_imaginary,
    solve_riccati, RiccatiSolution,
};

use crate::error::{Error, Result};

/// A Brownian bridge sampled at `s_j = j/n_steps`, `j = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgePath {
    values: Vec<f64>,
}

impl BridgePath {
    /// Number of grid intervals.
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Values on the grid; the first and last are exactly zero.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoid approximation of `∫₀¹ g(s, ω_s) ds`.
    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        trapezoid(&self.values, g)
    }
}

/// Trapezoid rule for `∫₀¹ g(s, v(s)) ds` on the uniform grid carried by `values`.
pub(crate) fn trapezoid(values: &[f64], g: impl Fn(f64, f64) -> f64) -> f64 {
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let interior: f64 = (1..n).map(|j| g(j as f64 * h, values[j])).sum();
    h * (interior + 0.5 * (g(0.0, values[0]) + g(1.0, values[n])))
}

/// Fills `out` (length `n + 1`) with a bridge: a random walk `W_j` with
/// `N(0, 1/n)` increments, pinned as `ω_j = W_j − (j/n)·W_n`.
pub(crate) fn fill_bridge<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    let n = out.len() - 1;
    let sd = (1.0 / n as f64).sqrt();
    out[0] = 0.0;
    let mut w = 0.0;
    for v in out.iter_mut().skip(1) {
        let g: f64 = rng.sample(StandardNormal);
        w += sd * g;
        *v = w;
    }
    let end = out[n];
    for (j, v) in out.iter_mut().enumerate() {
        *v -= j as f64 / n as f64 * end;
    }
    out[n] = 0.0;
}

/// Samples a Brownian bridge on `n_steps` uniform intervals; the covariance
/// of the grid values is exactly `s(1 − t)` for `s ≤ t`.
pub fn sample_bridge<R: Rng + ?Sized>(n_steps: usize, rng: &mut R) -> Result<BridgePath> {
    if n_steps < 2 {
        return Err(Error::domain("sample_bridge", format!("need n_steps >= 2, got {n_steps}")));
    }
    let mut values = vec![0.0; n_steps + 1];
    fill_bridge(&mut values, rng);
    Ok(BridgePath { values })
}
