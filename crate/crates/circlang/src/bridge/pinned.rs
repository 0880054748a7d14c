//! Monte-Carlo estimate of the pinned Fourier transform
//!
//! ```text
//! P_ε(ξ′, ξ) = E exp( (i/√ε)·( ξ′[∫₀¹cos(ws + √ε ω_s)ds − ŷ] + ξ[∫₀¹sin(ws + √ε ω_s)ds − ẑ] ) )
//! ```
//!
//! on a tensor grid of frequencies, with one path ensemble shared by all
//! nodes (common random numbers).

use num_complex::Complex64;

use super::mc::{mc_estimate_field, McConfig, MCEstimate};
use super::transforms::e0_gaussian;
use super::BridgePath;
use crate::error::{Error, Result};

/// Tensor grid of frequencies: node `(i, j)` is `(xi_prime[i], xi[j])`,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    pub xi_prime: Vec<f64>,
    pub xi: Vec<f64>,
}

impl XiGrid {
    pub fn len(&self) -> usize {
        self.xi_prime.len() * self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-path centred increments `(∫cos(ws + √ε ω) − ŷ, ∫sin(ws + √ε ω) − ẑ)`
/// by the trapezoid rule on the path grid.
pub fn pinned_increments(eps: f64, w: f64, y_hat: f64, z_hat: f64, path: &BridgePath) -> (f64, f64) {
    let root = eps.sqrt();
    let c = path.integrate(|s, om| (w * s + root * om).cos());
    let s = path.integrate(|s, om| (w * s + root * om).sin());
    (c - y_hat, s - z_hat)
}

/// `P_ε(ξ′, ξ)` at every node of `grid`.
pub fn p_eps_mc(eps: f64, w: f64, y_hat: f64, z_hat: f64, grid: &XiGrid, config: McConfig) -> Result<Vec<MCEstimate>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain("p_eps_mc", format!("need eps > 0, got {eps}")));
    }
    if grid.is_empty() {
        return Err(Error::domain("p_eps_mc", "empty frequency grid"));
    }
    let scale = 1.0 / eps.sqrt();
    let nx = grid.xi.len();
    mc_estimate_field(config, grid.len(), |path, out| {
        let (a, b) = pinned_increments(eps, w, y_hat, z_hat, path);
        let col: Vec<Complex64> = grid.xi.iter().map(|x| Complex64::from_polar(1.0, x * b * scale)).collect();
        for (i, xp) in grid.xi_prime.iter().enumerate() {
            let row = Complex64::from_polar(1.0, xp * a * scale);
            for (j, c) in col.iter().enumerate() {
                out[i * nx + j] = row * c;
            }
        }
    })
}

/// The `ε → 0` form of `P_ε`: `exp[(i/√ε)(ξ′λ′ + ξλ)]·e0_gaussian(ξ′, ξ, w)` with
/// `λ′ = sin w/w − ŷ`, `λ = (1 − cos w)/w − ẑ`.
pub fn p_limit(eps: f64, w: f64, y_hat: f64, z_hat: f64, xi_prime: f64, xi: f64) -> Complex64 {
    let (sinc, versc) = crate::malliavin::psi_zero_point(w);
    let phase = (xi_prime * (sinc - y_hat) + xi * (versc - z_hat)) / eps.sqrt();
    Complex64::from_polar(e0_gaussian(xi_prime, xi, w), phase)
}
