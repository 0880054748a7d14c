//! Direct simulation of the diffusion endpoint
//! `(w_ε, y_ε, z_ε) = (B_ε, ∫₀^ε cos B_s ds, ∫₀^ε sin B_s ds)` started at the origin.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::mc::{path_rng, with_workers};
use crate::error::{Error, Result};

/// Endpoint of the diffusion at time `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub w: f64,
    pub y: f64,
    pub z: f64,
}

/// One endpoint from a Brownian path on `n_steps` uniform steps, with the
/// time integrals by the trapezoid rule (convex weights, so `y² + z² ≤ ε²`
/// holds path by path).
pub fn simulate_endpoint<R: Rng + ?Sized>(eps: f64, n_steps: usize, rng: &mut R) -> Result<Endpoint> {
    if !(eps > 0.0) || n_steps < 1 {
        return Err(Error::domain("simulate_endpoint", format!("need eps > 0 and n_steps >= 1, got ({eps}, {n_steps})")));
    }
    let h = eps / n_steps as f64;
    let sd = h.sqrt();
    let mut b = 0.0;
    let (mut y, mut z) = (0.5 * h, 0.0);
    for j in 1..=n_steps {
        let g: f64 = rng.sample(StandardNormal);
        b += sd * g;
        let weight = if j == n_steps { 0.5 * h } else { h };
        let (s, c) = b.sin_cos();
        y += weight * c;
        z += weight * s;
    }
    Ok(Endpoint { w: b, y, z })
}

/// `n_paths` endpoints, path `i` drawn from stream `i` of `seed`.
pub fn simulate_endpoints(eps: f64, n_paths: usize, n_steps: usize, seed: u64, workers: usize) -> Result<Vec<Endpoint>> {
    with_workers(workers, || {
        (0..n_paths as u64)
            .into_par_iter()
            .map(|i| simulate_endpoint(eps, n_steps, &mut path_rng(seed, i)))
            .collect::<Result<Vec<_>>>()
    })?
}
