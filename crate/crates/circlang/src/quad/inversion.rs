//! Two-dimensional Fourier inversion of the pinned transform:
//!
//! ```text
//! p = e^{−w²/2ε} / (4π²ε³√(2πε)) · ∬ P(ξ′, ξ) dξ′ dξ
//! ```
//!
//! * [`fourier_invert_gaussian`] uses the limiting integrand
//!   `exp[(i/√ε)(ξ′λ′ + ξλ)]·exp(−½ ξᵀ·DU⁰·ξ)`, `λ′ = sin w/w − ŷ`,
//!   `λ = (1 − cos w)/w − ẑ`. The contour is moved to the stationary point
//!   `ξ = i·M⁻¹b + η` (`M = DU⁰`, `b = (λ′, λ)/√ε`), where the integrand is
//!   evaluated from the entries of `M` at complex nodes and integrated with a
//!   Gauss–Hermite product rule along the Cholesky axes of `M⁻¹`; the sum is
//!   taken in log space so arbitrarily small densities are representable.
//! * [`fourier_invert_mc`] replaces the limiting integrand with Monte-Carlo
//!   path values on a Gauss–Legendre box whose half-widths come from the
//!   `ε = 0` Gaussian envelope.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gk::{gauss_hermite, gauss_legendre};
use super::{QuadFlags, QuadResult, CANCELLATION_LIMIT};
use crate::bridge::pinned::pinned_increments;
use crate::bridge::{mc_estimate, McConfig, MCEstimate};
use crate::error::{Error, Result};
use crate::malliavin::{du0, psi_zero_point};

/// Gauss–Hermite points per axis.
const HERMITE_POINTS: usize = 24;

/// `ln[e^{−w²/2ε} / (4π²ε³√(2πε))]`.
fn log_prefactor(eps: f64, w: f64) -> f64 {
    -w * w / (2.0 * eps) - (4.0 * PI * PI).ln() - 3.0 * eps.ln() - 0.5 * (2.0 * PI * eps).ln()
}

fn check_inputs(op: &'static str, eps: f64, w: f64, y_hat: f64, z_hat: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(op, format!("need eps > 0, got {eps}")));
    }
    if w == 0.0 || !w.is_finite() || !y_hat.is_finite() || !z_hat.is_finite() {
        return Err(Error::domain(op, format!("need finite w != 0 and finite target, got ({w}, {y_hat}, {z_hat})")));
    }
    Ok(())
}

/// `ln ∬ exp(i·bᵀξ − ½ξᵀMξ) dξ` for `M = DU⁰(w)`, by Gauss–Hermite on the
/// shifted contour. Returns the log of the real part.
pub fn gaussian_fourier_log_integral(w: f64, b: [f64; 2]) -> Result<QuadResult<f64>> {
    let m = du0(w);
    let det = m.det();
    if !(det > 0.0) {
        return Err(Error::domain("gaussian_fourier_log_integral", format!("DU0({w}) is singular")));
    }
    // M⁻¹ and its Cholesky factor L (lower triangular, M⁻¹ = L·Lᵀ).
    let inv = [m.m22 / det, -m.m12 / det, m.m11 / det];
    let l11 = inv[0].sqrt();
    let l21 = inv[1] / l11;
    let l22 = (inv[2] - l21 * l21).sqrt();
    let centre = [inv[0] * b[0] + inv[1] * b[1], inv[1] * b[0] + inv[2] * b[1]];
    let (nodes, weights) = gauss_hermite(HERMITE_POINTS);
    // Log of each node's contribution, before the common Jacobian det L.
    let mut terms: Vec<(Complex64, f64)> = Vec::with_capacity(nodes.len() * nodes.len());
    for (u1, w1) in nodes.iter().zip(&weights) {
        for (u2, w2) in nodes.iter().zip(&weights) {
            let eta = [l11 * u1, l21 * u1 + l22 * u2];
            let xi = [Complex64::new(eta[0], centre[0]), Complex64::new(eta[1], centre[1])];
            let quad = m.m11 * xi[0] * xi[0] + 2.0 * m.m12 * xi[0] * xi[1] + m.m22 * xi[1] * xi[1];
            let phase = Complex64::i() * (b[0] * xi[0] + b[1] * xi[1]);
            // Divide out the Hermite weight e^{−½|u|²} that the rule supplies.
            let log = phase - 0.5 * quad + 0.5 * (u1 * u1 + u2 * u2);
            terms.push((log, w1 * w2));
        }
    }
    let shift = terms.iter().map(|(l, _)| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (log, weight) in &terms {
        let v = (log - shift).exp() * weight;
        sum += v;
        abs_sum += v.norm();
    }
    let jacobian = l11 * l22;
    let ratio = abs_sum / sum.re.abs();
    let value = shift + (sum.re * jacobian).ln();
    Ok(QuadResult {
        value,
        abs_error_estimate: (sum.im.abs() / sum.re.abs()).max(f64::EPSILON),
        n_evals: terms.len(),
        abs_integral: abs_sum,
        flags: QuadFlags { converged: sum.re > 0.0 && value.is_finite(), tail_extrapolated: false, cancellation_suspect: ratio > CANCELLATION_LIMIT },
    })
}

/// Log density from the limiting Gaussian integrand at the scaled target
/// `(ŷ, ẑ) = (y/ε, z/ε)`; identical in exact arithmetic to the case-(i)
/// asymptote. `abs_error_estimate` is an absolute error on the log value.
pub fn fourier_invert_gaussian(eps: f64, w: f64, y_hat: f64, z_hat: f64, tol: f64) -> Result<QuadResult<f64>> {
    check_inputs("fourier_invert_gaussian", eps, w, y_hat, z_hat)?;
    let (sinc, versc) = psi_zero_point(w);
    let root = eps.sqrt();
    let b = [(sinc - y_hat) / root, (versc - z_hat) / root];
    let mut q = gaussian_fourier_log_integral(w, b)?;
    q.value += log_prefactor(eps, w);
    q.flags.converged &= q.abs_error_estimate <= tol.max(f64::EPSILON);
    Ok(q)
}

/// Frequency box and node count for [`fourier_invert_mc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionGrid {
    /// Gauss–Legendre points per panel.
    pub points: usize,
    /// Panels per axis.
    pub panels: usize,
    /// Box half-widths are where the `ε = 0` Gaussian envelope drops to this
    /// fraction of its peak.
    pub threshold: f64,
}

impl Default for InversionGrid {
    fn default() -> Self {
        InversionGrid { points: 16, panels: 24, threshold: 1e-6 }
    }
}

impl InversionGrid {
    /// Half-widths `√(2 ln(1/threshold)·(M⁻¹)_{ii})` of the box in `(ξ′, ξ)`.
    pub fn radii(&self, w: f64) -> [f64; 2] {
        let m = du0(w);
        let det = m.det();
        let k = 2.0 * (1.0 / self.threshold).ln();
        [(k * m.m22 / det).sqrt(), (k * m.m11 / det).sqrt()]
    }

    fn axis(&self, radius: f64) -> (Vec<f64>, Vec<f64>) {
        let (t, wt) = gauss_legendre(self.points);
        let h = 2.0 * radius / self.panels as f64;
        let mut nodes = Vec::with_capacity(self.points * self.panels);
        let mut weights = Vec::with_capacity(self.points * self.panels);
        for p in 0..self.panels {
            let mid = -radius + (p as f64 + 0.5) * h;
            for (x, w) in t.iter().zip(&wt) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        (nodes, weights)
    }
}

/// Monte-Carlo Fourier inversion: log density and its propagated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McInversion {
    /// `ln p` (NaN when the estimated integral is not positive).
    pub log_value: f64,
    /// Standard error of `ln p` by the delta method.
    pub log_std_error: f64,
    /// Estimate of `∬ P_ε` over the box.
    pub integral: MCEstimate,
    pub radii: [f64; 2],
    /// The estimate is within three standard errors of zero.
    pub statistical_error_dominates: bool,
}

/// Log density from Monte-Carlo values of `P_ε` on a truncated frequency box.
///
/// For every path the box integral factorises as
/// `(Σ_j v_j e^{iξ′_j A/√ε})·(Σ_k v_k e^{iξ_k B/√ε})` with the path increments
/// `(A, B)`, so the whole grid costs two short sums per path.
pub fn fourier_invert_mc(eps: f64, w: f64, y_hat: f64, z_hat: f64, grid: InversionGrid, config: McConfig) -> Result<McInversion> {
    check_inputs("fourier_invert_mc", eps, w, y_hat, z_hat)?;
    if grid.points == 0 || grid.panels == 0 || !(grid.threshold > 0.0 && grid.threshold < 1.0) {
        return Err(Error::domain("fourier_invert_mc", format!("invalid grid {grid:?}")));
    }
    let radii = grid.radii(w);
    let (xp, wp) = grid.axis(radii[0]);
    let (xs, ws) = grid.axis(radii[1]);
    let scale = 1.0 / eps.sqrt();
    let axis_sum = |nodes: &[f64], weights: &[f64], a: f64| -> Complex64 {
        nodes.iter().zip(weights).map(|(x, v)| Complex64::from_polar(*v, x * a * scale)).sum()
    };
    let integral = mc_estimate(config, |path| {
        let (a, b) = pinned_increments(eps, w, y_hat, z_hat, path);
        axis_sum(&xp, &wp, a) * axis_sum(&xs, &ws, b)
    })?;
    let re = integral.mean.re;
    let log_value = if re > 0.0 { log_prefactor(eps, w) + re.ln() } else { f64::NAN };
    Ok(McInversion {
        log_value,
        log_std_error: integral.se_re / re.abs(),
        integral,
        radii,
        statistical_error_dominates: re.abs() <= 3.0 * integral.se_re,
    })
}
