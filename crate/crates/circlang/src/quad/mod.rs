//! Adaptive and oscillatory quadrature: Gauss–Kronrod integration, the
//! oscillatory constants `σ` and `σ′`, Fourier inversion of the pinned
//! transform, and the direct axis integral `I_ε`.

pub mod constants;
pub mod gk;
pub mod inversion;
pub mod oscillatory;

pub use constants::{sigma_const, sigma_prime_const, SigmaStrategy};
pub use gk::{Adaptive, GaussKronrod, Scalar};
pub use inversion::{fourier_invert_gaussian, fourier_invert_mc, InversionGrid, McInversion};
pub use oscillatory::{i_eps_direct, phi_axis_l1};

/// Diagnostic flags attached to every quadrature result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadFlags {
    /// The requested tolerance was met.
    pub converged: bool,
    /// Part of the value comes from an analytic or extrapolated tail.
    pub tail_extrapolated: bool,
    /// `Σ|contributions| / |value|` is large enough to distrust trailing digits.
    pub cancellation_suspect: bool,
}

/// Value of a quadrature together with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub n_evals: usize,
    /// Integral of the modulus of the integrand (for cancellation monitoring).
    pub abs_integral: f64,
    pub flags: QuadFlags,
}

impl<T> QuadResult<T> {
    pub(crate) fn exact(value: T, n_evals: usize) -> Self {
        QuadResult {
            value,
            abs_error_estimate: 0.0,
            n_evals,
            abs_integral: 0.0,
            flags: QuadFlags { converged: true, ..Default::default() },
        }
    }
}

impl<T: Scalar> QuadResult<T> {
    /// Cancellation ratio `Σ|contributions| / |value|` (infinite for a zero value).
    pub fn cancellation_ratio(&self) -> f64 {
        let m = self.value.modulus();
        if m == 0.0 {
            f64::INFINITY
        } else {
            self.abs_integral / m
        }
    }
}

/// Cancellation ratio beyond which results are rejected.
pub const CANCELLATION_LIMIT: f64 = 1e8;
