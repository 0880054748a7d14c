//! Small-time heat-kernel asymptotics of the circular Langevin diffusion
//! `(ω_s, ∫cos ω, ∫sin ω)`, the Brownian-bridge transforms behind them, and the
//! quadrature / Monte-Carlo oracles used to validate every closed form.
//!
//! Module map:
//!
//! * [`specfun`] – the complex special functions `f`, `φ`, `φ̃`, `ψ`, `Φ` with
//!   continuous branch lifts, and the roots of `tan θ = θ`;
//! * [`malliavin`] – the limiting Malliavin covariance `DU⁰(w)`, its scaled
//!   determinant `Δ(w)`, the quadratic form `ψ(w, y, z)` and the rotation-group
//!   action on targets;
//! * [`kernel`] – regime classification and the three log-density equivalents;
//! * [`bridge`] – exact Brownian-bridge sampling, quadratic-functional
//!   transforms (closed forms and the Riccati pipeline), Monte-Carlo estimators
//!   and the law of the bridge maximum;
//! * [`quad`] – Gauss–Kronrod integration, the oscillatory constants `σ`, `σ′`,
//!   Fourier inversion of the pinned transform and the axis integral `I_ε`.

// Argument checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod error;
pub mod kernel;
pub mod malliavin;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
