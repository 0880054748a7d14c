//! The oscillatory constants
//!
//! ```text
//! σ  = ∫₀^∞ sin(π/8 + x − ½ arctan x) / (1 + x²)^{1/4} dx
//! σ′ = ∫₀^∞ sin(3π/16 + x) / x^{1/4} dx
//! ```
//!
//! Both are conditionally convergent. The integrals are cut at the zeros of
//! the sine so that the pieces form an alternating series, which is then
//! either accelerated or closed with an analytic tail:
//!
//! * [`SigmaStrategy::CotTail`]: periods up to `R`, then the tail rewritten
//!   with `x = cot θ` and integrated by parts repeatedly, leaving a remainder
//!   bounded by `Σ|c_j|·θ_R^{m_j+1}/(m_j+1)`;
//! * [`SigmaStrategy::PeriodSum`] / [`SigmaPrimeStrategy::Accelerated`]:
//!   repeated averaging (Euler transform) of the alternating partial sums;
//! * [`SigmaPrimeStrategy::RawPartialSums`]: midpoint of two consecutive
//!   partial sums far out, which bracket the limit.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use num_complex::Complex64;

use super::gk::{Adaptive, GaussKronrod};
use super::{QuadFlags, QuadResult};

/// How `σ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaStrategy {
    /// Periods up to `R`, cot-substituted tail integrated by parts.
    CotTail,
    /// Periods summed with repeated-averaging acceleration.
    PeriodSum,
}

/// How `σ′` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaPrimeStrategy {
    /// Periods summed with repeated-averaging acceleration.
    Accelerated,
    /// Midpoint of two consecutive raw partial sums.
    RawPartialSums,
}

/// Smallest tolerance the constant routines accept.
pub const MIN_TOL: f64 = 1e-10;

/// Number of periods integrated before the cot-substituted tail.
const COT_TAIL_PERIODS: usize = 100;

/// Integration-by-parts steps applied to the tail.
const COT_TAIL_STEPS: usize = 10;

/// Partial sums fed to the repeated-averaging transform.
const AVERAGING_DEPTH: usize = 30;

/// Periods summed before averaging.
const ACCELERATED_PERIODS: usize = 80;

/// Periods summed by the raw strategy.
const RAW_PERIODS: usize = 200_000;

/// Smallest absolute tolerance requested for a single period.
const PERIOD_TOL_FLOOR: f64 = 1e-13;

/// Phase of the `σ` integrand, `π/8 + x − ½ arctan x`.
fn sigma_phase(x: f64) -> f64 {
    FRAC_PI_8 + x - 0.5 * x.atan()
}

fn sigma_integrand(x: f64) -> f64 {
    sigma_phase(x).sin() / (1.0 + x * x).powf(0.25)
}

/// Solves `sigma_phase(x) = target` by Newton's method (the phase is increasing
/// with slope in `[1/2, 1]`).
fn sigma_phase_inverse(target: f64) -> f64 {
    let mut x = (target - FRAC_PI_8).max(0.0);
    x += 0.5 * x.atan();
    for _ in 0..50 {
        let slope = 1.0 - 0.5 / (1.0 + x * x);
        let step = (sigma_phase(x) - target) / slope;
        x -= step;
        if step.abs() <= 1e-15 * x.max(1.0) {
            break;
        }
    }
    x
}

/// Integrals of `f` over consecutive breakpoints.
fn period_integrals(f: &(dyn Fn(f64) -> f64 + Sync), breaks: &[f64], tol: f64) -> (Vec<f64>, usize, f64, bool) {
    // A period of a smooth integrand is resolved to rounding level by a few
    // panels; tolerances below that level would only exhaust the panel budget.
    let adaptive = Adaptive::new(GaussKronrod::QK21, tol.max(PERIOD_TOL_FLOOR)).with_rel_tol(0.0).with_max_panels(64);
    let mut out = Vec::with_capacity(breaks.len().saturating_sub(1));
    let mut evals = 0;
    let mut err = 0.0;
    let mut converged = true;
    for w in breaks.windows(2) {
        let q = adaptive.integrate(f, w[0], w[1]);
        evals += q.n_evals;
        err += q.abs_error_estimate;
        converged &= q.flags.converged;
        out.push(q.value);
    }
    (out, evals, err, converged)
}

/// Pairwise (cascade) summation of a slice in fixed order.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Repeated averaging of the last `depth + 1` partial sums of an alternating
/// series. Returns the estimate and the change from the previous level.
fn averaged_limit(terms: &[f64], depth: usize) -> (f64, f64) {
    let mut partial = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in terms {
        acc += t;
        partial.push(acc);
    }
    let start = partial.len() - depth - 1;
    let mut level: Vec<f64> = partial[start..].to_vec();
    let mut previous = level[level.len() - 1];
    while level.len() > 1 {
        previous = level[level.len() - 1];
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    (level[0], (level[0] - previous).abs())
}

fn check_tol(tol: f64) -> f64 {
    if tol.is_finite() && tol >= MIN_TOL {
        tol
    } else {
        MIN_TOL
    }
}

/// `σ` by the default strategy ([`SigmaStrategy::CotTail`]).
pub fn sigma_const(tol: f64) -> QuadResult<f64> {
    sigma_const_with(SigmaStrategy::CotTail, tol)
}

/// `σ` by an explicit strategy.
pub fn sigma_const_with(strategy: SigmaStrategy, tol: f64) -> QuadResult<f64> {
    let tol = check_tol(tol);
    match strategy {
        SigmaStrategy::CotTail => {
            // Stop where cos(phase) = 0 so that the leading boundary term of the
            // tail vanishes; the remainder is then O(R^{-3/2}).
            let r = sigma_phase_inverse(COT_TAIL_PERIODS as f64 * PI + FRAC_PI_2);
            let (head, evals, err, converged) = sigma_head(r, tol);
            let tail = sigma_tail(r);
            QuadResult {
                value: head + tail.value,
                abs_error_estimate: err + tail.bound,
                n_evals: evals,
                abs_integral: 0.0,
                flags: QuadFlags {
                    converged: converged && err + tail.bound <= tol,
                    tail_extrapolated: true,
                    cancellation_suspect: false,
                },
            }
        }
        SigmaStrategy::PeriodSum => {
            let mut breaks = vec![0.0];
            breaks.extend((1..=ACCELERATED_PERIODS + 1).map(|k| sigma_phase_inverse(k as f64 * PI)));
            let (terms, evals, err, converged) = period_integrals(&sigma_integrand, &breaks, tol * 1e-2);
            let (value, change) = averaged_limit(&terms, AVERAGING_DEPTH);
            let total_err = err + change;
            QuadResult {
                value,
                abs_error_estimate: total_err,
                n_evals: evals,
                abs_integral: 0.0,
                flags: QuadFlags { converged: converged && total_err <= tol, tail_extrapolated: true, cancellation_suspect: false },
            }
        }
    }
}

/// `∫₀^R` of the `σ` integrand, period by period.
fn sigma_head(r: f64, tol: f64) -> (f64, usize, f64, bool) {
    let mut breaks = vec![0.0];
    let mut k = 1;
    loop {
        let b = sigma_phase_inverse(k as f64 * PI);
        if b >= r {
            break;
        }
        breaks.push(b);
        k += 1;
    }
    breaks.push(r);
    let (terms, evals, err, converged) = period_integrals(&sigma_integrand, &breaks, tol * 1e-3);
    (pairwise_sum(&terms), evals, err, converged)
}

/// Tail of `σ` beyond `R` together with a bound on the neglected remainder.
#[derive(Debug, Clone, Copy)]
pub struct TailEstimate {
    pub value: f64,
    pub bound: f64,
}

/// `∫_R^∞` of the `σ` integrand.
///
/// With `x = cot θ` the tail is `Im ∫₀^{θ_R} e^{iΨ(θ)} sin^{−3/2}θ dθ`,
/// `Ψ = cot θ + θ/2 − π/8`, `θ_R = arctan(1/R)`. Since `csc²θ = ½ − Ψ′`,
/// `∫₀^{θ_R} e^{iΨ} q = i·e^{iΨ(θ_R)}·Q(θ_R) + ∫₀^{θ_R} e^{iΨ}(½Q − iQ′)` with
/// `Q = q·sin²θ`; each step raises the power of `sin θ` by one. Amplitudes are
/// kept as sums of `c·sin^m θ·cos^n θ`.
pub fn sigma_tail(r: f64) -> TailEstimate {
    let theta_r = (1.0 / r).atan();
    let (s, c) = theta_r.sin_cos();
    let psi_r = r + 0.5 * theta_r - FRAC_PI_8;
    let e = Complex64::from_polar(1.0, psi_r);
    // Key: (2m, n) for sin^m θ cos^n θ, m half-integral.
    let mut q: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
    q.insert((-3, 0), Complex64::new(1.0, 0.0));
    let eval = |terms: &BTreeMap<(i32, i32), Complex64>| -> Complex64 {
        terms.iter().map(|(&(m2, n), &coef)| coef * s.powf(m2 as f64 / 2.0) * c.powi(n)).sum()
    };
    let mut boundary = Complex64::new(0.0, 0.0);
    for _ in 0..COT_TAIL_STEPS {
        // Q = q·sin²θ.
        let big_q: BTreeMap<(i32, i32), Complex64> = q.iter().map(|(&(m2, n), &coef)| ((m2 + 4, n), coef)).collect();
        boundary += Complex64::i() * e * eval(&big_q);
        let mut next: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
        for (&(m2, n), &coef) in &big_q {
            *next.entry((m2, n)).or_default() += coef * 0.5;
            // d/dθ sin^m cos^n = m sin^{m−1} cos^{n+1} − n sin^{m+1} cos^{n−1}.
            let m = m2 as f64 / 2.0;
            if m != 0.0 {
                *next.entry((m2 - 2, n + 1)).or_default() += -Complex64::i() * coef * m;
            }
            if n != 0 {
                *next.entry((m2 + 2, n - 1)).or_default() += Complex64::i() * coef * n as f64;
            }
        }
        q = next;
    }
    // |∫₀^{θ_R} e^{iΨ} q| ≤ Σ |c|·θ_R^{m+1}/(m+1)   (|sin θ| ≤ θ, |cos θ| ≤ 1).
    let bound = q
        .iter()
        .map(|(&(m2, _), coef)| {
            let m = m2 as f64 / 2.0;
            coef.norm() * theta_r.powf(m + 1.0) / (m + 1.0)
        })
        .sum();
    TailEstimate { value: boundary.im, bound }
}

/// `σ′` by the default strategy ([`SigmaPrimeStrategy::Accelerated`]).
pub fn sigma_prime_const(tol: f64) -> QuadResult<f64> {
    sigma_prime_const_with(SigmaPrimeStrategy::Accelerated, tol)
}

const SIGMA_PRIME_SHIFT: f64 = 3.0 * PI / 16.0;

fn sigma_prime_integrand(x: f64) -> f64 {
    (SIGMA_PRIME_SHIFT + x).sin() / x.powf(0.25)
}

/// Integral over `[0, δ]`, `δ = 13π/16` (first zero), after `x = t⁴`, which
/// turns the `x^{−1/4}` singularity into the smooth `4t²·sin(3π/16 + t⁴)`.
fn sigma_prime_head(tol: f64) -> (f64, usize, f64, bool) {
    let delta = PI - SIGMA_PRIME_SHIFT;
    let g = |t: f64| 4.0 * t * t * (SIGMA_PRIME_SHIFT + t.powi(4)).sin();
    let q = Adaptive::new(GaussKronrod::QK21, tol).integrate(&g, 0.0, delta.powf(0.25));
    (q.value, q.n_evals, q.abs_error_estimate, q.flags.converged)
}

/// The period integrals of `σ′` beyond the first zero, up to `periods` of them.
pub fn sigma_prime_period_terms(periods: usize, tol: f64) -> Vec<f64> {
    let breaks: Vec<f64> = (1..=periods + 1).map(|k| k as f64 * PI - SIGMA_PRIME_SHIFT).collect();
    period_integrals(&sigma_prime_integrand, &breaks, tol).0
}

/// `σ′` by an explicit strategy.
pub fn sigma_prime_const_with(strategy: SigmaPrimeStrategy, tol: f64) -> QuadResult<f64> {
    let tol = check_tol(tol);
    let (head, head_evals, head_err, head_ok) = sigma_prime_head(tol * 1e-2);
    let periods = match strategy {
        SigmaPrimeStrategy::Accelerated => ACCELERATED_PERIODS,
        SigmaPrimeStrategy::RawPartialSums => RAW_PERIODS,
    };
    let breaks: Vec<f64> = (1..=periods + 1).map(|k| k as f64 * PI - SIGMA_PRIME_SHIFT).collect();
    let (mut terms, evals, err, ok) = period_integrals(&sigma_prime_integrand, &breaks, tol * 1e-3 / periods as f64);
    terms.insert(0, head);
    let (value, extrapolation_err) = match strategy {
        SigmaPrimeStrategy::Accelerated => averaged_limit(&terms, AVERAGING_DEPTH),
        SigmaPrimeStrategy::RawPartialSums => {
            let n = terms.len();
            let before = pairwise_sum(&terms[..n - 1]);
            let after = before + terms[n - 1];
            // Consecutive partial sums bracket the limit; the midpoint is off by
            // about a quarter of the change in term size.
            let last = terms[n - 1].abs();
            let prev = terms[n - 2].abs();
            (0.5 * (before + after), 0.25 * (prev - last).abs() + 0.5 * (before - after).abs() * f64::EPSILON)
        }
    };
    let total_err = head_err + err + extrapolation_err;
    QuadResult {
        value,
        abs_error_estimate: total_err,
        n_evals: head_evals + evals,
        abs_integral: 0.0,
        flags: QuadFlags {
            converged: head_ok && ok && total_err <= tol.max(1e-7),
            tail_extrapolated: true,
            cancellation_suspect: false,
        },
    }
}
