//! Gauss–Kronrod rules and a globally adaptive integrator.
//!
//! Node/weight tables follow the QUADPACK layout: abscissae in descending
//! order on `[0, 1]`, ending with the centre node `0.0`. Odd-indexed entries
//! (0-based) are the embedded Gauss nodes.

// Tables are kept exactly as published.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::{QuadFlags, QuadResult};

/// Values that can be integrated: real or complex scalars.
pub trait Scalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    /// Modulus used for error control.
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

pub(crate) const NODES_21: [f64; 11] = [
    0.99565716302580808074,
    0.97390652851717172008,
    0.930157491355708226,
    0.86506336668898451073,
    0.78081772658641689706,
    0.67940956829902440623,
    0.56275713466860468334,
    0.4333953941292471908,
    0.29439286270146019813,
    0.14887433898163121088,
    0.0,
];

pub(crate) const KRONROD_WEIGHTS_21: [f64; 11] = [
    0.011694638867371874278,
    0.032558162307964727479,
    0.054755896574351996031,
    0.075039674810919952767,
    0.093125454583697605535,
    0.1093871588022976419,
    0.12349197626206585108,
    0.13470921731147332593,
    0.1427759385770600808,
    0.14773910490133849137,
    0.14944555400291690566,
];

pub(crate) const GAUSS_WEIGHTS_21: [f64; 5] = [
    0.066671344308688137594,
    0.14945134915058059315,
    0.219086362515982044,
    0.26926671930999635509,
    0.29552422471475287017,
];

pub(crate) const NODES_61: [f64; 31] = [
    0.99948441005049063757,
    0.99689348407464954027,
    0.99163099687040459486,
    0.98366812327974720997,
    0.97311632250112626837,
    0.96002186496830751222,
    0.94437444474855997942,
    0.92620004742927432588,
    0.90557330769990779855,
    0.88256053579205268154,
    0.85720523354606109896,
    0.82956576238276839744,
    0.79972783582183908301,
    0.76777743210482619492,
    0.73379006245322680473,
    0.69785049479331579693,
    0.66006106412662696137,
    0.62052618298924286114,
    0.57934523582636169176,
    0.53662414814201989926,
    0.49248046786177857499,
    0.44703376953808917678,
    0.40040125483039439254,
    0.35270472553087811347,
    0.30407320227362507737,
    0.25463692616788984644,
    0.20452511668230989144,
    0.15386991360858354696,
    0.10280693796673703015,
    0.051471842555317695833,
    0.0,
];

pub(crate) const KRONROD_WEIGHTS_61: [f64; 31] = [
    0.0013890136986770076246,
    0.0038904611270998840513,
    0.0066307039159312921733,
    0.0092732796595177634284,
    0.011823015253496341742,
    0.014369729507045804812,
    0.016920889189053272628,
    0.019414141193942381173,
    0.021828035821609192297,
    0.024191162078080601366,
    0.026509954882333101611,
    0.028754048765041292844,
    0.030907257562387762473,
    0.032981447057483726032,
    0.034979338028060024137,
    0.036882364651821229224,
    0.03867894562472759295,
    0.040374538951535959112,
    0.041969810215164246147,
    0.043452539701356069317,
    0.044814800133162663192,
    0.046059238271006988116,
    0.047185546569299153945,
    0.048185861757087129141,
    0.049055434555029778888,
    0.049795683427074206358,
    0.050405921402782346841,
    0.050881795898749606492,
    0.051221547849258772171,
    0.051426128537459025934,
    0.051494729429451567558,
];

pub(crate) const GAUSS_WEIGHTS_61: [f64; 15] = [
    0.0079681924961666056155,
    0.018466468311090959142,
    0.02878470788332336935,
    0.038799192569627049597,
    0.048402672830594052903,
    0.057493156217619066482,
    0.065974229882180495128,
    0.073755974737705206268,
    0.080755895229420215355,
    0.086899787201082979802,
    0.092122522237786128718,
    0.096368737174644259639,
    0.099593420586795267063,
    0.1017623897484055046,
    0.10285265289355884034,
];

/// A Gauss–Kronrod pair `(G_n, K_{2n+1})`.
#[derive(Debug, Clone, Copy)]
pub struct GaussKronrod {
    nodes: &'static [f64],
    kronrod: &'static [f64],
    gauss: &'static [f64],
}

impl GaussKronrod {
    /// 10-point Gauss / 21-point Kronrod.
    pub const QK21: GaussKronrod = GaussKronrod {
        nodes: &NODES_21,
        kronrod: &KRONROD_WEIGHTS_21,
        gauss: &GAUSS_WEIGHTS_21,
    };

    /// 30-point Gauss / 61-point Kronrod.
    pub const QK61: GaussKronrod = GaussKronrod {
        nodes: &NODES_61,
        kronrod: &KRONROD_WEIGHTS_61,
        gauss: &GAUSS_WEIGHTS_61,
    };

    /// Number of integrand evaluations per panel.
    pub fn points(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Applies the rule on `[a, b]`, returning the Kronrod estimate, the
    /// Kronrod–Gauss difference as error estimate, and the integral of `|f|`.
    pub fn apply<T: Scalar, F: Fn(f64) -> T + ?Sized>(&self, f: &F, a: f64, b: f64) -> (T, f64, f64) {
        let centre = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let n = self.nodes.len();
        let fc = f(centre);
        let mut kron = fc * self.kronrod[n - 1];
        let mut abs_sum = fc.modulus() * self.kronrod[n - 1];
        // The centre carries a Gauss weight only when the Gauss order is odd.
        let mut gauss = if n.is_multiple_of(2) {
            fc * self.gauss[self.gauss.len() - 1]
        } else {
            T::default()
        };
        for j in 0..n - 1 {
            let dx = half * self.nodes[j];
            let f1 = f(centre - dx);
            let f2 = f(centre + dx);
            let pair = f1 + f2;
            kron = kron + pair * self.kronrod[j];
            abs_sum += (f1.modulus() + f2.modulus()) * self.kronrod[j];
            if j % 2 == 1 {
                gauss = gauss + pair * self.gauss[j / 2];
            }
        }
        let kron = kron * half;
        let gauss = gauss * half;
        ((kron), (kron - gauss).modulus(), abs_sum * half.abs())
    }
}

/// Globally adaptive bisection driven by a Gauss–Kronrod rule.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub rule: GaussKronrod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { rule: GaussKronrod::QK21, abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 2000 }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    abs_value: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl Adaptive {
    /// Adaptive integrator with the given rule and absolute tolerance.
    pub fn new(rule: GaussKronrod, abs_tol: f64) -> Self {
        Adaptive { rule, abs_tol, rel_tol: 0.0, ..Default::default() }
    }

    /// Sets the relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Sets the maximal number of panels.
    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Integrates `f` over `[a, b]` (either orientation).
    ///
    /// The panel with the largest error estimate is bisected until the summed
    /// estimate is below `max(abs_tol, rel_tol·|I|)` or the panel budget is
    /// exhausted; in the latter case `flags.converged` is false.
    pub fn integrate<T: Scalar, F: Fn(f64) -> T + ?Sized>(&self, f: &F, a: f64, b: f64) -> QuadResult<T> {
        let per_panel = self.rule.points();
        if a == b {
            return QuadResult::exact(T::default(), 0);
        }
        let (value, error, abs_value) = self.rule.apply(f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Panel { a, b, value, error, abs_value });
        let mut total = value;
        let mut total_err = error;
        let mut n_evals = per_panel;
        let mut converged = false;
        loop {
            let target = self.abs_tol.max(self.rel_tol * total.modulus());
            if total_err <= target {
                converged = true;
                break;
            }
            if heap.len() >= self.max_panels {
                break;
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid == worst.a || mid == worst.b {
                // Panel can no longer be split in floating point.
                heap.push(worst);
                break;
            }
            let (v1, e1, s1) = self.rule.apply(f, worst.a, mid);
            let (v2, e2, s2) = self.rule.apply(f, mid, worst.b);
            n_evals += 2 * per_panel;
            total = total - worst.value + v1 + v2;
            total_err += e1 + e2 - worst.error;
            heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, abs_value: s1 });
            heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, abs_value: s2 });
        }
        // Re-sum from scratch to shed the drift of the running updates.
        let mut value = T::default();
        let mut err = 0.0;
        let mut panels: Vec<Panel<T>> = heap.into_vec();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let mut total_abs = 0.0;
        for p in &panels {
            value = value + p.value;
            err += p.error;
            total_abs += p.abs_value;
        }
        QuadResult {
            value,
            abs_error_estimate: err,
            n_evals,
            abs_integral: total_abs,
            flags: QuadFlags { converged, ..Default::default() },
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Probabilists' Gauss–Hermite rule: `∫ g(u) e^{-u²/2} du ≈ Σ w_k g(u_k)`.
///
/// Built by the Golub–Welsch recurrence evaluated with Newton refinement on
/// the normalised Hermite polynomials.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Physicists' nodes t_k for weight e^{-t²}; u = √2·t, w = √2·W.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (p, d) = hermite_normalised(n, z);
            pp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = hermite_normalised(n, z);
        if d != 0.0 {
            pp = d;
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; n];
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..n.div_ceil(2) {
        u[i] = -nodes[i] * s2;
        u[n - 1 - i] = nodes[i] * s2;
        w[i] = weights[i] * s2;
        w[n - 1 - i] = weights[i] * s2;
    }
    (u, w)
}

/// Orthonormal-scaled Hermite recurrence (Numerical Recipes normalisation).
fn hermite_normalised(n: usize, z: f64) -> (f64, f64) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    let pp = (2.0 * n as f64).sqrt() * p2;
    (p1, pp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        for rule in [GaussKronrod::QK21, GaussKronrod::QK61] {
            let n = rule.nodes.len();
            let k: f64 = 2.0 * rule.kronrod[..n - 1].iter().sum::<f64>() + rule.kronrod[n - 1];
            assert!((k - 2.0).abs() < 1e-14);
            let g: f64 = if n % 2 == 0 {
                2.0 * rule.gauss[..rule.gauss.len() - 1].iter().sum::<f64>() + rule.gauss[rule.gauss.len() - 1]
            } else {
                2.0 * rule.gauss.iter().sum::<f64>()
            };
            assert!((g - 2.0).abs() < 1e-14, "gauss weights sum {g}");
        }
    }

    #[test]
    fn polynomials_are_exact() {
        // K21 integrates degree 31 exactly; K61 degree 91.
        let r = GaussKronrod::QK21.apply(&|x: f64| x.powi(30), 0.0, 1.0);
        assert!((r.0 - 1.0 / 31.0).abs() < 1e-15);
        let r = GaussKronrod::QK61.apply(&|x: f64| x.powi(90), -1.0, 1.0);
        assert!((r.0 - 2.0 / 91.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = Adaptive::new(GaussKronrod::QK21, 1e-12).integrate(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0);
        assert!(q.flags.converged);
        assert!((q.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reversed_interval_changes_sign() {
        let ad = Adaptive::new(GaussKronrod::QK61, 1e-13);
        let fwd = ad.integrate(&|x: f64| x.exp(), 0.0, 2.0).value;
        let bwd = ad.integrate(&|x: f64| x.exp(), 2.0, 0.0).value;
        assert!((fwd + bwd).abs() < 1e-13);
        assert!((fwd - (2f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand() {
        let ad = Adaptive::new(GaussKronrod::QK21, 1e-13);
        let q = ad.integrate(&|x: f64| Complex64::new(0.0, x).exp(), 0.0, std::f64::consts::PI);
        assert!((q.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((s - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_rule_moments() {
        let (u, w) = gauss_hermite(40);
        let norm = (2.0 * std::f64::consts::PI).sqrt();
        let m0: f64 = w.iter().sum();
        let m4: f64 = u.iter().zip(&w).map(|(u, w)| w * u.powi(4)).sum();
        assert!((m0 / norm - 1.0).abs() < 1e-13);
        assert!((m4 / norm - 3.0).abs() < 1e-12);
    }
}
