//! Limiting Malliavin covariance `DU⁰(w)`, its scaled determinant `Δ(w)`, the
//! quadratic form `ψ(w, y, z)` and the affine-rotation group action.
//!
//! `DU⁰(w)` is the covariance of `(−∫₀¹ sin(ws)ω_s ds, ∫₀¹ cos(ws)ω_s ds)` for a
//! standard Brownian bridge `ω`:
//!
//! ```text
//! m11 = (1/2w²)(1 + sin 2w/2w) − sin²w/w⁴
//! m12 = sin²w/(2w³) − (1 − cos w) sin w/w⁴
//! m22 = (1/2w²)(1 − sin 2w/2w) − (1 − cos w)²/w⁴
//! ```
//!
//! The closed forms lose up to ~10 digits to cancellation for small `|w|`;
//! below [`SERIES_CUTOFF`] every quantity is evaluated from its Taylor series.

use crate::error::{Error, Result};

/// `|w|` below which the Taylor branches are used.
pub const SERIES_CUTOFF: f64 = 2.0;

/// Coefficients of w^{2+2k}.
pub(crate) const M11_SERIES: [f64; 24] = [
    0.022222222222222223,
    -0.0031746031746031746,
    0.00021164021164021165,
    -8.551119662230774e-06,
    2.3492086984150475e-07,
    -4.698417396830095e-09,
    7.165342435252869e-11,
    -8.619960824364353e-13,
    8.396065738017227e-15,
    -6.760117341398734e-17,
    4.576079431100682e-19,
    -2.6413156889470022e-21,
    1.3155978527322232e-23,
    -5.712893901442657e-26,
    2.182159626219502e-28,
    -7.389323602013129e-31,
    2.2336148868105122e-33,
    -6.064112814870169e-36,
    1.486877577526561e-38,
    -3.3089519918249937e-41,
    6.713815635586944e-44,
    -1.2470782166743732e-46,
    2.128593616587056e-49,
    -3.350137503973333e-52,
];

/// Coefficients of w^{1+2k}.
pub(crate) const M12_SERIES: [f64; 24] = [
    -0.041666666666666664,
    0.009722222222222222,
    -0.0008845899470899471,
    4.4918430335097004e-05,
    -1.4801620704398482e-06,
    3.4455825626460547e-08,
    -5.988207149748155e-10,
    8.081221493476828e-12,
    -8.722581362900892e-14,
    7.706534156011574e-16,
    -5.678498631244439e-18,
    3.543765225187584e-20,
    -1.8974969041101644e-22,
    8.814179163441938e-25,
    -3.5860156525358785e-27,
    1.288513303110717e-29,
    -4.1190486295078275e-32,
    1.1791330473363564e-34,
    -3.0402733624690827e-37,
    7.097702022464777e-40,
    -1.5074114629425054e-42,
    2.924965271836261e-45,
    -5.205799605783563e-48,
    8.528891728865443e-51,
];

/// Coefficients of w^{0+2k}.
pub(crate) const M22_SERIES: [f64; 24] = [
    0.08333333333333333,
    -0.025,
    0.003224206349206349,
    -0.00021219135802469136,
    8.555295013628347e-06,
    -2.3494381133270021e-07,
    4.698512986376743e-09,
    -7.165373673666806e-11,
    8.6199690449996e-13,
    -8.396067517375506e-15,
    6.760117663746248e-17,
    -4.576079480692606e-19,
    2.6413156955067805e-21,
    -1.3155978534862209e-23,
    5.712893902202735e-26,
    -2.1821596262872455e-28,
    7.3893236020668935e-31,
    -2.233614886814336e-33,
    6.06411281487262e-36,
    -1.4868775775267032e-38,
    3.3089519918250686e-41,
    -6.71381563558698e-44,
    1.2470782166743747e-46,
    -2.128593616587057e-49,
];

/// Coefficients of w^{6+2k}.
pub(crate) const DELTA_SERIES: [f64; 24] = [
    0.000462962962962963,
    -3.968253968253968e-05,
    1.6534391534391535e-06,
    -4.39008375516312e-08,
    8.293349067158591e-10,
    -1.1853103784320715e-11,
    1.3340587803397618e-13,
    -1.2168248348951358e-15,
    9.193766289130574e-18,
    -5.854917472405786e-20,
    3.187794932724557e-22,
    -1.5016749839456133e-24,
    6.182785623284139e-27,
    -2.2445070455050616e-29,
    7.239540016590186e-32,
    -2.088749969644831e-34,
    5.423190322291835e-37,
    -1.2739465168555358e-39,
    2.7206938599465328e-42,
    -5.305750958215348e-45,
    9.486123726094819e-48,
    -1.5606057206009243e-50,
    2.370380309415099e-53,
    -3.334317232847272e-56,
];

/// Symmetric 2×2 matrix `DU⁰(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalliavinMatrix {
    pub w: f64,
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl MalliavinMatrix {
    /// Determinant `m11·m22 − m12²`.
    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    /// Quadratic form `vᵀ·DU⁰·v`.
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        self.m11 * v[0] * v[0] + 2.0 * self.m12 * v[0] * v[1] + self.m22 * v[1] * v[1]
    }
}

/// A point `(w, y, z)` of the state space `ℝ × ℝ²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TargetPoint {
    pub w: f64,
    pub y: f64,
    pub z: f64,
}

impl TargetPoint {
    pub const ORIGIN: TargetPoint = TargetPoint { w: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, y: f64, z: f64) -> Self {
        TargetPoint { w, y, z }
    }
}

/// Evaluates `Σ c_k (w²)^k · w^start` by Horner's scheme.
fn even_series(coeffs: &[f64], w: f64, start: i32) -> f64 {
    let w2 = w * w;
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * w2 + c) * w.powi(start)
}

/// The limiting Malliavin covariance matrix `DU⁰(w)`.
pub fn du0(w: f64) -> MalliavinMatrix {
    if w.abs() < SERIES_CUTOFF {
        return MalliavinMatrix {
            w,
            m11: even_series(&M11_SERIES, w, 2),
            m12: even_series(&M12_SERIES, w, 1),
            m22: even_series(&M22_SERIES, w, 0),
        };
    }
    let s = w.sin();
    let s2w = (2.0 * w).sin() / (2.0 * w);
    let w2 = w * w;
    let w4 = w2 * w2;
    let omc = 2.0 * (0.5 * w).sin().powi(2);
    MalliavinMatrix {
        w,
        m11: (1.0 + s2w) / (2.0 * w2) - s * s / w4,
        m12: s * s / (2.0 * w2 * w) - omc * s / w4,
        m22: (1.0 - s2w) / (2.0 * w2) - omc * omc / w4,
    }
}

/// `Δ(w) = 1 − (sin²w + 4(1 − cos w))/w² + 4(1 − cos w) sin w/w³ = 4w⁴·det DU⁰(w)`.
///
/// Strictly positive for `w ≠ 0`; `w = 0` is rejected because the degenerate
/// regimes take over there.
pub fn delta(w: f64) -> Result<f64> {
    if w == 0.0 {
        return Err(Error::domain("delta", "w = 0 belongs to the degenerate regimes"));
    }
    if !w.is_finite() {
        return Err(Error::domain("delta", format!("w must be finite, got {w}")));
    }
    if w.abs() < SERIES_CUTOFF {
        return Ok(even_series(&DELTA_SERIES, w, 6));
    }
    let s = w.sin();
    let omc = 2.0 * (0.5 * w).sin().powi(2);
    let w2 = w * w;
    Ok(1.0 - (s * s + 4.0 * omc) / w2 + 4.0 * omc * s / (w2 * w))
}

/// The zero point `(sin w/w, (1 − cos w)/w)` of `ψ(w, ·, ·)`.
pub fn psi_zero_point(w: f64) -> (f64, f64) {
    if w == 0.0 {
        return (1.0, 0.0);
    }
    (w.sin() / w, 2.0 * (0.5 * w).sin().powi(2) / w)
}

/// Below this `|w|` the coefficients of `ψ` come from the series of `DU⁰`.
const PSI_EXPANDED_CUTOFF: f64 = 0.25;

/// The non-negative quadratic form
/// `ψ(w,y,z) = [1 − sin 2w/2w − 2((1−cos w)/w)²]·μ² + [1 + sin 2w/2w − 2(sin w/w)²]·λ²
///            − 4[sin²w/2w − (1−cos w)·sin w/w²]·μλ`
/// with `μ = sin w/w − y` and `λ = (1 − cos w)/w − z`.
///
/// Equivalently `ψ = 2w²·(λ, −μ)·DU⁰·(λ, −μ)ᵗ`, so that `(w²/ε)·ψ(w, ŷ, ẑ)/Δ(w)`
/// is the Gaussian exponent of the scaled endpoint `(ŷ, ẑ)`. Vanishes exactly
/// at [`psi_zero_point`].
pub fn psi_quad(w: f64, y: f64, z: f64) -> Result<f64> {
    if w == 0.0 {
        return Err(Error::domain("psi_quad", "w = 0 belongs to the degenerate regimes"));
    }
    let (sinc, versc) = psi_zero_point(w);
    let mu = sinc - y;
    let lambda = versc - z;
    let (c_mu, c_lambda, c_cross) = if w.abs() < PSI_EXPANDED_CUTOFF {
        // The expanded trigonometric coefficients cancel badly here; they equal
        // 2w²·(m22, m11, 2·m12).
        let m = du0(w);
        let w2 = 2.0 * w * w;
        (w2 * m.m22, w2 * m.m11, 2.0 * w2 * m.m12)
    } else {
        let s = w.sin();
        let omc = 2.0 * (0.5 * w).sin().powi(2);
        let s2w = (2.0 * w).sin() / (2.0 * w);
        (
            1.0 - s2w - 2.0 * versc * versc,
            1.0 + s2w - 2.0 * sinc * sinc,
            4.0 * (s * s / (2.0 * w) - omc * s / (w * w)),
        )
    };
    Ok(c_mu * mu * mu + c_lambda * lambda * lambda - c_cross * mu * lambda)
}

/// Affine-rotation group action: expresses `target` in the frame of `start`,
/// `(w − w₀, (y − y₀)cos w₀ + (z − z₀)sin w₀, (z − z₀)cos w₀ − (y − y₀)sin w₀)`.
pub fn homogenize(start: TargetPoint, target: TargetPoint) -> TargetPoint {
    let (s, c) = start.w.sin_cos();
    let dy = target.y - start.y;
    let dz = target.z - start.z;
    TargetPoint { w: target.w - start.w, y: dy * c + dz * s, z: dz * c - dy * s }
}

/// Group law: the point reached by moving by `g` from `h` (`h·g`), so that
/// `homogenize(h, compose(h, g)) = g`.
pub fn compose(h: TargetPoint, g: TargetPoint) -> TargetPoint {
    let (s, c) = h.w.sin_cos();
    TargetPoint { w: h.w + g.w, y: h.y + g.y * c - g.z * s, z: h.z + g.y * s + g.z * c }
}
