//! Validation suites: every check re-derives a library result from an
//! independent route (identity, closed form, second algorithm or simulation).

use std::f64::consts::PI;
use std::time::Instant;

use circlang::bridge::diffusion::simulate_endpoints;
use circlang::bridge::maximum::ks_distance;
use circlang::bridge::mc::path_rng;
use circlang::bridge::{
    fourier_laplace_complex, laplace_const, laplace_general, mc_estimate, mc_estimate_field, p_eps_mc, sample_abs_max, sample_bridge,
    wstar_cdf, wstar_cdf_alternating, wstar_cdf_dual, McConfig, XiGrid,
};
use circlang::kernel::{p_case_i, p_general};
use circlang::malliavin::{compose, delta, du0, homogenize, psi_quad, psi_zero_point, TargetPoint};
use circlang::quad::constants::{sigma_const_with, sigma_prime_const_with, SigmaPrimeStrategy, SigmaStrategy};
use circlang::quad::{fourier_invert_gaussian, fourier_invert_mc, InversionGrid};
use circlang::specfun::{phi_lift_polar, ratio, theta_root};
use circlang::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Outcome;
use crate::args::{GlobalOpts, Suite, ValidateArgs};
use crate::error::{CliError, Result};
use crate::output::{sig_digits, Cell, Table};

/// Resources a suite may spend.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub workers: usize,
    pub tol: f64,
}

impl Budget {
    fn config(&self) -> McConfig {
        McConfig::new(self.paths, self.steps, self.seed).with_workers(self.workers)
    }

    /// Generator for the random inputs of check `id`.
    fn inputs(&self, id: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (u64::from(id) << 32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Deterministic,
    MonteCarlo,
}

type CheckFn = fn(&Budget) -> circlang::Result<(bool, String)>;

/// A numbered check.
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub kind: Kind,
    run: CheckFn,
}

/// Every check, in numbering order.
pub const CHECKS: &[Check] = &[
    Check { id: 1, name: "scaled determinant identity", kind: Kind::Deterministic, run: scaled_determinant },
    Check { id: 2, name: "small-w determinant expansions", kind: Kind::Deterministic, run: small_w },
    Check { id: 3, name: "quadratic form identities", kind: Kind::Deterministic, run: psi_identities },
    Check { id: 4, name: "oscillatory constants, two strategies", kind: Kind::Deterministic, run: constants },
    Check { id: 5, name: "first root of tan t = t", kind: Kind::Deterministic, run: first_root },
    Check { id: 6, name: "Riccati transform vs closed form", kind: Kind::Deterministic, run: riccati },
    Check { id: 7, name: "transforms vs bridge Monte Carlo", kind: Kind::MonteCarlo, run: transforms_mc },
    Check { id: 8, name: "axis ratio near the origin", kind: Kind::Deterministic, run: axis_ratio },
    Check { id: 9, name: "law of the bridge maximum", kind: Kind::MonteCarlo, run: bridge_maximum },
    Check { id: 10, name: "Gaussian Fourier inversion", kind: Kind::Deterministic, run: gaussian_inversion },
    Check { id: 11, name: "finite-eps Monte-Carlo inversion", kind: Kind::MonteCarlo, run: mc_inversion },
    Check { id: 12, name: "lifted Phi near the saddle", kind: Kind::Deterministic, run: saddle },
    Check { id: 13, name: "endpoint support", kind: Kind::MonteCarlo, run: support },
    Check { id: 14, name: "group invariance of the kernel", kind: Kind::Deterministic, run: invariance },
    Check { id: 15, name: "worker-count reproducibility", kind: Kind::MonteCarlo, run: reproducibility },
];

/// Checks belonging to a suite.
pub fn suite_checks(suite: Suite) -> impl Iterator<Item = &'static Check> {
    CHECKS.iter().filter(move |c| match suite {
        Suite::Fast => c.kind == Kind::Deterministic,
        Suite::Mc => c.kind == Kind::MonteCarlo,
        Suite::Full => true,
    })
}

pub fn run(args: &ValidateArgs, global: &GlobalOpts) -> Result<Outcome> {
    if args.paths < 2 || args.steps < 2 || !(args.tol > 0.0) {
        return Err(CliError::Usage("--paths and --steps must be at least 2 and --tol positive".into()));
    }
    let budget = Budget { paths: args.paths, steps: args.steps, seed: global.seed, workers: global.workers, tol: args.tol };
    let mut table = Table::new(&["id", "check", "result", "detail", "seconds"]);
    let mut passed = true;
    for check in suite_checks(args.suite) {
        let t = Instant::now();
        let (ok, detail) = (check.run)(&budget).unwrap_or_else(|e| (false, format!("error: {e}")));
        passed &= ok;
        table.push(vec![
            Cell::Int(u64::from(check.id)),
            check.name.into(),
            if ok { "PASS" } else { "FAIL" }.into(),
            detail.into(),
            t.elapsed().as_secs_f64().into(),
        ]);
    }
    Ok(Outcome { table, passed, notes: Vec::new(), outputs: Vec::new() })
}

fn e(x: f64) -> String {
    format!("{x:.2e}")
}

fn scaled_determinant(b: &Budget) -> circlang::Result<(bool, String)> {
    let mut r = b.inputs(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let w: f64 = r.random_range(-20.0..20.0);
        if w == 0.0 {
            continue;
        }
        let d = delta(w)?;
        worst = worst.max((d - 4.0 * w.powi(4) * du0(w).det()).abs() / d);
    }
    Ok((worst <= 1e-12, format!("max relative error {}", e(worst))))
}

fn small_w(_: &Budget) -> circlang::Result<(bool, String)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 1..=300 {
        let w = 0.03 * f64::from(i) / 300.0;
        for v in [du0(w).det() * 8640.0 / (w * w), delta(w)? * 2160.0 / w.powi(6)] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok((lo >= 0.999 && hi <= 1.001, format!("scaled values in [{}, {}]", sig_digits(lo, 9), sig_digits(hi, 9))))
}

fn psi_identities(b: &Budget) -> circlang::Result<(bool, String)> {
    let mut r = b.inputs(3);
    let (mut bilinear, mut polar, mut zero): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let w = loop {
            let w: f64 = r.random_range(-10.0..10.0);
            if w.abs() >= 0.25 {
                break w;
            }
        };
        let (rho, alpha): (f64, f64) = (r.random_range(0.0..2.0), r.random_range(-PI..PI));
        let (y, z) = (rho * alpha.cos(), rho * alpha.sin());
        let psi = psi_quad(w, y, z)?;
        let (y0, z0) = psi_zero_point(w);
        let form = 2.0 * w * w * du0(w).quadratic_form([z0 - z, y - y0]);
        bilinear = bilinear.max((psi - form).abs() / form.abs());
        let (sinc, omc, c) = (w.sin() / w, 1.0 - w.cos(), (w - 2.0 * alpha).cos());
        let p = rho * rho * (1.0 - sinc * c - 2.0 * omc / (w * w) * (1.0 - c))
            - 2.0 * rho * (1.0 - sinc) * ((w - alpha).sin() + alpha.sin()) / w
            + 2.0 * (1.0 - sinc) * omc / (w * w);
        polar = polar.max((psi - p).abs() / psi.abs());
        zero = zero.max(psi_quad(w, y0, z0)?.abs());
    }
    Ok((
        bilinear <= 1e-10 && polar <= 1e-10 && zero <= 1e-12,
        format!("bilinear {}, polar {}, at zero point {}", e(bilinear), e(polar), e(zero)),
    ))
}

fn constants(b: &Budget) -> circlang::Result<(bool, String)> {
    let s1 = sigma_const_with(SigmaStrategy::CotTail, b.tol).value;
    let s2 = sigma_const_with(SigmaStrategy::PeriodSum, b.tol).value;
    let p1 = sigma_prime_const_with(SigmaPrimeStrategy::Accelerated, b.tol).value;
    let p2 = sigma_prime_const_with(SigmaPrimeStrategy::RawPartialSums, b.tol).value;
    let ok = (s1 - s2).abs() <= 1e-6 && (p1 - p2).abs() <= 1e-6 && s1.min(s2) > 0.1 && p1.min(p2) > 0.1;
    Ok((ok, format!("sigma {} / {}, sigma' {} / {}", sig_digits(s1, 12), sig_digits(s2, 12), sig_digits(p1, 12), sig_digits(p2, 12))))
}

fn first_root(_: &Budget) -> circlang::Result<(bool, String)> {
    let t = theta_root(1)?.value;
    let res = (t.tan() - t).abs();
    Ok((t > 4.0 * PI / 3.0 && t < 1.5 * PI && res < 1e-10, format!("theta_1 = {}, residual {}", sig_digits(t, 16), e(res))))
}

fn riccati(b: &Budget) -> circlang::Result<(bool, String)> {
    let mut r = b.inputs(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (a, g): (f64, f64) = (r.random_range(-2.0..2.0), r.random_range(0.1..3.0));
        let general = laplace_general(|_| a, |_| -0.5 * g * g)?;
        let closed = laplace_const(a, g)?;
        worst = worst.max((general - closed).abs() / closed);
    }
    Ok((worst <= 1e-8, format!("max relative error {}", e(worst))))
}

fn transforms_mc(b: &Budget) -> circlang::Result<(bool, String)> {
    let laplace = [(0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (1.0, 0.5), (1.0, 1.0), (1.0, 2.0)];
    let fourier = [(1.0, 1.0, 1.0), (0.0, -4.0, 2.0)];
    let field = mc_estimate_field(b.config(), laplace.len() + fourier.len(), |path, out| {
        let lin = path.integrate(|_, w| w);
        let sq = path.integrate(|_, w| w * w);
        for (k, (a, g)) in laplace.iter().enumerate() {
            out[k] = Complex64::new((a * lin - 0.5 * g * g * sq).exp(), 0.0);
        }
        for (k, (xi, chi, x)) in fourier.iter().enumerate() {
            out[laplace.len() + k] = (Complex64::new(0.0, xi * lin) - 0.5 * Complex64::new(*chi, *x) * sq).exp();
        }
    })?;
    let mut worst: f64 = 0.0;
    for (k, (a, g)) in laplace.iter().enumerate() {
        worst = worst.max((field[k].mean.re - laplace_const(*a, *g)?).abs() / field[k].se_re);
    }
    for (k, (xi, chi, x)) in fourier.iter().enumerate() {
        let exact = fourier_laplace_complex(*xi, *chi, *x)?;
        let est = field[laplace.len() + k];
        worst = worst.max((est.mean.re - exact.re).abs() / est.se_re).max((est.mean.im - exact.im).abs() / est.se_im);
    }
    Ok((worst <= 3.0, format!("max deviation {worst:.2} standard errors")))
}

fn axis_ratio(_: &Budget) -> circlang::Result<(bool, String)> {
    let v = ratio(0.0, 0.01)?;
    let ok = (v.re - (6.0 - 7.14e-7)).abs() <= 1e-6 && (v.im - 0.012).abs() <= 1e-6;
    Ok((ok, format!("ratio(0, 0.01) = {} + {}i, expected 6 + 0.012i - 7.14e-7", sig_digits(v.re, 15), sig_digits(v.im, 12))))
}

fn bridge_maximum(b: &Budget) -> circlang::Result<(bool, String)> {
    let mut gap: f64 = 0.0;
    for i in 0..=250 {
        let y = 0.5 + 2.5 * f64::from(i) / 250.0;
        gap = gap.max((wstar_cdf_alternating(y) - wstar_cdf_dual(y)).abs());
    }
    let mut sample = Vec::with_capacity(b.paths);
    for i in 0..b.paths as u64 {
        let mut r = path_rng(b.seed, i);
        let p = sample_bridge(b.steps, &mut r)?;
        sample.push(sample_abs_max(&p, &mut r));
    }
    let ks = ks_distance(&mut sample, wstar_cdf);
    let tail = [0.5f64, 1.0, 2.0, 4.0].iter().all(|&t| 1.0 - wstar_cdf(t.sqrt()) < 2.0 * (-2.0 * t).exp());
    Ok((gap <= 1e-12 && ks < 0.01 && tail, format!("series gap {}, KS {ks:.4}, tail bound {tail}", e(gap))))
}

fn gaussian_inversion(b: &Budget) -> circlang::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for eps in [0.05, 0.1, 0.2] {
        for w in [0.5, 1.0, 2.0] {
            let (y0, z0) = psi_zero_point(w);
            for (dy, dz) in [(0.0, 0.0), (-0.05, 0.1), (0.2, -0.15)] {
                let q = fourier_invert_gaussian(eps, w, y0 + dy, z0 + dz, b.tol)?;
                let closed = p_case_i(eps, w, eps * (y0 + dy), eps * (z0 + dz))?.log_density();
                worst = worst.max((q.value - closed).exp_m1().abs());
            }
        }
    }
    Ok((worst <= 1e-6, format!("max relative error {} on 27 points", e(worst))))
}

fn mc_inversion(b: &Budget) -> circlang::Result<(bool, String)> {
    let (w, yh, zh) = (1.0, 0.8, 0.3);
    let mut dev = Vec::new();
    let mut parts = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let mc = fourier_invert_mc(eps, w, yh, zh, InversionGrid::default(), b.config())?;
        let closed = p_case_i(eps, w, eps * yh, eps * zh)?.log_density();
        let ratio = (mc.log_value - closed).exp();
        dev.push(if ratio.is_nan() { f64::INFINITY } else { (ratio - 1.0).abs() });
        parts.push(format!("eps {eps}: ratio {ratio:.3e}"));
    }
    let ok = dev[1] <= 0.25 && dev.windows(2).all(|d| d[1] <= d[0]);
    Ok((ok, parts.join("; ")))
}

fn saddle(_: &Budget) -> circlang::Result<(bool, String)> {
    let (eps, y) = (1e-3, -1.0);
    let k = eps * eps / (eps - y);
    let wrap = |a: f64| (a + PI).rem_euclid(2.0 * PI) - PI;
    let (mut modulus, mut argument): (f64, f64) = (0.0, 0.0);
    for i in 0..=20 {
        let x = 0.5 * f64::from(i);
        let v = phi_lift_polar(k - 4.0 * PI * PI, k * x)?;
        let scaled = v.modulus * (x * x + 1.0).powf(0.25) * eps / (eps - y).sqrt();
        modulus = modulus.max((scaled / (8.0 * PI.powf(2.5)) - 1.0).abs());
        argument = argument.max(wrap(v.argument + 3.0 * PI / 8.0 + 0.5 * x.atan()).abs());
    }
    let h: f64 = 1e-4;
    let v = phi_lift_polar(PI * PI, h)?;
    let scaled = Complex64::from_polar(v.modulus * h.powf(0.25), v.argument);
    let claimed = Complex64::from_polar(
        2f64.powf(0.75) * PI.powf(2.75) / ((PI - 2.0 * (PI / 2.0).tanh()).sqrt() * PI.sinh().powf(0.25)),
        5.0 * PI / 16.0,
    );
    let second = (scaled - claimed).norm() / claimed.norm();
    Ok((
        modulus <= 0.02 && argument <= 2e-2 && second <= 0.01,
        format!("modulus {}, argument {argument:.3} rad, limit at chi = pi^2 {second:.3}", e(modulus)),
    ))
}

fn support(b: &Budget) -> circlang::Result<(bool, String)> {
    let pts = simulate_endpoints(1.0, b.paths, b.steps, b.seed, b.workers)?;
    let bad = pts.iter().filter(|p| p.y * p.y + p.z * p.z > 1.0).count();
    Ok((bad == 0, format!("{bad} of {} endpoints outside the disc", pts.len())))
}

fn invariance(b: &Budget) -> circlang::Result<(bool, String)> {
    let mut r = b.inputs(14);
    let eps = 0.1;
    let mut identical = 0;
    for i in 0..100 {
        let start = TargetPoint::new(r.random_range(-5.0..5.0), r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let local = if i % 5 == 0 {
            TargetPoint::new(0.0, r.random_range(0.3..0.5) * eps, r.random_range(0.8..0.95) * eps)
        } else {
            let w = r.random_range(0.2..2.0);
            let (y0, z0) = psi_zero_point(w);
            TargetPoint::new(w, eps * (y0 + r.random_range(-0.1..0.1)), eps * (z0 + r.random_range(-0.1..0.1)))
        };
        let target = compose(start, local);
        let same = match (p_general(eps, start, target), p_general(eps, TargetPoint::ORIGIN, homogenize(start, target))) {
            (Ok(a), Ok(b)) => {
                a.regime == b.regime && a.log_prefactor.to_bits() == b.log_prefactor.to_bits() && a.exponent.to_bits() == b.exponent.to_bits()
            }
            (Err(a), Err(b)) => a.to_string() == b.to_string(),
            _ => false,
        };
        identical += usize::from(same);
    }
    Ok((identical == 100, format!("{identical}/100 bit-identical")))
}

fn reproducibility(b: &Budget) -> circlang::Result<(bool, String)> {
    let suite = |workers: usize| -> circlang::Result<Vec<u64>> {
        let cfg = McConfig::new(b.paths.min(20_000), b.steps.min(256), b.seed).with_workers(workers);
        let mut bits = Vec::new();
        let lap = mc_estimate(cfg, |p| Complex64::new((p.integrate(|_, w| w) - 0.5 * p.integrate(|_, w| w * w)).exp(), 0.0))?;
        bits.extend([lap.mean.re.to_bits(), lap.std_error.to_bits()]);
        let grid = XiGrid { xi_prime: vec![-1.0, 0.5], xi: vec![0.3, 2.0] };
        for est in p_eps_mc(0.1, 1.0, 0.8, 0.3, &grid, cfg)? {
            bits.extend([est.mean.re.to_bits(), est.mean.im.to_bits(), est.std_error.to_bits()]);
        }
        let inv = fourier_invert_mc(0.1, 1.0, 0.8, 0.3, InversionGrid::default(), cfg)?;
        bits.extend([inv.integral.mean.re.to_bits(), inv.integral.mean.im.to_bits()]);
        for p in simulate_endpoints(0.5, 2000, 64, b.seed, workers)? {
            bits.extend([p.w.to_bits(), p.y.to_bits(), p.z.to_bits()]);
        }
        Ok(bits)
    };
    let base = suite(1)?;
    let mut same = true;
    for w in [4, 8] {
        same &= suite(w)? == base;
    }
    Ok((same, format!("{} values compared across 1, 4, 8 workers", base.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_covers_every_check_once() {
        let ids: Vec<u32> = suite_checks(Suite::Full).map(|c| c.id).collect();
        assert_eq!(ids, (1..=15).collect::<Vec<_>>());
        let mut split: Vec<u32> = suite_checks(Suite::Fast).chain(suite_checks(Suite::Mc)).map(|c| c.id).collect();
        split.sort_unstable();
        assert_eq!(split, ids);
    }

    #[test]
    fn small_mc_checks_are_seed_reproducible() {
        let b = Budget { paths: 2000, steps: 32, seed: 5, workers: 0, tol: 1e-10 };
        assert_eq!(support(&b).unwrap(), support(&b).unwrap());
        assert_eq!(transforms_mc(&b).unwrap(), transforms_mc(&b).unwrap());
        let other = Budget { seed: 6, ..b };
        assert_ne!(transforms_mc(&b).unwrap().1, transforms_mc(&other).unwrap().1);
    }
}
