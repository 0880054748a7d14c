//! Reproducible parallel Monte Carlo over Brownian-bridge paths.
//!
//! Path `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream
//! `i`, so every path is a pure function of `(seed, i)`. Paths are grouped in
//! fixed chunks whose statistics are accumulated sequentially and then merged
//! in a fixed pairwise order; the result is therefore bit-identical for any
//! number of worker threads.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{fill_bridge, BridgePath};
use crate::error::{Error, Result};

/// Paths per reduction chunk.
pub const CHUNK: usize = 1024;

/// Monte-Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
}

impl McConfig {
    pub fn new(n_paths: usize, n_steps: usize, seed: u64) -> Self {
        McConfig { n_paths, n_steps, seed, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self, op: &'static str) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::domain(op, format!("need n_paths >= 2, got {}", self.n_paths)));
        }
        if self.n_steps < 2 {
            return Err(Error::domain(op, format!("need n_steps >= 2, got {}", self.n_steps)));
        }
        Ok(())
    }
}

/// Sample mean of a complex functional with its standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: Complex64,
    /// Standard error of the complex mean, `√(se_re² + se_im²)`.
    pub std_error: f64,
    pub se_re: f64,
    pub se_im: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl MCEstimate {
    /// Whether `value` lies within `k` standard errors componentwise.
    pub fn within(&self, value: Complex64, k: f64) -> bool {
        (self.mean.re - value.re).abs() <= k * self.se_re && (self.mean.im - value.im).abs() <= k * self.se_im
    }
}

/// Count, mean and centred second moment (Chan et al. merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments { n, mean: a.mean + d * (b.n / n), m2: a.m2 + b.m2 + d * d * (a.n * b.n / n) }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

fn merge_pairwise(v: &[Vec<(Moments, Moments)>]) -> Vec<(Moments, Moments)> {
    match v.len() {
        0 => Vec::new(),
        1 => v[0].clone(),
        n => {
            let a = merge_pairwise(&v[..n / 2]);
            let b = merge_pairwise(&v[n / 2..]);
            a.into_iter().zip(b).map(|((ar, ai), (br, bi))| (Moments::merge(ar, br), Moments::merge(ai, bi))).collect()
        }
    }
}

/// The random stream of path `index` for a given seed.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `job` on a pool with `workers` threads (or the global pool for 0).
pub(crate) fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain("thread pool", e.to_string()))?;
    Ok(pool.install(job))
}

/// Monte-Carlo means of a vector-valued path functional of dimension `dim`.
///
/// `functional(path, out)` writes the `dim` values of one path into `out`.
pub fn mc_estimate_field<F>(config: McConfig, dim: usize, functional: F) -> Result<Vec<MCEstimate>>
where
    F: Fn(&BridgePath, &mut [Complex64]) + Sync,
{
    config.validate("mc_estimate")?;
    let n_chunks = config.n_paths.div_ceil(CHUNK);
    let chunks: Vec<Vec<(Moments, Moments)>> = with_workers(config.workers, || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut path = BridgePath { values: vec![0.0; config.n_steps + 1] };
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                let mut acc = vec![(Moments::default(), Moments::default()); dim];
                let end = ((c + 1) * CHUNK).min(config.n_paths);
                for i in c * CHUNK..end {
                    let mut rng = path_rng(config.seed, i as u64);
                    fill_bridge(&mut path.values, &mut rng);
                    functional(&path, &mut out);
                    for (a, v) in acc.iter_mut().zip(&out) {
                        a.0.push(v.re);
                        a.1.push(v.im);
                    }
                }
                acc
            })
            .collect()
    })?;
    Ok(merge_pairwise(&chunks)
        .into_iter()
        .map(|(re, im)| {
            let (se_re, se_im) = (re.std_error(), im.std_error());
            MCEstimate {
                mean: Complex64::new(re.mean, im.mean),
                std_error: se_re.hypot(se_im),
                se_re,
                se_im,
                n_paths: config.n_paths,
                seed: config.seed,
            }
        })
        .collect())
}

/// Monte-Carlo mean of a scalar complex path functional.
pub fn mc_estimate<F>(config: McConfig, functional: F) -> Result<MCEstimate>
where
    F: Fn(&BridgePath) -> Complex64 + Sync,
{
    let field = mc_estimate_field(config, 1, |p, out| out[0] = functional(p))?;
    Ok(field[0])
}
