//! Exact simulation of fractional Gaussian noise by circulant embedding, and
//! of the mixed increments `X = σΔ^H G + √Δ W`.
//!
//! Every draw is addressed by `(seed, replication, kind)`: a ChaCha8 stream is
//! seeded from `seed` and the stream id encodes the replication and whether
//! the fGn or the white-noise component is being drawn. Replications are
//! therefore reproducible in isolation and independent of execution order.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{SamplingScheme, Theta};
use crate::spectral::{autocov, HurstIndex};
use crate::toeplitz::CovModel;

/// Relative tolerance below which negative embedding eigenvalues are clamped.
const EMBEDDING_TOL: f64 = 1e-8;

/// Component selector for the random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Fgn = 0,
    White = 1,
}

/// Deterministic generator for replication `rep` and component `kind`.
pub fn stream(seed: u64, rep: u64, kind: StreamKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * rep + kind as u64);
    rng
}

/// Circulant-embedding sampler for `n` consecutive fGn values.
#[derive(Clone)]
pub struct FgnSampler {
    n: usize,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnSampler").field("n", &self.n).finish()
    }
}

impl FgnSampler {
    pub fn new(h: HurstIndex, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("n must be at least 2, got {n}")));
        }
        let m = 2 * n;
        let mut c = vec![Complex::new(0.0, 0.0); m];
        for k in 0..=n {
            c[k].re = autocov(h, k as i64);
        }
        for k in 1..n {
            c[m - k].re = autocov(h, k as i64);
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut c);
        let max = c.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = c.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min < -EMBEDDING_TOL * max {
            return Err(Error::Embedding { min_eigenvalue: min, max_eigenvalue: max });
        }
        let scale = c.iter().map(|z| (z.re.max(0.0) / m as f64).sqrt()).collect();
        Ok(FgnSampler { n, scale, fft })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One exact draw with covariance `T_n(H)`.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf[..self.n].iter().map(|z| z.re).collect()
    }
}

/// Single fGn draw for `(H, n, seed)`.
pub fn fgn_sample(h: HurstIndex, n: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = FgnSampler::new(h, n)?;
    Ok(sampler.sample(&mut stream(seed, 0, StreamKind::Fgn)))
}

/// Observed increments together with the parameters that generated them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementPath {
    pub x: Vec<f64>,
    pub theta: Theta,
    pub scheme: SamplingScheme,
    pub seed: u64,
    pub replication: u64,
}

/// Reusable sampler for the increment vector under fixed `(θ, scheme)`.
#[derive(Debug, Clone)]
pub struct PathSampler {
    theta: Theta,
    scheme: SamplingScheme,
    fgn: FgnSampler,
}

impl PathSampler {
    pub fn new(theta: &Theta, scheme: &SamplingScheme) -> Result<Self> {
        Ok(PathSampler { theta: *theta, scheme: *scheme, fgn: FgnSampler::new(theta.hurst, scheme.n)? })
    }

    /// Replication `rep` of the increments for `seed`.
    pub fn draw(&self, seed: u64, rep: u64) -> IncrementPath {
        let delta = self.scheme.delta();
        let a = self.theta.sigma * delta.powf(self.theta.h());
        let b = delta.sqrt();
        let g = self.fgn.sample(&mut stream(seed, rep, StreamKind::Fgn));
        let mut white = stream(seed, rep, StreamKind::White);
        let x = g
            .into_iter()
            .map(|gi| {
                let w: f64 = StandardNormal.sample(&mut white);
                a * gi + b * w
            })
            .collect();
        IncrementPath { x, theta: self.theta, scheme: self.scheme, seed, replication: rep }
    }
}

/// `X = σΔ^H G + √Δ W` for replication 0 of `seed`.
pub fn mfbm_increments(theta: &Theta, scheme: &SamplingScheme, seed: u64) -> Result<IncrementPath> {
    Ok(PathSampler::new(theta, scheme)?.draw(seed, 0))
}

fn check_match(model: &CovModel, path: &IncrementPath) -> Result<()> {
    if model.theta() != &path.theta || model.scheme() != &path.scheme {
        return Err(Error::Mismatch(format!(
            "model (σ={}, H={}, n={}, α={}) vs path (σ={}, H={}, n={}, α={})",
            model.theta().sigma,
            model.theta().h(),
            model.scheme().n,
            model.scheme().alpha,
            path.theta.sigma,
            path.theta.h(),
            path.scheme.n,
            path.scheme.alpha
        )));
    }
    Ok(())
}

/// `Z = L⁻¹ X / √Δ`, which has identity covariance under the model.
pub fn whiten(model: &CovModel, path: &IncrementPath) -> Result<Vec<f64>> {
    check_match(model, path)?;
    let s = model.delta().sqrt();
    let scaled: Vec<f64> = path.x.iter().map(|v| v / s).collect();
    model.solve_lower(&scaled)
}
