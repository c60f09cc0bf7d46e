//! Dense reference computations by symmetric eigendecomposition.
//!
//! Everything here is `O(n³)` and meant for `n` up to a few hundred. The
//! covariance is assembled entrywise from the autocovariance formulas and
//! never goes through the Toeplitz, FFT or Cholesky code paths.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::params::{SamplingScheme, Theta};
use crate::spectral::{autocov, autocov_dh};

/// Dense `A = I + γT` with its spectral decomposition.
pub struct DenseModel {
    pub n: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub delta: f64,
    pub t: Mat<f64>,
    pub tdot: Mat<f64>,
    pub a: Mat<f64>,
    u: Mat<f64>,
    s: Vec<f64>,
}

impl std::fmt::Debug for DenseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseModel").field("n", &self.n).field("gamma", &self.gamma).finish()
    }
}

fn eigen(m: &Mat<f64>) -> Result<(Mat<f64>, Vec<f64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Mismatch(format!("dense eigendecomposition failed: {e:?}")))?;
    let s = evd.S();
    let n = m.nrows();
    Ok((evd.U().to_owned(), (0..n).map(|i| s[i]).collect()))
}

/// `U diag(φ(s)) Uᵀ`.
fn spectral_fn(u: &Mat<f64>, s: &[f64], phi: impl Fn(f64) -> f64) -> Mat<f64> {
    let n = s.len();
    let scaled = Mat::from_fn(n, n, |i, k| u[(i, k)] * phi(s[k]));
    &scaled * u.transpose()
}

fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn trace(m: &Mat<f64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

impl DenseModel {
    pub fn new(theta: &Theta, scheme: &SamplingScheme) -> Result<Self> {
        let n = scheme.n;
        let h = theta.hurst;
        let gamma = scheme.gamma(theta);
        let col: Vec<f64> = (0..n as i64).map(|k| autocov(h, k)).collect();
        let dcol: Vec<f64> = (0..n as i64).map(|k| autocov_dh(h, k)).collect();
        let t = Mat::from_fn(n, n, |i, j| col[i.abs_diff(j)]);
        let tdot = Mat::from_fn(n, n, |i, j| dcol[i.abs_diff(j)]);
        let a = Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64 + gamma * t[(i, j)]);
        let (u, s) = eigen(&a)?;
        Ok(DenseModel { n, sigma: theta.sigma, gamma, delta: scheme.delta(), t, tdot, a, u, s })
    }

    pub fn logdet_a(&self) -> f64 {
        self.s.iter().map(|v| v.ln()).sum()
    }

    pub fn a_inv(&self) -> Mat<f64> {
        spectral_fn(&self.u, &self.s, |v| 1.0 / v)
    }

    /// Symmetric inverse square root `A^{-1/2}`.
    pub fn a_inv_sqrt(&self) -> Mat<f64> {
        spectral_fn(&self.u, &self.s, |v| 1.0 / v.sqrt())
    }

    /// `Z = A^{-1/2} X/√Δ`.
    pub fn whiten(&self, x: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = x.iter().map(|v| v / self.delta.sqrt()).collect();
        mat_vec(&self.a_inv_sqrt(), &u)
    }

    /// `C = A^{-1/2} T A^{-1/2}`.
    pub fn c(&self) -> Mat<f64> {
        let r = self.a_inv_sqrt();
        &r * &self.t * &r
    }

    /// `D = A^{-1/2} Ṫ A^{-1/2}`.
    pub fn d(&self) -> Mat<f64> {
        let r = self.a_inv_sqrt();
        &r * &self.tdot * &r
    }

    /// `tr(M₁ M₂)`.
    pub fn trace_product(m1: &Mat<f64>, m2: &Mat<f64>) -> f64 {
        trace(&(m1 * m2))
    }

    pub fn quad(m: &Mat<f64>, z: &[f64]) -> f64 {
        dot(z, &mat_vec(m, z))
    }

    /// `(∂ℓ/∂σ, ∂ℓ/∂H)` from `−½ tr(A⁻¹Ȧ) + ½ uᵀA⁻¹ȦA⁻¹u` with `u = X/√Δ`.
    pub fn scores(&self, x: &[f64]) -> [f64; 2] {
        let ainv = self.a_inv();
        let u: Vec<f64> = x.iter().map(|v| v / self.delta.sqrt()).collect();
        let y = mat_vec(&ainv, &u);
        let g = self.gamma;
        let a_sigma = Mat::from_fn(self.n, self.n, |i, j| 2.0 * g / self.sigma * self.t[(i, j)]);
        let l = self.delta.ln();
        let a_h = Mat::from_fn(self.n, self.n, |i, j| g * (2.0 * l * self.t[(i, j)] + self.tdot[(i, j)]));
        let score = |m: &Mat<f64>| -0.5 * trace(&(&ainv * m)) + 0.5 * Self::quad(m, &y);
        [score(&a_sigma), score(&a_h)]
    }

    /// `ℓ(θ_h) − ℓ(θ) = −½ log det(I+S) − ½ Zᵀ((I+S)⁻¹ − I)Z` with
    /// `S = A^{-1/2}(A_h − A)A^{-1/2}`; both models share `Δ`.
    pub fn llr_s(&self, perturbed: &DenseModel, x: &[f64]) -> Result<f64> {
        if perturbed.n != self.n || perturbed.delta != self.delta {
            return Err(Error::Mismatch("models differ in n or Δ".into()));
        }
        let r = self.a_inv_sqrt();
        let diff = Mat::from_fn(self.n, self.n, |i, j| perturbed.a[(i, j)] - self.a[(i, j)]);
        let s = &r * &diff * &r;
        let i_plus_s = Mat::from_fn(self.n, self.n, |i, j| (i == j) as u8 as f64 + 0.5 * (s[(i, j)] + s[(j, i)]));
        let (u, mu) = eigen(&i_plus_s)?;
        let z = self.whiten(x);
        let w = mat_vec(&u.transpose().to_owned(), &z);
        let logdet: f64 = mu.iter().map(|m| m.ln()).sum();
        let quad: f64 = w.iter().zip(&mu).map(|(wk, m)| wk * wk * (1.0 / m - 1.0)).sum();
        Ok(-0.5 * logdet - 0.5 * quad)
    }
}
