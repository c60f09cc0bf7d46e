//! Toeplitz covariance matrices of fGn and the factored regularised model
//! `A_n = I + γ_n T_n(H)`.
//!
//! Traces and norms are computed on the congruences `K_C = L⁻¹ T L⁻ᵀ` and
//! `K_D = L⁻¹ Ṫ L⁻ᵀ`, where `A = L Lᵀ`. Both are orthogonally similar to the
//! symmetric sandwiches `C = A^{-1/2} T A^{-1/2}` and `D = A^{-1/2} Ṫ A^{-1/2}`,
//! so every trace and spectral quantity agrees with the sandwich definition.

use std::fmt;
use std::sync::{Arc, OnceLock};

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, MatRef, Par, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{SamplingScheme, Theta};
use crate::spectral::{autocov, autocov_dh, HurstIndex};

/// Default upper bound on the dense dimension.
pub const DEFAULT_SIZE_CAP: usize = 16_384;

/// Which symbol generated a Toeplitz matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolTag {
    Fgn,
    FgnDh,
}

/// Symmetric Toeplitz matrix stored by its first column, with an FFT matvec.
#[derive(Clone)]
pub struct SymToeplitz {
    first_col: Vec<f64>,
    tag: SymbolTag,
    embedding: Arc<OnceLock<Embedding>>,
}

struct Embedding {
    spectrum: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SymToeplitz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymToeplitz").field("n", &self.n()).field("tag", &self.tag).finish()
    }
}

impl SymToeplitz {
    pub fn new(first_col: Vec<f64>, tag: SymbolTag) -> Self {
        SymToeplitz { first_col, tag, embedding: Arc::new(OnceLock::new()) }
    }

    pub fn n(&self) -> usize {
        self.first_col.len()
    }

    pub fn first_col(&self) -> &[f64] {
        &self.first_col
    }

    pub fn tag(&self) -> SymbolTag {
        self.tag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.first_col[i.abs_diff(j)]
    }

    pub fn to_dense(&self) -> Mat<f64> {
        Mat::from_fn(self.n(), self.n(), |i, j| self.get(i, j))
    }

    fn embedding(&self) -> &Embedding {
        self.embedding.get_or_init(|| {
            let n = self.n();
            let m = 2 * n;
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(m);
            let inverse = planner.plan_fft_inverse(m);
            let mut spectrum = vec![Complex::new(0.0, 0.0); m];
            for k in 0..n {
                spectrum[k].re = self.first_col[k];
            }
            for k in 1..n {
                spectrum[m - k].re = self.first_col[k];
            }
            forward.process(&mut spectrum);
            let scale = 1.0 / m as f64;
            for s in &mut spectrum {
                *s *= scale;
            }
            Embedding { spectrum, forward, inverse }
        })
    }

    /// `T x` via circulant embedding of size `2n`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::Dimension { expected: n, got: x.len() });
        }
        let emb = self.embedding();
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        emb.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&emb.spectrum) {
            *b *= s;
        }
        emb.inverse.process(&mut buf);
        Ok(buf[..n].iter().map(|c| c.re).collect())
    }

    /// `xᵀ T x`.
    pub fn quad(&self, x: &[f64]) -> Result<f64> {
        let tx = self.matvec(x)?;
        Ok(dot(x, &tx))
    }

    /// Smallest eigenvalue of the dense matrix (intended for small `n`).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = self
            .to_dense()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::Parameter("eigenvalue solver did not converge".into()))?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Builds `T_n(H)` or, with `derivative`, `Ṫ_n(H) = ∂_H T_n(H)`.
pub fn build_fgn_cov(h: HurstIndex, n: usize, derivative: bool) -> Result<SymToeplitz> {
    build_fgn_cov_capped(h, n, derivative, DEFAULT_SIZE_CAP)
}

pub fn build_fgn_cov_capped(h: HurstIndex, n: usize, derivative: bool, cap: usize) -> Result<SymToeplitz> {
    if n < 2 {
        return Err(Error::Parameter(format!("n must be at least 2, got {n}")));
    }
    if n > cap {
        return Err(Error::SizeCap { n, cap });
    }
    let (col, tag) = if derivative {
        ((0..n as i64).map(|k| autocov_dh(h, k)).collect(), SymbolTag::FgnDh)
    } else {
        ((0..n as i64).map(|k| autocov(h, k)).collect(), SymbolTag::Fgn)
    };
    Ok(SymToeplitz::new(col, tag))
}

/// Trace and norm functionals of `C`, `D` and `D⊥ = D − a_n C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSuite {
    pub tr_c: f64,
    pub tr_d: f64,
    pub tr_c2: f64,
    pub tr_cd: f64,
    pub tr_d2: f64,
    /// `a_n = tr(CD)/tr(C²)`.
    pub a_n: f64,
    pub tr_dperp2: f64,
    pub frob_c: f64,
    pub frob_d: f64,
    pub frob_dperp: f64,
    pub op_c: f64,
    pub op_d: f64,
    pub op_dperp: f64,
}

/// Frobenius-type traces, cheap relative to the operator norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Traces {
    pub tr_c: f64,
    pub tr_d: f64,
    pub tr_c2: f64,
    pub tr_cd: f64,
    pub tr_d2: f64,
    pub a_n: f64,
    pub tr_dperp2: f64,
}

/// Power iteration settings for operator norms.
const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITER: usize = 5000;
const POWER_SEED: u64 = 0x6d66_626d;

/// Factored model `V = Δ(I + γT)` with lazily cached traces.
pub struct CovModel {
    theta: Theta,
    scheme: SamplingScheme,
    gamma: f64,
    t: SymToeplitz,
    tdot: SymToeplitz,
    chol: Mat<f64>,
    logdet_a: f64,
    traces: OnceLock<Traces>,
    suite: OnceLock<TraceSuite>,
}

impl fmt::Debug for CovModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovModel")
            .field("theta", &self.theta)
            .field("scheme", &self.scheme)
            .field("gamma", &self.gamma)
            .finish()
    }
}

/// Builds and factors `A = I + γT`.
pub fn build_model(theta: &Theta, scheme: &SamplingScheme) -> Result<CovModel> {
    CovModel::new(theta, scheme)
}

impl CovModel {
    pub fn new(theta: &Theta, scheme: &SamplingScheme) -> Result<Self> {
        Self::with_cap(theta, scheme, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(theta: &Theta, scheme: &SamplingScheme, cap: usize) -> Result<Self> {
        let n = scheme.n;
        let t = build_fgn_cov_capped(theta.hurst, n, false, cap)?;
        let tdot = build_fgn_cov_capped(theta.hurst, n, true, cap)?;
        let gamma = scheme.gamma(theta);
        let a = Mat::from_fn(n, n, |i, j| {
            let v = gamma * t.get(i, j);
            if i == j { 1.0 + v } else { v }
        });
        let llt = a.llt(Side::Lower).map_err(|e| match e {
            faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index } => {
                Error::Factorization { minor: index + 1 }
            }
        })?;
        let chol = llt.L().to_owned();
        let logdet_a = 2.0 * (0..n).map(|i| chol[(i, i)].ln()).sum::<f64>();
        Ok(CovModel {
            theta: *theta,
            scheme: *scheme,
            gamma,
            t,
            tdot,
            chol,
            logdet_a,
            traces: OnceLock::new(),
            suite: OnceLock::new(),
        })
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn scheme(&self) -> &SamplingScheme {
        &self.scheme
    }

    pub fn n(&self) -> usize {
        self.scheme.n
    }

    /// `γ_n`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Δ_n`.
    pub fn delta(&self) -> f64 {
        self.scheme.delta()
    }

    pub fn t(&self) -> &SymToeplitz {
        &self.t
    }

    pub fn tdot(&self) -> &SymToeplitz {
        &self.tdot
    }

    /// Lower Cholesky factor `L` of `A`.
    pub fn chol(&self) -> MatRef<'_, f64> {
        self.chol.as_ref()
    }

    /// `ln det A`.
    pub fn logdet_a(&self) -> f64 {
        self.logdet_a
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::Dimension { expected: self.n(), got: x.len() });
        }
        Ok(())
    }

    /// `L⁻¹ x`.
    pub fn solve_lower(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut m = Mat::from_fn(x.len(), 1, |i, _| x[i]);
        solve_lower_triangular_in_place(self.chol.as_ref(), m.as_mut(), Par::Seq);
        Ok(m.col_as_slice(0).to_vec())
    }

    /// `A⁻¹ x`.
    pub fn solve(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut m = Mat::from_fn(x.len(), 1, |i, _| x[i]);
        self.solve_in_place(&mut m);
        Ok(m.col_as_slice(0).to_vec())
    }

    /// Overwrites each column `b` of `rhs` with `A⁻¹ b`.
    pub fn solve_in_place(&self, rhs: &mut Mat<f64>) {
        solve_lower_triangular_in_place(self.chol.as_ref(), rhs.as_mut(), Par::Seq);
        solve_upper_triangular_in_place(self.chol.transpose(), rhs.as_mut(), Par::Seq);
    }

    /// `L⁻¹ M L⁻ᵀ` for a symmetric Toeplitz `M`.
    fn congruence(&self, m: &SymToeplitz) -> Mat<f64> {
        let mut x = m.to_dense();
        solve_lower_triangular_in_place(self.chol.as_ref(), x.as_mut(), Par::Seq);
        let mut y = x.transpose().to_owned();
        drop(x);
        solve_lower_triangular_in_place(self.chol.as_ref(), y.as_mut(), Par::Seq);
        y
    }

    fn kernels(&self) -> (Mat<f64>, Mat<f64>) {
        (self.congruence(&self.t), self.congruence(&self.tdot))
    }

    fn traces_from(kc: &Mat<f64>, kd: &Mat<f64>) -> Traces {
        let n = kc.nrows();
        let (mut tr_c, mut tr_d) = (0.0, 0.0);
        let (mut cc, mut cd, mut dd) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let a = kc.col_as_slice(j);
            let b = kd.col_as_slice(j);
            tr_c += a[j];
            tr_d += b[j];
            for i in 0..n {
                // Symmetrised products so tiny asymmetries from the solves cancel.
                let (aij, aji) = (a[i], kc[(j, i)]);
                let (bij, bji) = (b[i], kd[(j, i)]);
                cc += aij * aji;
                cd += 0.5 * (aij * bji + aji * bij);
                dd += bij * bji;
            }
        }
        let a_n = cd / cc;
        Traces { tr_c, tr_d, tr_c2: cc, tr_cd: cd, tr_d2: dd, a_n, tr_dperp2: (dd - cd * cd / cc).max(0.0) }
    }

    /// Frobenius-type traces (cached).
    pub fn traces(&self) -> &Traces {
        self.traces.get_or_init(|| {
            if let Some(s) = self.suite.get() {
                return s.traces();
            }
            let (kc, kd) = self.kernels();
            Self::traces_from(&kc, &kd)
        })
    }

    /// Full trace suite including operator norms (cached).
    pub fn trace_suite(&self) -> &TraceSuite {
        self.suite.get_or_init(|| {
            let (kc, kd) = self.kernels();
            let tr = *self.traces.get_or_init(|| Self::traces_from(&kc, &kd));
            let op_c = op_norm(self.n(), |v, out| symv(&kc, v, out));
            let op_d = op_norm(self.n(), |v, out| symv(&kd, v, out));
            let mut tmp = vec![0.0; self.n()];
            let op_dperp = op_norm(self.n(), |v, out| {
                symv(&kd, v, out);
                symv(&kc, v, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o -= tr.a_n * t;
                }
            });
            TraceSuite {
                tr_c: tr.tr_c,
                tr_d: tr.tr_d,
                tr_c2: tr.tr_c2,
                tr_cd: tr.tr_cd,
                tr_d2: tr.tr_d2,
                a_n: tr.a_n,
                tr_dperp2: tr.tr_dperp2,
                frob_c: tr.tr_c2.sqrt(),
                frob_d: tr.tr_d2.sqrt(),
                frob_dperp: tr.tr_dperp2.sqrt(),
                op_c,
                op_d,
                op_dperp,
            }
        })
    }

    /// `uᵀ A⁻¹ M A⁻¹ u` for `M ∈ {T, Ṫ}`, given `y = A⁻¹ u`.
    fn sandwich(m: &SymToeplitz, y: &[f64]) -> Result<f64> {
        m.quad(y)
    }

    /// Quadratic form of `C`, `D` or `D⊥` on the whitened scale: for `u = X/√Δ`,
    /// returns `uᵀ A⁻¹ M A⁻¹ u`, which equals `Zᵀ M_C Z` for `Z = A^{-1/2} u`.
    pub fn quad_form(&self, which: Which, u: &[f64]) -> Result<f64> {
        let y = self.solve(u)?;
        match which {
            Which::C => Self::sandwich(&self.t, &y),
            Which::D => Self::sandwich(&self.tdot, &y),
            Which::Dperp => {
                let a_n = self.traces().a_n;
                Ok(Self::sandwich(&self.tdot, &y)? - a_n * Self::sandwich(&self.t, &y)?)
            }
        }
    }

    /// `(uᵀA⁻¹TA⁻¹u, uᵀA⁻¹ṪA⁻¹u)` for `u = X/√Δ`.
    pub fn quad_pair(&self, u: &[f64]) -> Result<(f64, f64)> {
        let y = self.solve(u)?;
        Ok((self.t.quad(&y)?, self.tdot.quad(&y)?))
    }
}

impl TraceSuite {
    pub fn traces(&self) -> Traces {
        Traces {
            tr_c: self.tr_c,
            tr_d: self.tr_d,
            tr_c2: self.tr_c2,
            tr_cd: self.tr_cd,
            tr_d2: self.tr_d2,
            a_n: self.a_n,
            tr_dperp2: self.tr_dperp2,
        }
    }
}

/// Selector for [`CovModel::quad_form`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    C,
    D,
    Dperp,
}

/// Convenience wrapper over [`CovModel::trace_suite`].
pub fn trace_suite(model: &CovModel) -> TraceSuite {
    *model.trace_suite()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `out = K v` for symmetric `K`, reading columns contiguously.
fn symv(k: &Mat<f64>, v: &[f64], out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        *o = dot(k.col_as_slice(j), v);
    }
}

/// Largest absolute eigenvalue of a symmetric operator by power iteration.
///
/// The estimate `‖Kv‖` for unit `v` is non-decreasing along the iteration.
pub fn op_norm<F: FnMut(&[f64], &mut [f64])>(n: usize, mut apply: F) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut w = vec![0.0; n];
    let mut est = 0.0;
    for _ in 0..POWER_MAX_ITER {
        apply(&v, &mut w);
        let next = dot(&w, &w).sqrt();
        if next == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / next;
        }
        let done = (next - est).abs() <= POWER_TOL * next;
        est = next;
        if done {
            break;
        }
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: f64, h: f64, n: usize, alpha: f64) -> CovModel {
        build_model(&Theta::new(s, h).unwrap(), &SamplingScheme::new(n, alpha).unwrap()).unwrap()
    }

    /// Symmetric square root and inverse square root of a dense SPD matrix.
    fn sqrt_pair(a: &Mat<f64>) -> (Mat<f64>, Mat<f64>) {
        let evd = a.self_adjoint_eigen(Side::Lower).unwrap();
        let u = evd.U();
        let s = evd.S();
        let n = a.nrows();
        let d = Mat::from_fn(n, n, |i, j| if i == j { s[i].sqrt() } else { 0.0 });
        let di = Mat::from_fn(n, n, |i, j| if i == j { 1.0 / s[i].sqrt() } else { 0.0 });
        (u * &d * u.transpose(), u * &di * u.transpose())
    }

    fn dense_a(m: &CovModel) -> Mat<f64> {
        let n = m.n();
        Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64 + m.gamma() * m.t().get(i, j))
    }

    #[test]
    fn white_noise_cov_is_identity() {
        let t = build_fgn_cov(HurstIndex::new(0.5).unwrap(), 4, false).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((t.get(i, j) - (i == j) as u8 as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn first_column_and_derivative() {
        let h = HurstIndex::new(0.8).unwrap();
        let t = build_fgn_cov(h, 3, false).unwrap();
        assert_eq!(t.first_col()[0], 1.0);
        assert!((t.first_col()[1] - 0.515_717).abs() < 1e-6);
        assert_eq!(t.first_col()[2], autocov(h, 2));
        let step = 1e-6;
        let d = build_fgn_cov(h, 64, true).unwrap();
        let up = build_fgn_cov(HurstIndex::new(0.8 + step).unwrap(), 64, false).unwrap();
        let dn = build_fgn_cov(HurstIndex::new(0.8 - step).unwrap(), 64, false).unwrap();
        for k in 0..64 {
            let fd = (up.first_col()[k] - dn.first_col()[k]) / (2.0 * step);
            assert!((d.first_col()[k] - fd).abs() < 1e-5 * (1.0 + fd.abs()));
        }
        assert_eq!(d.tag(), SymbolTag::FgnDh);
    }

    #[test]
    fn size_cap() {
        let h = HurstIndex::new(0.8).unwrap();
        assert!(matches!(build_fgn_cov_capped(h, 100, false, 64), Err(Error::SizeCap { .. })));
        assert!(build_fgn_cov(h, 1, false).is_err());
    }

    #[test]
    fn fft_matvec_matches_dense() {
        let h = HurstIndex::new(0.3).unwrap();
        let t = build_fgn_cov(h, 37, true).unwrap();
        let x: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin()).collect();
        let got = t.matvec(&x).unwrap();
        let d = t.to_dense();
        for i in 0..37 {
            let want: f64 = (0..37).map(|j| d[(i, j)] * x[j]).sum();
            assert!((got[i] - want).abs() < 1e-12);
        }
        assert!(t.matvec(&x[..5]).is_err());
    }

    #[test]
    fn fgn_covariances_are_psd() {
        for &h in &[0.3, 0.6, 0.8] {
            for &n in &[64, 512] {
                let t = build_fgn_cov(HurstIndex::new(h).unwrap(), n, false).unwrap();
                assert!(t.min_eigenvalue().unwrap() >= -1e-8, "H={h} n={n}");
            }
        }
    }

    #[test]
    fn white_noise_model() {
        let m = model(1.0, 0.5, 16, 0.4);
        let g = m.gamma();
        for i in 0..16 {
            assert!((m.chol()[(i, i)] - (1.0 + g).sqrt()).abs() < 1e-14);
        }
        let tr = m.trace_suite();
        assert!((tr.tr_c2 - 16.0 / (1.0 + g).powi(2)).abs() < 1e-12);
        let mut e1 = vec![0.0; 16];
        e1[0] = 1.0;
        assert!((m.quad_form(Which::C, &e1).unwrap() - (1.0 + g).powi(-2)).abs() < 1e-14);
    }

    #[test]
    fn model_parameters() {
        let m = model(1.0, 0.8, 256, 0.3);
        let d = 256f64.powf(-0.3);
        assert!((m.delta() - d).abs() < 1e-15);
        assert!((m.gamma() - d.powf(0.6)).abs() < 1e-15);
    }

    #[test]
    fn dperp_trace_matches_dense_construction() {
        let m = model(1.0, 0.8, 128, 0.3);
        let tr = *m.traces();
        let a = dense_a(&m);
        let (_, ais) = sqrt_pair(&a);
        let c = &ais * m.t().to_dense() * &ais;
        let d = &ais * m.tdot().to_dense() * &ais;
        let dp = &d - tr.a_n * &c;
        let n = m.n();
        let frob2 = |x: &Mat<f64>| (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[(i, j)] * x[(i, j)]).sum::<f64>();
        assert!((frob2(&dp) / tr.tr_dperp2 - 1.0).abs() < 1e-9);
        assert!((frob2(&c) / tr.tr_c2 - 1.0).abs() < 1e-10);
        let trace1: f64 = (0..n).map(|i| c[(i, i)]).sum();
        assert!((trace1 / tr.tr_c - 1.0).abs() < 1e-10);
        // tr(C D⊥) = 0
        let cdp: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| c[(i, j)] * dp[(j, i)]).sum();
        assert!(cdp.abs() <= 1e-9 * tr.tr_c2.sqrt() * tr.tr_dperp2.sqrt());
    }

    #[test]
    fn dperp_trace_identity_at_512() {
        let m = model(1.0, 0.8, 512, 0.3);
        let tr = m.traces();
        assert!((tr.tr_dperp2 - (tr.tr_d2 - tr.tr_cd * tr.tr_cd / tr.tr_c2)).abs() <= 1e-9 * tr.tr_dperp2);
    }

    #[test]
    fn quad_form_matches_sandwich() {
        let m = model(1.3, 0.8, 64, 0.3);
        let a = dense_a(&m);
        let (asq, ais) = sqrt_pair(&a);
        let c = &ais * m.t().to_dense() * &ais;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: Vec<f64> = (0..64).map(|_| StandardNormal.sample(&mut rng)).collect();
        let zc = Mat::from_fn(64, 1, |i, _| z[i]);
        let x = &asq * &zc;
        let u: Vec<f64> = (0..64).map(|i| x[(i, 0)]).collect();
        let want = (zc.transpose() * &c * &zc)[(0, 0)];
        let got = m.quad_form(Which::C, &u).unwrap();
        assert!((got / want - 1.0).abs() < 1e-8);
        assert_eq!(m.quad_form(Which::C, &vec![0.0; 64]).unwrap(), 0.0);
        assert!(m.quad_form(Which::C, &[1.0]).is_err());
    }

    #[test]
    fn operator_norms_match_eigenvalues() {
        let m = model(1.0, 0.8, 96, 0.3);
        let s = m.trace_suite();
        let a = dense_a(&m);
        let (_, ais) = sqrt_pair(&a);
        let top = |x: Mat<f64>| {
            x.self_adjoint_eigenvalues(Side::Lower).unwrap().into_iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
        };
        let c = &ais * m.t().to_dense() * &ais;
        let d = &ais * m.tdot().to_dense() * &ais;
        let dp = &d - s.a_n * &c;
        assert!((s.op_c / top(c) - 1.0).abs() < 1e-6);
        assert!((s.op_d / top(d) - 1.0).abs() < 1e-6);
        assert!((s.op_dperp / top(dp) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn op_c_bounded_by_inverse_gamma() {
        for &n in &[256, 512] {
            let m = model(1.0, 0.8, n, 0.3);
            assert!(m.trace_suite().op_c <= 1.0 / m.gamma() + 1e-10);
        }
    }
}
