//! Exact log-likelihood, score components, rate matrices and the LAN check.
//!
//! With `u = X/√Δ`, `C`-forms are `q_C = uᵀA⁻¹TA⁻¹u` and `D`-forms are
//! `q_D = uᵀA⁻¹ṪA⁻¹u`; both equal the whitened forms `ZᵀCZ`, `ZᵀDZ`. Then
//!
//! ```text
//! S_σ = (γ/σ)(q_C − tr C)
//! R_H = (γ/2)(q_D − tr D)
//! S_H = (γ/2)((2 ln Δ q_C + q_D) − (2 ln Δ tr C + tr D))
//! ```

use std::f64::consts::PI;

use faer::Mat;
use serde::Serialize;

use crate::constants::{j_constants_with, AmplitudeConvention, LimitInformation};
use crate::error::{Error, Result};
use crate::params::{Normalizer, Theta};
use crate::spectral::Regime;
use crate::toeplitz::{dot, CovModel};

/// Gaussian log-likelihood `ℓ(θ) = −(n/2)ln 2π − ½ ln det V − ½ XᵀV⁻¹X`.
pub fn log_lik(model: &CovModel, x: &[f64]) -> Result<f64> {
    let n = model.n() as f64;
    let delta = model.delta();
    let s = delta.sqrt();
    let u: Vec<f64> = x.iter().map(|v| v / s).collect();
    let z = model.solve_lower(&u)?;
    let logdet_v = n * delta.ln() + model.logdet_a();
    Ok(-0.5 * n * (2.0 * PI).ln() - 0.5 * logdet_v - 0.5 * dot(&z, &z))
}

/// [`log_lik`] for several paths, sharing one blocked solve.
pub fn log_lik_batch(model: &CovModel, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = model.n();
    if let Some(x) = xs.iter().find(|x| x.len() != n) {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    let delta = model.delta();
    let s = 1.0 / delta.sqrt();
    let base = -0.5 * n as f64 * (2.0 * PI).ln() - 0.5 * (n as f64 * delta.ln() + model.logdet_a());
    let mut rhs = Mat::from_fn(n, xs.len(), |i, j| xs[j][i] * s);
    model.solve_in_place(&mut rhs);
    Ok(xs
        .iter()
        .enumerate()
        .map(|(j, x)| base - 0.5 * s * dot(x, rhs.col_as_slice(j)))
        .collect())
}

/// Normalising sequences at the model's `(θ, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalizers {
    /// `√𝒯_n`.
    pub sqrt_t: f64,
    /// `L_n = ln(1/Δ_n)`.
    pub l_n: f64,
    /// `v_n = √n Δ^p`.
    pub v_n: f64,
    pub sqrt_n: f64,
}

/// Score quantities for one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreEval {
    pub s_sigma: f64,
    pub s_h: f64,
    pub r_h: f64,
    pub r_h_perp: f64,
    /// `a_n` used in the projection.
    pub a_n: f64,
    /// `(S_σ, R_H⊥)/√𝒯`.
    pub xi: [f64; 2],
    /// `(S_σ/√𝒯, R_H/(L_n √𝒯))`.
    pub u: [f64; 2],
    /// Score vector normalised for the model's regime: `Ξ` above 3/4,
    /// `(S_σ, R_H)/v_n` between 1/2 and 3/4, `(S_σ, R_H)/√n` below 1/2.
    pub regime_vector: [f64; 2],
    pub normalizers: Normalizers,
}

/// Per-model constants shared across many score evaluations.
#[derive(Debug, Clone, Copy)]
struct ScoreKernel {
    gamma: f64,
    sigma: f64,
    ln_delta: f64,
    inv_sqrt_delta: f64,
    tr_c: f64,
    tr_d: f64,
    a_n: f64,
    regime: Option<Regime>,
    normalizers: Normalizers,
}

impl ScoreKernel {
    fn new(model: &CovModel) -> Self {
        let tr = model.traces();
        let theta = model.theta();
        let scheme = model.scheme();
        let delta = model.delta();
        ScoreKernel {
            gamma: model.gamma(),
            sigma: theta.sigma,
            ln_delta: delta.ln(),
            inv_sqrt_delta: 1.0 / delta.sqrt(),
            tr_c: tr.tr_c,
            tr_d: tr.tr_d,
            a_n: tr.a_n,
            regime: theta.regime().ok(),
            normalizers: Normalizers {
                sqrt_t: Normalizer::SqrtHorizon.value(theta, scheme),
                l_n: scheme.log_inv_delta(),
                v_n: Normalizer::SqrtNDeltaP.value(theta, scheme),
                sqrt_n: Normalizer::SqrtN.value(theta, scheme),
            },
        }
    }

    fn eval(&self, qc: f64, qd: f64) -> ScoreEval {
        let g = self.gamma;
        let s_sigma = g / self.sigma * (qc - self.tr_c);
        let r_h = 0.5 * g * (qd - self.tr_d);
        let s_h = 0.5 * g * ((2.0 * self.ln_delta * qc + qd) - (2.0 * self.ln_delta * self.tr_c + self.tr_d));
        let r_h_perp = r_h - 0.5 * self.sigma * self.a_n * s_sigma;
        let nz = self.normalizers;
        let xi = [s_sigma / nz.sqrt_t, r_h_perp / nz.sqrt_t];
        let regime_vector = match self.regime {
            Some(Regime::Subcritical) => [s_sigma / nz.v_n, r_h / nz.v_n],
            Some(Regime::FbmDominated) => [s_sigma / nz.sqrt_n, r_h / nz.sqrt_n],
            _ => xi,
        };
        ScoreEval {
            s_sigma,
            s_h,
            r_h,
            r_h_perp,
            a_n: self.a_n,
            xi,
            u: [s_sigma / nz.sqrt_t, r_h / (nz.l_n * nz.sqrt_t)],
            regime_vector,
            normalizers: nz,
        }
    }
}

/// Exact scores of the increments `x` under `model`.
pub fn scores(model: &CovModel, x: &[f64]) -> Result<ScoreEval> {
    let k = ScoreKernel::new(model);
    let u: Vec<f64> = x.iter().map(|v| v * k.inv_sqrt_delta).collect();
    let (qc, qd) = model.quad_pair(&u)?;
    Ok(k.eval(qc, qd))
}

/// Scores for several paths at once, sharing one blocked triangular solve.
pub fn scores_batch(model: &CovModel, xs: &[Vec<f64>]) -> Result<Vec<ScoreEval>> {
    let n = model.n();
    for x in xs {
        if x.len() != n {
            return Err(Error::Dimension { expected: n, got: x.len() });
        }
    }
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let k = ScoreKernel::new(model);
    let mut rhs = Mat::from_fn(n, xs.len(), |i, j| xs[j][i] * k.inv_sqrt_delta);
    model.solve_in_place(&mut rhs);
    (0..xs.len())
        .map(|j| {
            let y = rhs.col_as_slice(j);
            Ok(k.eval(model.t().quad(y)?, model.tdot().quad(y)?))
        })
        .collect()
}

/// How `a_n` in the second rate matrix is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateVariant {
    /// Exact `a_n = tr(CD)/tr(C²)`.
    Empirical,
    /// `ã_n = 2 ln(1/Δ) + m(H, σ)`.
    Deterministic,
}

/// Lower-triangular rate matrices `M = M₂ M₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateMatrices {
    pub m1: [[f64; 2]; 2],
    pub m2: [[f64; 2]; 2],
    pub m: [[f64; 2]; 2],
    /// `a_n` entering `M₂`; `None` when no projection is applied.
    pub a_n_used: Option<f64>,
    pub variant: RateVariant,
}

impl RateMatrices {
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        mat_vec(&self.m, v)
    }
}

fn mat_vec(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Rate matrices at the model; projection only above `H = 3/4`.
pub fn rate_matrices(model: &CovModel, variant: RateVariant) -> Result<RateMatrices> {
    rate_matrices_with(model, variant, AmplitudeConvention::default())
}

pub fn rate_matrices_with(model: &CovModel, variant: RateVariant, conv: AmplitudeConvention) -> Result<RateMatrices> {
    let theta = model.theta();
    let sigma = theta.sigma;
    let l = model.scheme().log_inv_delta();
    let m1 = [[1.0, 0.0], [sigma * l, 1.0]];
    let identity = [[1.0, 0.0], [0.0, 1.0]];
    match theta.regime()? {
        Regime::Supercritical => {
            let a = match variant {
                RateVariant::Empirical => model.traces().a_n,
                RateVariant::Deterministic => 2.0 * l + j_constants_with(theta, conv)?.m,
            };
            let m2 = [[1.0, 0.0], [-0.5 * sigma * a, 1.0]];
            Ok(RateMatrices { m1, m2, m: mat_mul(&m2, &m1), a_n_used: Some(a), variant })
        }
        _ if variant == RateVariant::Deterministic => Err(Error::Regime {
            hurst: theta.h(),
            expected: "3/4 < H < 1 for the deterministic projection",
        }),
        _ => Ok(RateMatrices { m1, m2: identity, m: m1, a_n_used: None, variant }),
    }
}

/// Comparison of the exact log-likelihood ratio with its LAN approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LanCheck {
    pub h: [f64; 2],
    pub theta_h: [f64; 2],
    pub llr_exact: f64,
    /// `hᵀΞ − ½ hᵀ I⊥ h`.
    pub llr_predicted: f64,
    pub gap: f64,
}

/// Perturbed parameter `θ + r_n⁻¹ h` with `r_n⁻¹ = Mᵀ/√𝒯`.
pub fn local_parameter(model: &CovModel, rates: &RateMatrices, h: [f64; 2]) -> Result<Theta> {
    let sqrt_t = model.scheme().horizon().sqrt();
    let m = rates.m;
    let d_sigma = (m[0][0] * h[0] + m[1][0] * h[1]) / sqrt_t;
    let d_h = (m[0][1] * h[0] + m[1][1] * h[1]) / sqrt_t;
    let theta = model.theta();
    let next = Theta::new(theta.sigma + d_sigma, theta.h() + d_h)
        .map_err(|e| Error::Parameter(format!("perturbed parameter leaves the parameter space: {e}")))?;
    if next.regime()? != Regime::Supercritical {
        return Err(Error::Parameter(format!("perturbed H = {} leaves the supercritical regime", next.h())));
    }
    Ok(next)
}

/// `hᵀΞ − ½ hᵀ I h`.
pub fn lan_prediction(xi: [f64; 2], h: [f64; 2], info: &LimitInformation) -> f64 {
    let ih = mat_vec(&info.matrix, h);
    h[0] * xi[0] + h[1] * xi[1] - 0.5 * (h[0] * ih[0] + h[1] * ih[1])
}

/// Rebuilds the model at `θ + r_n⁻¹ h` and compares the exact LLR with the LAN expansion.
pub fn lan_check(model: &CovModel, h: [f64; 2], x: &[f64], info: &LimitInformation) -> Result<LanCheck> {
    let rates = rate_matrices(model, RateVariant::Empirical)?;
    let se = scores(model, x)?;
    lan_check_with(model, &rates, &se, h, x, info)
}

/// LAN check reusing precomputed rate matrices and scores of `x`.
pub fn lan_check_with(
    model: &CovModel,
    rates: &RateMatrices,
    se: &ScoreEval,
    h: [f64; 2],
    x: &[f64],
    info: &LimitInformation,
) -> Result<LanCheck> {
    if info.regime != Regime::Supercritical {
        return Err(Error::Regime { hurst: model.theta().h(), expected: "3/4 < H < 1" });
    }
    let llr_predicted = lan_prediction(se.xi, h, info);
    let (theta_h, llr_exact) = if h == [0.0, 0.0] {
        (*model.theta(), 0.0)
    } else {
        let theta_h = local_parameter(model, rates, h)?;
        let perturbed = CovModel::new(&theta_h, model.scheme())?;
        (theta_h, log_lik(&perturbed, x)? - log_lik(model, x)?)
    };
    Ok(LanCheck {
        h,
        theta_h: [theta_h.sigma, theta_h.h()],
        llr_exact,
        llr_predicted,
        gap: llr_exact - llr_predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::limit_information;
    use crate::params::SamplingScheme;
    use crate::simulate::{mfbm_increments, whiten, PathSampler};
    use crate::toeplitz::build_model;

    fn setup(s: f64, h: f64, n: usize, alpha: f64) -> (Theta, SamplingScheme, CovModel) {
        let th = Theta::new(s, h).unwrap();
        let sc = SamplingScheme::new(n, alpha).unwrap();
        let m = build_model(&th, &sc).unwrap();
        (th, sc, m)
    }

    #[test]
    fn log_lik_white_noise_origin() {
        let (_, sc, m) = setup(1.0, 0.5, 32, 0.3);
        let n = 32.0;
        let want = -0.5 * n * (2.0 * PI).ln() - 0.5 * n * (sc.delta() * (1.0 + m.gamma())).ln();
        assert!((log_lik(&m, &vec![0.0; 32]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn log_lik_matches_dense_oracle() {
        let (th, sc, m) = setup(1.2, 0.8, 64, 0.3);
        let x = mfbm_increments(&th, &sc, 8).unwrap().x;
        let d = sc.delta();
        let v = Mat::from_fn(64, 64, |i, j| d * ((i == j) as u8 as f64 + m.gamma() * m.t().get(i, j)));
        let evd = v.self_adjoint_eigen(faer::Side::Lower).unwrap();
        let s = evd.S();
        let u = evd.U();
        let logdet: f64 = (0..64).map(|i| s[i].ln()).sum();
        let mut quad = 0.0;
        for k in 0..64 {
            let proj: f64 = (0..64).map(|i| u[(i, k)] * x[i]).sum();
            quad += proj * proj / s[k];
        }
        let want = -32.0 * (2.0 * PI).ln() - 0.5 * logdet - 0.5 * quad;
        let got = log_lik(&m, &x).unwrap();
        assert!((got / want - 1.0).abs() < 1e-8);
    }

    #[test]
    fn batch_log_lik_matches_single() {
        let (th, sc, m) = setup(0.7, 0.9, 96, 0.4);
        let sampler = PathSampler::new(&th, &sc).unwrap();
        let xs: Vec<Vec<f64>> = (0..3).map(|r| sampler.draw(4, r).x).collect();
        let b = log_lik_batch(&m, &xs).unwrap();
        for (x, v) in xs.iter().zip(&b) {
            let want = log_lik(&m, x).unwrap();
            assert!((v - want).abs() < 1e-9 * want.abs());
        }
    }

    #[test]
    fn exact_decompositions() {
        let (th, sc, m) = setup(1.0, 0.8, 256, 0.3);
        let sampler = PathSampler::new(&th, &sc).unwrap();
        for r in 0..5 {
            let x = sampler.draw(1, r).x;
            let e = scores(&m, &x).unwrap();
            let tol = 1e-10 * (e.s_h.abs() + 1.0);
            assert!((e.s_h - th.sigma * sc.delta().ln() * e.s_sigma - e.r_h).abs() < tol);
            assert!((e.r_h_perp + 0.5 * th.sigma * e.a_n * e.s_sigma - e.r_h).abs() < tol);
        }
    }

    #[test]
    fn batch_matches_single() {
        let (th, sc, m) = setup(1.0, 0.8, 128, 0.3);
        let sampler = PathSampler::new(&th, &sc).unwrap();
        let xs: Vec<Vec<f64>> = (0..4).map(|r| sampler.draw(2, r).x).collect();
        let batch = scores_batch(&m, &xs).unwrap();
        for (x, b) in xs.iter().zip(&batch) {
            let s = scores(&m, x).unwrap();
            assert!((s.s_sigma - b.s_sigma).abs() < 1e-9 * (1.0 + s.s_sigma.abs()));
            assert!((s.r_h - b.r_h).abs() < 1e-9 * (1.0 + s.r_h.abs()));
        }
        assert!(scores_batch(&m, &[vec![0.0; 3]]).is_err());
    }

    #[test]
    fn sigma_score_via_whitened_form() {
        let (th, sc, m) = setup(1.0, 0.8, 128, 0.3);
        let p = mfbm_increments(&th, &sc, 21).unwrap();
        let z = whiten(&m, &p).unwrap();
        // ZᵀK_C Z from a dense congruence.
        let n = 128;
        let mut k = m.t().to_dense();
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(m.chol(), k.as_mut(), faer::Par::Seq);
        let mut kc = k.transpose().to_owned();
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(m.chol(), kc.as_mut(), faer::Par::Seq);
        let zkz: f64 = (0..n).map(|i| z[i] * (0..n).map(|j| kc[(i, j)] * z[j]).sum::<f64>()).sum();
        let want = m.gamma() / th.sigma * (zkz - m.traces().tr_c);
        let got = scores(&m, &p.x).unwrap().s_sigma;
        assert!((got / want - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sigma_score_matches_finite_difference_of_log_lik() {
        let (th, sc, m) = setup(1.0, 0.8, 128, 0.3);
        let x = mfbm_increments(&th, &sc, 5).unwrap().x;
        let e = scores(&m, &x).unwrap();
        let step = 1e-5;
        let ll = |s: f64, h: f64| log_lik(&build_model(&Theta::new(s, h).unwrap(), &sc).unwrap(), &x).unwrap();
        let fd_s = (ll(1.0 + step, 0.8) - ll(1.0 - step, 0.8)) / (2.0 * step);
        let fd_h = (ll(1.0, 0.8 + step) - ll(1.0, 0.8 - step)) / (2.0 * step);
        assert!((e.s_sigma - fd_s).abs() < 1e-5 * (1.0 + fd_s.abs()));
        assert!((e.s_h - fd_h).abs() < 1e-5 * (1.0 + fd_h.abs()));
    }

    #[test]
    fn rate_matrix_entries() {
        let (_, sc, m) = setup(1.0, 0.8, 128, 0.3);
        let r = rate_matrices(&m, RateVariant::Empirical).unwrap();
        assert!((r.m1[1][0] - sc.log_inv_delta()).abs() < 1e-14);
        assert_eq!(r.m[0][0], 1.0);
        assert_eq!(r.m[1][1], 1.0);
        let a = r.a_n_used.unwrap();
        assert!((r.m[1][0] - (sc.log_inv_delta() - 0.5 * a)).abs() < 1e-12);
        assert_eq!(r.apply([0.0, 0.0]), [0.0, 0.0]);
        let det = rate_matrices(&m, RateVariant::Deterministic).unwrap();
        assert_eq!(det.variant, RateVariant::Deterministic);

        let sub = setup(1.0, 0.6, 64, 0.3).2;
        let r = rate_matrices(&sub, RateVariant::Empirical).unwrap();
        assert_eq!(r.m, r.m1);
        assert!(rate_matrices(&sub, RateVariant::Deterministic).is_err());
    }

    #[test]
    fn rate_matrix_at_delta_one_hundredth() {
        let sc = SamplingScheme::new(10_000, 0.5).unwrap();
        assert!((sc.delta() - 0.01).abs() < 1e-15);
        let l = sc.log_inv_delta();
        assert!((l - 4.6052).abs() < 1e-4);
    }

    #[test]
    fn lan_zero_direction() {
        let (th, sc, m) = setup(1.0, 0.8, 128, 0.3);
        let x = mfbm_increments(&th, &sc, 3).unwrap().x;
        let info = limit_information(&th).unwrap();
        let c = lan_check(&m, [0.0, 0.0], &x, &info).unwrap();
        assert_eq!(c.llr_exact, 0.0);
        assert_eq!(c.llr_predicted, 0.0);
        assert_eq!(c.gap, 0.0);
    }

    #[test]
    fn lan_rejects_out_of_space() {
        let (th, sc, m) = setup(1.0, 0.8, 128, 0.3);
        let x = mfbm_increments(&th, &sc, 3).unwrap().x;
        let info = limit_information(&th).unwrap();
        assert!(matches!(lan_check(&m, [0.0, 100.0], &x, &info), Err(Error::Parameter(_))));
    }
}
