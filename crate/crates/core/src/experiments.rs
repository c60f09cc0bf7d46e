//! Monte Carlo CLT checks, trace-asymptotics tables, op/F decay and the
//! degeneracy of the unprojected score pair.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::constants::{
    j_constants, limit_information, limit_information_with, spectral_square_integrals, t_constants,
    AmplitudeConvention,
};
use crate::error::{Error, Result};
use crate::params::{Normalizer, SamplingScheme, Theta};
use crate::quadrature::{self, Tolerance};
use crate::scores::{
    lan_prediction, local_parameter, log_lik_batch, rate_matrices, scores_batch, RateVariant, ScoreEval,
};
use crate::simulate::PathSampler;
use crate::spectral::{self, HurstIndex, Regime, GRADING_LEVELS};
use crate::toeplitz::{CovModel, Traces};

/// Replications scored together in one blocked solve.
const CHUNK: usize = 32;
/// Below this many replications the normality statistics are flagged.
pub const RELIABLE_REPLICATIONS: usize = 100;

type Mat2 = [[f64; 2]; 2];

/// Summary of a Monte Carlo run of the normalised score vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub theta: Theta,
    pub scheme: SamplingScheme,
    pub regime: Regime,
    pub replications: usize,
    pub seed: u64,
    pub sample_mean: [f64; 2],
    pub sample_cov: Mat2,
    /// Limiting information matrix of the regime.
    pub target: Mat2,
    /// Exact finite-n covariance of the same vector, from traces.
    pub finite_n_cov: Mat2,
    /// `(sample − target)/SE` with Gaussian standard errors at the target.
    pub z_scores: Mat2,
    pub correlation: f64,
    pub skewness: [f64; 2],
    pub excess_kurtosis: [f64; 2],
    /// Kolmogorov–Smirnov distance of each component against `N(0, target_ii)`.
    pub ks: [f64; 2],
    /// Sample correlation of `(S_σ, R_H)` before any projection.
    pub correlation_unprojected: f64,
    /// Set when `R` is too small for the normality statistics to mean much.
    pub unreliable: bool,
    #[serde(skip)]
    pub samples: Vec<[f64; 2]>,
}

/// Sum with a fixed binary-tree topology.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample covariance of paired observations.
pub fn sample_covariance(pts: &[[f64; 2]]) -> ([f64; 2], Mat2) {
    let r = pts.len();
    let a: Vec<f64> = pts.iter().map(|p| p[0]).collect();
    let b: Vec<f64> = pts.iter().map(|p| p[1]).collect();
    let (ma, mb) = (mean(&a), mean(&b));
    let denom = (r.max(2) - 1) as f64;
    let prod = |f: &dyn Fn(usize) -> f64| pairwise_sum(&(0..r).map(f).collect::<Vec<_>>()) / denom;
    let saa = prod(&|i| (a[i] - ma).powi(2));
    let sbb = prod(&|i| (b[i] - mb).powi(2));
    let sab = prod(&|i| (a[i] - ma) * (b[i] - mb));
    ([ma, mb], [[saa, sab], [sab, sbb]])
}

fn correlation(cov: &Mat2) -> f64 {
    let d = (cov[0][0] * cov[1][1]).sqrt();
    if d > 0.0 {
        cov[0][1] / d
    } else {
        0.0
    }
}

/// Sample skewness and excess kurtosis (moment estimators).
pub fn shape_statistics(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let c: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let m2 = mean(&c.iter().map(|v| v * v).collect::<Vec<_>>());
    let m3 = mean(&c.iter().map(|v| v * v * v).collect::<Vec<_>>());
    let m4 = mean(&c.iter().map(|v| v.powi(4)).collect::<Vec<_>>());
    if m2 <= 0.0 {
        return (0.0, 0.0);
    }
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// One-sample Kolmogorov–Smirnov distance against `N(0, var)`.
pub fn ks_distance(xs: &[f64], var: f64) -> Result<f64> {
    let dist = Normal::new(0.0, var.sqrt()).map_err(|e| Error::Parameter(format!("target normal: {e}")))?;
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let r = s.len() as f64;
    Ok(s.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = dist.cdf(x);
        d.max(f - i as f64 / r).max((i + 1) as f64 / r - f)
    }))
}

/// Exact covariance of the regime's normalised score vector at finite `n`.
///
/// Uses `Cov(ZᵀAZ, ZᵀBZ) = 2 tr(AB)`; above `H = 3/4` this is the covariance
/// of `Ξ`, whose off-diagonal vanishes identically.
pub fn finite_n_covariance(model: &CovModel) -> Result<Mat2> {
    let theta = model.theta();
    let tr = model.traces();
    let g = model.gamma();
    let s = theta.sigma;
    let v_ss = 2.0 * g * g / (s * s) * tr.tr_c2;
    let regime = theta.regime()?;
    let scale = Normalizer::for_regime(regime).value(theta, model.scheme()).powi(2);
    let cov = match regime {
        Regime::Supercritical => [[v_ss, 0.0], [0.0, 0.5 * g * g * tr.tr_dperp2]],
        _ => {
            let c = g * g / s * tr.tr_cd;
            [[v_ss, c], [c, 0.5 * g * g * tr.tr_d2]]
        }
    };
    Ok(cov.map(|row| row.map(|v| v / scale)))
}

/// Scores of replications `0..r` in replication order.
fn collect_scores(model: &CovModel, sampler: &PathSampler, r: usize, seed: u64) -> Result<Vec<ScoreEval>> {
    par_chunks(r, |range| {
        let xs: Vec<Vec<f64>> = range.map(|rep| sampler.draw(seed, rep as u64).x).collect();
        scores_batch(model, &xs)
    })
}

fn check_replications(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::Parameter(format!("at least 2 replications are required, got {r}")));
    }
    Ok(())
}

/// Monte Carlo distribution of the normalised score vector.
pub fn mc_clt(theta: &Theta, scheme: &SamplingScheme, r: usize, seed: u64) -> Result<MCReport> {
    check_replications(r)?;
    let regime = theta.regime()?;
    let info = limit_information(theta)?;
    let model = CovModel::new(theta, scheme)?;
    let sampler = PathSampler::new(theta, scheme)?;
    let evals = collect_scores(&model, &sampler, r, seed)?;
    let samples: Vec<[f64; 2]> = evals.iter().map(|e| e.regime_vector).collect();
    let raw: Vec<[f64; 2]> = evals.iter().map(|e| [e.s_sigma, e.r_h]).collect();
    let (sample_mean, sample_cov) = sample_covariance(&samples);
    let target = info.matrix;
    let dof = (r - 1) as f64;
    let se = [
        [target[0][0] * (2.0 / dof).sqrt(), ((target[0][0] * target[1][1] + target[0][1].powi(2)) / dof).sqrt()],
        [0.0, target[1][1] * (2.0 / dof).sqrt()],
    ];
    let z = |i: usize, j: usize| (sample_cov[i][j] - target[i][j]) / se[i.min(j)][i.max(j)];
    let comp = |k: usize| samples.iter().map(|p| p[k]).collect::<Vec<f64>>();
    let (c0, c1) = (comp(0), comp(1));
    let (sk0, ku0) = shape_statistics(&c0);
    let (sk1, ku1) = shape_statistics(&c1);
    Ok(MCReport {
        theta: *theta,
        scheme: *scheme,
        regime,
        replications: r,
        seed,
        sample_mean,
        sample_cov,
        target,
        finite_n_cov: finite_n_covariance(&model)?,
        z_scores: [[z(0, 0), z(0, 1)], [z(1, 0), z(1, 1)]],
        correlation: correlation(&sample_cov),
        skewness: [sk0, sk1],
        excess_kurtosis: [ku0, ku1],
        ks: [ks_distance(&c0, target[0][0])?, ks_distance(&c1, target[1][1])?],
        correlation_unprojected: correlation(&sample_covariance(&raw).1),
        unreliable: r < RELIABLE_REPLICATIONS,
        samples,
    })
}

/// Correlation structure of the unprojected pair `U_n` against the projected `Ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub replications: usize,
    pub seed: u64,
    /// Sample correlation of `U_n = (S_σ/√𝒯, R_H/(L_n√𝒯))`.
    pub sample_correlation: f64,
    /// `tr(CD)/√(tr(C²) tr(D²))`, the exact correlation of `U_n`.
    pub deterministic_correlation: f64,
    /// Sample correlation of the projected pair `Ξ`.
    pub projected_correlation: f64,
    /// `det Σ̂_U / (Σ̂_U,11 Σ̂_U,22)`.
    pub determinant_ratio: f64,
    pub sample_cov_u: Mat2,
    /// `(J₀/π)[[σ², σ³], [σ³, σ⁴]]`.
    pub rank_one_limit: Mat2,
}

pub fn deterministic_correlation(tr: &Traces) -> f64 {
    tr.tr_cd / (tr.tr_c2 * tr.tr_d2).sqrt()
}

pub fn degeneracy_report(theta: &Theta, scheme: &SamplingScheme, r: usize, seed: u64) -> Result<DegeneracyReport> {
    check_replications(r)?;
    if theta.regime()? != Regime::Supercritical {
        return Err(Error::Regime { hurst: theta.h(), expected: "3/4 < H < 1" });
    }
    let model = CovModel::new(theta, scheme)?;
    let sampler = PathSampler::new(theta, scheme)?;
    let evals = collect_scores(&model, &sampler, r, seed)?;
    let (_, cov_u) = sample_covariance(&evals.iter().map(|e| e.u).collect::<Vec<_>>());
    let (_, cov_xi) = sample_covariance(&evals.iter().map(|e| e.xi).collect::<Vec<_>>());
    let k = j_constants(theta)?.j0 / PI;
    let s = theta.sigma;
    Ok(DegeneracyReport {
        replications: r,
        seed,
        sample_correlation: correlation(&cov_u),
        deterministic_correlation: deterministic_correlation(model.traces()),
        projected_correlation: correlation(&cov_xi),
        determinant_ratio: (cov_u[0][0] * cov_u[1][1] - cov_u[0][1].powi(2)) / (cov_u[0][0] * cov_u[1][1]),
        sample_cov_u: cov_u,
        rank_one_limit: [[k * s * s, k * s.powi(3)], [k * s.powi(3), k * s.powi(4)]],
    })
}

/// LAN gap statistics for one `(n, h)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LanCell {
    pub n: usize,
    pub h: [f64; 2],
    pub theta_h: [f64; 2],
    pub mean_abs_gap: f64,
    pub mean_gap: f64,
    pub sd_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanStudy {
    pub theta: Theta,
    pub alpha: f64,
    pub convention: AmplitudeConvention,
    pub replications: usize,
    pub seed: u64,
    pub cells: Vec<LanCell>,
}

impl LanStudy {
    /// Mean absolute gaps for direction `h` in sweep order.
    pub fn mean_abs_gaps(&self, h: [f64; 2]) -> Vec<f64> {
        self.cells.iter().filter(|c| c.h == h).map(|c| c.mean_abs_gap).collect()
    }
}

/// `±e₁, ±e₂, (1,1)/√2`.
pub fn default_h_grid() -> Vec<[f64; 2]> {
    let d = std::f64::consts::FRAC_1_SQRT_2;
    vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [d, d]]
}

fn par_chunks<T: Send>(r: usize, f: impl Fn(std::ops::Range<usize>) -> Result<Vec<T>> + Sync) -> Result<Vec<T>> {
    let chunks: Vec<Result<Vec<T>>> = (0..r.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(r)))
        .collect();
    let mut out = Vec::with_capacity(r);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Exact log-likelihood ratios against the LAN expansion over replications,
/// for every `n` in the sweep and every direction `h`.
pub fn lan_study(
    theta: &Theta,
    alpha: f64,
    n_list: &[usize],
    h_grid: &[[f64; 2]],
    r: usize,
    seed: u64,
    conv: AmplitudeConvention,
) -> Result<LanStudy> {
    check_replications(r)?;
    check_sweep(n_list)?;
    let info = limit_information_with(theta, conv)?;
    if info.regime != Regime::Supercritical {
        return Err(Error::Regime { hurst: theta.h(), expected: "3/4 < H < 1" });
    }
    let mut cells = Vec::new();
    for &n in n_list {
        let scheme = SamplingScheme::new(n, alpha)?;
        let model = CovModel::new(theta, &scheme)?;
        let rates = rate_matrices(&model, RateVariant::Empirical)?;
        let sampler = PathSampler::new(theta, &scheme)?;
        let base = par_chunks(r, |range| {
            let xs: Vec<Vec<f64>> = range.map(|rep| sampler.draw(seed, rep as u64).x).collect();
            let ll = log_lik_batch(&model, &xs)?;
            let se = scores_batch(&model, &xs)?;
            Ok(ll.into_iter().zip(se).map(|(l, s)| (l, s.xi)).collect())
        })?;
        for &h in h_grid {
            let theta_h = local_parameter(&model, &rates, h)?;
            let perturbed = CovModel::new(&theta_h, &scheme)?;
            let ll_h = par_chunks(r, |range| {
                let xs: Vec<Vec<f64>> = range.map(|rep| sampler.draw(seed, rep as u64).x).collect();
                log_lik_batch(&perturbed, &xs)
            })?;
            let gaps: Vec<f64> =
                base.iter().zip(&ll_h).map(|((l, xi), lh)| (lh - l) - lan_prediction(*xi, h, &info)).collect();
            let abs: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
            let m = mean(&gaps);
            let var = pairwise_sum(&gaps.iter().map(|g| (g - m).powi(2)).collect::<Vec<_>>()) / (r - 1) as f64;
            cells.push(LanCell {
                n,
                h,
                theta_h: [theta_h.sigma, theta_h.h()],
                mean_abs_gap: mean(&abs),
                mean_gap: m,
                sd_gap: var.sqrt(),
            });
        }
    }
    Ok(LanStudy { theta: *theta, alpha, convention: conv, replications: r, seed, cells })
}

/// Values of `tr(C²)`, `tr(CD)`, `tr(D²)` from one source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceTriple {
    pub c2: f64,
    pub cd: f64,
    pub d2: f64,
}

impl TraceTriple {
    fn rel_gap(&self, pred: &TraceTriple) -> TraceTriple {
        let g = |e: f64, p: f64| (e - p).abs() / e.abs();
        TraceTriple { c2: g(self.c2, pred.c2), cd: g(self.cd, pred.cd), d2: g(self.d2, pred.d2) }
    }

    fn scaled(self, k: f64) -> TraceTriple {
        TraceTriple { c2: k * self.c2, cd: k * self.cd, d2: k * self.d2 }
    }
}

/// Operator-to-Frobenius ratios with the dominating rates they are compared to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpfRow {
    pub c: f64,
    pub d: f64,
    pub dperp: f64,
    /// `1/√𝒯`, `n^{p−1/2}` or `1/√n` by regime.
    pub rate_c: f64,
    /// The same rate with the logarithmic factor of the `D` bound.
    pub rate_d: f64,
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub delta: f64,
    pub gamma: f64,
    pub exact: TraceTriple,
    /// `(n/2π)∫ g², (n/2π)∫ gh, (n/2π)∫ h²` with `g = f/(1+γf)`, `h = ḟ/(1+γf)`.
    pub szego: TraceTriple,
    pub rel_gap: TraceTriple,
    /// Leading-order prediction from the regime's limit constants.
    pub leading: TraceTriple,
    pub leading_rel_gap: TraceTriple,
    pub tr_dperp2: f64,
    pub szego_dperp2: f64,
    pub a_n: f64,
    pub a_n_szego: f64,
    /// `a_n − 2 ln(1/Δ)`.
    pub a_n_shift: f64,
    /// `2 ln(1/Δ) + m`, above `H = 3/4` only.
    pub a_n_tilde: Option<f64>,
    /// `2π tr((D⊥)²)/(n Δ^{1−2p})`, above `H = 3/4` only.
    pub jperp_ratio: Option<f64>,
    /// `tr(CD)/√(tr(C²) tr(D²))`.
    pub deterministic_correlation: f64,
    /// Operator/Frobenius ratios, filled by [`opf_decay`].
    pub opf: Option<OpfRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub theta: Theta,
    pub alpha: f64,
    pub regime: Regime,
    /// `m(H, σ)` and `J⊥` above `H = 3/4`.
    pub m: Option<f64>,
    pub jperp: Option<f64>,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares log-log slopes of the `C` and `D` op/F ratios against `n`.
    pub opf_slope: Option<[f64; 2]>,
}

/// `∫_{−π}^{π}` of `g²`, `gh`, `h²` for `g = f/(1+γf)`, `h = ḟ/(1+γf)`.
pub fn szego_integrals(h: HurstIndex, gamma: f64) -> Result<[f64; 3]> {
    let tol = Tolerance::rel(1e-10);
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let f = |x: f64| {
            let (f, df) = spectral::density_with_dh(h, x).expect("frequency in (0, π]");
            let a = 1.0 + gamma * f;
            let (g, hh) = (f / a, df / a);
            match k {
                0 => g * g,
                1 => g * hh,
                _ => hh * hh,
            }
        };
        // Integrands are bounded near zero once γ > 0, so a rectangle covers the head.
        let head = |e: f64| e * f(e);
        *slot = 2.0 * quadrature::graded_from_zero(&f, PI, GRADING_LEVELS, head, tol).into_result(tol.rel)?;
    }
    Ok(out)
}

fn check_sweep(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Parameter("empty n list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(format!("n list must be strictly ascending, got {n_list:?}")));
    }
    Ok(())
}

fn leading_order(theta: &Theta, scheme: &SamplingScheme, regime: Regime) -> Result<TraceTriple> {
    let n = scheme.n as f64;
    let p = theta.p();
    let s = theta.sigma;
    Ok(match regime {
        Regime::Supercritical => {
            let k = j_constants(theta)?;
            let l = scheme.log_inv_delta();
            TraceTriple {
                c2: k.j0,
                cd: 2.0 * l * k.j0 + k.j1,
                d2: 4.0 * l * l * k.j0 + 4.0 * l * k.j1 + k.j2,
            }
            .scaled(n / (2.0 * PI) * scheme.delta().powf(1.0 - 2.0 * p))
        }
        Regime::Subcritical => {
            let [ff, fd, dd] = spectral_square_integrals(theta.hurst)?;
            TraceTriple { c2: ff, cd: fd, d2: dd }.scaled(n / PI)
        }
        Regime::FbmDominated => {
            // C = ε C̃ with ε = Δ^{-p}.
            let (t1, t2) = t_constants(theta.hurst)?;
            let eps = scheme.eps(theta);
            TraceTriple { c2: 2.0 * PI, cd: 2.0 * PI * t1, d2: 4.0 * PI * t2 }
                .scaled(eps * eps * n / (2.0 * PI * s.powi(4)))
        }
    })
}

fn convergence_row(theta: &Theta, alpha: f64, n: usize, with_opf: bool) -> Result<ConvergenceRow> {
    let scheme = SamplingScheme::new(n, alpha)?;
    let regime = theta.regime()?;
    let model = CovModel::new(theta, &scheme)?;
    let tr = *model.traces();
    let opf = if with_opf {
        let s = model.trace_suite();
        let nf = n as f64;
        let logn = nf.ln();
        let rate_c = match regime {
            Regime::Supercritical => 1.0 / scheme.horizon().sqrt(),
            Regime::Subcritical => nf.powf(theta.p() - 0.5),
            Regime::FbmDominated => 1.0 / nf.sqrt(),
        };
        Some(OpfRow {
            c: s.op_c / s.frob_c,
            d: s.op_d / s.frob_d,
            dperp: s.op_dperp / s.frob_dperp,
            rate_c,
            rate_d: rate_c * logn,
        })
    } else {
        None
    };
    let [gg, gh, hh] = szego_integrals(theta.hurst, model.gamma())?;
    let k = n as f64 / (2.0 * PI);
    let exact = TraceTriple { c2: tr.tr_c2, cd: tr.tr_cd, d2: tr.tr_d2 };
    let szego = TraceTriple { c2: gg, cd: gh, d2: hh }.scaled(k);
    let leading = leading_order(theta, &scheme, regime)?;
    let l = scheme.log_inv_delta();
    let (a_n_tilde, jperp_ratio) = if regime == Regime::Supercritical {
        let m = j_constants(theta)?.m;
        let scale = n as f64 * scheme.delta().powf(1.0 - 2.0 * theta.p()) / (2.0 * PI);
        (Some(2.0 * l + m), Some(tr.tr_dperp2 / scale))
    } else {
        (None, None)
    };
    Ok(ConvergenceRow {
        n,
        delta: scheme.delta(),
        gamma: model.gamma(),
        exact,
        szego,
        rel_gap: exact.rel_gap(&szego),
        leading,
        leading_rel_gap: exact.rel_gap(&leading),
        tr_dperp2: tr.tr_dperp2,
        szego_dperp2: k * (hh - gh * gh / gg),
        a_n: tr.a_n,
        a_n_szego: gh / gg,
        a_n_shift: tr.a_n - 2.0 * l,
        a_n_tilde,
        jperp_ratio,
        deterministic_correlation: deterministic_correlation(&tr),
        opf,
    })
}

fn table(theta: &Theta, alpha: f64, n_list: &[usize], with_opf: bool) -> Result<ConvergenceTable> {
    check_sweep(n_list)?;
    let regime = theta.regime()?;
    let rows = n_list
        .iter()
        .map(|&n| convergence_row(theta, alpha, n, with_opf))
        .collect::<Result<Vec<_>>>()?;
    let (m, jperp) = if regime == Regime::Supercritical {
        let k = j_constants(theta)?;
        (Some(k.m), Some(k.jperp))
    } else {
        (None, None)
    };
    let opf_slope = if with_opf && rows.len() >= 2 {
        let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let sel = |f: fn(&OpfRow) -> f64| rows.iter().map(|r| f(r.opf.as_ref().expect("op/F row"))).collect::<Vec<_>>();
        Some([loglog_slope(&ns, &sel(|o| o.c)), loglog_slope(&ns, &sel(|o| o.d))])
    } else {
        None
    };
    Ok(ConvergenceTable { theta: *theta, alpha, regime, m, jperp, rows, opf_slope })
}

/// Exact traces against Szegő and leading-order predictions along `n_list`.
pub fn trace_convergence(theta: &Theta, alpha: f64, n_list: &[usize]) -> Result<ConvergenceTable> {
    table(theta, alpha, n_list, false)
}

/// As [`trace_convergence`], with operator norms and op/F ratios.
pub fn opf_decay(theta: &Theta, alpha: f64, n_list: &[usize]) -> Result<ConvergenceTable> {
    table(theta, alpha, n_list, true)
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (mean(&lx), mean(&ly));
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
