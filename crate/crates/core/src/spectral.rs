//! Fractional Gaussian noise: autocovariance, spectral density and their
//! derivatives in the Hurst index.
//!
//! The density is normalised so that `ρ_H(k) = (1/2π) ∫_{-π}^{π} f_H(λ) e^{ikλ} dλ`:
//!
//! ```text
//! f_H(λ) = 4π c_H (1 − cos λ) ( |λ|^{-2H-1} + Σ_{j≥1} (2πj+λ)^{-2H-1} + (2πj−λ)^{-2H-1} )
//! ```
//!
//! with `c_H = Γ(2H+1) sin(πH) / (2π)`, so `f_H(λ) ≈ 2π c_H |λ|^{-p}` near zero.
//! The series is truncated after `J` terms and the remainder is replaced by
//! a midpoint Euler–Maclaurin tail.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::special::{digamma, gamma};

/// Half-width of the excluded neighbourhoods around H = 1/2 and H = 3/4.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Hurst index `H ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct HurstIndex(f64);

/// Asymptotic regime selected by `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `3/4 < H < 1`: the projected score needs the second rate matrix.
    Supercritical,
    /// `1/2 < H < 3/4`.
    Subcritical,
    /// `0 < H < 1/2`: the fGn component dominates the noise.
    FbmDominated,
}

impl HurstIndex {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 && h < 1.0 {
            Ok(HurstIndex(h))
        } else {
            Err(Error::Domain(format!("Hurst index must lie in (0, 1), got {h}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Memory exponent `p = 2H − 1`.
    #[inline]
    pub fn p(self) -> f64 {
        2.0 * self.0 - 1.0
    }

    /// Regime of `H`, rejecting the boundary values 1/2 and 3/4.
    pub fn regime(self) -> Result<Regime> {
        let h = self.0;
        if (h - 0.5).abs() <= BOUNDARY_EPS || (h - 0.75).abs() <= BOUNDARY_EPS {
            return Err(Error::Regime { hurst: h, expected: "H not in {1/2, 3/4}" });
        }
        Ok(if h > 0.75 {
            Regime::Supercritical
        } else if h > 0.5 {
            Regime::Subcritical
        } else {
            Regime::FbmDominated
        })
    }
}

impl TryFrom<f64> for HurstIndex {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        HurstIndex::new(h)
    }
}

/// Low-frequency constants of `f_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConstants {
    /// `c_H = Γ(2H+1) sin(πH) / (2π)`.
    pub c_h: f64,
    /// `C_H = ∂_H ln c_H = 2ψ(2H+1) + π cot(πH)`.
    pub big_c_h: f64,
    /// Amplitude of `f_H(λ) |λ|^p` as `λ → 0` under the density normalisation (`2π c_H`).
    pub density_amplitude: f64,
    /// Number of explicit series terms used at `|λ| = π`.
    pub truncation_terms: usize,
}

pub fn fh_constants(h: HurstIndex) -> SpectralConstants {
    let hv = h.value();
    let c_h = gamma(2.0 * hv + 1.0) * (PI * hv).sin() / (2.0 * PI);
    let big_c_h = 2.0 * digamma(2.0 * hv + 1.0) + PI / (PI * hv).tan();
    SpectralConstants {
        c_h,
        big_c_h,
        density_amplitude: 2.0 * PI * c_h,
        truncation_terms: truncation_terms(2.0 * hv + 1.0, PI),
    }
}

/// `ρ_H(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn autocov(h: HurstIndex, k: i64) -> f64 {
    let k = k.unsigned_abs();
    let two_h = 2.0 * h.value();
    match k {
        0 => 1.0,
        1..=7 => {
            let kf = k as f64;
            0.5 * ((kf + 1.0).powf(two_h) - 2.0 * kf.powf(two_h) + (kf - 1.0).powf(two_h))
        }
        _ => {
            let (bracket, _) = even_binomial_series(two_h, 1.0 / k as f64);
            0.5 * (k as f64).powf(two_h) * bracket
        }
    }
}

/// `∂_H ρ_H(k) = |k+1|^{2H} ln|k+1| − 2|k|^{2H} ln|k| + |k−1|^{2H} ln|k−1|`, with `0 ln 0 = 0`.
pub fn autocov_dh(h: HurstIndex, k: i64) -> f64 {
    let k = k.unsigned_abs();
    let two_h = 2.0 * h.value();
    let term = |m: f64| if m <= 1.0 { 0.0 } else { m.powf(two_h) * m.ln() };
    match k {
        0 => 0.0,
        1..=7 => {
            let kf = k as f64;
            term(kf + 1.0) - 2.0 * term(kf) + term(kf - 1.0)
        }
        _ => {
            let kf = k as f64;
            let (bracket, dbracket) = even_binomial_series(two_h, 1.0 / kf);
            let k2h = kf.powf(two_h);
            k2h * kf.ln() * bracket + 0.5 * k2h * dbracket
        }
    }
}

/// `(1+x)^a + (1−x)^a − 2 = 2 Σ_{j even ≥ 2} binom(a, j) x^j` and its derivative in `H`
/// (where `a = 2H`), for `0 < x ≤ 1/8`.
fn even_binomial_series(a: f64, x: f64) -> (f64, f64) {
    // P_j = a(a−1)…(a−j+1) and dP_j/dH, built by the product rule.
    let (mut prod, mut dprod) = (1.0, 0.0);
    let mut fact = 1.0;
    let mut xp = 1.0;
    let (mut sum, mut dsum) = (0.0, 0.0);
    for j in 1..=40u32 {
        let factor = a - (j - 1) as f64;
        dprod = dprod * factor + 2.0 * prod;
        prod *= factor;
        fact *= j as f64;
        xp *= x;
        if j % 2 == 0 {
            let t = 2.0 * prod / fact * xp;
            let dt = 2.0 * dprod / fact * xp;
            sum += t;
            dsum += dt;
            if t.abs() <= 1e-17 * sum.abs() && dt.abs() <= 1e-17 * dsum.abs().max(1e-300) {
                break;
            }
        }
    }
    (sum, dsum)
}

fn check_lambda(lambda: f64) -> Result<f64> {
    let a = lambda.abs();
    if !(a > 0.0 && a <= PI) {
        return Err(Error::Domain(format!("frequency must satisfy 0 < |λ| ≤ π, got {lambda}")));
    }
    Ok(a)
}

/// Series cutoff `J` such that the first neglected Euler–Maclaurin correction is
/// below `1e-16` relative to the first series term.
fn truncation_terms(e: f64, lambda: f64) -> usize {
    let first = (2.0 * PI - lambda).powf(-e);
    let mut j = 16usize;
    loop {
        let u = 2.0 * PI * (j as f64 + 0.5) - lambda;
        // Fifth derivative of (2πt − λ)^{-e}, scaled by the midpoint coefficient 31/967680.
        let d5 = (0..5).map(|i| e + i as f64).product::<f64>() * (2.0 * PI).powi(5) * u.powf(-e - 5.0);
        if 31.0 / 967_680.0 * d5 <= 1e-16 * first || j >= 1024 {
            return j;
        }
        j *= 2;
    }
}

/// `B(λ, H)` and `∂_H B(λ, H)` for `0 < λ ≤ π`.
fn series_b(e: f64, lambda: f64) -> (f64, f64, usize) {
    let jmax = truncation_terms(e, lambda);
    let tp = 2.0 * PI;
    let (mut b, mut db) = (0.0, 0.0);
    for j in (1..=jmax).rev() {
        for u in [tp * j as f64 + lambda, tp * j as f64 - lambda] {
            let lu = u.ln();
            let v = (-e * lu).exp();
            b += v;
            db -= 2.0 * lu * v;
        }
    }
    let mid = tp * (jmax as f64 + 0.5);
    for u in [mid + lambda, mid - lambda] {
        let lu = u.ln();
        let ue = (-e * lu).exp();
        // ∫_{J+½}^∞ (2πt ± λ)^{-e} dt
        let int = u * ue / (tp * (e - 1.0));
        let dint = int * (-2.0 * lu - 2.0 / (e - 1.0));
        // + (1/24) g′(J+½)
        let g1 = -tp * e * ue / u;
        let dg1 = -tp * ue / u * (2.0 - 2.0 * e * lu);
        // − (7/5760) g‴(J+½)
        let poly = e * (e + 1.0) * (e + 2.0);
        let dpoly = 2.0 * ((e + 1.0) * (e + 2.0) + e * (e + 2.0) + e * (e + 1.0));
        let tp3 = tp * tp * tp;
        let u3 = ue / (u * u * u);
        let g3 = -tp3 * poly * u3;
        let dg3 = -tp3 * u3 * (dpoly - 2.0 * lu * poly);
        b += int + g1 / 24.0 - 7.0 / 5760.0 * g3;
        db += dint + dg1 / 24.0 - 7.0 / 5760.0 * dg3;
    }
    (b, db, jmax)
}

/// `f_H(λ)` and `∂_H f_H(λ)` together; `λ` must be in `(0, π]` after folding.
fn density_pair(h: HurstIndex, lambda: f64) -> (f64, f64) {
    let hv = h.value();
    let e = 2.0 * hv + 1.0;
    let consts = fh_constants(h);
    let s = (0.5 * lambda).sin();
    let one_minus_cos = 2.0 * s * s;
    let ll = lambda.ln();
    let lead = (-e * ll).exp();
    let (b, db, _) = series_b(e, lambda);
    let scale = 4.0 * PI * consts.c_h * one_minus_cos;
    let f = scale * (lead + b);
    let df = f * consts.big_c_h + scale * (-2.0 * ll * lead + db);
    (f, df)
}

/// Spectral density `f_H(λ)`, `0 < |λ| ≤ π`.
pub fn density(h: HurstIndex, lambda: f64) -> Result<f64> {
    let a = check_lambda(lambda)?;
    Ok(density_pair(h, a).0)
}

/// `∂_H f_H(λ)`, `0 < |λ| ≤ π`.
pub fn density_dh(h: HurstIndex, lambda: f64) -> Result<f64> {
    let a = check_lambda(lambda)?;
    Ok(density_pair(h, a).1)
}

/// `b_H(λ) = ∂_H ln f_H(λ)`.
pub fn log_deriv(h: HurstIndex, lambda: f64) -> Result<f64> {
    let a = check_lambda(lambda)?;
    let (f, df) = density_pair(h, a);
    Ok(df / f)
}

/// Both `f_H` and `∂_H f_H` at one frequency, sharing the series evaluation.
pub fn density_with_dh(h: HurstIndex, lambda: f64) -> Result<(f64, f64)> {
    let a = check_lambda(lambda)?;
    Ok(density_pair(h, a))
}

/// Number of geometric levels used when integrating spectral symbols toward zero.
pub const GRADING_LEVELS: u32 = 40;

/// `(1/2π) ∫_{-π}^{π} f_H(λ) cos(kλ) dλ` by graded quadrature.
///
/// The sliver below `π 2^{-40}` is integrated from `f_H ≈ 2π c_H λ^{-p}`.
pub fn fourier_coefficient(h: HurstIndex, k: i64) -> Result<f64> {
    let p = h.p();
    let amp = fh_constants(h).density_amplitude;
    let kf = k as f64;
    let integrand = |x: f64| density_pair(h, x).0 * (kf * x).cos();
    let q = quadrature::graded_from_zero(
        &integrand,
        PI,
        GRADING_LEVELS,
        |eps| amp * quadrature::power_log_head(-p, 0, eps),
        Tolerance::rel(1e-13),
    );
    Ok(q.into_result(1e-13)? / PI)
}
