//! Information constants: the `J`-integrals, the master integral, the
//! `T`-constants of the fGn-dominated regime and the limiting information
//! matrices of the three regimes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Normalizer, Theta};
use crate::quadrature::{self, Tolerance};
use crate::special::{digamma, gamma, trigamma};
use crate::spectral::{self, fh_constants, HurstIndex, Regime, GRADING_LEVELS};

/// Low-frequency amplitude entering the weight `w(x) = (c|x|^{-p} / (1 + σ²c|x|^{-p}))²`.
///
/// `Printed` uses `c = c_H`. `DensityConsistent` uses `c = 2π c_H`, the amplitude
/// of `f_H(λ)|λ|^p` under the `(1/2π)`-inversion normalisation of the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeConvention {
    #[default]
    Printed,
    DensityConsistent,
}

impl AmplitudeConvention {
    pub fn amplitude(self, h: HurstIndex) -> f64 {
        let c = fh_constants(h);
        match self {
            AmplitudeConvention::Printed => c.c_h,
            AmplitudeConvention::DensityConsistent => c.density_amplitude,
        }
    }
}

/// `J₀, J₁, J₂` and derived quantities for a supercritical `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoConstants {
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    pub jperp: f64,
    /// `m = J₁/J₀`.
    pub m: f64,
    /// `A = σ² c`.
    pub a: f64,
    pub l_a: f64,
}

/// `I(r) = (1/p) A^{(r+1)/p} Γ((r+1)/p) Γ(2 − (r+1)/p)`.
pub fn master_integral(a: f64, p: f64, r: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("A must be positive, got {a}")));
    }
    let s = (r + 1.0) / p;
    if !(p > 0.0 && s > 0.0 && s < 2.0) {
        return Err(Error::Domain(format!("(r+1)/p = {s} must lie in (0, 2)")));
    }
    Ok(a.powf(s) * gamma(s) * gamma(2.0 - s) / p)
}

fn require_supercritical(theta: &Theta) -> Result<()> {
    match theta.regime()? {
        Regime::Supercritical => Ok(()),
        _ => Err(Error::Regime { hurst: theta.h(), expected: "3/4 < H < 1" }),
    }
}

/// Closed forms of `J₀, J₁, J₂` with the printed amplitude `c_H`.
pub fn j_constants(theta: &Theta) -> Result<InfoConstants> {
    j_constants_with(theta, AmplitudeConvention::Printed)
}

pub fn j_constants_with(theta: &Theta, conv: AmplitudeConvention) -> Result<InfoConstants> {
    require_supercritical(theta)?;
    let p = theta.p();
    let s2 = theta.sigma * theta.sigma;
    let a = s2 * conv.amplitude(theta.hurst);
    let l_a = a.ln();
    let big_c = fh_constants(theta.hurst).big_c_h;
    let (u, v) = (1.0 / p, 2.0 - 1.0 / p);
    let j0 = 2.0 / (p * s2 * s2) * a.powf(u) * gamma(u) * gamma(v);
    let kappa = big_c - 2.0 / p * (l_a + digamma(u) - digamma(v));
    let spread = 4.0 / (p * p) * (trigamma(u) + trigamma(v));
    let j1 = j0 * kappa;
    let j2 = j0 * (kappa * kappa + spread);
    Ok(InfoConstants { j0, j1, j2, jperp: j2 - j1 * j1 / j0, m: kappa, a, l_a })
}

/// `J⊥ = J₀ (4/p²)(ψ₁(1/p) + ψ₁(2 − 1/p))`.
pub fn jperp_trigamma_form(theta: &Theta, conv: AmplitudeConvention) -> Result<f64> {
    let k = j_constants_with(theta, conv)?;
    let p = theta.p();
    Ok(k.j0 * 4.0 / (p * p) * (trigamma(1.0 / p) + trigamma(2.0 - 1.0 / p)))
}

/// `J₀, J₁, J₂` by direct quadrature of the weight over the real line.
pub fn j_constants_oracle(theta: &Theta) -> Result<InfoConstants> {
    j_constants_oracle_with(theta, AmplitudeConvention::Printed)
}

pub fn j_constants_oracle_with(theta: &Theta, conv: AmplitudeConvention) -> Result<InfoConstants> {
    require_supercritical(theta)?;
    let p = theta.p();
    let c = conv.amplitude(theta.hurst);
    let s2 = theta.sigma * theta.sigma;
    let sc = s2 * c;
    let big_c = fh_constants(theta.hurst).big_c_h;
    let w = |x: f64| {
        let d = x.powf(p) + sc;
        c * c / (d * d)
    };
    let tol = Tolerance::rel(1e-13);
    let requested = 1e-10;

    // (C − 2 ln x)^k = Σ_j coef[k][j] ln^j x
    let coef: [[f64; 3]; 3] = [
        [1.0, 0.0, 0.0],
        [big_c, -2.0, 0.0],
        [big_c * big_c, -4.0 * big_c, 4.0],
    ];
    // Near zero: w = σ^{-4} (1 + x^p/(σ²c))^{-2} = σ^{-4} Σ_m (m+1)(−x^p/(σ²c))^m.
    let head = |k: usize, eps: f64| {
        (0..4)
            .map(|m| {
                let scale = (m as f64 + 1.0) * (-1.0 / sc).powi(m) / (s2 * s2);
                (0..=k).map(|j| coef[k][j] * quadrature::power_log_head(m as f64 * p, j as u32, eps)).sum::<f64>() * scale
            })
            .sum::<f64>()
    };
    // Far field: w = c² x^{-2p} Σ_m (m+1)(−σ²c x^{-p})^m.
    let tail = |k: usize, x: f64| {
        (0..8)
            .map(|m| {
                let scale = c * c * (m as f64 + 1.0) * (-sc).powi(m);
                let q = (2.0 + m as f64) * p;
                (0..=k).map(|j| coef[k][j] * quadrature::power_log_tail(q, j as u32, x)).sum::<f64>() * scale
            })
            .sum::<f64>()
    };

    let mut js = [0.0; 3];
    for (k, slot) in js.iter_mut().enumerate() {
        let f = |x: f64| w(x) * (big_c - 2.0 * x.ln()).powi(k as i32);
        let near = quadrature::graded_from_zero(&f, 1.0, GRADING_LEVELS, |e| head(k, e), tol);
        let far = quadrature::graded_to_infinity(&f, 1.0, GRADING_LEVELS, |x| tail(k, x), tol);
        *slot = 2.0 * (near.into_result(requested)? + far.into_result(requested)?);
    }
    let [j0, j1, j2] = js;
    let a = sc;
    Ok(InfoConstants { j0, j1, j2, jperp: j2 - j1 * j1 / j0, m: j1 / j0, a, l_a: a.ln() })
}

/// `T₁ = (1/2π)∫ b_H` and `T₂ = (1/4π)∫ b_H²` over `[−π, π]`, for `H < 1/2`.
pub fn t_constants(h: HurstIndex) -> Result<(f64, f64)> {
    t_constants_with(h, Tolerance::rel(1e-12))
}

pub fn t_constants_with(h: HurstIndex, tol: Tolerance) -> Result<(f64, f64)> {
    if !(h.value() < 0.5) {
        return Err(Error::Regime { hurst: h.value(), expected: "0 < H < 1/2" });
    }
    let big_c = fh_constants(h).big_c_h;
    let b = |x: f64| {
        let (f, df) = spectral::density_with_dh(h, x).expect("frequency in (0, π]");
        df / f
    };
    let head1 = |e: f64| big_c * e - 2.0 * quadrature::power_log_head(0.0, 1, e);
    let head2 = |e: f64| {
        big_c * big_c * e - 4.0 * big_c * quadrature::power_log_head(0.0, 1, e)
            + 4.0 * quadrature::power_log_head(0.0, 2, e)
    };
    let i1 = quadrature::graded_from_zero(&b, PI, GRADING_LEVELS, head1, tol).into_result(tol.rel)?;
    let i2 = quadrature::graded_from_zero(&|x: f64| b(x).powi(2), PI, GRADING_LEVELS, head2, tol)
        .into_result(tol.rel)?;
    Ok((i1 / PI, i2 / (2.0 * PI)))
}

/// `∫_0^π f², ∫_0^π f ḟ, ∫_0^π ḟ²` for `H < 3/4`.
pub fn spectral_square_integrals(h: HurstIndex) -> Result<[f64; 3]> {
    let p = h.p();
    if !(p < 0.5) {
        return Err(Error::Regime { hurst: h.value(), expected: "H < 3/4" });
    }
    let consts = fh_constants(h);
    let amp2 = consts.density_amplitude.powi(2);
    let big_c = consts.big_c_h;
    let tol = Tolerance::rel(1e-12);
    let s = -2.0 * p;
    let heads: [Box<dyn Fn(f64) -> f64>; 3] = [
        Box::new(move |e| amp2 * quadrature::power_log_head(s, 0, e)),
        Box::new(move |e| {
            amp2 * (big_c * quadrature::power_log_head(s, 0, e) - 2.0 * quadrature::power_log_head(s, 1, e))
        }),
        Box::new(move |e| {
            amp2 * (big_c * big_c * quadrature::power_log_head(s, 0, e)
                - 4.0 * big_c * quadrature::power_log_head(s, 1, e)
                + 4.0 * quadrature::power_log_head(s, 2, e))
        }),
    ];
    let mut out = [0.0; 3];
    for (i, head) in heads.iter().enumerate() {
        let f = |x: f64| {
            let (f, df) = spectral::density_with_dh(h, x).expect("frequency in (0, π]");
            match i {
                0 => f * f,
                1 => f * df,
                _ => df * df,
            }
        };
        out[i] = quadrature::graded_from_zero(&f, PI, GRADING_LEVELS, head, tol).into_result(tol.rel)?;
    }
    Ok(out)
}

/// Scalar normaliser plus whether the second (projection) rate matrix is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalization {
    pub scalar: Normalizer,
    pub projection_required: bool,
}

/// Limiting covariance of the normalised score vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitInformation {
    pub regime: Regime,
    pub matrix: [[f64; 2]; 2],
    pub normalization: Normalization,
}

impl LimitInformation {
    pub fn determinant(&self) -> f64 {
        let m = self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

pub fn limit_information(theta: &Theta) -> Result<LimitInformation> {
    limit_information_with(theta, AmplitudeConvention::Printed)
}

/// Regime-dispatched limit information; `conv` matters only for `H > 3/4`.
pub fn limit_information_with(theta: &Theta, conv: AmplitudeConvention) -> Result<LimitInformation> {
    let regime = theta.regime()?;
    let s = theta.sigma;
    let matrix = match regime {
        Regime::Supercritical => {
            let k = j_constants_with(theta, conv)?;
            [[s * s * k.j0 / PI, 0.0], [0.0, s.powi(4) * k.jperp / (4.0 * PI)]]
        }
        Regime::Subcritical => {
            let [ff, fd, dd] = spectral_square_integrals(theta.hurst)?;
            let off = s.powi(3) / PI * fd;
            [[2.0 * s * s / PI * ff, off], [off, s.powi(4) / (2.0 * PI) * dd]]
        }
        Regime::FbmDominated => {
            let (t1, t2) = t_constants(theta.hurst)?;
            [[2.0 / (s * s), t1 / s], [t1 / s, t2]]
        }
    };
    Ok(LimitInformation {
        regime,
        matrix,
        normalization: Normalization {
            scalar: Normalizer::for_regime(regime),
            projection_required: regime == Regime::Supercritical,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(s: f64, h: f64) -> Theta {
        Theta::new(s, h).unwrap()
    }

    #[test]
    fn master_integral_examples() {
        let c = fh_constants(HurstIndex::new(0.8).unwrap()).c_h;
        let i0 = master_integral(c, 0.6, 0.0).unwrap();
        assert!((i0 - 0.14105).abs() < 3e-4, "{i0}");
        let k = j_constants(&th(1.0, 0.8)).unwrap();
        assert!((i0 - k.j0 / 2.0).abs() < 1e-14);
        let want = gamma(5.0 / 3.0) * gamma(1.0 / 3.0) / 0.6;
        assert!((master_integral(1.0, 0.6, 0.0).unwrap() / want - 1.0).abs() < 1e-14);
        assert!(master_integral(1.0, 0.6, 0.2).is_err());
        assert!(master_integral(0.0, 0.6, 0.0).is_err());
    }

    #[test]
    fn master_integral_matches_quadrature() {
        let (a, p, r) = (1.0, 0.6, 0.0);
        let f = |x: f64| {
            let t = a * x.powf(-p);
            (t / (1.0 + t)).powi(2) * x.powf(r)
        };
        let tol = Tolerance::rel(1e-13);
        let near = quadrature::graded_from_zero(&f, 1.0, 40, |e| e, tol).value;
        let far = quadrature::graded_to_infinity(
            &f,
            1.0,
            40,
            |x| (0..8).map(|m| (m as f64 + 1.0) * (-a).powi(m) * a * a * quadrature::power_log_tail((2.0 + m as f64) * p, 0, x)).sum(),
            tol,
        )
        .value;
        let closed = master_integral(a, p, r).unwrap();
        assert!(((near + far) / closed - 1.0).abs() < 1e-8);
    }

    #[test]
    fn printed_values() {
        let k = j_constants(&th(1.0, 0.8)).unwrap();
        assert!((k.j0 - 0.2820).abs() < 5e-4, "{}", k.j0);
        assert!((k.jperp - 34.1772).abs() < 0.02, "{}", k.jperp);
        assert!((k.m - k.j1 / k.j0).abs() < 1e-14);
    }

    #[test]
    fn jperp_two_forms_agree() {
        for &(s, h) in &[(1.0, 0.8), (0.5, 0.9), (2.0, 0.78)] {
            let t = th(s, h);
            let k = j_constants(&t).unwrap();
            let alt = jperp_trigamma_form(&t, AmplitudeConvention::Printed).unwrap();
            assert!((k.jperp / alt - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        for conv in [AmplitudeConvention::Printed, AmplitudeConvention::DensityConsistent] {
            for &h in &[0.78, 0.8, 0.85, 0.9] {
                for &s in &[0.5, 1.0, 2.0] {
                    let t = th(s, h);
                    let a = j_constants_with(&t, conv).unwrap();
                    let b = j_constants_oracle_with(&t, conv).unwrap();
                    for (x, y) in [(a.j0, b.j0), (a.j1, b.j1), (a.j2, b.j2)] {
                        assert!((x / y - 1.0).abs() < 1e-6, "H={h} σ={s} {conv:?}: {x} vs {y}");
                    }
                }
            }
        }
        assert!(j_constants_oracle(&th(0.5, 0.9)).unwrap().jperp > 0.0);
    }

    #[test]
    fn j0_scale_covariance() {
        for &h in &[0.8, 0.9] {
            let p = 2.0 * h - 1.0;
            let base = j_constants(&th(1.0, h)).unwrap().j0;
            for &s in &[0.5f64, 2.0, 3.0] {
                let got = j_constants(&th(s, h)).unwrap().j0;
                assert!((got / (base * s.powf(2.0 / p - 4.0)) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn regime_errors() {
        assert!(matches!(j_constants(&th(1.0, 0.7)), Err(Error::Regime { .. })));
        assert!(matches!(t_constants(HurstIndex::new(0.6).unwrap()), Err(Error::Regime { .. })));
        assert!(limit_information(&th(1.0, 0.75)).is_err());
        assert!(limit_information(&th(1.0, 0.5)).is_err());
    }

    #[test]
    fn t_constants_properties() {
        let h = HurstIndex::new(0.3).unwrap();
        let (t1, t2) = t_constants(h).unwrap();
        assert!(t1.is_finite() && t2 > 0.0);
        assert!(t2 >= t1 * t1 / 2.0);
        let loose = t_constants_with(h, Tolerance::rel(1e-9)).unwrap();
        let tight = t_constants_with(h, Tolerance::rel(1e-13)).unwrap();
        assert!((loose.0 - tight.0).abs() <= 1e-7 * tight.0.abs());
        assert!((loose.1 - tight.1).abs() <= 1e-7 * tight.1.abs());
    }

    #[test]
    fn limit_information_by_regime() {
        let sup = limit_information(&th(1.0, 0.8)).unwrap();
        assert_eq!(sup.regime, Regime::Supercritical);
        assert!(sup.normalization.projection_required);
        assert!((sup.matrix[0][0] / 0.0897 - 1.0).abs() < 0.01);
        assert!((sup.matrix[1][1] / 2.7197 - 1.0).abs() < 0.01);
        assert_eq!(sup.matrix[0][1], 0.0);

        let sub = limit_information(&th(1.0, 0.6)).unwrap();
        assert_eq!(sub.normalization.scalar, Normalizer::SqrtNDeltaP);
        assert_eq!(sub.matrix[0][1], sub.matrix[1][0]);
        assert!(sub.determinant() > 0.0);

        let pure = limit_information(&th(2.0, 0.3)).unwrap();
        assert_eq!(pure.matrix[0][0], 0.5);
        assert!(pure.determinant() > 0.0);
        assert!(!pure.normalization.projection_required);
    }

    #[test]
    fn white_noise_square_integral() {
        // f ≡ 1 in the white-noise limit, so ∫_0^π f² → π.
        let h = HurstIndex::new(0.5 + 1e-9).unwrap();
        let [ff, _, _] = spectral_square_integrals(h).unwrap();
        assert!((ff - PI).abs() < 1e-6);
    }
}
