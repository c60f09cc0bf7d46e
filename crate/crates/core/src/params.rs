//! Model parameters and the high-frequency sampling scheme.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{HurstIndex, Regime};

/// Unknown parameter `θ = (σ, H)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theta {
    pub sigma: f64,
    pub hurst: HurstIndex,
}

impl Theta {
    pub fn new(sigma: f64, hurst: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Theta { sigma, hurst: HurstIndex::new(hurst)? })
    }

    /// Admits `σ = 0`; only for tests of the degenerate pure-noise model.
    #[cfg(test)]
    pub(crate) fn degenerate(hurst: f64) -> Self {
        Theta { sigma: 0.0, hurst: HurstIndex::new(hurst).unwrap() }
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.hurst.value()
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.hurst.p()
    }

    pub fn regime(&self) -> Result<Regime> {
        self.hurst.regime()
    }
}

/// Equispaced scheme `Δ = n^{-α}` on the horizon `𝒯 = nΔ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingScheme {
    pub n: usize,
    pub alpha: f64,
}

impl SamplingScheme {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("n must be at least 2, got {n}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(SamplingScheme { n, alpha })
    }

    /// Step `Δ_n = n^{-α}`.
    pub fn delta(&self) -> f64 {
        (self.n as f64).powf(-self.alpha)
    }

    /// Horizon `𝒯_n = nΔ_n`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta()
    }

    /// `L_n = ln(1/Δ_n)`.
    pub fn log_inv_delta(&self) -> f64 {
        self.alpha * (self.n as f64).ln()
    }

    /// Signal-to-noise ratio `γ_n = σ² Δ^{2H−1}`.
    pub fn gamma(&self, theta: &Theta) -> f64 {
        theta.sigma * theta.sigma * self.delta().powf(theta.p())
    }

    /// `ε_n = Δ^{1−2H}`.
    pub fn eps(&self, theta: &Theta) -> f64 {
        self.delta().powf(-theta.p())
    }
}

/// Scalar normaliser of the score vector in a given regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    /// `√𝒯_n`.
    SqrtHorizon,
    /// `v_n = √n Δ^p`.
    SqrtNDeltaP,
    /// `√n`.
    SqrtN,
}

impl Normalizer {
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::Supercritical => Normalizer::SqrtHorizon,
            Regime::Subcritical => Normalizer::SqrtNDeltaP,
            Regime::FbmDominated => Normalizer::SqrtN,
        }
    }

    pub fn value(self, theta: &Theta, scheme: &SamplingScheme) -> f64 {
        let n = scheme.n as f64;
        match self {
            Normalizer::SqrtHorizon => scheme.horizon().sqrt(),
            Normalizer::SqrtNDeltaP => n.sqrt() * scheme.delta().powf(theta.p()),
            Normalizer::SqrtN => n.sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let th = Theta::new(1.0, 0.8).unwrap();
        let s = SamplingScheme::new(256, 0.3).unwrap();
        let d = 256f64.powf(-0.3);
        assert!((s.delta() - d).abs() < 1e-15);
        assert!((s.gamma(&th) - d.powf(0.6)).abs() < 1e-15);
        assert!((s.horizon() - 256f64.powf(0.7)).abs() < 1e-10);
        assert!((s.log_inv_delta() + d.ln()).abs() < 1e-12);
    }

    #[test]
    fn gamma_times_eps_is_sigma_squared() {
        let th = Theta::new(2.0, 0.3).unwrap();
        let s = SamplingScheme::new(256, 0.5).unwrap();
        assert!((s.gamma(&th) * s.eps(&th) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(Theta::new(0.0, 0.8).is_err());
        assert!(Theta::new(-1.0, 0.8).is_err());
        assert!(Theta::new(1.0, 1.2).is_err());
        assert!(SamplingScheme::new(1, 0.3).is_err());
        assert!(SamplingScheme::new(10, 1.0).is_err());
    }
}
