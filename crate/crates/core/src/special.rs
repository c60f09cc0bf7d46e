//! Gamma-family special functions.
//!
//! `gamma` and `ln_gamma` are delegated to `statrs`. Digamma and trigamma use
//! upward recurrence until the argument exceeds [`ASYMPTOTIC_FROM`], then the
//! Bernoulli-number asymptotic series; negative arguments go through the
//! reflection formulas.

use std::f64::consts::PI;

pub use statrs::function::gamma::{gamma, ln_gamma};

const ASYMPTOTIC_FROM: f64 = 10.0;

/// Digamma function psi(x) = d/dx ln Gamma(x).
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || (x <= 0.0 && x == x.floor()) {
        return f64::NAN;
    }
    if x < 0.0 {
        // psi(1 - x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_FROM {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + z.ln() - 0.5 * inv - series
}

/// Trigamma function psi_1(x) = d^2/dx^2 ln Gamma(x).
pub fn trigamma(x: f64) -> f64 {
    if x.is_nan() || (x <= 0.0 && x == x.floor()) {
        return f64::NAN;
    }
    if x < 0.0 {
        // psi_1(1 - x) + psi_1(x) = pi^2 / sin^2(pi x)
        let s = (PI * x).sin();
        return PI * PI / (s * s) - trigamma(1.0 - x);
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_FROM {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        + 0.5 * inv2
        + inv
            * inv2
            * (1.0 / 6.0
                - inv2
                    * (1.0 / 30.0
                        - inv2
                            * (1.0 / 42.0
                                - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * 691.0 / 2730.0)))));
    acc + series
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn digamma_known_values() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
        // psi(n+1) = H_n - gamma
        let h5 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25 + 0.2;
        assert!((digamma(6.0) - (h5 - EULER_GAMMA)).abs() < 1e-14);
        assert!((digamma(40.5) - digamma(39.5) - 1.0 / 39.5).abs() < 1e-14);
    }

    #[test]
    fn trigamma_known_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-13);
        assert!((trigamma(2.0) - (PI * PI / 6.0 - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn reflection_branches() {
        let x = -0.3;
        assert!((digamma(x) - (digamma(1.0 - x) - PI / (PI * x).tan())).abs() < 1e-12);
        let s = (PI * x).sin();
        assert!((trigamma(x) + trigamma(1.0 - x) - PI * PI / (s * s)).abs() < 1e-10);
        assert!(digamma(-2.0).is_nan());
    }

    #[test]
    fn derivatives_match_finite_differences_of_ln_gamma() {
        for &x in &[0.3, 0.8, 1.6667, 2.6, 7.25] {
            let h = 1e-5;
            let fd1 = (ln_gamma(x + h) - ln_gamma(x - h)) / (2.0 * h);
            assert!((digamma(x) - fd1).abs() < 1e-8, "digamma({x})");
            let fd2 = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
            assert!((trigamma(x) - fd2).abs() < 1e-7 * trigamma(x).max(1.0), "trigamma({x})");
        }
    }
}
