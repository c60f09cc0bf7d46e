use mfbm_core::experiments::{pairwise_sum, sample_covariance};
use mfbm_core::params::{SamplingScheme, Theta};
use mfbm_core::scores::{log_lik, log_lik_batch, rate_matrices, scores, RateVariant};
use mfbm_core::simulate::{whiten, PathSampler};
use mfbm_core::spectral::{autocov, density, HurstIndex};
use mfbm_core::toeplitz::CovModel;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn autocovariance_is_a_correlation(h in 0.02f64..0.98, k in 1i64..500) {
        let hi = HurstIndex::new(h).unwrap();
        prop_assert!((autocov(hi, 0) - 1.0).abs() < 1e-14);
        prop_assert!(autocov(hi, k).abs() <= 1.0);
        prop_assert_eq!(autocov(hi, k), autocov(hi, -k));
    }

    #[test]
    fn density_is_even_and_positive(h in 0.05f64..0.95, l in 1e-4f64..3.1) {
        let hi = HurstIndex::new(h).unwrap();
        let f = density(hi, l).unwrap();
        prop_assert!(f > 0.0);
        prop_assert_eq!(f, density(hi, -l).unwrap());
    }

    #[test]
    fn score_identities_hold(
        h in prop_oneof![0.2f64..0.45, 0.55f64..0.7, 0.78f64..0.95],
        sigma in 0.3f64..3.0,
        alpha in 0.1f64..0.9,
        n in 16usize..80,
        seed in any::<u64>(),
    ) {
        let th = Theta::new(sigma, h).unwrap();
        let sc = SamplingScheme::new(n, alpha).unwrap();
        let model = CovModel::new(&th, &sc).unwrap();
        let x = PathSampler::new(&th, &sc).unwrap().draw(seed, 0).x;
        let e = scores(&model, &x).unwrap();
        let tol = 1e-10 * (e.s_h.abs() + 1.0);
        prop_assert!((e.s_h - sigma * sc.delta().ln() * e.s_sigma - e.r_h).abs() < tol);
        prop_assert!((e.r_h_perp + 0.5 * sigma * e.a_n * e.s_sigma - e.r_h).abs() < tol);
    }

    #[test]
    fn whitened_norm_is_the_likelihood_quadratic(
        h in 0.55f64..0.95,
        n in 8usize..64,
        seed in any::<u64>(),
    ) {
        let th = Theta::new(1.0, h).unwrap();
        let sc = SamplingScheme::new(n, 0.5).unwrap();
        let model = CovModel::new(&th, &sc).unwrap();
        let path = PathSampler::new(&th, &sc).unwrap().draw(seed, 3);
        let z = whiten(&model, &path).unwrap();
        let q: f64 = z.iter().map(|v| v * v).sum();
        let nf = n as f64;
        let ll = -0.5 * nf * (2.0 * std::f64::consts::PI).ln()
            - 0.5 * (nf * sc.delta().ln() + model.logdet_a())
            - 0.5 * q;
        let got = log_lik(&model, &path.x).unwrap();
        prop_assert!((got - ll).abs() < 1e-10 * ll.abs().max(1.0));
        let batch = log_lik_batch(&model, std::slice::from_ref(&path.x)).unwrap();
        prop_assert!((batch[0] - got).abs() < 1e-9 * got.abs().max(1.0));
    }

    #[test]
    fn rate_matrices_are_unit_lower_triangular(h in 0.76f64..0.99, sigma in 0.2f64..4.0, n in 16usize..64) {
        let th = Theta::new(sigma, h).unwrap();
        let model = CovModel::new(&th, &SamplingScheme::new(n, 0.3).unwrap()).unwrap();
        for v in [RateVariant::Empirical, RateVariant::Deterministic] {
            let r = rate_matrices(&model, v).unwrap();
            for m in [r.m1, r.m2, r.m] {
                prop_assert_eq!(m[0][0], 1.0);
                prop_assert_eq!(m[1][1], 1.0);
                prop_assert_eq!(m[0][1], 0.0);
            }
            prop_assert_eq!(r.apply([0.0, 0.0]), [0.0, 0.0]);
        }
    }

    #[test]
    fn sample_covariance_is_psd(pts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..200)) {
        let pts: Vec<[f64; 2]> = pts.into_iter().map(|(a, b)| [a, b]).collect();
        let (_, c) = sample_covariance(&pts);
        prop_assert!(c[0][0] >= 0.0 && c[1][1] >= 0.0);
        prop_assert_eq!(c[0][1], c[1][0]);
        let det = c[0][0] * c[1][1] - c[0][1] * c[0][1];
        prop_assert!(det >= -1e-9 * (c[0][0] * c[1][1]).max(1.0));
    }

    #[test]
    fn pairwise_sum_is_close_to_naive(xs in prop::collection::vec(-1e6f64..1e6, 0..500)) {
        let naive: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-12 * scale);
    }

    #[test]
    fn hurst_outside_unit_interval_is_rejected(h in prop_oneof![-5.0f64..=0.0, 1.0f64..5.0]) {
        prop_assert!(HurstIndex::new(h).is_err());
    }
}
