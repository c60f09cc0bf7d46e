//! The acceptance suite: nine criteria, each reduced to a pass/fail verdict
//! with the numbers that decided it.

use serde::Serialize;

use crate::constants::{j_constants, j_constants_oracle, limit_information, AmplitudeConvention};
use crate::error::Result;
use crate::experiments::{
    default_h_grid, degeneracy_report, lan_study, mc_clt, opf_decay, trace_convergence, ConvergenceTable,
};
use crate::oracle::DenseModel;
use crate::params::{SamplingScheme, Theta};
use crate::scores::{local_parameter, log_lik, rate_matrices, scores, RateVariant};
use crate::simulate::PathSampler;
use crate::spectral::{autocov, fourier_coefficient, HurstIndex};
use crate::toeplitz::{CovModel, Which};

/// Sweep used by the trace and degeneracy criteria.
pub const TRACE_SWEEP: [usize; 5] = [256, 512, 1024, 2048, 4096];
/// Sweep used by the LAN criterion.
pub const LAN_SWEEP: [usize; 3] = [512, 1024, 2048];
pub const MC_N: usize = 4096;
pub const MC_ALPHA: f64 = 0.3;
pub const MC_REPLICATIONS: usize = 2000;
/// Sampling exponent for the subcritical and fGn-dominated runs.
pub const OTHER_REGIME_ALPHA: f64 = 0.9;
/// Supercritical centre used for the LAN sweep, so that `H ± 1/√𝒯` stays in `(3/4, 1)`.
pub const LAN_HURST: f64 = 0.875;
pub const LAN_REPLICATIONS: usize = 500;
pub const SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Verdict { id, name, passed, detail }
    }

    fn errored(id: u8, name: &'static str, e: crate::Error) -> Self {
        Verdict { id, name, passed: false, detail: format!("error: {e}") }
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {} {}: {} ({})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn wrap(id: u8, name: &'static str, f: impl FnOnce() -> Result<Verdict>) -> Verdict {
    f().unwrap_or_else(|e| Verdict::errored(id, name, e))
}

fn theta_08() -> Theta {
    Theta::new(1.0, 0.8).expect("valid parameter")
}

pub fn closed_form_constants() -> Verdict {
    const NAME: &str = "closed-form constants";
    wrap(1, NAME, || {
        let th = theta_08();
        let k = j_constants(&th)?;
        let info = limit_information(&th)?.matrix;
        let ok = (k.j0 - 0.2820).abs() <= 5e-4
            && (k.jperp - 34.1772).abs() <= 0.02
            && rel(info[0][0], 0.0897) <= 0.01
            && rel(info[1][1], 2.7197) <= 0.01;
        Ok(Verdict::new(
            1,
            NAME,
            ok,
            format!("J0={:.5} Jperp={:.4} I11={:.5} I22={:.5}", k.j0, k.jperp, info[0][0], info[1][1]),
        ))
    })
}

pub fn oracle_equivalence() -> Verdict {
    const NAME: &str = "closed form vs quadrature oracle";
    wrap(2, NAME, || {
        let mut worst = 0.0_f64;
        for h in [0.78, 0.80, 0.85, 0.90] {
            for s in [0.5, 1.0, 2.0] {
                let th = Theta::new(s, h)?;
                let a = j_constants(&th)?;
                let b = j_constants_oracle(&th)?;
                for (x, y) in [(a.j0, b.j0), (a.j1, b.j1), (a.j2, b.j2)] {
                    worst = worst.max(rel(x, y));
                }
            }
        }
        Ok(Verdict::new(2, NAME, worst <= 1e-6, format!("max relative difference {worst:.2e}")))
    })
}

pub fn spectral_roundtrip() -> Verdict {
    const NAME: &str = "spectral roundtrip";
    wrap(3, NAME, || {
        let mut worst = 0.0_f64;
        for h in [0.6, 0.8] {
            let hi = HurstIndex::new(h)?;
            for k in 0..=20 {
                worst = worst.max((fourier_coefficient(hi, k)? - autocov(hi, k)).abs());
            }
        }
        let norm = (fourier_coefficient(HurstIndex::new(0.8)?, 0)? - 1.0).abs();
        Ok(Verdict::new(
            3,
            NAME,
            worst <= 1e-7 && norm <= 1e-7,
            format!("max |inverse - rho| {worst:.2e}, |rho(0) - 1| {norm:.2e}"),
        ))
    })
}

pub fn exact_identities() -> Verdict {
    const NAME: &str = "exact identities";
    wrap(4, NAME, || {
        let th = theta_08();
        let mut parts = Vec::new();
        let mut ok = true;

        // Decomposition and projection on fresh paths, plus the dense score oracle.
        let sc = SamplingScheme::new(128, 0.3)?;
        let model = CovModel::new(&th, &sc)?;
        let dense = DenseModel::new(&th, &sc)?;
        let sampler = PathSampler::new(&th, &sc)?;
        let (mut decomp, mut proj, mut score_rel, mut sandwich) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
        let c = dense.c();
        for rep in 0..5 {
            let x = sampler.draw(SEED, rep).x;
            let e = scores(&model, &x)?;
            let l = sc.delta().ln();
            decomp = decomp.max((e.s_h - th.sigma * l * e.s_sigma - e.r_h).abs() / (e.s_h.abs() + 1.0));
            proj = proj.max((e.r_h_perp + 0.5 * th.sigma * e.a_n * e.s_sigma - e.r_h).abs() / (e.s_h.abs() + 1.0));
            let [os, oh] = dense.scores(&x);
            score_rel = score_rel.max(rel(e.s_sigma, os)).max(rel(e.s_h, oh));
            let u: Vec<f64> = x.iter().map(|v| v / sc.delta().sqrt()).collect();
            let z = dense.whiten(&x);
            sandwich = sandwich.max(rel(model.quad_form(Which::C, &u)?, DenseModel::quad(&c, &z)));
        }
        ok &= decomp <= 1e-10 && proj <= 1e-10 && score_rel <= 1e-8 && sandwich <= 1e-10;
        parts.push(format!(
            "decomposition {decomp:.1e}, projection {proj:.1e}, scores vs dense {score_rel:.1e}, sandwich (n=128) {sandwich:.1e}"
        ));

        let d = dense.d();
        let a_n = model.traces().a_n;
        let dperp = faer::Mat::from_fn(128, 128, |i, j| d[(i, j)] - a_n * c[(i, j)]);
        let tr_cdperp = DenseModel::trace_product(&c, &dperp).abs() / DenseModel::trace_product(&c, &c);
        ok &= tr_cdperp <= 1e-10;
        parts.push(format!("tr(C Dperp)/tr(C^2) {tr_cdperp:.1e}"));

        // Likelihood-ratio identity at n = 256.
        let sc = SamplingScheme::new(256, 0.3)?;
        let model = CovModel::new(&th, &sc)?;
        let dense = DenseModel::new(&th, &sc)?;
        let rates = rate_matrices(&model, RateVariant::Empirical)?;
        let x = PathSampler::new(&th, &sc)?.draw(SEED, 0).x;
        let mut llr = 0.0_f64;
        for h in [[1.0, 0.0], [0.0, 0.5], [-0.5, -0.3]] {
            let th_h = local_parameter(&model, &rates, h)?;
            let exact = log_lik(&CovModel::new(&th_h, &sc)?, &x)? - log_lik(&model, &x)?;
            let via_s = dense.llr_s(&DenseModel::new(&th_h, &sc)?, &x)?;
            llr = llr.max((exact - via_s).abs() / (1.0 + exact.abs()));
        }
        ok &= llr <= 1e-8;
        parts.push(format!("LLR-S (n=256) {llr:.1e}"));
        Ok(Verdict::new(4, NAME, ok, parts.join("; ")))
    })
}

/// Trace sweep at `(H, σ, α) = (0.8, 1, 0.3)`.
pub fn trace_table() -> Result<ConvergenceTable> {
    trace_convergence(&theta_08(), MC_ALPHA, &TRACE_SWEEP)
}

pub fn trace_asymptotics(table: &Result<ConvergenceTable>) -> Verdict {
    const NAME: &str = "trace asymptotics";
    let table = match table {
        Ok(t) => t,
        Err(e) => return Verdict::errored(5, NAME, e.clone()),
    };
    let col = |f: &dyn Fn(&crate::experiments::ConvergenceRow) -> f64| table.rows.iter().map(f).collect::<Vec<_>>();
    let gaps = [
        ("C2", col(&|r| r.rel_gap.c2)),
        ("CD", col(&|r| r.rel_gap.cd)),
        ("D2", col(&|r| r.rel_gap.d2)),
    ];
    let mono: Vec<String> = gaps.iter().map(|(k, g)| format!("{k}:{}", if decreasing(g) { "ok" } else { "not monotone" })).collect();
    let last = table.rows.last().expect("non-empty sweep");
    let jperp = table.jperp.expect("supercritical");
    let m = table.m.expect("supercritical");
    let jr = last.jperp_ratio.expect("supercritical");
    let ok_j = rel(jr, jperp) <= 0.10;
    let ok_m = rel(last.a_n_shift, m) <= 0.10;
    let ok = gaps.iter().all(|(_, g)| decreasing(g)) && ok_j && ok_m;
    Verdict::new(
        5,
        NAME,
        ok,
        format!(
            "gaps {} ({}); Jperp ratio {jr:.3} vs {jperp:.4}; a_n - 2L {:.3} vs m {m:.4}",
            mono.join(" "),
            gaps.iter()
                .map(|(k, g)| format!("{k}=[{}]", g.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(",")))
                .collect::<Vec<_>>()
                .join(" "),
            last.a_n_shift
        ),
    )
}

pub fn monte_carlo_clt() -> Verdict {
    const NAME: &str = "Monte Carlo CLT";
    wrap(6, NAME, || {
        let th = theta_08();
        let sc = SamplingScheme::new(MC_N, MC_ALPHA)?;
        let rep = mc_clt(&th, &sc, MC_REPLICATIONS, SEED)?;
        let target = [0.0897, 2.7197];
        let r0 = rel(rep.sample_cov[0][0], target[0]);
        let r1 = rel(rep.sample_cov[1][1], target[1]);
        let ok = r0 <= 0.15 && r1 <= 0.15 && rep.correlation.abs() < 0.1 && rep.ks[0] < 0.05 && rep.ks[1] < 0.05;
        Ok(Verdict::new(
            6,
            NAME,
            ok,
            format!(
                "var ({:.4}, {:.4}) vs (0.0897, 2.7197), rel ({r0:.3}, {r1:.3}); corr {:.4}; KS ({:.4}, {:.4}); exact finite-n var ({:.4}, {:.4})",
                rep.sample_cov[0][0],
                rep.sample_cov[1][1],
                rep.correlation,
                rep.ks[0],
                rep.ks[1],
                rep.finite_n_cov[0][0],
                rep.finite_n_cov[1][1]
            ),
        ))
    })
}

pub fn degeneracy(table: &Result<ConvergenceTable>) -> Verdict {
    const NAME: &str = "degeneracy without projection";
    wrap(7, NAME, || {
        let table = table.as_ref().map_err(|e| e.clone())?;
        let th = theta_08();
        let sc = SamplingScheme::new(MC_N, MC_ALPHA)?;
        let rep = degeneracy_report(&th, &sc, MC_REPLICATIONS, SEED)?;
        let det: Vec<f64> = table.rows.iter().map(|r| r.deterministic_correlation).collect();
        let ok = rep.sample_correlation > 0.95 && increasing(&det);
        Ok(Verdict::new(
            7,
            NAME,
            ok,
            format!(
                "sample corr(U) {:.4}; deterministic corr along n [{}]; projected corr {:.4}",
                rep.sample_correlation,
                det.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(","),
                rep.projected_correlation
            ),
        ))
    })
}

pub fn other_regimes() -> Verdict {
    const NAME: &str = "other regimes";
    wrap(8, NAME, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for h in [0.6, 0.3] {
            let th = Theta::new(1.0, h)?;
            let sc = SamplingScheme::new(MC_N, OTHER_REGIME_ALPHA)?;
            let rep = mc_clt(&th, &sc, MC_REPLICATIONS, SEED)?;
            let mut worst = 0.0_f64;
            for i in 0..2 {
                for j in 0..2 {
                    worst = worst.max(rel(rep.sample_cov[i][j], rep.target[i][j]));
                }
            }
            ok &= worst <= 0.15;
            parts.push(format!(
                "H={h}: cov [{:.3},{:.3},{:.3}] vs target [{:.3},{:.3},{:.3}], worst rel {worst:.3}",
                rep.sample_cov[0][0],
                rep.sample_cov[0][1],
                rep.sample_cov[1][1],
                rep.target[0][0],
                rep.target[0][1],
                rep.target[1][1]
            ));
        }
        let th = Theta::new(1.0, 0.6)?;
        let t = opf_decay(&th, OTHER_REGIME_ALPHA, &TRACE_SWEEP)?;
        let slope = t.opf_slope.expect("sweep of several sizes")[0];
        let want = th.p() - 0.5;
        ok &= (slope - want).abs() <= 0.1;
        parts.push(format!("op/F slope (H=0.6) {slope:.3} vs {want:.3}"));
        Ok(Verdict::new(8, NAME, ok, parts.join("; ")))
    })
}

pub fn lan_expansion() -> Verdict {
    const NAME: &str = "LAN expansion";
    wrap(9, NAME, || {
        let th = Theta::new(1.0, LAN_HURST)?;
        let grid = default_h_grid();
        let st = lan_study(
            &th,
            MC_ALPHA,
            &LAN_SWEEP,
            &grid,
            LAN_REPLICATIONS,
            SEED,
            AmplitudeConvention::DensityConsistent,
        )?;
        let mut ok = true;
        let mut parts = Vec::new();
        for h in grid {
            let g = st.mean_abs_gaps(h);
            ok &= decreasing(&g);
            parts.push(format!(
                "h=({:.3},{:.3}) [{}]",
                h[0],
                h[1],
                g.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(",")
            ));
        }
        Ok(Verdict::new(9, NAME, ok, parts.join("; ")))
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<Verdict> {
    let table = trace_table();
    vec![
        closed_form_constants(),
        oracle_equivalence(),
        spectral_roundtrip(),
        exact_identities(),
        trace_asymptotics(&table),
        monte_carlo_clt(),
        degeneracy(&table),
        other_regimes(),
        lan_expansion(),
    ]
}

