//! One function per subcommand, each producing a [`Report`].

use std::f64::consts::PI;
use std::path::Path;

use mfbm_core::acceptance::run_all;
use mfbm_core::constants::{
    j_constants_with, limit_information_with, spectral_square_integrals, t_constants, AmplitudeConvention,
};
use mfbm_core::experiments::{degeneracy_report, finite_n_covariance, mc_clt, opf_decay, trace_convergence};
use mfbm_core::params::{SamplingScheme, Theta};
use mfbm_core::scores::{lan_check, log_lik, rate_matrices, scores, RateVariant};
use mfbm_core::simulate::PathSampler;
use mfbm_core::spectral::{autocov, autocov_dh, fh_constants, fourier_coefficient, Regime};
use mfbm_core::toeplitz::CovModel;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig, Settings};
use crate::output::{object, to_value, Report};
use crate::CliError;

fn theta(cfg: &RunConfig) -> Result<Theta, CliError> {
    Ok(Theta::new(cfg.sigma(), cfg.hurst()?)?)
}

fn scheme(cfg: &RunConfig) -> Result<SamplingScheme, CliError> {
    Ok(SamplingScheme::new(cfg.n()?, cfg.alpha())?)
}

fn announce_seed(seed: u64) {
    eprintln!("seed: {seed}");
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Constants => constants(cfg),
        Command::Spectral => spectral(cfg),
        Command::Simulate => simulate(cfg),
        Command::Score => score(cfg),
        Command::Trace => trace(cfg),
        Command::TraceSweep => {
            let t = trace_convergence(&theta(cfg)?, cfg.alpha(), &cfg.n_list()?)?;
            Report::new(&t)?.with_table(&t.rows)
        }
        Command::OpfSweep => {
            let t = opf_decay(&theta(cfg)?, cfg.alpha(), &cfg.n_list()?)?;
            Report::new(&t)?.with_table(&t.rows)
        }
        Command::Mc => mc(cfg),
        Command::Degeneracy => {
            announce_seed(cfg.seed());
            Report::new(&degeneracy_report(&theta(cfg)?, &scheme(cfg)?, cfg.replications(), cfg.seed())?)
        }
        Command::LanCheck => lan(cfg),
        Command::Accept => accept(),
    }
}

fn constants(cfg: &RunConfig) -> Result<Report, CliError> {
    let th = theta(cfg)?;
    let conv: AmplitudeConvention = cfg.convention().into();
    let regime = th.regime()?;
    let info = limit_information_with(&th, conv)?;
    let regime_constants = match regime {
        Regime::Supercritical => to_value(&j_constants_with(&th, conv)?)?,
        Regime::Subcritical => {
            let [ff, fd, dd] = spectral_square_integrals(th.hurst)?;
            json!({ "int_f2": ff, "int_f_fdot": fd, "int_fdot2": dd })
        }
        Regime::FbmDominated => {
            let (t1, t2) = t_constants(th.hurst)?;
            json!({ "t1": t1, "t2": t2 })
        }
    };
    let mut pairs = vec![
        ("regime", to_value(&regime)?),
        ("spectral", to_value(&fh_constants(th.hurst))?),
        ("constants", regime_constants),
        ("limit_information", to_value(&info)?),
    ];
    if regime == Regime::Supercritical {
        let k = j_constants_with(&th, conv)?;
        pairs.push(("j0", json!(k.j0)));
        pairs.push(("jperp", json!(k.jperp)));
    }
    Report::new(&object(pairs))
}

fn spectral(cfg: &RunConfig) -> Result<Report, CliError> {
    let h = mfbm_core::HurstIndex::new(cfg.hurst()?)?;
    let k_max = cfg.settings.k_max.unwrap_or(20);
    if k_max < 0 {
        return Err(CliError::Config(format!("--k-max must be non-negative, got {k_max}")));
    }
    let rows = (0..=k_max)
        .map(|k| {
            let rho = autocov(h, k);
            let inv = fourier_coefficient(h, k)?;
            Ok(json!({ "k": k, "autocov": rho, "autocov_dh": autocov_dh(h, k), "fourier_inversion": inv, "abs_error": (inv - rho).abs() }))
        })
        .collect::<Result<Vec<Value>, CliError>>()?;
    let summary = json!({ "H": h.value(), "constants": to_value(&fh_constants(h))? });
    Report::new(&summary)?.with_table(&rows)
}

fn simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let (th, sc) = (theta(cfg)?, scheme(cfg)?);
    let seed = cfg.seed();
    announce_seed(seed);
    let rep = cfg.settings.replication.unwrap_or(0);
    let path = PathSampler::new(&th, &sc)?.draw(seed, rep);
    let rows: Vec<Value> = path.x.iter().enumerate().map(|(i, x)| json!({ "index": i, "x": x })).collect();
    let summary = json!({ "n": sc.n, "delta": sc.delta(), "seed": seed, "replication": rep, "x": path.x });
    Report::new(&summary)?.with_table(&rows)
}

/// Reads the `x` column of an increments CSV, skipping `#` lines.
pub fn read_increments(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let headers = rdr.headers().map_err(|e| CliError::Config(e.to_string()))?.clone();
    let col = headers
        .iter()
        .position(|h| h == "x")
        .ok_or_else(|| CliError::Config(format!("{} has no `x` column", path.display())))?;
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| CliError::Config(e.to_string()))?;
            r[col].trim().parse::<f64>().map_err(|e| CliError::Config(format!("bad value `{}`: {e}", &r[col])))
        })
        .collect()
}

/// Model settings from the sidecar JSON written next to an increments CSV.
pub fn read_sidecar(path: &Path) -> Result<Option<Settings>, CliError> {
    let side = path.with_extension("json");
    if !side.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&side).map_err(|e| CliError::Config(format!("{}: {e}", side.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", side.display())))?;
    let cfg = v.get("config").cloned().unwrap_or(v);
    let pick = |k: &str| cfg.get(k).cloned();
    Ok(Some(Settings {
        hurst: pick("H").and_then(|v| v.as_f64()),
        sigma: pick("sigma").and_then(|v| v.as_f64()),
        alpha: pick("alpha").and_then(|v| v.as_f64()),
        n: pick("n").and_then(|v| v.as_u64()).map(|v| v as usize),
        ..Settings::default()
    }))
}

fn score(cfg: &RunConfig) -> Result<Report, CliError> {
    let input = cfg.settings.input.clone().ok_or_else(|| CliError::Config("`score` requires --input".into()))?;
    let x = read_increments(&input)?;
    let merged = match read_sidecar(&input)? {
        Some(side) => RunConfig { command: cfg.command, settings: side.overlay(&cfg.settings) },
        None => cfg.clone(),
    };
    let merged = RunConfig {
        settings: Settings { n: Some(merged.settings.n.unwrap_or(x.len())), ..merged.settings },
        ..merged
    };
    let model = CovModel::new(&theta(&merged)?, &scheme(&merged)?)?;
    let e = scores(&model, &x)?;
    let mut pairs = vec![("log_lik", json!(log_lik(&model, &x)?)), ("scores", to_value(&e)?)];
    if model.theta().regime()? == Regime::Supercritical {
        pairs.push(("rate_matrices", to_value(&rate_matrices(&model, RateVariant::Empirical)?)?));
    }
    Report::new(&object(pairs))
}

fn trace(cfg: &RunConfig) -> Result<Report, CliError> {
    let model = CovModel::new(&theta(cfg)?, &scheme(cfg)?)?;
    let suite = *model.trace_suite();
    let summary = json!({
        "gamma": model.gamma(),
        "delta": model.delta(),
        "traces": to_value(&suite)?,
        "finite_n_covariance": finite_n_covariance(&model)?,
    });
    Report::new(&summary)
}

/// Points on the ellipse `{x : xᵀ Σ⁻¹ x = r²}`.
fn ellipse(cov: &[[f64; 2]; 2], r: f64, steps: usize) -> Vec<[f64; 2]> {
    let a = cov[0][0].max(0.0).sqrt();
    let c = if a > 0.0 { cov[0][1] / a } else { 0.0 };
    let d = (cov[1][1] - c * c).max(0.0).sqrt();
    (0..=steps)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / steps as f64;
            let (u, v) = (r * t.cos(), r * t.sin());
            [a * u, c * u + d * v]
        })
        .collect()
}

fn dat(points: &[[f64; 2]]) -> String {
    points.iter().map(|p| format!("{} {}\n", p[0], p[1])).collect()
}

fn mc(cfg: &RunConfig) -> Result<Report, CliError> {
    let seed = cfg.seed();
    announce_seed(seed);
    let rep = mc_clt(&theta(cfg)?, &scheme(cfg)?, cfg.replications(), seed)?;
    let rows: Vec<Value> = rep.samples.iter().map(|p| json!({ "v1": p[0], "v2": p[1] })).collect();
    let mut ellipses = String::new();
    for (label, cov) in [("target", rep.target), ("sample", rep.sample_cov)] {
        for r in [1.0, 2.0] {
            ellipses += &format!("# {label} covariance, radius {r}\n{}\n\n", dat(&ellipse(&cov, r, 128)));
        }
    }
    Ok(Report::new(&rep)?
        .with_table(&rows)?
        .with_file("mc_scatter.dat", dat(&rep.samples))
        .with_file("mc_ellipses.dat", ellipses))
}

fn lan(cfg: &RunConfig) -> Result<Report, CliError> {
    let (th, sc) = (theta(cfg)?, scheme(cfg)?);
    let h = cfg.h()?;
    let x = match &cfg.settings.input {
        Some(p) => read_increments(p)?,
        None => {
            let seed = cfg.seed();
            announce_seed(seed);
            PathSampler::new(&th, &sc)?.draw(seed, cfg.settings.replication.unwrap_or(0)).x
        }
    };
    let model = CovModel::new(&th, &sc)?;
    let info = limit_information_with(&th, cfg.convention().into())?;
    Report::new(&lan_check(&model, h, &x, &info)?)
}

fn accept() -> Result<Report, CliError> {
    let verdicts = run_all();
    for v in &verdicts {
        eprintln!("{}", v.line());
    }
    let passed = verdicts.iter().filter(|v| v.passed).count();
    let summary = json!({ "passed": passed, "total": verdicts.len() });
    Report::new(&summary)?.with_table(&verdicts)
}
