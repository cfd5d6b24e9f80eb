use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use super::config::FileConfig;
use super::output::CheckOutcome;
use super::{resolve_common, with_pool, CliError, CliResult, CommonArgs, Finished, Format, EXIT_OK};
use crate::concurrence::concurrence_derivative;
use crate::critical::{a1_constant, concurrence_log_constant};
use crate::entanglement::entropy_derivative;
use crate::model::{ModelPoint, LAMBDA_C};
use crate::scaling::{
    default_tol, fit_log_in_lambda, fit_log_in_n, fit_power_law, locate_lambda_m_with, LambdaMResult, ScalingFit,
};

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Ring sizes for the pseudo-critical drift.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Ring sizes for the ln N growth at λ = 1 and at λ_m.
    #[arg(long, value_delimiter = ',')]
    pub critical_sizes: Option<Vec<usize>>,
    /// Exponents k of the thermodynamic samples at |λ − 1| = 10^{−k}.
    #[arg(long, value_delimiter = ',')]
    pub a2_exponents: Option<Vec<f64>>,
    /// Which side of λ = 1 the thermodynamic samples lie on.
    #[arg(long, value_enum)]
    pub side: Option<Side>,
    /// Golden-section bracket width for λ_m (default 1e-3·N^{-3/2} per size).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingConfig {
    pub sizes: Vec<usize>,
    pub critical_sizes: Vec<usize>,
    pub a2_exponents: Vec<f64>,
    pub side: Side,
    pub tol: Option<f64>,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalSample {
    pub n: usize,
    pub d_ev: f64,
    pub d_conc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub a1_constant: f64,
    pub concurrence_log_constant: f64,
    pub lambda_m: Vec<LambdaMResult>,
    /// `1 − λ_m` against N.
    pub drift_fit: Option<ScalingFit>,
    pub critical_samples: Vec<CriticalSample>,
    /// dE_v/dλ at λ = 1 against ln N.
    pub a1_fit_at_lambda_c: Option<ScalingFit>,
    /// dE_v/dλ at λ_m against ln N.
    pub a1_fit_at_lambda_m: Option<ScalingFit>,
    /// dC/dλ at λ = 1 against ln N.
    pub concurrence_fit: Option<ScalingFit>,
    pub a2_below: Option<ScalingFit>,
    pub a2_above: Option<ScalingFit>,
}

pub fn resolve(args: &ScalingArgs) -> CliResult<(ScalingConfig, super::Resolved)> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &file, Format::Json)?;
    if common.format != Format::Json {
        return Err(CliError::invalid("scaling writes JSON only"));
    }
    let f = &file.scaling;
    let side = match (&args.side, &f.side) {
        (Some(s), _) => *s,
        (None, Some(s)) => Side::from_str(s, true).map_err(|_| CliError::invalid(format!("unknown side {s:?}")))?,
        (None, None) => Side::Both,
    };
    let cfg = ScalingConfig {
        sizes: args
            .sizes
            .clone()
            .or_else(|| f.sizes.clone())
            .unwrap_or_else(|| vec![50, 100, 200, 400, 800, 1600, 3200]),
        critical_sizes: args
            .critical_sizes
            .clone()
            .or_else(|| f.critical_sizes.clone())
            .unwrap_or_else(|| vec![1_000, 10_000, 100_000, 1_000_000]),
        a2_exponents: args
            .a2_exponents
            .clone()
            .or_else(|| f.a2_exponents.clone())
            .unwrap_or_else(|| vec![2.0, 2.5, 3.0, 3.5, 4.0]),
        side,
        tol: args.tol.or(f.tol),
        workers: common.workers,
    };
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(CliError::invalid("--tol must be positive"));
        }
    }
    if cfg.a2_exponents.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
        return Err(CliError::invalid("--a2-exponents must be positive"));
    }
    Ok((cfg, common))
}

fn a2_fit(exponents: &[f64], sign: f64) -> crate::Result<Option<ScalingFit>> {
    if exponents.is_empty() {
        return Ok(None);
    }
    let samples = exponents
        .par_iter()
        .map(|&k| {
            let lambda = LAMBDA_C + sign * 10f64.powf(-k);
            Ok((lambda, entropy_derivative(&ModelPoint::thermodynamic(lambda)?)?))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    fit_log_in_lambda(&samples, LAMBDA_C).map(Some)
}

fn optional_fit(points: &[(f64, f64)], f: fn(&[(f64, f64)]) -> crate::Result<ScalingFit>) -> crate::Result<Option<ScalingFit>> {
    if points.is_empty() {
        Ok(None)
    } else {
        f(points).map(Some)
    }
}

pub fn compute(cfg: &ScalingConfig) -> CliResult<ScalingReport> {
    let report = with_pool(cfg.workers, || -> crate::Result<ScalingReport> {
        let lambda_m = cfg
            .sizes
            .par_iter()
            .map(|&n| locate_lambda_m_with(n, cfg.tol.unwrap_or_else(|| default_tol(n))))
            .collect::<crate::Result<Vec<_>>>()?;
        let drift: Vec<(f64, f64)> = lambda_m.iter().map(|r| (r.n as f64, LAMBDA_C - r.lambda_m)).collect();

        let critical_samples = cfg
            .critical_sizes
            .par_iter()
            .map(|&n| {
                let p = ModelPoint::finite(LAMBDA_C, n)?;
                Ok(CriticalSample {
                    n,
                    d_ev: entropy_derivative(&p)?,
                    d_conc: concurrence_derivative(&p)?,
                })
            })
            .collect::<crate::Result<Vec<_>>>()?;
        let at_c: Vec<(f64, f64)> = critical_samples.iter().map(|s| (s.n as f64, s.d_ev)).collect();
        let conc: Vec<(f64, f64)> = critical_samples.iter().map(|s| (s.n as f64, s.d_conc)).collect();
        let at_m = cfg
            .critical_sizes
            .par_iter()
            .map(|&n| {
                let r = locate_lambda_m_with(n, cfg.tol.unwrap_or_else(|| default_tol(n)))?;
                Ok((n as f64, r.derivative_at_max))
            })
            .collect::<crate::Result<Vec<_>>>()?;

        let below = matches!(cfg.side, Side::Below | Side::Both);
        let above = matches!(cfg.side, Side::Above | Side::Both);
        Ok(ScalingReport {
            a1_constant: a1_constant(),
            concurrence_log_constant: concurrence_log_constant(),
            drift_fit: optional_fit(&drift, fit_power_law)?,
            lambda_m,
            a1_fit_at_lambda_c: optional_fit(&at_c, fit_log_in_n)?,
            a1_fit_at_lambda_m: optional_fit(&at_m, fit_log_in_n)?,
            concurrence_fit: optional_fit(&conc, fit_log_in_n)?,
            critical_samples,
            a2_below: if below { a2_fit(&cfg.a2_exponents, -1.0)? } else { None },
            a2_above: if above { a2_fit(&cfg.a2_exponents, 1.0)? } else { None },
        })
    })?;
    Ok(report?)
}

/// Comparisons of the fitted laws with their expected values; informational only.
pub fn checks(r: &ScalingReport) -> Vec<CheckOutcome> {
    let a1 = r.a1_constant;
    let mut out = Vec::new();
    if let Some(f) = &r.drift_fit {
        out.push(CheckOutcome::new(
            "drift exponent in [-1.6, -1.4], r² > 0.999",
            (f.exponent() + 1.5).abs() <= 0.1 && f.r_squared > 0.999,
            format!("exponent {:.6}, r² {:.6}", f.exponent(), f.r_squared),
        ));
    }
    if let Some(f) = &r.a1_fit_at_lambda_c {
        let rel = (f.slope - a1).abs() / a1;
        out.push(CheckOutcome::new(
            "ln N slope at λ = 1 within 1% of A1",
            rel <= 0.01,
            format!("slope {:.8}, A1 {:.8}, relative deviation {:.2e}", f.slope, a1, rel),
        ));
    }
    if let Some(f) = &r.a1_fit_at_lambda_m {
        let rel = (f.slope - a1).abs() / a1;
        out.push(CheckOutcome::new(
            "ln N slope at λ_m within 5% of A1",
            rel <= 0.05,
            format!("slope {:.8}, A1 {:.8}, relative deviation {:.2e}", f.slope, a1, rel),
        ));
    }
    if let Some(f) = &r.concurrence_fit {
        let c = r.concurrence_log_constant;
        let rel = (f.slope.abs() - c).abs() / c;
        out.push(CheckOutcome::new(
            "|dC/dλ| ln N slope within 2% of 8/(3π²)",
            rel <= 0.02,
            format!("slope {:.8}, constant {:.8}, relative deviation {:.2e}", f.slope, c, rel),
        ));
    }
    // ln|λ − 1| decreases as λ → 1, so a positive divergence has a negative slope
    if let Some(f) = &r.a2_below {
        let rel = (f.slope.abs() - a1).abs() / a1;
        out.push(CheckOutcome::new(
            "|A2| below λ = 1 within 5% of A1",
            rel <= 0.05,
            format!("slope {:.8}, relative deviation {:.2e}", f.slope, rel),
        ));
    }
    if let (Some(b), Some(a)) = (&r.a2_below, &r.a2_above) {
        let rel = (a.slope - b.slope).abs() / b.slope.abs();
        out.push(CheckOutcome::new(
            "A2 above λ = 1 within 10% of A2 below",
            rel <= 0.10,
            format!("above {:.8}, below {:.8}, relative difference {:.2e}", a.slope, b.slope, rel),
        ));
    }
    out
}

pub(crate) fn run(args: &ScalingArgs) -> CliResult<Finished> {
    let (cfg, common) = resolve(args)?;
    let report = compute(&cfg)?;
    let checks = checks(&report);
    let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    Ok(Finished {
        command: "scaling",
        config: serde_json::json!({ "scaling": cfg, "common": common }),
        out: common.out,
        body,
        extra: Vec::new(),
        checks,
        code: EXIT_OK,
        failure: None,
    })
}
