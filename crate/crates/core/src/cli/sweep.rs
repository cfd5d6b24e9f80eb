use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use super::config::FileConfig;
use super::output::{format_float, CheckOutcome};
use super::{parse_size, resolve_common, with_pool, CliError, CliResult, CommonArgs, Finished, Format, EXIT_OK};
use crate::concurrence::{concurrence, concurrence_derivative};
use crate::correlators::correlators;
use crate::entanglement::{build_rdm, entropy_derivative, rdm_spectrum, von_neumann_entropy};
use crate::error::Error;
use crate::model::{ModelPoint, SystemSize};

pub const CSV_HEADER: &str = "N,lambda,Ev,dEv_dlambda,concurrence,dC_dlambda";

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated ring sizes; `inf` selects the thermodynamic limit.
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    pub sizes: Option<Vec<SystemSize>>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_max: Option<f64>,
    /// Number of λ values, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Quantities to compute; skipped columns are left empty.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub mode: Option<Vec<Mode>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// E_v
    Entropy,
    /// d/dλ of every selected quantity
    Derivative,
    /// C
    Concurrence,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub sizes: Vec<SystemSize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
    pub entropy: bool,
    pub derivative: bool,
    pub concurrence: bool,
    pub out: Option<std::path::PathBuf>,
    pub format: Format,
    pub workers: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.sizes.is_empty() {
            return Err(CliError::invalid("--sizes must name at least one size"));
        }
        if let Some(n) = self.sizes.iter().find_map(|s| s.finite().filter(|&n| n < 3)) {
            return Err(CliError::invalid(format!("ring size {n} is below the minimum of 3")));
        }
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite()) {
            return Err(CliError::invalid("λ bounds must be finite"));
        }
        if !(0.0 <= self.lambda_min && self.lambda_min < self.lambda_max) {
            return Err(CliError::invalid(format!(
                "need 0 ≤ lambda_min < lambda_max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.steps < 2 {
            return Err(CliError::invalid("--steps must be at least 2"));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        let span = self.lambda_max - self.lambda_min;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.lambda_max
                } else {
                    self.lambda_min + span * k as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

/// One output row; `None` marks a quantity the mode flags skipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: f64,
    #[serde(rename = "Ev")]
    pub ev: Option<f64>,
    #[serde(rename = "dEv_dlambda")]
    pub d_ev: Option<f64>,
    pub concurrence: Option<f64>,
    #[serde(rename = "dC_dlambda")]
    pub d_conc: Option<f64>,
}

// A thermodynamic derivative at λ = 1 is infinite rather than a failure: E_v has a
// cusp upwards and C downwards.
fn derivative_or_inf(r: crate::Result<f64>, divergence: f64) -> crate::Result<f64> {
    match r {
        Err(Error::Divergent(_)) => Ok(divergence),
        other => other,
    }
}

fn evaluate(cfg: &SweepConfig, point: &ModelPoint) -> crate::Result<SweepRow> {
    let c = correlators(point)?;
    let ev = if cfg.entropy {
        Some(von_neumann_entropy(&rdm_spectrum(&c)?))
    } else {
        None
    };
    let d_ev = if cfg.entropy && cfg.derivative {
        Some(derivative_or_inf(entropy_derivative(point), f64::INFINITY)?)
    } else {
        None
    };
    let conc = if cfg.concurrence {
        Some(concurrence(&build_rdm(&c)?))
    } else {
        None
    };
    let d_conc = if cfg.concurrence && cfg.derivative {
        Some(derivative_or_inf(concurrence_derivative(point), f64::NEG_INFINITY)?)
    } else {
        None
    };
    Ok(SweepRow {
        n: point.size().as_label(),
        lambda: point.lambda(),
        ev,
        d_ev,
        concurrence: conc,
        d_conc,
    })
}

/// Rows ordered by size (in the order given) and then by λ.
pub fn compute_rows(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    cfg.validate()?;
    let lambdas = cfg.lambdas();
    let points = cfg
        .sizes
        .iter()
        .flat_map(|&size| lambdas.iter().map(move |&l| ModelPoint::new(l, size)))
        .collect::<crate::Result<Vec<_>>>()?;
    with_pool(cfg.workers, || {
        points
            .par_iter()
            .map(|p| {
                evaluate(cfg, p).map_err(|e| CliError {
                    code: super::EXIT_NUMERICAL,
                    message: format!("failed at {p}: {e}"),
                })
            })
            .collect::<CliResult<Vec<_>>>()
    })?
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(rows.len() * 110 + 64);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            format_float(r.lambda),
            opt(r.ev),
            opt(r.d_ev),
            opt(r.concurrence),
            opt(r.d_conc)
        ));
    }
    s
}

pub fn render_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}

pub fn resolve(args: &SweepArgs) -> CliResult<SweepConfig> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &file, Format::Csv)?;
    let sizes = match (&args.sizes, &file.sweep.sizes) {
        (Some(s), _) => s.clone(),
        (None, Some(entries)) => entries.iter().map(|e| e.resolve()).collect::<CliResult<_>>()?,
        (None, None) => vec![SystemSize::Finite(41), SystemSize::Finite(101), SystemSize::Finite(251), SystemSize::Finite(401)],
    };
    let modes: Vec<Mode> = match (&args.mode, &file.sweep.mode) {
        (Some(m), _) => m.clone(),
        (None, Some(names)) => names
            .iter()
            .map(|n| Mode::from_str(n, true).map_err(|_| CliError::invalid(format!("unknown mode {n:?}"))))
            .collect::<CliResult<_>>()?,
        (None, None) => vec![Mode::Entropy, Mode::Derivative, Mode::Concurrence],
    };
    if modes.is_empty() {
        return Err(CliError::invalid("--mode needs at least one quantity"));
    }
    let derivative_only = modes.iter().all(|&m| m == Mode::Derivative);
    Ok(SweepConfig {
        sizes,
        lambda_min: args.lambda_min.or(file.sweep.lambda_min).unwrap_or(0.6),
        lambda_max: args.lambda_max.or(file.sweep.lambda_max).unwrap_or(1.4),
        steps: args.steps.or(file.sweep.steps).unwrap_or(201),
        // `--mode derivative` alone means the derivatives of both quantities
        entropy: modes.contains(&Mode::Entropy) || derivative_only,
        derivative: modes.contains(&Mode::Derivative),
        concurrence: modes.contains(&Mode::Concurrence) || derivative_only,
        out: common.out,
        format: common.format,
        workers: common.workers,
    })
}

pub(crate) fn run(args: &SweepArgs) -> CliResult<Finished> {
    let cfg = resolve(args)?;
    cfg.validate()?;
    let rows = compute_rows(&cfg)?;
    let body = match cfg.format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&rows),
    };
    let detail = format!("{} rows", rows.len());
    Ok(Finished {
        command: "sweep",
        config: serde_json::to_value(&cfg).expect("config serializes"),
        out: cfg.out.clone(),
        body,
        extra: Vec::new(),
        checks: vec![CheckOutcome::new("sweep", true, detail)],
        code: EXIT_OK,
        failure: None,
    })
}
