//! Free-fermion engine against exact diagonalization.
//!
//! The engine side is abstracted behind [`FreeFermionEngine`] so that a deliberately
//! perturbed engine can be substituted to exercise the mismatch path.

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use super::config::FileConfig;
use super::output::CheckOutcome;
use super::{resolve_common, with_pool, CliError, CliResult, CommonArgs, Finished, Format, EXIT_OK, EXIT_ORACLE};
use crate::correlators::{correlators, ground_energy, CorrelatorSet};
use crate::critical::{compare_critical_derivative, CriticalSumComparison};
use crate::ed::{correlators_from_rdm, generic_spectrum, ground_state, two_site_rdm};
use crate::entanglement::{build_rdm, rdm_spectrum, von_neumann_entropy, RdmSpectrum, CLAMP_TOL};
use crate::error::Result;
use crate::model::ModelPoint;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MIN_N: usize = 4;
pub const MAX_N: usize = 14;

/// Ring sizes at which the explicit critical-point sum is compared with the chain rule.
pub const CRITICAL_SUM_SIZES: [usize; 2] = [1_000, 10_000];

/// The quantities checked against exact diagonalization.
pub trait FreeFermionEngine: Sync {
    fn correlators(&self, point: &ModelPoint) -> Result<CorrelatorSet>;
    fn ground_energy(&self, point: &ModelPoint) -> Result<f64>;
}

/// The crate's own free-fermion evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactEngine;

impl FreeFermionEngine for ExactEngine {
    fn correlators(&self, point: &ModelPoint) -> Result<CorrelatorSet> {
        correlators(point)
    }

    fn ground_energy(&self, point: &ModelPoint) -> Result<f64> {
        ground_energy(point)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Largest ring diagonalized; every N from 4 up to this is checked.
    #[arg(long)]
    pub max_n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Absolute tolerance of every comparison.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleConfig {
    pub max_n: usize,
    pub lambdas: Vec<f64>,
    pub tol: f64,
    pub workers: usize,
}

impl OracleConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(MIN_N..=MAX_N).contains(&self.max_n) {
            return Err(CliError::invalid(format!(
                "--max-n must lie in [{MIN_N}, {MAX_N}], got {}",
                self.max_n
            )));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(CliError::invalid("--lambdas must be a non-empty list of couplings ≥ 0"));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::invalid("--tol must be positive"));
        }
        Ok(())
    }
}

/// One comparison outside tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub quantity: String,
    pub n: usize,
    pub lambda: f64,
    pub engine: f64,
    pub oracle: f64,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} at N = {}, λ = {}: engine {:.17e}, exact diagonalization {:.17e}",
            self.quantity, self.n, self.lambda, self.engine, self.oracle
        )
    }
}

/// Largest deviation per quantity group at one (N, λ).
#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub n: usize,
    pub lambda: f64,
    pub correlators: f64,
    pub rdm: f64,
    pub entropy: f64,
    pub ground_energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub tol: f64,
    pub comparisons: usize,
    pub points: Vec<PointSummary>,
    pub mismatches: Vec<Mismatch>,
    /// Explicit critical-point sum against the chain rule; reported, never gating.
    pub critical_sum: Vec<CriticalSumComparison>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_ORACLE
        }
    }
}

fn compare_point(engine: &impl FreeFermionEngine, n: usize, lambda: f64, tol: f64) -> Result<(PointSummary, usize, Vec<Mismatch>)> {
    let point = ModelPoint::finite(lambda, n)?;
    let g = ground_state(lambda, n)?;
    let rho_ed = two_site_rdm(&g, (0, 1))?;
    let c_ed = correlators_from_rdm(&rho_ed);
    let eps_ed = generic_spectrum(&rho_ed).map(|e| if (-CLAMP_TOL..0.0).contains(&e) { 0.0 } else { e });
    let s_ed = von_neumann_entropy(&RdmSpectrum { eps: eps_ed });

    let c = engine.correlators(&point)?;
    let rho = build_rdm(&c)?.to_matrix();
    let s = von_neumann_entropy(&rdm_spectrum(&c)?);
    let e = engine.ground_energy(&point)?;

    let mut pairs: Vec<(String, f64, f64)> = vec![
        ("<sz>".into(), c.sz, c_ed.sz),
        ("<xx>".into(), c.xx, c_ed.xx),
        ("<yy>".into(), c.yy, c_ed.yy),
        ("<zz>".into(), c.zz, c_ed.zz),
    ];
    for a in 0..4 {
        for b in 0..4 {
            pairs.push((format!("rdm({a},{b})"), rho[(a, b)], rho_ed[(a, b)]));
        }
    }
    pairs.push(("entropy".into(), s, s_ed));
    pairs.push(("ground energy".into(), e, g.energy));

    let diff = |k: &(String, f64, f64)| (k.1 - k.2).abs();
    let max_of = |r: std::ops::Range<usize>| pairs[r].iter().map(diff).fold(0.0, f64::max);
    let summary = PointSummary {
        n,
        lambda,
        correlators: max_of(0..4),
        rdm: max_of(4..20),
        entropy: diff(&pairs[20]),
        ground_energy: diff(&pairs[21]),
    };
    let mismatches = pairs
        .iter()
        .filter(|p| !(diff(p) <= tol))
        .map(|(q, engine, oracle)| Mismatch {
            quantity: q.clone(),
            n,
            lambda,
            engine: *engine,
            oracle: *oracle,
        })
        .collect();
    Ok((summary, pairs.len(), mismatches))
}

/// Runs every comparison for `N ∈ [4, max_n]` and each coupling.
pub fn oracle_check(engine: &impl FreeFermionEngine, cfg: &OracleConfig) -> CliResult<OracleReport> {
    cfg.validate()?;
    let grid: Vec<(usize, f64)> = (MIN_N..=cfg.max_n)
        .flat_map(|n| cfg.lambdas.iter().map(move |&l| (n, l)))
        .collect();
    let (results, critical_sum) = with_pool(cfg.workers, || {
        let results = grid
            .par_iter()
            .map(|&(n, l)| compare_point(engine, n, l, cfg.tol))
            .collect::<Result<Vec<_>>>();
        let critical = CRITICAL_SUM_SIZES
            .par_iter()
            .map(|&n| compare_critical_derivative(n))
            .collect::<Result<Vec<_>>>();
        (results, critical)
    })?;
    let results = results?;
    let mut report = OracleReport {
        tol: cfg.tol,
        comparisons: 0,
        points: Vec::with_capacity(results.len()),
        mismatches: Vec::new(),
        critical_sum: critical_sum?,
    };
    for (summary, count, mismatches) in results {
        report.points.push(summary);
        report.comparisons += count;
        report.mismatches.extend(mismatches);
    }
    Ok(report)
}

pub fn resolve(args: &OracleArgs) -> CliResult<(OracleConfig, super::Resolved)> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &file, Format::Json)?;
    if common.format != Format::Json {
        return Err(CliError::invalid("oracle-check writes JSON only"));
    }
    let f = &file.oracle_check;
    let cfg = OracleConfig {
        max_n: args.max_n.or(f.max_n).unwrap_or(12),
        lambdas: args
            .lambdas
            .clone()
            .or_else(|| f.lambdas.clone())
            .unwrap_or_else(|| vec![0.2, 0.5, 1.0, 1.5, 3.0]),
        tol: args.tol.or(f.tol).unwrap_or(DEFAULT_TOL),
        workers: common.workers,
    };
    cfg.validate()?;
    Ok((cfg, common))
}

/// The `oracle-check` subcommand with an arbitrary engine.
pub(crate) fn run_with(engine: &impl FreeFermionEngine, args: &OracleArgs) -> CliResult<Finished> {
    let (cfg, common) = resolve(args)?;
    let report = oracle_check(engine, &cfg)?;
    let mut checks = vec![CheckOutcome::new(
        "exact diagonalization agreement",
        report.passed(),
        format!(
            "{} comparisons, {} outside {:e}",
            report.comparisons,
            report.mismatches.len(),
            cfg.tol
        ),
    )];
    for c in &report.critical_sum {
        checks.push(CheckOutcome::new(
            format!("explicit critical sum vs chain rule, N = {} (report only)", c.n),
            true,
            format!(
                "explicit {:.10}, chain rule {:.10}, relative discrepancy {:.4}",
                c.explicit_sum, c.chain_rule, c.relative_discrepancy
            ),
        ));
    }
    let failure = report.mismatches.first().map(|m| {
        format!(
            "oracle mismatch ({} total); first: {m}",
            report.mismatches.len()
        )
    });
    Ok(Finished {
        command: "oracle-check",
        config: serde_json::json!({ "oracle_check": cfg, "common": common }),
        out: common.out.clone(),
        body: serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        extra: Vec::new(),
        checks,
        code: report.exit_code(),
        failure,
    })
}

pub(crate) fn run(args: &OracleArgs) -> CliResult<Finished> {
    run_with(&ExactEngine, args)
}

/// Parses `args` as an `oracle-check` command line and runs it against `engine`.
///
/// Returns the process exit code, exactly as `tfim oracle-check …` would.
pub fn run_oracle_with<E, I, T>(engine: &E, args: I) -> i32
where
    E: FreeFermionEngine,
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;

    #[derive(Parser)]
    struct OracleOnly {
        #[command(flatten)]
        args: OracleArgs,
    }

    let parsed = match OracleOnly::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { super::EXIT_INVALID } else { EXIT_OK };
        }
    };
    let started = std::time::Instant::now();
    match run_with(engine, &parsed.args).and_then(|f| f.emit(started.elapsed())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tfim: {}", e.message);
            e.code
        }
    }
}
