use serde::Serialize;

use super::config::FileConfig;
use super::output::{sig15, CheckOutcome};
use super::{resolve_common, CliError, CliResult, CommonArgs, Finished, Format, EXIT_OK};
use crate::critical::critical_constants;

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub lambda_c: f64,
    /// ε₁…ε₄ of the critical two-site reduced density matrix.
    pub eps: [f64; 4],
    pub a1: f64,
    /// 8/(3π²)
    pub concurrence_log_constant: f64,
    /// E_v at λ = 1 in the thermodynamic limit, in bits.
    pub entropy_critical: f64,
}

pub fn report() -> ConstantsReport {
    let c = critical_constants();
    ConstantsReport {
        lambda_c: c.lambda_c,
        eps: c.eps_critical.eps.map(sig15),
        a1: sig15(c.a1),
        concurrence_log_constant: sig15(c.concurrence_log),
        entropy_critical: sig15(c.entropy_critical),
    }
}

pub(crate) fn run(args: &CommonArgs) -> CliResult<Finished> {
    let file = FileConfig::load(args.config.as_deref())?;
    let common = resolve_common(args, &file, Format::Json)?;
    if common.format != Format::Json {
        return Err(CliError::invalid("constants writes JSON only"));
    }
    let r = report();
    let sum: f64 = r.eps.iter().sum();
    Ok(Finished {
        command: "constants",
        config: serde_json::to_value(&common).expect("config serializes"),
        out: common.out,
        body: serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
        extra: Vec::new(),
        checks: vec![CheckOutcome::new(
            "eigenvalues sum to one",
            (sum - 1.0).abs() < 1e-13,
            format!("sum {sum:.15}"),
        )],
        code: EXIT_OK,
        failure: None,
    })
}
