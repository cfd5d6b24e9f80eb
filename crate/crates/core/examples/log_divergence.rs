//! Logarithmic growth of dE_v/dλ at criticality, in N and in |λ − 1|.

use tfim_entanglement::critical::a1_constant;
use tfim_entanglement::entanglement::entropy_derivative;
use tfim_entanglement::scaling::{fit_log_in_lambda, fit_log_in_n};
use tfim_entanglement::{ModelPoint, Result};

fn main() -> Result<()> {
    println!("A1 = {:.10}", a1_constant());

    let pts = [1_000, 10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| Ok((n as f64, entropy_derivative(&ModelPoint::finite(1.0, n)?)?)))
        .collect::<Result<Vec<_>>>()?;
    for (n, d) in &pts {
        println!("N = {n:>9}: dE_v/dλ(λ = 1) = {d:.10}");
    }
    let fit = fit_log_in_n(&pts)?;
    println!("slope in ln N: {:.10}", fit.slope);

    for sign in [-1.0, 1.0] {
        let samples = [2.0, 2.5, 3.0, 3.5, 4.0]
            .iter()
            .map(|&k| {
                let lambda = 1.0 + sign * 10f64.powf(-k);
                Ok((lambda, entropy_derivative(&ModelPoint::thermodynamic(lambda)?)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_log_in_lambda(&samples, 1.0)?;
        println!(
            "thermodynamic limit, λ {} 1: slope in ln|λ - 1| = {:.6} (r² = {:.8})",
            if sign < 0.0 { "<" } else { ">" },
            fit.slope,
            fit.r_squared
        );
    }
    Ok(())
}
