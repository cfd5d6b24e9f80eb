//! Concurrence between neighbouring spins, and its derivative at λ = 1.

use tfim_entanglement::concurrence::{concurrence_derivative, concurrence_with_branch};
use tfim_entanglement::correlators::correlators;
use tfim_entanglement::critical::concurrence_log_constant;
use tfim_entanglement::entanglement::build_rdm;
use tfim_entanglement::scaling::fit_log_in_n;
use tfim_entanglement::{ModelPoint, Result};

fn main() -> Result<()> {
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let p = ModelPoint::thermodynamic(lambda)?;
        let c = concurrence_with_branch(&build_rdm(&correlators(&p)?)?);
        println!("λ = {lambda}: C = {:.8} ({:?} branch)", c.value, c.branch);
    }

    let pts = [1_000, 10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| Ok((n as f64, concurrence_derivative(&ModelPoint::finite(1.0, n)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_log_in_n(&pts)?;
    println!("dC/dλ at λ = 1 against ln N: slope {:.8}", fit.slope);
    println!("8/(3π²) = {:.8}", concurrence_log_constant());
    Ok(())
}
