//! Rescaling dE_v/dλ curves by N^{1/ν}(λ − λ_m) and scanning ν for the best overlap.

use tfim_entanglement::scaling::{data_collapse, tfim_collapse_curves, CollapseCenter, CollapseOptions, CurveSampling};
use tfim_entanglement::Result;

fn main() -> Result<()> {
    let sizes = [41, 101, 251, 401, 801];
    let curves = tfim_collapse_curves(&sizes, &CurveSampling::default())?;
    for center in [CollapseCenter::LambdaM, CollapseCenter::LambdaC] {
        let r = data_collapse(
            &curves,
            &CollapseOptions {
                center,
                ..Default::default()
            },
        )?;
        println!(
            "{center:?}: ν = {:.4}, residual {:.4e}, interior minimum {}",
            r.nu, r.residual, r.interior_minimum
        );
        for (nu, res) in r.scan.iter().step_by(10) {
            println!("    ν = {nu:.2}: {res:.4e}");
        }
    }
    Ok(())
}
