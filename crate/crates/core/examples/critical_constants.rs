//! Closed-form values at λ = 1 and how quickly finite rings approach them.

use tfim_entanglement::correlators::correlators;
use tfim_entanglement::critical::critical_constants;
use tfim_entanglement::entanglement::{rdm_spectrum, von_neumann_entropy};
use tfim_entanglement::{ModelPoint, Result};

fn main() -> Result<()> {
    let k = critical_constants();
    println!("eigenvalues  {:?}", k.eps_critical.eps);
    println!("E_v          {:.15}", k.entropy_critical);
    println!("A1           {:.15}", k.a1);
    println!("8/(3π²)      {:.15}", k.concurrence_log);

    for n in [10, 100, 1_000, 10_000, 100_000] {
        let s = rdm_spectrum(&correlators(&ModelPoint::finite(1.0, n)?)?)?;
        let dev = (0..4)
            .map(|i| (s.eps[i] - k.eps_critical.eps[i]).abs())
            .fold(0.0, f64::max);
        println!("N = {n:>6}: E_v = {:.12}, max |Δε| = {dev:.3e}", von_neumann_entropy(&s));
    }
    Ok(())
}
