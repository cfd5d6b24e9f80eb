//! Nearest-neighbour correlators on finite rings and in the thermodynamic limit.
//!
//! ```bash
//! cargo run --example correlators
//! ```

use tfim_entanglement::correlators::{correlators, ground_energy};
use tfim_entanglement::{ModelPoint, Result};

fn main() -> Result<()> {
    println!("{:>8} {:>8} {:>12} {:>12} {:>12} {:>12}", "N", "lambda", "<sz>", "<xx>", "<yy>", "<zz>");
    for lambda in [0.5, 1.0, 2.0] {
        for n in [8, 64, 1024] {
            let c = correlators(&ModelPoint::finite(lambda, n)?)?;
            println!("{n:>8} {lambda:>8.3} {:>12.8} {:>12.8} {:>12.8} {:>12.8}", c.sz, c.xx, c.yy, c.zz);
        }
        let c = correlators(&ModelPoint::thermodynamic(lambda)?)?;
        println!("{:>8} {lambda:>8.3} {:>12.8} {:>12.8} {:>12.8} {:>12.8}", "inf", c.sz, c.xx, c.yy, c.zz);
    }

    // ground-state energy per site approaches -(4/π) at λ = 1
    for n in [10, 100, 1000] {
        let e = ground_energy(&ModelPoint::finite(1.0, n)?)?;
        println!("N = {n:>5}: E0/N = {:.12}", e / n as f64);
    }
    println!("limit:     E0/N = {:.12}", -4.0 / std::f64::consts::PI);
    Ok(())
}
