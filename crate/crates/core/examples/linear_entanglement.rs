//! Negativity of the δ = 0 model: numerical propagation next to the closed form.

use std::f64::consts::PI;

use qnlo::analytic::linear_negativity_closed_form;
use qnlo::{build_full_hamiltonian, initial_state, negativity, FockTruncation, ScaledParams, UnitaryPropagator};

fn main() -> qnlo::Result<()> {
    let trunc = FockTruncation::new(60)?;
    println!("{:>6} {:>8} {:>12} {:>12}", "k", "t/pi", "numeric", "closed form");
    for k in [0.1, 0.25, 0.5] {
        let p = ScaledParams::closed(k, 0.0, 2.0)?;
        let prop = UnitaryPropagator::new(&build_full_hamiltonian(&p, &trunc)?)?;
        let psi0 = initial_state(&p, &trunc)?;
        for step in 0..=8 {
            let t = step as f64 * PI / 4.0;
            let numeric = negativity(&prop.propagate(&psi0, t)?)?.raw;
            let exact = linear_negativity_closed_form(&p, t)?;
            println!("{k:>6} {:>8.2} {numeric:>12.8} {exact:>12.8}", t / PI);
        }
    }
    Ok(())
}
