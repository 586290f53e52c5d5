//! Weak coupling (k = 0.01, δ = 0.001): rotating-wave wave function against
//! the full numerical evolution and the δ = 0 reference.

use std::f64::consts::PI;

use qnlo::{
    build_full_hamiltonian, initial_state, negativity, FockTruncation, RwaPropagator, ScaledParams, UnitaryPropagator,
};

fn main() -> qnlo::Result<()> {
    let trunc = FockTruncation::new(80)?;
    let p = ScaledParams::closed(0.01, 0.001, 2.0)?;
    let p0 = p.with_delta(0.0);
    let full = UnitaryPropagator::new(&build_full_hamiltonian(&p, &trunc)?)?;
    let linear = UnitaryPropagator::new(&build_full_hamiltonian(&p0, &trunc)?)?;
    let rwa = RwaPropagator::new(&p, &trunc)?;
    let psi0 = initial_state(&p, &trunc)?;

    println!("{:>6} {:>10} {:>10} {:>10}", "t/pi", "rwa", "full", "delta=0");
    for i in 0..=16 {
        let t = i as f64 * PI / 2.0;
        let n_rwa = negativity(&rwa.state(t)?)?.normalized;
        let n_full = negativity(&full.propagate(&psi0, t)?)?.normalized;
        let n_lin = negativity(&linear.propagate(&psi0, t)?)?.normalized;
        println!("{:>6.1} {n_rwa:>10.5} {n_full:>10.5} {n_lin:>10.5}", t / PI);
    }
    Ok(())
}
