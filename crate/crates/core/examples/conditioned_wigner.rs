//! Qubit-conditioned Wigner functions and their overlap w_p as the two
//! oscillator branches separate.

use std::f64::consts::PI;

use qnlo::io::presets::STRONG_NONLINEARITY_N_MAX;
use qnlo::{
    build_full_hamiltonian, conditioned_osc, initial_state, wigner, wigner_overlap, wigner_overlap_exact, Branch,
    FockTruncation, GridSpec, ScaledParams, UnitaryPropagator,
};

fn main() -> qnlo::Result<()> {
    let trunc = FockTruncation::new(STRONG_NONLINEARITY_N_MAX)?;
    let p = ScaledParams::closed(0.5, 0.01, 2.0)?;
    let prop = UnitaryPropagator::new(&build_full_hamiltonian(&p, &trunc)?)?;
    let psi0 = initial_state(&p, &trunc)?;
    let spec = GridSpec::square(6.0, 0.1)?;

    println!("{:>6} {:>10} {:>10} {:>9} {:>9}", "t/pi", "w_p grid", "w_p exact", "min W_up", "min W_dn");
    for t_pi in [2.0, 4.0, 6.0, 10.0, 15.0] {
        let psi = prop.propagate(&psi0, t_pi * PI)?;
        let up = conditioned_osc(&psi, Branch::Up, false)?;
        let down = conditioned_osc(&psi, Branch::Down, false)?;
        let (w_up, w_down) = (wigner(&up, &spec)?, wigner(&down, &spec)?);
        println!(
            "{t_pi:>6.1} {:>10.6} {:>10.6} {:>9.4} {:>9.4}",
            wigner_overlap(&w_up, &w_down)?,
            wigner_overlap_exact(&up, &down)?,
            w_up.min(),
            w_down.min()
        );
    }
    Ok(())
}
