use std::f64::consts::PI;

use qnlo::{build_full_hamiltonian, evolve_unitary, initial_state, reduce_qubit, FockTruncation, ScaledParams, TimeGrid};

fn main() -> qnlo::Result<()> {
    let delta = std::env::args().nth(1).map_or(0.0, |s| s.parse().expect("delta must be a number"));
    let trunc = FockTruncation::new(if delta > 0.003 { 140 } else { 80 })?;
    let p = ScaledParams::closed(0.5, delta, 2.0)?;
    let run = evolve_unitary(&build_full_hamiltonian(&p, &trunc)?, &initial_state(&p, &trunc)?, &TimeGrid::from_pi(0.0, 4.0, 17)?)?;

    println!("delta = {delta}");
    println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "t/pi", "x", "y", "z", "|r|");
    for (t, psi) in run.grid.times().into_iter().zip(run.kets().unwrap()) {
        let [x, y, z] = reduce_qubit(psi).bloch();
        let r = (x * x + y * y + z * z).sqrt();
        println!("{:>6.2} {x:>9.5} {y:>9.5} {z:>9.5} {r:>9.5}", t / PI);
    }
    Ok(())
}
