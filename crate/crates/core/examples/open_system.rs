//! Oscillator damping: negativity at a few times for increasing γ.
//!
//! Runs the master equation at dimension 2·(n_max+1); with the default
//! `n_max = 60` and δ = 0.001 this takes a few seconds per rate.

use std::f64::consts::PI;

use qnlo::evolve::evolve_lindblad_at;
use qnlo::hamiltonians::build_lindblad_generator_with;
use qnlo::{build_full_hamiltonian, initial_state, negativity, FockTruncation, HybridState, LindbladOptions, ScaledParams};

fn main() -> qnlo::Result<()> {
    let trunc = FockTruncation::new(60)?;
    let base = ScaledParams::closed(0.5, 0.001, 2.0)?;
    let h = build_full_hamiltonian(&base, &trunc)?;
    let rho0 = initial_state(&base, &trunc)?.to_density();
    let times: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 5.0].iter().map(|x| x * PI).collect();

    println!("{:>7} {}", "gamma", times.iter().map(|t| format!("{:>9}", format!("{:.0}pi", t / PI))).collect::<String>());
    for gamma in [0.0, 0.001, 0.01, 0.05] {
        let gen = build_lindblad_generator_with(&base.with_gamma(gamma), &h, trunc)?;
        let mut row = String::new();
        let (_, stats) = evolve_lindblad_at(&gen, &rho0, 0.0, &times, &LindbladOptions::default(), |_, _, rho| {
            row.push_str(&format!("{:>9.4}", negativity(rho)?.normalized));
            Ok(())
        })?;
        println!("{gamma:>7} {row}   ({} steps)", stats.accepted);
    }
    Ok(())
}
