//! Negativity plateau at k = 0.5, δ = 0.01.
//!
//! The quartic eigenstates have slowly decaying Fock tails, so this needs a
//! larger cutoff than the default to keep the guard band below 1e-9.

use std::f64::consts::PI;

use qnlo::evolve::{evolve_unitary_with, validity_monitor};
use qnlo::io::presets::STRONG_NONLINEARITY_N_MAX;
use qnlo::{
    build_full_hamiltonian, initial_state, negativity, plateau_detect, FockTruncation, PlateauOptions, ScaledParams,
    TimeGrid, TimeSeries,
};

fn main() -> qnlo::Result<()> {
    let trunc = FockTruncation::new(STRONG_NONLINEARITY_N_MAX)?;
    let p = ScaledParams::closed(0.5, 0.01, 2.0)?;
    let grid = TimeGrid::with_default_density(0.0, 16.0 * PI)?;
    let mut values = Vec::with_capacity(grid.n_samples());
    let summary = evolve_unitary_with(&build_full_hamiltonian(&p, &trunc)?, &initial_state(&p, &trunc)?, &grid, |_, _, psi| {
        values.push(negativity(psi)?.normalized);
        Ok(())
    })?;
    let series = TimeSeries::new("negativity", grid.times(), values)?;

    for i in (0..series.len()).step_by(200) {
        println!("t = {:5.2} pi  N = {:.4}", series.t[i] / PI, series.values[i]);
    }
    match plateau_detect(&series, &PlateauOptions::default())? {
        Some(r) => println!("plateau [{:.2}, {:.2}] pi, mean {:.4}, spread {:.4}", r.t_lo / PI, r.t_hi / PI, r.mean, r.spread),
        None => println!("no plateau"),
    }
    let v = validity_monitor(&summary, &p);
    println!("max delta*<N> = {:.4} at t = {:.2} pi (passed: {})", v.max_metric, v.t_at_max / PI, v.passed);
    let tail = summary.diagnostics.iter().map(|d| d.guard_band_population).fold(0.0, f64::max);
    println!("max guard-band population {tail:.2e}");
    Ok(())
}
