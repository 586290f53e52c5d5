//! Plateau width against the nonlinearity at k = 0.01.

use qnlo::evolve::evolve_unitary_with;
use qnlo::io::presets::STRONG_NONLINEARITY_N_MAX;
use qnlo::{
    build_full_hamiltonian, initial_state, negativity, plateau_detect, FockTruncation, PlateauOptions, ScaledParams,
    TimeGrid, TimeSeries,
};

fn main() -> qnlo::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>8}", "delta", "t_lo", "width", "width*d");
    for delta in [1e-3, 3e-3, 1e-2] {
        let n_max = if delta >= 1e-2 { STRONG_NONLINEARITY_N_MAX } else { FockTruncation::DEFAULT_N_MAX };
        let trunc = FockTruncation::new(n_max)?;
        let p = ScaledParams::closed(0.01, delta, 2.0)?;
        let grid = TimeGrid::with_default_density(0.0, 1.0 / delta)?;
        let mut v = Vec::with_capacity(grid.n_samples());
        evolve_unitary_with(&build_full_hamiltonian(&p, &trunc)?, &initial_state(&p, &trunc)?, &grid, |_, _, psi| {
            v.push(negativity(psi)?.normalized);
            Ok(())
        })?;
        match plateau_detect(&TimeSeries::new("N", grid.times(), v)?, &PlateauOptions::default())? {
            Some(r) => println!("{delta:>8} {:>10.2} {:>10.2} {:>8.3}", r.t_lo, r.width, r.width * delta),
            None => println!("{delta:>8} {:>10} {:>10} {:>8}", "-", "-", "-"),
        }
    }
    Ok(())
}
