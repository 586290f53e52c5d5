//! Quadrature squeezing of the oscillator in the rotating-wave regime.

use std::f64::consts::PI;

use qnlo::{reduce_osc, squeezing_scan, FockTruncation, RwaPropagator, ScaledParams};

fn main() -> qnlo::Result<()> {
    let p = ScaledParams::closed(0.01, 0.001, 2.0)?;
    let rwa = RwaPropagator::new(&p, &FockTruncation::new(80)?)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "t/pi", "min var", "max var", "product", "phi/pi");
    for i in 0..=16 {
        let t = i as f64 * PI / 2.0;
        let r = squeezing_scan(&reduce_osc(&rwa.state(t)?)?, t)?;
        println!(
            "{:>6.1} {:>10.4} {:>10.4} {:>10.4} {:>8.3}",
            t / PI,
            r.normalized_y,
            r.normalized_x,
            r.uncertainty_product(),
            r.phi_star / PI
        );
    }
    Ok(())
}
