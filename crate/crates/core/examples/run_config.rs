//! Load a TOML configuration (or a preset name), run it and write CSV output.
//!
//! ```text
//! cargo run --release --example run_config -- fig1 /tmp/qnlo-out
//! cargo run --release --example run_config -- my.toml
//! ```

use std::path::PathBuf;

use qnlo::io::{preset, run_experiment, validate_config, write_bundle};

fn main() -> qnlo::Result<()> {
    let mut args = std::env::args().skip(1);
    let source = args.next().unwrap_or_else(|| "fig1".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "qnlo-out".into()));

    let cfg = match preset(&source) {
        Some(cfg) => cfg,
        None => {
            let (cfg, warnings) = validate_config(&std::fs::read_to_string(&source)?)?;
            warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            cfg
        }
    };
    let bundle = run_experiment(&cfg)?;
    for c in &bundle.curves {
        let n = c.series("negativity").map_or("-".to_string(), |s| format!("{:.4}", s.max()));
        println!("{:<24} {:<12} max negativity {n}", c.label, c.method);
    }
    let dir = write_bundle(&bundle, &out, cfg.output.format, cfg.output.emit_plots)?;
    println!("wrote {}", dir.display());
    Ok(())
}
