//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 truncation breach,
//! 4 numerical failure, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qnlo::io::config::OutputFormat;
use qnlo::io::{preset, preset_registry, resolve_out_root, run_experiment, validate_config, write_bundle, RunConfig};
use qnlo::QnloError;

#[derive(Parser)]
#[command(name = "qnlo", version, about = "Qubit coupled to a quartic nonlinear oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML configuration.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a named figure preset.
    Preset {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the available presets.
    ListPresets,
    /// Check a configuration without running it.
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Overrides {
    /// Output root; the run writes into `<out>/<name>/`.
    #[arg(long, env = "QNLO_OUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    n_max: Option<usize>,
    /// End of the time grid in units of π.
    #[arg(long)]
    t_end_pi: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write a matplotlib script next to the data.
    #[arg(long)]
    emit_plots: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(n) = self.n_max {
            cfg.truncation.n_max = n;
        }
        if let Some(t) = self.t_end_pi {
            cfg.grid.t_end_pi = t;
        }
        if let Some(n) = self.samples {
            cfg.grid.samples = Some(n);
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
        }
        cfg.output.emit_plots |= self.emit_plots;
    }
}

fn read_config(path: &Path) -> Result<(RunConfig, Vec<String>), QnloError> {
    let raw = std::fs::read_to_string(path)?;
    Ok(validate_config(&raw)?)
}

fn execute(mut cfg: RunConfig, overrides: &Overrides) -> Result<(), QnloError> {
    overrides.apply(&mut cfg);
    let bundle = run_experiment(&cfg)?;
    let root = resolve_out_root(overrides.out.as_deref(), cfg.output.dir.as_deref());
    let dir = write_bundle(&bundle, &root, cfg.output.format, cfg.output.emit_plots)?;
    for c in &bundle.curves {
        let plateau = c
            .plateau
            .map(|p| format!(", plateau [{:.2}, {:.2}] pi", p.t_lo / std::f64::consts::PI, p.t_hi / std::f64::consts::PI))
            .unwrap_or_default();
        println!("{}: {} ({}{plateau})", c.label, c.curve.model_label(), c.method);
    }
    println!("wrote {} in {:.2} s", dir.display(), bundle.wall_time_s);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), QnloError> {
    match cli.command {
        Command::Run { config, overrides } => {
            let (cfg, _) = read_config(&config)?;
            execute(cfg, &overrides)
        }
        Command::Preset { name, overrides } => {
            let cfg = preset(&name).ok_or_else(|| {
                qnlo::io::ConfigError::field("preset", format!("unknown preset {name:?}; see `qnlo list-presets`"))
            })?;
            execute(cfg, &overrides)
        }
        Command::ListPresets => {
            for p in preset_registry() {
                println!("{:<6} {}", p.name, p.summary);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let (cfg, warnings) = read_config(&config)?;
            for w in &warnings {
                println!("warning: {w}");
            }
            println!("ok: {} ({} curve(s))", cfg.name, cfg.resolved_curves()?.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
