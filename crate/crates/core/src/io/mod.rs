//! Run configuration, figure presets, experiment execution and output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{validate_config, ConfigError, Observable, OutputFormat, RunConfig};
pub use experiment::{run_experiment, CurveResult, ResultBundle, WignerSnapshot};
pub use output::{resolve_out_root, write_bundle, OUT_DIR_ENV};
pub use presets::{preset, preset_registry, Preset};

/// File-name-safe form of a label: ASCII alphanumerics, `.` and `-` kept,
/// everything else mapped to `-`.
pub fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c.to_ascii_lowercase() } else { '-' })
        .collect();
    let s = s.trim_matches('-').to_string();
    if s.is_empty() {
        "curve".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn slugs() {
        assert_eq!(super::slug("delta=0.01,gamma=0.001"), "delta-0.01-gamma-0.001");
        assert_eq!(super::slug("//"), "curve");
    }
}
