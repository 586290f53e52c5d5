//! TOML run configuration.
//!
//! Every field has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected. Example:
//!
//! ```toml
//! name = "strong-coupling"
//! observables = ["negativity", "plateau"]
//!
//! [params]
//! k = 0.5
//! delta = 0.01
//! alpha = 2.0
//!
//! [grid]
//! t_end_pi = 16.0
//!
//! [[curves]]
//! label = "delta=1e-3"
//! delta = 0.001
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::evolve::{Frame, LindbladOptions, TimeGrid};
use crate::fock::FockTruncation;
use crate::hamiltonians::{PhononLadderLevel, ScaledParams, VALIDITY_THRESHOLD};
use crate::observables::PlateauOptions;
use crate::C64;

/// Configuration problem with an optional source line and field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { line: None, field: Some(field.into()), message: message.into() }
    }

    pub fn message(message: impl Into<String>) -> Self {
        Self { line: None, field: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, " in `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub k: f64,
    pub delta: f64,
    /// Real part of the initial coherent amplitude.
    pub alpha: f64,
    pub alpha_im: f64,
    pub gamma: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { k: 0.5, delta: 0.001, alpha: 2.0, alpha_im: 0.0, gamma: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationConfig {
    pub n_max: usize,
    pub margin: usize,
    pub tail_tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            n_max: FockTruncation::DEFAULT_N_MAX,
            margin: FockTruncation::DEFAULT_MARGIN,
            tail_tol: FockTruncation::DEFAULT_TAIL_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_start_pi: f64,
    pub t_end_pi: f64,
    /// Number of samples; omitted means 400 per 2π.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { t_start_pi: 0.0, t_end_pi: 2.0, samples: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `a†a + δ(a†+a)⁴ − kσ_z(a†+a)`, propagated numerically.
    Full,
    /// Phonon-ladder truncation of the quartic term.
    Ladder,
    /// Rotating-wave wave function (closed form).
    Rwa,
    /// Exact δ = 0 solution (closed form).
    Linear,
}

impl ModelKind {
    pub fn is_analytic(self) -> bool {
        matches!(self, ModelKind::Rwa | ModelKind::Linear)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    /// Master equation when `gamma > 0`, unitary otherwise.
    #[default]
    Auto,
    Unitary,
    Lindblad,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Used when `kind = "ladder"`.
    pub level: PhononLadderLevel,
    pub dynamics: Dynamics,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { kind: ModelKind::Full, level: PhononLadderLevel::Full, dynamics: Dynamics::Auto }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `2·Σ|λ₋|` of the qubit partial transpose (1 = maximal).
    Negativity,
    /// `Σ|λ₋|` (½ = maximal).
    NegativityRaw,
    /// `|ρ_↑↓|` of the reduced qubit state.
    QubitCoherence,
    /// Bloch components of the reduced qubit state.
    Bloch,
    MeanPhonon,
    /// Minimal/maximal normalized quadrature variances, their product and angle.
    Squeezing,
    /// `Tr(ρ_↑ρ_↓)/π` at every sample.
    Wp,
    /// `δ⟨N⟩` at every sample.
    Validity,
    /// Plateau detection on the normalized negativity.
    Plateau,
    /// Wigner function of `Tr_q ρ` at `[wigner].times_pi`.
    Wigner,
    /// Wigner functions of `⟨↑|ρ|↑⟩`, `⟨↓|ρ|↓⟩` and their overlap at `[wigner].times_pi`.
    ConditionedWigner,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Negativity => "negativity",
            Observable::NegativityRaw => "negativity_raw",
            Observable::QubitCoherence => "qubit_coherence",
            Observable::Bloch => "bloch",
            Observable::MeanPhonon => "mean_phonon",
            Observable::Squeezing => "squeezing",
            Observable::Wp => "wp",
            Observable::Validity => "validity",
            Observable::Plateau => "plateau",
            Observable::Wigner => "wigner",
            Observable::ConditionedWigner => "conditioned_wigner",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    pub times_pi: Vec<f64>,
    pub half_width: f64,
    pub step: f64,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self { times_pi: vec![0.0, 1.0, 2.0], half_width: 5.0, step: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindbladConfig {
    pub rtol: f64,
    pub atol: f64,
    pub frame: Frame,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        let d = LindbladOptions::default();
        Self { rtol: d.rtol, atol: d.atol, frame: d.frame }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Parent directory for run output; falls back to `$QNLO_OUT_DIR`, then `qnlo-out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub emit_plots: bool,
}

/// One curve of a multi-curve run; unset fields inherit from the base config.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ModelKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<PhononLadderLevel>,
    /// Guard-band tolerance for this curve only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub name: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub observables: Vec<Observable>,
    pub params: ParamsConfig,
    pub truncation: TruncationConfig,
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub wigner: WignerConfig,
    pub lindblad: LindbladConfig,
    pub plateau: PlateauOptions,
    pub output: OutputConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "run".into(),
            description: String::new(),
            observables: vec![Observable::Negativity],
            params: ParamsConfig::default(),
            truncation: TruncationConfig::default(),
            grid: GridConfig::default(),
            model: ModelConfig::default(),
            wigner: WignerConfig::default(),
            lindblad: LindbladConfig::default(),
            plateau: PlateauOptions::default(),
            output: OutputConfig::default(),
            curves: Vec::new(),
        }
    }
}

/// A curve with every parameter resolved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedCurve {
    pub label: String,
    pub params: ScaledParams,
    pub kind: ModelKind,
    pub level: PhononLadderLevel,
    pub dynamics: Dynamics,
    pub tail_tol: f64,
}

impl ResolvedCurve {
    pub fn uses_lindblad(&self) -> bool {
        match self.dynamics {
            Dynamics::Lindblad => true,
            Dynamics::Unitary => false,
            Dynamics::Auto => self.params.gamma > 0.0,
        }
    }

    pub fn model_label(&self) -> String {
        match self.kind {
            ModelKind::Full => "full".into(),
            ModelKind::Ladder => format!("ladder-{}", self.level.label()),
            ModelKind::Rwa => "rwa".into(),
            ModelKind::Linear => "linear".into(),
        }
    }
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration always serializes")
    }

    pub fn truncation(&self) -> Result<FockTruncation, ConfigError> {
        let t = &self.truncation;
        FockTruncation::with_margin(t.n_max, t.margin, t.tail_tol)
            .map_err(|e| ConfigError::field("truncation", e.to_string()))
    }

    /// The shared truncation with the curve's own guard-band tolerance.
    pub fn curve_truncation(&self, curve: &ResolvedCurve) -> Result<FockTruncation, ConfigError> {
        let t = &self.truncation;
        FockTruncation::with_margin(t.n_max, t.margin, curve.tail_tol)
            .map_err(|e| ConfigError::field("tail_tol", e.to_string()))
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ConfigError> {
        let g = &self.grid;
        let pi = std::f64::consts::PI;
        let res = match g.samples {
            Some(n) => TimeGrid::new(g.t_start_pi * pi, g.t_end_pi * pi, n),
            None => TimeGrid::with_default_density(g.t_start_pi * pi, g.t_end_pi * pi),
        };
        res.map_err(|e| ConfigError::field("grid", e.to_string()))
    }

    pub fn lindblad_options(&self) -> LindbladOptions {
        LindbladOptions { rtol: self.lindblad.rtol, atol: self.lindblad.atol, initial_step: None, frame: self.lindblad.frame }
    }

    pub fn wants(&self, o: Observable) -> bool {
        self.observables.contains(&o)
    }

    /// Base parameters merged with each `[[curves]]` entry (or the base alone).
    pub fn resolved_curves(&self) -> Result<Vec<ResolvedCurve>, ConfigError> {
        let base = CurveConfig { label: self.name.clone(), ..Default::default() };
        let specs: Vec<&CurveConfig> = if self.curves.is_empty() { vec![&base] } else { self.curves.iter().collect() };
        specs
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let p = &self.params;
                let params = ScaledParams {
                    k: c.k.unwrap_or(p.k),
                    delta: c.delta.unwrap_or(p.delta),
                    alpha: C64::new(c.alpha.unwrap_or(p.alpha), p.alpha_im),
                    gamma: c.gamma.unwrap_or(p.gamma),
                    lab: None,
                };
                let field = if self.curves.is_empty() { "params".to_string() } else { format!("curves[{i}]") };
                params.validate().map_err(|e| match e {
                    crate::QnloError::InvalidParameter { field: f, message } => {
                        ConfigError::field(format!("{field}.{f}"), message)
                    }
                    other => ConfigError::field(field.clone(), other.to_string()),
                })?;
                Ok(ResolvedCurve {
                    label: c.label.clone(),
                    params,
                    kind: c.kind.unwrap_or(self.model.kind),
                    level: c.level.unwrap_or(self.model.level),
                    dynamics: self.model.dynamics,
                    tail_tol: c.tail_tol.unwrap_or(self.truncation.tail_tol),
                })
            })
            .collect()
    }

    /// Schema-level checks beyond parsing. Returns physics warnings.
    pub fn check(&self) -> Result<Vec<String>, ConfigError> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(ConfigError::field("name", "must be non-empty and free of path separators"));
        }
        self.truncation()?;
        self.time_grid()?;
        if !(self.lindblad.rtol > 0.0 && self.lindblad.atol > 0.0) {
            return Err(ConfigError::field("lindblad", "rtol and atol must be positive"));
        }
        if !(self.plateau.window > 0.0 && self.plateau.threshold > 0.0) {
            return Err(ConfigError::field("plateau", "window and threshold must be positive"));
        }
        let w = &self.wigner;
        if !(w.half_width > 0.0 && w.step > 0.0) {
            return Err(ConfigError::field("wigner", "half_width and step must be positive"));
        }
        if w.step > crate::observables::WIGNER_MAX_STEP {
            return Err(ConfigError::field("wigner.step", format!("{} exceeds the 0.25 limit", w.step)));
        }
        let reach = w.half_width * std::f64::consts::SQRT_2;
        if reach > crate::observables::WIGNER_MAX_RADIUS {
            return Err(ConfigError::field(
                "wigner.half_width",
                format!("grid corners reach |β| = {reach:.2}, above {}", crate::observables::WIGNER_MAX_RADIUS),
            ));
        }
        if w.times_pi.iter().any(|t| !t.is_finite() || *t < self.grid.t_start_pi) {
            return Err(ConfigError::field("wigner.times_pi", "times must be finite and not precede the grid start"));
        }
        let mut labels = std::collections::HashSet::new();
        let mut warnings = Vec::new();
        for (i, c) in self.resolved_curves()?.iter().enumerate() {
            let field = |f: &str| if self.curves.is_empty() { format!("params.{f}") } else { format!("curves[{i}].{f}") };
            if !labels.insert(super::slug(&c.label)) {
                return Err(ConfigError::field(format!("curves[{i}].label"), format!("duplicate label {:?}", c.label)));
            }
            let trunc = self.curve_truncation(c)?;
            if !trunc.admits_amplitude(c.params.alpha.norm()) {
                return Err(ConfigError::field(
                    field("alpha"),
                    format!("|alpha| = {} needs n_max >= |alpha|^2 + 6|alpha|", c.params.alpha.norm()),
                ));
            }
            match c.kind {
                ModelKind::Linear if c.params.delta != 0.0 => {
                    return Err(ConfigError::field(field("delta"), "the linear model requires delta = 0"));
                }
                ModelKind::Rwa if c.params.alpha.im != 0.0 => {
                    return Err(ConfigError::field("params.alpha_im", "the rwa model requires a real alpha"));
                }
                _ => {}
            }
            if c.kind.is_analytic() && (c.params.gamma > 0.0 || self.model.dynamics == Dynamics::Lindblad) {
                return Err(ConfigError::field(field("gamma"), "closed-form models describe the undamped system only"));
            }
            if c.kind == ModelKind::Ladder && c.level == PhononLadderLevel::UpToTwoPhonon && c.params.delta > 0.0 {
                warnings.push(format!(
                    "curve {:?}: the up-to-two-phonon ladder Hamiltonian is unbounded below; its truncated \
                     dynamics depend on n_max and its Fock tail does not converge",
                    c.label
                ));
            }
            if !c.params.within_validity() {
                warnings.push(format!(
                    "curve {:?}: delta*(|alpha|+2k)^2 = {:.3} exceeds {VALIDITY_THRESHOLD}; the single-frequency \
                     oscillator picture (delta<N> << 1) is violated from the start",
                    c.label,
                    c.params.validity_estimate()
                ));
            }
        }
        Ok(warnings)
    }
}

fn line_of(raw: &str, offset: usize) -> usize {
    raw[..offset.min(raw.len())].matches('\n').count() + 1
}

/// Parses and validates a configuration, returning physics warnings alongside.
pub fn validate_config(raw: &str) -> Result<(RunConfig, Vec<String>), ConfigError> {
    let cfg: RunConfig = toml::from_str(raw).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of(raw, s.start)),
        field: None,
        message: e.message().trim().to_string(),
    })?;
    let warnings = cfg.check().map_err(|mut e| {
        if e.line.is_none() {
            e.line = e.field.as_deref().and_then(|f| locate_field(raw, f));
        }
        e
    })?;
    Ok((cfg, warnings))
}

/// Best-effort line of the last path component of `field` in the raw text.
fn locate_field(raw: &str, field: &str) -> Option<usize> {
    let key = field.rsplit('.').next()?;
    let key = key.split('[').next()?;
    raw.lines().position(|l| {
        let l = l.trim_start();
        l.starts_with(key) && l[key.len()..].trim_start().starts_with('=')
    })
    .map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let (cfg, warnings) = validate_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert!(warnings.is_empty());
    }

    #[test]
    fn negative_k_names_field_and_line() {
        let err = validate_config("name = \"x\"\n[params]\nk = -0.5\n").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("params.k"));
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let err = validate_config("[params]\nk = 0.5\nkappa = 1.0\n").unwrap_err();
        assert!(err.message.contains("kappa"), "{err}");
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn validity_warning() {
        let (_, warnings) = validate_config("[params]\ndelta = 0.5\nalpha = 2.0\nk = 0.0\n").unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("delta"));
    }

    #[test]
    fn model_constraints() {
        assert!(validate_config("[model]\nkind = \"linear\"\n").is_err());
        assert!(validate_config("[model]\nkind = \"linear\"\n[params]\ndelta = 0.0\n").is_ok());
        assert!(validate_config("[model]\nkind = \"rwa\"\n[params]\ngamma = 0.1\n").is_err());
        assert!(validate_config("[truncation]\nn_max = 10\n").is_err());
        assert!(validate_config("[wigner]\nstep = 0.5\n").is_err());
        assert!(validate_config("[wigner]\nhalf_width = 13.0\n").is_err());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let raw = r#"
name = "sweep"
observables = ["negativity", "squeezing", "conditioned_wigner"]
[params]
k = 0.25
[grid]
t_end_pi = 4.0
samples = 201
[model]
kind = "ladder"
level = "up-to-two-phonon"
[[curves]]
label = "a"
delta = 0.001
[[curves]]
label = "b"
kind = "full"
"#;
        let (cfg, _) = validate_config(raw).unwrap();
        let once = cfg.to_toml();
        let (again, _) = validate_config(&once).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), once);
        let curves = cfg.resolved_curves().unwrap();
        assert_eq!(curves[0].params.delta, 0.001);
        assert_eq!(curves[1].kind, ModelKind::Full);
        assert_eq!(curves[0].level, PhononLadderLevel::UpToTwoPhonon);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let raw = "[[curves]]\nlabel = \"a\"\n[[curves]]\nlabel = \"a\"\n";
        assert!(validate_config(raw).is_err());
    }
}
