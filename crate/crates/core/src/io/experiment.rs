//! Executes a [`RunConfig`]: one evolution per curve, observables recorded
//! on the time grid, Wigner snapshots at the requested extra times.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ModelKind, Observable, ResolvedCurve, RunConfig};
use crate::analytic::{initial_state, linear_state, RwaPropagator};
use crate::evolve::{self, validity_monitor, SampleDiagnostics, UnitaryPropagator, ValidityReport};
use crate::fock::{FockTruncation, HybridKet, HybridState, OperatorMatrix};
use crate::hamiltonians::{build_full_hamiltonian, build_ladder_hamiltonian, build_lindblad_generator_with};
use crate::observables::{
    conditioned_osc, negativity, plateau_detect, reduce_osc, reduce_qubit, squeezing_scan, wigner, wigner_overlap,
    wigner_overlap_exact, Branch, GridSpec, PlateauReport, StateRef, TimeSeries, WignerGrid,
};
use crate::ode::StepStats;
use crate::{QnloError, Result};

/// Wigner data at one instant.
#[derive(Clone, Debug, Serialize)]
pub struct WignerSnapshot {
    pub t: f64,
    /// `W` of `Tr_q ρ`.
    pub reduced: Option<WignerGrid>,
    /// `W` of the unnormalized `⟨↑|ρ|↑⟩`.
    pub up: Option<WignerGrid>,
    pub down: Option<WignerGrid>,
    /// `∫∫ W_↑W_↓` on the grid.
    pub wp_grid: Option<f64>,
    /// `Tr(ρ_↑ρ_↓)/π`.
    pub wp_exact: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveResult {
    pub label: String,
    pub curve: ResolvedCurve,
    /// `"unitary"`, `"lindblad"` or `"closed-form"`.
    pub method: &'static str,
    /// Keyed by column name, sampled on the run grid (scaled time).
    pub series: BTreeMap<String, TimeSeries>,
    pub wigner: Vec<WignerSnapshot>,
    pub plateau: Option<PlateauReport>,
    pub validity: ValidityReport,
    pub diagnostics: Vec<SampleDiagnostics>,
    pub stats: Option<StepStats>,
}

impl CurveResult {
    pub fn series(&self, name: &str) -> Option<&TimeSeries> {
        self.series.get(name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultBundle {
    pub config: RunConfig,
    pub version: &'static str,
    pub warnings: Vec<String>,
    pub curves: Vec<CurveResult>,
    /// Excluded from CSV bodies so reruns stay byte-identical.
    pub wall_time_s: f64,
}

impl ResultBundle {
    pub fn curve(&self, label: &str) -> Option<&CurveResult> {
        self.curves.iter().find(|c| c.label == label)
    }
}

/// Runs every curve of `cfg` (in parallel) after validating it.
pub fn run_experiment(cfg: &RunConfig) -> Result<ResultBundle> {
    let start = Instant::now();
    let warnings = cfg.check()?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let curves = cfg.resolved_curves()?;
    let results = curves
        .into_par_iter()
        .map(|c| {
            let trunc = cfg.curve_truncation(&c)?;
            let label = c.label.clone();
            run_curve(cfg, &trunc, c).inspect_err(|_| log::error!("curve {label:?} failed"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultBundle {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION"),
        warnings,
        curves: results,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Grid times merged with Wigner times; `(t, grid index, wigner index)`.
fn evaluation_plan(grid: &[f64], wigner_times: &[f64]) -> Vec<(f64, Option<usize>, Option<usize>)> {
    let mut plan: Vec<(f64, Option<usize>, Option<usize>)> =
        grid.iter().enumerate().map(|(i, &t)| (t, Some(i), None)).collect();
    for (j, &tw) in wigner_times.iter().enumerate() {
        match plan.iter_mut().find(|e| (e.0 - tw).abs() <= 1e-9 * tw.abs().max(1.0)) {
            Some(e) if e.2.is_none() => e.2 = Some(j),
            _ => plan.push((tw, None, Some(j))),
        }
    }
    plan.sort_by(|a, b| a.0.total_cmp(&b.0));
    plan
}

struct Recorder<'a> {
    cfg: &'a RunConfig,
    grid_t: Vec<f64>,
    columns: BTreeMap<String, Vec<f64>>,
    wigner: Vec<Option<WignerSnapshot>>,
    wigner_spec: Option<GridSpec>,
    delta: f64,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a RunConfig, grid_t: Vec<f64>, delta: f64) -> Result<Self> {
        let wants_wigner = cfg.wants(Observable::Wigner) || cfg.wants(Observable::ConditionedWigner);
        let wigner_spec = if wants_wigner { Some(GridSpec::square(cfg.wigner.half_width, cfg.wigner.step)?) } else { None };
        let n_w = if wants_wigner { cfg.wigner.times_pi.len() } else { 0 };
        Ok(Self { cfg, grid_t, columns: BTreeMap::new(), wigner: vec![None; n_w], wigner_spec, delta })
    }

    fn push(&mut self, name: &str, v: f64) {
        self.columns.entry(name.to_string()).or_default().push(v);
    }

    fn record(&mut self, t: f64, sample: Option<usize>, wig: Option<usize>, state: StateRef<'_>) -> Result<()> {
        let hs: &dyn HybridState = match state {
            StateRef::Ket(k) => k,
            StateRef::Density(d) => d,
        };
        if sample.is_some() {
            self.record_sample(state, hs)?;
        }
        if let (Some(j), Some(spec)) = (wig, self.wigner_spec) {
            if j < self.wigner.len() {
                self.wigner[j] = Some(self.snapshot(t, hs, &spec)?);
            }
        }
        Ok(())
    }

    fn record_sample(&mut self, state: StateRef<'_>, hs: &dyn HybridState) -> Result<()> {
        let cfg = self.cfg;
        let want_neg = cfg.wants(Observable::Negativity) || cfg.wants(Observable::Plateau);
        if want_neg || cfg.wants(Observable::NegativityRaw) {
            let n = negativity(state)?;
            if want_neg {
                self.push("negativity", n.normalized);
            }
            if cfg.wants(Observable::NegativityRaw) {
                self.push("negativity_raw", n.raw);
            }
        }
        if cfg.wants(Observable::QubitCoherence) || cfg.wants(Observable::Bloch) {
            let q = reduce_qubit(hs);
            if cfg.wants(Observable::QubitCoherence) {
                self.push("qubit_coherence", q.coherence());
            }
            if cfg.wants(Observable::Bloch) {
                let [x, y, z] = q.bloch();
                self.push("bloch_x", x);
                self.push("bloch_y", y);
                self.push("bloch_z", z);
            }
        }
        let n_mean = hs.mean_phonon_number() / hs.total_weight();
        if cfg.wants(Observable::MeanPhonon) {
            self.push("mean_phonon", n_mean);
        }
        if cfg.wants(Observable::Validity) {
            self.push("validity", self.delta * n_mean);
        }
        if cfg.wants(Observable::Squeezing) {
            let r = squeezing_scan(&reduce_osc(hs)?, 0.0)?;
            self.push("squeezing_min_var", r.normalized_y);
            self.push("squeezing_max_var", r.normalized_x);
            self.push("uncertainty_product", r.uncertainty_product());
            self.push("squeezing_angle", r.phi_star);
        }
        if cfg.wants(Observable::Wp) {
            let up = conditioned_osc(hs, Branch::Up, false)?;
            let down = conditioned_osc(hs, Branch::Down, false)?;
            self.push("wp", wigner_overlap_exact(&up, &down)?);
        }
        Ok(())
    }

    fn snapshot(&self, t: f64, hs: &dyn HybridState, spec: &GridSpec) -> Result<WignerSnapshot> {
        let mut snap = WignerSnapshot { t, reduced: None, up: None, down: None, wp_grid: None, wp_exact: None };
        if self.cfg.wants(Observable::Wigner) {
            snap.reduced = Some(wigner(&reduce_osc(hs)?, spec)?);
        }
        if self.cfg.wants(Observable::ConditionedWigner) {
            let up = conditioned_osc(hs, Branch::Up, false)?;
            let down = conditioned_osc(hs, Branch::Down, false)?;
            let (wu, wd) = rayon::join(|| wigner(&up, spec), || wigner(&down, spec));
            let (wu, wd) = (wu?, wd?);
            snap.wp_grid = Some(wigner_overlap(&wu, &wd)?);
            snap.wp_exact = Some(wigner_overlap_exact(&up, &down)?);
            snap.up = Some(wu);
            snap.down = Some(wd);
        }
        Ok(snap)
    }

    fn finish(self, label: &str) -> Result<(BTreeMap<String, TimeSeries>, Vec<WignerSnapshot>)> {
        let mut series = BTreeMap::new();
        for (name, values) in self.columns {
            let s = TimeSeries::new(format!("{label}:{name}"), self.grid_t.clone(), values)?;
            series.insert(name, s);
        }
        Ok((series, self.wigner.into_iter().flatten().collect()))
    }
}

fn hamiltonian(c: &ResolvedCurve, trunc: &FockTruncation) -> Result<OperatorMatrix> {
    match c.kind {
        ModelKind::Full => build_full_hamiltonian(&c.params, trunc),
        ModelKind::Ladder => build_ladder_hamiltonian(&c.params, c.level, trunc),
        ModelKind::Rwa | ModelKind::Linear => Err(QnloError::InvalidParameter {
            field: "model.kind",
            message: "closed-form models have no propagated Hamiltonian".into(),
        }),
    }
}

fn run_curve(cfg: &RunConfig, trunc: &FockTruncation, c: ResolvedCurve) -> Result<CurveResult> {
    let grid = cfg.time_grid()?;
    let grid_t = grid.times();
    let wigner_t: Vec<f64> = cfg.wigner.times_pi.iter().map(|t| t * PI).collect();
    let plan = evaluation_plan(&grid_t, if cfg.wants(Observable::Wigner) || cfg.wants(Observable::ConditionedWigner) { &wigner_t } else { &[] });
    let mut rec = Recorder::new(cfg, grid_t, c.params.delta)?;
    let psi0 = initial_state(&c.params, trunc)?;
    let w0 = psi0.norm_sqr();
    let mut diagnostics = Vec::with_capacity(plan.len());
    let mut stats = None;

    let method = if c.kind.is_analytic() {
        let rwa = if c.kind == ModelKind::Rwa { Some(RwaPropagator::new(&c.params, trunc)?) } else { None };
        for &(t, si, wi) in &plan {
            let psi: HybridKet = match &rwa {
                Some(r) => r.state(t)?,
                None => linear_state(&c.params, t, trunc)?,
            };
            diagnostics.push(SampleDiagnostics::of(&psi, t, w0, trunc)?);
            rec.record(t, si, wi, StateRef::Ket(&psi))?;
        }
        "closed-form"
    } else if c.uses_lindblad() {
        let h = hamiltonian(&c, trunc)?;
        let gen = build_lindblad_generator_with(&c.params, &h, *trunc)?;
        let rho0 = psi0.to_density();
        let times: Vec<f64> = plan.iter().map(|e| e.0).collect();
        let (diag, st) = evolve::evolve_lindblad_at(&gen, &rho0, grid.t_start(), &times, &cfg.lindblad_options(), |i, t, rho| {
            rec.record(t, plan[i].1, plan[i].2, StateRef::Density(rho))
        })?;
        diagnostics = diag;
        stats = Some(st);
        "lindblad"
    } else {
        let prop = UnitaryPropagator::new(&hamiltonian(&c, trunc)?)?;
        let coeffs = prop.coefficients(&psi0)?;
        for &(t, si, wi) in &plan {
            let psi = prop.evolve_coefficients(&coeffs, t, *trunc)?;
            diagnostics.push(SampleDiagnostics::of(&psi, t, w0, trunc)?);
            rec.record(t, si, wi, StateRef::Ket(&psi))?;
        }
        "unitary"
    };

    let (series, wigner) = rec.finish(&c.label)?;
    let plateau = match (cfg.wants(Observable::Plateau), series.get("negativity")) {
        (true, Some(s)) => plateau_detect(s, &cfg.plateau)?,
        _ => None,
    };
    let validity = validity_monitor(&diagnostics, &c.params);
    if !validity.passed {
        log::warn!(
            "curve {:?}: delta*<N> reached {:.3} at t = {:.2} pi (threshold {})",
            c.label,
            validity.max_metric,
            validity.t_at_max / PI,
            validity.threshold
        );
    }
    Ok(CurveResult { label: c.label.clone(), curve: c, method, series, wigner, plateau, validity, diagnostics, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::validate_config;

    #[test]
    fn plan_merges_times() {
        let plan = evaluation_plan(&[0.0, 1.0, 2.0], &[1.0, 5.0, 0.5]);
        let t: Vec<f64> = plan.iter().map(|e| e.0).collect();
        assert_eq!(t, vec![0.0, 0.5, 1.0, 2.0, 5.0]);
        assert_eq!(plan[2], (1.0, Some(1), Some(0)));
        assert_eq!(plan[4], (5.0, None, Some(1)));
    }

    #[test]
    fn small_run_records_requested_columns() {
        let raw = r#"
name = "small"
observables = ["negativity", "negativity_raw", "bloch", "squeezing", "wp", "conditioned_wigner"]
[params]
k = 0.5
delta = 0.0
[truncation]
n_max = 60
[grid]
t_end_pi = 2.0
samples = 41
[wigner]
times_pi = [1.0, 3.0]
half_width = 3.0
step = 0.1
[[curves]]
label = "numeric"
[[curves]]
label = "closed"
kind = "linear"
"#;
        let (cfg, _) = validate_config(raw).unwrap();
        let bundle = run_experiment(&cfg).unwrap();
        let numeric = bundle.curve("numeric").unwrap();
        let closed = bundle.curve("closed").unwrap();
        assert_eq!(numeric.method, "unitary");
        assert_eq!(closed.method, "closed-form");
        for name in ["negativity", "negativity_raw", "bloch_x", "squeezing_min_var", "wp"] {
            let d = numeric.series(name).unwrap().max_abs_difference(closed.series(name).unwrap()).unwrap();
            assert!(d < 1e-8, "{name}: {d}");
        }
        let neg = numeric.series("negativity").unwrap();
        assert_eq!(neg.len(), 41);
        assert!((neg.values[20] - (1.0 - (-4.0f64).exp()).sqrt()).abs() < 1e-8);
        assert_eq!(numeric.wigner.len(), 2);
        assert!((numeric.wigner[1].t - 3.0 * PI).abs() < 1e-12);
        let snap = &numeric.wigner[0];
        assert!((snap.wp_grid.unwrap() - snap.wp_exact.unwrap()).abs() < 1e-3);
        assert!((numeric.series("wp").unwrap().values[20] - snap.wp_exact.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn lindblad_curve_runs() {
        let raw = r#"
observables = ["negativity", "mean_phonon"]
[params]
k = 0.3
delta = 0.002
gamma = 0.05
[truncation]
n_max = 30
tail_tol = 1e-5
[grid]
t_end_pi = 0.5
samples = 6
"#;
        let (cfg, _) = validate_config(raw).unwrap();
        let bundle = run_experiment(&cfg).unwrap();
        let c = &bundle.curves[0];
        assert_eq!(c.method, "lindblad");
        assert!(c.stats.is_some());
        assert!(c.diagnostics.iter().all(|d| d.norm_drift < 1e-8));
    }
}
