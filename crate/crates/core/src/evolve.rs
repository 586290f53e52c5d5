//! Time evolution.
//!
//! Closed systems are propagated exactly through one Hermitian
//! eigendecomposition, `ψ(t) = V e^{−iEt} V† ψ₀`. The damped system is
//! integrated with adaptive Dormand–Prince steps; by default the master
//! equation is written in the interaction picture of `H`, which removes the
//! stiff `−i[H, ρ]` part (‖H‖ grows like `δ n_max⁴`) and leaves only the
//! slow dissipator for the integrator.

use std::f64::consts::PI;

use ndarray::{Array1, Axis};
use serde::{Deserialize, Serialize};

use crate::fock::{check_truncation, FockTruncation, HybridDensity, HybridKet, HybridState, OperatorMatrix};
use crate::hamiltonians::{LindbladGenerator, ScaledParams, VALIDITY_THRESHOLD};
use crate::linalg::{self, CMat, HermitianEigen, I};
use crate::ode::{self, Dopri5Options, StepStats};
use crate::{QnloError, Result, C64};

/// Uniform sample times `t_start..=t_end` (scaled time, units of 1/ω_o).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_samples: usize,
}

impl TimeGrid {
    /// Samples per `2π` used by [`TimeGrid::with_default_density`].
    pub const SAMPLES_PER_PERIOD: usize = 400;

    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_end <= t_start {
            return Err(QnloError::InvalidGrid(format!("need t_end > t_start, got [{t_start}, {t_end}]")));
        }
        if n_samples < 2 {
            return Err(QnloError::InvalidGrid(format!("need at least 2 samples, got {n_samples}")));
        }
        Ok(Self { t_start, t_end, n_samples })
    }

    /// Endpoints given in units of π.
    pub fn from_pi(start_pi: f64, end_pi: f64, n_samples: usize) -> Result<Self> {
        Self::new(start_pi * PI, end_pi * PI, n_samples)
    }

    /// 400 samples per `2π`, endpoints included.
    pub fn with_default_density(t_start: f64, t_end: f64) -> Result<Self> {
        let periods = (t_end - t_start) / (2.0 * PI);
        let n = (periods * Self::SAMPLES_PER_PERIOD as f64).round().max(1.0) as usize + 1;
        Self::new(t_start, t_end, n)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_samples - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_start + i as f64 * self.step()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.time(i)).collect()
    }
}

/// Per-sample health numbers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleDiagnostics {
    pub t: f64,
    /// `|‖ψ‖² − ‖ψ₀‖²|` or `|Tr ρ − Tr ρ₀|`.
    pub norm_drift: f64,
    pub guard_band_population: f64,
    pub mean_phonon_number: f64,
}

impl SampleDiagnostics {
    /// Certifies `state` against `trunc` and records its health numbers.
    pub fn of<S: HybridState + ?Sized>(state: &S, t: f64, weight0: f64, trunc: &FockTruncation) -> Result<Self> {
        let report = check_truncation(state, trunc);
        if !report.passed {
            return Err(QnloError::TruncationBreached { t, population: report.tail_population, tol: report.tail_tol });
        }
        Ok(Self {
            t,
            norm_drift: (state.total_weight() - weight0).abs(),
            guard_band_population: report.tail_population,
            mean_phonon_number: state.mean_phonon_number(),
        })
    }
}

#[derive(Clone, Debug)]
pub enum EvolvedStates {
    Pure(Vec<HybridKet>),
    Mixed(Vec<HybridDensity>),
}

impl EvolvedStates {
    pub fn len(&self) -> usize {
        match self {
            EvolvedStates::Pure(v) => v.len(),
            EvolvedStates::Mixed(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub grid: TimeGrid,
    pub states: EvolvedStates,
    pub diagnostics: Vec<SampleDiagnostics>,
    /// Integrator statistics (master-equation runs only).
    pub stats: Option<StepStats>,
}

impl EvolutionResult {
    pub fn kets(&self) -> Option<&[HybridKet]> {
        match &self.states {
            EvolvedStates::Pure(v) => Some(v),
            EvolvedStates::Mixed(_) => None,
        }
    }

    pub fn densities(&self) -> Option<&[HybridDensity]> {
        match &self.states {
            EvolvedStates::Mixed(v) => Some(v),
            EvolvedStates::Pure(_) => None,
        }
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.norm_drift).fold(0.0, f64::max)
    }
}

/// Diagnostics of a run whose states were streamed to an observer.
#[derive(Clone, Debug)]
pub struct EvolutionSummary {
    pub grid: TimeGrid,
    pub diagnostics: Vec<SampleDiagnostics>,
    pub stats: Option<StepStats>,
}

impl AsRef<[SampleDiagnostics]> for EvolutionResult {
    fn as_ref(&self) -> &[SampleDiagnostics] {
        &self.diagnostics
    }
}

impl AsRef<[SampleDiagnostics]> for EvolutionSummary {
    fn as_ref(&self) -> &[SampleDiagnostics] {
        &self.diagnostics
    }
}

/// `exp(−iHt)` through a single eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct UnitaryPropagator {
    eig: HermitianEigen,
    vectors_dag: CMat,
}

impl UnitaryPropagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        let dev = h.hermiticity_deviation();
        let scale = linalg::max_abs(&h.entries().view()).max(f64::MIN_POSITIVE);
        if dev > 1e-12 * scale {
            return Err(QnloError::NonHermitianInput(dev));
        }
        let eig = HermitianEigen::new(&h.entries().view())?;
        let vectors_dag = linalg::dagger(&eig.vectors.view());
        Ok(Self { eig, vectors_dag })
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }

    /// Eigenbasis coefficients `V†ψ₀`, reusable across times.
    pub fn coefficients(&self, psi0: &HybridKet) -> Result<Array1<C64>> {
        if psi0.amplitudes().len() != self.dim() {
            return Err(QnloError::DimensionMismatch { expected: self.dim(), found: psi0.amplitudes().len() });
        }
        Ok(self.vectors_dag.dot(psi0.amplitudes()))
    }

    pub fn evolve_coefficients(&self, coeffs: &Array1<C64>, t: f64, trunc: FockTruncation) -> Result<HybridKet> {
        let phased = Array1::from_iter(
            coeffs.iter().zip(self.eig.values.iter()).map(|(c, e)| c * (-I * e * t).exp()),
        );
        HybridKet::new(trunc, self.eig.vectors.dot(&phased))
    }

    pub fn propagate(&self, psi0: &HybridKet, t: f64) -> Result<HybridKet> {
        let c = self.coefficients(psi0)?;
        self.evolve_coefficients(&c, t, *psi0.truncation())
    }

    /// The full unitary `exp(−iHt)`.
    pub fn unitary(&self, t: f64) -> CMat {
        self.eig.apply_fn(|e| (-I * e * t).exp())
    }
}

/// Exact closed-system evolution; every sample is certified against the
/// truncation of `psi0`.
pub fn evolve_unitary(h: &OperatorMatrix, psi0: &HybridKet, grid: &TimeGrid) -> Result<EvolutionResult> {
    let mut states = Vec::with_capacity(grid.n_samples());
    let summary = evolve_unitary_with(h, psi0, grid, |_, _, psi| {
        states.push(psi.clone());
        Ok(())
    })?;
    Ok(EvolutionResult {
        grid: summary.grid,
        states: EvolvedStates::Pure(states),
        diagnostics: summary.diagnostics,
        stats: None,
    })
}

/// Streaming form of [`evolve_unitary`]: `observer(i, tᵢ, ψ(tᵢ))` per sample.
pub fn evolve_unitary_with<O>(h: &OperatorMatrix, psi0: &HybridKet, grid: &TimeGrid, mut observer: O) -> Result<EvolutionSummary>
where
    O: FnMut(usize, f64, &HybridKet) -> Result<()>,
{
    let trunc = *psi0.truncation();
    let prop = UnitaryPropagator::new(h)?;
    let coeffs = prop.coefficients(psi0)?;
    let w0 = psi0.norm_sqr();
    let mut diagnostics = Vec::with_capacity(grid.n_samples());
    for (i, t) in grid.times().into_iter().enumerate() {
        let psi = prop.evolve_coefficients(&coeffs, t, trunc)?;
        diagnostics.push(SampleDiagnostics::of(&psi, t, w0, &trunc)?);
        observer(i, t, &psi)?;
    }
    Ok(EvolutionSummary { grid: *grid, diagnostics, stats: None })
}

/// Picture in which the master equation is handed to the integrator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Interaction picture of `H`; only the dissipator is integrated.
    #[default]
    Interaction,
    /// Direct integration of `−i[H, ρ] + D(ρ)`.
    Schrodinger,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindbladOptions {
    pub rtol: f64,
    pub atol: f64,
    /// `None` uses `1e-4 · (t_end − t_start)`.
    pub initial_step: Option<f64>,
    pub frame: Frame,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, initial_step: None, frame: Frame::Interaction }
    }
}

/// Master-equation evolution with every sample density kept.
///
/// Each stored density of dimension 162 takes ~420 kB; use
/// [`evolve_lindblad_with`] for long, finely sampled runs.
pub fn evolve_lindblad(
    gen: &LindbladGenerator,
    rho0: &HybridDensity,
    grid: &TimeGrid,
    opts: &LindbladOptions,
) -> Result<EvolutionResult> {
    let mut states = Vec::with_capacity(grid.n_samples());
    let summary = evolve_lindblad_with(gen, rho0, grid, opts, |_, _, rho| {
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(EvolutionResult {
        grid: summary.grid,
        states: EvolvedStates::Mixed(states),
        diagnostics: summary.diagnostics,
        stats: summary.stats,
    })
}

/// Streaming form of [`evolve_lindblad`].
pub fn evolve_lindblad_with<O>(
    gen: &LindbladGenerator,
    rho0: &HybridDensity,
    grid: &TimeGrid,
    opts: &LindbladOptions,
    observer: O,
) -> Result<EvolutionSummary>
where
    O: FnMut(usize, f64, &HybridDensity) -> Result<()>,
{
    let (diagnostics, stats) = evolve_lindblad_at(gen, rho0, grid.t_start(), &grid.times(), opts, observer)?;
    Ok(EvolutionSummary { grid: *grid, diagnostics, stats: Some(stats) })
}

/// Master-equation evolution from `t0` reported at arbitrary non-decreasing
/// `times ≥ t0`.
pub fn evolve_lindblad_at<O>(
    gen: &LindbladGenerator,
    rho0: &HybridDensity,
    t0: f64,
    times: &[f64],
    opts: &LindbladOptions,
    mut observer: O,
) -> Result<(Vec<SampleDiagnostics>, StepStats)>
where
    O: FnMut(usize, f64, &HybridDensity) -> Result<()>,
{
    let trunc = *gen.truncation();
    if rho0.entries().nrows() != trunc.hybrid_dim() {
        return Err(QnloError::DimensionMismatch { expected: trunc.hybrid_dim(), found: rho0.entries().nrows() });
    }
    let w0 = rho0.trace();
    let ode_opts = Dopri5Options {
        rtol: opts.rtol,
        atol: opts.atol,
        initial_step: opts.initial_step,
        ..Default::default()
    };
    let mut diagnostics = Vec::with_capacity(times.len());
    let mut emit = |i: usize, t: f64, rho: HybridDensity| -> Result<()> {
        diagnostics.push(SampleDiagnostics::of(&rho, t, w0, &trunc)?);
        observer(i, t, &rho)
    };
    let symmetrize = |_: f64, y: &mut CMat| *y = linalg::hermitize(&y.view());

    let stats = match opts.frame {
        Frame::Schrodinger => ode::integrate(
            |_, rho| gen.apply(rho),
            t0,
            rho0.entries().clone(),
            times,
            &ode_opts,
            symmetrize,
            |i, t, y| emit(i, t, HybridDensity::from_raw(trunc, y.clone())),
        )?,
        Frame::Interaction => {
            let frame = InteractionFrame::new(gen)?;
            let y0 = frame.to_interaction(rho0.entries(), t0);
            ode::integrate(
                |t, y| frame.dissipator(t, y),
                t0,
                y0,
                times,
                &ode_opts,
                symmetrize,
                |i, t, y| emit(i, t, HybridDensity::from_raw(trunc, frame.to_schrodinger(y, t))),
            )?
        }
    };
    Ok((diagnostics, stats))
}

/// Interaction picture of `H = V E V†`: `ρ̃ = U(t) V†ρV U†(t)` with
/// `U = diag(e^{iE t})`.
struct InteractionFrame {
    energies: Array1<f64>,
    vectors: CMat,
    vectors_dag: CMat,
    jump: CMat,
    number: CMat,
    gamma: f64,
}

impl InteractionFrame {
    fn new(gen: &LindbladGenerator) -> Result<Self> {
        let eig = HermitianEigen::new(&gen.hamiltonian().view())?;
        let vectors_dag = linalg::dagger(&eig.vectors.view());
        let jump = vectors_dag.dot(gen.jump_operator()).dot(&eig.vectors);
        let number = linalg::dagger(&jump.view()).dot(&jump);
        Ok(Self { energies: eig.values, vectors: eig.vectors, vectors_dag, jump, number, gamma: gen.gamma() })
    }

    fn phases(&self, t: f64) -> Array1<C64> {
        self.energies.mapv(|e| (I * e * t).exp())
    }

    /// `M ∘ (u u†)` with `u = e^{iEt}`.
    fn rotate(m: &CMat, u: &Array1<C64>) -> CMat {
        let uc = u.mapv(|z| z.conj());
        let mut out = m * &u.view().insert_axis(Axis(1));
        out *= &uc.view().insert_axis(Axis(0));
        out
    }

    fn to_interaction(&self, rho: &CMat, t: f64) -> CMat {
        let eb = self.vectors_dag.dot(rho).dot(&self.vectors);
        Self::rotate(&eb, &self.phases(t))
    }

    fn to_schrodinger(&self, rho_tilde: &CMat, t: f64) -> CMat {
        let u = self.phases(t).mapv(|z| z.conj());
        let eb = Self::rotate(rho_tilde, &u);
        linalg::hermitize(&self.vectors.dot(&eb).dot(&self.vectors_dag).view())
    }

    /// `(γ/2)(2ãρã† − Ñρ − ρÑ)`.
    fn dissipator(&self, t: f64, rho: &CMat) -> CMat {
        if self.gamma == 0.0 {
            return CMat::zeros(rho.raw_dim());
        }
        let u = self.phases(t);
        let a = Self::rotate(&self.jump, &u);
        let n = Self::rotate(&self.number, &u);
        let a_rho = a.dot(rho);
        let mut out = a_rho.dot(&linalg::dagger(&a.view()));
        out.mapv_inplace(|z| z * self.gamma);
        let n_rho = n.dot(rho);
        let g = C64::new(-0.5 * self.gamma, 0.0);
        out.scaled_add(g, &n_rho);
        out.scaled_add(g, &linalg::dagger(&n_rho.view()));
        out
    }
}

/// Largest `δ⟨N⟩` seen during a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub max_metric: f64,
    pub t_at_max: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn validity_monitor<R: AsRef<[SampleDiagnostics]> + ?Sized>(result: &R, p: &ScaledParams) -> ValidityReport {
    let (max_metric, t_at_max) = result
        .as_ref()
        .iter()
        .map(|d| (p.delta * d.mean_phonon_number, d.t))
        .fold((0.0, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best });
    ValidityReport { max_metric, t_at_max, threshold: VALIDITY_THRESHOLD, passed: max_metric <= VALIDITY_THRESHOLD }
}
