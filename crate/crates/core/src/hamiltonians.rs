//! Hamiltonian builders in scaled units (energies in ħω_o, time in 1/ω_o).
//!
//! The full model is `a†a + δ(a†+a)⁴ − kσ_z(a†+a)`. Its quartic term splits
//! into number-conserving, two-phonon and four-phonon pieces,
//!
//! ```text
//! (a†+a)⁴ = A₄ + A₂ + A_ns + 3
//! A₄   = a†⁴ + a⁴
//! A₂   = 6(a†² + a²) + 4(a†³a + a†a³)
//! A_ns = 6((a†a)² + a†a)
//! ```
//!
//! [`build_full_hamiltonian`] keeps `(a†+a)⁴` as is (constant included);
//! [`build_ladder_hamiltonian`] sums the pieces without the constant, so the
//! two differ by `3δ·I`, a global phase.
//!
//! The qubit frequency never enters the dynamics (σ_z commutes with every
//! term); it is carried in [`LabParams`] only.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::fock::{self, FockTruncation, OperatorMatrix};
use crate::linalg::{self, CMat, I};
use crate::{QnloError, Result, C64};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Above this value of `δ·⟨N⟩` the single-frequency picture of the
/// oscillator is no longer trusted.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

/// Laboratory-frame parameters (SI units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabParams {
    /// Qubit angular frequency (rad/s).
    pub omega_q: f64,
    /// Oscillator angular frequency (rad/s).
    pub omega_o: f64,
    /// Oscillator mass (kg).
    pub mass: f64,
    /// Coupling per unit displacement (rad/(s·m)).
    pub g_tilde: f64,
    /// Quartic strength (J/m⁴).
    pub delta_tilde: f64,
}

impl LabParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("omega_q", self.omega_q), ("omega_o", self.omega_o), ("mass", self.mass)];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QnloError::InvalidParameter { field, message: format!("must be > 0, got {v}") });
            }
        }
        for (field, v) in [("g_tilde", self.g_tilde), ("delta_tilde", self.delta_tilde)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(QnloError::InvalidParameter { field, message: format!("must be >= 0, got {v}") });
            }
        }
        Ok(())
    }
}

/// Dimensionless model parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    pub k: f64,
    pub delta: f64,
    /// Initial coherent amplitude.
    pub alpha: C64,
    /// Oscillator damping rate; zero for the closed system.
    pub gamma: f64,
    /// Laboratory parameters these were derived from, if any.
    pub lab: Option<LabParams>,
}

impl ScaledParams {
    pub fn new(k: f64, delta: f64, alpha: C64, gamma: f64) -> Result<Self> {
        let p = Self { k, delta, alpha, gamma, lab: None };
        p.validate()?;
        Ok(p)
    }

    /// Real initial amplitude, closed system.
    pub fn closed(k: f64, delta: f64, alpha: f64) -> Result<Self> {
        Self::new(k, delta, C64::new(alpha, 0.0), 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("k", self.k), ("delta", self.delta), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(QnloError::InvalidParameter { field, message: format!("must be >= 0, got {v}") });
            }
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(QnloError::InvalidParameter { field: "alpha", message: "must be finite".into() });
        }
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: C64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// A-priori estimate `δ (|α| + 2k)²` of `δ⟨N⟩`.
    pub fn validity_estimate(&self) -> f64 {
        self.delta * (self.alpha.norm() + 2.0 * self.k).powi(2)
    }

    pub fn within_validity(&self) -> bool {
        self.validity_estimate() <= VALIDITY_THRESHOLD
    }
}

/// Maps laboratory parameters to `(k, δ)`; `alpha` and `gamma` start at zero.
pub fn scale_params(lab: &LabParams) -> Result<ScaledParams> {
    lab.validate()?;
    let x_zpf_sq = HBAR / (2.0 * lab.mass * lab.omega_o);
    let g = lab.g_tilde * x_zpf_sq.sqrt();
    let delta = lab.delta_tilde / (HBAR * lab.omega_o) * x_zpf_sq * x_zpf_sq;
    Ok(ScaledParams { k: g / lab.omega_o, delta, alpha: C64::new(0.0, 0.0), gamma: 0.0, lab: Some(*lab) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhononLadderLevel {
    /// `A_ns` only.
    NumberStateOnly,
    /// `A_ns + A₂`.
    UpToTwoPhonon,
    /// `A_ns + A₂ + A₄`.
    Full,
}

impl PhononLadderLevel {
    pub fn label(self) -> &'static str {
        match self {
            PhononLadderLevel::NumberStateOnly => "number-state",
            PhononLadderLevel::UpToTwoPhonon => "two-phonon",
            PhononLadderLevel::Full => "full",
        }
    }
}

/// The three pieces of `(a†+a)⁴` on the oscillator space.
#[derive(Clone, Debug)]
pub struct QuarticTerms {
    pub four_phonon: CMat,
    pub two_phonon: CMat,
    pub number_state: CMat,
}

pub fn quartic_terms(trunc: &FockTruncation) -> QuarticTerms {
    let a = fock::annihilation(trunc).into_entries();
    let ad = linalg::dagger(&a.view());
    let n = ad.dot(&a);
    let a2 = a.dot(&a);
    let ad2 = ad.dot(&ad);
    let four_phonon = ad2.dot(&ad2) + a2.dot(&a2);
    let two_phonon = (&ad2 + &a2) * C64::new(6.0, 0.0) + (ad2.dot(&ad).dot(&a) + ad.dot(&a).dot(&a2)) * C64::new(4.0, 0.0);
    let number_state = (n.dot(&n) + &n) * C64::new(6.0, 0.0);
    QuarticTerms { four_phonon, two_phonon, number_state }
}

/// `(a†+a)⁴` computed as the square of `(a†+a)²`.
pub fn quartic_position(trunc: &FockTruncation) -> CMat {
    let x = fock::position_sum(trunc).into_entries();
    let x2 = x.dot(&x);
    x2.dot(&x2)
}

fn assemble(osc: CMat, k: f64, trunc: &FockTruncation) -> Result<OperatorMatrix> {
    let osc_part = fock::qubit_tensor(&fock::qubit_identity(), &OperatorMatrix::hermitian(osc)?)?;
    let coupling = fock::qubit_tensor(&fock::sigma_z(), &fock::position_sum(trunc))?;
    let h = osc_part.add_scaled(C64::new(-k, 0.0), &coupling);
    OperatorMatrix::hermitian(h.into_entries())
}

fn number_entries(trunc: &FockTruncation) -> CMat {
    fock::number(trunc).into_entries()
}

/// `a†a + δ(a†+a)⁴ − kσ_z(a†+a)`.
pub fn build_full_hamiltonian(p: &ScaledParams, trunc: &FockTruncation) -> Result<OperatorMatrix> {
    let mut osc = number_entries(trunc);
    if p.delta != 0.0 {
        osc.scaled_add(C64::new(p.delta, 0.0), &quartic_position(trunc));
    }
    assemble(osc, p.k, trunc)
}

/// `a†a + δ(A_ns [+ A₂ [+ A₄]]) − kσ_z(a†+a)`.
pub fn build_ladder_hamiltonian(
    p: &ScaledParams,
    level: PhononLadderLevel,
    trunc: &FockTruncation,
) -> Result<OperatorMatrix> {
    let terms = quartic_terms(trunc);
    let mut quartic = terms.number_state;
    if matches!(level, PhononLadderLevel::UpToTwoPhonon | PhononLadderLevel::Full) {
        quartic += &terms.two_phonon;
    }
    if level == PhononLadderLevel::Full {
        quartic += &terms.four_phonon;
    }
    let mut osc = number_entries(trunc);
    osc.scaled_add(C64::new(p.delta, 0.0), &quartic);
    assemble(osc, p.k, trunc)
}

/// `(1 + 6δ)a†a + 6δ(a†a)² − kσ_z(a†+a)`.
pub fn build_rwa_hamiltonian(p: &ScaledParams, trunc: &FockTruncation) -> Result<OperatorMatrix> {
    let diag = ndarray::Array1::from_iter((0..trunc.dim()).map(|n| {
        let n = n as f64;
        C64::new((1.0 + 6.0 * p.delta) * n + 6.0 * p.delta * n * n, 0.0)
    }));
    assemble(Array2::from_diag(&diag), p.k, trunc)
}

/// Zero-temperature oscillator damping,
/// `ρ ↦ −i[H, ρ] + (γ/2)(2aρa† − a†aρ − ρa†a)` with `a` acting as `I ⊗ a`.
///
/// Applied matrix-free: nothing of size `dim² × dim²` is ever formed.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    trunc: FockTruncation,
    h: CMat,
    a: CMat,
    a_dag: CMat,
    n: CMat,
    gamma: f64,
}

impl LindbladGenerator {
    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    /// Hybrid-space `I ⊗ a`.
    pub fn jump_operator(&self) -> &CMat {
        &self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        let h_rho = self.h.dot(rho);
        let rho_h = rho.dot(&self.h);
        let mut out = (&h_rho - &rho_h).mapv(|z| -I * z);
        if self.gamma != 0.0 {
            let jump = self.a.dot(rho).dot(&self.a_dag);
            let n_rho = self.n.dot(rho);
            let rho_n = rho.dot(&self.n);
            let g = C64::new(self.gamma / 2.0, 0.0);
            out.scaled_add(g * 2.0, &jump);
            out.scaled_add(-g, &n_rho);
            out.scaled_add(-g, &rho_n);
        }
        out
    }
}

pub fn build_lindblad_generator(p: &ScaledParams, h: &OperatorMatrix) -> Result<LindbladGenerator> {
    if !(p.gamma >= 0.0 && p.gamma.is_finite()) {
        return Err(QnloError::InvalidParameter { field: "gamma", message: format!("must be >= 0, got {}", p.gamma) });
    }
    let dim = h.dim();
    if dim % 2 != 0 || dim < 4 {
        return Err(QnloError::DimensionMismatch { expected: dim + 1, found: dim });
    }
    let n_max = dim / 2 - 1;
    let margin = FockTruncation::DEFAULT_MARGIN.min(n_max - 1);
    let trunc = FockTruncation::with_margin(n_max, margin, FockTruncation::DEFAULT_TAIL_TOL)?;
    build_lindblad_generator_with(p, h, trunc)
}

/// Same as [`build_lindblad_generator`] but keeps the caller's truncation
/// settings (margin, tail tolerance) for later certification.
pub fn build_lindblad_generator_with(
    p: &ScaledParams,
    h: &OperatorMatrix,
    trunc: FockTruncation,
) -> Result<LindbladGenerator> {
    if h.dim() != trunc.hybrid_dim() {
        return Err(QnloError::DimensionMismatch { expected: trunc.hybrid_dim(), found: h.dim() });
    }
    let a = fock::qubit_tensor(&fock::qubit_identity(), &fock::annihilation(&trunc))?.into_entries();
    let a_dag = linalg::dagger(&a.view());
    let n = a_dag.dot(&a);
    Ok(LindbladGenerator { trunc, h: h.entries().clone(), a, a_dag, n, gamma: p.gamma })
}
