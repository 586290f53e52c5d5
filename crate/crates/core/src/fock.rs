//! Truncated Fock space, operators on it, and hybrid qubit ⊗ oscillator states.
//!
//! Truncation keeps levels `0..=n_max`. The last `margin` levels form a guard
//! band: a state is trusted only while its population there stays below
//! `tail_tol`, and operator identities are compared on the certified block
//! `0..=n_max - margin` where truncation has not touched them.
//!
//! The truncated ladder operators satisfy `[a, a†] = I` everywhere except the
//! corner entry `(n_max, n_max)`, which equals `-n_max`. That defect is left
//! in place and monitored through [`check_truncation`].

use ndarray::{s, Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMat, CVec, ONE, ZERO};
use crate::{QnloError, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockTruncation {
    n_max: usize,
    tail_tol: f64,
    margin: usize,
}

impl FockTruncation {
    pub const DEFAULT_N_MAX: usize = 80;
    pub const DEFAULT_MARGIN: usize = 5;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

    /// Default guard band (5 levels) and tail tolerance (1e-9).
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_margin(n_max, Self::DEFAULT_MARGIN, Self::DEFAULT_TAIL_TOL)
    }

    pub fn with_margin(n_max: usize, margin: usize, tail_tol: f64) -> Result<Self> {
        if n_max < margin + 1 {
            return Err(QnloError::InvalidTruncation(format!(
                "n_max = {n_max} must be at least margin + 1 = {}",
                margin + 1
            )));
        }
        if !(tail_tol > 0.0 && tail_tol.is_finite()) {
            return Err(QnloError::InvalidTruncation(format!("tail_tol must be positive, got {tail_tol}")));
        }
        Ok(Self { n_max, tail_tol, margin })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Oscillator dimension `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Qubit ⊗ oscillator dimension `2 (n_max + 1)`.
    pub fn hybrid_dim(&self) -> usize {
        2 * self.dim()
    }

    /// Number of levels outside the guard band, i.e. `0..=n_max - margin`.
    pub fn certified_levels(&self) -> usize {
        self.n_max - self.margin + 1
    }

    /// Largest coherent amplitude the truncation accepts.
    pub fn admits_amplitude(&self, amplitude: f64) -> bool {
        amplitude * amplitude + 6.0 * amplitude <= self.n_max as f64
    }

    fn require_amplitude(&self, amplitude: f64) -> Result<()> {
        if self.admits_amplitude(amplitude) {
            Ok(())
        } else {
            Err(QnloError::TruncationTooSmall { n_max: self.n_max, amplitude })
        }
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self {
            n_max: Self::DEFAULT_N_MAX,
            tail_tol: Self::DEFAULT_TAIL_TOL,
            margin: Self::DEFAULT_MARGIN,
        }
    }
}

/// Dense operator on the oscillator or hybrid space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: CMat,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(QnloError::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        Ok(Self { entries, hermitian: false })
    }

    /// Builds a Hermitian operator, symmetrizing away round-off.
    pub fn hermitian(entries: CMat) -> Result<Self> {
        let scale = linalg::max_abs(&entries.view()).max(f64::MIN_POSITIVE);
        let dev = linalg::hermiticity_deviation(&entries.view());
        if dev > 1e-10 * scale {
            return Err(QnloError::NonHermitianInput(dev));
        }
        Ok(Self { entries: linalg::hermitize(&entries.view()), hermitian: true })
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: linalg::identity(dim), hermitian: true }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.entries.view())
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: linalg::dagger(&self.entries.view()), hermitian: self.hermitian }
    }

    pub fn dot(&self, other: &Self) -> Self {
        Self { entries: self.entries.dot(&other.entries), hermitian: false }
    }

    pub fn apply(&self, v: &ArrayView1<C64>) -> CVec {
        self.entries.dot(v)
    }

    /// `self + c · other`; Hermiticity is kept when both are Hermitian and `c` is real.
    pub fn add_scaled(&self, c: C64, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.scaled_add(c, &other.entries);
        Self { entries, hermitian: self.hermitian && other.hermitian && c.im == 0.0 }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: self.entries.mapv(|z| z * c), hermitian: self.hermitian }
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.entries.view())
    }

    /// Upper-left `levels × levels` block.
    pub fn leading_block(&self, levels: usize) -> CMat {
        self.entries.slice(s![..levels, ..levels]).to_owned()
    }
}

pub fn annihilation(trunc: &FockTruncation) -> OperatorMatrix {
    let d = trunc.dim();
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix { entries: a, hermitian: false }
}

pub fn creation(trunc: &FockTruncation) -> OperatorMatrix {
    annihilation(trunc).adjoint()
}

pub fn number(trunc: &FockTruncation) -> OperatorMatrix {
    let diag = Array1::from_iter((0..trunc.dim()).map(|n| C64::new(n as f64, 0.0)));
    OperatorMatrix { entries: Array2::from_diag(&diag), hermitian: true }
}

/// `a† + a`.
pub fn position_sum(trunc: &FockTruncation) -> OperatorMatrix {
    let a = annihilation(trunc);
    let x = &a.entries + &linalg::dagger(&a.entries.view());
    OperatorMatrix { entries: x, hermitian: true }
}

/// Displacement operator `exp(α a† − α* a)` on the truncated space.
pub fn displacement(alpha: C64, trunc: &FockTruncation) -> Result<OperatorMatrix> {
    trunc.require_amplitude(alpha.norm())?;
    let a = annihilation(trunc).into_entries();
    let generator = &linalg::dagger(&a.view()) * alpha - &a * alpha.conj();
    let entries = linalg::expm(&generator.view())?;
    Ok(OperatorMatrix { entries, hermitian: false })
}

/// Coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩`, renormalized on the truncated space.
pub fn coherent_ket(alpha: C64, trunc: &FockTruncation) -> Result<CVec> {
    trunc.require_amplitude(alpha.norm())?;
    let mut v = Array1::zeros(trunc.dim());
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = c;
    for n in 1..trunc.dim() {
        c = c * alpha / (n as f64).sqrt();
        v[n] = c;
    }
    let norm = v.iter().map(|z: &C64| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / norm);
    Ok(v)
}

/// Fock state `|n⟩`.
pub fn fock_ket(n: usize, trunc: &FockTruncation) -> Result<CVec> {
    if n > trunc.n_max() {
        return Err(QnloError::DimensionMismatch { expected: trunc.dim(), found: n + 1 });
    }
    let mut v = Array1::zeros(trunc.dim());
    v[n] = ONE;
    Ok(v)
}

pub fn sigma_z() -> CMat {
    ndarray::array![[ONE, ZERO], [ZERO, -ONE]]
}

pub fn qubit_identity() -> CMat {
    linalg::identity(2)
}

/// `q_op ⊗ o_op` in the hybrid ordering (qubit index outermost).
pub fn qubit_tensor(q_op: &CMat, o_op: &OperatorMatrix) -> Result<OperatorMatrix> {
    if q_op.dim() != (2, 2) {
        return Err(QnloError::DimensionMismatch { expected: 2, found: q_op.nrows().max(q_op.ncols()) });
    }
    let q_herm = linalg::hermiticity_deviation(&q_op.view()) == 0.0;
    Ok(OperatorMatrix {
        entries: linalg::kron(&q_op.view(), &o_op.entries.view()),
        hermitian: q_herm && o_op.hermitian,
    })
}

/// Qubit basis index: ↑ is 0, ↓ is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Up,
    Down,
}

impl Branch {
    pub fn index(self) -> usize {
        match self {
            Branch::Up => 0,
            Branch::Down => 1,
        }
    }
}

/// Operations shared by pure and mixed hybrid states.
pub trait HybridState {
    fn truncation(&self) -> &FockTruncation;

    /// Oscillator block `⟨i|ρ|j⟩` for qubit indices `i, j`.
    fn qubit_block(&self, i: usize, j: usize) -> CMat;

    /// Population of each Fock level, summed over the qubit.
    fn fock_populations(&self) -> Array1<f64>;

    /// `Tr ρ` (squared norm for kets).
    fn total_weight(&self) -> f64;

    /// `Tr(ρ O)` for a hybrid-space operator.
    fn expectation(&self, op: &CMat) -> C64;

    fn to_density(&self) -> HybridDensity;

    fn n_max(&self) -> usize {
        self.truncation().n_max()
    }

    fn mean_phonon_number(&self) -> f64 {
        self.fock_populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Pure qubit ⊗ oscillator state, amplitudes ordered `(↑ block, ↓ block)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridKet {
    trunc: FockTruncation,
    amps: CVec,
}

impl HybridKet {
    pub fn new(trunc: FockTruncation, amps: CVec) -> Result<Self> {
        if amps.len() != trunc.hybrid_dim() {
            return Err(QnloError::DimensionMismatch { expected: trunc.hybrid_dim(), found: amps.len() });
        }
        Ok(Self { trunc, amps })
    }

    /// `|↑⟩ ⊗ up + |↓⟩ ⊗ down` (no normalization applied).
    pub fn from_branches(trunc: FockTruncation, up: &ArrayView1<C64>, down: &ArrayView1<C64>) -> Result<Self> {
        let d = trunc.dim();
        if up.len() != d || down.len() != d {
            return Err(QnloError::DimensionMismatch { expected: d, found: up.len().max(down.len()) });
        }
        let mut amps = Array1::zeros(2 * d);
        amps.slice_mut(s![..d]).assign(up);
        amps.slice_mut(s![d..]).assign(down);
        Ok(Self { trunc, amps })
    }

    /// `(c_up |↑⟩ + c_down |↓⟩) ⊗ osc`.
    pub fn product(trunc: FockTruncation, qubit: [C64; 2], osc: &ArrayView1<C64>) -> Result<Self> {
        let up = osc.mapv(|z| z * qubit[0]);
        let down = osc.mapv(|z| z * qubit[1]);
        Self::from_branches(trunc, &up.view(), &down.view())
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn branch(&self, b: Branch) -> ArrayView1<'_, C64> {
        let d = self.trunc.dim();
        match b {
            Branch::Up => self.amps.slice(s![..d]),
            Branch::Down => self.amps.slice(s![d..]),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amps.mapv_inplace(|z| z / n);
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<Self> {
        if op.dim() != self.amps.len() {
            return Err(QnloError::DimensionMismatch { expected: self.amps.len(), found: op.dim() });
        }
        Ok(Self { trunc: self.trunc, amps: op.apply(&self.amps.view()) })
    }
}

impl HybridState for HybridKet {
    fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    fn qubit_block(&self, i: usize, j: usize) -> CMat {
        let d = self.trunc.dim();
        let bi = self.amps.slice(s![i * d..(i + 1) * d]);
        let bj = self.amps.slice(s![j * d..(j + 1) * d]);
        Array2::from_shape_fn((d, d), |(m, n)| bi[m] * bj[n].conj())
    }

    fn fock_populations(&self) -> Array1<f64> {
        let d = self.trunc.dim();
        Array1::from_shape_fn(d, |n| self.amps[n].norm_sqr() + self.amps[n + d].norm_sqr())
    }

    fn total_weight(&self) -> f64 {
        self.norm_sqr()
    }

    fn expectation(&self, op: &CMat) -> C64 {
        let v = op.dot(&self.amps);
        self.amps.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    fn to_density(&self) -> HybridDensity {
        let n = self.amps.len();
        let entries = Array2::from_shape_fn((n, n), |(i, j)| self.amps[i] * self.amps[j].conj());
        HybridDensity { trunc: self.trunc, entries }
    }
}

/// Density operator on qubit ⊗ oscillator.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridDensity {
    trunc: FockTruncation,
    entries: CMat,
}

impl HybridDensity {
    /// Validates shape and Hermiticity (≤ 1e-10); the stored matrix is symmetrized.
    pub fn new(trunc: FockTruncation, entries: CMat) -> Result<Self> {
        let n = trunc.hybrid_dim();
        if entries.dim() != (n, n) {
            return Err(QnloError::DimensionMismatch { expected: n, found: entries.nrows() });
        }
        let dev = linalg::hermiticity_deviation(&entries.view());
        if dev > 1e-10 {
            return Err(QnloError::NonHermitianInput(dev));
        }
        Ok(Self { trunc, entries: linalg::hermitize(&entries.view()) })
    }

    /// Skips validation; callers guarantee a Hermitian matrix of the right shape.
    pub(crate) fn from_raw(trunc: FockTruncation, entries: CMat) -> Self {
        Self { trunc, entries }
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.entries.view()).re
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.entries.view())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::eigvalsh(&self.entries.view())?[0])
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let diff = &self.entries - &other.entries;
        let ev = linalg::eigvalsh(&linalg::hermitize(&diff.view()).view())?;
        Ok(0.5 * ev.iter().map(|l| l.abs()).sum::<f64>())
    }
}

impl HybridState for HybridDensity {
    fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    fn qubit_block(&self, i: usize, j: usize) -> CMat {
        let d = self.trunc.dim();
        self.entries.slice(s![i * d..(i + 1) * d, j * d..(j + 1) * d]).to_owned()
    }

    fn fock_populations(&self) -> Array1<f64> {
        let d = self.trunc.dim();
        Array1::from_shape_fn(d, |n| self.entries[[n, n]].re + self.entries[[n + d, n + d]].re)
    }

    fn total_weight(&self) -> f64 {
        self.trace()
    }

    fn expectation(&self, op: &CMat) -> C64 {
        // Tr(ρ O) = Σ_ij ρ_ij O_ji
        let n = self.entries.nrows();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.entries[[i, j]] * op[[j, i]];
            }
        }
        acc
    }

    fn to_density(&self) -> HybridDensity {
        self.clone()
    }
}

impl From<&HybridKet> for HybridDensity {
    fn from(ket: &HybridKet) -> Self {
        ket.to_density()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationReport {
    /// Population in levels `(n_max − margin, n_max]`.
    pub tail_population: f64,
    pub tail_tol: f64,
    pub passed: bool,
}

/// Guard-band population of `state` against `trunc.tail_tol()`.
pub fn check_truncation<S: HybridState + ?Sized>(state: &S, trunc: &FockTruncation) -> TruncationReport {
    let pops = state.fock_populations();
    let start = (trunc.n_max() + 1 - trunc.margin()).min(pops.len());
    let tail: f64 = pops.slice(s![start..]).sum();
    TruncationReport { tail_population: tail, tail_tol: trunc.tail_tol(), passed: tail < trunc.tail_tol() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n_max: usize) -> FockTruncation {
        FockTruncation::with_margin(n_max, 1, 1e-9).unwrap()
    }

    #[test]
    fn annihilation_elements() {
        let a = annihilation(&small(2));
        let e = a.entries();
        assert_eq!(e[[0, 1]], ONE);
        assert!((e[[1, 2]].re - 2f64.sqrt()).abs() < 1e-15);
        let nonzero = e.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn vacuum_is_annihilated_and_number_counts() {
        let t = small(6);
        let a = annihilation(&t);
        let vac = fock_ket(0, &t).unwrap();
        assert!(a.apply(&vac.view()).iter().all(|z| z.norm() == 0.0));
        let n_op = creation(&t).dot(&a);
        for n in 0..t.n_max() {
            let k = fock_ket(n, &t).unwrap();
            let out = n_op.apply(&k.view());
            assert!((out[n].re - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_corner_defect() {
        let t = small(7);
        let a = annihilation(&t);
        let ad = a.adjoint();
        let comm = &a.dot(&ad).entries - &ad.dot(&a).entries;
        for i in 0..t.dim() {
            for j in 0..t.dim() {
                let expected = if i != j {
                    0.0
                } else if i == t.n_max() {
                    -(t.n_max() as f64)
                } else {
                    1.0
                };
                assert!((comm[[i, j]].re - expected).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn truncation_rejects_small_n_max() {
        assert!(FockTruncation::new(5).is_err());
        assert!(FockTruncation::new(6).is_ok());
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let t = FockTruncation::new(20).unwrap();
        let d = displacement(ZERO, &t).unwrap();
        assert!(linalg::max_abs(&(d.entries() - &linalg::identity(t.dim())).view()) < 1e-14);
    }

    #[test]
    fn displaced_vacuum_mean_number() {
        let t = FockTruncation::new(40).unwrap();
        let d = displacement(C64::new(2.0, 0.0), &t).unwrap();
        let psi = d.apply(&fock_ket(0, &t).unwrap().view());
        let mean: f64 = psi.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum();
        assert!((mean - 4.0).abs() < 1e-6, "{mean}");
    }

    #[test]
    fn displacement_inverse_on_certified_block() {
        let t = FockTruncation::new(40).unwrap();
        let alpha = C64::new(1.3, -0.7);
        let prod = displacement(alpha, &t).unwrap().dot(&displacement(-alpha, &t).unwrap());
        let block = prod.leading_block(t.certified_levels());
        let id = linalg::identity(t.certified_levels());
        assert!(linalg::max_abs(&(&block - &id).view()) < 1e-9);
    }

    #[test]
    fn displacement_precondition() {
        let t = FockTruncation::new(10).unwrap();
        // 2² + 12 = 16 > 10
        assert!(matches!(
            displacement(C64::new(2.0, 0.0), &t),
            Err(QnloError::TruncationTooSmall { .. })
        ));
        assert!(coherent_ket(C64::new(2.0, 0.0), &t).is_err());
    }

    #[test]
    fn coherent_amplitudes() {
        let t = FockTruncation::new(40).unwrap();
        let v = coherent_ket(ZERO, &t).unwrap();
        assert_eq!(v[0], ONE);
        let v = coherent_ket(C64::new(2.0, 0.0), &t).unwrap();
        let expected = (-2.0f64).exp() * 16.0 / 24f64.sqrt();
        assert!((v[4].re - expected).abs() < 1e-14);
    }

    #[test]
    fn coherent_overlap_identity() {
        let t = FockTruncation::new(60).unwrap();
        let a = C64::new(1.2, 0.4);
        let b = C64::new(-0.3, 1.1);
        let va = coherent_ket(a, &t).unwrap();
        let vb = coherent_ket(b, &t).unwrap();
        let overlap: C64 = va.iter().zip(vb.iter()).map(|(x, y)| x.conj() * y).sum();
        let expected = (-(a.norm_sqr() + b.norm_sqr()) / 2.0 + a.conj() * b).exp();
        assert!((overlap - expected).norm() < 1e-12);
    }

    #[test]
    fn coherent_equals_displaced_vacuum() {
        let t = FockTruncation::new(40).unwrap();
        let alpha = C64::new(-1.5, 0.8);
        let direct = coherent_ket(alpha, &t).unwrap();
        let displaced = displacement(alpha, &t).unwrap().apply(&fock_ket(0, &t).unwrap().view());
        for n in 0..t.certified_levels() {
            assert!((direct[n] - displaced[n]).norm() < 1e-10);
        }
    }

    #[test]
    fn qubit_tensor_identity_and_pauli_action() {
        let t = small(4);
        let id = qubit_tensor(&qubit_identity(), &OperatorMatrix::identity(t.dim())).unwrap();
        assert_eq!(id.entries(), &linalg::identity(t.hybrid_dim()));

        let sz = qubit_tensor(&sigma_z(), &OperatorMatrix::identity(t.dim())).unwrap();
        let psi = Array1::from_iter((0..t.dim()).map(|n| C64::new(n as f64 + 1.0, -(n as f64))));
        let up = HybridKet::product(t, [ONE, ZERO], &psi.view()).unwrap();
        let down = HybridKet::product(t, [ZERO, ONE], &psi.view()).unwrap();
        assert_eq!(up.apply(&sz).unwrap().amplitudes(), up.amplitudes());
        assert_eq!(down.apply(&sz).unwrap().amplitudes(), &down.amplitudes().mapv(|z| -z));
    }

    #[test]
    fn qubit_tensor_sigma_z_position_elementwise() {
        // Element-by-element construction of σ_z ⊗ (a + a†) on n_max = 3.
        let t = small(3);
        let op = qubit_tensor(&sigma_z(), &position_sum(&t)).unwrap();
        let d = t.dim();
        for q in 0..2 {
            for qp in 0..2 {
                for n in 0..d {
                    for m in 0..d {
                        let sz = if q != qp { 0.0 } else if q == 0 { 1.0 } else { -1.0 };
                        let x = if m + 1 == n {
                            (n as f64).sqrt()
                        } else if n + 1 == m {
                            (m as f64).sqrt()
                        } else {
                            0.0
                        };
                        let got = op.entries()[[q * d + m, qp * d + n]];
                        assert!((got.re - sz * x).abs() < 1e-15 && got.im == 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_tensor_rejects_bad_qubit_operator() {
        let t = small(2);
        let bad = linalg::identity(3);
        assert!(matches!(
            qubit_tensor(&bad, &OperatorMatrix::identity(t.dim())),
            Err(QnloError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn truncation_report_vacuum_and_coherent() {
        let t = FockTruncation::new(40).unwrap();
        let vac = HybridKet::product(t, [ONE, ZERO], &fock_ket(0, &t).unwrap().view()).unwrap();
        let r = check_truncation(&vac, &t);
        assert_eq!(r.tail_population, 0.0);
        assert!(r.passed);

        // Poisson(4) mass on levels 6..=10 is ≈ 0.21; on 36..=40 it is < 1e-20.
        let small_t = FockTruncation::with_margin(10, 5, 1e-6).unwrap();
        let coh = coherent_ket(C64::new(2.0, 0.0), &FockTruncation::new(40).unwrap()).unwrap();
        let coh10 = coh.slice(s![..11]).to_owned();
        let psi = HybridKet::product(small_t, [ONE, ZERO], &coh10.view()).unwrap();
        let r = check_truncation(&psi, &small_t);
        assert!(!r.passed && r.tail_population > 1e-6);

        let tight = FockTruncation::with_margin(40, 5, 1e-10).unwrap();
        let psi = HybridKet::product(tight, [ONE, ZERO], &coh.view()).unwrap();
        assert!(check_truncation(&psi, &tight).passed);
    }

    #[test]
    fn density_from_ket_is_consistent() {
        let t = small(5);
        let osc = coherent_ket(C64::new(0.3, 0.2), &FockTruncation::new(30).unwrap()).unwrap();
        let osc = osc.slice(s![..6]).to_owned();
        let s2 = 0.5f64.sqrt();
        let ket = HybridKet::product(t, [C64::new(s2, 0.0), C64::new(0.0, s2)], &osc.view()).unwrap();
        let rho = ket.to_density();
        assert!((rho.trace() - ket.norm_sqr()).abs() < 1e-14);
        assert!(rho.hermiticity_deviation() < 1e-15);
        assert!((rho.purity() - ket.norm_sqr().powi(2)).abs() < 1e-14);
        let b = ket.qubit_block(0, 1);
        assert_eq!(b, rho.qubit_block(0, 1));
    }
}
