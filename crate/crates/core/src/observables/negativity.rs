use ndarray::s;
use serde::Serialize;

use crate::fock::{HybridDensity, HybridKet, HybridState};
use crate::linalg::{self, CMat};
use crate::{QnloError, Result};

/// Either kind of hybrid state, borrowed.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Ket(&'a HybridKet),
    Density(&'a HybridDensity),
}

impl<'a> From<&'a HybridKet> for StateRef<'a> {
    fn from(k: &'a HybridKet) -> Self {
        StateRef::Ket(k)
    }
}

impl<'a> From<&'a HybridDensity> for StateRef<'a> {
    fn from(d: &'a HybridDensity) -> Self {
        StateRef::Density(d)
    }
}

/// `raw = Σ|λ₋|` over negative eigenvalues of the qubit partial transpose
/// (at most ½ for a qubit); `normalized = 2·raw` reaches 1 for a maximally
/// entangled state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Negativity {
    pub raw: f64,
    pub normalized: f64,
}

impl Negativity {
    fn from_raw(raw: f64) -> Self {
        let raw = raw.max(0.0);
        Self { raw, normalized: 2.0 * raw }
    }
}

/// Negativity of a qubit ⊗ oscillator state.
///
/// Kets use the Schmidt form `raw = √det ρ_q`, which equals the
/// partial-transpose value for pure states; densities go through the
/// partial-transpose eigensolve.
pub fn negativity<'a>(state: impl Into<StateRef<'a>>) -> Result<Negativity> {
    match state.into() {
        StateRef::Ket(k) => Ok(pure_negativity(k)),
        StateRef::Density(d) => negativity_partial_transpose(d),
    }
}

fn pure_negativity(k: &HybridKet) -> Negativity {
    let up = k.branch(crate::fock::Branch::Up);
    let down = k.branch(crate::fock::Branch::Down);
    let nu: f64 = up.iter().map(|z| z.norm_sqr()).sum();
    if nu == 0.0 {
        return Negativity::from_raw(0.0);
    }
    let cross: crate::C64 = up.iter().zip(down.iter()).map(|(a, b)| a.conj() * b).sum();
    // det ρ_q = nu·‖d_⊥‖², with d_⊥ the part of the ↓ branch orthogonal to the ↑
    // branch; this avoids the cancellation in nu·nd − |⟨u|d⟩|² near zero.
    let c = cross / nu;
    let perp: f64 = up.iter().zip(down.iter()).map(|(a, b)| (b - c * a).norm_sqr()).sum();
    Negativity::from_raw((nu * perp).sqrt())
}

/// `½Σ(|λ| − λ)` over the spectrum of `ρ^{T_q}`.
pub fn negativity_partial_transpose(rho: &HybridDensity) -> Result<Negativity> {
    let dev = rho.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(QnloError::NonHermitianInput(dev));
    }
    let d = rho.truncation().dim();
    let e = rho.entries();
    let mut pt: CMat = e.clone();
    // swap the off-diagonal qubit blocks: ⟨i,m|ρ^{T_q}|j,n⟩ = ⟨j,m|ρ|i,n⟩
    pt.slice_mut(s![..d, d..]).assign(&e.slice(s![d.., ..d]));
    pt.slice_mut(s![d.., ..d]).assign(&e.slice(s![..d, d..]));
    let ev = linalg::eigvalsh(&pt.view())?;
    let raw = 0.5 * ev.iter().map(|l| l.abs() - l).sum::<f64>();
    Ok(Negativity::from_raw(raw))
}
