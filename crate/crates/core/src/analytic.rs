//! Closed-form states: the exact δ = 0 solution and the rotating-wave
//! wave function for weak coupling and weak nonlinearity.
//!
//! Both start from `(|↑⟩ + |↓⟩) ⊗ |α⟩ / √2`.

use std::sync::atomic::{AtomicBool, Ordering};

use ndarray::Array1;
use serde::Serialize;

use crate::fock::{self, FockTruncation, HybridKet, OperatorMatrix};
use crate::hamiltonians::ScaledParams;
use crate::linalg::I;
use crate::{QnloError, Result, C64};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `(|↑⟩ + |↓⟩) ⊗ |α⟩ / √2`.
pub fn initial_state(p: &ScaledParams, trunc: &FockTruncation) -> Result<HybridKet> {
    let osc = fock::coherent_ket(p.alpha, trunc)?;
    let c = C64::new(FRAC_1_SQRT_2, 0.0);
    HybridKet::product(*trunc, [c, c], &osc.view())
}

fn require_linear(p: &ScaledParams) -> Result<()> {
    if p.delta != 0.0 {
        return Err(QnloError::NonzeroDelta(p.delta));
    }
    Ok(())
}

/// Parameters of the δ = 0 state at time `t`:
///
/// ```text
/// |ψ(t)⟩ = e^{ik²(t − sin t)} (e^{Φ}|↑⟩|α_↑⟩ + e^{−Φ}|↓⟩|α_↓⟩) / √2
/// η = 1 − e^{−it},  Φ = ik·Im(αη),  α_↑↓ = αe^{−it} ± kη
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearSolution {
    pub t: f64,
    pub global_phase: f64,
    pub phase: C64,
    pub alpha_up: C64,
    pub alpha_down: C64,
    pub eta: C64,
}

impl LinearSolution {
    pub fn at(p: &ScaledParams, t: f64) -> Result<Self> {
        require_linear(p)?;
        let rot = (-I * t).exp();
        let eta = C64::new(1.0, 0.0) - rot;
        let k = p.k;
        Ok(Self {
            t,
            global_phase: k * k * (t - t.sin()),
            phase: I * k * (p.alpha * eta).im,
            alpha_up: p.alpha * rot + eta * k,
            alpha_down: p.alpha * rot - eta * k,
            eta,
        })
    }

    /// `|⟨α_↑|α_↓⟩| = exp(−2k²|η|²)`.
    pub fn branch_overlap_modulus(&self) -> f64 {
        (-(self.alpha_up - self.alpha_down).norm_sqr() / 2.0).exp()
    }

    pub fn state(&self, trunc: &FockTruncation) -> Result<HybridKet> {
        let up = fock::coherent_ket(self.alpha_up, trunc)?;
        let down = fock::coherent_ket(self.alpha_down, trunc)?;
        let g = (I * self.global_phase).exp() * FRAC_1_SQRT_2;
        let cu = g * self.phase.exp();
        let cd = g * (-self.phase).exp();
        HybridKet::from_branches(*trunc, &up.mapv(|z| z * cu).view(), &down.mapv(|z| z * cd).view())
    }
}

/// Exact δ = 0 state at time `t`.
pub fn linear_state(p: &ScaledParams, t: f64, trunc: &FockTruncation) -> Result<HybridKet> {
    LinearSolution::at(p, t)?.state(trunc)
}

/// Raw negativity `½√(1 − |⟨α_↑|α_↓⟩|²)` of the δ = 0 state.
pub fn linear_negativity_closed_form(p: &ScaledParams, t: f64) -> Result<f64> {
    let s = LinearSolution::at(p, t)?.branch_overlap_modulus();
    Ok(0.5 * (1.0 - s * s).max(0.0).sqrt())
}

/// `|ρ_↑↓| = ½ e^{4k²(cos t − 1)}` of the reduced qubit state at δ = 0.
pub fn linear_qubit_coherence(p: &ScaledParams, t: f64) -> Result<f64> {
    require_linear(p)?;
    Ok(0.5 * (4.0 * p.k * p.k * (t.cos() - 1.0)).exp())
}

/// Ingredients of the rotating-wave wave function at time `t`:
///
/// ```text
/// |ψ(t)⟩ = [D(+k) e^{−6itδN²} |↑⟩|α̃_↑⟩ + D(−k) e^{−6itδN²} |↓⟩|α̃_↓⟩] / √2
/// α̃_↑ = e^{−i(1+6δ)t}(α − k),  α̃_↓ = e^{−i(1+6δ)t}(α + k)
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RwaSolution {
    pub t: f64,
    pub kerr_phase_applied: bool,
    pub alpha_up_tilde: C64,
    pub alpha_down_tilde: C64,
    /// Displacement applied to the ↑ branch; the ↓ branch gets its negative.
    pub displacement: f64,
}

impl RwaSolution {
    pub fn at(p: &ScaledParams, t: f64) -> Result<Self> {
        require_real_alpha(p)?;
        let rot = (-I * (1.0 + 6.0 * p.delta) * t).exp();
        Ok(Self {
            t,
            kerr_phase_applied: p.delta != 0.0,
            alpha_up_tilde: rot * (p.alpha - p.k),
            alpha_down_tilde: rot * (p.alpha + p.k),
            displacement: p.k,
        })
    }
}

fn require_real_alpha(p: &ScaledParams) -> Result<()> {
    if p.alpha.im != 0.0 {
        return Err(QnloError::ComplexAlphaUnsupported { re: p.alpha.re, im: p.alpha.im });
    }
    Ok(())
}

/// Reusable evaluator of the rotating-wave state; the two displacement
/// matrices are built once.
#[derive(Debug)]
pub struct RwaPropagator {
    params: ScaledParams,
    trunc: FockTruncation,
    d_plus: OperatorMatrix,
    d_minus: OperatorMatrix,
    warned: AtomicBool,
}

impl RwaPropagator {
    pub fn new(p: &ScaledParams, trunc: &FockTruncation) -> Result<Self> {
        require_real_alpha(p)?;
        let k = C64::new(p.k, 0.0);
        Ok(Self {
            params: *p,
            trunc: *trunc,
            d_plus: fock::displacement(k, trunc)?,
            d_minus: fock::displacement(-k, trunc)?,
            warned: AtomicBool::new(false),
        })
    }

    /// Size of the neglected `kδ` corrections, `k·δ·t·n_max²`.
    pub fn neglected_term_estimate(&self, t: f64) -> f64 {
        let n = self.trunc.n_max() as f64;
        self.params.k * self.params.delta * t.abs() * n * n
    }

    pub fn state(&self, t: f64) -> Result<HybridKet> {
        if self.neglected_term_estimate(t) > 0.01 && !self.warned.swap(true, Ordering::Relaxed) {
            log::warn!(
                "rotating-wave state used beyond its estimated accuracy (k·δ·t·n_max² = {:.3} at t = {t:.3})",
                self.neglected_term_estimate(t)
            );
        }
        let sol = RwaSolution::at(&self.params, t)?;
        let delta = self.params.delta;
        let kerr = Array1::from_iter((0..self.trunc.dim()).map(|n| {
            let n = n as f64;
            (-I * 6.0 * t * delta * n * n).exp()
        }));
        let branch = |alpha: C64, d: &OperatorMatrix| -> Result<_> {
            let coh = fock::coherent_ket(alpha, &self.trunc)?;
            let phased = &coh * &kerr;
            Ok(d.apply(&phased.view()).mapv(|z| z * FRAC_1_SQRT_2))
        };
        let up = branch(sol.alpha_up_tilde, &self.d_plus)?;
        let down = branch(sol.alpha_down_tilde, &self.d_minus)?;
        HybridKet::from_branches(self.trunc, &up.view(), &down.view())
    }
}

/// Rotating-wave state at time `t` (requires real α).
pub fn rwa_state(p: &ScaledParams, t: f64, trunc: &FockTruncation) -> Result<HybridKet> {
    RwaPropagator::new(p, trunc)?.state(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::HybridState;
    use std::f64::consts::PI;

    fn trunc() -> FockTruncation {
        FockTruncation::new(60).unwrap()
    }

    #[test]
    fn linear_state_at_zero_is_initial() {
        let p = ScaledParams::new(0.5, 0.0, C64::new(2.0, 0.3), 0.0).unwrap();
        let a = linear_state(&p, 0.0, &trunc()).unwrap();
        let b = initial_state(&p, &trunc()).unwrap();
        assert!((a.inner(&b) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn linear_state_period() {
        let p = ScaledParams::closed(0.5, 0.0, 2.0).unwrap();
        let t = trunc();
        let a = linear_state(&p, 0.0, &t).unwrap();
        let b = linear_state(&p, 2.0 * PI, &t).unwrap();
        assert!((a.fidelity(&b) - 1.0).abs() < 1e-9);
        let c = linear_state(&p, 0.7, &t).unwrap();
        let d = linear_state(&p, 0.7 + 2.0 * PI, &t).unwrap();
        assert!((c.fidelity(&d) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn branch_separation_at_half_period() {
        let p = ScaledParams::closed(0.5, 0.0, 2.0).unwrap();
        let s = LinearSolution::at(&p, PI).unwrap();
        assert!(((s.alpha_up - s.alpha_down).norm() - 2.0).abs() < 1e-12);
        assert!(((s.alpha_up - s.alpha_down).norm() - 2.0 * p.k * s.eta.norm()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_values() {
        let p = ScaledParams::closed(0.5, 0.0, 2.0).unwrap();
        assert_eq!(linear_negativity_closed_form(&p, 0.0).unwrap(), 0.0);
        assert!(linear_negativity_closed_form(&p, 2.0 * PI).unwrap() < 1e-7);
        let n = linear_negativity_closed_form(&p, PI).unwrap();
        assert!((n - 0.5 * (1.0 - (-4f64).exp()).sqrt()).abs() < 1e-14);
        assert!((n - 0.49540).abs() < 1e-5);
        assert!((linear_qubit_coherence(&p, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((linear_qubit_coherence(&p, PI).unwrap() - 0.06767).abs() < 1e-5);
    }

    #[test]
    fn nonzero_delta_rejected() {
        let p = ScaledParams::closed(0.5, 0.01, 2.0).unwrap();
        assert!(matches!(linear_state(&p, 1.0, &trunc()), Err(QnloError::NonzeroDelta(_))));
        assert!(linear_negativity_closed_form(&p, 1.0).is_err());
        assert!(linear_qubit_coherence(&p, 1.0).is_err());
    }

    #[test]
    fn linear_state_is_normalized() {
        let p = ScaledParams::new(0.5, 0.0, C64::new(1.5, -1.0), 0.0).unwrap();
        for i in 0..20 {
            let psi = linear_state(&p, i as f64 * 0.37, &trunc()).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_state_matches_direct_propagation() {
        // exp(−iHt) from the full Hamiltonian at δ = 0, including complex α.
        let t = trunc();
        let p = ScaledParams::new(0.25, 0.0, C64::new(1.2, 0.7), 0.0).unwrap();
        let h = crate::hamiltonians::build_full_hamiltonian(&p, &t).unwrap();
        let eig = crate::linalg::HermitianEigen::new(&h.entries().view()).unwrap();
        let psi0 = initial_state(&p, &t).unwrap();
        for &time in &[0.4, 1.9, PI, 5.1] {
            let u = eig.apply_fn(|e| (-I * e * time).exp());
            let numeric = HybridKet::new(t, u.dot(psi0.amplitudes())).unwrap();
            let exact = linear_state(&p, time, &t).unwrap();
            // global phases are kept, so compare amplitudes directly
            assert!((numeric.inner(&exact) - C64::new(1.0, 0.0)).norm() < 1e-9, "t = {time}");
        }
    }

    #[test]
    fn rwa_reduces_to_linear_at_zero_delta() {
        let t = trunc();
        let p = ScaledParams::closed(0.3, 0.0, 2.0).unwrap();
        let prop = RwaPropagator::new(&p, &t).unwrap();
        for &time in &[0.0, 0.8, PI, 4.4] {
            let a = prop.state(time).unwrap();
            let b = linear_state(&p, time, &t).unwrap();
            assert!(a.fidelity(&b) >= 1.0 - 1e-9);
            // the two differ by exactly e^{−ik²t}
            let phase = b.inner(&a);
            assert!((phase - (-I * p.k * p.k * time).exp()).norm() < 1e-9);
        }
    }

    #[test]
    fn rwa_initial_and_norm() {
        let t = trunc();
        let p = ScaledParams::closed(0.01, 0.001, 2.0).unwrap();
        let a = rwa_state(&p, 0.0, &t).unwrap();
        let b = initial_state(&p, &t).unwrap();
        assert!(a.fidelity(&b) > 1.0 - 1e-12);
        for i in 0..10 {
            assert!((rwa_state(&p, i as f64 * 2.5, &t).unwrap().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rwa_rejects_complex_alpha() {
        let p = ScaledParams::new(0.01, 0.001, C64::new(2.0, 0.1), 0.0).unwrap();
        assert!(matches!(rwa_state(&p, 1.0, &trunc()), Err(QnloError::ComplexAlphaUnsupported { .. })));
    }

    #[test]
    fn rwa_tilde_amplitudes() {
        let p = ScaledParams::closed(0.01, 0.001, 2.0).unwrap();
        let s = RwaSolution::at(&p, 1.3).unwrap();
        let rot = (-I * 1.006 * 1.3).exp();
        assert!((s.alpha_up_tilde - rot * 1.99).norm() < 1e-14);
        assert!((s.alpha_down_tilde - rot * 2.01).norm() < 1e-14);
        assert!(s.kerr_phase_applied);
    }

    #[test]
    fn coherence_matches_partial_trace() {
        let t = trunc();
        let p = ScaledParams::closed(0.5, 0.0, 2.0).unwrap();
        for i in 0..16 {
            let time = i as f64 * PI / 8.0;
            let psi = linear_state(&p, time, &t).unwrap();
            let b = psi.qubit_block(0, 1);
            let rho01 = crate::linalg::trace(&b.view());
            assert!((rho01.norm() - linear_qubit_coherence(&p, time).unwrap()).abs() < 1e-10);
        }
    }
}
