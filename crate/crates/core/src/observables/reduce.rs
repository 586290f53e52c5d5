use serde::Serialize;

use crate::fock::{Branch, HybridState, OperatorMatrix};
use crate::linalg;
use crate::{Result, C64};

/// Reduced qubit state, index 0 = ↑.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitDensity {
    pub rho: [[C64; 2]; 2],
}

impl QubitDensity {
    /// `(2 Re ρ_↑↓, −2 Im ρ_↑↓, ρ_↑↑ − ρ_↓↓)`.
    pub fn bloch(&self) -> [f64; 3] {
        let c = self.rho[0][1];
        [2.0 * c.re, -2.0 * c.im, self.rho[0][0].re - self.rho[1][1].re]
    }

    pub fn coherence(&self) -> f64 {
        self.rho[0][1].norm()
    }

    pub fn sigma_z(&self) -> f64 {
        self.rho[0][0].re - self.rho[1][1].re
    }

    pub fn determinant(&self) -> f64 {
        (self.rho[0][0] * self.rho[1][1] - self.rho[0][1] * self.rho[1][0]).re
    }
}

/// `Tr_osc ρ`.
pub fn reduce_qubit<S: HybridState + ?Sized>(state: &S) -> QubitDensity {
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = linalg::trace(&state.qubit_block(i, j).view());
        }
    }
    QubitDensity { rho }
}

/// `Tr_q ρ = ⟨↑|ρ|↑⟩ + ⟨↓|ρ|↓⟩`.
pub fn reduce_osc<S: HybridState + ?Sized>(state: &S) -> Result<OperatorMatrix> {
    let mut m = state.qubit_block(0, 0);
    m += &state.qubit_block(1, 1);
    OperatorMatrix::hermitian(m)
}

/// `⟨b|ρ|b⟩` on the oscillator. Left unnormalized (trace = branch weight)
/// unless `normalize` is set.
pub fn conditioned_osc<S: HybridState + ?Sized>(state: &S, branch: Branch, normalize: bool) -> Result<OperatorMatrix> {
    let i = branch.index();
    let mut m = state.qubit_block(i, i);
    if normalize {
        let tr = linalg::trace(&m.view()).re;
        if tr > 0.0 {
            m.mapv_inplace(|z| z / tr);
        }
    }
    OperatorMatrix::hermitian(m)
}
