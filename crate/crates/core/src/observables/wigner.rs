//! Wigner functions in the α-plane: `β = x + iy`, a coherent state `|α₀⟩`
//! peaks at `(Re α₀, Im α₀)`, and
//!
//! ```text
//! W(β) = (2/π) Tr[ρ D(β) P D†(β)],   P = (−1)^{a†a}
//! ```
//!
//! With this prefactor `∫W dx dy = Tr ρ`, `π∫W² = Tr ρ²` and the vacuum
//! value at the origin is `2/π`. The position-representation kernel
//! `(1/πħ)∫⟨x+x′|ρ|x−x′⟩e^{−2iyx′/ħ}dx′` gives the same surface up to a
//! `√2` rescaling of both axes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ndarray::Array2;

use crate::fock::{self, FockTruncation, OperatorMatrix};
use crate::linalg;
use crate::{QnloError, Result, C64};

/// Largest grid step accepted by [`wigner`].
pub const MAX_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    /// `[-half_width, half_width]²` with the given step.
    pub fn square(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0 && step > 0.0) {
            return Err(QnloError::InvalidGrid(format!("half_width {half_width} and step {step} must be positive")));
        }
        let n = (2.0 * half_width / step).round() as usize + 1;
        Ok(Self { x_min: -half_width, x_max: half_width, nx: n, y_min: -half_width, y_max: half_width, ny: n })
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let d = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * d }).collect()
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 || !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(QnloError::InvalidGrid(format!("degenerate wigner grid {self:?}")));
        }
        let step = self.dx().max(self.dy());
        if step > MAX_STEP {
            return Err(QnloError::GridTooCoarse(step));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerConvention {
    /// `β = x + iy`, `W(β) = (2/π) Tr[ρ D(β) P D†(β)]`.
    AlphaPlane,
}

/// `values[[iy, ix]] = W(x[ix] + i y[iy])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Array2<f64>,
    pub convention: WignerConvention,
}

impl WignerGrid {
    pub fn dx(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn dy(&self) -> f64 {
        self.y[1] - self.y[0]
    }

    /// Riemann sum `Σ W Δx Δy`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.dx() * self.dy()
    }

    /// `π Σ W² Δx Δy`, which estimates `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        std::f64::consts::PI * self.values.iter().map(|w| w * w).sum::<f64>() * self.dx() * self.dy()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Position and value of the maximum.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for ((iy, ix), &w) in self.values.indexed_iter() {
            if w > best.2 {
                best = (self.x[ix], self.y[iy], w);
            }
        }
        best
    }

    fn same_axes(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }
}

fn require_hermitian(osc: &OperatorMatrix) -> Result<()> {
    let dev = osc.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(QnloError::NonHermitianInput(dev));
    }
    Ok(())
}

/// Largest `|β|` at which [`wigner`] is evaluated; beyond it the unscaled
/// Laguerre sums overflow before the Gaussian factor is applied.
pub const MAX_RADIUS: f64 = 17.0;

/// Wigner function of an oscillator operator on a rectangular grid.
///
/// Sums `Re Σ_L (2β)^L/√L! · Σ_n c_n^L ℓ_n^L(4|β|²)` over the diagonals
/// `c^L = ρ_{n,n+L}` of `ρ`, each inner series by Clenshaw recursion on the
/// normalized Laguerre functions and the outer one by Horner's rule.
/// `O(dim²)` per point, rows evaluated in parallel.
pub fn wigner(osc: &OperatorMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    require_hermitian(osc)?;
    let x = GridSpec::axis(spec.x_min, spec.x_max, spec.nx);
    let y = GridSpec::axis(spec.y_min, spec.y_max, spec.ny);
    let corner = spec.x_min.abs().max(spec.x_max.abs()).hypot(spec.y_min.abs().max(spec.y_max.abs()));
    if corner > MAX_RADIUS {
        return Err(QnloError::InvalidGrid(format!("wigner grid reaches |β| = {corner:.2} > {MAX_RADIUS}")));
    }
    let rho = osc.entries();
    let dim = rho.nrows();
    // diagonals[L][n] = ρ[n, n+L], doubled off the main diagonal
    let diagonals: Vec<Vec<C64>> = (0..dim)
        .map(|l| {
            let f = if l == 0 { 1.0 } else { 2.0 };
            (0..dim - l).map(|n| rho[[n, n + l]] * f).collect()
        })
        .collect();

    let rows: Vec<Vec<f64>> = y
        .par_iter()
        .map(|&yv| x.iter().map(|&xv| point(&diagonals, C64::new(xv, yv))).collect())
        .collect();
    let mut values = Array2::zeros((spec.ny, spec.nx));
    for (iy, row) in rows.into_iter().enumerate() {
        for (ix, v) in row.into_iter().enumerate() {
            values[[iy, ix]] = v;
        }
    }
    Ok(WignerGrid { x, y, values, convention: WignerConvention::AlphaPlane })
}

fn point(diagonals: &[Vec<C64>], beta: C64) -> f64 {
    let a2 = beta * 2.0;
    let x = a2.norm_sqr();
    let top = diagonals.len() - 1;
    let mut acc = diagonals[top][0];
    for l in (0..top).rev() {
        acc = laguerre_series(l, x, &diagonals[l]) + acc * a2 / ((l + 1) as f64).sqrt();
    }
    2.0 / std::f64::consts::PI * acc.re * (-0.5 * x).exp()
}

/// `Σ_n c_n ℓ_n^L(x)` with `ℓ_n^L = (−1)ⁿ √(L! n!/(L+n)!) L_n^L(x)`, by
/// Clenshaw recursion.
fn laguerre_series(l: usize, x: f64, c: &[C64]) -> C64 {
    let lf = l as f64;
    let len = c.len();
    let (mut y0, mut y1) = match len {
        1 => return c[0],
        _ => (c[len - 2], c[len - 1]),
    };
    for k in (2..len).rev() {
        let kf = k as f64;
        let lk = (lf + kf) * kf;
        let next0 = c[k - 2] - y1 * ((kf - 1.0) * (lf + kf - 1.0) / lk).sqrt();
        let next1 = y0 - y1 * ((lf + 2.0 * kf - 1.0) - x) / lk.sqrt();
        y0 = next0;
        y1 = next1;
    }
    y0 - y1 * ((lf + 1.0) - x) / (lf + 1.0).sqrt()
}

/// Direct evaluation `(2/π) Σ_n (−1)ⁿ ⟨n|D†(β) ρ D(β)|n⟩` with a matrix
/// displacement; slow, used as an independent check of [`wigner`]. Only
/// accurate while the displaced operator stays inside the truncation.
pub fn wigner_displaced_parity(osc: &OperatorMatrix, beta: C64) -> Result<f64> {
    require_hermitian(osc)?;
    let n_max = osc.dim() - 1;
    let trunc = FockTruncation::with_margin(n_max, 1, FockTruncation::DEFAULT_TAIL_TOL)?;
    let d = fock::displacement(beta, &trunc)?.into_entries();
    let m = linalg::dagger(&d.view()).dot(osc.entries()).dot(&d);
    let parity: f64 = m.diag().iter().enumerate().map(|(n, z)| if n % 2 == 0 { z.re } else { -z.re }).sum();
    Ok(2.0 * parity / std::f64::consts::PI)
}

/// `∫∫ W_↑ W_↓ dx dy` as a Riemann sum over identical grids.
pub fn wigner_overlap(w_up: &WignerGrid, w_down: &WignerGrid) -> Result<f64> {
    if !w_up.same_axes(w_down) {
        return Err(QnloError::GridMismatch);
    }
    let s: f64 = w_up.values.iter().zip(w_down.values.iter()).map(|(a, b)| a * b).sum();
    Ok(s * w_up.dx() * w_up.dy())
}

/// `Tr(ρ_↑ ρ_↓)/π`, the exact value of [`wigner_overlap`].
pub fn wigner_overlap_exact(rho_up: &OperatorMatrix, rho_down: &OperatorMatrix) -> Result<f64> {
    if rho_up.dim() != rho_down.dim() {
        return Err(QnloError::DimensionMismatch { expected: rho_up.dim(), found: rho_down.dim() });
    }
    // Tr(AB) = Σ_ij A_ij B_ji
    let a = rho_up.entries();
    let b = rho_down.entries();
    let mut acc = C64::new(0.0, 0.0);
    for ((i, j), &v) in a.indexed_iter() {
        acc += v * b[[j, i]];
    }
    Ok(acc.re / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_ket, fock_ket};
    use std::f64::consts::PI;

    fn projector(v: &ndarray::Array1<C64>, weight: f64) -> OperatorMatrix {
        let n = v.len();
        OperatorMatrix::hermitian(Array2::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj() * weight)).unwrap()
    }

    fn coherent(alpha: C64, n_max: usize) -> OperatorMatrix {
        projector(&coherent_ket(alpha, &FockTruncation::new(n_max).unwrap()).unwrap(), 1.0)
    }

    #[test]
    fn vacuum_profile() {
        let t = FockTruncation::new(20).unwrap();
        let vac = projector(&fock_ket(0, &t).unwrap(), 1.0);
        let g = wigner(&vac, &GridSpec::square(2.0, 0.1).unwrap()).unwrap();
        let (x, y, w) = g.argmax();
        assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
        assert!((w - 2.0 / PI).abs() < 1e-12);
        for ((iy, ix), &v) in g.values.indexed_iter() {
            let r2 = g.x[ix].powi(2) + g.y[iy].powi(2);
            assert!((v - 2.0 / PI * (-2.0 * r2).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_peak_location() {
        let g = wigner(&coherent(C64::new(2.0, 0.0), 40), &GridSpec::square(4.0, 0.1).unwrap()).unwrap();
        let (x, y, _) = g.argmax();
        assert!((x - 2.0).abs() < 1e-9 && y.abs() < 1e-9);
        let g = wigner(&coherent(C64::new(0.0, 1.5), 40), &GridSpec::square(3.0, 0.1).unwrap()).unwrap();
        let (x, y, _) = g.argmax();
        assert!(x.abs() < 1e-9 && (y - 1.5).abs() < 1e-9);
    }

    #[test]
    fn series_matches_displaced_parity() {
        // A mixed, non-Gaussian operator with complex coherences.
        let t = FockTruncation::new(40).unwrap();
        let cat = (coherent_ket(C64::new(1.2, 0.4), &t).unwrap() + coherent_ket(C64::new(-1.0, 0.3), &t).unwrap())
            .mapv(|z| z * 0.7);
        let two = fock_ket(2, &t).unwrap();
        let mut rho = projector(&cat, 0.6).into_entries();
        rho += &projector(&two, 0.3).into_entries();
        let rho = OperatorMatrix::hermitian(rho).unwrap();
        let spec = GridSpec { x_min: -1.5, x_max: 1.5, nx: 13, y_min: -1.0, y_max: 1.0, ny: 9 };
        let g = wigner(&rho, &spec).unwrap();
        for (iy, &y) in g.y.iter().enumerate() {
            for (ix, &x) in g.x.iter().enumerate() {
                let direct = wigner_displaced_parity(&rho, C64::new(x, y)).unwrap();
                assert!((direct - g.values[[iy, ix]]).abs() < 1e-9, "({x}, {y})");
            }
        }
    }

    #[test]
    fn stable_at_large_dimension_and_radius() {
        let t = FockTruncation::new(140).unwrap();
        let a0 = C64::new(4.0, -3.0);
        let rho = coherent(a0, 140);
        let g = wigner(&rho, &GridSpec::square(8.0, 0.25).unwrap()).unwrap();
        for (iy, &y) in g.y.iter().enumerate() {
            for (ix, &x) in g.x.iter().enumerate() {
                let exact = 2.0 / PI * (-2.0 * (C64::new(x, y) - a0).norm_sqr()).exp();
                assert!((g.values[[iy, ix]] - exact).abs() < 1e-9, "({x}, {y})");
            }
        }
        assert!((g.integral() - 1.0).abs() < 1e-6);

        let cat = (coherent_ket(C64::new(3.0, 1.0), &t).unwrap() + coherent_ket(C64::new(-2.5, -2.0), &t).unwrap())
            .mapv(|z| z * std::f64::consts::FRAC_1_SQRT_2);
        let rho = projector(&cat, 1.0);
        // spots where the displaced state stays well inside the truncation,
        // so the matrix-displacement reference is itself accurate
        for (x, y) in [(-4.0, -3.0), (-3.0, 0.0), (0.0, 0.0), (0.25, -1.5), (3.0, 5.0), (4.0, 2.0)] {
            let spot = GridSpec { x_min: x, x_max: x + 0.1, nx: 2, y_min: y, y_max: y + 0.1, ny: 2 };
            let w = wigner(&rho, &spot).unwrap().values[[0, 0]];
            let direct = wigner_displaced_parity(&rho, C64::new(x, y)).unwrap();
            assert!((direct - w).abs() < 1e-8, "({x}, {y}): {w} vs {direct}");
        }
        assert!(wigner(&rho, &GridSpec::square(13.0, 0.25).unwrap()).is_err());
    }

    #[test]
    fn normalization_purity_and_negativity() {
        let t = FockTruncation::new(30).unwrap();
        let one = projector(&fock_ket(1, &t).unwrap(), 1.0);
        let g = wigner(&one, &GridSpec::square(4.0, 0.05).unwrap()).unwrap();
        assert!((g.integral() - 1.0).abs() < 2e-3);
        assert!((g.purity() - 1.0).abs() < 2e-3);
        assert!((g.values[[80, 80]] + 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn overlap_identities() {
        let spec = GridSpec::square(5.0, 0.05).unwrap();
        let half = coherent(C64::new(1.0, 0.5), 40).scaled(0.5);
        let w = wigner(&half, &spec).unwrap();
        let grid = wigner_overlap(&w, &w).unwrap();
        let exact = wigner_overlap_exact(&half, &half).unwrap();
        assert!((exact - 0.25 / PI).abs() < 1e-12);
        assert!((grid - exact).abs() < 1e-6);

        let far = wigner(&coherent(C64::new(-3.0, 0.0), 40), &spec).unwrap();
        let near = wigner(&coherent(C64::new(3.0, 0.0), 40), &spec).unwrap();
        assert!(wigner_overlap(&far, &near).unwrap().abs() < 1e-10);
    }

    #[test]
    fn grid_errors() {
        let vac = OperatorMatrix::identity(5);
        assert!(matches!(wigner(&vac, &GridSpec::square(2.0, 0.3).unwrap()), Err(QnloError::GridTooCoarse(_))));
        let a = wigner(&vac, &GridSpec::square(1.0, 0.1).unwrap()).unwrap();
        let b = wigner(&vac, &GridSpec::square(1.0, 0.05).unwrap()).unwrap();
        assert!(matches!(wigner_overlap(&a, &b), Err(QnloError::GridMismatch)));
    }
}
