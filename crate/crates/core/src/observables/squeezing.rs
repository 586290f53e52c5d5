//! Quadrature squeezing with `x = (a + a†)/2`, `y = (a − a†)/2i` and rotated
//! pair `x_r = x cos φ + y sin φ`, `y_r = −x sin φ + y cos φ`.
//!
//! Coherent states have variance ¼ in every direction; normalized values
//! are divided by that baseline.

use serde::Serialize;

use crate::fock::OperatorMatrix;
use crate::{QnloError, Result, C64};

/// First and second moments of `a`, taken from a (possibly unnormalized)
/// oscillator operator and divided by its trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureMoments {
    pub mean_a: C64,
    pub mean_a2: C64,
    pub mean_n: f64,
}

impl QuadratureMoments {
    pub fn of(osc: &OperatorMatrix) -> Result<Self> {
        let rho = osc.entries();
        let tr = osc.trace().re;
        if !(tr > 0.0) {
            return Err(QnloError::InvalidParameter { field: "osc_state", message: format!("trace must be positive, got {tr}") });
        }
        let dim = rho.nrows();
        let mut mean_a = C64::new(0.0, 0.0);
        let mut mean_a2 = C64::new(0.0, 0.0);
        let mut mean_n = 0.0;
        // Tr(ρ a) = Σ_n √n ρ_{n, n−1}; Tr(ρ a²) = Σ_n √(n(n−1)) ρ_{n, n−2}
        for n in 0..dim {
            let nf = n as f64;
            mean_n += nf * rho[[n, n]].re;
            if n >= 1 {
                mean_a += rho[[n, n - 1]] * nf.sqrt();
            }
            if n >= 2 {
                mean_a2 += rho[[n, n - 2]] * (nf * (nf - 1.0)).sqrt();
            }
        }
        Ok(Self { mean_a: mean_a / tr, mean_a2: mean_a2 / tr, mean_n: mean_n / tr })
    }

    /// `(Var x, Var y, Cov(x, y))` with the symmetrized covariance.
    pub fn covariance(&self) -> (f64, f64, f64) {
        let (mx, my) = (self.mean_a.re, self.mean_a.im);
        let vx = (2.0 * self.mean_n + 1.0 + 2.0 * self.mean_a2.re) / 4.0 - mx * mx;
        let vy = (2.0 * self.mean_n + 1.0 - 2.0 * self.mean_a2.re) / 4.0 - my * my;
        let cxy = self.mean_a2.im / 2.0 - mx * my;
        (vx, vy, cxy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezingRecord {
    pub t: f64,
    /// Angle in `[0, π)` minimizing `Var y_r`.
    pub phi_star: f64,
    pub var_x_r: f64,
    pub var_y_r: f64,
    /// `var_x_r / ¼`.
    pub normalized_x: f64,
    /// `var_y_r / ¼`.
    pub normalized_y: f64,
}

impl SqueezingRecord {
    /// `normalized_x · normalized_y`; 1 for coherent states.
    pub fn uncertainty_product(&self) -> f64 {
        self.normalized_x * self.normalized_y
    }

    pub fn min_normalized_variance(&self) -> f64 {
        self.normalized_y
    }
}

/// Exact minimizer of `Var y_r(φ)` from the 2×2 covariance matrix.
pub fn squeezing_scan(osc: &OperatorMatrix, t: f64) -> Result<SqueezingRecord> {
    let (vx, vy, cxy) = QuadratureMoments::of(osc)?.covariance();
    // Var y_r(φ) = (vx + vy)/2 + (vy − vx)/2 · cos 2φ − cxy · sin 2φ
    let mean = 0.5 * (vx + vy);
    let radius = (0.25 * (vx - vy).powi(2) + cxy * cxy).sqrt();
    let mut phi = 0.5 * (2.0 * cxy).atan2(vx - vy);
    phi = phi.rem_euclid(std::f64::consts::PI);
    let var_y_r = mean - radius;
    let var_x_r = mean + radius;
    Ok(SqueezingRecord {
        t,
        phi_star: phi,
        var_x_r,
        var_y_r,
        normalized_x: 4.0 * var_x_r,
        normalized_y: 4.0 * var_y_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_ket, FockTruncation};
    use ndarray::{Array1, Array2};
    use std::f64::consts::PI;

    fn projector(v: &Array1<C64>) -> OperatorMatrix {
        let n = v.len();
        OperatorMatrix::hermitian(Array2::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj())).unwrap()
    }

    fn kerr_state(alpha: C64, chi: f64, trunc: &FockTruncation) -> Array1<C64> {
        let mut v = coherent_ket(alpha, trunc).unwrap();
        for (n, z) in v.iter_mut().enumerate() {
            *z *= C64::new(0.0, -chi * (n * n) as f64).exp();
        }
        v
    }

    #[test]
    fn coherent_state_is_unsqueezed() {
        let t = FockTruncation::new(40).unwrap();
        let r = squeezing_scan(&projector(&coherent_ket(C64::new(1.3, -0.6), &t).unwrap()), 0.0).unwrap();
        assert!((r.normalized_x - 1.0).abs() < 1e-10 && (r.normalized_y - 1.0).abs() < 1e-10);
        assert!((r.uncertainty_product() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kerr_moments_match_closed_form() {
        // e^{−iχN²}|α⟩: ⟨a⟩ = α e^{−iχ} exp(|α|²(e^{−2iχ} − 1)),
        // ⟨a²⟩ = α² e^{−4iχ} exp(|α|²(e^{−4iχ} − 1)).
        let t = FockTruncation::new(60).unwrap();
        let alpha = C64::new(2.0, 0.0);
        let i = C64::new(0.0, 1.0);
        for &chi in &[0.003, 0.02, 0.1] {
            let m = QuadratureMoments::of(&projector(&kerr_state(alpha, chi, &t))).unwrap();
            let n = alpha.norm_sqr();
            let a = alpha * (-i * chi).exp() * (n * ((-2.0 * i * chi).exp() - 1.0)).exp();
            let a2 = alpha * alpha * (-4.0 * i * chi).exp() * (n * ((-4.0 * i * chi).exp() - 1.0)).exp();
            assert!((m.mean_a - a).norm() < 1e-9);
            assert!((m.mean_a2 - a2).norm() < 1e-9);
            assert!((m.mean_n - n).abs() < 1e-9);

            let r = squeezing_scan(&projector(&kerr_state(alpha, chi, &t)), 0.0).unwrap();
            let (vx, vy, c) = m.covariance();
            let lo = 0.5 * (vx + vy) - (0.25 * (vx - vy).powi(2) + c * c).sqrt();
            assert!((r.var_y_r - lo).abs() < 1e-12);
            // brute-force angle search agrees
            let brute = (0..20000)
                .map(|k| {
                    let phi = PI * k as f64 / 20000.0;
                    let (s, co) = phi.sin_cos();
                    vx * s * s + vy * co * co - 2.0 * c * s * co
                })
                .fold(f64::INFINITY, f64::min);
            assert!((brute - r.var_y_r).abs() < 1e-6);
        }
        let r = squeezing_scan(&projector(&kerr_state(alpha, 0.02, &t)), 0.0).unwrap();
        assert!(r.normalized_y < 0.9);
        assert!(r.var_x_r * r.var_y_r >= 1.0 / 16.0 - 1e-12);
    }

    #[test]
    fn rotation_shifts_angle() {
        let t = FockTruncation::new(60).unwrap();
        let base = kerr_state(C64::new(2.0, 0.0), 0.02, &t);
        let r0 = squeezing_scan(&projector(&base), 0.0).unwrap();
        for &theta in &[0.3, 1.1, 2.9] {
            let rotated = Array1::from_iter(base.iter().enumerate().map(|(n, z)| z * C64::new(0.0, theta * n as f64).exp()));
            let r = squeezing_scan(&projector(&rotated), 0.0).unwrap();
            let shift = (r.phi_star - r0.phi_star - theta).rem_euclid(PI);
            assert!(shift.min(PI - shift) < 1e-8, "theta {theta}");
            assert!((r.var_y_r - r0.var_y_r).abs() < 1e-10);
        }
    }

    #[test]
    fn unnormalized_input_is_rescaled() {
        let t = FockTruncation::new(40).unwrap();
        let rho = projector(&kerr_state(C64::new(2.0, 0.0), 0.05, &t));
        let a = squeezing_scan(&rho, 0.0).unwrap();
        let b = squeezing_scan(&rho.scaled(0.5), 0.0).unwrap();
        assert!((a.var_y_r - b.var_y_r).abs() < 1e-12);
    }
}
