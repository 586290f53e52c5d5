//! Dormand–Prince 5(4) integrator with step-size control and fifth-order-accurate
//! dense output (Hairer's continuous extension), specialised to matrix-valued
//! states.

use crate::linalg::CMat;
use crate::{QnloError, Result, C64};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; `None` picks `1e-4 · (t_end − t0)`.
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, initial_step: None, max_step: f64::INFINITY, max_steps: 2_000_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// `y ← y + Σ cᵢ·xᵢ`.
fn axpy_many(y: &mut CMat, terms: &[(f64, &CMat)]) {
    for &(c, x) in terms {
        if c != 0.0 {
            y.scaled_add(C64::new(c, 0.0), x);
        }
    }
}

fn combine(base: &CMat, h: f64, terms: &[(f64, &CMat)]) -> CMat {
    let mut y = base.clone();
    let scaled: Vec<(f64, &CMat)> = terms.iter().map(|&(c, x)| (h * c, x)).collect();
    axpy_many(&mut y, &scaled);
    y
}

fn error_norm(err: &CMat, y0: &CMat, y1: &CMat, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
        let sc = atol + rtol * a.norm().max(b.norm());
        acc += (e.norm() / sc).powi(2);
    }
    (acc / err.len().max(1) as f64).sqrt()
}

/// Integrates `dy/dt = f(t, y)` from `t0` through every time in `outputs`
/// (ascending, none before `t0`). `observe(i, tᵢ, y(tᵢ))` is called in order;
/// `post_step` may adjust the state after each accepted step.
pub fn integrate<F, P, O>(
    mut f: F,
    t0: f64,
    y0: CMat,
    outputs: &[f64],
    opts: &Dopri5Options,
    mut post_step: P,
    mut observe: O,
) -> Result<StepStats>
where
    F: FnMut(f64, &CMat) -> CMat,
    P: FnMut(f64, &mut CMat),
    O: FnMut(usize, f64, &CMat) -> Result<()>,
{
    let mut stats = StepStats::default();
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(QnloError::InvalidGrid("output times must be ascending and not precede t0".into()));
    }
    let Some(&t_end) = outputs.last() else {
        return Ok(stats);
    };

    let mut next = 0;
    while next < outputs.len() && outputs[next] == t0 {
        observe(next, t0, &y0)?;
        next += 1;
    }
    if next == outputs.len() {
        return Ok(stats);
    }

    let span = t_end - t0;
    let mut h = opts.initial_step.unwrap_or(1e-4 * span).min(opts.max_step).min(span);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut last_rejected = false;

    while next < outputs.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(QnloError::StepSizeUnderflow { t, h });
        }
        if h < 1e-13 * t.abs().max(1.0) {
            return Err(QnloError::StepSizeUnderflow { t, h });
        }
        let h_step = h.min(t_end - t);

        let k2 = f(t + C2 * h_step, &combine(&y, h_step, &[(A21, &k1)]));
        let k3 = f(t + C3 * h_step, &combine(&y, h_step, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h_step, &combine(&y, h_step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h_step, &combine(&y, h_step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            t + h_step,
            &combine(&y, h_step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = combine(&y, h_step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h_step, &y1);
        stats.evaluations += 6;

        let mut err = k1.mapv(|z| z * (h_step * E1));
        axpy_many(
            &mut err,
            &[(h_step * E3, &k3), (h_step * E4, &k4), (h_step * E5, &k5), (h_step * E6, &k6), (h_step * E7, &k7)],
        );
        let en = error_norm(&err, &y, &y1, opts.rtol, opts.atol);
        if !en.is_finite() {
            stats.rejected += 1;
            h = h_step * 0.1;
            last_rejected = true;
            continue;
        }

        if en <= 1.0 {
            let t1 = t + h_step;
            let is_last = t_end - t1 <= 1e-12 * t_end.abs().max(1.0);
            // dense output over (t, t1]
            let mut dense: Option<[CMat; 5]> = None;
            while next < outputs.len() && (outputs[next] <= t1 || is_last) {
                let to = outputs[next];
                if (to - t1).abs() <= 1e-14 * t1.abs().max(1.0) || is_last && to >= t1 {
                    let mut yo = y1.clone();
                    post_step(to, &mut yo);
                    observe(next, to, &yo)?;
                } else {
                    let r = dense.get_or_insert_with(|| {
                        let r2 = &y1 - &y;
                        let mut r3 = k1.mapv(|z| z * h_step);
                        r3 -= &r2;
                        let mut r4 = r2.clone();
                        r4.scaled_add(C64::new(-h_step, 0.0), &k7);
                        r4 -= &r3;
                        let mut r5 = k1.mapv(|z| z * (h_step * D1));
                        axpy_many(
                            &mut r5,
                            &[
                                (h_step * D3, &k3),
                                (h_step * D4, &k4),
                                (h_step * D5, &k5),
                                (h_step * D6, &k6),
                                (h_step * D7, &k7),
                            ],
                        );
                        [y.clone(), r2, r3, r4, r5]
                    });
                    let theta = (to - t) / h_step;
                    let mut yo = dense_eval(r, theta);
                    post_step(to, &mut yo);
                    observe(next, to, &yo)?;
                }
                next += 1;
            }

            t = t1;
            y = y1;
            post_step(t, &mut y);
            k1 = k7;
            stats.accepted += 1;

            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            let fac = if last_rejected { fac.min(1.0) } else { fac };
            h = (h_step * fac).min(opts.max_step);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h = h_step * (0.9 * en.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Ok(stats)
}

fn dense_eval(r: &[CMat; 5], theta: f64) -> CMat {
    let th1 = 1.0 - theta;
    // r1 + θ(r2 + θ1(r3 + θ(r4 + θ1·r5)))
    let mut acc = r[4].mapv(|z| z * th1);
    acc += &r[3];
    acc.mapv_inplace(|z| z * theta);
    acc += &r[2];
    acc.mapv_inplace(|z| z * th1);
    acc += &r[1];
    acc.mapv_inplace(|z| z * theta);
    acc += &r[0];
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn scalar(z: C64) -> CMat {
        Array2::from_elem((1, 1), z)
    }

    fn solve_exp(lambda: C64, outputs: &[f64], opts: &Dopri5Options) -> (Vec<C64>, StepStats) {
        let mut got = Vec::new();
        let stats = integrate(
            |_, y: &CMat| y.mapv(|z| z * lambda),
            0.0,
            scalar(C64::new(1.0, 0.0)),
            outputs,
            opts,
            |_, _| {},
            |_, _, y| {
                got.push(y[[0, 0]]);
                Ok(())
            },
        )
        .unwrap();
        (got, stats)
    }

    #[test]
    fn exponential_with_dense_output() {
        let lambda = C64::new(-0.3, 2.0);
        let outputs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let opts = Dopri5Options { rtol: 1e-8, atol: 1e-10, ..Default::default() };
        let (got, stats) = solve_exp(lambda, &outputs, &opts);
        assert_eq!(got.len(), outputs.len());
        for (t, y) in outputs.iter().zip(&got) {
            assert!((y - (lambda * t).exp()).norm() < 1e-7, "t = {t}");
        }
        // dense output leaves the step sequence untouched
        let (_, end_only) = solve_exp(lambda, &[10.0], &opts);
        assert_eq!(stats, end_only);
    }

    #[test]
    fn fixed_step_global_error_is_fifth_order() {
        let lambda = C64::new(0.0, 1.0);
        let err_at = |h: f64| {
            let opts = Dopri5Options { rtol: 1e3, atol: 1e3, initial_step: Some(h), max_step: h, ..Default::default() };
            let (got, _) = solve_exp(lambda, &[2.0], &opts);
            (got[0] - (lambda * 2.0).exp()).norm()
        };
        let ratio = err_at(0.2) / err_at(0.1);
        assert!(ratio > 25.0 && ratio < 45.0, "ratio {ratio}");
    }

    #[test]
    fn dense_output_is_higher_order_inside_a_step() {
        // one step of size h, sample at its midpoint
        let lambda = C64::new(0.0, 1.0);
        let err_at = |h: f64| {
            let opts = Dopri5Options { rtol: 1e3, atol: 1e3, initial_step: Some(h), max_step: h, ..Default::default() };
            let (got, _) = solve_exp(lambda, &[0.5 * h, h], &opts);
            (got[0] - (lambda * 0.5 * h).exp()).norm()
        };
        let ratio = err_at(0.4) / err_at(0.2);
        // local error O(h⁵) or better
        assert!(ratio > 28.0, "ratio {ratio}");
    }

    #[test]
    fn post_step_hook_and_initial_output() {
        let mut calls = 0;
        let mut seen = Vec::new();
        integrate(
            |_, y: &CMat| y.clone(),
            1.0,
            scalar(C64::new(2.0, 0.0)),
            &[1.0, 1.5],
            &Dopri5Options::default(),
            |_, _| calls += 1,
            |i, t, y| {
                seen.push((i, t, y[[0, 0]].re));
                Ok(())
            },
        )
        .unwrap();
        assert!(calls > 0);
        assert_eq!(seen[0], (0, 1.0, 2.0));
        assert!((seen[1].2 - 2.0 * 0.5f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn rejects_descending_outputs() {
        let r = integrate(
            |_, y: &CMat| y.clone(),
            0.0,
            scalar(C64::new(1.0, 0.0)),
            &[1.0, 0.5],
            &Dopri5Options::default(),
            |_, _| {},
            |_, _, _| Ok(()),
        );
        assert!(matches!(r, Err(QnloError::InvalidGrid(_))));
    }

    #[test]
    fn step_limit_reports_underflow() {
        let opts = Dopri5Options { max_steps: 3, ..Default::default() };
        let r = integrate(
            |_, y: &CMat| y.mapv(|z| z * C64::new(0.0, 50.0)),
            0.0,
            scalar(C64::new(1.0, 0.0)),
            &[100.0],
            &opts,
            |_, _| {},
            |_, _, _| Ok(()),
        );
        assert!(matches!(r, Err(QnloError::StepSizeUnderflow { .. })));
    }
}
