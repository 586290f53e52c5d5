use serde::{Deserialize, Serialize};

use crate::{QnloError, Result};

/// A sampled observable `values[i]` at times `t[i]` (scaled time).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub label: String,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() {
            return Err(QnloError::DimensionMismatch { expected: t.len(), found: values.len() });
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QnloError::InvalidGrid("time samples must be strictly increasing".into()));
        }
        Ok(Self { label: label.into(), t, values })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(t, value)` at the largest value.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.t
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(f64, f64)>, (&t, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((t, v)),
            })
    }

    /// Values with `lo ≤ t ≤ hi` (a small relative slack absorbs grid round-off).
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let slack = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
        self.t
            .iter()
            .zip(&self.values)
            .filter(move |(&t, _)| t >= lo - slack && t <= hi + slack)
            .map(|(&t, &v)| (t, v))
    }

    pub fn min_in(&self, lo: f64, hi: f64) -> Option<f64> {
        self.window(lo, hi).map(|(_, v)| v).reduce(f64::min)
    }

    pub fn max_in(&self, lo: f64, hi: f64) -> Option<f64> {
        self.window(lo, hi).map(|(_, v)| v).reduce(f64::max)
    }

    pub fn peak_to_peak_in(&self, lo: f64, hi: f64) -> Option<f64> {
        Some(self.max_in(lo, hi)? - self.min_in(lo, hi)?)
    }

    pub fn mean_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let (n, s) = self.window(lo, hi).fold((0usize, 0.0), |(n, s), (_, v)| (n + 1, s + v));
        (n > 0).then(|| s / n as f64)
    }

    /// Value at the sample nearest to `t`.
    pub fn nearest(&self, t: f64) -> Option<f64> {
        self.t
            .iter()
            .zip(&self.values)
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
            .map(|(_, &v)| v)
    }

    /// `max |self − other|` over shared sample times.
    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.t.len() != other.t.len() {
            return Err(QnloError::DimensionMismatch { expected: self.t.len(), found: other.t.len() });
        }
        if self.t.iter().zip(&other.t).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0)) {
            return Err(QnloError::InvalidGrid("series are sampled at different times".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}
