//! Detection of the time window in which a series stops oscillating.
//!
//! Every sample is the centre of a window of width `window` (clipped at the
//! series ends). A centre is *quiet* when the window's peak-to-peak spread,
//! divided by the series maximum, is below `threshold` and the window mean
//! reaches `min_level` times the series maximum. The plateau is the longest
//! run of consecutive quiet centres.

use serde::{Deserialize, Serialize};

use super::series::TimeSeries;
use crate::{QnloError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlateauOptions {
    pub window: f64,
    pub threshold: f64,
    pub min_level: f64,
}

impl Default for PlateauOptions {
    fn default() -> Self {
        Self { window: 2.0 * std::f64::consts::PI, threshold: 0.05, min_level: 0.5 }
    }
}

impl PlateauOptions {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlateauReport {
    pub t_lo: f64,
    pub t_hi: f64,
    /// `t_hi − t_lo`.
    pub width: f64,
    /// Largest relative spread among the plateau's windows.
    pub spread: f64,
    pub mean: f64,
}

impl PlateauReport {
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let slack = 1e-9 * hi.abs().max(1.0);
        self.t_lo <= lo + slack && self.t_hi >= hi - slack
    }
}

/// Longest quiet window, or `None` when the series never settles.
pub fn plateau_detect(series: &TimeSeries, opts: &PlateauOptions) -> Result<Option<PlateauReport>> {
    let n = series.len();
    if n < 100 {
        return Err(QnloError::InvalidGrid(format!("plateau detection needs at least 100 samples, got {n}")));
    }
    if !(opts.window > 0.0 && opts.threshold > 0.0) {
        return Err(QnloError::InvalidParameter { field: "plateau", message: "window and threshold must be positive".into() });
    }
    let t = &series.t;
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(QnloError::InvalidGrid("plateau detection needs uniform sampling".into()));
    }
    let v = &series.values;
    let vmax = series.max();
    let half = ((0.5 * opts.window) / dt).round() as usize;

    let mut spreads = Vec::with_capacity(n);
    let mut means = Vec::with_capacity(n);
    let mut quiet = Vec::with_capacity(n);
    for i in 0..n {
        let w = &v[i.saturating_sub(half)..(i + half + 1).min(n)];
        let (lo, hi, sum) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), &x| (lo.min(x), hi.max(x), s + x));
        let ptp = hi - lo;
        let spread = if ptp == 0.0 { 0.0 } else { ptp / vmax.abs() };
        let mean = sum / w.len() as f64;
        spreads.push(spread);
        means.push(mean);
        quiet.push(spread < opts.threshold && mean >= opts.min_level * vmax);
    }

    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < n {
        if !quiet[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && quiet[i] {
            i += 1;
        }
        let end = i - 1;
        if end > start && best.is_none_or(|(a, b)| end - start > b - a) {
            best = Some((start, end));
        }
    }

    Ok(best.map(|(a, b)| {
        let spread = spreads[a..=b].iter().copied().fold(0.0, f64::max);
        let mean = v[a..=b].iter().sum::<f64>() / (b - a + 1) as f64;
        PlateauReport { t_lo: t[a], t_hi: t[b], width: t[b] - t[a], spread, mean }
    }))
}
