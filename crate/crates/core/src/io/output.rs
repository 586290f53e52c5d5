//! Writing a [`ResultBundle`] to disk.
//!
//! Layout of `<root>/<run name>/`:
//!
//! - `config.toml`: the resolved configuration;
//! - `run.json`: metadata (version, wall time, warnings, per-curve method,
//!   plateau, validity and integrator statistics);
//! - CSV mode: `series_<curve>.csv`, `diagnostics_<curve>.csv`,
//!   `wigner_<curve>_t<time>_<kind>.csv`, `wp_<curve>.csv`;
//! - JSON mode: `bundle.json` holding everything;
//! - `plot.py` when plots are requested.
//!
//! Times are written in units of π. CSV files open with `# key=value` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::OutputFormat;
use super::experiment::{CurveResult, ResultBundle};
use super::slug;
use crate::evolve::ValidityReport;
use crate::observables::{PlateauReport, WignerGrid};
use crate::ode::StepStats;
use crate::{QnloError, Result};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "QNLO_OUT_DIR";
const FALLBACK_OUT_DIR: &str = "qnlo-out";

/// Output root: explicit argument, then config, then `$QNLO_OUT_DIR`, then `qnlo-out`.
pub fn resolve_out_root(cli: Option<&Path>, config: Option<&Path>) -> PathBuf {
    cli.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR))
}

/// `t/π` rounded to 12 decimals, so grid times print as `2` rather than
/// `1.9999999999999998`.
fn pi_units(t: f64) -> f64 {
    (t / std::f64::consts::PI * 1e12).round() / 1e12
}

fn io_err(path: &Path, e: std::io::Error) -> QnloError {
    QnloError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn header(bundle: &ResultBundle, curve: Option<&CurveResult>, extra: &[(&str, String)]) -> String {
    let cfg = &bundle.config;
    let mut h = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(h, "# {k}={v}");
    };
    kv("run", &cfg.name);
    kv("version", &bundle.version);
    kv("n_max", &cfg.truncation.n_max);
    kv("time_unit", &"pi");
    if let Some(c) = curve {
        let p = &c.curve.params;
        kv("curve", &c.label);
        kv("model", &c.curve.model_label());
        kv("method", &c.method);
        kv("k", &p.k);
        kv("delta", &p.delta);
        kv("alpha_re", &p.alpha.re);
        kv("alpha_im", &p.alpha.im);
        kv("gamma", &p.gamma);
    }
    for (k, v) in extra {
        kv(k, v);
    }
    h
}

fn series_csv(bundle: &ResultBundle, c: &CurveResult) -> Option<String> {
    let first = c.series.values().next()?;
    let mut out = header(bundle, Some(c), &[("negativity_scale", "normalized (1 = maximal)".into())]);
    out.push_str("t_pi");
    for name in c.series.keys() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, &t) in first.t.iter().enumerate() {
        let _ = write!(out, "{}", pi_units(t));
        for s in c.series.values() {
            let _ = write!(out, ",{}", s.values[i]);
        }
        out.push('\n');
    }
    Some(out)
}

fn diagnostics_csv(bundle: &ResultBundle, c: &CurveResult) -> String {
    let mut out = header(bundle, Some(c), &[]);
    out.push_str("t_pi,norm_drift,guard_band_population,mean_phonon_number\n");
    for d in &c.diagnostics {
        let _ = writeln!(out, "{},{},{},{}", pi_units(d.t), d.norm_drift, d.guard_band_population, d.mean_phonon_number);
    }
    out
}

fn wigner_csv(bundle: &ResultBundle, c: &CurveResult, t: f64, kind: &str, g: &WignerGrid) -> String {
    let mut out = header(
        bundle,
        Some(c),
        &[("t_pi", pi_units(t).to_string()), ("state", kind.into()), ("convention", "alpha-plane, W = (2/pi) Tr[rho D P D^dag]".into())],
    );
    out.push_str("x,y,W\n");
    for (iy, &y) in g.y.iter().enumerate() {
        for (ix, &x) in g.x.iter().enumerate() {
            let _ = writeln!(out, "{x},{y},{}", g.values[[iy, ix]]);
        }
    }
    out
}

#[derive(Serialize)]
struct CurveMeta<'a> {
    label: &'a str,
    slug: String,
    model: String,
    method: &'a str,
    k: f64,
    delta: f64,
    alpha: [f64; 2],
    gamma: f64,
    plateau: Option<PlateauPi>,
    validity: &'a ValidityReport,
    stats: Option<StepStats>,
    max_norm_drift: f64,
    max_guard_band_population: f64,
}

/// Plateau bounds in units of π.
#[derive(Serialize)]
struct PlateauPi {
    t_lo_pi: f64,
    t_hi_pi: f64,
    width_pi: f64,
    spread: f64,
    mean: f64,
}

impl From<&PlateauReport> for PlateauPi {
    fn from(p: &PlateauReport) -> Self {
        Self {
            t_lo_pi: pi_units(p.t_lo),
            t_hi_pi: pi_units(p.t_hi),
            width_pi: pi_units(p.width),
            spread: p.spread,
            mean: p.mean,
        }
    }
}

#[derive(Serialize)]
struct RunMeta<'a> {
    name: &'a str,
    version: &'a str,
    wall_time_s: f64,
    warnings: &'a [String],
    curves: Vec<CurveMeta<'a>>,
}

fn run_meta(bundle: &ResultBundle) -> RunMeta<'_> {
    let curves = bundle
        .curves
        .iter()
        .map(|c| {
            let p = &c.curve.params;
            CurveMeta {
                label: &c.label,
                slug: slug(&c.label),
                model: c.curve.model_label(),
                method: c.method,
                k: p.k,
                delta: p.delta,
                alpha: [p.alpha.re, p.alpha.im],
                gamma: p.gamma,
                plateau: c.plateau.as_ref().map(PlateauPi::from),
                validity: &c.validity,
                stats: c.stats,
                max_norm_drift: c.diagnostics.iter().map(|d| d.norm_drift).fold(0.0, f64::max),
                max_guard_band_population: c.diagnostics.iter().map(|d| d.guard_band_population).fold(0.0, f64::max),
            }
        })
        .collect();
    RunMeta {
        name: &bundle.config.name,
        version: bundle.version,
        wall_time_s: bundle.wall_time_s,
        warnings: &bundle.warnings,
        curves,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| QnloError::Serialization(e.to_string()))
}

/// Writes `bundle` under `<root>/<run name>/` and returns that directory.
pub fn write_bundle(bundle: &ResultBundle, root: &Path, format: OutputFormat, emit_plots: bool) -> Result<PathBuf> {
    let dir = root.join(&bundle.config.name);
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    write_file(&dir.join("config.toml"), &bundle.config.to_toml())?;
    write_file(&dir.join("run.json"), &to_json(&run_meta(bundle))?)?;

    match format {
        OutputFormat::Json => write_file(&dir.join("bundle.json"), &to_json(bundle)?)?,
        OutputFormat::Csv => {
            for c in &bundle.curves {
                let s = slug(&c.label);
                if let Some(csv) = series_csv(bundle, c) {
                    write_file(&dir.join(format!("series_{s}.csv")), &csv)?;
                }
                write_file(&dir.join(format!("diagnostics_{s}.csv")), &diagnostics_csv(bundle, c))?;
                let mut wp = String::new();
                for snap in &c.wigner {
                    let tag = format!("{:.3}", pi_units(snap.t));
                    for (kind, g) in [("reduced", &snap.reduced), ("up", &snap.up), ("down", &snap.down)] {
                        if let Some(g) = g {
                            write_file(&dir.join(format!("wigner_{s}_t{tag}pi_{kind}.csv")), &wigner_csv(bundle, c, snap.t, kind, g))?;
                        }
                    }
                    if let (Some(g), Some(e)) = (snap.wp_grid, snap.wp_exact) {
                        let _ = writeln!(wp, "{},{g},{e}", pi_units(snap.t));
                    }
                }
                if !wp.is_empty() {
                    let body = format!("{}t_pi,wp_grid,wp_exact\n{wp}", header(bundle, Some(c), &[]));
                    write_file(&dir.join(format!("wp_{s}.csv")), &body)?;
                }
            }
        }
    }
    if emit_plots {
        write_file(&dir.join("plot.py"), PLOT_SCRIPT)?;
    }
    Ok(dir)
}

/// Matplotlib script that renders every CSV in its own directory.
const PLOT_SCRIPT: &str = r##"#!/usr/bin/env python3
"""Render the CSV output of this run: python3 plot.py [--show]"""
import glob
import os
import sys

import matplotlib

if "--show" not in sys.argv:
    matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def load(path):
    meta = {}
    with open(path) as fh:
        for line in fh:
            if line.startswith("# ") and "=" in line:
                key, value = line[2:].rstrip("\n").split("=", 1)
                meta[key] = value
    data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
    return meta, data


def series_plots():
    files = sorted(glob.glob(os.path.join(HERE, "series_*.csv")))
    if not files:
        return
    loaded = [load(f) for f in files]
    columns = [c for c in loaded[0][1].dtype.names if c != "t_pi"]
    for col in columns:
        fig, ax = plt.subplots(figsize=(7, 4))
        for meta, data in loaded:
            if col in data.dtype.names:
                ax.plot(data["t_pi"], data[col], label=meta.get("curve", ""))
        ax.set_xlabel("t / pi")
        ax.set_ylabel(col)
        ax.legend()
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, f"plot_{col}.png"), dpi=150)
        plt.close(fig)


def wigner_plots():
    for path in sorted(glob.glob(os.path.join(HERE, "wigner_*.csv"))):
        meta, data = load(path)
        xs = np.unique(data["x"])
        ys = np.unique(data["y"])
        w = data["W"].reshape(len(ys), len(xs))
        fig, ax = plt.subplots(figsize=(5, 4.5))
        lim = np.abs(w).max()
        mesh = ax.pcolormesh(xs, ys, w, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
        fig.colorbar(mesh, ax=ax)
        ax.set_title(f"{meta.get('curve', '')} {meta.get('state', '')} t = {meta.get('t_pi', '')} pi")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
        fig.tight_layout()
        fig.savefig(path[:-4] + ".png", dpi=150)
        plt.close(fig)


if __name__ == "__main__":
    series_plots()
    wigner_plots()
    if "--show" in sys.argv:
        plt.show()
"##;
