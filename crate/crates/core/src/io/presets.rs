//! Named run configurations, one per published figure.
//!
//! Each preset's `description` lists the parameters it fixes by choice
//! rather than from the figure caption.

use super::config::{
    CurveConfig, Dynamics, GridConfig, ModelKind, Observable, ParamsConfig, RunConfig, TruncationConfig,
    WignerConfig,
};
use crate::hamiltonians::PhononLadderLevel;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: RunConfig,
}

/// Fock cutoff that keeps the guard band below 1e-9 for delta = 0.01;
/// the default 80 suffices for delta <= 0.003.
pub const STRONG_NONLINEARITY_N_MAX: usize = 140;

/// Guard-band tolerance for the up-to-two-phonon ladder variant, whose
/// spectrum is unbounded below (tail ≈ 2e-3 at n_max = 140).
pub const TWO_PHONON_TAIL_TOL: f64 = 1e-2;

fn strong_truncation() -> TruncationConfig {
    TruncationConfig { n_max: STRONG_NONLINEARITY_N_MAX, ..Default::default() }
}

fn curve(label: &str) -> CurveConfig {
    CurveConfig { label: label.into(), ..Default::default() }
}

fn base(name: &str, description: &str, k: f64, delta: f64, t_end_pi: f64, samples: Option<usize>) -> RunConfig {
    RunConfig {
        name: name.into(),
        description: description.into(),
        params: ParamsConfig { k, delta, alpha: 2.0, ..Default::default() },
        grid: GridConfig { t_start_pi: 0.0, t_end_pi, samples },
        ..Default::default()
    }
}

fn fig1() -> RunConfig {
    let mut c = base("fig1", "negativity for delta = 0; the full Hamiltonian is propagated numerically", 0.5, 0.0, 2.0, None);
    c.observables = vec![Observable::Negativity, Observable::NegativityRaw];
    c.curves = [0.1, 0.25, 0.5]
        .iter()
        .map(|&k| CurveConfig { k: Some(k), ..curve(&format!("k={k}")) })
        .collect();
    c
}

fn fig2() -> RunConfig {
    let mut c = base("fig2", "Bloch vector for delta = 0; horizon 4 pi is our choice", 0.5, 0.0, 4.0, None);
    c.observables = vec![Observable::Bloch, Observable::QubitCoherence];
    c
}

fn fig3() -> RunConfig {
    let mut c = base(
        "fig3",
        "Wigner function of the reduced oscillator for delta = 0; k = 0.5 and the snapshot times are our choice",
        0.5,
        0.0,
        2.0,
        Some(201),
    );
    c.observables = vec![Observable::Negativity, Observable::Wigner];
    c.wigner = WignerConfig { times_pi: vec![0.0, 0.5, 1.0, 1.5, 2.0], half_width: 5.0, step: 0.05 };
    c
}

fn small_coupling(name: &str, description: &str, t_end_pi: f64, samples: Option<usize>) -> RunConfig {
    let mut c = base(name, description, 0.01, 0.001, t_end_pi, samples);
    c.observables = vec![Observable::Negativity, Observable::Validity];
    c.curves = vec![
        CurveConfig { kind: Some(ModelKind::Rwa), ..curve("rwa") },
        CurveConfig { kind: Some(ModelKind::Full), ..curve("full") },
        CurveConfig { delta: Some(0.0), kind: Some(ModelKind::Full), ..curve("delta=0") },
    ];
    c
}

fn fig4a() -> RunConfig {
    small_coupling("fig4a", "rotating-wave vs full vs delta = 0; horizon 8 pi is our choice", 8.0, None)
}

fn fig4b() -> RunConfig {
    small_coupling(
        "fig4b",
        "long-time rotating-wave vs full vs delta = 0; horizon 40 pi and 100 samples per 2 pi are our choice",
        40.0,
        Some(2001),
    )
}

fn fig5() -> RunConfig {
    let mut c = base(
        "fig5",
        "squeezing and Wigner snapshots of the rotating-wave state; horizon 8 pi is our choice",
        0.01,
        0.001,
        8.0,
        None,
    );
    c.model.kind = ModelKind::Rwa;
    c.observables = vec![Observable::Squeezing, Observable::Wigner];
    c.wigner = WignerConfig { times_pi: vec![0.0, 0.5, 1.0, 1.5, 2.0, 50.0], half_width: 5.0, step: 0.05 };
    c
}

fn fig6() -> RunConfig {
    let mut c = base(
        "fig6",
        "strong-coupling negativity plus phonon-ladder variants at delta = 0.01; horizon 16 pi, n_max = 140 and \
         a 1e-2 guard band for the two-phonon ladder are our choice",
        0.5,
        0.01,
        16.0,
        None,
    );
    c.truncation = strong_truncation();
    c.observables = vec![Observable::Negativity, Observable::Plateau, Observable::Validity];
    let ladder = |label: &str, level| CurveConfig { kind: Some(ModelKind::Ladder), level: Some(level), ..curve(label) };
    c.curves = vec![
        CurveConfig { delta: Some(0.01), ..curve("delta=0.01") },
        CurveConfig { delta: Some(0.001), ..curve("delta=0.001") },
        ladder("ladder-number-state", PhononLadderLevel::NumberStateOnly),
        // unbounded below: the Fock tail grows with n_max, so certify loosely
        CurveConfig { tail_tol: Some(TWO_PHONON_TAIL_TOL), ..ladder("ladder-two-phonon", PhononLadderLevel::UpToTwoPhonon) },
        ladder("ladder-full", PhononLadderLevel::Full),
    ];
    c
}

fn fig7() -> RunConfig {
    let mut c = base("fig7", "qubit-conditioned Wigner functions and their overlap", 0.5, 0.01, 15.0, None);
    c.truncation = strong_truncation();
    c.observables = vec![Observable::Negativity, Observable::Wp, Observable::ConditionedWigner];
    c.wigner = WignerConfig { times_pi: vec![2.0, 4.0, 6.0, 10.0, 15.0], half_width: 6.0, step: 0.1 };
    c
}

fn fig8() -> RunConfig {
    let mut c = base("fig8", "Bloch vector in the strong-coupling regime; delta = 0.01 is our choice", 0.5, 0.01, 4.0, None);
    c.truncation = strong_truncation();
    c.observables = vec![Observable::Bloch, Observable::QubitCoherence, Observable::Negativity];
    c
}

fn fig9() -> RunConfig {
    let mut c = base(
        "fig9",
        "damped strong-coupling negativity; gamma in {0, 0.001, 0.01}, horizon 10 pi and 100 samples per 2 pi are our choice",
        0.5,
        0.01,
        10.0,
        Some(501),
    );
    c.truncation = strong_truncation();
    c.observables = vec![Observable::Negativity, Observable::Plateau];
    c.model.dynamics = Dynamics::Auto;
    c.curves = [0.01, 0.001]
        .iter()
        .flat_map(|&delta| {
            [0.0, 0.001, 0.01].into_iter().map(move |gamma| CurveConfig {
                delta: Some(delta),
                gamma: Some(gamma),
                ..curve(&format!("delta={delta},gamma={gamma}"))
            })
        })
        .collect();
    c
}

/// All presets, in figure order.
pub fn preset_registry() -> Vec<Preset> {
    vec![
        Preset { name: "fig1", summary: "negativity, delta = 0, k in {0.1, 0.25, 0.5}", config: fig1() },
        Preset { name: "fig2", summary: "Bloch vector, delta = 0, k = 0.5", config: fig2() },
        Preset { name: "fig3", summary: "reduced-oscillator Wigner function, delta = 0", config: fig3() },
        Preset { name: "fig4a", summary: "rotating-wave vs full vs delta = 0, k = 0.01, delta = 0.001", config: fig4a() },
        Preset { name: "fig4b", summary: "same comparison at long times", config: fig4b() },
        Preset { name: "fig5", summary: "quadrature squeezing, rotating-wave regime", config: fig5() },
        Preset { name: "fig6", summary: "strong coupling k = 0.5 and phonon-ladder comparison", config: fig6() },
        Preset { name: "fig7", summary: "conditioned Wigner functions and overlap w_p", config: fig7() },
        Preset { name: "fig8", summary: "Bloch vector, k = 0.5, delta = 0.01", config: fig8() },
        Preset { name: "fig9", summary: "damping sweep, delta in {0.01, 0.001}", config: fig9() },
    ]
}

pub fn preset(name: &str) -> Option<RunConfig> {
    preset_registry().into_iter().find(|p| p.name == name).map(|p| p.config)
}
