use ndarray::{s, Array1, Array2};
use proptest::prelude::*;

use qnlo::fock::HybridState;
use qnlo::hamiltonians::{build_lindblad_generator_with, quartic_position, quartic_terms};
use qnlo::io::config::{ParamsConfig, RunConfig, TruncationConfig};
use qnlo::io::validate_config;
use qnlo::linalg::{dagger, kron, max_abs, trace, CMat, CVec};
use qnlo::observables::negativity_partial_transpose;
use qnlo::{
    build_full_hamiltonian, build_ladder_hamiltonian, build_rwa_hamiltonian, negativity, Branch, FockTruncation,
    HybridKet, PhononLadderLevel, ScaledParams, C64,
};

fn cmat(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec(-1.0..1.0f64, 2 * rows * cols)
        .prop_map(move |v| Array2::from_shape_fn((rows, cols), |(i, j)| C64::new(v[2 * (i * cols + j)], v[2 * (i * cols + j) + 1])))
}

fn cvec(n: usize) -> impl Strategy<Value = CVec> {
    prop::collection::vec(-1.0..1.0f64, 2 * n).prop_map(move |v| Array1::from_shape_fn(n, |i| C64::new(v[2 * i], v[2 * i + 1])))
}

fn normalized(v: CVec) -> CVec {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / n)
}

/// Random normalized ket on a small truncation.
fn hybrid_ket(n_max: usize) -> impl Strategy<Value = HybridKet> {
    let tr = FockTruncation::with_margin(n_max, 1, 1.0).unwrap();
    cvec(tr.hybrid_dim())
        .prop_filter("non-zero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(move |v| HybridKet::new(tr, normalized(v)).unwrap())
}

/// `U = [[cos θ/2, −e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`.
fn qubit_unitary(theta: f64, phi: f64, lambda: f64) -> [[C64; 2]; 2] {
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |a: f64| C64::from_polar(1.0, a);
    [[C64::new(c, 0.0), -e(lambda) * sn], [e(phi) * sn, e(phi + lambda) * c]]
}

fn rotate_qubit(psi: &HybridKet, u: [[C64; 2]; 2]) -> HybridKet {
    let up = psi.branch(Branch::Up);
    let down = psi.branch(Branch::Down);
    let new_up = &up.mapv(|z| z * u[0][0]) + &down.mapv(|z| z * u[0][1]);
    let new_down = &up.mapv(|z| z * u[1][0]) + &down.mapv(|z| z * u[1][1]);
    HybridKet::from_branches(*psi.truncation(), &new_up.view(), &new_down.view()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(a in cmat(2, 3), b in cmat(3, 2), c in cmat(3, 2), d in cmat(2, 4)) {
        let lhs = kron(&a.view(), &b.view()).dot(&kron(&c.view(), &d.view()));
        let rhs = kron(&a.dot(&c).view(), &b.dot(&d).view());
        prop_assert!(max_abs(&(&lhs - &rhs).view()) < 1e-12);
    }

    #[test]
    fn negativity_invariant_under_local_qubit_unitaries(
        psi in hybrid_ket(6),
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..std::f64::consts::TAU,
        lambda in 0.0..std::f64::consts::TAU,
    ) {
        let before = negativity(&psi).unwrap().raw;
        let after = negativity(&rotate_qubit(&psi, qubit_unitary(theta, phi, lambda))).unwrap().raw;
        prop_assert!((before - after).abs() < 1e-10, "{before} vs {after}");
        prop_assert!(before <= 0.5 + 1e-12);
    }

    #[test]
    fn ket_negativity_matches_partial_transpose(psi in hybrid_ket(4)) {
        let schmidt = negativity(&psi).unwrap().raw;
        let pt = negativity_partial_transpose(&psi.to_density()).unwrap().raw;
        prop_assert!((schmidt - pt).abs() < 1e-9, "{schmidt} vs {pt}");
    }

    #[test]
    fn equal_weight_branches_follow_overlap(a in cvec(8), b in cvec(8)) {
        prop_assume!(a.iter().any(|z| z.norm() > 1e-3) && b.iter().any(|z| z.norm() > 1e-3));
        let (a, b) = (normalized(a), normalized(b));
        let tr = FockTruncation::with_margin(7, 1, 1.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = HybridKet::from_branches(tr, &a.mapv(|z| z * h).view(), &b.mapv(|z| z * h).view()).unwrap();
        let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        let expected = (1.0 - overlap.norm_sqr()).max(0.0).sqrt();
        let got = negativity(&psi).unwrap().normalized;
        prop_assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn hamiltonians_are_hermitian(k in 0.0..2.0f64, delta in 0.0..0.1f64, n_max in 6usize..40) {
        let tr = FockTruncation::new(n_max).unwrap();
        let p = ScaledParams::closed(k, delta, 1.0).unwrap();
        let hs = [
            build_full_hamiltonian(&p, &tr).unwrap(),
            build_rwa_hamiltonian(&p, &tr).unwrap(),
            build_ladder_hamiltonian(&p, PhononLadderLevel::NumberStateOnly, &tr).unwrap(),
            build_ladder_hamiltonian(&p, PhononLadderLevel::UpToTwoPhonon, &tr).unwrap(),
            build_ladder_hamiltonian(&p, PhononLadderLevel::Full, &tr).unwrap(),
        ];
        for h in &hs {
            prop_assert!(h.hermiticity_deviation() < 1e-12);
            prop_assert_eq!(h.dim(), tr.hybrid_dim());
        }
        // no term couples the qubit blocks
        let d = tr.dim();
        prop_assert_eq!(max_abs(&hs[0].entries().slice(s![..d, d..])), 0.0);
    }

    #[test]
    fn lindblad_generator_is_trace_free_and_hermiticity_preserving(
        m in cmat(12, 12),
        k in 0.0..1.0f64,
        delta in 0.0..0.05f64,
        gamma in 0.0..0.5f64,
    ) {
        let tr = FockTruncation::with_margin(5, 1, 1.0).unwrap();
        let p = ScaledParams::closed(k, delta, 1.0).unwrap().with_gamma(gamma);
        let h = build_full_hamiltonian(&p, &tr).unwrap();
        let gen = build_lindblad_generator_with(&p, &h, tr).unwrap();
        let mut rho = m.dot(&dagger(&m.view()));
        let t = trace(&rho.view());
        rho.mapv_inplace(|z| z / t);
        let out = gen.apply(&rho);
        prop_assert!(trace(&out.view()).norm() < 1e-12);
        prop_assert!(max_abs(&(&out - &dagger(&out.view())).view()) < 1e-12);
    }

    #[test]
    fn quartic_decomposition_on_certified_block(n_max in 6usize..120) {
        let tr = FockTruncation::new(n_max).unwrap();
        let terms = quartic_terms(&tr);
        let mut rhs = &terms.four_phonon + &terms.two_phonon + &terms.number_state;
        rhs += &Array2::from_diag_elem(tr.dim(), C64::new(3.0, 0.0));
        let c = tr.certified_levels();
        let lhs = quartic_position(&tr);
        let diff = &lhs.slice(s![..c, ..c]) - &rhs.slice(s![..c, ..c]);
        prop_assert!(max_abs(&diff.view()) < 1e-10);
    }

    #[test]
    fn config_round_trips(
        k in 0.0..2.0f64,
        delta in 0.0..0.02f64,
        alpha in 0.0..2.5f64,
        gamma in 0.0..0.1f64,
        n_max in 60usize..160,
        t_end in 0.5..20.0f64,
    ) {
        let cfg = RunConfig {
            params: ParamsConfig { k, delta, alpha, alpha_im: 0.0, gamma },
            truncation: TruncationConfig { n_max, ..Default::default() },
            grid: qnlo::io::config::GridConfig { t_start_pi: 0.0, t_end_pi: t_end, samples: None },
            ..Default::default()
        };
        let (back, _) = validate_config(&cfg.to_toml()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
