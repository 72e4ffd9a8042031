use proptest::prelude::*;
use tlsbath::bath::{bloch_steady_state, BathEnvironment, TlsParams};
use tlsbath::dynamics::MomentSystem;
use tlsbath::oracle::{
    build_liouvillian, evolve, expectations, oracle_g1, steady_state_auto, steady_state_full,
    DensityMatrix, HilbertSpec, OracleModel,
};
use tlsbath::presets::default_setup;
use tlsbath::rates::{ModeParams, SingleModeRates};
use tlsbath::scalar::c;
use tlsbath::Complex64;

fn model(
    n_tls: usize,
    coupling: f64,
    drive: Complex64,
    mode_drive: f64,
    d0: f64,
    db: f64,
    t: f64,
) -> OracleModel {
    let env = BathEnvironment {
        temperature: t,
        omega_d: 5.0,
    };
    OracleModel {
        env,
        mode: ModeParams {
            omega: 5.0 + d0,
            gamma: 0.3,
            drive: c(mode_drive, 0.0),
        },
        tls: (0..n_tls)
            .map(|k| TlsParams {
                omega_b: 5.0 + db + 0.1 * k as f64,
                kappa1: 1.0,
                kappa2: 0.2,
                drive,
                couplings: vec![c(coupling, 0.1 * coupling)],
            })
            .collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_stay_physical(
        n_tls in 1usize..=2,
        fock in 3usize..=5,
        g in 0.0..0.5f64,
        drive in (0.0..2.0f64, 0.0..6.3f64).prop_map(|(r, p)| Complex64::from_polar(r, p)),
        d0 in -1.0..1.0f64,
        t in 0.0..2.0f64,
        time in 0.0..10.0f64,
    ) {
        let m = model(n_tls, g, drive, 0.2, d0, 0.3, t);
        let spec = HilbertSpec::new(fock, n_tls);
        let l = build_liouvillian(&m, &spec).unwrap();
        prop_assert!(l.trace_defect() < 1e-12);
        let rho = evolve(&l, &DensityMatrix::fock_ground(&spec, 1), time).unwrap();
        prop_assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-9);
        prop_assert!(rho.rho.hermiticity_defect() < 1e-9);
        prop_assert!(rho.purity() <= 1.0 + 1e-9);
        for k in 0..rho.dim() {
            prop_assert!(rho.rho[(k, k)].re >= -1e-9);
        }
    }

    #[test]
    fn decoupled_model_factorizes(
        drive in (0.0..2.0f64, 0.0..6.3f64).prop_map(|(r, p)| Complex64::from_polar(r, p)),
        mode_drive in 0.0..0.05f64,
        d0 in -1.0..1.0f64,
        db in -1.0..1.0f64,
    ) {
        let m = model(1, 0.0, drive, mode_drive, d0, db, 0.0);
        let spec = HilbertSpec::new(12, 1);
        let rho = steady_state_full(&build_liouvillian(&m, &spec).unwrap()).unwrap();
        let ex = expectations(&rho, &spec).unwrap();
        let bloch = bloch_steady_state(&m.tls[0], &m.env);
        prop_assert!((ex.sigma_plus[0] - bloch.sigma_plus).norm() < 1e-10);
        prop_assert!((ex.sigma_z[0] - bloch.sigma_z).abs() < 1e-10);

        let bare = MomentSystem::new(&SingleModeRates::bare(m.mode.drive), m.mode.gamma, d0, 0.0);
        let v = bare.steady_state().unwrap().v_ss;
        let moments = ex.moments();
        for k in 0..5 {
            prop_assert!((moments[k] - v[k]).norm() < 1e-10, "moment {k}");
        }
    }
}

fn born_markov_setup() -> tlsbath::rates::SingleModeSetup {
    let mut setup = default_setup().with_gamma_0(3e-6);
    setup.count = 1;
    let kt = setup.kappa_t();
    setup.tls.couplings = vec![c(1e-2 * kt, 0.0)];
    let d = setup.drive_for_saturation(1.0);
    setup.with_drive(c(d, 0.0))
}

#[test]
fn relaxation_reaches_kernel_state() {
    let m = model(1, 0.3, c(0.8, 0.2), 0.1, 0.4, -0.2, 0.5);
    let spec = HilbertSpec::new(5, 1);
    let l = build_liouvillian(&m, &spec).unwrap();
    let ss = steady_state_full(&l).unwrap();
    let late = evolve(&l, &DensityMatrix::fock_ground(&spec, 1), 200.0).unwrap();
    assert!((&late.rho - &ss.rho).max_abs() < 1e-6);
}

#[test]
fn born_markov_deviation_shrinks_with_coupling() {
    let mut last = f64::INFINITY;
    for ratio in [1e-1, 3e-2, 1e-2] {
        let mut setup = born_markov_setup();
        let kt = setup.kappa_t();
        setup.tls.couplings = vec![c(ratio * kt, 0.0)];
        let eff = MomentSystem::from_setup(&setup)
            .unwrap()
            .steady_state()
            .unwrap()
            .v_ss;
        let exact = steady_state_auto(&OracleModel::literal(&setup), 8, 64).unwrap();
        let dev = (eff[0].re - exact.expectations.n).abs() / exact.expectations.n;
        assert!(dev < last, "ratio {ratio}: {dev} after {last}");
        last = dev;
    }
    assert!(last < 0.05);
}

#[test]
fn coherence_matches_exact_model() {
    let setup = born_markov_setup();
    let ms = MomentSystem::from_setup(&setup).unwrap();
    let v = ms.steady_state().unwrap().v_ss;
    let tau: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5 / ms.gamma_total).collect();
    let eff = ms.coherence_g1(&v, &tau).unwrap().g1;

    let model = OracleModel::literal(&setup);
    let exact = steady_state_auto(&model, 8, 64).unwrap();
    let l = build_liouvillian(&model, &exact.spec).unwrap();
    let g1 = oracle_g1(&l, &exact.rho, &tau).unwrap();
    for (k, (a, b)) in eff.iter().zip(&g1).enumerate() {
        assert!((a - b).norm() <= 0.02 * a.norm(), "τ index {k}: {a} vs {b}");
    }
}
