use proptest::prelude::*;
use tlsbath::bath::{
    bloch_matrix, bloch_steady_state, correlator_integral, psd, psd_table, saturation,
    BathEnvironment, Sign, TlsBath, TlsParams,
};
use tlsbath::linalg::eigenvalues;
use tlsbath::oracle::bloch_correlator_numeric;
use tlsbath::rates::{assemble_rates, ModeParams};
use tlsbath::scalar::c;
use tlsbath::Complex64;

fn tls(drive: Complex64, kappa2: f64, couplings: Vec<Complex64>) -> TlsParams {
    TlsParams {
        omega_b: 10.0,
        kappa1: 1.0,
        kappa2,
        drive,
        couplings,
    }
}

fn env(delta_b: f64, temperature: f64) -> BathEnvironment {
    BathEnvironment {
        temperature,
        omega_d: 10.0 - delta_b,
    }
}

fn polar() -> impl Strategy<Value = Complex64> {
    (0.0..4.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, p)| Complex64::from_polar(r, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_spectrum_decays(db in -5.0..5.0f64, drive in polar(), k2 in 0.0..2.0f64, t in 0.0..20.0f64) {
        let p = tls(drive, k2, vec![c(1.0, 0.0)]);
        for ev in eigenvalues(&bloch_matrix(&p, &env(db, t))).unwrap() {
            prop_assert!(ev.re < 0.0, "{ev}");
        }
    }

    #[test]
    fn saturation_grows_with_drive(db in -5.0..5.0f64, a in 0.0..4.0f64, b in 0.0..4.0f64, t in 0.0..20.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        let e = env(db, t);
        let s_lo = saturation(&tls(c(lo, 0.0), 0.3, vec![]), &e);
        let s_hi = saturation(&tls(c(hi, 0.0), 0.3, vec![]), &e);
        prop_assert!(s_hi > s_lo);
        let st = bloch_steady_state(&tls(c(hi, 0.0), 0.3, vec![]), &e);
        prop_assert!(st.sigma_z <= 0.0 && st.sigma_z >= -1.0);
        // the Bloch vector stays inside the sphere
        prop_assert!(4.0 * st.sigma_plus.norm_sqr() + st.sigma_z * st.sigma_z <= 1.0 + 1e-12);
    }

    #[test]
    fn drive_phase_rotates_anomalous_psd(
        db in -3.0..3.0f64, drive in polar(), phi in 0.0..std::f64::consts::TAU, dm in -5.0..5.0f64, t in 0.0..5.0f64
    ) {
        let e = env(db, t);
        let g = c(0.6, 0.2);
        let base = TlsBath::identical(3, tls(drive, 0.2, vec![g]));
        let turned = TlsBath::identical(3, tls(drive * Complex64::from_polar(1.0, phi), 0.2, vec![g]));
        let rot = Complex64::from_polar(1.0, -2.0 * phi);
        for (a, b, factor) in [
            (Sign::Plus, Sign::Minus, c(1.0, 0.0)),
            (Sign::Minus, Sign::Plus, c(1.0, 0.0)),
            (Sign::Plus, Sign::Plus, rot),
            (Sign::Minus, Sign::Minus, rot.conj()),
        ] {
            let x = psd(&base, &e, &[dm], a, b, 0, 0).unwrap();
            let y = psd(&turned, &e, &[dm], a, b, 0, 0).unwrap();
            prop_assert!((y - x * factor).norm() < 1e-12 * (1.0 + x.norm()), "{a:?}{b:?}");
        }
    }

    #[test]
    fn correlator_conjugation_symmetry(db in -3.0..3.0f64, drive in polar(), k2 in 0.0..1.0f64, dm in -5.0..5.0f64) {
        let p = tls(drive, k2, vec![c(1.0, 0.0)]);
        let mirror = tls(-drive.conj(), k2, vec![c(1.0, 0.0)]);
        for beta in Sign::BOTH {
            let x = correlator_integral(&p, &env(db, 0.0), beta, dm).unwrap();
            let y = correlator_integral(&mirror, &env(-db, 0.0), beta, -dm).unwrap();
            for k in 0..2 {
                prop_assert!((x[k].conj() - y[k]).norm() < 1e-10 * (1.0 + x[k].norm()));
            }
        }
    }

    #[test]
    fn psd_matches_entries_of_the_table(db in -3.0..3.0f64, drive in polar(), d0 in -4.0..4.0f64, d1 in -4.0..4.0f64) {
        let bath = TlsBath::identical(2, tls(drive, 0.1, vec![c(0.3, 0.1), c(-0.2, 0.4)]));
        let e = env(db, 1.0);
        let table = psd_table(&bath, &e, &[d0, d1]).unwrap();
        for a in Sign::BOTH {
            for b in Sign::BOTH {
                for m in 0..2 {
                    for n in 0..2 {
                        prop_assert_eq!(table.get(a, b, m, n), psd(&bath, &e, &[d0, d1], a, b, m, n).unwrap());
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn multimode_rates_are_hermitian(
        modes in 1usize..=3,
        members in prop::collection::vec((-3.0..3.0f64, polar(), 0.0..1.0f64, prop::collection::vec(polar(), 3)), 1..=3),
        detunings in prop::collection::vec(-5.0..5.0f64, 3),
        t in 0.0..10.0f64,
    ) {
        let e = env(0.0, t);
        let list: Vec<TlsParams> = members
            .iter()
            .map(|(db, drive, k2, gs)| TlsParams {
                omega_b: 10.0 + db,
                kappa1: 1.0,
                kappa2: *k2,
                drive: *drive,
                couplings: gs[..modes].iter().map(|g| g * 0.1).collect(),
            })
            .collect();
        let bath = TlsBath::from_list(list);
        let mode_list: Vec<ModeParams> = detunings[..modes]
            .iter()
            .map(|d| ModeParams { omega: e.omega_d + d, gamma: 0.01, drive: c(0.0, 0.0) })
            .collect();
        let r = assemble_rates(&mode_list, &bath, &e).unwrap();
        for m in [&r.delta, &r.gamma_plus, &r.gamma_minus] {
            prop_assert!(m.hermiticity_defect() <= 1e-13 * (1.0 + m.max_abs()));
        }
        for n in 0..modes {
            let single = r.single_mode(n).unwrap();
            prop_assert!(single.gamma_plus >= -1e-14 && single.gamma_minus >= -1e-14);
        }
    }
}

#[test]
fn quadrature_conjugation_symmetry() {
    // spot check of the same mirror relation on the independent quadrature
    let p = tls(c(1.1, -0.5), 0.2, vec![c(1.0, 0.0)]);
    let mirror = tls(c(-1.1, -0.5), 0.2, vec![c(1.0, 0.0)]);
    for a in Sign::BOTH {
        for b in Sign::BOTH {
            let x = bloch_correlator_numeric(&p, &env(0.7, 0.0), a, b, 1.3).unwrap();
            let y = bloch_correlator_numeric(&mirror, &env(-0.7, 0.0), a, b, -1.3).unwrap();
            assert!((x.conj() - y).norm() < 1e-8, "{a:?}{b:?}");
        }
    }
}
