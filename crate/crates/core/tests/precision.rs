use tlsbath::dynamics::MomentSystem;
use tlsbath::presets::{default_setup, default_setup_in};
use tlsbath::rates::SingleModeSetup;
use tlsbath::scalar::c;
use tlsbath::{Complex32, Complex64};

fn widen(z: Complex32) -> Complex64 {
    c(z.re as f64, z.im as f64)
}

fn pair(s: f64, d0: f64, db: f64) -> (SingleModeSetup<f32>, SingleModeSetup<f64>) {
    let wide = default_setup().with_delta_b(db).with_delta_0(d0);
    let drive = wide.drive_for_saturation(s);
    let narrow = default_setup_in::<f32>()
        .with_delta_b(db as f32)
        .with_delta_0(d0 as f32);
    (
        narrow.with_drive(c(drive as f32, 0.0)),
        wide.with_drive(c(drive, 0.0)),
    )
}

#[test]
fn single_precision_rates_track_double() {
    for (s, d0, db) in [(1e-2, 0.0, 0.0), (1.0, 5e-5, 0.0), (30.0, -1e-4, 2e-5)] {
        let (narrow, wide) = pair(s, d0, db);
        let a = narrow.rates().unwrap();
        let b = wide.rates().unwrap();
        let scale = b.gamma.abs().max(b.big_gamma.norm());
        assert!((widen(a.omega_prime) - b.omega_prime).norm() <= 1e-3 * b.omega_prime.norm());
        assert!((widen(a.g) - b.g).norm() <= 1e-3 * scale);
        assert!((widen(a.big_gamma) - b.big_gamma).norm() <= 1e-3 * scale);
        assert!((a.gamma as f64 - b.gamma).abs() <= 1e-3 * scale);
        assert!((a.delta as f64 - b.delta).abs() <= 1e-3 * scale);
    }
}

#[test]
fn single_precision_steady_state_tracks_double() {
    let (narrow, wide) = pair(0.2, 0.0, 0.0);
    let a = MomentSystem::from_setup(&narrow)
        .unwrap()
        .steady_state()
        .unwrap();
    let b = MomentSystem::from_setup(&wide)
        .unwrap()
        .steady_state()
        .unwrap();
    for k in 0..5 {
        assert!(
            (widen(a.v_ss[k]) - b.v_ss[k]).norm() <= 1e-2 * b.v_ss.norm_inf(),
            "moment {k}"
        );
    }
    assert!((a.xi as f64 - b.xi).abs() <= 1e-2);
}
