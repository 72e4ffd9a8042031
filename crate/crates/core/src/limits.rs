//! Closed-form limits of the single-mode rates for identical TLS.
//!
//! Nothing here calls into [`crate::bath`] or [`crate::rates`]: these are
//! separate code paths so they can be used to check the general pipeline.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c, i, re, Real};

fn coth_half<R: Real>(omega_b: R, temperature: R) -> R {
    if temperature == R::zero() {
        return R::one();
    }
    R::one() / (omega_b / (R::lit(2.0) * temperature)).tanh()
}

fn tanh_half<R: Real>(omega_b: R, temperature: R) -> R {
    if temperature == R::zero() {
        return R::one();
    }
    (omega_b / (R::lit(2.0) * temperature)).tanh()
}

/// Resonant (`Δ_B = 0`, `κ2 = 0`, `T = 0`) closed form of `(g, Γ)` for `n`
/// TLS with coupling `coupling`, as a function of saturation `s` and mode
/// detuning `delta_0`.
pub fn resonant_closed_form<R: Real>(
    n: R,
    coupling: Complex<R>,
    kappa1: R,
    s: R,
    delta_0: R,
) -> (Complex<R>, Complex<R>) {
    let one = re(R::one());
    let two = re(R::lit(2.0));
    let half = re(R::lit(0.5));
    let id = i::<R>() * (delta_0 / kappa1);
    let f = (re(s) + two * (id - one) * (id - half)) * (id - half);
    let pre = coupling * coupling * n / (R::lit(2.0) * kappa1) * (-s)
        / (f * ((R::one() + s) * (R::one() + s)));
    let g = pre * i::<R>() * (id - one) * (R::one() + s);
    let big_gamma = pre * (re(s * s + R::lit(2.0) * s) + (id - one) * (id - one) * R::lit(4.0));
    (g, big_gamma)
}

/// `Γ` for a saturated bath, `N G² / (2(κ_t − iΔ_0))`.
pub fn saturated_big_gamma<R: Real>(
    n: R,
    coupling: Complex<R>,
    kappa_t: R,
    delta_0: R,
) -> Complex<R> {
    coupling * coupling * n / (c(kappa_t, -delta_0) * R::lit(2.0))
}

/// `(γ, δ)` for a weakly driven bath (`s → 0`). `detuning` is `ω_0 − ω_B`.
pub fn low_drive_limits<R: Real>(
    n: R,
    coupling: Complex<R>,
    kappa_t: R,
    detuning: R,
    omega_b: R,
    temperature: R,
) -> (R, R) {
    let pre = n * coupling.norm_sqr() / (kappa_t * kappa_t + detuning * detuning)
        * tanh_half(omega_b, temperature);
    (pre * R::lit(2.0) * kappa_t, pre * detuning)
}

/// Asymptotic regimes of `γ` for a strongly driven bath.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HighDriveRegime {
    /// `Δ_0 ≫ Ω_B ≫ κ_t`
    FarDetuned,
    /// `Ω_B ≫ Δ_0 ≫ κ_t`, where the bath amplifies the mode.
    InsideSidebands,
    /// `Ω_B ≫ κ_t ≫ Δ_0`
    NearResonant,
}

/// Leading-order `γ` in one of the strong-drive regimes.
#[allow(clippy::too_many_arguments)]
pub fn high_drive_gamma_limit<R: Real>(
    n: R,
    coupling: Complex<R>,
    kappa1: R,
    kappa_t: R,
    drive: R,
    delta_0: R,
    omega_b: R,
    temperature: R,
    regime: HighDriveRegime,
) -> R {
    let pre = n * coupling.norm_sqr() * kappa1;
    match regime {
        HighDriveRegime::FarDetuned => pre / (delta_0 * delta_0),
        HighDriveRegime::InsideSidebands => -pre / (drive * drive),
        HighDriveRegime::NearResonant => {
            pre * R::lit(2.0) * kappa1 * kappa_t / drive.powi(4) * coth_half(omega_b, temperature)
        }
    }
}

/// Position of the Mollow sidebands, `√(|Ω_B|² − κ_t²/4)`.
pub fn mollow_sideband<R: Real>(drive: R, kappa_t: R) -> Result<R> {
    let floor = kappa_t * kappa_t / R::lit(4.0);
    let x = drive * drive - floor;
    if x < -R::lit(8.0) * R::epsilon() * floor {
        return Err(Error::BelowThreshold {
            what: "drive for resolved Mollow sidebands",
            value: drive.abs().to_f64().unwrap_or(f64::NAN),
            threshold: (kappa_t / R::lit(2.0)).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(x.max(R::zero()).sqrt())
}

/// Detuning `Δ_B` maximizing the effective drive, `√(|Ω_B|²/2 − κ_t²)`.
pub fn optimal_detuning<R: Real>(drive: R, kappa_t: R) -> Result<R> {
    let floor = kappa_t * kappa_t;
    let x = drive * drive / R::lit(2.0) - floor;
    if x < -R::lit(8.0) * R::epsilon() * floor {
        return Err(Error::BelowThreshold {
            what: "drive for a split effective-drive peak",
            value: drive.abs().to_f64().unwrap_or(f64::NAN),
            threshold: (R::lit(2.0).sqrt() * kappa_t).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(x.max(R::zero()).sqrt())
}

/// `|Ω'_0|²` for resonant TLS with no bare mode drive.
pub fn effective_drive_sq<R: Real>(n: R, coupling: Complex<R>, kappa1: R, kappa_t: R, s: R) -> R {
    let ng = n * coupling.norm();
    ng * ng * kappa1 / (R::lit(4.0) * kappa_t) * s / ((R::one() + s) * (R::one() + s))
}
