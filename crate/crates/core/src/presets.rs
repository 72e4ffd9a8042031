//! Default parameter set: a single resonant mode, `10^5` identical TLS and
//! zero temperature. All rates are in units of the TLS frequency.

use crate::bath::{BathEnvironment, TlsParams};
use crate::rates::{ModeParams, SingleModeSetup};
use crate::scalar::{c, Real};

pub const TEMPERATURE: f64 = 0.0;
pub const COUPLING: f64 = 1e-8;
pub const TLS_COUNT: usize = 100_000;
pub const KAPPA1: f64 = 1e-4;
pub const KAPPA2: f64 = 0.0;
pub const GAMMA_0: f64 = 1e-7;
pub const OMEGA_B: f64 = 1.0;

/// Defaults with everything on resonance and both drives off.
pub fn default_setup() -> SingleModeSetup<f64> {
    default_setup_in()
}

pub fn default_setup_in<R: Real>() -> SingleModeSetup<R> {
    let z = c(R::zero(), R::zero());
    SingleModeSetup {
        env: BathEnvironment {
            temperature: R::lit(TEMPERATURE),
            omega_d: R::lit(OMEGA_B),
        },
        mode: ModeParams {
            omega: R::lit(OMEGA_B),
            gamma: R::lit(GAMMA_0),
            drive: z,
        },
        count: TLS_COUNT,
        tls: TlsParams {
            omega_b: R::lit(OMEGA_B),
            kappa1: R::lit(KAPPA1),
            kappa2: R::lit(KAPPA2),
            drive: z,
            couplings: vec![c(R::lit(COUPLING), R::zero())],
        },
    }
}
