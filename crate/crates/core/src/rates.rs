//! Effective master-equation rates assembled from the bath power spectral
//! densities, for any number of modes and for the single-mode case.

use num_complex::Complex;

use crate::bath::{
    bloch_steady_state, psd_table, BathEnvironment, PsdTable, Sign, TlsBath, TlsParams,
};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, Real};

/// Relative tolerance on Hermiticity defects and on the imaginary residue of
/// rates that must be real.
pub const REALITY_TOLERANCE: f64 = 1e-12;

/// One bosonic mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeParams<R = f64> {
    pub omega: R,
    pub gamma: R,
    pub drive: Complex<R>,
}

impl<R: Real> ModeParams<R> {
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite()
            || !self.gamma.is_finite()
            || !crate::scalar::is_finite(self.drive)
        {
            return Err(Error::NonFinite("mode parameters"));
        }
        if !(self.omega > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "mode frequency must be positive, got {}",
                self.omega
            )));
        }
        if self.gamma < R::zero() {
            return Err(Error::InvalidParameter(format!(
                "mode decay rate must be non-negative, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// `Δ_n = ω_n − ω_d`.
    pub fn detuning(&self, env: &BathEnvironment<R>) -> R {
        self.omega - env.omega_d
    }
}

/// The full multi-mode rate set. Matrices are indexed `[(m, n)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterEqRates<R = f64> {
    /// Effective coherent drive `Ω'_n`.
    pub omega_prime: Vec<Complex<R>>,
    /// Frequency shifts and beam-splitter couplings `δ_mn`.
    pub delta: CMatrix<R>,
    /// Coherent two-mode squeezing `g_mn`.
    pub g: CMatrix<R>,
    /// Weights of `D[s_m†, s_n]`.
    pub gamma_plus: CMatrix<R>,
    /// Weights of `D[s_m, s_n†]`.
    pub gamma_minus: CMatrix<R>,
    /// Dissipative squeezing `Γ_mn`.
    pub big_gamma: CMatrix<R>,
}

/// Single-mode rates with the diagonal entries reduced to real numbers
/// where they must be real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleModeRates<R = f64> {
    pub omega_prime: Complex<R>,
    pub delta: R,
    pub g: Complex<R>,
    pub gamma_plus: R,
    pub gamma_minus: R,
    /// Net TLS-induced decay `γ₋ − γ₊`; negative means amplification.
    pub gamma: R,
    pub big_gamma: Complex<R>,
}

impl<R: Real> SingleModeRates<R> {
    /// Rates with every TLS contribution removed, keeping only the bare drive.
    pub fn bare(drive: Complex<R>) -> Self {
        let z = c(R::zero(), R::zero());
        Self {
            omega_prime: drive,
            delta: R::zero(),
            g: z,
            gamma_plus: R::zero(),
            gamma_minus: R::zero(),
            gamma: R::zero(),
            big_gamma: z,
        }
    }
}

fn validate_inputs<R: Real>(
    modes: &[ModeParams<R>],
    bath: &TlsBath<R>,
    env: &BathEnvironment<R>,
) -> Result<()> {
    for m in modes {
        m.validate()?;
    }
    bath.validate()?;
    env.validate()?;
    if bath.modes() != modes.len() {
        return Err(Error::Dimension(format!(
            "{} modes but TLS couplings list {} entries",
            modes.len(),
            bath.modes()
        )));
    }
    Ok(())
}

/// `Ω'_n = Ω_n + Σ_i G_in ⟨σ+_i⟩`.
pub fn effective_driving<R: Real>(
    modes: &[ModeParams<R>],
    bath: &TlsBath<R>,
    env: &BathEnvironment<R>,
) -> Result<Vec<Complex<R>>> {
    validate_inputs(modes, bath, env)?;
    let mut out: Vec<Complex<R>> = modes.iter().map(|m| m.drive).collect();
    for (weight, p) in bath.members() {
        let sp = bloch_steady_state(p, env).sigma_plus;
        for (o, &g) in out.iter_mut().zip(&p.couplings) {
            *o += g * sp * weight;
        }
    }
    Ok(out)
}

/// Combines a PSD table into the rate matrices.
pub fn rates_from_psd<R: Real>(
    table: &PsdTable<R>,
    omega_prime: Vec<Complex<R>>,
) -> Result<MasterEqRates<R>> {
    use Sign::{Minus as M, Plus as P};
    let n = table.modes();
    let half_i = c(R::zero(), R::lit(0.5));
    let x = |a, b, m, k| table.get(a, b, m, k);
    let delta = CMatrix::from_fn(n, n, |m, k| {
        -half_i * (x(P, M, m, k) + x(M, P, m, k)) + half_i * (x(P, M, k, m) + x(M, P, k, m)).conj()
    });
    let g = CMatrix::from_fn(n, n, |m, k| {
        -half_i * (x(P, P, m, k) - x(M, M, k, m).conj())
    });
    let gamma_plus = CMatrix::from_fn(n, n, |m, k| x(P, M, m, k) + x(P, M, k, m).conj());
    let gamma_minus = CMatrix::from_fn(n, n, |m, k| x(M, P, m, k) + x(M, P, k, m).conj());
    let big_gamma = CMatrix::from_fn(n, n, |m, k| x(P, P, m, k) + x(M, M, k, m).conj());

    for (name, mat) in [
        ("delta", &delta),
        ("gamma_plus", &gamma_plus),
        ("gamma_minus", &gamma_minus),
    ] {
        let defect = mat.hermiticity_defect();
        let scale = mat.max_abs();
        if defect > R::lit(REALITY_TOLERANCE) * scale {
            return Err(Error::NonHermitian {
                matrix: name,
                deviation: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let rates = MasterEqRates {
        omega_prime,
        delta,
        g,
        gamma_plus,
        gamma_minus,
        big_gamma,
    };
    let finite = rates
        .omega_prime
        .iter()
        .all(|&z| crate::scalar::is_finite(z))
        && [
            &rates.delta,
            &rates.g,
            &rates.gamma_plus,
            &rates.gamma_minus,
            &rates.big_gamma,
        ]
        .iter()
        .all(|m| m.is_finite());
    if !finite {
        return Err(Error::NonFinite("master-equation rates"));
    }
    Ok(rates)
}

/// All rates of the effective master equation.
pub fn assemble_rates<R: Real>(
    modes: &[ModeParams<R>],
    bath: &TlsBath<R>,
    env: &BathEnvironment<R>,
) -> Result<MasterEqRates<R>> {
    let omega_prime = effective_driving(modes, bath, env)?;
    let detunings: Vec<R> = modes.iter().map(|m| m.detuning(env)).collect();
    let table = psd_table(bath, env, &detunings)?;
    rates_from_psd(&table, omega_prime)
}

fn real_part<R: Real>(name: &'static str, z: Complex<R>) -> Result<R> {
    if z.im.abs() > R::lit(REALITY_TOLERANCE) * z.norm() {
        return Err(Error::NonHermitian {
            matrix: name,
            deviation: z.im.abs().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(z.re)
}

impl<R: Real> MasterEqRates<R> {
    /// Diagonal entry `(n, n)` as a single-mode rate set.
    pub fn single_mode(&self, n: usize) -> Result<SingleModeRates<R>> {
        if n >= self.omega_prime.len() {
            return Err(Error::Dimension(format!(
                "mode {n} of {}",
                self.omega_prime.len()
            )));
        }
        let gamma_plus = real_part("gamma_plus", self.gamma_plus[(n, n)])?;
        let gamma_minus = real_part("gamma_minus", self.gamma_minus[(n, n)])?;
        Ok(SingleModeRates {
            omega_prime: self.omega_prime[n],
            delta: real_part("delta", self.delta[(n, n)])?,
            g: self.g[(n, n)],
            gamma_plus,
            gamma_minus,
            gamma: gamma_minus - gamma_plus,
            big_gamma: self.big_gamma[(n, n)],
        })
    }
}

/// Rates for one mode coupled to a bath.
pub fn single_mode_rates<R: Real>(
    mode: &ModeParams<R>,
    bath: &TlsBath<R>,
    env: &BathEnvironment<R>,
) -> Result<SingleModeRates<R>> {
    assemble_rates(std::slice::from_ref(mode), bath, env)?.single_mode(0)
}

/// A single mode coupled to `count` identical TLS. This is the configuration
/// used by every sweep scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleModeSetup<R = f64> {
    pub env: BathEnvironment<R>,
    pub mode: ModeParams<R>,
    pub count: usize,
    pub tls: TlsParams<R>,
}

impl<R: Real> SingleModeSetup<R> {
    pub fn bath(&self) -> TlsBath<R> {
        TlsBath::identical(self.count, self.tls.clone())
    }

    /// `Δ_0 = ω_0 − ω_d`.
    pub fn delta_0(&self) -> R {
        self.mode.detuning(&self.env)
    }

    /// `Δ_B = ω_B − ω_d`.
    pub fn delta_b(&self) -> R {
        self.tls.detuning(&self.env)
    }

    pub fn coupling(&self) -> Complex<R> {
        self.tls.couplings[0]
    }

    pub fn rates(&self) -> Result<SingleModeRates<R>> {
        single_mode_rates(&self.mode, &self.bath(), &self.env)
    }

    /// Sets `Δ_0` by moving the mode frequency.
    pub fn with_delta_0(mut self, delta_0: R) -> Self {
        self.mode.omega = self.env.omega_d + delta_0;
        self
    }

    /// Sets `Δ_B` by moving the drive frequency, keeping `ω_B` and `Δ_0`.
    pub fn with_delta_b(mut self, delta_b: R) -> Self {
        let d0 = self.delta_0();
        self.env.omega_d = self.tls.omega_b - delta_b;
        self.mode.omega = self.env.omega_d + d0;
        self
    }

    pub fn with_drive(mut self, drive: Complex<R>) -> Self {
        self.tls.drive = drive;
        self
    }

    pub fn with_gamma_0(mut self, gamma_0: R) -> Self {
        self.mode.gamma = gamma_0;
        self
    }

    pub fn kappa_t(&self) -> R {
        crate::bath::transverse_rate(&self.tls, &self.env)
    }

    pub fn saturation(&self) -> R {
        crate::bath::saturation(&self.tls, &self.env)
    }

    /// Real drive amplitude giving saturation `s` at the current `Δ_B`.
    pub fn drive_for_saturation(&self, s: R) -> R {
        let kt = self.kappa_t();
        let db = self.delta_b();
        (s * self.tls.kappa1 * (kt * kt + db * db) / kt).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::default_setup;

    #[test]
    fn zero_drive_collapse() {
        let setup = default_setup().with_delta_0(3e-5);
        let r = setup.rates().unwrap();
        assert_eq!(r.g, c(0.0, 0.0));
        assert_eq!(r.big_gamma, c(0.0, 0.0));
        assert_eq!(r.omega_prime, setup.mode.drive);
        assert!(r.gamma > 0.0);
    }

    #[test]
    fn effective_drive_at_half_saturation() {
        let base = default_setup();
        let s1 = base.drive_for_saturation(1.0);
        let r = base.with_drive(c(s1, 0.0)).rates().unwrap();
        assert!((r.omega_prime.norm() - 1.25e-7f64.sqrt()).abs() < 1e-12 * 3.54e-4);
    }

    #[test]
    fn multimode_hermiticity() {
        let base = default_setup();
        let mut p = base.tls.clone();
        p.drive = c(4e-5, 1e-5);
        p.couplings = vec![c(1e-8, 0.0), c(2e-9, -7e-9), c(0.0, 5e-9)];
        let modes = [
            ModeParams {
                omega: 1.0 + 1e-5,
                gamma: 1e-7,
                drive: c(0.0, 0.0),
            },
            ModeParams {
                omega: 1.0 - 3e-5,
                gamma: 1e-7,
                drive: c(1e-6, 0.0),
            },
            ModeParams {
                omega: 1.0,
                gamma: 0.0,
                drive: c(0.0, 0.0),
            },
        ];
        let r = assemble_rates(&modes, &TlsBath::identical(1000, p), &base.env).unwrap();
        for m in [&r.delta, &r.gamma_plus, &r.gamma_minus] {
            assert!(m.hermiticity_defect() <= 1e-15 * m.max_abs());
        }
    }

    #[test]
    fn mode_count_mismatch_is_rejected() {
        let base = default_setup();
        let modes = [base.mode, base.mode];
        assert!(matches!(
            assemble_rates(&modes, &base.bath(), &base.env),
            Err(Error::Dimension(_))
        ));
    }
}
