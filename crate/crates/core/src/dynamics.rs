//! Single-mode moment dynamics: the closed linear system for
//! `v = (⟨s†s⟩, ⟨s⟩, ⟨s†⟩, ⟨s²⟩, ⟨s†²⟩)`, its steady state, stability,
//! covariance, squeezing and first-order coherence.

use num_complex::Complex;

use crate::bath::bose_occupation;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, expm_apply, solve_linear, CMatrix, CVector};
use crate::rates::{SingleModeRates, SingleModeSetup};
use crate::scalar::{c, i, re, Real};

/// `max Re λ < STABILITY_EPSILON` counts as stable. Marginal cases are
/// classified unstable.
pub const STABILITY_EPSILON: f64 = 1e-12;

/// Bound on `‖A v + a‖∞` for an accepted steady state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Slack on the Heisenberg bound and on non-negativity checks.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

/// Number of points in [`default_tau_grid`].
pub const DEFAULT_TAU_POINTS: usize = 400;

/// The drift matrix and inhomogeneity of `dv/dt = A v + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSystem<R = f64> {
    pub a_s: CMatrix<R>,
    pub a_vec: CVector<R>,
    /// `Δ' = Δ_0 + δ`.
    pub delta_prime: R,
    /// `γ_0 + γ`.
    pub gamma_total: R,
    pub rates: SingleModeRates<R>,
    pub gamma_0: R,
    pub delta_0: R,
    /// Thermal occupation of the mode's own reservoir.
    pub nbar_0: R,
}

/// Eigenvalue verdict together with the closed-form resonant criterion
/// `γ_0 + γ ≥ 4|g|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stability<R = f64> {
    pub stable: bool,
    pub max_re: R,
    pub criterion: bool,
}

/// Quadrature covariance with `x = (s + s†)/√2`, `p = i(s† − s)/√2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance<R = f64> {
    pub vx: R,
    pub vp: R,
    pub cxp: R,
}

impl<R: Real> Covariance<R> {
    /// Builds the covariance from the centered occupation
    /// `⟨s†s⟩ − |⟨s⟩|²` and the centered anomalous moment `⟨s²⟩ − ⟨s⟩²`.
    pub fn from_centered(occupation: R, anomalous: Complex<R>) -> Self {
        let half = R::lit(0.5);
        Self {
            vx: half + anomalous.re + occupation,
            vp: half - anomalous.re + occupation,
            cxp: anomalous.im,
        }
    }

    pub fn det(&self) -> R {
        self.vx * self.vp - self.cxp * self.cxp
    }

    pub fn eigenvalues(&self) -> (R, R) {
        let mean = (self.vx + self.vp) / R::lit(2.0);
        let diff = (self.vx - self.vp) / R::lit(2.0);
        let r = (diff * diff + self.cxp * self.cxp).sqrt();
        (mean - r, mean + r)
    }

    /// `ξ = 1/√(2 λ_min)`; above one means a quadrature is squeezed below
    /// the vacuum level.
    pub fn xi(&self) -> R {
        R::one() / (R::lit(2.0) * self.eigenvalues().0).sqrt()
    }
}

/// Result of [`MomentSystem::steady_state`].
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateReport<R = f64> {
    pub v_ss: CVector<R>,
    pub stability: Stability<R>,
    pub covariance: Covariance<R>,
    pub xi: R,
    /// `⟨s†s⟩ − |⟨s⟩|²`.
    pub centered_occupation: R,
    pub residual: R,
    /// `v[2] = v[1]*`, `v[4] = v[3]*` and `v[0]` real.
    pub conjugation_ok: bool,
    /// `det σ ≥ 1/4` and a non-negative centered occupation.
    pub physical: bool,
}

/// `g¹(τ)` on a grid of delays.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceSeries<R = f64> {
    pub tau: Vec<R>,
    pub g1: Vec<Complex<R>>,
}

/// Builds the moment system for zero mode-reservoir temperature.
pub fn build_moment_system<R: Real>(
    rates: &SingleModeRates<R>,
    gamma_0: R,
    delta_0: R,
) -> MomentSystem<R> {
    MomentSystem::new(rates, gamma_0, delta_0, R::zero())
}

impl<R: Real> MomentSystem<R> {
    pub fn new(rates: &SingleModeRates<R>, gamma_0: R, delta_0: R, nbar_0: R) -> Self {
        let gamma_total = gamma_0 + rates.gamma;
        let delta_prime = delta_0 + rates.delta;
        let dt = c(-gamma_total / R::lit(2.0), delta_prime);
        let dtc = dt.conj();
        let g = rates.g;
        let gc = g.conj();
        let op = rates.omega_prime;
        let opc = op.conj();
        let ii = i::<R>();
        let two = R::lit(2.0);
        let four = R::lit(4.0);
        let z = c(R::zero(), R::zero());
        let a_s = CMatrix::from_rows(&[
            [
                re(-gamma_total),
                ii * op,
                -ii * opc,
                ii * g * two,
                -ii * gc * two,
            ],
            [z, dtc, -ii * gc * two, z, z],
            [z, ii * g * two, dt, z, z],
            [-ii * gc * four, -ii * opc * two, z, dtc * two, z],
            [ii * g * four, z, ii * op * two, z, dt * two],
        ]);
        let bg = rates.big_gamma;
        let a_vec = CVector(vec![
            re(rates.gamma_plus + gamma_0 * nbar_0),
            -ii * opc,
            ii * op,
            -ii * gc * two - bg.conj(),
            ii * g * two - bg,
        ]);
        Self {
            a_s,
            a_vec,
            delta_prime,
            gamma_total,
            rates: *rates,
            gamma_0,
            delta_0,
            nbar_0,
        }
    }

    /// Moment system of a configured single-mode setup, with the mode
    /// reservoir at the environment temperature.
    pub fn from_setup(setup: &SingleModeSetup<R>) -> Result<Self> {
        let rates = setup.rates()?;
        let nbar_0 = bose_occupation(setup.mode.omega, setup.env.temperature);
        Ok(Self::new(&rates, setup.mode.gamma, setup.delta_0(), nbar_0))
    }

    /// Same system with the coherent squeezing rate `g` switched off.
    pub fn without_coherent_squeezing(&self) -> Self {
        let mut rates = self.rates;
        rates.g = c(R::zero(), R::zero());
        Self::new(&rates, self.gamma_0, self.delta_0, self.nbar_0)
    }

    /// Same system with the coherent drive removed. Its steady state holds
    /// the centered second moments of the original system.
    pub fn fluctuations(&self) -> Self {
        let mut rates = self.rates;
        rates.omega_prime = c(R::zero(), R::zero());
        Self::new(&rates, self.gamma_0, self.delta_0, self.nbar_0)
    }

    pub fn stability(&self) -> Result<Stability<R>> {
        let ev = eigenvalues(&self.a_s)?;
        let max_re = ev.iter().map(|z| z.re).fold(R::neg_infinity(), R::max);
        let eps = R::lit(STABILITY_EPSILON);
        Ok(Stability {
            stable: max_re < eps,
            max_re,
            criterion: R::lit(4.0) * self.rates.g.norm() - self.gamma_total < eps,
        })
    }

    /// Centered second moments, i.e. the fixed point of the drive-free system.
    fn centered_moments(&self) -> Result<CVector<R>> {
        let fl = self.fluctuations();
        Ok(solve_linear(&fl.a_s, &fl.a_vec)?.scale(re(-R::one())))
    }

    /// Fixed point of the full system, assembled from the means and the
    /// centered moments. Solving the whole 5x5 system at once loses the
    /// small pivots when `|Ω'| ≫ γ_t`.
    fn solve_fixed_point(&self) -> Result<(CVector<R>, R)> {
        let a = &self.a_s;
        let block = CMatrix::from_rows(&[[a[(1, 1)], a[(1, 2)]], [a[(2, 1)], a[(2, 2)]]]);
        let mean = solve_linear(&block, &[-self.a_vec[1], -self.a_vec[2]])?;
        let fl = self.centered_moments()?;
        let v = CVector(vec![
            fl[0] + mean[1] * mean[0],
            mean[0],
            mean[1],
            fl[3] + mean[0] * mean[0],
            fl[4] + mean[1] * mean[1],
        ]);
        let av = self.a_s.mul_vec(&v);
        let residual = av
            .iter()
            .zip(self.a_vec.iter())
            .map(|(x, y)| (*x + *y).norm())
            .fold(R::zero(), R::max);
        Ok((v, residual))
    }

    /// Steady state `v = −A⁻¹ a` with covariance and squeezing. Fails with
    /// [`Error::Unstable`] when the drift matrix has an eigenvalue with
    /// `Re λ ≥ STABILITY_EPSILON`.
    pub fn steady_state(&self) -> Result<SteadyStateReport<R>> {
        let stability = self.stability()?;
        if !stability.stable {
            return Err(Error::Unstable {
                max_re: stability.max_re.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (v, residual) = self.solve_fixed_point()?;
        let fl = self.centered_moments()?;
        let centered_occupation = fl[0].re;
        let covariance = Covariance::from_centered(centered_occupation, fl[3]);
        let xi = covariance.xi();

        let tol = R::lit(RESIDUAL_TOLERANCE);
        let scale = v.norm_inf().max(R::one());
        let conjugation_ok = (v[2] - v[1].conj()).norm() <= tol * scale
            && (v[4] - v[3].conj()).norm() <= tol * scale
            && v[0].im.abs() <= tol * scale;
        let slack = R::lit(PHYSICALITY_TOLERANCE);
        let physical = covariance.det() >= R::lit(0.25) - slack && centered_occupation >= -slack;
        Ok(SteadyStateReport {
            v_ss: v,
            stability,
            covariance,
            xi,
            centered_occupation,
            residual,
            conjugation_ok,
            physical,
        })
    }

    /// Solution of `dv/dt = A v + a` at time `t` from `v0`.
    pub fn evolve(&self, v0: &[Complex<R>], t: R) -> Result<CVector<R>> {
        if v0.len() != 5 {
            return Err(Error::Dimension(format!(
                "moment vector of length {}",
                v0.len()
            )));
        }
        let aug = CMatrix::from_fn(6, 6, |r, col| match (r, col) {
            (5, _) => c(R::zero(), R::zero()),
            (_, 5) => self.a_vec[r],
            _ => self.a_s[(r, col)],
        });
        let mut x: Vec<Complex<R>> = v0.to_vec();
        x.push(re(R::one()));
        let mut out = expm_apply(&aug, &x, t)?.into_inner();
        out.truncate(5);
        Ok(CVector(out))
    }

    /// `g¹(τ) = ⟨s†(0) s(τ)⟩ / ⟨s†s⟩` by quantum regression on the
    /// first-moment block.
    pub fn coherence_g1(&self, v_ss: &[Complex<R>], tau: &[R]) -> Result<CoherenceSeries<R>> {
        if v_ss.len() != 5 {
            return Err(Error::Dimension(format!(
                "moment vector of length {}",
                v_ss.len()
            )));
        }
        let stability = self.stability()?;
        if !stability.stable {
            return Err(Error::Unstable {
                max_re: stability.max_re.to_f64().unwrap_or(f64::NAN),
            });
        }
        let n = v_ss[0].re;
        if !(n > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "g1 needs a populated mode, got ⟨s†s⟩ = {n}"
            )));
        }
        let s_dag = v_ss[2];
        let z = c(R::zero(), R::zero());
        let aug = CMatrix::from_rows(&[
            [self.a_s[(1, 1)], self.a_s[(1, 2)], self.a_vec[1] * s_dag],
            [self.a_s[(2, 1)], self.a_s[(2, 2)], self.a_vec[2] * s_dag],
            [z, z, z],
        ]);
        let start = [v_ss[0], v_ss[4], re(R::one())];
        let mut g1 = Vec::with_capacity(tau.len());
        for &t in tau {
            let x = expm_apply(&aug, &start, t)?;
            g1.push(x[0] / n);
        }
        Ok(CoherenceSeries {
            tau: tau.to_vec(),
            g1,
        })
    }
}

/// Zero plus `DEFAULT_TAU_POINTS − 1` log-spaced delays reaching
/// `20/γ_total`.
pub fn default_tau_grid<R: Real>(gamma_total: R) -> Vec<R> {
    let end = R::lit(20.0) / gamma_total;
    let start = end * R::lit(1e-4);
    let k = DEFAULT_TAU_POINTS - 1;
    let ratio = (end / start).ln();
    let mut out = vec![R::zero()];
    for j in 0..k {
        let f = R::from_usize(j).expect("index") / R::from_usize(k - 1).expect("index");
        out.push(start * (ratio * f).exp());
    }
    out
}

/// Approximate steady state neglecting `g` and `Γ`:
/// `⟨s†s⟩ ≈ γ_+/γ_t + 4|Ω'|²/γ_t²` and `⟨s†⟩ ≈ 2iΩ'/γ_t`, where
/// `γ_t = γ_0 + γ` is the total damping.
pub fn approx_steady_state<R: Real>(
    rates: &SingleModeRates<R>,
    gamma_0: R,
    nbar_0: R,
) -> Result<(R, Complex<R>)> {
    let gt = gamma_0 + rates.gamma;
    if !(gt > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "approximate steady state needs net damping, got {gt}"
        )));
    }
    let n = (rates.gamma_plus + gamma_0 * nbar_0) / gt
        + R::lit(4.0) * rates.omega_prime.norm_sqr() / (gt * gt);
    let s_dag = i::<R>() * rates.omega_prime * (R::lit(2.0) / gt);
    Ok((n, s_dag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(gamma_0: f64, delta_0: f64) -> MomentSystem {
        build_moment_system(&SingleModeRates::bare(c(0.0, 0.0)), gamma_0, delta_0)
    }

    #[test]
    fn bare_oscillator_spectrum() {
        let ms = bare(1e-3, 0.2);
        let mut ev = eigenvalues(&ms.a_s).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        let expected = [
            c(-1e-3, -0.4),
            c(-5e-4, -0.2),
            c(-1e-3, 0.0),
            c(-5e-4, 0.2),
            c(-1e-3, 0.4),
        ];
        for (x, y) in ev.iter().zip(expected) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn vacuum_steady_state() {
        let r = bare(1e-3, 0.0).steady_state().unwrap();
        assert!(r.v_ss.norm_inf() == 0.0);
        assert_eq!(
            r.covariance,
            Covariance {
                vx: 0.5,
                vp: 0.5,
                cxp: 0.0
            }
        );
        assert_eq!(r.xi, 1.0);
    }

    #[test]
    fn no_coherent_squeezing_decouples_blocks() {
        let ms = build_moment_system(&SingleModeRates::bare(c(1e-4, 0.0)), 1e-3, 0.1);
        for (r, col) in [(1, 3), (1, 4), (2, 3), (2, 4), (1, 2), (2, 1)] {
            assert_eq!(ms.a_s[(r, col)], c(0.0, 0.0));
        }
    }

    #[test]
    fn instability_is_reported() {
        let mut rates = SingleModeRates::<f64>::bare(c(0.0, 0.0));
        rates.g = c(1e-3, 0.0);
        let ms = build_moment_system::<f64>(&rates, 1e-3, 0.0);
        let st = ms.stability().unwrap();
        assert!(!st.stable && !st.criterion);
        assert!((st.max_re - 3e-3).abs() < 1e-12);
        assert!(matches!(ms.steady_state(), Err(Error::Unstable { .. })));
    }

    #[test]
    fn evolution_reaches_and_keeps_fixed_point() {
        let ms = build_moment_system(&SingleModeRates::bare(c(2e-4, 1e-4)), 1e-3, 3e-4);
        let v0 = [c(0.0, 0.0); 5];
        assert_eq!(ms.evolve(&v0, 0.0).unwrap().0, v0.to_vec());
        let ss = ms.steady_state().unwrap().v_ss;
        let late = ms.evolve(&v0, 5e4).unwrap();
        assert!((&late - &ss).norm_inf() < 1e-8 * ss.norm_inf());
        let still = ms.evolve(&ss, 1234.5).unwrap();
        assert!((&still - &ss).norm_inf() < 1e-10 * ss.norm_inf());
    }

    #[test]
    fn coherent_state_has_unit_g1() {
        let ms = build_moment_system(&SingleModeRates::bare(c(2e-4, 0.0)), 1e-3, 0.0);
        let r = ms.steady_state().unwrap();
        let series = ms
            .coherence_g1(&r.v_ss, &default_tau_grid(ms.gamma_total))
            .unwrap();
        assert_eq!(series.g1[0], c(1.0, 0.0));
        for g in series.g1 {
            assert!((g - c(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn tau_grid_shape() {
        let grid = default_tau_grid(2.0f64);
        assert_eq!(grid.len(), DEFAULT_TAU_POINTS);
        assert_eq!(grid[0], 0.0);
        assert!((grid[DEFAULT_TAU_POINTS - 1] - 10.0).abs() < 1e-12);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn approximation_without_drive_is_thermal_balance() {
        let mut rates = SingleModeRates::<f64>::bare(c(0.0, 0.0));
        rates.gamma_plus = 1e-7;
        rates.gamma_minus = 5e-7;
        rates.gamma = 4e-7;
        let (n, s_dag) = approx_steady_state::<f64>(&rates, 0.0, 0.0).unwrap();
        assert!((n - 0.25).abs() < 1e-15);
        assert_eq!(s_dag, c(0.0, 0.0));
        let exact = build_moment_system::<f64>(&rates, 0.0, 0.0)
            .steady_state()
            .unwrap();
        assert!((exact.v_ss[0].re - 0.25).abs() < 1e-12);
    }
}
