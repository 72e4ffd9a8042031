//! Per-TLS Bloch machinery: stationary Pauli expectations, the Bloch
//! coefficient matrix, stationary two-time correlator integrals and the
//! one-sided power spectral densities built from them.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, CMatrix, CVector};
use crate::scalar::{c, i, re, Real};

/// Sign label of a raising (`+`) or lowering (`-`) operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// `+1` or `-1`.
    pub fn value<R: Real>(self) -> R {
        match self {
            Sign::Plus => R::one(),
            Sign::Minus => -R::one(),
        }
    }

    /// Row of the Bloch vector `(σ+, σ-, σz)` holding this operator.
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `G` for `+`, `G*` for `-`.
    pub fn apply<R: Real>(self, g: Complex<R>) -> Complex<R> {
        match self {
            Sign::Plus => g,
            Sign::Minus => g.conj(),
        }
    }
}

/// Physical parameters of one two-level system.
#[derive(Clone, Debug, PartialEq)]
pub struct TlsParams<R = f64> {
    pub omega_b: R,
    pub kappa1: R,
    pub kappa2: R,
    pub drive: Complex<R>,
    /// Coupling to each bosonic mode, one entry per mode.
    pub couplings: Vec<Complex<R>>,
}

impl<R: Real> TlsParams<R> {
    pub fn validate(&self) -> Result<()> {
        let finite = self.omega_b.is_finite()
            && self.kappa1.is_finite()
            && self.kappa2.is_finite()
            && crate::scalar::is_finite(self.drive)
            && self.couplings.iter().all(|&g| crate::scalar::is_finite(g));
        if !finite {
            return Err(Error::NonFinite("TLS parameters"));
        }
        if !(self.omega_b > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "omega_B must be positive, got {}",
                self.omega_b
            )));
        }
        if !(self.kappa1 > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "kappa1 must be positive, got {}",
                self.kappa1
            )));
        }
        if self.kappa2 < R::zero() {
            return Err(Error::InvalidParameter(format!(
                "kappa2 must be non-negative, got {}",
                self.kappa2
            )));
        }
        if self.couplings.is_empty() {
            return Err(Error::InvalidParameter(
                "TLS needs at least one coupling".into(),
            ));
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.couplings.len()
    }

    /// `Δ_B = ω_B − ω_d`.
    pub fn detuning(&self, env: &BathEnvironment<R>) -> R {
        self.omega_b - env.omega_d
    }

    pub fn cast<S: Real>(&self) -> TlsParams<S> {
        let f = |x: R| S::from_f64(x.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan);
        TlsParams {
            omega_b: f(self.omega_b),
            kappa1: f(self.kappa1),
            kappa2: f(self.kappa2),
            drive: Complex::new(f(self.drive.re), f(self.drive.im)),
            couplings: self
                .couplings
                .iter()
                .map(|g| Complex::new(f(g.re), f(g.im)))
                .collect(),
        }
    }
}

/// Shared environment: reservoir temperature and drive frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathEnvironment<R = f64> {
    pub temperature: R,
    pub omega_d: R,
}

impl<R: Real> BathEnvironment<R> {
    pub fn validate(&self) -> Result<()> {
        if !self.temperature.is_finite() || !self.omega_d.is_finite() {
            return Err(Error::NonFinite("environment"));
        }
        if self.temperature < R::zero() {
            return Err(Error::InvalidParameter(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        if !(self.omega_d > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "omega_d must be positive, got {}",
                self.omega_d
            )));
        }
        Ok(())
    }
}

/// A collection of TLS. Identical members are stored once with a count.
#[derive(Clone, Debug, PartialEq)]
pub enum TlsBath<R = f64> {
    Identical { count: usize, params: TlsParams<R> },
    Explicit(Vec<TlsParams<R>>),
}

impl<R: Real> TlsBath<R> {
    pub fn identical(count: usize, params: TlsParams<R>) -> Self {
        TlsBath::Identical { count, params }
    }

    /// Builds a bath from a list, collapsing to the identical form when every
    /// member compares equal.
    pub fn from_list(list: Vec<TlsParams<R>>) -> Self {
        match list.first() {
            Some(first) if list.iter().all(|p| p == first) => TlsBath::Identical {
                count: list.len(),
                params: first.clone(),
            },
            _ => TlsBath::Explicit(list),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TlsBath::Identical { count, .. } => *count,
            TlsBath::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distinct members with their multiplicities.
    pub fn members(&self) -> Vec<(R, &TlsParams<R>)> {
        match self {
            TlsBath::Identical { count, params } => {
                vec![(R::from_usize(*count).expect("TLS count"), params)]
            }
            TlsBath::Explicit(v) => v.iter().map(|p| (R::one(), p)).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            TlsBath::Identical { params, .. } => params.modes(),
            TlsBath::Explicit(v) => v.first().map_or(0, |p| p.modes()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidParameter("bath has no TLS".into()));
        }
        let modes = self.modes();
        for (_, p) in self.members() {
            p.validate()?;
            if p.modes() != modes {
                return Err(Error::Dimension(format!(
                    "TLS couplings disagree on the mode count: {} vs {}",
                    p.modes(),
                    modes
                )));
            }
        }
        Ok(())
    }
}

/// Bose–Einstein occupation `1/(e^{ω/T} − 1)`, exactly zero at `T = 0`.
pub fn bose_occupation<R: Real>(omega: R, temperature: R) -> R {
    if temperature == R::zero() {
        return R::zero();
    }
    R::one() / (omega / temperature).exp_m1()
}

/// `tanh(ω/2T)`, exactly one at `T = 0`.
pub fn thermal_tanh<R: Real>(omega: R, temperature: R) -> R {
    if temperature == R::zero() {
        return R::one();
    }
    (omega / (R::lit(2.0) * temperature)).tanh()
}

/// `κ_t = κ1(1 + 2n̄)/2 + 2κ2`.
pub fn transverse_rate<R: Real>(p: &TlsParams<R>, env: &BathEnvironment<R>) -> R {
    let n = bose_occupation(p.omega_b, env.temperature);
    p.kappa1 / R::lit(2.0) * (R::one() + R::lit(2.0) * n) + R::lit(2.0) * p.kappa2
}

/// Saturation parameter `s = (κ_t/κ1) |Ω_B|² / (κ_t² + Δ_B²)`.
pub fn saturation<R: Real>(p: &TlsParams<R>, env: &BathEnvironment<R>) -> R {
    let kt = transverse_rate(p, env);
    let db = p.detuning(env);
    kt / p.kappa1 * p.drive.norm_sqr() / (kt * kt + db * db)
}

/// Stationary Pauli expectations of one TLS.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochSteadyState<R = f64> {
    pub sigma_plus: Complex<R>,
    pub sigma_z: R,
    pub saturation: R,
    pub kappa_t: R,
    pub delta_b: R,
    pub nbar: R,
}

impl<R: Real> BlochSteadyState<R> {
    pub fn sigma_minus(&self) -> Complex<R> {
        self.sigma_plus.conj()
    }

    /// The 2x2 density matrix in the basis `(|e⟩, |g⟩)`.
    pub fn density_matrix(&self) -> CMatrix<R> {
        let half = R::lit(0.5);
        CMatrix::from_rows(&[
            [re(half * (R::one() + self.sigma_z)), self.sigma_minus()],
            [self.sigma_plus, re(half * (R::one() - self.sigma_z))],
        ])
    }
}

pub fn bloch_steady_state<R: Real>(
    p: &TlsParams<R>,
    env: &BathEnvironment<R>,
) -> BlochSteadyState<R> {
    let nbar = bose_occupation(p.omega_b, env.temperature);
    let kappa_t = transverse_rate(p, env);
    let delta_b = p.detuning(env);
    let s = saturation(p, env);
    let sigma_z = -R::one() / (R::one() + R::lit(2.0) * nbar + s);
    let sigma_plus = p.drive.conj() * sigma_z / (c(delta_b, kappa_t) * R::lit(2.0));
    BlochSteadyState {
        sigma_plus,
        sigma_z,
        saturation: s,
        kappa_t,
        delta_b,
        nbar,
    }
}

/// Coefficient matrix of the Bloch equations for `(σ+, σ-, σz)`.
pub fn bloch_matrix<R: Real>(p: &TlsParams<R>, env: &BathEnvironment<R>) -> CMatrix<R> {
    let kt = transverse_rate(p, env);
    let db = p.detuning(env);
    let n = bose_occupation(p.omega_b, env.temperature);
    let om = p.drive;
    let half = R::lit(0.5);
    let z = c(R::zero(), R::zero());
    CMatrix::from_rows(&[
        [c(-kt, db), z, -i::<R>() * om.conj() * half],
        [z, c(-kt, -db), i::<R>() * om * half],
        [
            -i::<R>() * om,
            i::<R>() * om.conj(),
            re(-p.kappa1 * (R::one() + R::lit(2.0) * n)),
        ],
    ])
}

/// Inhomogeneous term of the Bloch equations, `d⟨σ⟩/dt = A⟨σ⟩ + b`.
pub fn bloch_inhomogeneity<R: Real>(p: &TlsParams<R>) -> CVector<R> {
    CVector(vec![re(R::zero()), re(R::zero()), re(-p.kappa1)])
}

/// Stationary same-time correlators `⟨σ̃_k σ̃_β⟩` for `k = +, -, z`, with
/// centered operators `σ̃ = σ − ⟨σ⟩`.
pub fn same_time_correlators<R: Real>(b: &BlochSteadyState<R>, beta: Sign) -> CVector<R> {
    let sp = b.sigma_plus;
    let sm = b.sigma_minus();
    let sz = re(b.sigma_z);
    let half = R::lit(0.5);
    let one = re(R::one());
    match beta {
        Sign::Plus => CVector(vec![-sp * sp, (one - sz) * half - sm * sp, sp - sz * sp]),
        Sign::Minus => CVector(vec![(one + sz) * half - sp * sm, -sm * sm, -sm - sz * sm]),
    }
}

/// `∫₀^∞ dτ ⟨σ̃(τ) σ̃_β(0)⟩ e^{β iΔ_m τ} = −(A + β iΔ_m)⁻¹ ⟨σ̃ σ̃_β⟩`.
pub fn correlator_integral<R: Real>(
    p: &TlsParams<R>,
    env: &BathEnvironment<R>,
    beta: Sign,
    delta_m: R,
) -> Result<CVector<R>> {
    let state = bloch_steady_state(p, env);
    correlator_integral_with(&bloch_matrix(p, env), &state, beta, delta_m)
}

fn correlator_integral_with<R: Real>(
    a: &CMatrix<R>,
    state: &BlochSteadyState<R>,
    beta: Sign,
    delta_m: R,
) -> Result<CVector<R>> {
    let mut shifted = a.clone();
    let shift = c(R::zero(), beta.value::<R>() * delta_m);
    for k in 0..3 {
        shifted[(k, k)] += shift;
    }
    let rhs = same_time_correlators(state, beta);
    let x = solve_linear(&shifted, &rhs)?;
    Ok(x.scale(re(-R::one())))
}

/// One-sided power spectral densities `Γ_αβ^mn` for all sign pairs and modes.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdTable<R = f64> {
    modes: usize,
    entries: Vec<Complex<R>>,
}

impl<R: Real> PsdTable<R> {
    fn slot(&self, alpha: Sign, beta: Sign, m: usize, n: usize) -> usize {
        ((alpha.index() * 2 + beta.index()) * self.modes + m) * self.modes + n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn get(&self, alpha: Sign, beta: Sign, m: usize, n: usize) -> Complex<R> {
        self.entries[self.slot(alpha, beta, m, n)]
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|&z| crate::scalar::is_finite(z))
    }
}

fn check_detunings<R: Real>(bath: &TlsBath<R>, detunings: &[R]) -> Result<()> {
    if detunings.len() != bath.modes() {
        return Err(Error::Dimension(format!(
            "{} mode detunings for {} coupled modes",
            detunings.len(),
            bath.modes()
        )));
    }
    Ok(())
}

/// All PSD entries. Each TLS contributes one resolvent solve per sign and
/// mode.
pub fn psd_table<R: Real>(
    bath: &TlsBath<R>,
    env: &BathEnvironment<R>,
    detunings: &[R],
) -> Result<PsdTable<R>> {
    bath.validate()?;
    env.validate()?;
    check_detunings(bath, detunings)?;
    let modes = detunings.len();
    let mut table = PsdTable {
        modes,
        entries: vec![c(R::zero(), R::zero()); 4 * modes * modes],
    };
    for (weight, p) in bath.members() {
        let a = bloch_matrix(p, env);
        let state = bloch_steady_state(p, env);
        for beta in Sign::BOTH {
            for (m, &dm) in detunings.iter().enumerate() {
                let integral = correlator_integral_with(&a, &state, beta, dm)?;
                for alpha in Sign::BOTH {
                    for n in 0..modes {
                        let coupling = alpha.apply(p.couplings[n]) * beta.apply(p.couplings[m]);
                        let k = table.slot(alpha, beta, m, n);
                        table.entries[k] += coupling * integral[alpha.index()] * weight;
                    }
                }
            }
        }
    }
    if !table.is_finite() {
        return Err(Error::NonFinite("power spectral density"));
    }
    Ok(table)
}

/// A single entry `Γ_αβ^mn`.
pub fn psd<R: Real>(
    bath: &TlsBath<R>,
    env: &BathEnvironment<R>,
    detunings: &[R],
    alpha: Sign,
    beta: Sign,
    m: usize,
    n: usize,
) -> Result<Complex<R>> {
    check_detunings(bath, detunings)?;
    if m >= detunings.len() || n >= detunings.len() {
        return Err(Error::Dimension(format!(
            "mode pair ({m}, {n}) out of range for {} modes",
            detunings.len()
        )));
    }
    let mut total = c(R::zero(), R::zero());
    for (weight, p) in bath.members() {
        let integral = correlator_integral(p, env, beta, detunings[m])?;
        total += alpha.apply(p.couplings[n])
            * beta.apply(p.couplings[m])
            * integral[alpha.index()]
            * weight;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;

    fn tls(drive: f64, kappa2: f64) -> TlsParams {
        TlsParams {
            omega_b: 1.0,
            kappa1: 1e-4,
            kappa2,
            drive: c(drive, 0.0),
            couplings: vec![c(1e-8, 0.0)],
        }
    }

    const ZERO_T: BathEnvironment = BathEnvironment {
        temperature: 0.0,
        omega_d: 1.0,
    };

    #[test]
    fn bose_occupation_values() {
        assert_eq!(bose_occupation(1.0, 0.0), 0.0);
        let t: f64 = 1e6;
        assert!((bose_occupation(1.0, t) / (t - 0.5) - 1.0).abs() < 1e-6);
        assert!((bose_occupation(1.0, 1.0 / std::f64::consts::LN_2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transverse_rate_values() {
        assert!((transverse_rate(&tls(0.0, 0.0), &ZERO_T) - 5e-5).abs() < 1e-20);
        assert!((transverse_rate(&tls(0.0, 1e-4), &ZERO_T) - 2.5e-4).abs() < 1e-19);
        let hot = BathEnvironment {
            temperature: 1.0 / std::f64::consts::LN_2,
            omega_d: 1.0,
        };
        assert!((transverse_rate(&tls(0.0, 0.0), &hot) - 1.5e-4).abs() < 1e-15);
    }

    #[test]
    fn saturation_values() {
        assert_eq!(saturation(&tls(0.0, 0.0), &ZERO_T), 0.0);
        let s = saturation(&tls(1e-4 / 2f64.sqrt(), 0.0), &ZERO_T);
        assert!((s - 1.0).abs() < 1e-12);
        assert!((saturation(&tls(1e-4, 0.0), &ZERO_T) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undriven_ground_state() {
        let b = bloch_steady_state(&tls(0.0, 0.0), &ZERO_T);
        assert_eq!(b.sigma_z, -1.0);
        assert_eq!(b.sigma_plus.norm(), 0.0);
    }

    #[test]
    fn strong_drive_saturates() {
        let b = bloch_steady_state(&tls(1e-2, 0.0), &ZERO_T);
        assert!(b.sigma_z < 0.0 && b.sigma_z > -1e-3);
        assert!(b.sigma_plus.norm() < 1e-2);
    }

    #[test]
    fn half_saturation_values() {
        let p = tls(1e-4 / 2f64.sqrt(), 0.0);
        let b = bloch_steady_state(&p, &ZERO_T);
        assert!((b.sigma_z + 0.5).abs() < 1e-15);
        // ⟨σ+⟩ = −Ω/(2·2iκ_t) = iΩ/(4κ_t)
        let expected = c(0.0, p.drive.re / (4.0 * 5e-5));
        assert!((b.sigma_plus - expected).norm() < 1e-15);
    }

    #[test]
    fn bloch_matrix_spectrum_without_drive() {
        let p = TlsParams {
            omega_b: 1.3,
            ..tls(0.0, 2e-5)
        };
        let a = bloch_matrix(&p, &ZERO_T);
        let kt = transverse_rate(&p, &ZERO_T);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        let expected = [c(-kt, -0.3), c(-1e-4, 0.0), c(-kt, 0.3)];
        for (x, y) in ev.iter().zip(expected) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn bloch_matrix_trace() {
        let p = tls(3e-4, 1e-5);
        let a = bloch_matrix(&p, &ZERO_T);
        let kt = transverse_rate(&p, &ZERO_T);
        assert!((a.trace() - c(-2.0 * kt - 1e-4, 0.0)).norm() < 1e-18);
        let ev = eigenvalues(&bloch_matrix(&tls(1e-4, 0.0), &ZERO_T)).unwrap();
        assert!(ev.iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn ground_state_correlators() {
        let b = bloch_steady_state(&tls(0.0, 0.0), &ZERO_T);
        let minus = same_time_correlators(&b, Sign::Minus);
        assert!(minus.norm_inf() == 0.0);
        let plus = same_time_correlators(&b, Sign::Plus);
        assert_eq!(plus[1], c(1.0, 0.0));
        assert_eq!(plus[0], c(0.0, 0.0));
    }

    #[test]
    fn correlators_match_density_matrix_traces() {
        let p = tls(1e-4 / 2f64.sqrt(), 0.0);
        let b = bloch_steady_state(&p, &ZERO_T);
        let rho = b.density_matrix();
        let sp = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let sm = sp.adjoint();
        let sz = CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]);
        let id = CMatrix::<f64>::identity(2);
        let center = |op: &CMatrix<f64>| {
            let mean = op.matmul(&rho).trace();
            op - &id.scale(mean)
        };
        let ops = [center(&sp), center(&sm), center(&sz)];
        for (beta, op_b) in [(Sign::Plus, center(&sp)), (Sign::Minus, center(&sm))] {
            let v = same_time_correlators(&b, beta);
            for k in 0..3 {
                let direct = ops[k].matmul(&op_b).matmul(&rho).trace();
                assert!((direct - v[k]).norm() < 1e-12, "beta {beta:?} k {k}");
            }
        }
    }

    #[test]
    fn undriven_integral_is_single_exponential() {
        let p = TlsParams {
            omega_b: 1.0 + 2e-5,
            ..tls(0.0, 0.0)
        };
        let dm = 7e-5;
        let v = correlator_integral(&p, &ZERO_T, Sign::Plus, dm).unwrap();
        let kt = transverse_rate(&p, &ZERO_T);
        let expected = -c(1.0, 0.0) / c(-kt, -2e-5 + dm);
        assert!((v[1] - expected).norm() < 1e-9 * expected.norm());
        assert!(v[0].norm() == 0.0 && v[2].norm() == 0.0);
    }

    #[test]
    fn undriven_psd_has_no_anomalous_terms() {
        let bath = TlsBath::identical(100_000, tls(0.0, 0.0));
        let t = psd_table(&bath, &ZERO_T, &[3e-5]).unwrap();
        assert_eq!(t.get(Sign::Plus, Sign::Plus, 0, 0), c(0.0, 0.0));
        assert_eq!(t.get(Sign::Minus, Sign::Minus, 0, 0), c(0.0, 0.0));
        assert!(t.get(Sign::Minus, Sign::Plus, 0, 0).re > 0.0);
    }

    #[test]
    fn identical_fast_path_matches_explicit_sum() {
        let p = tls(7e-5, 1e-5);
        let fast = TlsBath::identical(5, p.clone());
        let slow = TlsBath::Explicit(vec![p.clone(); 5]);
        let a = psd_table(&fast, &ZERO_T, &[1e-5]).unwrap();
        let b = psd_table(&slow, &ZERO_T, &[1e-5]).unwrap();
        for alpha in Sign::BOTH {
            for beta in Sign::BOTH {
                let (x, y) = (a.get(alpha, beta, 0, 0), b.get(alpha, beta, 0, 0));
                assert!((x - y).norm() <= 1e-14 * x.norm().max(1e-300));
            }
        }
        assert!(matches!(
            TlsBath::from_list(vec![p.clone(); 3]),
            TlsBath::Identical { count: 3, .. }
        ));
    }

    #[test]
    fn single_entry_matches_table() {
        let mut p = tls(5e-5, 0.0);
        p.couplings = vec![c(1e-8, 2e-9), c(-3e-9, 1e-8)];
        let bath = TlsBath::identical(10, p);
        let det = [1e-5, -4e-5];
        let table = psd_table(&bath, &ZERO_T, &det).unwrap();
        for alpha in Sign::BOTH {
            for beta in Sign::BOTH {
                for m in 0..2 {
                    for n in 0..2 {
                        let x = psd(&bath, &ZERO_T, &det, alpha, beta, m, n).unwrap();
                        assert_eq!(x, table.get(alpha, beta, m, n));
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut p = tls(0.0, 0.0);
        p.kappa1 = 0.0;
        assert!(p.validate().is_err());
        let mut p = tls(0.0, 0.0);
        p.couplings.clear();
        assert!(p.validate().is_err());
        let env = BathEnvironment {
            temperature: -1.0,
            omega_d: 1.0,
        };
        assert!(env.validate().is_err());
    }
}
