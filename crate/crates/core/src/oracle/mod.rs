//! Exact reference: the full mode ⊗ TLS density matrix on a truncated Fock
//! space, in the frame rotating at the drive frequency.
//!
//! Density matrices are vectorized by stacking columns, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. The mode is the first tensor factor,
//! followed by the TLS in order. TLS states are ordered `(|e⟩, |g⟩)`.

mod bloch;

pub use bloch::{bloch_correlator_numeric, bloch_liouvillian, bloch_steady_state_numeric};

use num_complex::Complex;

use crate::bath::{bose_occupation, BathEnvironment, TlsParams};
use crate::dynamics::Covariance;
use crate::error::{Error, Result};
use crate::linalg::{expm_apply, null_vector, CMatrix, CVector};
use crate::rates::{ModeParams, SingleModeSetup};
use crate::scalar::{c, re, Real};

/// Default limit on the Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 64;
/// Limit that cannot be raised by configuration.
pub const HARD_DIM_CAP: usize = 256;
/// Largest number of TLS simulated exactly.
pub const MAX_TLS: usize = 3;
/// Population allowed in the top two Fock levels.
pub const LEAK_TOLERANCE: f64 = 1e-8;

/// Truncation of the joint Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpec {
    pub fock_dim: usize,
    pub n_tls: usize,
    pub cap: usize,
}

impl HilbertSpec {
    pub fn new(fock_dim: usize, n_tls: usize) -> Self {
        Self {
            fock_dim,
            n_tls,
            cap: DEFAULT_DIM_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.fock_dim * (1usize << self.n_tls.min(16))
    }

    pub fn validate(&self) -> Result<()> {
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock dimension must be at least 2, got {}",
                self.fock_dim
            )));
        }
        if self.n_tls == 0 || self.n_tls > MAX_TLS {
            return Err(Error::InvalidParameter(format!(
                "oracle supports 1 to {MAX_TLS} TLS, got {}",
                self.n_tls
            )));
        }
        let cap = self.cap.min(HARD_DIM_CAP);
        if self.dim() > cap {
            return Err(Error::DimensionCap {
                dim: self.dim(),
                cap,
            });
        }
        Ok(())
    }
}

/// Physical content of an oracle run: one mode and a short list of TLS,
/// each coupled to that mode through `couplings[0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleModel<R = f64> {
    pub env: BathEnvironment<R>,
    pub mode: ModeParams<R>,
    pub tls: Vec<TlsParams<R>>,
}

impl<R: Real> OracleModel<R> {
    /// `n_tls` copies of the setup's TLS with the coupling rescaled so that
    /// `N G²` is unchanged.
    pub fn rescaled(setup: &SingleModeSetup<R>, n_tls: usize) -> Self {
        let factor = (R::from_usize(setup.count).expect("count")
            / R::from_usize(n_tls).expect("count"))
        .sqrt();
        let mut p = setup.tls.clone();
        p.couplings = vec![setup.coupling() * factor];
        Self {
            env: setup.env,
            mode: setup.mode,
            tls: vec![p; n_tls],
        }
    }

    /// The setup's TLS copied `setup.count` times without rescaling.
    pub fn literal(setup: &SingleModeSetup<R>) -> Self {
        Self {
            env: setup.env,
            mode: setup.mode,
            tls: vec![setup.tls.clone(); setup.count],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.mode.validate()?;
        for p in &self.tls {
            p.validate()?;
        }
        Ok(())
    }
}

fn mode_lowering<R: Real>(n: usize) -> CMatrix<R> {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = re(R::from_usize(k).expect("level").sqrt());
    }
    a
}

fn sigma_minus<R: Real>() -> CMatrix<R> {
    CMatrix::from_real_rows(&[[R::zero(), R::zero()], [R::one(), R::zero()]])
}

fn sigma_z<R: Real>() -> CMatrix<R> {
    CMatrix::from_real_rows(&[[R::one(), R::zero()], [R::zero(), -R::one()]])
}

/// Operators of the joint space, built once per truncation.
struct Operators<R> {
    a: CMatrix<R>,
    sm: Vec<CMatrix<R>>,
    sz: Vec<CMatrix<R>>,
    top: CMatrix<R>,
}

impl<R: Real> Operators<R> {
    fn new(spec: &HilbertSpec) -> Self {
        let nf = spec.fock_dim;
        let tls_dim = 1usize << spec.n_tls;
        let embed_mode = |op: &CMatrix<R>| op.kron(&CMatrix::identity(tls_dim));
        let embed_tls = |k: usize, op: &CMatrix<R>| {
            let left = CMatrix::identity(nf * (1 << k));
            let right = CMatrix::identity(1 << (spec.n_tls - k - 1));
            left.kron(op).kron(&right)
        };
        let mut top = CMatrix::zeros(nf, nf);
        for k in nf.saturating_sub(2)..nf {
            top[(k, k)] = re(R::one());
        }
        Self {
            a: embed_mode(&mode_lowering(nf)),
            sm: (0..spec.n_tls)
                .map(|k| embed_tls(k, &sigma_minus()))
                .collect(),
            sz: (0..spec.n_tls).map(|k| embed_tls(k, &sigma_z())).collect(),
            top: embed_mode(&top),
        }
    }
}

/// Vectorized generator of the full rotating-frame master equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Liouvillian<R = f64> {
    pub matrix: CMatrix<R>,
    pub spec: HilbertSpec,
}

impl<R: Real> Liouvillian<R> {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Largest `|Σ_r L[r, (k,k)-column]|`-type defect of trace preservation:
    /// the norm of `vec(I)† L`.
    pub fn trace_defect(&self) -> R {
        let d = self.dim();
        let n = d * d;
        let mut worst = R::zero();
        for col in 0..n {
            let mut acc = c(R::zero(), R::zero());
            for k in 0..d {
                acc += self.matrix[(k * d + k, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

/// Superoperator of `ρ ↦ A ρ B`.
fn sandwich<R: Real>(a: &CMatrix<R>, b: &CMatrix<R>) -> CMatrix<R> {
    b.transpose().kron(a)
}

fn add_dissipator<R: Real>(l: &mut CMatrix<R>, rate: R, jump: &CMatrix<R>, id: &CMatrix<R>) {
    if rate == R::zero() {
        return;
    }
    let jdj = jump.adjoint().matmul(jump);
    let k = re(rate);
    l.add_scaled(k, &sandwich(jump, &jump.adjoint()));
    l.add_scaled(k * R::lit(-0.5), &sandwich(&jdj, id));
    l.add_scaled(k * R::lit(-0.5), &sandwich(id, &jdj));
}

fn joint_hamiltonian<R: Real>(model: &OracleModel<R>, ops: &Operators<R>) -> CMatrix<R> {
    let env = &model.env;
    let a = &ops.a;
    let ad = a.adjoint();
    let mut h = ad.matmul(a).scale(re(model.mode.detuning(env)));
    h.add_scaled(model.mode.drive, a);
    h.add_scaled(model.mode.drive.conj(), &ad);
    let half = R::lit(0.5);
    for (k, p) in model.tls.iter().enumerate() {
        let sm = &ops.sm[k];
        let sp = sm.adjoint();
        h.add_scaled(re(half * p.detuning(env)), &ops.sz[k]);
        h.add_scaled(p.drive * half, &sp);
        h.add_scaled(p.drive.conj() * half, sm);
        let g = p.couplings[0];
        h.add_scaled(g, &sp.matmul(a));
        h.add_scaled(g.conj(), &sm.matmul(&ad));
    }
    h
}

/// Builds the generator for `model` on the truncation `spec`.
pub fn build_liouvillian<R: Real>(
    model: &OracleModel<R>,
    spec: &HilbertSpec,
) -> Result<Liouvillian<R>> {
    spec.validate()?;
    model.validate()?;
    if model.tls.len() != spec.n_tls {
        return Err(Error::Dimension(format!(
            "model has {} TLS but the truncation expects {}",
            model.tls.len(),
            spec.n_tls
        )));
    }
    let ops = Operators::new(spec);
    let d = spec.dim();
    let id = CMatrix::identity(d);
    let h = joint_hamiltonian(model, &ops);
    let mut l = sandwich(&h, &id).scale(c(R::zero(), -R::one()));
    l.add_scaled(c(R::zero(), R::one()), &sandwich(&id, &h));

    let temperature = model.env.temperature;
    let n0 = bose_occupation(model.mode.omega, temperature);
    add_dissipator(&mut l, model.mode.gamma * (R::one() + n0), &ops.a, &id);
    add_dissipator(&mut l, model.mode.gamma * n0, &ops.a.adjoint(), &id);
    for (k, p) in model.tls.iter().enumerate() {
        let nb = bose_occupation(p.omega_b, temperature);
        add_dissipator(&mut l, p.kappa1 * (R::one() + nb), &ops.sm[k], &id);
        add_dissipator(&mut l, p.kappa1 * nb, &ops.sm[k].adjoint(), &id);
        add_dissipator(&mut l, p.kappa2, &ops.sz[k], &id);
    }
    Ok(Liouvillian {
        matrix: l,
        spec: *spec,
    })
}

/// A density matrix of the joint space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<R = f64> {
    pub rho: CMatrix<R>,
}

impl<R: Real> DensityMatrix<R> {
    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn from_vec(v: &[Complex<R>], dim: usize) -> Self {
        Self {
            rho: CMatrix::from_fn(dim, dim, |r, col| v[col * dim + r]),
        }
    }

    pub fn to_vec(&self) -> CVector<R> {
        let d = self.dim();
        CVector((0..d * d).map(|k| self.rho[(k % d, k / d)]).collect())
    }

    pub fn trace(&self) -> Complex<R> {
        self.rho.trace()
    }

    pub fn purity(&self) -> R {
        self.rho.matmul(&self.rho).trace().re
    }

    pub fn expect(&self, op: &CMatrix<R>) -> Complex<R> {
        op.matmul(&self.rho).trace()
    }

    /// `(ρ + ρ†)/2` with unit trace.
    pub fn normalized(&self) -> Self {
        let herm = (&self.rho + &self.rho.adjoint()).scale(re(R::lit(0.5)));
        let tr = herm.trace().re;
        Self {
            rho: herm.scale(re(R::one() / tr)),
        }
    }

    /// Product state `|n⟩⟨n| ⊗ |g⟩⟨g|^{⊗N}`.
    pub fn fock_ground(spec: &HilbertSpec, n: usize) -> Self {
        let tls_dim = 1usize << spec.n_tls;
        let k = n * tls_dim + tls_dim - 1;
        let mut rho = CMatrix::zeros(spec.dim(), spec.dim());
        rho[(k, k)] = re(R::one());
        Self { rho }
    }
}

/// Stationary state from the kernel of the generator.
pub fn steady_state_full<R: Real>(l: &Liouvillian<R>) -> Result<DensityMatrix<R>> {
    let v = null_vector(&l.matrix)?;
    let rho = DensityMatrix::from_vec(&v, l.dim()).normalized();
    if !rho.rho.is_finite() {
        return Err(Error::NonFinite("oracle steady state"));
    }
    Ok(rho)
}

/// `exp(L t) ρ0`.
pub fn evolve<R: Real>(
    l: &Liouvillian<R>,
    rho0: &DensityMatrix<R>,
    t: R,
) -> Result<DensityMatrix<R>> {
    if rho0.dim() != l.dim() {
        return Err(Error::Dimension(format!(
            "state of dimension {} for generator of dimension {}",
            rho0.dim(),
            l.dim()
        )));
    }
    let v = expm_apply(&l.matrix, &rho0.to_vec(), t)?;
    Ok(DensityMatrix::from_vec(&v, l.dim()))
}

/// Mode moments and TLS polarizations of a joint state.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectations<R = f64> {
    pub s: Complex<R>,
    pub n: R,
    pub s2: Complex<R>,
    pub sigma_plus: Vec<Complex<R>>,
    pub sigma_z: Vec<R>,
    /// Population of the top two Fock levels.
    pub leak: R,
    /// Set when `leak` exceeds [`LEAK_TOLERANCE`]; the moments are then
    /// unreliable.
    pub truncation_warning: bool,
}

impl<R: Real> Expectations<R> {
    /// Moment vector ordered like the effective model.
    pub fn moments(&self) -> [Complex<R>; 5] {
        [re(self.n), self.s, self.s.conj(), self.s2, self.s2.conj()]
    }
}

pub fn expectations<R: Real>(
    rho: &DensityMatrix<R>,
    spec: &HilbertSpec,
) -> Result<Expectations<R>> {
    if rho.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "state of dimension {} for truncation {}",
            rho.dim(),
            spec.dim()
        )));
    }
    let ops = Operators::new(spec);
    let a = &ops.a;
    let leak = rho.expect(&ops.top).re;
    Ok(Expectations {
        s: rho.expect(a),
        n: rho.expect(&a.adjoint().matmul(a)).re,
        s2: rho.expect(&a.matmul(a)),
        sigma_plus: ops.sm.iter().map(|sm| rho.expect(&sm.adjoint())).collect(),
        sigma_z: ops.sz.iter().map(|sz| rho.expect(sz).re).collect(),
        leak,
        truncation_warning: leak > R::lit(LEAK_TOLERANCE),
    })
}

/// Quadrature covariance evaluated directly from `x` and `p` operators.
pub fn covariance<R: Real>(rho: &DensityMatrix<R>, spec: &HilbertSpec) -> Result<Covariance<R>> {
    if rho.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "state of dimension {} for truncation {}",
            rho.dim(),
            spec.dim()
        )));
    }
    let ops = Operators::new(spec);
    let a = &ops.a;
    let ad = a.adjoint();
    let k = R::lit(0.5).sqrt();
    let x = (a + &ad).scale(re(k));
    let p = (&ad - a).scale(c(R::zero(), k));
    let mx = rho.expect(&x).re;
    let mp = rho.expect(&p).re;
    let xp = x.matmul(&p);
    let px = p.matmul(&x);
    let sym = rho.expect(&(&xp + &px)).re * R::lit(0.5);
    Ok(Covariance {
        vx: rho.expect(&x.matmul(&x)).re - mx * mx,
        vp: rho.expect(&p.matmul(&p)).re - mp * mp,
        cxp: sym - mx * mp,
    })
}

/// Result of [`steady_state_auto`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSteadyState<R = f64> {
    pub spec: HilbertSpec,
    pub rho: DensityMatrix<R>,
    pub expectations: Expectations<R>,
}

/// Steady state with the Fock dimension doubled from `start_fock` until the
/// truncation leak drops below [`LEAK_TOLERANCE`].
pub fn steady_state_auto<R: Real>(
    model: &OracleModel<R>,
    start_fock: usize,
    cap: usize,
) -> Result<OracleSteadyState<R>> {
    let mut fock = start_fock.max(2);
    loop {
        let spec = HilbertSpec::new(fock, model.tls.len()).with_cap(cap);
        spec.validate()?;
        let l = build_liouvillian(model, &spec)?;
        let rho = steady_state_full(&l)?;
        let ex = expectations(&rho, &spec)?;
        if !ex.truncation_warning {
            return Ok(OracleSteadyState {
                spec,
                rho,
                expectations: ex,
            });
        }
        fock *= 2;
    }
}

/// `g¹(τ)` of the exact model by quantum regression on the full generator.
pub fn oracle_g1<R: Real>(
    l: &Liouvillian<R>,
    rho: &DensityMatrix<R>,
    tau: &[R],
) -> Result<Vec<Complex<R>>> {
    let ops = Operators::new(&l.spec);
    let a = &ops.a;
    let n = rho.expect(&a.adjoint().matmul(a)).re;
    let start = DensityMatrix {
        rho: rho.rho.matmul(&a.adjoint()),
    };
    let mut x = start.to_vec();
    let mut now = R::zero();
    let mut out = Vec::with_capacity(tau.len());
    for &t in tau {
        if t < now {
            return Err(Error::InvalidParameter(
                "delay grid must be non-decreasing".into(),
            ));
        }
        x = expm_apply(&l.matrix, &x, t - now)?;
        now = t;
        let state = DensityMatrix::from_vec(&x, l.dim());
        out.push(state.expect(a) / n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::bloch_steady_state;
    use crate::presets::default_setup;

    fn model(g: f64, drive: f64, gamma_0: f64) -> OracleModel {
        let mut setup = default_setup()
            .with_gamma_0(gamma_0)
            .with_drive(c(drive, 0.0));
        setup.count = 1;
        setup.tls.couplings = vec![c(g, 0.0)];
        OracleModel::literal(&setup)
    }

    #[test]
    fn trace_is_preserved() {
        let mut m = model(5e-6, 3e-5, 3e-6);
        m.env.temperature = 0.7;
        m.tls[0].kappa2 = 2e-5;
        m.mode.drive = c(1e-6, -2e-6);
        let spec = HilbertSpec::new(4, 1);
        let l = build_liouvillian(&m, &spec).unwrap();
        assert!(l.trace_defect() < 1e-10 * l.matrix.norm_inf());
    }

    #[test]
    fn decoupled_vacuum_ground() {
        let spec = HilbertSpec::new(3, 1);
        let l = build_liouvillian(&model(0.0, 0.0, 1e-6), &spec).unwrap();
        let rho = steady_state_full(&l).unwrap();
        let target = DensityMatrix::<f64>::fock_ground(&spec, 0);
        assert!((&rho.rho - &target.rho).max_abs() < 1e-10);
    }

    #[test]
    fn decoupled_tls_marginal_matches_bloch() {
        let m = model(0.0, 7e-5, 1e-6);
        let spec = HilbertSpec::new(2, 1);
        let rho = steady_state_full(&build_liouvillian(&m, &spec).unwrap()).unwrap();
        let ex = expectations(&rho, &spec).unwrap();
        let b = bloch_steady_state(&m.tls[0], &m.env);
        assert!((ex.sigma_plus[0] - b.sigma_plus).norm() < 1e-10);
        assert!((ex.sigma_z[0] - b.sigma_z).abs() < 1e-10);
        assert!(ex.n.abs() < 1e-12);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let spec = HilbertSpec::new(40, 1);
        assert!(matches!(
            build_liouvillian(&model(1e-6, 0.0, 1e-6), &spec),
            Err(Error::DimensionCap { .. })
        ));
        assert!(HilbertSpec::new(4, 4).validate().is_err());
    }

    #[test]
    fn coherent_state_expectations() {
        let spec = HilbertSpec::new(30, 1).with_cap(HARD_DIM_CAP);
        let alpha = c(0.6, -0.3);
        let nf = spec.fock_dim;
        let mut amp = vec![c(0.0, 0.0); nf];
        let mut fact = 1.0;
        for (k, slot) in amp.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *slot = alpha.powu(k as u32) / fact.sqrt() * (-alpha.norm_sqr() / 2.0).exp();
        }
        let d = spec.dim();
        let rho = CMatrix::from_fn(d, d, |r, col| {
            if r % 2 == 1 && col % 2 == 1 {
                amp[r / 2] * amp[col / 2].conj()
            } else {
                c(0.0, 0.0)
            }
        });
        let ex = expectations(&DensityMatrix { rho }, &spec).unwrap();
        assert!((ex.s - alpha).norm() < 1e-12);
        assert!((ex.n - alpha.norm_sqr()).abs() < 1e-12);
        assert_eq!(ex.sigma_z[0], -1.0);
        assert!(!ex.truncation_warning);
    }

    #[test]
    fn evolution_relaxes_and_stays_physical() {
        let m = model(5e-6, 7e-5, 2e-5);
        let spec = HilbertSpec::new(4, 1);
        let l = build_liouvillian(&m, &spec).unwrap();
        let ss = steady_state_full(&l).unwrap();
        let rho0 = DensityMatrix::fock_ground(&spec, 1);
        assert_eq!(evolve(&l, &rho0, 0.0).unwrap(), rho0);
        let mut rho = rho0.clone();
        for _ in 0..10 {
            rho = evolve(&l, &rho, 1e5).unwrap();
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-9);
            assert!(rho.purity() <= 1.0 + 1e-9);
            assert!(rho.rho.hermiticity_defect() < 1e-9);
        }
        let late = evolve(&l, &rho, 2e6).unwrap();
        assert!((&late.rho - &ss.rho).max_abs() < 1e-6);
    }
}
