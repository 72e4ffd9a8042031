//! Exact single-TLS correlators by quadrature of the propagated two-time
//! function on the vectorized 2x2 space.

use num_complex::Complex;

use crate::bath::{bose_occupation, BathEnvironment, Sign, TlsParams};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, expm, null_vector, CMatrix, CVector};
use crate::scalar::{c, re, Real};

use super::{sandwich, DensityMatrix};

// Kronrod 15-point nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Relative agreement between successive panel refinements.
const QUADRATURE_TOLERANCE: f64 = 1e-13;
/// Integration window in units of the slowest decay time.
const DECAY_TIMES: f64 = 40.0;
const MAX_PANELS: usize = 1 << 20;

/// Generator of one TLS's Bloch master equation on `vec(ρ)`, basis
/// `(|e⟩, |g⟩)`.
pub fn bloch_liouvillian<R: Real>(p: &TlsParams<R>, env: &BathEnvironment<R>) -> CMatrix<R> {
    let half = R::lit(0.5);
    let sm = CMatrix::from_real_rows(&[[R::zero(), R::zero()], [R::one(), R::zero()]]);
    let sp = sm.adjoint();
    let sz = CMatrix::from_real_rows(&[[R::one(), R::zero()], [R::zero(), -R::one()]]);
    let id = CMatrix::identity(2);
    let mut h = sz.scale(re(half * p.detuning(env)));
    h.add_scaled(p.drive * half, &sp);
    h.add_scaled(p.drive.conj() * half, &sm);
    let mut l = sandwich(&h, &id).scale(c(R::zero(), -R::one()));
    l.add_scaled(c(R::zero(), R::one()), &sandwich(&id, &h));
    let nb = bose_occupation(p.omega_b, env.temperature);
    super::add_dissipator(&mut l, p.kappa1 * (R::one() + nb), &sm, &id);
    super::add_dissipator(&mut l, p.kappa1 * nb, &sp, &id);
    super::add_dissipator(&mut l, p.kappa2, &sz, &id);
    l
}

/// Stationary TLS density matrix from the kernel of its generator.
pub fn bloch_steady_state_numeric<R: Real>(
    p: &TlsParams<R>,
    env: &BathEnvironment<R>,
) -> Result<CMatrix<R>> {
    let v = null_vector(&bloch_liouvillian(p, env))?;
    Ok(DensityMatrix::from_vec(&v, 2).normalized().rho)
}

fn pauli<R: Real>(s: Sign) -> CMatrix<R> {
    let z = R::zero();
    let o = R::one();
    match s {
        Sign::Plus => CMatrix::from_real_rows(&[[z, o], [z, z]]),
        Sign::Minus => CMatrix::from_real_rows(&[[z, z], [o, z]]),
    }
}

fn centered<R: Real>(op: &CMatrix<R>, rho: &CMatrix<R>) -> CMatrix<R> {
    let mean = op.matmul(rho).trace();
    let mut out = op.clone();
    for k in 0..2 {
        out[(k, k)] -= mean;
    }
    out
}

/// `∫₀^∞ dτ ⟨σ̃_α(τ) σ̃_β(0)⟩ e^{β iΔ_m τ}` by panel Gauss–Kronrod quadrature
/// of `Tr[σ̃_α e^{Lτ}(σ̃_β ρ)]`, truncated after forty slowest decay times
/// with the remaining single-exponential tail added in closed form.
pub fn bloch_correlator_numeric<R: Real>(
    p: &TlsParams<R>,
    env: &BathEnvironment<R>,
    alpha: Sign,
    beta: Sign,
    delta_m: R,
) -> Result<Complex<R>> {
    p.validate()?;
    env.validate()?;
    let l = bloch_liouvillian(p, env);
    let rho = bloch_steady_state_numeric(p, env)?;
    let left = centered(&pauli::<R>(alpha), &rho);
    let start = DensityMatrix {
        rho: centered(&pauli::<R>(beta), &rho).matmul(&rho),
    }
    .to_vec();
    // the functional Tr[A X] on vec(X) is the row vec(Aᵀ)
    let probe: Vec<Complex<R>> = (0..4).map(|k| left[(k / 2, k % 2)]).collect();
    let phase = c(R::zero(), beta.value::<R>() * delta_m);

    let mut ev = eigenvalues(&l)?;
    ev.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let slowest = ev[1..].iter().map(|z| -z.re).fold(R::infinity(), R::min);
    let fastest_oscillation = ev.iter().map(|z| z.im.abs()).fold(R::zero(), R::max) + delta_m.abs();
    if !(slowest > R::zero()) {
        return Err(Error::InvalidParameter(
            "TLS generator has no decaying modes".into(),
        ));
    }
    let t_max = R::lit(DECAY_TIMES) / slowest;

    // start with panels about one radian of the fastest oscillation wide
    let turns = (t_max * (fastest_oscillation + slowest))
        .to_usize()
        .unwrap_or(1);
    let mut panels = turns.clamp(8, MAX_PANELS);
    let mut previous = integrate(&l, &start, &probe, phase, t_max, panels)?;
    loop {
        panels *= 2;
        if panels > MAX_PANELS {
            return Err(Error::NoConvergence { iterations: panels });
        }
        let (value, end_state) = integrate(&l, &start, &probe, phase, t_max, panels)?;
        let scale = value.norm().max(R::min_positive_value());
        let done = (value - previous.0).norm() <= R::lit(QUADRATURE_TOLERANCE) * scale;
        previous = (value, end_state);
        if done {
            break;
        }
    }
    let (body, end_value) = previous;
    // tail: remaining integrand decays at least as fast as e^{-slowest τ}
    let tail = end_value / (c(slowest, R::zero()) - phase);
    Ok(body + tail)
}

/// Returns the integral over `[0, t_max]` and the integrand at `t_max`.
fn integrate<R: Real>(
    l: &CMatrix<R>,
    start: &[Complex<R>],
    probe: &[Complex<R>],
    phase: Complex<R>,
    t_max: R,
    panels: usize,
) -> Result<(Complex<R>, Complex<R>)> {
    let h = t_max / R::from_usize(panels).expect("panel count");
    let half = h / R::lit(2.0);
    let mut offsets = Vec::with_capacity(15);
    let mut weights = Vec::with_capacity(15);
    for k in 0..8 {
        let x = R::lit(XGK[k]);
        let w = R::lit(WGK[k]);
        offsets.push(half * (R::one() - x));
        weights.push(w);
        if k < 7 {
            offsets.push(half * (R::one() + x));
            weights.push(w);
        }
    }
    let props: Vec<CMatrix<R>> = offsets
        .iter()
        .map(|&t| expm(&l.scale(re(t))))
        .collect::<Result<_>>()?;
    let phases: Vec<Complex<R>> = offsets.iter().map(|&t| (phase * t).exp()).collect();
    let step = expm(&l.scale(re(h)))?;
    let step_phase = (phase * h).exp();

    let mut state = CVector(start.to_vec());
    let mut panel_phase = re(R::one());
    let mut total = c(R::zero(), R::zero());
    let eval =
        |s: &CVector<R>| -> Complex<R> { probe.iter().zip(s.iter()).map(|(a, b)| *a * *b).sum() };
    for _ in 0..panels {
        let mut acc = c(R::zero(), R::zero());
        for k in 0..offsets.len() {
            let value = eval(&props[k].mul_vec(&state)) * phases[k];
            acc += value * weights[k];
        }
        total += acc * panel_phase * half;
        state = step.mul_vec(&state);
        panel_phase *= step_phase;
    }
    let end = eval(&state) * panel_phase;
    if !crate::scalar::is_finite(total) {
        return Err(Error::NonFinite("correlator quadrature"));
    }
    Ok((total, end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{bloch_steady_state, correlator_integral, transverse_rate};

    fn tls(drive: Complex<f64>, delta_b: f64, kappa2: f64) -> (TlsParams, BathEnvironment) {
        (
            TlsParams {
                omega_b: 1.0 + delta_b,
                kappa1: 1.0,
                kappa2,
                drive,
                couplings: vec![c(1.0, 0.0)],
            },
            BathEnvironment {
                temperature: 0.0,
                omega_d: 1.0,
            },
        )
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_state_matches_closed_form() {
        let (p, env) = tls(c(0.7, 0.2), 0.3, 0.1);
        let rho = bloch_steady_state_numeric(&p, &env).unwrap();
        let b = bloch_steady_state(&p, &env);
        assert!((&rho - &b.density_matrix()).max_abs() < 1e-10);
        let (p, env) = tls(c(0.0, 0.0), 0.0, 0.0);
        let rho = bloch_steady_state_numeric(&p, &env).unwrap();
        assert!((rho[(1, 1)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn undriven_single_exponential() {
        let (p, env) = tls(c(0.0, 0.0), 0.4, 0.0);
        let dm = 1.1;
        let kt = transverse_rate(&p, &env);
        let x = bloch_correlator_numeric(&p, &env, Sign::Minus, Sign::Plus, dm).unwrap();
        let expected = -c(1.0, 0.0) / c(-kt, -0.4 + dm);
        assert!((x - expected).norm() < 1e-10);
    }

    #[test]
    fn matches_resolvent() {
        let (p, env) = tls(c(1.3, -0.4), -0.6, 0.2);
        for beta in Sign::BOTH {
            let v = correlator_integral(&p, &env, beta, 0.9).unwrap();
            for alpha in Sign::BOTH {
                let x = bloch_correlator_numeric(&p, &env, alpha, beta, 0.9).unwrap();
                assert!((x - v[alpha.index()]).norm() < 1e-10, "{alpha:?} {beta:?}");
            }
        }
    }
}
