use num_complex::Complex;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Above this size `expm_apply` switches from the dense exponential to a
/// Krylov-free Taylor action that only needs matrix-vector products.
const DENSE_LIMIT: usize = 24;

/// Taylor terms after scaling; with ‖A‖/2^s ≤ 1/2 the truncation error is
/// below 0.5^19/19! ≈ 2e-23.
const TAYLOR_DEGREE: usize = 18;

/// Step norm target for the Taylor action.
const ACTION_STEP_NORM: f64 = 2.0;

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
pub fn expm<R: Real>(a: &CMatrix<R>) -> Result<CMatrix<R>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expm of {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let n = a.rows();
    let norm = a.norm_one();
    let mut squarings = 0i32;
    if norm > R::lit(0.5) {
        squarings = (norm / R::lit(0.5))
            .log2()
            .ceil()
            .to_i32()
            .unwrap_or(0)
            .max(0);
    }
    let scaled = a.scale(Complex::new(
        R::one() / R::lit(2.0).powi(squarings),
        R::zero(),
    ));

    // Horner: I + X(I + X/2(I + X/3(...)))
    let id = CMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        let kf = R::from_usize(k).expect("small integer");
        acc = scaled
            .matmul(&acc)
            .scale(Complex::new(R::one() / kf, R::zero()));
        acc.add_scaled(Complex::new(R::one(), R::zero()), &id);
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("expm result"));
    }
    Ok(acc)
}

/// `exp(A t) v` for `t ≥ 0`.
pub fn expm_apply<R: Real>(a: &CMatrix<R>, v: &[Complex<R>], t: R) -> Result<CVector<R>> {
    if !a.is_square() || a.rows() != v.len() {
        return Err(Error::Dimension(format!(
            "expm_apply of {}x{} matrix on vector of length {}",
            a.rows(),
            a.cols(),
            v.len()
        )));
    }
    if t < R::zero() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "propagation time must be finite and non-negative, got {t}"
        )));
    }
    if t == R::zero() {
        return Ok(CVector(v.to_vec()));
    }
    if a.rows() <= DENSE_LIMIT {
        let e = expm(&a.scale(Complex::new(t, R::zero())))?;
        return Ok(e.mul_vec(v));
    }
    taylor_action(a, v, t)
}

fn taylor_action<R: Real>(a: &CMatrix<R>, v: &[Complex<R>], t: R) -> Result<CVector<R>> {
    let norm = a.norm_one() * t;
    let steps = (norm / R::lit(ACTION_STEP_NORM))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let h = t / R::from_usize(steps).expect("step count");
    let hc = Complex::new(h, R::zero());
    let tiny = R::epsilon() * R::lit(0.1);
    let mut w = CVector(v.to_vec());
    for _ in 0..steps {
        let mut term = w.clone();
        let mut sum = w.clone();
        let mut quiet = 0;
        for k in 1..200 {
            let kf = R::from_usize(k).expect("small integer");
            term = a.mul_vec(&term).scale(hc / kf);
            for (s, t) in sum.iter_mut().zip(term.iter()) {
                *s += *t;
            }
            if term.norm_inf() <= tiny * sum.norm_inf() {
                quiet += 1;
                if quiet == 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        w = sum;
    }
    if !w.is_finite() {
        return Err(Error::NonFinite("expm_apply result"));
    }
    Ok(w)
}
