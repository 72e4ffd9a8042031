//! Complex Schur decomposition by Householder reduction to Hessenberg form
//! followed by single-shift QR sweeps with Givens rotations.

use num_complex::Complex;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sweeps allowed per eigenvalue before giving up.
const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Unitary `Z` and upper-triangular `T` with `A = Z T Z†`.
#[derive(Clone, Debug)]
pub struct Schur<R> {
    pub unitary: CMatrix<R>,
    pub triangular: CMatrix<R>,
}

fn zero<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

fn hessenberg<R: Real>(a: &CMatrix<R>, want_q: bool) -> (CMatrix<R>, Option<CMatrix<R>>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = want_q.then(|| CMatrix::identity(n));
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|r| h[(r, k)].norm_sqr()).sum::<R>().sqrt();
        if alpha_norm == R::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == R::zero() {
            Complex::new(R::one(), R::zero())
        } else {
            x0 / x0.norm()
        };
        // v = x + phase·‖x‖·e1, reflector H = I − 2 v v† / (v† v)
        let mut v: Vec<Complex<R>> = (k + 1..n).map(|r| h[(r, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: R = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == R::zero() {
            continue;
        }
        let two = R::lit(2.0) / vnorm2;
        // H·A from the left, rows k+1..n
        for c in 0..n {
            let s: Complex<R> = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, c)])
                .sum();
            let s = s * two;
            for (i, vi) in v.iter().enumerate() {
                let cur = h[(k + 1 + i, c)];
                h[(k + 1 + i, c)] = cur - *vi * s;
            }
        }
        // A·H from the right, columns k+1..n
        for r in 0..n {
            let s: Complex<R> = v
                .iter()
                .enumerate()
                .map(|(i, vi)| h[(r, k + 1 + i)] * *vi)
                .sum();
            let s = s * two;
            for (i, vi) in v.iter().enumerate() {
                let cur = h[(r, k + 1 + i)];
                h[(r, k + 1 + i)] = cur - s * vi.conj();
            }
        }
        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let s: Complex<R> = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| q[(r, k + 1 + i)] * *vi)
                    .sum();
                let s = s * two;
                for (i, vi) in v.iter().enumerate() {
                    let cur = q[(r, k + 1 + i)];
                    q[(r, k + 1 + i)] = cur - s * vi.conj();
                }
            }
        }
        for r in k + 2..n {
            h[(r, k)] = zero();
        }
    }
    (h, q)
}

fn wilkinson_shift<R: Real>(
    a: Complex<R>,
    b: Complex<R>,
    c: Complex<R>,
    d: Complex<R>,
) -> Complex<R> {
    let half = R::lit(0.5);
    let mean = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Reduces `a` to complex Schur form.
pub fn schur<R: Real>(a: &CMatrix<R>) -> Result<Schur<R>> {
    let (t, z) = schur_impl(a, true)?;
    Ok(Schur {
        unitary: z.expect("unitary requested"),
        triangular: t,
    })
}

fn schur_impl<R: Real>(a: &CMatrix<R>, want_z: bool) -> Result<(CMatrix<R>, Option<CMatrix<R>>)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("eigenvalue input"));
    }
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a, want_z);
    if n < 2 {
        return Ok((h, z));
    }
    let eps = R::epsilon();
    let scale = a.max_abs().max(R::min_positive_value());
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = SWEEPS_PER_EIGENVALUE * n;

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let reference = if diag == R::zero() { scale } else { diag };
            if sub <= eps * reference {
                h[(l, l - 1)] = zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence { iterations: total });
        }

        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            let sub = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + Complex::new(sub * R::lit(0.75), sub * R::lit(0.4375))
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == R::zero() {
                (Complex::new(R::one(), R::zero()), zero())
            } else {
                (x / r, y / r)
            };
            for col in k..n {
                let a0 = h[(k, col)];
                let a1 = h[(k + 1, col)];
                h[(k, col)] = cs.conj() * a0 + sn.conj() * a1;
                h[(k + 1, col)] = -sn * a0 + cs * a1;
            }
            h[(k + 1, k)] = zero();
            rotations.push((cs, sn));
        }
        for (offset, &(cs, sn)) in rotations.iter().enumerate() {
            let k = l + offset;
            let last_row = (k + 2).min(hi);
            for row in 0..=last_row {
                let a0 = h[(row, k)];
                let a1 = h[(row, k + 1)];
                h[(row, k)] = a0 * cs + a1 * sn;
                h[(row, k + 1)] = -a0 * sn.conj() + a1 * cs.conj();
            }
            if let Some(z) = z.as_mut() {
                for row in 0..n {
                    let a0 = z[(row, k)];
                    let a1 = z[(row, k + 1)];
                    z[(row, k)] = a0 * cs + a1 * sn;
                    z[(row, k + 1)] = -a0 * sn.conj() + a1 * cs.conj();
                }
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    for r in 1..n {
        for c in 0..r {
            h[(r, c)] = zero();
        }
    }
    Ok((h, z))
}

/// All eigenvalues of a square matrix, with algebraic multiplicity, in the
/// order they appear on the diagonal of the Schur form.
pub fn eigenvalues<R: Real>(a: &CMatrix<R>) -> Result<Vec<Complex<R>>> {
    let (t, _) = schur_impl(a, false)?;
    Ok((0..t.rows()).map(|k| t[(k, k)]).collect())
}

/// Eigenvalues together with unit-norm right eigenvectors.
pub fn eigenpairs<R: Real>(a: &CMatrix<R>) -> Result<Vec<(Complex<R>, CVector<R>)>> {
    let Schur {
        unitary: z,
        triangular: t,
    } = schur(a)?;
    let n = t.rows();
    let small = R::epsilon() * a.max_abs().max(R::min_positive_value());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![zero(); n];
        y[k] = Complex::new(R::one(), R::zero());
        for i in (0..k).rev() {
            let s: Complex<R> = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex::new(small, R::zero());
            }
            y[i] = -s / denom;
        }
        let mut v = z.mul_vec(&y);
        let norm = v.norm2();
        v.iter_mut().for_each(|x| *x = *x / norm);
        out.push((lambda, v));
    }
    Ok(out)
}

/// Largest real part of the spectrum.
pub fn spectral_abscissa<R: Real>(a: &CMatrix<R>) -> Result<R> {
    Ok(eigenvalues(a)?
        .into_iter()
        .map(|z| z.re)
        .fold(R::neg_infinity(), R::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn diagonal_matrix() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)]);
        let ev = sorted(eigenvalues(&a).unwrap());
        let expected = sorted(vec![c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)]);
        for (x, y) in ev.iter().zip(&expected) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_generator() {
        let a = CMatrix::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        let ev = sorted(eigenvalues(&a).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_is_handled() {
        let a = CMatrix::from_real_rows(&[[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]]);
        for z in eigenvalues(&a).unwrap() {
            assert!((z - c(2.0, 0.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn schur_reconstructs() {
        let a = CMatrix::from_rows(&[
            [c(1.0, 2.0), c(0.3, 0.0), c(-1.0, 1.0), c(0.0, 0.5)],
            [c(2.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)],
            [c(0.0, -1.0), c(4.0, 0.0), c(0.5, 0.5), c(2.0, 0.0)],
            [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        ]);
        let s = schur(&a).unwrap();
        let back = s.unitary.matmul(&s.triangular).matmul(&s.unitary.adjoint());
        assert!((&back - &a).max_abs() < 1e-12);
        let zz = s.unitary.adjoint().matmul(&s.unitary);
        assert!((&zz - &CMatrix::identity(4)).max_abs() < 1e-13);
    }

    #[test]
    fn eigenvector_residuals() {
        let a = CMatrix::from_rows(&[
            [c(-1.0, 0.2), c(0.0, 1.0), c(0.5, 0.0)],
            [c(0.1, 0.0), c(-2.0, -1.0), c(0.0, 0.3)],
            [c(0.0, 2.0), c(0.4, 0.0), c(-0.5, 0.0)],
        ]);
        for (lambda, v) in eigenpairs(&a).unwrap() {
            let av = a.mul_vec(&v);
            let res = (&av - &v.scale(lambda)).norm_inf();
            assert!(res <= 1e-9 * a.norm_inf(), "residual {res}");
        }
    }
}
