use num_complex::Complex;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<R> {
    factors: CMatrix<R>,
    perm: Vec<usize>,
    source: CMatrix<R>,
}

impl<R: Real> Lu<R> {
    pub fn factor(a: &CMatrix<R>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU of {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("LU input"));
        }
        let n = a.rows();
        let threshold = R::pivot_tolerance() * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|r| (r, lu[(r, k)].norm()))
                    .fold(
                        (k, -R::one()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(pivot_abs > threshold) || pivot_abs == R::zero() {
                return Err(Error::SingularMatrix {
                    pivot: pivot_abs.to_f64().unwrap_or(0.0),
                    threshold: threshold.to_f64().unwrap_or(0.0),
                });
            }
            if p != k {
                perm.swap(p, k);
                for c in 0..n {
                    let tmp = lu[(p, c)];
                    lu[(p, c)] = lu[(k, c)];
                    lu[(k, c)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for r in k + 1..n {
                let factor = lu[(r, k)] / pivot;
                lu[(r, k)] = factor;
                if factor.re == R::zero() && factor.im == R::zero() {
                    continue;
                }
                for c in k + 1..n {
                    let u = lu[(k, c)];
                    lu[(r, c)] -= factor * u;
                }
            }
        }
        Ok(Self {
            factors: lu,
            perm,
            source: a.clone(),
        })
    }

    fn substitute(&self, b: &[Complex<R>]) -> CVector<R> {
        let n = self.perm.len();
        let mut x: Vec<Complex<R>> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut acc = x[r];
            for c in 0..r {
                acc -= self.factors[(r, c)] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= self.factors[(r, c)] * x[c];
            }
            x[r] = acc / self.factors[(r, r)];
        }
        CVector(x)
    }

    /// Solves `A x = b` with one step of iterative refinement.
    pub fn solve(&self, b: &[Complex<R>]) -> Result<CVector<R>> {
        if b.len() != self.perm.len() {
            return Err(Error::Dimension(format!(
                "rhs of length {} for {}x{} system",
                b.len(),
                self.perm.len(),
                self.perm.len()
            )));
        }
        let mut x = self.substitute(b);
        let ax = self.source.mul_vec(&x);
        let residual: Vec<Complex<R>> = b.iter().zip(ax.iter()).map(|(&bi, &ai)| bi - ai).collect();
        let correction = self.substitute(&residual);
        for (xi, di) in x.iter_mut().zip(correction.iter()) {
            *xi += *di;
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("linear solve"));
        }
        Ok(x)
    }

    /// Inverse matrix, column by column.
    pub fn inverse(&self) -> Result<CMatrix<R>> {
        let n = self.perm.len();
        let mut inv = CMatrix::zeros(n, n);
        let mut e = vec![Complex::new(R::zero(), R::zero()); n];
        for c in 0..n {
            e.iter_mut()
                .for_each(|z| *z = Complex::new(R::zero(), R::zero()));
            e[c] = Complex::new(R::one(), R::zero());
            let col = self.solve(&e)?;
            for r in 0..n {
                inv[(r, c)] = col[r];
            }
        }
        Ok(inv)
    }
}

/// Solves the square system `A x = b`.
pub fn solve_linear<R: Real>(a: &CMatrix<R>, b: &[Complex<R>]) -> Result<CVector<R>> {
    Lu::factor(a)?.solve(b)
}
