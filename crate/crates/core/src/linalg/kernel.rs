use num_complex::Complex;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Householder QR with column pivoting, `A P = Q R`. Only `R` and the
/// permutation are kept.
struct PivotedQr<R> {
    /// Column-major copy of `A`; the upper triangle holds `R` on exit.
    cols: Vec<Vec<Complex<R>>>,
    perm: Vec<usize>,
}

impl<R: Real> PivotedQr<R> {
    fn factor(a: &CMatrix<R>) -> Self {
        let n = a.rows();
        let m = a.cols();
        let mut cols: Vec<Vec<Complex<R>>> = (0..m)
            .map(|c| (0..n).map(|r| a[(r, c)]).collect())
            .collect();
        let mut perm: Vec<usize> = (0..m).collect();
        let mut norms: Vec<R> = cols
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        let mut reference: Vec<R> = norms.clone();

        for k in 0..n.min(m) {
            let (p, _) = norms
                .iter()
                .enumerate()
                .skip(k)
                .fold(
                    (k, -R::one()),
                    |best, (j, &v)| if v > best.1 { (j, v) } else { best },
                );
            if p != k {
                cols.swap(p, k);
                norms.swap(p, k);
                reference.swap(p, k);
                perm.swap(p, k);
            }
            let xnorm = cols[k][k..].iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
            if xnorm == R::zero() {
                continue;
            }
            let x0 = cols[k][k];
            let phase = if x0.norm() == R::zero() {
                Complex::new(R::one(), R::zero())
            } else {
                x0 / x0.norm()
            };
            let mut v: Vec<Complex<R>> = cols[k][k..].to_vec();
            v[0] += phase * xnorm;
            let vnorm2: R = v.iter().map(|z| z.norm_sqr()).sum();
            let two = R::lit(2.0) / vnorm2;

            cols[k][k] = -phase * xnorm;
            for z in cols[k][k + 1..].iter_mut() {
                *z = Complex::new(R::zero(), R::zero());
            }
            let (_, rest) = cols.split_at_mut(k + 1);
            for (offset, col) in rest.iter_mut().enumerate() {
                let j = k + 1 + offset;
                let tail = &mut col[k..];
                let s: Complex<R> = v
                    .iter()
                    .zip(tail.iter())
                    .map(|(vi, x)| vi.conj() * *x)
                    .sum::<Complex<R>>()
                    * two;
                for (x, vi) in tail.iter_mut().zip(&v) {
                    *x -= s * *vi;
                }
                // downdate the remaining column norm, recomputing on heavy cancellation
                norms[j] -= tail[0].norm_sqr();
                if norms[j] <= R::lit(1e-3) * reference[j] {
                    norms[j] = tail[1..].iter().map(|z| z.norm_sqr()).sum();
                    reference[j] = norms[j];
                }
            }
        }
        Self { cols, perm }
    }

    fn r(&self, row: usize, col: usize) -> Complex<R> {
        self.cols[col][row]
    }
}

/// Unit vector spanning the one-dimensional kernel of a square matrix.
///
/// The returned vector has unit 2-norm and its largest component is real
/// and positive.
pub fn null_vector<R: Real>(a: &CMatrix<R>) -> Result<CVector<R>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "kernel of {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("kernel input"));
    }
    let n = a.rows();
    if n == 1 {
        return if a[(0, 0)].norm() == R::zero() {
            Ok(CVector(vec![Complex::new(R::one(), R::zero())]))
        } else {
            Err(Error::KernelDimension {
                smallest: a[(0, 0)].norm().to_f64().unwrap_or(0.0),
                second: f64::INFINITY,
                threshold: 0.0,
            })
        };
    }
    let qr = PivotedQr::factor(a);
    let lead = qr.r(0, 0).norm();
    let threshold = R::kernel_tolerance() * lead.max(R::min_positive_value());
    let smallest = qr.r(n - 1, n - 1).norm();
    let second = qr.r(n - 2, n - 2).norm();
    if second <= threshold || smallest > threshold {
        return Err(Error::KernelDimension {
            smallest: smallest.to_f64().unwrap_or(0.0),
            second: second.to_f64().unwrap_or(0.0),
            threshold: threshold.to_f64().unwrap_or(0.0),
        });
    }

    // R11 x = -r, z = (x, 1)
    let mut z = vec![Complex::new(R::zero(), R::zero()); n];
    z[n - 1] = Complex::new(R::one(), R::zero());
    for row in (0..n - 1).rev() {
        let mut acc = -qr.r(row, n - 1);
        for col in row + 1..n - 1 {
            acc -= qr.r(row, col) * z[col];
        }
        z[row] = acc / qr.r(row, row);
    }
    let mut v = vec![Complex::new(R::zero(), R::zero()); n];
    for (j, &p) in qr.perm.iter().enumerate() {
        v[p] = z[j];
    }
    let big = v
        .iter()
        .copied()
        .fold(Complex::new(R::zero(), R::zero()), |b, x| {
            if x.norm() > b.norm() {
                x
            } else {
                b
            }
        });
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<R>().sqrt();
    let phase = (big / big.norm()).conj();
    let v = CVector(v.into_iter().map(|x| x * phase / norm).collect());
    if !v.is_finite() {
        return Err(Error::NonFinite("kernel vector"));
    }
    Ok(v)
}
