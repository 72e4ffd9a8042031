use std::ops::{Add, Deref, DerefMut, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::scalar::{is_finite, Real};

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<R>>,
}

/// Dense complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector<R>(pub Vec<Complex<R>>);

impl<R: Real> CMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(R::zero(), R::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Complex::new(R::one(), R::zero());
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<R>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<Row: AsRef<[Complex<R>]>>(rows: &[Row]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), n_cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    pub fn from_real_rows<Row: AsRef<[R]>>(rows: &[Row]) -> Self {
        let complex: Vec<Vec<Complex<R>>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .iter()
                    .map(|&x| Complex::new(x, R::zero()))
                    .collect()
            })
            .collect();
        Self::from_rows(&complex)
    }

    pub fn diag(entries: &[Complex<R>]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (k, &z) in entries.iter().enumerate() {
            m[(k, k)] = z;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<R>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|&z| is_finite(z))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> R {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm()).sum::<R>())
            .fold(R::zero(), R::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> R {
        let mut sums = vec![R::zero(); self.cols];
        for r in 0..self.rows {
            for (s, z) in sums.iter_mut().zip(self.row(r)) {
                *s += z.norm();
            }
        }
        sums.into_iter().fold(R::zero(), R::max)
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    pub fn trace(&self) -> Complex<R> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: Complex<R>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    /// `self + k * other`, in place.
    pub fn add_scaled(&mut self, k: Complex<R>, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<R>]) -> CVector<R> {
        assert_eq!(self.cols, v.len(), "mul_vec shape");
        CVector(
            (0..self.rows)
                .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
                .collect(),
        )
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        let mut out = Self::zeros(self.rows * p, self.cols * q);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self[(r, c)];
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for rr in 0..p {
                    for cc in 0..q {
                        out[(r * p + rr, c * q + cc)] = a * other[(rr, cc)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> R {
        let mut worst = R::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Entrywise conversion between scalar types.
    pub fn cast<S: Real>(&self) -> CMatrix<S> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(cast(z.re), cast(z.im)))
                .collect(),
        }
    }
}

fn cast<R: Real, S: Real>(x: R) -> S {
    S::from_f64(x.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan)
}

impl<R: Real> Index<(usize, usize)> for CMatrix<R> {
    type Output = Complex<R>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<R> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for CMatrix<R> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<R> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<R: Real> Add for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn add(self, rhs: Self) -> CMatrix<R> {
        let mut out = self.clone();
        out.add_scaled(Complex::new(R::one(), R::zero()), rhs);
        out
    }
}

impl<R: Real> Sub for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn sub(self, rhs: Self) -> CMatrix<R> {
        let mut out = self.clone();
        out.add_scaled(Complex::new(-R::one(), R::zero()), rhs);
        out
    }
}

impl<R: Real> Mul for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn mul(self, rhs: Self) -> CMatrix<R> {
        self.matmul(rhs)
    }
}

impl<R: Real> CVector<R> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex::new(R::zero(), R::zero()); n])
    }

    pub fn from_real(xs: &[R]) -> Self {
        Self(xs.iter().map(|&x| Complex::new(x, R::zero())).collect())
    }

    pub fn norm_inf(&self) -> R {
        self.0.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    pub fn norm2(&self) -> R {
        self.0.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|&z| is_finite(z))
    }

    pub fn scale(&self, k: Complex<R>) -> Self {
        Self(self.0.iter().map(|&z| z * k).collect())
    }

    pub fn dot(&self, other: &[Complex<R>]) -> Complex<R> {
        self.0.iter().zip(other).map(|(&a, &b)| a * b).sum()
    }

    pub fn into_inner(self) -> Vec<Complex<R>> {
        self.0
    }
}

impl<R> Deref for CVector<R> {
    type Target = [Complex<R>];
    fn deref(&self) -> &[Complex<R>] {
        &self.0
    }
}

impl<R> DerefMut for CVector<R> {
    fn deref_mut(&mut self) -> &mut [Complex<R>] {
        &mut self.0
    }
}

impl<R> From<Vec<Complex<R>>> for CVector<R> {
    fn from(v: Vec<Complex<R>>) -> Self {
        Self(v)
    }
}

impl<R: Real> Sub for &CVector<R> {
    type Output = CVector<R>;
    fn sub(self, rhs: Self) -> CVector<R> {
        CVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl<R: Real> Add for &CVector<R> {
    type Output = CVector<R>;
    fn add(self, rhs: Self) -> CVector<R> {
        CVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn kron_of_identities_is_identity() {
        let a = CMatrix::<f64>::identity(2);
        let b = CMatrix::<f64>::identity(3);
        assert_eq!(a.kron(&b), CMatrix::identity(6));
    }

    #[test]
    fn kron_places_blocks() {
        let a = CMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let b = CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], c(1.0, 0.0));
        assert_eq!(k[(1, 2)], c(2.0, 0.0));
        assert_eq!(k[(3, 2)], c(4.0, 0.0));
        assert_eq!(k[(2, 2)], c(0.0, 0.0));
    }

    #[test]
    fn norms() {
        let a = CMatrix::from_real_rows(&[[1.0, -2.0], [3.0, 4.0]]);
        assert_eq!(a.norm_inf(), 7.0);
        assert_eq!(a.norm_one(), 6.0);
        assert_eq!(a.trace(), c(5.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates() {
        let a = CMatrix::from_rows(&[[c(1.0, 1.0), c(0.0, 2.0)], [c(3.0, 0.0), c(0.0, 0.0)]]);
        let h = a.adjoint();
        assert_eq!(h[(0, 1)], c(3.0, 0.0));
        assert_eq!(h[(1, 0)], c(0.0, -2.0));
        assert!((&a + &h).hermiticity_defect() < 1e-15);
    }
}
