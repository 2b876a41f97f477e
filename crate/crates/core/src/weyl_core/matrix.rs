//! Dense square complex matrices.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest operator dimension any constructor will produce.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Dense `dim × dim` complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: row.len() });
            }
            data.extend(row);
        }
        let m = Self { dim, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Real-valued convenience constructor, mostly for tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// Frobenius inner product `tr(self† · other)`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim, other.dim, "inner product of mismatched matrices");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::zero(), |a, b| a + b)
    }

    /// Frobenius norm of `self − other`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "distance between mismatched matrices");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_real(&self, c: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// `self + c · other`, in place.
    pub fn axpy(&mut self, c: Complex<T>, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(self * other)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `‖A†A − 1‖_F`.
    pub fn unitarity_residual(&self) -> T {
        (&self.dagger() * self).distance(&Self::identity(self.dim))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Converts the entries to another scalar precision.
    pub fn cast<U: Scalar>(&self) -> CMatrix<U> {
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Scalar> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "product of mismatched matrices");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "sum of mismatched matrices");
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Scalar> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "difference of mismatched matrices");
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Scalar> AddAssign<&CMatrix<T>> for CMatrix<T> {
    fn add_assign(&mut self, rhs: &CMatrix<T>) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl<T: Scalar> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        CMatrix { dim: self.dim, data: self.data.iter().map(|z| -z).collect() }
    }
}

/// Kronecker product with `a`'s index as the most significant one.
pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    kron_bounded(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_bounded<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, max_dim: usize) -> Result<CMatrix<T>> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= max_dim)
        .ok_or(Error::DimensionOverflow { dim: a.dim.saturating_mul(b.dim), max: max_dim })?;
    let bd = b.dim;
    Ok(CMatrix::from_fn(dim, |i, j| a[(i / bd, j / bd)] * b[(i % bd, j % bd)]))
}

/// Kronecker product of a list of factors, leftmost most significant.
pub fn kron_all<T: Scalar>(factors: &[CMatrix<T>], max_dim: usize) -> Result<CMatrix<T>> {
    let mut iter = factors.iter();
    let first = iter.next().cloned().unwrap_or_else(|| CMatrix::identity(1));
    iter.try_fold(first, |acc, f| kron_bounded(&acc, f, max_dim))
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl<T: Scalar> Serialize for CMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| [self[(i, j)].re.as_f64(), self[(i, j)].im.as_f64()]).collect())
            .collect();
        MatrixRepr { dim: self.dim, entries }.serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for CMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.dim {
            return Err(D::Error::custom(format!(
                "matrix declares dim {} but has {} rows",
                repr.dim,
                repr.entries.len()
            )));
        }
        let rows = repr
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| {
                        T::from_f64(re)
                            .zip(T::from_f64(im))
                            .map(|(re, im)| Complex::new(re, im))
                            .ok_or_else(|| D::Error::custom("entry not representable"))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}
