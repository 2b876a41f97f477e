//! Dense eigen-solvers, matrix exponential and LU helpers over [`CMatrix`].

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl_core::CMatrix;

/// Eigendecomposition `A = Q diag(λ) Q†` with `Q` unitary.
#[derive(Clone, Debug)]
pub struct UnitaryEigen<T> {
    pub values: Vec<Complex<T>>,
    pub vectors: CMatrix<T>,
}

impl<T: Scalar> UnitaryEigen<T> {
    /// Rebuilds `Q f(Λ) Q†` for a spectral function `f`.
    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> CMatrix<T> {
        let n = self.vectors.dim();
        let q = &self.vectors;
        let fv: Vec<_> = self.values.iter().map(|&v| f(v)).collect();
        CMatrix::from_fn(n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| acc + q[(i, k)] * fv[k] * q[(j, k)].conj())
        })
    }
}

fn off_diagonal_norm<T: Scalar>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi for a Hermitian matrix. Eigenvalues are returned
/// as the (real) diagonal, not sorted.
pub fn hermitian_eigen<T: Scalar>(h: &CMatrix<T>) -> UnitaryEigen<T> {
    let n = h.dim();
    let mut a = h.clone();
    let mut q = CMatrix::identity(n);
    let scale = h.frobenius_norm().max(T::min_positive_value());
    let target = T::epsilon() * scale;
    for _sweep in 0..100 {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                let mag = apr.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let phase = apr / mag;
                let app = a[(p, p)].re;
                let arr = a[(r, r)].re;
                let theta = (arr - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // G acts on columns (p, r): G = diag(1, conj(phase)) · [[c, s], [−s, c]].
                let g_pp = Complex::new(c, T::zero());
                let g_pr = Complex::new(s, T::zero());
                let g_rp = -phase.conj() * s;
                let g_rr = phase.conj() * c;
                // A ← A G
                for i in 0..n {
                    let aip = a[(i, p)];
                    let air = a[(i, r)];
                    a[(i, p)] = aip * g_pp + air * g_rp;
                    a[(i, r)] = aip * g_pr + air * g_rr;
                }
                // A ← G† A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let arj = a[(r, j)];
                    a[(p, j)] = g_pp.conj() * apj + g_rp.conj() * arj;
                    a[(r, j)] = g_pr.conj() * apj + g_rr.conj() * arj;
                }
                a[(p, r)] = Complex::zero();
                a[(r, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(r, r)] = Complex::new(a[(r, r)].re, T::zero());
                for i in 0..n {
                    let qip = q[(i, p)];
                    let qir = q[(i, r)];
                    q[(i, p)] = qip * g_pp + qir * g_rp;
                    q[(i, r)] = qip * g_pr + qir * g_rr;
                }
            }
        }
    }
    UnitaryEigen { values: (0..n).map(|i| Complex::new(a[(i, i)].re, T::zero())).collect(), vectors: q }
}

/// `‖AA† − A†A‖_F ≤ tol·‖A‖_F²`.
pub fn is_normal<T: Scalar>(a: &CMatrix<T>, tol: T) -> bool {
    let ad = a.dagger();
    let norm = a.frobenius_norm();
    (a * &ad).distance(&(&ad * a)) <= tol * (norm * norm).max(T::one())
}

/// Eigendecomposition of a normal matrix through a generic Hermitian pencil
/// `Re(A) + φ·Im(A)`, where `Re(A) = (A+A†)/2`, `Im(A) = (A−A†)/2i`.
pub fn normal_eigen<T: Scalar>(a: &CMatrix<T>) -> Result<UnitaryEigen<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let ad = a.dagger();
    let re_part = (a + &ad).scale_real(T::lit(0.5));
    let im_part = (a - &ad).scale(Complex::new(T::zero(), T::lit(-0.5)));
    let scale = a.frobenius_norm().max(T::one());
    let mut best: Option<(T, UnitaryEigen<T>)> = None;
    for phi in [0.754_877_666_246_692_7, 1.324_717_957_244_746, -0.469_621_994_2, 2.236_067_977] {
        let pencil = &re_part + &im_part.scale_real(T::lit(phi));
        let eig = hermitian_eigen(&pencil);
        let q = &eig.vectors;
        let d = &(&q.dagger() * a) * q;
        let off = off_diagonal_norm(&d);
        let values = (0..d.dim()).map(|i| d[(i, i)]).collect();
        let candidate = UnitaryEigen { values, vectors: eig.vectors };
        if off <= T::lit(1e3) * T::epsilon() * scale {
            return Ok(candidate);
        }
        if best.as_ref().is_none_or(|(b, _)| off < *b) {
            best = Some((off, candidate));
        }
    }
    Ok(best.expect("at least one pencil tried").1)
}

/// LU factorization with partial pivoting; solves `A X = B`.
pub fn lu_solve<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: b.dim() });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().partial_cmp(&lu[(j, k)].norm()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if lu[(pivot, k)].norm() <= T::min_positive_value() {
            return Err(Error::InvalidParameter("singular matrix in linear solve".into()));
        }
        if pivot != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = t;
                let t = x[(k, j)];
                x[(k, j)] = x[(pivot, j)];
                x[(pivot, j)] = t;
            }
        }
        let inv = Complex::<T>::one() / lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] * inv;
            if f.is_zero() {
                continue;
            }
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
            for j in 0..n {
                let v = x[(k, j)];
                x[(i, j)] -= f * v;
            }
        }
    }
    for i in (0..n).rev() {
        for j in 0..n {
            let mut s = x[(i, j)];
            for k in (i + 1)..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar>(a: &CMatrix<T>) -> Complex<T> {
    let n = a.dim();
    let mut m = a.clone();
    let mut det = Complex::<T>::one();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| m[(i, k)].norm().partial_cmp(&m[(j, k)].norm()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if m[(pivot, k)].is_zero() {
            return Complex::zero();
        }
        if pivot != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(pivot, j)];
                m[(pivot, j)] = t;
            }
            det = -det;
        }
        det *= m[(k, k)];
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    det
}

fn one_norm<T: Scalar>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    (0..n).map(|j| (0..n).fold(T::zero(), |s, i| s + a[(i, j)].norm())).fold(T::zero(), T::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Scaling-and-squaring exponential with the degree-13 Padé approximant.
pub fn expm_pade<T: Scalar>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let theta13 = T::lit(5.371_920_351_148_152);
    let norm = one_norm(a);
    let mut squarings = 0i32;
    if norm > theta13 {
        squarings = (norm / theta13).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale_real(T::lit(2f64.powi(-squarings)));
    let b = |k: usize| Complex::new(T::lit(PADE13[k]), T::zero());
    let id = CMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let mut u_inner = a6.scale(b(13));
    u_inner.axpy(b(11), &a4);
    u_inner.axpy(b(9), &a2);
    let mut u = &a6 * &u_inner;
    u.axpy(b(7), &a6);
    u.axpy(b(5), &a4);
    u.axpy(b(3), &a2);
    u.axpy(b(1), &id);
    let u = &scaled * &u;
    let mut v_inner = a6.scale(b(12));
    v_inner.axpy(b(10), &a4);
    v_inner.axpy(b(8), &a2);
    let mut v = &a6 * &v_inner;
    v.axpy(b(6), &a6);
    v.axpy(b(4), &a4);
    v.axpy(b(2), &a2);
    v.axpy(b(0), &id);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = lu_solve(&q, &p)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Matrix exponential: spectral route for normal input, Padé otherwise.
pub fn matrix_exp<T: Scalar>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a.frobenius_norm().is_zero() {
        return Ok(CMatrix::identity(a.dim()));
    }
    if is_normal(a, T::lit(1e3) * T::epsilon()) {
        let eig = normal_eigen(a)?;
        Ok(eig.map(|z| z.exp()))
    } else {
        expm_pade(a)
    }
}
