//! Complex matrix kernel and the single-qudit Weyl operators.
//!
//! `U` is the cyclic shift `U_{kj} = δ_{k+1 mod l, j}`, `V` the clock
//! `diag(ζ^k)` and `W = ζ^{(l−1)/2} U V`, with `ζ = exp(2πi/l)`. They obey
//! `UV = ζVU`, `UW = ζWU`, `WV = ζVW` and all have order `l`.

mod matrix;

pub use matrix::{kron, kron_all, kron_bounded, CMatrix, DEFAULT_MAX_DIM};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Residual thresholds used by every numeric check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Tolerance<T> {
    /// Absolute entrywise / Frobenius threshold.
    pub abs_eps: T,
    /// Singular-value style threshold for span ranks.
    pub rank_eps: T,
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(abs_eps: T, rank_eps: T) -> Result<Self> {
        if !(abs_eps > T::zero() && rank_eps > T::zero()) {
            return Err(Error::InvalidTolerance);
        }
        Ok(Self { abs_eps, rank_eps })
    }
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Self { abs_eps: T::lit(T::DEFAULT_ABS_EPS), rank_eps: T::lit(T::DEFAULT_RANK_EPS) }
    }
}

fn check_order(l: usize) -> Result<()> {
    if l < 2 {
        Err(Error::InvalidOrder(l))
    } else {
        Ok(())
    }
}

/// `exp(2πi·k/l)`.
pub(crate) fn root_of_unity<T: Scalar>(l: usize, k: i64) -> Complex<T> {
    let k = k.rem_euclid(l as i64) as f64;
    let angle = T::lit(2.0 * std::f64::consts::PI * k / l as f64);
    Complex::from_polar(T::one(), angle)
}

/// Primitive root `ζ = exp(2πi/l)`.
pub fn zeta<T: Scalar>(l: usize) -> Result<Complex<T>> {
    check_order(l)?;
    Ok(root_of_unity(l, 1))
}

/// Right cyclic shift `U`.
pub fn shift_u<T: Scalar>(l: usize) -> Result<CMatrix<T>> {
    check_order(l)?;
    Ok(CMatrix::from_fn(l, |k, j| if (k + 1) % l == j { Complex::one() } else { Complex::zero() }))
}

/// Clock `V = diag(1, ζ, …, ζ^{l−1})`.
pub fn clock_v<T: Scalar>(l: usize) -> Result<CMatrix<T>> {
    check_order(l)?;
    let diag: Vec<_> = (0..l as i64).map(|k| root_of_unity(l, k)).collect();
    Ok(CMatrix::diagonal(&diag))
}

/// `W = exp(πi(l−1)/l) · U · V`, the principal branch of `ζ^{(l−1)/2} UV`.
pub fn weyl_w<T: Scalar>(l: usize) -> Result<CMatrix<T>> {
    let uv = &shift_u::<T>(l)? * &clock_v::<T>(l)?;
    let phase = Complex::from_polar(T::one(), T::lit(std::f64::consts::PI * (l - 1) as f64 / l as f64));
    Ok(uv.scale(phase))
}

pub fn dagger<T: Scalar>(a: &CMatrix<T>) -> CMatrix<T> {
    a.dagger()
}

/// `[A, B] = AB − BA`.
pub fn commutator<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(&(a * b) - &(b * a))
}

/// `(ad A)^k B`; `k = 0` returns `B`.
pub fn ad_pow<T: Scalar>(a: &CMatrix<T>, k: usize, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let mut acc = b.clone();
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    for _ in 0..k {
        acc = commutator(a, &acc)?;
    }
    Ok(acc)
}

/// Frobenius projection `α = ⟨B,A⟩/⟨B,B⟩` together with the relative
/// residual `‖A − αB‖_F / ‖A‖_F` (zero when `A` vanishes).
pub fn projection_coefficient<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<(Complex<T>, T)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let bb = b.inner(b).re;
    if bb <= T::zero() {
        return Err(Error::DegenerateComparand);
    }
    let alpha = b.inner(a) / bb;
    let na = a.frobenius_norm();
    let resid = a.distance(&b.scale(alpha));
    let rel = if na > T::zero() { resid / na } else { T::zero() };
    Ok((alpha, rel))
}

/// Returns `α ≠ 0` with `‖A − αB‖_F ≤ abs_eps·‖B‖_F`, or `None` when `A` is
/// not a nonzero multiple of `B`.
pub fn proportional<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, tol: &Tolerance<T>) -> Result<Option<Complex<T>>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let nb = b.frobenius_norm();
    if nb <= tol.abs_eps {
        return Err(Error::DegenerateComparand);
    }
    let alpha = b.inner(a) / (nb * nb);
    if alpha.norm() <= tol.abs_eps {
        return Ok(None);
    }
    let resid = a.distance(&b.scale(alpha));
    Ok((resid <= tol.abs_eps * nb).then_some(alpha))
}

/// Canonical matrix unit `E^{ab}` built as `U^{l−a} E^{00} U^b` with
/// `E^{00} = (1/l) Σ_k V^k`.
pub fn matrix_unit<T: Scalar>(l: usize, a: usize, b: usize) -> Result<CMatrix<T>> {
    check_order(l)?;
    for idx in [a, b] {
        if idx >= l {
            return Err(Error::IndexOutOfRange { index: idx, limit: l });
        }
    }
    let u = shift_u::<T>(l)?;
    let v = clock_v::<T>(l)?;
    let mut e00 = CMatrix::zeros(l);
    let mut vk = CMatrix::identity(l);
    for _ in 0..l {
        e00 += &vk;
        vk = &vk * &v;
    }
    let e00 = e00.scale_real(T::one() / T::from_count(l));
    Ok(&(&u.pow(l - a) * &e00) * &u.pow(b))
}
