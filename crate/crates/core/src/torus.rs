//! Generators of the rational noncommutative torus on `(C^l)^{⊗n}`.
//!
//! With `T_x = U`, `T_y = W`, `T_z = V`:
//!
//! ```text
//! T_{2k}   = 1 ⊗ … ⊗ 1 ⊗ T_x ⊗ T_z ⊗ … ⊗ T_z     (n−k−1 identities, k clocks)
//! T_{2k+1} = 1 ⊗ … ⊗ 1 ⊗ T_y ⊗ T_z ⊗ … ⊗ T_z
//! ```
//!
//! The leftmost tensor factor is the most significant Kronecker index. The
//! generators satisfy `T_k^l = 1` and `T_j T_k = ζ T_k T_j` for `j < k`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl_core::{clock_v, kron_all, shift_u, weyl_w, zeta, CMatrix, Tolerance, DEFAULT_MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// Torus generators `T_k`.
    #[serde(rename = "torus")]
    Torus,
    /// Two-local elements `B_0 = T_0`, `B_j = T_j T_{j−1}†`.
    #[serde(rename = "b")]
    TwoLocal,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Torus => "torus",
            GeneratorKind::TwoLocal => "b",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered family of `2n` operators on `n` qudits of order `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "RawGeneratorSet<T>")]
pub struct GeneratorSet<T> {
    l: usize,
    n: usize,
    kind: GeneratorKind,
    mats: Vec<CMatrix<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawGeneratorSet<T> {
    l: usize,
    n: usize,
    kind: GeneratorKind,
    mats: Vec<CMatrix<T>>,
}

impl<T: Scalar> TryFrom<RawGeneratorSet<T>> for GeneratorSet<T> {
    type Error = Error;

    fn try_from(raw: RawGeneratorSet<T>) -> Result<Self> {
        Self::from_parts(raw.l, raw.n, raw.kind, raw.mats)
    }
}

/// `l^n`, bounded by `max_dim`.
pub fn register_dim(l: usize, n: usize, max_dim: usize) -> Result<usize> {
    if l < 2 {
        return Err(Error::InvalidOrder(l));
    }
    if n < 1 {
        return Err(Error::InvalidQuditCount(n));
    }
    match u32::try_from(n).ok().and_then(|n| l.checked_pow(n)) {
        Some(d) if d <= max_dim => Ok(d),
        Some(d) => Err(Error::DimensionOverflow { dim: d, max: max_dim }),
        None => Err(Error::DimensionOverflow { dim: usize::MAX, max: max_dim }),
    }
}

impl<T: Scalar> GeneratorSet<T> {
    /// Validates shapes: `2n` matrices, each of dimension `l^n`.
    pub fn from_parts(l: usize, n: usize, kind: GeneratorKind, mats: Vec<CMatrix<T>>) -> Result<Self> {
        let dim = register_dim(l, n, usize::MAX)?;
        if mats.len() != 2 * n {
            return Err(Error::ExponentLength { got: mats.len(), expected: 2 * n });
        }
        if let Some(bad) = mats.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch { left: bad.dim(), right: dim });
        }
        Ok(Self { l, n, kind, mats })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    /// Register dimension `l^n`.
    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn mats(&self) -> &[CMatrix<T>] {
        &self.mats
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn get(&self, k: usize) -> Result<&CMatrix<T>> {
        self.mats.get(k).ok_or(Error::IndexOutOfRange { index: k, limit: self.mats.len() })
    }

    /// Replaces generator `k`; used to build deliberately broken sets.
    pub fn with_replaced(mut self, k: usize, m: CMatrix<T>) -> Result<Self> {
        if k >= self.mats.len() {
            return Err(Error::IndexOutOfRange { index: k, limit: self.mats.len() });
        }
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: m.dim(), right: self.dim() });
        }
        self.mats[k] = m;
        Ok(self)
    }
}

pub fn torus_generators<T: Scalar>(l: usize, n: usize) -> Result<GeneratorSet<T>> {
    torus_generators_bounded(l, n, DEFAULT_MAX_DIM)
}

pub fn torus_generators_bounded<T: Scalar>(l: usize, n: usize, max_dim: usize) -> Result<GeneratorSet<T>> {
    register_dim(l, n, max_dim)?;
    let (tx, ty, tz) = (shift_u::<T>(l)?, weyl_w::<T>(l)?, clock_v::<T>(l)?);
    let id = CMatrix::identity(l);
    let mut mats = Vec::with_capacity(2 * n);
    for k in 0..n {
        for head in [&tx, &ty] {
            let mut factors = vec![id.clone(); n - k - 1];
            factors.push(head.clone());
            factors.extend(std::iter::repeat_n(tz.clone(), k));
            mats.push(kron_all(&factors, max_dim)?);
        }
    }
    GeneratorSet::from_parts(l, n, GeneratorKind::Torus, mats)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PairResidual<T> {
    pub j: usize,
    pub k: usize,
    pub residual: T,
}

/// Residuals of `T_k^l = 1` and `T_j T_k = ζ T_k T_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RelationReport<T> {
    pub order_residuals: Vec<T>,
    pub pair_residuals: Vec<PairResidual<T>>,
    pub passed: bool,
}

impl<T: Scalar> RelationReport<T> {
    pub fn max_residual(&self) -> T {
        self.order_residuals
            .iter()
            .copied()
            .chain(self.pair_residuals.iter().map(|p| p.residual))
            .fold(T::zero(), T::max)
    }
}

pub fn verify_relations<T: Scalar>(g: &GeneratorSet<T>, tol: &Tolerance<T>) -> Result<RelationReport<T>> {
    let z = zeta::<T>(g.l)?;
    let id = CMatrix::identity(g.dim());
    let order_residuals: Vec<T> = g.mats.iter().map(|m| m.pow(g.l).distance(&id)).collect();
    let mut pair_residuals = Vec::new();
    for j in 0..g.len() {
        for k in (j + 1)..g.len() {
            let (a, b) = (&g.mats[j], &g.mats[k]);
            let residual = (a * b).distance(&(b * a).scale(z));
            pair_residuals.push(PairResidual { j, k, residual });
        }
    }
    let passed = order_residuals.iter().all(|&r| r <= tol.abs_eps)
        && pair_residuals.iter().all(|p| p.residual <= tol.abs_eps);
    Ok(RelationReport { order_residuals, pair_residuals, passed })
}

/// `A →_ζ B`, i.e. `AB = ζBA` up to `abs_eps·‖AB‖_F`.
pub fn zeta_ordered<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, l: usize, tol: &Tolerance<T>) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let z = zeta::<T>(l)?;
    let ab = a * b;
    Ok(ab.distance(&(b * a).scale(z)) <= tol.abs_eps * ab.frobenius_norm())
}

/// Exponent vector `(n_0, …, n_{2n−1})` of the monomial `T_0^{n_0} ⋯ T_{2n−1}^{n_{2n−1}}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonomialExponents(Vec<usize>);

impl MonomialExponents {
    pub fn new(exps: Vec<usize>) -> Self {
        Self(exps)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Exponent `p` at `index`, zero elsewhere.
    pub fn single(len: usize, index: usize, p: usize) -> Self {
        let mut e = vec![0; len];
        e[index] = p;
        Self(e)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Indices with nonzero exponent, increasing.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i).collect()
    }

    /// Sum of exponents (the paper-style Σ), not reduced.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn with(&self, index: usize, value: usize) -> Self {
        let mut e = self.0.clone();
        e[index] = value;
        Self(e)
    }

    pub fn add_mod(&self, other: &Self, l: usize) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| (a + b) % l).collect())
    }

    pub fn validate(&self, l: usize, len: usize) -> Result<()> {
        if self.0.len() != len {
            return Err(Error::ExponentLength { got: self.0.len(), expected: len });
        }
        if let Some((position, &value)) = self.0.iter().enumerate().find(|(_, &v)| v >= l) {
            return Err(Error::ExponentOutOfRange { position, value, l });
        }
        Ok(())
    }
}

impl From<Vec<usize>> for MonomialExponents {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// All `l^len` exponent vectors in lexicographic order (zero vector first).
pub fn all_exponents(l: usize, len: usize) -> impl Iterator<Item = MonomialExponents> {
    let total = (0..len).try_fold(1usize, |acc, _| acc.checked_mul(l)).unwrap_or(0);
    (0..total).map(move |mut idx| {
        let mut e = vec![0; len];
        for slot in e.iter_mut().rev() {
            *slot = idx % l;
            idx /= l;
        }
        MonomialExponents(e)
    })
}

/// `T_0^{n_0} ⋯ T_{2n−1}^{n_{2n−1}}` in increasing index order.
pub fn monomial<T: Scalar>(g: &GeneratorSet<T>, e: &MonomialExponents) -> Result<CMatrix<T>> {
    e.validate(g.l, g.len())?;
    let mut acc = CMatrix::identity(g.dim());
    for (m, &p) in g.mats.iter().zip(e.as_slice()) {
        if p > 0 {
            acc = &acc * &m.pow(p);
        }
    }
    Ok(acc)
}

/// Exact phase `c` with `T(a)·T(b) = c·T(a+b mod l)`, from the ζ-commutation rules.
pub fn product_phase<T: Scalar>(a: &MonomialExponents, b: &MonomialExponents, l: usize) -> Complex<T> {
    // Moving each T_k^{b_k} left past T_j^{a_j} with j > k picks up ζ^{-a_j b_k}.
    let mut power: i64 = 0;
    for (k, &bk) in b.as_slice().iter().enumerate() {
        for &aj in &a.as_slice()[k + 1..] {
            power -= (aj * bk) as i64;
        }
    }
    // Powers that wrap past l contribute T^l = 1, no phase.
    crate::weyl_core::root_of_unity(l, power)
}

/// `ω(a, b) mod l` with `T(a) T(b) = ζ^{ω(a,b)} T(b) T(a)`; the bracket of
/// the two monomials vanishes exactly when this is zero.
pub fn commutation_exponent(a: &MonomialExponents, b: &MonomialExponents, l: usize) -> usize {
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut w: i64 = 0;
    for j in 0..a.len() {
        for k in (j + 1)..a.len() {
            w += (a[j] * b[k]) as i64 - (a[k] * b[j]) as i64;
        }
    }
    w.rem_euclid(l as i64) as usize
}
