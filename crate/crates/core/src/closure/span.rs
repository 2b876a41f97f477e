//! Span-growth Lie closure with modified Gram–Schmidt.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BracketWord;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl_core::{commutator, CMatrix, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientField {
    Real,
    Complex,
}

/// Frobenius-orthonormal basis over a chosen coefficient field.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis<T> {
    ambient_dim: usize,
    field: CoefficientField,
    vectors: Vec<CMatrix<T>>,
}

impl<T: Scalar> OrthonormalBasis<T> {
    pub fn new(ambient_dim: usize, field: CoefficientField) -> Self {
        Self { ambient_dim, field, vectors: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CMatrix<T>] {
        &self.vectors
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    /// Largest possible dimension: `N²` over ℂ, `2N²` over ℝ.
    pub fn capacity(&self) -> usize {
        let n2 = self.ambient_dim * self.ambient_dim;
        match self.field {
            CoefficientField::Complex => n2,
            CoefficientField::Real => 2 * n2,
        }
    }

    fn coefficient(&self, q: &CMatrix<T>, v: &CMatrix<T>) -> Complex<T> {
        let ip = q.inner(v);
        match self.field {
            CoefficientField::Complex => ip,
            CoefficientField::Real => Complex::new(ip.re, T::zero()),
        }
    }

    /// Coordinates of `v` on the basis and the orthogonal remainder.
    pub fn project(&self, v: &CMatrix<T>) -> (Vec<Complex<T>>, CMatrix<T>) {
        let mut coeffs = vec![Complex::zero(); self.vectors.len()];
        let mut rest = v.clone();
        // Two MGS passes.
        for _ in 0..2 {
            for (q, c) in self.vectors.iter().zip(coeffs.iter_mut()) {
                let p = self.coefficient(q, &rest);
                rest.axpy(-p, q);
                *c += p;
            }
        }
        (coeffs, rest)
    }

    /// Adds the normalized remainder of `v` when it exceeds `rank_eps·‖v‖_F`.
    /// On success returns the coordinates of `v` on the enlarged basis (the
    /// last one being the remainder norm).
    pub fn try_insert(&mut self, v: &CMatrix<T>, rank_eps: T) -> Option<Vec<Complex<T>>> {
        let norm = v.frobenius_norm();
        if norm <= T::min_positive_value() || !norm.is_finite() || self.len() >= self.capacity() {
            return None;
        }
        let (mut coeffs, rest) = self.project(v);
        let rest_norm = rest.frobenius_norm();
        if rest_norm <= rank_eps * norm {
            return None;
        }
        self.vectors.push(rest.scale_real(T::one() / rest_norm));
        coeffs.push(Complex::new(rest_norm, T::zero()));
        Some(coeffs)
    }
}

/// A spanning element: the raw bracket and the word over seed indices that produced it.
#[derive(Clone, Debug)]
pub struct SpanElement<T> {
    pub word: BracketWord,
    pub raw: CMatrix<T>,
}

/// Closed Lie span of a seed family.
///
/// `basis` is orthonormal; `elements[a].raw = Σ_{b ≤ a} r[a][b] · basis[b]`,
/// so the raw brackets and the orthonormal basis span the same space and
/// coordinates can be moved between the two by a triangular solve.
#[derive(Clone, Debug)]
pub struct LieSpan<T> {
    pub ambient_dim: usize,
    pub field: CoefficientField,
    basis: OrthonormalBasis<T>,
    elements: Vec<SpanElement<T>>,
    r: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> LieSpan<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix<T>] {
        self.basis.vectors()
    }

    pub fn elements(&self) -> &[SpanElement<T>] {
        &self.elements
    }

    pub fn words(&self) -> impl Iterator<Item = &BracketWord> {
        self.elements.iter().map(|e| &e.word)
    }

    /// Orthonormal coordinates and relative remainder `‖v − Σ c_a Q_a‖ / ‖v‖`.
    pub fn project(&self, v: &CMatrix<T>) -> (Vec<Complex<T>>, T) {
        let (coeffs, rest) = self.basis.project(v);
        let norm = v.frobenius_norm();
        let rel = if norm > T::zero() { rest.frobenius_norm() / norm } else { T::zero() };
        (coeffs, rel)
    }

    /// Converts orthonormal coordinates into coordinates on the raw elements.
    pub fn to_element_coords(&self, ortho: &[Complex<T>]) -> Vec<Complex<T>> {
        let d = self.dim();
        let mut x = vec![Complex::zero(); d];
        for a in (0..d).rev() {
            let mut s = ortho[a];
            for (b, xb) in x.iter().enumerate().skip(a + 1) {
                s -= self.r[b][a] * xb;
            }
            x[a] = s / self.r[a][a];
        }
        x
    }

    /// Largest relative remainder of `[X, Y]` over all basis pairs.
    pub fn closure_defect(&self) -> T {
        let basis = self.basis();
        let pairs: Vec<(usize, usize)> =
            (0..basis.len()).flat_map(|i| ((i + 1)..basis.len()).map(move |j| (i, j))).collect();
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let br = commutator(&basis[i], &basis[j]).expect("equal dims");
                if br.frobenius_norm() <= T::lit(1e-12) {
                    T::zero()
                } else {
                    self.project(&br).1
                }
            })
            .reduce(T::zero, T::max)
    }

    fn push(&mut self, word: BracketWord, raw: CMatrix<T>, rank_eps: T) -> bool {
        match self.basis.try_insert(&raw, rank_eps) {
            Some(coeffs) => {
                self.r.push(coeffs);
                self.elements.push(SpanElement { word, raw });
                true
            }
            None => false,
        }
    }
}

/// Smallest subspace over `field` containing `seeds` and closed under the
/// commutator.
///
/// Each round brackets the seeds with the elements accepted in the previous
/// round, giving left-normed words `[s_1, [s_2, … [s_{k−1}, s_k]]]`, which span
/// the generated algebra. Brackets in a round are computed in parallel and
/// inserted in (element, seed) order, so the result does not depend on
/// scheduling.
pub fn lie_closure<T: Scalar>(seeds: &[CMatrix<T>], field: CoefficientField, tol: &Tolerance<T>) -> Result<LieSpan<T>> {
    grow(seeds, field, tol, |frontier, _, active_seeds| {
        frontier.iter().flat_map(|&f| active_seeds.iter().map(move |&s| (Operand::Seed(s), f))).collect()
    })
}

/// Same span as [`lie_closure`], with words of minimal nesting depth.
///
/// Round `k` brackets every element accepted in round `k − 1` with every
/// element accepted earlier or in the same round, so an element first appears
/// with the smallest depth at which any bracket of span elements reaches it.
pub fn lie_closure_shallow<T: Scalar>(
    seeds: &[CMatrix<T>],
    field: CoefficientField,
    tol: &Tolerance<T>,
) -> Result<LieSpan<T>> {
    grow(seeds, field, tol, |frontier, accepted, _| {
        let first_new = frontier.first().copied().unwrap_or(accepted);
        frontier
            .iter()
            .flat_map(|&f| (0..accepted).filter(move |&e| e < first_new || e < f).map(move |e| (Operand::Element(e), f)))
            .collect()
    })
}

#[derive(Clone, Copy)]
enum Operand {
    Seed(usize),
    Element(usize),
}

/// Span growth where `pairs(frontier, accepted, active_seeds)` lists the
/// brackets `[left, element]` to try in the next round.
fn grow<T: Scalar>(
    seeds: &[CMatrix<T>],
    field: CoefficientField,
    tol: &Tolerance<T>,
    pairs: impl Fn(&[usize], usize, &[usize]) -> Vec<(Operand, usize)>,
) -> Result<LieSpan<T>> {
    let first = seeds.first().ok_or_else(|| Error::InvalidParameter("lie_closure needs at least one seed".into()))?;
    let dim = first.dim();
    if let Some(bad) = seeds.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch { left: dim, right: bad.dim() });
    }
    let mut span = LieSpan {
        ambient_dim: dim,
        field,
        basis: OrthonormalBasis::new(dim, field),
        elements: Vec::new(),
        r: Vec::new(),
    };
    let mut active_seeds = Vec::new();
    for (k, s) in seeds.iter().enumerate() {
        if s.frobenius_norm() > tol.abs_eps && span.push(BracketWord::leaf(k), s.clone(), tol.rank_eps) {
            active_seeds.push(k);
        }
    }
    let mut frontier: Vec<usize> = (0..span.elements.len()).collect();
    while !frontier.is_empty() && span.dim() < span.basis.capacity() {
        let jobs = pairs(&frontier, span.elements.len(), &active_seeds);
        let candidates: Vec<(BracketWord, CMatrix<T>, T)> = jobs
            .par_iter()
            .map(|&(left, f)| {
                let el = &span.elements[f];
                let (word, mat) = match left {
                    Operand::Seed(s) => (BracketWord::leaf(s), &seeds[s]),
                    Operand::Element(e) => (span.elements[e].word.clone(), &span.elements[e].raw),
                };
                let raw = commutator(mat, &el.raw).expect("equal dims");
                let scale = mat.frobenius_norm() * el.raw.frobenius_norm();
                (BracketWord::bracket(word, el.word.clone()), raw, scale)
            })
            .collect();
        let mut next = Vec::new();
        for (word, raw, scale) in candidates {
            // A bracket that cancels to rounding level relative to its operands is zero.
            if raw.frobenius_norm() <= tol.abs_eps * scale.max(T::one()) {
                continue;
            }
            if span.push(word, raw, tol.rank_eps) {
                next.push(span.elements.len() - 1);
            }
        }
        frontier = next;
    }
    Ok(span)
}
