//! Commutator words over generator leaves, the constructive generation of
//! every non-identity torus monomial, and an independent span-growth Lie
//! closure used to cross-check it.

mod generation;
mod span;

pub use generation::{
    closure_dim_matches_generation, generate_all, monomial_word, verify_generation, GenerationEntry,
    GenerationFailureEntry, GenerationReport, Route, WordBuilder, MAX_GENERATION_DIM,
};
pub use span::{lie_closure, lie_closure_shallow, CoefficientField, LieSpan, OrthonormalBasis, SpanElement};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl_core::{ad_pow, commutator, CMatrix};

/// Nested-commutator expression over generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketWord {
    Leaf(usize),
    /// `(ad T_base)^pow arg`.
    Ad { base: usize, pow: usize, arg: Box<BracketWord> },
    Bracket(Box<BracketWord>, Box<BracketWord>),
}

impl BracketWord {
    pub fn leaf(k: usize) -> Self {
        BracketWord::Leaf(k)
    }

    pub fn bracket(left: BracketWord, right: BracketWord) -> Self {
        BracketWord::Bracket(Box::new(left), Box::new(right))
    }

    /// `(ad T_base)^pow arg`, collapsing `pow = 0` to `arg`.
    pub fn ad(base: usize, pow: usize, arg: BracketWord) -> Self {
        if pow == 0 {
            arg
        } else {
            BracketWord::Ad { base, pow, arg: Box::new(arg) }
        }
    }

    /// Nesting depth counted in commutators; a leaf has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            BracketWord::Leaf(_) => 0,
            BracketWord::Ad { pow, arg, .. } => pow + arg.depth(),
            BracketWord::Bracket(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn max_leaf(&self) -> usize {
        match self {
            BracketWord::Leaf(k) => *k,
            BracketWord::Ad { base, arg, .. } => (*base).max(arg.max_leaf()),
            BracketWord::Bracket(a, b) => a.max_leaf().max(b.max_leaf()),
        }
    }

    /// Evaluates the word against `gens[k]` for every leaf `k`.
    pub fn evaluate<T: Scalar>(&self, gens: &[CMatrix<T>]) -> Result<CMatrix<T>> {
        let fetch = |k: usize| gens.get(k).ok_or(Error::IndexOutOfRange { index: k, limit: gens.len() });
        match self {
            BracketWord::Leaf(k) => Ok(fetch(*k)?.clone()),
            BracketWord::Ad { base, pow, arg } => ad_pow(fetch(*base)?, *pow, &arg.evaluate(gens)?),
            BracketWord::Bracket(a, b) => commutator(&a.evaluate(gens)?, &b.evaluate(gens)?),
        }
    }
}

impl fmt::Display for BracketWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketWord::Leaf(k) => write!(f, "T{k}"),
            BracketWord::Ad { base, pow, arg } if *pow == 1 => write!(f, "(ad T{base}) {arg}"),
            BracketWord::Ad { base, pow, arg } => write!(f, "(ad T{base})^{pow} {arg}"),
            BracketWord::Bracket(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

pub fn evaluate<T: Scalar>(w: &BracketWord, g: &crate::torus::GeneratorSet<T>) -> Result<CMatrix<T>> {
    w.evaluate(g.mats())
}

/// Two-index word `(ad T_i)^{n_i−1 mod l} ((ad T_j)^{n_j−1 mod l} [T_i, T_j])`,
/// proportional to `T_i^{n_i} T_j^{n_j}` whenever `n_j ≠ 0` or `n_i ≤ 1`.
pub fn two_index_word(i: usize, j: usize, n_i: usize, n_j: usize, l: usize) -> Result<BracketWord> {
    if l < 2 {
        return Err(Error::InvalidOrder(l));
    }
    if i >= j {
        return Err(Error::InvalidParameter(format!("two-index word needs i < j, got i={i}, j={j}")));
    }
    for (position, value) in [(i, n_i), (j, n_j)] {
        if value >= l {
            return Err(Error::ExponentOutOfRange { position, value, l });
        }
    }
    if n_i == 0 && n_j == 0 {
        return Err(Error::NoWord);
    }
    let pow_i = (n_i + l - 1) % l;
    let pow_j = (n_j + l - 1) % l;
    let base = BracketWord::bracket(BracketWord::leaf(i), BracketWord::leaf(j));
    Ok(BracketWord::ad(i, pow_i, BracketWord::ad(j, pow_j, base)))
}
