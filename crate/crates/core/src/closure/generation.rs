//! Recursive construction of commutator words for every torus monomial.
//!
//! Words are built bottom-up: pure powers and two-index monomials come from
//! the two-index formula, and a monomial with last nonzero index `j` and
//! prefix `P` is reached by
//!
//! * `(ad T_j)^{n_j} word(P)` when `Σ(P) ≢ 0 (mod l)`;
//! * `[T_i, (ad T_j)^{n_j} word(P with n_i − 1)]` for some `n_i ≠ n_j`;
//! * `[word(P without i_k), word(T_{i_k}^{n_{i_k}} T_j^{n_j})]` when all
//!   exponents are equal and `2 n_j ≠ l`;
//! * `[word(P with n_{i_k} → n'), word(T_{i_k}^{n''} T_j^{n_j})]` with
//!   `n' + n'' = n_{i_k}` when `2 n_j = l`.
//!
//! Every candidate is evaluated and accepted only if it is a nonzero
//! multiple of the target monomial. These cases do not cover every
//! monomial (for `l = 3`, `T_0 T_1^2 T_2` defeats all of them), so the
//! builder falls back to a breadth-first search over brackets of monomials.

use std::collections::HashMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::span::{lie_closure, CoefficientField};
use super::{two_index_word, BracketWord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::torus::{all_exponents, commutation_exponent, monomial, register_dim, torus_generators, GeneratorSet, MonomialExponents};
use crate::weyl_core::{ad_pow, commutator, projection_coefficient, proportional, CMatrix, Tolerance};

/// Register dimension limit for exhaustive generation checks.
pub const MAX_GENERATION_DIM: usize = 81;

/// Which construction produced a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Leaf,
    TwoIndex,
    PurePower,
    Case1,
    Case2_1,
    Case2_2_1,
    Case2_2_2,
    Reachability,
}

#[derive(Clone)]
struct Built<T> {
    word: BracketWord,
    value: CMatrix<T>,
    route: Route,
}

/// Memoizing word constructor bound to one generator set.
pub struct WordBuilder<T> {
    gens: GeneratorSet<T>,
    tol: Tolerance<T>,
    memo: HashMap<MonomialExponents, Built<T>>,
    reachable: Option<HashMap<MonomialExponents, BracketWord>>,
    targets: HashMap<MonomialExponents, CMatrix<T>>,
}

impl<T: Scalar> WordBuilder<T> {
    pub fn new(gens: GeneratorSet<T>, tol: Tolerance<T>) -> Self {
        Self { gens, tol, memo: HashMap::new(), reachable: None, targets: HashMap::new() }
    }

    pub fn generators(&self) -> &GeneratorSet<T> {
        &self.gens
    }

    /// Commutator word proportional to `monomial(e)`.
    pub fn word(&mut self, e: &MonomialExponents) -> Result<BracketWord> {
        Ok(self.word_with_route(e)?.0)
    }

    pub fn word_with_route(&mut self, e: &MonomialExponents) -> Result<(BracketWord, Route)> {
        e.validate(self.gens.l(), self.gens.len())?;
        let b = self.get(e)?;
        Ok((b.word, b.route))
    }

    fn target(&mut self, e: &MonomialExponents) -> Result<CMatrix<T>> {
        if let Some(t) = self.targets.get(e) {
            return Ok(t.clone());
        }
        let t = monomial(&self.gens, e)?;
        self.targets.insert(e.clone(), t.clone());
        Ok(t)
    }

    fn accepts(&mut self, e: &MonomialExponents, value: &CMatrix<T>) -> Result<bool> {
        let target = self.target(e)?;
        Ok(proportional(value, &target, &self.tol)?.is_some_and(|a| a.norm() > self.tol.rank_eps))
    }

    fn get(&mut self, e: &MonomialExponents) -> Result<Built<T>> {
        if let Some(b) = self.memo.get(e) {
            return Ok(b.clone());
        }
        let built = self.construct(e)?;
        self.memo.insert(e.clone(), built.clone());
        Ok(built)
    }

    fn leaf(&self, k: usize) -> &CMatrix<T> {
        &self.gens.mats()[k]
    }

    fn construct(&mut self, e: &MonomialExponents) -> Result<Built<T>> {
        let support = e.support();
        let l = self.gens.l();
        let mut last: Option<BracketWord> = None;
        let mut candidates: Vec<Built<T>> = Vec::new();

        match support.as_slice() {
            [] => return Err(Error::NoWord),
            [i] => {
                let (i, p) = (*i, e.as_slice()[*i]);
                if p == 1 {
                    candidates.push(Built { word: BracketWord::leaf(i), value: self.leaf(i).clone(), route: Route::Leaf });
                } else if i >= 1 {
                    let word = two_index_word(0, i, 0, p, l)?;
                    let value = word.evaluate(self.gens.mats())?;
                    candidates.push(Built { word, value, route: Route::PurePower });
                } else {
                    // T_0^p ∝ [T_0^p T_1, T_1^{l−1}].
                    let len = e.len();
                    let with_partner = e.with(1, 1);
                    let partner_power = MonomialExponents::single(len, 1, l - 1);
                    if let (Ok(a), Ok(b)) = (self.get(&with_partner), self.get(&partner_power)) {
                        candidates.push(Built {
                            word: BracketWord::bracket(a.word, b.word),
                            value: commutator(&a.value, &b.value)?,
                            route: Route::PurePower,
                        });
                    }
                }
            }
            [i, j] => {
                let word = two_index_word(*i, *j, e.as_slice()[*i], e.as_slice()[*j], l)?;
                let value = word.evaluate(self.gens.mats())?;
                candidates.push(Built { word, value, route: Route::TwoIndex });
            }
            _ => {}
        }
        for c in candidates.drain(..) {
            if self.accepts(e, &c.value)? {
                return Ok(c);
            }
            last = Some(c.word);
        }

        if support.len() >= 3 {
            if let Some(b) = self.recursive_cases(e, &support, &mut last)? {
                return Ok(b);
            }
        }
        if let Some(b) = self.reachability_fallback(e, &mut last)? {
            return Ok(b);
        }
        Err(Error::GenerationFailure {
            exponents: e.as_slice().to_vec(),
            word: Box::new(last.unwrap_or(BracketWord::leaf(support[0]))),
        })
    }

    fn try_ad(&mut self, e: &MonomialExponents, j: usize, pow: usize, inner: &Built<T>) -> Result<Option<Built<T>>> {
        let value = ad_pow(self.leaf(j), pow, &inner.value)?;
        let word = BracketWord::ad(j, pow, inner.word.clone());
        Ok(self.accepts(e, &value)?.then_some(Built { word, value, route: Route::Case1 }))
    }

    fn try_bracket(
        &mut self,
        e: &MonomialExponents,
        a: &Built<T>,
        b: &Built<T>,
        route: Route,
    ) -> Result<Option<Built<T>>> {
        let value = commutator(&a.value, &b.value)?;
        let word = BracketWord::bracket(a.word.clone(), b.word.clone());
        Ok(self.accepts(e, &value)?.then_some(Built { word, value, route }))
    }

    fn recursive_cases(
        &mut self,
        e: &MonomialExponents,
        support: &[usize],
        last: &mut Option<BracketWord>,
    ) -> Result<Option<Built<T>>> {
        let l = self.gens.l();
        let exps = e.as_slice();
        let j = *support.last().expect("nonempty support");
        let n_j = exps[j];
        let prefix = e.with(j, 0);
        let prefix_support = &support[..support.len() - 1];

        // Case 1.
        if !prefix.total().is_multiple_of(l) {
            if let Ok(p) = self.get(&prefix) {
                if let Some(b) = self.try_ad(e, j, n_j, &p)? {
                    return Ok(Some(b));
                }
                *last = Some(BracketWord::ad(j, n_j, p.word));
            }
        }

        // Case 2.1: smallest qualifying index first, then the rest.
        for &i in prefix_support.iter().filter(|&&i| exps[i] != n_j) {
            let reduced = prefix.with(i, exps[i] - 1);
            if reduced.is_zero() {
                continue;
            }
            let Ok(r) = self.get(&reduced) else { continue };
            let inner_value = ad_pow(self.leaf(j), n_j, &r.value)?;
            let inner = Built { word: BracketWord::ad(j, n_j, r.word), value: inner_value, route: Route::Case1 };
            let leaf = Built { word: BracketWord::leaf(i), value: self.leaf(i).clone(), route: Route::Leaf };
            if let Some(b) = self.try_bracket(e, &leaf, &inner, Route::Case2_1)? {
                return Ok(Some(b));
            }
            *last = Some(BracketWord::bracket(leaf.word, inner.word));
        }

        // Case 2.2.
        let i_k = *prefix_support.last().expect("at least two prefix indices");
        let n_ik = exps[i_k];
        let route = if 2 * n_j != l { Route::Case2_2_1 } else { Route::Case2_2_2 };
        let splits: Vec<usize> = if 2 * n_j != l {
            vec![0]
        } else {
            // n' = 1 first, then every other split.
            std::iter::once(1.min(n_ik)).chain((0..=n_ik).filter(|&s| s != 1.min(n_ik))).collect()
        };
        for n_prime in splits {
            let n_second = n_ik - n_prime;
            let left = prefix.with(i_k, n_prime);
            let right = MonomialExponents::zero(e.len()).with(i_k, n_second).with(j, n_j);
            if left.is_zero() {
                continue;
            }
            let (Ok(a), Ok(b)) = (self.get(&left), self.get(&right)) else { continue };
            if let Some(built) = self.try_bracket(e, &a, &b, route)? {
                return Ok(Some(built));
            }
            *last = Some(BracketWord::bracket(a.word, b.word));
        }
        Ok(None)
    }

    /// Words for every monomial reachable by brackets of monomials, found by
    /// breadth-first search on exponent vectors: `[T(a), T(b)] ∝ T(a + b)`
    /// whenever the commutation exponent of `a` and `b` is nonzero mod `l`.
    fn reachable_words(&mut self) -> &HashMap<MonomialExponents, BracketWord> {
        if self.reachable.is_none() {
            let l = self.gens.l();
            let len = self.gens.len();
            let mut words: HashMap<MonomialExponents, BracketWord> = HashMap::new();
            let mut order: Vec<MonomialExponents> = Vec::new();
            for k in 0..len {
                let e = MonomialExponents::single(len, k, 1);
                words.insert(e.clone(), BracketWord::leaf(k));
                order.push(e);
            }
            let mut level_start = 0;
            while level_start < order.len() {
                let level_end = order.len();
                for ia in level_start..level_end {
                    for ib in 0..level_end {
                        let (a, b) = (&order[ia], &order[ib]);
                        if commutation_exponent(a, b, l) == 0 {
                            continue;
                        }
                        let sum = a.add_mod(b, l);
                        if sum.is_zero() || words.contains_key(&sum) {
                            continue;
                        }
                        let word = BracketWord::bracket(words[a].clone(), words[b].clone());
                        words.insert(sum.clone(), word);
                        order.push(sum);
                    }
                }
                level_start = level_end;
            }
            self.reachable = Some(words);
        }
        self.reachable.as_ref().expect("just filled")
    }

    fn reachability_fallback(&mut self, e: &MonomialExponents, last: &mut Option<BracketWord>) -> Result<Option<Built<T>>> {
        let Some(word) = self.reachable_words().get(e).cloned() else { return Ok(None) };
        let value = word.evaluate(self.gens.mats())?;
        if self.accepts(e, &value)? {
            return Ok(Some(Built { word, value, route: Route::Reachability }));
        }
        *last = Some(word);
        Ok(None)
    }
}

/// Word for `monomial(e)` over the torus generators with `2n = e.len()`.
pub fn monomial_word<T: Scalar>(e: &MonomialExponents, l: usize, tol: &Tolerance<T>) -> Result<BracketWord> {
    if e.is_empty() || !e.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("exponent vector length {} is not 2n", e.len())));
    }
    if e.is_zero() {
        return Err(Error::NoWord);
    }
    let gens = torus_generators::<T>(l, e.len() / 2)?;
    WordBuilder::new(gens, *tol).word(e)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GenerationEntry<T> {
    pub exponents: MonomialExponents,
    pub word: BracketWord,
    pub route: Route,
    /// Frobenius projection coefficient of the word onto the monomial.
    pub alpha: Complex<T>,
    /// `‖word − α·monomial‖_F / ‖word‖_F`.
    pub residual: T,
    /// `|tr(word)|`.
    pub trace: T,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationFailureEntry {
    pub exponents: MonomialExponents,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GenerationReport<T> {
    pub l: usize,
    pub n: usize,
    /// Number of non-identity monomials, `l^{2n} − 1`.
    pub expected: usize,
    pub entries: Vec<GenerationEntry<T>>,
    pub failures: Vec<GenerationFailureEntry>,
    pub min_alpha: T,
    pub max_residual: T,
    pub max_trace: T,
    pub passed: bool,
}

/// Builds and checks a word for every non-identity monomial; refuses `l = 2`.
pub fn verify_generation<T: Scalar>(l: usize, n: usize, tol: &Tolerance<T>) -> Result<GenerationReport<T>> {
    if l == 2 {
        return Err(Error::NotCovered);
    }
    generate_all(l, n, tol)
}

/// Same as [`verify_generation`] but also runs for `l = 2`, where the
/// failures are data rather than an error.
pub fn generate_all<T: Scalar>(l: usize, n: usize, tol: &Tolerance<T>) -> Result<GenerationReport<T>> {
    register_dim(l, n, MAX_GENERATION_DIM)?;
    let gens = torus_generators::<T>(l, n)?;
    let mut builder = WordBuilder::new(gens.clone(), *tol);
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for e in all_exponents(l, 2 * n).filter(|e| !e.is_zero()) {
        match builder.word_with_route(&e) {
            Ok((word, route)) => {
                let value = word.evaluate(gens.mats())?;
                let target = monomial(&gens, &e)?;
                let (alpha, residual) = projection_coefficient(&value, &target)?;
                let trace = value.trace().norm();
                let ok = alpha.norm() > tol.rank_eps
                    && proportional(&value, &target, tol)?.is_some()
                    && trace <= tol.abs_eps * value.frobenius_norm().max(T::one());
                entries.push(GenerationEntry { exponents: e, word, route, alpha, residual, trace, ok });
            }
            Err(err) => failures.push(GenerationFailureEntry { exponents: e, reason: err.to_string() }),
        }
    }
    let expected = l.pow(2 * n as u32) - 1;
    let min_alpha = entries.iter().map(|x| x.alpha.norm()).fold(T::infinity(), T::min);
    let max_residual = entries.iter().map(|x| x.residual).fold(T::zero(), T::max);
    let max_trace = entries.iter().map(|x| x.trace).fold(T::zero(), T::max);
    let passed = failures.is_empty() && entries.len() == expected && entries.iter().all(|x| x.ok);
    Ok(GenerationReport { l, n, expected, entries, failures, min_alpha, max_residual, max_trace, passed })
}

/// Cross-checks the constructive words against the span-growth closure:
/// true iff the complex closure of `{T_k}` has dimension `l^{2n} − 1` and
/// every monomial was generated.
pub fn closure_dim_matches_generation<T: Scalar>(l: usize, n: usize, tol: &Tolerance<T>) -> Result<bool> {
    let report = generate_all(l, n, tol)?;
    let gens = torus_generators::<T>(l, n)?;
    let span = lie_closure(gens.mats(), CoefficientField::Complex, tol)?;
    Ok(span.dim() == report.expected && report.passed)
}
