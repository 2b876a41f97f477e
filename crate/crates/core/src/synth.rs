//! Product-formula compiler from special-unitary targets to `G`/`F` gate
//! sequences.
//!
//! A target `U` is mapped to a traceless anti-Hermitian `H` with
//! `exp(H) = e^{iφ} U`, expanded on the closed real Lie span of the gate
//! seeds, and realized as `(Π_a exp(c_a X_a / m))^m`. Every spanning element
//! `X_a` is a commutator word over seeds; a seed factor is a single gate and a
//! bracket `[A, B]` is realized by the group commutator
//! `exp(sA) exp(sB) exp(−sA) exp(−sB) = exp(s²[A, B] + O(s³))`, recursively.
//!
//! Sequence order: the first gate in a [`GateSequence`] is applied first, so
//! its matrix is `g_last ⋯ g_2 g_1`.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closure::{lie_closure_shallow, BracketWord, CoefficientField, LieSpan};
use crate::error::{Error, Result};
use crate::gates::{certified_span, seeds, GateSpec, UniversalityReport, DEFAULT_TAU_MAX};
use crate::linalg::{determinant, hermitian_eigen, normal_eigen, UnitaryEigen};
use crate::scalar::Scalar;
use crate::torus::GeneratorSet;
use crate::weyl_core::{CMatrix, Tolerance};

/// Distance from `π` below which an eigenphase is treated as on the branch cut.
pub const BRANCH_CUT_WINDOW: f64 = 1e-6;

/// Default cap on the commutator depth of a compiled basis element.
pub const DEFAULT_COMMUTATOR_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    pub trotter_steps: usize,
    pub commutator_depth: usize,
    /// Leading first-order product-formula term
    /// `(1/2m) Σ_{a<b} |c_a c_b| ‖[X_a, X_b]‖_F`; group-commutator
    /// corrections are not included.
    pub predicted_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub l: usize,
    pub n: usize,
    pub gates: Vec<GateSpec>,
    pub meta: SequenceMeta,
}

impl GateSequence {
    pub fn empty(l: usize, n: usize) -> Self {
        Self { l, n, gates: Vec::new(), meta: SequenceMeta { trotter_steps: 0, commutator_depth: 0, predicted_error: 0.0 } }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Reversed order with negated parameters; composes with `seq` to the identity.
pub fn inverse_sequence(seq: &GateSequence) -> GateSequence {
    GateSequence {
        gates: seq.gates.iter().rev().map(|g| GateSpec { tau: -g.tau, ..*g }).collect(),
        ..seq.clone()
    }
}

/// `sqrt(max(0, 2N − 2|tr(A†B)|))`; zero exactly when `A = e^{iφ}B`.
pub fn phase_distance<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let two = T::lit(2.0);
    let v = two * T::from_count(a.dim()) - two * a.inner(b).norm();
    Ok(v.max(T::zero()).sqrt())
}

fn check_unitary<T: Scalar>(u: &CMatrix<T>, tol: &Tolerance<T>) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = u.unitarity_residual();
    if residual > tol.abs_eps * T::from_count(u.dim()) {
        return Err(Error::NotUnitary { residual: residual.as_f64() });
    }
    Ok(())
}

/// Principal logarithm of a unitary, trace-projected to `su(N)`.
#[derive(Clone, Debug)]
pub struct UnitaryLog<T> {
    pub generator: CMatrix<T>,
    /// Set when an eigenphase sat on the branch cut and was moved to `π − 10⁻⁶`.
    pub branch_cut: bool,
}

/// Traceless anti-Hermitian `H` with `exp(H) = e^{iφ} U`.
pub fn log_unitary<T: Scalar>(u: &CMatrix<T>, tol: &Tolerance<T>) -> Result<CMatrix<T>> {
    Ok(log_unitary_detailed(u, tol)?.generator)
}

pub fn log_unitary_detailed<T: Scalar>(u: &CMatrix<T>, tol: &Tolerance<T>) -> Result<UnitaryLog<T>> {
    check_unitary(u, tol)?;
    let eig = normal_eigen(u)?;
    let limit = T::PI() - T::lit(BRANCH_CUT_WINDOW);
    let mut branch_cut = false;
    let phases: Vec<T> = eig
        .values
        .iter()
        .map(|z| {
            let phi = z.arg();
            if phi.abs() > limit {
                branch_cut = true;
                limit
            } else {
                phi
            }
        })
        .collect();
    if branch_cut {
        log::warn!("eigenphase within {BRANCH_CUT_WINDOW:e} of pi; using pi - {BRANCH_CUT_WINDOW:e}");
    }
    let mean = phases.iter().fold(T::zero(), |a, &p| a + p) / T::from_count(phases.len());
    let spectral = UnitaryEigen {
        values: phases.iter().map(|&p| Complex::new(T::zero(), p - mean)).collect(),
        vectors: eig.vectors,
    };
    let raw = spectral.map(|z| z);
    // Enforce exact anti-Hermiticity against rounding in the rebuild.
    let generator = (&raw - &raw.dagger()).scale_real(T::lit(0.5));
    Ok(UnitaryLog { generator, branch_cut })
}

/// Coordinates of a target generator in a closed span.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DecomposedTarget<T> {
    /// Coefficients on the orthonormal basis.
    pub coeffs: Vec<T>,
    /// Coefficients on the raw spanning elements, `H = Σ_a w_a X_a`.
    pub word_coeffs: Vec<T>,
    /// Commutator word over seed indices for each spanning element.
    pub basis_words: Vec<BracketWord>,
    /// `‖H − Σ c_a Q_a‖_F / ‖H‖_F`.
    pub residual: T,
}

/// Real coordinates of an anti-Hermitian `H` on a real closed span.
pub fn decompose<T: Scalar>(h: &CMatrix<T>, span: &LieSpan<T>, tol: &Tolerance<T>) -> Result<DecomposedTarget<T>> {
    if span.field != CoefficientField::Real {
        return Err(Error::InvalidParameter("decomposition needs a span over the real field".into()));
    }
    if h.dim() != span.ambient_dim {
        return Err(Error::DimensionMismatch { left: h.dim(), right: span.ambient_dim });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let (ortho, residual) = span.project(h);
    if residual > tol.abs_eps {
        return Err(Error::OutsideSpan { residual: residual.as_f64() });
    }
    let word_coeffs = span.to_element_coords(&ortho).into_iter().map(|c| c.re).collect();
    Ok(DecomposedTarget {
        coeffs: ortho.into_iter().map(|c| c.re).collect(),
        word_coeffs,
        basis_words: span.words().cloned().collect(),
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileOptions {
    pub trotter_steps: usize,
    pub commutator_depth: usize,
    /// Gates with `|τ|` above this are split into equal consecutive gates.
    pub tau_max: f64,
}

impl CompileOptions {
    pub fn new(trotter_steps: usize, commutator_depth: usize) -> Self {
        Self { trotter_steps, commutator_depth, tau_max: DEFAULT_TAU_MAX }
    }
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self::new(16, DEFAULT_COMMUTATOR_DEPTH)
    }
}

/// Gate matrices `exp(τ·seed_s)` from cached spectral decompositions.
///
/// Every seed is `iK` with `K` Hermitian, so `exp(τ·seed) = Q e^{iτκ} Q†`.
#[derive(Clone, Debug)]
pub struct GateEvaluator<T> {
    l: usize,
    n: usize,
    dim: usize,
    spectra: Vec<UnitaryEigen<T>>,
}

impl<T: Scalar> GateEvaluator<T> {
    pub fn new(bset: &GeneratorSet<T>) -> Result<Self> {
        let minus_i = Complex::new(T::zero(), -T::one());
        let spectra = seeds(bset)?.iter().map(|s| hermitian_eigen(&s.scale(minus_i))).collect();
        Ok(Self { l: bset.l(), n: bset.n(), dim: bset.dim(), spectra })
    }

    pub fn gate(&self, spec: &GateSpec) -> Result<CMatrix<T>> {
        let limit = self.spectra.len() / 2;
        if spec.k >= limit {
            return Err(Error::IndexOutOfRange { index: spec.k, limit });
        }
        if !spec.tau.is_finite() {
            return Err(Error::NonFinite);
        }
        let tau = T::lit(spec.tau);
        Ok(self.spectra[spec.seed_index()].map(|kappa| Complex::new(T::zero(), tau * kappa.re).exp()))
    }

    /// `g_last ⋯ g_1` for the gates of `seq`.
    pub fn evaluate(&self, seq: &GateSequence) -> Result<CMatrix<T>> {
        if (seq.l, seq.n) != (self.l, self.n) {
            return Err(Error::InvalidParameter(format!(
                "sequence is for (l, n) = ({}, {}), gate set is ({}, {})",
                seq.l, seq.n, self.l, self.n
            )));
        }
        seq.gates.iter().try_fold(CMatrix::identity(self.dim), |acc, g| Ok(&self.gate(g)? * &acc))
    }
}

/// Matrix of a sequence; the left-most gate is applied first.
pub fn evaluate_sequence<T: Scalar>(seq: &GateSequence, bset: &GeneratorSet<T>) -> Result<CMatrix<T>> {
    GateEvaluator::new(bset)?.evaluate(seq)
}

/// `exp(sA) exp(sB) exp(−sA) exp(−sB)` with `s = √|t|`, operands swapped for
/// `t < 0`, approximating `exp(t[A, B])` to `O(|t|^{3/2})`.
pub fn group_commutator<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let (x, y) = if t >= T::zero() { (a, b) } else { (b, a) };
    let s = t.abs().sqrt();
    let e = |m: &CMatrix<T>, c: T| crate::linalg::matrix_exp(&m.scale_real(c));
    let (ex, ey, ex_inv, ey_inv) = (e(x, s)?, e(y, s)?, e(x, -s)?, e(y, -s)?);
    Ok(&(&(&ex * &ey) * &ex_inv) * &ey_inv)
}

/// Appends, in matrix order, the gates realizing `exp(t · word)`.
///
/// `flip` negates `s` in every group commutator; consecutive product-formula
/// steps alternate it so that the third-order terms cancel pairwise.
fn emit_word(word: &BracketWord, t: f64, flip: bool, tau_max: f64, out: &mut Vec<GateSpec>) -> Result<()> {
    match word {
        BracketWord::Leaf(s) => {
            let pieces = (t.abs() / tau_max).ceil().max(1.0) as usize;
            let tau = t / pieces as f64;
            out.extend(std::iter::repeat_n(GateSpec::from_seed(*s, tau), pieces));
            Ok(())
        }
        BracketWord::Bracket(a, b) => {
            let (x, y) = if t >= 0.0 { (a, b) } else { (b, a) };
            let s = if flip { -t.abs().sqrt() } else { t.abs().sqrt() };
            emit_word(x, s, flip, tau_max, out)?;
            emit_word(y, s, flip, tau_max, out)?;
            emit_word(x, -s, flip, tau_max, out)?;
            emit_word(y, -s, flip, tau_max, out)
        }
        BracketWord::Ad { .. } => Err(Error::InvalidParameter("compiler expects plain bracket words".into())),
    }
}

/// Compiler bound to a certified gate set.
#[derive(Clone, Debug)]
pub struct Compiler<T> {
    bset: GeneratorSet<T>,
    tol: Tolerance<T>,
    report: UniversalityReport,
    span: LieSpan<T>,
    evaluator: GateEvaluator<T>,
}

impl<T: Scalar> Compiler<T> {
    /// Certifies `bset`; fails if its algebra is smaller than `su(l^n)`.
    ///
    /// Compilation runs on the minimal-depth closure of the seeds, which
    /// spans the same algebra as the certified one.
    pub fn new(bset: GeneratorSet<T>, tol: Tolerance<T>) -> Result<Self> {
        let (report, _) = certified_span(&bset, &tol)?;
        if report.deficient {
            return Err(Error::DeficientGateSet { algebra_dim: report.algebra_dim, expected_dim: report.expected_dim });
        }
        // Same space, re-expressed with minimal-depth words for compilation.
        let span = lie_closure_shallow(&seeds(&bset)?, CoefficientField::Real, &tol)?;
        if span.dim() != report.algebra_dim {
            return Err(Error::DeficientGateSet { algebra_dim: span.dim(), expected_dim: report.expected_dim });
        }
        let evaluator = GateEvaluator::new(&bset)?;
        Ok(Self { bset, tol, report, span, evaluator })
    }

    pub fn report(&self) -> &UniversalityReport {
        &self.report
    }

    pub fn span(&self) -> &LieSpan<T> {
        &self.span
    }

    pub fn generators(&self) -> &GeneratorSet<T> {
        &self.bset
    }

    pub fn evaluator(&self) -> &GateEvaluator<T> {
        &self.evaluator
    }

    pub fn evaluate(&self, seq: &GateSequence) -> Result<CMatrix<T>> {
        self.evaluator.evaluate(seq)
    }

    pub fn decompose(&self, h: &CMatrix<T>) -> Result<DecomposedTarget<T>> {
        decompose(h, &self.span, &self.tol)
    }

    /// Compiles a unitary target of dimension `l^n`.
    pub fn compile(&self, target: &CMatrix<T>, opts: &CompileOptions) -> Result<GateSequence> {
        if target.dim() != self.bset.dim() {
            return Err(Error::DimensionMismatch { left: target.dim(), right: self.bset.dim() });
        }
        let h = log_unitary(target, &self.tol)?;
        self.compile_generator(&h, opts)
    }

    /// Compiles `exp(H)` for a traceless anti-Hermitian `H` in the span.
    pub fn compile_generator(&self, h: &CMatrix<T>, opts: &CompileOptions) -> Result<GateSequence> {
        if opts.trotter_steps == 0 {
            return Err(Error::InvalidParameter("trotter_steps must be at least 1".into()));
        }
        if !(opts.tau_max.is_finite() && opts.tau_max > 0.0) {
            return Err(Error::InvalidParameter("tau_max must be positive".into()));
        }
        let dec = self.decompose(h)?;
        let elements = self.span.elements();
        let cutoff = self.tol.abs_eps * h.frobenius_norm();
        let terms: Vec<(usize, f64)> = dec
            .word_coeffs
            .iter()
            .enumerate()
            .filter(|&(a, c)| c.abs() * elements[a].raw.frobenius_norm() > cutoff)
            .map(|(a, c)| (a, c.as_f64()))
            .collect();
        if let Some(needed) =
            terms.iter().map(|&(a, _)| elements[a].word.depth()).filter(|&d| d > opts.commutator_depth).max()
        {
            return Err(Error::DepthExhausted { needed, limit: opts.commutator_depth });
        }
        let m = opts.trotter_steps;
        let mut matrix_order = Vec::new();
        for step in 0..m {
            for &(a, c) in &terms {
                emit_word(&elements[a].word, c / m as f64, step % 2 == 1, opts.tau_max, &mut matrix_order)?;
            }
        }
        matrix_order.reverse();
        let predicted_error = self.trotter_estimate(&terms, m);
        Ok(GateSequence {
            l: self.bset.l(),
            n: self.bset.n(),
            gates: matrix_order,
            meta: SequenceMeta { trotter_steps: m, commutator_depth: opts.commutator_depth, predicted_error },
        })
    }

    fn trotter_estimate(&self, terms: &[(usize, f64)], m: usize) -> f64 {
        let el = self.span.elements();
        let mut total = 0.0;
        for (i, &(a, ca)) in terms.iter().enumerate() {
            for &(b, cb) in &terms[i + 1..] {
                let x = &el[a].raw;
                let y = &el[b].raw;
                let br = &(x * y) - &(y * x);
                total += (ca * cb).abs() * br.frobenius_norm().as_f64();
            }
        }
        total / (2.0 * m as f64)
    }

    /// Compiles `target` at each `m` in parallel and measures the error.
    pub fn sweep(&self, target: &CMatrix<T>, ms: &[usize], depth: usize) -> Result<Vec<SweepRow>> {
        ms.par_iter()
            .map(|&m| {
                let start = Instant::now();
                let seq = self.compile(target, &CompileOptions { trotter_steps: m, commutator_depth: depth, tau_max: DEFAULT_TAU_MAX })?;
                let got = self.evaluate(&seq)?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                Ok(SweepRow {
                    m,
                    depth,
                    phase_distance: phase_distance(&got, target)?.as_f64(),
                    gate_count: seq.len(),
                    wall_ms,
                })
            })
            .collect()
    }
}

/// Compiles `target` with `m` product-formula steps and commutator depth cap `depth`.
pub fn compile<T: Scalar>(
    target: &CMatrix<T>,
    bset: &GeneratorSet<T>,
    m: usize,
    depth: usize,
    tol: &Tolerance<T>,
) -> Result<GateSequence> {
    Compiler::new(bset.clone(), *tol)?.compile(target, &CompileOptions::new(m, depth))
}

/// One row of a compile sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub depth: usize,
    pub phase_distance: f64,
    pub gate_count: usize,
    pub wall_ms: f64,
}

/// CSV with header `m,depth,phase_distance,gate_count,wall_ms`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Haar-distributed special unitary: Gram–Schmidt on a complex Ginibre
/// matrix, then division by an `N`-th root of the determinant.
pub fn random_special_unitary<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix<T> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(T::lit(re * half), T::lit(im * half))
                })
                .collect()
        })
        .collect();
    for j in 0..dim {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let p = q.iter().zip(v.iter()).fold(Complex::zero(), |acc: Complex<T>, (a, b)| acc + a.conj() * b);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        for vi in v.iter_mut() {
            *vi = vi.unscale(norm);
        }
    }
    let u = CMatrix::from_fn(dim, |i, j| cols[j][i]);
    let root = determinant(&u).powf(T::from_count(dim).recip());
    u.scale(root.inv())
}

/// [`random_special_unitary`] driven by a ChaCha8 stream seeded with `seed`.
pub fn random_special_unitary_seeded<T: Scalar>(dim: usize, seed: u64) -> CMatrix<T> {
    random_special_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}
