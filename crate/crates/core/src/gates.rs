//! Two-local elements `B_j`, the gate family `G`/`F`, and universality
//! certification by real Lie closure.
//!
//! ```text
//! B_0 = T_0,   B_j = T_j T_{j−1}†            (1 ≤ j < 2n)
//! G^τ_k = exp(iτ(B_k + B_k†)),   F^τ_k = exp(τ(B_k − B_k†))
//! ```
//!
//! Seed `2k` is `i(B_k + B_k†)` and seed `2k + 1` is `B_k − B_k†`, so a gate
//! is `exp(τ · seed)` for the seed with the matching index.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::closure::{lie_closure, BracketWord, CoefficientField, LieSpan};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::torus::{register_dim, torus_generators_bounded, GeneratorKind, GeneratorSet};
use crate::weyl_core::{commutator, proportional, CMatrix, Tolerance, DEFAULT_MAX_DIM};

pub use crate::linalg::matrix_exp;

/// Default bound on `|τ|` for a single gate.
pub const DEFAULT_TAU_MAX: f64 = 10.0;

/// Largest register dimension accepted by [`certify_universality`].
pub const MAX_CERTIFY_DIM: usize = 81;

pub fn b_elements<T: Scalar>(l: usize, n: usize) -> Result<GeneratorSet<T>> {
    b_elements_bounded(l, n, DEFAULT_MAX_DIM)
}

pub fn b_elements_bounded<T: Scalar>(l: usize, n: usize, max_dim: usize) -> Result<GeneratorSet<T>> {
    b_from_torus(&torus_generators_bounded(l, n, max_dim)?)
}

/// `B_0 = T_0`, `B_j = T_j T_{j−1}†`, stored without phase normalization.
pub fn b_from_torus<T: Scalar>(t: &GeneratorSet<T>) -> Result<GeneratorSet<T>> {
    require_kind(t, GeneratorKind::Torus)?;
    let m = t.mats();
    let mut mats = Vec::with_capacity(m.len());
    mats.push(m[0].clone());
    for j in 1..m.len() {
        mats.push(&m[j] * &m[j - 1].dagger());
    }
    GeneratorSet::from_parts(t.l(), t.n(), GeneratorKind::TwoLocal, mats)
}

fn require_kind<T: Scalar>(g: &GeneratorSet<T>, kind: GeneratorKind) -> Result<()> {
    if g.kind() != kind {
        return Err(Error::WrongKind { expected: kind.name(), found: g.kind().name() });
    }
    Ok(())
}

/// Tensor slots (0 = leftmost factor) on which `m` acts non-trivially.
///
/// Slot `s` is trivial when `m` equals its partial trace over `s`, divided by
/// `l`, tensored back with the identity on `s`, to `abs_eps·‖m‖_F`.
pub fn nontrivial_slots<T: Scalar>(m: &CMatrix<T>, l: usize, n: usize, tol: &Tolerance<T>) -> Result<Vec<usize>> {
    let dim = register_dim(l, n, usize::MAX)?;
    if m.dim() != dim {
        return Err(Error::DimensionMismatch { left: m.dim(), right: dim });
    }
    let bound = tol.abs_eps * m.frobenius_norm().max(T::one());
    let inv_l = T::from_count(l).recip();
    let mut slots = Vec::new();
    for s in 0..n {
        let stride = l.pow((n - 1 - s) as u32);
        let digit = |i: usize| (i / stride) % l;
        let rebuilt = CMatrix::from_fn(dim, |i, j| {
            if digit(i) != digit(j) {
                return Complex::new(T::zero(), T::zero());
            }
            let (i0, j0) = (i - digit(i) * stride, j - digit(j) * stride);
            let mut acc = Complex::new(T::zero(), T::zero());
            for a in 0..l {
                acc += m[(i0 + a * stride, j0 + a * stride)];
            }
            acc * inv_l
        });
        if m.distance(&rebuilt) > bound {
            slots.push(s);
        }
    }
    Ok(slots)
}

/// Recovers `T_0 = B_0`, `T_1 ∝ [T_0, B_1]` and `T_i ∝ [B_i, T_{i−1}]`.
///
/// Every step is checked for proportionality against the true torus
/// generator. Each recovered operator is rescaled to Frobenius norm `√N`
/// (the norm of a unitary) with its phase kept.
pub fn recover_t<T: Scalar>(bset: &GeneratorSet<T>, tol: &Tolerance<T>) -> Result<GeneratorSet<T>> {
    require_kind(bset, GeneratorKind::TwoLocal)?;
    let truth = torus_generators_bounded::<T>(bset.l(), bset.n(), usize::MAX)?;
    let b = bset.mats();
    let target_norm = T::from_count(bset.dim()).sqrt();
    let mut out: Vec<CMatrix<T>> = Vec::with_capacity(b.len());
    for i in 0..b.len() {
        let raw = match i {
            0 => b[0].clone(),
            1 => commutator(&out[0], &b[1])?,
            _ => commutator(&b[i], &out[i - 1])?,
        };
        let norm = raw.frobenius_norm();
        if norm <= tol.abs_eps || proportional(&raw, &truth.mats()[i], tol)?.is_none() {
            return Err(Error::Reconstruction { step: i });
        }
        out.push(raw.scale_real(target_norm / norm));
    }
    GeneratorSet::from_parts(bset.l(), bset.n(), GeneratorKind::Torus, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    /// `exp(iτ(B + B†))`.
    G,
    /// `exp(τ(B − B†))`.
    F,
}

impl GateKind {
    fn offset(self) -> usize {
        match self {
            GateKind::G => 0,
            GateKind::F => 1,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::G => "G",
            GateKind::F => "F",
        })
    }
}

/// One gate `G^τ_k` or `F^τ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub k: usize,
    pub kind: GateKind,
    pub tau: f64,
}

impl GateSpec {
    pub fn new(k: usize, kind: GateKind, tau: f64) -> Self {
        Self { k, kind, tau }
    }

    /// Gate `exp(τ · seed_s)` for seed index `s` of [`seeds`].
    pub fn from_seed(s: usize, tau: f64) -> Self {
        let kind = if s.is_multiple_of(2) { GateKind::G } else { GateKind::F };
        Self { k: s / 2, kind, tau }
    }

    pub fn seed_index(&self) -> usize {
        2 * self.k + self.kind.offset()
    }

    pub fn validate(&self, num_generators: usize, tau_max: f64) -> Result<()> {
        if self.k >= num_generators {
            return Err(Error::IndexOutOfRange { index: self.k, limit: num_generators });
        }
        if !self.tau.is_finite() || self.tau.abs() > tau_max {
            return Err(Error::InvalidParameter(format!("gate tau {} outside [-{tau_max}, {tau_max}]", self.tau)));
        }
        Ok(())
    }
}

/// Seed generator of a gate: `i(B_k + B_k†)` for `G`, `B_k − B_k†` for `F`.
pub fn gate_generator<T: Scalar>(kind: GateKind, k: usize, bset: &GeneratorSet<T>) -> Result<CMatrix<T>> {
    let b = bset.get(k)?;
    let bd = b.dagger();
    Ok(match kind {
        GateKind::G => (b + &bd).scale(Complex::i()),
        GateKind::F => b - &bd,
    })
}

/// The `4n` closure seeds, ordered `i(B_0+B_0†), B_0−B_0†, i(B_1+B_1†), …`.
pub fn seeds<T: Scalar>(bset: &GeneratorSet<T>) -> Result<Vec<CMatrix<T>>> {
    require_kind(bset, GeneratorKind::TwoLocal)?;
    (0..bset.len())
        .flat_map(|k| [GateKind::G, GateKind::F].map(move |kind| (k, kind)))
        .map(|(k, kind)| gate_generator(kind, k, bset))
        .collect()
}

/// Unitary matrix of `spec` with `|τ| ≤` [`DEFAULT_TAU_MAX`].
pub fn gate<T: Scalar>(spec: &GateSpec, bset: &GeneratorSet<T>) -> Result<CMatrix<T>> {
    gate_with_limit(spec, bset, DEFAULT_TAU_MAX)
}

pub fn gate_with_limit<T: Scalar>(spec: &GateSpec, bset: &GeneratorSet<T>, tau_max: f64) -> Result<CMatrix<T>> {
    require_kind(bset, GeneratorKind::TwoLocal)?;
    spec.validate(bset.len(), tau_max)?;
    let generator = gate_generator(spec.kind, spec.k, bset)?;
    matrix_exp(&generator.scale_real(T::lit(spec.tau)))
}

/// Outcome of universality certification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub l: usize,
    pub n: usize,
    pub algebra_dim: usize,
    pub expected_dim: usize,
    pub deficient: bool,
    /// Bracket word over seed indices for each basis element, in basis order.
    pub basis_provenance: Vec<BracketWord>,
    /// Seeds that vanish identically (the `F` seed of a Hermitian `B_k`).
    pub degenerate_seeds: Vec<usize>,
}

/// Real Lie closure of the `4n` seeds for `l^n ≤ 81`, compared to `dim su(l^n)`.
pub fn certify_universality<T: Scalar>(l: usize, n: usize, tol: &Tolerance<T>) -> Result<UniversalityReport> {
    register_dim(l, n, MAX_CERTIFY_DIM)?;
    Ok(certified_span(&b_elements::<T>(l, n)?, tol)?.0)
}

/// Certification report together with the closed span it was computed from.
pub fn certified_span<T: Scalar>(bset: &GeneratorSet<T>, tol: &Tolerance<T>) -> Result<(UniversalityReport, LieSpan<T>)> {
    let seeds = seeds(bset)?;
    let degenerate_seeds =
        seeds.iter().enumerate().filter(|(_, s)| s.frobenius_norm() <= tol.abs_eps).map(|(i, _)| i).collect();
    let span = lie_closure(&seeds, CoefficientField::Real, tol)?;
    let dim = bset.dim();
    let expected_dim = dim * dim - 1;
    let report = UniversalityReport {
        l: bset.l(),
        n: bset.n(),
        algebra_dim: span.dim(),
        expected_dim,
        deficient: span.dim() < expected_dim,
        basis_provenance: span.words().cloned().collect(),
        degenerate_seeds,
    };
    Ok((report, span))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::torus_generators;
    use crate::weyl_core::{kron_all, projection_coefficient};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn real(rows: &[&[f64]]) -> CMatrix<f64> {
        CMatrix::from_real_rows(rows).unwrap()
    }

    fn sigma_x() -> CMatrix<f64> {
        real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn sigma_z() -> CMatrix<f64> {
        real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    fn assert_prop(a: &CMatrix<f64>, b: &CMatrix<f64>) {
        let (alpha, resid) = projection_coefficient(a, b).unwrap();
        assert!(alpha.norm() > 1e-8 && resid < 1e-10, "alpha {alpha}, residual {resid}");
    }

    #[test]
    fn qubit_pair_forms() {
        let b = b_elements::<f64>(2, 2).unwrap();
        let id = CMatrix::identity(2);
        let k = |a: &CMatrix<f64>, c: &CMatrix<f64>| kron_all(&[a.clone(), c.clone()], 16).unwrap();
        assert!(b.mats()[0].distance(&k(&id, &sigma_x())) < 1e-12);
        assert_prop(&b.mats()[1], &k(&id, &sigma_z()));
        assert_prop(&b.mats()[2], &k(&sigma_x(), &sigma_x()));
        assert_prop(&b.mats()[3], &k(&sigma_z(), &id));
        assert_eq!(b.kind(), GeneratorKind::TwoLocal);
    }

    /// Expected non-trivial slots for `B_j` on `n` qudits.
    fn expected_slots(j: usize, n: usize) -> Vec<usize> {
        match j {
            0 => vec![n - 1],
            _ if j % 2 == 1 => vec![n - (j - 1) / 2 - 1],
            _ => {
                let k = (j - 2) / 2;
                vec![n - k - 2, n - k - 1]
            }
        }
    }

    #[test]
    fn locality_matches_forms() {
        for l in 2..=4 {
            for n in 1..=3 {
                let b = b_elements::<f64>(l, n).unwrap();
                for (j, m) in b.mats().iter().enumerate() {
                    assert_eq!(nontrivial_slots(m, l, n, &tol()).unwrap(), expected_slots(j, n), "l={l} n={n} j={j}");
                    assert!(m.unitarity_residual() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn qutrit_pair_shift_form() {
        // B_2 ∝ T_x ⊗ T_x† on (l, n) = (3, 2).
        let b = b_elements::<f64>(3, 2).unwrap();
        let u = crate::weyl_core::shift_u::<f64>(3).unwrap();
        assert_prop(&b.mats()[2], &kron_all(&[u.clone(), u.dagger()], 81).unwrap());
    }

    #[test]
    fn partial_trace_detects_entangling_operator() {
        let t = torus_generators::<f64>(3, 2).unwrap();
        assert_eq!(nontrivial_slots(&t.mats()[2], 3, 2, &tol()).unwrap(), vec![0, 1]);
        assert_eq!(nontrivial_slots(&CMatrix::<f64>::identity(9), 3, 2, &tol()).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn recover_reproduces_generators() {
        for l in 2..=4 {
            for n in 1..=2 {
                let b = b_elements::<f64>(l, n).unwrap();
                let rec = recover_t(&b, &tol()).unwrap();
                let truth = torus_generators::<f64>(l, n).unwrap();
                for (r, t) in rec.mats().iter().zip(truth.mats()) {
                    assert_prop(r, t);
                }
            }
        }
    }

    #[test]
    fn recover_first_bracket_oracle() {
        let b = b_elements::<f64>(3, 2).unwrap();
        let t = torus_generators::<f64>(3, 2).unwrap();
        let br = &(&t.mats()[0] * &b.mats()[1]) - &(&b.mats()[1] * &t.mats()[0]);
        assert_prop(&br, &t.mats()[1]);
    }

    #[test]
    fn recover_names_failing_step() {
        let b = b_elements::<f64>(3, 2).unwrap();
        let broken = b.clone().with_replaced(2, CMatrix::identity(9)).unwrap();
        assert!(matches!(recover_t(&broken, &tol()), Err(Error::Reconstruction { step: 2 })));
        let t = torus_generators::<f64>(3, 2).unwrap();
        assert!(matches!(recover_t(&t, &tol()), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn gate_identities() {
        let b = b_elements::<f64>(2, 2).unwrap();
        for kind in [GateKind::G, GateKind::F] {
            let g = gate(&GateSpec::new(1, kind, 0.0), &b).unwrap();
            assert!(g.distance(&CMatrix::identity(4)) < 1e-14);
        }
        let tau = 0.37;
        let g = gate(&GateSpec::new(0, GateKind::G, tau), &b).unwrap();
        let c = Complex::new((2.0 * tau).cos(), 0.0);
        let s = Complex::new(0.0, (2.0 * tau).sin());
        let local = CMatrix::from_rows(vec![vec![c, s], vec![s, c]]).unwrap();
        let expected = kron_all(&[CMatrix::identity(2), local], 16).unwrap();
        assert!(g.distance(&expected) < 1e-12);
        for tau in [-3.0, 0.5, 9.0] {
            let f = gate(&GateSpec::new(0, GateKind::F, tau), &b).unwrap();
            assert!(f.distance(&CMatrix::identity(4)) < 1e-14);
        }
    }

    #[test]
    fn gates_unitary_on_grid() {
        let b = b_elements::<f64>(3, 2).unwrap();
        for k in 0..b.len() {
            for kind in [GateKind::G, GateKind::F] {
                for tau in [-10.0, -2.5, -0.1, 0.3, 1.7, 10.0] {
                    let g = gate(&GateSpec::new(k, kind, tau), &b).unwrap();
                    assert!(g.unitarity_residual() < 1e-10, "k={k} {kind} tau={tau}");
                }
            }
        }
    }

    #[test]
    fn gate_rejects_invalid_spec() {
        let b = b_elements::<f64>(2, 1).unwrap();
        assert!(matches!(gate(&GateSpec::new(2, GateKind::G, 0.1), &b), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(gate(&GateSpec::new(0, GateKind::G, 10.5), &b), Err(Error::InvalidParameter(_))));
        assert!(gate_with_limit(&GateSpec::new(0, GateKind::G, 10.5), &b, 20.0).is_ok());
    }

    #[test]
    fn central_difference_matches_seed() {
        let h = 1e-5;
        let b = b_elements::<f64>(3, 2).unwrap();
        let seeds = seeds(&b).unwrap();
        for (s, seed) in seeds.iter().enumerate() {
            let plus = gate(&GateSpec::from_seed(s, h), &b).unwrap();
            let minus = gate(&GateSpec::from_seed(s, -h), &b).unwrap();
            let fd = (&plus - &minus).scale_real(0.5 / h);
            let err = fd.distance(seed);
            assert!(err <= 1e-8 * seed.frobenius_norm().max(1.0), "seed {s}: {err}");
        }
    }

    #[test]
    fn seed_index_round_trip() {
        for s in 0..8 {
            assert_eq!(GateSpec::from_seed(s, 0.0).seed_index(), s);
        }
    }

    #[test]
    fn certify_small_registers() {
        let r = certify_universality::<f64>(3, 1, &tol()).unwrap();
        assert_eq!((r.algebra_dim, r.expected_dim, r.deficient), (8, 8, false));
        assert_eq!(r.basis_provenance.len(), 8);
        let r = certify_universality::<f64>(4, 1, &tol()).unwrap();
        assert_eq!((r.algebra_dim, r.deficient), (15, false));
    }

    #[test]
    fn certify_qubit_pair_records_measurement() {
        let r = certify_universality::<f64>(2, 2, &tol()).unwrap();
        assert_eq!(r.expected_dim, 15);
        assert_eq!(r.deficient, r.algebra_dim < 15);
        // B_0 = 1 ⊗ σ_x is Hermitian, so its F seed vanishes.
        assert!(r.degenerate_seeds.contains(&1));
    }

    #[test]
    fn certify_enforces_size_limit() {
        assert!(matches!(certify_universality::<f64>(2, 7, &tol()), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn spec_json_shape() {
        let spec = GateSpec::new(3, GateKind::F, -0.25);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"k":3,"kind":"F","tau":-0.25}"#);
        assert_eq!(serde_json::from_str::<GateSpec>(&text).unwrap(), spec);
    }
}
