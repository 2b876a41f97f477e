//! Reference implementations used as oracles by the integration tests.
//!
//! Everything here is written from the defining formulas with plain nested
//! vectors, sharing no numeric code with the library.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use torusgates::closure::BracketWord;
use torusgates::CMatrix64;

#[derive(Clone, Debug, PartialEq)]
pub struct Dense(pub Vec<Vec<C>>);

impl Dense {
    pub fn zeros(d: usize) -> Self {
        Dense(vec![vec![C::new(0.0, 0.0); d]; d])
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.0[i][i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn from_lib(m: &CMatrix64) -> Self {
        let d = m.dim();
        Dense((0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect()).collect())
    }

    pub fn to_lib(&self) -> CMatrix64 {
        CMatrix64::from_rows(self.0.clone()).unwrap()
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let d = self.dim();
        let mut r = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.0[i][k];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    r.0[i][j] += a * o.0[k][j];
                }
            }
        }
        r
    }

    pub fn add(&self, o: &Dense) -> Dense {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Dense) -> Dense {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Dense, f: impl Fn(C, C) -> C) -> Dense {
        Dense(self.0.iter().zip(&o.0).map(|(r, s)| r.iter().zip(s).map(|(&a, &b)| f(a, b)).collect()).collect())
    }

    pub fn scale(&self, c: C) -> Dense {
        Dense(self.0.iter().map(|r| r.iter().map(|&a| a * c).collect()).collect())
    }

    pub fn dagger(&self) -> Dense {
        let d = self.dim();
        Dense((0..d).map(|i| (0..d).map(|j| self.0[j][i].conj()).collect()).collect())
    }

    pub fn trace(&self) -> C {
        (0..self.dim()).map(|i| self.0[i][i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(self† o)`.
    pub fn inner(&self, o: &Dense) -> C {
        self.0.iter().flatten().zip(o.0.iter().flatten()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn dist(&self, o: &Dense) -> f64 {
        self.sub(o).norm()
    }

    pub fn pow(&self, k: usize) -> Dense {
        (0..k).fold(Self::identity(self.dim()), |acc, _| acc.mul(self))
    }

    pub fn comm(&self, o: &Dense) -> Dense {
        self.mul(o).sub(&o.mul(self))
    }

    /// Taylor series with scaling and squaring.
    pub fn exp(&self) -> Dense {
        let norm = self.norm();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let a = self.scale(C::new(0.5f64.powi(squarings as i32), 0.0));
        let mut term = Self::identity(self.dim());
        let mut sum = term.clone();
        for k in 1..30 {
            term = term.mul(&a).scale(C::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        (0..squarings).fold(sum, |acc, _| acc.mul(&acc))
    }
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (p, q) = (a.dim(), b.dim());
    let mut r = Dense::zeros(p * q);
    for i in 0..p {
        for j in 0..p {
            for k in 0..q {
                for l in 0..q {
                    r.0[i * q + k][j * q + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    r
}

pub fn kron_all(fs: &[Dense]) -> Dense {
    fs.iter().skip(1).fold(fs[0].clone(), |acc, f| kron(&acc, f))
}

pub fn zeta(l: usize) -> C {
    C::from_polar(1.0, 2.0 * std::f64::consts::PI / l as f64)
}

/// `U|j⟩ = |j − 1⟩`, i.e. `U_{kj} = δ_{k+1 mod l, j}`.
pub fn shift(l: usize) -> Dense {
    let mut m = Dense::zeros(l);
    for k in 0..l {
        m.0[k][(k + 1) % l] = C::new(1.0, 0.0);
    }
    m
}

pub fn clock(l: usize) -> Dense {
    let mut m = Dense::zeros(l);
    for k in 0..l {
        m.0[k][k] = zeta(l).powu(k as u32);
    }
    m
}

pub fn weyl(l: usize) -> Dense {
    let phase = C::from_polar(1.0, std::f64::consts::PI * (l as f64 - 1.0) / l as f64);
    shift(l).mul(&clock(l)).scale(phase)
}

/// `T_{2k} = 1^{⊗(n−k−1)} ⊗ U ⊗ V^{⊗k}`, `T_{2k+1}` with `W` in place of `U`.
pub fn torus(l: usize, n: usize) -> Vec<Dense> {
    let mut out = Vec::new();
    for k in 0..n {
        for head in [shift(l), weyl(l)] {
            let mut fs = vec![Dense::identity(l); n - k - 1];
            fs.push(head);
            fs.extend(std::iter::repeat_n(clock(l), k));
            out.push(kron_all(&fs));
        }
    }
    out
}

pub fn b_elements(l: usize, n: usize) -> Vec<Dense> {
    let t = torus(l, n);
    let mut out = vec![t[0].clone()];
    for j in 1..t.len() {
        out.push(t[j].mul(&t[j - 1].dagger()));
    }
    out
}

/// `i(B_k + B_k†)` and `B_k − B_k†` for every `k`, interleaved.
pub fn gate_seeds(l: usize, n: usize) -> Vec<Dense> {
    b_elements(l, n)
        .iter()
        .flat_map(|b| [b.add(&b.dagger()).scale(C::new(0.0, 1.0)), b.sub(&b.dagger())])
        .collect()
}

pub fn monomial(t: &[Dense], e: &[usize]) -> Dense {
    t.iter().zip(e).fold(Dense::identity(t[0].dim()), |acc, (m, &p)| acc.mul(&m.pow(p)))
}

pub fn evaluate(word: &BracketWord, leaves: &[Dense]) -> Dense {
    match word {
        BracketWord::Leaf(k) => leaves[*k].clone(),
        BracketWord::Ad { base, pow, arg } => {
            (0..*pow).fold(evaluate(arg, leaves), |acc, _| leaves[*base].comm(&acc))
        }
        BracketWord::Bracket(a, b) => evaluate(a, leaves).comm(&evaluate(b, leaves)),
    }
}

/// Projection coefficient `α = ⟨B, A⟩ / ⟨B, B⟩` and relative residual `‖A − αB‖ / ‖A‖`.
pub fn projection(a: &Dense, b: &Dense) -> (C, f64) {
    let alpha = b.inner(a) / b.inner(b);
    let na = a.norm();
    let resid = if na > 0.0 { a.sub(&b.scale(alpha)).norm() / na } else { 0.0 };
    (alpha, resid)
}

pub fn phase_distance(a: &Dense, b: &Dense) -> f64 {
    (2.0 * a.dim() as f64 - 2.0 * a.inner(b).norm()).max(0.0).sqrt()
}

/// Real coordinates `(Re, Im)` of every entry.
fn flatten(m: &Dense) -> Vec<f64> {
    m.0.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
}

/// Dimension of the smallest commutator-closed span of `seeds`, growing
/// left-normed brackets round by round. Over ℂ, each matrix contributes
/// both `M` and `iM` to a real Gram–Schmidt.
pub fn span_growth_dim(seeds: &[Dense], complex: bool, rank_eps: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let insert = |m: &Dense, basis: &mut Vec<Vec<f64>>| -> bool {
        let mut added = false;
        let variants = if complex { vec![m.clone(), m.scale(C::new(0.0, 1.0))] } else { vec![m.clone()] };
        for v in variants {
            let mut x = flatten(&v);
            let n0 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n0 < 1e-12 {
                continue;
            }
            for _ in 0..2 {
                for q in basis.iter() {
                    let p: f64 = q.iter().zip(&x).map(|(a, b)| a * b).sum();
                    x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= p * qi);
                }
            }
            let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > rank_eps * n0 {
                basis.push(x.iter().map(|a| a / n).collect());
                added = true;
            }
        }
        added
    };
    let mut frontier = Vec::new();
    for s in seeds {
        if insert(s, &mut basis) {
            frontier.push(s.clone());
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for s in seeds {
                let b = s.comm(f);
                if b.norm() <= 1e-10 * (s.norm() * f.norm()).max(1.0) {
                    continue;
                }
                if insert(&b, &mut basis) {
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    if complex {
        basis.len() / 2
    } else {
        basis.len()
    }
}
