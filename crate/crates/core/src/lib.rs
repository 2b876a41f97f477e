//! Rational noncommutative tori on qudit registers, constructive commutator
//! generation of their monomials, and a universal one-/two-qudit gate set
//! with a small product-formula compiler.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the CLI and most callers use.

pub mod error;
pub mod linalg;
pub mod scalar;
pub mod torus;
pub mod weyl_core;
pub mod closure;
pub mod gates;
pub mod synth;
pub mod cli;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use weyl_core::{CMatrix, Tolerance};

pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
pub type Tolerance64 = Tolerance<f64>;
pub type Tolerance32 = Tolerance<f32>;
pub type GeneratorSet64 = torus::GeneratorSet<f64>;
pub type RelationReport64 = torus::RelationReport<f64>;
pub type GenerationReport64 = closure::GenerationReport<f64>;
pub type LieSpan64 = closure::LieSpan<f64>;
pub type DecomposedTarget64 = synth::DecomposedTarget<f64>;
pub type Compiler64 = synth::Compiler<f64>;
