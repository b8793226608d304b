//! Weighted Bergman spaces, balanced metrics and covariant-symbol star
//! products, checked numerically.
//!
//! The crate computes balanced-metric thresholds from root multiplicities,
//! builds weighted Bergman spaces on the disk, the ball and the polydisk,
//! and checks the ingredients of Berezin's construction numerically:
//! constancy of Rawnsley's ε-function, the bound `e^{-D} ≤ 1` on Calabi's
//! diastasis, the coherent-states embedding into projective space, and the
//! correspondence principle for the covariant-symbol star product.
//!
//! Analytic code is generic over [`Real`] (`f32`/`f64`); threshold arithmetic
//! is generic over [`Field`] and runs exactly on [`Rational64`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bergman;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod numerics;
pub mod projective;
pub mod rootdata;
pub mod scalar;
pub mod starprod;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use num_rational::Rational64;
pub use scalar::{Field, Real};

pub type Complex64 = Complex<f64>;

pub type DomainModel64 = domain::DomainModel<f64>;
pub type Automorphism64 = domain::Automorphism<f64>;
pub type QuadratureRule64 = numerics::QuadratureRule<f64>;
pub type BergmanBasis64 = bergman::BergmanBasis<f64>;
pub type ProjectivePoint64 = projective::ProjectivePoint<f64>;
pub type QuantContext64 = starprod::QuantContext<f64>;
pub type Operator64 = linalg::CMatrix<f64>;

/// Root data with exact rational multiplicities and coefficients.
pub type RootData = rootdata::RootSystemData<Rational64>;
pub type RootDataF64 = rootdata::RootSystemData<f64>;
pub type SymmetricParams = rootdata::SymmetricDomainParams<Rational64>;
