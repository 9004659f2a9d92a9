//! Exact and numeric analysis of complex polynomial fibers near infinity.
//!
//! Polynomials carry Gaussian-rational coefficients. The crate decides whether
//! a polynomial is a polynomial in a single linear form and, when it is not,
//! shows that generic fibers come arbitrarily close at infinity.

pub mod analysis;
pub mod gaussian;
pub mod infinity;
pub mod parser;
pub mod poly;
pub mod probe;
pub mod puiseux;
pub mod scalar;
pub mod univariate;

pub use gaussian::GaussianRational;
pub use parser::{parse, tokenize, ExprToken, ParseError, TokenKind};
pub use poly::{HomogeneousDecomposition, MultiPoly, PolyError};
pub use probe::{ComplexF, DistanceProbeReport};
pub use univariate::UniPoly;
