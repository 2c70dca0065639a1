//! Exact symbolic and numerical verification tools for the weighted degenerate
//! Laplacian `L_a = Δ + ((2a-1)/x_{n+1}) ∂_{n+1}` on `R^{n+1}` and its powers.
//!
//! The symbolic layer ([`poly`], [`radial`], [`operator`], [`almansi`],
//! [`kelvin`]) works over exact rationals. The numerical layer
//! ([`quadrature`], parts of [`liouville`]) integrates against the weighted
//! measure `|x_{n+1}|^{2a-1} dx` and checks integral identities.

pub mod almansi;
pub mod cli;
pub mod error;
pub mod extrapolate;
pub mod gauss;
pub mod kelvin;
pub mod linalg;
pub mod liouville;
pub mod operator;
pub mod poly;
pub mod quadrature;
pub mod radial;
pub mod rational;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use operator::OperatorParams;
pub use poly::Poly;
pub use radial::RadialPowerExpr;
pub use rational::Rational;
