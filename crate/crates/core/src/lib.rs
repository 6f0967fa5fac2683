//! Exact algebra behind Kohn's multiplier-ideal algorithm on special domains
//! `{2 Re z3 + Σ|F_i(z1, z2)|² < 0}` in `C³`.
//!
//! The crate computes the intersection multiplicity `s = dim O/⟨F⟩` by two
//! independent routes, runs the multiplier-ideal iteration to termination
//! with an exact gain ledger, and evaluates the closed-form lower bound
//! `ε(s)` for comparison.

pub mod bounds;
pub mod gaussian;
pub mod germ;
pub mod jets;
pub mod kohn;
pub mod local;
pub mod parse;
pub mod pipeline;
pub mod poly_gcd;
pub mod problem;
pub mod projections;
pub mod upoly;

pub use gaussian::GaussianRational;
pub use germ::{jacobian_det, ExponentPair, Germ, Order, Var};
pub use local::{Colength, LocalIdeal};
pub use parse::{parse_germ, ParseError};
