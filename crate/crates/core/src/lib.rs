//! Exact computations around the F-pure threshold of determinantal ideals.
//!
//! * [`formula`]: the closed-form threshold `min_k (m−k)(n−k)/(t−k)` and the
//!   minimizing `k` with its companion `u`.
//! * [`polyfp`]: sparse polynomials over `F_p` in the entries of a generic
//!   matrix, lex term order, minors and initial forms.
//! * [`witness`]: the products of minors `Δ_k`, `Δ_k′`, `Δ` and checkable
//!   JSON certificates for them.
//! * [`frobenius`]: exact `ν_{I_t}(p^e)` by search, and convergence tables.
//! * [`cache`]: JSON-lines persistence of `ν` results.

pub mod cache;
pub mod error;
pub mod formula;
pub mod frobenius;
pub mod polyfp;
pub mod witness;

pub use error::{Error, Result};
pub use formula::{fpt_closed_form, minimizing_k_and_u, FptResult, MatrixShape, Rational};
