//! Critical-point analysis for parameterized algebraic systems `Au = λ f(u)`.
//!
//! `A` is a dense symmetric positive definite matrix and `f` acts
//! componentwise. Solutions are the critical points of the energy
//! `J(u) = uᵗAu/2 − λ Σ F_k(u_k)` with `F_k` the primitive of `f_k`.
//! The crate computes the parameter thresholds that guarantee multiple
//! solutions, locates those solutions (global minimizer, mountain-pass
//! saddle, remaining critical points) and assembles the difference-equation
//! problems that lead to such systems.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line front end live in the `varalg` crate.

#![no_std]
// `!(x < y)` is deliberate throughout: NaN must fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod exprfn;
pub mod linalg;
pub mod nonlin;
pub mod oracle;
pub mod problems;
pub mod quad;
pub mod search;
pub mod solver;
pub mod thresholds;
pub mod vecops;

pub use linalg::{LinalgError, SignConditionVerdict, SpdMatrix};
pub use nonlin::{Nonlinearity, ScalarFunction};
pub use problems::{Net, Origin, Problem, ProblemError};
pub use solver::{Classification, CriticalPoint, EnergyModel};
pub use thresholds::{RhoMaxResult, ThresholdReport};
