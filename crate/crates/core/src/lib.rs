//! Corrected midpoint quadrature of arbitrary order, its exact kernel
//! remainder, and three a-posteriori error bounds for integrands whose
//! derivatives are convex in absolute value.
//!
//! The pieces:
//!
//! - [`expr`] parses functions of `x` and evaluates derivative jets.
//! - [`kernel`] evaluates the piecewise polynomial remainder kernel.
//! - [`quadrature`] computes the rule, the remainder and a reference integral.
//! - [`bounds`] evaluates the convex, Hölder and power-mean error bounds.
//! - [`convexity`] certifies the convexity hypotheses on a sample grid.
//! - [`harness`] runs corpora of checks and writes reports.

pub mod bounds;
pub mod convexity;
pub mod expr;
pub mod harness;
pub mod kernel;
pub mod quadrature;

pub use expr::{eval_jet, parse, Expression, Jet};
pub use kernel::RuleOrder;
pub use quadrature::Interval;
