//! Exact invariant calculus for smooth closed 4-manifolds.
//!
//! Expressions built from named primitives, branched covers, free quotients and surgeries are
//! evaluated to exact invariants and structure flags, checked against Einstein-metric obstructions,
//! and rewritten to canonical connected sums.

pub mod arith;
pub mod config;
pub mod covers;
pub mod dsl;
pub mod error;
pub mod eval;
pub mod expr;
pub mod flags;
pub mod geography;
pub mod invariants;
pub mod normal_form;
pub mod obstruction;
pub mod registry;
pub mod reproduce;
pub mod surgery;

pub use error::{Error, Result};
pub use eval::{eval, evaluate, Evaluated};
pub use expr::ManifoldExpr;
pub use invariants::InvariantRecord;
