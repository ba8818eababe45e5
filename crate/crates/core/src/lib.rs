//! Learning Datalog programs by gradient descent over soft clause templates,
//! with large numbers of invented predicates.
//!
//! The pipeline runs [`logic`] → [`hypothesis`] → [`engine`] → [`train`] →
//! [`eval`]; [`workbench`] wraps it in tasks, sweeps and reports, and
//! [`oracle`] holds slow reference implementations for testing.

pub mod domain;
pub mod engine;
pub mod error;
pub mod eval;
pub mod hypothesis;
pub mod logic;
pub mod oracle;
pub mod train;
pub mod workbench;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/language.md")]
    mod language {}
    #[doc = include_str!("../../../book/src/hypothesis-space.md")]
    mod hypothesis_space {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/tasks.md")]
    mod tasks {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
}
