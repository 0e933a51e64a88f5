//! Proof kernel, evaluator and finite-model oracle for a partial type theory
//! in which constructions can be acquired as objects and executed again.
#![no_std]

extern crate alloc;

pub mod kernel;
pub mod oracle;
pub mod semantics;
pub mod signature;
pub mod substitution;
pub mod syntax;
pub mod types;
