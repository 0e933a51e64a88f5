//! File formats, the shipped corpus and the command-line front end for the
//! `ttstar-core` kernel.

pub mod corpus;
pub mod decl;
pub mod error;
pub mod gen;
pub mod modelfile;
pub mod script;
pub mod show;

pub use error::{Error, Result};
