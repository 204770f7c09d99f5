//! A toolkit for a call-by-value lambda calculus with full ground references:
//! parsing, typing, big-step evaluation, and a finite executable model of its
//! possible-worlds semantics with checkers for the model's laws.

pub mod error;
pub mod signature;
pub mod syntax;
pub mod typing;
pub mod opsem;
pub mod worlds;
pub mod initialisations;
pub mod denote;
pub mod harness;

pub use error::Error;
pub use signature::{GroundType, Signature, Sort};
pub use syntax::{Loc, Term, Type};
pub use worlds::{Injection, SemValue, World};
