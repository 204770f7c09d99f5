//! The possible-worlds model: the hiding monad, the storage monad built on
//! it, the interpretation of terms, and bounded equality of denotations.

pub mod equality;
pub mod hiding;
pub mod monad;
pub mod semantics;

pub use equality::{equal_bounded, equal_open, Bounds, Verdict, Witness};
pub use monad::{Kleisli, MonadComp};
pub use semantics::{apply_closure, denote_closed, denote_heap, denote_term, denote_value, Env};
