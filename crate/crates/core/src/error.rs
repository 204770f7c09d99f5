use thiserror::Error;

use crate::syntax::Loc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate cell sort `{0}`")]
    DuplicateSort(String),
    #[error("unknown cell sort `{0}`")]
    UnknownSort(String),
    #[error("empty sort name")]
    EmptySortName,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch in `{subterm}`: expected {expected}, found {found}")]
    Mismatch { subterm: String, expected: String, found: String },
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("location {0} is not in the layout")]
    UnknownLocation(Loc),
    #[error("initialiser `{0}` is not a value")]
    NotAValue(String),
    #[error("unknown cell sort `{0}`")]
    UnknownSort(String),
    #[error("duplicate binder `{0}` in allocation")]
    DuplicateBinder(String),
    #[error("allocation must bind at least one cell")]
    EmptyAllocation,
    #[error("the type of `{term}` is not determined (best: {partial}); add an annotation")]
    Ambiguous { term: String, partial: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation is stuck at `{0}`")]
    Stuck(String),
    #[error("evaluation ran out of fuel")]
    FuelExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeapError {
    #[error("heap does not match the layout at {loc}: {reason}")]
    IllTypedHeap { loc: Loc, reason: String },
}

/// Failures inside the semantic model. On well-typed input none of these arise.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("location {0} is not in the store")]
    UnknownLocation(Loc),
    #[error("coend representatives have different public worlds")]
    BaseMismatch,
    #[error("semantic value has the wrong shape: {0}")]
    Shape(String),
    #[error("oracle search exceeded its budget of {0} states")]
    BudgetExceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no well-typed term found after {0} attempts")]
    GenerationExhausted(usize),
}

/// Top-level error for the CLI and FFI surfaces.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Heap(#[from] HeapError),
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("equation manifest: {0}")]
    Manifest(String),
    #[error("{0}")]
    Usage(String),
}
