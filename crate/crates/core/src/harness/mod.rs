//! Property suites, program generation and reporting.

pub mod equations;
pub mod gen;
pub mod laws;
pub mod obs;
pub mod report;
pub mod soundness;

pub use gen::{gen_well_typed, GenConfig, Generator};
pub use report::{Failure, TestReport};
