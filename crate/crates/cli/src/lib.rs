//! Problem files, the task pipeline and its reports.

pub mod pipeline;
pub mod problem;
pub mod summary;

pub use pipeline::{run, Outcome, RunReport};
pub use problem::{load, Problem, ProblemErrors, ProblemSpec, Task, Window};
