//! Verifiable synthetic data for mixed-integer linear programming.
//!
//! The crate covers the whole loop from a symbolic MILP to a labelled,
//! natural-language training instance and back:
//!
//! * [`model`] holds the problem representation and its text format,
//! * [`solve`] is the exact simplex / branch-and-bound oracle,
//! * [`sampler`] and [`classes`] produce instances with verified optima,
//! * [`template`] turns symbolic descriptions into instantiated text,
//! * [`teacher`] talks to chat models (live or replayed) with a fixed
//!   prompt library,
//! * [`agent`] runs the decompose / formulate / code / vote workflow,
//! * [`trajectory`] assembles fine-tuning records from agent traces,
//! * [`eval`] scores predictions and audits labelled datasets,
//! * [`generate`] wires the generators into batch dataset production.

pub mod agent;
pub mod classes;
pub mod eval;
pub mod generate;
pub mod model;
pub mod sampler;
pub mod solve;
pub mod teacher;
pub mod template;
pub mod trajectory;

pub use model::{Assignment, Constraint, LinearExpr, Problem, Relation, Sense, Variable};
pub use solve::{solve_lp, solve_milp, SolveOutcome, SolverConfig, Status};
