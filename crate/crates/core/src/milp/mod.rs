//! Binary assignment program over feasible (farm, PIP) candidates and its
//! exact branch-and-bound solver.
//!
//! One binary variable stands for one weapon committed to one PIP (weapons
//! within a farm are interchangeable, so no per-missile index is needed).
//! Constraints are per-target assignment caps, per-farm magazines, pairwise
//! launch-delay conflicts, one-weapon-per-PIP conflicts and the interference
//! conflict pairs. The objective minimizes the summed remaining log target
//! value plus its maximum over targets; the max term is linearized with an
//! epigraph variable in the exported model.

mod export;
mod model;
mod solve;

pub use export::export_lp;
pub use model::{
    build_model, evaluate_objective, verify_selection, AssignmentModel, Candidate, ConflictCounts,
    ModelError, Violation,
};
pub use solve::{brute_force_oracle, solve_exact, Budget, Solution, SolveStats};
