//! Test-only oracles for the constraint toolkit: a definition-level
//! constraint evaluator, a prefix-pruned exhaustive enumerator, per-problem
//! brute forces, and deterministic random generators. Nothing here shares
//! evaluation logic with the production checker or solver; agreement between
//! the two routes is what the test suites assert.

mod defs;
mod enumerate;
mod models;
mod random;
mod rng;

pub use defs::{definition_satisfied, eval_i128, objective_value};
pub use enumerate::{raw_optimum, raw_satisfiable, raw_solutions};
pub use models::{
    bin_packing_optimum, chain_reaction_satisfiable, coprime_optimum, heterosquare_exists,
    labs_optimum, langford_sequences, ramsey_partition_satisfiable,
};
pub use random::{
    random_assignment, random_constraint, random_expr, random_solver_instance, KIND_COUNT,
    KIND_NAMES,
};
pub use rng::Rng;
