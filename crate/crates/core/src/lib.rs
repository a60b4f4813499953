//! Constraint-programming toolkit around the XCSP3-core kernel: an instance
//! model over finite integer domains, bit-exact XML serialization, generators
//! for a family of combinatorial benchmark problems, a reference checker for
//! the full constraint catalog, and a small complete CSP/COP solver.

pub mod checker;
pub mod data;
pub mod generators;
pub mod ir;
pub mod solver;
pub mod xml;
