//! Complete backtracking search with constraint propagation for CSP, plus
//! branch-and-bound for COP over the same propagator subset, and an
//! exhaustive enumerator usable as a desk-scale oracle.
//!
//! Search is deterministic: smallest-domain variable selection with ties
//! broken by declaration order, smallest value first, two-way branching
//! (assign versus remove). Node-capped runs are bit-reproducible.

mod engine;
mod props;
mod state;

use thiserror::Error;

use crate::checker;
use crate::ir::{Assignment, Instance, VarId};

use engine::{DriveEnd, Engine, Flow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("unsupported constraint kind for search: {0}")]
    UnsupportedConstraint(String),
    #[error("instance has an objective; use the optimizing entry point")]
    HasObjective,
    #[error("instance has no objective")]
    MissingObjective,
    #[error("search space too large ({0} candidate values) without a cap")]
    TooLarge(u128),
    #[error("instance is not well formed: {0}")]
    InvalidInstance(String),
}

/// Resource limits for one search.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub cpu_seconds: f64,
    pub node_cap: Option<u64>,
    pub solution_cap: Option<u64>,
}

impl Limits {
    pub fn cpu(seconds: f64) -> Limits {
        Limits {
            cpu_seconds: seconds,
            node_cap: None,
            solution_cap: None,
        }
    }

    pub fn nodes(cap: u64) -> Limits {
        Limits {
            cpu_seconds: f64::INFINITY,
            node_cap: Some(cap),
            solution_cap: None,
        }
    }

    pub fn unlimited() -> Limits {
        Limits {
            cpu_seconds: f64::INFINITY,
            node_cap: None,
            solution_cap: None,
        }
    }

    pub fn with_nodes(mut self, cap: u64) -> Limits {
        self.node_cap = Some(cap);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Optimum,
    Bound,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub failures: u64,
    pub propagations: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub witness: Option<Assignment>,
    pub bound: Option<i64>,
    /// Every incumbent found during optimization: (elapsed seconds, value).
    pub trace: Vec<(f64, i64)>,
    pub stats: SearchStats,
}

fn validated(inst: &Instance) -> Result<&Instance, SolverError> {
    let diags = crate::ir::validate_instance(inst);
    match diags.first() {
        None => Ok(inst),
        Some(d) => Err(SolverError::InvalidInstance(d.to_string())),
    }
}

/// Search-policy switches beyond resource limits. Geometric restarts are
/// off by default; enabling them keeps completeness (the restart budget
/// grows until one epoch exhausts the tree) and stays deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    pub geometric_restarts: bool,
}

/// Finds one solution or proves there is none.
pub fn solve_csp(inst: &Instance, limits: &Limits) -> Result<SolveResult, SolverError> {
    solve_csp_with(inst, limits, SearchOptions::default())
}

pub fn solve_csp_with(
    inst: &Instance,
    limits: &Limits,
    opts: SearchOptions,
) -> Result<SolveResult, SolverError> {
    if inst.objective.is_some() {
        return Err(SolverError::HasObjective);
    }
    let inst = validated(inst)?;
    let mut eng = Engine::new(inst, false)?;
    let mut found: Option<Assignment> = None;
    let end = eng.drive(limits, false, opts.geometric_restarts, |_, w, _| {
        found = Some(w);
        Flow::Stop
    });
    let status = match (end, &found) {
        (DriveEnd::Stopped, Some(_)) => Status::Sat,
        (DriveEnd::Exhausted, _) => Status::Unsat,
        _ => Status::Unknown,
    };
    if let Some(w) = &found {
        debug_assert!(checker::check_assignment(inst, w)
            .map(|r| r.satisfied)
            .unwrap_or(false));
    }
    Ok(SolveResult {
        status,
        witness: found,
        bound: None,
        trace: Vec::new(),
        stats: eng.stats,
    })
}

/// Branch-and-bound optimization. Each incumbent strengthens the objective
/// by one, so the trace improves strictly; exhaustion proves optimality.
pub fn solve_cop(inst: &Instance, limits: &Limits) -> Result<SolveResult, SolverError> {
    solve_cop_with(inst, limits, SearchOptions::default())
}

pub fn solve_cop_with(
    inst: &Instance,
    limits: &Limits,
    opts: SearchOptions,
) -> Result<SolveResult, SolverError> {
    let obj = inst
        .objective
        .as_ref()
        .ok_or(SolverError::MissingObjective)?;
    let negate = obj.sense == crate::ir::Sense::Maximize;
    let inst = validated(inst)?;
    let mut eng = Engine::new(inst, true)?;
    let mut best: Option<(Assignment, i64)> = None;
    let mut trace: Vec<(f64, i64)> = Vec::new();
    let end = eng.drive(limits, false, opts.geometric_restarts, |_, w, elapsed| {
        let value = checker::objective_value(inst, &w)
            .expect("objective must evaluate on a full assignment");
        let measured = if negate { -value } else { value };
        best = Some((w, value));
        trace.push((elapsed, value));
        Flow::Tighten(measured - 1)
    });
    let (status, witness, bound) = match (end, best) {
        (DriveEnd::Exhausted, Some((w, v))) => (Status::Optimum, Some(w), Some(v)),
        (DriveEnd::Exhausted, None) => (Status::Unsat, None, None),
        (_, Some((w, v))) => (Status::Bound, Some(w), Some(v)),
        (_, None) => (Status::Unknown, None, None),
    };
    if let Some(w) = &witness {
        debug_assert!(checker::check_assignment(inst, w)
            .map(|r| r.satisfied)
            .unwrap_or(false));
    }
    Ok(SolveResult {
        status,
        witness,
        bound,
        trace,
        stats: eng.stats,
    })
}

/// All solutions in lexicographic variable/value order, up to `cap`.
/// The objective, if any, is ignored.
pub fn enumerate_solutions(
    inst: &Instance,
    cap: Option<u64>,
) -> Result<Vec<Assignment>, SolverError> {
    let inst = validated(inst)?;
    let space: u128 = inst
        .variables
        .iter()
        .fold(1u128, |acc, v| acc.saturating_mul(v.domain.size()));
    if cap.is_none() && space > 10_000_000 {
        return Err(SolverError::TooLarge(space));
    }
    let mut eng = Engine::new(inst, false)?;
    let mut out: Vec<Assignment> = Vec::new();
    eng.drive(&Limits::unlimited(), true, false, |_, w, _| {
        out.push(w);
        match cap {
            Some(c) if out.len() as u64 >= c => Flow::Stop,
            _ => Flow::Continue,
        }
    });
    Ok(out)
}

/// Outcome of running the propagation queue to fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    /// Index of the constraint whose propagator found the conflict.
    Conflict(usize),
}

/// Propagation-level handle exposed for testing and diagnostics: domains,
/// fixpoint computation and the branching heuristic, without search.
pub struct SearchState<'a> {
    eng: Engine<'a>,
}

impl<'a> SearchState<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self, SolverError> {
        let inst = validated(inst)?;
        Ok(SearchState {
            eng: Engine::new(inst, false)?,
        })
    }

    /// Runs all propagators to fixpoint.
    pub fn propagate(&mut self) -> Propagation {
        self.eng.schedule_all();
        match self.eng.flush() {
            Ok(()) => Propagation::Fixpoint,
            Err(cid) => Propagation::Conflict(cid),
        }
    }

    pub fn domain_values(&self, v: VarId) -> Vec<i64> {
        self.eng.store.active_values(v.0)
    }

    pub fn stats(&self) -> SearchStats {
        self.eng.stats
    }

    /// Branching heuristic: smallest domain, ties to the smallest id, value
    /// is the domain minimum. None when every variable is fixed.
    pub fn decide(&self) -> Option<(VarId, i64)> {
        self.eng.decide(false, 0).map(|(v, val)| (VarId(v), val))
    }
}

/// Renders the competition output protocol: `o` lines for every incumbent,
/// one `s` status line, and a `v` line with the witness values in
/// declaration order.
pub fn render_output(result: &SolveResult) -> String {
    let mut out = String::new();
    for (_, b) in &result.trace {
        out.push_str(&format!("o {b}\n"));
    }
    out.push_str(match result.status {
        Status::Sat | Status::Bound => "s SATISFIABLE\n",
        Status::Unsat => "s UNSATISFIABLE\n",
        Status::Optimum => "s OPTIMUM FOUND\n",
        Status::Unknown => "s UNKNOWN\n",
    });
    if let Some(w) = &result.witness {
        let vals: Vec<String> = w.0.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("v {}\n", vals.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{CmpOp, Constraint, Domain, Expr, InstanceBuilder, Operand};

    fn three_vars() -> (Instance, Vec<VarId>) {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::from_values(&[1, 2]).unwrap());
        let y = b.add_var("y", Domain::from_values(&[1, 2]).unwrap());
        let z = b.add_var("z", Domain::from_values(&[1, 2, 3]).unwrap());
        let ids = vec![x, y, z];
        b.add_constraint(Constraint::AllDifferent {
            scope: ids.clone(),
            except: vec![],
        });
        (b.build(), ids)
    }

    #[test]
    fn alldiff_hall_set_prunes() {
        let (inst, ids) = three_vars();
        let mut st = SearchState::new(&inst).unwrap();
        assert_eq!(st.propagate(), Propagation::Fixpoint);
        assert_eq!(st.domain_values(ids[2]), vec![3]);
    }

    #[test]
    fn sum_bounds_prune() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 3).unwrap());
        let y = b.add_var("y", Domain::range(0, 20).unwrap());
        b.add_constraint(Constraint::Sum {
            scope: vec![x, y],
            coeffs: vec![1, 1],
            op: CmpOp::Eq,
            rhs: Operand::Const(10),
        });
        let inst = b.build();
        let mut st = SearchState::new(&inst).unwrap();
        assert_eq!(st.propagate(), Propagation::Fixpoint);
        assert_eq!(st.domain_values(y), vec![7, 8, 9, 10]);
    }

    #[test]
    fn decide_prefers_small_domains_then_small_ids() {
        let mut b = InstanceBuilder::new("t");
        let _a = b.add_var("a", Domain::range(1, 3).unwrap());
        let c = b.add_var("b", Domain::range(1, 2).unwrap());
        let _d = b.add_var("c", Domain::range(1, 2).unwrap());
        let inst = b.build();
        let st = SearchState::new(&inst).unwrap();
        assert_eq!(st.decide(), Some((c, 1)));
    }

    #[test]
    fn zero_constraint_instance_is_sat() {
        let mut b = InstanceBuilder::new("t");
        b.add_var("x", Domain::range(0, 5).unwrap());
        let inst = b.build();
        let r = solve_csp(&inst, &Limits::unlimited()).unwrap();
        assert_eq!(r.status, Status::Sat);
    }

    #[test]
    fn enumerate_unconstrained_pair() {
        let mut b = InstanceBuilder::new("t");
        b.add_var("x", Domain::range(0, 1).unwrap());
        let inst = b.build();
        let sols = enumerate_solutions(&inst, None).unwrap();
        assert_eq!(sols, vec![Assignment(vec![0]), Assignment(vec![1])]);
    }

    #[test]
    fn enumerate_alldiff_permutations() {
        let inst = {
            let mut b = InstanceBuilder::new("t");
            let ids: Vec<VarId> = (0..3)
                .map(|i| b.add_var(format!("x[{i}]"), Domain::range(1, 3).unwrap()))
                .collect();
            b.add_constraint(Constraint::AllDifferent {
                scope: ids,
                except: vec![],
            });
            b.build()
        };
        let sols = enumerate_solutions(&inst, None).unwrap();
        assert_eq!(sols.len(), 6);
        // lexicographic order of the full assignment vector
        let mut sorted = sols.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(sols, sorted);
    }

    #[test]
    fn unsat_when_pigeonholed() {
        let mut b = InstanceBuilder::new("t");
        let ids: Vec<VarId> = (0..3)
            .map(|i| b.add_var(format!("x[{i}]"), Domain::range(1, 2).unwrap()))
            .collect();
        b.add_constraint(Constraint::AllDifferent {
            scope: ids,
            except: vec![],
        });
        let inst = b.build();
        let r = solve_csp(&inst, &Limits::unlimited()).unwrap();
        assert_eq!(r.status, Status::Unsat);
    }

    #[test]
    fn cop_requires_objective_and_csp_rejects_one() {
        let mut b = InstanceBuilder::new("t");
        b.add_var("x", Domain::range(0, 5).unwrap());
        let inst = b.build();
        assert!(matches!(
            solve_cop(&inst, &Limits::unlimited()),
            Err(SolverError::MissingObjective)
        ));

        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 5).unwrap());
        b.set_objective(crate::ir::Sense::Minimize, crate::ir::ObjectiveExpr::Var(x));
        let cop = b.build();
        assert!(matches!(
            solve_csp(&cop, &Limits::unlimited()),
            Err(SolverError::HasObjective)
        ));
    }

    #[test]
    fn minimize_a_variable() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(3, 9).unwrap());
        let y = b.add_var("y", Domain::range(0, 9).unwrap());
        b.add_constraint(Constraint::Intension(Expr::ge(
            Expr::var(y),
            Expr::add(vec![Expr::var(x), Expr::cst(2)]),
        )));
        b.set_objective(crate::ir::Sense::Minimize, crate::ir::ObjectiveExpr::Var(y));
        let inst = b.build();
        let r = solve_cop(&inst, &Limits::unlimited()).unwrap();
        assert_eq!(r.status, Status::Optimum);
        assert_eq!(r.bound, Some(5));
        for w in r.trace.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn maximize_via_negation() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(-4, 7).unwrap());
        b.set_objective(crate::ir::Sense::Maximize, crate::ir::ObjectiveExpr::Var(x));
        let inst = b.build();
        let r = solve_cop(&inst, &Limits::unlimited()).unwrap();
        assert_eq!(r.status, Status::Optimum);
        assert_eq!(r.bound, Some(7));
    }

    #[test]
    fn node_capped_runs_are_reproducible() {
        let (inst, _) = three_vars();
        let limits = Limits::unlimited().with_nodes(2);
        let a = solve_csp(&inst, &limits).unwrap();
        let b = solve_csp(&inst, &limits).unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.status, b.status);
    }

    #[test]
    fn unsupported_kinds_fail_at_registration() {
        let mut b = InstanceBuilder::new("t");
        let ids: Vec<VarId> = (0..2)
            .map(|i| b.add_var(format!("x[{i}]"), Domain::range(0, 1).unwrap()))
            .collect();
        b.add_constraint(Constraint::Circuit { scope: ids });
        let inst = b.build();
        assert!(matches!(
            solve_csp(&inst, &Limits::unlimited()),
            Err(SolverError::UnsupportedConstraint(k)) if k == "circuit"
        ));
    }

    #[test]
    fn protocol_lines() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(2, 4).unwrap());
        b.set_objective(crate::ir::Sense::Minimize, crate::ir::ObjectiveExpr::Var(x));
        let inst = b.build();
        let r = solve_cop(&inst, &Limits::unlimited()).unwrap();
        let text = render_output(&r);
        assert!(text.contains("s OPTIMUM FOUND\n"));
        assert!(text.contains("o 2\n"));
        assert!(text.ends_with("v 2\n"));
    }
}
