//! Search engine: compiled propagators, a constraint-oriented propagation
//! queue, and depth-first search with two-way branching over a trailed
//! domain store.

use std::collections::VecDeque;
use std::time::Instant;

use crate::ir::{Assignment, Constraint, Instance, ObjectiveExpr, Operand, Sense};

use super::props::{execute, Cut, Prop, Rhs};
use super::state::DomStore;
use super::{Limits, SearchStats, SolverError};

/// Sum of materialized domain sizes the engine will accept.
const MATERIALIZE_LIMIT: u128 = 10_000_000;

pub(crate) struct Engine<'a> {
    pub store: DomStore,
    _inst: std::marker::PhantomData<&'a Instance>,
    props: Vec<Prop>,
    watchers: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    in_queue: Vec<bool>,
    touched: Vec<u32>,
    pub stats: SearchStats,
    cut: Option<Cut>,
    /// Objective quantity must stay at or below this bound.
    pub cut_bound: i64,
    cut_prop: Option<usize>,
}

pub(crate) enum Flow {
    /// Record the solution and keep searching.
    Continue,
    /// Record, tighten the objective cut, keep searching.
    Tighten(i64),
    /// Stop the search now.
    Stop,
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum DriveEnd {
    Exhausted,
    Stopped,
    LimitHit,
}

struct Frame {
    var: usize,
    val: i64,
    mark: usize,
    right: bool,
}

fn fold_rhs(scope: &mut Vec<usize>, coeffs: &mut Vec<i64>, rhs: &Operand) -> i64 {
    match rhs {
        Operand::Const(c) => *c,
        Operand::Var(v) => {
            scope.push(v.0);
            coeffs.push(-1);
            0
        }
    }
}

fn to_rhs(o: &Operand) -> Rhs {
    match o {
        Operand::Const(c) => Rhs::Const(*c),
        Operand::Var(v) => Rhs::Var(v.0),
    }
}

/// Compiles one constraint to a propagator, or names the unsupported kind.
fn compile(c: &Constraint) -> Result<Prop, SolverError> {
    Ok(match c {
        Constraint::Intension(e) => {
            let mut scope = Vec::new();
            e.collect_vars(&mut scope);
            let mut scope: Vec<usize> = scope.into_iter().map(|v| v.0).collect();
            scope.sort_unstable();
            scope.dedup();
            Prop::Intension {
                expr: e.clone(),
                scope,
            }
        }
        Constraint::Extension {
            scope,
            tuples,
            positive,
            ..
        } => {
            let scope: Vec<usize> = scope.iter().map(|v| v.0).collect();
            if *positive {
                Prop::TablePos {
                    scope,
                    tuples: tuples.clone(),
                }
            } else {
                Prop::TableNeg {
                    scope,
                    tuples: tuples.clone(),
                }
            }
        }
        Constraint::AllDifferent { scope, except } => Prop::AllDiff {
            scope: scope.iter().map(|v| v.0).collect(),
            except: except.clone(),
        },
        Constraint::AllEqual { scope } => Prop::AllEqual {
            scope: scope.iter().map(|v| v.0).collect(),
        },
        Constraint::Ordered { scope, lengths, op } => Prop::Ordered {
            scope: scope.iter().map(|v| v.0).collect(),
            lengths: lengths
                .clone()
                .unwrap_or_else(|| vec![0; scope.len().saturating_sub(1)]),
            op: *op,
        },
        Constraint::Lex { lists, op } => Prop::Lex {
            lists: lists
                .iter()
                .map(|l| l.iter().map(|v| v.0).collect())
                .collect(),
            op: *op,
        },
        Constraint::Sum {
            scope,
            coeffs,
            op,
            rhs,
        } => {
            let mut scope: Vec<usize> = scope.iter().map(|v| v.0).collect();
            let mut coeffs = coeffs.clone();
            let rhs = fold_rhs(&mut scope, &mut coeffs, rhs);
            Prop::Sum {
                terms: coeffs.into_iter().zip(scope).collect(),
                op: *op,
                rhs,
            }
        }
        Constraint::Count {
            scope,
            values,
            op,
            rhs,
        } => {
            let mut values = values.clone();
            values.sort_unstable();
            values.dedup();
            Prop::Count {
                scope: scope.iter().map(|v| v.0).collect(),
                values,
                op: *op,
                rhs: to_rhs(rhs),
            }
        }
        Constraint::NValues { scope, op, rhs } => Prop::NValues {
            scope: scope.iter().map(|v| v.0).collect(),
            op: *op,
            rhs: to_rhs(rhs),
        },
        Constraint::Cardinality {
            scope,
            values,
            occurs,
            closed,
        } => {
            let (lo, hi) = occurs.iter().map(|o| o.bounds()).unzip();
            Prop::Cardinality {
                scope: scope.iter().map(|v| v.0).collect(),
                values: values.clone(),
                lo,
                hi,
                closed: *closed,
            }
        }
        Constraint::Maximum { scope, op, rhs } => Prop::Extremum {
            is_max: true,
            scope: scope.iter().map(|v| v.0).collect(),
            op: *op,
            rhs: to_rhs(rhs),
        },
        Constraint::Minimum { scope, op, rhs } => Prop::Extremum {
            is_max: false,
            scope: scope.iter().map(|v| v.0).collect(),
            op: *op,
            rhs: to_rhs(rhs),
        },
        Constraint::Element { list, index, value } => Prop::Element {
            list: list.iter().map(|v| v.0).collect(),
            index: index.0,
            value: to_rhs(value),
        },
        other => {
            return Err(SolverError::UnsupportedConstraint(
                other.kind_name().to_string(),
            ))
        }
    })
}

/// Objective shape for branch-and-bound: the measured quantity is minimized,
/// maximization is folded in by negation.
pub(crate) fn build_cut(inst: &Instance) -> Option<Cut> {
    let obj = inst.objective.as_ref()?;
    let negate = obj.sense == Sense::Maximize;
    Some(match &obj.expr {
        ObjectiveExpr::Var(v) => {
            let c = if negate { -1 } else { 1 };
            Cut::Lin {
                terms: vec![(c, v.0)],
            }
        }
        ObjectiveExpr::Sum { scope, coeffs } => Cut::Lin {
            terms: coeffs
                .iter()
                .zip(scope)
                .map(|(c, v)| (if negate { -c } else { *c }, v.0))
                .collect(),
        },
        ObjectiveExpr::Maximum(s) => Cut::MaxOf {
            scope: s.iter().map(|v| v.0).collect(),
            negate,
        },
        ObjectiveExpr::Minimum(s) => Cut::MinOf {
            scope: s.iter().map(|v| v.0).collect(),
            negate,
        },
        ObjectiveExpr::Expr(e) => {
            let mut scope = Vec::new();
            e.collect_vars(&mut scope);
            let mut scope: Vec<usize> = scope.into_iter().map(|v| v.0).collect();
            scope.sort_unstable();
            scope.dedup();
            Cut::Expr {
                expr: e.clone(),
                scope,
                negate,
            }
        }
    })
}

impl<'a> Engine<'a> {
    /// Builds the engine; `with_cut` installs the objective strengthening
    /// propagator for optimization runs.
    pub fn new(inst: &'a Instance, with_cut: bool) -> Result<Self, SolverError> {
        let total: u128 = inst.variables.iter().map(|v| v.domain.size()).sum();
        if total > MATERIALIZE_LIMIT {
            return Err(SolverError::TooLarge(total));
        }
        let domains: Vec<Vec<i64>> = inst
            .variables
            .iter()
            .map(|v| v.domain.values().collect())
            .collect();
        let store = DomStore::new(domains);

        let mut props = Vec::with_capacity(inst.constraints.len());
        for c in &inst.constraints {
            props.push(compile(c)?);
        }
        let cut = if with_cut { build_cut(inst) } else { None };
        let mut cut_prop = None;
        if cut.is_some() {
            cut_prop = Some(props.len());
            props.push(Prop::ObjectiveCut);
        }

        let cut_scope = cut.as_ref().map(Cut::scope).unwrap_or_default();
        let mut watchers = vec![Vec::new(); inst.num_vars()];
        for (i, p) in props.iter().enumerate() {
            for v in p.watched(&cut_scope) {
                watchers[v].push(i);
            }
        }

        let in_queue = vec![false; props.len()];
        Ok(Engine {
            store,
            _inst: std::marker::PhantomData,
            props,
            watchers,
            queue: VecDeque::new(),
            in_queue,
            touched: Vec::new(),
            stats: SearchStats::default(),
            cut,
            cut_bound: i64::MAX / 4,
            cut_prop,
        })
    }

    fn schedule(&mut self, p: usize) {
        if !self.in_queue[p] {
            self.in_queue[p] = true;
            self.queue.push_back(p);
        }
    }

    fn schedule_var(&mut self, v: usize) {
        for i in 0..self.watchers[v].len() {
            let p = self.watchers[v][i];
            self.schedule(p);
        }
    }

    pub fn schedule_all(&mut self) {
        for p in 0..self.props.len() {
            self.schedule(p);
        }
    }

    fn clear_queue(&mut self) {
        self.queue.clear();
        self.in_queue.iter_mut().for_each(|b| *b = false);
    }

    /// Runs the queue to fixpoint. On conflict, reports the offending
    /// propagator's constraint index.
    pub fn flush(&mut self) -> Result<(), usize> {
        while let Some(p) = self.queue.pop_front() {
            self.in_queue[p] = false;
            self.stats.propagations += 1;
            let res = execute(
                &self.props[p],
                &mut self.store,
                self.cut.as_ref().map(|c| (c, self.cut_bound)),
            );
            self.store.drain_touched(&mut self.touched);
            while let Some(v) = self.touched.pop() {
                self.schedule_var(v as usize);
            }
            if res.is_err() {
                return Err(p);
            }
        }
        Ok(())
    }

    pub fn all_fixed(&self) -> bool {
        (0..self.store.num_vars()).all(|v| self.store.is_fixed(v))
    }

    pub fn witness(&self) -> Assignment {
        Assignment(
            (0..self.store.num_vars())
                .map(|v| self.store.value(v))
                .collect(),
        )
    }

    /// Branching choice: smallest current domain, ties to the smallest id,
    /// value its domain minimum. With `input_order` the first unfixed
    /// variable is taken instead, which makes enumeration lexicographic.
    /// Restart epochs rotate the value choice to vary trajectories.
    pub fn decide(&self, input_order: bool, epoch: u64) -> Option<(usize, i64)> {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.store.num_vars() {
            if self.store.is_fixed(v) {
                continue;
            }
            if input_order {
                return Some((v, self.store.min(v)));
            }
            let sz = self.store.size(v);
            if best.map_or(true, |(bs, _)| sz < bs) {
                best = Some((sz, v));
            }
        }
        best.map(|(_, v)| (v, self.pick_value(v, epoch)))
    }

    fn pick_value(&self, v: usize, epoch: u64) -> i64 {
        if epoch == 0 {
            return self.store.min(v);
        }
        let offset = (epoch % self.store.size(v) as u64) as usize;
        self.store
            .iter_active(v)
            .nth(offset)
            .expect("offset stays within the domain size")
    }

    /// Undoes decisions until an unexplored right branch is found and applies
    /// it. Returns false when the tree is exhausted.
    fn step_back(&mut self, frames: &mut Vec<Frame>) -> bool {
        self.clear_queue();
        loop {
            let Some(mut f) = frames.pop() else {
                return false;
            };
            self.store.undo_to(f.mark);
            if !f.right {
                f.right = true;
                self.stats.nodes += 1;
                let (var, val) = (f.var, f.val);
                frames.push(f);
                // the variable had at least two values when the frame was
                // created, so removing one cannot wipe the domain
                self.store
                    .remove_value(var, val)
                    .expect("right branch removed the last value");
                self.store.drain_touched(&mut self.touched);
                while let Some(v) = self.touched.pop() {
                    self.schedule_var(v as usize);
                }
                if let Some(cp) = self.cut_prop {
                    self.schedule(cp);
                }
                return true;
            }
        }
    }

    /// Depth-first search. `on_solution` is invoked on every full fixpoint
    /// assignment; its flow decision drives continuation. With `restarts`
    /// the search abandons the current tree on a geometrically growing
    /// failure schedule; completeness is preserved because the final epoch
    /// always runs to exhaustion.
    pub fn drive(
        &mut self,
        limits: &Limits,
        input_order: bool,
        restarts: bool,
        mut on_solution: impl FnMut(&mut SearchStats, Assignment, f64) -> Flow,
    ) -> DriveEnd {
        let start = Instant::now();
        let deadline = limits.cpu_seconds;
        let mut frames: Vec<Frame> = Vec::new();
        let mut epoch: u64 = 0;
        let mut epoch_failures: u64 = 0;
        let mut restart_cap: u64 = 128;
        let root_mark = self.store.mark();

        self.schedule_all();
        if let Err(_cid) = self.flush() {
            self.stats.failures += 1;
            return DriveEnd::Exhausted;
        }
        loop {
            let elapsed = start.elapsed().as_secs_f64();
            if elapsed > deadline {
                return DriveEnd::LimitHit;
            }
            if let Some(cap) = limits.node_cap {
                if self.stats.nodes >= cap {
                    return DriveEnd::LimitHit;
                }
            }
            if restarts && epoch_failures > restart_cap && !frames.is_empty() {
                self.store.undo_to(root_mark);
                frames.clear();
                self.clear_queue();
                self.schedule_all();
                epoch += 1;
                epoch_failures = 0;
                restart_cap = restart_cap.saturating_mul(2);
                if self.flush().is_err() {
                    return DriveEnd::Exhausted;
                }
            }
            if self.all_fixed() {
                let w = self.witness();
                match on_solution(&mut self.stats, w, elapsed) {
                    Flow::Stop => return DriveEnd::Stopped,
                    Flow::Tighten(b) => self.cut_bound = b,
                    Flow::Continue => {}
                }
                if !self.step_back(&mut frames) {
                    return DriveEnd::Exhausted;
                }
            } else {
                let (var, val) = self
                    .decide(input_order, epoch)
                    .expect("some variable is unfixed");
                self.stats.nodes += 1;
                frames.push(Frame {
                    var,
                    val,
                    mark: self.store.mark(),
                    right: false,
                });
                self.store
                    .assign(var, val)
                    .expect("assigned value was active");
                self.store.drain_touched(&mut self.touched);
                while let Some(v) = self.touched.pop() {
                    self.schedule_var(v as usize);
                }
            }
            while let Err(_cid) = self.flush() {
                self.stats.failures += 1;
                epoch_failures += 1;
                if !self.step_back(&mut frames) {
                    return DriveEnd::Exhausted;
                }
            }
        }
    }
}
