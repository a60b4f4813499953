//! Reference semantics: decides satisfaction of every catalog constraint
//! under a total assignment, evaluates objectives, and produces per-constraint
//! verdict reports. This is the ground truth the solver and the scoring
//! engine are validated against.

use std::collections::HashMap;

use thiserror::Error;

use crate::ir::{
    eval_expr, Assignment, CmpOp, Constraint, Instance, Objective, ObjectiveExpr, Operand, OrderOp,
    TupleEntry, VarId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("assignment covers {got} variables, instance has {expected}")]
    ScopeError { got: usize, expected: usize },
    #[error("instance has no objective")]
    MissingObjective,
    #[error("objective evaluation failed: {0}")]
    Eval(#[from] crate::ir::EvalError),
    #[error("malformed solution: {0}")]
    BadSolution(String),
}

/// Verdict for one constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub index: usize,
    pub satisfied: bool,
    /// Short description of the violation, when not satisfied.
    pub witness: Option<String>,
}

/// Outcome of checking a full assignment against an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    /// Values outside their variable's domain, reported before constraints.
    pub domain_violations: Vec<(VarId, i64)>,
    pub verdicts: Vec<Verdict>,
    pub satisfied: bool,
    pub objective: Option<i64>,
}

fn operand_value(o: &Operand, a: &Assignment) -> i64 {
    match o {
        Operand::Const(c) => *c,
        Operand::Var(v) => a.get(*v),
    }
}

fn tuple_matches(tuple: &[TupleEntry], values: &[i64]) -> bool {
    tuple.len() == values.len()
        && tuple.iter().zip(values).all(|(e, v)| match e {
            TupleEntry::Val(t) => t == v,
            TupleEntry::Star => true,
        })
}

fn lex_holds(a: &[i64], b: &[i64], op: OrderOp) -> bool {
    // compare a against b under the operator, vectors of equal length
    let (x, y) = if op.descending() { (b, a) } else { (a, b) };
    for (p, q) in x.iter().zip(y) {
        if p < q {
            return true;
        }
        if p > q {
            return false;
        }
    }
    !op.strict()
}

/// Exact truth value of one constraint under a total assignment.
pub fn constraint_satisfied(c: &Constraint, a: &Assignment) -> Result<bool, CheckError> {
    let need = c
        .referenced_vars()
        .iter()
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0);
    if a.len() < need {
        return Err(CheckError::ScopeError {
            got: a.len(),
            expected: need,
        });
    }
    Ok(satisfied_unchecked(c, a))
}

fn satisfied_unchecked(c: &Constraint, a: &Assignment) -> bool {
    match c {
        // an expression that fails to evaluate (division by zero, overflow)
        // cannot be satisfied
        Constraint::Intension(e) => matches!(eval_expr(e, a), Ok(v) if v != 0),
        Constraint::Extension {
            scope,
            tuples,
            positive,
            ..
        } => {
            let vals: Vec<i64> = scope.iter().map(|v| a.get(*v)).collect();
            let hit = tuples.iter().any(|t| tuple_matches(t, &vals));
            hit == *positive
        }
        Constraint::Regular { scope, automaton } => {
            let mut states = vec![automaton.start.clone()];
            for v in scope {
                let sym = a.get(*v);
                let mut next: Vec<String> = automaton
                    .transitions
                    .iter()
                    .filter(|(from, s, _)| *s == sym && states.contains(from))
                    .map(|(_, _, to)| to.clone())
                    .collect();
                next.sort();
                next.dedup();
                states = next;
                if states.is_empty() {
                    return false;
                }
            }
            states.iter().any(|s| automaton.finals.contains(s))
        }
        Constraint::Mdd { scope, graph } => {
            let mut states = vec![graph.root.clone()];
            for v in scope {
                let sym = a.get(*v);
                let mut next: Vec<String> = graph
                    .transitions
                    .iter()
                    .filter(|(from, s, _)| *s == sym && states.contains(from))
                    .map(|(_, _, to)| to.clone())
                    .collect();
                next.sort();
                next.dedup();
                states = next;
                if states.is_empty() {
                    return false;
                }
            }
            states.contains(&graph.terminal)
        }
        Constraint::AllDifferent { scope, except } => {
            let mut seen = HashMap::new();
            for v in scope {
                let val = a.get(*v);
                if except.contains(&val) {
                    continue;
                }
                if seen.insert(val, ()).is_some() {
                    return false;
                }
            }
            true
        }
        Constraint::AllDifferentList { lists } => {
            for i in 0..lists.len() {
                for j in i + 1..lists.len() {
                    let equal = lists[i]
                        .iter()
                        .zip(&lists[j])
                        .all(|(x, y)| a.get(*x) == a.get(*y));
                    if equal {
                        return false;
                    }
                }
            }
            true
        }
        Constraint::AllEqual { scope } => scope.windows(2).all(|w| a.get(w[0]) == a.get(w[1])),
        Constraint::Ordered { scope, lengths, op } => {
            for (i, w) in scope.windows(2).enumerate() {
                let sep = lengths.as_ref().map_or(0, |ls| ls[i]);
                let (x, y) = (a.get(w[0]) as i128 + sep as i128, a.get(w[1]) as i128);
                let ok = match op {
                    OrderOp::Lt => x < y,
                    OrderOp::Le => x <= y,
                    OrderOp::Gt => x > y,
                    OrderOp::Ge => x >= y,
                };
                if !ok {
                    return false;
                }
            }
            true
        }
        Constraint::Lex { lists, op } => lists.windows(2).all(|w| {
            let x: Vec<i64> = w[0].iter().map(|v| a.get(*v)).collect();
            let y: Vec<i64> = w[1].iter().map(|v| a.get(*v)).collect();
            lex_holds(&x, &y, *op)
        }),
        Constraint::Precedence { scope, values } => {
            let first = |val: i64| scope.iter().position(|v| a.get(*v) == val);
            for w in values.windows(2) {
                if let Some(fb) = first(w[1]) {
                    match first(w[0]) {
                        Some(fa) if fa < fb => {}
                        _ => return false,
                    }
                }
            }
            true
        }
        Constraint::Sum {
            scope,
            coeffs,
            op,
            rhs,
        } => {
            let total: i128 = scope
                .iter()
                .zip(coeffs)
                .map(|(v, c)| a.get(*v) as i128 * *c as i128)
                .sum();
            cmp_i128(*op, total, operand_value(rhs, a) as i128)
        }
        Constraint::Count {
            scope,
            values,
            op,
            rhs,
        } => {
            let n = scope
                .iter()
                .filter(|v| values.contains(&a.get(**v)))
                .count() as i128;
            cmp_i128(*op, n, operand_value(rhs, a) as i128)
        }
        Constraint::NValues { scope, op, rhs } => {
            let mut vals: Vec<i64> = scope.iter().map(|v| a.get(*v)).collect();
            vals.sort_unstable();
            vals.dedup();
            cmp_i128(*op, vals.len() as i128, operand_value(rhs, a) as i128)
        }
        Constraint::Cardinality {
            scope,
            values,
            occurs,
            closed,
        } => {
            if *closed && scope.iter().any(|v| !values.contains(&a.get(*v))) {
                return false;
            }
            values.iter().zip(occurs).all(|(val, occ)| {
                let n = scope.iter().filter(|v| a.get(**v) == *val).count() as i64;
                let (lo, hi) = occ.bounds();
                lo <= n && n <= hi
            })
        }
        Constraint::Maximum { scope, op, rhs } => match scope.iter().map(|v| a.get(*v)).max() {
            Some(m) => cmp_i128(*op, m as i128, operand_value(rhs, a) as i128),
            None => false,
        },
        Constraint::Minimum { scope, op, rhs } => match scope.iter().map(|v| a.get(*v)).min() {
            Some(m) => cmp_i128(*op, m as i128, operand_value(rhs, a) as i128),
            None => false,
        },
        Constraint::Element { list, index, value } => {
            let i = a.get(*index);
            if i < 0 || i as usize >= list.len() {
                return false;
            }
            a.get(list[i as usize]) == operand_value(value, a)
        }
        Constraint::Channel { list, list2 } => match list2 {
            None => {
                let n = list.len() as i64;
                list.iter().enumerate().all(|(i, v)| {
                    let j = a.get(*v);
                    0 <= j && j < n && a.get(list[j as usize]) == i as i64
                })
            }
            Some(l2) => {
                let forward = list.iter().enumerate().all(|(i, v)| {
                    let j = a.get(*v);
                    0 <= j && (j as usize) < l2.len() && a.get(l2[j as usize]) == i as i64
                });
                if list.len() == l2.len() {
                    // equal sizes channel both ways
                    forward
                        && l2.iter().enumerate().all(|(j, v)| {
                            let i = a.get(*v);
                            0 <= i
                                && (i as usize) < list.len()
                                && a.get(list[i as usize]) == j as i64
                        })
                } else {
                    forward
                }
            }
        },
        Constraint::NoOverlap {
            origins,
            lengths,
            zero_ignored,
        } => {
            for i in 0..origins.len() {
                for j in i + 1..origins.len() {
                    if *zero_ignored && (lengths[i] == 0 || lengths[j] == 0) {
                        continue;
                    }
                    let (xi, xj) = (a.get(origins[i]) as i128, a.get(origins[j]) as i128);
                    let (li, lj) = (lengths[i] as i128, lengths[j] as i128);
                    if !(xi + li <= xj || xj + lj <= xi) {
                        return false;
                    }
                }
            }
            true
        }
        Constraint::Cumulative {
            origins,
            lengths,
            heights,
            limit,
        } => {
            // the profile can only peak at task start times
            for t in origins.iter().map(|v| a.get(*v)) {
                let load: i128 = origins
                    .iter()
                    .zip(lengths)
                    .zip(heights)
                    .filter(|((o, l), _)| {
                        let s = a.get(**o) as i128;
                        s <= t as i128 && (t as i128) < s + **l as i128
                    })
                    .map(|(_, h)| *h as i128)
                    .sum();
                if load > *limit as i128 {
                    return false;
                }
            }
            true
        }
        Constraint::BinPacking {
            scope,
            sizes,
            limits,
        } => {
            let nbins = limits.len() as i64;
            let mut load = vec![0i128; limits.len()];
            for (v, s) in scope.iter().zip(sizes) {
                let b = a.get(*v);
                if b < 0 || b >= nbins {
                    return false;
                }
                load[b as usize] += *s as i128;
            }
            load.iter().zip(limits).all(|(l, cap)| *l <= *cap as i128)
        }
        Constraint::Knapsack {
            scope,
            weights,
            limit,
            profits,
            op,
            rhs,
        } => {
            let w: i128 = scope
                .iter()
                .zip(weights)
                .map(|(v, c)| a.get(*v) as i128 * *c as i128)
                .sum();
            let p: i128 = scope
                .iter()
                .zip(profits)
                .map(|(v, c)| a.get(*v) as i128 * *c as i128)
                .sum();
            w <= *limit as i128 && cmp_i128(*op, p, operand_value(rhs, a) as i128)
        }
        Constraint::Circuit { scope } => {
            let n = scope.len();
            let succ: Vec<i64> = scope.iter().map(|v| a.get(*v)).collect();
            if succ.iter().any(|&s| s < 0 || s as usize >= n) {
                return false;
            }
            let members: Vec<usize> = (0..n).filter(|&i| succ[i] as usize != i).collect();
            if members.len() < 2 {
                return false;
            }
            // successors of circuit members must stay inside the circuit and
            // form a single cycle through all of them
            let start = members[0];
            let mut cur = start;
            let mut visited = 0usize;
            loop {
                let next = succ[cur] as usize;
                if next == cur || !members.contains(&next) {
                    return false;
                }
                visited += 1;
                cur = next;
                if cur == start {
                    break;
                }
                if visited > members.len() {
                    return false;
                }
            }
            visited == members.len()
        }
        Constraint::Instantiation { scope, values } => {
            scope.iter().zip(values).all(|(v, val)| a.get(*v) == *val)
        }
        Constraint::Slide {
            list,
            offset,
            template,
        } => {
            let arity = crate::ir::slide_arity(template);
            if arity == 0 || arity > list.len() {
                return false;
            }
            let mut pos = 0;
            while pos + arity <= list.len() {
                // remap the window onto pseudo ids 0..arity-1
                let window: Vec<i64> = list[pos..pos + arity].iter().map(|v| a.get(*v)).collect();
                let sub = Assignment(window);
                if !satisfied_unchecked(template, &sub) {
                    return false;
                }
                pos += offset;
            }
            true
        }
    }
}

fn cmp_i128(op: CmpOp, a: i128, b: i128) -> bool {
    match op {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

/// Value of the instance objective under a total assignment.
pub fn objective_value(inst: &Instance, a: &Assignment) -> Result<i64, CheckError> {
    let obj = inst
        .objective
        .as_ref()
        .ok_or(CheckError::MissingObjective)?;
    objective_expr_value(obj, a)
}

fn objective_expr_value(obj: &Objective, a: &Assignment) -> Result<i64, CheckError> {
    Ok(match &obj.expr {
        ObjectiveExpr::Var(v) => a.get(*v),
        ObjectiveExpr::Sum { scope, coeffs } => {
            let total: i128 = scope
                .iter()
                .zip(coeffs)
                .map(|(v, c)| a.get(*v) as i128 * *c as i128)
                .sum();
            i64::try_from(total).map_err(|_| CheckError::Eval(crate::ir::EvalError::Overflow))?
        }
        ObjectiveExpr::Maximum(s) => s
            .iter()
            .map(|v| a.get(*v))
            .max()
            .ok_or_else(|| CheckError::BadSolution("objective over empty scope".into()))?,
        ObjectiveExpr::Minimum(s) => s
            .iter()
            .map(|v| a.get(*v))
            .min()
            .ok_or_else(|| CheckError::BadSolution("objective over empty scope".into()))?,
        ObjectiveExpr::Expr(e) => eval_expr(e, a)?,
    })
}

/// Checks domains first, then every constraint, and evaluates the objective
/// when present.
pub fn check_assignment(inst: &Instance, a: &Assignment) -> Result<CheckReport, CheckError> {
    if a.len() != inst.num_vars() {
        return Err(CheckError::ScopeError {
            got: a.len(),
            expected: inst.num_vars(),
        });
    }
    let mut domain_violations = Vec::new();
    for v in &inst.variables {
        let val = a.get(v.id);
        if !v.domain.contains(val) {
            domain_violations.push((v.id, val));
        }
    }
    let mut verdicts = Vec::with_capacity(inst.constraints.len());
    let mut all_ok = domain_violations.is_empty();
    for (i, c) in inst.constraints.iter().enumerate() {
        let sat = satisfied_unchecked(c, a);
        all_ok &= sat;
        verdicts.push(Verdict {
            index: i,
            satisfied: sat,
            witness: (!sat).then(|| {
                let vals: Vec<String> = c
                    .referenced_vars()
                    .iter()
                    .map(|v| format!("{}={}", inst.var(*v).name, a.get(*v)))
                    .collect();
                format!("{} violated under {}", c.kind_name(), vals.join(" "))
            }),
        });
    }
    let objective = if inst.objective.is_some() {
        objective_value(inst, a).ok()
    } else {
        None
    };
    Ok(CheckReport {
        domain_violations,
        verdicts,
        satisfied: all_ok,
        objective,
    })
}

/// Parses a solution given as a JSON object mapping variable names to values.
pub fn parse_solution_json(text: &str, inst: &Instance) -> Result<Assignment, CheckError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CheckError::BadSolution(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CheckError::BadSolution("expected a JSON object".into()))?;
    let mut vals = vec![None; inst.num_vars()];
    for (name, v) in obj {
        let var = inst
            .var_by_name(name)
            .ok_or_else(|| CheckError::BadSolution(format!("unknown variable {name:?}")))?;
        let i = v
            .as_i64()
            .ok_or_else(|| CheckError::BadSolution(format!("{name}: not an integer")))?;
        vals[var.id.0] = Some(i);
    }
    let mut out = Vec::with_capacity(vals.len());
    for (i, v) in vals.into_iter().enumerate() {
        match v {
            Some(x) => out.push(x),
            None => {
                return Err(CheckError::BadSolution(format!(
                    "missing value for {}",
                    inst.variables[i].name
                )))
            }
        }
    }
    Ok(Assignment(out))
}

/// Parses a solution given as whitespace-separated values in declaration order.
pub fn parse_solution_values(text: &str, inst: &Instance) -> Result<Assignment, CheckError> {
    let vals: Result<Vec<i64>, _> = text.split_whitespace().map(str::parse).collect();
    let vals = vals.map_err(|e| CheckError::BadSolution(format!("bad integer: {e}")))?;
    if vals.len() != inst.num_vars() {
        return Err(CheckError::ScopeError {
            got: vals.len(),
            expected: inst.num_vars(),
        });
    }
    Ok(Assignment(vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Domain, Expr, InstanceBuilder, Sense};

    fn vars(n: usize, lo: i64, hi: i64) -> (Instance, Vec<VarId>) {
        let mut b = InstanceBuilder::new("t");
        let ids = (0..n)
            .map(|i| b.add_var(format!("x[{i}]"), Domain::range(lo, hi).unwrap()))
            .collect();
        (b.build(), ids)
    }

    #[test]
    fn alldifferent_basic() {
        let (_, ids) = vars(3, 1, 3);
        let c = Constraint::AllDifferent {
            scope: ids,
            except: vec![],
        };
        assert!(constraint_satisfied(&c, &Assignment(vec![1, 2, 3])).unwrap());
        assert!(!constraint_satisfied(&c, &Assignment(vec![1, 2, 1])).unwrap());
    }

    #[test]
    fn alldifferent_except_ignores_excepted() {
        let (_, ids) = vars(3, 0, 3);
        let c = Constraint::AllDifferent {
            scope: ids,
            except: vec![0],
        };
        assert!(constraint_satisfied(&c, &Assignment(vec![0, 0, 3])).unwrap());
        assert!(!constraint_satisfied(&c, &Assignment(vec![3, 0, 3])).unwrap());
    }

    #[test]
    fn element_indexing() {
        let (_, ids) = vars(4, 0, 9);
        let c = Constraint::Element {
            list: vec![ids[0], ids[1], ids[2]],
            index: ids[3],
            value: Operand::Const(7),
        };
        assert!(constraint_satisfied(&c, &Assignment(vec![4, 7, 9, 1])).unwrap());
        assert!(!constraint_satisfied(&c, &Assignment(vec![4, 7, 9, 2])).unwrap());
        // out-of-range index cannot be satisfied
        assert!(!constraint_satisfied(&c, &Assignment(vec![4, 7, 9, 3])).unwrap());
    }

    #[test]
    fn short_table_star_matches_anything() {
        let (_, ids) = vars(2, 0, 9);
        let c = Constraint::Extension {
            scope: ids,
            tuples: vec![
                vec![TupleEntry::Val(1), TupleEntry::Star],
                vec![TupleEntry::Val(2), TupleEntry::Val(2)],
            ],
            positive: true,
            star_allowed: true,
        };
        assert!(constraint_satisfied(&c, &Assignment(vec![1, 5])).unwrap());
        assert!(constraint_satisfied(&c, &Assignment(vec![2, 2])).unwrap());
        assert!(!constraint_satisfied(&c, &Assignment(vec![2, 5])).unwrap());
    }

    #[test]
    fn partial_assignment_is_a_scope_error() {
        let (_, ids) = vars(3, 1, 3);
        let c = Constraint::AllDifferent {
            scope: ids,
            except: vec![],
        };
        assert!(matches!(
            constraint_satisfied(&c, &Assignment(vec![1, 2])),
            Err(CheckError::ScopeError { .. })
        ));
    }

    #[test]
    fn report_flags_domain_violations_first() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 1).unwrap());
        b.add_constraint(Constraint::Intension(Expr::le(Expr::var(x), Expr::cst(5))));
        let inst = b.build();
        let rep = check_assignment(&inst, &Assignment(vec![4])).unwrap();
        assert_eq!(rep.domain_violations, vec![(x, 4)]);
        assert!(!rep.satisfied);
        assert!(rep.verdicts[0].satisfied);
    }

    #[test]
    fn objective_sum_of_bools() {
        let mut b = InstanceBuilder::new("t");
        let ids: Vec<VarId> = (0..3)
            .map(|i| b.add_var(format!("x[{i}]"), Domain::range(0, 1).unwrap()))
            .collect();
        b.set_objective(
            Sense::Minimize,
            ObjectiveExpr::Sum {
                scope: ids,
                coeffs: vec![1, 1, 1],
            },
        );
        let inst = b.build();
        assert_eq!(
            objective_value(&inst, &Assignment(vec![1, 1, 1])).unwrap(),
            3
        );
    }

    #[test]
    fn missing_objective_is_an_error() {
        let (inst, _) = vars(1, 0, 1);
        assert_eq!(
            objective_value(&inst, &Assignment(vec![0])),
            Err(CheckError::MissingObjective)
        );
    }

    #[test]
    fn solution_json_roundtrip() {
        let (inst, _) = vars(2, 0, 9);
        let a = parse_solution_json(r#"{"x[0]": 3, "x[1]": 7}"#, &inst).unwrap();
        assert_eq!(a, Assignment(vec![3, 7]));
        assert!(parse_solution_json(r#"{"x[0]": 3}"#, &inst).is_err());
        let b = parse_solution_values("3 7", &inst).unwrap();
        assert_eq!(a, b);
    }
}
