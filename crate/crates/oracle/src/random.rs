//! Random constraints, assignments and small instances for agreement and
//! soundness testing. Everything is driven by the deterministic [`Rng`].

use xcspkit_core::ir::{
    Automaton, CmpOp, Constraint, Domain, Expr, Instance, InstanceBuilder, MddGraph, ObjectiveExpr,
    OccurSpec, Operand, OrderOp, Sense, TupleEntry, VarId,
};

use crate::rng::Rng;

pub const KIND_COUNT: usize = 25;

pub const KIND_NAMES: [&str; KIND_COUNT] = [
    "intension",
    "extension",
    "regular",
    "mdd",
    "allDifferent",
    "allDifferentList",
    "allEqual",
    "ordered",
    "lex",
    "precedence",
    "sum",
    "count",
    "nValues",
    "cardinality",
    "maximum",
    "minimum",
    "element",
    "channel",
    "noOverlap",
    "cumulative",
    "binPacking",
    "knapsack",
    "circuit",
    "instantiation",
    "slide",
];

const VAL_LO: i64 = 0;
const VAL_HI: i64 = 3;

fn cmp_op(rng: &mut Rng) -> CmpOp {
    match rng.below(6) {
        0 => CmpOp::Lt,
        1 => CmpOp::Le,
        2 => CmpOp::Gt,
        3 => CmpOp::Ge,
        4 => CmpOp::Eq,
        _ => CmpOp::Ne,
    }
}

fn order_op(rng: &mut Rng) -> OrderOp {
    match rng.below(4) {
        0 => OrderOp::Lt,
        1 => OrderOp::Le,
        2 => OrderOp::Gt,
        _ => OrderOp::Ge,
    }
}

fn operand(rng: &mut Rng, nvars: usize) -> Operand {
    if rng.chance(50) {
        Operand::Const(rng.range_i64(VAL_LO - 1, VAL_HI + 2))
    } else {
        Operand::Var(VarId(rng.below(nvars as u64) as usize))
    }
}

fn scope(rng: &mut Rng, nvars: usize, len: usize) -> Vec<VarId> {
    (0..len)
        .map(|_| VarId(rng.below(nvars as u64) as usize))
        .collect()
}

/// Random expression over up to `nvars` variables. Divisors are non-zero
/// constants so evaluation never divides by zero.
pub fn random_expr(rng: &mut Rng, nvars: usize, depth: usize) -> Expr {
    if depth == 0 || rng.chance(30) {
        return if rng.chance(50) {
            Expr::Const(rng.range_i64(VAL_LO - 1, VAL_HI + 1))
        } else {
            Expr::Var(VarId(rng.below(nvars as u64) as usize))
        };
    }
    let sub = |rng: &mut Rng| Box::new(random_expr(rng, nvars, depth - 1));
    let list = |rng: &mut Rng| {
        let len = 2 + rng.below(2) as usize;
        (0..len)
            .map(|_| random_expr(rng, nvars, depth - 1))
            .collect::<Vec<_>>()
    };
    match rng.below(22) {
        0 => Expr::Neg(sub(rng)),
        1 => Expr::Abs(sub(rng)),
        2 => Expr::Add(list(rng)),
        3 => Expr::Sub(sub(rng), sub(rng)),
        4 => Expr::Mul(list(rng)),
        5 => {
            let d = if rng.chance(50) {
                rng.range_i64(1, 3)
            } else {
                rng.range_i64(-3, -1)
            };
            Expr::DivFloor(sub(rng), Box::new(Expr::Const(d)))
        }
        6 => {
            let d = if rng.chance(50) {
                rng.range_i64(1, 3)
            } else {
                rng.range_i64(-3, -1)
            };
            Expr::Mod(sub(rng), Box::new(Expr::Const(d)))
        }
        7 => Expr::Dist(sub(rng), sub(rng)),
        8 => Expr::Min(list(rng)),
        9 => Expr::Max(list(rng)),
        10 => Expr::IfThenElse(sub(rng), sub(rng), sub(rng)),
        11 => Expr::Eq(sub(rng), sub(rng)),
        12 => Expr::Ne(sub(rng), sub(rng)),
        13 => Expr::Lt(sub(rng), sub(rng)),
        14 => Expr::Le(sub(rng), sub(rng)),
        15 => Expr::Gt(sub(rng), sub(rng)),
        16 => Expr::Ge(sub(rng), sub(rng)),
        17 => Expr::And(list(rng)),
        18 => Expr::Or(list(rng)),
        19 => Expr::Not(sub(rng)),
        20 => Expr::Imp(sub(rng), sub(rng)),
        _ => {
            let set: Vec<i64> = (0..1 + rng.below(3))
                .map(|_| rng.range_i64(VAL_LO, VAL_HI))
                .collect();
            Expr::InSet(sub(rng), set)
        }
    }
}

fn star_tuple(rng: &mut Rng, arity: usize, allow_star: bool) -> Vec<TupleEntry> {
    (0..arity)
        .map(|_| {
            if allow_star && rng.chance(20) {
                TupleEntry::Star
            } else {
                TupleEntry::Val(rng.range_i64(VAL_LO, VAL_HI))
            }
        })
        .collect()
}

fn state_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("q{i}")).collect()
}

/// Random constraint of the given catalog kind over `nvars` variables whose
/// domains are assumed to lie in 0..=3.
pub fn random_constraint(kind: usize, rng: &mut Rng, nvars: usize) -> Constraint {
    let arity = 2 + rng.below(3) as usize; // 2..=4
    match kind {
        0 => Constraint::Intension(random_expr(rng, nvars, 3)),
        1 => {
            let sc = scope(rng, nvars, arity);
            let star = rng.chance(50);
            let tuples: Vec<_> = (0..1 + rng.below(6))
                .map(|_| star_tuple(rng, arity, star))
                .collect();
            let star_allowed = tuples.iter().flatten().any(|e| *e == TupleEntry::Star);
            Constraint::Extension {
                scope: sc,
                tuples,
                positive: rng.chance(60),
                star_allowed,
            }
        }
        2 => {
            let sc = scope(rng, nvars, arity);
            let states = state_names(2 + rng.below(3) as usize);
            let mut transitions = Vec::new();
            for _ in 0..(4 + rng.below(8)) {
                let from = states[rng.below(states.len() as u64) as usize].clone();
                let to = states[rng.below(states.len() as u64) as usize].clone();
                transitions.push((from, rng.range_i64(VAL_LO, VAL_HI), to));
            }
            let finals = vec![states[rng.below(states.len() as u64) as usize].clone()];
            Constraint::Regular {
                scope: sc,
                automaton: Automaton {
                    start: states[0].clone(),
                    finals,
                    transitions,
                },
            }
        }
        3 => {
            // layered graph: one state per level plus a terminal
            let sc = scope(rng, nvars, arity);
            let mut transitions = Vec::new();
            for level in 0..arity {
                let from = if level == 0 {
                    "r".to_string()
                } else {
                    format!("n{level}")
                };
                let to = if level == arity - 1 {
                    "t".to_string()
                } else {
                    format!("n{}", level + 1)
                };
                let fanout = 1 + rng.below(3);
                for _ in 0..fanout {
                    transitions.push((from.clone(), rng.range_i64(VAL_LO, VAL_HI), to.clone()));
                }
            }
            Constraint::Mdd {
                scope: sc,
                graph: MddGraph {
                    root: "r".into(),
                    terminal: "t".into(),
                    transitions,
                },
            }
        }
        4 => {
            let except = if rng.chance(30) {
                vec![rng.range_i64(VAL_LO, VAL_HI)]
            } else {
                vec![]
            };
            Constraint::AllDifferent {
                scope: scope(rng, nvars, arity),
                except,
            }
        }
        5 => {
            let len = 2.min(nvars).max(1);
            let lists = (0..2 + rng.below(2))
                .map(|_| scope(rng, nvars, len))
                .collect();
            Constraint::AllDifferentList { lists }
        }
        6 => Constraint::AllEqual {
            scope: scope(rng, nvars, arity),
        },
        7 => {
            let sc = scope(rng, nvars, arity);
            let lengths = if rng.chance(50) {
                Some((0..sc.len() - 1).map(|_| rng.range_i64(-1, 2)).collect())
            } else {
                None
            };
            Constraint::Ordered {
                scope: sc,
                lengths,
                op: order_op(rng),
            }
        }
        8 => {
            let len = 2.min(nvars).max(1);
            let lists = (0..2 + rng.below(2))
                .map(|_| scope(rng, nvars, len))
                .collect();
            Constraint::Lex {
                lists,
                op: order_op(rng),
            }
        }
        9 => {
            let mut values: Vec<i64> = (VAL_LO..=VAL_HI).collect();
            // shuffle
            for i in (1..values.len()).rev() {
                values.swap(i, rng.below(i as u64 + 1) as usize);
            }
            values.truncate(2 + rng.below(2) as usize);
            Constraint::Precedence {
                scope: scope(rng, nvars, arity.max(3)),
                values,
            }
        }
        10 => {
            let sc = scope(rng, nvars, arity);
            let coeffs = (0..sc.len()).map(|_| rng.range_i64(-2, 3)).collect();
            Constraint::Sum {
                scope: sc,
                coeffs,
                op: cmp_op(rng),
                rhs: operand(rng, nvars),
            }
        }
        11 => {
            let sc = scope(rng, nvars, arity);
            let values = (0..1 + rng.below(2))
                .map(|_| rng.range_i64(VAL_LO, VAL_HI))
                .collect();
            Constraint::Count {
                scope: sc,
                values,
                op: cmp_op(rng),
                rhs: operand(rng, nvars),
            }
        }
        12 => Constraint::NValues {
            scope: scope(rng, nvars, arity),
            op: cmp_op(rng),
            rhs: operand(rng, nvars),
        },
        13 => {
            let sc = scope(rng, nvars, arity);
            let values: Vec<i64> = (VAL_LO..=VAL_HI).collect();
            let occurs = values
                .iter()
                .map(|_| {
                    if rng.chance(50) {
                        OccurSpec::Exact(rng.range_i64(0, 2))
                    } else {
                        let lo = rng.range_i64(0, 2);
                        OccurSpec::Range(lo, lo + rng.range_i64(0, 2))
                    }
                })
                .collect();
            Constraint::Cardinality {
                scope: sc,
                values,
                occurs,
                closed: rng.chance(30),
            }
        }
        14 => Constraint::Maximum {
            scope: scope(rng, nvars, arity),
            op: cmp_op(rng),
            rhs: operand(rng, nvars),
        },
        15 => Constraint::Minimum {
            scope: scope(rng, nvars, arity),
            op: cmp_op(rng),
            rhs: operand(rng, nvars),
        },
        16 => Constraint::Element {
            list: scope(rng, nvars, arity),
            index: VarId(rng.below(nvars as u64) as usize),
            value: operand(rng, nvars),
        },
        17 => {
            let list = scope(rng, nvars, arity.min(nvars));
            let list2 = if rng.chance(50) {
                Some(scope(rng, nvars, list.len()))
            } else {
                None
            };
            Constraint::Channel { list, list2 }
        }
        18 => {
            let origins = scope(rng, nvars, arity);
            let lengths = (0..origins.len()).map(|_| rng.range_i64(0, 2)).collect();
            Constraint::NoOverlap {
                origins,
                lengths,
                zero_ignored: rng.chance(70),
            }
        }
        19 => {
            let origins = scope(rng, nvars, arity);
            let lengths = (0..origins.len()).map(|_| rng.range_i64(0, 2)).collect();
            let heights = (0..origins.len()).map(|_| rng.range_i64(1, 3)).collect();
            Constraint::Cumulative {
                origins,
                lengths,
                heights,
                limit: rng.range_i64(2, 5),
            }
        }
        20 => {
            let sc = scope(rng, nvars, arity);
            let sizes = (0..sc.len()).map(|_| rng.range_i64(1, 3)).collect();
            let limits = (0..2 + rng.below(2)).map(|_| rng.range_i64(2, 5)).collect();
            Constraint::BinPacking {
                scope: sc,
                sizes,
                limits,
            }
        }
        21 => {
            let sc = scope(rng, nvars, arity);
            let weights = (0..sc.len()).map(|_| rng.range_i64(1, 3)).collect();
            let profits = (0..sc.len()).map(|_| rng.range_i64(1, 3)).collect();
            Constraint::Knapsack {
                scope: sc,
                weights,
                limit: rng.range_i64(3, 9),
                profits,
                op: cmp_op(rng),
                rhs: operand(rng, nvars),
            }
        }
        22 => Constraint::Circuit {
            scope: scope(rng, nvars, arity.max(3)),
        },
        23 => {
            let sc = scope(rng, nvars, arity);
            let values = (0..sc.len())
                .map(|_| rng.range_i64(VAL_LO, VAL_HI))
                .collect();
            Constraint::Instantiation { scope: sc, values }
        }
        24 => {
            let list_len = 3 + rng.below(2) as usize;
            let list = scope(rng, nvars, list_len);
            let template = if rng.chance(50) {
                Constraint::Intension(Expr::Le(
                    Box::new(Expr::Var(VarId(0))),
                    Box::new(Expr::Var(VarId(1))),
                ))
            } else {
                let tuples: Vec<_> = (0..3).map(|_| star_tuple(rng, 2, true)).collect();
                let star_allowed = tuples.iter().flatten().any(|e| *e == TupleEntry::Star);
                Constraint::Extension {
                    scope: vec![VarId(0), VarId(1)],
                    tuples,
                    positive: rng.chance(60),
                    star_allowed,
                }
            };
            Constraint::Slide {
                list,
                offset: 1 + rng.below(2) as usize,
                template: Box::new(template),
            }
        }
        _ => unreachable!(),
    }
}

/// Assignment drawing values slightly outside 0..=3 to exercise range
/// handling (element indices, packing bins, channels).
pub fn random_assignment(rng: &mut Rng, nvars: usize) -> Vec<i64> {
    (0..nvars)
        .map(|_| rng.range_i64(VAL_LO - 1, VAL_HI + 1))
        .collect()
}

/// Constraint kinds the search engine accepts.
const SOLVER_KINDS: [usize; 13] = [0, 1, 4, 6, 7, 8, 10, 11, 12, 13, 14, 15, 16];

/// Small random instance over supported kinds only; always validates.
/// Domains are random subsets of 0..=3 (at most 4 values each).
pub fn random_solver_instance(rng: &mut Rng, with_objective: bool) -> Instance {
    let nvars = 3 + rng.below(3) as usize;
    let mut b = InstanceBuilder::new("random");
    let ids: Vec<VarId> = (0..nvars)
        .map(|i| {
            let mut vals: Vec<i64> = Vec::new();
            for v in VAL_LO..=VAL_HI {
                if rng.chance(70) {
                    vals.push(v);
                }
            }
            if vals.is_empty() {
                vals.push(rng.range_i64(VAL_LO, VAL_HI));
            }
            b.add_var(format!("x[{i}]"), Domain::from_values(&vals).unwrap())
        })
        .collect();
    let n_constraints = 1 + rng.below(4);
    for _ in 0..n_constraints {
        let kind = SOLVER_KINDS[rng.below(SOLVER_KINDS.len() as u64) as usize];
        let c = random_constraint(kind, rng, nvars);
        b.add_constraint(c);
    }
    if with_objective {
        let expr = match rng.below(4) {
            0 => ObjectiveExpr::Var(ids[rng.below(nvars as u64) as usize]),
            1 => ObjectiveExpr::Sum {
                scope: ids.clone(),
                coeffs: (0..nvars).map(|_| rng.range_i64(-2, 3)).collect(),
            },
            2 => ObjectiveExpr::Maximum(ids.clone()),
            _ => ObjectiveExpr::Minimum(ids.clone()),
        };
        let sense = if rng.chance(50) {
            Sense::Minimize
        } else {
            Sense::Maximize
        };
        b.set_objective(sense, expr);
    }
    b.build()
}
