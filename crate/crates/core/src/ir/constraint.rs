use super::{Expr, VarId};

/// Comparison operator used by constraint conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
            CmpOp::Eq => "eq",
            CmpOp::Ne => "ne",
        }
    }
}

/// Right-hand side of a condition: a constant or a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    Const(i64),
    Var(VarId),
}

/// Ordering operator for `ordered`/`lex` constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl OrderOp {
    pub fn name(self) -> &'static str {
        match self {
            OrderOp::Lt => "lt",
            OrderOp::Le => "le",
            OrderOp::Gt => "gt",
            OrderOp::Ge => "ge",
        }
    }

    pub fn strict(self) -> bool {
        matches!(self, OrderOp::Lt | OrderOp::Gt)
    }

    pub fn descending(self) -> bool {
        matches!(self, OrderOp::Gt | OrderOp::Ge)
    }
}

/// One cell of an extension tuple: a concrete value or the `*` wildcard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TupleEntry {
    Val(i64),
    Star,
}

/// Occurrence requirement for one value of a cardinality constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OccurSpec {
    Exact(i64),
    Range(i64, i64),
}

impl OccurSpec {
    pub fn bounds(self) -> (i64, i64) {
        match self {
            OccurSpec::Exact(k) => (k, k),
            OccurSpec::Range(lo, hi) => (lo, hi),
        }
    }
}

/// Finite automaton for `regular`: labelled transitions over integer symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    pub start: String,
    pub finals: Vec<String>,
    pub transitions: Vec<(String, i64, String)>,
}

/// Layered transition graph for `mdd`. The terminal state is reached after
/// consuming exactly one symbol per scope variable starting from `root`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MddGraph {
    pub root: String,
    pub terminal: String,
    pub transitions: Vec<(String, i64, String)>,
}

/// The XCSP3-core constraint catalog.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    Intension(Expr),
    Extension {
        scope: Vec<VarId>,
        tuples: Vec<Vec<TupleEntry>>,
        positive: bool,
        star_allowed: bool,
    },
    Regular {
        scope: Vec<VarId>,
        automaton: Automaton,
    },
    Mdd {
        scope: Vec<VarId>,
        graph: MddGraph,
    },
    AllDifferent {
        scope: Vec<VarId>,
        except: Vec<i64>,
    },
    AllDifferentList {
        lists: Vec<Vec<VarId>>,
    },
    AllEqual {
        scope: Vec<VarId>,
    },
    /// Single list ordered under `op`, with optional minimum separations.
    Ordered {
        scope: Vec<VarId>,
        lengths: Option<Vec<i64>>,
        op: OrderOp,
    },
    /// Consecutive lists lexicographically ordered under `op`.
    Lex {
        lists: Vec<Vec<VarId>>,
        op: OrderOp,
    },
    Precedence {
        scope: Vec<VarId>,
        values: Vec<i64>,
    },
    Sum {
        scope: Vec<VarId>,
        coeffs: Vec<i64>,
        op: CmpOp,
        rhs: Operand,
    },
    Count {
        scope: Vec<VarId>,
        values: Vec<i64>,
        op: CmpOp,
        rhs: Operand,
    },
    NValues {
        scope: Vec<VarId>,
        op: CmpOp,
        rhs: Operand,
    },
    Cardinality {
        scope: Vec<VarId>,
        values: Vec<i64>,
        occurs: Vec<OccurSpec>,
        closed: bool,
    },
    Maximum {
        scope: Vec<VarId>,
        op: CmpOp,
        rhs: Operand,
    },
    Minimum {
        scope: Vec<VarId>,
        op: CmpOp,
        rhs: Operand,
    },
    Element {
        list: Vec<VarId>,
        index: VarId,
        value: Operand,
    },
    /// One list: involution channeling; two lists: mutual channeling.
    Channel {
        list: Vec<VarId>,
        list2: Option<Vec<VarId>>,
    },
    NoOverlap {
        origins: Vec<VarId>,
        lengths: Vec<i64>,
        zero_ignored: bool,
    },
    Cumulative {
        origins: Vec<VarId>,
        lengths: Vec<i64>,
        heights: Vec<i64>,
        limit: i64,
    },
    BinPacking {
        scope: Vec<VarId>,
        sizes: Vec<i64>,
        limits: Vec<i64>,
    },
    Knapsack {
        scope: Vec<VarId>,
        weights: Vec<i64>,
        limit: i64,
        profits: Vec<i64>,
        op: CmpOp,
        rhs: Operand,
    },
    Circuit {
        scope: Vec<VarId>,
    },
    Instantiation {
        scope: Vec<VarId>,
        values: Vec<i64>,
    },
    /// A template constraint slid over `list` with the given offset. The
    /// template refers to window positions through pseudo ids `0..arity-1`.
    Slide {
        list: Vec<VarId>,
        offset: usize,
        template: Box<Constraint>,
    },
}

impl Constraint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Constraint::Intension(_) => "intension",
            Constraint::Extension { .. } => "extension",
            Constraint::Regular { .. } => "regular",
            Constraint::Mdd { .. } => "mdd",
            Constraint::AllDifferent { .. } => "allDifferent",
            Constraint::AllDifferentList { .. } => "allDifferentList",
            Constraint::AllEqual { .. } => "allEqual",
            Constraint::Ordered { .. } => "ordered",
            Constraint::Lex { .. } => "lex",
            Constraint::Precedence { .. } => "precedence",
            Constraint::Sum { .. } => "sum",
            Constraint::Count { .. } => "count",
            Constraint::NValues { .. } => "nValues",
            Constraint::Cardinality { .. } => "cardinality",
            Constraint::Maximum { .. } => "maximum",
            Constraint::Minimum { .. } => "minimum",
            Constraint::Element { .. } => "element",
            Constraint::Channel { .. } => "channel",
            Constraint::NoOverlap { .. } => "noOverlap",
            Constraint::Cumulative { .. } => "cumulative",
            Constraint::BinPacking { .. } => "binPacking",
            Constraint::Knapsack { .. } => "knapsack",
            Constraint::Circuit { .. } => "circuit",
            Constraint::Instantiation { .. } => "instantiation",
            Constraint::Slide { .. } => "slide",
        }
    }

    /// Every variable mentioned by the constraint, with repetition.
    /// For `Slide`, pseudo template ids are not reported, only the real list.
    pub fn referenced_vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        let push_operand = |out: &mut Vec<VarId>, o: &Operand| {
            if let Operand::Var(v) = o {
                out.push(*v);
            }
        };
        match self {
            Constraint::Intension(e) => e.collect_vars(&mut out),
            Constraint::Extension { scope, .. }
            | Constraint::Regular { scope, .. }
            | Constraint::Mdd { scope, .. }
            | Constraint::AllDifferent { scope, .. }
            | Constraint::AllEqual { scope }
            | Constraint::Ordered { scope, .. }
            | Constraint::Precedence { scope, .. }
            | Constraint::Circuit { scope }
            | Constraint::Instantiation { scope, .. }
            | Constraint::BinPacking { scope, .. } => out.extend_from_slice(scope),
            Constraint::AllDifferentList { lists } | Constraint::Lex { lists, .. } => {
                for l in lists {
                    out.extend_from_slice(l);
                }
            }
            Constraint::Sum { scope, rhs, .. }
            | Constraint::Count { scope, rhs, .. }
            | Constraint::NValues { scope, rhs, .. }
            | Constraint::Maximum { scope, rhs, .. }
            | Constraint::Minimum { scope, rhs, .. }
            | Constraint::Knapsack { scope, rhs, .. } => {
                out.extend_from_slice(scope);
                push_operand(&mut out, rhs);
            }
            Constraint::Cardinality { scope, .. } => out.extend_from_slice(scope),
            Constraint::Element { list, index, value } => {
                out.extend_from_slice(list);
                out.push(*index);
                push_operand(&mut out, value);
            }
            Constraint::Channel { list, list2 } => {
                out.extend_from_slice(list);
                if let Some(l2) = list2 {
                    out.extend_from_slice(l2);
                }
            }
            Constraint::NoOverlap { origins, .. } | Constraint::Cumulative { origins, .. } => {
                out.extend_from_slice(origins)
            }
            Constraint::Slide { list, .. } => out.extend_from_slice(list),
        }
        out
    }

    /// Sorts tuple tables and literal sets into canonical order.
    pub fn canonicalize(&mut self) {
        match self {
            Constraint::Intension(e) => e.canonicalize(),
            Constraint::Extension {
                tuples,
                star_allowed,
                ..
            } => {
                tuples.sort_unstable();
                tuples.dedup();
                // the flag mirrors the content once tuples are canonical
                *star_allowed = tuples.iter().flatten().any(|e| *e == TupleEntry::Star);
            }
            Constraint::AllDifferent { except, .. } => {
                except.sort_unstable();
                except.dedup();
            }
            Constraint::Count { values, .. } => {
                values.sort_unstable();
                values.dedup();
            }
            Constraint::Slide { template, .. } => template.canonicalize(),
            _ => {}
        }
    }
}
