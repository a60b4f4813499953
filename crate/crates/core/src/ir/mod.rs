//! In-memory representation of XCSP3-core CSP/COP instances: variables over
//! finite integer domains, the constraint catalog, optional objective,
//! structural validation and a canonical 64-bit signature.

mod constraint;
mod domain;
mod expr;

pub use constraint::{
    Automaton, CmpOp, Constraint, MddGraph, OccurSpec, Operand, OrderOp, TupleEntry,
};
pub use domain::{Domain, DomainError};
pub use expr::{checked_div_floor, checked_mod_floor, eval_expr, EvalError, Expr, VarLookup};

use std::fmt;

/// Dense variable index within one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveExpr {
    Var(VarId),
    Sum { scope: Vec<VarId>, coeffs: Vec<i64> },
    Maximum(Vec<VarId>),
    Minimum(Vec<VarId>),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub expr: ObjectiveExpr,
}

/// Total assignment: one value per variable, indexed by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<i64>);

impl Assignment {
    pub fn get(&self, v: VarId) -> i64 {
        self.0[v.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl expr::VarLookup for Assignment {
    fn value_of(&self, v: VarId) -> Option<i64> {
        self.0.get(v.0).copied()
    }
}

/// Immutable CSP/COP instance. Constructed through [`InstanceBuilder`];
/// safe to share across threads once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Free-form tags per constraint (same length as `constraints`).
    pub tags: Vec<Vec<String>>,
    pub objective: Option<Objective>,
}

impl Instance {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn is_cop(&self) -> bool {
        self.objective.is_some()
    }

    /// Sorts tuple tables and literal sets into canonical order, in place.
    /// Idempotent: applying it twice leaves the instance unchanged.
    pub fn canonicalize(&mut self) {
        for c in &mut self.constraints {
            c.canonicalize();
        }
        if let Some(obj) = &mut self.objective {
            if let ObjectiveExpr::Expr(e) = &mut obj.expr {
                e.canonicalize();
            }
        }
    }

    /// Canonical 64-bit digest over variables, constraints, tags and
    /// objective. The instance name is a display label and does not
    /// participate.
    pub fn signature(&self) -> u64 {
        let mut h = Fnv::new();
        h.usize(self.variables.len());
        for v in &self.variables {
            h.str(&v.name);
            h.usize(v.domain.ranges().len());
            for &(lo, hi) in v.domain.ranges() {
                h.i64(lo);
                h.i64(hi);
            }
        }
        h.usize(self.constraints.len());
        for (c, tags) in self.constraints.iter().zip(&self.tags) {
            let mut canon = c.clone();
            canon.canonicalize();
            hash_constraint(&mut h, &canon);
            h.usize(tags.len());
            for t in tags {
                h.str(t);
            }
        }
        match &self.objective {
            None => h.u8(0),
            Some(o) => {
                h.u8(1);
                h.u8(match o.sense {
                    Sense::Minimize => 0,
                    Sense::Maximize => 1,
                });
                hash_objective_expr(&mut h, &o.expr);
            }
        }
        h.finish()
    }
}

/// Structural problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Index of the offending constraint, when applicable.
    pub constraint: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constraint {
            Some(i) => write!(f, "constraint[{}]: {}", i, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

fn diag(constraint: Option<usize>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        constraint,
        message: message.into(),
    }
}

fn name_is_serializable(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '[' | ']'))
}

/// Checks every structural invariant; an empty result means the instance is
/// well formed. Violations are reported as diagnostics, never panics.
pub fn validate_instance(inst: &Instance) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = inst.variables.len();

    let mut seen = std::collections::HashSet::new();
    for (i, v) in inst.variables.iter().enumerate() {
        if v.id.0 != i {
            out.push(diag(
                None,
                format!("variable {} has id {} (expected {})", v.name, v.id.0, i),
            ));
        }
        if !seen.insert(v.name.as_str()) {
            out.push(diag(None, format!("duplicate name {:?}", v.name)));
        }
        if !name_is_serializable(&v.name) {
            out.push(diag(
                None,
                format!("variable name {:?} is not a valid identifier", v.name),
            ));
        }
    }

    if inst.tags.len() != inst.constraints.len() {
        out.push(diag(
            None,
            format!(
                "tag list length {} does not match constraint count {}",
                inst.tags.len(),
                inst.constraints.len()
            ),
        ));
    }

    let var_ok = |v: VarId| v.0 < n;
    for (ci, c) in inst.constraints.iter().enumerate() {
        for v in c.referenced_vars() {
            if !var_ok(v) {
                out.push(diag(
                    Some(ci),
                    format!("references unknown variable id {}", v.0),
                ));
            }
        }
        validate_constraint_shape(ci, c, &mut out);
    }

    if let Some(obj) = &inst.objective {
        let vars = match &obj.expr {
            ObjectiveExpr::Var(v) => vec![*v],
            ObjectiveExpr::Sum { scope, coeffs } => {
                if scope.len() != coeffs.len() {
                    out.push(diag(
                        None,
                        "objective sum: coefficient count differs from scope",
                    ));
                }
                scope.clone()
            }
            ObjectiveExpr::Maximum(s) | ObjectiveExpr::Minimum(s) => {
                if s.is_empty() {
                    out.push(diag(None, "objective over empty scope"));
                }
                s.clone()
            }
            ObjectiveExpr::Expr(e) => {
                let mut vs = Vec::new();
                e.collect_vars(&mut vs);
                vs
            }
        };
        for v in vars {
            if !var_ok(v) {
                out.push(diag(
                    None,
                    format!("objective references unknown variable id {}", v.0),
                ));
            }
        }
    }

    out
}

fn validate_constraint_shape(ci: usize, c: &Constraint, out: &mut Vec<Diagnostic>) {
    match c {
        Constraint::Extension {
            scope,
            tuples,
            star_allowed,
            ..
        } => {
            if scope.is_empty() {
                out.push(diag(Some(ci), "extension with empty scope"));
            }
            for t in tuples {
                if t.len() != scope.len() {
                    out.push(diag(
                        Some(ci),
                        format!(
                            "tuple arity {} differs from scope arity {}",
                            t.len(),
                            scope.len()
                        ),
                    ));
                }
                if !star_allowed && t.contains(&TupleEntry::Star) {
                    out.push(diag(Some(ci), "star entry in a table not flagged as short"));
                }
            }
        }
        Constraint::Ordered { scope, lengths, .. } => {
            if let Some(ls) = lengths {
                if scope.len() < 2 || ls.len() != scope.len() - 1 {
                    out.push(diag(
                        Some(ci),
                        "ordered lengths must count one fewer than the scope",
                    ));
                }
            }
        }
        Constraint::Lex { lists, .. } | Constraint::AllDifferentList { lists } => {
            if lists.len() < 2 {
                out.push(diag(Some(ci), "needs at least two lists"));
            }
            if lists.windows(2).any(|w| w[0].len() != w[1].len()) {
                out.push(diag(Some(ci), "lists must share one length"));
            }
        }
        Constraint::Sum { scope, coeffs, .. } => {
            if coeffs.len() != scope.len() {
                out.push(diag(Some(ci), "coefficient count differs from scope"));
            }
        }
        Constraint::Cardinality { values, occurs, .. } => {
            if values.len() != occurs.len() {
                out.push(diag(Some(ci), "occurrence specs do not match value count"));
            }
            for o in occurs {
                let (lo, hi) = o.bounds();
                if lo > hi {
                    out.push(diag(
                        Some(ci),
                        format!("empty occurrence interval {lo}..{hi}"),
                    ));
                }
            }
        }
        Constraint::NoOverlap {
            origins, lengths, ..
        } => {
            if origins.len() != lengths.len() {
                out.push(diag(Some(ci), "lengths do not match origins"));
            }
        }
        Constraint::Cumulative {
            origins,
            lengths,
            heights,
            ..
        } => {
            if origins.len() != lengths.len() || origins.len() != heights.len() {
                out.push(diag(Some(ci), "lengths/heights do not match origins"));
            }
        }
        Constraint::BinPacking { scope, sizes, .. } => {
            if sizes.len() != scope.len() {
                out.push(diag(Some(ci), "sizes do not match scope"));
            }
        }
        Constraint::Knapsack {
            scope,
            weights,
            profits,
            ..
        } => {
            if weights.len() != scope.len() || profits.len() != scope.len() {
                out.push(diag(Some(ci), "weights/profits do not match scope"));
            }
        }
        Constraint::Instantiation { scope, values } => {
            if values.len() != scope.len() {
                out.push(diag(Some(ci), "values do not match scope"));
            }
        }
        Constraint::Channel { list, list2 } => {
            if let Some(l2) = list2 {
                if list.len() > l2.len() {
                    out.push(diag(Some(ci), "first channel list longer than second"));
                }
            }
        }
        Constraint::Slide {
            list,
            offset,
            template,
        } => {
            let arity = slide_arity(template);
            if *offset == 0 {
                out.push(diag(Some(ci), "slide offset must be positive"));
            }
            if arity == 0 || arity > list.len() {
                out.push(diag(Some(ci), "slide template arity out of range"));
            }
            let mut refs = template.referenced_vars();
            refs.sort_unstable();
            refs.dedup();
            if refs.iter().any(|v| v.0 >= arity) {
                out.push(diag(
                    Some(ci),
                    "slide template must use positions 0..arity-1",
                ));
            }
        }
        Constraint::Regular { automaton, .. } => {
            if automaton.finals.is_empty() {
                out.push(diag(Some(ci), "automaton without final states"));
            }
        }
        Constraint::Precedence { values, .. } => {
            if values.len() < 2 {
                out.push(diag(Some(ci), "precedence needs at least two values"));
            }
        }
        _ => {}
    }
}

/// Window width of a slide template: one past its largest pseudo id.
pub fn slide_arity(template: &Constraint) -> usize {
    template
        .referenced_vars()
        .iter()
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0)
}

/// Incremental builder. Variable ids are handed out densely in creation order.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    tags: Vec<Vec<String>>,
    objective: Option<Objective>,
}

impl InstanceBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        InstanceBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, domain: Domain) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            id,
            name: name.into(),
            domain,
        });
        id
    }

    pub fn add_constraint(&mut self, c: Constraint) -> usize {
        self.constraints.push(c);
        self.tags.push(Vec::new());
        self.constraints.len() - 1
    }

    pub fn add_tagged(&mut self, c: Constraint, tag: &str) -> usize {
        let i = self.add_constraint(c);
        self.tags[i].push(tag.to_string());
        i
    }

    pub fn tag(&mut self, index: usize, tag: &str) {
        self.tags[index].push(tag.to_string());
    }

    pub fn set_objective(&mut self, sense: Sense, expr: ObjectiveExpr) {
        // a bare variable expression and the variable form are the same
        // objective; keep one canonical spelling
        let expr = match expr {
            ObjectiveExpr::Expr(Expr::Var(v)) => ObjectiveExpr::Var(v),
            other => other,
        };
        self.objective = Some(Objective { sense, expr });
    }

    pub fn build(self) -> Instance {
        Instance {
            name: self.name,
            variables: self.variables,
            constraints: self.constraints,
            tags: self.tags,
            objective: self.objective,
        }
    }
}

// ---------------------------------------------------------------------------
// signature hashing

/// FNV-1a, 64-bit. Stable across platforms; not meant to resist adversaries.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    fn byte(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x100000001b3);
    }

    fn bytes(&mut self, bs: &[u8]) {
        for &b in bs {
            self.byte(b);
        }
    }

    fn u8(&mut self, v: u8) {
        self.byte(v);
    }

    fn i64(&mut self, v: i64) {
        self.bytes(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.bytes(&(v as u64).to_le_bytes());
    }

    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.bytes(s.as_bytes());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

fn hash_operand(h: &mut Fnv, o: &Operand) {
    match o {
        Operand::Const(c) => {
            h.u8(0);
            h.i64(*c);
        }
        Operand::Var(v) => {
            h.u8(1);
            h.usize(v.0);
        }
    }
}

fn hash_vars(h: &mut Fnv, vs: &[VarId]) {
    h.usize(vs.len());
    for v in vs {
        h.usize(v.0);
    }
}

fn hash_ints(h: &mut Fnv, vs: &[i64]) {
    h.usize(vs.len());
    for &v in vs {
        h.i64(v);
    }
}

fn hash_expr(h: &mut Fnv, e: &Expr) {
    match e {
        Expr::Const(c) => {
            h.u8(0);
            h.i64(*c);
        }
        Expr::Var(v) => {
            h.u8(1);
            h.usize(v.0);
        }
        Expr::Neg(a) => un(h, 2, a),
        Expr::Abs(a) => un(h, 3, a),
        Expr::Add(xs) => nary(h, 4, xs),
        Expr::Sub(a, b) => bin(h, 5, a, b),
        Expr::Mul(xs) => nary(h, 6, xs),
        Expr::DivFloor(a, b) => bin(h, 7, a, b),
        Expr::Mod(a, b) => bin(h, 8, a, b),
        Expr::Dist(a, b) => bin(h, 9, a, b),
        Expr::Min(xs) => nary(h, 10, xs),
        Expr::Max(xs) => nary(h, 11, xs),
        Expr::IfThenElse(c, t, e2) => {
            h.u8(12);
            hash_expr(h, c);
            hash_expr(h, t);
            hash_expr(h, e2);
        }
        Expr::Eq(a, b) => bin(h, 13, a, b),
        Expr::Ne(a, b) => bin(h, 14, a, b),
        Expr::Lt(a, b) => bin(h, 15, a, b),
        Expr::Le(a, b) => bin(h, 16, a, b),
        Expr::Gt(a, b) => bin(h, 17, a, b),
        Expr::Ge(a, b) => bin(h, 18, a, b),
        Expr::And(xs) => nary(h, 19, xs),
        Expr::Or(xs) => nary(h, 20, xs),
        Expr::Not(a) => un(h, 21, a),
        Expr::Imp(a, b) => bin(h, 22, a, b),
        Expr::Iff(a, b) => bin(h, 23, a, b),
        Expr::Xor(a, b) => bin(h, 24, a, b),
        Expr::InSet(a, set) => {
            h.u8(25);
            hash_expr(h, a);
            hash_ints(h, set);
        }
    }

    fn un(h: &mut Fnv, tag: u8, a: &Expr) {
        h.u8(tag);
        hash_expr(h, a);
    }
    fn bin(h: &mut Fnv, tag: u8, a: &Expr, b: &Expr) {
        h.u8(tag);
        hash_expr(h, a);
        hash_expr(h, b);
    }
    fn nary(h: &mut Fnv, tag: u8, xs: &[Expr]) {
        h.u8(tag);
        h.usize(xs.len());
        for x in xs {
            hash_expr(h, x);
        }
    }
}

fn hash_objective_expr(h: &mut Fnv, e: &ObjectiveExpr) {
    match e {
        ObjectiveExpr::Var(v) => {
            h.u8(0);
            h.usize(v.0);
        }
        ObjectiveExpr::Sum { scope, coeffs } => {
            h.u8(1);
            hash_vars(h, scope);
            hash_ints(h, coeffs);
        }
        ObjectiveExpr::Maximum(s) => {
            h.u8(2);
            hash_vars(h, s);
        }
        ObjectiveExpr::Minimum(s) => {
            h.u8(3);
            hash_vars(h, s);
        }
        ObjectiveExpr::Expr(e) => {
            h.u8(4);
            hash_expr(h, e);
        }
    }
}

fn hash_constraint(h: &mut Fnv, c: &Constraint) {
    h.str(c.kind_name());
    match c {
        Constraint::Intension(e) => hash_expr(h, e),
        Constraint::Extension {
            scope,
            tuples,
            positive,
            star_allowed,
        } => {
            hash_vars(h, scope);
            h.u8(*positive as u8);
            h.u8(*star_allowed as u8);
            h.usize(tuples.len());
            for t in tuples {
                h.usize(t.len());
                for e in t {
                    match e {
                        TupleEntry::Val(v) => {
                            h.u8(0);
                            h.i64(*v);
                        }
                        TupleEntry::Star => h.u8(1),
                    }
                }
            }
        }
        Constraint::Regular { scope, automaton } => {
            hash_vars(h, scope);
            h.str(&automaton.start);
            h.usize(automaton.finals.len());
            for f in &automaton.finals {
                h.str(f);
            }
            h.usize(automaton.transitions.len());
            for (a, v, b) in &automaton.transitions {
                h.str(a);
                h.i64(*v);
                h.str(b);
            }
        }
        Constraint::Mdd { scope, graph } => {
            hash_vars(h, scope);
            h.str(&graph.root);
            h.str(&graph.terminal);
            h.usize(graph.transitions.len());
            for (a, v, b) in &graph.transitions {
                h.str(a);
                h.i64(*v);
                h.str(b);
            }
        }
        Constraint::AllDifferent { scope, except } => {
            hash_vars(h, scope);
            hash_ints(h, except);
        }
        Constraint::AllDifferentList { lists } | Constraint::Lex { lists, .. } => {
            if let Constraint::Lex { op, .. } = c {
                h.str(op.name());
            }
            h.usize(lists.len());
            for l in lists {
                hash_vars(h, l);
            }
        }
        Constraint::AllEqual { scope } | Constraint::Circuit { scope } => hash_vars(h, scope),
        Constraint::Ordered { scope, lengths, op } => {
            hash_vars(h, scope);
            h.str(op.name());
            match lengths {
                None => h.u8(0),
                Some(ls) => {
                    h.u8(1);
                    hash_ints(h, ls);
                }
            }
        }
        Constraint::Precedence { scope, values } => {
            hash_vars(h, scope);
            hash_ints(h, values);
        }
        Constraint::Sum {
            scope,
            coeffs,
            op,
            rhs,
        } => {
            hash_vars(h, scope);
            hash_ints(h, coeffs);
            h.str(op.name());
            hash_operand(h, rhs);
        }
        Constraint::Count {
            scope,
            values,
            op,
            rhs,
        } => {
            hash_vars(h, scope);
            hash_ints(h, values);
            h.str(op.name());
            hash_operand(h, rhs);
        }
        Constraint::NValues { scope, op, rhs } => {
            hash_vars(h, scope);
            h.str(op.name());
            hash_operand(h, rhs);
        }
        Constraint::Cardinality {
            scope,
            values,
            occurs,
            closed,
        } => {
            hash_vars(h, scope);
            hash_ints(h, values);
            h.usize(occurs.len());
            for o in occurs {
                let (lo, hi) = o.bounds();
                h.u8(matches!(o, OccurSpec::Exact(_)) as u8);
                h.i64(lo);
                h.i64(hi);
            }
            h.u8(*closed as u8);
        }
        Constraint::Maximum { scope, op, rhs } | Constraint::Minimum { scope, op, rhs } => {
            hash_vars(h, scope);
            h.str(op.name());
            hash_operand(h, rhs);
        }
        Constraint::Element { list, index, value } => {
            hash_vars(h, list);
            h.usize(index.0);
            hash_operand(h, value);
        }
        Constraint::Channel { list, list2 } => {
            hash_vars(h, list);
            match list2 {
                None => h.u8(0),
                Some(l2) => {
                    h.u8(1);
                    hash_vars(h, l2);
                }
            }
        }
        Constraint::NoOverlap {
            origins,
            lengths,
            zero_ignored,
        } => {
            hash_vars(h, origins);
            hash_ints(h, lengths);
            h.u8(*zero_ignored as u8);
        }
        Constraint::Cumulative {
            origins,
            lengths,
            heights,
            limit,
        } => {
            hash_vars(h, origins);
            hash_ints(h, lengths);
            hash_ints(h, heights);
            h.i64(*limit);
        }
        Constraint::BinPacking {
            scope,
            sizes,
            limits,
        } => {
            hash_vars(h, scope);
            hash_ints(h, sizes);
            hash_ints(h, limits);
        }
        Constraint::Knapsack {
            scope,
            weights,
            limit,
            profits,
            op,
            rhs,
        } => {
            hash_vars(h, scope);
            hash_ints(h, weights);
            h.i64(*limit);
            hash_ints(h, profits);
            h.str(op.name());
            hash_operand(h, rhs);
        }
        Constraint::Instantiation { scope, values } => {
            hash_vars(h, scope);
            hash_ints(h, values);
        }
        Constraint::Slide {
            list,
            offset,
            template,
        } => {
            hash_vars(h, list);
            h.usize(*offset);
            hash_constraint(h, template);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Instance {
        let mut b = InstanceBuilder::new("tiny");
        let x = b.add_var("x", Domain::range(0, 2).unwrap());
        b.add_constraint(Constraint::Intension(Expr::ne(Expr::var(x), Expr::cst(1))));
        b.build()
    }

    #[test]
    fn deep_copy_has_equal_signature() {
        let a = tiny();
        let b = a.clone();
        assert_eq!(a.signature(), b.signature());
    }

    #[test]
    fn semantic_edit_changes_signature() {
        let a = tiny();
        let mut b = a.clone();
        if let Constraint::Intension(Expr::Ne(_, rhs)) = &mut b.constraints[0] {
            **rhs = Expr::cst(2);
        }
        assert_ne!(a.signature(), b.signature());
    }

    #[test]
    fn tuple_order_does_not_matter() {
        let mk = |tuples: Vec<Vec<TupleEntry>>| {
            let mut b = InstanceBuilder::new("t");
            let x = b.add_var("x", Domain::range(0, 2).unwrap());
            let y = b.add_var("y", Domain::range(0, 2).unwrap());
            b.add_constraint(Constraint::Extension {
                scope: vec![x, y],
                tuples,
                positive: true,
                star_allowed: false,
            });
            b.build()
        };
        use TupleEntry::Val;
        let a = mk(vec![vec![Val(0), Val(1)], vec![Val(2), Val(0)]]);
        let b = mk(vec![vec![Val(2), Val(0)], vec![Val(0), Val(1)]]);
        assert_eq!(a.signature(), b.signature());

        let c = mk(vec![vec![Val(0), Val(1)]]);
        assert_ne!(a.signature(), c.signature());
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 3).unwrap());
        b.add_constraint(Constraint::Intension(Expr::InSet(
            Box::new(Expr::var(x)),
            vec![3, 1, 1, 2],
        )));
        let mut inst = b.build();
        inst.canonicalize();
        let once = inst.signature();
        inst.canonicalize();
        assert_eq!(once, inst.signature());
    }

    #[test]
    fn duplicate_names_are_diagnosed() {
        let mut b = InstanceBuilder::new("t");
        b.add_var("x", Domain::range(0, 1).unwrap());
        b.add_var("x", Domain::range(0, 1).unwrap());
        let inst = b.build();
        let ds = validate_instance(&inst);
        assert_eq!(ds.len(), 1);
        assert!(ds[0].message.contains("duplicate name"));
    }

    #[test]
    fn tuple_arity_mismatch_is_diagnosed() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 1).unwrap());
        let y = b.add_var("y", Domain::range(0, 1).unwrap());
        let z = b.add_var("z", Domain::range(0, 1).unwrap());
        b.add_constraint(Constraint::Extension {
            scope: vec![x, y, z],
            tuples: vec![vec![TupleEntry::Val(0), TupleEntry::Val(1)]],
            positive: true,
            star_allowed: false,
        });
        let ds = validate_instance(&b.build());
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].constraint, Some(0));
    }
}
