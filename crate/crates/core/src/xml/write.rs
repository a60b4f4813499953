use thiserror::Error;

use super::expr_text::render_expr;
use crate::ir::{
    CmpOp, Constraint, Instance, ObjectiveExpr, OccurSpec, Operand, Sense, TupleEntry, VarId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WriteError {
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("instance is not well formed: {0}")]
    Invalid(String),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

struct Writer<'a> {
    inst: &'a Instance,
    out: String,
    depth: usize,
}

impl<'a> Writer<'a> {
    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn open(&mut self, tag: &str, attrs: &[(&str, String)]) {
        self.indent();
        self.out.push('<');
        self.out.push_str(tag);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            self.out.push_str(&escape(v));
            self.out.push('"');
        }
        self.out.push_str(">\n");
        self.depth += 1;
    }

    fn close(&mut self, tag: &str) {
        self.depth -= 1;
        self.indent();
        self.out.push_str("</");
        self.out.push_str(tag);
        self.out.push_str(">\n");
    }

    /// `<tag attrs>text</tag>` on one line.
    fn leaf(&mut self, tag: &str, attrs: &[(&str, String)], text: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(tag);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            self.out.push_str(&escape(v));
            self.out.push('"');
        }
        self.out.push('>');
        self.out.push_str(&escape(text));
        self.out.push_str("</");
        self.out.push_str(tag);
        self.out.push_str(">\n");
    }

    fn empty(&mut self, tag: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(tag);
        self.out.push_str("/>\n");
    }

    fn names(&self, vars: &[VarId]) -> String {
        vars.iter()
            .map(|v| self.inst.var(*v).name.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn operand(&self, o: &Operand) -> String {
        match o {
            Operand::Const(c) => c.to_string(),
            Operand::Var(v) => self.inst.var(*v).name.clone(),
        }
    }

    fn condition(&self, op: CmpOp, rhs: &Operand) -> String {
        format!("({},{})", op.name(), self.operand(rhs))
    }
}

fn ints(vals: &[i64]) -> String {
    vals.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn tuples_text(tuples: &[Vec<TupleEntry>], unary: bool) -> String {
    let cell = |e: &TupleEntry| match e {
        TupleEntry::Val(v) => v.to_string(),
        TupleEntry::Star => "*".to_string(),
    };
    if unary {
        // unary tables are written as a plain value list
        tuples
            .iter()
            .map(|t| cell(&t[0]))
            .collect::<Vec<_>>()
            .join(" ")
    } else {
        tuples
            .iter()
            .map(|t| format!("({})", t.iter().map(cell).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join("")
    }
}

fn transitions_text(ts: &[(String, i64, String)]) -> String {
    ts.iter()
        .map(|(a, v, b)| format!("({a},{v},{b})"))
        .collect::<Vec<_>>()
        .join("")
}

/// Serializes a validated instance to the canonical XCSP3-core subset.
/// Byte output is deterministic: signature-equal instances produce identical
/// documents.
pub fn write_xcsp3(inst: &Instance) -> Result<String, WriteError> {
    let mut w = Writer {
        inst,
        out: String::new(),
        depth: 0,
    };
    w.out
        .push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let ty = if inst.is_cop() { "COP" } else { "CSP" };
    w.open(
        "instance",
        &[("format", "XCSP3".into()), ("type", ty.into())],
    );

    w.open("variables", &[]);
    for v in &inst.variables {
        w.leaf("var", &[("id", v.name.clone())], &v.domain.to_string());
    }
    w.close("variables");

    if inst.constraints.is_empty() {
        w.empty("constraints");
    } else {
        w.open("constraints", &[]);
        for (i, c) in inst.constraints.iter().enumerate() {
            let mut canon = c.clone();
            canon.canonicalize();
            let tags = inst.tags.get(i).map(|t| t.join(" ")).unwrap_or_default();
            write_constraint(&mut w, &canon, &tags)?;
        }
        w.close("constraints");
    }

    if let Some(obj) = &inst.objective {
        w.open("objectives", &[]);
        let tag = match obj.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        match &obj.expr {
            ObjectiveExpr::Var(v) => w.leaf(tag, &[], &inst.var(*v).name),
            ObjectiveExpr::Expr(e) => w.leaf(tag, &[], &render_expr(e, inst)),
            ObjectiveExpr::Sum { scope, coeffs } => {
                w.open(tag, &[("type", "sum".into())]);
                let list = w.names(scope);
                w.leaf("list", &[], &list);
                w.leaf("coeffs", &[], &ints(coeffs));
                w.close(tag);
            }
            ObjectiveExpr::Maximum(s) => {
                w.open(tag, &[("type", "maximum".into())]);
                let list = w.names(s);
                w.leaf("list", &[], &list);
                w.close(tag);
            }
            ObjectiveExpr::Minimum(s) => {
                w.open(tag, &[("type", "minimum".into())]);
                let list = w.names(s);
                w.leaf("list", &[], &list);
                w.close(tag);
            }
        }
        w.close("objectives");
    }

    w.close("instance");
    Ok(w.out)
}

fn class_attr(tags: &str) -> Vec<(&'static str, String)> {
    if tags.is_empty() {
        vec![]
    } else {
        vec![("class", tags.to_string())]
    }
}

fn write_constraint(w: &mut Writer, c: &Constraint, tags: &str) -> Result<(), WriteError> {
    let cls = class_attr(tags);
    match c {
        Constraint::Intension(e) => {
            let text = render_expr(e, w.inst);
            w.leaf("intension", &cls, &text);
        }
        Constraint::Extension {
            scope,
            tuples,
            positive,
            ..
        } => {
            w.open("extension", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            let tag = if *positive { "supports" } else { "conflicts" };
            let body = tuples_text(tuples, scope.len() == 1);
            if body.is_empty() {
                w.empty(tag);
            } else {
                w.leaf(tag, &[], &body);
            }
            w.close("extension");
        }
        Constraint::Regular { scope, automaton } => {
            w.open("regular", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            w.leaf(
                "transitions",
                &[],
                &transitions_text(&automaton.transitions),
            );
            w.leaf("start", &[], &automaton.start);
            w.leaf("final", &[], &automaton.finals.join(" "));
            w.close("regular");
        }
        Constraint::Mdd { scope, graph } => {
            // the first transition must leave the root so the root can be
            // recovered on parse; the terminal is the unique sink state
            match graph.transitions.first() {
                Some((from, _, _)) if *from == graph.root => {}
                _ => {
                    return Err(WriteError::Invalid(
                        "mdd transitions must start from the root".into(),
                    ))
                }
            }
            w.open("mdd", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            w.leaf("transitions", &[], &transitions_text(&graph.transitions));
            w.close("mdd");
        }
        Constraint::AllDifferent { scope, except } => {
            if except.is_empty() {
                let list = w.names(scope);
                w.leaf("allDifferent", &cls, &list);
            } else {
                w.open("allDifferent", &cls);
                let list = w.names(scope);
                w.leaf("list", &[], &list);
                w.leaf("except", &[], &ints(except));
                w.close("allDifferent");
            }
        }
        Constraint::AllDifferentList { lists } => {
            w.open("allDifferent", &cls);
            for l in lists {
                let list = w.names(l);
                w.leaf("list", &[], &list);
            }
            w.close("allDifferent");
        }
        Constraint::AllEqual { scope } => {
            let list = w.names(scope);
            w.leaf("allEqual", &cls, &list);
        }
        Constraint::Ordered { scope, lengths, op } => {
            w.open("ordered", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            if let Some(ls) = lengths {
                w.leaf("lengths", &[], &ints(ls));
            }
            w.leaf("operator", &[], op.name());
            w.close("ordered");
        }
        Constraint::Lex { lists, op } => {
            w.open("lex", &cls);
            for l in lists {
                let list = w.names(l);
                w.leaf("list", &[], &list);
            }
            w.leaf("operator", &[], op.name());
            w.close("lex");
        }
        Constraint::Precedence { scope, values } => {
            w.open("precedence", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            w.leaf("values", &[], &ints(values));
            w.close("precedence");
        }
        Constraint::Sum {
            scope,
            coeffs,
            op,
            rhs,
        } => {
            w.open("sum", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            w.leaf("coeffs", &[], &ints(coeffs));
            let cond = w.condition(*op, rhs);
            w.leaf("condition", &[], &cond);
            w.close("sum");
        }
        Constraint::Count {
            scope,
            values,
            op,
            rhs,
        } => {
            w.open("count", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            w.leaf("values", &[], &ints(values));
            let cond = w.condition(*op, rhs);
            w.leaf("condition", &[], &cond);
            w.close("count");
        }
        Constraint::NValues { scope, op, rhs } => {
            w.open("nValues", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            let cond = w.condition(*op, rhs);
            w.leaf("condition", &[], &cond);
            w.close("nValues");
        }
        Constraint::Cardinality {
            scope,
            values,
            occurs,
            closed,
        } => {
            w.open("cardinality", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            let vattrs: Vec<(&str, String)> = if *closed {
                vec![("closed", "true".into())]
            } else {
                vec![]
            };
            w.leaf("values", &vattrs, &ints(values));
            let occ = occurs
                .iter()
                .map(|o| match o {
                    OccurSpec::Exact(k) => k.to_string(),
                    OccurSpec::Range(lo, hi) => format!("{lo}..{hi}"),
                })
                .collect::<Vec<_>>()
                .join(" ");
            w.leaf("occurs", &[], &occ);
            w.close("cardinality");
        }
        Constraint::Maximum { scope, op, rhs } => {
            w.open("maximum", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            let cond = w.condition(*op, rhs);
            w.leaf("condition", &[], &cond);
            w.close("maximum");
        }
        Constraint::Minimum { scope, op, rhs } => {
            w.open("minimum", &cls);
            let list = w.names(scope);
            w.leaf("list", &[], &list);
            let cond = w.condition(*op, rhs);
            w.leaf("condition", &[], &cond);
            w.close("minimum");
        }
        Constraint::Element { list, index, value } => {
            w.open("element", &cls);
            let names = w.names(list);
            w.leaf("list", &[], &names);
            let idx = w.inst.var(*index).name.clone();
            w.leaf("index", &[], &idx);
            let val = w.operand(value);
            w.leaf("value", &[], &val);
            w.close("element");
        }
        Constraint::Channel { list, list2 } => {
            w.open("channel", &cls);
            let names = w.names(list);
            w.leaf("list", &[], &names);
            if let Some(l2) = list2 {
                let names2 = w.names(l2);
                w.leaf("list", &[], &names2);
            }
            w.close("channel");
        }
        Constraint::NoOverlap {
            origins,
            lengths,
            zero_ignored,
        } => {
            let mut attrs = cls.clone();
            if !*zero_ignored {
                attrs.push(("zeroIgnored", "false".into()));
            }
            w.open("noOverlap", &attrs);
            let names = w.names(origins);
            w.leaf("origins", &[], &names);
            w.leaf("lengths", &[], &ints(lengths));
            w.close("noOverlap");
        }
        Constraint::Cumulative {
            origins,
            lengths,
            heights,
            limit,
        } => {
            w.open("cumulative", &cls);
            let names = w.names(origins);
            w.leaf("origins", &[], &names);
            w.leaf("lengths", &[], &ints(lengths));
            w.leaf("heights", &[], &ints(heights));
            w.leaf("condition", &[], &format!("(le,{limit})"));
            w.close("cumulative");
        }
        Constraint::BinPacking {
            scope,
            sizes,
            limits,
        } => {
            w.open("binPacking", &cls);
            let names = w.names(scope);
            w.leaf("list", &[], &names);
            w.leaf("sizes", &[], &ints(sizes));
            w.leaf("limits", &[], &ints(limits));
            w.close("binPacking");
        }
        Constraint::Knapsack {
            scope,
            weights,
            limit,
            profits,
            op,
            rhs,
        } => {
            w.open("knapsack", &cls);
            let names = w.names(scope);
            w.leaf("list", &[], &names);
            w.leaf("weights", &[], &ints(weights));
            w.leaf("profits", &[], &ints(profits));
            w.leaf("limit", &[], &limit.to_string());
            let cond = w.condition(*op, rhs);
            w.leaf("condition", &[], &cond);
            w.close("knapsack");
        }
        Constraint::Circuit { scope } => {
            let names = w.names(scope);
            w.leaf("circuit", &cls, &names);
        }
        Constraint::Instantiation { scope, values } => {
            w.open("instantiation", &cls);
            let names = w.names(scope);
            w.leaf("list", &[], &names);
            w.leaf("values", &[], &ints(values));
            w.close("instantiation");
        }
        Constraint::Slide {
            list,
            offset,
            template,
        } => {
            w.open("slide", &cls);
            let attrs: Vec<(&str, String)> = if *offset != 1 {
                vec![("offset", offset.to_string())]
            } else {
                vec![]
            };
            let names = w.names(list);
            w.leaf("list", &attrs, &names);
            // render the template over the first window's real variables
            let arity = crate::ir::slide_arity(template);
            if arity == 0 || arity > list.len() {
                return Err(WriteError::Invalid(
                    "slide template arity out of range".into(),
                ));
            }
            let grounded = remap_template(template, &list[..arity]);
            write_constraint(w, &grounded, "")?;
            w.close("slide");
        }
    }
    Ok(())
}

/// Replaces pseudo ids 0..arity-1 in a slide template with real variables.
fn remap_template(template: &Constraint, window: &[VarId]) -> Constraint {
    use crate::ir::Expr;
    fn remap_expr(e: &Expr, window: &[VarId]) -> Expr {
        let r = |x: &Expr| Box::new(remap_expr(x, window));
        let rv = |xs: &[Expr]| xs.iter().map(|x| remap_expr(x, window)).collect();
        match e {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) => Expr::Var(window[v.0]),
            Expr::Neg(a) => Expr::Neg(r(a)),
            Expr::Abs(a) => Expr::Abs(r(a)),
            Expr::Not(a) => Expr::Not(r(a)),
            Expr::Add(xs) => Expr::Add(rv(xs)),
            Expr::Mul(xs) => Expr::Mul(rv(xs)),
            Expr::Min(xs) => Expr::Min(rv(xs)),
            Expr::Max(xs) => Expr::Max(rv(xs)),
            Expr::And(xs) => Expr::And(rv(xs)),
            Expr::Or(xs) => Expr::Or(rv(xs)),
            Expr::Sub(a, b) => Expr::Sub(r(a), r(b)),
            Expr::DivFloor(a, b) => Expr::DivFloor(r(a), r(b)),
            Expr::Mod(a, b) => Expr::Mod(r(a), r(b)),
            Expr::Dist(a, b) => Expr::Dist(r(a), r(b)),
            Expr::Eq(a, b) => Expr::Eq(r(a), r(b)),
            Expr::Ne(a, b) => Expr::Ne(r(a), r(b)),
            Expr::Lt(a, b) => Expr::Lt(r(a), r(b)),
            Expr::Le(a, b) => Expr::Le(r(a), r(b)),
            Expr::Gt(a, b) => Expr::Gt(r(a), r(b)),
            Expr::Ge(a, b) => Expr::Ge(r(a), r(b)),
            Expr::Imp(a, b) => Expr::Imp(r(a), r(b)),
            Expr::Iff(a, b) => Expr::Iff(r(a), r(b)),
            Expr::Xor(a, b) => Expr::Xor(r(a), r(b)),
            Expr::IfThenElse(c, t, e2) => Expr::IfThenElse(r(c), r(t), r(e2)),
            Expr::InSet(a, set) => Expr::InSet(r(a), set.clone()),
        }
    }
    let rl = |vs: &[VarId]| vs.iter().map(|v| window[v.0]).collect::<Vec<_>>();
    match template {
        Constraint::Intension(e) => Constraint::Intension(remap_expr(e, window)),
        Constraint::Extension {
            scope,
            tuples,
            positive,
            star_allowed,
        } => Constraint::Extension {
            scope: rl(scope),
            tuples: tuples.clone(),
            positive: *positive,
            star_allowed: *star_allowed,
        },
        // slide templates are restricted to intension and extension forms
        other => other.clone(),
    }
}
