use std::collections::HashMap;

use thiserror::Error;

use super::expr_text::{parse_expr_text, ExprTextError};
use crate::ir::{
    Automaton, CmpOp, Constraint, Domain, Expr, Instance, InstanceBuilder, MddGraph, ObjectiveExpr,
    OccurSpec, Operand, OrderOp, Sense, TupleEntry, VarId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("XML syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: unsupported construct ({what})")]
    Unsupported { path: String, what: String },
}

fn invalid(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

fn unsupported(path: &str, what: impl Into<String>) -> ParseError {
    ParseError::Unsupported {
        path: path.to_string(),
        what: what.into(),
    }
}

type Node<'a, 'input> = roxmltree::Node<'a, 'input>;

/// Element names from the wider format that this subset deliberately rejects.
const KNOWN_UNSUPPORTED: &[&str] = &[
    "group",
    "block",
    "array",
    "matrix",
    "annotations",
    "smart",
    "aliases",
    "not",
    "and",
    "or",
];

fn check_attrs(node: &Node, path: &str, allowed: &[&str]) -> Result<(), ParseError> {
    for a in node.attributes() {
        if !allowed.contains(&a.name()) {
            return Err(invalid(path, format!("unknown attribute {:?}", a.name())));
        }
    }
    Ok(())
}

fn text_of(node: &Node) -> String {
    node.text().unwrap_or("").trim().to_string()
}

fn child_elements<'a, 'input>(node: &Node<'a, 'input>) -> Vec<Node<'a, 'input>> {
    node.children().filter(|c| c.is_element()).collect()
}

fn parse_i64(tok: &str, path: &str) -> Result<i64, ParseError> {
    tok.parse::<i64>().map_err(|_| {
        if tok.contains('.') && !tok.contains("..") {
            unsupported(path, format!("real value {tok:?}"))
        } else {
            invalid(path, format!("expected an integer, got {tok:?}"))
        }
    })
}

fn parse_int_list(text: &str, path: &str) -> Result<Vec<i64>, ParseError> {
    text.split_whitespace()
        .map(|t| parse_i64(t, path))
        .collect()
}

fn parse_domain(text: &str, path: &str) -> Result<Domain, ParseError> {
    let mut ranges = Vec::new();
    for tok in text.split_whitespace() {
        if let Some((a, b)) = tok.split_once("..") {
            let lo = parse_i64(a, path)?;
            let hi = parse_i64(b, path)?;
            if lo > hi {
                return Err(invalid(path, format!("empty range {tok}")));
            }
            ranges.push((lo, hi));
        } else {
            let v = parse_i64(tok, path)?;
            ranges.push((v, v));
        }
    }
    Domain::from_ranges(&ranges).map_err(|e| invalid(path, e.to_string()))
}

struct Ctx {
    names: Vec<String>,
    by_name: HashMap<String, VarId>,
}

impl Ctx {
    fn var(&self, name: &str, path: &str) -> Result<VarId, ParseError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| invalid(path, format!("unknown variable {name:?}")))
    }

    fn var_list(&self, text: &str, path: &str) -> Result<Vec<VarId>, ParseError> {
        text.split_whitespace().map(|t| self.var(t, path)).collect()
    }

    fn operand(&self, text: &str, path: &str) -> Result<Operand, ParseError> {
        if let Ok(v) = text.parse::<i64>() {
            Ok(Operand::Const(v))
        } else {
            Ok(Operand::Var(self.var(text, path)?))
        }
    }

    fn expr(&self, text: &str, path: &str) -> Result<Expr, ParseError> {
        let map: HashMap<&str, VarId> = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), VarId(i)))
            .collect();
        parse_expr_text(text, &map).map_err(|e| match e {
            ExprTextError::UnknownFunction(f) => unsupported(path, format!("operator {f:?}")),
            ExprTextError::UnknownVariable(v) => invalid(path, format!("unknown variable {v:?}")),
            ExprTextError::Syntax(m) => invalid(path, m),
        })
    }
}

fn parse_condition(text: &str, ctx: &Ctx, path: &str) -> Result<(CmpOp, Operand), ParseError> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| invalid(path, format!("malformed condition {text:?}")))?;
    let (op_s, rhs_s) = inner
        .split_once(',')
        .ok_or_else(|| invalid(path, format!("malformed condition {text:?}")))?;
    let op = match op_s.trim() {
        "lt" => CmpOp::Lt,
        "le" => CmpOp::Le,
        "gt" => CmpOp::Gt,
        "ge" => CmpOp::Ge,
        "eq" => CmpOp::Eq,
        "ne" => CmpOp::Ne,
        other => return Err(unsupported(path, format!("condition operator {other:?}"))),
    };
    Ok((op, ctx.operand(rhs_s.trim(), path)?))
}

fn parse_order_op(text: &str, path: &str) -> Result<OrderOp, ParseError> {
    match text.trim() {
        "lt" => Ok(OrderOp::Lt),
        "le" => Ok(OrderOp::Le),
        "gt" => Ok(OrderOp::Gt),
        "ge" => Ok(OrderOp::Ge),
        other => Err(invalid(path, format!("unknown operator {other:?}"))),
    }
}

fn parse_tuples(text: &str, arity: usize, path: &str) -> Result<Vec<Vec<TupleEntry>>, ParseError> {
    let entry = |tok: &str| -> Result<TupleEntry, ParseError> {
        if tok == "*" {
            Ok(TupleEntry::Star)
        } else {
            Ok(TupleEntry::Val(parse_i64(tok, path)?))
        }
    };
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if arity == 1 && !text.starts_with('(') {
        return text
            .split_whitespace()
            .map(|t| Ok(vec![entry(t)?]))
            .collect();
    }
    let mut out = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| invalid(path, "expected '(' starting a tuple"))?;
        let end = body
            .find(')')
            .ok_or_else(|| invalid(path, "unterminated tuple"))?;
        let cells: Vec<TupleEntry> = body[..end]
            .split(',')
            .map(|t| entry(t.trim()))
            .collect::<Result<_, _>>()?;
        out.push(cells);
        rest = &body[end + 1..];
    }
    Ok(out)
}

fn parse_transitions(text: &str, path: &str) -> Result<Vec<(String, i64, String)>, ParseError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| invalid(path, "expected '(' starting a transition"))?;
        let end = body
            .find(')')
            .ok_or_else(|| invalid(path, "unterminated transition"))?;
        let parts: Vec<&str> = body[..end].split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(invalid(
                path,
                format!("transition needs 3 fields, got {}", parts.len()),
            ));
        }
        out.push((
            parts[0].to_string(),
            parse_i64(parts[1], path)?,
            parts[2].to_string(),
        ));
        rest = &body[end + 1..];
    }
    Ok(out)
}

/// Splits the children of a constraint element into a name -> nodes map,
/// preserving order per name and rejecting unknown child names.
fn children_by_name<'a, 'input>(
    node: &Node<'a, 'input>,
    path: &str,
    allowed: &[&str],
) -> Result<HashMap<String, Vec<Node<'a, 'input>>>, ParseError> {
    let mut out: HashMap<String, Vec<Node>> = HashMap::new();
    for c in child_elements(node) {
        let name = c.tag_name().name().to_string();
        if !allowed.contains(&name.as_str()) {
            return Err(invalid(path, format!("unexpected element <{name}>")));
        }
        out.entry(name).or_default().push(c);
    }
    Ok(out)
}

fn single<'a, 'input>(
    map: &HashMap<String, Vec<Node<'a, 'input>>>,
    name: &str,
    path: &str,
) -> Result<Node<'a, 'input>, ParseError> {
    match map.get(name).map(Vec::as_slice) {
        Some([n]) => Ok(*n),
        Some(_) => Err(invalid(path, format!("repeated element <{name}>"))),
        None => Err(invalid(path, format!("missing element <{name}>"))),
    }
}

/// Parses a document produced by the canonical writer (or hand-written in the
/// same subset). Unknown or out-of-subset constructs are rejected, not
/// skipped; any input either yields an instance or a structured error.
pub fn parse_xcsp3(text: &str) -> Result<Instance, ParseError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| ParseError::Syntax {
        line: e.pos().row as usize,
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "instance" {
        return Err(invalid(
            "/",
            format!("expected <instance>, got <{}>", root.tag_name().name()),
        ));
    }
    check_attrs(&root, "instance", &["format", "type"])?;
    if root.attribute("format") != Some("XCSP3") {
        return Err(invalid("instance", "format attribute must be \"XCSP3\""));
    }
    let ty = root.attribute("type").unwrap_or("CSP");
    if ty != "CSP" && ty != "COP" {
        return Err(unsupported("instance", format!("framework {ty:?}")));
    }

    let mut variables_node = None;
    let mut constraints_node = None;
    let mut objectives_node = None;
    for c in child_elements(&root) {
        match c.tag_name().name() {
            "variables" if variables_node.is_none() => variables_node = Some(c),
            "constraints" if constraints_node.is_none() => constraints_node = Some(c),
            "objectives" if objectives_node.is_none() => objectives_node = Some(c),
            other => return Err(invalid("instance", format!("unexpected element <{other}>"))),
        }
    }
    let variables_node =
        variables_node.ok_or_else(|| invalid("instance", "missing <variables>"))?;
    let constraints_node =
        constraints_node.ok_or_else(|| invalid("instance", "missing <constraints>"))?;

    let mut builder = InstanceBuilder::new("parsed");
    let mut ctx = Ctx {
        names: Vec::new(),
        by_name: HashMap::new(),
    };
    for (i, v) in child_elements(&variables_node).into_iter().enumerate() {
        let path = format!("variables/var[{i}]");
        match v.tag_name().name() {
            "var" => {}
            "array" => return Err(unsupported(&path, "variable arrays")),
            other => return Err(invalid(&path, format!("unexpected element <{other}>"))),
        }
        check_attrs(&v, &path, &["id"])?;
        let id = v
            .attribute("id")
            .ok_or_else(|| invalid(&path, "missing id attribute"))?
            .to_string();
        if ctx.by_name.contains_key(&id) {
            return Err(invalid(&path, format!("duplicate variable {id:?}")));
        }
        let dom = parse_domain(&text_of(&v), &path)?;
        let vid = builder.add_var(id.clone(), dom);
        ctx.by_name.insert(id.clone(), vid);
        ctx.names.push(id);
    }

    for (i, c) in child_elements(&constraints_node).into_iter().enumerate() {
        let name = c.tag_name().name().to_string();
        let path = format!("constraints/{name}[{i}]");
        let (constraint, tags) = parse_constraint(&c, &ctx, &path)?;
        let idx = builder.add_constraint(constraint);
        for t in tags {
            builder.tag(idx, &t);
        }
    }

    if let Some(objs) = objectives_node {
        if ty != "COP" {
            return Err(invalid("instance", "objectives present in a CSP document"));
        }
        let kids = child_elements(&objs);
        if kids.len() != 1 {
            return Err(unsupported("objectives", "multiple objectives"));
        }
        let o = kids[0];
        let sense = match o.tag_name().name() {
            "minimize" => Sense::Minimize,
            "maximize" => Sense::Maximize,
            other => {
                return Err(invalid(
                    "objectives",
                    format!("unexpected element <{other}>"),
                ))
            }
        };
        check_attrs(&o, "objectives", &["type"])?;
        let obj_expr = match o.attribute("type") {
            None => {
                let text = text_of(&o);
                match ctx.by_name.get(&text) {
                    Some(v) => ObjectiveExpr::Var(*v),
                    None => ObjectiveExpr::Expr(ctx.expr(&text, "objectives")?),
                }
            }
            Some("sum") => {
                let map = children_by_name(&o, "objectives", &["list", "coeffs"])?;
                let scope =
                    ctx.var_list(&text_of(&single(&map, "list", "objectives")?), "objectives")?;
                let coeffs = match map.get("coeffs") {
                    Some(_) => parse_int_list(
                        &text_of(&single(&map, "coeffs", "objectives")?),
                        "objectives",
                    )?,
                    None => vec![1; scope.len()],
                };
                ObjectiveExpr::Sum { scope, coeffs }
            }
            Some("maximum") | Some("minimum") => {
                let map = children_by_name(&o, "objectives", &["list"])?;
                let scope =
                    ctx.var_list(&text_of(&single(&map, "list", "objectives")?), "objectives")?;
                if o.attribute("type") == Some("maximum") {
                    ObjectiveExpr::Maximum(scope)
                } else {
                    ObjectiveExpr::Minimum(scope)
                }
            }
            Some(other) => {
                return Err(unsupported(
                    "objectives",
                    format!("objective type {other:?}"),
                ))
            }
        };
        builder.set_objective(sense, obj_expr);
    } else if ty == "COP" {
        return Err(invalid("instance", "COP document without <objectives>"));
    }

    Ok(builder.build())
}

fn class_tags(node: &Node) -> Vec<String> {
    node.attribute("class")
        .map(|c| c.split_whitespace().map(str::to_string).collect())
        .unwrap_or_default()
}

fn parse_constraint(
    node: &Node,
    ctx: &Ctx,
    path: &str,
) -> Result<(Constraint, Vec<String>), ParseError> {
    let name = node.tag_name().name();
    let tags = class_tags(node);
    let kids = child_elements(node);
    let has_kids = !kids.is_empty();

    let c = match name {
        "intension" => {
            check_attrs(node, path, &["class"])?;
            Constraint::Intension(ctx.expr(&text_of(node), path)?)
        }
        "extension" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "supports", "conflicts"])?;
            let scope = ctx.var_list(&text_of(&single(&map, "list", path)?), path)?;
            let (positive, tnode) = if map.contains_key("supports") {
                (true, single(&map, "supports", path)?)
            } else {
                (false, single(&map, "conflicts", path)?)
            };
            let tuples = parse_tuples(&text_of(&tnode), scope.len(), path)?;
            let star_allowed = tuples.iter().flatten().any(|e| *e == TupleEntry::Star);
            Constraint::Extension {
                scope,
                tuples,
                positive,
                star_allowed,
            }
        }
        "regular" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "transitions", "start", "final"])?;
            Constraint::Regular {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                automaton: Automaton {
                    start: text_of(&single(&map, "start", path)?),
                    finals: text_of(&single(&map, "final", path)?)
                        .split_whitespace()
                        .map(str::to_string)
                        .collect(),
                    transitions: parse_transitions(
                        &text_of(&single(&map, "transitions", path)?),
                        path,
                    )?,
                },
            }
        }
        "mdd" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "transitions"])?;
            let transitions =
                parse_transitions(&text_of(&single(&map, "transitions", path)?), path)?;
            let root = transitions
                .first()
                .map(|t| t.0.clone())
                .ok_or_else(|| invalid(path, "mdd without transitions"))?;
            let mut terminal = None;
            for (_, _, to) in &transitions {
                if !transitions.iter().any(|(from, _, _)| from == to) {
                    match &terminal {
                        None => terminal = Some(to.clone()),
                        Some(t) if t == to => {}
                        Some(_) => return Err(invalid(path, "mdd has multiple sink states")),
                    }
                }
            }
            let terminal = terminal.ok_or_else(|| invalid(path, "mdd has no sink state"))?;
            Constraint::Mdd {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                graph: MddGraph {
                    root,
                    terminal,
                    transitions,
                },
            }
        }
        "allDifferent" => {
            check_attrs(node, path, &["class"])?;
            if !has_kids {
                Constraint::AllDifferent {
                    scope: ctx.var_list(&text_of(node), path)?,
                    except: vec![],
                }
            } else {
                let map = children_by_name(node, path, &["list", "except"])?;
                let lists = map.get("list").cloned().unwrap_or_default();
                match lists.len() {
                    0 => return Err(invalid(path, "allDifferent without <list>")),
                    1 => {
                        let scope = ctx.var_list(&text_of(&lists[0]), path)?;
                        let except = match map.get("except") {
                            Some(_) => {
                                parse_int_list(&text_of(&single(&map, "except", path)?), path)?
                            }
                            None => vec![],
                        };
                        Constraint::AllDifferent { scope, except }
                    }
                    _ => {
                        if map.contains_key("except") {
                            return Err(unsupported(path, "except on allDifferent lists"));
                        }
                        let ls = lists
                            .iter()
                            .map(|l| ctx.var_list(&text_of(l), path))
                            .collect::<Result<_, _>>()?;
                        Constraint::AllDifferentList { lists: ls }
                    }
                }
            }
        }
        "allEqual" => {
            check_attrs(node, path, &["class"])?;
            Constraint::AllEqual {
                scope: ctx.var_list(&text_of(node), path)?,
            }
        }
        "ordered" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "lengths", "operator"])?;
            Constraint::Ordered {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                lengths: match map.get("lengths") {
                    Some(_) => Some(parse_int_list(
                        &text_of(&single(&map, "lengths", path)?),
                        path,
                    )?),
                    None => None,
                },
                op: parse_order_op(&text_of(&single(&map, "operator", path)?), path)?,
            }
        }
        "lex" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "operator"])?;
            let lists = map
                .get("list")
                .map(|ls| ls.iter().map(|l| ctx.var_list(&text_of(l), path)).collect())
                .transpose()?
                .unwrap_or_default();
            Constraint::Lex {
                lists,
                op: parse_order_op(&text_of(&single(&map, "operator", path)?), path)?,
            }
        }
        "precedence" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "values"])?;
            Constraint::Precedence {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                values: parse_int_list(&text_of(&single(&map, "values", path)?), path)?,
            }
        }
        "sum" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "coeffs", "condition"])?;
            let scope = ctx.var_list(&text_of(&single(&map, "list", path)?), path)?;
            let coeffs = match map.get("coeffs") {
                Some(_) => parse_int_list(&text_of(&single(&map, "coeffs", path)?), path)?,
                None => vec![1; scope.len()],
            };
            let (op, rhs) =
                parse_condition(&text_of(&single(&map, "condition", path)?), ctx, path)?;
            Constraint::Sum {
                scope,
                coeffs,
                op,
                rhs,
            }
        }
        "count" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "values", "condition"])?;
            let (op, rhs) =
                parse_condition(&text_of(&single(&map, "condition", path)?), ctx, path)?;
            Constraint::Count {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                values: parse_int_list(&text_of(&single(&map, "values", path)?), path)?,
                op,
                rhs,
            }
        }
        "nValues" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "condition"])?;
            let (op, rhs) =
                parse_condition(&text_of(&single(&map, "condition", path)?), ctx, path)?;
            Constraint::NValues {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                op,
                rhs,
            }
        }
        "cardinality" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "values", "occurs"])?;
            let values_node = single(&map, "values", path)?;
            check_attrs(&values_node, path, &["closed"])?;
            let closed = match values_node.attribute("closed") {
                None => false,
                Some("true") => true,
                Some("false") => false,
                Some(other) => return Err(invalid(path, format!("bad closed flag {other:?}"))),
            };
            let occurs_text = text_of(&single(&map, "occurs", path)?);
            let occurs = occurs_text
                .split_whitespace()
                .map(|tok| -> Result<OccurSpec, ParseError> {
                    if let Some((a, b)) = tok.split_once("..") {
                        Ok(OccurSpec::Range(parse_i64(a, path)?, parse_i64(b, path)?))
                    } else {
                        Ok(OccurSpec::Exact(parse_i64(tok, path)?))
                    }
                })
                .collect::<Result<_, _>>()?;
            Constraint::Cardinality {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                values: parse_int_list(&text_of(&values_node), path)?,
                occurs,
                closed,
            }
        }
        "maximum" | "minimum" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "condition"])?;
            let scope = ctx.var_list(&text_of(&single(&map, "list", path)?), path)?;
            let (op, rhs) =
                parse_condition(&text_of(&single(&map, "condition", path)?), ctx, path)?;
            if name == "maximum" {
                Constraint::Maximum { scope, op, rhs }
            } else {
                Constraint::Minimum { scope, op, rhs }
            }
        }
        "element" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "index", "value"])?;
            Constraint::Element {
                list: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                index: ctx.var(&text_of(&single(&map, "index", path)?), path)?,
                value: ctx.operand(&text_of(&single(&map, "value", path)?), path)?,
            }
        }
        "channel" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list"])?;
            let lists = map.get("list").cloned().unwrap_or_default();
            match lists.len() {
                1 => Constraint::Channel {
                    list: ctx.var_list(&text_of(&lists[0]), path)?,
                    list2: None,
                },
                2 => Constraint::Channel {
                    list: ctx.var_list(&text_of(&lists[0]), path)?,
                    list2: Some(ctx.var_list(&text_of(&lists[1]), path)?),
                },
                n => {
                    return Err(invalid(
                        path,
                        format!("channel expects 1 or 2 lists, got {n}"),
                    ))
                }
            }
        }
        "noOverlap" => {
            check_attrs(node, path, &["class", "zeroIgnored"])?;
            let zero_ignored = match node.attribute("zeroIgnored") {
                None => true,
                Some("true") => true,
                Some("false") => false,
                Some(other) => return Err(invalid(path, format!("bad zeroIgnored {other:?}"))),
            };
            let map = children_by_name(node, path, &["origins", "lengths"])?;
            Constraint::NoOverlap {
                origins: ctx.var_list(&text_of(&single(&map, "origins", path)?), path)?,
                lengths: parse_int_list(&text_of(&single(&map, "lengths", path)?), path)?,
                zero_ignored,
            }
        }
        "cumulative" => {
            check_attrs(node, path, &["class"])?;
            let map =
                children_by_name(node, path, &["origins", "lengths", "heights", "condition"])?;
            let (op, rhs) =
                parse_condition(&text_of(&single(&map, "condition", path)?), ctx, path)?;
            let limit = match (op, rhs) {
                (CmpOp::Le, Operand::Const(c)) => c,
                _ => return Err(unsupported(path, "cumulative condition other than (le,k)")),
            };
            Constraint::Cumulative {
                origins: ctx.var_list(&text_of(&single(&map, "origins", path)?), path)?,
                lengths: parse_int_list(&text_of(&single(&map, "lengths", path)?), path)?,
                heights: parse_int_list(&text_of(&single(&map, "heights", path)?), path)?,
                limit,
            }
        }
        "binPacking" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "sizes", "limits"])?;
            Constraint::BinPacking {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                sizes: parse_int_list(&text_of(&single(&map, "sizes", path)?), path)?,
                limits: parse_int_list(&text_of(&single(&map, "limits", path)?), path)?,
            }
        }
        "knapsack" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(
                node,
                path,
                &["list", "weights", "profits", "limit", "condition"],
            )?;
            let (op, rhs) =
                parse_condition(&text_of(&single(&map, "condition", path)?), ctx, path)?;
            Constraint::Knapsack {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                weights: parse_int_list(&text_of(&single(&map, "weights", path)?), path)?,
                limit: parse_i64(&text_of(&single(&map, "limit", path)?), path)?,
                profits: parse_int_list(&text_of(&single(&map, "profits", path)?), path)?,
                op,
                rhs,
            }
        }
        "circuit" => {
            check_attrs(node, path, &["class"])?;
            Constraint::Circuit {
                scope: ctx.var_list(&text_of(node), path)?,
            }
        }
        "instantiation" => {
            check_attrs(node, path, &["class"])?;
            let map = children_by_name(node, path, &["list", "values"])?;
            Constraint::Instantiation {
                scope: ctx.var_list(&text_of(&single(&map, "list", path)?), path)?,
                values: parse_int_list(&text_of(&single(&map, "values", path)?), path)?,
            }
        }
        "slide" => {
            check_attrs(node, path, &["class"])?;
            let mut list_node = None;
            let mut template_node = None;
            for k in kids {
                if k.tag_name().name() == "list" && list_node.is_none() {
                    list_node = Some(k);
                } else if template_node.is_none() {
                    template_node = Some(k);
                } else {
                    return Err(invalid(path, "slide expects one list and one template"));
                }
            }
            let list_node = list_node.ok_or_else(|| invalid(path, "slide without <list>"))?;
            check_attrs(&list_node, path, &["offset"])?;
            let offset = match list_node.attribute("offset") {
                None => 1usize,
                Some(t) => t
                    .parse()
                    .map_err(|_| invalid(path, format!("bad offset {t:?}")))?,
            };
            let list = ctx.var_list(&text_of(&list_node), path)?;
            let template_node =
                template_node.ok_or_else(|| invalid(path, "slide without a template"))?;
            let (grounded, _) = parse_constraint(&template_node, ctx, path)?;
            let template = lift_template(&grounded, &list, path)?;
            Constraint::Slide {
                list,
                offset,
                template: Box::new(template),
            }
        }
        other if KNOWN_UNSUPPORTED.contains(&other) => {
            return Err(unsupported(path, format!("<{other}>")))
        }
        other => return Err(invalid(path, format!("unknown element <{other}>"))),
    };
    Ok((c, tags))
}

/// Rewrites a grounded slide template (over the first window's variables)
/// back onto pseudo ids 0..arity-1.
fn lift_template(c: &Constraint, list: &[VarId], path: &str) -> Result<Constraint, ParseError> {
    let position = |v: VarId| -> Result<VarId, ParseError> {
        list.iter()
            .position(|x| *x == v)
            .map(VarId)
            .ok_or_else(|| invalid(path, "slide template var outside the list"))
    };
    match c {
        Constraint::Intension(e) => {
            fn lift_expr(
                e: &Expr,
                f: &dyn Fn(VarId) -> Result<VarId, ParseError>,
            ) -> Result<Expr, ParseError> {
                Ok(match e {
                    Expr::Const(c) => Expr::Const(*c),
                    Expr::Var(v) => Expr::Var(f(*v)?),
                    Expr::Neg(a) => Expr::Neg(Box::new(lift_expr(a, f)?)),
                    Expr::Abs(a) => Expr::Abs(Box::new(lift_expr(a, f)?)),
                    Expr::Not(a) => Expr::Not(Box::new(lift_expr(a, f)?)),
                    Expr::Add(xs) => Expr::Add(
                        xs.iter()
                            .map(|x| lift_expr(x, f))
                            .collect::<Result<_, _>>()?,
                    ),
                    Expr::Mul(xs) => Expr::Mul(
                        xs.iter()
                            .map(|x| lift_expr(x, f))
                            .collect::<Result<_, _>>()?,
                    ),
                    Expr::Min(xs) => Expr::Min(
                        xs.iter()
                            .map(|x| lift_expr(x, f))
                            .collect::<Result<_, _>>()?,
                    ),
                    Expr::Max(xs) => Expr::Max(
                        xs.iter()
                            .map(|x| lift_expr(x, f))
                            .collect::<Result<_, _>>()?,
                    ),
                    Expr::And(xs) => Expr::And(
                        xs.iter()
                            .map(|x| lift_expr(x, f))
                            .collect::<Result<_, _>>()?,
                    ),
                    Expr::Or(xs) => Expr::Or(
                        xs.iter()
                            .map(|x| lift_expr(x, f))
                            .collect::<Result<_, _>>()?,
                    ),
                    Expr::Sub(a, b) => {
                        Expr::Sub(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::DivFloor(a, b) => {
                        Expr::DivFloor(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Mod(a, b) => {
                        Expr::Mod(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Dist(a, b) => {
                        Expr::Dist(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Eq(a, b) => {
                        Expr::Eq(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Ne(a, b) => {
                        Expr::Ne(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Lt(a, b) => {
                        Expr::Lt(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Le(a, b) => {
                        Expr::Le(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Gt(a, b) => {
                        Expr::Gt(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Ge(a, b) => {
                        Expr::Ge(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Imp(a, b) => {
                        Expr::Imp(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Iff(a, b) => {
                        Expr::Iff(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::Xor(a, b) => {
                        Expr::Xor(Box::new(lift_expr(a, f)?), Box::new(lift_expr(b, f)?))
                    }
                    Expr::IfThenElse(c, t, e2) => Expr::IfThenElse(
                        Box::new(lift_expr(c, f)?),
                        Box::new(lift_expr(t, f)?),
                        Box::new(lift_expr(e2, f)?),
                    ),
                    Expr::InSet(a, set) => Expr::InSet(Box::new(lift_expr(a, f)?), set.clone()),
                })
            }
            Ok(Constraint::Intension(lift_expr(e, &position)?))
        }
        Constraint::Extension {
            scope,
            tuples,
            positive,
            star_allowed,
        } => Ok(Constraint::Extension {
            scope: scope
                .iter()
                .map(|v| position(*v))
                .collect::<Result<_, _>>()?,
            tuples: tuples.clone(),
            positive: *positive,
            star_allowed: *star_allowed,
        }),
        other => Err(unsupported(
            path,
            format!("slide over {}", other.kind_name()),
        )),
    }
}
