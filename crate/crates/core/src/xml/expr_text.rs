//! Textual functional form of expressions, e.g. `eq(add(x,y),3)`.

use std::collections::HashMap;

use crate::ir::{Expr, Instance, VarId};

/// Renders an expression in functional syntax using instance variable names.
pub fn render_expr(e: &Expr, inst: &Instance) -> String {
    let mut s = String::new();
    render(e, inst, &mut s);
    s
}

fn render(e: &Expr, inst: &Instance, out: &mut String) {
    let nary = |name: &str, xs: &[Expr], out: &mut String| {
        out.push_str(name);
        out.push('(');
        for (i, x) in xs.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            render(x, inst, out);
        }
        out.push(')');
    };
    match e {
        Expr::Const(c) => out.push_str(&c.to_string()),
        Expr::Var(v) => out.push_str(&inst.var(*v).name),
        Expr::Neg(a) => nary("neg", std::slice::from_ref(a), out),
        Expr::Abs(a) => nary("abs", std::slice::from_ref(a), out),
        Expr::Add(xs) => nary("add", xs, out),
        Expr::Sub(a, b) => bin("sub", a, b, inst, out),
        Expr::Mul(xs) => nary("mul", xs, out),
        Expr::DivFloor(a, b) => bin("div", a, b, inst, out),
        Expr::Mod(a, b) => bin("mod", a, b, inst, out),
        Expr::Dist(a, b) => bin("dist", a, b, inst, out),
        Expr::Min(xs) => nary("min", xs, out),
        Expr::Max(xs) => nary("max", xs, out),
        Expr::IfThenElse(c, t, e2) => {
            out.push_str("if(");
            render(c, inst, out);
            out.push(',');
            render(t, inst, out);
            out.push(',');
            render(e2, inst, out);
            out.push(')');
        }
        Expr::Eq(a, b) => bin("eq", a, b, inst, out),
        Expr::Ne(a, b) => bin("ne", a, b, inst, out),
        Expr::Lt(a, b) => bin("lt", a, b, inst, out),
        Expr::Le(a, b) => bin("le", a, b, inst, out),
        Expr::Gt(a, b) => bin("gt", a, b, inst, out),
        Expr::Ge(a, b) => bin("ge", a, b, inst, out),
        Expr::And(xs) => nary("and", xs, out),
        Expr::Or(xs) => nary("or", xs, out),
        Expr::Not(a) => nary("not", std::slice::from_ref(a), out),
        Expr::Imp(a, b) => bin("imp", a, b, inst, out),
        Expr::Iff(a, b) => bin("iff", a, b, inst, out),
        Expr::Xor(a, b) => bin("xor", a, b, inst, out),
        Expr::InSet(a, set) => {
            out.push_str("in(");
            render(a, inst, out);
            out.push_str(",set(");
            for (i, v) in set.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&v.to_string());
            }
            out.push_str("))");
        }
    }
}

fn bin(name: &str, a: &Expr, b: &Expr, inst: &Instance, out: &mut String) {
    out.push_str(name);
    out.push('(');
    render(a, inst, out);
    out.push(',');
    render(b, inst, out);
    out.push(')');
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprTextError {
    Syntax(String),
    UnknownVariable(String),
    UnknownFunction(String),
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Open,
    Close,
    Comma,
    End,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer {
            s: s.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<Tok, ExprTextError> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.s.len() {
            return Ok(Tok::End);
        }
        let c = self.s[self.pos];
        match c {
            b'(' => {
                self.pos += 1;
                Ok(Tok::Open)
            }
            b')' => {
                self.pos += 1;
                Ok(Tok::Close)
            }
            b',' => {
                self.pos += 1;
                Ok(Tok::Comma)
            }
            b'-' | b'0'..=b'9' => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                text.parse()
                    .map(Tok::Int)
                    .map_err(|_| ExprTextError::Syntax(format!("bad integer {text:?}")))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric()
                        || matches!(self.s[self.pos], b'_' | b'[' | b']'))
                {
                    self.pos += 1;
                }
                Ok(Tok::Ident(
                    String::from_utf8_lossy(&self.s[start..self.pos]).into_owned(),
                ))
            }
            other => Err(ExprTextError::Syntax(format!(
                "unexpected byte {:?}",
                other as char
            ))),
        }
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    peeked: Option<Tok>,
    vars: &'a HashMap<&'a str, VarId>,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Result<&Tok, ExprTextError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex.next_tok()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<Tok, ExprTextError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex.next_tok(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ExprTextError> {
        let got = self.bump()?;
        if got == t {
            Ok(())
        } else {
            Err(ExprTextError::Syntax(format!(
                "expected {t:?}, got {got:?}"
            )))
        }
    }

    fn parse(&mut self) -> Result<Expr, ExprTextError> {
        match self.bump()? {
            Tok::Int(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => {
                if matches!(self.peek()?, Tok::Open) {
                    self.bump()?;
                    self.call(&name)
                } else {
                    self.vars
                        .get(name.as_str())
                        .map(|v| Expr::Var(*v))
                        .ok_or(ExprTextError::UnknownVariable(name))
                }
            }
            other => Err(ExprTextError::Syntax(format!("unexpected token {other:?}"))),
        }
    }

    /// Parses the argument list of `name(`, consuming the closing paren.
    fn call(&mut self, name: &str) -> Result<Expr, ExprTextError> {
        let mut args = Vec::new();
        if !matches!(self.peek()?, Tok::Close) {
            loop {
                if name == "in" && args.len() == 1 {
                    // second argument of `in` is a literal set
                    return self.finish_in(args.pop().unwrap());
                }
                args.push(self.parse()?);
                match self.bump()? {
                    Tok::Comma => continue,
                    Tok::Close => break,
                    other => {
                        return Err(ExprTextError::Syntax(format!(
                            "expected , or ), got {other:?}"
                        )))
                    }
                }
            }
        } else {
            self.bump()?;
        }
        build_call(name, args)
    }

    fn finish_in(&mut self, lhs: Expr) -> Result<Expr, ExprTextError> {
        match self.bump()? {
            Tok::Ident(s) if s == "set" => {}
            other => {
                return Err(ExprTextError::Syntax(format!(
                    "expected set(...), got {other:?}"
                )))
            }
        }
        self.expect(Tok::Open)?;
        let mut set = Vec::new();
        if !matches!(self.peek()?, Tok::Close) {
            loop {
                match self.bump()? {
                    Tok::Int(v) => set.push(v),
                    other => {
                        return Err(ExprTextError::Syntax(format!(
                            "expected integer, got {other:?}"
                        )))
                    }
                }
                match self.bump()? {
                    Tok::Comma => continue,
                    Tok::Close => break,
                    other => {
                        return Err(ExprTextError::Syntax(format!(
                            "expected , or ), got {other:?}"
                        )))
                    }
                }
            }
        } else {
            self.bump()?;
        }
        self.expect(Tok::Close)?; // closes in(
        Ok(Expr::InSet(Box::new(lhs), set))
    }
}

fn two(mut args: Vec<Expr>, name: &str) -> Result<(Box<Expr>, Box<Expr>), ExprTextError> {
    if args.len() != 2 {
        return Err(ExprTextError::Syntax(format!(
            "{name} expects 2 arguments, got {}",
            args.len()
        )));
    }
    let b = Box::new(args.pop().unwrap());
    let a = Box::new(args.pop().unwrap());
    Ok((a, b))
}

fn one(mut args: Vec<Expr>, name: &str) -> Result<Box<Expr>, ExprTextError> {
    if args.len() != 1 {
        return Err(ExprTextError::Syntax(format!(
            "{name} expects 1 argument, got {}",
            args.len()
        )));
    }
    Ok(Box::new(args.pop().unwrap()))
}

fn at_least_two(args: Vec<Expr>, name: &str) -> Result<Vec<Expr>, ExprTextError> {
    if args.len() < 2 {
        return Err(ExprTextError::Syntax(format!(
            "{name} expects 2+ arguments, got {}",
            args.len()
        )));
    }
    Ok(args)
}

fn build_call(name: &str, args: Vec<Expr>) -> Result<Expr, ExprTextError> {
    Ok(match name {
        "neg" => Expr::Neg(one(args, name)?),
        "abs" => Expr::Abs(one(args, name)?),
        "not" => Expr::Not(one(args, name)?),
        "add" => Expr::Add(at_least_two(args, name)?),
        "mul" => Expr::Mul(at_least_two(args, name)?),
        "min" => Expr::Min(at_least_two(args, name)?),
        "max" => Expr::Max(at_least_two(args, name)?),
        "and" => Expr::And(at_least_two(args, name)?),
        "or" => Expr::Or(at_least_two(args, name)?),
        "sub" => {
            let (a, b) = two(args, name)?;
            Expr::Sub(a, b)
        }
        "div" => {
            let (a, b) = two(args, name)?;
            Expr::DivFloor(a, b)
        }
        "mod" => {
            let (a, b) = two(args, name)?;
            Expr::Mod(a, b)
        }
        "dist" => {
            let (a, b) = two(args, name)?;
            Expr::Dist(a, b)
        }
        "eq" => {
            let (a, b) = two(args, name)?;
            Expr::Eq(a, b)
        }
        "ne" => {
            let (a, b) = two(args, name)?;
            Expr::Ne(a, b)
        }
        "lt" => {
            let (a, b) = two(args, name)?;
            Expr::Lt(a, b)
        }
        "le" => {
            let (a, b) = two(args, name)?;
            Expr::Le(a, b)
        }
        "gt" => {
            let (a, b) = two(args, name)?;
            Expr::Gt(a, b)
        }
        "ge" => {
            let (a, b) = two(args, name)?;
            Expr::Ge(a, b)
        }
        "imp" => {
            let (a, b) = two(args, name)?;
            Expr::Imp(a, b)
        }
        "iff" => {
            let (a, b) = two(args, name)?;
            Expr::Iff(a, b)
        }
        "xor" => {
            let (a, b) = two(args, name)?;
            Expr::Xor(a, b)
        }
        "if" => {
            if args.len() != 3 {
                return Err(ExprTextError::Syntax(format!(
                    "if expects 3 arguments, got {}",
                    args.len()
                )));
            }
            let mut it = args.into_iter();
            Expr::IfThenElse(
                Box::new(it.next().unwrap()),
                Box::new(it.next().unwrap()),
                Box::new(it.next().unwrap()),
            )
        }
        other => return Err(ExprTextError::UnknownFunction(other.to_string())),
    })
}

/// Parses functional syntax back into an expression tree, resolving variable
/// names through `vars`.
pub fn parse_expr_text(text: &str, vars: &HashMap<&str, VarId>) -> Result<Expr, ExprTextError> {
    let mut p = Parser {
        lex: Lexer::new(text),
        peeked: None,
        vars,
    };
    let e = p.parse()?;
    match p.bump()? {
        Tok::End => Ok(e),
        other => Err(ExprTextError::Syntax(format!("trailing input {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Domain, InstanceBuilder};

    #[test]
    fn roundtrip_functional_form() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 9).unwrap());
        let y = b.add_var("y[2]", Domain::range(0, 9).unwrap());
        let inst = b.build();
        let mut vars = HashMap::new();
        vars.insert("x", x);
        vars.insert("y[2]", y);

        let exprs = vec![
            Expr::or(vec![
                Expr::eq(Expr::modulo(Expr::var(x), Expr::var(y)), Expr::cst(0)),
                Expr::ne(Expr::var(y), Expr::cst(-3)),
            ]),
            Expr::InSet(Box::new(Expr::var(x)), vec![1, 2, 5]),
            Expr::IfThenElse(
                Box::new(Expr::lt(Expr::var(x), Expr::var(y))),
                Box::new(Expr::cst(1)),
                Box::new(Expr::Neg(Box::new(Expr::var(x)))),
            ),
        ];
        for e in exprs {
            let text = render_expr(&e, &inst);
            let back = parse_expr_text(&text, &vars).unwrap();
            assert_eq!(e, back, "{text}");
        }
    }

    #[test]
    fn unknown_names_fail() {
        let vars = HashMap::new();
        assert_eq!(
            parse_expr_text("frob(1,2)", &vars),
            Err(ExprTextError::UnknownFunction("frob".into()))
        );
        assert_eq!(
            parse_expr_text("z", &vars),
            Err(ExprTextError::UnknownVariable("z".into()))
        );
    }
}
