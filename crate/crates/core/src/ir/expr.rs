use thiserror::Error;

use super::VarId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("variable {0:?} not covered by the assignment")]
    UnboundVariable(VarId),
}

/// Integer expression tree. Boolean-valued nodes produce 0/1; any operand of
/// a logical connective is read as true iff it is non-zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(VarId),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Add(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Vec<Expr>),
    /// Floor division: rounds toward negative infinity.
    DivFloor(Box<Expr>, Box<Expr>),
    /// Floor modulo: `a - b * floor(a / b)`; the result takes the divisor's sign.
    Mod(Box<Expr>, Box<Expr>),
    /// Absolute difference `|a - b|`.
    Dist(Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    IfThenElse(Box<Expr>, Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Ne(Box<Expr>, Box<Expr>),
    Lt(Box<Expr>, Box<Expr>),
    Le(Box<Expr>, Box<Expr>),
    Gt(Box<Expr>, Box<Expr>),
    Ge(Box<Expr>, Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Imp(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    /// Membership in a literal value set.
    InSet(Box<Expr>, Vec<i64>),
}

impl Expr {
    pub fn var(id: VarId) -> Expr {
        Expr::Var(id)
    }

    pub fn cst(v: i64) -> Expr {
        Expr::Const(v)
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Eq(Box::new(a), Box::new(b))
    }

    pub fn ne(a: Expr, b: Expr) -> Expr {
        Expr::Ne(Box::new(a), Box::new(b))
    }

    pub fn lt(a: Expr, b: Expr) -> Expr {
        Expr::Lt(Box::new(a), Box::new(b))
    }

    pub fn le(a: Expr, b: Expr) -> Expr {
        Expr::Le(Box::new(a), Box::new(b))
    }

    pub fn gt(a: Expr, b: Expr) -> Expr {
        Expr::Gt(Box::new(a), Box::new(b))
    }

    pub fn ge(a: Expr, b: Expr) -> Expr {
        Expr::Ge(Box::new(a), Box::new(b))
    }

    pub fn add(items: Vec<Expr>) -> Expr {
        Expr::Add(items)
    }

    pub fn mul(items: Vec<Expr>) -> Expr {
        Expr::Mul(items)
    }

    pub fn or(items: Vec<Expr>) -> Expr {
        Expr::Or(items)
    }

    pub fn and(items: Vec<Expr>) -> Expr {
        Expr::And(items)
    }

    pub fn modulo(a: Expr, b: Expr) -> Expr {
        Expr::Mod(Box::new(a), Box::new(b))
    }

    pub fn div_floor(a: Expr, b: Expr) -> Expr {
        Expr::DivFloor(Box::new(a), Box::new(b))
    }

    pub fn dist(a: Expr, b: Expr) -> Expr {
        Expr::Dist(Box::new(a), Box::new(b))
    }

    /// Appends every referenced variable id (with repetition) to `out`.
    pub fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Neg(a) | Expr::Abs(a) | Expr::Not(a) => a.collect_vars(out),
            Expr::Add(xs)
            | Expr::Mul(xs)
            | Expr::Min(xs)
            | Expr::Max(xs)
            | Expr::And(xs)
            | Expr::Or(xs) => {
                for x in xs {
                    x.collect_vars(out);
                }
            }
            Expr::Sub(a, b)
            | Expr::DivFloor(a, b)
            | Expr::Mod(a, b)
            | Expr::Dist(a, b)
            | Expr::Eq(a, b)
            | Expr::Ne(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::Gt(a, b)
            | Expr::Ge(a, b)
            | Expr::Imp(a, b)
            | Expr::Iff(a, b)
            | Expr::Xor(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::IfThenElse(c, t, e) => {
                c.collect_vars(out);
                t.collect_vars(out);
                e.collect_vars(out);
            }
            Expr::InSet(a, _) => a.collect_vars(out),
        }
    }

    /// Sorts literal sets so that structurally equal expressions hash equally.
    pub fn canonicalize(&mut self) {
        match self {
            Expr::InSet(a, set) => {
                a.canonicalize();
                set.sort_unstable();
                set.dedup();
            }
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Neg(a) | Expr::Abs(a) | Expr::Not(a) => a.canonicalize(),
            Expr::Add(xs)
            | Expr::Mul(xs)
            | Expr::Min(xs)
            | Expr::Max(xs)
            | Expr::And(xs)
            | Expr::Or(xs) => {
                for x in xs {
                    x.canonicalize();
                }
            }
            Expr::Sub(a, b)
            | Expr::DivFloor(a, b)
            | Expr::Mod(a, b)
            | Expr::Dist(a, b)
            | Expr::Eq(a, b)
            | Expr::Ne(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::Gt(a, b)
            | Expr::Ge(a, b)
            | Expr::Imp(a, b)
            | Expr::Iff(a, b)
            | Expr::Xor(a, b) => {
                a.canonicalize();
                b.canonicalize();
            }
            Expr::IfThenElse(c, t, e) => {
                c.canonicalize();
                t.canonicalize();
                e.canonicalize();
            }
        }
    }
}

pub fn checked_div_floor(a: i64, b: i64) -> Result<i64, EvalError> {
    if b == 0 {
        return Err(EvalError::DivisionByZero);
    }
    let q = a.checked_div(b).ok_or(EvalError::Overflow)?;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        q.checked_sub(1).ok_or(EvalError::Overflow)
    } else {
        Ok(q)
    }
}

pub fn checked_mod_floor(a: i64, b: i64) -> Result<i64, EvalError> {
    if b == 0 {
        return Err(EvalError::DivisionByZero);
    }
    // i64::MIN % -1 would overflow via checked_div path; guard like div.
    a.checked_div(b).ok_or(EvalError::Overflow)?;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        r.checked_add(b).ok_or(EvalError::Overflow)
    } else {
        Ok(r)
    }
}

/// Looks up values for `Expr::Var` nodes during evaluation.
pub trait VarLookup {
    fn value_of(&self, v: VarId) -> Option<i64>;
}

impl VarLookup for [i64] {
    fn value_of(&self, v: VarId) -> Option<i64> {
        self.get(v.0).copied()
    }
}

fn truth(v: i64) -> bool {
    v != 0
}

/// Evaluates an expression under a total lookup with checked 64-bit arithmetic.
pub fn eval_expr<L: VarLookup + ?Sized>(expr: &Expr, lookup: &L) -> Result<i64, EvalError> {
    Ok(match expr {
        Expr::Const(c) => *c,
        Expr::Var(v) => lookup.value_of(*v).ok_or(EvalError::UnboundVariable(*v))?,
        Expr::Neg(a) => eval_expr(a, lookup)?
            .checked_neg()
            .ok_or(EvalError::Overflow)?,
        Expr::Abs(a) => eval_expr(a, lookup)?
            .checked_abs()
            .ok_or(EvalError::Overflow)?,
        Expr::Add(xs) => {
            let mut acc: i64 = 0;
            for x in xs {
                acc = acc
                    .checked_add(eval_expr(x, lookup)?)
                    .ok_or(EvalError::Overflow)?;
            }
            acc
        }
        Expr::Sub(a, b) => eval_expr(a, lookup)?
            .checked_sub(eval_expr(b, lookup)?)
            .ok_or(EvalError::Overflow)?,
        Expr::Mul(xs) => {
            let mut acc: i64 = 1;
            for x in xs {
                acc = acc
                    .checked_mul(eval_expr(x, lookup)?)
                    .ok_or(EvalError::Overflow)?;
            }
            acc
        }
        Expr::DivFloor(a, b) => checked_div_floor(eval_expr(a, lookup)?, eval_expr(b, lookup)?)?,
        Expr::Mod(a, b) => checked_mod_floor(eval_expr(a, lookup)?, eval_expr(b, lookup)?)?,
        Expr::Dist(a, b) => eval_expr(a, lookup)?
            .checked_sub(eval_expr(b, lookup)?)
            .and_then(i64::checked_abs)
            .ok_or(EvalError::Overflow)?,
        Expr::Min(xs) => {
            let mut acc = i64::MAX;
            for x in xs {
                acc = acc.min(eval_expr(x, lookup)?);
            }
            acc
        }
        Expr::Max(xs) => {
            let mut acc = i64::MIN;
            for x in xs {
                acc = acc.max(eval_expr(x, lookup)?);
            }
            acc
        }
        Expr::IfThenElse(c, t, e) => {
            if truth(eval_expr(c, lookup)?) {
                eval_expr(t, lookup)?
            } else {
                eval_expr(e, lookup)?
            }
        }
        Expr::Eq(a, b) => (eval_expr(a, lookup)? == eval_expr(b, lookup)?) as i64,
        Expr::Ne(a, b) => (eval_expr(a, lookup)? != eval_expr(b, lookup)?) as i64,
        Expr::Lt(a, b) => (eval_expr(a, lookup)? < eval_expr(b, lookup)?) as i64,
        Expr::Le(a, b) => (eval_expr(a, lookup)? <= eval_expr(b, lookup)?) as i64,
        Expr::Gt(a, b) => (eval_expr(a, lookup)? > eval_expr(b, lookup)?) as i64,
        Expr::Ge(a, b) => (eval_expr(a, lookup)? >= eval_expr(b, lookup)?) as i64,
        Expr::And(xs) => {
            let mut acc = true;
            for x in xs {
                acc &= truth(eval_expr(x, lookup)?);
            }
            acc as i64
        }
        Expr::Or(xs) => {
            let mut acc = false;
            for x in xs {
                acc |= truth(eval_expr(x, lookup)?);
            }
            acc as i64
        }
        Expr::Not(a) => !truth(eval_expr(a, lookup)?) as i64,
        Expr::Imp(a, b) => (!truth(eval_expr(a, lookup)?) || truth(eval_expr(b, lookup)?)) as i64,
        Expr::Iff(a, b) => (truth(eval_expr(a, lookup)?) == truth(eval_expr(b, lookup)?)) as i64,
        Expr::Xor(a, b) => (truth(eval_expr(a, lookup)?) != truth(eval_expr(b, lookup)?)) as i64,
        Expr::InSet(a, set) => set.contains(&eval_expr(a, lookup)?) as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(e: &Expr, vals: &[i64]) -> Result<i64, EvalError> {
        eval_expr(e, vals)
    }

    #[test]
    fn dist_abs_difference() {
        let e = Expr::dist(Expr::cst(3), Expr::cst(7));
        assert_eq!(ev(&e, &[]), Ok(4));
    }

    #[test]
    fn floor_mod_and_div() {
        assert_eq!(checked_mod_floor(-7, 3), Ok(2));
        assert_eq!(checked_mod_floor(7, 3), Ok(1));
        assert_eq!(checked_mod_floor(7, -3), Ok(-2));
        assert_eq!(checked_div_floor(-7, 3), Ok(-3));
        assert_eq!(checked_div_floor(7, -3), Ok(-3));
        assert_eq!(checked_div_floor(6, 3), Ok(2));
        assert_eq!(checked_mod_floor(5, 0), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn boolean_mixing() {
        // and(eq(x,1), lt(y,5)) with x=1, y=9
        let e = Expr::and(vec![
            Expr::eq(Expr::var(VarId(0)), Expr::cst(1)),
            Expr::lt(Expr::var(VarId(1)), Expr::cst(5)),
        ]);
        assert_eq!(ev(&e, &[1, 9]), Ok(0));
        assert_eq!(ev(&e, &[1, 4]), Ok(1));
    }

    #[test]
    fn not_is_complement_of_truthiness() {
        for raw in [-2i64, -1, 0, 1, 5] {
            let not = Expr::Not(Box::new(Expr::cst(raw)));
            let truthy = Expr::ne(Expr::cst(raw), Expr::cst(0));
            assert_eq!(ev(&not, &[]).unwrap(), 1 - ev(&truthy, &[]).unwrap());
        }
    }

    #[test]
    fn overflow_is_an_error() {
        let e = Expr::add(vec![Expr::cst(i64::MAX), Expr::cst(1)]);
        assert_eq!(ev(&e, &[]), Err(EvalError::Overflow));
        assert_eq!(checked_div_floor(i64::MIN, -1), Err(EvalError::Overflow));
        assert_eq!(checked_mod_floor(i64::MIN, -1), Err(EvalError::Overflow));
    }
}
