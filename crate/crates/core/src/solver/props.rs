//! Propagators for the solver's constraint subset. Every rule here only
//! removes values that cannot appear in any solution of its constraint given
//! the other current domains (checked against an exhaustive oracle in tests).

use crate::ir::{eval_expr, CmpOp, Expr, OrderOp, TupleEntry, VarId, VarLookup};

use super::state::{DomStore, PropResult, Wipe};

/// Right-hand side of a condition after compilation.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Rhs {
    Const(i64),
    Var(usize),
}

impl Rhs {
    fn bounds(self, s: &DomStore) -> (i64, i64) {
        match self {
            Rhs::Const(c) => (c, c),
            Rhs::Var(v) => (s.min(v), s.max(v)),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Prop {
    Intension {
        expr: Expr,
        scope: Vec<usize>,
    },
    TablePos {
        scope: Vec<usize>,
        tuples: Vec<Vec<TupleEntry>>,
    },
    TableNeg {
        scope: Vec<usize>,
        tuples: Vec<Vec<TupleEntry>>,
    },
    AllDiff {
        scope: Vec<usize>,
        except: Vec<i64>,
    },
    /// Σ coeff·var `op` rhs with any variable right side folded into terms.
    Sum {
        terms: Vec<(i64, usize)>,
        op: CmpOp,
        rhs: i64,
    },
    Count {
        scope: Vec<usize>,
        values: Vec<i64>,
        op: CmpOp,
        rhs: Rhs,
    },
    Cardinality {
        scope: Vec<usize>,
        values: Vec<i64>,
        lo: Vec<i64>,
        hi: Vec<i64>,
        closed: bool,
    },
    Element {
        list: Vec<usize>,
        index: usize,
        value: Rhs,
    },
    NValues {
        scope: Vec<usize>,
        op: CmpOp,
        rhs: Rhs,
    },
    AllEqual {
        scope: Vec<usize>,
    },
    Ordered {
        scope: Vec<usize>,
        lengths: Vec<i64>,
        op: OrderOp,
    },
    Lex {
        lists: Vec<Vec<usize>>,
        op: OrderOp,
    },
    Extremum {
        is_max: bool,
        scope: Vec<usize>,
        op: CmpOp,
        rhs: Rhs,
    },
    /// Objective strengthening cut; reads the current bound from the engine.
    ObjectiveCut,
}

impl Prop {
    /// Variables whose domain changes should re-schedule this propagator.
    pub fn watched(&self, cut_scope: &[usize]) -> Vec<usize> {
        let mut out = match self {
            Prop::Intension { scope, .. }
            | Prop::TablePos { scope, .. }
            | Prop::TableNeg { scope, .. }
            | Prop::AllDiff { scope, .. }
            | Prop::Count { scope, .. }
            | Prop::Cardinality { scope, .. }
            | Prop::NValues { scope, .. }
            | Prop::AllEqual { scope }
            | Prop::Ordered { scope, .. }
            | Prop::Extremum { scope, .. } => scope.clone(),
            Prop::Sum { terms, .. } => terms.iter().map(|&(_, v)| v).collect(),
            Prop::Element { list, index, value } => {
                let mut s = list.clone();
                s.push(*index);
                if let Rhs::Var(v) = value {
                    s.push(*v);
                }
                s
            }
            Prop::Lex { lists, .. } => lists.iter().flatten().copied().collect(),
            Prop::ObjectiveCut => cut_scope.to_vec(),
        };
        if let Prop::Count {
            rhs: Rhs::Var(v), ..
        }
        | Prop::NValues {
            rhs: Rhs::Var(v), ..
        }
        | Prop::Extremum {
            rhs: Rhs::Var(v), ..
        } = self
        {
            out.push(*v);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Objective cut shape, resolved once per optimization run. The measured
/// quantity is always minimized; maximization negates on the way in.
#[derive(Debug, Clone)]
pub(crate) enum Cut {
    Lin {
        terms: Vec<(i64, usize)>,
    },
    MaxOf {
        scope: Vec<usize>,
        negate: bool,
    },
    MinOf {
        scope: Vec<usize>,
        negate: bool,
    },
    Expr {
        expr: Expr,
        scope: Vec<usize>,
        negate: bool,
    },
}

impl Cut {
    pub fn scope(&self) -> Vec<usize> {
        match self {
            Cut::Lin { terms } => terms.iter().map(|&(_, v)| v).collect(),
            Cut::MaxOf { scope, .. } | Cut::MinOf { scope, .. } | Cut::Expr { scope, .. } => {
                scope.clone()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// dispatch

pub(crate) fn execute(prop: &Prop, s: &mut DomStore, cut: Option<(&Cut, i64)>) -> PropResult {
    match prop {
        Prop::Intension { expr, scope } => intension(expr, scope, s),
        Prop::TablePos { scope, tuples } => table_pos(scope, tuples, s),
        Prop::TableNeg { scope, tuples } => table_neg(scope, tuples, s),
        Prop::AllDiff { scope, except } => all_diff(scope, except, s),
        Prop::Sum { terms, op, rhs } => sum(terms, *op, *rhs, s),
        Prop::Count {
            scope,
            values,
            op,
            rhs,
        } => count(scope, values, *op, *rhs, s),
        Prop::Cardinality {
            scope,
            values,
            lo,
            hi,
            closed,
        } => cardinality(scope, values, lo, hi, *closed, s),
        Prop::Element { list, index, value } => element(list, *index, *value, s),
        Prop::NValues { scope, op, rhs } => n_values(scope, *op, *rhs, s),
        Prop::AllEqual { scope } => all_equal(scope, s),
        Prop::Ordered { scope, lengths, op } => ordered(scope, lengths, *op, s),
        Prop::Lex { lists, op } => lex(lists, *op, s),
        Prop::Extremum {
            is_max,
            scope,
            op,
            rhs,
        } => extremum(*is_max, scope, *op, *rhs, s),
        Prop::ObjectiveCut => {
            let (kind, bound) = cut.expect("cut executed without an objective");
            objective_cut(kind, bound, s)
        }
    }
}

// ---------------------------------------------------------------------------
// intension: check / forward-check / enumerated support / interval bounds

/// Product threshold under which small intension scopes get full support
/// checks.
const GAC_PRODUCT_LIMIT: u128 = 4096;
const GAC_SCOPE_LIMIT: usize = 3;

struct Scratch<'a> {
    pairs: &'a [(usize, i64)],
}

impl VarLookup for Scratch<'_> {
    fn value_of(&self, v: VarId) -> Option<i64> {
        self.pairs
            .iter()
            .find(|(id, _)| *id == v.0)
            .map(|(_, val)| *val)
    }
}

fn truthy(expr: &Expr, pairs: &[(usize, i64)]) -> bool {
    matches!(eval_expr(expr, &Scratch { pairs }), Ok(v) if v != 0)
}

fn intension(expr: &Expr, scope: &[usize], s: &mut DomStore) -> PropResult {
    let unfixed: Vec<usize> = scope.iter().copied().filter(|&v| !s.is_fixed(v)).collect();
    if unfixed.is_empty() {
        let pairs: Vec<(usize, i64)> = scope.iter().map(|&v| (v, s.value(v))).collect();
        return if truthy(expr, &pairs) {
            Ok(())
        } else {
            Err(Wipe)
        };
    }
    if unfixed.len() == 1 {
        let u = unfixed[0];
        let mut pairs: Vec<(usize, i64)> = scope
            .iter()
            .filter(|&&v| v != u)
            .map(|&v| (v, s.value(v)))
            .collect();
        pairs.push((u, 0));
        for val in s.active_values(u) {
            pairs.last_mut().unwrap().1 = val;
            if !truthy(expr, &pairs) {
                s.remove_value(u, val)?;
            }
        }
        return Ok(());
    }
    let product: u128 = scope
        .iter()
        .fold(1u128, |acc, &v| acc.saturating_mul(s.size(v) as u128));
    if scope.len() <= GAC_SCOPE_LIMIT && product <= GAC_PRODUCT_LIMIT {
        return intension_gac(expr, scope, s);
    }
    intension_bounds(expr, scope, s)
}

fn intension_gac(expr: &Expr, scope: &[usize], s: &mut DomStore) -> PropResult {
    for (pos, &v) in scope.iter().enumerate() {
        let others: Vec<usize> = scope
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, &x)| x)
            .collect();
        for val in s.active_values(v) {
            let mut pairs = vec![(v, val)];
            if !has_support(expr, &others, s, &mut pairs) {
                s.remove_value(v, val)?;
            }
        }
    }
    Ok(())
}

fn has_support(expr: &Expr, rest: &[usize], s: &DomStore, pairs: &mut Vec<(usize, i64)>) -> bool {
    match rest.split_first() {
        None => truthy(expr, pairs),
        Some((&v, tail)) => {
            for val in s.iter_active(v) {
                pairs.push((v, val));
                let ok = has_support(expr, tail, s, pairs);
                pairs.pop();
                if ok {
                    return true;
                }
            }
            false
        }
    }
}

// interval arithmetic over i128 with saturation; intervals always contain
// the true value set, so pruning outside them is sound

#[derive(Debug, Clone, Copy)]
struct Iv {
    lo: i128,
    hi: i128,
}

const IV_CAP: i128 = 1 << 100;

fn cap(x: i128) -> i128 {
    x.clamp(-IV_CAP, IV_CAP)
}

impl Iv {
    fn point(v: i128) -> Iv {
        Iv {
            lo: cap(v),
            hi: cap(v),
        }
    }

    fn new(lo: i128, hi: i128) -> Iv {
        Iv {
            lo: cap(lo),
            hi: cap(hi),
        }
    }

    const BOOL: Iv = Iv { lo: 0, hi: 1 };
    const TRUE: Iv = Iv { lo: 1, hi: 1 };
    const FALSE: Iv = Iv { lo: 0, hi: 0 };

    fn is_true(self) -> bool {
        self.lo >= 1
    }

    fn is_false(self) -> bool {
        self.hi <= 0
    }

    fn meet(self, o: Iv) -> Option<Iv> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Iv { lo, hi })
    }

    fn add(self, o: Iv) -> Iv {
        Iv::new(self.lo.saturating_add(o.lo), self.hi.saturating_add(o.hi))
    }

    fn neg(self) -> Iv {
        Iv::new(-self.hi, -self.lo)
    }

    fn mul(self, o: Iv) -> Iv {
        let products = [
            self.lo.saturating_mul(o.lo),
            self.lo.saturating_mul(o.hi),
            self.hi.saturating_mul(o.lo),
            self.hi.saturating_mul(o.hi),
        ];
        Iv::new(
            *products.iter().min().unwrap(),
            *products.iter().max().unwrap(),
        )
    }

    fn boolify(self) -> Iv {
        // truth of "value != 0"
        if self.lo > 0 || self.hi < 0 {
            Iv::TRUE
        } else if self.lo == 0 && self.hi == 0 {
            Iv::FALSE
        } else {
            Iv::BOOL
        }
    }
}

fn forward(expr: &Expr, s: &DomStore) -> Iv {
    match expr {
        Expr::Const(c) => Iv::point(*c as i128),
        Expr::Var(v) => Iv::new(s.min(v.0) as i128, s.max(v.0) as i128),
        Expr::Neg(a) => forward(a, s).neg(),
        Expr::Abs(a) => {
            let i = forward(a, s);
            let lo = if i.lo <= 0 && i.hi >= 0 {
                0
            } else {
                i.lo.abs().min(i.hi.abs())
            };
            Iv::new(lo, i.lo.abs().max(i.hi.abs()))
        }
        Expr::Add(xs) => xs
            .iter()
            .fold(Iv::point(0), |acc, x| acc.add(forward(x, s))),
        Expr::Sub(a, b) => forward(a, s).add(forward(b, s).neg()),
        Expr::Mul(xs) => xs
            .iter()
            .fold(Iv::point(1), |acc, x| acc.mul(forward(x, s))),
        Expr::Dist(a, b) => {
            let d = forward(a, s).add(forward(b, s).neg());
            let lo = if d.lo <= 0 && d.hi >= 0 {
                0
            } else {
                d.lo.abs().min(d.hi.abs())
            };
            Iv::new(lo, d.lo.abs().max(d.hi.abs()))
        }
        Expr::Min(xs) => xs
            .iter()
            .map(|x| forward(x, s))
            .reduce(|a, b| Iv::new(a.lo.min(b.lo), a.hi.min(b.hi)))
            .unwrap_or(Iv::point(i64::MAX as i128)),
        Expr::Max(xs) => xs
            .iter()
            .map(|x| forward(x, s))
            .reduce(|a, b| Iv::new(a.lo.max(b.lo), a.hi.max(b.hi)))
            .unwrap_or(Iv::point(i64::MIN as i128)),
        Expr::DivFloor(a, b) => {
            let (ia, ib) = (forward(a, s), forward(b, s));
            // conservative quotient hull when the divisor cannot be zero-only
            let mags: Vec<i128> = [ib.lo, ib.hi].iter().copied().filter(|&x| x != 0).collect();
            if mags.is_empty() {
                return Iv::new(-IV_CAP, IV_CAP);
            }
            let mag = ia.lo.abs().max(ia.hi.abs());
            Iv::new(-mag - 1, mag + 1)
        }
        Expr::Mod(_, b) => {
            let ib = forward(b, s);
            let m = ib.lo.abs().max(ib.hi.abs());
            Iv::new(-m, m)
        }
        Expr::IfThenElse(c, t, e) => {
            let ic = forward(c, s).boolify();
            if ic.is_true() {
                forward(t, s)
            } else if ic.is_false() {
                forward(e, s)
            } else {
                let (it, ie) = (forward(t, s), forward(e, s));
                Iv::new(it.lo.min(ie.lo), it.hi.max(ie.hi))
            }
        }
        Expr::Eq(a, b) => {
            let (ia, ib) = (forward(a, s), forward(b, s));
            if ia.lo == ia.hi && ib.lo == ib.hi {
                if ia.lo == ib.lo {
                    Iv::TRUE
                } else {
                    Iv::FALSE
                }
            } else if ia.meet(ib).is_none() {
                Iv::FALSE
            } else {
                Iv::BOOL
            }
        }
        Expr::Ne(a, b) => forward(&Expr::Eq(a.clone(), b.clone()), s).not(),
        Expr::Lt(a, b) => cmp_iv(forward(a, s), forward(b, s), true),
        Expr::Le(a, b) => cmp_iv(forward(a, s), forward(b, s), false),
        Expr::Gt(a, b) => cmp_iv(forward(b, s), forward(a, s), true),
        Expr::Ge(a, b) => cmp_iv(forward(b, s), forward(a, s), false),
        Expr::And(xs) => {
            let mut any_open = false;
            for x in xs {
                let i = forward(x, s).boolify();
                if i.is_false() {
                    return Iv::FALSE;
                }
                if !i.is_true() {
                    any_open = true;
                }
            }
            if any_open {
                Iv::BOOL
            } else {
                Iv::TRUE
            }
        }
        Expr::Or(xs) => {
            let mut any_open = false;
            for x in xs {
                let i = forward(x, s).boolify();
                if i.is_true() {
                    return Iv::TRUE;
                }
                if !i.is_false() {
                    any_open = true;
                }
            }
            if any_open {
                Iv::BOOL
            } else {
                Iv::FALSE
            }
        }
        Expr::Not(a) => forward(a, s).boolify().not(),
        Expr::Imp(a, b) => {
            let (ia, ib) = (forward(a, s).boolify(), forward(b, s).boolify());
            if ia.is_false() || ib.is_true() {
                Iv::TRUE
            } else if ia.is_true() && ib.is_false() {
                Iv::FALSE
            } else {
                Iv::BOOL
            }
        }
        Expr::Iff(a, b) => {
            let (ia, ib) = (forward(a, s).boolify(), forward(b, s).boolify());
            match (decided(ia), decided(ib)) {
                (Some(x), Some(y)) => {
                    if x == y {
                        Iv::TRUE
                    } else {
                        Iv::FALSE
                    }
                }
                _ => Iv::BOOL,
            }
        }
        Expr::Xor(a, b) => forward(&Expr::Iff(a.clone(), b.clone()), s).not(),
        Expr::InSet(a, set) => {
            let ia = forward(a, s);
            if ia.lo == ia.hi {
                if set.contains(&(ia.lo as i64)) {
                    Iv::TRUE
                } else {
                    Iv::FALSE
                }
            } else if set
                .iter()
                .all(|&v| (v as i128) < ia.lo || (v as i128) > ia.hi)
            {
                Iv::FALSE
            } else {
                Iv::BOOL
            }
        }
    }
}

fn decided(i: Iv) -> Option<bool> {
    if i.is_true() {
        Some(true)
    } else if i.is_false() {
        Some(false)
    } else {
        None
    }
}

fn cmp_iv(a: Iv, b: Iv, strict: bool) -> Iv {
    // truth of a < b (strict) or a <= b
    let lt = if strict { a.hi < b.lo } else { a.hi <= b.lo };
    let ge = if strict { a.lo >= b.hi } else { a.lo > b.hi };
    if lt {
        Iv::TRUE
    } else if ge {
        Iv::FALSE
    } else {
        Iv::BOOL
    }
}

impl Iv {
    fn not(self) -> Iv {
        let b = self.boolify();
        if b.is_true() {
            Iv::FALSE
        } else if b.is_false() {
            Iv::TRUE
        } else {
            Iv::BOOL
        }
    }
}

/// Interval narrowing pass: requires the root to be true and pushes bound
/// information down through the handled node kinds. Unhandled nodes simply
/// stop the recursion, which keeps the pass sound.
fn intension_bounds(expr: &Expr, _scope: &[usize], s: &mut DomStore) -> PropResult {
    if forward(expr, s).boolify().is_false() {
        return Err(Wipe);
    }
    narrow_truth(expr, true, s)
}

fn narrow_truth(expr: &Expr, required: bool, s: &mut DomStore) -> PropResult {
    match (expr, required) {
        (Expr::Not(a), _) => narrow_truth(a, !required, s),
        (Expr::And(xs), true) => {
            for x in xs {
                narrow_truth(x, true, s)?;
            }
            Ok(())
        }
        (Expr::Or(xs), false) => {
            for x in xs {
                narrow_truth(x, false, s)?;
            }
            Ok(())
        }
        (Expr::Or(xs), true) => {
            // if all but one disjunct is already false, the survivor is forced
            let states: Vec<Option<bool>> = xs
                .iter()
                .map(|x| decided(forward(x, s).boolify()))
                .collect();
            if states.iter().any(|st| *st == Some(true)) {
                return Ok(());
            }
            let open: Vec<usize> = states
                .iter()
                .enumerate()
                .filter(|(_, st)| st.is_none())
                .map(|(i, _)| i)
                .collect();
            match open.len() {
                0 => Err(Wipe),
                1 => narrow_truth(&xs[open[0]], true, s),
                _ => Ok(()),
            }
        }
        (Expr::And(xs), false) => {
            let states: Vec<Option<bool>> = xs
                .iter()
                .map(|x| decided(forward(x, s).boolify()))
                .collect();
            if states.iter().any(|st| *st == Some(false)) {
                return Ok(());
            }
            let open: Vec<usize> = states
                .iter()
                .enumerate()
                .filter(|(_, st)| st.is_none())
                .map(|(i, _)| i)
                .collect();
            match open.len() {
                0 => Err(Wipe),
                1 => narrow_truth(&xs[open[0]], false, s),
                _ => Ok(()),
            }
        }
        (Expr::Imp(a, b), true) => match decided(forward(a, s).boolify()) {
            Some(true) => narrow_truth(b, true, s),
            Some(false) => Ok(()),
            None => match decided(forward(b, s).boolify()) {
                Some(false) => narrow_truth(a, false, s),
                _ => Ok(()),
            },
        },
        (Expr::Imp(a, b), false) => {
            narrow_truth(a, true, s)?;
            narrow_truth(b, false, s)
        }
        (Expr::Eq(a, b), true) => {
            let req = match forward(a, s).meet(forward(b, s)) {
                Some(i) => i,
                None => return Err(Wipe),
            };
            narrow_value(a, req, s)?;
            narrow_value(b, req, s)
        }
        (Expr::Ne(a, b), false) => narrow_truth(&Expr::Eq(a.clone(), b.clone()), true, s),
        (Expr::Ne(a, b), true) | (Expr::Eq(a, b), false) => {
            // prune only when one side is a settled point and the other a var
            let (ia, ib) = (forward(a, s), forward(b, s));
            if let (Expr::Var(v), true) = (&**a, ib.lo == ib.hi) {
                s.remove_value(v.0, ib.lo as i64)?;
            }
            if let (Expr::Var(v), true) = (&**b, ia.lo == ia.hi) {
                s.remove_value(v.0, ia.lo as i64)?;
            }
            Ok(())
        }
        (Expr::Lt(a, b), true) => narrow_le(a, b, 1, s),
        (Expr::Le(a, b), true) => narrow_le(a, b, 0, s),
        (Expr::Gt(a, b), true) => narrow_le(b, a, 1, s),
        (Expr::Ge(a, b), true) => narrow_le(b, a, 0, s),
        (Expr::Lt(a, b), false) => narrow_le(b, a, 0, s),
        (Expr::Le(a, b), false) => narrow_le(b, a, 1, s),
        (Expr::Gt(a, b), false) => narrow_le(a, b, 0, s),
        (Expr::Ge(a, b), false) => narrow_le(a, b, 1, s),
        (Expr::InSet(a, set), true) => {
            if let Expr::Var(v) = &**a {
                for val in s.active_values(v.0) {
                    if !set.contains(&val) {
                        s.remove_value(v.0, val)?;
                    }
                }
            }
            Ok(())
        }
        (Expr::InSet(a, set), false) => {
            if let Expr::Var(v) = &**a {
                for val in set {
                    s.remove_value(v.0, *val)?;
                }
            }
            Ok(())
        }
        // anything else: require only that truth stays possible
        (e, want) => {
            let i = forward(e, s).boolify();
            if (want && i.is_false()) || (!want && i.is_true()) {
                Err(Wipe)
            } else {
                Ok(())
            }
        }
    }
}

/// Enforces a + slack <= b.
fn narrow_le(a: &Expr, b: &Expr, slack: i128, s: &mut DomStore) -> PropResult {
    let (ia, ib) = (forward(a, s), forward(b, s));
    if ia.lo.saturating_add(slack) > ib.hi {
        return Err(Wipe);
    }
    narrow_value(a, Iv::new(ia.lo, ib.hi.saturating_sub(slack)), s)?;
    narrow_value(b, Iv::new(ia.lo.saturating_add(slack), ib.hi), s)
}

/// Pushes a required value interval down through arithmetic nodes.
fn narrow_value(expr: &Expr, req: Iv, s: &mut DomStore) -> PropResult {
    let cur = forward(expr, s);
    let req = match cur.meet(req) {
        Some(i) => i,
        None => return Err(Wipe),
    };
    match expr {
        Expr::Var(v) => {
            s.remove_below(v.0, clamp_i64(req.lo))?;
            s.remove_above(v.0, clamp_i64(req.hi))
        }
        Expr::Neg(a) => narrow_value(a, req.neg(), s),
        Expr::Add(xs) => {
            let ivs: Vec<Iv> = xs.iter().map(|x| forward(x, s)).collect();
            let total = ivs.iter().fold(Iv::point(0), |acc, i| acc.add(*i));
            for (x, iv) in xs.iter().zip(&ivs) {
                let rest_lo = total.lo.saturating_sub(iv.lo);
                let rest_hi = total.hi.saturating_sub(iv.hi);
                narrow_value(
                    x,
                    Iv::new(
                        req.lo.saturating_sub(rest_hi),
                        req.hi.saturating_sub(rest_lo),
                    ),
                    s,
                )?;
            }
            Ok(())
        }
        Expr::Sub(a, b) => {
            let (ia, ib) = (forward(a, s), forward(b, s));
            narrow_value(
                a,
                Iv::new(req.lo.saturating_add(ib.lo), req.hi.saturating_add(ib.hi)),
                s,
            )?;
            narrow_value(
                b,
                Iv::new(ia.lo.saturating_sub(req.hi), ia.hi.saturating_sub(req.lo)),
                s,
            )
        }
        // remaining arithmetic shapes keep their forward hull only
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// tables

fn tuple_supports(
    tuple: &[TupleEntry],
    scope: &[usize],
    s: &DomStore,
    fix_pos: usize,
    fix_val: i64,
) -> bool {
    tuple.iter().enumerate().all(|(i, e)| match e {
        TupleEntry::Star => true,
        TupleEntry::Val(v) => {
            if i == fix_pos {
                *v == fix_val
            } else {
                s.contains(scope[i], *v)
            }
        }
    })
}

fn table_pos(scope: &[usize], tuples: &[Vec<TupleEntry>], s: &mut DomStore) -> PropResult {
    for (pos, &v) in scope.iter().enumerate() {
        for val in s.active_values(v) {
            let supported = tuples.iter().any(|t| tuple_supports(t, scope, s, pos, val));
            if !supported {
                s.remove_value(v, val)?;
            }
        }
    }
    Ok(())
}

fn neg_matches(
    tuple: &[TupleEntry],
    scope: &[usize],
    s: &DomStore,
    extra: Option<(usize, i64)>,
) -> bool {
    tuple.iter().enumerate().all(|(i, e)| match e {
        TupleEntry::Star => true,
        TupleEntry::Val(tv) => {
            let v = scope[i];
            if let Some((u, uval)) = extra {
                if v == u {
                    return *tv == uval;
                }
            }
            // an unfixed position only matches through a star
            s.is_fixed(v) && *tv == s.value(v)
        }
    })
}

fn table_neg(scope: &[usize], tuples: &[Vec<TupleEntry>], s: &mut DomStore) -> PropResult {
    let unfixed: Vec<usize> = scope.iter().copied().filter(|&v| !s.is_fixed(v)).collect();
    match unfixed.as_slice() {
        [] => {
            if tuples.iter().any(|t| neg_matches(t, scope, s, None)) {
                Err(Wipe)
            } else {
                Ok(())
            }
        }
        [u] => {
            for val in s.active_values(*u) {
                if tuples
                    .iter()
                    .any(|t| neg_matches(t, scope, s, Some((*u, val))))
                {
                    s.remove_value(*u, val)?;
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// allDifferent: matching-based filtering (with a pairwise fallback when an
// excepted value set is present)

fn all_diff(scope: &[usize], except: &[i64], s: &mut DomStore) -> PropResult {
    if !except.is_empty() {
        // a variable repeated in the scope can only take an excepted value
        for (i, &v) in scope.iter().enumerate() {
            if scope[i + 1..].contains(&v) {
                for val in s.active_values(v) {
                    if !except.contains(&val) {
                        s.remove_value(v, val)?;
                    }
                }
            }
        }
        // fixed non-excepted values are removed from the other domains
        for (i, &v) in scope.iter().enumerate() {
            if s.is_fixed(v) && !except.contains(&s.value(v)) {
                let val = s.value(v);
                for (j, &w) in scope.iter().enumerate() {
                    if i != j && w != v {
                        s.remove_value(w, val)?;
                    }
                }
            }
        }
        return Ok(());
    }
    regin(scope, s)
}

fn regin(scope: &[usize], s: &mut DomStore) -> PropResult {
    let n = scope.len();
    if n == 0 {
        return Ok(());
    }
    // collect the value universe in sorted order
    let mut values: Vec<i64> = Vec::new();
    for &v in scope {
        values.extend(s.iter_active(v));
    }
    values.sort_unstable();
    values.dedup();
    if values.len() < n {
        return Err(Wipe);
    }
    let vindex = |val: i64| values.binary_search(&val).unwrap();

    // maximum bipartite matching via augmenting paths
    let mut match_of_var = vec![usize::MAX; n];
    let mut match_of_val = vec![usize::MAX; values.len()];
    for var_i in 0..n {
        let mut seen = vec![false; values.len()];
        if !augment(
            var_i,
            scope,
            s,
            &values,
            &mut match_of_var,
            &mut match_of_val,
            &mut seen,
        ) {
            return Err(Wipe);
        }
    }

    // orientation: matched value -> var, var -> other values, sink edges for
    // free/matched values; an edge is kept iff matched or inside one SCC
    let nv = values.len();
    let sink = n + nv;
    let scc = tarjan_scc(n, nv, sink, scope, s, &match_of_var, &match_of_val, vindex);

    for (var_i, &v) in scope.iter().enumerate() {
        for val in s.active_values(v) {
            let val_i = vindex(val);
            if match_of_var[var_i] != val_i && scc[var_i] != scc[n + val_i] {
                s.remove_value(v, val)?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn augment(
    var_i: usize,
    scope: &[usize],
    s: &DomStore,
    values: &[i64],
    match_of_var: &mut [usize],
    match_of_val: &mut [usize],
    seen: &mut [bool],
) -> bool {
    for val in s.iter_active(scope[var_i]) {
        let val_i = values.binary_search(&val).unwrap();
        if seen[val_i] {
            continue;
        }
        seen[val_i] = true;
        if match_of_val[val_i] == usize::MAX
            || augment(
                match_of_val[val_i],
                scope,
                s,
                values,
                match_of_var,
                match_of_val,
                seen,
            )
        {
            match_of_var[var_i] = val_i;
            match_of_val[val_i] = var_i;
            return true;
        }
    }
    false
}

/// Iterative Tarjan over the Régin residual graph. Nodes: 0..n vars,
/// n..n+nv values, then the sink.
#[allow(clippy::too_many_arguments)]
fn tarjan_scc(
    n: usize,
    nv: usize,
    sink: usize,
    scope: &[usize],
    s: &DomStore,
    match_of_var: &[usize],
    match_of_val: &[usize],
    vindex: impl Fn(i64) -> usize,
) -> Vec<usize> {
    let total = n + nv + 1;
    let successors = |node: usize, out: &mut Vec<usize>| {
        out.clear();
        if node < n {
            // var -> every non-matched value in its domain
            for val in s.iter_active(scope[node]) {
                let vi = vindex(val);
                if match_of_var[node] != vi {
                    out.push(n + vi);
                }
            }
        } else if node < n + nv {
            let vi = node - n;
            if match_of_val[vi] != usize::MAX {
                out.push(match_of_val[vi]);
            } else {
                out.push(sink);
            }
        } else {
            // sink -> every matched value
            for vi in 0..nv {
                if match_of_val[vi] != usize::MAX {
                    out.push(n + vi);
                }
            }
        }
    };

    let mut index = vec![usize::MAX; total];
    let mut low = vec![0usize; total];
    let mut on_stack = vec![false; total];
    let mut comp = vec![usize::MAX; total];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut next_comp = 0usize;

    // explicit DFS frames: (node, child iterator position)
    let mut frame_children: Vec<Vec<usize>> = Vec::new();
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut scratch = Vec::new();

    for start in 0..total {
        if index[start] != usize::MAX {
            continue;
        }
        frames.push((start, 0));
        successors(start, &mut scratch);
        frame_children.push(scratch.clone());
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while !frames.is_empty() {
            let fi = frames.len() - 1;
            let (node, child_pos) = frames[fi];
            if child_pos < frame_children[fi].len() {
                let child = frame_children[fi][child_pos];
                frames[fi].1 += 1;
                if index[child] == usize::MAX {
                    frames.push((child, 0));
                    successors(child, &mut scratch);
                    frame_children.push(scratch.clone());
                    index[child] = next_index;
                    low[child] = next_index;
                    next_index += 1;
                    stack.push(child);
                    on_stack[child] = true;
                } else if on_stack[child] {
                    low[node] = low[node].min(index[child]);
                }
            } else {
                frames.pop();
                frame_children.pop();
                if low[node] == index[node] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == node {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[node]);
                }
            }
        }
    }
    comp
}

// ---------------------------------------------------------------------------
// linear sums

fn div_floor_i128(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && ((a % b < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil_i128(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && ((a % b < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

fn term_bounds(c: i64, v: usize, s: &DomStore) -> (i128, i128) {
    let (lo, hi) = (s.min(v) as i128, s.max(v) as i128);
    if c >= 0 {
        (c as i128 * lo, c as i128 * hi)
    } else {
        (c as i128 * hi, c as i128 * lo)
    }
}

fn sum(terms: &[(i64, usize)], op: CmpOp, rhs: i64, s: &mut DomStore) -> PropResult {
    match op {
        CmpOp::Le => sum_le(terms, rhs as i128, s),
        CmpOp::Ge => sum_ge(terms, rhs as i128, s),
        CmpOp::Lt => sum_le(terms, rhs as i128 - 1, s),
        CmpOp::Gt => sum_ge(terms, rhs as i128 + 1, s),
        CmpOp::Eq => {
            sum_le(terms, rhs as i128, s)?;
            sum_ge(terms, rhs as i128, s)
        }
        CmpOp::Ne => {
            let unfixed: Vec<&(i64, usize)> =
                terms.iter().filter(|(_, v)| !s.is_fixed(*v)).collect();
            let fixed_total: i128 = terms
                .iter()
                .filter(|(_, v)| s.is_fixed(*v))
                .map(|&(c, v)| c as i128 * s.value(v) as i128)
                .sum();
            match unfixed.as_slice() {
                [] => {
                    if fixed_total == rhs as i128 {
                        Err(Wipe)
                    } else {
                        Ok(())
                    }
                }
                [&(c, v)] if c != 0 => {
                    let need = rhs as i128 - fixed_total;
                    if need % c as i128 == 0 {
                        let forbidden = need / c as i128;
                        if forbidden >= i64::MIN as i128 && forbidden <= i64::MAX as i128 {
                            s.remove_value(v, forbidden as i64)?;
                        }
                    }
                    Ok(())
                }
                _ => Ok(()),
            }
        }
    }
}

fn sum_le(terms: &[(i64, usize)], rhs: i128, s: &mut DomStore) -> PropResult {
    let min_total: i128 = terms.iter().map(|&(c, v)| term_bounds(c, v, s).0).sum();
    if min_total > rhs {
        return Err(Wipe);
    }
    for &(c, v) in terms {
        if c == 0 {
            continue;
        }
        let (tmin, _) = term_bounds(c, v, s);
        let slack = rhs - (min_total - tmin);
        if c > 0 {
            s.remove_above(v, clamp_i64(div_floor_i128(slack, c as i128)))?;
        } else {
            s.remove_below(v, clamp_i64(div_ceil_i128(slack, c as i128)))?;
        }
    }
    Ok(())
}

fn sum_ge(terms: &[(i64, usize)], rhs: i128, s: &mut DomStore) -> PropResult {
    let neg: Vec<(i64, usize)> = terms.iter().map(|&(c, v)| (-c, v)).collect();
    sum_le(&neg, -rhs, s)
}

fn clamp_i64(x: i128) -> i64 {
    x.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

// ---------------------------------------------------------------------------
// counting

/// Required interval on a measured quantity implied by `op` against the
/// right-hand bounds.
fn required_interval(op: CmpOp, rlo: i64, rhi: i64) -> (i128, i128) {
    let (rlo, rhi) = (rlo as i128, rhi as i128);
    match op {
        CmpOp::Eq => (rlo, rhi),
        CmpOp::Le => (i128::MIN / 2, rhi),
        CmpOp::Lt => (i128::MIN / 2, rhi - 1),
        CmpOp::Ge => (rlo, i128::MAX / 2),
        CmpOp::Gt => (rlo + 1, i128::MAX / 2),
        CmpOp::Ne => (i128::MIN / 2, i128::MAX / 2),
    }
}

/// Prunes a variable right side given quantity bounds `q`.
fn prune_rhs(op: CmpOp, rhs: Rhs, q: (i128, i128), s: &mut DomStore) -> PropResult {
    let Rhs::Var(r) = rhs else { return Ok(()) };
    let (qlo, qhi) = q;
    match op {
        CmpOp::Eq => {
            s.remove_below(r, clamp_i64(qlo))?;
            s.remove_above(r, clamp_i64(qhi))
        }
        CmpOp::Le => s.remove_below(r, clamp_i64(qlo)),
        CmpOp::Lt => s.remove_below(r, clamp_i64(qlo + 1)),
        CmpOp::Ge => s.remove_above(r, clamp_i64(qhi)),
        CmpOp::Gt => s.remove_above(r, clamp_i64(qhi - 1)),
        CmpOp::Ne => {
            if qlo == qhi {
                s.remove_value(r, clamp_i64(qlo))?;
            }
            Ok(())
        }
    }
}

fn count(scope: &[usize], values: &[i64], op: CmpOp, rhs: Rhs, s: &mut DomStore) -> PropResult {
    let in_set = |val: i64| values.binary_search(&val).is_ok();
    let mut forced = 0i128;
    let mut possible = 0i128;
    let mut undecided: Vec<usize> = Vec::new();
    for &v in scope {
        let any = s.iter_active(v).any(in_set);
        let all = s.iter_active(v).all(in_set);
        if all {
            forced += 1;
        } else if any {
            possible += 1;
            undecided.push(v);
        }
    }
    let (qlo, qhi) = (forced, forced + possible);
    let (rlo, rhi) = rhs.bounds(s);
    if op == CmpOp::Ne {
        if qlo == qhi && rlo == rhi && qlo == rlo as i128 {
            return Err(Wipe);
        }
        return prune_rhs(op, rhs, (qlo, qhi), s);
    }
    let (need_lo, need_hi) = required_interval(op, rlo, rhi);
    if qlo > need_hi || qhi < need_lo {
        return Err(Wipe);
    }
    prune_rhs(op, rhs, (qlo, qhi), s)?;
    if qlo == need_hi {
        // no undecided variable may take a counted value
        for v in undecided {
            for val in s.active_values(v) {
                if in_set(val) {
                    s.remove_value(v, val)?;
                }
            }
        }
    } else if qhi == need_lo {
        // every undecided variable must take a counted value
        for v in undecided {
            for val in s.active_values(v) {
                if !in_set(val) {
                    s.remove_value(v, val)?;
                }
            }
        }
    }
    Ok(())
}

fn cardinality(
    scope: &[usize],
    values: &[i64],
    lo: &[i64],
    hi: &[i64],
    closed: bool,
    s: &mut DomStore,
) -> PropResult {
    if closed {
        for &v in scope {
            for val in s.active_values(v) {
                if !values.contains(&val) {
                    s.remove_value(v, val)?;
                }
            }
        }
    }
    for (k, &val) in values.iter().enumerate() {
        let mut fixed_here = 0i64;
        let mut candidates: Vec<usize> = Vec::new();
        for &v in scope {
            if s.is_fixed(v) && s.value(v) == val {
                fixed_here += 1;
            } else if s.contains(v, val) {
                candidates.push(v);
            }
        }
        let possible = fixed_here + candidates.len() as i64;
        if fixed_here > hi[k] || possible < lo[k] {
            return Err(Wipe);
        }
        if fixed_here == hi[k] {
            for v in candidates {
                s.remove_value(v, val)?;
            }
        } else if possible == lo[k] {
            for v in candidates {
                s.assign(v, val)?;
            }
        }
    }
    Ok(())
}

fn n_values(scope: &[usize], op: CmpOp, rhs: Rhs, s: &mut DomStore) -> PropResult {
    let mut fixed_vals: Vec<i64> = scope
        .iter()
        .filter(|&&v| s.is_fixed(v))
        .map(|&v| s.value(v))
        .collect();
    fixed_vals.sort_unstable();
    fixed_vals.dedup();
    let unfixed: Vec<usize> = scope.iter().copied().filter(|&v| !s.is_fixed(v)).collect();
    let mut fresh: Vec<i64> = Vec::new();
    for &v in &unfixed {
        for val in s.iter_active(v) {
            if fixed_vals.binary_search(&val).is_err() {
                fresh.push(val);
            }
        }
    }
    fresh.sort_unstable();
    fresh.dedup();

    let d = fixed_vals.len() as i128;
    let qlo = if scope.is_empty() { 0 } else { d.max(1) };
    let qhi = d + (unfixed.len() as i128).min(fresh.len() as i128);

    let (rlo, rhi) = rhs.bounds(s);
    if op == CmpOp::Ne {
        if qlo == qhi && rlo == rhi && qlo == rlo as i128 {
            return Err(Wipe);
        }
        return prune_rhs(op, rhs, (qlo, qhi), s);
    }
    let (need_lo, need_hi) = required_interval(op, rlo, rhi);
    if qlo > need_hi || qhi < need_lo {
        return Err(Wipe);
    }
    prune_rhs(op, rhs, (qlo, qhi), s)?;
    if need_hi == d && !unfixed.is_empty() {
        // no new value may appear
        for &v in &unfixed {
            for val in s.active_values(v) {
                if fixed_vals.binary_search(&val).is_err() {
                    s.remove_value(v, val)?;
                }
            }
        }
    }
    if need_lo == d + unfixed.len() as i128 {
        // every unfixed variable must introduce a new value
        for &v in &unfixed {
            for val in &fixed_vals {
                s.remove_value(v, *val)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// element / allEqual / ordered / lex / extremum

fn element(list: &[usize], index: usize, value: Rhs, s: &mut DomStore) -> PropResult {
    let value_has = |s: &DomStore, val: i64| match value {
        Rhs::Const(c) => c == val,
        Rhs::Var(v) => s.contains(v, val),
    };
    // index stays within the list and compatible with the value side
    for i in s.active_values(index) {
        let ok = i >= 0
            && (i as usize) < list.len()
            && s.iter_active(list[i as usize]).any(|w| value_has(s, w));
        if !ok {
            s.remove_value(index, i)?;
        }
    }
    // value side keeps only reachable values
    if let Rhs::Var(v) = value {
        for w in s.active_values(v) {
            let reachable = s
                .iter_active(index)
                .any(|i| i >= 0 && (i as usize) < list.len() && s.contains(list[i as usize], w));
            if !reachable {
                s.remove_value(v, w)?;
            }
        }
    }
    // a fixed index channels both ways
    if s.is_fixed(index) {
        let i = s.value(index);
        if i < 0 || i as usize >= list.len() {
            return Err(Wipe);
        }
        let cell = list[i as usize];
        for w in s.active_values(cell) {
            if !value_has(s, w) {
                s.remove_value(cell, w)?;
            }
        }
        if let Rhs::Var(v) = value {
            for w in s.active_values(v) {
                if !s.contains(cell, w) {
                    s.remove_value(v, w)?;
                }
            }
        }
    }
    Ok(())
}

fn all_equal(scope: &[usize], s: &mut DomStore) -> PropResult {
    let Some((&first, rest)) = scope.split_first() else {
        return Ok(());
    };
    let mut common: Vec<i64> = s.active_values(first);
    for &v in rest {
        common.retain(|&val| s.contains(v, val));
        if common.is_empty() {
            return Err(Wipe);
        }
    }
    for &v in scope {
        for val in s.active_values(v) {
            if common.binary_search(&val).is_err() {
                s.remove_value(v, val)?;
            }
        }
    }
    Ok(())
}

fn ordered(scope: &[usize], lengths: &[i64], op: OrderOp, s: &mut DomStore) -> PropResult {
    let n = scope.len();
    if n < 2 {
        return Ok(());
    }
    let strict = op.strict() as i64;
    // pair rule: a + len (op) b, swept forward then backward
    for i in 0..n - 1 {
        let (a, b, len) = (scope[i], scope[i + 1], lengths.get(i).copied().unwrap_or(0));
        if op.descending() {
            s.remove_above(b, s.max(a).saturating_add(len).saturating_sub(strict))?;
        } else {
            s.remove_below(b, s.min(a).saturating_add(len).saturating_add(strict))?;
        }
    }
    for i in (0..n - 1).rev() {
        let (a, b, len) = (scope[i], scope[i + 1], lengths.get(i).copied().unwrap_or(0));
        if op.descending() {
            s.remove_below(a, s.min(b).saturating_sub(len).saturating_add(strict))?;
        } else {
            s.remove_above(a, s.max(b).saturating_sub(len).saturating_sub(strict))?;
        }
    }
    Ok(())
}

fn lex(lists: &[Vec<usize>], op: OrderOp, s: &mut DomStore) -> PropResult {
    for w in lists.windows(2) {
        let (x, y) = if op.descending() {
            (&w[1], &w[0])
        } else {
            (&w[0], &w[1])
        };
        lex_le_pair(x, y, op.strict(), s)?;
    }
    Ok(())
}

/// Enforces x <=lex y (strictly when `strict`).
fn lex_le_pair(x: &[usize], y: &[usize], strict: bool, s: &mut DomStore) -> PropResult {
    let mut i = 0;
    loop {
        if i == x.len() {
            return if strict { Err(Wipe) } else { Ok(()) };
        }
        let (a, b) = (x[i], y[i]);
        if s.is_fixed(a) && s.is_fixed(b) && s.value(a) == s.value(b) {
            i += 1;
            continue;
        }
        // first position that is not forced equal: a <= b is necessary
        s.remove_above(a, s.max(b))?;
        s.remove_below(b, s.min(a))?;
        if s.is_fixed(a) && s.is_fixed(b) && s.value(a) == s.value(b) {
            i += 1;
            continue;
        }
        return Ok(());
    }
}

fn extremum(is_max: bool, scope: &[usize], op: CmpOp, rhs: Rhs, s: &mut DomStore) -> PropResult {
    if scope.is_empty() {
        return Err(Wipe);
    }
    let (qlo, qhi) = if is_max {
        (
            scope.iter().map(|&v| s.min(v)).max().unwrap() as i128,
            scope.iter().map(|&v| s.max(v)).max().unwrap() as i128,
        )
    } else {
        (
            scope.iter().map(|&v| s.min(v)).min().unwrap() as i128,
            scope.iter().map(|&v| s.max(v)).min().unwrap() as i128,
        )
    };
    let (rlo, rhi) = rhs.bounds(s);
    if op == CmpOp::Ne {
        if qlo == qhi && rlo == rhi && qlo == rlo as i128 {
            return Err(Wipe);
        }
        return prune_rhs(op, rhs, (qlo, qhi), s);
    }
    let (need_lo, need_hi) = required_interval(op, rlo, rhi);
    if qlo > need_hi || qhi < need_lo {
        return Err(Wipe);
    }
    prune_rhs(op, rhs, (qlo, qhi), s)?;
    if is_max {
        // every element is at most the required maximum
        if need_hi < i128::MAX / 2 {
            for &v in scope {
                s.remove_above(v, clamp_i64(need_hi))?;
            }
        }
        // someone must reach the required minimum
        if need_lo > i128::MIN / 2 {
            let reach: Vec<usize> = scope
                .iter()
                .copied()
                .filter(|&v| s.max(v) as i128 >= need_lo)
                .collect();
            match reach.as_slice() {
                [] => return Err(Wipe),
                [only] => s.remove_below(*only, clamp_i64(need_lo))?,
                _ => {}
            }
        }
    } else {
        if need_lo > i128::MIN / 2 {
            for &v in scope {
                s.remove_below(v, clamp_i64(need_lo))?;
            }
        }
        if need_hi < i128::MAX / 2 {
            let reach: Vec<usize> = scope
                .iter()
                .copied()
                .filter(|&v| s.min(v) as i128 <= need_hi)
                .collect();
            match reach.as_slice() {
                [] => return Err(Wipe),
                [only] => s.remove_above(*only, clamp_i64(need_hi))?,
                _ => {}
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// objective cut: measured quantity must be <= bound

fn objective_cut(cut: &Cut, bound: i64, s: &mut DomStore) -> PropResult {
    match cut {
        Cut::Lin { terms } => sum_le(terms, bound as i128, s),
        Cut::MaxOf {
            scope,
            negate: false,
        } => {
            for &v in scope {
                s.remove_above(v, bound)?;
            }
            Ok(())
        }
        Cut::MaxOf {
            scope,
            negate: true,
        } => {
            // -max <= bound, i.e. max >= -bound
            let need = -(bound as i128);
            let reach: Vec<usize> = scope
                .iter()
                .copied()
                .filter(|&v| s.max(v) as i128 >= need)
                .collect();
            match reach.as_slice() {
                [] => Err(Wipe),
                [only] => s.remove_below(*only, clamp_i64(need)),
                _ => Ok(()),
            }
        }
        Cut::MinOf {
            scope,
            negate: true,
        } => {
            for &v in scope {
                s.remove_below(v, clamp_i64(-(bound as i128)))?;
            }
            Ok(())
        }
        Cut::MinOf {
            scope,
            negate: false,
        } => {
            // min <= bound: someone must go at or below it
            let reach: Vec<usize> = scope
                .iter()
                .copied()
                .filter(|&v| s.min(v) <= bound)
                .collect();
            match reach.as_slice() {
                [] => Err(Wipe),
                [only] => s.remove_above(*only, bound),
                _ => Ok(()),
            }
        }
        Cut::Expr {
            expr,
            scope,
            negate,
        } => {
            // (negate ? -eval : eval) <= bound, handled like an intension
            let unfixed: Vec<usize> = scope.iter().copied().filter(|&v| !s.is_fixed(v)).collect();
            let value_ok = |pairs: &[(usize, i64)]| match eval_expr(expr, &Scratch { pairs }) {
                Ok(v) => {
                    let f = if *negate { -(v as i128) } else { v as i128 };
                    f <= bound as i128
                }
                Err(_) => false,
            };
            match unfixed.as_slice() {
                [] => {
                    let pairs: Vec<(usize, i64)> = scope.iter().map(|&v| (v, s.value(v))).collect();
                    if value_ok(&pairs) {
                        Ok(())
                    } else {
                        Err(Wipe)
                    }
                }
                [u] => {
                    let mut pairs: Vec<(usize, i64)> = scope
                        .iter()
                        .filter(|&&v| v != *u)
                        .map(|&v| (v, s.value(v)))
                        .collect();
                    pairs.push((*u, 0));
                    for val in s.active_values(*u) {
                        pairs.last_mut().unwrap().1 = val;
                        if !value_ok(&pairs) {
                            s.remove_value(*u, val)?;
                        }
                    }
                    Ok(())
                }
                _ => Ok(()),
            }
        }
    }
}
