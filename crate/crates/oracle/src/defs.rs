//! Definition-level constraint evaluation: the most literal transcription of
//! each constraint's mathematical statement, written independently of the
//! production checker so the two can vouch for each other.

use std::collections::BTreeMap;

use xcspkit_core::ir::{Constraint, Expr, Operand, OrderOp, TupleEntry, VarId};

fn val(a: &[i64], v: VarId) -> i64 {
    a[v.0]
}

fn side(a: &[i64], o: &Operand) -> i64 {
    match o {
        Operand::Const(c) => *c,
        Operand::Var(v) => val(a, *v),
    }
}

/// Expression evaluation in i128 (no overflow for small test values);
/// division by zero yields None.
pub fn eval_i128(e: &Expr, a: &[i64]) -> Option<i128> {
    let b = |x: bool| if x { 1i128 } else { 0 };
    let t = |v: i128| v != 0;
    Some(match e {
        Expr::Const(c) => *c as i128,
        Expr::Var(v) => a[v.0] as i128,
        Expr::Neg(x) => -eval_i128(x, a)?,
        Expr::Abs(x) => eval_i128(x, a)?.abs(),
        Expr::Add(xs) => {
            let mut acc = 0;
            for x in xs {
                acc += eval_i128(x, a)?;
            }
            acc
        }
        Expr::Sub(x, y) => eval_i128(x, a)? - eval_i128(y, a)?,
        Expr::Mul(xs) => {
            let mut acc = 1;
            for x in xs {
                acc *= eval_i128(x, a)?;
            }
            acc
        }
        Expr::DivFloor(x, y) => {
            let (p, q) = (eval_i128(x, a)?, eval_i128(y, a)?);
            if q == 0 {
                return None;
            }
            // floor(p / q) from the truncating division
            let d = p / q;
            if p % q != 0 && ((p % q < 0) != (q < 0)) {
                d - 1
            } else {
                d
            }
        }
        Expr::Mod(x, y) => {
            let (p, q) = (eval_i128(x, a)?, eval_i128(y, a)?);
            if q == 0 {
                return None;
            }
            let r = p % q;
            if r != 0 && ((r < 0) != (q < 0)) {
                r + q
            } else {
                r
            }
        }
        Expr::Dist(x, y) => (eval_i128(x, a)? - eval_i128(y, a)?).abs(),
        Expr::Min(xs) => {
            let mut acc = i128::MAX;
            for x in xs {
                acc = acc.min(eval_i128(x, a)?);
            }
            acc
        }
        Expr::Max(xs) => {
            let mut acc = i128::MIN;
            for x in xs {
                acc = acc.max(eval_i128(x, a)?);
            }
            acc
        }
        Expr::IfThenElse(c, x, y) => {
            if t(eval_i128(c, a)?) {
                eval_i128(x, a)?
            } else {
                eval_i128(y, a)?
            }
        }
        Expr::Eq(x, y) => b(eval_i128(x, a)? == eval_i128(y, a)?),
        Expr::Ne(x, y) => b(eval_i128(x, a)? != eval_i128(y, a)?),
        Expr::Lt(x, y) => b(eval_i128(x, a)? < eval_i128(y, a)?),
        Expr::Le(x, y) => b(eval_i128(x, a)? <= eval_i128(y, a)?),
        Expr::Gt(x, y) => b(eval_i128(x, a)? > eval_i128(y, a)?),
        Expr::Ge(x, y) => b(eval_i128(x, a)? >= eval_i128(y, a)?),
        Expr::And(xs) => {
            let mut acc = true;
            for x in xs {
                acc = acc && t(eval_i128(x, a)?);
            }
            b(acc)
        }
        Expr::Or(xs) => {
            let mut acc = false;
            for x in xs {
                acc = acc || t(eval_i128(x, a)?);
            }
            b(acc)
        }
        Expr::Not(x) => b(!t(eval_i128(x, a)?)),
        Expr::Imp(x, y) => b(!t(eval_i128(x, a)?) || t(eval_i128(y, a)?)),
        Expr::Iff(x, y) => b(t(eval_i128(x, a)?) == t(eval_i128(y, a)?)),
        Expr::Xor(x, y) => b(t(eval_i128(x, a)?) != t(eval_i128(y, a)?)),
        Expr::InSet(x, set) => {
            let v = eval_i128(x, a)?;
            b(set.iter().any(|s| *s as i128 == v))
        }
    })
}

fn cmp(op: xcspkit_core::ir::CmpOp, x: i128, y: i128) -> bool {
    use xcspkit_core::ir::CmpOp::*;
    match op {
        Lt => x < y,
        Le => x <= y,
        Gt => x > y,
        Ge => x >= y,
        Eq => x == y,
        Ne => x != y,
    }
}

fn word_reaches(start: &str, transitions: &[(String, i64, String)], word: &[i64]) -> Vec<String> {
    let mut states: Vec<String> = vec![start.to_string()];
    for &sym in word {
        let mut next = Vec::new();
        for st in &states {
            for (from, s, to) in transitions {
                if from == st && *s == sym && !next.contains(to) {
                    next.push(to.clone());
                }
            }
        }
        states = next;
    }
    states
}

/// Truth of one constraint under a total assignment, straight from its
/// definition.
pub fn definition_satisfied(c: &Constraint, a: &[i64]) -> bool {
    match c {
        Constraint::Intension(e) => matches!(eval_i128(e, a), Some(v) if v != 0),
        Constraint::Extension {
            scope,
            tuples,
            positive,
            ..
        } => {
            let point: Vec<i64> = scope.iter().map(|v| val(a, *v)).collect();
            let mut member = false;
            for t in tuples {
                let mut all = t.len() == point.len();
                for (cell, x) in t.iter().zip(&point) {
                    all = all
                        && match cell {
                            TupleEntry::Star => true,
                            TupleEntry::Val(w) => w == x,
                        };
                }
                member = member || all;
            }
            if *positive {
                member
            } else {
                !member
            }
        }
        Constraint::Regular { scope, automaton } => {
            let word: Vec<i64> = scope.iter().map(|v| val(a, *v)).collect();
            word_reaches(&automaton.start, &automaton.transitions, &word)
                .iter()
                .any(|s| automaton.finals.contains(s))
        }
        Constraint::Mdd { scope, graph } => {
            let word: Vec<i64> = scope.iter().map(|v| val(a, *v)).collect();
            word_reaches(&graph.root, &graph.transitions, &word).contains(&graph.terminal)
        }
        Constraint::AllDifferent { scope, except } => {
            for i in 0..scope.len() {
                for j in i + 1..scope.len() {
                    let (x, y) = (val(a, scope[i]), val(a, scope[j]));
                    if x == y && !except.contains(&x) {
                        return false;
                    }
                }
            }
            true
        }
        Constraint::AllDifferentList { lists } => {
            for i in 0..lists.len() {
                for j in i + 1..lists.len() {
                    let differ =
                        (0..lists[i].len()).any(|k| val(a, lists[i][k]) != val(a, lists[j][k]));
                    if !differ {
                        return false;
                    }
                }
            }
            true
        }
        Constraint::AllEqual { scope } => {
            (1..scope.len()).all(|i| val(a, scope[i]) == val(a, scope[0]))
        }
        Constraint::Ordered { scope, lengths, op } => {
            for i in 0..scope.len().saturating_sub(1) {
                let l = lengths.as_ref().map_or(0, |ls| ls[i]) as i128;
                let (x, y) = (val(a, scope[i]) as i128 + l, val(a, scope[i + 1]) as i128);
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
        Constraint::Lex { lists, op } => {
            for k in 0..lists.len().saturating_sub(1) {
                let (x, y): (Vec<i64>, Vec<i64>) = (
                    lists[k].iter().map(|v| val(a, *v)).collect(),
                    lists[k + 1].iter().map(|v| val(a, *v)).collect(),
                );
                let (lhs, rhs) = match op {
                    OrderOp::Lt | OrderOp::Le => (&x, &y),
                    OrderOp::Gt | OrderOp::Ge => (&y, &x),
                };
                let strict = matches!(op, OrderOp::Lt | OrderOp::Gt);
                // first differing position decides
                let mut rel = None;
                for i in 0..lhs.len() {
                    if lhs[i] != rhs[i] {
                        rel = Some(lhs[i] < rhs[i]);
                        break;
                    }
                }
                match rel {
                    Some(true) => {}
                    Some(false) => return false,
                    None => {
                        if strict {
                            return false;
                        }
                    }
                }
            }
            true
        }
        Constraint::Precedence { scope, values } => {
            let first_at = |x: i64| (0..scope.len()).find(|&i| val(a, scope[i]) == x);
            for w in values.windows(2) {
                if let Some(pos_b) = first_at(w[1]) {
                    match first_at(w[0]) {
                        Some(pos_a) if pos_a < pos_b => {}
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
            let mut total: i128 = 0;
            for (v, c) in scope.iter().zip(coeffs) {
                total += val(a, *v) as i128 * *c as i128;
            }
            cmp(*op, total, side(a, rhs) as i128)
        }
        Constraint::Count {
            scope,
            values,
            op,
            rhs,
        } => {
            let mut n = 0i128;
            for v in scope {
                if values.contains(&val(a, *v)) {
                    n += 1;
                }
            }
            cmp(*op, n, side(a, rhs) as i128)
        }
        Constraint::NValues { scope, op, rhs } => {
            let mut distinct: Vec<i64> = Vec::new();
            for v in scope {
                if !distinct.contains(&val(a, *v)) {
                    distinct.push(val(a, *v));
                }
            }
            cmp(*op, distinct.len() as i128, side(a, rhs) as i128)
        }
        Constraint::Cardinality {
            scope,
            values,
            occurs,
            closed,
        } => {
            let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
            for v in scope {
                *counts.entry(val(a, *v)).or_insert(0) += 1;
            }
            if *closed {
                for key in counts.keys() {
                    if !values.contains(key) {
                        return false;
                    }
                }
            }
            for (value, occ) in values.iter().zip(occurs) {
                let n = counts.get(value).copied().unwrap_or(0);
                let (lo, hi) = occ.bounds();
                if n < lo || n > hi {
                    return false;
                }
            }
            true
        }
        Constraint::Maximum { scope, op, rhs } => {
            let m = scope.iter().map(|v| val(a, *v)).max();
            matches!(m, Some(m) if cmp(*op, m as i128, side(a, rhs) as i128))
        }
        Constraint::Minimum { scope, op, rhs } => {
            let m = scope.iter().map(|v| val(a, *v)).min();
            matches!(m, Some(m) if cmp(*op, m as i128, side(a, rhs) as i128))
        }
        Constraint::Element { list, index, value } => {
            let i = val(a, *index);
            0 <= i && (i as usize) < list.len() && val(a, list[i as usize]) == side(a, value)
        }
        Constraint::Channel { list, list2 } => match list2 {
            None => (0..list.len()).all(|i| {
                let j = val(a, list[i]);
                0 <= j && (j as usize) < list.len() && val(a, list[j as usize]) == i as i64
            }),
            Some(l2) => {
                let fwd = (0..list.len()).all(|i| {
                    let j = val(a, list[i]);
                    0 <= j && (j as usize) < l2.len() && val(a, l2[j as usize]) == i as i64
                });
                let bwd = list.len() != l2.len()
                    || (0..l2.len()).all(|j| {
                        let i = val(a, l2[j]);
                        0 <= i && (i as usize) < list.len() && val(a, list[i as usize]) == j as i64
                    });
                fwd && bwd
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
                    // intervals [x, x+l) intersect iff each starts before the
                    // other ends
                    let (xi, xj) = (val(a, origins[i]) as i128, val(a, origins[j]) as i128);
                    let (li, lj) = (lengths[i] as i128, lengths[j] as i128);
                    if xi < xj + lj && xj < xi + li {
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
            // scan every integer time point in the busy horizon
            let starts: Vec<i128> = origins.iter().map(|v| val(a, *v) as i128).collect();
            let lo = starts.iter().copied().min().unwrap_or(0);
            let hi = starts
                .iter()
                .zip(lengths)
                .map(|(s, l)| s + *l as i128)
                .max()
                .unwrap_or(0);
            let mut t = lo;
            while t < hi {
                let mut load: i128 = 0;
                for k in 0..origins.len() {
                    if starts[k] <= t && t < starts[k] + lengths[k] as i128 {
                        load += heights[k] as i128;
                    }
                }
                if load > *limit as i128 {
                    return false;
                }
                t += 1;
            }
            true
        }
        Constraint::BinPacking {
            scope,
            sizes,
            limits,
        } => {
            for (b, &cap) in limits.iter().enumerate() {
                let mut load: i128 = 0;
                for (v, sz) in scope.iter().zip(sizes) {
                    if val(a, *v) == b as i64 {
                        load += *sz as i128;
                    }
                }
                if load > cap as i128 {
                    return false;
                }
            }
            scope
                .iter()
                .all(|v| 0 <= val(a, *v) && (val(a, *v) as usize) < limits.len())
        }
        Constraint::Knapsack {
            scope,
            weights,
            limit,
            profits,
            op,
            rhs,
        } => {
            let mut w: i128 = 0;
            let mut p: i128 = 0;
            for i in 0..scope.len() {
                w += val(a, scope[i]) as i128 * weights[i] as i128;
                p += val(a, scope[i]) as i128 * profits[i] as i128;
            }
            w <= *limit as i128 && cmp(*op, p, side(a, rhs) as i128)
        }
        Constraint::Circuit { scope } => {
            let n = scope.len();
            let succ: Vec<i64> = scope.iter().map(|v| val(a, *v)).collect();
            if succ.iter().any(|&x| x < 0 || x as usize >= n) {
                return false;
            }
            let inside: Vec<usize> = (0..n).filter(|&i| succ[i] != i as i64).collect();
            if inside.len() < 2 {
                return false;
            }
            // walk from the smallest member; the walk must visit every
            // member exactly once and close
            let mut seen = vec![false; n];
            let mut cur = inside[0];
            let mut steps = 0;
            loop {
                if seen[cur] {
                    return false;
                }
                seen[cur] = true;
                steps += 1;
                let nxt = succ[cur] as usize;
                if nxt == cur {
                    return false;
                }
                cur = nxt;
                if cur == inside[0] {
                    break;
                }
                if steps > n {
                    return false;
                }
            }
            steps == inside.len() && inside.iter().all(|&i| seen[i])
        }
        Constraint::Instantiation { scope, values } => {
            (0..scope.len()).all(|i| val(a, scope[i]) == values[i])
        }
        Constraint::Slide {
            list,
            offset,
            template,
        } => {
            let arity = xcspkit_core::ir::slide_arity(template);
            if arity == 0 || arity > list.len() {
                return false;
            }
            let mut start = 0;
            while start + arity <= list.len() {
                let window: Vec<i64> = list[start..start + arity]
                    .iter()
                    .map(|v| val(a, *v))
                    .collect();
                if !definition_satisfied(template, &window) {
                    return false;
                }
                start += offset;
            }
            true
        }
    }
}

/// Objective value computed directly from the objective expression.
pub fn objective_value(inst: &xcspkit_core::ir::Instance, a: &[i64]) -> Option<i128> {
    use xcspkit_core::ir::ObjectiveExpr;
    let obj = inst.objective.as_ref()?;
    Some(match &obj.expr {
        ObjectiveExpr::Var(v) => val(a, *v) as i128,
        ObjectiveExpr::Sum { scope, coeffs } => scope
            .iter()
            .zip(coeffs)
            .map(|(v, c)| val(a, *v) as i128 * *c as i128)
            .sum(),
        ObjectiveExpr::Maximum(s) => s.iter().map(|v| val(a, *v) as i128).max()?,
        ObjectiveExpr::Minimum(s) => s.iter().map(|v| val(a, *v) as i128).min()?,
        ObjectiveExpr::Expr(e) => eval_i128(e, a)?,
    })
}
