//! Generators for the satisfaction problems.

use super::{param_err, GenError};
use crate::ir::{
    CmpOp, Constraint, Domain, Expr, Instance, InstanceBuilder, OccurSpec, Operand, OrderOp, VarId,
};

const SYM: &str = "symmetry-breaking";

fn dom(lo: i64, hi: i64) -> Result<Domain, GenError> {
    Domain::range(lo, hi).map_err(|e| param_err(format!("empty domain: {e}")))
}

/// Chain of `n` pairwise-distinct values in 1..=p where each neighbour pair
/// is related by divisibility.
pub fn gen_chain_reaction(n: i64, p: i64) -> Result<Instance, GenError> {
    if n < 1 || p < 1 {
        return Err(param_err(format!(
            "chain ({n},{p}): both parameters must be positive"
        )));
    }
    let n = n as usize;
    let mut b = InstanceBuilder::new(format!("ChainReaction-{n}-{p}"));
    let x: Vec<VarId> = (0..n)
        .map(|i| b.add_var(format!("x[{i}]"), dom(1, p).unwrap()))
        .collect();
    b.add_constraint(Constraint::AllDifferent {
        scope: x.clone(),
        except: vec![],
    });
    for i in 0..n - 1 {
        b.add_constraint(Constraint::Intension(Expr::or(vec![
            Expr::eq(
                Expr::modulo(Expr::var(x[i]), Expr::var(x[i + 1])),
                Expr::cst(0),
            ),
            Expr::eq(
                Expr::modulo(Expr::var(x[i + 1]), Expr::var(x[i])),
                Expr::cst(0),
            ),
        ])));
    }
    Ok(b.build())
}

/// Four overlapping square regions whose eight line sums each differ by at
/// most one, with distinct values over the non-shared cells.
pub fn gen_almost_magic(n: i64, p: i64) -> Result<Instance, GenError> {
    if n < 3 {
        return Err(param_err(format!(
            "almost magic: region order {n} must be at least 3"
        )));
    }
    if p < 2 {
        return Err(param_err(format!(
            "almost magic: value bound {p} must be at least 2"
        )));
    }
    let nu = n as usize;
    let mut b = InstanceBuilder::new(format!("AlmostMagic-{n}-{p}"));
    let cell_dom = dom(1, p - 1)?;
    let mut x = vec![vec![vec![VarId(0); nu]; nu]; 4];
    for (k, region) in x.iter_mut().enumerate() {
        for (i, row) in region.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = b.add_var(format!("x[{k}][{i}][{j}]"), cell_dom.clone());
            }
        }
    }
    let y: Vec<VarId> = (0..4)
        .map(|k| b.add_var(format!("y[{k}]"), dom(0, p * 3 - 1).unwrap()))
        .collect();

    // distinct cells: all of region 0 and 3, plus the non-shared cells of
    // regions 1 and 2
    let mut distinct: Vec<VarId> = Vec::new();
    distinct.extend(x[0].iter().flatten());
    distinct.extend(&x[1][0][1..]);
    distinct.extend(&x[1][1][1..]);
    distinct.push(x[1][2][2]);
    distinct.push(x[2][0][0]);
    distinct.extend(&x[2][1][..nu - 1]);
    distinct.extend(&x[2][2][..nu - 1]);
    distinct.extend(x[3].iter().flatten());
    b.add_constraint(Constraint::AllDifferent {
        scope: distinct,
        except: vec![],
    });

    for k in 0..4 {
        let mut lines: Vec<Vec<VarId>> = Vec::new();
        for i in 0..nu {
            lines.push(x[k][i].clone());
        }
        for j in 0..nu {
            lines.push((0..nu).map(|i| x[k][i][j]).collect());
        }
        lines.push((0..nu).map(|i| x[k][i][i]).collect());
        lines.push((0..nu).map(|i| x[k][nu - 1 - i][i]).collect());
        for line in lines {
            let mut scope = line.clone();
            scope.push(y[k]);
            let mut coeffs = vec![1i64; line.len()];
            coeffs.push(-1);
            // sum(line) >= y[k]  and  sum(line) <= y[k] + 1
            b.add_constraint(Constraint::Sum {
                scope: scope.clone(),
                coeffs: coeffs.clone(),
                op: CmpOp::Ge,
                rhs: Operand::Const(0),
            });
            b.add_constraint(Constraint::Sum {
                scope,
                coeffs,
                op: CmpOp::Le,
                rhs: Operand::Const(1),
            });
        }
    }

    // shared cells between neighbouring regions
    for i in 1..nu {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(x[0][i][nu - 1]),
            Expr::var(x[1][i - 1][0]),
        )));
    }
    for j in 1..nu {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(x[0][nu - 1][j - 1]),
            Expr::var(x[2][0][j]),
        )));
    }
    for j in 1..nu {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(x[1][nu - 1][j - 1]),
            Expr::var(x[3][0][j]),
        )));
    }
    for i in 1..nu {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(x[2][i][nu - 1]),
            Expr::var(x[3][i - 1][0]),
        )));
    }
    Ok(b.build())
}

/// Graceful labelling of `p` copies of a `k`-clique joined by paths.
pub fn gen_graceful_graph(k: i64, p: i64) -> Result<Instance, GenError> {
    if k < 1 || p < 1 {
        return Err(param_err(format!(
            "graceful graph ({k},{p}): both parameters must be positive"
        )));
    }
    let n_edges = k * (k - 1) * p / 2 + k * (p - 1);
    let (ku, pu) = (k as usize, p as usize);
    let mut b = InstanceBuilder::new(format!("GracefulGraph-{k}-{p}"));

    let mut cn = vec![vec![VarId(0); ku]; pu];
    for (i, row) in cn.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = b.add_var(format!("cn[{i}][{j}]"), dom(0, n_edges)?);
        }
    }
    let mut ce: Vec<(usize, usize, usize, VarId)> = Vec::new();
    for i in 0..pu {
        for j1 in 0..ku {
            for j2 in j1 + 1..ku {
                let v = b.add_var(format!("ce[{i}][{j1}][{j2}]"), dom(1, n_edges)?);
                ce.push((i, j1, j2, v));
            }
        }
    }
    let mut cp = vec![vec![VarId(0); ku]; pu.saturating_sub(1)];
    for (i, row) in cp.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = b.add_var(format!("cp[{i}][{j}]"), dom(1, n_edges)?);
        }
    }

    b.add_constraint(Constraint::AllDifferent {
        scope: cn.iter().flatten().copied().collect(),
        except: vec![],
    });
    let mut edge_colors: Vec<VarId> = ce.iter().map(|&(_, _, _, v)| v).collect();
    edge_colors.extend(cp.iter().flatten());
    if !edge_colors.is_empty() {
        b.add_constraint(Constraint::AllDifferent {
            scope: edge_colors,
            except: vec![],
        });
    }

    for &(i, j1, j2, v) in &ce {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(v),
            Expr::dist(Expr::var(cn[i][j1]), Expr::var(cn[i][j2])),
        )));
    }
    for i in 0..pu.saturating_sub(1) {
        for j in 0..ku {
            b.add_constraint(Constraint::Intension(Expr::eq(
                Expr::var(cp[i][j]),
                Expr::dist(Expr::var(cn[i][j]), Expr::var(cn[i + 1][j])),
            )));
        }
    }
    Ok(b.build())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeterosquareVariant {
    None,
    Easy,
    Fair,
    Hard,
}

impl HeterosquareVariant {
    pub fn name(self) -> &'static str {
        match self {
            HeterosquareVariant::None => "",
            HeterosquareVariant::Easy => "easy",
            HeterosquareVariant::Fair => "fair",
            HeterosquareVariant::Hard => "hard",
        }
    }
}

/// Square of 1..n² whose row, column and diagonal sums are pairwise distinct.
/// Variants tighten the sum-variable bounds.
pub fn gen_heterosquare(n: i64, variant: HeterosquareVariant) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(param_err(format!(
            "heterosquare: order {n} must be at least 2"
        )));
    }
    let mut lb = n * (n + 1) / 2;
    let mut ub = (n * n) * (n * n + 1) / 2;
    match variant {
        HeterosquareVariant::None => {}
        v => {
            match v {
                HeterosquareVariant::Easy => lb *= n / 2,
                HeterosquareVariant::Fair => lb *= n - 1,
                HeterosquareVariant::Hard => lb *= n,
                HeterosquareVariant::None => unreachable!(),
            }
            ub /= n / 2;
        }
    }
    if lb > ub {
        return Err(param_err(format!(
            "heterosquare: variant bounds are empty ({lb}..{ub})"
        )));
    }
    let nu = n as usize;
    let suffix = if variant == HeterosquareVariant::None {
        String::new()
    } else {
        format!("-{}", variant.name())
    };
    let mut b = InstanceBuilder::new(format!("Heterosquare-{n}{suffix}"));

    let mut x = vec![vec![VarId(0); nu]; nu];
    for (i, row) in x.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = b.add_var(format!("x[{i}][{j}]"), dom(1, n * n)?);
        }
    }
    let rs: Vec<VarId> = (0..nu)
        .map(|i| b.add_var(format!("rs[{i}]"), dom(lb, ub).unwrap()))
        .collect();
    let cs: Vec<VarId> = (0..nu)
        .map(|j| b.add_var(format!("cs[{j}]"), dom(lb, ub).unwrap()))
        .collect();
    let ds: Vec<VarId> = (0..2)
        .map(|d| b.add_var(format!("ds[{d}]"), dom(lb, ub).unwrap()))
        .collect();

    b.add_constraint(Constraint::AllDifferent {
        scope: x.iter().flatten().copied().collect(),
        except: vec![],
    });

    let sum_eq = |line: Vec<VarId>, target: VarId| {
        let mut scope = line.clone();
        scope.push(target);
        let mut coeffs = vec![1i64; line.len()];
        coeffs.push(-1);
        Constraint::Sum {
            scope,
            coeffs,
            op: CmpOp::Eq,
            rhs: Operand::Const(0),
        }
    };
    for i in 0..nu {
        b.add_constraint(sum_eq(x[i].clone(), rs[i]));
    }
    for j in 0..nu {
        b.add_constraint(sum_eq((0..nu).map(|i| x[i][j]).collect(), cs[j]));
    }
    b.add_constraint(sum_eq((0..nu).map(|i| x[i][i]).collect(), ds[0]));
    b.add_constraint(sum_eq((0..nu).map(|i| x[nu - 1 - i][i]).collect(), ds[1]));

    let mut sums = rs.clone();
    sums.extend(&cs);
    sums.extend(&ds);
    b.add_constraint(Constraint::AllDifferent {
        scope: sums,
        except: vec![],
    });

    // Frenicle standard form
    for (a, c) in [
        (x[0][0], x[0][nu - 1]),
        (x[0][0], x[nu - 1][0]),
        (x[0][0], x[nu - 1][nu - 1]),
        (x[0][1], x[1][0]),
    ] {
        b.add_tagged(
            Constraint::Intension(Expr::lt(Expr::var(a), Expr::var(c))),
            SYM,
        );
    }
    Ok(b.build())
}

/// Langford pairing: values 1..n each appear twice in a 2n-sequence, the two
/// occurrences of i separated by exactly i slots, modelled through positions.
pub fn gen_langford_bin(n: i64) -> Result<Instance, GenError> {
    if n < 1 {
        return Err(param_err(format!("langford: order {n} must be positive")));
    }
    let nu = n as usize;
    let mut b = InstanceBuilder::new(format!("LangfordBin-{n}"));
    let v: Vec<VarId> = (0..2 * nu)
        .map(|j| b.add_var(format!("v[{j}]"), dom(1, n).unwrap()))
        .collect();
    let p: Vec<VarId> = (0..2 * nu)
        .map(|j| b.add_var(format!("p[{j}]"), dom(0, 2 * n - 1).unwrap()))
        .collect();

    for i in 0..nu {
        b.add_constraint(Constraint::Element {
            list: v.clone(),
            index: p[2 * i],
            value: Operand::Const(i as i64 + 1),
        });
    }
    for i in 0..nu {
        b.add_constraint(Constraint::Element {
            list: v.clone(),
            index: p[2 * i + 1],
            value: Operand::Const(i as i64 + 1),
        });
    }
    for i in 0..nu {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(p[2 * i]),
            Expr::add(vec![Expr::cst(i as i64 + 2), Expr::var(p[2 * i + 1])]),
        )));
    }
    Ok(b.build())
}

/// Partition 1..n into q classes so no class contains a + b = c with a, b, c
/// distinct. Every class is guaranteed at least n/q members.
pub fn gen_ramsey_partition(q: i64, n: i64) -> Result<Instance, GenError> {
    if q < 1 || n < 1 {
        return Err(param_err(format!(
            "ramsey ({q},{n}): both parameters must be positive"
        )));
    }
    let guaranteed = n / q;
    let nu = n as usize;
    let mut b = InstanceBuilder::new(format!("RamseyPartition-{q}-{n}"));
    let x: Vec<VarId> = (0..nu)
        .map(|i| b.add_var(format!("x[{i}]"), dom(0, q - 1).unwrap()))
        .collect();

    // exact per-class counts are infeasible whenever q does not divide n, so
    // the occurrence specs are lower bounds
    b.add_constraint(Constraint::Cardinality {
        scope: x.clone(),
        values: (0..q).collect(),
        occurs: vec![OccurSpec::Range(guaranteed, n); q as usize],
        closed: false,
    });

    for i in 0..nu {
        for j in i + 1..nu {
            // a + b = c over the 1-based values
            let k = i + j + 1;
            if j < k && k < nu {
                b.add_constraint(Constraint::NValues {
                    scope: vec![x[i], x[j], x[k]],
                    op: CmpOp::Gt,
                    rhs: Operand::Const(1),
                });
            }
        }
    }
    Ok(b.build())
}

/// Equidistant frequency permutation array: n codewords over q symbols, each
/// symbol exactly lambda times per word, pairwise Hamming distance d.
pub fn gen_efpa(d: i64, lambda: i64, q: i64, n: i64) -> Result<Instance, GenError> {
    if d < 0 || lambda < 1 || q < 1 || n < 1 {
        return Err(param_err(format!(
            "efpa ({d},{lambda},{q},{n}): parameters out of range"
        )));
    }
    let m = (q * lambda) as usize;
    let nu = n as usize;
    let mut b = InstanceBuilder::new(format!("EFPA-{d}-{lambda}-{q}-{n}"));
    let mut x = vec![vec![VarId(0); m]; nu];
    for (i, row) in x.iter_mut().enumerate() {
        for (t, v) in row.iter_mut().enumerate() {
            *v = b.add_var(format!("x[{i}][{t}]"), dom(0, q - 1).unwrap());
        }
    }

    for row in &x {
        b.add_constraint(Constraint::Cardinality {
            scope: row.clone(),
            values: (0..q).collect(),
            occurs: vec![OccurSpec::Exact(lambda); q as usize],
            closed: false,
        });
    }

    for i in 0..nu {
        for j in i + 1..nu {
            let diffs: Vec<Expr> = (0..m)
                .map(|t| Expr::ne(Expr::var(x[i][t]), Expr::var(x[j][t])))
                .collect();
            let hamming = if diffs.len() == 1 {
                diffs.into_iter().next().unwrap()
            } else {
                Expr::add(diffs)
            };
            b.add_constraint(Constraint::Intension(Expr::eq(hamming, Expr::cst(d))));
        }
    }

    if nu >= 2 {
        b.add_tagged(
            Constraint::Lex {
                lists: x.clone(),
                op: OrderOp::Le,
            },
            SYM,
        );
    }
    if m >= 2 {
        let cols: Vec<Vec<VarId>> = (0..m).map(|t| (0..nu).map(|i| x[i][t]).collect()).collect();
        b.add_tagged(
            Constraint::Lex {
                lists: cols,
                op: OrderOp::Le,
            },
            SYM,
        );
    }
    Ok(b.build())
}
