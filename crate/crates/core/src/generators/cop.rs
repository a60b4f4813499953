//! Generators for the optimization problems.

use super::{param_err, GenError};
use crate::data::{BusSchedulingData, CutstockData, MetabolicNetworkData};
use crate::ir::{
    CmpOp, Constraint, Domain, Expr, Instance, InstanceBuilder, ObjectiveExpr, Operand, OrderOp,
    Sense, VarId,
};

const SYM: &str = "symmetry-breaking";

fn dom(lo: i64, hi: i64) -> Result<Domain, GenError> {
    Domain::range(lo, hi).map_err(|e| param_err(format!("empty domain: {e}")))
}

/// Binary sequence of length n minimizing the sum of squared
/// autocorrelations, with product and correlation variables spelled out and
/// the squares linearized through auxiliary variables.
pub fn gen_low_autocorrelation(n: i64) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(param_err(format!(
            "low autocorrelation: length {n} must be at least 2"
        )));
    }
    let nu = n as usize;
    let pm = Domain::from_values(&[-1, 1]).unwrap();
    let mut b = InstanceBuilder::new(format!("LowAutocorrelation-{n}"));

    let x: Vec<VarId> = (0..nu)
        .map(|i| b.add_var(format!("x[{i}]"), pm.clone()))
        .collect();
    let mut y = Vec::with_capacity(nu - 1);
    for k in 0..nu - 1 {
        let row: Vec<VarId> = (0..nu - k - 1)
            .map(|i| b.add_var(format!("y[{k}][{i}]"), pm.clone()))
            .collect();
        y.push(row);
    }
    let c: Vec<VarId> = (0..nu - 1)
        .map(|k| {
            let w = (nu - k - 1) as i64;
            b.add_var(format!("c[{k}]"), dom(-w, w).unwrap())
        })
        .collect();
    let s: Vec<VarId> = (0..nu - 1)
        .map(|k| {
            let w = (nu - k - 1) as i64;
            b.add_var(format!("s[{k}]"), dom(0, w * w).unwrap())
        })
        .collect();

    for k in 0..nu - 1 {
        for i in 0..nu - k - 1 {
            b.add_constraint(Constraint::Intension(Expr::eq(
                Expr::var(y[k][i]),
                Expr::mul(vec![Expr::var(x[i]), Expr::var(x[i + k + 1])]),
            )));
        }
    }
    for k in 0..nu - 1 {
        let mut scope = y[k].clone();
        scope.push(c[k]);
        let mut coeffs = vec![1i64; y[k].len()];
        coeffs.push(-1);
        b.add_constraint(Constraint::Sum {
            scope,
            coeffs,
            op: CmpOp::Eq,
            rhs: Operand::Const(0),
        });
    }
    // squares kept linear in the objective through s[k] = c[k] * c[k]
    for k in 0..nu - 1 {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(s[k]),
            Expr::mul(vec![Expr::var(c[k]), Expr::var(c[k])]),
        )));
    }
    b.set_objective(
        Sense::Minimize,
        ObjectiveExpr::Sum {
            scope: s.clone(),
            coeffs: vec![1; s.len()],
        },
    );
    Ok(b.build())
}

fn primes_up_to(n: i64) -> Vec<i64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n as i64).filter(|&v| sieve[v as usize]).collect()
}

/// Smallest maximum of n pairwise-coprime values drawn from 2..=n², each at
/// least half the maximum.
pub fn gen_coprime(n: i64) -> Result<Instance, GenError> {
    if n < 1 {
        return Err(param_err(format!("coprime: size {n} must be positive")));
    }
    // the upper bound n*n collapses below the smallest candidate for n = 1
    let ub = (n * n).max(2);
    let nu = n as usize;
    let mut b = InstanceBuilder::new(format!("Coprime-{n}"));
    let x: Vec<VarId> = (0..nu)
        .map(|i| b.add_var(format!("x[{i}]"), dom(2, ub).unwrap()))
        .collect();

    for &xi in x.iter().take(nu - 1) {
        b.add_constraint(Constraint::Intension(Expr::ge(
            Expr::var(xi),
            Expr::div_floor(Expr::var(x[nu - 1]), Expr::cst(2)),
        )));
    }
    if nu >= 2 {
        b.add_tagged(
            Constraint::Ordered {
                scope: x.clone(),
                lengths: None,
                op: OrderOp::Lt,
            },
            SYM,
        );
    }
    // sharing a factor means sharing a prime factor, so prime moduli suffice
    for d in primes_up_to(ub) {
        for i in 0..nu {
            for j in i + 1..nu {
                b.add_constraint(Constraint::Intension(Expr::or(vec![
                    Expr::ne(Expr::modulo(Expr::var(x[i]), Expr::cst(d)), Expr::cst(0)),
                    Expr::ne(Expr::modulo(Expr::var(x[j]), Expr::cst(d)), Expr::cst(0)),
                ])));
            }
        }
    }
    b.set_objective(Sense::Minimize, ObjectiveExpr::Var(x[nu - 1]));
    Ok(b.build())
}

/// Cutting stock: pack item demands into as few fixed-length pieces as
/// possible.
pub fn gen_cutstock(data: &CutstockData) -> Result<Instance, GenError> {
    if data.n_pieces < 0 {
        return Err(param_err("cutstock: nPieces must be non-negative"));
    }
    if data.piece_length < 0 {
        return Err(param_err("cutstock: pieceLength must be non-negative"));
    }
    for (j, it) in data.items.iter().enumerate() {
        if it.length < 0 || it.demand < 0 {
            return Err(param_err(format!(
                "cutstock: item {j} has negative length or demand"
            )));
        }
    }
    let n_pieces = data.n_pieces as usize;
    let n_items = data.items.len();
    let max_demand = data.items.iter().map(|it| it.demand).max().unwrap_or(0);
    let mut b = InstanceBuilder::new(format!("Cutstock-{}-{}", data.n_pieces, data.piece_length));

    let p: Vec<VarId> = (0..n_pieces)
        .map(|i| b.add_var(format!("p[{i}]"), dom(0, 1).unwrap()))
        .collect();
    let mut r = vec![vec![VarId(0); n_items]; n_pieces];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = b.add_var(format!("r[{i}][{j}]"), dom(0, max_demand)?);
        }
    }

    for row in &r {
        for (j, v) in row.iter().enumerate() {
            b.add_constraint(Constraint::Intension(Expr::le(
                Expr::var(*v),
                Expr::cst(data.items[j].demand),
            )));
        }
    }
    for (j, it) in data.items.iter().enumerate() {
        b.add_constraint(Constraint::Sum {
            scope: r.iter().map(|row| row[j]).collect(),
            coeffs: vec![1; n_pieces],
            op: CmpOp::Eq,
            rhs: Operand::Const(it.demand),
        });
    }
    for i in 0..n_pieces {
        let mut scope = r[i].clone();
        scope.push(p[i]);
        let mut coeffs: Vec<i64> = data.items.iter().map(|it| it.length).collect();
        coeffs.push(-data.piece_length);
        b.add_constraint(Constraint::Sum {
            scope,
            coeffs,
            op: CmpOp::Le,
            rhs: Operand::Const(0),
        });
    }
    if n_pieces >= 2 {
        b.add_tagged(
            Constraint::Ordered {
                scope: p.clone(),
                lengths: None,
                op: OrderOp::Ge,
            },
            SYM,
        );
        if n_items >= 1 {
            b.add_tagged(
                Constraint::Lex {
                    lists: r.clone(),
                    op: OrderOp::Ge,
                },
                SYM,
            );
        }
    }
    b.set_objective(
        Sense::Minimize,
        ObjectiveExpr::Sum {
            scope: p.clone(),
            coeffs: vec![1; n_pieces],
        },
    );
    Ok(b.build())
}

/// Set partitioning: select a minimum number of shifts covering every task
/// exactly once.
pub fn gen_bus_scheduling(data: &BusSchedulingData) -> Result<Instance, GenError> {
    if data.n_tasks < 0 {
        return Err(param_err("bus scheduling: nTasks must be non-negative"));
    }
    for (i, shift) in data.shifts.iter().enumerate() {
        for &t in shift {
            if t < 0 || t >= data.n_tasks {
                return Err(param_err(format!(
                    "bus scheduling: shift {i} covers unknown task {t}"
                )));
            }
        }
    }
    let n_shifts = data.shifts.len();
    let mut b = InstanceBuilder::new(format!("BusScheduling-{}", data.n_tasks));
    let x: Vec<VarId> = (0..n_shifts)
        .map(|i| b.add_var(format!("x[{i}]"), dom(0, 1).unwrap()))
        .collect();

    for t in 0..data.n_tasks {
        let covering: Vec<VarId> = data
            .shifts
            .iter()
            .enumerate()
            .filter(|(_, shift)| shift.contains(&t))
            .map(|(i, _)| x[i])
            .collect();
        b.add_constraint(Constraint::Count {
            scope: covering,
            values: vec![1],
            op: CmpOp::Eq,
            rhs: Operand::Const(1),
        });
    }
    b.set_objective(
        Sense::Minimize,
        ObjectiveExpr::Sum {
            scope: x.clone(),
            coeffs: vec![1; n_shifts],
        },
    );
    Ok(b.build())
}

/// Minimal reaction support of a metabolic network at steady state,
/// excluding the all-zero flux.
pub fn gen_metabolic_network(data: &MetabolicNetworkData) -> Result<Instance, GenError> {
    let n = data.n_reactions;
    if n < 1 {
        return Err(param_err("metabolic network: nReactions must be positive"));
    }
    for (i, row) in data.stoichiometry_matrix.iter().enumerate() {
        if row.len() != n as usize {
            return Err(param_err(format!(
                "metabolic network: stoichiometry row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    for (i, row) in data.reversible_indicators.iter().enumerate() {
        if row.len() != n as usize {
            return Err(param_err(format!(
                "metabolic network: reversibility row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    const FLUX_UB: i64 = 50;
    let nu = n as usize;
    let mut b = InstanceBuilder::new(format!("MetabolicNetwork-{n}"));
    let x: Vec<VarId> = (0..nu)
        .map(|j| b.add_var(format!("x[{j}]"), dom(0, FLUX_UB).unwrap()))
        .collect();
    let z: Vec<VarId> = (0..nu)
        .map(|j| b.add_var(format!("z[{j}]"), dom(0, 1).unwrap()))
        .collect();

    b.add_constraint(Constraint::Sum {
        scope: z.clone(),
        coeffs: vec![1; nu],
        op: CmpOp::Ge,
        rhs: Operand::Const(1),
    });
    for j in 0..nu {
        b.add_constraint(Constraint::Intension(Expr::eq(
            Expr::var(z[j]),
            Expr::gt(Expr::var(x[j]), Expr::cst(0)),
        )));
    }
    for row in &data.stoichiometry_matrix {
        b.add_constraint(Constraint::Sum {
            scope: x.clone(),
            coeffs: row.clone(),
            op: CmpOp::Eq,
            rhs: Operand::Const(0),
        });
    }
    for row in &data.reversible_indicators {
        b.add_constraint(Constraint::Sum {
            scope: z.clone(),
            coeffs: row.clone(),
            op: CmpOp::Le,
            rhs: Operand::Const(1),
        });
    }
    b.set_objective(
        Sense::Minimize,
        ObjectiveExpr::Sum {
            scope: z.clone(),
            coeffs: vec![1; nu],
        },
    );
    Ok(b.build())
}
