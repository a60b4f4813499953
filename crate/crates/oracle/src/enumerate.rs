//! Exhaustive instance-level enumeration by generate-and-test with prefix
//! pruning. No propagation is involved: a constraint is checked as soon as
//! every variable it mentions has been assigned, using the definition-level
//! evaluator only.

use xcspkit_core::ir::Instance;

use crate::defs::{definition_satisfied, objective_value};

/// All solutions of `inst`, in lexicographic variable/value order.
/// `cap` bounds the number of collected solutions (the search still explores
/// the remaining space unless stopped).
pub fn raw_solutions(inst: &Instance, cap: Option<usize>) -> Vec<Vec<i64>> {
    let n = inst.num_vars();
    let domains: Vec<Vec<i64>> = inst
        .variables
        .iter()
        .map(|v| v.domain.values().collect())
        .collect();

    // constraints become checkable once their deepest variable is assigned
    let mut checkable_at: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut ground: Vec<usize> = Vec::new();
    for (ci, c) in inst.constraints.iter().enumerate() {
        match c.referenced_vars().iter().map(|v| v.0).max() {
            Some(deepest) => checkable_at[deepest].push(ci),
            None => ground.push(ci),
        }
    }

    let mut out = Vec::new();
    let mut point = vec![0i64; n];
    if !ground
        .iter()
        .all(|&ci| definition_satisfied(&inst.constraints[ci], &point))
    {
        return out;
    }

    fn descend(
        depth: usize,
        inst: &Instance,
        domains: &[Vec<i64>],
        checkable_at: &[Vec<usize>],
        point: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        cap: Option<usize>,
    ) -> bool {
        if depth == point.len() {
            out.push(point.clone());
            return cap.map_or(true, |c| out.len() < c);
        }
        for &v in &domains[depth] {
            point[depth] = v;
            let ok = checkable_at[depth]
                .iter()
                .all(|&ci| definition_satisfied(&inst.constraints[ci], point));
            if ok && !descend(depth + 1, inst, domains, checkable_at, point, out, cap) {
                return false;
            }
        }
        true
    }

    descend(0, inst, &domains, &checkable_at, &mut point, &mut out, cap);
    out
}

/// True when the instance has at least one solution.
pub fn raw_satisfiable(inst: &Instance) -> bool {
    !raw_solutions(inst, Some(1)).is_empty()
}

/// Optimal objective value over the full solution set, honouring the
/// objective sense. None when unsatisfiable.
pub fn raw_optimum(inst: &Instance) -> Option<i128> {
    use xcspkit_core::ir::Sense;
    let sols = raw_solutions(inst, None);
    let sense = inst.objective.as_ref()?.sense;
    let values = sols.iter().filter_map(|s| objective_value(inst, s));
    match sense {
        Sense::Minimize => values.min(),
        Sense::Maximize => values.max(),
    }
}
