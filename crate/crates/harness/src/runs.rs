//! Run records, solver metadata and claim validation against the checker.

use serde::{Deserialize, Serialize};

use xcspkit_core::checker::{check_assignment, objective_value};
use xcspkit_core::ir::{Assignment, Instance, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "OPTIMUM")]
    Optimum,
    #[serde(rename = "BOUND")]
    Bound,
    #[serde(rename = "UNKNOWN")]
    Unknown,
    #[serde(rename = "INVALID")]
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjSense {
    #[serde(rename = "minimize")]
    Minimize,
    #[serde(rename = "maximize")]
    Maximize,
}

impl From<Sense> for ObjSense {
    fn from(s: Sense) -> Self {
        match s {
            Sense::Minimize => ObjSense::Minimize,
            Sense::Maximize => ObjSense::Maximize,
        }
    }
}

/// One solver x instance outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub solver: String,
    pub instance: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
    pub cpu_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_sense: Option<ObjSense>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl RunRecord {
    pub fn new(solver: &str, instance: &str, status: RunStatus) -> RunRecord {
        RunRecord {
            solver: solver.to_string(),
            instance: instance.to_string(),
            status,
            bound: None,
            witness: None,
            cpu_seconds: 0.0,
            objective_sense: None,
            flags: Vec::new(),
        }
    }

    fn invalidate(&mut self, reason: impl Into<String>) {
        self.status = RunStatus::Invalid;
        self.flags.push(reason.into());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub id: String,
    pub team: String,
    /// Solver family for variant grouping; defaults to the id itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default)]
    pub off_competition: bool,
}

impl SolverMeta {
    pub fn new(id: &str, team: &str) -> SolverMeta {
        SolverMeta {
            id: id.to_string(),
            team: team.to_string(),
            family: None,
            off_competition: false,
        }
    }

    pub fn family_id(&self) -> &str {
        self.family.as_deref().unwrap_or(&self.id)
    }
}

/// Re-checks a claim against the instance: witnesses must satisfy the
/// checker and claimed bounds must equal the checker's objective value.
/// Failures downgrade the claim to INVALID; nothing here aborts.
pub fn validate_run(mut run: RunRecord, inst: &Instance) -> RunRecord {
    run.objective_sense = inst.objective.as_ref().map(|o| ObjSense::from(o.sense));
    match run.status {
        RunStatus::Unsat | RunStatus::Unknown | RunStatus::Invalid => return run,
        RunStatus::Sat | RunStatus::Optimum | RunStatus::Bound => {}
    }
    let Some(vals) = run.witness.clone() else {
        run.invalidate("missing-witness");
        return run;
    };
    if vals.len() != inst.num_vars() {
        run.invalidate(format!(
            "witness-length {} does not match {} variables",
            vals.len(),
            inst.num_vars()
        ));
        return run;
    }
    let a = Assignment(vals);
    let report = match check_assignment(inst, &a) {
        Ok(r) => r,
        Err(e) => {
            run.invalidate(format!("witness-check-failed: {e}"));
            return run;
        }
    };
    if !report.satisfied {
        let why = report
            .verdicts
            .iter()
            .find(|v| !v.satisfied)
            .and_then(|v| v.witness.clone())
            .unwrap_or_else(|| "domain violation".to_string());
        run.invalidate(format!("invalid-witness: {why}"));
        return run;
    }
    if inst.objective.is_some() {
        let value = match objective_value(inst, &a) {
            Ok(v) => v,
            Err(e) => {
                run.invalidate(format!("objective-evaluation-failed: {e}"));
                return run;
            }
        };
        match run.status {
            RunStatus::Sat => {
                // a plain solution claim on an optimization instance is a
                // bound claim with the checker's value
                run.status = RunStatus::Bound;
                run.bound = Some(value);
            }
            RunStatus::Optimum | RunStatus::Bound => match run.bound {
                Some(b) if b == value => {}
                Some(b) => {
                    run.invalidate(format!(
                        "claimed-bound {b} differs from checker value {value}"
                    ));
                }
                None => run.bound = Some(value),
            },
            _ => unreachable!(),
        }
    } else if run.status != RunStatus::Sat {
        run.invalidate("optimality claim on a satisfaction instance");
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use xcspkit_core::generators::{gen_coprime, gen_langford_bin};
    use xcspkit_core::solver::{solve_cop, solve_csp, Limits};

    #[test]
    fn valid_claims_pass_through() {
        let inst = gen_coprime(2).unwrap();
        let r = solve_cop(&inst, &Limits::unlimited()).unwrap();
        let mut run = RunRecord::new("s", "i", RunStatus::Optimum);
        run.bound = r.bound;
        run.witness = r.witness.map(|w| w.0);
        let v = validate_run(run.clone(), &inst);
        assert_eq!(v.status, RunStatus::Optimum);
        assert_eq!(v.objective_sense, Some(ObjSense::Minimize));
    }

    #[test]
    fn broken_witness_is_downgraded() {
        let inst = gen_langford_bin(3).unwrap();
        let mut run = RunRecord::new("s", "i", RunStatus::Sat);
        run.witness = Some(vec![1; inst.num_vars()]);
        let v = validate_run(run, &inst);
        assert_eq!(v.status, RunStatus::Invalid);
        assert!(v.flags.iter().any(|f| f.contains("invalid-witness")));
    }

    #[test]
    fn wrong_bound_is_downgraded() {
        let inst = gen_coprime(2).unwrap();
        let r = solve_cop(&inst, &Limits::unlimited()).unwrap();
        let mut run = RunRecord::new("s", "i", RunStatus::Optimum);
        run.bound = r.bound.map(|b| b - 1);
        run.witness = r.witness.map(|w| w.0);
        let v = validate_run(run, &inst);
        assert_eq!(v.status, RunStatus::Invalid);
    }

    #[test]
    fn sat_on_an_optimization_instance_becomes_a_bound() {
        let inst = gen_coprime(2).unwrap();
        let r = solve_cop(&inst, &Limits::unlimited()).unwrap();
        let mut run = RunRecord::new("s", "i", RunStatus::Sat);
        run.witness = r.witness.map(|w| w.0);
        let v = validate_run(run, &inst);
        assert_eq!(v.status, RunStatus::Bound);
        assert_eq!(v.bound, r.bound);
    }

    #[test]
    fn unsat_passes_through_unchecked() {
        let inst = gen_langford_bin(3).unwrap();
        let run = RunRecord::new("s", "i", RunStatus::Unsat);
        let v = validate_run(run, &inst);
        assert_eq!(v.status, RunStatus::Unsat);
    }

    #[test]
    fn solver_csp_witness_validates() {
        let inst = gen_langford_bin(3).unwrap();
        let r = solve_csp(&inst, &Limits::unlimited()).unwrap();
        let mut run = RunRecord::new("s", "i", RunStatus::Sat);
        run.witness = r.witness.map(|w| w.0);
        assert_eq!(validate_run(run, &inst).status, RunStatus::Sat);
    }
}
