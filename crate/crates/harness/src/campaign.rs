//! Campaign execution: run solver adapters over an instance corpus under
//! per-track limits, parse their output protocol, and validate every claim
//! with the checker before anything is scored.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use xcspkit_core::ir::Instance;
use xcspkit_core::solver::{solve_cop, solve_csp, Limits, Status};
use xcspkit_core::xml::parse_xcsp3;

use crate::runs::{validate_run, RunRecord, RunStatus, SolverMeta};
use crate::track::TrackConfig;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("cannot parse instance {path}: {message}")]
    BadInstance { path: String, message: String },
}

/// One external solver: identity plus a command template. `{instance}` is
/// replaced by the instance path and `{timeout}` by the scaled cpu budget in
/// seconds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdapterSpec {
    #[serde(flatten)]
    pub meta: SolverMeta,
    pub command: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub instances: Vec<String>,
    pub solvers: Vec<AdapterSpec>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest, CampaignError> {
        let m: Manifest =
            serde_json::from_str(text).map_err(|e| CampaignError::BadManifest(e.to_string()))?;
        if m.solvers.is_empty() {
            return Err(CampaignError::BadManifest("no solvers listed".into()));
        }
        for s in &m.solvers {
            if s.command.is_empty() {
                return Err(CampaignError::BadManifest(format!(
                    "solver {} has no command",
                    s.meta.id
                )));
            }
        }
        Ok(m)
    }
}

/// Completed campaign: validated records plus the solver metadata needed for
/// ranking, serialized together.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignOutput {
    pub track: String,
    pub scale: f64,
    pub solvers: Vec<SolverMeta>,
    pub runs: Vec<RunRecord>,
}

/// Parses the s/o/v output protocol. The last well-formed `o` line is the
/// claimed bound; `v` carries witness values in declaration order.
pub fn parse_protocol(stdout: &str) -> (Option<RunStatus>, Option<i64>, Option<Vec<i64>>) {
    let mut status = None;
    let mut bound = None;
    let mut witness = None;
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("o ") {
            if let Ok(v) = rest.trim().parse::<i64>() {
                bound = Some(v);
            }
        } else if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "SATISFIABLE" => Some(RunStatus::Sat),
                "UNSATISFIABLE" => Some(RunStatus::Unsat),
                "OPTIMUM FOUND" => Some(RunStatus::Optimum),
                "UNKNOWN" => Some(RunStatus::Unknown),
                _ => status,
            };
        } else if let Some(rest) = line.strip_prefix("v ") {
            let vals: Result<Vec<i64>, _> = rest.split_whitespace().map(str::parse).collect();
            if let Ok(vals) = vals {
                witness = Some(vals);
            }
        }
    }
    // a solution with incumbents but no optimality proof is a bound claim
    if status == Some(RunStatus::Sat) && bound.is_some() {
        status = Some(RunStatus::Bound);
    }
    (status, bound, witness)
}

fn read_to_string(path: &str) -> Result<String, CampaignError> {
    std::fs::read_to_string(path).map_err(|e| CampaignError::Io {
        path: path.to_string(),
        source: e,
    })
}

fn execute_adapter(
    spec: &AdapterSpec,
    instance_path: &str,
    cfg: &TrackConfig,
) -> (String, f64, Vec<String>) {
    let mut flags = Vec::new();
    let subst = |arg: &str| {
        arg.replace("{instance}", instance_path)
            .replace("{timeout}", &format!("{}", cfg.scaled_cpu()))
    };
    let program = subst(&spec.command[0]);
    let args: Vec<String> = spec.command[1..].iter().map(|a| subst(a)).collect();
    let started = Instant::now();
    let child = Command::new(&program)
        .args(&args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(e) => {
            flags.push(format!("spawn-error: {e}"));
            return (String::new(), 0.0, flags);
        }
    };
    // stdout is drained on its own thread: a killed adapter may leave
    // orphaned children holding the pipe open, and reading inline would
    // block past the wall budget
    let (tx, rx) = std::sync::mpsc::channel::<String>();
    if let Some(mut pipe) = child.stdout.take() {
        std::thread::spawn(move || {
            let mut buf = String::new();
            let _ = pipe.read_to_string(&mut buf);
            let _ = tx.send(buf);
        });
    }
    let deadline = Duration::from_secs_f64(cfg.scaled_wall());
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if started.elapsed() > deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    flags.push("overrun".to_string());
                    break;
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(e) => {
                flags.push(format!("wait-error: {e}"));
                break;
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let stdout = match rx.recv_timeout(Duration::from_millis(1000)) {
        Ok(buf) => buf,
        Err(_) => {
            flags.push("output-lost".to_string());
            String::new()
        }
    };
    (stdout, elapsed, flags)
}

/// Runs every (solver, instance) pair once, validates claims, and returns
/// records in deterministic (solver, instance) order. Adapter failures are
/// recorded, never fatal. `workers` bounds concurrent adapter processes.
pub fn run_campaign(
    manifest: &Manifest,
    cfg: &TrackConfig,
    trust_unsat: bool,
    workers: usize,
) -> Result<CampaignOutput, CampaignError> {
    let mut instances: BTreeMap<String, Instance> = BTreeMap::new();
    for path in &manifest.instances {
        let text = read_to_string(path)?;
        let inst = parse_xcsp3(&text).map_err(|e| CampaignError::BadInstance {
            path: path.clone(),
            message: e.to_string(),
        })?;
        instances.insert(path.clone(), inst);
    }

    struct Job<'a> {
        spec: &'a AdapterSpec,
        path: &'a str,
    }
    let jobs: Vec<Job> = manifest
        .solvers
        .iter()
        .flat_map(|spec| {
            manifest
                .instances
                .iter()
                .map(move |p| Job { spec, path: p })
        })
        .collect();

    let results: Vec<Mutex<Option<RunRecord>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let worker_count = workers.max(1).min(jobs.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..worker_count {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let job = &jobs[i];
                let (stdout, elapsed, mut flags) = execute_adapter(job.spec, job.path, cfg);
                let (status, bound, witness) = parse_protocol(&stdout);
                let status = match status {
                    Some(s) => s,
                    None => {
                        if !flags.iter().any(|f| f.starts_with("spawn-error")) {
                            flags.push("parse-failure".to_string());
                        }
                        RunStatus::Unknown
                    }
                };
                let mut run = RunRecord::new(&job.spec.meta.id, job.path, status);
                run.bound = bound;
                run.witness = witness;
                run.cpu_seconds = elapsed;
                run.flags = flags;
                *results[i].lock().unwrap() = Some(run);
            });
        }
    });

    let mut runs = Vec::with_capacity(jobs.len());
    for (i, job) in jobs.iter().enumerate() {
        let run = results[i]
            .lock()
            .unwrap()
            .take()
            .expect("worker filled every slot");
        let inst = &instances[job.path];
        let mut validated = validate_run(run, inst);
        if !trust_unsat && validated.status == RunStatus::Unsat {
            refute_unsat(&mut validated, inst, cfg);
        }
        runs.push(validated);
    }
    runs.sort_by(|a, b| {
        (a.solver.clone(), a.instance.clone()).cmp(&(b.solver.clone(), b.instance.clone()))
    });

    Ok(CampaignOutput {
        track: cfg.track.name().to_string(),
        scale: cfg.scale,
        solvers: manifest.solvers.iter().map(|s| s.meta.clone()).collect(),
        runs,
    })
}

/// Cross-checks an UNSAT claim with the built-in solver at the scaled
/// budget; a found solution invalidates the claim.
fn refute_unsat(run: &mut RunRecord, inst: &Instance, cfg: &TrackConfig) {
    let limits = Limits::cpu(cfg.scaled_cpu());
    let found = if inst.is_cop() {
        solve_cop(inst, &limits).map(|r| matches!(r.status, Status::Optimum | Status::Bound))
    } else {
        solve_csp(inst, &limits).map(|r| r.status == Status::Sat)
    };
    if let Ok(true) = found {
        run.status = RunStatus::Invalid;
        run.flags
            .push("unsat-refuted-by-builtin-solver".to_string());
    }
}

/// Convenience used by the CLI and tests: writes an instance to a file.
pub fn write_instance(inst: &Instance, path: &Path) -> Result<(), CampaignError> {
    let xml = xcspkit_core::xml::write_xcsp3(inst).map_err(|e| CampaignError::BadInstance {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, xml).map_err(|e| CampaignError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_parsing() {
        let (s, b, w) = parse_protocol("o 12\no 10\ns OPTIMUM FOUND\nv 1 2 3\n");
        assert_eq!(s, Some(RunStatus::Optimum));
        assert_eq!(b, Some(10));
        assert_eq!(w, Some(vec![1, 2, 3]));

        let (s, b, _) = parse_protocol("o 9\ns SATISFIABLE\nv 1\n");
        assert_eq!(s, Some(RunStatus::Bound));
        assert_eq!(b, Some(9));

        let (s, _, _) = parse_protocol("c noise\nwhatever\n");
        assert_eq!(s, None);
    }

    #[test]
    fn manifest_rejects_empty_commands() {
        let bad = r#"{"instances": [], "solvers": [{"id": "x", "team": "t", "command": []}]}"#;
        assert!(Manifest::from_json(bad).is_err());
    }
}
