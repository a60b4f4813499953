//! Command-line front end for the toolkit: instance generation, solving,
//! solution checking, campaign execution, scoring and ranking.

use std::process::ExitCode;

use xcspkit_core::checker;
use xcspkit_core::generators::{generate, DataArg, PROBLEMS};
use xcspkit_core::ir::validate_instance;
use xcspkit_core::solver::{self, Limits, SearchOptions};
use xcspkit_core::xml::{parse_xcsp3, write_xcsp3};

use xcspkit_harness::campaign::{run_campaign, CampaignOutput, Manifest};
use xcspkit_harness::report::{render_csv, render_text};
use xcspkit_harness::score::{rank_track, score_for, Ranking};
use xcspkit_harness::track::{Track, TrackConfig};

const USAGE: &str = "\
usage:
  xcspkit generate <problem> -data=<n|[a,b,..]|file.json> [-variant=<name>] [-o <out.xml>]
  xcspkit solve <instance.xml> [--cop] [--timeout <s>] [--nodes <n>] [--enumerate <cap>]
                [--restarts]
  xcspkit check <instance.xml> <solution.json|solution.txt>
  xcspkit campaign <manifest.json> --track <T> [--scale <f>] [--trust-unsat <bool>]
                   [--workers <n>] [-o <runs.json>]
  xcspkit score <runs.json> --track <T> [-o <breakdown.csv>]
  xcspkit rank <runs.json> --track <T> [--main <ranking.json>] [-o <ranking.json>]
               [--csv <report.csv>]

tracks: CSP COP FastCOP ParCOP MiniCSP MiniCOP
problems: ChainReaction AlmostMagic GracefulGraph Heterosquare LangfordBin
          RamseyPartition EFPA LowAutocorrelation Coprime Cutstock
          BusScheduling MetabolicNetwork
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, String> {
    match args.first().map(String::as_str) {
        Some("generate") => cmd_generate(&args[1..]),
        Some("solve") => cmd_solve(&args[1..]),
        Some("check") => cmd_check(&args[1..]),
        Some("campaign") => cmd_campaign(&args[1..]),
        Some("score") => cmd_score(&args[1..]),
        Some("rank") => cmd_rank(&args[1..]),
        Some("--help") | Some("-h") | None => {
            print!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        Some(other) => Err(format!("unknown command {other:?}\n{USAGE}")),
    }
}

fn read_file(path: &str) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
}

fn write_file(path: &str, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}"))
}

/// Option scanner for `-key=value`, `--key value` and `-o value` forms.
struct Opts<'a> {
    positional: Vec<&'a str>,
    pairs: Vec<(String, String)>,
}

impl<'a> Opts<'a> {
    fn parse(args: &'a [String], valued: &[&str]) -> Result<Opts<'a>, String> {
        let mut positional = Vec::new();
        let mut pairs = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            if let Some(rest) = arg.strip_prefix('-') {
                let rest = rest.strip_prefix('-').unwrap_or(rest);
                if let Some((k, v)) = rest.split_once('=') {
                    pairs.push((k.to_string(), v.to_string()));
                } else if valued.contains(&rest) {
                    let v = it
                        .next()
                        .ok_or_else(|| format!("option -{rest} expects a value"))?;
                    pairs.push((rest.to_string(), v.clone()));
                } else {
                    // bare flag
                    pairs.push((rest.to_string(), String::from("true")));
                }
            } else {
                positional.push(arg.as_str());
            }
        }
        Ok(Opts { positional, pairs })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }
}

fn cmd_generate(args: &[String]) -> Result<ExitCode, String> {
    let opts = Opts::parse(args, &["o", "data", "variant"])?;
    let [problem] = opts.positional.as_slice() else {
        return Err(format!("generate expects one problem name\n{USAGE}"));
    };
    let data_raw = opts.get("data").ok_or("generate requires -data=...")?;
    let data = match DataArg::parse(data_raw).map_err(|e| e.to_string())? {
        DataArg::Json(path) => DataArg::Json(read_file(&path)?),
        scalars => scalars,
    };
    let variant = opts.get("variant");
    let inst = generate(problem, &data, variant)
        .map_err(|e| format!("{e} (known problems: {})", PROBLEMS.join(" ")))?;
    let diagnostics = validate_instance(&inst);
    if !diagnostics.is_empty() {
        return Err(format!(
            "generated instance fails validation: {}",
            diagnostics[0]
        ));
    }
    let xml = write_xcsp3(&inst).map_err(|e| e.to_string())?;
    match opts.get("o") {
        Some(path) => write_file(path, &xml)?,
        None => print!("{xml}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &[String]) -> Result<ExitCode, String> {
    let opts = Opts::parse(args, &["timeout", "nodes", "enumerate"])?;
    let [path] = opts.positional.as_slice() else {
        return Err(format!("solve expects one instance path\n{USAGE}"));
    };
    let inst = parse_xcsp3(&read_file(path)?).map_err(|e| e.to_string())?;
    let mut limits = Limits::cpu(f64::INFINITY);
    if let Some(t) = opts.get("timeout") {
        limits.cpu_seconds = t.parse().map_err(|_| format!("bad --timeout {t:?}"))?;
    }
    if let Some(n) = opts.get("nodes") {
        limits.node_cap = Some(n.parse().map_err(|_| format!("bad --nodes {n:?}"))?);
    }
    if let Some(cap) = opts.get("enumerate") {
        let cap: u64 = cap
            .parse()
            .map_err(|_| format!("bad --enumerate {cap:?}"))?;
        let sols = solver::enumerate_solutions(&inst, Some(cap)).map_err(|e| e.to_string())?;
        for s in &sols {
            let vals: Vec<String> = s.0.iter().map(|v| v.to_string()).collect();
            println!("v {}", vals.join(" "));
        }
        println!("c count={}", sols.len());
        return Ok(ExitCode::SUCCESS);
    }
    if opts.has("cop") && !inst.is_cop() {
        return Err("--cop given but the instance has no objective".into());
    }
    let search = SearchOptions {
        geometric_restarts: opts.has("restarts"),
    };
    let result = if inst.is_cop() {
        solver::solve_cop_with(&inst, &limits, search)
    } else {
        solver::solve_csp_with(&inst, &limits, search)
    }
    .map_err(|e| e.to_string())?;
    print!("{}", solver::render_output(&result));
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &[String]) -> Result<ExitCode, String> {
    let opts = Opts::parse(args, &[])?;
    let [inst_path, sol_path] = opts.positional.as_slice() else {
        return Err(format!("check expects an instance and a solution\n{USAGE}"));
    };
    let inst = parse_xcsp3(&read_file(inst_path)?).map_err(|e| e.to_string())?;
    let sol_text = read_file(sol_path)?;
    let assignment = if sol_text.trim_start().starts_with('{') {
        checker::parse_solution_json(&sol_text, &inst)
    } else {
        checker::parse_solution_values(&sol_text, &inst)
    }
    .map_err(|e| e.to_string())?;
    let report = checker::check_assignment(&inst, &assignment).map_err(|e| e.to_string())?;
    for (v, val) in &report.domain_violations {
        println!("domain violation: {} = {val}", inst.var(*v).name);
    }
    for verdict in report.verdicts.iter().filter(|v| !v.satisfied) {
        println!(
            "violated constraint #{}: {}",
            verdict.index,
            verdict.witness.as_deref().unwrap_or("")
        );
    }
    if let Some(obj) = report.objective {
        println!("objective {obj}");
    }
    if report.satisfied {
        println!("SATISFIED");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("VIOLATED");
        Ok(ExitCode::from(1))
    }
}

fn parse_track(opts: &Opts) -> Result<Track, String> {
    let name = opts.get("track").ok_or("--track is required")?;
    Track::parse(name).ok_or_else(|| format!("unknown track {name:?}"))
}

fn cmd_campaign(args: &[String]) -> Result<ExitCode, String> {
    let opts = Opts::parse(args, &["track", "scale", "trust-unsat", "workers", "o"])?;
    let [manifest_path] = opts.positional.as_slice() else {
        return Err(format!("campaign expects one manifest path\n{USAGE}"));
    };
    let manifest = Manifest::from_json(&read_file(manifest_path)?).map_err(|e| e.to_string())?;
    let track = parse_track(&opts)?;
    let scale: f64 = match opts.get("scale") {
        Some(s) => s.parse().map_err(|_| format!("bad --scale {s:?}"))?,
        None => 1.0,
    };
    let trust_unsat = match opts.get("trust-unsat") {
        None => true,
        Some("true") => true,
        Some("false") => false,
        Some(other) => return Err(format!("bad --trust-unsat {other:?}")),
    };
    let workers: usize = match opts.get("workers") {
        Some(w) => w.parse().map_err(|_| format!("bad --workers {w:?}"))?,
        None => 1,
    };
    let cfg = TrackConfig::new(track, scale);
    let output = run_campaign(&manifest, &cfg, trust_unsat, workers).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&output).map_err(|e| e.to_string())?;
    match opts.get("o") {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    let invalid = output
        .runs
        .iter()
        .filter(|r| r.status == xcspkit_harness::runs::RunStatus::Invalid)
        .count();
    eprintln!(
        "campaign complete: {} runs over {} instances, {invalid} invalid",
        output.runs.len(),
        manifest.instances.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn load_runs(path: &str) -> Result<CampaignOutput, String> {
    serde_json::from_str(&read_file(path)?).map_err(|e| format!("bad runs file {path}: {e}"))
}

fn cmd_score(args: &[String]) -> Result<ExitCode, String> {
    let opts = Opts::parse(args, &["track", "o"])?;
    let [runs_path] = opts.positional.as_slice() else {
        return Err(format!("score expects one runs file\n{USAGE}"));
    };
    let output = load_runs(runs_path)?;
    let track = parse_track(&opts)?;
    let table = score_for(track, &output.runs);
    println!("solver,points");
    let mut rows: Vec<_> = table.totals.clone();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for (solver, halves) in rows {
        println!("{solver},{}", xcspkit_harness::score::points_str(halves));
    }
    if let Some(path) = opts.get("o") {
        write_file(path, &render_csv(&table))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rank(args: &[String]) -> Result<ExitCode, String> {
    let opts = Opts::parse(args, &["track", "main", "o", "csv"])?;
    let [runs_path] = opts.positional.as_slice() else {
        return Err(format!("rank expects one runs file\n{USAGE}"));
    };
    let output = load_runs(runs_path)?;
    let track = parse_track(&opts)?;
    let main_ranking: Option<Ranking> = match opts.get("main") {
        Some(path) => Some(
            serde_json::from_str(&read_file(path)?)
                .map_err(|e| format!("bad ranking file {path}: {e}"))?,
        ),
        None => None,
    };
    let (ranking, table) = rank_track(&output.runs, &output.solvers, track, main_ranking.as_ref())
        .map_err(|e| e.to_string())?;
    let cfg = TrackConfig::new(track, output.scale);
    print!("{}", render_text(&cfg, &ranking, &table));
    if let Some(path) = opts.get("o") {
        let json = serde_json::to_string_pretty(&ranking).map_err(|e| e.to_string())?;
        write_file(path, &json)?;
    }
    if let Some(path) = opts.get("csv") {
        write_file(path, &render_csv(&table))?;
    }
    Ok(ExitCode::SUCCESS)
}
