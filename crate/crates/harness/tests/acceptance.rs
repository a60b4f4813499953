//! Acceptance suite: ten criteria covering solver ground truths, oracle
//! equivalence, serialization round-trips, scoring and ranking fixtures, and
//! an end-to-end campaign. Each test prints one PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use xcspkit_core::checker::{check_assignment, constraint_satisfied};
use xcspkit_core::generators as g;
use xcspkit_core::ir::{validate_instance, Assignment, VarId};
use xcspkit_core::solver::{
    enumerate_solutions, solve_cop, solve_csp, Limits, Propagation, SearchState, Status,
};
use xcspkit_core::xml::{parse_xcsp3, write_xcsp3};
use xcspkit_oracle as oracle;

use xcspkit_harness::campaign::{run_campaign, AdapterSpec, Manifest};
use xcspkit_harness::report::{render_csv, render_text};
use xcspkit_harness::runs::{ObjSense, RunRecord, RunStatus, SolverMeta};
use xcspkit_harness::score::{rank_track, score_cop, score_csp, Ranking};
use xcspkit_harness::track::{Track, TrackConfig};

fn budget() -> Limits {
    Limits::cpu(600.0)
}

/// Builds the full assignment (values then positions) for a Langford
/// sequence produced by the placement oracle.
fn langford_assignment(seq: &[i64]) -> Assignment {
    let n = seq.len() / 2;
    let mut vals = seq.to_vec();
    let mut positions = vec![0i64; 2 * n];
    for value in 1..=n as i64 {
        let occ: Vec<i64> = (0..seq.len() as i64)
            .filter(|&j| seq[j as usize] == value)
            .collect();
        let i = (value - 1) as usize;
        positions[2 * i] = occ[1]; // later occurrence
        positions[2 * i + 1] = occ[0];
    }
    vals.extend(positions);
    Assignment(vals)
}

#[test]
fn criterion_01_langford_family() {
    let start = Instant::now();
    for (n, want_sat) in [
        (3, true),
        (4, true),
        (5, false),
        (6, false),
        (7, true),
        (8, true),
    ] {
        let inst = g::gen_langford_bin(n).unwrap();
        // ground truth: exhaustive enumeration up to 6, a verified
        // construction for 7 and 8
        if n <= 6 {
            let sols = enumerate_solutions(&inst, Some(1)).unwrap();
            assert_eq!(
                !sols.is_empty(),
                want_sat,
                "enumeration ground truth for n={n}"
            );
        } else {
            let seqs = oracle::langford_sequences(n as usize);
            assert!(!seqs.is_empty(), "construction must exist for n={n}");
            let a = langford_assignment(&seqs[0]);
            assert!(
                check_assignment(&inst, &a).unwrap().satisfied,
                "construction checks for n={n}"
            );
        }
        let r = solve_csp(&inst, &budget()).unwrap();
        assert_eq!(r.status == Status::Sat, want_sat, "solver status for n={n}");
        if let Some(w) = &r.witness {
            assert!(
                check_assignment(&inst, w).unwrap().satisfied,
                "witness for n={n}"
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 30.0,
        "langford family took {elapsed:.1}s, budget 30s"
    );
    println!("acceptance 1 PASS: langford 3/4/7/8 SAT, 5/6 UNSAT, witnesses valid, {elapsed:.2}s");
}

#[test]
fn criterion_02_labs_optima() {
    let start = Instant::now();
    for n in 2..=12i64 {
        let inst = g::gen_low_autocorrelation(n).unwrap();
        let r = solve_cop(&inst, &budget()).unwrap();
        let want = oracle::labs_optimum(n as usize);
        assert_eq!(r.status, Status::Optimum, "n={n}");
        assert_eq!(
            r.bound,
            Some(want),
            "n={n}: optimum must match the 2^n enumeration"
        );
        let w = r.witness.unwrap();
        let rep = check_assignment(&inst, &w).unwrap();
        assert!(rep.satisfied && rep.objective == Some(want), "n={n}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "labs sweep took {elapsed:.1}s, budget 60s");
    println!("acceptance 2 PASS: autocorrelation optima 2..=12 match brute force, {elapsed:.2}s");
}

#[test]
fn criterion_03_coprime_optima() {
    let start = Instant::now();
    for n in 1..=5i64 {
        let inst = g::gen_coprime(n).unwrap();
        let r = solve_cop(&inst, &budget()).unwrap();
        let want = oracle::coprime_optimum(n as usize);
        assert_eq!(r.status, Status::Optimum, "n={n}");
        assert_eq!(r.bound, want, "n={n}: optimum must match subset search");
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 30.0,
        "coprime sweep took {elapsed:.1}s, budget 30s"
    );
    println!("acceptance 3 PASS: coprime optima 1..=5 match subset search, {elapsed:.2}s");
}

#[test]
fn criterion_04_cutstock_sample() {
    let data = xcspkit_core::data::CutstockData {
        n_pieces: 7,
        piece_length: 10,
        items: vec![
            xcspkit_core::data::CutstockItem {
                length: 7,
                demand: 2,
            },
            xcspkit_core::data::CutstockItem {
                length: 5,
                demand: 2,
            },
            xcspkit_core::data::CutstockItem {
                length: 3,
                demand: 4,
            },
        ],
    };
    let inst = g::gen_cutstock(&data).unwrap();
    let mut items = Vec::new();
    for it in &data.items {
        for _ in 0..it.demand {
            items.push(it.length);
        }
    }
    let want = oracle::bin_packing_optimum(&items, data.piece_length).unwrap() as i64;
    let r = solve_cop(&inst, &budget()).unwrap();
    assert_eq!(r.status, Status::Optimum);
    assert_eq!(
        r.bound,
        Some(want),
        "optimum must match the packing enumeration"
    );
    println!("acceptance 4 PASS: cutstock sample optimum {want} matches the packing oracle");
}

#[test]
fn criterion_05_checker_oracle_equivalence() {
    let nvars = 4;
    let cases_per_kind = 1000;
    let mut total = 0u64;
    for kind in 0..oracle::KIND_COUNT {
        let mut rng = oracle::Rng::new(0xACCE97 ^ (kind as u64) << 8);
        for case in 0..cases_per_kind {
            let c = oracle::random_constraint(kind, &mut rng, nvars);
            let a = oracle::random_assignment(&mut rng, nvars);
            let got = constraint_satisfied(&c, &Assignment(a.clone())).unwrap();
            let want = oracle::definition_satisfied(&c, &a);
            assert_eq!(
                got,
                want,
                "kind {} case {case} disagrees\n{c:?}\n{a:?}",
                oracle::KIND_NAMES[kind]
            );
            total += 1;
        }
    }
    println!(
        "acceptance 5 PASS: {total} random pairs over {} kinds agree with the definitions",
        oracle::KIND_COUNT
    );
}

#[test]
fn criterion_06_propagation_soundness() {
    let mut rng = oracle::Rng::new(0x9A7E);
    let mut violations = 0u32;
    let instances = 500;
    for case in 0..instances {
        let inst = oracle::random_solver_instance(&mut rng, false);
        let solutions = oracle::raw_solutions(&inst, None);
        let mut st = SearchState::new(&inst).unwrap();
        match st.propagate() {
            Propagation::Conflict(_) => {
                if !solutions.is_empty() {
                    violations += 1;
                    eprintln!(
                        "case {case}: conflict despite {} solutions",
                        solutions.len()
                    );
                }
            }
            Propagation::Fixpoint => {
                for sol in &solutions {
                    for (v, &val) in sol.iter().enumerate() {
                        if !st.domain_values(VarId(v)).contains(&val) {
                            violations += 1;
                            eprintln!("case {case}: lost {val} of x[{v}] from {sol:?}");
                        }
                    }
                }
            }
        }
    }
    assert_eq!(violations, 0, "propagation discarded solution values");
    println!("acceptance 6 PASS: 0 violations over {instances} random instances");
}

#[test]
fn criterion_07_roundtrip_all_generators() {
    let cutstock = xcspkit_core::data::CutstockData {
        n_pieces: 7,
        piece_length: 10,
        items: vec![
            xcspkit_core::data::CutstockItem {
                length: 7,
                demand: 2,
            },
            xcspkit_core::data::CutstockItem {
                length: 5,
                demand: 2,
            },
            xcspkit_core::data::CutstockItem {
                length: 3,
                demand: 4,
            },
        ],
    };
    let bus = xcspkit_core::data::BusSchedulingData {
        n_tasks: 24,
        shifts: vec![
            vec![11, 18],
            vec![3, 4, 11],
            vec![11, 18, 19],
            vec![11, 12, 14, 15],
            vec![0, 1, 2],
            vec![5, 6, 7, 8],
            vec![9, 10, 12, 13],
            vec![16, 17, 19, 20],
            vec![21, 22, 23],
            vec![0, 21],
        ],
    };
    let metabolic = xcspkit_core::data::MetabolicNetworkData {
        n_reactions: 4,
        stoichiometry_matrix: vec![vec![1, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 0, 1, -1]],
        reversible_indicators: vec![vec![0, 1, 1, 0]],
    };
    let instances = vec![
        g::gen_chain_reaction(20, 20).unwrap(),
        g::gen_almost_magic(3, 30).unwrap(),
        g::gen_graceful_graph(6, 2).unwrap(),
        g::gen_heterosquare(5, g::HeterosquareVariant::Fair).unwrap(),
        g::gen_langford_bin(10).unwrap(),
        g::gen_ramsey_partition(4, 60).unwrap(),
        g::gen_efpa(5, 4, 4, 8).unwrap(),
        g::gen_low_autocorrelation(10).unwrap(),
        g::gen_coprime(8).unwrap(),
        g::gen_cutstock(&cutstock).unwrap(),
        g::gen_bus_scheduling(&bus).unwrap(),
        g::gen_metabolic_network(&metabolic).unwrap(),
    ];
    assert_eq!(instances.len(), 12);
    for inst in &instances {
        assert_eq!(validate_instance(inst), vec![], "{}", inst.name);
        let xml = write_xcsp3(inst).unwrap();
        let back = parse_xcsp3(&xml).unwrap();
        assert_eq!(
            inst.signature(),
            back.signature(),
            "{}: signatures differ",
            inst.name
        );
        assert_eq!(
            write_xcsp3(&back).unwrap(),
            xml,
            "{}: bytes differ",
            inst.name
        );
    }
    println!("acceptance 7 PASS: 12 generators round-trip with byte-identical re-serialization");
}

fn cop_run(solver: &str, instance: &str, status: RunStatus, bound: Option<i64>) -> RunRecord {
    let mut r = RunRecord::new(solver, instance, status);
    r.bound = bound;
    r.objective_sense = Some(ObjSense::Minimize);
    r
}

#[test]
fn criterion_08_scoring_fixtures() {
    // four solvers, six optimization instances, every rule branch
    let runs = vec![
        // i1: an unsatisfiability proof earns the full point
        cop_run("s1", "i1", RunStatus::Unsat, None),
        cop_run("s2", "i1", RunStatus::Unknown, None),
        // i2: validated optimum 10; the matching bound is halved
        cop_run("s1", "i2", RunStatus::Optimum, Some(10)),
        cop_run("s2", "i2", RunStatus::Bound, Some(10)),
        cop_run("s3", "i2", RunStatus::Bound, Some(12)),
        cop_run("s4", "i2", RunStatus::Unknown, None),
        // i3: shared best bound, nobody proved optimality
        cop_run("s1", "i3", RunStatus::Bound, Some(9)),
        cop_run("s2", "i3", RunStatus::Bound, Some(7)),
        cop_run("s3", "i3", RunStatus::Bound, Some(7)),
        // i4: an invalidated claim scores nothing
        cop_run("s4", "i4", RunStatus::Invalid, Some(5)),
        cop_run("s1", "i4", RunStatus::Bound, Some(6)),
        // i5: optimum elsewhere, worse bound scores zero
        cop_run("s3", "i5", RunStatus::Optimum, Some(3)),
        cop_run("s4", "i5", RunStatus::Bound, Some(4)),
        cop_run("s2", "i5", RunStatus::Bound, Some(3)),
        // i6: optimum claim beaten by a strictly better bound is invalidated
        cop_run("s1", "i6", RunStatus::Optimum, Some(9)),
        cop_run("s2", "i6", RunStatus::Bound, Some(7)),
    ];
    let table = score_cop(&runs);

    let expect: &[(&str, &str, u32)] = &[
        ("s1", "i1", 2),
        ("s2", "i1", 0),
        ("s1", "i2", 2),
        ("s2", "i2", 1), // the 0.5 award
        ("s3", "i2", 0),
        ("s4", "i2", 0),
        ("s1", "i3", 0),
        ("s2", "i3", 2),
        ("s3", "i3", 2),
        ("s4", "i4", 0),
        ("s1", "i4", 2),
        ("s3", "i5", 2),
        ("s4", "i5", 0),
        ("s2", "i5", 1),
        ("s1", "i6", 0),
        ("s2", "i6", 2),
    ];
    for (solver, instance, halves) in expect {
        assert_eq!(
            table.award_of(solver, instance),
            *halves,
            "award for {solver} on {instance}"
        );
    }
    assert_eq!(table.total_of("s1"), 6);
    assert_eq!(table.total_of("s2"), 6);
    assert_eq!(table.total_of("s3"), 4);
    assert_eq!(table.total_of("s4"), 0);
    assert!(
        table.breakdown.iter().any(|(_, _, h)| *h == 1),
        "a 0.5 award must appear"
    );
    assert!(
        table.breakdown.iter().all(|(_, _, h)| *h <= 2),
        "awards stay in {{0, 0.5, 1}}"
    );
    assert!(
        !table.flags.is_empty(),
        "the inconsistent optimum is flagged"
    );

    // satisfaction fixture: points equal solve counts, non-exclusive
    let mk = |s: &str, i: &str, st: RunStatus| RunRecord::new(s, i, st);
    let csp_runs = vec![
        mk("a", "j1", RunStatus::Sat),
        mk("a", "j2", RunStatus::Unsat),
        mk("a", "j3", RunStatus::Unknown),
        mk("b", "j1", RunStatus::Sat),
        mk("b", "j2", RunStatus::Invalid),
        mk("b", "j3", RunStatus::Sat),
        mk("c", "j1", RunStatus::Unknown),
        mk("c", "j2", RunStatus::Unknown),
        mk("c", "j3", RunStatus::Unknown),
    ];
    let t = score_csp(&csp_runs);
    assert_eq!(t.total_of("a"), 4);
    assert_eq!(t.total_of("b"), 4);
    assert_eq!(t.total_of("c"), 0);
    println!("acceptance 8 PASS: optimization and satisfaction fixtures reproduce exact tables");
}

#[test]
fn criterion_09_ranking_pipeline() {
    let metas = vec![
        SolverMeta {
            id: "ace".into(),
            team: "sel".into(),
            family: None,
            off_competition: true,
        },
        SolverMeta {
            id: "alpha1".into(),
            team: "t1".into(),
            family: Some("alpha".into()),
            off_competition: false,
        },
        SolverMeta {
            id: "alpha2".into(),
            team: "t1".into(),
            family: Some("alpha".into()),
            off_competition: false,
        },
        SolverMeta::new("beta", "t2"),
        SolverMeta::new("gamma", "t3"),
        SolverMeta::new("delta", "t4"),
    ];
    // main track: ace would win every instance; alpha1 beats alpha2 head to
    // head; beta beats gamma beats delta
    let main_runs = vec![
        cop_run("ace", "m1", RunStatus::Optimum, Some(1)),
        cop_run("ace", "m2", RunStatus::Optimum, Some(1)),
        cop_run("ace", "m3", RunStatus::Optimum, Some(1)),
        cop_run("alpha1", "m1", RunStatus::Bound, Some(2)),
        cop_run("alpha1", "m2", RunStatus::Bound, Some(2)),
        cop_run("alpha1", "m3", RunStatus::Bound, Some(2)),
        cop_run("alpha2", "m1", RunStatus::Bound, Some(3)),
        cop_run("alpha2", "m2", RunStatus::Bound, Some(3)),
        cop_run("beta", "m1", RunStatus::Bound, Some(2)),
        cop_run("beta", "m2", RunStatus::Bound, Some(2)),
        cop_run("gamma", "m3", RunStatus::Bound, Some(2)),
        cop_run("delta", "m1", RunStatus::Bound, Some(9)),
    ];
    let (main_ranking, _) = rank_track(&main_runs, &metas, Track::Cop, None).unwrap();

    // off-competition solver is out despite the top score
    assert!(main_ranking.entries.iter().all(|e| e.solver != "ace"));
    assert!(main_ranking
        .excluded
        .iter()
        .any(|(s, r)| s == "ace" && r == "off-competition"));
    // only the better variant of the family survives
    assert!(main_ranking.entries.iter().any(|e| e.solver == "alpha1"));
    assert!(main_ranking.entries.iter().all(|e| e.solver != "alpha2"));
    // with ace and alpha2 gone: alpha1 holds best bounds on m1..m3 (shared),
    // beta shares two, gamma shares one, delta none
    let order: Vec<(&str, usize)> = main_ranking
        .entries
        .iter()
        .map(|e| (e.solver.as_str(), e.rank))
        .collect();
    assert_eq!(
        order,
        vec![("alpha1", 1), ("beta", 2), ("gamma", 3), ("delta", 4)]
    );

    // the same pipeline is order-independent over the run list
    let mut shuffled = main_runs.clone();
    shuffled.reverse();
    let (again, _) = rank_track(&shuffled, &metas, Track::Cop, None).unwrap();
    assert_eq!(main_ranking, again);

    // mini track: the alpha family medaled in main, so its entry is dropped
    let mini_metas = vec![
        SolverMeta {
            id: "mini-alpha".into(),
            team: "t1".into(),
            family: Some("alpha".into()),
            off_competition: false,
        },
        SolverMeta::new("epsilon", "t5"),
        SolverMeta::new("zeta", "t6"),
    ];
    let mini_runs = vec![
        cop_run("mini-alpha", "k1", RunStatus::Optimum, Some(1)),
        cop_run("epsilon", "k1", RunStatus::Bound, Some(2)),
        cop_run("epsilon", "k2", RunStatus::Unsat, None),
        cop_run("zeta", "k1", RunStatus::Bound, Some(4)),
    ];
    let err = rank_track(&mini_runs, &mini_metas, Track::MiniCop, None);
    assert!(
        err.is_err(),
        "mini ranking without the main ranking must fail"
    );
    let (mini, _) =
        rank_track(&mini_runs, &mini_metas, Track::MiniCop, Some(&main_ranking)).unwrap();
    assert!(mini.entries.iter().all(|e| e.solver != "mini-alpha"));
    assert!(mini
        .excluded
        .iter()
        .any(|(s, r)| s == "mini-alpha" && r.contains("podium")));
    let order: Vec<(&str, usize)> = mini
        .entries
        .iter()
        .map(|e| (e.solver.as_str(), e.rank))
        .collect();
    assert_eq!(order, vec![("epsilon", 1), ("zeta", 2)]);
    println!("acceptance 9 PASS: ranking pipeline filters and orders deterministically");
}

#[test]
fn criterion_10_end_to_end_campaign() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cutstock = xcspkit_core::data::CutstockData {
        n_pieces: 7,
        piece_length: 10,
        items: vec![
            xcspkit_core::data::CutstockItem {
                length: 7,
                demand: 2,
            },
            xcspkit_core::data::CutstockItem {
                length: 5,
                demand: 2,
            },
            xcspkit_core::data::CutstockItem {
                length: 3,
                demand: 4,
            },
        ],
    };
    let bus = xcspkit_core::data::BusSchedulingData {
        n_tasks: 2,
        shifts: vec![vec![0], vec![1], vec![0, 1]],
    };
    let instances = vec![
        g::gen_coprime(3).unwrap(),
        g::gen_low_autocorrelation(6).unwrap(),
        g::gen_low_autocorrelation(7).unwrap(),
        g::gen_cutstock(&cutstock).unwrap(),
        g::gen_bus_scheduling(&bus).unwrap(),
    ];
    let mut paths = Vec::new();
    for inst in &instances {
        let path = dir.path().join(format!("{}.xml", inst.name));
        std::fs::write(&path, write_xcsp3(inst).unwrap()).unwrap();
        paths.push(path.display().to_string());
    }
    let manifest = Manifest {
        instances: paths,
        solvers: vec![AdapterSpec {
            meta: SolverMeta::new("builtin", "home"),
            command: vec![
                env!("CARGO_BIN_EXE_xcspkit").to_string(),
                "solve".to_string(),
                "{instance}".to_string(),
                "--timeout".to_string(),
                "{timeout}".to_string(),
            ],
        }],
    };
    let cfg = TrackConfig::new(Track::Cop, 0.01);
    let out = run_campaign(&manifest, &cfg, true, 2).unwrap();
    assert_eq!(out.runs.len(), 5);
    assert!(
        out.runs.iter().all(|r| r.status != RunStatus::Invalid),
        "no record may be invalid: {:?}",
        out.runs
    );
    assert!(out.runs.iter().all(|r| r.status == RunStatus::Optimum));

    let table = score_cop(&out.runs);
    assert_eq!(table.total_of("builtin"), 10, "five full points");

    let (ranking, final_table) = rank_track(&out.runs, &out.solvers, Track::Cop, None).unwrap();
    let text = render_text(&cfg, &ranking, &final_table);
    assert!(text.contains("builtin"));
    let csv = render_csv(&final_table);
    assert_eq!(
        csv.lines().count(),
        1 + 5,
        "header plus one row per instance"
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "campaign took {elapsed:.1}s, budget 120s");
    println!("acceptance 10 PASS: campaign over 5 instances validated and scored in {elapsed:.2}s");
}

/// The ranking type serializes stably enough to feed mini-track runs.
#[test]
fn ranking_json_feeds_mini_exclusion() {
    let metas = vec![SolverMeta::new("a", "t1"), SolverMeta::new("b", "t2")];
    let runs = vec![
        cop_run("a", "i", RunStatus::Optimum, Some(1)),
        cop_run("b", "i", RunStatus::Bound, Some(2)),
    ];
    let (ranking, _) = rank_track(&runs, &metas, Track::Cop, None).unwrap();
    let json = serde_json::to_string(&ranking).unwrap();
    let back: Ranking = serde_json::from_str(&json).unwrap();
    assert_eq!(ranking, back);
}
