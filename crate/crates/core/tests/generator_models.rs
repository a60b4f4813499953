//! Structural and ground-truth tests for every generator: variable and
//! constraint layout straight from the model definitions, plus status and
//! optimum agreement with independent brute-force oracles at small sizes.

use xcspkit_core::checker::{check_assignment, objective_value};
use xcspkit_core::generators as g;
use xcspkit_core::ir::{validate_instance, Assignment, Constraint, Instance};
use xcspkit_core::solver::{solve_cop, solve_csp, Limits, Status};
use xcspkit_oracle as oracle;

fn kind_count(inst: &Instance, kind: &str) -> usize {
    inst.constraints
        .iter()
        .filter(|c| c.kind_name() == kind)
        .count()
}

fn lim() -> Limits {
    Limits::cpu(60.0)
}

#[test]
fn chain_reaction_structure() {
    let inst = g::gen_chain_reaction(20, 25).unwrap();
    assert_eq!(inst.num_vars(), 20);
    assert_eq!(kind_count(&inst, "allDifferent"), 1);
    assert_eq!(kind_count(&inst, "intension"), 19);
    assert!(inst
        .variables
        .iter()
        .all(|v| v.domain.min() == 1 && v.domain.max() == 25));
    assert_eq!(validate_instance(&inst), vec![]);
}

#[test]
fn chain_reaction_tiny_is_sat() {
    let inst = g::gen_chain_reaction(2, 2).unwrap();
    let r = solve_csp(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Sat);
}

#[test]
fn chain_reaction_matches_exhaustive_search() {
    for (n, p) in [(5, 5), (4, 5), (3, 4)] {
        let inst = g::gen_chain_reaction(n, p).unwrap();
        let want = oracle::chain_reaction_satisfiable(n as usize, p);
        let got = solve_csp(&inst, &lim()).unwrap().status;
        assert_eq!(got == Status::Sat, want, "chain ({n},{p})");
    }
}

#[test]
fn almost_magic_structure() {
    let inst = g::gen_almost_magic(3, 100).unwrap();
    // 4 regions of 3x3 plus four magic values
    assert_eq!(inst.num_vars(), 4 * 9 + 4);
    // per region: 3 rows + 3 columns + 2 diagonals, a >= and a <= each
    assert_eq!(kind_count(&inst, "sum"), 4 * 8 * 2);
    assert_eq!(kind_count(&inst, "allDifferent"), 1);
    // overlap equalities between regions
    assert_eq!(kind_count(&inst, "intension"), 8);
    assert_eq!(validate_instance(&inst), vec![]);

    let grid = inst.var_by_name("x[0][0][0]").unwrap();
    assert_eq!((grid.domain.min(), grid.domain.max()), (1, 99));
    let magic = inst.var_by_name("y[0]").unwrap();
    assert_eq!((magic.domain.min(), magic.domain.max()), (0, 299));
}

#[test]
fn almost_magic_small_bound_is_pigeonholed() {
    // 28 cells must be pairwise distinct but only 9 values exist
    let inst = g::gen_almost_magic(3, 10).unwrap();
    let r = solve_csp(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Unsat);
}

#[test]
fn almost_magic_determinism_and_overlap_scopes() {
    let a = g::gen_almost_magic(3, 30).unwrap();
    let b = g::gen_almost_magic(3, 30).unwrap();
    assert_eq!(a.signature(), b.signature());
    // every overlap equality ties a region-boundary pair
    let overlaps: Vec<&Constraint> = a
        .constraints
        .iter()
        .filter(|c| c.kind_name() == "intension")
        .collect();
    assert_eq!(overlaps.len(), 8);
    let pair = |c: &Constraint| {
        let vars = c.referenced_vars();
        (a.var(vars[0]).name.clone(), a.var(vars[1]).name.clone())
    };
    assert_eq!(
        pair(overlaps[0]),
        ("x[0][1][2]".into(), "x[1][0][0]".into())
    );
    assert_eq!(
        pair(overlaps[2]),
        ("x[0][2][0]".into(), "x[2][0][1]".into())
    );
    assert_eq!(
        pair(overlaps[4]),
        ("x[1][2][0]".into(), "x[3][0][1]".into())
    );
    assert_eq!(
        pair(overlaps[6]),
        ("x[2][1][2]".into(), "x[3][0][0]".into())
    );
}

#[test]
fn graceful_graph_edge_counts() {
    let inst = g::gen_graceful_graph(3, 8).unwrap();
    // 3*2*8/2 + 3*7 = 45 edges
    let node = inst.var_by_name("cn[0][0]").unwrap();
    assert_eq!((node.domain.min(), node.domain.max()), (0, 45));
    let edge = inst.var_by_name("ce[0][0][1]").unwrap();
    assert_eq!((edge.domain.min(), edge.domain.max()), (1, 45));

    let tiny = g::gen_graceful_graph(2, 2).unwrap();
    assert_eq!(tiny.var_by_name("cn[0][0]").unwrap().domain.max(), 4);
    assert_eq!(validate_instance(&tiny), vec![]);
}

#[test]
fn graceful_graph_matches_exhaustive_search() {
    let inst = g::gen_graceful_graph(3, 2).unwrap();
    let want = !oracle::raw_solutions(&inst, Some(1)).is_empty();
    let got = solve_csp(&inst, &lim()).unwrap();
    assert_eq!(got.status == Status::Sat, want);
    if let Some(w) = &got.witness {
        assert!(check_assignment(&inst, w).unwrap().satisfied);
    }
}

#[test]
fn heterosquare_bounds_and_variants() {
    let base = g::gen_heterosquare(3, g::HeterosquareVariant::None).unwrap();
    let rs = base.var_by_name("rs[0]").unwrap();
    assert_eq!((rs.domain.min(), rs.domain.max()), (6, 45));
    assert_eq!(kind_count(&base, "allDifferent"), 2);
    assert_eq!(kind_count(&base, "sum"), 3 + 3 + 2);
    assert_eq!(kind_count(&base, "intension"), 4);

    let easy = g::gen_heterosquare(20, g::HeterosquareVariant::Easy).unwrap();
    let rs = easy.var_by_name("rs[0]").unwrap();
    assert_eq!((rs.domain.min(), rs.domain.max()), (2100, 8020));

    // fair multiplies the lower bound by n-1, hard by n
    let fair = g::gen_heterosquare(20, g::HeterosquareVariant::Fair).unwrap();
    assert_eq!(fair.var_by_name("rs[0]").unwrap().domain.min(), 210 * 19);
    let hard = g::gen_heterosquare(20, g::HeterosquareVariant::Hard).unwrap();
    assert_eq!(hard.var_by_name("rs[0]").unwrap().domain.min(), 210 * 20);
}

#[test]
fn heterosquare_order_three_exists() {
    assert!(oracle::heterosquare_exists(3, true));
    let inst = g::gen_heterosquare(3, g::HeterosquareVariant::None).unwrap();
    let r = solve_csp(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Sat);
    assert!(
        check_assignment(&inst, r.witness.as_ref().unwrap())
            .unwrap()
            .satisfied
    );
}

#[test]
fn langford_structure() {
    let inst = g::gen_langford_bin(4).unwrap();
    assert_eq!(inst.num_vars(), 16);
    assert_eq!(kind_count(&inst, "element"), 8);
    assert_eq!(kind_count(&inst, "intension"), 4);
    assert_eq!(validate_instance(&g::gen_langford_bin(4).unwrap()), vec![]);
}

#[test]
fn langford_known_sequence_checks_out() {
    let inst = g::gen_langford_bin(3).unwrap();
    // sequence 3 1 2 1 3 2; second positions of each value come first in p
    let v = vec![3, 1, 2, 1, 3, 2];
    let p = vec![3, 1, 5, 2, 4, 0];
    let mut a = v.clone();
    a.extend(&p);
    let report = check_assignment(&inst, &Assignment(a)).unwrap();
    assert!(
        report.satisfied,
        "{:?}",
        report.verdicts.iter().find(|x| !x.satisfied)
    );
}

#[test]
fn langford_status_matches_placement_search() {
    for n in [3usize, 4, 5] {
        let inst = g::gen_langford_bin(n as i64).unwrap();
        let want = !oracle::langford_sequences(n).is_empty();
        let got = solve_csp(&inst, &lim()).unwrap().status;
        assert_eq!(got == Status::Sat, want, "langford({n})");
    }
}

#[test]
fn langford_solution_count_is_two_for_order_three() {
    let inst = g::gen_langford_bin(3).unwrap();
    let sols = xcspkit_core::solver::enumerate_solutions(&inst, Some(100)).unwrap();
    assert_eq!(sols.len(), 2);
    assert_eq!(oracle::langford_sequences(3).len(), 2);
}

#[test]
fn ramsey_partition_structure() {
    let inst = g::gen_ramsey_partition(3, 23).unwrap();
    assert_eq!(inst.num_vars(), 23);
    assert_eq!(kind_count(&inst, "cardinality"), 1);
    let triples = (0..23u32)
        .flat_map(|i| (i + 1..23).map(move |j| (i, j)))
        .filter(|(i, j)| i + j + 1 < 23)
        .count();
    assert_eq!(kind_count(&inst, "nValues"), triples);
}

#[test]
fn ramsey_partition_matches_exhaustive_search() {
    for (q, n) in [(3i64, 8i64), (2, 7), (3, 9)] {
        let inst = g::gen_ramsey_partition(q, n).unwrap();
        let want = oracle::ramsey_partition_satisfiable(q as usize, n as usize);
        let got = solve_csp(&inst, &lim()).unwrap().status;
        assert_eq!(got == Status::Sat, want, "ramsey ({q},{n})");
    }
}

#[test]
fn efpa_structure() {
    let inst = g::gen_efpa(3, 7, 7, 6).unwrap();
    assert_eq!(inst.num_vars(), 6 * 49);
    assert_eq!(kind_count(&inst, "cardinality"), 6);
    assert_eq!(kind_count(&inst, "intension"), 15); // C(6,2) distance constraints
    assert_eq!(kind_count(&inst, "lex"), 2); // rows and columns
}

#[test]
fn efpa_zero_distance_forces_equal_rows() {
    let inst = g::gen_efpa(0, 2, 2, 2).unwrap();
    let r = solve_csp(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Sat);
    let w = r.witness.unwrap();
    let (row0, row1) = (&w.0[0..4], &w.0[4..8]);
    assert_eq!(row0, row1);
}

#[test]
fn efpa_small_matches_exhaustive_search() {
    let inst = g::gen_efpa(2, 1, 2, 2).unwrap();
    let want = !oracle::raw_solutions(&inst, Some(1)).is_empty();
    let got = solve_csp(&inst, &lim()).unwrap().status;
    assert_eq!(got == Status::Sat, want);
}

#[test]
fn low_autocorrelation_structure_and_small_optima() {
    let inst = g::gen_low_autocorrelation(8).unwrap();
    assert_eq!(kind_count(&inst, "sum"), 7); // one correlation per shift
    let r = solve_cop(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Optimum);
    assert_eq!(r.bound, Some(oracle::labs_optimum(8)));
    assert_eq!(r.bound, Some(8));

    let tiny = g::gen_low_autocorrelation(2).unwrap();
    let r = solve_cop(&tiny, &lim()).unwrap();
    assert_eq!(r.bound, Some(1));
}

#[test]
fn coprime_optima_match_subset_search() {
    for n in [1i64, 2, 4] {
        let inst = g::gen_coprime(n).unwrap();
        let r = solve_cop(&inst, &lim()).unwrap();
        assert_eq!(r.status, Status::Optimum, "coprime({n})");
        assert_eq!(r.bound, oracle::coprime_optimum(n as usize), "coprime({n})");
    }
    assert_eq!(oracle::coprime_optimum(2), Some(3));
    assert_eq!(oracle::coprime_optimum(1), Some(2));
}

fn cutstock(n_pieces: i64) -> Instance {
    let data = xcspkit_core::data::CutstockData {
        n_pieces,
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
    g::gen_cutstock(&data).unwrap()
}

#[test]
fn cutstock_sample_matches_packing_oracle() {
    let items = [7i64, 7, 5, 5, 3, 3, 3, 3];
    let oracle_opt = oracle::bin_packing_optimum(&items, 10).unwrap() as i64;
    let r = solve_cop(&cutstock(7), &lim()).unwrap();
    assert_eq!(r.status, Status::Optimum);
    assert_eq!(r.bound, Some(oracle_opt));
    let w = r.witness.unwrap();
    assert_eq!(objective_value(&cutstock(7), &w).unwrap(), oracle_opt);
}

#[test]
fn cutstock_below_packing_bound_is_unsat() {
    let items = [7i64, 7, 5, 5, 3, 3, 3, 3];
    let opt = oracle::bin_packing_optimum(&items, 10).unwrap() as i64;
    let r = solve_cop(&cutstock(opt - 1), &lim()).unwrap();
    assert_eq!(r.status, Status::Unsat);
}

#[test]
fn cutstock_zero_demand_uses_no_pieces() {
    let data = xcspkit_core::data::CutstockData {
        n_pieces: 3,
        piece_length: 10,
        items: vec![xcspkit_core::data::CutstockItem {
            length: 4,
            demand: 0,
        }],
    };
    let inst = g::gen_cutstock(&data).unwrap();
    let r = solve_cop(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Optimum);
    assert_eq!(r.bound, Some(0));
}

#[test]
fn bus_scheduling_shapes_and_small_cases() {
    let data = xcspkit_core::data::BusSchedulingData {
        n_tasks: 2,
        shifts: vec![vec![0], vec![1], vec![0, 1]],
    };
    let inst = g::gen_bus_scheduling(&data).unwrap();
    assert_eq!(kind_count(&inst, "count"), 2);
    let r = solve_cop(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Optimum);
    assert_eq!(r.bound, Some(1));

    // a task no shift covers is unsatisfiable
    let bad = xcspkit_core::data::BusSchedulingData {
        n_tasks: 2,
        shifts: vec![vec![0]],
    };
    let inst = g::gen_bus_scheduling(&bad).unwrap();
    assert_eq!(solve_cop(&inst, &lim()).unwrap().status, Status::Unsat);
}

#[test]
fn metabolic_network_small_cases() {
    let two = xcspkit_core::data::MetabolicNetworkData {
        n_reactions: 2,
        stoichiometry_matrix: vec![vec![1, -1]],
        reversible_indicators: vec![],
    };
    let inst = g::gen_metabolic_network(&two).unwrap();
    // flux bound is part of the model
    assert_eq!(inst.var_by_name("x[0]").unwrap().domain.max(), 50);
    let r = solve_cop(&inst, &lim()).unwrap();
    assert_eq!(r.status, Status::Optimum);
    assert_eq!(r.bound, Some(2));
    assert_eq!(oracle::raw_optimum(&inst), Some(2));

    let trivial = xcspkit_core::data::MetabolicNetworkData {
        n_reactions: 1,
        stoichiometry_matrix: vec![vec![0]],
        reversible_indicators: vec![],
    };
    let inst = g::gen_metabolic_network(&trivial).unwrap();
    let r = solve_cop(&inst, &lim()).unwrap();
    assert_eq!(r.bound, Some(1));
}

#[test]
fn all_generators_validate_and_reject_bad_params() {
    assert!(g::gen_chain_reaction(0, 5).is_err());
    assert!(g::gen_almost_magic(2, 100).is_err());
    assert!(g::gen_graceful_graph(0, 2).is_err());
    assert!(g::gen_heterosquare(1, g::HeterosquareVariant::Easy).is_err());
    assert!(g::gen_langford_bin(0).is_err());
    assert!(g::gen_ramsey_partition(0, 5).is_err());
    assert!(g::gen_efpa(-1, 1, 2, 2).is_err());
    assert!(g::gen_low_autocorrelation(1).is_err());
    assert!(g::gen_coprime(0).is_err());
    let bad_bus = xcspkit_core::data::BusSchedulingData {
        n_tasks: 2,
        shifts: vec![vec![5]],
    };
    assert!(g::gen_bus_scheduling(&bad_bus).is_err());
    let bad_net = xcspkit_core::data::MetabolicNetworkData {
        n_reactions: 2,
        stoichiometry_matrix: vec![vec![1]],
        reversible_indicators: vec![],
    };
    assert!(g::gen_metabolic_network(&bad_net).is_err());
}

#[test]
fn cutstock_hand_built_six_piece_plan_evaluates_to_six() {
    let inst = cutstock(7);
    // p[0..6] used, piece 6 idle; rows stay lexicographically decreasing
    let p = vec![1i64, 1, 1, 1, 1, 1, 0];
    let r = vec![
        vec![1i64, 0, 1], // 7 + 3
        vec![1, 0, 1],
        vec![0, 1, 0], // 5
        vec![0, 1, 0],
        vec![0, 0, 1], // 3
        vec![0, 0, 1],
        vec![0, 0, 0],
    ];
    let mut a = p.clone();
    a.extend(r.into_iter().flatten());
    let assignment = Assignment(a);
    let report = check_assignment(&inst, &assignment).unwrap();
    assert!(
        report.satisfied,
        "{:?}",
        report.verdicts.iter().find(|v| !v.satisfied)
    );
    assert_eq!(objective_value(&inst, &assignment).unwrap(), 6);
}

#[test]
fn instances_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Instance>();
    let inst = std::sync::Arc::new(g::gen_langford_bin(4).unwrap());
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let inst = std::sync::Arc::clone(&inst);
            std::thread::spawn(move || solve_csp(&inst, &lim()).unwrap().status)
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), Status::Sat);
    }
}
