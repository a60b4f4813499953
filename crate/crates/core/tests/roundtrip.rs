//! Serialization round-trips: every generator at its smallest documented
//! parameters, random instances over the whole catalog, byte-determinism of
//! the writer, and parser totality on arbitrary input.

use proptest::prelude::*;

use xcspkit_core::data::load_data;
use xcspkit_core::generators as g;
use xcspkit_core::ir::{validate_instance, Instance};
use xcspkit_core::xml::{parse_xcsp3, write_xcsp3};
use xcspkit_oracle as oracle;

const CUTSTOCK_SAMPLE: &str = r#"{
  "nPieces": 7,
  "pieceLength": 10,
  "items": [
    {"length": 7, "demand": 2},
    {"length": 5, "demand": 2},
    {"length": 3, "demand": 4}
  ]
}"#;

const BUS_SAMPLE: &str = r#"{
  "nTasks": 24,
  "shifts": [
    [11, 18], [3, 4, 11], [11, 18, 19], [11, 12, 14, 15], [11, 18, 19, 20],
    [11, 12, 19, 20], [0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 12],
    [13, 14, 15], [16, 17, 18], [19, 20, 21], [22, 23], [0, 5, 10],
    [1, 6, 13], [2, 7, 16], [8, 9, 17], [21, 23], [0, 21],
    [1, 2, 3], [22, 12, 16], [13, 17, 23], [4, 5, 6]
  ]
}"#;

const METABOLIC_SAMPLE: &str = r#"{
  "nReactions": 4,
  "stoichiometryMatrix": [
    [1, -1, 0, 0],
    [0, 1, -1, 0],
    [0, 0, 1, -1]
  ],
  "reversibleIndicators": [
    [0, 1, 1, 0]
  ]
}"#;

fn cutstock_data() -> xcspkit_core::data::CutstockData {
    match load_data(CUTSTOCK_SAMPLE, "Cutstock").unwrap() {
        xcspkit_core::data::DataRecord::Cutstock(d) => d,
        _ => unreachable!(),
    }
}

fn bus_data() -> xcspkit_core::data::BusSchedulingData {
    match load_data(BUS_SAMPLE, "BusScheduling").unwrap() {
        xcspkit_core::data::DataRecord::BusScheduling(d) => d,
        _ => unreachable!(),
    }
}

fn metabolic_data() -> xcspkit_core::data::MetabolicNetworkData {
    match load_data(METABOLIC_SAMPLE, "MetabolicNetwork").unwrap() {
        xcspkit_core::data::DataRecord::MetabolicNetwork(d) => d,
        _ => unreachable!(),
    }
}

/// Each generator at its smallest documented parameters.
pub fn smallest_documented() -> Vec<Instance> {
    vec![
        g::gen_chain_reaction(20, 20).unwrap(),
        g::gen_almost_magic(3, 30).unwrap(),
        g::gen_graceful_graph(6, 2).unwrap(),
        g::gen_heterosquare(5, g::HeterosquareVariant::Fair).unwrap(),
        g::gen_langford_bin(10).unwrap(),
        g::gen_ramsey_partition(4, 60).unwrap(),
        g::gen_efpa(5, 4, 4, 8).unwrap(),
        g::gen_low_autocorrelation(10).unwrap(),
        g::gen_coprime(8).unwrap(),
        g::gen_cutstock(&cutstock_data()).unwrap(),
        g::gen_bus_scheduling(&bus_data()).unwrap(),
        g::gen_metabolic_network(&metabolic_data()).unwrap(),
    ]
}

#[test]
fn generators_roundtrip_and_reserialize_byte_identically() {
    for inst in smallest_documented() {
        assert_eq!(
            validate_instance(&inst),
            vec![],
            "{} must validate",
            inst.name
        );
        let xml = write_xcsp3(&inst).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        let back = parse_xcsp3(&xml).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        assert_eq!(
            inst.signature(),
            back.signature(),
            "{} round-trip signature",
            inst.name
        );
        let again = write_xcsp3(&back).unwrap();
        assert_eq!(
            xml, again,
            "{} re-serialization must be byte-identical",
            inst.name
        );
    }
}

#[test]
fn generators_are_deterministic() {
    let a = smallest_documented();
    let b = smallest_documented();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.signature(), y.signature(), "{}", x.name);
    }
}

#[test]
fn random_instances_roundtrip() {
    let mut rng = oracle::Rng::new(0xF00D);
    for case in 0..60 {
        let inst = oracle::random_solver_instance(&mut rng, case % 3 == 0);
        assert_eq!(validate_instance(&inst), vec![], "case {case}");
        let xml = write_xcsp3(&inst).unwrap();
        let back = parse_xcsp3(&xml).unwrap_or_else(|e| panic!("case {case}: {e}\n{xml}"));
        assert_eq!(inst.signature(), back.signature(), "case {case}\n{xml}");
    }
}

#[test]
fn whole_catalog_roundtrips() {
    // one constraint of every kind in one instance
    let mut b = xcspkit_core::ir::InstanceBuilder::new("catalog");
    for i in 0..4 {
        b.add_var(
            format!("x[{i}]"),
            xcspkit_core::ir::Domain::range(0, 3).unwrap(),
        );
    }
    let mut rng = oracle::Rng::new(0xBEEF);
    for kind in 0..oracle::KIND_COUNT {
        let c = oracle::random_constraint(kind, &mut rng, 4);
        b.add_constraint(c);
    }
    let inst = b.build();
    assert_eq!(validate_instance(&inst), vec![]);
    let xml = write_xcsp3(&inst).unwrap();
    let back = parse_xcsp3(&xml).unwrap_or_else(|e| panic!("{e}\n{xml}"));
    assert_eq!(inst.signature(), back.signature(), "{xml}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Any byte soup yields a structured error or an instance, never a panic.
    #[test]
    fn parser_is_total(input in ".{0,400}") {
        let _ = parse_xcsp3(&input);
    }

    /// Same, but steered toward plausible-looking XML.
    #[test]
    fn parser_is_total_on_xmlish_input(
        head in "<instance format=\"XCSP3\" type=\"(CSP|COP|XYZ)\">",
        body in "(<variables>|</variables>|<var id=\"x\">|0\\.\\.3|</var>|<constraints>|<sum>|<list>x y</list>|<condition>\\(le,3\\)</condition>|</sum>|</constraints>){0,12}",
    ) {
        let _ = parse_xcsp3(&format!("{head}{body}</instance>"));
    }
}

#[test]
fn writer_is_byte_deterministic_over_canonical_equality() {
    use xcspkit_core::ir::{Constraint, Domain, InstanceBuilder, TupleEntry::Val};
    let mk = |tuples: Vec<Vec<xcspkit_core::ir::TupleEntry>>| {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 2).unwrap());
        let y = b.add_var("y", Domain::range(0, 2).unwrap());
        b.add_constraint(Constraint::Extension {
            scope: vec![x, y],
            tuples,
            positive: true,
            star_allowed: false,
        });
        b.build()
    };
    let a = mk(vec![vec![Val(0), Val(1)], vec![Val(2), Val(0)], vec![Val(1), Val(1)]]);
    let b = mk(vec![vec![Val(1), Val(1)], vec![Val(0), Val(1)], vec![Val(2), Val(0)]]);
    assert_eq!(a.signature(), b.signature());
    assert_eq!(write_xcsp3(&a).unwrap(), write_xcsp3(&b).unwrap());
}

#[test]
fn bus_sample_shape_has_one_count_per_task() {
    let inst = g::gen_bus_scheduling(&bus_data()).unwrap();
    let counts = inst.constraints.iter().filter(|c| c.kind_name() == "count").count();
    assert_eq!(counts, 24);
}
