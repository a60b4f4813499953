//! Agreement between the production checker and the definition-level
//! evaluator on random (constraint, assignment) pairs for every catalog
//! kind. The full-volume version runs in the acceptance suite; this one
//! keeps the per-kind sample smaller for quick feedback.

use xcspkit_core::checker::constraint_satisfied;
use xcspkit_core::ir::Assignment;
use xcspkit_oracle as oracle;

#[test]
fn every_kind_agrees_with_the_definitions() {
    let nvars = 4;
    for kind in 0..oracle::KIND_COUNT {
        let mut rng = oracle::Rng::new(0xC0FFEE ^ kind as u64);
        for case in 0..200 {
            let c = oracle::random_constraint(kind, &mut rng, nvars);
            let a = oracle::random_assignment(&mut rng, nvars);
            let got = constraint_satisfied(&c, &Assignment(a.clone())).unwrap();
            let want = oracle::definition_satisfied(&c, &a);
            assert_eq!(
                got, want,
                "kind {} case {case}: checker {got} vs definition {want}\nconstraint: {c:?}\nassignment: {a:?}",
                oracle::KIND_NAMES[kind]
            );
        }
    }
}

#[test]
fn expression_semantics_agree_between_routes() {
    let mut rng = oracle::Rng::new(0xABCD);
    for _ in 0..500 {
        let e = oracle::random_expr(&mut rng, 4, 4);
        let a = oracle::random_assignment(&mut rng, 4);
        let ours = xcspkit_core::ir::eval_expr(&e, a.as_slice());
        let theirs = oracle::eval_i128(&e, &a);
        match (ours, theirs) {
            (Ok(x), Some(y)) => assert_eq!(x as i128, y, "{e:?} under {a:?}"),
            // the i64 route can overflow where i128 does not; that is the
            // only sanctioned divergence
            (Err(xcspkit_core::ir::EvalError::Overflow), Some(_)) => {}
            (Err(_), None) => {}
            (got, want) => panic!("{e:?} under {a:?}: {got:?} vs {want:?}"),
        }
    }
}
