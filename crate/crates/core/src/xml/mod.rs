//! Bit-exact serialization of instances to the XCSP3-core XML subset and
//! parsing of that subset back. The writer emits a canonical form (2-space
//! indentation, sorted domain ranges, sorted tuple tables, no grouping), so
//! signature-equal instances serialize to identical bytes.

mod expr_text;
mod parse;
mod write;

pub use expr_text::{parse_expr_text, render_expr};
pub use parse::{parse_xcsp3, ParseError};
pub use write::{write_xcsp3, WriteError};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::ir::*;

    fn golden_tiny() -> Instance {
        let mut b = InstanceBuilder::new("tiny");
        let x = b.add_var("x", Domain::range(0, 2).unwrap());
        b.add_constraint(Constraint::Intension(Expr::ne(Expr::var(x), Expr::cst(1))));
        b.build()
    }

    #[test]
    fn golden_intension_document() {
        let xml = write_xcsp3(&golden_tiny()).unwrap();
        let expected = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
<instance format=\"XCSP3\" type=\"CSP\">\n\
\x20\x20<variables>\n\
\x20\x20\x20\x20<var id=\"x\">0..2</var>\n\
\x20\x20</variables>\n\
\x20\x20<constraints>\n\
\x20\x20\x20\x20<intension>ne(x,1)</intension>\n\
\x20\x20</constraints>\n\
</instance>\n";
        assert_eq!(xml, expected);
        assert!(xml.contains("<intension>ne(x,1)</intension>"));
    }

    #[test]
    fn empty_constraints_collapse() {
        let mut b = InstanceBuilder::new("t");
        b.add_var("x", Domain::range(0, 1).unwrap());
        let xml = write_xcsp3(&b.build()).unwrap();
        assert!(xml.contains("<constraints/>"));
    }

    #[test]
    fn cop_instances_carry_an_objective_node() {
        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 5).unwrap());
        b.set_objective(Sense::Minimize, ObjectiveExpr::Var(x));
        let xml = write_xcsp3(&b.build()).unwrap();
        assert!(xml.contains("type=\"COP\""));
        assert!(xml.contains("<minimize>x</minimize>"));

        let mut b = InstanceBuilder::new("t");
        let x = b.add_var("x", Domain::range(0, 5).unwrap());
        b.set_objective(Sense::Maximize, ObjectiveExpr::Var(x));
        assert!(write_xcsp3(&b.build())
            .unwrap()
            .contains("<maximize>x</maximize>"));
    }

    #[test]
    fn roundtrip_preserves_signature() {
        let inst = generators::gen_coprime(4).unwrap();
        let xml = write_xcsp3(&inst).unwrap();
        let back = parse_xcsp3(&xml).unwrap();
        assert_eq!(inst.signature(), back.signature());
        assert_eq!(write_xcsp3(&back).unwrap(), xml);
    }

    #[test]
    fn malformed_xml_is_a_parse_error() {
        let e = parse_xcsp3("<instance format=\"XCSP3\" type=\"CSP\"><variables>").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }));
    }

    #[test]
    fn float_domain_is_unsupported() {
        let text = "<instance format=\"XCSP3\" type=\"CSP\">\n\
  <variables>\n    <var id=\"x\">0.5 1.5</var>\n  </variables>\n\
  <constraints/>\n</instance>\n";
        let e = parse_xcsp3(text).unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { .. }), "{e:?}");
    }

    #[test]
    fn groups_are_unsupported() {
        let text = "<instance format=\"XCSP3\" type=\"CSP\">\n\
  <variables>\n    <var id=\"x\">0..1</var>\n  </variables>\n\
  <constraints>\n    <group><intension>ne(x,1)</intension></group>\n  </constraints>\n\
</instance>\n";
        let e = parse_xcsp3(text).unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { what, .. } if what.contains("group")));
    }
}
