//! Constructions, their concrete syntax, and variable bookkeeping.
//!
//! The parser resolves identifiers in this order: λ-bound names in scope,
//! builtin spellings, signature constants, signature variables. Anything else
//! is an [`ParseError::UnknownConstant`].

mod ast;
mod lexer;
mod parser;
mod print;

pub use ast::{Builtin, Constant, Construction, Name, Status, VarOccurrence, Variable};
pub use lexer::Tok;
pub use parser::{
    base_by_name, builtin_by_name, is_reserved_name, parse, parse_type, parse_with, ParseError, ParseOptions, Parser,
};
pub use print::TyAtom;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;
    use crate::types::Ty;
    use alloc::string::ToString;
    use alloc::vec;

    fn sig() -> Signature {
        let mut s = Signature::standard();
        s.declare_constant("P", Ty::fun(vec![Ty::IOTA], Ty::O)).unwrap();
        s.declare_constant("a", Ty::IOTA).unwrap();
        s
    }

    #[test]
    fn alpha_equivalence() {
        let s = sig();
        let p = |t: &str| parse(t, &s).unwrap();
        assert!(p("λx:i.P(x)").alpha_eq(&p("λy:i.P(y)")));
        assert!(p("⌈∀(λx:i.P(x))⌉").alpha_eq(&p("⌈∀(λy:i.P(y))⌉")));
        assert!(!p("λx:i.P(x)").alpha_eq(&p("λy:i.P(x)")));
        assert!(!p("λx:i.λy:i.P(x)").alpha_eq(&p("λy:i.λx:i.P(x)")));
        assert!(!p("λn:nu.n").alpha_eq(&p("λx:i.x")));
        assert!(p("P(x)").alpha_eq(&p("P(x)")) && !p("P(x)").alpha_eq(&p("P(y)")));
    }

    #[test]
    fn parses_and_prints_core_forms() {
        let s = sig();
        for (src, printed) in [
            ("÷(3,0)", "÷(3,0)"),
            ("3 ÷ n", "÷(3,n)"),
            ("⌈÷(3,0)⌉", "⌈÷(3,0)⌉"),
            ("λ x . P(x)", "λx:i.P(x)"),
            ("[λn:nu. ÷(3,n)](0)", "[λn:nu.÷(3,n)](0)"),
            ("∃(λx.P(x))", "∃(λx:i.P(x))"),
            ("Sub¹(⌈(0)⌉, ⌈n⌉, ⌈÷(3,n)⌉)", "Sub¹(⌈(0)⌉,⌈n⌉,⌈÷(3,n)⌉)"),
            ("⌊⌊c¹⌋⌋_o", "⌊⌊c¹⌋⌋_o"),
            ("exec_o(c¹)", "⌊⌊c¹⌋⌋_o"),
            ("'[P(a)]'", "⌈P(a)⌉"),
            ("acq[P(a)]", "⌈P(a)⌉"),
            ("triv(a)", "⌈(a)⌉"),
            ("=^nu(n, 3)", "=^nu(n,3)"),
            ("not(T)", "¬(T)"),
        ] {
            let c = parse(src, &s).unwrap_or_else(|e| panic!("{src}: {e}"));
            assert_eq!(c.to_string(), printed, "{src}");
            assert_eq!(parse(printed, &s).unwrap(), c);
        }
    }

    #[test]
    fn lambda_binders_shadow_signature_names() {
        let s = sig();
        let c = parse("λx:nu.÷(x,x)", &s).unwrap();
        let Construction::Lambda(bs, body) = &c else { panic!() };
        assert_eq!(bs[0].ty, Ty::NU);
        assert!(body.free_vars().contains(&bs[0]));
    }

    #[test]
    fn reserved_and_unknown_names() {
        let s = sig();
        assert!(matches!(parse("λz0:i.P(z0)", &s), Err(ParseError::Reserved { .. })));
        let opts = ParseOptions { allow_reserved: true };
        assert!(parse_with("λz0:i.P(z0)", &s, opts).is_ok());
        assert!(matches!(parse("Q(a)", &s), Err(ParseError::UnknownConstant { .. })));
    }

    #[test]
    fn free_and_bound_occurrences() {
        let s = sig();
        let c = parse("λy:i.=(x,y)", &s).unwrap();
        let fv = c.free_vars();
        assert_eq!(fv.len(), 1);
        assert_eq!(fv.iter().next().unwrap().name.as_str(), "x");
        let acq = parse("⌈P(x)⌉", &s).unwrap();
        assert!(acq.free_vars().is_empty());
        assert_eq!(acq.occurrences()[0].status, Status::Bound);
        assert!(acq.mentions(&Variable::new("x", Ty::IOTA)));
    }

    #[test]
    fn types_round_trip() {
        for src in ["o", "(i)->o", "(omega)->((i)->o)", "*2", "(nu,nu)->nu"] {
            let t = parse_type(src).unwrap();
            assert_eq!(parse_type(&t.to_string()).unwrap(), t);
        }
        assert_eq!(parse_type("ν↦o").unwrap(), Ty::fun(vec![Ty::NU], Ty::O));
        assert_eq!(parse_type("⟨ι⟩↦o").unwrap(), Ty::fun(vec![Ty::IOTA], Ty::O));
    }
}
