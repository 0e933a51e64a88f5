//! Finite models and the evaluation function.

mod eval;
mod model;
mod value;

pub use eval::{
    builtin_exists, builtin_forall, congruent, evaluate, match_satisfied, EvalError, Evaluator, DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_STEPS,
};
pub use model::{Frame, Model, ModelError, DEFAULT_MAX_TABLES, DEFAULT_NU_MAX};
pub use value::{Assignment, Closure, EvalResult, Table, Value};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;
    use crate::substitution::sub_form_raw;
    use crate::syntax::{parse, Builtin, Construction, Name};
    use crate::types::{elaborate, Ty};
    use alloc::vec;

    fn ev(src: &str, m: &Model, v: &Assignment) -> EvalResult {
        let c = elaborate(&parse(src, m.signature()).unwrap(), m.signature(), None).unwrap();
        evaluate(&c, m, v).unwrap()
    }

    fn nat(n: u64) -> EvalResult {
        EvalResult::Proper(Value::Nat(n))
    }

    #[test]
    fn division_by_zero_is_improper() {
        let m = Model::arith(7);
        let v = Assignment::new();
        assert_eq!(ev("÷(3,0)", &m, &v), EvalResult::Improper);
        assert_eq!(ev("÷(3,1)", &m, &v), nat(3));
        assert_eq!(ev("Odd(÷(3,0))", &m, &v), EvalResult::Improper);
        assert_eq!(ev("9", &m, &v), EvalResult::Improper);
        let acq = ev("⌈÷(3,0)⌉", &m, &v);
        assert_eq!(
            acq,
            EvalResult::Proper(Value::Construction(parse("÷(3,0)", m.signature()).unwrap()))
        );
    }

    #[test]
    fn quantifiers_over_numbers() {
        let m = Model::arith(3);
        let v = Assignment::new();
        assert!(ev("∃(λn.Odd(÷(3,n)))", &m, &v).is_true());
        assert!(!ev("∀(λn.Odd(÷(3,n)))", &m, &v).is_true());
        assert!(ev("∀(λn.=(n,n))", &m, &v).is_true());
        assert!(ev("¬(∃(λn.=(÷(n,0),n)))", &m, &v).is_true());
    }

    #[test]
    fn quantifiers_on_partial_tables() {
        let m = Model::arith(1);
        let set = |entries: &[(u64, bool)]| {
            let mut t = Table::empty(vec![Ty::NU], Ty::O);
            for (k, b) in entries {
                t.entries.insert(vec![Value::Nat(*k)], Value::Truth(*b));
            }
            Value::Table(t)
        };
        assert!(builtin_exists(&set(&[(0, false), (1, true)]), &m).unwrap());
        assert!(!builtin_exists(&set(&[]), &m).unwrap());
        assert!(!builtin_exists(&set(&[(0, false), (1, false)]), &m).unwrap());
        assert!(builtin_forall(&set(&[(0, true), (1, true)]), &m).unwrap());
        assert!(!builtin_forall(&set(&[(1, true)]), &m).unwrap());
        assert!(!builtin_forall(&set(&[(0, true), (1, false)]), &m).unwrap());
        assert!(!builtin_forall(&set(&[]), &m).unwrap());
    }

    #[test]
    fn execution_undoes_acquisition() {
        let m = Model::arith(7);
        for (src, n) in [("÷(3,0)", None), ("÷(6,n)", Some(2)), ("Odd(n)", Some(3))] {
            let v: Assignment = n
                .map(|k| (m.signature().variable(&Name::from("n")).unwrap(), Value::Nat(k)))
                .into_iter()
                .collect();
            let c = parse(src, m.signature()).unwrap();
            let ty = crate::types::synth(&c, m.signature()).unwrap();
            let ex = Construction::app(Builtin::Exec(Some(ty)), vec![Construction::acq(c.clone())]);
            assert!(congruent(&c, &ex, &m, &v).unwrap(), "{src}");
        }
    }

    #[test]
    fn improp_holds_only_for_constructions_improper_everywhere() {
        let m = Model::arith(7);
        let v = Assignment::new();
        assert!(ev("Improp(⌈÷(3,0)⌉)", &m, &v).is_true());
        assert_eq!(ev("Improp(⌈÷(3,n)⌉)", &m, &v), EvalResult::Proper(Value::F));
        assert!(ev("Improp(Sub¹(⌈(0)⌉,⌈n⌉,⌈÷(3,n)⌉))", &m, &v).is_true());
    }

    #[test]
    fn trivialization_names_values() {
        let m = Model::arith(7);
        let v = Assignment::new();
        let r = ev("⌈(÷(6,2))⌉", &m, &v);
        assert_eq!(r, EvalResult::Proper(Value::Construction(Construction::nat(3))));
        assert_eq!(ev("⌈(÷(6,0))⌉", &m, &v), EvalResult::Improper);
    }

    #[test]
    fn hyperintensional_sub_forms() {
        let mut m = Model::arith(7);
        let s: Signature = m.signature().clone();
        let premiss = parse("Improp(⌈÷(3,0)⌉)", &s).unwrap();
        let n = s.variable(&Name::from("n")).unwrap();
        let c1 = s.variable(&Name::from("c¹")).unwrap();
        let good = sub_form_raw(
            &parse("⌈÷(3,0)⌉", &s).unwrap(),
            &c1,
            &parse("Improp(c¹)", &s).unwrap(),
            Ty::O,
            &s,
        )
        .unwrap();
        let bad = sub_form_raw(
            &Construction::nat(0),
            &n,
            &parse("Improp(⌈÷(3,n)⌉)", &s).unwrap(),
            Ty::O,
            &s,
        )
        .unwrap();
        m.add_constructions([&premiss, &good, &bad]);
        let v = Assignment::new();
        assert!(congruent(&premiss, &good, &m, &v).unwrap());
        assert!(!congruent(&premiss, &bad, &m, &v).unwrap());
    }

    #[test]
    fn modal_sub_forms() {
        let m = Model::intension();
        let s = m.signature().clone();
        let x = s.variable(&Name::from("x")).unwrap();
        let w = s.variable(&Name::from("w")).unwrap();
        let target = parse("∀(λw'.K(w')(x))", &s).unwrap();
        let de_re = parse("∀(λw'.K(w')(D(w)))", &s).unwrap();
        let de_dicto = parse("∀(λw'.K(w')(D(w')))", &s).unwrap();
        let sub_re = sub_form_raw(&parse("D(w)", &s).unwrap(), &x, &target, Ty::O, &s).unwrap();
        let sub_dicto = sub_form_raw(&parse("D(w')", &s).unwrap(), &x, &target, Ty::O, &s).unwrap();
        let wp = s.variable(&Name::from("w'")).unwrap();
        let mut disagreements = 0;
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let v: Assignment = [(w.clone(), Value::World(a)), (wp.clone(), Value::World(b))]
                .into_iter()
                .collect();
            assert!(congruent(&de_re, &sub_re, &m, &v).unwrap());
            if !congruent(&de_dicto, &sub_dicto, &m, &v).unwrap() {
                disagreements += 1;
            }
        }
        assert!(disagreements > 0);
        assert!(!evaluate(&de_dicto, &m, &Assignment::new()).unwrap().is_true());
    }

    #[test]
    fn closures_compare_extensionally() {
        let mut m = Model::arith(3);
        let s = m.signature().clone();
        let c = parse("⌈÷(3,0)⌉", &s).unwrap();
        m.add_constructions([&c]);
        let a = parse("λc¹.Improp(c¹)", &s).unwrap();
        let b = parse("λc¹.Improp(c¹)", &s).unwrap();
        let v = Assignment::new();
        assert!(congruent(&a, &b, &m, &v).unwrap());
        let e = parse("∃(λc¹.Improp(c¹))", &s).unwrap();
        assert!(evaluate(&e, &m, &v).unwrap().is_true());
    }
}
