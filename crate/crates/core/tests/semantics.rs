use proptest::prelude::*;
use ttstar_core::kernel::{Match, Rhs};
use ttstar_core::semantics::{
    builtin_exists, builtin_forall, congruent, evaluate, match_satisfied, Assignment, EvalResult, Model, Value,
};
use ttstar_core::signature::Signature;
use ttstar_core::substitution::substitute;
use ttstar_core::syntax::{Builtin, Constant, Construction, Variable};
use ttstar_core::types::{check, order_of_type, Ty};

const TOP: u64 = 3;

fn nu_var(i: usize) -> Variable {
    Variable::new(["n", "m", "k"][i], Ty::NU)
}

fn lam(v: Variable, body: Construction) -> Construction {
    Construction::Lambda(vec![v], Box::new(body))
}

fn nu() -> impl Strategy<Value = Construction> {
    let leaf = prop_oneof![
        (0..=TOP + 1).prop_map(Construction::nat),
        (0..2usize).prop_map(|i| Construction::Variable(nu_var(i))),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Construction::app(Builtin::Div, vec![a, b])),
            (0..3usize, inner.clone(), inner).prop_map(|(i, b, a)| Construction::app(lam(nu_var(i), b), vec![a])),
        ]
    })
}

fn truth() -> impl Strategy<Value = Construction> {
    let leaf = prop_oneof![
        Just(Construction::from(Builtin::True)),
        Just(Construction::from(Builtin::False)),
        nu().prop_map(|a| Construction::app(Builtin::Odd, vec![a])),
        (nu(), nu()).prop_map(|(a, b)| Construction::app(Builtin::Eq(Some(Ty::NU)), vec![a, b])),
    ];
    leaf.prop_recursive(2, 12, 1, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Construction::app(Builtin::Not, vec![a])),
            (0..3usize, inner.clone())
                .prop_map(|(i, b)| Construction::app(Builtin::Exists(Some(Ty::NU)), vec![lam(nu_var(i), b)])),
            (0..3usize, inner)
                .prop_map(|(i, b)| Construction::app(Builtin::Forall(Some(Ty::NU)), vec![lam(nu_var(i), b)])),
        ]
    })
}

fn assignment() -> impl Strategy<Value = Assignment> {
    (0..=TOP, 0..=TOP).prop_map(|(a, b)| {
        let mut v = Assignment::new();
        v.set(nu_var(0), Value::Nat(a));
        v.set(nu_var(1), Value::Nat(b));
        v
    })
}

fn ev(c: &Construction, v: &Assignment) -> EvalResult {
    evaluate(c, &Model::arith(TOP), v).expect("evaluation within limits")
}

fn ty() -> impl Strategy<Value = Ty> {
    let leaf = prop_oneof![
        Just(Ty::IOTA),
        Just(Ty::O),
        Just(Ty::NU),
        Just(Ty::OMEGA),
        (1..4u32).prop_map(Ty::Constr)
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        (prop::collection::vec(inner.clone(), 1..3), inner).prop_map(|(args, r)| Ty::fun(args, r))
    })
}

proptest! {
    #[test]
    fn application_is_strict(a in nu(), b in nu(), v in assignment()) {
        let a_bad = !ev(&a, &v).is_proper();
        let either_bad = a_bad || !ev(&b, &v).is_proper();
        let div = Construction::app(Builtin::Div, vec![a.clone(), b.clone()]);
        let eq = Construction::app(Builtin::Eq(Some(Ty::NU)), vec![a.clone(), b]);
        let konst = Construction::app(lam(nu_var(2), Construction::nat(0)), vec![a.clone()]);
        let odd = Construction::app(Builtin::Odd, vec![a]);
        for (c, bad) in [(div, either_bad), (eq, either_bad), (konst, a_bad), (odd, a_bad)] {
            if bad {
                prop_assert!(!ev(&c, &v).is_proper(), "{}", c);
            }
        }
    }

    #[test]
    fn matches_are_definite(c in truth(), v in assignment()) {
        let m = Model::arith(TOP);
        let r = ev(&c, &v);
        prop_assert_eq!(match_satisfied(&Match::empty(c.clone()), &m, &v).unwrap(), !r.is_proper());
        let t = Match::new(c.clone(), Rhs::Const(Constant::Builtin(Builtin::True)));
        prop_assert_eq!(match_satisfied(&t, &m, &v).unwrap(), r == EvalResult::Proper(Value::T));
    }

    #[test]
    fn compensation(d in nu(), i in 0..2usize, c in truth(), v in assignment()) {
        let x = nu_var(i);
        let sub = substitute(&d, &x, &c);
        prop_assert_eq!(&sub, &substitute(&d, &x, &c));
        if let EvalResult::Proper(val) = ev(&d, &v) {
            prop_assert_eq!(ev(&sub, &v), ev(&c, &v.with(x, val)));
        }
    }

    #[test]
    fn execution_undoes_acquisition(c in truth(), v in assignment()) {
        let wrapped = Construction::app(Builtin::Exec(Some(Ty::O)), vec![Construction::acq(c.clone())]);
        let mut m = Model::arith(TOP);
        m.add_constructions([&c]);
        prop_assert!(congruent(&c, &wrapped, &m, &v).unwrap());
    }

    #[test]
    fn function_order_dominates_components(args in prop::collection::vec(ty(), 1..3), r in ty()) {
        let f = Ty::fun(args.clone(), r.clone());
        prop_assert!(args.iter().chain([&r]).all(|t| order_of_type(&f) >= order_of_type(t)));
    }

    #[test]
    fn constructions_are_cumulative(c in truth(), k in 1..3u32) {
        let sig = Signature::standard();
        let a = Construction::acq(c);
        if check(&a, &Ty::Constr(k), &sig).is_ok() {
            prop_assert!(check(&a, &Ty::Constr(k + 1), &sig).is_ok());
        }
    }
}

#[test]
fn quantifiers_are_total_over_partial_tables() {
    let m = Model::arith(2);
    let pred = Ty::fun(vec![Ty::NU], Ty::O);
    let tables = m.domain(&pred).unwrap();
    assert_eq!(tables.len(), 27);
    for f in &tables {
        let Value::Table(t) = f else { panic!("{f:?}") };
        let vals: Vec<Option<&Value>> = (0..=2).map(|k| t.get(&[Value::Nat(k)])).collect();
        assert_eq!(builtin_exists(f, &m).unwrap(), vals.contains(&Some(&Value::T)));
        assert_eq!(
            builtin_forall(f, &m).unwrap(),
            vals.iter().all(|x| *x == Some(&Value::T))
        );
    }
}
