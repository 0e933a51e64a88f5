use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::signature::Signature;
use crate::syntax::parse_type;

fn sig() -> Signature {
    let mut s = Signature::standard();
    for (n, t) in [
        ("a", "i"),
        ("b", "i"),
        ("P", "(i)->o"),
        ("K", "(i)->o"),
        ("G", "(omega)->i"),
    ] {
        s.declare_constant(n, parse_type(t).unwrap()).unwrap();
    }
    for (n, t) in [("d", "i"), ("f", "(i)->o"), ("g", "(i)->o")] {
        s.declare_variable(n, parse_type(t).unwrap()).unwrap();
    }
    s
}

fn node(rule: Rule, src: &str, premises: Vec<Derivation>) -> Derivation {
    let s = sig();
    let seq = parse_sequent(src, &s).unwrap_or_else(|e| panic!("{src}: {e}"));
    Derivation::new(rule, premises, seq)
}

fn leaf(rule: Rule, src: &str) -> Derivation {
    node(rule, src, vec![])
}

const S: &str = "⌊⌊Sub(⌈a⌉,⌈x⌉,⌈P(x)⌉)⌋⌋_o";

fn eg_tree(s: &str, d: &str, c: &str) -> Derivation {
    let one = leaf(Rule::Ax, &alloc::format!("{s}:T --> {s}:T"));
    let two = node(Rule::Wr, &alloc::format!("{s}:T, {d}:d --> {s}:T"), vec![one.clone()]);
    let three = node(
        Rule::Wr,
        &alloc::format!("{s}:T, {d}:d --> {d}:d"),
        vec![leaf(Rule::Ax, &alloc::format!("{d}:d --> {d}:d"))],
    );
    let four = node(
        Rule::BetaExp,
        &alloc::format!("{s}:T, {d}:d --> [λx.{c}]({d}):T"),
        vec![two, three],
    );
    let five = node(
        Rule::ExistsI,
        &alloc::format!("{s}:T, {d}:d --> ∃(λx.{c}):T"),
        vec![four],
    );
    node(
        Rule::ExecInst,
        &alloc::format!("{s}:T --> ∃(λx.{c}):T"),
        vec![one, five],
    )
}

#[test]
fn eg_tree_checks() {
    let r = check_derivation(&eg_tree(S, "a", "P(x)"), &sig()).unwrap();
    assert_eq!(r.uses(Rule::ExecInst), 1);
    assert_eq!(r.uses(Rule::BetaExp), 1);
    assert_eq!(r.nodes, 8);
}

#[test]
fn eg_tree_with_world_dependent_replacement() {
    let s = "⌊⌊Sub(⌈G(w)⌉,⌈x⌉,⌈P(x)⌉)⌋⌋_o";
    check_derivation(&eg_tree(s, "G(w)", "P(x)"), &sig()).unwrap();
}

#[test]
fn eg_as_one_step() {
    check_derivation(&leaf(Rule::Eg, &alloc::format!("{S}:T --> ∃(λx.P(x)):T")), &sig()).unwrap();
    let one = leaf(Rule::Ax, &alloc::format!("{S}:T --> {S}:T"));
    check_derivation(
        &node(Rule::Eg, &alloc::format!("{S}:T --> ∃(λx.P(x)):T"), vec![one]),
        &sig(),
    )
    .unwrap();
}

#[test]
fn eg_rejects_non_strict_position() {
    let s = "⌊⌊Sub(⌈a⌉,⌈x⌉,⌈¬(∃(λy.=(x,x)))⌉)⌋⌋_o";
    let e = check_derivation(
        &leaf(Rule::Eg, &alloc::format!("{s}:T --> ∃(λx.¬(∃(λy.=(x,x)))):T")),
        &sig(),
    )
    .unwrap_err();
    assert!(matches!(e.error, RuleError::SideCondition(_)), "{e}");
}

#[test]
fn beta_exp_rejects_wrong_substitution() {
    let s = "⌊⌊Sub(⌈b⌉,⌈x⌉,⌈P(x)⌉)⌋⌋_o";
    let p1 = leaf(Rule::Ax, &alloc::format!("{s}:T, a:d --> {s}:T"));
    let p2 = leaf(Rule::Ax, &alloc::format!("{s}:T, a:d --> a:d"));
    let d = node(
        Rule::BetaExp,
        &alloc::format!("{s}:T, a:d --> [λx.P(x)](a):T"),
        vec![p1, p2],
    );
    assert!(check_derivation(&d, &sig()).is_err());
}

fn eta_proof_one() -> Derivation {
    let s = "⌊⌊Sub(⌈b⌉,⌈x⌉,⌈K(x)⌉)⌋⌋_o";
    let one = leaf(Rule::Ax, &alloc::format!("{s}:T, K:f, b:x --> {s}:T"));
    let two = leaf(Rule::Ax, &alloc::format!("{s}:T, K:f, b:x --> b:x"));
    let beta = node(
        Rule::BetaExp,
        &alloc::format!("{s}:T, K:f, b:x --> [λx.K(x)](b):T"),
        vec![one, two],
    );
    let def = node(Rule::DefOfSub, "K(b):T, K:f, b:x --> [λx.K(x)](b):T", vec![beta]);
    let three = node(Rule::ExistsI, "K(b):T, K:f, b:x --> ∃(λx.K(x)):T", vec![def]);
    let four = leaf(Rule::Ax, "K(b):T --> K(b):T");
    node(Rule::AppInst, "K(b):T --> ∃(λx.K(x)):T", vec![three, four])
}

fn eta_proof_two(with_eta: bool) -> Derivation {
    let mut one = leaf(Rule::Ax, "K:f, λx.K(x):f --> λx.K(x):f").labelled("1");
    let s = sig();
    one.written = Some(vec![
        parse_match("K:f", &s).unwrap(),
        parse_match("λx.K(x):f", &s).unwrap(),
    ]);
    let mut two = leaf(Rule::Ax, "λx.K(x):f, K:f --> K:f").labelled("2");
    two.written = Some(vec![
        parse_match("λx.K(x):f", &s).unwrap(),
        parse_match("K:f", &s).unwrap(),
    ]);
    let three = if with_eta {
        node(Rule::EtaCon, "K:f, λx.K(x):f --> K:f", vec![one.clone(), two]).labelled("3")
    } else {
        two
    };
    let rt = node(
        Rule::Rt,
        "K:f, λx.K(x):f, ⌊⌊Sub(⌈K⌉,⌈f⌉,⌈f(b)⌉)⌋⌋_o:T --> ⌊⌊Sub(⌈λx.K(x)⌉,⌈f⌉,⌈f(b)⌉)⌋⌋_o:T",
        vec![one, three],
    );
    let def = node(Rule::DefOfSub, "K:f, λx.K(x):f, K(b):T --> [λx.K(x)](b):T", vec![rt]);
    let four = node(Rule::Wr, "K:f, λx.K(x):f, K(b):T, b:x --> [λx.K(x)](b):T", vec![def]);
    let five = leaf(Rule::Ax, "λx.K(x):f, K(b):T --> K(b):T");
    let inst = node(Rule::AppInst, "λx.K(x):f, K(b):T --> [λx.K(x)](b):T", vec![four, five]);
    let lam = node(Rule::LambdaInst, "K(b):T --> [λx.K(x)](b):T", vec![inst]);
    node(Rule::ExistsI, "K(b):T --> ∃(λx.K(x)):T", vec![lam])
}

#[test]
fn exists_i_eta_first_proof() {
    let r = check_derivation(&eta_proof_one(), &sig()).unwrap();
    assert_eq!(r.conclusion.to_string(), "K(b):T --> ∃^i(λx:i.K(x)):T");
}

#[test]
fn exists_i_eta_second_proof_collapses() {
    let r = check_derivation(&eta_proof_two(true), &sig()).unwrap();
    assert_eq!(r.uses(Rule::EtaCon), 1);
    assert!(r.redundant.iter().any(|n| n.label.as_deref() == Some("3")));
    assert!(r
        .set_collapses
        .iter()
        .any(|(a, b)| a.label.as_deref() == Some("1") && b.label.as_deref() == Some("2")));
    let without = check_derivation(&eta_proof_two(false), &sig()).unwrap();
    assert_eq!(without.uses(Rule::EtaCon), 0);
    assert_eq!(without.conclusion, r.conclusion);
}

#[test]
fn exists_i_eta_as_one_step() {
    check_derivation(&leaf(Rule::ExistsIEta, "K(b):T --> ∃(λx.K(x)):T"), &sig()).unwrap();
}

#[test]
fn app_inst_needs_fresh_variables() {
    let three = leaf(Rule::Ax, "K(b):T, K:f, b:x, P(x):T --> P(x):T");
    let four = leaf(Rule::Ax, "K(b):T, P(x):T --> K(b):T");
    let d = node(Rule::AppInst, "K(b):T, P(x):T --> P(x):T", vec![three, four]);
    let e = check_derivation(&d, &sig()).unwrap_err();
    assert!(matches!(e.error, RuleError::NotFresh { .. }), "{e}");
}

#[test]
fn exec_round_trip() {
    let s = sig();
    let p = parse_sequent("P(a):T --> P(a):T", &s).unwrap().elaborate(&s).unwrap();
    let up = acq_exec_rules(Direction::Intro, &p, &s).unwrap();
    assert_eq!(up.goal.to_string(), "⌊⌊⌈P(a)⌉⌋⌋_o:T");
    assert_eq!(acq_exec_rules(Direction::Elim, &up, &s).unwrap(), p);
    let d = node(
        Rule::ExecIntro,
        "P(a):T --> ⌊⌊⌈P(a)⌉⌋⌋_o:T",
        vec![leaf(Rule::Ax, "P(a):T --> P(a):T")],
    );
    check_derivation(&d, &s).unwrap();
}

#[test]
fn instantiation_is_checked() {
    let mut d = leaf(Rule::Eg, &alloc::format!("{S}:T --> ∃(λx.P(x)):T"));
    d.inst.insert("D".into(), crate::syntax::Construction::constant("b"));
    assert!(matches!(
        check_derivation(&d, &sig()).unwrap_err().error,
        RuleError::Instantiation { .. }
    ));
}

#[test]
fn rule_names_round_trip() {
    for r in Rule::ALL {
        assert_eq!(Rule::from_name(r.name()), Some(r));
    }
    assert_eq!(Rule::from_name("beta-EXP"), Some(Rule::BetaExp));
}

#[test]
fn accepted_proofs_are_oracle_valid() {
    use crate::oracle::{derivation_sweep, EnumerationBudget, ModelFamily};
    let s = sig();
    let fam = ModelFamily::new(s.clone(), EnumerationBudget::default());
    for d in [
        eg_tree(S, "a", "P(x)"),
        eta_proof_one(),
        eta_proof_two(true),
        eta_proof_two(false),
    ] {
        check_derivation(&d, &s).unwrap();
        let d = elaborate_derivation(&d, &s).unwrap();
        let (verdicts, _) = derivation_sweep(&d, &fam).unwrap();
        for v in verdicts {
            assert_eq!(v.counterexample, None, "{} {}", v.node, v.rule);
        }
    }
}
