//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ttstar --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ttstar::corpus::{self, Expect, Item, Kind};
use ttstar::gen;
use ttstar_core::kernel::{check_derivation, parse_sequent, Rule};
use ttstar_core::oracle::{
    compensation_sweep, find_fact1_countermodel, theorem1_check, EnumerationBudget, ModelFamily,
};
use ttstar_core::semantics::{evaluate, Assignment, Frame, Model};
use ttstar_core::signature::Signature;
use ttstar_core::substitution::substitute;
use ttstar_core::syntax::{parse, Builtin, Construction, Variable};
use ttstar_core::types::{elaborate, Ty};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(
        t < limit,
        format!("took {:.2} s, limit {} s", t.as_secs_f64(), limit.as_secs()),
    )
}

fn items(pred: impl Fn(&Item) -> bool) -> Vec<Item> {
    corpus::index()
        .expect("shipped index")
        .into_iter()
        .filter(pred)
        .collect()
}

fn run_all(items: &[Item]) -> Result<(), String> {
    let failed: Vec<String> = corpus::run(items, &EnumerationBudget::default())
        .into_iter()
        .filter(|o| !o.pass)
        .map(|o| o.to_string())
        .collect();
    ensure(failed.is_empty(), failed.join("; "))
}

fn eg() -> Verdict {
    let start = Instant::now();
    for (file, d) in [("eg.proof", "a"), ("eg-k1.proof", "G(w)")] {
        let s = corpus::script(file).map_err(|e| e.to_string())?;
        let r = check_derivation(&s.derivation, &s.sig).map_err(|e| format!("{file}: {e}"))?;
        let want = format!("Q(b):T, ⌊⌊Sub(⌈{d}⌉,⌈x⌉,⌈P(x)⌉)⌋⌋_o:T --> ∃(λx.P(x)):T");
        let want = parse_sequent(&want, &s.sig).map_err(|e| e.to_string())?;
        let want = want.elaborate(&s.sig).map_err(|e| e.to_string())?;
        ensure(
            r.conclusion == want,
            format!("{file} proved {}, not {want}", r.conclusion),
        )?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(String::from("k=0 and k=1 end sequents reproduced"))
}

fn exists_i_eta() -> Verdict {
    let start = Instant::now();
    let check = |f: &str| {
        let s = corpus::script(f).map_err(|e| e.to_string())?;
        check_derivation(&s.derivation, &s.sig).map_err(|e| format!("{f}: {e}"))
    };
    let one = check("exists-i-eta-1.proof")?;
    let two = check("exists-i-eta-2.proof")?;
    let bare = check("exists-i-eta-2-no-eta.proof")?;
    ensure(
        two.set_collapses.iter().any(|(a, b)| {
            let l = |n: &ttstar_core::kernel::NodeRef| n.label.clone().unwrap_or_default();
            matches!((l(a).as_str(), l(b).as_str()), ("1", "2") | ("2", "1"))
        }),
        "sequents 1 and 2 not reported as a set collapse",
    )?;
    ensure(
        two.uses(Rule::EtaCon) == 1 && bare.uses(Rule::EtaCon) == 0,
        "η-CON counts",
    )?;
    ensure(
        bare.conclusion == two.conclusion,
        "the variant without η-CON proves something else",
    )?;
    ensure(one.conclusion == two.conclusion, "the two trees end differently")?;
    within(start, Duration::from_secs(1))?;
    Ok(String::from("both trees accepted; 1 and 2 collapse; η-CON redundant"))
}

fn theorem1() -> Verdict {
    let sig = Signature::standard();
    let cs = gen::constructions(1, 500, &sig);
    let budget = EnumerationBudget::default();
    let models = ModelFamily::new(sig, budget.clone())
        .models(&[])
        .map_err(|e| e.to_string())?;
    let r = theorem1_check(&cs, &models, &budget).map_err(|e| e.to_string())?;
    ensure(
        r.failures.is_empty(),
        format!("{} of {} cases fail", r.failures.len(), r.checked),
    )?;
    ensure(r.checked > 0, "no cases checked")?;
    Ok(format!(
        "{} constructions, {} models, {} cases, 100%",
        cs.len(),
        models.len(),
        r.checked
    ))
}

fn compensation() -> Verdict {
    let start = Instant::now();
    run_all(&items(|i| i.kind == Kind::SubForm && i.expect == Expect::Value))?;
    let sig = Signature::standard();
    let rs = gen::sub_requests(1, 200, &sig);
    let budget = EnumerationBudget::default();
    let models: Vec<Model> = (1..=2)
        .map(|iota| Model::new(Signature::standard(), Frame::new(iota, 7, 1)).expect("arith frame"))
        .collect();
    let r = compensation_sweep(&rs, &models, &budget).map_err(|e| e.to_string())?;
    ensure(r.violations.is_empty(), format!("{} violations", r.violations.len()))?;
    ensure(r.checked > 0, "nothing checked")?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "corpus sub-forms and {} requests, {} cases, 0 violations",
        rs.len(),
        r.checked
    ))
}

fn fact1() -> Verdict {
    let start = Instant::now();
    let budget = EnumerationBudget {
        max_iota: 1,
        partial_tables: true,
        ..EnumerationBudget::default()
    };
    let w = find_fact1_countermodel(&budget).map_err(|e| e.to_string())?;
    let again = find_fact1_countermodel(&budget).map_err(|e| e.to_string())?;
    ensure(
        corpus::render_fact1(&w) == corpus::render_fact1(&again),
        "witness differs between runs",
    )?;
    // Re-evaluate the four sentences in the witness model.
    let sig = w.model.signature().clone();
    let ev = |src: &str| {
        let c = parse(src, &sig).map_err(|e| e.to_string())?;
        let c = elaborate(&c, &sig, None).map_err(|e| e.to_string())?;
        evaluate(&c, &w.model, &Assignment::new()).map_err(|e| e.to_string())
    };
    let phi = w.phi.to_string();
    let all = ev(&format!("∀(λx.{phi})"))?;
    let all_not = ev(&format!("∀(λx.¬({phi}))"))?;
    let exists = ev(&format!("∃(λx.{phi})"))?;
    let classical = ev(&format!("¬(∀(λx.¬({phi})))"))?;
    ensure(all == all_not, "∀(λx.φ) and ∀(λx.¬φ) differ")?;
    ensure(exists != classical, "¬∀¬ agrees with ∃")?;
    within(start, Duration::from_secs(5))?;
    Ok(corpus::render_fact1(&w))
}

fn quantification_into() -> Verdict {
    let prefixes = ["AE-", "AH1-", "AH2prime-", "AI1-", "AH2-", "AI2-"];
    let chosen = items(|i| prefixes.iter().any(|p| i.id.starts_with(p)));
    for p in prefixes {
        ensure(chosen.iter().any(|i| i.id.starts_with(p)), format!("no {p} items"))?;
    }
    for bad in ["AH2-congruence", "AI2-congruence"] {
        let i = chosen.iter().find(|i| i.id == bad).ok_or(format!("{bad} missing"))?;
        ensure(i.expect == Expect::Reject, format!("{bad} is not a rejection"))?;
    }
    run_all(&chosen)?;
    Ok(format!("{} items; A^H2 and A^I2 not congruent", chosen.len()))
}

fn soundness() -> Verdict {
    let proofs = items(|i| i.kind == Kind::Proof && i.expect == Expect::Accept);
    let mutants = items(|i| i.kind == Kind::Proof && i.expect == Expect::Reject);
    ensure(mutants.len() >= 10, format!("only {} mutants", mutants.len()))?;
    run_all(&proofs)?;
    run_all(&mutants)?;
    Ok(format!(
        "{} proofs oracle-valid, {} mutants rejected",
        proofs.len(),
        mutants.len()
    ))
}

fn sub_units() -> Verdict {
    let x = Variable::new("x", Ty::IOTA);
    let n = Variable::new("n", Ty::NU);
    let w1 = Variable::new("w'", Ty::OMEGA);
    let var = |v: &Variable| Construction::Variable(v.clone());
    let k = || Construction::constant("K");
    let d_of = |v: &Variable| Construction::app(Construction::constant("D"), vec![var(v)]);

    // I: x not free, result identical.
    let c = Construction::app(
        Builtin::Exists(Some(Ty::IOTA)),
        vec![Construction::Lambda(
            vec![x.clone()],
            Box::new(Construction::app(Construction::constant("P"), vec![var(&x)])),
        )],
    );
    ensure(substitute(&Construction::constant("a"), &x, &c) == c, "point I")?;

    // Opacity: Improp(⌈3÷n⌉)_(0/n) is Improp(⌈3÷n⌉).
    let div = Construction::app(Builtin::Div, vec![Construction::nat(3), var(&n)]);
    let block = Construction::app(Builtin::Improp, vec![Construction::acq(div)]);
    ensure(
        substitute(&Construction::nat(0), &n, &block) == block,
        "acquisition opacity",
    )?;

    // II.iv: ∀(λw'.K(w')(x))_(D(w')/x) renames w'.
    let forall = |b: &Variable, body: Construction| {
        Construction::app(
            Builtin::Forall(Some(Ty::OMEGA)),
            vec![Construction::Lambda(vec![b.clone()], Box::new(body))],
        )
    };
    let kx = |b: &Variable, arg: Construction| Construction::app(Construction::app(k(), vec![var(b)]), vec![arg]);
    let target = forall(&w1, kx(&w1, var(&x)));
    let z = Variable::new("z0", Ty::OMEGA);
    let want = forall(&z, kx(&z, d_of(&w1)));
    let got = substitute(&d_of(&w1), &x, &target);
    ensure(got == want, format!("II.iv gave {got}, expected {want}"))?;
    ensure(got.free_vars().contains(&w1), "w' captured")?;
    Ok(String::from("point I, acquisition opacity, II.iv renaming"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("EG proof replay", eg),
        ("∃-Iη proof replay", exists_i_eta),
        ("Theorem 1 property", theorem1),
        ("compensation sweep", compensation),
        ("Fact 1 countermodel", fact1),
        ("quantification-into corpus", quantification_into),
        ("rule soundness and mutants", soundness),
        ("Sub unit suite", sub_units),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        let t = start.elapsed().as_secs_f64();
        match v {
            Ok(detail) => println!("PASS {} {name} ({t:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({t:.2} s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
