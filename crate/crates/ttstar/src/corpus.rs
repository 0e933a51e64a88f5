//! The shipped corpus and its runner.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Deserialize;
use ttstar_core::kernel::{check_derivation, elaborate_derivation, Report};
use ttstar_core::oracle::{
    assignments, compensation_sweep, derivation_sweep, exec_of_acq, find_fact1_countermodel, EnumerationBudget,
    Fact1Witness, ModelFamily,
};
use ttstar_core::semantics::{Evaluator, Model};
use ttstar_core::signature::Signature;
use ttstar_core::substitution::{recognize_sub_form, SubRequest};
use ttstar_core::syntax::{parse, Construction};
use ttstar_core::types::elaborate;

use crate::error::{Error, Result};
use crate::modelfile;
use crate::script::{parse_script, Script};
use crate::show;

macro_rules! corpus_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../corpus/", $name)))),*]
    };
}

static FILES: &[(&str, &str)] = corpus_files![
    "index.toml",
    "intension.toml",
    "eg.proof",
    "eg-k1.proof",
    "exists-i-eta-1.proof",
    "exists-i-eta-2.proof",
    "exists-i-eta-2-no-eta.proof",
    "a-e.proof",
    "a-h1.proof",
    "a-h2prime.proof",
    "a-i1.proof",
    "mutants/eg-broken-freshness.proof",
    "mutants/app-inst-x-not-fresh.proof",
    "mutants/lambda-inst-f-not-fresh.proof",
    "mutants/app-inst-f-unpinned.proof",
    "mutants/beta-exp-wrong-substitution.proof",
    "mutants/exists-i-on-false.proof",
    "mutants/eta-con-without-properness.proof",
    "mutants/eg-non-strict.proof",
    "mutants/ax-goal-missing.proof",
    "mutants/wr-drops-match.proof",
    "mutants/beta-exp-missing-properness.proof",
    "mutants/rt-different-values.proof",
    "mutants/def-of-sub-under-acquisition.proof",
    "mutants/exec-intro-wrong-type.proof",
];

/// Contents of a shipped file, by its path below `corpus/`.
pub fn file(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn file_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Proof,
    SubForm,
    CongruenceCheck,
    Countermodel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Accept,
    Reject,
    Value,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub id: String,
    pub kind: Kind,
    pub expect: Expect,
    pub file: Option<String>,
    pub model: Option<String>,
    pub form: Option<String>,
    pub left: Option<String>,
    pub right: Option<String>,
    pub value: Option<String>,
    /// Text the kernel's rejection message must contain.
    pub reason: Option<String>,
    /// Whether the oracle must falsify a rejected proof.
    pub falsify: Option<bool>,
    pub search: Option<String>,
}

#[derive(Deserialize)]
struct Index {
    item: Vec<Item>,
}

pub fn index() -> Result<Vec<Item>> {
    let src = file("index.toml").expect("index is shipped");
    let idx: Index = toml::from_str(src).map_err(|e| Error::input("index.toml", 0, e.to_string()))?;
    Ok(idx.item)
}

pub fn item(id: &str) -> Result<Item> {
    index()?
        .into_iter()
        .find(|i| i.id == id)
        .ok_or_else(|| Error::Failed(format!("no corpus item {id}")))
}

/// A preset or a shipped model file.
pub fn model(name: &str) -> Result<Model> {
    if let Some(m) = modelfile::preset(name) {
        return Ok(m);
    }
    let src = file(name).ok_or_else(|| Error::Failed(format!("no shipped model {name}")))?;
    modelfile::parse_model(src, name)
}

pub fn script(name: &str) -> Result<Script> {
    let src = file(name).ok_or_else(|| Error::Failed(format!("no shipped script {name}")))?;
    parse_script(src, name, &Signature::standard())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} {}", self.id, self.detail)
    }
}

fn need<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str> {
    field
        .as_deref()
        .ok_or_else(|| Error::Failed(format!("item lacks `{name}`")))
}

pub fn run_item(item: &Item, budget: &EnumerationBudget) -> Outcome {
    let r = match item.kind {
        Kind::Proof => run_proof(item, budget),
        Kind::SubForm => run_sub_form(item, budget),
        Kind::CongruenceCheck => run_congruence(item, budget),
        Kind::Countermodel => run_countermodel(item, budget),
    };
    let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id: item.id.clone(),
        pass,
        detail,
    }
}

/// Runs items concurrently; outcomes come back in the order given.
pub fn run(items: &[Item], budget: &EnumerationBudget) -> Vec<Outcome> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; items.len()]);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(it) = items.get(i) else { break };
                let o = run_item(it, budget);
                slots.lock().expect("no worker panics")[i] = Some(o);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panics")
        .into_iter()
        .map(|o| o.expect("every item ran"))
        .collect()
}

/// Checks a script; for an accepted one also returns the node count of the
/// oracle sweep and the number of models swept.
pub fn check_and_sweep(s: &Script, budget: &EnumerationBudget) -> Result<(Report, usize, usize)> {
    let report = check_derivation(&s.derivation, &s.sig)?;
    if let Some(e) = &s.expected {
        let e = e.elaborate(&s.sig).map_err(Error::Type)?;
        if e != report.conclusion {
            return Err(Error::Failed(format!("proved {}, expected {e}", report.conclusion)));
        }
    }
    let d = elaborate_derivation(&s.derivation, &s.sig)?;
    let family = ModelFamily::new(s.sig.clone(), budget.clone());
    let (verdicts, models) = derivation_sweep(&d, &family)?;
    for v in &verdicts {
        if let Some(c) = &v.counterexample {
            let m = &models[c.model];
            return Err(Error::Failed(format!(
                "oracle: {} ({}) fails in model {} under {}",
                v.node,
                v.rule,
                c.model,
                show::assignment(m, &c.assignment)
            )));
        }
    }
    Ok((report, verdicts.len(), models.len()))
}

/// A witness against some rule instance of a (possibly rejected) proof.
pub fn falsify(s: &Script, budget: &EnumerationBudget) -> Result<Option<String>> {
    let Ok(d) = elaborate_derivation(&s.derivation, &s.sig) else {
        return Ok(None);
    };
    let family = ModelFamily::new(s.sig.clone(), budget.clone());
    let (verdicts, models) = derivation_sweep(&d, &family)?;
    Ok(verdicts.into_iter().find_map(|v| {
        let c = v.counterexample?;
        let m = &models[c.model];
        let interp: Vec<String> = m
            .interpretations()
            .filter(|(n, val)| n.as_str() != m.show(val))
            .map(|(n, val)| format!("{n} = {}", m.show(val)))
            .collect();
        Some(format!(
            "{} ({}) fails with {} under {}",
            v.node,
            v.rule,
            interp.join(", "),
            show::assignment(m, &c.assignment)
        ))
    }))
}

fn run_proof(item: &Item, budget: &EnumerationBudget) -> Result<(bool, String)> {
    let s = script(need(&item.file, "file")?)?;
    match item.expect {
        Expect::Accept => match check_and_sweep(&s, budget) {
            Ok((r, nodes, models)) => Ok((
                true,
                format!("{} [{nodes} nodes oracle-valid over {models} models]", r.conclusion),
            )),
            Err(e) => Ok((false, e.to_string())),
        },
        Expect::Reject => {
            let err = match check_derivation(&s.derivation, &s.sig) {
                Ok(r) => return Ok((false, format!("accepted: {}", r.conclusion))),
                Err(e) => e,
            };
            let msg = err.to_string();
            if let Some(reason) = &item.reason {
                if !msg.contains(reason.as_str()) {
                    return Ok((false, format!("rejected for another reason: {msg}")));
                }
            }
            let witness = falsify(&s, budget)?;
            let want = item.falsify.unwrap_or(false);
            let oracle = match &witness {
                Some(w) => format!("falsified: {w}"),
                None => String::from("no counterexample"),
            };
            Ok((witness.is_some() == want, format!("rejected: {msg}; {oracle}")))
        }
        Expect::Value => Err(Error::Failed("proof items expect accept or reject".into())),
    }
}

fn run_sub_form(item: &Item, budget: &EnumerationBudget) -> Result<(bool, String)> {
    let m = model(need(&item.model, "model")?)?;
    let sig = m.signature();
    let form = elaborate(&parse(need(&item.form, "form")?, sig)?, sig, None)?;
    let sf = recognize_sub_form(&form).ok_or_else(|| Error::Failed(format!("{form} is not a Sub-form")))?;
    let computed = sf.computed();
    let want = need(&item.value, "value")?;
    let want_c = elaborate(&parse(want, sig)?, sig, None)?;
    if !computed.alpha_eq(&want_c) {
        return Ok((false, format!("computes {computed}, expected {want_c}")));
    }
    let mut requests = Vec::new();
    for (d, x) in &sf.pairs {
        requests.push(SubRequest::new(d.clone(), x.clone(), sf.target.clone(), sig)?);
    }
    let rep = compensation_sweep(&requests, std::slice::from_ref(&m), budget)?;
    Ok((
        rep.violations.is_empty(),
        format!(
            "computes {computed}; compensation: {} checked, {} violations",
            rep.checked,
            rep.violations.len()
        ),
    ))
}

/// Whether `left` and `right` agree under every assignment; the first
/// disagreeing assignment otherwise.
pub fn congruence(
    m: &Model,
    left: &Construction,
    right: &Construction,
    budget: &EnumerationBudget,
) -> Result<(usize, Option<String>)> {
    let mut m = m.clone();
    m.add_constructions([left, right]);
    let mut vars = left.live_vars();
    vars.extend(right.live_vars());
    let vs = assignments(&m, &vars, budget)?;
    let mut ev = Evaluator::new(&m);
    for v in &vs {
        if !ev.congruent(left, right, v)? {
            let l = ev.eval(left, v)?;
            let r = ev.eval(right, v)?;
            return Ok((
                vs.len(),
                Some(format!(
                    "under {}: {} vs {}",
                    show::assignment(&m, v),
                    show::result(&m, &l),
                    show::result(&m, &r)
                )),
            ));
        }
    }
    Ok((vs.len(), None))
}

fn run_congruence(item: &Item, budget: &EnumerationBudget) -> Result<(bool, String)> {
    let m = model(need(&item.model, "model")?)?;
    let sig = m.signature();
    let left = elaborate(&parse(need(&item.left, "left")?, sig)?, sig, None)?;
    let right = match &item.right {
        Some(r) => elaborate(&parse(r, sig)?, sig, None)?,
        None => exec_of_acq(&left, sig)?,
    };
    let (n, diff) = congruence(&m, &left, &right, budget)?;
    if n == 0 {
        return Ok((false, String::from("vacuous: no assignments")));
    }
    Ok(match (item.expect, diff) {
        (Expect::Accept, None) => (true, format!("congruent under all {n} assignments")),
        (Expect::Accept, Some(d)) => (false, format!("not congruent {d}")),
        (Expect::Reject, Some(d)) => (true, format!("correctly rejected: not congruent {d}")),
        (Expect::Reject, None) => (false, format!("congruent under all {n} assignments")),
        (Expect::Value, _) => return Err(Error::Failed("congruence checks expect accept or reject".into())),
    })
}

/// `S = table; ∀(λx.φ) = …; ∀(λx.¬φ) = …; ∃(λx.φ) = …; ¬∀(λx.¬φ) = …`.
pub fn render_fact1(w: &Fact1Witness) -> String {
    use ttstar_core::syntax::Builtin;
    let m = &w.model;
    let x = match &w.phi {
        Construction::Application(_, args) => args[0].clone(),
        _ => unreachable!("φ is S(x)"),
    };
    let Construction::Variable(x) = x else {
        unreachable!("φ is S(x)")
    };
    let lam = |b: Construction| Construction::lambda(vec![x.clone()], b);
    let not_phi = Construction::app(Builtin::Not, vec![w.phi.clone()]);
    let fa = |b| Construction::app(Builtin::Forall(None), vec![lam(b)]);
    let parts = [
        (fa(w.phi.clone()), &w.forall_phi),
        (fa(not_phi.clone()), &w.forall_not_phi),
        (
            Construction::app(Builtin::Exists(None), vec![lam(w.phi.clone())]),
            &w.exists_phi,
        ),
        (Construction::app(Builtin::Not, vec![fa(not_phi)]), &w.classical_exists),
    ];
    let mut out = format!("S = {}", m.show(&w.table));
    for (c, r) in parts {
        out.push_str(&format!(
            "; {} = {}",
            strip_binder_types(&c.to_string()),
            show::result(m, r)
        ));
    }
    out
}

fn strip_binder_types(s: &str) -> String {
    s.replace(":i.", ".")
}

fn run_countermodel(item: &Item, budget: &EnumerationBudget) -> Result<(bool, String)> {
    match need(&item.search, "search")? {
        "fact1" => {
            let w = find_fact1_countermodel(budget)?;
            let got = render_fact1(&w);
            let want = need(&item.value, "value")?;
            let ok = got == want && w.forall_phi == w.forall_not_phi && w.exists_phi != w.classical_exists;
            Ok((ok, got))
        }
        other => Err(Error::Failed(format!("unknown search {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lists_only_shipped_files() {
        let items = index().unwrap();
        for it in &items {
            if let Some(f) = &it.file {
                assert!(file(f).is_some(), "{f}");
            }
        }
        let mut ids: Vec<_> = items.iter().map(|i| i.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), items.len());
    }

    #[test]
    fn every_shipped_file_is_used() {
        let items = index().unwrap();
        for name in file_names().filter(|n| n.ends_with(".proof")) {
            assert!(items.iter().any(|i| i.file.as_deref() == Some(name)), "{name}");
        }
    }
}
