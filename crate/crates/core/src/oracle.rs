//! Brute-force validity checking over small finite models.
//!
//! Every search enumerates in a fixed order, so the first counterexample
//! found is the same on every run.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::kernel::{Derivation, Match, NodeRef, Rule, Sequent};
use crate::semantics::{Assignment, EvalError, EvalResult, Evaluator, Frame, Model, ModelError, Value};
use crate::signature::Signature;
use crate::substitution::{substitute, SubRequest};
use crate::syntax::{Builtin, Construction, Variable};
use crate::types::{elaborate, synth, Ty, TypeError};

/// Limits on every enumeration the oracle performs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_iota: usize,
    pub max_nu: u64,
    pub max_omega: usize,
    pub max_order: u32,
    pub max_tables: usize,
    pub max_assignments: u64,
    pub max_models: u64,
    /// When false, function domains hold total tables only.
    pub partial_tables: bool,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_iota: 2,
            max_nu: 7,
            max_omega: 2,
            max_order: 2,
            max_tables: 1 << 16,
            max_assignments: 1 << 20,
            max_models: 1 << 14,
            partial_tables: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    Budget(String),
    Eval(EvalError),
    Model(ModelError),
    Type(TypeError),
    NotFound(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Budget(s) => write!(f, "budget exceeded: {s}"),
            OracleError::Eval(e) => write!(f, "evaluation: {e}"),
            OracleError::Model(e) => write!(f, "model: {e}"),
            OracleError::Type(e) => write!(f, "type: {e}"),
            OracleError::NotFound(s) => write!(f, "not found: {s}"),
        }
    }
}

impl core::error::Error for OracleError {}

impl From<EvalError> for OracleError {
    fn from(e: EvalError) -> Self {
        OracleError::Eval(e)
    }
}

impl From<ModelError> for OracleError {
    fn from(e: ModelError) -> Self {
        OracleError::Model(e)
    }
}

impl From<TypeError> for OracleError {
    fn from(e: TypeError) -> Self {
        OracleError::Type(e)
    }
}

type R<T> = Result<T, OracleError>;

/// Restricts a domain to total tables when partial ones are switched off.
fn domain(m: &Model, ty: &Ty, budget: &EnumerationBudget) -> R<Vec<Value>> {
    let all = m.domain(ty)?;
    if budget.partial_tables {
        return Ok(all);
    }
    Ok(all.into_iter().filter(|v| is_total(m, v)).collect())
}

fn is_total(m: &Model, v: &Value) -> bool {
    match v {
        Value::Table(t) => {
            let points = m.tuples(&t.args).map(|p| p.len()).unwrap_or(0);
            t.entries.len() == points && t.entries.values().all(|e| is_total(m, e))
        }
        _ => true,
    }
}

/// Every assignment to `vars`, first variable slowest.
pub fn assignments(m: &Model, vars: &BTreeSet<Variable>, budget: &EnumerationBudget) -> R<Vec<Assignment>> {
    let mut doms = Vec::with_capacity(vars.len());
    let mut total: u64 = 1;
    for x in vars {
        let d = domain(m, &x.ty, budget)?;
        total = total.saturating_mul(d.len() as u64);
        if total > budget.max_assignments {
            return Err(OracleError::Budget(format!(
                "more than {} assignments to {} variables",
                budget.max_assignments,
                vars.len()
            )));
        }
        doms.push((x.clone(), d));
    }
    let mut out = vec![Assignment::new()];
    for (x, d) in doms {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for v in &out {
            for e in &d {
                next.push(v.with(x.clone(), e.clone()));
            }
        }
        out = next;
    }
    Ok(out)
}

fn satisfies_all(
    ev: &mut Evaluator<'_>,
    ms: impl IntoIterator<Item = impl core::borrow::Borrow<Match>>,
    v: &Assignment,
) -> R<bool> {
    for m in ms {
        if !ev.satisfies(m.borrow(), v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Validity in a model that already holds the sequent's constructions.
/// Returns the first falsifying assignment.
fn counter_assignment(s: &Sequent, m: &Model, budget: &EnumerationBudget) -> R<Option<Assignment>> {
    let mut ev = Evaluator::new(m);
    for v in assignments(m, &s.live_vars(), budget)? {
        if satisfies_all(&mut ev, &s.context, &v)? && !ev.satisfies(&s.goal, &v)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

fn with_constructions<'a>(m: &Model, cs: impl IntoIterator<Item = &'a Construction>) -> Model {
    let mut m = m.clone();
    m.add_constructions(cs);
    m
}

/// Checks every assignment to the sequent's live variables. `None` means
/// valid; otherwise the first assignment that satisfies the context but not
/// the goal.
pub fn sequent_valid(s: &Sequent, m: &Model, budget: &EnumerationBudget) -> R<Option<Assignment>> {
    let cs = s.constructions();
    counter_assignment(s, &with_constructions(m, &cs), budget)
}

/// A model index into the family checked and a falsifying assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub model: usize,
    pub assignment: Assignment,
}

/// A rule instance is valid in a model when the conclusion is valid there
/// whenever every premise is. The first model where that fails is reported
/// with an assignment falsifying the conclusion.
pub fn rule_instance_valid(
    premises: &[Sequent],
    conclusion: &Sequent,
    models: &[Model],
    budget: &EnumerationBudget,
) -> R<Option<Counterexample>> {
    let mut cs = conclusion.constructions();
    for p in premises {
        cs.extend(p.constructions());
    }
    let models: Vec<Model> = models.iter().map(|m| with_constructions(m, &cs)).collect();
    instance_counterexample(premises, conclusion, &models, budget, &mut BTreeMap::new())
}

type Cache = BTreeMap<(usize, Sequent), Option<Assignment>>;

fn cached_counter(
    s: &Sequent,
    i: usize,
    m: &Model,
    budget: &EnumerationBudget,
    cache: &mut Cache,
) -> R<Option<Assignment>> {
    let key = (i, s.clone());
    if let Some(r) = cache.get(&key) {
        return Ok(r.clone());
    }
    let r = counter_assignment(s, m, budget)?;
    cache.insert(key, r.clone());
    Ok(r)
}

fn instance_counterexample(
    premises: &[Sequent],
    conclusion: &Sequent,
    models: &[Model],
    budget: &EnumerationBudget,
    cache: &mut Cache,
) -> R<Option<Counterexample>> {
    'models: for (i, m) in models.iter().enumerate() {
        for p in premises {
            if cached_counter(p, i, m, budget, cache)?.is_some() {
                continue 'models;
            }
        }
        if let Some(v) = cached_counter(conclusion, i, m, budget, cache)? {
            return Ok(Some(Counterexample {
                model: i,
                assignment: v,
            }));
        }
    }
    Ok(None)
}

/// Frames with one to `max_iota` individuals and one to `max_omega` worlds
/// over `0..=max_nu`, each completed by every interpretation of the
/// uninterpreted constants the checked constructions mention. Constants they
/// do not mention cannot affect the outcome and get the first element of
/// their domain.
#[derive(Clone, Debug)]
pub struct ModelFamily {
    pub sig: Signature,
    pub budget: EnumerationBudget,
}

impl ModelFamily {
    pub fn new(sig: Signature, budget: EnumerationBudget) -> Self {
        ModelFamily { sig, budget }
    }

    pub fn models(&self, constructions: &[Construction]) -> R<Vec<Model>> {
        let mut sig = self.sig.clone();
        sig.set_max_order(self.budget.max_order);
        let mut out = Vec::new();
        for iota in 1..=self.budget.max_iota {
            for omega in 1..=self.budget.max_omega {
                let mut frame = Frame::new(iota, self.budget.max_nu, omega);
                frame.max_tables = self.budget.max_tables;
                let mut base = Model::new(sig.clone(), frame)?;
                base.add_constructions(constructions);
                let mentioned = Model::named_constants(constructions);
                for (name, ty) in base.uninterpreted() {
                    if !mentioned.contains(&name) {
                        let first = domain(&base, &ty, &self.budget)?.into_iter().next();
                        if let Some(e) = first {
                            base.interpret(name, e)?;
                        }
                    }
                }
                out.extend(completions(&base, &self.budget)?);
                if out.len() as u64 > self.budget.max_models {
                    return Err(OracleError::Budget(format!(
                        "more than {} models",
                        self.budget.max_models
                    )));
                }
            }
        }
        Ok(out)
    }
}

/// Every way of interpreting the constants `base` leaves uninterpreted.
pub fn completions(base: &Model, budget: &EnumerationBudget) -> R<Vec<Model>> {
    let mut out = vec![base.clone()];
    for (name, ty) in base.uninterpreted() {
        let d = domain(base, &ty, budget)?;
        if (out.len() as u64).saturating_mul(d.len() as u64) > budget.max_models {
            return Err(OracleError::Budget(format!("more than {} models", budget.max_models)));
        }
        let mut next = Vec::with_capacity(out.len() * d.len());
        for m in &out {
            for e in &d {
                let mut m2 = m.clone();
                m2.interpret(name.clone(), e.clone())?;
                next.push(m2);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Outcome of the semantic check of one derivation node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeVerdict {
    pub node: NodeRef,
    pub rule: Rule,
    pub counterexample: Option<Counterexample>,
}

/// Checks every node of an elaborated derivation as a rule instance over the
/// family. The returned models are the ones counterexamples index into.
pub fn derivation_sweep(d: &Derivation, family: &ModelFamily) -> R<(Vec<NodeVerdict>, Vec<Model>)> {
    let mut cs = Vec::new();
    d.walk(&mut Vec::new(), &mut |_, n| cs.extend(n.conclusion.constructions()));
    let models = family.models(&cs)?;
    let mut nodes = Vec::new();
    d.walk(&mut Vec::new(), &mut |p, n| nodes.push((p.clone(), n)));
    let mut out = Vec::with_capacity(nodes.len());
    let mut cache = Cache::new();
    for (path, n) in nodes {
        let ps: Vec<Sequent> = n.premises.iter().map(|p| p.conclusion.clone()).collect();
        let counterexample = instance_counterexample(&ps, &n.conclusion, &models, &family.budget, &mut cache)?;
        out.push(NodeVerdict {
            node: NodeRef {
                path,
                label: n.label.clone(),
            },
            rule: n.rule,
            counterexample,
        });
    }
    Ok((out, models))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompensationViolation {
    pub request: usize,
    pub model: usize,
    pub assignment: Assignment,
    pub substituted: EvalResult,
    pub updated: EvalResult,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompensationReport {
    pub checked: u64,
    /// Assignments under which the replacement was improper.
    pub skipped_improper: u64,
    pub violations: Vec<CompensationViolation>,
}

/// For each request `(D, x, C)`, model and assignment `v` under which `D`
/// yields `d`: `C[D/x]` under `v` must agree with `C` under `v(d/x)`.
pub fn compensation_sweep(
    requests: &[SubRequest],
    models: &[Model],
    budget: &EnumerationBudget,
) -> R<CompensationReport> {
    let mut report = CompensationReport::default();
    for (ri, req) in requests.iter().enumerate() {
        let substituted = substitute(&req.replacement, &req.variable, &req.target);
        let x = Construction::Variable(req.variable.clone());
        let cs = [&req.replacement, &req.target, &substituted, &x];
        let mut vars = req.replacement.live_vars();
        vars.extend(req.target.live_vars());
        vars.insert(req.variable.clone());
        for (mi, m) in models.iter().enumerate() {
            let m = with_constructions(m, cs);
            let mut ev = Evaluator::new(&m);
            for v in assignments(&m, &vars, budget)? {
                let Some(d) = ev.eval(&req.replacement, &v)?.value().cloned() else {
                    report.skipped_improper += 1;
                    continue;
                };
                report.checked += 1;
                let r1 = ev.eval(&substituted, &v)?;
                let r2 = ev.eval(&req.target, &v.with(req.variable.clone(), d))?;
                if !ev.results_agree(&r1, &r2)? {
                    report.violations.push(CompensationViolation {
                        request: ri,
                        model: mi,
                        assignment: v,
                        substituted: r1,
                        updated: r2,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Failure {
    pub construction: usize,
    pub model: usize,
    pub assignment: Assignment,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theorem1Report {
    pub checked: u64,
    pub failures: Vec<Theorem1Failure>,
}

/// `⌊⌊⌈C⌉⌋⌋_τ`, with `τ` the type of `C`.
pub fn exec_of_acq(c: &Construction, sig: &Signature) -> R<Construction> {
    let t = synth(c, sig)?;
    Ok(Construction::app(
        Builtin::Exec(Some(t)),
        vec![Construction::acq(c.clone())],
    ))
}

/// `C` and `⌊⌊⌈C⌉⌋⌋_τ` agree under every assignment of every model.
pub fn theorem1_check(cs: &[Construction], models: &[Model], budget: &EnumerationBudget) -> R<Theorem1Report> {
    let mut report = Theorem1Report::default();
    for (ci, c) in cs.iter().enumerate() {
        for (mi, m) in models.iter().enumerate() {
            let c = elaborate(c, m.signature(), None)?;
            let wrapped = exec_of_acq(&c, m.signature())?;
            let m = with_constructions(m, [&c]);
            let mut ev = Evaluator::new(&m);
            for v in assignments(&m, &c.live_vars(), budget)? {
                report.checked += 1;
                if !ev.congruent(&c, &wrapped, &v)? {
                    report.failures.push(Theorem1Failure {
                        construction: ci,
                        model: mi,
                        assignment: v,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// A model in which `∀(λx.φ)` and `∀(λx.¬φ)` coincide for an improper `φ`,
/// so `¬∀(λx.¬φ)` cannot define `∃(λx.φ)`.
#[derive(Clone, Debug)]
pub struct Fact1Witness {
    pub model: Model,
    /// Interpretation of `S`.
    pub table: Value,
    pub phi: Construction,
    pub forall_phi: EvalResult,
    pub forall_not_phi: EvalResult,
    pub exists_phi: EvalResult,
    pub classical_exists: EvalResult,
}

/// Searches frames with one to `max_iota` individuals and every
/// interpretation of `S : (i)->o` for a witness with `φ = S(x)`.
pub fn find_fact1_countermodel(budget: &EnumerationBudget) -> R<Fact1Witness> {
    let mut sig = Signature::standard();
    let pred = Ty::fun(vec![Ty::IOTA], Ty::O);
    sig.declare_constant("S", pred.clone()).expect("fresh name");
    let x = Variable::new("x", Ty::IOTA);
    let phi = Construction::app(Construction::constant("S"), vec![Construction::Variable(x.clone())]);
    let not_phi = Construction::app(Builtin::Not, vec![phi.clone()]);
    let lam = |b: &Construction| Construction::lambda(vec![x.clone()], b.clone());
    let q = |b: Builtin, body: &Construction| Construction::app(b, vec![lam(body)]);
    let forall_phi = q(Builtin::Forall(Some(Ty::IOTA)), &phi);
    let forall_not_phi = q(Builtin::Forall(Some(Ty::IOTA)), &not_phi);
    let exists_phi = q(Builtin::Exists(Some(Ty::IOTA)), &phi);
    let classical = Construction::app(Builtin::Not, vec![forall_not_phi.clone()]);
    for iota in 1..=budget.max_iota {
        let mut frame = Frame::new(iota, budget.max_nu, 1);
        frame.max_tables = budget.max_tables;
        let base = Model::new(sig.clone(), frame)?;
        for table in domain(&base, &pred, budget)? {
            let mut m = base.clone();
            m.interpret("S", table.clone())?;
            let mut ev = Evaluator::new(&m);
            let empty = Assignment::new();
            let mut improper = true;
            for v in assignments(&m, &BTreeSet::from([x.clone()]), budget)? {
                improper &= !ev.eval(&phi, &v)?.is_proper();
            }
            if !improper {
                continue;
            }
            let fa = ev.eval(&forall_phi, &empty)?;
            let fna = ev.eval(&forall_not_phi, &empty)?;
            let ex = ev.eval(&exists_phi, &empty)?;
            let cl = ev.eval(&classical, &empty)?;
            if ev.results_agree(&fa, &fna)? && !ev.results_agree(&ex, &cl)? {
                return Ok(Fact1Witness {
                    model: m,
                    table,
                    phi,
                    forall_phi: fa,
                    forall_not_phi: fna,
                    exists_phi: ex,
                    classical_exists: cl,
                });
            }
        }
    }
    Err(OracleError::NotFound(String::from(
        "no interpretation of S makes S(x) improper within the budget",
    )))
}
