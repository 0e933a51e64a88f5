use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::sequent::{Match, Rhs, Sequent};
use crate::signature::Signature;
use crate::substitution::{recognize_sub_form, substitute_all, SubForm};
use crate::syntax::{Builtin, Constant, Construction, Variable};
use crate::types::{compatible, synth, typed_order, BaseTy, Ty, TypeError};

/// Rule names. The last two are derived rules admitted as single steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Ax,
    Wr,
    ExistsI,
    BetaExp,
    AppInst,
    LambdaInst,
    ExecInst,
    EtaCon,
    Rt,
    DefOfSub,
    ExecIntro,
    ExecElim,
    Eg,
    ExistsIEta,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::Ax,
        Rule::Wr,
        Rule::ExistsI,
        Rule::BetaExp,
        Rule::AppInst,
        Rule::LambdaInst,
        Rule::ExecInst,
        Rule::EtaCon,
        Rule::Rt,
        Rule::DefOfSub,
        Rule::ExecIntro,
        Rule::ExecElim,
        Rule::Eg,
        Rule::ExistsIEta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "AX",
            Rule::Wr => "WR",
            Rule::ExistsI => "∃-I",
            Rule::BetaExp => "β-EXP",
            Rule::AppInst => "app-INST",
            Rule::LambdaInst => "λ-INST",
            Rule::ExecInst => "exec-INST",
            Rule::EtaCon => "η-CON",
            Rule::Rt => "RT",
            Rule::DefOfSub => "Def-of-Sub",
            Rule::ExecIntro => "exec-intro",
            Rule::ExecElim => "exec-elim",
            Rule::Eg => "EG",
            Rule::ExistsIEta => "∃-Iη",
        }
    }

    /// Accepts the printed name and ASCII spellings, case-insensitively.
    pub fn from_name(s: &str) -> Option<Rule> {
        let k: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' ' | '(' | ')'))
            .flat_map(char::to_lowercase)
            .collect();
        Some(match k.as_str() {
            "ax" => Rule::Ax,
            "wr" => Rule::Wr,
            "∃i" | "existsi" => Rule::ExistsI,
            "βexp" | "betaexp" => Rule::BetaExp,
            "appinst" => Rule::AppInst,
            "λinst" | "lambdainst" => Rule::LambdaInst,
            "execinst" | "execoinst" | "⌊⌊·⌋⌋oinst" => Rule::ExecInst,
            "ηcon" | "etacon" => Rule::EtaCon,
            "rt" => Rule::Rt,
            "defofsub" => Rule::DefOfSub,
            "execintro" => Rule::ExecIntro,
            "execelim" => Rule::ExecElim,
            "eg" => Rule::Eg,
            "∃iη" | "existsieta" => Rule::ExistsIEta,
            _ => return None,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Schema metavariables bound by a rule application, e.g. `F`, `x`, `D`.
pub type Instantiation = BTreeMap<String, Construction>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleError {
    Premises {
        expected: &'static str,
        found: usize,
    },
    Shape(String),
    Context(String),
    NotFresh {
        variable: Variable,
        reason: String,
    },
    Substitution {
        expected: Construction,
        found: Construction,
    },
    SideCondition(String),
    Instantiation {
        key: String,
        message: String,
    },
    Type(TypeError),
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::Premises { expected, found } => write!(f, "expected {expected} premises, found {found}"),
            RuleError::Shape(s) => write!(f, "shape: {s}"),
            RuleError::Context(s) => write!(f, "context: {s}"),
            RuleError::NotFresh { variable, reason } => write!(f, "freshness: {} {reason}", variable.name),
            RuleError::Substitution { expected, found } => {
                write!(f, "substitution: expected {expected}, found {found}")
            }
            RuleError::SideCondition(s) => write!(f, "side condition: {s}"),
            RuleError::Instantiation { key, message } => write!(f, "instantiation {key}: {message}"),
            RuleError::Type(e) => write!(f, "type: {e}"),
        }
    }
}

impl core::error::Error for RuleError {}

impl From<TypeError> for RuleError {
    fn from(e: TypeError) -> Self {
        RuleError::Type(e)
    }
}

type R<T> = Result<T, RuleError>;

fn shape<T>(msg: impl Into<String>) -> R<T> {
    Err(RuleError::Shape(msg.into()))
}

fn premises(ps: &[Sequent], n: usize, expected: &'static str) -> R<()> {
    if ps.len() == n {
        Ok(())
    } else {
        Err(RuleError::Premises {
            expected,
            found: ps.len(),
        })
    }
}

fn same_context(p: &Sequent, c: &Sequent) -> R<()> {
    if p.context == c.context {
        Ok(())
    } else {
        Err(RuleError::Context(format!(
            "premise context {} differs from conclusion context {}",
            show_ctx(&p.context),
            show_ctx(&c.context)
        )))
    }
}

fn show_ctx(ctx: &BTreeSet<Match>) -> String {
    let mut s = String::from("{");
    for (i, m) in ctx.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{m}"));
    }
    s.push('}');
    s
}

fn is_t(r: &Rhs) -> bool {
    matches!(r, Rhs::Const(Constant::Builtin(Builtin::True)))
}

fn exec_free(c: &Construction) -> bool {
    !c.contains_builtin(|b| matches!(b, Builtin::Exec(_)))
}

fn require_exec_free(c: &Construction, what: &str) -> R<()> {
    if exec_free(c) {
        Ok(())
    } else {
        Err(RuleError::SideCondition(format!("{what} {c} contains an execution")))
    }
}

/// `x` occurs free in `c` on a path of application nodes only, so `c` is
/// improper whenever the value of `x` is missing.
pub fn strict_in(x: &Variable, c: &Construction) -> bool {
    match c {
        Construction::Variable(v) => v == x,
        Construction::Application(h, args) => strict_in(x, h) || args.iter().any(|a| strict_in(x, a)),
        _ => false,
    }
}

fn always_inhabited(t: &Ty) -> bool {
    matches!(
        t,
        Ty::Base(BaseTy::Truth) | Ty::Base(BaseTy::Nat) | Ty::Base(BaseTy::World) | Ty::Fun(..)
    )
}

/// `strict_in`, or `c` is `∃(λȳ.B)` / `∀(λȳ.B)` with `x` T-strict in `B`,
/// so `c` can only be `T` when the value of `x` exists.
pub fn t_strict_in(x: &Variable, c: &Construction) -> bool {
    if strict_in(x, c) {
        return true;
    }
    let Construction::Application(h, args) = c else {
        return false;
    };
    let [Construction::Lambda(ys, body)] = args.as_slice() else {
        return false;
    };
    if ys.contains(x) {
        return false;
    }
    match h.builtin() {
        Some(Builtin::Exists(_)) => t_strict_in(x, body),
        Some(Builtin::Forall(_)) => ys.iter().all(|y| always_inhabited(&y.ty)) && t_strict_in(x, body),
        _ => false,
    }
}

/// A sub-form whose runtime type checks are guaranteed to pass: every
/// replacement fits its variable and the computed construction has the
/// execution's result type.
pub fn typed_sub_form(c: &Construction, sig: &Signature) -> Option<SubForm> {
    let f = recognize_sub_form(c)?;
    let tau = f.result_ty.clone()?;
    for (d, x) in &f.pairs {
        let (dt, _) = typed_order(d, sig, Some(&x.ty)).ok()?;
        if !compatible(&dt, &x.ty) {
            return None;
        }
    }
    let (ct, _) = typed_order(&f.computed(), sig, Some(&tau)).ok()?;
    compatible(&ct, &tau).then_some(f)
}

/// Replaces every sub-form outside acquisitions by the construction it
/// computes.
pub fn normalize_sub_forms(c: &Construction, sig: &Signature) -> Construction {
    if let Some(f) = typed_sub_form(c, sig) {
        return normalize_sub_forms(&f.computed(), sig);
    }
    match c {
        Construction::Application(h, args) => Construction::Application(
            alloc::boxed::Box::new(normalize_sub_forms(h, sig)),
            args.iter().map(|a| normalize_sub_forms(a, sig)).collect(),
        ),
        Construction::Lambda(bs, b) => {
            Construction::Lambda(bs.clone(), alloc::boxed::Box::new(normalize_sub_forms(b, sig)))
        }
        _ => c.clone(),
    }
}

fn normalize_match(m: &Match, sig: &Signature) -> Match {
    Match {
        left: normalize_sub_forms(&m.left, sig),
        right: m.right.clone(),
    }
}

fn normalize_sequent(s: &Sequent, sig: &Signature) -> Sequent {
    Sequent {
        context: s.context.iter().map(|m| normalize_match(m, sig)).collect(),
        goal: normalize_match(&s.goal, sig),
    }
}

fn match_mentions(m: &Match, x: &Variable) -> bool {
    m.left.mentions(x) || m.right.construction().is_some_and(|r| r.mentions(x))
}

/// `x` must not be free in, nor occur inside an acquisition of, anything
/// listed.
fn fresh(
    x: &Variable,
    ctx: &BTreeSet<Match>,
    goal: &Match,
    others: &[&Construction],
    skip: &dyn Fn(&Match) -> bool,
) -> R<()> {
    for m in ctx {
        if !skip(m) && match_mentions(m, x) {
            return Err(RuleError::NotFresh {
                variable: x.clone(),
                reason: format!("occurs in the context match {m}"),
            });
        }
    }
    if match_mentions(goal, x) {
        return Err(RuleError::NotFresh {
            variable: x.clone(),
            reason: format!("occurs in the goal {goal}"),
        });
    }
    for c in others {
        if c.mentions(x) {
            return Err(RuleError::NotFresh {
                variable: x.clone(),
                reason: format!("occurs in {c}"),
            });
        }
    }
    Ok(())
}

fn no_skip(_: &Match) -> bool {
    false
}

/// Head of `λx̃.F(x̃)` when `x̃` does not occur in `F` and `F` is
/// execution-free, so the abstraction and `F` agree wherever `F` is proper.
pub fn eta_head(c: &Construction) -> Option<&Construction> {
    let Construction::Lambda(xs, body) = c else {
        return None;
    };
    let Construction::Application(f, args) = &**body else {
        return None;
    };
    if args.len() != xs.len() || args.iter().zip(xs).any(|(a, x)| a.as_variable() != Some(x)) {
        return None;
    }
    if xs.iter().any(|x| f.mentions(x)) || !exec_free(f) {
        return None;
    }
    Some(f)
}

fn premise_pair(ps: &[Sequent]) -> R<[(&Sequent, &Sequent); 2]> {
    premises(ps, 2, "2")?;
    Ok([(&ps[0], &ps[1]), (&ps[1], &ps[0])])
}

/// Tries both premise orders of a binary rule.
fn either_order(ps: &[Sequent], f: impl Fn(&Sequent, &Sequent) -> R<Instantiation>) -> R<Instantiation> {
    let [first, second] = premise_pair(ps)?;
    match f(first.0, first.1) {
        Ok(b) => Ok(b),
        Err(e) => f(second.0, second.1).map_err(|e2| if depth(&e2) > depth(&e) { e2 } else { e }),
    }
}

/// How far a check got before failing, to pick the more informative error.
fn depth(e: &RuleError) -> u8 {
    match e {
        RuleError::Premises { .. } | RuleError::Shape(_) | RuleError::Context(_) => 0,
        _ => 1,
    }
}

fn bind(pairs: &[(&str, &Construction)]) -> Instantiation {
    pairs.iter().map(|(k, v)| (String::from(*k), (*v).clone())).collect()
}

/// Checks one rule application and returns the metavariable bindings it
/// inferred. Sequents are expected to be elaborated.
pub fn check_rule_application(
    rule: Rule,
    ps: &[Sequent],
    c: &Sequent,
    inst: &Instantiation,
    sig: &Signature,
) -> R<Instantiation> {
    let bound = match rule {
        Rule::Ax => ax(ps, c)?,
        Rule::Wr => wr(ps, c)?,
        Rule::ExistsI => exists_i(ps, c)?,
        Rule::BetaExp => beta_exp(ps, c, sig)?,
        Rule::AppInst => either_order(ps, |a, b| app_inst(a, b, c))?,
        Rule::LambdaInst => lambda_inst(ps, c)?,
        Rule::ExecInst => either_order(ps, |a, b| exec_inst(a, b, c, sig))?,
        Rule::EtaCon => either_order(ps, |a, b| eta_con(a, b, c))?,
        Rule::Rt => either_order(ps, |a, b| rt(a, b, c, sig))?,
        Rule::DefOfSub => def_of_sub(ps, c, sig)?,
        Rule::ExecIntro => exec_intro(ps, c, sig)?,
        Rule::ExecElim => exec_elim(ps, c, sig)?,
        Rule::Eg => eg(ps, c, sig)?,
        Rule::ExistsIEta => exists_i_eta(ps, c)?,
    };
    for (k, v) in inst {
        match bound.get(k) {
            Some(b) if b == v => {}
            Some(b) => {
                return Err(RuleError::Instantiation {
                    key: k.clone(),
                    message: format!("given {v}, but the rule instance has {b}"),
                })
            }
            None => {
                return Err(RuleError::Instantiation {
                    key: k.clone(),
                    message: format!("{rule} has no metavariable {k}"),
                })
            }
        }
    }
    Ok(bound)
}

fn ax(ps: &[Sequent], c: &Sequent) -> R<Instantiation> {
    premises(ps, 0, "0")?;
    if c.context.contains(&c.goal) {
        Ok(bind(&[("M", &c.goal.left)]))
    } else {
        Err(RuleError::Context(format!("goal {} is not in the context", c.goal)))
    }
}

fn wr(ps: &[Sequent], c: &Sequent) -> R<Instantiation> {
    premises(ps, 1, "1")?;
    let p = &ps[0];
    if p.goal != c.goal {
        return shape(format!("goal changed from {} to {}", p.goal, c.goal));
    }
    if let Some(m) = p.context.iter().find(|m| !c.context.contains(m)) {
        return Err(RuleError::Context(format!("{m} was dropped")));
    }
    Ok(Instantiation::new())
}

fn exists_i(ps: &[Sequent], c: &Sequent) -> R<Instantiation> {
    premises(ps, 1, "1")?;
    let p = &ps[0];
    same_context(p, c)?;
    if !is_t(&c.goal.right) || !is_t(&p.goal.right) {
        return shape("both goals must be matched with T");
    }
    let Construction::Application(q, fs) = &c.goal.left else {
        return shape("conclusion goal is not ∃(F)");
    };
    let (Some(Builtin::Exists(_)), [f]) = (q.builtin(), fs.as_slice()) else {
        return shape("conclusion goal is not ∃(F)");
    };
    let Construction::Application(f2, xs) = &p.goal.left else {
        return shape("premise goal is not F(A)");
    };
    let [a] = xs.as_slice() else {
        return shape("premise goal must apply F to one argument");
    };
    if **f2 != *f {
        return shape(format!("premise applies {f2}, conclusion quantifies {f}"));
    }
    Ok(bind(&[("F", f), ("A", a)]))
}

fn beta_exp(ps: &[Sequent], c: &Sequent, sig: &Signature) -> R<Instantiation> {
    let Construction::Application(head, xs) = &c.goal.left else {
        return shape("conclusion goal is not [λx̃.Y](X̄)");
    };
    let Construction::Lambda(binders, y) = &**head else {
        return shape("conclusion goal is not [λx̃.Y](X̄)");
    };
    if binders.len() != xs.len() {
        return shape("λ arity differs from the number of arguments");
    }
    if c.goal.right.is_empty() {
        return shape("β-expansion needs a non-empty match");
    }
    if ps.len() < 2 {
        return Err(RuleError::Premises {
            expected: "at least 2",
            found: ps.len(),
        });
    }
    require_exec_free(y, "the λ body")?;
    if binders.len() > 1 {
        for b in binders {
            if let Some(x) = xs.iter().find(|x| x.is_free(b)) {
                return Err(RuleError::SideCondition(format!(
                    "binder {} is free in the argument {x}",
                    b.name
                )));
            }
        }
    }
    for p in ps {
        same_context(p, c)?;
    }
    let pairs: Vec<(Construction, Variable)> = xs.iter().cloned().zip(binders.iter().cloned()).collect();
    let computed = substitute_all(&pairs, y);
    let is_main = |p: &Sequent| {
        p.goal.right == c.goal.right
            && (p.goal.left == computed
                || typed_sub_form(&p.goal.left, sig).is_some_and(|f| f.pairs == pairs && f.target == **y))
    };
    let mut last_err = RuleError::Substitution {
        expected: computed.clone(),
        found: ps[0].goal.left.clone(),
    };
    for (i, main) in ps.iter().enumerate() {
        if !is_main(main) {
            continue;
        }
        let rest: Vec<&Sequent> = ps.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        let stray = rest
            .iter()
            .find(|p| p.goal.right.is_empty() || !xs.contains(&p.goal.left));
        if let Some(p) = stray {
            last_err = RuleError::Shape(format!(
                "premise {} is not a properness premise for an argument",
                p.goal
            ));
            continue;
        }
        if let Some(x) = xs.iter().find(|x| !rest.iter().any(|p| p.goal.left == **x)) {
            last_err = RuleError::SideCondition(format!("no premise shows that {x} is proper"));
            continue;
        }
        let mut b = bind(&[("Y", y)]);
        for (i, (x, v)) in pairs.iter().enumerate() {
            b.insert(format!("X{}", i + 1), x.clone());
            b.insert(format!("x{}", i + 1), Construction::Variable(v.clone()));
        }
        return Ok(b);
    }
    if !ps.iter().any(is_main) {
        if let Some(p) = ps.iter().find(|p| p.goal.right == c.goal.right) {
            last_err = RuleError::Substitution {
                expected: computed,
                found: p.goal.left.clone(),
            };
        }
    }
    Err(last_err)
}

fn intro_var(m: &Match) -> Option<&Variable> {
    match &m.right {
        Rhs::Var(v) => Some(v),
        _ => None,
    }
}

fn app_inst(pa: &Sequent, pb: &Sequent, c: &Sequent) -> R<Instantiation> {
    same_context(pa, c)?;
    if pb.goal != c.goal {
        return shape("second premise must have the conclusion's goal");
    }
    let Construction::Application(f, xs) = &pa.goal.left else {
        return shape("first premise goal is not F(X̄)");
    };
    if pa.goal.right.is_empty() {
        return shape("first premise must show F(X̄) proper");
    }
    if let Some(m) = c.context.iter().find(|m| !pb.context.contains(m)) {
        return Err(RuleError::Context(format!("{m} is missing from the second premise")));
    }
    let added: Vec<&Match> = pb.context.iter().filter(|m| !c.context.contains(m)).collect();
    let mut used = vec![false; added.len()];
    let mut take = |target: &Construction| -> Option<Variable> {
        let i = (0..added.len()).find(|&i| !used[i] && added[i].left == *target && intro_var(added[i]).is_some())?;
        used[i] = true;
        intro_var(added[i]).cloned()
    };
    let fv = take(f).ok_or_else(|| RuleError::Context(format!("no match {f}:f introduced")))?;
    let mut xv = Vec::new();
    for x in xs {
        xv.push(take(x).ok_or_else(|| RuleError::Context(format!("no match {x}:x introduced")))?);
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(RuleError::Context(format!(
            "{} is introduced but not part of the instance",
            added[i]
        )));
    }
    let mut all: Vec<&Variable> = vec![&fv];
    all.extend(xv.iter());
    let distinct: BTreeSet<&Variable> = all.iter().copied().collect();
    if distinct.len() != all.len() {
        return Err(RuleError::SideCondition(String::from(
            "introduced variables are not pairwise distinct",
        )));
    }
    let mut others: Vec<&Construction> = vec![&**f];
    others.extend(xs.iter());
    let pinned = |m: &Match| intro_var(m) == Some(&fv) && eta_head(&m.left) == Some(&**f);
    fresh(&fv, &c.context, &c.goal, &others, &pinned)?;
    for x in &xv {
        fresh(x, &c.context, &c.goal, &others, &no_skip)?;
    }
    let fc = Construction::Variable(fv);
    let mut b = bind(&[("F", f), ("f", &fc)]);
    for (i, (x, v)) in xs.iter().zip(xv).enumerate() {
        b.insert(format!("X{}", i + 1), x.clone());
        b.insert(format!("x{}", i + 1), Construction::Variable(v));
    }
    Ok(b)
}

fn lambda_inst(ps: &[Sequent], c: &Sequent) -> R<Instantiation> {
    premises(ps, 1, "1")?;
    let p = &ps[0];
    if p.goal != c.goal {
        return shape("goal changed");
    }
    if let Some(m) = c.context.iter().find(|m| !p.context.contains(m)) {
        return Err(RuleError::Context(format!("{m} is missing from the premise")));
    }
    let added: Vec<&Match> = p.context.iter().filter(|m| !c.context.contains(m)).collect();
    let [m] = added.as_slice() else {
        return Err(RuleError::Context(format!(
            "expected exactly one discharged match, found {}",
            added.len()
        )));
    };
    if !matches!(m.left, Construction::Lambda(..)) {
        return shape(format!("discharged match {m} is not λx̃.Y:f"));
    }
    let Some(f) = intro_var(m) else {
        return shape(format!("discharged match {m} is not λx̃.Y:f"));
    };
    fresh(f, &c.context, &c.goal, &[&m.left], &no_skip)?;
    Ok(bind(&[("λ", &m.left), ("f", &Construction::Variable(f.clone()))]))
}

fn single_pair(f: &SubForm) -> Option<(&Construction, &Variable)> {
    match f.pairs.as_slice() {
        [(d, x)] => Some((d, x)),
        _ => None,
    }
}

fn strictness(x: &Variable, target: &Construction, rhs: &Rhs) -> R<()> {
    let ok = if is_t(rhs) {
        t_strict_in(x, target)
    } else {
        strict_in(x, target)
    };
    if ok {
        Ok(())
    } else {
        Err(RuleError::SideCondition(format!(
            "{} is not strict in {target}: the sub-form can be proper while the replacement is not",
            x.name
        )))
    }
}

fn exec_inst(pa: &Sequent, pb: &Sequent, c: &Sequent, sig: &Signature) -> R<Instantiation> {
    same_context(pa, c)?;
    if pb.goal != c.goal {
        return shape("second premise must have the conclusion's goal");
    }
    let Some(form) = typed_sub_form(&pa.goal.left, sig) else {
        return shape(format!("first premise goal {} is not a sub-form", pa.goal.left));
    };
    let Some((d, x)) = single_pair(&form) else {
        return shape("sub-form must substitute exactly one variable");
    };
    if pa.goal.right.is_empty() {
        return shape("first premise must show the sub-form proper");
    }
    if let Some(m) = c.context.iter().find(|m| !pb.context.contains(m)) {
        return Err(RuleError::Context(format!("{m} is missing from the second premise")));
    }
    let added: Vec<&Match> = pb.context.iter().filter(|m| !c.context.contains(m)).collect();
    let [m] = added.as_slice() else {
        return Err(RuleError::Context(format!(
            "expected exactly one discharged match D:d, found {}",
            added.len()
        )));
    };
    let Some(dv) = intro_var(m).filter(|_| m.left == *d) else {
        return shape(format!("discharged match {m} is not {d}:d"));
    };
    if dv == x {
        return Err(RuleError::SideCondition(String::from("d and x must be distinct")));
    }
    fresh(dv, &c.context, &c.goal, &[d, &form.target], &no_skip)?;
    strictness(x, &form.target, &pa.goal.right)?;
    let xc = Construction::Variable(x.clone());
    let dc = Construction::Variable(dv.clone());
    Ok(bind(&[("C", &form.target), ("D", d), ("x", &xc), ("d", &dc)]))
}

fn eta_con(p1: &Sequent, p2: &Sequent, c: &Sequent) -> R<Instantiation> {
    same_context(p1, c)?;
    same_context(p2, c)?;
    let Some(f) = eta_head(&p1.goal.left) else {
        return shape(format!(
            "{} is not λx̃.F(x̃) with x̃ absent from an execution-free F",
            p1.goal.left
        ));
    };
    if p2.goal.left != *f || p2.goal.right.is_empty() {
        return shape(format!("second premise must show {f} proper"));
    }
    if p1.goal.right.is_empty() {
        return shape("first premise must be a non-empty match");
    }
    if c.goal.left != *f || c.goal.right != p1.goal.right {
        return shape(format!("conclusion must be {f}:{}", p1.goal.right));
    }
    Ok(bind(&[("F", f), ("λ", &p1.goal.left)]))
}

fn rt(p1: &Sequent, p2: &Sequent, c: &Sequent, sig: &Signature) -> R<Instantiation> {
    if p1.context != p2.context {
        return Err(RuleError::Context(String::from("premises have different contexts")));
    }
    if p1.goal.right != p2.goal.right || p1.goal.right.is_empty() {
        return shape("premises must match D₁ and D₂ with the same non-empty right side");
    }
    let Some(goal_form) = typed_sub_form(&c.goal.left, sig) else {
        return shape("conclusion goal is not a sub-form C_(D₁/y)");
    };
    let Some((d1, y)) = single_pair(&goal_form) else {
        return shape("sub-form must substitute exactly one variable");
    };
    if p1.goal.left != *d1 {
        return shape(format!(
            "first premise is about {}, the goal substitutes {d1}",
            p1.goal.left
        ));
    }
    let d2 = &p2.goal.left;
    if c.goal.right.is_empty() {
        return shape("goal must be a non-empty match");
    }
    let target = &goal_form.target;
    require_exec_free(target, "the substitution target")?;
    if synth(target, sig)? != Ty::O {
        return Err(RuleError::SideCondition(format!("{target} is not of type o")));
    }
    if let Some(m) = p1.context.iter().find(|m| !c.context.contains(m)) {
        return Err(RuleError::Context(format!("{m} was dropped")));
    }
    let is_hyp = |m: &Match| {
        m.right == c.goal.right
            && typed_sub_form(&m.left, sig).is_some_and(|f| {
                f.target == *target
                    && f.result_ty == goal_form.result_ty
                    && f.pairs.len() == 1
                    && f.pairs[0].0 == *d2
                    && f.pairs[0].1 == *y
            })
    };
    let added: Vec<&Match> = c.context.iter().filter(|m| !p1.context.contains(m)).collect();
    match added.as_slice() {
        [m] if is_hyp(m) => {}
        [] if c.context.iter().any(is_hyp) => {}
        _ => {
            return Err(RuleError::Context(format!(
                "conclusion context must add exactly C_({d2}/{}):{}",
                y.name, c.goal.right
            )))
        }
    }
    let yc = Construction::Variable(y.clone());
    Ok(bind(&[("C", target), ("D1", d1), ("D2", d2), ("y", &yc)]))
}

fn def_of_sub(ps: &[Sequent], c: &Sequent, sig: &Signature) -> R<Instantiation> {
    premises(ps, 1, "1")?;
    let p = &ps[0];
    if p == c {
        return shape("nothing was rewritten");
    }
    let np = normalize_sequent(p, sig);
    let nc = normalize_sequent(c, sig);
    if np.goal != nc.goal {
        return Err(RuleError::Substitution {
            expected: np.goal.left,
            found: nc.goal.left,
        });
    }
    if np.context != nc.context {
        let extra = nc
            .context
            .iter()
            .find(|m| !np.context.contains(m))
            .or_else(|| np.context.iter().find(|m| !nc.context.contains(m)));
        return Err(RuleError::Context(format!(
            "contexts differ after computing substitutions{}",
            extra.map_or(String::new(), |m| format!(" at {m}"))
        )));
    }
    Ok(Instantiation::new())
}

fn exec_of_acq(c: &Construction) -> Option<(&Ty, &Construction)> {
    let Construction::Application(h, args) = c else {
        return None;
    };
    let (Some(Builtin::Exec(Some(t))), [Construction::Acquisition(b)]) = (h.builtin(), args.as_slice()) else {
        return None;
    };
    Some((t, b))
}

fn exec_rule(p: &Sequent, c: &Sequent, wrapped: &Match, bare: &Match, sig: &Signature) -> R<Instantiation> {
    same_context(p, c)?;
    let Some((t, b)) = exec_of_acq(&wrapped.left) else {
        return shape(format!("{} is not ⌊⌊⌈C⌉⌋⌋_τ", wrapped.left));
    };
    if *b != bare.left || wrapped.right != bare.right {
        return shape(format!("{} does not execute {}", wrapped.left, bare.left));
    }
    let (ct, _) = typed_order(b, sig, Some(t))?;
    if !compatible(&ct, t) {
        return Err(RuleError::SideCondition(format!("{b} is of type {ct}, not {t}")));
    }
    Ok(bind(&[("C", b)]))
}

fn exec_intro(ps: &[Sequent], c: &Sequent, sig: &Signature) -> R<Instantiation> {
    premises(ps, 1, "1")?;
    exec_rule(&ps[0], c, &c.goal, &ps[0].goal, sig)
}

fn exec_elim(ps: &[Sequent], c: &Sequent, sig: &Signature) -> R<Instantiation> {
    premises(ps, 1, "1")?;
    exec_rule(&ps[0], c, &ps[0].goal, &c.goal, sig)
}

/// `∃(λx.C):T`, returning `x` and `C`.
fn exists_lambda(m: &Match) -> Option<(&Variable, &Construction)> {
    if !is_t(&m.right) {
        return None;
    }
    let Construction::Application(q, args) = &m.left else {
        return None;
    };
    let (Some(Builtin::Exists(_)), [Construction::Lambda(xs, body)]) = (q.builtin(), args.as_slice()) else {
        return None;
    };
    let [x] = xs.as_slice() else {
        return None;
    };
    Some((x, body))
}

fn eg_premise_fits(m: &Match, x: &Variable, body: &Construction, sig: &Signature) -> Option<Construction> {
    if !is_t(&m.right) {
        return None;
    }
    let f = typed_sub_form(&m.left, sig)?;
    let (d, y) = single_pair(&f)?;
    (y == x && f.target == *body).then(|| d.clone())
}

fn eg(ps: &[Sequent], c: &Sequent, sig: &Signature) -> R<Instantiation> {
    let Some((x, body)) = exists_lambda(&c.goal) else {
        return shape("conclusion goal is not ∃(λx.C):T");
    };
    require_exec_free(body, "C")?;
    if !t_strict_in(x, body) {
        return Err(RuleError::SideCondition(format!(
            "{} is not strict in {body}: the sub-form can be T while the replacement is improper",
            x.name
        )));
    }
    let d = match ps {
        [] => c
            .context
            .iter()
            .find_map(|m| eg_premise_fits(m, x, body, sig))
            .ok_or_else(|| RuleError::Context(format!("no match C_(D/{}):T with C = {body} in the context", x.name)))?,
        [p] => {
            same_context(p, c)?;
            eg_premise_fits(&p.goal, x, body, sig)
                .ok_or_else(|| RuleError::Shape(format!("premise goal is not C_(D/{}):T with C = {body}", x.name)))?
        }
        _ => {
            return Err(RuleError::Premises {
                expected: "0 or 1",
                found: ps.len(),
            })
        }
    };
    let xc = Construction::Variable(x.clone());
    Ok(bind(&[("C", body), ("D", &d), ("x", &xc)]))
}

fn exists_i_eta(ps: &[Sequent], c: &Sequent) -> R<Instantiation> {
    let Some((x, body)) = exists_lambda(&c.goal) else {
        return shape("conclusion goal is not ∃(λx.F(x)):T");
    };
    let lam = Construction::lambda(vec![x.clone()], body.clone());
    let Some(f) = eta_head(&lam) else {
        return shape(format!("{lam} is not λx.F(x) with x absent from an execution-free F"));
    };
    let fits = |m: &Match| -> Option<Construction> {
        if !is_t(&m.right) {
            return None;
        }
        match &m.left {
            Construction::Application(g, xs) if **g == *f && xs.len() == 1 => Some(xs[0].clone()),
            _ => None,
        }
    };
    let a = match ps {
        [] => c
            .context
            .iter()
            .find_map(fits)
            .ok_or_else(|| RuleError::Context(format!("no match {f}(X):T in the context")))?,
        [p] => {
            same_context(p, c)?;
            fits(&p.goal).ok_or_else(|| RuleError::Shape(format!("premise goal is not {f}(X):T")))?
        }
        _ => {
            return Err(RuleError::Premises {
                expected: "0 or 1",
                found: ps.len(),
            })
        }
    };
    Ok(bind(&[("F", f), ("X", &a)]))
}

/// Direction of the acquisition/execution conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `C:r` to `⌊⌊⌈C⌉⌋⌋_τ:r`
    Intro,
    /// `⌊⌊⌈C⌉⌋⌋_τ:r` to `C:r`
    Elim,
}

/// Rewrites the goal between `C` and `⌊⌊⌈C⌉⌋⌋_τ`, `τ` being the type of `C`.
pub fn acq_exec_rules(dir: Direction, premise: &Sequent, sig: &Signature) -> R<Sequent> {
    let goal = &premise.goal;
    let left = match dir {
        Direction::Intro => {
            let t = synth(&goal.left, sig)?;
            Construction::app(Builtin::Exec(Some(t)), vec![Construction::acq(goal.left.clone())])
        }
        Direction::Elim => match exec_of_acq(&goal.left) {
            Some((t, b)) => {
                let (bt, _) = typed_order(b, sig, Some(t))?;
                if !compatible(&bt, t) {
                    return Err(RuleError::SideCondition(format!("{b} is of type {bt}, not {t}")));
                }
                b.clone()
            }
            None => return shape(format!("{} is not ⌊⌊⌈C⌉⌋⌋_τ", goal.left)),
        },
    };
    Ok(Sequent {
        context: premise.context.clone(),
        goal: Match::new(left, goal.right.clone()),
    })
}
