use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::model::{Model, ModelError};
use super::value::{Assignment, Closure, EvalResult, Table, Value};
use crate::kernel::{Match, Rhs};
use crate::substitution::substitute;
use crate::syntax::{Builtin, Constant, Construction, Name, Variable};
use crate::types::{builtin_type, compatible, synth, typed_order, Ty};

pub const DEFAULT_MAX_DEPTH: u32 = 64;
pub const DEFAULT_MAX_STEPS: u64 = 50_000_000;

/// Resource and configuration failures. Partiality is never an error: it is
/// [`EvalResult::Improper`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    Budget { steps: u64 },
    Depth { limit: u32 },
    Unassigned(Variable),
    Uninterpreted(Name),
    Domain(ModelError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Budget { steps } => write!(f, "evaluation budget of {steps} steps exhausted"),
            EvalError::Depth { limit } => write!(f, "execution nested deeper than {limit}"),
            EvalError::Unassigned(v) => write!(f, "variable {} has no value", v.name),
            EvalError::Uninterpreted(n) => write!(f, "constant {n} has no interpretation"),
            EvalError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EvalError {}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        EvalError::Domain(e)
    }
}

type R<T> = Result<T, EvalError>;

/// Evaluation with a step budget and an execution-depth limit.
///
/// Application is strict. A λ over enumerable first-order domains becomes a
/// table; a λ with a construction-typed binder, or one too large to tabulate,
/// becomes a closure over the assignment in force.
///
/// Execution re-enters evaluation under the assignment in force. Variables
/// that a re-entered construction mentions but the assignment does not cover
/// take the first element of their domain.
pub struct Evaluator<'m> {
    model: &'m Model,
    steps: u64,
    max_steps: u64,
    depth: u32,
    max_depth: u32,
    body_types: BTreeMap<Construction, Ty>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Self {
        Evaluator {
            model,
            steps: 0,
            max_steps: DEFAULT_MAX_STEPS,
            depth: 0,
            max_depth: DEFAULT_MAX_DEPTH,
            body_types: BTreeMap::new(),
        }
    }

    pub fn with_limits(model: &'m Model, max_steps: u64, max_depth: u32) -> Self {
        Evaluator {
            max_steps,
            max_depth,
            ..Evaluator::new(model)
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            Err(EvalError::Budget { steps: self.max_steps })
        } else {
            Ok(())
        }
    }

    pub fn eval(&mut self, c: &Construction, v: &Assignment) -> R<EvalResult> {
        self.tick()?;
        match c {
            Construction::Variable(x) => self.lookup(x, v).map(EvalResult::Proper),
            Construction::Constant(k) => self.constant(k),
            Construction::Acquisition(b) => Ok(EvalResult::Proper(Value::Construction((**b).clone()))),
            Construction::Lambda(bs, body) => self.lambda(bs, body, v).map(EvalResult::Proper),
            Construction::Application(head, args) => {
                let EvalResult::Proper(f) = self.eval(head, v)? else {
                    return Ok(EvalResult::Improper);
                };
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval(a, v)? {
                        EvalResult::Proper(x) => vals.push(x),
                        EvalResult::Improper => return Ok(EvalResult::Improper),
                    }
                }
                self.apply(&f, vals, v)
            }
        }
    }

    fn lookup(&mut self, x: &Variable, v: &Assignment) -> R<Value> {
        if let Some(d) = v.get(x) {
            return Ok(d.clone());
        }
        if self.depth > 0 {
            if let Some(d) = self.model.domain(&x.ty)?.into_iter().next() {
                return Ok(d);
            }
        }
        Err(EvalError::Unassigned(x.clone()))
    }

    fn constant(&self, k: &Constant) -> R<EvalResult> {
        Ok(match k {
            Constant::Nat(n) if *n <= self.model.frame().nu_max => EvalResult::Proper(Value::Nat(*n)),
            Constant::Nat(_) => EvalResult::Improper,
            Constant::Named(n) => EvalResult::Proper(
                self.model
                    .interpretation(n)
                    .cloned()
                    .ok_or_else(|| EvalError::Uninterpreted(n.clone()))?,
            ),
            Constant::Builtin(Builtin::True) => EvalResult::Proper(Value::T),
            Constant::Builtin(Builtin::False) => EvalResult::Proper(Value::F),
            Constant::Builtin(b) => EvalResult::Proper(Value::Builtin(b.clone())),
        })
    }

    fn body_type(&mut self, body: &Construction) -> Ty {
        if let Some(t) = self.body_types.get(body) {
            return t.clone();
        }
        // untypable bodies only arise from ill-typed input; `o` is a placeholder
        let t = synth(body, self.model.signature()).unwrap_or(Ty::O);
        self.body_types.insert(body.clone(), t.clone());
        t
    }

    fn lambda(&mut self, bs: &[Variable], body: &Construction, v: &Assignment) -> R<Value> {
        let result = self.body_type(body);
        let tabulate = bs.iter().all(|b| !matches!(b.ty, Ty::Constr(_)))
            && bs
                .iter()
                .try_fold(1usize, |acc, b| acc.checked_mul(self.model.domain_size(&b.ty)))
                .is_some_and(|n| n <= self.model.frame().max_tables);
        if !tabulate {
            return Ok(Value::Closure(Closure {
                binders: bs.to_vec(),
                body: body.clone(),
                result,
                env: v.clone(),
            }));
        }
        let arg_tys: Vec<Ty> = bs.iter().map(|b| b.ty.clone()).collect();
        let mut table = Table::empty(arg_tys.clone(), result);
        for point in self.model.tuples(&arg_tys)? {
            let mut v2 = v.clone();
            for (b, d) in bs.iter().zip(&point) {
                v2.set(b.clone(), d.clone());
            }
            if let EvalResult::Proper(r) = self.eval(body, &v2)? {
                let r = self.canonical(&r)?;
                table.entries.insert(point, r);
            }
        }
        Ok(Value::Table(table))
    }

    /// Applies a function value to argument values.
    pub fn apply(&mut self, f: &Value, args: Vec<Value>, v: &Assignment) -> R<EvalResult> {
        self.tick()?;
        match f {
            Value::Table(t) => {
                let mut key = Vec::with_capacity(args.len());
                for a in &args {
                    key.push(self.canonical(a)?);
                }
                Ok(t.get(&key).cloned().map_or(EvalResult::Improper, EvalResult::Proper))
            }
            Value::Closure(c) => {
                if c.binders.len() != args.len() {
                    return Ok(EvalResult::Improper);
                }
                let mut env = c.env.clone();
                for (b, a) in c.binders.iter().zip(args) {
                    env.set(b.clone(), a);
                }
                self.eval(&c.body, &env)
            }
            Value::Builtin(b) => self.builtin(b, args, v),
            _ => Ok(EvalResult::Improper),
        }
    }

    fn builtin(&mut self, b: &Builtin, args: Vec<Value>, v: &Assignment) -> R<EvalResult> {
        use EvalResult::{Improper, Proper};
        let truth = |b: bool| Ok(Proper(Value::Truth(b)));
        match (b, args.as_slice()) {
            (Builtin::Not, [Value::Truth(p)]) => truth(!p),
            (Builtin::Odd, [Value::Nat(n)]) => truth(n % 2 == 1),
            (Builtin::Div, [Value::Nat(a), Value::Nat(d)]) => {
                if *d == 0 || a / d > self.model.frame().nu_max {
                    Ok(Improper)
                } else {
                    Ok(Proper(Value::Nat(a / d)))
                }
            }
            (Builtin::Eq(_), [a, b]) => {
                let same = self.same(a, b)?;
                truth(same)
            }
            (Builtin::Exists(_), [f]) => {
                let e = self.exists(f)?;
                truth(e)
            }
            (Builtin::Forall(_), [f]) => {
                let a = self.forall(f)?;
                truth(a)
            }
            (Builtin::Improp, [Value::Construction(c)]) => {
                let i = self.improper_everywhere(c, v)?;
                truth(i)
            }
            (Builtin::Triv, [x]) => Ok(self
                .model
                .canonical_name(x)
                .map_or(Improper, |c| Proper(Value::Construction(c)))),
            (Builtin::Sub(n), [Value::Construction(d), Value::Construction(xc), Value::Construction(c)]) => {
                Ok(self.sub(*n, d, xc, c))
            }
            (Builtin::Exec(t), [Value::Construction(c)]) => self.exec(t.as_ref(), c, v),
            _ => Ok(Improper),
        }
    }

    fn sub(&self, n: Option<u32>, d: &Construction, xc: &Construction, c: &Construction) -> EvalResult {
        let Some(x) = xc.as_variable() else {
            return EvalResult::Improper;
        };
        let sig = self.model.signature();
        let Ok((dty, dord)) = typed_order(d, sig, Some(&x.ty)) else {
            return EvalResult::Improper;
        };
        if !compatible(&dty, &x.ty) {
            return EvalResult::Improper;
        }
        if let Some(n) = n {
            let corder = typed_order(c, sig, None).map_or(0, |(_, k)| k);
            if dord > n || x.ty.order() > n || corder > n {
                return EvalResult::Improper;
            }
        }
        EvalResult::Proper(Value::Construction(substitute(d, x, c)))
    }

    fn exec(&mut self, t: Option<&Ty>, c: &Construction, v: &Assignment) -> R<EvalResult> {
        if let Some(t) = t {
            match typed_order(c, self.model.signature(), Some(t)) {
                Ok((ct, _)) if compatible(&ct, t) => {}
                _ => return Ok(EvalResult::Improper),
            }
        }
        if self.depth >= self.max_depth {
            return Err(EvalError::Depth { limit: self.max_depth });
        }
        self.depth += 1;
        let r = self.eval(c, v);
        self.depth -= 1;
        r
    }

    /// True iff `c` is improper under every way of assigning the variables
    /// it mentions, the rest of `v` held fixed.
    fn improper_everywhere(&mut self, c: &Construction, v: &Assignment) -> R<bool> {
        let vars: Vec<Variable> = c.live_vars().into_iter().collect();
        let tys: Vec<Ty> = vars.iter().map(|x| x.ty.clone()).collect();
        for point in self.model.tuples(&tys)? {
            let mut v2 = v.clone();
            for (x, d) in vars.iter().zip(point) {
                v2.set(x.clone(), d);
            }
            self.depth += 1;
            let r = self.eval(c, &v2);
            self.depth -= 1;
            if r?.is_proper() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn fun_args(&self, f: &Value) -> Option<Vec<Ty>> {
        match f {
            Value::Table(t) => Some(t.args.clone()),
            Value::Closure(c) => Some(c.binders.iter().map(|b| b.ty.clone()).collect()),
            Value::Builtin(b) => match builtin_type(b)? {
                Ty::Fun(args, _) => Some(args),
                _ => None,
            },
            _ => None,
        }
    }

    /// `∃`: some argument is mapped to `T`.
    pub fn exists(&mut self, f: &Value) -> R<bool> {
        if let Value::Table(t) = f {
            return Ok(t.entries.values().any(|r| *r == Value::T));
        }
        let Some(args) = self.fun_args(f) else {
            return Ok(false);
        };
        for p in self.model.tuples(&args)? {
            if self.apply(f, p, &Assignment::new())?.is_true() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `∀`: every argument is mapped to `T`; any gap or `F` makes it false.
    pub fn forall(&mut self, f: &Value) -> R<bool> {
        let Some(args) = self.fun_args(f) else {
            return Ok(false);
        };
        for p in self.model.tuples(&args)? {
            if !self.apply(f, p, &Assignment::new())?.is_true() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Normal form used for comparison and as table keys: every function
    /// value becomes a table over its whole domain.
    pub fn canonical(&mut self, x: &Value) -> R<Value> {
        match x {
            Value::Table(t) => {
                let mut entries = BTreeMap::new();
                for (k, r) in &t.entries {
                    entries.insert(k.clone(), self.canonical(r)?);
                }
                Ok(Value::Table(Table {
                    args: t.args.clone(),
                    result: t.result.clone(),
                    entries,
                }))
            }
            Value::Closure(_) | Value::Builtin(_) => {
                let Some(args) = self.fun_args(x) else {
                    return Ok(x.clone());
                };
                let result = match x {
                    Value::Closure(c) => c.result.clone(),
                    Value::Builtin(b) => match builtin_type(b) {
                        Some(Ty::Fun(_, r)) => *r,
                        _ => return Ok(x.clone()),
                    },
                    _ => unreachable!(),
                };
                let mut t = Table::empty(args.clone(), result);
                for p in self.model.tuples(&args)? {
                    if let EvalResult::Proper(r) = self.apply(x, p.clone(), &Assignment::new())? {
                        let r = self.canonical(&r)?;
                        t.entries.insert(p, r);
                    }
                }
                Ok(Value::Table(t))
            }
            other => Ok(other.clone()),
        }
    }

    /// Extensional identity of two values.
    pub fn same(&mut self, a: &Value, b: &Value) -> R<bool> {
        let a = self.canonical(a)?;
        let b = self.canonical(b)?;
        Ok(same_canonical(&a, &b))
    }

    /// Same result: both improper, or equal values.
    pub fn congruent(&mut self, c1: &Construction, c2: &Construction, v: &Assignment) -> R<bool> {
        let r1 = self.eval(c1, v)?;
        let r2 = self.eval(c2, v)?;
        self.results_agree(&r1, &r2)
    }

    pub fn results_agree(&mut self, r1: &EvalResult, r2: &EvalResult) -> R<bool> {
        match (r1, r2) {
            (EvalResult::Improper, EvalResult::Improper) => Ok(true),
            (EvalResult::Proper(a), EvalResult::Proper(b)) => self.same(a, b),
            _ => Ok(false),
        }
    }

    /// `v` satisfies `C:x` when both sides are congruent; `C:_` when `C` is
    /// improper.
    pub fn satisfies(&mut self, m: &Match, v: &Assignment) -> R<bool> {
        match &m.right {
            Rhs::Empty => Ok(!self.eval(&m.left, v)?.is_proper()),
            r => {
                let rc = r.construction().expect("non-empty");
                self.congruent(&m.left, &rc, v)
            }
        }
    }
}

fn same_canonical(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Table(x), Value::Table(y)) => {
            x.entries.len() == y.entries.len()
                && x.entries.iter().zip(&y.entries).all(|((k1, v1), (k2, v2))| {
                    k1.len() == k2.len()
                        && k1.iter().zip(k2).all(|(p, q)| same_canonical(p, q))
                        && same_canonical(v1, v2)
                })
        }
        _ => a == b,
    }
}

/// One-shot evaluation with default limits.
pub fn evaluate(c: &Construction, m: &Model, v: &Assignment) -> R<EvalResult> {
    Evaluator::new(m).eval(c, v)
}

pub fn congruent(c1: &Construction, c2: &Construction, m: &Model, v: &Assignment) -> R<bool> {
    Evaluator::new(m).congruent(c1, c2, v)
}

pub fn match_satisfied(mt: &Match, m: &Model, v: &Assignment) -> R<bool> {
    Evaluator::new(m).satisfies(mt, v)
}

pub fn builtin_exists(f: &Value, m: &Model) -> R<bool> {
    Evaluator::new(m).exists(f)
}

pub fn builtin_forall(f: &Value, m: &Model) -> R<bool> {
    Evaluator::new(m).forall(f)
}
