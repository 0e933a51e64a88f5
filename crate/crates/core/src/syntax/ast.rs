use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::types::Ty;

/// An identifier for constants and variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(String);

impl Name {
    pub fn new(s: impl Into<String>) -> Self {
        Name(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name(s.into())
    }
}

/// A typed variable. Two variables are the same variable only when both the
/// name and the range agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: Name,
    pub ty: Ty,
}

impl Variable {
    pub fn new(name: impl Into<Name>, ty: Ty) -> Self {
        Variable { name: name.into(), ty }
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(s)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.ty)
    }
}

/// Constants with a fixed meaning in every model.
///
/// The schematic ones (`∃`, `∀`, `=`, `Sub`, execution) carry an optional
/// index; when it is absent the type checker resolves it from the arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    True,
    False,
    Not,
    Div,
    Odd,
    Improp,
    Eq(Option<Ty>),
    Exists(Option<Ty>),
    Forall(Option<Ty>),
    Sub(Option<u32>),
    Exec(Option<Ty>),
    Triv,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    /// Declared in a signature and interpreted by a model.
    Named(Name),
    /// Numeral of type ν.
    Nat(u64),
    Builtin(Builtin),
}

impl Constant {
    pub fn named(s: &str) -> Self {
        Constant::Named(Name::new(s))
    }
}

/// The five construction forms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Construction {
    Constant(Constant),
    Variable(Variable),
    Application(Box<Construction>, Vec<Construction>),
    Lambda(Vec<Variable>, Box<Construction>),
    Acquisition(Box<Construction>),
}

impl From<Variable> for Construction {
    fn from(v: Variable) -> Self {
        Construction::Variable(v)
    }
}

impl From<Constant> for Construction {
    fn from(c: Constant) -> Self {
        Construction::Constant(c)
    }
}

impl From<Builtin> for Construction {
    fn from(b: Builtin) -> Self {
        Construction::Constant(Constant::Builtin(b))
    }
}

/// Free or bound, per occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Free,
    Bound,
}

/// One occurrence of a variable. `path` lists child indices from the root:
/// for an application the head is child 0 and argument `i` is child `i + 1`;
/// a λ body and an acquisition body are child 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarOccurrence {
    pub variable: Variable,
    pub path: Vec<usize>,
    pub status: Status,
}

impl Construction {
    pub fn var(name: &str, ty: Ty) -> Self {
        Construction::Variable(Variable::new(name, ty))
    }

    pub fn constant(name: &str) -> Self {
        Construction::Constant(Constant::named(name))
    }

    pub fn nat(k: u64) -> Self {
        Construction::Constant(Constant::Nat(k))
    }

    pub fn app(head: impl Into<Construction>, args: Vec<Construction>) -> Self {
        assert!(!args.is_empty(), "application needs at least one argument");
        Construction::Application(Box::new(head.into()), args)
    }

    pub fn lambda(binders: Vec<Variable>, body: Construction) -> Self {
        assert!(!binders.is_empty(), "λ needs at least one binder");
        Construction::Lambda(binders, Box::new(body))
    }

    pub fn acq(body: Construction) -> Self {
        Construction::Acquisition(Box::new(body))
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Construction::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn builtin(&self) -> Option<&Builtin> {
        match self {
            Construction::Constant(Constant::Builtin(b)) => Some(b),
            _ => None,
        }
    }

    /// Variables with at least one free occurrence. Nothing under an
    /// acquisition is ever free.
    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_free(&self, x: &Variable) -> bool {
        match self {
            Construction::Constant(_) | Construction::Acquisition(_) => false,
            Construction::Variable(v) => v == x,
            Construction::Application(h, args) => h.is_free(x) || args.iter().any(|a| a.is_free(x)),
            Construction::Lambda(bs, body) => !bs.contains(x) && body.is_free(x),
        }
    }

    /// Every variable that appears anywhere, binders and acquisition bodies
    /// included.
    pub fn all_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| match c {
            Construction::Variable(v) => {
                out.insert(v.clone());
            }
            Construction::Lambda(bs, _) => out.extend(bs.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Variables the value of this construction may depend on: the free ones
    /// plus everything mentioned inside acquisitions, which an execution can
    /// bring back to life.
    pub fn live_vars(&self) -> BTreeSet<Variable> {
        let mut out = self.free_vars();
        self.visit(&mut |c| {
            if let Construction::Acquisition(b) = c {
                out.extend(b.all_vars());
            }
        });
        out
    }

    /// True if `x` occurs free, or anywhere inside an acquisition.
    pub fn mentions(&self, x: &Variable) -> bool {
        if self.is_free(x) {
            return true;
        }
        let mut hit = false;
        self.visit(&mut |c| {
            if let Construction::Acquisition(b) = c {
                hit |= b.all_vars().contains(x);
            }
        });
        hit
    }

    pub fn contains_builtin(&self, pred: impl Fn(&Builtin) -> bool) -> bool {
        let mut hit = false;
        self.visit(&mut |c| {
            if let Some(b) = c.builtin() {
                hit |= pred(b);
            }
        });
        hit
    }

    /// Preorder visit of every subconstruction, acquisition bodies included.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Construction)) {
        f(self);
        match self {
            Construction::Constant(_) | Construction::Variable(_) => {}
            Construction::Application(h, args) => {
                h.visit(f);
                for a in args {
                    a.visit(f);
                }
            }
            Construction::Lambda(_, body) | Construction::Acquisition(body) => body.visit(f),
        }
    }

    /// Preorder list of subconstructions, starting with `self`.
    pub fn subconstructions(&self) -> Vec<&Construction> {
        let mut out = Vec::new();
        self.visit(&mut |c| out.push(c));
        out
    }

    pub fn node_count(&self) -> usize {
        match self {
            Construction::Constant(_) | Construction::Variable(_) => 1,
            Construction::Application(h, args) => {
                1 + h.node_count() + args.iter().map(Construction::node_count).sum::<usize>()
            }
            Construction::Lambda(_, b) | Construction::Acquisition(b) => 1 + b.node_count(),
        }
    }

    /// Equality up to the names of λ-bound variables (binder types must
    /// agree). Constructions that are α-equivalent are still distinct
    /// objects; this is a comparison for display and testing.
    pub fn alpha_eq(&self, other: &Construction) -> bool {
        alpha(self, other, &mut Vec::new())
    }

    /// Every variable occurrence (binder positions excluded) with its status.
    pub fn occurrences(&self) -> Vec<VarOccurrence> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut bound = Vec::new();
        collect_occurrences(self, &mut path, &mut bound, false, &mut out);
        out
    }
}

fn collect_free(c: &Construction, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
    match c {
        Construction::Constant(_) | Construction::Acquisition(_) => {}
        Construction::Variable(v) => {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
        Construction::Application(h, args) => {
            collect_free(h, bound, out);
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Construction::Lambda(bs, body) => {
            let n = bound.len();
            bound.extend(bs.iter().cloned());
            collect_free(body, bound, out);
            bound.truncate(n);
        }
    }
}

fn collect_occurrences(
    c: &Construction,
    path: &mut Vec<usize>,
    bound: &mut Vec<Variable>,
    opaque: bool,
    out: &mut Vec<VarOccurrence>,
) {
    match c {
        Construction::Constant(_) => {}
        Construction::Variable(v) => out.push(VarOccurrence {
            variable: v.clone(),
            path: path.clone(),
            status: if opaque || bound.contains(v) {
                Status::Bound
            } else {
                Status::Free
            },
        }),
        Construction::Application(h, args) => {
            path.push(0);
            collect_occurrences(h, path, bound, opaque, out);
            path.pop();
            for (i, a) in args.iter().enumerate() {
                path.push(i + 1);
                collect_occurrences(a, path, bound, opaque, out);
                path.pop();
            }
        }
        Construction::Lambda(bs, body) => {
            let n = bound.len();
            bound.extend(bs.iter().cloned());
            path.push(0);
            collect_occurrences(body, path, bound, opaque, out);
            path.pop();
            bound.truncate(n);
        }
        Construction::Acquisition(body) => {
            path.push(0);
            collect_occurrences(body, path, bound, true, out);
            path.pop();
        }
    }
}

fn alpha(a: &Construction, b: &Construction, env: &mut Vec<(Variable, Variable)>) -> bool {
    use Construction::*;
    match (a, b) {
        (Constant(x), Constant(y)) => x == y,
        (Variable(x), Variable(y)) => match env.iter().rev().find(|(l, r)| l == x || r == y) {
            Some((l, r)) => l == x && r == y,
            None => x == y,
        },
        (Application(h1, a1), Application(h2, a2)) => {
            a1.len() == a2.len() && alpha(h1, h2, env) && a1.iter().zip(a2).all(|(x, y)| alpha(x, y, env))
        }
        (Lambda(b1, c1), Lambda(b2, c2)) => {
            if b1.len() != b2.len() || b1.iter().zip(b2).any(|(x, y)| x.ty != y.ty) {
                return false;
            }
            let n = env.len();
            env.extend(b1.iter().cloned().zip(b2.iter().cloned()));
            let r = alpha(c1, c2, env);
            env.truncate(n);
            r
        }
        (Acquisition(c1), Acquisition(c2)) => alpha(c1, c2, env),
        _ => false,
    }
}
