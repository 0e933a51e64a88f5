use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::syntax::{Builtin, Construction, Variable};
use crate::types::Ty;

/// A finite partial function. A tuple absent from `entries` is a point where
/// the function is undefined.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Table {
    pub args: Vec<Ty>,
    pub result: Ty,
    pub entries: BTreeMap<Vec<Value>, Value>,
}

impl Table {
    pub fn empty(args: Vec<Ty>, result: Ty) -> Self {
        Table {
            args,
            result,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, key: &[Value]) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn ty(&self) -> Ty {
        Ty::fun(self.args.clone(), self.result.clone())
    }
}

/// A λ whose domain is not tabulated eagerly: construction-typed binders or
/// a product too large for a table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Closure {
    pub binders: Vec<Variable>,
    pub body: Construction,
    pub result: Ty,
    pub env: Assignment,
}

impl Closure {
    pub fn ty(&self) -> Ty {
        Ty::fun(self.binders.iter().map(|b| b.ty.clone()).collect(), self.result.clone())
    }
}

/// Semantic objects.
///
/// Function-typed values have three representations. Equality between them
/// is decided on [`crate::semantics::Evaluator::canonical`] forms, which are
/// always tables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Individual(u32),
    Truth(bool),
    Nat(u64),
    World(u32),
    Table(Table),
    Closure(Closure),
    Construction(Construction),
    Builtin(Builtin),
}

impl Value {
    pub const T: Value = Value::Truth(true);
    pub const F: Value = Value::Truth(false);

    pub fn as_construction(&self) -> Option<&Construction> {
        match self {
            Value::Construction(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_truth(&self) -> Option<bool> {
        match self {
            Value::Truth(b) => Some(*b),
            _ => None,
        }
    }
}

/// `Proper(value)` or `Improper`. Improper is never a value: it is not `F`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvalResult {
    Proper(Value),
    Improper,
}

impl EvalResult {
    pub fn is_proper(&self) -> bool {
        matches!(self, EvalResult::Proper(_))
    }

    pub fn value(&self) -> Option<&Value> {
        match self {
            EvalResult::Proper(v) => Some(v),
            EvalResult::Improper => None,
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, EvalResult::Proper(Value::Truth(true)))
    }
}

/// Valuation of variables. Updates are functional.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(BTreeMap<Variable, Value>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn get(&self, x: &Variable) -> Option<&Value> {
        self.0.get(x)
    }

    pub fn set(&mut self, x: Variable, d: Value) {
        self.0.insert(x, d);
    }

    /// `v(d/x)`
    pub fn with(&self, x: Variable, d: Value) -> Assignment {
        let mut v = self.clone();
        v.set(x, d);
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Variable, Value)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Variable, Value)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}
