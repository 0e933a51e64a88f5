use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::value::{Table, Value};
use crate::signature::{DeclError, Signature};
use crate::syntax::{Builtin, Construction, Name};
use crate::types::{typed_order, BaseTy, Ty};

pub const DEFAULT_NU_MAX: u64 = 7;
pub const DEFAULT_MAX_TABLES: usize = 1 << 16;

/// Finite base domains. ν is always the segment `0..=nu_max`; truth values
/// are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub individuals: Vec<Name>,
    pub worlds: Vec<Name>,
    pub nu_max: u64,
    /// Largest function-type domain that may be enumerated.
    pub max_tables: usize,
    pub allow_empty_iota: bool,
}

impl Frame {
    /// Individuals `i0, i1, …` and worlds `w0, w1, …`.
    pub fn new(iota: usize, nu_max: u64, omega: usize) -> Self {
        Frame {
            individuals: (0..iota).map(|i| Name::new(format!("i{i}"))).collect(),
            worlds: (0..omega).map(|i| Name::new(format!("w{i}"))).collect(),
            nu_max,
            max_tables: DEFAULT_MAX_TABLES,
            allow_empty_iota: false,
        }
    }

    pub fn with_names(individuals: Vec<Name>, worlds: Vec<Name>, nu_max: u64) -> Self {
        Frame {
            individuals,
            worlds,
            nu_max,
            max_tables: DEFAULT_MAX_TABLES,
            allow_empty_iota: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    EmptyDomain(&'static str),
    Decl(DeclError),
    Undeclared(Name),
    IllTyped { name: Name, ty: Ty },
    TooLarge(Ty),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyDomain(d) => write!(f, "the {d} domain is empty"),
            ModelError::Decl(e) => write!(f, "{e}"),
            ModelError::Undeclared(n) => write!(f, "{n} is not a declared constant"),
            ModelError::IllTyped { name, ty } => write!(f, "interpretation of {name} is not of type {ty}"),
            ModelError::TooLarge(t) => write!(f, "the domain of {t} exceeds the table limit"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<DeclError> for ModelError {
    fn from(e: DeclError) -> Self {
        ModelError::Decl(e)
    }
}

/// A frame, a signature, and an interpretation of its named constants.
///
/// Domain elements are also constants: every individual and world name not
/// already in the signature is declared and denotes its element. These are
/// the canonical names that trivialization produces.
///
/// Construction types range over a finite set of constructions, closed under
/// subconstruction, registered with [`Model::add_constructions`].
#[derive(Clone, Debug)]
pub struct Model {
    frame: Frame,
    sig: Signature,
    interp: BTreeMap<Name, Value>,
    constructions: BTreeMap<Construction, u32>,
}

impl Model {
    pub fn new(sig: Signature, frame: Frame) -> Result<Self, ModelError> {
        if frame.individuals.is_empty() && !frame.allow_empty_iota {
            return Err(ModelError::EmptyDomain("individual"));
        }
        if frame.worlds.is_empty() {
            return Err(ModelError::EmptyDomain("world"));
        }
        let mut m = Model {
            frame,
            sig,
            interp: BTreeMap::new(),
            constructions: BTreeMap::new(),
        };
        let elems: Vec<(Name, Ty, Value)> = m
            .frame
            .individuals
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Ty::IOTA, Value::Individual(i as u32)))
            .chain(
                m.frame
                    .worlds
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), Ty::OMEGA, Value::World(i as u32))),
            )
            .collect();
        for (n, t, v) in elems {
            match m.sig.constant_ty(&n) {
                Some(existing) if *existing == t => {}
                Some(_) => return Err(ModelError::IllTyped { name: n, ty: t }),
                None => m.sig.declare_constant(n.clone(), t)?,
            }
            m.interp.insert(n, v);
        }
        Ok(m)
    }

    /// Standard signature over `0..=n`, one individual and one world.
    pub fn arith(n: u64) -> Self {
        Model::new(Signature::standard(), Frame::new(1, n, 1)).expect("preset is valid")
    }

    /// Two worlds `w0, w1`, one individual `a`, and
    /// `D : (omega)->i` defined only at `w0` (where it yields `a`),
    /// `K : (omega)->((i)->o)` true of `a` at both worlds.
    pub fn intension() -> Self {
        let mut sig = Signature::standard();
        let ind = Ty::fun(vec![Ty::OMEGA], Ty::IOTA);
        let prop = Ty::fun(vec![Ty::OMEGA], Ty::fun(vec![Ty::IOTA], Ty::O));
        sig.declare_constant("D", ind.clone()).expect("fresh");
        sig.declare_constant("K", prop.clone()).expect("fresh");
        let frame = Frame::with_names(
            vec![Name::from("a")],
            vec![Name::from("w0"), Name::from("w1")],
            DEFAULT_NU_MAX,
        );
        let mut m = Model::new(sig, frame).expect("preset is valid");
        let mut d = Table::empty(vec![Ty::OMEGA], Ty::IOTA);
        d.entries.insert(vec![Value::World(0)], Value::Individual(0));
        m.interpret("D", Value::Table(d)).expect("typed");
        let mut k = Table::empty(vec![Ty::OMEGA], Ty::fun(vec![Ty::IOTA], Ty::O));
        for w in 0..2 {
            let mut ext = Table::empty(vec![Ty::IOTA], Ty::O);
            ext.entries.insert(vec![Value::Individual(0)], Value::T);
            k.entries.insert(vec![Value::World(w)], Value::Table(ext));
        }
        m.interpret("K", Value::Table(k)).expect("typed");
        m
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_mut(&mut self) -> &mut Signature {
        &mut self.sig
    }

    pub fn set_max_tables(&mut self, n: usize) {
        self.frame.max_tables = n;
    }

    pub fn interpret(&mut self, name: impl Into<Name>, v: Value) -> Result<(), ModelError> {
        let name = name.into();
        let ty = self
            .sig
            .constant_ty(&name)
            .cloned()
            .ok_or_else(|| ModelError::Undeclared(name.clone()))?;
        if !self.has_type(&v, &ty) {
            return Err(ModelError::IllTyped { name, ty });
        }
        self.interp.insert(name, v);
        Ok(())
    }

    pub fn interpretation(&self, name: &Name) -> Option<&Value> {
        self.interp.get(name)
    }

    pub fn interpretations(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.interp.iter()
    }

    /// Declared constants that still lack an interpretation.
    pub fn uninterpreted(&self) -> Vec<(Name, Ty)> {
        self.sig
            .constants()
            .filter(|(n, _)| !self.interp.contains_key(*n))
            .map(|(n, t)| (n.clone(), t.clone()))
            .collect()
    }

    /// Adds the constructions and all their subconstructions to the
    /// construction-type domains. Untypable ones are skipped.
    pub fn add_constructions<'a>(&mut self, cs: impl IntoIterator<Item = &'a Construction>) {
        for c in cs {
            for s in c.subconstructions() {
                if self.constructions.contains_key(s) {
                    continue;
                }
                if let Ok((_, n)) = typed_order(s, &self.sig, None) {
                    self.constructions.insert(s.clone(), n);
                }
            }
        }
    }

    pub fn constructions(&self) -> impl Iterator<Item = (&Construction, u32)> {
        self.constructions.iter().map(|(c, n)| (c, *n))
    }

    pub fn individual_index(&self, name: &str) -> Option<u32> {
        self.frame
            .individuals
            .iter()
            .position(|n| n.as_str() == name)
            .map(|i| i as u32)
    }

    pub fn world_index(&self, name: &str) -> Option<u32> {
        self.frame
            .worlds
            .iter()
            .position(|n| n.as_str() == name)
            .map(|i| i as u32)
    }

    /// Number of elements of a domain, saturating.
    pub fn domain_size(&self, ty: &Ty) -> usize {
        match ty {
            Ty::Base(BaseTy::Iota) => self.frame.individuals.len(),
            Ty::Base(BaseTy::Truth) => 2,
            Ty::Base(BaseTy::Nat) => (self.frame.nu_max as usize).saturating_add(1),
            Ty::Base(BaseTy::World) => self.frame.worlds.len(),
            Ty::Constr(n) => self.constructions.values().filter(|k| *k <= n).count(),
            Ty::Fun(args, r) => {
                let points = args
                    .iter()
                    .fold(1usize, |acc, a| acc.saturating_mul(self.domain_size(a)));
                let choices = self.domain_size(r).saturating_add(1);
                let mut total = 1usize;
                for _ in 0..points {
                    total = total.saturating_mul(choices);
                    if total == usize::MAX {
                        break;
                    }
                }
                total
            }
        }
    }

    /// All elements of the domain of `ty`, in a fixed order. Function types
    /// yield every total and partial table.
    pub fn domain(&self, ty: &Ty) -> Result<Vec<Value>, ModelError> {
        Ok(match ty {
            Ty::Base(BaseTy::Iota) => (0..self.frame.individuals.len() as u32)
                .map(Value::Individual)
                .collect(),
            Ty::Base(BaseTy::Truth) => vec![Value::F, Value::T],
            Ty::Base(BaseTy::Nat) => (0..=self.frame.nu_max).map(Value::Nat).collect(),
            Ty::Base(BaseTy::World) => (0..self.frame.worlds.len() as u32).map(Value::World).collect(),
            Ty::Constr(n) => self
                .constructions
                .iter()
                .filter(|(_, k)| *k <= n)
                .map(|(c, _)| Value::Construction(c.clone()))
                .collect(),
            Ty::Fun(args, r) => {
                if self.domain_size(ty) > self.frame.max_tables {
                    return Err(ModelError::TooLarge(ty.clone()));
                }
                let points = self.tuples(args)?;
                let cod = self.domain(r)?;
                let mut out = vec![Table::empty(args.clone(), (**r).clone())];
                for p in points {
                    let mut next = Vec::with_capacity(out.len() * (cod.len() + 1));
                    for t in &out {
                        next.push(t.clone());
                        for c in &cod {
                            let mut t2 = t.clone();
                            t2.entries.insert(p.clone(), c.clone());
                            next.push(t2);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Value::Table).collect()
            }
        })
    }

    /// Cartesian product of the argument domains.
    pub fn tuples(&self, args: &[Ty]) -> Result<Vec<Vec<Value>>, ModelError> {
        let mut out: Vec<Vec<Value>> = vec![Vec::new()];
        for a in args {
            let d = self.domain(a)?;
            let mut next = Vec::with_capacity(out.len() * d.len());
            for prefix in &out {
                for e in &d {
                    let mut t = prefix.clone();
                    t.push(e.clone());
                    next.push(t);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Membership of a canonical value in the domain of `ty`.
    pub fn has_type(&self, v: &Value, ty: &Ty) -> bool {
        match (v, ty) {
            (Value::Individual(i), Ty::Base(BaseTy::Iota)) => (*i as usize) < self.frame.individuals.len(),
            (Value::Truth(_), Ty::Base(BaseTy::Truth)) => true,
            (Value::Nat(k), Ty::Base(BaseTy::Nat)) => *k <= self.frame.nu_max,
            (Value::World(i), Ty::Base(BaseTy::World)) => (*i as usize) < self.frame.worlds.len(),
            (Value::Construction(c), Ty::Constr(n)) => typed_order(c, &self.sig, None).map_or(true, |(_, k)| k <= *n),
            (Value::Table(t), Ty::Fun(args, r)) => {
                t.args == *args
                    && t.result == **r
                    && t.entries.iter().all(|(k, v)| {
                        k.len() == args.len()
                            && k.iter().zip(args).all(|(e, a)| self.has_type(e, a))
                            && self.has_type(v, r)
                    })
            }
            (Value::Closure(c), Ty::Fun(..)) => c.ty() == *ty,
            (Value::Builtin(b), t) => crate::types::builtin_type(b).as_ref() == Some(t),
            _ => false,
        }
    }

    /// Human-readable rendering of a value.
    pub fn show(&self, v: &Value) -> String {
        match v {
            Value::Individual(i) => self
                .frame
                .individuals
                .get(*i as usize)
                .map_or_else(|| format!("#i{i}"), |n| String::from(n.as_str())),
            Value::World(i) => self
                .frame
                .worlds
                .get(*i as usize)
                .map_or_else(|| format!("#w{i}"), |n| String::from(n.as_str())),
            Value::Truth(true) => String::from("T"),
            Value::Truth(false) => String::from("F"),
            Value::Nat(k) => format!("{k}"),
            Value::Construction(c) => format!("{}", Construction::acq(c.clone())),
            Value::Builtin(b) => format!("{b}"),
            Value::Closure(c) => format!("{}", Construction::lambda(c.binders.clone(), c.body.clone())),
            Value::Table(t) => {
                let mut s = String::from("{");
                for (i, (k, v)) in t.entries.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    if k.len() == 1 {
                        s.push_str(&self.show(&k[0]));
                    } else {
                        s.push('(');
                        for (j, e) in k.iter().enumerate() {
                            if j > 0 {
                                s.push(',');
                            }
                            s.push_str(&self.show(e));
                        }
                        s.push(')');
                    }
                    s.push_str(" -> ");
                    s.push_str(&self.show(v));
                }
                s.push('}');
                s
            }
        }
    }

    /// The canonical construction of a first-order object, when it has one.
    pub fn canonical_name(&self, v: &Value) -> Option<Construction> {
        Some(match v {
            Value::Nat(k) => Construction::nat(*k),
            Value::Truth(true) => Construction::from(Builtin::True),
            Value::Truth(false) => Construction::from(Builtin::False),
            Value::Individual(i) => Construction::Constant(crate::syntax::Constant::Named(
                self.frame.individuals.get(*i as usize)?.clone(),
            )),
            Value::World(i) => Construction::Constant(crate::syntax::Constant::Named(
                self.frame.worlds.get(*i as usize)?.clone(),
            )),
            Value::Construction(c) => Construction::acq(c.clone()),
            _ => return None,
        })
    }

    /// Every named constant occurring in the constructions.
    pub fn named_constants<'a>(cs: impl IntoIterator<Item = &'a Construction>) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for c in cs {
            c.visit(&mut |s| {
                if let Construction::Constant(crate::syntax::Constant::Named(n)) = s {
                    out.insert(n.clone());
                }
            });
        }
        out
    }
}
