use alloc::collections::BTreeMap;
use core::fmt;

use crate::syntax::{builtin_by_name, is_reserved_name, Name, Variable};
use crate::types::Ty;

pub const DEFAULT_MAX_ORDER: u32 = 3;

/// Declared constants and variables, plus the order ceiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    constants: BTreeMap<Name, Ty>,
    variables: BTreeMap<Name, Ty>,
    max_order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclError {
    Builtin(Name),
    Reserved(Name),
    Duplicate(Name),
}

impl fmt::Display for DeclError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclError::Builtin(n) => write!(f, "{n} is a builtin constant and cannot be redeclared"),
            DeclError::Reserved(n) => write!(f, "{n} is in the reserved fresh-variable namespace"),
            DeclError::Duplicate(n) => write!(f, "{n} is declared twice"),
        }
    }
}

impl core::error::Error for DeclError {}

impl Default for Signature {
    fn default() -> Self {
        Signature::new()
    }
}

impl Signature {
    pub fn new() -> Self {
        Signature {
            constants: BTreeMap::new(),
            variables: BTreeMap::new(),
            max_order: DEFAULT_MAX_ORDER,
        }
    }

    /// Conventional variable names: `x, y / ι`, `o / o`, `n, n', m / ν`,
    /// `w, w' / ω`, `c¹ / *1`, `c² / *2`.
    pub fn standard() -> Self {
        let mut s = Signature::new();
        let vars = [
            ("x", Ty::IOTA),
            ("y", Ty::IOTA),
            ("o", Ty::O),
            ("n", Ty::NU),
            ("n'", Ty::NU),
            ("m", Ty::NU),
            ("w", Ty::OMEGA),
            ("w'", Ty::OMEGA),
            ("c¹", Ty::Constr(1)),
            ("c²", Ty::Constr(2)),
        ];
        for (n, t) in vars {
            s.declare_variable(n, t).expect("standard names are valid");
        }
        s
    }

    fn check_name(&self, name: &Name) -> Result<(), DeclError> {
        if builtin_by_name(name.as_str()).is_some() {
            return Err(DeclError::Builtin(name.clone()));
        }
        if is_reserved_name(name.as_str()) {
            return Err(DeclError::Reserved(name.clone()));
        }
        if self.constants.contains_key(name) || self.variables.contains_key(name) {
            return Err(DeclError::Duplicate(name.clone()));
        }
        Ok(())
    }

    pub fn declare_constant(&mut self, name: impl Into<Name>, ty: Ty) -> Result<(), DeclError> {
        let name = name.into();
        self.check_name(&name)?;
        self.constants.insert(name, ty);
        Ok(())
    }

    pub fn declare_variable(&mut self, name: impl Into<Name>, ty: Ty) -> Result<(), DeclError> {
        let name = name.into();
        self.check_name(&name)?;
        self.variables.insert(name, ty);
        Ok(())
    }

    /// Replaces any previous declaration of the same name.
    pub fn redeclare_variable(&mut self, name: impl Into<Name>, ty: Ty) {
        let name = name.into();
        self.constants.remove(&name);
        self.variables.insert(name, ty);
    }

    pub fn constant_ty(&self, name: &Name) -> Option<&Ty> {
        self.constants.get(name)
    }

    pub fn variable(&self, name: &Name) -> Option<Variable> {
        self.variables.get(name).map(|t| Variable::new(name.clone(), t.clone()))
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Name, &Ty)> {
        self.constants.iter()
    }

    pub fn variables(&self) -> impl Iterator<Item = (&Name, &Ty)> {
        self.variables.iter()
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn set_max_order(&mut self, n: u32) {
        self.max_order = n;
    }

    /// Adds every declaration of `other` that does not clash with this one.
    pub fn merge(&mut self, other: &Signature) -> Result<(), DeclError> {
        for (n, t) in &other.constants {
            match self.constants.get(n) {
                Some(existing) if existing == t => {}
                Some(_) => return Err(DeclError::Duplicate(n.clone())),
                None => self.declare_constant(n.clone(), t.clone())?,
            }
        }
        for (n, t) in &other.variables {
            match self.variables.get(n) {
                Some(existing) if existing == t => {}
                Some(_) => return Err(DeclError::Duplicate(n.clone())),
                None => self.declare_variable(n.clone(), t.clone())?,
            }
        }
        Ok(())
    }
}
