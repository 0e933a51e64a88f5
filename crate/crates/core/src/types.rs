//! Order-stratified types and the typing statements for constructions.
//!
//! Types are never annotated with an order; `order_of_type` and
//! `order_of_construction` reconstruct it. Cumulativity is limited to
//! construction types: a construction of `*ⁿ` is also accepted where `*ᵐ`
//! with `m ≥ n` is expected.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::signature::Signature;
use crate::syntax::{Builtin, Constant, Construction, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseTy {
    /// ι, individuals.
    Iota,
    /// o, truth values.
    Truth,
    /// ν, natural numbers.
    Nat,
    /// ω, possible worlds.
    World,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Base(BaseTy),
    Fun(Vec<Ty>, Box<Ty>),
    /// `*ⁿ`, the type of nth-order constructions.
    Constr(u32),
}

impl Ty {
    pub const IOTA: Ty = Ty::Base(BaseTy::Iota);
    pub const O: Ty = Ty::Base(BaseTy::Truth);
    pub const NU: Ty = Ty::Base(BaseTy::Nat);
    pub const OMEGA: Ty = Ty::Base(BaseTy::World);

    pub fn fun(args: Vec<Ty>, result: Ty) -> Ty {
        assert!(!args.is_empty());
        Ty::Fun(args, Box::new(result))
    }

    /// `τ ↦ o`
    pub fn set_of(t: Ty) -> Ty {
        Ty::fun(vec![t], Ty::O)
    }

    pub fn order(&self) -> u32 {
        order_of_type(self)
    }
}

pub fn order_of_type(t: &Ty) -> u32 {
    match t {
        Ty::Base(_) => 1,
        Ty::Fun(args, r) => args.iter().map(order_of_type).fold(order_of_type(r), u32::max),
        Ty::Constr(n) => n + 1,
    }
}

/// `actual` may stand where `expected` is required.
pub fn compatible(actual: &Ty, expected: &Ty) -> bool {
    match (actual, expected) {
        (Ty::Constr(a), Ty::Constr(e)) => a <= e,
        _ => actual == expected,
    }
}

/// Symmetric variant used for the two sides of a match or an identity.
pub fn comparable(a: &Ty, b: &Ty) -> bool {
    compatible(a, b) || compatible(b, a)
}

impl fmt::Display for BaseTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseTy::Iota => "i",
            BaseTy::Truth => "o",
            BaseTy::Nat => "nu",
            BaseTy::World => "omega",
        })
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base(b) => write!(f, "{b}"),
            Ty::Constr(n) => write!(f, "*{n}"),
            Ty::Fun(args, r) => {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")->{r}")
            }
        }
    }
}

impl fmt::Debug for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingJudgment {
    pub construction: Construction,
    pub ty: Ty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeError {
    Mismatch {
        at: Construction,
        expected: Ty,
        found: Ty,
    },
    NotAFunction {
        at: Construction,
        found: Ty,
    },
    Arity {
        at: Construction,
        expected: usize,
        found: usize,
    },
    UnknownConstant(Name),
    /// A schematic constant whose index cannot be resolved from context.
    Ambiguous {
        at: Construction,
    },
    NotAConstruction {
        at: Construction,
        found: Ty,
    },
    /// Trivialization has no canonical name for objects of this type.
    NoCanonicalName {
        at: Construction,
        found: Ty,
    },
    OrderLimit {
        at: Construction,
        order: u32,
        max: u32,
    },
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeError::Mismatch { at, expected, found } => {
                write!(f, "type mismatch at {at}: expected {expected}, found {found}")
            }
            TypeError::NotAFunction { at, found } => {
                write!(f, "{at} is applied but has non-function type {found}")
            }
            TypeError::Arity { at, expected, found } => {
                write!(f, "{at}: expected {expected} argument(s), found {found}")
            }
            TypeError::UnknownConstant(n) => write!(f, "constant {n} has no declared type"),
            TypeError::Ambiguous { at } => {
                write!(f, "cannot resolve the index of the schematic constant in {at}")
            }
            TypeError::NotAConstruction { at, found } => {
                write!(f, "{at} should construct a construction, but has type {found}")
            }
            TypeError::NoCanonicalName { at, found } => {
                write!(f, "{at}: objects of type {found} have no canonical name")
            }
            TypeError::OrderLimit { at, order, max } => {
                write!(f, "{at} has order {order}, above the configured maximum {max}")
            }
        }
    }
}

impl core::error::Error for TypeError {}

/// Fixed type of a non-schematic builtin.
pub fn builtin_type(b: &Builtin) -> Option<Ty> {
    Some(match b {
        Builtin::True | Builtin::False => Ty::O,
        Builtin::Not => Ty::fun(vec![Ty::O], Ty::O),
        Builtin::Div => Ty::fun(vec![Ty::NU, Ty::NU], Ty::NU),
        Builtin::Odd => Ty::fun(vec![Ty::NU], Ty::O),
        Builtin::Improp => Ty::fun(vec![Ty::Constr(1)], Ty::O),
        Builtin::Exists(Some(t)) | Builtin::Forall(Some(t)) => Ty::fun(vec![Ty::set_of(t.clone())], Ty::O),
        Builtin::Eq(Some(t)) => Ty::fun(vec![t.clone(), t.clone()], Ty::O),
        Builtin::Sub(Some(n)) => Ty::fun(vec![Ty::Constr(*n), Ty::Constr(*n), Ty::Constr(*n)], Ty::Constr(*n)),
        _ => return None,
    })
}

/// Synthesizes the type of `c`.
pub fn synth(c: &Construction, sig: &Signature) -> Result<Ty, TypeError> {
    let (ty, order) = infer(c, sig, None)?;
    limit(c, order, sig)?;
    Ok(ty)
}

/// Checks `c` against `expected`, honouring cumulativity.
pub fn check(c: &Construction, expected: &Ty, sig: &Signature) -> Result<TypingJudgment, TypeError> {
    let (ty, order) = infer(c, sig, Some(expected))?;
    limit(c, order, sig)?;
    if !compatible(&ty, expected) {
        return Err(TypeError::Mismatch {
            at: c.clone(),
            expected: expected.clone(),
            found: ty,
        });
    }
    Ok(TypingJudgment {
        construction: c.clone(),
        ty: expected.clone(),
    })
}

/// Least `n` such that `c` is an nth-order construction.
pub fn order_of_construction(c: &Construction, sig: &Signature) -> Result<u32, TypeError> {
    infer(c, sig, None).map(|(_, n)| n)
}

/// Type and order together; `expected` only feeds unindexed execution.
pub fn typed_order(c: &Construction, sig: &Signature, expected: Option<&Ty>) -> Result<(Ty, u32), TypeError> {
    infer(c, sig, expected)
}

fn limit(c: &Construction, order: u32, sig: &Signature) -> Result<(), TypeError> {
    if order > sig.max_order() {
        Err(TypeError::OrderLimit {
            at: c.clone(),
            order,
            max: sig.max_order(),
        })
    } else {
        Ok(())
    }
}

fn infer(c: &Construction, sig: &Signature, expected: Option<&Ty>) -> Result<(Ty, u32), TypeError> {
    match c {
        Construction::Variable(v) => Ok((v.ty.clone(), v.ty.order())),
        Construction::Constant(k) => {
            let ty = constant_type(c, k, sig)?;
            let n = ty.order();
            Ok((ty, n))
        }
        Construction::Acquisition(body) => {
            let (_, n) = infer(body, sig, None)?;
            Ok((Ty::Constr(n), n + 1))
        }
        Construction::Lambda(binders, body) => {
            let (bty, border) = infer(body, sig, None)?;
            let ty = Ty::fun(binders.iter().map(|b| b.ty.clone()).collect(), bty);
            let n = binders
                .iter()
                .map(|b| b.ty.order())
                .fold(border.max(ty.order()), u32::max);
            Ok((ty, n))
        }
        Construction::Application(head, args) => {
            if let Some(b) = head.builtin() {
                if let Some(r) = infer_schematic(c, b, args, sig, expected)? {
                    return Ok(r);
                }
            }
            let (hty, mut n) = infer(head, sig, None)?;
            let Ty::Fun(params, result) = hty else {
                return Err(TypeError::NotAFunction {
                    at: (**head).clone(),
                    found: hty,
                });
            };
            if params.len() != args.len() {
                return Err(TypeError::Arity {
                    at: c.clone(),
                    expected: params.len(),
                    found: args.len(),
                });
            }
            for (a, p) in args.iter().zip(&params) {
                let (aty, an) = infer(a, sig, Some(p))?;
                if !compatible(&aty, p) {
                    return Err(TypeError::Mismatch {
                        at: a.clone(),
                        expected: p.clone(),
                        found: aty,
                    });
                }
                n = n.max(an);
            }
            let r = *result;
            n = n.max(r.order());
            Ok((r, n))
        }
    }
}

fn constant_type(at: &Construction, k: &Constant, sig: &Signature) -> Result<Ty, TypeError> {
    match k {
        Constant::Nat(_) => Ok(Ty::NU),
        Constant::Named(n) => sig
            .constant_ty(n)
            .cloned()
            .ok_or_else(|| TypeError::UnknownConstant(n.clone())),
        Constant::Builtin(b) => builtin_type(b).ok_or_else(|| TypeError::Ambiguous { at: at.clone() }),
    }
}

fn construction_arg(a: &Construction, sig: &Signature) -> Result<(u32, u32), TypeError> {
    let (ty, n) = infer(a, sig, None)?;
    match ty {
        Ty::Constr(k) => Ok((k, n)),
        other => Err(TypeError::NotAConstruction {
            at: a.clone(),
            found: other,
        }),
    }
}

fn arity(c: &Construction, args: &[Construction], want: usize) -> Result<(), TypeError> {
    if args.len() != want {
        Err(TypeError::Arity {
            at: c.clone(),
            expected: want,
            found: args.len(),
        })
    } else {
        Ok(())
    }
}

/// Applications of schematic builtins resolve their index from the arguments.
/// Returns `None` for builtins with a fixed type.
fn infer_schematic(
    c: &Construction,
    b: &Builtin,
    args: &[Construction],
    sig: &Signature,
    expected: Option<&Ty>,
) -> Result<Option<(Ty, u32)>, TypeError> {
    let r = match b {
        Builtin::Exists(idx) | Builtin::Forall(idx) => {
            arity(c, args, 1)?;
            let (aty, n) = infer(&args[0], sig, None)?;
            let tau = match &aty {
                Ty::Fun(ps, r) if ps.len() == 1 && **r == Ty::O => ps[0].clone(),
                _ => {
                    let want = Ty::set_of(idx.clone().unwrap_or(Ty::IOTA));
                    return Err(TypeError::Mismatch {
                        at: args[0].clone(),
                        expected: want,
                        found: aty,
                    });
                }
            };
            if let Some(t) = idx {
                if *t != tau {
                    return Err(TypeError::Mismatch {
                        at: args[0].clone(),
                        expected: Ty::set_of(t.clone()),
                        found: aty,
                    });
                }
            }
            let head = Ty::fun(vec![aty], Ty::O);
            (Ty::O, n.max(head.order()))
        }
        Builtin::Eq(idx) => {
            arity(c, args, 2)?;
            let (t1, n1) = infer(&args[0], sig, idx.as_ref())?;
            let (t2, n2) = infer(&args[1], sig, Some(&t1))?;
            let t = idx.clone().unwrap_or_else(|| t1.clone());
            for (a, ty) in [(&args[0], &t1), (&args[1], &t2)] {
                if !comparable(ty, &t) {
                    return Err(TypeError::Mismatch {
                        at: a.clone(),
                        expected: t.clone(),
                        found: ty.clone(),
                    });
                }
            }
            let head = Ty::fun(vec![t.clone(), t], Ty::O);
            (Ty::O, n1.max(n2).max(head.order()))
        }
        Builtin::Sub(idx) => {
            arity(c, args, 3)?;
            let mut ks = [0u32; 3];
            let mut n = 0;
            for (i, a) in args.iter().enumerate() {
                let (k, an) = construction_arg(a, sig)?;
                ks[i] = k;
                n = n.max(an);
            }
            let level = idx.unwrap_or_else(|| ks.iter().copied().max().unwrap_or(1));
            for (a, k) in args.iter().zip(ks) {
                if k > level {
                    return Err(TypeError::Mismatch {
                        at: a.clone(),
                        expected: Ty::Constr(level),
                        found: Ty::Constr(k),
                    });
                }
            }
            (Ty::Constr(level), n.max(level + 1))
        }
        Builtin::Exec(idx) => {
            arity(c, args, 1)?;
            let (k, n) = construction_arg(&args[0], sig)?;
            let tau = match (idx, expected) {
                (Some(t), _) => t.clone(),
                (None, Some(t)) => t.clone(),
                (None, None) => return Err(TypeError::Ambiguous { at: c.clone() }),
            };
            let head = Ty::fun(vec![Ty::Constr(k)], tau.clone());
            let n = n.max(head.order());
            (tau, n)
        }
        Builtin::Triv => {
            arity(c, args, 1)?;
            let (aty, n) = infer(&args[0], sig, None)?;
            let res = match &aty {
                Ty::Base(_) => Ty::Constr(1),
                Ty::Constr(k) => Ty::Constr(k + 1),
                Ty::Fun(..) => {
                    return Err(TypeError::NoCanonicalName {
                        at: args[0].clone(),
                        found: aty,
                    })
                }
            };
            let head = Ty::fun(vec![aty], res.clone());
            (res, n.max(head.order()))
        }
        _ => return Ok(None),
    };
    Ok(Some(r))
}

/// Copy of `c` with every schematic index made explicit: `∃`, `∀` and `=`
/// get their τ, `Sub` its order, execution its result type. Acquisition
/// bodies are elaborated too.
pub fn elaborate(c: &Construction, sig: &Signature, expected: Option<&Ty>) -> Result<Construction, TypeError> {
    infer(c, sig, expected)?;
    elab(c, sig, expected)
}

fn elab(c: &Construction, sig: &Signature, expected: Option<&Ty>) -> Result<Construction, TypeError> {
    Ok(match c {
        Construction::Variable(_) | Construction::Constant(_) => c.clone(),
        Construction::Acquisition(b) => Construction::acq(elab(b, sig, None)?),
        Construction::Lambda(bs, b) => Construction::Lambda(bs.clone(), Box::new(elab(b, sig, None)?)),
        Construction::Application(head, args) => {
            let schematic = match head.builtin() {
                Some(Builtin::Exists(idx)) | Some(Builtin::Forall(idx)) => {
                    let (aty, _) = infer(&args[0], sig, None)?;
                    let tau = match (&aty, idx) {
                        (_, Some(t)) => t.clone(),
                        (Ty::Fun(ps, _), None) => ps[0].clone(),
                        _ => return Err(TypeError::Ambiguous { at: c.clone() }),
                    };
                    let b = match head.builtin() {
                        Some(Builtin::Exists(_)) => Builtin::Exists(Some(tau)),
                        _ => Builtin::Forall(Some(tau)),
                    };
                    Some((b, vec![None]))
                }
                Some(Builtin::Eq(idx)) => {
                    let t = match idx {
                        Some(t) => t.clone(),
                        None => infer(&args[0], sig, None)?.0,
                    };
                    Some((Builtin::Eq(Some(t.clone())), vec![Some(t.clone()), Some(t)]))
                }
                Some(Builtin::Sub(_)) | Some(Builtin::Exec(_)) => match infer(c, sig, expected)? {
                    (Ty::Constr(n), _) if matches!(head.builtin(), Some(Builtin::Sub(_))) => {
                        Some((Builtin::Sub(Some(n)), vec![None, None, None]))
                    }
                    (t, _) => Some((Builtin::Exec(Some(t)), vec![None])),
                },
                Some(Builtin::Triv) => Some((Builtin::Triv, vec![None])),
                _ => None,
            };
            match schematic {
                Some((b, exp)) => {
                    let mut out = Vec::with_capacity(args.len());
                    for (a, e) in args.iter().zip(exp) {
                        out.push(elab(a, sig, e.as_ref())?);
                    }
                    Construction::Application(Box::new(Construction::from(b)), out)
                }
                None => {
                    let (hty, _) = infer(head, sig, None)?;
                    let params = match hty {
                        Ty::Fun(ps, _) => ps,
                        _ => Vec::new(),
                    };
                    let mut out = Vec::with_capacity(args.len());
                    for (i, a) in args.iter().enumerate() {
                        out.push(elab(a, sig, params.get(i))?);
                    }
                    Construction::Application(Box::new(elab(head, sig, None)?), out)
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn sig() -> Signature {
        Signature::standard()
    }

    #[test]
    fn elaboration_fills_indices() {
        let s = sig();
        let c = parse("∃(λn.Odd(÷(3,n)))", &s).unwrap();
        let e = elaborate(&c, &s, None).unwrap();
        assert_eq!(e, parse("∃^nu(λn.Odd(÷(3,n)))", &s).unwrap());
        let c = parse("Odd(⌊⌊c¹⌋⌋)", &s).unwrap();
        assert_eq!(elaborate(&c, &s, None).unwrap(), parse("Odd(⌊⌊c¹⌋⌋_nu)", &s).unwrap());
        let c = parse("Sub(⌈⌈3÷0⌉⌉, ⌈c¹⌉, ⌈Improp(c¹)⌉)", &s).unwrap();
        assert_eq!(
            elaborate(&c, &s, None).unwrap(),
            parse("Sub²(⌈⌈3÷0⌉⌉, ⌈c¹⌉, ⌈Improp(c¹)⌉)", &s).unwrap()
        );
        assert_eq!(elaborate(&e, &s, None).unwrap(), e);
    }

    #[test]
    fn type_orders() {
        assert_eq!(order_of_type(&Ty::O), 1);
        assert_eq!(order_of_type(&Ty::fun(vec![Ty::NU, Ty::NU], Ty::NU)), 1);
        assert_eq!(order_of_type(&Ty::fun(vec![Ty::Constr(1)], Ty::O)), 2);
        assert_eq!(order_of_type(&Ty::Constr(2)), 3);
    }

    #[test]
    fn construction_orders() {
        let s = sig();
        let c = parse("÷(3,0)", &s).unwrap();
        assert_eq!(order_of_construction(&c, &s).unwrap(), 1);
        let c = parse("Improp(⌈3÷n⌉)", &s).unwrap();
        assert_eq!(order_of_construction(&c, &s).unwrap(), 2);
        let c = parse("n", &s).unwrap();
        assert_eq!(order_of_construction(&c, &s).unwrap(), 1);
        let c = parse("⌈⌈÷(3,0)⌉⌉", &s).unwrap();
        assert_eq!(synth(&c, &s).unwrap(), Ty::Constr(2));
    }

    #[test]
    fn checks_quantified_arithmetic() {
        let s = sig();
        let c = parse("∃(λn.Odd(÷(3,n)))", &s).unwrap();
        assert!(check(&c, &Ty::O, &s).is_ok());
        let c = parse("∃^nu(λn.Odd(÷(3,n)))", &s).unwrap();
        assert!(check(&c, &Ty::O, &s).is_ok());
        let c = parse("∃^i(λn.Odd(÷(3,n)))", &s).unwrap();
        assert!(check(&c, &Ty::O, &s).is_err());
    }

    #[test]
    fn rejects_base_type_clash_at_argument() {
        let s = sig();
        let c = parse("÷(3, T)", &s).unwrap();
        match check(&c, &Ty::NU, &s) {
            Err(TypeError::Mismatch { at, expected, found }) => {
                assert_eq!(at, Construction::from(Builtin::True));
                assert_eq!(expected, Ty::NU);
                assert_eq!(found, Ty::O);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn second_order_substitution_application() {
        let s = sig();
        let c = parse("Sub²(⌈⌈3÷0⌉⌉, ⌈c¹⌉, ⌈Improp(c¹)⌉)", &s).unwrap();
        assert!(check(&c, &Ty::Constr(2), &s).is_ok());
        // cumulativity
        assert!(check(&c, &Ty::Constr(3), &s).is_ok());
        assert!(check(&c, &Ty::Constr(1), &s).is_err());
        let c = parse("Sub¹(⌈⌈3÷0⌉⌉, ⌈c¹⌉, ⌈Improp(c¹)⌉)", &s).unwrap();
        assert!(synth(&c, &s).is_err());
        let c = parse("Sub(⌈⌈3÷0⌉⌉, ⌈c¹⌉, ⌈Improp(c¹)⌉)", &s).unwrap();
        assert_eq!(synth(&c, &s).unwrap(), Ty::Constr(2));
    }

    #[test]
    fn execution_needs_a_result_type() {
        let s = sig();
        let c = parse("⌊⌊⌈3÷1⌉⌋⌋", &s).unwrap();
        assert!(matches!(synth(&c, &s), Err(TypeError::Ambiguous { .. })));
        assert!(check(&c, &Ty::NU, &s).is_ok());
        let c = parse("⌊⌊⌈3÷1⌉⌋⌋_nu", &s).unwrap();
        assert_eq!(synth(&c, &s).unwrap(), Ty::NU);
    }

    #[test]
    fn trivialization_types() {
        let s = sig();
        let c = parse("⌈(n)⌉", &s).unwrap();
        assert_eq!(synth(&c, &s).unwrap(), Ty::Constr(1));
        let c = parse("Sub¹(⌈(n)⌉, ⌈n⌉, ⌈3÷n⌉)", &s).unwrap();
        assert_eq!(synth(&c, &s).unwrap(), Ty::Constr(1));
    }

    #[test]
    fn order_limit_is_enforced() {
        let mut s = sig();
        s.set_max_order(1);
        let c = parse("⌈3÷n⌉", &s).unwrap();
        assert!(matches!(synth(&c, &s), Err(TypeError::OrderLimit { .. })));
    }

    #[test]
    fn lambda_synthesizes_function_type() {
        let s = sig();
        let c = parse("λn.Odd(÷(3,n))", &s).unwrap();
        assert_eq!(synth(&c, &s).unwrap(), Ty::set_of(Ty::NU));
    }
}
