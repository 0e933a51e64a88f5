//! Explicit substitution.
//!
//! `substitute(D, x, C)` replaces the free occurrences of `x` in `C` by `D`.
//! Acquisitions are opaque: nothing inside `⌈B⌉` is free, so nothing inside
//! it is ever replaced. λ binders that would capture a free variable of `D`
//! are renamed to the first unused name in the sequence `z0, z1, …`, a
//! namespace the parser refuses in user input.
//!
//! The same function backs the `Sub` builtin at evaluation time and the
//! `Def of Sub` rewriting rule in the kernel.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::signature::Signature;
use crate::syntax::{Builtin, Construction, Name, Variable};
use crate::types::{compatible, order_of_construction, synth, Ty, TypeError};

/// A well-typed triple `⟨D, x, C⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubRequest {
    pub replacement: Construction,
    pub variable: Variable,
    pub target: Construction,
}

impl SubRequest {
    /// Validates that `D` fits the range of `x` and that `C` type-checks.
    pub fn new(
        replacement: Construction,
        variable: Variable,
        target: Construction,
        sig: &Signature,
    ) -> Result<Self, TypeError> {
        let dty = synth(&replacement, sig)?;
        if !compatible(&dty, &variable.ty) {
            return Err(TypeError::Mismatch {
                at: replacement,
                expected: variable.ty,
                found: dty,
            });
        }
        synth(&target, sig)?;
        Ok(SubRequest {
            replacement,
            variable,
            target,
        })
    }

    pub fn apply(&self) -> Construction {
        substitute(&self.replacement, &self.variable, &self.target)
    }
}

/// `C_(D/x)` computed syntactically.
pub fn substitute(d: &Construction, x: &Variable, c: &Construction) -> Construction {
    if !c.is_free(x) {
        return c.clone();
    }
    match c {
        Construction::Variable(_) => d.clone(),
        Construction::Constant(_) | Construction::Acquisition(_) => c.clone(),
        Construction::Application(head, args) => Construction::Application(
            Box::new(substitute(d, x, head)),
            args.iter().map(|a| substitute(d, x, a)).collect(),
        ),
        Construction::Lambda(binders, body) => {
            let dfree = d.free_vars();
            let colliding: Vec<usize> = (0..binders.len()).filter(|&i| dfree.contains(&binders[i])).collect();
            if colliding.is_empty() {
                return Construction::Lambda(binders.clone(), Box::new(substitute(d, x, body)));
            }
            let mut avoid: BTreeSet<Name> = BTreeSet::new();
            for v in body.all_vars().iter().chain(d.all_vars().iter()).chain(binders) {
                avoid.insert(v.name.clone());
            }
            avoid.insert(x.name.clone());
            let mut new_binders = binders.clone();
            let mut new_body = (**body).clone();
            for i in colliding {
                let z = fresh_name(&avoid, binders[i].ty.clone());
                avoid.insert(z.name.clone());
                new_body = substitute(&Construction::Variable(z.clone()), &binders[i], &new_body);
                new_binders[i] = z;
            }
            Construction::Lambda(new_binders, Box::new(substitute(d, x, &new_body)))
        }
    }
}

/// Sequential composition `C_(D₁/x₁)…(D_m/x_m)`.
pub fn substitute_all(pairs: &[(Construction, Variable)], c: &Construction) -> Construction {
    pairs.iter().fold(c.clone(), |acc, (d, x)| substitute(d, x, &acc))
}

fn fresh_name(avoid: &BTreeSet<Name>, ty: Ty) -> Variable {
    (0u64..)
        .map(|k| Name::new(format!("z{k}")))
        .find(|n| !avoid.contains(n))
        .map(|n| Variable::new(n, ty))
        .expect("unbounded sequence")
}

/// First `z<k>` of type `ty` whose name is not used by any variable in `avoid`.
pub fn fresh_variable(avoid: &BTreeSet<Variable>, ty: Ty) -> Variable {
    let names: BTreeSet<Name> = avoid.iter().map(|v| v.name.clone()).collect();
    fresh_name(&names, ty)
}

/// `⌊⌊Subⁿ(⌈D⌉, ⌈x⌉, ⌈C⌉)⌋⌋_τ` with `n` the highest order among the three.
pub fn sub_form(req: &SubRequest, result_ty: Ty, sig: &Signature) -> Result<Construction, TypeError> {
    sub_form_raw(&req.replacement, &req.variable, &req.target, result_ty, sig)
}

pub fn sub_form_raw(
    d: &Construction,
    x: &Variable,
    c: &Construction,
    result_ty: Ty,
    sig: &Signature,
) -> Result<Construction, TypeError> {
    let inner = sub_application(d, x, c, sig)?;
    let out = Construction::app(Builtin::Exec(Some(result_ty.clone())), vec![inner]);
    crate::types::check(&out, &result_ty, sig)?;
    Ok(out)
}

fn sub_application(
    d: &Construction,
    x: &Variable,
    c: &Construction,
    sig: &Signature,
) -> Result<Construction, TypeError> {
    let xc = Construction::Variable(x.clone());
    let n = [d, &xc, c]
        .into_iter()
        .map(|k| order_of_construction(k, sig))
        .try_fold(1u32, |m, k| k.map(|k| m.max(k)))?;
    Ok(Construction::app(
        Builtin::Sub(Some(n)),
        vec![
            Construction::acq(d.clone()),
            Construction::acq(xc),
            Construction::acq(c.clone()),
        ],
    ))
}

/// `C_(D₁/x₁,…,D_m/x_m)`: the innermost `Sub` handles the first pair and
/// each outer one takes the previous `Sub` application as its target.
pub fn multi_sub_form(
    pairs: &[(Construction, Variable)],
    c: &Construction,
    result_ty: Ty,
    sig: &Signature,
) -> Result<Construction, TypeError> {
    let Some(((d0, x0), rest)) = pairs.split_first() else {
        return Ok(c.clone());
    };
    let mut inner = sub_application(d0, x0, c, sig)?;
    for (d, x) in rest {
        let xc = Construction::Variable(x.clone());
        let k = [d, &xc]
            .into_iter()
            .map(|k| order_of_construction(k, sig))
            .try_fold(1u32, |m, k| k.map(|k| m.max(k)))?;
        let n = match crate::types::synth(&inner, sig)? {
            Ty::Constr(m) => m.max(k),
            _ => k,
        };
        inner = Construction::app(
            Builtin::Sub(Some(n)),
            vec![Construction::acq(d.clone()), Construction::acq(xc), inner],
        );
    }
    let out = Construction::app(Builtin::Exec(Some(result_ty.clone())), vec![inner]);
    crate::types::check(&out, &result_ty, sig)?;
    Ok(out)
}

/// A recognized `⌊⌊Sub(⌈D⌉, ⌈x⌉, …)⌋⌋_τ` shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubForm {
    /// Pairs in application order: the first pair is substituted first.
    pub pairs: Vec<(Construction, Variable)>,
    pub target: Construction,
    pub result_ty: Option<Ty>,
}

impl SubForm {
    pub fn computed(&self) -> Construction {
        substitute_all(&self.pairs, &self.target)
    }
}

/// Recognizes `⌊⌊Subⁿ(⌈D⌉,⌈x⌉,⌈C⌉)⌋⌋_τ`, including nested multi-pair forms.
pub fn recognize_sub_form(c: &Construction) -> Option<SubForm> {
    let Construction::Application(head, args) = c else {
        return None;
    };
    let Some(Builtin::Exec(t)) = head.builtin() else {
        return None;
    };
    let [inner] = args.as_slice() else {
        return None;
    };
    let mut pairs = Vec::new();
    let target = peel_sub(inner, &mut pairs)?;
    pairs.reverse();
    Some(SubForm {
        pairs,
        target,
        result_ty: t.clone(),
    })
}

fn peel_sub(c: &Construction, pairs: &mut Vec<(Construction, Variable)>) -> Option<Construction> {
    let Construction::Application(head, args) = c else {
        return None;
    };
    let Some(Builtin::Sub(_)) = head.builtin() else {
        return None;
    };
    let [Construction::Acquisition(d), Construction::Acquisition(xv), rest] = args.as_slice() else {
        return None;
    };
    let x = xv.as_variable()?.clone();
    pairs.push(((**d).clone(), x));
    match rest {
        Construction::Acquisition(target) => Some((**target).clone()),
        other => peel_sub(other, pairs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_with, ParseOptions};
    use alloc::string::ToString;

    fn sig() -> Signature {
        let mut s = Signature::standard();
        s.declare_constant("P", Ty::fun(vec![Ty::IOTA], Ty::O)).unwrap();
        s.declare_constant("D", Ty::fun(vec![Ty::OMEGA], Ty::IOTA)).unwrap();
        s.declare_constant("K", Ty::fun(vec![Ty::OMEGA], Ty::fun(vec![Ty::IOTA], Ty::O)))
            .unwrap();
        s
    }

    fn v(name: &str, s: &Signature) -> Variable {
        s.variable(&Name::from(name)).unwrap()
    }

    #[test]
    fn replaces_free_occurrences() {
        let s = sig();
        let c = parse("Odd(÷(3,n))", &s).unwrap();
        let out = substitute(&Construction::nat(1), &v("n", &s), &c);
        assert_eq!(out, parse("Odd(÷(3,1))", &s).unwrap());
    }

    #[test]
    fn absent_variable_is_identity() {
        let s = sig();
        let c = parse("Improp(⌈÷(3,n)⌉)", &s).unwrap();
        assert_eq!(substitute(&Construction::nat(0), &v("n", &s), &c), c);
        let c = parse("λn:nu.Odd(÷(3,n))", &s).unwrap();
        assert_eq!(substitute(&Construction::nat(0), &v("n", &s), &c), c);
    }

    #[test]
    fn renames_capturing_binder() {
        let s = sig();
        let c = parse("λy:i.=(x,y)", &s).unwrap();
        let y = Construction::Variable(v("y", &s));
        let out = substitute(&y, &v("x", &s), &c);
        let want = parse_with("λz0:i.=(y,z0)", &s, ParseOptions { allow_reserved: true }).unwrap();
        assert_eq!(out, want);
        assert_eq!(out.to_string(), "λz0:i.=(y,z0)");
    }

    #[test]
    fn renames_only_colliding_binders() {
        let s = sig();
        let c = parse("λy:i,n:nu.=(x,y)", &s).unwrap();
        let out = substitute(&Construction::Variable(v("y", &s)), &v("x", &s), &c);
        assert_eq!(out.to_string(), "λz0:i,n:nu.=(y,z0)");
    }

    #[test]
    fn fresh_variables_skip_used_names() {
        let z0 = Variable::new("z0", Ty::IOTA);
        assert_eq!(fresh_variable(&BTreeSet::new(), Ty::IOTA).name.as_str(), "z0");
        let avoid: BTreeSet<_> = [z0].into_iter().collect();
        assert_eq!(fresh_variable(&avoid, Ty::NU).name.as_str(), "z1");
    }

    #[test]
    fn builds_and_recognizes_sub_forms() {
        let s = sig();
        let d = parse("⌈÷(3,0)⌉", &s).unwrap();
        let c = parse("Improp(c¹)", &s).unwrap();
        let f = sub_form_raw(&d, &v("c¹", &s), &c, Ty::O, &s).unwrap();
        assert_eq!(f.to_string(), "⌊⌊Sub²(⌈⌈÷(3,0)⌉⌉,⌈c¹⌉,⌈Improp(c¹)⌉)⌋⌋_o");
        let r = recognize_sub_form(&f).unwrap();
        assert_eq!(r.computed(), parse("Improp(⌈÷(3,0)⌉)", &s).unwrap());

        let d = parse("D(w)", &s).unwrap();
        let c = parse("∀(λw':omega.[K(w')](x))", &s).unwrap();
        let f = sub_form_raw(&d, &v("x", &s), &c, Ty::O, &s).unwrap();
        assert_eq!(f.to_string(), "⌊⌊Sub¹(⌈D(w)⌉,⌈x⌉,⌈∀(λw':omega.K(w')(x))⌉)⌋⌋_o");
    }

    #[test]
    fn multi_pair_forms_nest() {
        let s = sig();
        let c = parse("=(x,y)", &s).unwrap();
        let pairs = vec![
            (parse("D(w)", &s).unwrap(), v("x", &s)),
            (parse("D(w')", &s).unwrap(), v("y", &s)),
        ];
        let f = multi_sub_form(&pairs, &c, Ty::O, &s).unwrap();
        let r = recognize_sub_form(&f).unwrap();
        assert_eq!(r.pairs, pairs);
        assert_eq!(r.computed(), parse("=(D(w),D(w'))", &s).unwrap());
    }

    #[test]
    fn request_rejects_type_clash() {
        let s = sig();
        let c = parse("Odd(n)", &s).unwrap();
        assert!(SubRequest::new(Construction::from(Builtin::True), v("n", &s), c, &s).is_err());
    }
}
