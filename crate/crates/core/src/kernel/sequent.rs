use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::signature::Signature;
use crate::syntax::{Constant, Construction, ParseError, ParseOptions, Parser, Tok, Variable};
use crate::types::{builtin_type, check, elaborate, order_of_construction, Ty, TypeError};

/// Right-hand side of a match.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rhs {
    Var(Variable),
    Const(Constant),
    /// `⌈C₀⌉`, holding `C₀`.
    Acq(Construction),
    /// `_`: the left side is improper.
    Empty,
}

impl Rhs {
    /// The right side read as a construction; `None` for the empty match.
    pub fn construction(&self) -> Option<Construction> {
        match self {
            Rhs::Var(v) => Some(Construction::Variable(v.clone())),
            Rhs::Const(k) => Some(Construction::Constant(k.clone())),
            Rhs::Acq(c) => Some(Construction::acq(c.clone())),
            Rhs::Empty => None,
        }
    }

    pub fn from_construction(c: Construction) -> Option<Rhs> {
        match c {
            Construction::Variable(v) => Some(Rhs::Var(v)),
            Construction::Constant(k) => Some(Rhs::Const(k)),
            Construction::Acquisition(b) => Some(Rhs::Acq(*b)),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Rhs::Empty)
    }

    pub fn ty(&self, sig: &Signature) -> Result<Option<Ty>, TypeError> {
        Ok(match self {
            Rhs::Var(v) => Some(v.ty.clone()),
            Rhs::Const(Constant::Nat(_)) => Some(Ty::NU),
            Rhs::Const(Constant::Named(n)) => Some(
                sig.constant_ty(n)
                    .cloned()
                    .ok_or_else(|| TypeError::UnknownConstant(n.clone()))?,
            ),
            Rhs::Const(k @ Constant::Builtin(b)) => Some(builtin_type(b).ok_or_else(|| TypeError::Ambiguous {
                at: Construction::Constant(k.clone()),
            })?),
            Rhs::Acq(c) => Some(Ty::Constr(order_of_construction(c, sig)?)),
            Rhs::Empty => None,
        })
    }
}

/// `C : x`, `C : X`, `C : ⌈C₀⌉` or `C : _`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub left: Construction,
    pub right: Rhs,
}

impl Match {
    pub fn new(left: Construction, right: Rhs) -> Self {
        Match { left, right }
    }

    pub fn empty(left: Construction) -> Self {
        Match {
            left,
            right: Rhs::Empty,
        }
    }

    /// Type-checks both sides against each other and makes every schematic
    /// index explicit.
    pub fn elaborate(&self, sig: &Signature) -> Result<Match, TypeError> {
        let right = match &self.right {
            Rhs::Acq(c) => Rhs::Acq(elaborate(c, sig, None)?),
            r => r.clone(),
        };
        let expected = right.ty(sig)?;
        let left = elaborate(&self.left, sig, expected.as_ref())?;
        if let Some(t) = &expected {
            check(&left, t, sig)?;
        } else {
            crate::types::synth(&left, sig)?;
        }
        Ok(Match { left, right })
    }
}

/// `Γ ⟶ M`. The context is a set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub context: BTreeSet<Match>,
    pub goal: Match,
}

impl Sequent {
    pub fn new(context: impl IntoIterator<Item = Match>, goal: Match) -> Self {
        Sequent {
            context: context.into_iter().collect(),
            goal,
        }
    }

    pub fn elaborate(&self, sig: &Signature) -> Result<Sequent, TypeError> {
        Ok(Sequent {
            context: self
                .context
                .iter()
                .map(|m| m.elaborate(sig))
                .collect::<Result<_, _>>()?,
            goal: self.goal.elaborate(sig)?,
        })
    }

    /// Every construction in the sequent, right sides included.
    pub fn constructions(&self) -> Vec<Construction> {
        let mut out = Vec::new();
        for m in self.context.iter().chain(core::iter::once(&self.goal)) {
            out.push(m.left.clone());
            if let Some(r) = m.right.construction() {
                out.push(r);
            }
        }
        out
    }

    /// Free variables of every construction in the sequent.
    pub fn free_vars(&self) -> BTreeSet<Variable> {
        self.constructions().iter().flat_map(|c| c.free_vars()).collect()
    }

    /// Variables whose value can influence satisfaction.
    pub fn live_vars(&self) -> BTreeSet<Variable> {
        self.constructions().iter().flat_map(|c| c.live_vars()).collect()
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Empty => f.write_str("_"),
            r => write!(f, "{}", r.construction().expect("non-empty")),
        }
    }
}

impl fmt::Display for Match {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.left, self.right)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.context.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        if !self.context.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "--> {}", self.goal)
    }
}

fn match_in(p: &mut Parser<'_>) -> Result<Match, ParseError> {
    let left = p.construction()?;
    p.expect(&Tok::Colon, "':' in a match")?;
    if p.eat(&Tok::Underscore) {
        return Ok(Match::empty(left));
    }
    let r = p.construction()?;
    match Rhs::from_construction(r) {
        Some(right) => Ok(Match { left, right }),
        None => Err(p.error("the right side of a match must be a variable, a constant or an acquisition")),
    }
}

/// Parses `C : rhs` without type-checking.
pub fn parse_match(src: &str, sig: &Signature) -> Result<Match, ParseError> {
    let mut p = Parser::new(src, sig, ParseOptions::default())?;
    let m = match_in(&mut p)?;
    p.expect_end()?;
    Ok(m)
}

/// Parses `M₁, …, Mₖ --> M` without type-checking.
pub fn parse_sequent(src: &str, sig: &Signature) -> Result<Sequent, ParseError> {
    parse_sequent_with(src, sig, ParseOptions::default())
}

pub fn parse_sequent_with(src: &str, sig: &Signature, opts: ParseOptions) -> Result<Sequent, ParseError> {
    let (context, goal) = parse_sequent_written(src, sig, opts)?;
    Ok(Sequent::new(context, goal))
}

/// Like [`parse_sequent_with`], keeping the context in written order.
pub fn parse_sequent_written(
    src: &str,
    sig: &Signature,
    opts: ParseOptions,
) -> Result<(Vec<Match>, Match), ParseError> {
    let mut p = Parser::new(src, sig, opts)?;
    let mut context = Vec::new();
    if !p.eat(&Tok::Seq) {
        loop {
            context.push(match_in(&mut p)?);
            if p.eat(&Tok::Seq) {
                break;
            }
            p.expect(&Tok::Comma, "',' or '-->'")?;
        }
    }
    let goal = match_in(&mut p)?;
    p.expect_end()?;
    Ok((context, goal))
}
