use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::ast::{Builtin, Constant, Construction, Name, Variable};
use super::lexer::{lex, superscript_digit, Pos, Tok, Token};
use crate::signature::Signature;
use crate::types::{BaseTy, Ty};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownConstant {
        name: Name,
        line: usize,
        column: usize,
    },
    Reserved {
        name: Name,
        line: usize,
        column: usize,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, column, message } => write!(f, "{line}:{column}: {message}"),
            ParseError::UnknownConstant { name, line, column } => {
                write!(f, "{line}:{column}: unknown constant or variable {name}")
            }
            ParseError::Reserved { name, line, column } => {
                write!(f, "{line}:{column}: {name} is reserved for fresh variables")
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept identifiers of the form `z<k>`, which the substitution
    /// function uses for renamed binders.
    pub allow_reserved: bool,
}

/// `z` followed by one or more ASCII digits.
pub fn is_reserved_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next() == Some('z') && {
        let rest = cs.as_str();
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
    }
}

fn digits_index(s: &str) -> Option<u32> {
    if s.is_empty() {
        return None;
    }
    let mut n: u32 = 0;
    for c in s.chars() {
        let d = c.to_digit(10).or_else(|| superscript_digit(c))?;
        n = n.checked_mul(10)?.checked_add(d)?;
    }
    Some(n)
}

pub fn base_by_name(s: &str) -> Option<BaseTy> {
    Some(match s {
        "i" | "ι" | "iota" => BaseTy::Iota,
        "o" => BaseTy::Truth,
        "nu" | "ν" => BaseTy::Nat,
        "omega" | "ω" => BaseTy::World,
        _ => return None,
    })
}

/// Identifier spellings of builtin constants.
pub fn builtin_by_name(s: &str) -> Option<Builtin> {
    Some(match s {
        "T" => Builtin::True,
        "F" => Builtin::False,
        "not" => Builtin::Not,
        "div" => Builtin::Div,
        "Odd" => Builtin::Odd,
        "Improp" => Builtin::Improp,
        "eq" => Builtin::Eq(None),
        "exists" => Builtin::Exists(None),
        "forall" => Builtin::Forall(None),
        "Sub" | "sub" => Builtin::Sub(None),
        "triv" => Builtin::Triv,
        "exec" => Builtin::Exec(None),
        _ => {
            if let Some(rest) = s.strip_prefix("Sub").or_else(|| s.strip_prefix("sub")) {
                return digits_index(rest).filter(|n| *n > 0).map(|n| Builtin::Sub(Some(n)));
            }
            if let Some(rest) = s.strip_prefix("exec_") {
                return base_by_name(rest).map(|b| Builtin::Exec(Some(Ty::Base(b))));
            }
            return None;
        }
    })
}

pub struct Parser<'s> {
    toks: Vec<Token>,
    at: usize,
    sig: &'s Signature,
    scope: Vec<Variable>,
    opts: ParseOptions,
    end: Pos,
}

impl<'s> Parser<'s> {
    pub fn new(src: &str, sig: &'s Signature, opts: ParseOptions) -> Result<Self, ParseError> {
        let toks = lex(src).map_err(|(p, message)| ParseError::Syntax {
            line: p.line,
            column: p.column,
            message,
        })?;
        let end = match src.lines().count() {
            0 => Pos { line: 1, column: 1 },
            n => Pos {
                line: n,
                column: src.lines().last().map_or(0, |l| l.chars().count()) + 1,
            },
        };
        Ok(Parser {
            toks,
            at: 0,
            sig,
            scope: Vec::new(),
            opts,
            end,
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError::Syntax {
            line: p.line,
            column: p.column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.tok.clone());
        self.at += 1;
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {what}, found {t:?}")),
            None => self.error(format!("expected {what}, found end of input")),
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    // ---- types ----

    pub fn ty(&mut self) -> Result<Ty, ParseError> {
        let first = match self.peek() {
            Some(Tok::LParen) | Some(Tok::LAngle) => {
                let close = if self.bump() == Some(Tok::LParen) {
                    Tok::RParen
                } else {
                    Tok::RAngle
                };
                let mut args = vec![self.ty()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.ty()?);
                }
                self.expect(&close, "closing bracket of a type")?;
                if self.eat(&Tok::Arrow) {
                    let r = self.ty()?;
                    return Ok(Ty::fun(args, r));
                }
                if args.len() != 1 {
                    return Err(self.error("argument list without '->'"));
                }
                return Ok(args.pop().expect("one element"));
            }
            _ => self.ty_atom()?,
        };
        if self.eat(&Tok::Arrow) {
            let r = self.ty()?;
            Ok(Ty::fun(vec![first], r))
        } else {
            Ok(first)
        }
    }

    /// A base type, `*n`, or a bracketed type.
    pub fn ty_atom(&mut self) -> Result<Ty, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => match base_by_name(&s) {
                Some(b) => {
                    self.at += 1;
                    Ok(Ty::Base(b))
                }
                None => Err(self.error(format!("unknown type {s}"))),
            },
            Some(Tok::Star(n)) => {
                self.at += 1;
                if n == 0 {
                    return Err(self.error("construction orders start at 1"));
                }
                Ok(Ty::Constr(n))
            }
            Some(Tok::LBrack) => {
                self.at += 1;
                let t = self.ty()?;
                self.expect(&Tok::RBrack, "']'")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    // ---- constructions ----

    pub fn construction(&mut self) -> Result<Construction, ParseError> {
        if self.peek() == Some(&Tok::Lambda) || matches!(self.peek(), Some(Tok::Ident(s)) if s == "lambda") {
            return self.lambda();
        }
        let mut lhs = self.postfix()?;
        while self.eat(&Tok::Div) {
            let rhs = self.postfix()?;
            lhs = Construction::app(Builtin::Div, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn lambda(&mut self) -> Result<Construction, ParseError> {
        self.at += 1;
        let mut binders = Vec::new();
        loop {
            let pos = self.pos();
            let name = match self.bump() {
                Some(Tok::Ident(s)) => Name::new(s),
                _ => {
                    self.at -= 1;
                    return Err(self.unexpected("a binder name"));
                }
            };
            self.check_reserved(&name, pos)?;
            let ty = if self.eat(&Tok::Colon) {
                self.ty()?
            } else {
                match self.sig.variable(&name) {
                    Some(v) => v.ty,
                    None => {
                        return Err(ParseError::Syntax {
                            line: pos.line,
                            column: pos.column,
                            message: format!("binder {name} needs a type annotation"),
                        })
                    }
                }
            };
            let v = Variable::new(name, ty);
            if binders.contains(&v) {
                return Err(self.error(format!("binder {} repeated", v.name)));
            }
            binders.push(v);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Dot, "'.' after λ binders")?;
        let depth = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.construction();
        self.scope.truncate(depth);
        Ok(Construction::Lambda(binders, Box::new(body?)))
    }

    fn check_reserved(&self, name: &Name, pos: Pos) -> Result<(), ParseError> {
        if !self.opts.allow_reserved && is_reserved_name(name.as_str()) {
            return Err(ParseError::Reserved {
                name: name.clone(),
                line: pos.line,
                column: pos.column,
            });
        }
        Ok(())
    }

    fn postfix(&mut self) -> Result<Construction, ParseError> {
        let mut c = self.atom()?;
        while self.eat(&Tok::LParen) {
            let mut args = vec![self.construction()?];
            while self.eat(&Tok::Comma) {
                args.push(self.construction()?);
            }
            self.expect(&Tok::RParen, "')' closing the argument list")?;
            c = Construction::Application(Box::new(c), args);
        }
        Ok(c)
    }

    fn index_ty(&mut self) -> Result<Option<Ty>, ParseError> {
        if self.eat(&Tok::Caret) {
            Ok(Some(self.ty_atom()?))
        } else {
            Ok(None)
        }
    }

    fn close_acq(&mut self) -> Result<(), ParseError> {
        if self.eat(&Tok::AcqClose) || self.eat(&Tok::RBrack) {
            Ok(())
        } else {
            Err(self.unexpected("'⌉' closing an acquisition"))
        }
    }

    fn atom(&mut self) -> Result<Construction, ParseError> {
        let pos = self.pos();
        let Some(tok) = self.bump() else {
            return Err(self.unexpected("a construction"));
        };
        let b = |b: Builtin| Ok(Construction::from(b));
        match tok {
            Tok::Num(k) => Ok(Construction::nat(k)),
            Tok::Div => b(Builtin::Div),
            Tok::Not => b(Builtin::Not),
            Tok::Top => b(Builtin::True),
            Tok::Bottom => b(Builtin::False),
            Tok::Eq => {
                let t = self.index_ty()?;
                b(Builtin::Eq(t))
            }
            Tok::Exists => {
                let t = self.index_ty()?;
                b(Builtin::Exists(t))
            }
            Tok::Forall => {
                let t = self.index_ty()?;
                b(Builtin::Forall(t))
            }
            Tok::LBrack => {
                let c = self.construction()?;
                self.expect(&Tok::RBrack, "']'")?;
                Ok(c)
            }
            Tok::AcqOpen => {
                if self.eat(&Tok::LParen) {
                    let c = self.construction()?;
                    self.expect(&Tok::RParen, "')' in a trivialization")?;
                    self.close_acq()?;
                    return Ok(Construction::app(Builtin::Triv, vec![c]));
                }
                let c = self.construction()?;
                self.close_acq()?;
                Ok(Construction::acq(c))
            }
            Tok::ExecOpen => {
                let body = if self.eat(&Tok::Middot) {
                    None
                } else {
                    Some(self.construction()?)
                };
                self.expect(&Tok::ExecClose, "'⌋⌋'")?;
                let t = if self.eat(&Tok::Underscore) {
                    Some(self.ty_atom()?)
                } else {
                    None
                };
                let exec = Construction::from(Builtin::Exec(t));
                Ok(match body {
                    Some(c) => Construction::app(exec, vec![c]),
                    None => exec,
                })
            }
            Tok::Ident(s) => self.ident(s, pos),
            other => {
                self.at -= 1;
                Err(self.error(format!("expected a construction, found {other:?}")))
            }
        }
    }

    fn ident(&mut self, s: String, pos: Pos) -> Result<Construction, ParseError> {
        if s == "acq" && self.peek() == Some(&Tok::LBrack) {
            self.at += 1;
            let c = self.construction()?;
            self.close_acq()?;
            return Ok(Construction::acq(c));
        }
        let name = Name::new(s);
        if let Some(v) = self.scope.iter().rev().find(|v| v.name == name) {
            return Ok(Construction::Variable(v.clone()));
        }
        if let Some(bi) = builtin_by_name(name.as_str()) {
            let bi = match bi {
                Builtin::Exists(None) => Builtin::Exists(self.index_ty()?),
                Builtin::Forall(None) => Builtin::Forall(self.index_ty()?),
                Builtin::Eq(None) => Builtin::Eq(self.index_ty()?),
                Builtin::Exec(None) => Builtin::Exec(self.index_ty()?),
                Builtin::Sub(None) if self.peek() == Some(&Tok::Caret) => {
                    self.at += 1;
                    match self.bump() {
                        Some(Tok::Num(n)) if n > 0 && n <= u32::MAX as u64 => Builtin::Sub(Some(n as u32)),
                        _ => return Err(self.error("expected an order after 'Sub^'")),
                    }
                }
                other => other,
            };
            return Ok(Construction::from(bi));
        }
        self.check_reserved(&name, pos)?;
        if self.sig.constant_ty(&name).is_some() {
            return Ok(Construction::Constant(Constant::Named(name)));
        }
        if let Some(v) = self.sig.variable(&name) {
            return Ok(Construction::Variable(v));
        }
        Err(ParseError::UnknownConstant {
            name,
            line: pos.line,
            column: pos.column,
        })
    }
}

/// Parses one construction, resolving names against `sig`.
pub fn parse(src: &str, sig: &Signature) -> Result<Construction, ParseError> {
    parse_with(src, sig, ParseOptions::default())
}

pub fn parse_with(src: &str, sig: &Signature, opts: ParseOptions) -> Result<Construction, ParseError> {
    let mut p = Parser::new(src, sig, opts)?;
    let c = p.construction()?;
    p.expect_end()?;
    Ok(c)
}

pub fn parse_type(src: &str) -> Result<Ty, ParseError> {
    let sig = Signature::new();
    let mut p = Parser::new(src, &sig, ParseOptions::default())?;
    let t = p.ty()?;
    p.expect_end()?;
    Ok(t)
}
