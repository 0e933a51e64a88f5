use core::fmt::{self, Display, Formatter, Write};

use super::ast::{Builtin, Constant, Construction};
use crate::types::Ty;

/// Type in a position where only an atom is accepted.
pub struct TyAtom<'a>(pub &'a Ty);

impl Display for TyAtom<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Ty::Fun(..) => write!(f, "[{}]", self.0),
            t => write!(f, "{t}"),
        }
    }
}

fn superscript(f: &mut Formatter<'_>, n: u32) -> fmt::Result {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut buf = [0u8; 10];
    let mut len = 0;
    let mut n = n;
    loop {
        buf[len] = (n % 10) as u8;
        len += 1;
        n /= 10;
        if n == 0 {
            break;
        }
    }
    for d in buf[..len].iter().rev() {
        f.write_char(DIGITS[*d as usize])?;
    }
    Ok(())
}

fn index(f: &mut Formatter<'_>, t: &Option<Ty>) -> fmt::Result {
    match t {
        Some(t) => write!(f, "^{}", TyAtom(t)),
        None => Ok(()),
    }
}

impl Display for Builtin {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::True => f.write_str("T"),
            Builtin::False => f.write_str("F"),
            Builtin::Not => f.write_str("¬"),
            Builtin::Div => f.write_str("÷"),
            Builtin::Odd => f.write_str("Odd"),
            Builtin::Improp => f.write_str("Improp"),
            Builtin::Eq(t) => {
                f.write_str("=")?;
                index(f, t)
            }
            Builtin::Exists(t) => {
                f.write_str("∃")?;
                index(f, t)
            }
            Builtin::Forall(t) => {
                f.write_str("∀")?;
                index(f, t)
            }
            Builtin::Sub(n) => {
                f.write_str("Sub")?;
                match n {
                    Some(n) => superscript(f, *n),
                    None => Ok(()),
                }
            }
            Builtin::Exec(t) => {
                f.write_str("⌊⌊·⌋⌋")?;
                match t {
                    Some(t) => write!(f, "_{}", TyAtom(t)),
                    None => Ok(()),
                }
            }
            Builtin::Triv => f.write_str("triv"),
        }
    }
}

impl Display for Constant {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Named(n) => write!(f, "{n}"),
            Constant::Nat(k) => write!(f, "{k}"),
            Constant::Builtin(b) => write!(f, "{b}"),
        }
    }
}

impl Display for Construction {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Constant(c) => write!(f, "{c}"),
            Construction::Variable(v) => write!(f, "{}", v.name),
            Construction::Acquisition(b) => write!(f, "⌈{b}⌉"),
            Construction::Lambda(bs, body) => {
                f.write_str("λ")?;
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}:", b.name)?;
                    match &b.ty {
                        Ty::Fun(..) => write!(f, "{}", TyAtom(&b.ty))?,
                        t => write!(f, "{t}")?,
                    }
                }
                write!(f, ".{body}")
            }
            Construction::Application(head, args) => {
                match (head.builtin(), args.as_slice()) {
                    (Some(Builtin::Exec(t)), [a]) => {
                        write!(f, "⌊⌊{a}⌋⌋")?;
                        if let Some(t) = t {
                            write!(f, "_{}", TyAtom(t))?;
                        }
                        return Ok(());
                    }
                    (Some(Builtin::Triv), [a]) => return write!(f, "⌈({a})⌉"),
                    _ => {}
                }
                match **head {
                    Construction::Lambda(..) => write!(f, "[{head}]")?,
                    _ => write!(f, "{head}")?,
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
