use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    /// `*n` / `*ⁿ`
    Star(u32),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    Comma,
    Dot,
    Colon,
    Caret,
    Underscore,
    Middot,
    AcqOpen,
    AcqClose,
    ExecOpen,
    ExecClose,
    Lambda,
    Div,
    Eq,
    Not,
    Exists,
    Forall,
    Top,
    Bottom,
    Arrow,
    Seq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn superscript_digit(c: char) -> Option<u32> {
    "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c).map(|p| p as u32)
}

fn subscript_digit(c: char) -> bool {
    ('₀'..='₉').contains(&c)
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'λ'
}

fn ident_continue(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '\'' || superscript_digit(c).is_some() || subscript_digit(c)
}

pub fn lex(src: &str) -> Result<Vec<Token>, (Pos, String)> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let peek = chars.get(i + 1).copied();
        let mut width = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' if peek == Some('\'') => {
                width = 2;
                Tok::AcqClose
            }
            ']' => Tok::RBrack,
            '\'' if peek == Some('[') => {
                width = 2;
                Tok::AcqOpen
            }
            '⟨' => Tok::LAngle,
            '⟩' => Tok::RAngle,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '^' => Tok::Caret,
            '_' => Tok::Underscore,
            '·' => Tok::Middot,
            '⌈' => Tok::AcqOpen,
            '⌉' => Tok::AcqClose,
            '⌊' if peek == Some('⌊') => {
                width = 2;
                Tok::ExecOpen
            }
            '⌋' if peek == Some('⌋') => {
                width = 2;
                Tok::ExecClose
            }
            'λ' | '\\' => Tok::Lambda,
            '÷' => Tok::Div,
            '=' => Tok::Eq,
            '¬' => Tok::Not,
            '∃' => Tok::Exists,
            '∀' => Tok::Forall,
            '⊤' => Tok::Top,
            '⊥' => Tok::Bottom,
            '↦' | '→' => Tok::Arrow,
            '⟶' => Tok::Seq,
            '-' if peek == Some('-') && chars.get(i + 2) == Some(&'>') => {
                width = 3;
                Tok::Seq
            }
            '-' if peek == Some('>') => {
                width = 2;
                Tok::Arrow
            }
            '*' => {
                let mut j = i + 1;
                let mut n: Option<u32> = None;
                while let Some(&d) = chars.get(j) {
                    let v = d.to_digit(10).or_else(|| superscript_digit(d));
                    match v {
                        Some(v) => {
                            n = Some(n.unwrap_or(0).saturating_mul(10).saturating_add(v));
                            j += 1;
                        }
                        None => break,
                    }
                }
                match n {
                    Some(n) => {
                        width = j - i;
                        Tok::Star(n)
                    }
                    None => return Err((pos, "expected an order after '*'".into())),
                }
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                let mut v: u64 = 0;
                while let Some(d) = chars.get(j).and_then(|d| d.to_digit(10)) {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(d as u64))
                        .ok_or((pos, String::from("numeral too large")))?;
                    j += 1;
                }
                width = j - i;
                Tok::Num(v)
            }
            c if ident_start(c) => {
                let mut j = i + 1;
                while chars.get(j).is_some_and(|&d| ident_continue(d)) {
                    // `x']'` style closers must not be swallowed
                    if chars[j] == '\'' && chars.get(j + 1) == Some(&'[') {
                        break;
                    }
                    j += 1;
                }
                width = j - i;
                Tok::Ident(chars[i..j].iter().collect())
            }
            other => return Err((pos, alloc::format!("unexpected character {other:?}"))),
        };
        out.push(Token { tok, pos });
        i += width;
        col += width;
    }
    Ok(out)
}
