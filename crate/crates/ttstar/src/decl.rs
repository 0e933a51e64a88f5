//! Signature files: one declaration per line.
//!
//! ```text
//! # individuals and a property
//! const a, b : i
//! const P : (i)->o
//! var d : i
//! ```

use ttstar_core::signature::Signature;
use ttstar_core::syntax::parse_type;

use crate::error::{Error, Result};

/// Applies a `const`/`var` line to `sig`. Returns `false` for other lines.
pub fn declaration(line: &str, sig: &mut Signature, file: &str, lineno: usize) -> Result<bool> {
    let (kind, rest) = match line.split_once(char::is_whitespace) {
        Some((k @ ("const" | "var"), rest)) => (k, rest),
        _ => return Ok(false),
    };
    let (names, ty) = rest
        .split_once(':')
        .ok_or_else(|| Error::input(file, lineno, "expected `NAME, … : TYPE`"))?;
    let ty = parse_type(ty.trim()).map_err(|e| Error::input(file, lineno, e.to_string()))?;
    for name in names.split(',').map(str::trim) {
        if name.is_empty() {
            return Err(Error::input(file, lineno, "empty name"));
        }
        let r = if kind == "const" {
            sig.declare_constant(name, ty.clone())
        } else {
            sig.declare_variable(name, ty.clone())
        };
        r.map_err(|e| Error::input(file, lineno, e.to_string()))?;
    }
    Ok(true)
}

/// Strips a `#` comment and surrounding blanks.
pub fn content(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

/// Reads a signature file on top of the standard variable names.
pub fn parse_signature(src: &str, file: &str) -> Result<Signature> {
    let mut sig = Signature::standard();
    for (i, raw) in src.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        if !declaration(line, &mut sig, file, i + 1)? {
            return Err(Error::input(file, i + 1, format!("not a declaration: {line}")));
        }
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttstar_core::syntax::Name;
    use ttstar_core::types::Ty;

    #[test]
    fn declarations() {
        let s = parse_signature("const a, b : i # two\nvar d : i\n\nconst P : (i)->o", "t").unwrap();
        assert_eq!(s.constant_ty(&Name::from("b")), Some(&Ty::IOTA));
        assert!(s.variable(&Name::from("d")).is_some());
        assert!(parse_signature("const z1 : i", "t").is_err());
        assert!(parse_signature("const : i", "t").is_err());
        assert!(parse_signature("P : i", "t").is_err());
    }
}
