//! Proof scripts.
//!
//! A script declares its signature, defines textual abbreviations and lists
//! the proof tree one node per line, premises indented below their
//! conclusion:
//!
//! ```text
//! const a : i
//! const P : (i)->o
//! var d : i
//! let S = ⌊⌊Sub(⌈a⌉,⌈x⌉,⌈P(x)⌉)⌋⌋_o
//! expect S:T --> ∃(λx.P(x)):T
//!
//! [6] rule exec-INST ⊢ S:T --> ∃(λx.P(x)):T
//!   [1] rule AX ⊢ S:T --> S:T
//!   [5] rule ∃-I ⊢ S:T, a:d --> ∃(λx.P(x)):T
//!     ...
//! ```
//!
//! `[label]` is optional, `|-` may replace `⊢`, and `{k = C; …}` after the
//! rule name pins schema metavariables.

use ttstar_core::kernel::{parse_sequent_written, Derivation, Instantiation, Rule, Sequent};
use ttstar_core::signature::Signature;
use ttstar_core::syntax::{parse, ParseOptions};

use crate::decl::{content, declaration};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Script {
    pub sig: Signature,
    pub derivation: Derivation,
    /// End sequent announced by an `expect` line.
    pub expected: Option<Sequent>,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Replaces whole-identifier occurrences of each abbreviation.
fn expand(line: &str, macros: &[(String, String)]) -> String {
    let mut out = line.to_string();
    for (name, body) in macros {
        let mut res = String::with_capacity(out.len());
        let mut rest = out.as_str();
        while let Some(i) = rest.find(name.as_str()) {
            let before = rest[..i].chars().next_back();
            let after = rest[i + name.len()..].chars().next();
            res.push_str(&rest[..i]);
            if before.is_some_and(ident_char) || after.is_some_and(ident_char) {
                res.push_str(name);
            } else {
                res.push_str(body);
            }
            rest = &rest[i + name.len()..];
        }
        res.push_str(rest);
        out = res;
    }
    out
}

struct Line {
    indent: usize,
    lineno: usize,
    node: Derivation,
}

fn node_line(text: &str, sig: &Signature, file: &str, lineno: usize) -> Result<Derivation> {
    let err = |m: String| Error::input(file, lineno, m);
    let mut rest = text;
    let mut label = None;
    if let Some(r) = rest.strip_prefix('[') {
        let (l, r) = r.split_once(']').ok_or_else(|| err("unclosed label".into()))?;
        label = Some(l.trim().to_string());
        rest = r.trim_start();
    }
    rest = rest
        .strip_prefix("rule")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| err("expected `rule NAME ⊢ SEQUENT`".into()))?
        .trim_start();
    let (head, seq) = rest
        .split_once('⊢')
        .or_else(|| rest.split_once("|-"))
        .ok_or_else(|| err("missing ⊢".into()))?;
    let (name, inst_src) = match head.split_once('{') {
        Some((n, i)) => {
            let i = i
                .trim_end()
                .strip_suffix('}')
                .ok_or_else(|| err("unclosed `{`".into()))?;
            (n.trim(), Some(i))
        }
        None => (head.trim(), None),
    };
    let rule = Rule::from_name(name).ok_or_else(|| err(format!("unknown rule {name}")))?;
    let mut inst = Instantiation::new();
    for item in inst_src
        .into_iter()
        .flat_map(|s| s.split(';'))
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| err(format!("instantiation `{item}` is not k = C")))?;
        let c = parse(v.trim(), sig).map_err(|e| err(format!("{}: {e}", k.trim())))?;
        inst.insert(k.trim().to_string(), c);
    }
    let (written, goal) =
        parse_sequent_written(seq.trim(), sig, ParseOptions::default()).map_err(|e| err(e.to_string()))?;
    let mut d = Derivation::new(rule, Vec::new(), Sequent::new(written.clone(), goal));
    d.inst = inst;
    d.label = label;
    d.written = Some(written);
    Ok(d)
}

/// Parses a script. Declarations in the script extend `base`.
pub fn parse_script(src: &str, file: &str, base: &Signature) -> Result<Script> {
    let mut sig = base.clone();
    let mut macros: Vec<(String, String)> = Vec::new();
    let mut expected_src = None;
    let mut lines = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let text = content(raw);
        if text.is_empty() {
            continue;
        }
        if declaration(text, &mut sig, file, lineno)? {
            continue;
        }
        if let Some(def) = text.strip_prefix("let ") {
            let (name, body) = def
                .split_once('=')
                .ok_or_else(|| Error::input(file, lineno, "expected `let NAME = TEXT`"))?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(ident_char) {
                return Err(Error::input(file, lineno, format!("bad abbreviation name `{name}`")));
            }
            let body = expand(body.trim(), &macros);
            macros.retain(|(n, _)| n != name);
            macros.push((name.to_string(), body));
            macros.sort_by_key(|m| std::cmp::Reverse(m.0.len()));
            continue;
        }
        let text = expand(text, &macros);
        if let Some(e) = text.strip_prefix("expect ") {
            expected_src = Some((e.trim().to_string(), lineno));
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        lines.push(Line {
            indent,
            lineno,
            node: node_line(&text, &sig, file, lineno)?,
        });
    }
    let expected = match expected_src {
        Some((e, lineno)) => {
            let (ctx, goal) = parse_sequent_written(&e, &sig, ParseOptions::default())
                .map_err(|x| Error::input(file, lineno, x.to_string()))?;
            Some(Sequent::new(ctx, goal))
        }
        None => None,
    };
    let derivation = build_tree(lines, file)?;
    Ok(Script {
        sig,
        derivation,
        expected,
    })
}

fn build_tree(lines: Vec<Line>, file: &str) -> Result<Derivation> {
    let mut stack: Vec<(usize, Derivation)> = Vec::new();
    for l in lines {
        if stack.first().is_some_and(|(ind, _)| *ind >= l.indent) {
            return Err(Error::input(file, l.lineno, "more than one root"));
        }
        while stack.last().is_some_and(|(ind, _)| *ind >= l.indent) {
            pop(&mut stack);
        }
        stack.push((l.indent, l.node));
    }
    while stack.len() > 1 {
        pop(&mut stack);
    }
    stack
        .pop()
        .map(|(_, d)| d)
        .ok_or_else(|| Error::input(file, 0, "the script has no proof"))
}

fn pop(stack: &mut Vec<(usize, Derivation)>) {
    if stack.len() > 1 {
        let (_, child) = stack.pop().expect("non-empty");
        stack.last_mut().expect("parent").1.premises.push(child);
    }
}

pub fn load_script(path: &str, base: &Signature) -> Result<Script> {
    let src = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_script(&src, path, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttstar_core::kernel::check_derivation;

    const EG: &str = "
const a : i
const P : (i)->o
var d : i
let S = ⌊⌊Sub(⌈a⌉,⌈x⌉,⌈P(x)⌉)⌋⌋_o
expect S:T --> ∃(λx.P(x)):T

[6] rule exec-INST ⊢ S:T --> ∃(λx.P(x)):T
  [1] rule AX ⊢ S:T --> S:T
  [5] rule ∃-I ⊢ S:T, a:d --> ∃(λx.P(x)):T
    [4] rule β-EXP {D = a} |- S:T, a:d --> [λx.P(x)](a):T   # premises below
      [2] rule WR ⊢ S:T, a:d --> S:T
        rule AX ⊢ S:T --> S:T
      [3] rule WR ⊢ S:T, a:d --> a:d
        rule AX ⊢ a:d --> a:d
";

    #[test]
    fn abbreviations_respect_identifiers() {
        let m = [("S".to_string(), "X".to_string())];
        assert_eq!(expand("S:T, Sub(S), S'", &m), "X:T, Sub(X), S'");
    }

    #[test]
    fn indentation_builds_the_tree() {
        let s = parse_script(EG, "eg", &Signature::standard()).unwrap();
        let d = &s.derivation;
        assert_eq!(d.size(), 8);
        assert_eq!(d.premises.len(), 2);
        assert_eq!(d.premises[1].premises[0].label.as_deref(), Some("4"));
        assert!(d.premises[1].premises[0].inst.contains_key("D"));
    }

    #[test]
    fn instantiations_are_verified() {
        let s = parse_script(EG, "eg", &Signature::standard()).unwrap();
        let e = check_derivation(&s.derivation, &s.sig).unwrap_err();
        assert_eq!(e.node.label.as_deref(), Some("4"));
        let fixed = EG.replace("{D = a}", "{X1 = a}");
        let s = parse_script(&fixed, "eg", &Signature::standard()).unwrap();
        let r = check_derivation(&s.derivation, &s.sig).unwrap();
        assert_eq!(Some(r.conclusion), s.expected.map(|e| e.elaborate(&s.sig).unwrap()));
    }

    #[test]
    fn malformed_scripts() {
        let sig = Signature::standard();
        assert!(parse_script("", "e", &sig).is_err());
        assert!(parse_script("rule XYZ ⊢ --> T:T", "e", &sig).is_err());
        assert!(parse_script("rule AX --> T:T", "e", &sig).is_err());
        assert!(parse_script("rule AX ⊢ T:T --> T:T\nrule AX ⊢ T:T --> T:T", "e", &sig).is_err());
    }
}
