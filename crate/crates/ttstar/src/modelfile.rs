//! Model files (TOML), presets and the value syntax.
//!
//! ```toml
//! individuals = ["a"]          # or a count: individuals = 2
//! worlds = ["w0", "w1"]
//! nu-max = 7
//!
//! [constants]
//! D = "(omega)->i"
//!
//! [interpretation]
//! D = "{w0 -> a}"
//! ```
//!
//! `preset = "arith(7)"` or `preset = "intension"` starts from a built-in
//! model; the other keys then extend it.

use std::collections::BTreeMap;

use serde::Deserialize;
use ttstar_core::semantics::{Frame, Model, Table, Value, DEFAULT_NU_MAX};
use ttstar_core::signature::Signature;
use ttstar_core::syntax::{parse, parse_type, Construction, Name};
use ttstar_core::types::{elaborate, BaseTy, Ty};

use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Elements {
    Count(usize),
    Names(Vec<String>),
}

impl Elements {
    fn names(&self, prefix: &str) -> Vec<Name> {
        match self {
            Elements::Count(n) => (0..*n).map(|i| Name::new(format!("{prefix}{i}"))).collect(),
            Elements::Names(v) => v.iter().map(|s| Name::new(s.as_str())).collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ModelFile {
    preset: Option<String>,
    individuals: Option<Elements>,
    worlds: Option<Elements>,
    nu_max: Option<u64>,
    #[serde(default)]
    allow_empty_iota: bool,
    max_order: Option<u32>,
    max_tables: Option<usize>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default)]
    variables: BTreeMap<String, String>,
    #[serde(default)]
    interpretation: BTreeMap<String, String>,
}

/// `arith(N)` (also `arithN`) or `intension`.
pub fn preset(name: &str) -> Option<Model> {
    let name = name.trim();
    if name == "intension" {
        return Some(Model::intension());
    }
    let n = name.strip_prefix("arith")?;
    let n = n.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(n);
    Some(Model::arith(n.parse().ok()?))
}

/// A preset name or the path of a model file.
pub fn resolve(name: &str) -> Result<Model> {
    if let Some(m) = preset(name) {
        return Ok(m);
    }
    let src = std::fs::read_to_string(name).map_err(|source| Error::Io {
        path: name.into(),
        source,
    })?;
    parse_model(&src, name)
}

pub fn parse_model(src: &str, file: &str) -> Result<Model> {
    let f: ModelFile = toml::from_str(src).map_err(|e| Error::input(file, 0, e.to_string()))?;
    let ty = |s: &str| parse_type(s).map_err(|e| Error::input(file, 0, format!("type `{s}`: {e}")));
    let mut model = match &f.preset {
        Some(p) => {
            if f.individuals.is_some() || f.worlds.is_some() || f.nu_max.is_some() {
                return Err(Error::input(file, 0, "a preset fixes the domains"));
            }
            preset(p).ok_or_else(|| Error::input(file, 0, format!("unknown preset {p}")))?
        }
        None => {
            let mut sig = Signature::standard();
            for (n, t) in &f.constants {
                sig.declare_constant(n.as_str(), ty(t)?)?;
            }
            for (n, t) in &f.variables {
                sig.redeclare_variable(n.as_str(), ty(t)?);
            }
            let ind = f
                .individuals
                .as_ref()
                .map_or_else(|| Elements::Count(1).names("i"), |e| e.names("i"));
            let wor = f
                .worlds
                .as_ref()
                .map_or_else(|| Elements::Count(1).names("w"), |e| e.names("w"));
            let mut frame = Frame::with_names(ind, wor, f.nu_max.unwrap_or(DEFAULT_NU_MAX));
            frame.allow_empty_iota = f.allow_empty_iota;
            Model::new(sig, frame)?
        }
    };
    if f.preset.is_some() {
        for (n, t) in &f.constants {
            model.signature_mut().declare_constant(n.as_str(), ty(t)?)?;
        }
        for (n, t) in &f.variables {
            model.signature_mut().redeclare_variable(n.as_str(), ty(t)?);
        }
    }
    if let Some(k) = f.max_order {
        model.signature_mut().set_max_order(k);
    }
    if let Some(k) = f.max_tables {
        model.set_max_tables(k);
    }
    for (n, v) in &f.interpretation {
        let name = Name::new(n.as_str());
        let t = model
            .signature()
            .constant_ty(&name)
            .cloned()
            .ok_or_else(|| Error::input(file, 0, format!("{n} is not a declared constant")))?;
        let value = parse_value(v, &t, &model).map_err(|e| Error::input(file, 0, format!("{n}: {e}")))?;
        model.interpret(name, value)?;
    }
    Ok(model)
}

/// Parses a value of type `ty`: element names, numerals, `T`/`F`, `⌈C⌉`
/// (or `acq[C]`) for constructions, and tables `{k -> v, (k1, k2) -> v}`.
pub fn parse_value(src: &str, ty: &Ty, model: &Model) -> Result<Value, String> {
    let mut p = ValueParser { s: src.trim(), model };
    let v = p.value(ty)?;
    if !p.s.trim().is_empty() {
        return Err(format!("unexpected `{}`", p.s.trim()));
    }
    Ok(v)
}

struct ValueParser<'a> {
    s: &'a str,
    model: &'a Model,
}

impl<'a> ValueParser<'a> {
    fn skip(&mut self) {
        self.s = self.s.trim_start();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip();
        match self.s.strip_prefix(tok) {
            Some(rest) => {
                self.s = rest;
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), String> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(format!("expected `{tok}` at `{}`", self.s))
        }
    }

    /// Text up to the next `,`, `)`, `}` or `->` outside brackets.
    fn atom(&mut self) -> Result<&'a str, String> {
        self.skip();
        let mut depth = 0i32;
        let mut end = self.s.len();
        for (i, c) in self.s.char_indices() {
            match c {
                '(' | '[' | '{' | '⌈' | '⌊' => depth += 1,
                ')' | ']' | '}' | '⌉' | '⌋' if depth > 0 => depth -= 1,
                ',' | ')' | '}' if depth == 0 => {
                    end = i;
                    break;
                }
                '-' if depth == 0 && self.s[i..].starts_with("->") => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let s: &'a str = self.s;
        let (a, rest) = s.split_at(end);
        self.s = rest;
        let a = a.trim();
        if a.is_empty() {
            Err(String::from("missing value"))
        } else {
            Ok(a)
        }
    }

    fn value(&mut self, ty: &Ty) -> Result<Value, String> {
        match ty {
            Ty::Fun(args, r) => self.table(args, r),
            Ty::Constr(_) => {
                let a = self.atom()?;
                let model: &'a Model = self.model;
                let sig = model.signature();
                let c = parse(a, sig).map_err(|e| e.to_string())?;
                match c {
                    Construction::Acquisition(b) => {
                        let b = elaborate(&b, sig, None).map_err(|e| e.to_string())?;
                        Ok(Value::Construction(b))
                    }
                    _ => Err(format!("`{a}` is not an acquisition ⌈C⌉")),
                }
            }
            Ty::Base(b) => {
                let a = self.atom()?;
                let bad = || format!("`{a}` is not an element of {ty}");
                match b {
                    BaseTy::Truth => match a {
                        "T" => Ok(Value::T),
                        "F" => Ok(Value::F),
                        _ => Err(bad()),
                    },
                    BaseTy::Nat => {
                        let k: u64 = a.parse().map_err(|_| bad())?;
                        if k > self.model.frame().nu_max {
                            return Err(bad());
                        }
                        Ok(Value::Nat(k))
                    }
                    BaseTy::Iota => self.model.individual_index(a).map(Value::Individual).ok_or_else(bad),
                    BaseTy::World => self.model.world_index(a).map(Value::World).ok_or_else(bad),
                }
            }
        }
    }

    fn table(&mut self, args: &[Ty], r: &Ty) -> Result<Value, String> {
        self.expect("{")?;
        let mut t = Table::empty(args.to_vec(), r.clone());
        if self.eat("}") {
            return Ok(Value::Table(t));
        }
        loop {
            let key = if args.len() == 1 {
                vec![self.value(&args[0])?]
            } else {
                self.expect("(")?;
                let mut k = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.expect(",")?;
                    }
                    k.push(self.value(a)?);
                }
                self.expect(")")?;
                k
            };
            self.expect("->")?;
            let v = self.value(r)?;
            if t.entries.insert(key, v).is_some() {
                return Err(String::from("a point is given twice"));
            }
            if self.eat("}") {
                return Ok(Value::Table(t));
            }
            self.expect(",")?;
        }
    }
}
