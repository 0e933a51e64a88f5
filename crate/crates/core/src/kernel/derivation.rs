use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::rules::{check_rule_application, Instantiation, Rule, RuleError};
use super::sequent::{Match, Sequent};
use crate::signature::Signature;

/// Position of a node: the premise indices walked from the root.
pub type NodePath = Vec<usize>;

/// A proof tree. `written` keeps the context in the order and multiplicity
/// it was written, which the set-valued `conclusion` forgets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub conclusion: Sequent,
    pub inst: Instantiation,
    pub label: Option<String>,
    pub written: Option<Vec<Match>>,
}

impl Derivation {
    pub fn new(rule: Rule, premises: Vec<Derivation>, conclusion: Sequent) -> Self {
        Derivation {
            rule,
            premises,
            conclusion,
            inst: Instantiation::new(),
            label: None,
            written: None,
        }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn node(&self, path: &[usize]) -> Option<&Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get(*i)?.node(rest),
        }
    }

    pub fn walk<'a>(&'a self, path: &mut NodePath, f: &mut dyn FnMut(&NodePath, &'a Derivation)) {
        f(path, self);
        for (i, p) in self.premises.iter().enumerate() {
            path.push(i);
            p.walk(path, f);
            path.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRef {
    pub path: NodePath,
    pub label: Option<String>,
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l}"),
            None if self.path.is_empty() => f.write_str("root"),
            None => {
                f.write_str("node ")?;
                for (i, p) in self.path.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofError {
    pub node: NodeRef,
    pub rule: Rule,
    pub error: RuleError,
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.node, self.rule, self.error)
    }
}

impl core::error::Error for ProofError {}

/// What a successful check found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub conclusion: Sequent,
    pub nodes: usize,
    pub rule_counts: BTreeMap<Rule, usize>,
    /// Nodes whose conclusion repeats one of their premises.
    pub redundant: Vec<NodeRef>,
    /// Pairs of nodes with contexts written differently but equal as sets.
    pub set_collapses: Vec<(NodeRef, NodeRef)>,
}

impl Report {
    pub fn uses(&self, rule: Rule) -> usize {
        self.rule_counts.get(&rule).copied().unwrap_or(0)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "proved: {}", self.conclusion)?;
        write!(f, "nodes: {}; rules:", self.nodes)?;
        for (r, n) in &self.rule_counts {
            write!(f, " {r}×{n}")?;
        }
        writeln!(f)?;
        for n in &self.redundant {
            writeln!(f, "redundant: {n} repeats a premise")?;
        }
        for (a, b) in &self.set_collapses {
            writeln!(f, "collapse: {a} and {b} have the same context as sets")?;
        }
        Ok(())
    }
}

fn elaborate_node(d: &Derivation, path: &mut NodePath, sig: &Signature) -> Result<Derivation, ProofError> {
    let fail = |path: &NodePath, e: crate::types::TypeError| ProofError {
        node: NodeRef {
            path: path.clone(),
            label: d.label.clone(),
        },
        rule: d.rule,
        error: RuleError::Type(e),
    };
    let conclusion = d.conclusion.elaborate(sig).map_err(|e| fail(path, e))?;
    let written = match &d.written {
        Some(ms) => Some(
            ms.iter()
                .map(|m| m.elaborate(sig))
                .collect::<Result<_, _>>()
                .map_err(|e| fail(path, e))?,
        ),
        None => None,
    };
    let mut premises = Vec::with_capacity(d.premises.len());
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        premises.push(elaborate_node(p, path, sig)?);
        path.pop();
    }
    Ok(Derivation {
        rule: d.rule,
        premises,
        conclusion,
        inst: d.inst.clone(),
        label: d.label.clone(),
        written,
    })
}

/// Type-checks every sequent and makes schematic indices explicit.
pub fn elaborate_derivation(d: &Derivation, sig: &Signature) -> Result<Derivation, ProofError> {
    elaborate_node(d, &mut Vec::new(), sig)
}

/// Type-checks every sequent, then checks every rule application. The first
/// failure in pre-order is reported.
pub fn check_derivation(d: &Derivation, sig: &Signature) -> Result<Report, ProofError> {
    let d = elaborate_derivation(d, sig)?;
    let mut first_error = None;
    let mut counts = BTreeMap::new();
    let mut redundant = Vec::new();
    let mut written: Vec<(NodeRef, &Vec<Match>)> = Vec::new();
    d.walk(&mut Vec::new(), &mut |path, n| {
        let node = NodeRef {
            path: path.clone(),
            label: n.label.clone(),
        };
        *counts.entry(n.rule).or_insert(0) += 1;
        if first_error.is_none() {
            let ps: Vec<Sequent> = n.premises.iter().map(|p| p.conclusion.clone()).collect();
            if let Err(error) = check_rule_application(n.rule, &ps, &n.conclusion, &n.inst, sig) {
                first_error = Some(ProofError {
                    node: node.clone(),
                    rule: n.rule,
                    error,
                });
            }
        }
        if n.premises.iter().any(|p| p.conclusion == n.conclusion) {
            redundant.push(node.clone());
        }
        if let Some(w) = &n.written {
            written.push((node, w));
        }
    });
    if let Some(e) = first_error {
        return Err(e);
    }
    let mut set_collapses = Vec::new();
    for i in 0..written.len() {
        for j in i + 1..written.len() {
            let (a, wa) = &written[i];
            let (b, wb) = &written[j];
            let sa: BTreeSet<&Match> = wa.iter().collect();
            let sb: BTreeSet<&Match> = wb.iter().collect();
            if wa != wb && sa == sb {
                set_collapses.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(Report {
        conclusion: d.conclusion.clone(),
        nodes: d.size(),
        rule_counts: counts,
        redundant,
        set_collapses,
    })
}
