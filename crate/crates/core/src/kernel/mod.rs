//! Matches, sequents and the rule checker.

mod derivation;
mod rules;
mod sequent;

pub use derivation::{check_derivation, elaborate_derivation, Derivation, NodePath, NodeRef, ProofError, Report};
pub use rules::{
    acq_exec_rules, check_rule_application, eta_head, normalize_sub_forms, strict_in, t_strict_in, typed_sub_form,
    Direction, Instantiation, Rule, RuleError,
};
pub use sequent::{parse_match, parse_sequent, parse_sequent_with, parse_sequent_written, Match, Rhs, Sequent};

#[cfg(test)]
mod tests;
