//! Text rendering of evaluation results and assignments.

use ttstar_core::semantics::{Assignment, EvalResult, Model};

pub fn result(m: &Model, r: &EvalResult) -> String {
    match r {
        EvalResult::Proper(v) => m.show(v),
        EvalResult::Improper => String::from("improper"),
    }
}

/// `{x = a, n = 3}`; `{}` for the empty assignment.
pub fn assignment(m: &Model, v: &Assignment) -> String {
    let parts: Vec<String> = v.iter().map(|(x, d)| format!("{} = {}", x.name, m.show(d))).collect();
    format!("{{{}}}", parts.join(", "))
}
