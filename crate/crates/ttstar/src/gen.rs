//! Seeded random constructions over the arithmetic signature.
//!
//! Generation is textual: each draw is rendered, parsed and elaborated, so
//! every construction handed out has passed the type checker.

use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use ttstar_core::signature::Signature;
use ttstar_core::substitution::SubRequest;
use ttstar_core::syntax::{parse, Construction, Name};
use ttstar_core::types::{elaborate, order_of_construction};

const NU_VARS: [&str; 3] = ["n", "m", "n'"];
const IOTA_VARS: [&str; 2] = ["x", "y"];

pub struct Generator {
    rng: ChaCha8Rng,
    /// Whether second-order forms (acquisitions, Sub, execution) may occur.
    second_order: bool,
    /// Whether execution may occur.
    exec: bool,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            second_order: true,
            exec: true,
        }
    }

    fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.below(xs.len())]
    }

    fn numeral(&mut self) -> String {
        // Occasionally one past the top of arith(7), which is improper there.
        self.rng.random_range(0..=8u64).to_string()
    }

    fn nu(&mut self, depth: u32) -> String {
        if depth == 0 {
            return if self.rng.random_bool(0.5) {
                self.numeral()
            } else {
                self.pick(&NU_VARS).to_string()
            };
        }
        let so = self.second_order;
        match self.below(if so { 7 } else { 4 }) {
            0 => self.numeral(),
            1 => self.pick(&NU_VARS).to_string(),
            2 => format!("÷({},{})", self.nu(depth - 1), self.nu(depth - 1)),
            3 => {
                let v = self.pick(&NU_VARS);
                format!("[λ{v}.{}]({})", self.nu(depth - 1), self.nu(depth - 1))
            }
            4 if self.exec => format!("⌊⌊{}⌋⌋_nu", self.c1(depth - 1)),
            5 if self.exec => {
                let v = self.pick(&NU_VARS);
                let d = self.first_order(|g| g.nu(depth - 1));
                let c = self.first_order(|g| g.nu(depth - 1));
                format!("⌊⌊Sub¹(⌈{d}⌉,⌈{v}⌉,⌈{c}⌉)⌋⌋_nu")
            }
            _ => format!("÷({},{})", self.nu(depth - 1), self.numeral()),
        }
    }

    fn truth(&mut self, depth: u32) -> String {
        if depth == 0 {
            return match self.below(3) {
                0 => String::from("T"),
                1 => String::from("F"),
                _ => format!("Odd({})", self.nu(0)),
            };
        }
        let so = self.second_order;
        match self.below(if so { 10 } else { 8 }) {
            0 => format!("Odd({})", self.nu(depth - 1)),
            1 => format!("=({},{})", self.nu(depth - 1), self.nu(depth - 1)),
            2 => format!("¬({})", self.truth(depth - 1)),
            3 | 4 => {
                let q = if self.rng.random_bool(0.5) { "∃" } else { "∀" };
                let v = self.pick(&NU_VARS);
                format!("{q}(λ{v}.{})", self.truth(depth - 1))
            }
            5 => {
                let v = self.pick(&NU_VARS);
                format!("[λ{v}.{}]({})", self.truth(depth - 1), self.nu(depth - 1))
            }
            6 => {
                let q = if self.rng.random_bool(0.5) { "∃" } else { "∀" };
                let (a, b) = (self.pick(&IOTA_VARS), self.pick(&IOTA_VARS));
                format!("{q}(λ{a}.=({a},{b}))")
            }
            7 => String::from(if self.rng.random_bool(0.5) { "T" } else { "F" }),
            8 => format!("Improp({})", self.c1(depth - 1)),
            _ if self.exec => format!("⌊⌊{}⌋⌋_o", self.c1(depth - 1)),
            _ => format!("Improp({})", self.c1(depth - 1)),
        }
    }

    /// A construction of a first-order construction.
    fn c1(&mut self, depth: u32) -> String {
        match self.below(5) {
            0 => format!("⌈{}⌉", self.first_order(|g| g.nu(depth))),
            1 => format!("⌈{}⌉", self.first_order(|g| g.truth(depth))),
            2 => String::from("c¹"),
            3 => format!("⌈({})⌉", self.first_order(|g| g.nu(depth))),
            _ => {
                let v = self.pick(&NU_VARS);
                let d = self.first_order(|g| g.nu(depth));
                let c = self.first_order(|g| g.nu(depth));
                format!("Sub¹(⌈{d}⌉,⌈{v}⌉,⌈{c}⌉)")
            }
        }
    }

    fn first_order(&mut self, f: impl FnOnce(&mut Self) -> String) -> String {
        let saved = self.second_order;
        self.second_order = false;
        let s = f(self);
        self.second_order = saved;
        s
    }

    /// Source text of a random construction of type o, ν, ν↦ν or *¹.
    pub fn source(&mut self, depth: u32) -> String {
        match self.below(6) {
            0 | 1 => self.truth(depth),
            2 | 3 => self.nu(depth),
            4 => {
                let v = self.pick(&NU_VARS);
                format!("λ{v}.{}", self.nu(depth.saturating_sub(1)))
            }
            _ => self.c1(depth.saturating_sub(1)),
        }
    }
}

fn accept(src: &str, sig: &Signature, max_order: u32) -> Option<Construction> {
    let c = parse(src, sig).ok()?;
    let c = elaborate(&c, sig, None).ok()?;
    (order_of_construction(&c, sig).ok()? <= max_order).then_some(c)
}

/// `count` well-typed constructions of order at most 2, deterministic in
/// `seed`.
pub fn constructions(seed: u64, count: usize, sig: &Signature) -> Vec<Construction> {
    let mut g = Generator::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let depth = g.rng.random_range(1..=3);
        let src = g.source(depth);
        if let Some(c) = accept(&src, sig, 2) {
            out.push(c);
        }
    }
    out
}

/// `count` requests `(D, x, C)` with `x` a ν-variable, `D` first-order and
/// `C` free of execution.
pub fn sub_requests(seed: u64, count: usize, sig: &Signature) -> Vec<SubRequest> {
    let mut g = Generator::new(seed);
    g.exec = false;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = g.pick(&NU_VARS);
        let (dd, cd) = (g.rng.random_range(0..=2), g.rng.random_range(1..=3));
        let d_src = g.first_order(|g| g.nu(dd));
        let c_src = if g.rng.random_bool(0.6) { g.truth(cd) } else { g.nu(cd) };
        let (Some(d), Some(c)) = (accept(&d_src, sig, 1), accept(&c_src, sig, 2)) else {
            continue;
        };
        let Some(var) = sig.variable(&Name::new(x)) else {
            continue;
        };
        if let Ok(r) = SubRequest::new(d, var, c, sig) {
            out.push(r);
        }
    }
    out
}

/// Whether `c` applies execution anywhere.
pub fn has_exec(c: &Construction) -> bool {
    c.contains_builtin(|b| matches!(b, ttstar_core::syntax::Builtin::Exec(_)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_the_seed() {
        let s = Signature::standard();
        assert_eq!(constructions(7, 30, &s), constructions(7, 30, &s));
        assert_ne!(constructions(7, 30, &s), constructions(8, 30, &s));
    }

    #[test]
    fn requests_target_execution_free_constructions() {
        let s = Signature::standard();
        let rs = sub_requests(1, 100, &s);
        assert!(rs.iter().all(|r| !has_exec(&r.target) && !has_exec(&r.replacement)));
        assert!(rs.iter().any(|r| r.target.mentions(&r.variable)));
    }

    #[test]
    fn second_order_forms_occur() {
        let s = Signature::standard();
        let cs = constructions(3, 200, &s);
        assert!(cs.iter().any(has_exec));
        assert!(cs.iter().any(|c| order_of_construction(c, &s).unwrap() == 2));
    }
}
