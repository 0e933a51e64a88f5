//! Contexts are sets: reordering or repeating the matches on the left of a
//! sequent changes nothing about a check.

use rand::rngs::ChaCha8Rng;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use ttstar::corpus::{self, Expect, Kind};
use ttstar::script::parse_script;
use ttstar_core::kernel::check_derivation;
use ttstar_core::signature::Signature;

/// Splits at commas outside any bracket.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '⌈' | '{' => depth += 1,
            ')' | ']' | '⌉' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn scramble(line: &str, rng: &mut ChaCha8Rng) -> String {
    let Some((head, seq)) = line.split_once('⊢').or_else(|| line.split_once("|-")) else {
        return line.to_string();
    };
    let Some((ctx, goal)) = seq.split_once("-->") else {
        return line.to_string();
    };
    let mut parts: Vec<String> = split_top(ctx)
        .into_iter()
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        return line.to_string();
    }
    parts.shuffle(rng);
    let dup = parts[rng.random_range(0..parts.len())].clone();
    parts.push(dup);
    format!("{head}⊢ {} -->{goal}", parts.join(", "))
}

#[test]
fn shuffled_and_repeated_contexts_check_the_same() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let proofs: Vec<_> = corpus::index()
        .unwrap()
        .into_iter()
        .filter(|i| i.kind == Kind::Proof && i.expect == Expect::Accept)
        .collect();
    assert!(proofs.len() >= 9);
    for item in proofs {
        let file = item.file.clone().unwrap();
        let src = corpus::file(&file).unwrap();
        let original = corpus::script(&file).unwrap();
        let want = check_derivation(&original.derivation, &original.sig)
            .unwrap()
            .conclusion;
        for _ in 0..5 {
            let mutated: Vec<String> = src
                .lines()
                .map(|l| {
                    if l.trim_start().starts_with("expect") {
                        l.to_string()
                    } else {
                        scramble(l, &mut rng)
                    }
                })
                .collect();
            let mutated = mutated.join("\n");
            assert_ne!(mutated.trim(), src.trim(), "{file} unchanged");
            let s = parse_script(&mutated, &file, &Signature::standard()).unwrap();
            let r = check_derivation(&s.derivation, &s.sig).unwrap_or_else(|e| panic!("{file}: {e}"));
            assert_eq!(r.conclusion, want, "{file}");
        }
    }
}
