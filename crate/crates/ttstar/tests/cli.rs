use std::process::{Command, Output};

fn ttstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttstar"))
        .args(args)
        .output()
        .expect("spawn ttstar")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn check_accepts_the_eg_tree() {
    let o = ttstar(&["check", "corpus/eg.proof"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("proved: Q(b):T, ⌊⌊Sub"), "{out}");
    assert!(out.contains("exec-INST×1"), "{out}");
}

#[test]
fn check_rejects_broken_freshness() {
    let o = ttstar(&["check", "corpus/eg-broken-freshness.proof"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fresh"));
}

#[test]
fn check_rejects_an_empty_file() {
    let dir = std::env::temp_dir().join(format!("ttstar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.proof");
    std::fs::write(&empty, "").unwrap();
    let o = ttstar(&["check", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_with_oracle_sweep() {
    let o = ttstar(&["check", "corpus/exists-i-eta-2.proof", "--sweep"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("collapse:"), "{out}");
    assert!(out.contains("rule instances valid"), "{out}");
}

#[test]
fn eval_examples() {
    for (src, want) in [
        ("÷(3,0)", "improper"),
        ("∃(λ n . Odd(÷(3,n)))", "T"),
        ("⌈÷(3,0)⌉", "÷(3,0)"),
        ("exists(λn.Odd(3 ÷ n))", "T"),
    ] {
        let o = ttstar(&["eval", src, "-m", "arith7"]);
        assert_eq!(o.status.code(), Some(0), "{src}");
        assert_eq!(stdout(&o), want, "{src}");
    }
}

#[test]
fn eval_input_errors() {
    assert_eq!(ttstar(&["eval", "÷(3,"]).status.code(), Some(2));
    assert_eq!(ttstar(&["eval", "Odd(T)"]).status.code(), Some(2));
    assert_eq!(ttstar(&["eval", "Odd(n)"]).status.code(), Some(2));
    let o = ttstar(&["eval", "Odd(n)", "--assign", "n=3"]);
    assert_eq!(stdout(&o), "T");
}

#[test]
fn corpus_items_by_id() {
    let o = ttstar(&["corpus", "--item", "AH2-congruence", "--item", "AI1-congruence"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("PASS AH2-congruence"), "{out}");
    assert!(out.contains("2 items: 2 passed, 0 failed"), "{out}");
}

#[test]
fn budget_exhaustion_has_its_own_code() {
    let o = ttstar(&["oracle", "theorem1", "--count", "5", "--budget", "assignments=1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn fact1_from_the_command_line() {
    let o = ttstar(&["oracle", "fact1", "--budget", "iota=1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("∃(λx.S(x)) = F; ¬(∀(λx.¬(S(x)))) = T"));
}
