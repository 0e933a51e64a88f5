use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ttstar::corpus;
use ttstar::decl::parse_signature;
use ttstar::error::{Error, Result};
use ttstar::gen;
use ttstar::modelfile::{self, parse_value};
use ttstar::script::{parse_script, Script};
use ttstar::show;
use ttstar_core::kernel::{check_derivation, parse_sequent};
use ttstar_core::oracle::{
    compensation_sweep, find_fact1_countermodel, sequent_valid, theorem1_check, EnumerationBudget, ModelFamily,
};
use ttstar_core::semantics::{evaluate, Assignment, EvalResult, Frame, Model, Value};
use ttstar_core::signature::Signature;
use ttstar_core::syntax::{parse, Name};
use ttstar_core::types::elaborate;

/// `println!` that ends the process quietly once stdout is closed, as when
/// piped into `head`.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        use std::io::Write;
        if write!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "ttstar",
    version,
    about = "Proof checker and evaluator for the partial type theory TT*"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof script.
    Check {
        proof: String,
        /// Signature file with `const`/`var` declarations.
        #[arg(long)]
        sig: Option<String>,
        /// Also sweep every rule instance with the oracle.
        #[arg(long)]
        sweep: bool,
        #[arg(long, value_name = "K=V")]
        budget: Vec<String>,
    },
    /// Evaluate a construction in a model.
    Eval {
        construction: String,
        /// Preset (`arith(7)`, `intension`) or model file.
        #[arg(short, long, default_value = "arith(7)")]
        model: String,
        #[arg(long, value_name = "X=V")]
        assign: Vec<String>,
        #[arg(long)]
        max_order: Option<u32>,
    },
    /// Run the shipped corpus.
    Corpus {
        /// Run only these items.
        #[arg(long)]
        item: Vec<String>,
        /// List the items instead of running them.
        #[arg(long)]
        list: bool,
        #[arg(long, value_name = "K=V")]
        budget: Vec<String>,
    },
    /// Semantic checks by exhaustive enumeration.
    Oracle {
        #[command(subcommand)]
        query: Query,
        #[arg(long, value_name = "K=V", global = true)]
        budget: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Query {
    /// Search for a model where ∃ is not ¬∀¬.
    Fact1,
    /// C against ⌊⌊⌈C⌉⌋⌋ for generated constructions.
    Theorem1 {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// The compensation principle for generated substitutions.
    Compensation {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Every rule instance of a proof against the model family.
    Sweep {
        proof: String,
        #[arg(long)]
        sig: Option<String>,
    },
    /// Validity of a sequent in one model.
    Valid {
        sequent: String,
        #[arg(short, long, default_value = "arith(7)")]
        model: String,
    },
}

fn parse_budget(items: &[String]) -> Result<EnumerationBudget> {
    let mut b = EnumerationBudget::default();
    for item in items.iter().flat_map(|s| s.split(',')) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::input("--budget", 0, format!("`{item}` is not k=v")))?;
        let bad = || Error::input("--budget", 0, format!("bad value for {k}: {v}"));
        let n = || v.trim().parse::<u64>().map_err(|_| bad());
        match k.trim().trim_start_matches("max-").trim_start_matches("max_") {
            "iota" => b.max_iota = n()? as usize,
            "nu" => b.max_nu = n()?,
            "omega" => b.max_omega = n()? as usize,
            "order" => b.max_order = n()? as u32,
            "tables" => b.max_tables = n()? as usize,
            "assignments" => b.max_assignments = n()?,
            "models" => b.max_models = n()?,
            "partial" | "partial-tables" | "partial_tables" => {
                b.partial_tables = v.trim().parse().map_err(|_| bad())?
            }
            other => return Err(Error::input("--budget", 0, format!("unknown budget key {other}"))),
        }
    }
    Ok(b)
}

/// A file on disk, or failing that a shipped corpus file (mutants included).
fn read_source(path: &str) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => {
            let shipped = path.strip_prefix("corpus/").unwrap_or(path);
            corpus::file(shipped)
                .or_else(|| corpus::file(&format!("mutants/{shipped}")))
                .map(String::from)
                .ok_or(Error::Io {
                    path: path.into(),
                    source: e,
                })
        }
    }
}

fn load_script(path: &str, sig: &Option<String>) -> Result<Script> {
    let base = match sig {
        Some(p) => parse_signature(&read_source(p)?, p)?,
        None => Signature::standard(),
    };
    parse_script(&read_source(path)?, path, &base)
}

fn cmd_check(proof: &str, sig: &Option<String>, sweep: bool, budget: &EnumerationBudget) -> Result<()> {
    let s = load_script(proof, sig)?;
    let report = check_derivation(&s.derivation, &s.sig)?;
    if let Some(e) = &s.expected {
        let e = e.elaborate(&s.sig)?;
        if e != report.conclusion {
            return Err(Error::Failed(format!(
                "proved {}, but the script expects {e}",
                report.conclusion
            )));
        }
    }
    out_raw!("{report}");
    if sweep {
        let (_, nodes, models) = corpus::check_and_sweep(&s, budget)?;
        out!("oracle: {nodes} rule instances valid over {models} models");
    }
    Ok(())
}

fn print_result(m: &Model, r: &EvalResult) {
    match r {
        EvalResult::Proper(Value::Construction(c)) => out!("{c}"),
        r => out!("{}", show::result(m, r)),
    }
}

fn cmd_eval(src: &str, model: &str, assign: &[String], max_order: Option<u32>) -> Result<()> {
    let mut m = modelfile::resolve(model)?;
    if let Some(k) = max_order {
        m.signature_mut().set_max_order(k);
    }
    let sig = m.signature().clone();
    let c = elaborate(&parse(src, &sig)?, &sig, None)?;
    m.add_constructions([&c]);
    let mut v = Assignment::new();
    for a in assign {
        let (x, val) = a
            .split_once('=')
            .ok_or_else(|| Error::input("--assign", 0, format!("`{a}` is not x=v")))?;
        let var = sig
            .variable(&Name::new(x.trim()))
            .ok_or_else(|| Error::input("--assign", 0, format!("{x} is not a declared variable")))?;
        let d = parse_value(val, &var.ty, &m).map_err(|e| Error::input("--assign", 0, format!("{x}: {e}")))?;
        v.set(var, d);
    }
    let missing: Vec<String> = c
        .live_vars()
        .into_iter()
        .filter(|x| v.get(x).is_none())
        .map(|x| x.name.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::input(
            "--assign",
            0,
            format!("no value for {}", missing.join(", ")),
        ));
    }
    let r = evaluate(&c, &m, &v)?;
    print_result(&m, &r);
    Ok(())
}

fn cmd_corpus(items: &[String], list: bool, budget: &EnumerationBudget) -> Result<()> {
    let all = corpus::index()?;
    let chosen: Vec<_> = if items.is_empty() {
        all
    } else {
        let mut out = Vec::new();
        for id in items {
            out.push(
                all.iter()
                    .find(|i| &i.id == id)
                    .cloned()
                    .ok_or_else(|| Error::Failed(format!("no corpus item {id}")))?,
            );
        }
        out
    };
    if list {
        for i in &chosen {
            out!("{} {:?} {:?}", i.id, i.kind, i.expect);
        }
        return Ok(());
    }
    let start = Instant::now();
    let outcomes = corpus::run(&chosen, budget);
    for o in &outcomes {
        out!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    out!(
        "{} items: {} passed, {failed} failed ({:.2} s)",
        outcomes.len(),
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(Error::Failed(format!("{failed} corpus items failed")));
    }
    Ok(())
}

/// arith(7) over frames with one and two individuals.
fn arith_models(budget: &EnumerationBudget) -> Result<Vec<Model>> {
    let mut out = Vec::new();
    for iota in 1..=budget.max_iota.max(1) {
        let mut frame = Frame::new(iota, budget.max_nu, 1);
        frame.max_tables = budget.max_tables;
        out.push(Model::new(Signature::standard(), frame)?);
    }
    Ok(out)
}

fn cmd_oracle(q: &Query, budget: &EnumerationBudget) -> Result<()> {
    match q {
        Query::Fact1 => {
            let w = find_fact1_countermodel(budget)?;
            out!("φ = {}", w.phi);
            out!("{}", corpus::render_fact1(&w));
            out!("∀(λx.φ) and ∀(λx.¬φ) coincide; ¬∀(λx.¬φ) differs from ∃(λx.φ)");
        }
        Query::Theorem1 { count, seed } => {
            let sig = Signature::standard();
            let cs = gen::constructions(*seed, *count, &sig);
            let models = ModelFamily::new(sig, budget.clone()).models(&[])?;
            let r = theorem1_check(&cs, &models, budget)?;
            out!(
                "{} constructions, {} models, {} cases, {} failures",
                cs.len(),
                models.len(),
                r.checked,
                r.failures.len()
            );
            for f in r.failures.iter().take(10) {
                out!("FAIL {} in model {}", cs[f.construction], f.model);
            }
            if !r.failures.is_empty() {
                return Err(Error::Failed("Theorem 1 check failed".into()));
            }
        }
        Query::Compensation { count, seed } => {
            let sig = Signature::standard();
            let rs = gen::sub_requests(*seed, *count, &sig);
            let models = arith_models(budget)?;
            let r = compensation_sweep(&rs, &models, budget)?;
            out!(
                "{} requests, {} checked, {} skipped (improper replacement), {} violations",
                rs.len(),
                r.checked,
                r.skipped_improper,
                r.violations.len()
            );
            for v in r.violations.iter().take(10) {
                let q = &rs[v.request];
                let m = &models[v.model];
                out!(
                    "FAIL ({}, {}, {}) under {}",
                    q.replacement,
                    q.variable.name,
                    q.target,
                    show::assignment(m, &v.assignment)
                );
            }
            if !r.violations.is_empty() {
                return Err(Error::Failed("compensation violations".into()));
            }
        }
        Query::Sweep { proof, sig } => {
            let s = load_script(proof, sig)?;
            match corpus::falsify(&s, budget)? {
                Some(w) => return Err(Error::Failed(format!("counterexample: {w}"))),
                None => out!("every rule instance is valid over the model family"),
            }
        }
        Query::Valid { sequent, model } => {
            let m = modelfile::resolve(model)?;
            let s = parse_sequent(sequent, m.signature())?.elaborate(m.signature())?;
            match sequent_valid(&s, &m, budget)? {
                None => out!("valid"),
                Some(v) => {
                    out!("invalid under {}", show::assignment(&m, &v));
                    return Err(Error::Failed("not valid".into()));
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Check {
            proof,
            sig,
            sweep,
            budget,
        } => cmd_check(&proof, &sig, sweep, &parse_budget(&budget)?),
        Command::Eval {
            construction,
            model,
            assign,
            max_order,
        } => cmd_eval(&construction, &model, &assign, max_order),
        Command::Corpus { item, list, budget } => cmd_corpus(&item, list, &parse_budget(&budget)?),
        Command::Oracle { query, budget } => cmd_oracle(&query, &parse_budget(&budget)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
