//! Driver behind the `epsilon` binary: run problems, replay traces, explain steps.
//!
//! Structured traces are JSON lines. Each step is one record from
//! [`HStep::to_json`]; the last line is a summary object with an `outcome` key.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use epsilon_core::frontend::{parse_problem, Problem};
use epsilon_core::history::{subst_to_json, validate, HistoricalSubstitution};
use epsilon_core::hproc::{
    apply, choose, extract_witness, h_step, is_solving, run, Axiom, HStep, Outcome, RankCase,
    RunConfig,
};
use epsilon_core::lang::Term;
use epsilon_core::subst::{incorrect_entries, models};
use serde_json::{json, Value as Json};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_STEP_LIMIT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Debug)]
pub struct CliConfig {
    /// Overrides the problem's `max-steps` option.
    pub max_steps: Option<u64>,
    pub check: bool,
    /// Structured trace destination; step records go to the output stream when absent.
    pub trace: Option<PathBuf>,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig { max_steps: None, check: false, trace: None, format: Format::Text }
    }
}

pub fn load(path: &Path) -> Result<Problem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    parse_problem(&text).map_err(|e| format!("{}:{}", path.display(), e))
}

fn outcome_name(o: &Outcome) -> &'static str {
    match o {
        Outcome::Solved { .. } => "solved",
        Outcome::StepLimit { .. } => "step-limit",
        Outcome::InternalError { .. } => "internal-error",
    }
}

/// Witness numeral and the goal instance it satisfies, per goal.
fn witnesses(p: &Problem, hs: &HistoricalSubstitution) -> Vec<(String, Result<String, String>)> {
    p.goals
        .iter()
        .map(|g| {
            let r = extract_witness(&p.lang, &hs.s, &g.phi, g.var)
                .map(|n| {
                    let inst = g.phi.subst(g.var, &Term::Num(n.clone()));
                    format!("{} ({})", n, inst)
                })
                .map_err(|e| e.to_string());
            (g.source.to_string(), r)
        })
        .collect()
}

fn summary_json(p: &Problem, o: &Outcome) -> Json {
    let hs = o.state();
    let (pj, vj) = hs.hist.to_json();
    let ws: Vec<Json> = witnesses(p, hs)
        .into_iter()
        .map(|(g, r)| match r {
            Ok(w) => json!({"goal": g, "witness": w}),
            Err(e) => json!({"goal": g, "error": e}),
        })
        .collect();
    let mut out = json!({
        "outcome": outcome_name(o),
        "steps": o.steps(),
        "S": subst_to_json(&hs.s),
        "P": pj,
        "V": vj,
        "witnesses": ws,
    });
    if let Outcome::InternalError { error, .. } = o {
        out["error"] = json!(error.to_string());
    }
    out
}

fn summary_text(p: &Problem, o: &Outcome) -> String {
    let hs = o.state();
    let n = o.steps();
    let plural = if n == 1 { "" } else { "s" };
    let mut s = match o {
        Outcome::Solved { .. } => format!("solved in {} step{}\n", n, plural),
        Outcome::StepLimit { .. } => format!("step limit reached after {} step{}\n", n, plural),
        Outcome::InternalError { error, .. } => {
            format!("internal error after {} step{}: {}\n", n, plural, error)
        }
    };
    let _ = writeln!(s, "S = {}", hs.s);
    let _ = writeln!(s, "{}", hs.hist);
    for (g, r) in witnesses(p, hs) {
        match r {
            Ok(w) => {
                let _ = writeln!(s, "witness for {}: {}", g, w);
            }
            Err(e) => {
                let _ = writeln!(s, "no witness: {}", e);
            }
        }
    }
    s
}

/// Runs a problem; returns the exit code.
pub fn cmd_run(path: &Path, cfg: &CliConfig, out: &mut dyn Write) -> io::Result<i32> {
    let p = match load(path) {
        Ok(p) => p,
        Err(e) => {
            writeln!(out, "error: {}", e)?;
            return Ok(EXIT_INPUT);
        }
    };
    let max_steps = cfg.max_steps.or(p.max_steps()).unwrap_or(RunConfig::default().max_steps);
    if max_steps == 0 {
        writeln!(out, "error: --max-steps must be at least 1")?;
        return Ok(EXIT_INPUT);
    }
    run_problem(&p, RunConfig { max_steps, check: cfg.check }, cfg, out)
}

pub fn run_problem(
    p: &Problem,
    rc: RunConfig,
    cfg: &CliConfig,
    out: &mut dyn Write,
) -> io::Result<i32> {
    let mut trace_file = match &cfg.trace {
        Some(path) => Some(io::BufWriter::new(fs::File::create(path)?)),
        None => None,
    };
    let mut io_err = None;
    let outcome = run(&p.lang, &p.critical, rc, &mut |step: &HStep| {
        let r = match trace_file.as_mut() {
            Some(f) => writeln!(f, "{}", step.to_json()),
            None => match cfg.format {
                Format::Structured => writeln!(out, "{}", step.to_json()),
                Format::Text => writeln!(out, "{}", step),
            },
        };
        if let Err(e) = r {
            io_err.get_or_insert(e);
        }
    });
    if let Some(e) = io_err {
        return Err(e);
    }
    let summary = summary_json(p, &outcome);
    if let Some(mut f) = trace_file {
        writeln!(f, "{}", summary)?;
        f.flush()?;
    }
    match cfg.format {
        Format::Structured => writeln!(out, "{}", summary)?,
        Format::Text => write!(out, "{}", summary_text(p, &outcome))?,
    }
    Ok(match outcome {
        Outcome::Solved { .. } => EXIT_SOLVED,
        Outcome::StepLimit { .. } => EXIT_STEP_LIMIT,
        Outcome::InternalError { .. } => EXIT_INTERNAL,
    })
}

/// Replays a structured trace against the problem, recomputing every step.
pub fn check_trace(p: &Problem, trace: &str) -> Result<u64, String> {
    let mut state = HistoricalSubstitution::empty();
    let mut steps = 0u64;
    let mut summary = None;
    for (lineno, line) in trace.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: Json =
            serde_json::from_str(line).map_err(|e| format!("line {}: {}", lineno + 1, e))?;
        if summary.is_some() {
            return Err(format!("line {}: record after the summary", lineno + 1));
        }
        if rec.get("outcome").is_some() {
            summary = Some(rec);
            continue;
        }
        let k = steps + 1;
        let (next, expected) = match h_step(&p.lang, &state, &p.critical, k) {
            Ok(Some(x)) => x,
            Ok(None) => return Err(format!("step {}: trace continues after S is solving", k)),
            Err(e) => return Err(format!("step {}: {}", k, e)),
        };
        let expected = expected.to_json();
        if rec != expected {
            let field = expected
                .as_object()
                .and_then(|o| o.iter().find(|(key, v)| rec.get(key.as_str()) != Some(v)))
                .map(|(key, _)| key.clone())
                .unwrap_or_else(|| "record".into());
            return Err(format!("step {}: field {} differs from the recomputed step", k, field));
        }
        if let Some((e, v)) = incorrect_entries(&p.lang, &next.s).first() {
            return Err(format!("step {}: incorrect entry {} := {}", k, e, v));
        }
        let diag = validate(&next, &p.lang);
        if !diag.is_empty() {
            return Err(format!("step {}: {}", k, diag.join("; ")));
        }
        state = next;
        steps = k;
    }
    let summary = summary.ok_or("trace has no summary line")?;
    let solving = is_solving(&state.s, &p.critical);
    match summary["outcome"].as_str() {
        Some("solved") if !solving => return Err(format!("step {}: summary claims solved", steps)),
        Some("step-limit") if solving => {
            return Err(format!("step {}: summary claims step limit on a solving S", steps))
        }
        _ => {}
    }
    if summary["steps"].as_u64() != Some(steps) {
        return Err(format!("summary step count differs from {} replayed steps", steps));
    }
    let (pj, vj) = state.hist.to_json();
    if summary["S"] != subst_to_json(&state.s) || summary["P"] != pj || summary["V"] != vj {
        return Err(format!("step {}: summary state differs from the replayed state", steps));
    }
    Ok(steps)
}

pub fn cmd_check(trace_path: &Path, problem_path: &Path, out: &mut dyn Write) -> io::Result<i32> {
    let p = match load(problem_path) {
        Ok(p) => p,
        Err(e) => {
            writeln!(out, "error: {}", e)?;
            return Ok(EXIT_INPUT);
        }
    };
    let trace = match fs::read_to_string(trace_path) {
        Ok(t) => t,
        Err(e) => {
            writeln!(out, "error: {}: {}", trace_path.display(), e)?;
            return Ok(EXIT_INPUT);
        }
    };
    match check_trace(&p, &trace) {
        Ok(n) => {
            writeln!(out, "ok: {} step{} replayed", n, if n == 1 { "" } else { "s" })?;
            Ok(EXIT_SOLVED)
        }
        Err(e) => {
            writeln!(out, "divergence: {}", e)?;
            Ok(EXIT_DIVERGED)
        }
    }
}

fn analyze_case(axiom: &Axiom) -> (u8, &'static str) {
    match axiom {
        Axiom::Pred { .. } => (1, "predecessor"),
        Axiom::Epsilon { .. } => (2, "epsilon"),
        Axiom::Induction { .. } => (3, "induction"),
        Axiom::InductiveDef { .. } => (4, "inductive definition"),
        Axiom::Closure { .. } => (5, "closure"),
    }
}

/// Report on the step taken from `S_k`.
pub fn explain(p: &Problem, k: u64) -> Result<String, String> {
    let mut state = HistoricalSubstitution::empty();
    for i in 0..k {
        match h_step(&p.lang, &state, &p.critical, i + 1) {
            Ok(Some((next, _))) => state = next,
            Ok(None) if i == 0 => return Err(format!("step {} out of range: already solving", k)),
            Ok(None) => {
                return Err(format!("step {} out of range: solved after {} steps", k, i))
            }
            Err(e) => return Err(format!("step {} out of range: {}", k, e)),
        }
    }
    let choice = match choose(&p.lang, &state, &p.critical) {
        Ok(Some(c)) => c,
        Ok(None) if k == 0 => return Ok("already solving\n".into()),
        Ok(None) => return Err(format!("step {} out of range: solved after {} steps", k, k)),
        Err(e) => return Err(e.to_string()),
    };
    let cr = &p.critical[choice.index];
    let (num, name) = analyze_case(&cr.axiom);
    let after = apply(&state, &choice.e, &choice.v);
    let mut s = String::new();
    let _ = writeln!(s, "step {}", k);
    let shown = cr.source.as_ref().map_or_else(|| cr.formula.to_string(), |f| f.to_string());
    let _ = writeln!(s, "chosen Cr[{}]: {}", choice.index, shown);
    let _ = writeln!(s, "analysis: case {} ({})", num, name);
    if let Axiom::Closure { .. } = cr.axiom {
        let sub = if RankCase::of(&choice.e) == RankCase::OmegaNeg {
            "A(n, φ) false, retract n ∈ I"
        } else {
            "A(n, φ) true, witness the antecedent"
        };
        let _ = writeln!(s, "closure: {}", sub);
    }
    let _ = writeln!(s, "H-expression: {} := {}", choice.e, choice.v);
    let _ = writeln!(s, "H case: {}", case_label(RankCase::of(&choice.e)));
    let falsified: Vec<usize> = (0..p.critical.len())
        .filter(|&i| !models(&state.s.standard(), &p.critical[i].formula))
        .collect();
    let _ = writeln!(s, "false critical formulas: {:?}", falsified);
    let _ = writeln!(s, "before: S = {}", state.s);
    let _ = writeln!(s, "        {}", state.hist);
    let _ = writeln!(s, "after:  S = {}", after.s);
    let _ = writeln!(s, "        {}", after.hist);
    Ok(s)
}

fn case_label(c: RankCase) -> &'static str {
    match c {
        RankCase::Low => "Low (rank below Ω)",
        RankCase::High => "High (rank above Ω)",
        RankCase::OmegaPos => "OmegaPos (n ∈ I := ⊤)",
        RankCase::OmegaNeg => "OmegaNeg (c_n, roll back P)",
    }
}

pub fn cmd_explain(path: &Path, k: u64, out: &mut dyn Write) -> io::Result<i32> {
    let p = match load(path) {
        Ok(p) => p,
        Err(e) => {
            writeln!(out, "error: {}", e)?;
            return Ok(EXIT_INPUT);
        }
    };
    match explain(&p, k) {
        Ok(r) => {
            write!(out, "{}", r)?;
            Ok(EXIT_SOLVED)
        }
        Err(e) => {
            writeln!(out, "error: {}", e)?;
            Ok(EXIT_INPUT)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STEP: &str = "(crit eps 1 x (= x 1))\n(crit eps 2 x (= x 2))\n";

    fn structured(p: &Problem) -> (i32, String) {
        let cfg = CliConfig { format: Format::Structured, ..CliConfig::default() };
        let mut out = Vec::new();
        let code = run_problem(p, RunConfig::default(), &cfg, &mut out).unwrap();
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn structured_run_checks_against_itself() {
        let p = parse_problem(TWO_STEP).unwrap();
        let (code, trace) = structured(&p);
        assert_eq!(code, EXIT_SOLVED);
        assert_eq!(check_trace(&p, &trace), Ok(2));
    }

    #[test]
    fn check_rejects_a_trace_for_another_problem() {
        let p = parse_problem(TWO_STEP).unwrap();
        let q = parse_problem("(crit eps 1 x (= x 1))\n").unwrap();
        let (_, trace) = structured(&q);
        assert!(check_trace(&p, &trace).is_err());
    }

    #[test]
    fn step_limit_is_reported() {
        let p = parse_problem(TWO_STEP).unwrap();
        let rc = RunConfig { max_steps: 1, check: false };
        let mut out = Vec::new();
        let code = run_problem(&p, rc, &CliConfig::default(), &mut out).unwrap();
        assert_eq!(code, EXIT_STEP_LIMIT);
    }

    #[test]
    fn explain_names_the_case() {
        let p = parse_problem(TWO_STEP).unwrap();
        let report = explain(&p, 0).unwrap();
        assert!(report.contains("case 2 (epsilon)"), "{}", report);
        assert!(explain(&p, 7).unwrap_err().starts_with("step 7 out of range"));
    }
}
