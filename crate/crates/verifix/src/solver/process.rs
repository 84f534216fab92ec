//! External SMT backend: a child process speaking SMT-LIB2 over a pipe.
//!
//! The command is taken from `VERIFIX_SMT_CMD`, else z3/cvc5 found on
//! PATH, else the bundled `smt-shell` subcommand of this binary (a
//! self-contained SMT-LIB interpreter over the emitted subset), so the
//! external path stays exercisable on machines without a solver install.

use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

use super::smtlib::{emit_smtlib, parse_model_output, parse_smtlib_script};
use super::{Budget, SolverResult, UnknownReason};
use crate::formula::{Formula, VarTable};

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub cmd: Vec<String>,
}

fn on_path(bin: &str) -> bool {
    let Some(paths) = std::env::var_os("PATH") else { return false };
    std::env::split_paths(&paths).any(|dir| dir.join(bin).is_file())
}

/// Pick the external solver command.
pub fn detect_external() -> ExternalSolver {
    if let Ok(cmd) = std::env::var("VERIFIX_SMT_CMD") {
        let parts: Vec<String> = cmd.split_whitespace().map(|s| s.to_string()).collect();
        if !parts.is_empty() {
            return ExternalSolver { cmd: parts };
        }
    }
    if on_path("z3") {
        return ExternalSolver { cmd: vec!["z3".into(), "-in".into(), "-smt2".into()] };
    }
    if on_path("cvc5") {
        return ExternalSolver {
            cmd: vec!["cvc5".into(), "--lang".into(), "smt2".into(), "-q".into(), "-".into()],
        };
    }
    let exe = std::env::current_exe()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|_| "verifix".into());
    ExternalSolver { cmd: vec![exe, "smt-shell".into()] }
}

impl ExternalSolver {
    pub fn check(&self, f: &Formula, table: &VarTable, budget: &Budget) -> SolverResult {
        let mut script = emit_smtlib(f, table);
        script.push_str("(exit)\n");
        let wait = budget.remaining().unwrap_or(Duration::from_secs(600));
        match self.run_script(&script, wait) {
            Ok(output) => {
                let mut res = decode_output(&output);
                if let SolverResult::Sat(model) = &mut res {
                    complete_model(model, f, table);
                }
                res
            }
            Err(e) => SolverResult::Unknown(UnknownReason::Backend(e)),
        }
    }

    fn run_script(&self, script: &str, wait: Duration) -> Result<String, String> {
        let mut child = Command::new(&self.cmd[0])
            .args(&self.cmd[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("spawn {}: {e}", self.cmd[0]))?;
        let mut stdin = child.stdin.take().ok_or("no stdin")?;
        stdin.write_all(script.as_bytes()).map_err(|e| format!("write: {e}"))?;
        drop(stdin);
        let stdout = child.stdout.take().ok_or("no stdout")?;
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut out = String::new();
            use std::io::Read;
            let mut rdr = stdout;
            let _ = rdr.read_to_string(&mut out);
            let _ = tx.send(out);
        });
        match rx.recv_timeout(wait) {
            Ok(out) => {
                let _ = child.wait();
                Ok(out)
            }
            Err(_) => {
                let _ = child.kill();
                let _ = child.wait();
                Err("timeout".into())
            }
        }
    }
}

/// Variables whose atoms constant-fold away during emission never appear
/// in solver output but cannot affect satisfaction; give them defaults so
/// the model stays total over the formula (re-evaluation then verifies).
fn complete_model(model: &mut crate::formula::Model, f: &Formula, table: &VarTable) {
    let mut next = model.ord.values().copied().max().unwrap_or(0);
    for ev in f.ord_vars() {
        model.ord.entry(ev).or_insert_with(|| {
            next += 1;
            next
        });
    }
    for v in f.value_vars() {
        model.vals.entry(v).or_insert_with(|| {
            if table.get(v).map(|i| i.nullable).unwrap_or(false) {
                crate::ir::Val::Null
            } else {
                crate::ir::Val::Int(0)
            }
        });
    }
}

fn decode_output(output: &str) -> SolverResult {
    let verdict = output.lines().map(str::trim).find(|l| !l.is_empty());
    match verdict {
        Some("sat") => match parse_model_output(output) {
            Ok(model) => SolverResult::Sat(model),
            Err(e) => SolverResult::Unknown(UnknownReason::Backend(format!("bad model: {e}"))),
        },
        Some("unsat") => SolverResult::Unsat,
        Some("unknown") => SolverResult::Unknown(UnknownReason::Backend("solver unknown".into())),
        Some(other) => {
            SolverResult::Unknown(UnknownReason::Backend(format!("unexpected output `{other}`")))
        }
        None => SolverResult::Unknown(UnknownReason::Backend("empty output".into())),
    }
}

/// Entry point of the `smt-shell` subcommand: read one SMT-LIB script from
/// stdin, solve with the built-in engine, print z3-style output.
pub fn run_smt_shell(input: &str, out: &mut dyn Write) -> i32 {
    let parsed = match parse_smtlib_script(input) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "(error \"{e}\")");
            return 1;
        }
    };
    let res = super::builtin::solve(&parsed.formula, &parsed.table, &Budget::default());
    match res {
        SolverResult::Sat(model) => {
            let _ = writeln!(out, "sat");
            if parsed.want_model {
                let _ = writeln!(out, "(");
                for (ev, pos) in &model.ord {
                    let _ = writeln!(out, "  (define-fun O_e{ev} () Int {pos})");
                }
                for (id, val) in &model.vals {
                    let info = parsed.table.get(*id);
                    let width = info.map(|i| i.width).unwrap_or(8);
                    let nullable = info.map(|i| i.nullable).unwrap_or(false);
                    match val {
                        crate::ir::Val::Null => {
                            let _ = writeln!(out, "  (define-fun R{id} () (_ BitVec {width}) (_ bv0 {width}))");
                            let _ = writeln!(out, "  (define-fun R{id}_null () Bool true)");
                        }
                        crate::ir::Val::Int(n) => {
                            let _ = writeln!(out, "  (define-fun R{id} () (_ BitVec {width}) (_ bv{n} {width}))");
                            if nullable {
                                let _ = writeln!(out, "  (define-fun R{id}_null () Bool false)");
                            }
                        }
                    }
                }
                let _ = writeln!(out, ")");
            }
            0
        }
        SolverResult::Unsat => {
            let _ = writeln!(out, "unsat");
            0
        }
        SolverResult::Unknown(_) => {
            let _ = writeln!(out, "unknown");
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_solves_emitted_script() {
        use crate::formula::{OrdTerm::Ev, SymTerm, VarInfo};
        use crate::ir::{CmpOp, Val};
        let mut table = VarTable::default();
        table.insert(0, VarInfo { name: "i".into(), width: 4, nullable: false, is_input: true });
        let f = Formula::and(vec![
            Formula::OrdLt(Ev(1), Ev(2)),
            Formula::OrdDistinct(vec![1, 2]),
            Formula::Cmp(CmpOp::Gt, SymTerm::Var(0), SymTerm::Const(Val::Int(3))),
        ]);
        let mut script = emit_smtlib(&f, &table);
        script.push_str("(exit)\n");
        let mut out = Vec::new();
        let code = run_smt_shell(&script, &mut out);
        assert_eq!(code, 0);
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("sat"), "{text}");
        let model = parse_model_output(&text).unwrap();
        assert!(model.ord[&1] < model.ord[&2]);
        assert!(matches!(model.vals[&0], Val::Int(n) if n > 3));
    }

    #[test]
    fn shell_reports_unsat() {
        let script = "(set-logic ALL)\n(declare-const O_e1 Int)\n(declare-const O_e2 Int)\n(assert (< O_e1 O_e2))\n(assert (< O_e2 O_e1))\n(check-sat)\n";
        let mut out = Vec::new();
        run_smt_shell(script, &mut out);
        assert_eq!(String::from_utf8(out).unwrap().trim(), "unsat");
    }
}
