//! Satisfiability service over formulas.
//!
//! Two interchangeable backends sit behind [`Solver`]: a built-in
//! deterministic search engine, and an external SMT process speaking
//! SMT-LIB2 over a pipe. A separate naive enumerator, [`brute_force_sat`],
//! serves as the testing oracle on small domains. Every Sat answer is
//! re-checked by local evaluation before it is returned.

use std::time::{Duration, Instant};

use crate::formula::{eval_formula, Formula, Model, VarTable};
use crate::ir::{CmpOp, Val};
use crate::trace::VarId;

mod brute;
mod builtin;
mod process;
mod smtlib;

pub use brute::brute_force_sat;
pub use process::{detect_external, run_smt_shell, ExternalSolver};
pub use smtlib::{emit_smtlib, parse_smtlib_script, ParsedScript};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverResult {
    Sat(Model),
    Unsat,
    Unknown(UnknownReason),
}

impl SolverResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolverResult::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    Budget,
    Backend(String),
}

impl std::fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnknownReason::Timeout => write!(f, "timeout"),
            UnknownReason::Budget => write!(f, "budget exhausted"),
            UnknownReason::Backend(msg) => write!(f, "backend error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendKind {
    #[default]
    Builtin,
    External,
}

/// Search/time budget threaded through solver calls.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub nodes: usize,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { nodes: 2_000_000, deadline: None }
    }
}

impl Budget {
    pub fn with_deadline(deadline: Option<Instant>) -> Self {
        Budget { deadline, ..Budget::default() }
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }

    pub fn expired(&self) -> bool {
        matches!(self.remaining(), Some(d) if d.is_zero())
    }
}

#[derive(Debug, Clone)]
pub struct Solver {
    pub kind: BackendKind,
    external: Option<ExternalSolver>,
}

impl Solver {
    pub fn builtin() -> Self {
        Solver { kind: BackendKind::Builtin, external: None }
    }

    /// External backend; solver command auto-detected (`VERIFIX_SMT_CMD`,
    /// then z3/cvc5 on PATH, then the bundled `smt-shell` subprocess).
    pub fn external() -> Self {
        Solver { kind: BackendKind::External, external: Some(detect_external()) }
    }

    /// External backend with an explicit command line.
    pub fn external_with(cmd: Vec<String>) -> Self {
        Solver { kind: BackendKind::External, external: Some(ExternalSolver { cmd }) }
    }

    pub fn new(kind: BackendKind) -> Self {
        match kind {
            BackendKind::Builtin => Solver::builtin(),
            BackendKind::External => Solver::external(),
        }
    }

    fn raw_check(&self, f: &Formula, table: &VarTable, budget: &Budget) -> SolverResult {
        if budget.expired() {
            return SolverResult::Unknown(UnknownReason::Timeout);
        }
        let res = match self.kind {
            BackendKind::Builtin => builtin::solve(f, table, budget),
            BackendKind::External => {
                self.external.as_ref().expect("external solver configured").check(f, table, budget)
            }
        };
        // Never return a model that fails local evaluation.
        if let SolverResult::Sat(model) = &res {
            match eval_formula(f, model, table) {
                Some(true) => {}
                other => {
                    return SolverResult::Unknown(UnknownReason::Backend(format!(
                        "model failed local re-evaluation ({other:?})"
                    )))
                }
            }
        }
        res
    }

    /// Check satisfiability. When `minimize_inputs` is set and the formula
    /// is satisfiable, input variables are lexicographically minimized (in
    /// variable-id order) so witness inputs are deterministic.
    pub fn check_sat(
        &self,
        f: &Formula,
        table: &VarTable,
        budget: &Budget,
        minimize_inputs: bool,
    ) -> SolverResult {
        let first = self.raw_check(f, table, budget);
        let model = match first {
            SolverResult::Sat(m) => m,
            other => return other,
        };
        if !minimize_inputs {
            return SolverResult::Sat(model);
        }
        let mut best = model;
        let mut pins: Vec<Formula> = Vec::new();
        for input in table.input_ids() {
            let cur = match best.vals.get(&input) {
                Some(Val::Int(n)) => *n,
                _ => continue,
            };
            let mut chosen = cur;
            for candidate in 0..cur {
                if budget.expired() {
                    break;
                }
                let mut parts = vec![f.clone()];
                parts.extend(pins.iter().cloned());
                parts.push(Formula::Cmp(
                    CmpOp::Eq,
                    crate::formula::SymTerm::Var(input),
                    crate::formula::SymTerm::Const(Val::Int(candidate)),
                ));
                let probe = Formula::and(parts);
                if let SolverResult::Sat(m) = self.raw_check(&probe, table, budget) {
                    chosen = candidate;
                    best = m;
                    break;
                }
            }
            pins.push(Formula::Cmp(
                CmpOp::Eq,
                crate::formula::SymTerm::Var(input),
                crate::formula::SymTerm::Const(Val::Int(chosen)),
            ));
        }
        SolverResult::Sat(best)
    }
}

/// Push negations down to atoms. `OrdLt`/`OrdLe` are closed under
/// negation over integers; negated distinct expands to a pairwise
/// equality disjunction.
pub(crate) fn to_nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True => {
            if neg {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::False => {
            if neg {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::And(fs) => {
            let parts = fs.iter().map(|g| to_nnf(g, neg)).collect();
            if neg {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Or(fs) => {
            let parts = fs.iter().map(|g| to_nnf(g, neg)).collect();
            if neg {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Not(inner) => to_nnf(inner, !neg),
        Formula::OrdLt(a, b) => {
            if neg {
                Formula::OrdLe(*b, *a)
            } else {
                Formula::OrdLt(*a, *b)
            }
        }
        Formula::OrdLe(a, b) => {
            if neg {
                Formula::OrdLt(*b, *a)
            } else {
                Formula::OrdLe(*a, *b)
            }
        }
        Formula::OrdDistinct(evs) => {
            if !neg {
                return Formula::OrdDistinct(evs.clone());
            }
            let mut pairs = Vec::new();
            for i in 0..evs.len() {
                for j in i + 1..evs.len() {
                    use crate::formula::OrdTerm::Ev;
                    pairs.push(Formula::and(vec![
                        Formula::OrdLe(Ev(evs[i]), Ev(evs[j])),
                        Formula::OrdLe(Ev(evs[j]), Ev(evs[i])),
                    ]));
                }
            }
            Formula::or(pairs)
        }
        Formula::Cmp(op, a, b) => {
            let op = if neg { op.negate() } else { *op };
            Formula::Cmp(op, a.clone(), b.clone())
        }
    }
}

/// Finite domain of a value variable: `0..2^w` plus null when nullable.
pub(crate) fn var_domain(table: &VarTable, id: VarId) -> (u64, bool) {
    match table.get(id) {
        Some(info) => (1u64 << info.width.min(32), info.nullable),
        None => (256, false),
    }
}
