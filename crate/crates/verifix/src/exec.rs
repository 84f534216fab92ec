//! Deterministic concolic interpreter.
//!
//! Program threads are simulated cooperatively inside one interpreter; no
//! host threads are involved, which makes schedules exactly enforceable.
//! A scheduler decision point sits before every critical event (shared
//! access, lock/unlock, spawn/join); local computation, branches, and
//! asserts run as part of the enclosing turn. When a requested schedule
//! becomes infeasible the run continues under seeded-random scheduling and
//! the divergence point is recorded.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{SymTerm, VarInfo, VarTable};
use crate::ir::{mask, Atom, Cond, Program, Stmt, StmtKind, Val, VExpr};
use crate::trace::{
    Event, EventKind, Outcome, PathPrefix, ScheduleInput, Trace, TraceInput, VarId,
};

#[derive(Debug, Clone)]
pub struct ExecConfig {
    pub loop_unfold_depth: usize,
    pub random_seed: u64,
    pub max_steps: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig { loop_unfold_depth: 5, random_seed: 1, max_steps: 20_000 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("input `{0}` has no value")]
    InputMissing(String),
    #[error("unknown thread `{0}` in schedule")]
    UnknownThread(String),
    #[error("prefix infeasible at thread {thread}, site {label}: expected polarity {expected}")]
    InfeasiblePrefix { thread: String, label: String, expected: bool },
    #[error("execution touched undefined local `{0}`")]
    UndefinedLocal(String),
    #[error("interleaving enumeration budget exhausted")]
    BudgetExhausted,
}

/// One finished run: the trace plus the value-variable table it allocated.
#[derive(Debug, Clone)]
pub struct Run {
    pub trace: Trace,
    pub table: VarTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Unstarted,
    Ready,
    Done,
}

#[derive(Debug, Clone)]
enum Frame<'p> {
    Block { stmts: &'p [Stmt], idx: usize },
    /// Sits under a loop body; re-evaluates the condition when the body pops.
    Loop { stmt: &'p Stmt, iters: usize },
}

#[derive(Debug, Clone)]
struct ThreadState<'p> {
    status: Status,
    frames: Vec<Frame<'p>>,
    locals: BTreeMap<String, (Val, SymTerm)>,
}

#[derive(Debug, Clone)]
#[allow(dead_code)] // the blocking reason is kept for debug formatting
enum Attempt {
    /// Executed one critical event (plus trailing locals).
    Progress,
    /// Ran to completion without reaching another critical event.
    Finished,
    /// Could not execute its next critical event.
    WouldBlock(Reason),
    /// The whole run has halted (crash or step budget).
    Halted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Reason {
    Lock(String),
    Join(usize),
}

#[derive(Debug, Clone)]
struct Interp<'p> {
    program: &'p Program,
    cfg: &'p ExecConfig,
    inputs: BTreeMap<String, (u64, VarId)>,
    threads: Vec<ThreadState<'p>>,
    lock_holder: BTreeMap<String, usize>,
    store: BTreeMap<String, (Val, VarId)>,
    table: VarTable,
    events: Vec<Event>,
    bound_hits: BTreeMap<String, usize>,
    halted: Option<Outcome>,
    step_limit: bool,
    prefix: PathPrefix,
    prefix_cursor: Vec<usize>,
}

impl<'p> Interp<'p> {
    fn new(
        program: &'p Program,
        si: &ScheduleInput,
        prefix: &PathPrefix,
        cfg: &'p ExecConfig,
    ) -> Result<Self, ExecError> {
        let mut table = VarTable::default();
        let mut inputs = BTreeMap::new();
        for d in &program.inputs {
            let val = *si
                .input_values
                .get(&d.name)
                .ok_or_else(|| ExecError::InputMissing(d.name.clone()))?;
            let vvar = table.fresh(VarInfo {
                name: d.name.clone(),
                width: d.width,
                nullable: false,
                is_input: true,
            });
            inputs.insert(d.name.clone(), (mask(val, d.width), vvar));
        }
        let mut store = BTreeMap::new();
        for v in &program.shared_vars {
            // The initial value acts as an implicit write with order 0; its
            // value variable is not needed because candidates use the
            // declared constant directly.
            store.insert(v.name.clone(), (v.init, u32::MAX));
        }
        let threads = program
            .threads
            .iter()
            .map(|t| ThreadState {
                status: if t.name == program.entry { Status::Ready } else { Status::Unstarted },
                frames: vec![Frame::Block { stmts: &t.body, idx: 0 }],
                locals: BTreeMap::new(),
            })
            .collect();
        Ok(Interp {
            program,
            cfg,
            inputs,
            threads,
            lock_holder: BTreeMap::new(),
            store,
            table,
            events: Vec::new(),
            bound_hits: BTreeMap::new(),
            halted: None,
            step_limit: false,
            prefix: prefix.clone(),
            prefix_cursor: vec![0; program.threads.len()],
        })
    }

    fn eval_atom(&self, t: usize, a: &Atom) -> Result<(Val, SymTerm), ExecError> {
        match a {
            Atom::Const(v) => Ok((*v, SymTerm::Const(*v))),
            Atom::Input(name) => {
                let (val, vvar) =
                    self.inputs.get(name).ok_or_else(|| ExecError::InputMissing(name.clone()))?;
                Ok((Val::Int(*val), SymTerm::Var(*vvar)))
            }
            Atom::Local(name) => self.threads[t]
                .locals
                .get(name)
                .cloned()
                .ok_or_else(|| ExecError::UndefinedLocal(name.clone())),
        }
    }

    fn eval_vexpr(&self, t: usize, e: &VExpr) -> Result<(Val, SymTerm), ExecError> {
        match e {
            VExpr::Atom(a) => self.eval_atom(t, a),
            VExpr::Arith(op, a, b) => {
                let (av, asym) = self.eval_atom(t, a)?;
                let (bv, bsym) = self.eval_atom(t, b)?;
                let width = self.term_width_pair(&asym, &bsym);
                let val = match (av, bv) {
                    (Val::Int(x), Val::Int(y)) => {
                        let r = match op {
                            crate::ir::ArithOp::Add => x.wrapping_add(y),
                            crate::ir::ArithOp::Sub => x.wrapping_sub(y),
                            crate::ir::ArithOp::Mul => x.wrapping_mul(y),
                        };
                        Val::Int(mask(r, width))
                    }
                    _ => Val::Null,
                };
                Ok((val, SymTerm::Arith(*op, Box::new(asym), Box::new(bsym))))
            }
        }
    }

    fn term_width_pair(&self, a: &SymTerm, b: &SymTerm) -> u8 {
        let mut vars = Vec::new();
        a.vars(&mut vars);
        b.vars(&mut vars);
        vars.iter().map(|v| self.table.width(*v)).max().unwrap_or(8).max(1)
    }

    fn eval_cond(&self, t: usize, c: &Cond) -> Result<(bool, SymTerm), ExecError> {
        match c {
            Cond::Cmp(a, op, b) => {
                let (av, asym) = self.eval_vexpr(t, a)?;
                let (bv, bsym) = self.eval_vexpr(t, b)?;
                let width = self.term_width_pair(&asym, &bsym);
                let (av, bv) = (mask_val(av, width), mask_val(bv, width));
                Ok((crate::formula::eval_cmp(*op, av, bv), SymTerm::cmp(*op, asym, bsym)))
            }
            Cond::And(a, b) => {
                let (av, asym) = self.eval_cond(t, a)?;
                let (bv, bsym) = self.eval_cond(t, b)?;
                Ok((av && bv, SymTerm::And(Box::new(asym), Box::new(bsym))))
            }
            Cond::Or(a, b) => {
                let (av, asym) = self.eval_cond(t, a)?;
                let (bv, bsym) = self.eval_cond(t, b)?;
                Ok((av || bv, SymTerm::Or(Box::new(asym), Box::new(bsym))))
            }
            Cond::Not(a) => {
                let (av, asym) = self.eval_cond(t, a)?;
                Ok((!av, SymTerm::Not(Box::new(asym))))
            }
        }
    }

    fn push_event(&mut self, t: usize, label: &str, kind: EventKind) {
        let index = self.events.len() + 1;
        self.events.push(Event { index, thread: t, label: label.to_string(), kind });
        if self.events.len() >= self.cfg.max_steps && self.halted.is_none() {
            self.step_limit = true;
            self.halted =
                Some(Outcome::Blocked { lock_blocked: Vec::new(), join_blocked: Vec::new() });
        }
    }

    fn check_prefix_site(
        &mut self,
        t: usize,
        label: &str,
        polarity: bool,
    ) -> Result<(), ExecError> {
        let tname = &self.program.threads[t].name;
        let sites = self.prefix.sites_for(tname);
        let cur = self.prefix_cursor[t];
        if cur < sites.len() {
            let want = &sites[cur];
            if want.label != label || want.polarity != polarity {
                return Err(ExecError::InfeasiblePrefix {
                    thread: tname.clone(),
                    label: label.to_string(),
                    expected: want.polarity,
                });
            }
            self.prefix_cursor[t] += 1;
        }
        Ok(())
    }

    /// Current statement of a thread, if any. Pops exhausted frames and
    /// handles loop back-edges (which record branch events).
    fn current_stmt(&mut self, t: usize) -> Result<Option<&'p Stmt>, ExecError> {
        loop {
            if self.halted.is_some() {
                return Ok(None);
            }
            let frame = match self.threads[t].frames.last() {
                None => {
                    self.threads[t].status = Status::Done;
                    return Ok(None);
                }
                Some(f) => f.clone(),
            };
            match frame {
                Frame::Block { stmts, idx } => {
                    if idx < stmts.len() {
                        return Ok(Some(&stmts[idx]));
                    }
                    self.threads[t].frames.pop();
                }
                Frame::Loop { stmt, iters } => {
                    let (cond, body, label) = match &stmt.kind {
                        StmtKind::Loop { cond, body } => (cond, body, &stmt.label),
                        _ => unreachable!("loop frame holds a loop statement"),
                    };
                    if iters >= self.cfg.loop_unfold_depth {
                        *self.bound_hits.entry(label.clone()).or_insert(0) += 1;
                        self.threads[t].frames.pop();
                        continue;
                    }
                    let (taken, sym) = self.eval_cond(t, cond)?;
                    self.push_event(t, label, EventKind::Branch { taken, cond: sym });
                    self.check_prefix_site(t, label, taken)?;
                    if taken {
                        if let Some(Frame::Loop { iters, .. }) = self.threads[t].frames.last_mut()
                        {
                            *iters += 1;
                        }
                        self.threads[t].frames.push(Frame::Block { stmts: body, idx: 0 });
                    } else {
                        self.threads[t].frames.pop();
                    }
                }
            }
        }
    }

    fn advance(&mut self, t: usize) {
        if let Some(Frame::Block { idx, .. }) = self.threads[t].frames.last_mut() {
            *idx += 1;
        }
    }

    /// Run local statements (assign/branch/assert/loop control) until the
    /// next critical statement, the end of the thread, or a halt.
    fn run_locals(&mut self, t: usize) -> Result<(), ExecError> {
        loop {
            let stmt = match self.current_stmt(t)? {
                None => return Ok(()),
                Some(s) => s,
            };
            match &stmt.kind {
                StmtKind::Assign { local, expr } => {
                    let v = self.eval_vexpr(t, expr)?;
                    self.threads[t].locals.insert(local.clone(), v);
                    self.advance(t);
                }
                StmtKind::Branch { cond, then_block, else_block } => {
                    let (taken, sym) = self.eval_cond(t, cond)?;
                    self.push_event(t, &stmt.label, EventKind::Branch { taken, cond: sym });
                    self.check_prefix_site(t, &stmt.label, taken)?;
                    self.advance(t);
                    let block: &'p [Stmt] = if taken { then_block } else { else_block };
                    if !block.is_empty() {
                        self.threads[t].frames.push(Frame::Block { stmts: block, idx: 0 });
                    }
                    if self.halted.is_some() {
                        return Ok(());
                    }
                }
                StmtKind::Loop { .. } => {
                    self.advance(t);
                    self.threads[t].frames.push(Frame::Loop { stmt, iters: 0 });
                }
                StmtKind::Assert(cond) => {
                    let (ok, sym) = self.eval_cond(t, cond)?;
                    self.push_event(t, &stmt.label, EventKind::Assert { ok, cond: sym });
                    self.advance(t);
                    if !ok {
                        self.halted = Some(Outcome::AssertFailed { label: stmt.label.clone() });
                        return Ok(());
                    }
                    if self.halted.is_some() {
                        return Ok(());
                    }
                }
                _ => return Ok(()),
            }
            if self.halted.is_some() {
                return Ok(());
            }
        }
    }

    /// Try to run one turn of thread `t`: leading locals, one critical
    /// event, trailing locals.
    fn attempt_turn(&mut self, t: usize) -> Result<Attempt, ExecError> {
        if self.halted.is_some() {
            return Ok(Attempt::Halted);
        }
        if self.threads[t].status != Status::Ready {
            return Ok(Attempt::WouldBlock(Reason::Join(t)));
        }
        self.run_locals(t)?;
        if self.halted.is_some() {
            return Ok(Attempt::Halted);
        }
        let stmt = match self.current_stmt(t)? {
            None => return Ok(Attempt::Finished),
            Some(s) => s,
        };
        match &stmt.kind {
            StmtKind::Lock(l) => {
                if let Some(holder) = self.lock_holder.get(l) {
                    let _ = holder;
                    return Ok(Attempt::WouldBlock(Reason::Lock(l.clone())));
                }
                self.lock_holder.insert(l.clone(), t);
                self.push_event(t, &stmt.label, EventKind::Lock { lock: l.clone() });
                self.advance(t);
            }
            StmtKind::Unlock(l) => {
                // Releasing a lock the thread does not hold is a no-op and
                // is not recorded; leaks are legal.
                if self.lock_holder.get(l) == Some(&t) {
                    self.lock_holder.remove(l);
                    self.push_event(t, &stmt.label, EventKind::Unlock { lock: l.clone() });
                }
                self.advance(t);
            }
            StmtKind::ReadShared { local, var } => {
                let (val, _) = self.store[var as &str];
                let decl = self.program.shared(var).expect("validated");
                let vvar = self.fresh_read_var(var, &stmt.label, decl.width, decl.nullable);
                self.push_event(
                    t,
                    &stmt.label,
                    EventKind::Read { var: var.clone(), vvar, val, deref: false },
                );
                self.threads[t].locals.insert(local.clone(), (val, SymTerm::Var(vvar)));
                self.advance(t);
            }
            StmtKind::Deref { local, var } => {
                let (val, _) = self.store[var as &str];
                let decl = self.program.shared(var).expect("validated");
                let vvar = self.fresh_read_var(var, &stmt.label, decl.width, decl.nullable);
                self.push_event(
                    t,
                    &stmt.label,
                    EventKind::Read { var: var.clone(), vvar, val, deref: true },
                );
                self.check_prefix_site(t, &stmt.label, !val.is_null())?;
                if val.is_null() {
                    self.halted = Some(Outcome::NullDeref { label: stmt.label.clone() });
                    return Ok(Attempt::Halted);
                }
                self.threads[t].locals.insert(local.clone(), (val, SymTerm::Var(vvar)));
                self.advance(t);
            }
            StmtKind::WriteShared { var, expr } => {
                let (val, sym) = self.eval_vexpr(t, expr)?;
                let decl = self.program.shared(var).expect("validated");
                let val = mask_val(val, decl.width);
                let (prev_val, _) = self.store[var as &str];
                let prev_vvar = self.table.fresh(VarInfo {
                    name: format!("Rpre_{var}^{}", stmt.label),
                    width: decl.width,
                    nullable: decl.nullable,
                    is_input: false,
                });
                let vvar = self.table.fresh(VarInfo {
                    name: format!("W_{var}^{}", stmt.label),
                    width: decl.width,
                    nullable: decl.nullable,
                    is_input: false,
                });
                self.push_event(
                    t,
                    &stmt.label,
                    EventKind::Write {
                        var: var.clone(),
                        vvar,
                        val,
                        prev_vvar,
                        prev_val,
                        sym: sym.clone(),
                    },
                );
                self.store.insert(var.clone(), (val, vvar));
                self.advance(t);
            }
            StmtKind::Spawn(child) => {
                let c = self.program.thread_index(child).expect("validated");
                if self.threads[c].status == Status::Unstarted {
                    self.threads[c].status = Status::Ready;
                }
                self.push_event(t, &stmt.label, EventKind::Spawn { child: c });
                self.advance(t);
            }
            StmtKind::Join(child) => {
                let c = self.program.thread_index(child).expect("validated");
                if self.threads[c].status == Status::Ready {
                    // The target may only have local work left; let it
                    // finish so the join can proceed.
                    self.run_locals(c)?;
                    if self.halted.is_some() {
                        return Ok(Attempt::Halted);
                    }
                    if self.current_stmt(c)?.is_some() {
                        return Ok(Attempt::WouldBlock(Reason::Join(c)));
                    }
                }
                if self.threads[c].status != Status::Done {
                    return Ok(Attempt::WouldBlock(Reason::Join(c)));
                }
                self.push_event(t, &stmt.label, EventKind::Join { child: c });
                self.advance(t);
            }
            _ => unreachable!("run_locals stops only at critical statements"),
        }
        if self.halted.is_some() {
            return Ok(Attempt::Halted);
        }
        self.run_locals(t)?;
        Ok(Attempt::Progress)
    }

    fn fresh_read_var(&mut self, var: &str, label: &str, width: u8, nullable: bool) -> VarId {
        let base = format!("R_{var}^{label}");
        let occurrences =
            self.table.infos.values().filter(|i| i.name == base || i.name.starts_with(&format!("{base}#"))).count();
        let name = if occurrences == 0 { base } else { format!("{base}#{}", occurrences + 1) };
        self.table.fresh(VarInfo { name, width, nullable, is_input: false })
    }

    /// Threads that currently could be scheduled (started, not done).
    fn live_threads(&self) -> Vec<usize> {
        (0..self.threads.len()).filter(|&t| self.threads[t].status == Status::Ready).collect()
    }

    fn finish(mut self, divergence: Option<usize>) -> Result<Run, ExecError> {
        // Flush any threads that only have local work left.
        for t in 0..self.threads.len() {
            if self.halted.is_some() {
                break;
            }
            if self.threads[t].status == Status::Ready {
                self.run_locals(t)?;
                let _ = self.current_stmt(t)?;
            }
        }
        let outcome = match self.halted.take() {
            Some(o) => o,
            None => {
                if self.threads.iter().all(|t| t.status != Status::Ready) {
                    Outcome::Completed
                } else {
                    let mut lock_blocked = Vec::new();
                    let mut join_blocked = Vec::new();
                    for t in self.live_threads() {
                        match self.blocked_reason(t)? {
                            Some(Reason::Lock(l)) => lock_blocked.push((t, l)),
                            Some(Reason::Join(c)) => join_blocked.push((t, c)),
                            None => {}
                        }
                    }
                    Outcome::Blocked { lock_blocked, join_blocked }
                }
            }
        };
        let mut bound_hits = BTreeMap::new();
        std::mem::swap(&mut bound_hits, &mut self.bound_hits);
        if self.step_limit {
            bound_hits.insert("steps".to_string(), self.cfg.max_steps);
        }
        let trace = Trace {
            threads: self.program.threads.iter().map(|t| t.name.clone()).collect(),
            inputs: self
                .program
                .inputs
                .iter()
                .map(|d| {
                    let (val, vvar) = self.inputs[&d.name];
                    TraceInput { name: d.name.clone(), vvar, width: d.width, val }
                })
                .collect(),
            events: self.events,
            outcome,
            divergence,
            bound_hits,
        };
        Ok(Run { trace, table: self.table })
    }

    fn blocked_reason(&mut self, t: usize) -> Result<Option<Reason>, ExecError> {
        let stmt = match self.current_stmt(t)? {
            None => return Ok(None),
            Some(s) => s,
        };
        Ok(match &stmt.kind {
            StmtKind::Lock(l) if self.lock_holder.contains_key(l) => Some(Reason::Lock(l.clone())),
            StmtKind::Join(c) => {
                let ci = self.program.thread_index(c).expect("validated");
                if self.threads[ci].status != Status::Done {
                    Some(Reason::Join(ci))
                } else {
                    None
                }
            }
            _ => None,
        })
    }
}

fn mask_val(v: Val, width: u8) -> Val {
    match v {
        Val::Null => Val::Null,
        Val::Int(n) => Val::Int(mask(n, width)),
    }
}

/// Run a program under a schedule+input, honoring a path prefix.
pub fn guided_se(
    program: &Program,
    si: &ScheduleInput,
    prefix: &PathPrefix,
    cfg: &ExecConfig,
) -> Result<Run, ExecError> {
    let mut interp = Interp::new(program, si, prefix, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.random_seed);
    let mut divergence: Option<usize> = None;
    let mut cursor = 0usize;

    while interp.halted.is_none() {
        if divergence.is_none() && cursor < si.turns.len() {
            let name = &si.turns[cursor];
            let t = interp
                .program
                .thread_index(name)
                .ok_or_else(|| ExecError::UnknownThread(name.clone()))?;
            match interp.attempt_turn(t)? {
                Attempt::Progress => {
                    cursor += 1;
                    continue;
                }
                Attempt::Halted => break,
                Attempt::Finished | Attempt::WouldBlock(_) => {
                    divergence = Some(interp.events.len());
                    continue;
                }
            }
        }
        // Free-run mode: seeded-random choice among runnable threads.
        let live = interp.live_threads();
        if live.is_empty() {
            break;
        }
        let start = rng.gen_range(0..live.len());
        let mut progressed = false;
        for k in 0..live.len() {
            let t = live[(start + k) % live.len()];
            match interp.attempt_turn(t)? {
                Attempt::Progress | Attempt::Finished => {
                    progressed = true;
                    break;
                }
                Attempt::Halted => {
                    progressed = true;
                    break;
                }
                Attempt::WouldBlock(_) => continue,
            }
        }
        if !progressed {
            break; // everyone blocked
        }
    }
    interp.finish(divergence)
}

/// Replay: guided run with the empty prefix.
pub fn replay(program: &Program, si: &ScheduleInput, cfg: &ExecConfig) -> Result<Run, ExecError> {
    guided_se(program, si, &PathPrefix::default(), cfg)
}

/// Exhaustively enumerate maximal traces over all schedules for a fixed
/// input: depth-first search over scheduler choices at every critical
/// event. The brute-force interleaving oracle used by tests.
pub fn enumerate_all(
    program: &Program,
    input_values: &BTreeMap<String, u64>,
    cfg: &ExecConfig,
    budget: usize,
) -> Result<Vec<Run>, ExecError> {
    let si = ScheduleInput { input_values: input_values.clone(), turns: Vec::new() };
    let root = Interp::new(program, &si, &PathPrefix::default(), cfg)?;
    let mut out = Vec::new();
    let mut nodes = 0usize;
    dfs(root, &mut out, &mut nodes, budget)?;
    // Different flush orders can reproduce the same event sequence.
    let mut seen = BTreeSet::new();
    out.retain(|r| seen.insert(crate::trace::serialize_trace(&r.trace)));
    Ok(out)
}

fn dfs(
    state: Interp<'_>,
    out: &mut Vec<Run>,
    nodes: &mut usize,
    budget: usize,
) -> Result<(), ExecError> {
    *nodes += 1;
    if *nodes > budget {
        return Err(ExecError::BudgetExhausted);
    }
    if state.halted.is_some() {
        out.push(state.finish(None)?);
        return Ok(());
    }
    let live = state.live_threads();
    let mut progressed = false;
    for t in live {
        let mut next = state.clone();
        match next.attempt_turn(t)? {
            Attempt::Progress | Attempt::Finished | Attempt::Halted => {
                progressed = true;
                dfs(next, out, nodes, budget)?;
            }
            Attempt::WouldBlock(_) => {}
        }
    }
    if !progressed {
        out.push(state.finish(None)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_program;
    use crate::trace::serialize_trace;

    fn si(pairs: &[(&str, u64)], turns: &[&str]) -> ScheduleInput {
        ScheduleInput {
            input_values: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            turns: turns.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn straight_line_single_thread() {
        let p = parse_program(
            "shared x : int8 = 0\nthread main {\n 1: x = 3\n 2: r = x\n 3: assert (r == 3)\n}\n",
        )
        .unwrap();
        let run = replay(&p, &si(&[], &["main", "main"]), &ExecConfig::default()).unwrap();
        assert_eq!(run.trace.outcome, Outcome::Completed);
        assert!(run.trace.divergence.is_none());
        let labels: Vec<&str> = run.trace.labels();
        assert_eq!(labels, vec!["1", "2", "3"]);
    }

    #[test]
    fn determinism_bit_for_bit() {
        let p = parse_program(
            "shared x : int8 = 0\nlock l\ninput i : int8\nthread main {\n m1: spawn T1\n m2: join T1\n}\nthread T1 {\n 1: branch (i == 1) { 2: x = 1 }\n 3: x = 2\n}\n",
        )
        .unwrap();
        let s = si(&[("i", 1)], &["main", "T1", "T1", "main"]);
        let a = replay(&p, &s, &ExecConfig::default()).unwrap();
        let b = replay(&p, &s, &ExecConfig::default()).unwrap();
        assert_eq!(serialize_trace(&a.trace), serialize_trace(&b.trace));
    }

    #[test]
    fn mutual_exclusion_holds_in_traces() {
        let p = parse_program(
            "shared x : int8 = 0\nlock l\nthread main {\n m1: spawn A\n m2: spawn B\n m3: join A\n m4: join B\n}\nthread A {\n 1: lock(l)\n 2: x = 1\n 3: unlock(l)\n}\nthread B {\n 4: lock(l)\n 5: x = 2\n 6: unlock(l)\n}\n",
        )
        .unwrap();
        for seed in 0..20 {
            let cfg = ExecConfig { random_seed: seed, ..ExecConfig::default() };
            let run = replay(&p, &si(&[], &[]), &cfg).unwrap();
            assert_eq!(run.trace.outcome, Outcome::Completed);
            let mut holder: Option<usize> = None;
            for e in &run.trace.events {
                match &e.kind {
                    EventKind::Lock { .. } => {
                        assert!(holder.is_none(), "lock taken while held");
                        holder = Some(e.thread);
                    }
                    EventKind::Unlock { .. } => {
                        assert_eq!(holder, Some(e.thread));
                        holder = None;
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn deadlock_blocks_with_both_threads() {
        let p = parse_program(
            "lock l1\nlock l2\nshared x : int8 = 0\nthread main {\n m1: spawn A\n m2: spawn B\n m3: join A\n m4: join B\n}\nthread A {\n 1: lock(l1)\n 2: lock(l2)\n 3: unlock(l2)\n 4: unlock(l1)\n}\nthread B {\n 5: lock(l2)\n 6: lock(l1)\n 7: unlock(l1)\n 8: unlock(l2)\n}\n",
        )
        .unwrap();
        // Schedule: A takes l1, B takes l2, then everyone is stuck.
        let run =
            replay(&p, &si(&[], &["main", "main", "A", "B"]), &ExecConfig::default()).unwrap();
        match &run.trace.outcome {
            Outcome::Blocked { lock_blocked, .. } => {
                let threads: BTreeSet<usize> = lock_blocked.iter().map(|(t, _)| *t).collect();
                assert_eq!(threads.len(), 2);
            }
            other => panic!("expected blocked outcome, got {other:?}"),
        }
    }

    #[test]
    fn divergence_recorded_when_schedule_infeasible() {
        let p = parse_program(
            "lock l\nshared x : int8 = 0\nthread main {\n m1: spawn A\n m2: spawn B\n m3: join A\n m4: join B\n}\nthread A {\n 1: lock(l)\n 2: x = 1\n 3: unlock(l)\n}\nthread B {\n 4: lock(l)\n 5: x = 2\n 6: unlock(l)\n}\n",
        )
        .unwrap();
        // B scheduled while A holds the lock: divergence, random fallback.
        let run = replay(&p, &si(&[], &["main", "main", "A", "B"]), &ExecConfig::default()).unwrap();
        assert!(run.trace.divergence.is_some());
        assert_eq!(run.trace.outcome, Outcome::Completed);
    }

    #[test]
    fn independent_events_interleave_binomially() {
        // 2 threads x 2 critical events each, no interaction: C(4,2) = 6.
        let p = parse_program(
            "shared x : int8 = 0\nshared y : int8 = 0\nthread main {\n m1: spawn A\n m2: spawn B\n m3: join A\n m4: join B\n}\nthread A {\n 1: x = 1\n 2: x = 2\n}\nthread B {\n 3: y = 1\n 4: y = 2\n}\n",
        )
        .unwrap();
        let runs =
            enumerate_all(&p, &BTreeMap::new(), &ExecConfig::default(), 100_000).unwrap();
        // Schedules differ only in the interleaving of A and B events.
        let mut shapes = BTreeSet::new();
        for r in &runs {
            let shape: Vec<usize> = r
                .trace
                .events
                .iter()
                .filter(|e| matches!(e.kind, EventKind::Write { .. }))
                .map(|e| e.thread)
                .collect();
            shapes.insert(shape);
        }
        assert_eq!(shapes.len(), 6);
    }

    #[test]
    fn lock_collapses_interleavings() {
        let p = parse_program(
            "lock l\nshared x : int8 = 0\nthread main {\n m1: spawn A\n m2: spawn B\n m3: join A\n m4: join B\n}\nthread A {\n 1: lock(l)\n 2: unlock(l)\n}\nthread B {\n 3: lock(l)\n 4: unlock(l)\n}\n",
        )
        .unwrap();
        let runs = enumerate_all(&p, &BTreeMap::new(), &ExecConfig::default(), 100_000).unwrap();
        let mut orders = BTreeSet::new();
        for r in &runs {
            let order: Vec<(usize, String)> = r
                .trace
                .events
                .iter()
                .filter(|e| matches!(e.kind, EventKind::Lock { .. } | EventKind::Unlock { .. }))
                .map(|e| (e.thread, e.label.clone()))
                .collect();
            orders.insert(order);
        }
        assert_eq!(orders.len(), 2);
    }

    #[test]
    fn loop_unfold_bound_recorded() {
        let p = parse_program(
            "shared x : int8 = 0\nthread main {\n 1: c = 0\n 2: loop (c < 10) {\n 3: x = c\n 4: c = c + 1\n }\n 5: x = 99\n}\n",
        )
        .unwrap();
        let cfg = ExecConfig { loop_unfold_depth: 5, ..ExecConfig::default() };
        let run = replay(&p, &si(&[], &[]), &cfg).unwrap();
        assert_eq!(run.trace.bound_hits.get("2"), Some(&1));
        // 5 iterations ran, then the bound pruned the rest.
        let writes =
            run.trace.events.iter().filter(|e| e.label == "3").count();
        assert_eq!(writes, 5);
        assert_eq!(run.trace.outcome, Outcome::Completed);
    }

    #[test]
    fn missing_input_is_an_error() {
        let p = parse_program("input i : int8\nshared x : int8 = 0\nthread main { 1: x = i }\n")
            .unwrap();
        assert!(matches!(
            replay(&p, &si(&[], &[]), &ExecConfig::default()),
            Err(ExecError::InputMissing(_))
        ));
    }

    #[test]
    fn prefix_violation_rejected() {
        let p = parse_program(
            "input i : int8\nshared x : int8 = 0\nthread main {\n 1: branch (i == 0) { 2: x = 1 }\n}\n",
        )
        .unwrap();
        let mut prefix = PathPrefix::default();
        prefix.set(
            "main",
            vec![crate::trace::PathSite { label: "1".into(), polarity: false }],
        );
        // i = 0 forces the branch true, contradicting the prefix.
        let err = guided_se(&p, &si(&[("i", 0)], &[]), &prefix, &ExecConfig::default());
        assert!(matches!(err, Err(ExecError::InfeasiblePrefix { .. })));
    }
}
