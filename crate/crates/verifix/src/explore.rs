//! The verification driver: worklist loop, prefix splitting, new
//! schedule+input generation, and the parallel variant.
//!
//! Each work item is a schedule+input combination plus the path prefix it
//! realizes. Popping an item runs the patched program under guidance,
//! checks the resulting trace for atomicity violations and deadlocks, and
//! splits the realized path into unexplored prefix combinations whose
//! feasibility formulas the solver turns into new combinations. Sequential
//! mode is the parallel engine at width one, so the two share every code
//! path.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::deadlock::{self, PotentialDeadlock};
use crate::encode::{
    build_var_table, encode_av, encode_rw, encode_sync, encode_trace, find_av_instances,
    model_to_schedule_input, AvInstance,
};
use crate::exec::{guided_se, replay, ExecConfig, ExecError, Run};
use crate::formula::Formula;
use crate::ir::{AtomicRegionSpec, Program, Val};
use crate::solver::{BackendKind, Budget, Solver, SolverResult};
use crate::trace::{
    EventKind, Outcome, PathPrefix, PathSite, ScheduleInput, Trace,
};

#[derive(Debug, Clone)]
pub struct ExploreConfig {
    pub exec: ExecConfig,
    pub backend: BackendKind,
    pub timeout: Duration,
    pub find_all: bool,
    pub parallelism: usize,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            exec: ExecConfig::default(),
            backend: BackendKind::Builtin,
            timeout: Duration::from_secs(1200),
            find_all: false,
            parallelism: 1,
        }
    }
}

/// One worklist entry: a concrete combination plus the prefix it realizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkItem {
    pub si: ScheduleInput,
    pub prefix: PathPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BugKind {
    AtomicityViolation,
    Deadlock,
}

/// A validated bug: the witness replays to the claimed outcome.
#[derive(Debug, Clone)]
pub struct Bug {
    pub kind: BugKind,
    pub witness: ScheduleInput,
    pub description: String,
    /// Outcome of the validation replay.
    pub replay_outcome: Outcome,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Verified { paths_explored: usize, bound_hits: usize },
    AtomicityViolation(Box<Bug>),
    Deadlock(Box<Bug>),
    Timeout { paths_explored: usize },
    Unknown { reason: String, paths_explored: usize },
}

impl Verdict {
    pub fn class(&self) -> &'static str {
        match self {
            Verdict::Verified { .. } => "verified",
            Verdict::AtomicityViolation(_) => "av",
            Verdict::Deadlock(_) => "dl",
            Verdict::Timeout { .. } => "timeout",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// Full result of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub verdict: Verdict,
    /// All validated bugs (more than one only with find-all).
    pub bugs: Vec<Bug>,
    pub paths_explored: usize,
    pub bound_hits: usize,
    /// One line per explored path: prefix, outcome, timings.
    pub log: Vec<String>,
    /// Canonical forms of every explored prefix.
    pub explored: BTreeSet<String>,
    /// Canonical full per-thread site sequences realized by the runs.
    pub realized: BTreeSet<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("execution failed: {0}")]
    Exec(#[from] ExecError),
}

/// Seed of a verification: the combination that reproduced the original
/// buggy trace, or that trace itself.
#[derive(Debug, Clone)]
pub enum Seed {
    Combination(ScheduleInput),
    BuggyTrace(Trace),
}

impl Seed {
    fn into_si(self) -> ScheduleInput {
        match self {
            Seed::Combination(si) => si,
            Seed::BuggyTrace(tr) => tr.to_schedule_input(),
        }
    }
}

/// Split a realized path against the prefix that produced it: per-thread
/// alternatives are keep-the-full-suffix or flip one suffix site after
/// keeping the ones before it; the result is every cross-thread
/// combination except all-keep.
pub fn split(
    pre: &PathPrefix,
    path: &BTreeMap<String, Vec<PathSite>>,
    thread_order: &[String],
) -> Vec<PathPrefix> {
    let mut per_thread: Vec<(String, Vec<Vec<PathSite>>)> = Vec::new();
    for t in thread_order {
        let observed = path.get(t).cloned().unwrap_or_default();
        let pre_sites = pre.sites_for(t);
        // The prefix must actually be a prefix of the realized path.
        let plen = pre_sites.len().min(observed.len());
        let mut alts: Vec<Vec<PathSite>> = vec![observed.clone()];
        for k in plen..observed.len() {
            let mut alt: Vec<PathSite> = observed[..k].to_vec();
            alt.push(PathSite { label: observed[k].label.clone(), polarity: !observed[k].polarity });
            alts.push(alt);
        }
        per_thread.push((t.clone(), alts));
    }
    let mut combos: Vec<PathPrefix> = Vec::new();
    let mut counters = vec![0usize; per_thread.len()];
    loop {
        if counters.iter().any(|c| *c != 0) {
            let mut p = PathPrefix::default();
            for (i, (t, alts)) in per_thread.iter().enumerate() {
                p.set(t, alts[counters[i]].clone());
            }
            combos.push(p);
        }
        // Mixed-radix increment, last thread fastest.
        let mut i = per_thread.len();
        loop {
            if i == 0 {
                return combos;
            }
            i -= 1;
            counters[i] += 1;
            if counters[i] < per_thread[i].1.len() {
                break;
            }
            counters[i] = 0;
        }
    }
}

/// Number of combinations `split` yields before feasibility filtering.
pub fn split_size(suffix_lens: &[usize]) -> usize {
    suffix_lens.iter().map(|l| l + 1).product::<usize>() - 1
}

/// The sub-trace guaranteed by a prefix: for each constrained thread, its
/// events up to and including the last prefix site; every event of
/// unconstrained threads.
pub fn extract_sub_trace(tr: &Trace, pre: &PathPrefix) -> Trace {
    let mut keep: Vec<bool> = vec![false; tr.events.len()];
    for (ti, tname) in tr.threads.iter().enumerate() {
        let sites = pre.sites_for(tname);
        if sites.is_empty() {
            for (i, e) in tr.events.iter().enumerate() {
                if e.thread == ti {
                    keep[i] = true;
                }
            }
            continue;
        }
        // Find the event of the |sites|-th condition site of this thread.
        let mut seen = 0usize;
        let mut cut = None;
        for e in tr.events.iter().filter(|e| e.thread == ti) {
            let is_site = matches!(
                e.kind,
                EventKind::Branch { .. } | EventKind::Read { deref: true, .. }
            );
            if is_site {
                seen += 1;
                if seen == sites.len() {
                    cut = Some(e.index);
                    break;
                }
            }
        }
        let cut = cut.unwrap_or(usize::MAX);
        for (i, e) in tr.events.iter().enumerate() {
            if e.thread == ti && e.index <= cut {
                keep[i] = true;
            }
        }
    }
    let mut events = Vec::new();
    for (i, e) in tr.events.iter().enumerate() {
        if keep[i] {
            let mut e = e.clone();
            e.index = events.len() + 1;
            events.push(e);
        }
    }
    Trace {
        threads: tr.threads.clone(),
        inputs: tr.inputs.clone(),
        events,
        outcome: Outcome::Completed,
        divergence: None,
        bound_hits: BTreeMap::new(),
    }
}

/// Path-condition formula of a prefix over the sub-trace's recorded
/// symbolic conditions, with the prefix's polarities (flips included).
fn prefix_pc(sub: &Trace, pre: &PathPrefix) -> Formula {
    let mut parts = Vec::new();
    for (ti, tname) in sub.threads.iter().enumerate() {
        let sites = pre.sites_for(tname);
        if sites.is_empty() {
            continue;
        }
        let mut k = 0usize;
        for e in sub.events.iter().filter(|e| e.thread == ti) {
            if k >= sites.len() {
                break;
            }
            match &e.kind {
                EventKind::Branch { cond, .. } => {
                    let f = Formula::from_bool_term(cond);
                    parts.push(if sites[k].polarity { f } else { Formula::not(f) });
                    k += 1;
                }
                EventKind::Read { vvar, deref: true, .. } => {
                    let op = if sites[k].polarity {
                        crate::ir::CmpOp::Ne
                    } else {
                        crate::ir::CmpOp::Eq
                    };
                    parts.push(Formula::Cmp(
                        op,
                        crate::formula::SymTerm::Var(*vvar),
                        crate::formula::SymTerm::Const(Val::Null),
                    ));
                    k += 1;
                }
                _ => {}
            }
        }
    }
    Formula::and(parts)
}

/// Generate new schedule+input combinations for every feasible split of
/// the realized path. Infeasible prefixes are dropped; an Unknown solver
/// answer is retried once with a doubled budget, then dropped with a
/// warning line.
pub fn generate_new_si(
    program: &Program,
    run: &Run,
    pre: &PathPrefix,
    solver: &Solver,
    budget: &Budget,
    log: &mut Vec<String>,
) -> Vec<WorkItem> {
    let tr = &run.trace;
    let mut path: BTreeMap<String, Vec<PathSite>> = BTreeMap::new();
    for (ti, tname) in tr.threads.iter().enumerate() {
        path.insert(tname.clone(), tr.path_sites(ti));
    }
    let mut out = Vec::new();
    for pre_new in split(pre, &path, &tr.threads) {
        let sub = extract_sub_trace(tr, &pre_new);
        let evs: Vec<usize> = sub.events.iter().map(|e| e.index).collect();
        let f = Formula::and(vec![
            Formula::OrdDistinct(evs),
            prefix_pc(&sub, &pre_new),
            encode_sync(&sub),
            encode_rw(program, &sub),
        ]);
        let table = build_var_table(program, &sub);
        let mut res = solver.check_sat(&f, &table, budget, true);
        if matches!(res, SolverResult::Unknown(_)) {
            let doubled = Budget { nodes: budget.nodes.saturating_mul(2), ..*budget };
            res = solver.check_sat(&f, &table, &doubled, true);
        }
        match res {
            SolverResult::Sat(model) => {
                let si = model_to_schedule_input(&model, &sub);
                out.push(WorkItem { si, prefix: pre_new });
            }
            SolverResult::Unsat => {}
            SolverResult::Unknown(r) => {
                log.push(format!("warn: prefix {} dropped after unknown ({r})", pre_new));
            }
        }
    }
    out
}

/// Concretely check that a replayed trace violates the instance's
/// intended-atomicity property (pattern-violating values), by scanning
/// the replay for the corresponding events.
fn replay_violates(program: &Program, inst: &AvInstance, orig: &Trace, rtrace: &Trace) -> bool {
    // Identify events by (thread, label, per-thread occurrence).
    let locate = |idx: usize| -> Option<usize> {
        let e = orig.events.iter().find(|e| e.index == idx)?;
        let occ = orig
            .events
            .iter()
            .filter(|x| x.thread == e.thread && x.label == e.label && x.index <= e.index)
            .count();
        rtrace
            .events
            .iter()
            .filter(|x| x.thread == e.thread && x.label == e.label)
            .nth(occ - 1)
            .map(|x| x.index)
    };
    let value_of = |idx: usize| -> Option<Val> {
        rtrace.events.iter().find(|e| e.index == idx).and_then(|e| match &e.kind {
            EventKind::Read { val, .. } => Some(*val),
            EventKind::Write { val, .. } => Some(*val),
            _ => None,
        })
    };
    let prev_of = |idx: usize| -> Option<Val> {
        rtrace.events.iter().find(|e| e.index == idx).and_then(|e| match &e.kind {
            EventKind::Write { prev_val, .. } => Some(*prev_val),
            _ => None,
        })
    };
    // Value a variable holds just before a position in the replay.
    let at = |var: &str, idx: usize| -> Val {
        let mut v = program.shared(var).map(|d| d.init).unwrap_or(Val::Int(0));
        for e in &rtrace.events {
            if e.index >= idx {
                break;
            }
            if let EventKind::Write { var: w, val, .. } = &e.kind {
                if w == var {
                    v = *val;
                }
            }
        }
        v
    };
    let (Some(a), Some(b)) = (locate(inst.local.0), locate(inst.local.1)) else { return false };
    match inst.case {
        1 => value_of(a) != value_of(b),
        2 => {
            let Some(r) = locate(inst.remotes[0]) else { return false };
            value_of(a) == value_of(r)
        }
        3 => value_of(b) != value_of(a),
        4 => value_of(a) != prev_of(b),
        5 => {
            let v1_at_l = at(&inst.vars.0, b);
            let v2_at_i = at(&inst.vars.1, a);
            value_of(a) != Some(v1_at_l) || Some(v2_at_i) != prev_of(b)
        }
        6 => {
            let (Some(j), Some(k)) = (locate(inst.remotes[0]), locate(inst.remotes[1])) else {
                return false;
            };
            let v2_at_i = at(&inst.vars.1, a);
            value_of(j) == value_of(a) || value_of(k) == Some(v2_at_i)
        }
        7 => {
            let v1_at_l = at(&inst.vars.0, b);
            let v2_at_i = at(&inst.vars.1, a);
            value_of(a) != Some(v1_at_l) || Some(v2_at_i) != value_of(b)
        }
        _ => false,
    }
}

struct Shared {
    worklist: VecDeque<WorkItem>,
    seen: HashSet<String>,
    active: usize,
    stop: bool,
    timed_out: bool,
    unknown: Option<String>,
    bugs: Vec<Bug>,
    paths: usize,
    bound_hits: usize,
    log: Vec<String>,
    explored: BTreeSet<String>,
    realized: BTreeSet<String>,
}

/// Verify a fix: explore the schedule+input space of the patched program
/// until a bug witness is found and validated, the worklist empties, or
/// the timeout fires. `parallelism` worker threads share the worklist; at
/// width one the exploration order is exactly the sequential one.
pub fn verify_fix(
    patched: &Program,
    seed: Seed,
    spec: &AtomicRegionSpec,
    cfg: &ExploreConfig,
) -> VerifyOutcome {
    let deadline = Instant::now() + cfg.timeout;
    let seed_item = WorkItem { si: seed.into_si(), prefix: PathPrefix::default() };
    let shared = Mutex::new(Shared {
        worklist: VecDeque::from([seed_item]),
        seen: HashSet::from([PathPrefix::default().canon()]),
        active: 0,
        stop: false,
        timed_out: false,
        unknown: None,
        bugs: Vec::new(),
        paths: 0,
        bound_hits: 0,
        log: Vec::new(),
        explored: BTreeSet::new(),
        realized: BTreeSet::new(),
    });
    let cv = Condvar::new();
    let workers = cfg.parallelism.max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| worker(patched, spec, cfg, deadline, &shared, &cv));
        }
    });

    let st = shared.into_inner().unwrap();
    let verdict = if let Some(bug) = st.bugs.first() {
        match bug.kind {
            BugKind::AtomicityViolation => Verdict::AtomicityViolation(Box::new(bug.clone())),
            BugKind::Deadlock => Verdict::Deadlock(Box::new(bug.clone())),
        }
    } else if st.timed_out {
        Verdict::Timeout { paths_explored: st.paths }
    } else if let Some(reason) = &st.unknown {
        Verdict::Unknown { reason: reason.clone(), paths_explored: st.paths }
    } else {
        Verdict::Verified { paths_explored: st.paths, bound_hits: st.bound_hits }
    };
    VerifyOutcome {
        verdict,
        bugs: st.bugs,
        paths_explored: st.paths,
        bound_hits: st.bound_hits,
        log: st.log,
        explored: st.explored,
        realized: st.realized,
    }
}

fn worker(
    patched: &Program,
    spec: &AtomicRegionSpec,
    cfg: &ExploreConfig,
    deadline: Instant,
    shared: &Mutex<Shared>,
    cv: &Condvar,
) {
    let solver = Solver::new(cfg.backend);
    loop {
        let item = {
            let mut st = shared.lock().unwrap();
            loop {
                if st.stop {
                    cv.notify_all();
                    return;
                }
                if Instant::now() >= deadline {
                    st.stop = true;
                    st.timed_out = true;
                    cv.notify_all();
                    return;
                }
                if let Some(item) = st.worklist.pop_front() {
                    st.active += 1;
                    break item;
                }
                if st.active == 0 {
                    cv.notify_all();
                    return;
                }
                let (guard, _) = cv
                    .wait_timeout(st, Duration::from_millis(20))
                    .expect("worklist lock poisoned");
                st = guard;
            }
        };
        let result = process_item(patched, spec, cfg, deadline, &solver, &item);
        let mut st = shared.lock().unwrap();
        st.active -= 1;
        st.paths += 1;
        st.explored.insert(item.prefix.canon());
        match result {
            ItemResult::Ran { bugs, new_items, bound_hits, log, unknown, realized } => {
                st.bound_hits += bound_hits;
                st.realized.insert(realized);
                st.log.extend(log);
                if let Some(u) = unknown {
                    st.unknown.get_or_insert(u);
                }
                let found_bug = !bugs.is_empty();
                for bug in bugs {
                    let dup = st.bugs.iter().any(|b| {
                        b.kind == bug.kind
                            && b.description == bug.description
                            && b.witness.input_values == bug.witness.input_values
                    });
                    if !dup {
                        st.bugs.push(bug);
                    }
                }
                if found_bug && !cfg.find_all {
                    st.stop = true;
                } else {
                    for it in new_items {
                        if st.seen.insert(it.prefix.canon()) {
                            st.worklist.push_back(it);
                        }
                    }
                }
            }
            ItemResult::Skipped(line) => {
                // A dropped item means the space was not fully explored;
                // without a bug the final verdict can only be unknown.
                st.unknown.get_or_insert(line.clone());
                st.log.push(line);
            }
        }
        cv.notify_all();
    }
}

enum ItemResult {
    Ran {
        bugs: Vec<Bug>,
        new_items: Vec<WorkItem>,
        bound_hits: usize,
        log: Vec<String>,
        unknown: Option<String>,
        realized: String,
    },
    Skipped(String),
}

fn process_item(
    patched: &Program,
    spec: &AtomicRegionSpec,
    cfg: &ExploreConfig,
    deadline: Instant,
    solver: &Solver,
    item: &WorkItem,
) -> ItemResult {
    let budget = Budget::with_deadline(Some(deadline));
    let mut log = Vec::new();
    let mut bugs = Vec::new();
    let mut unknown = None;

    let run = match guided_se(patched, &item.si, &item.prefix, &cfg.exec) {
        Ok(run) => run,
        Err(e) => return ItemResult::Skipped(format!("warn: prefix {} rejected: {e}", item.prefix)),
    };
    let bound_hits: usize = run.trace.bound_hits.values().sum();
    let realized = {
        let mut full = PathPrefix::default();
        for (ti, name) in run.trace.threads.iter().enumerate() {
            full.set(name, run.trace.path_sites(ti));
        }
        full.canon()
    };

    // A run that crashes or blocks is itself a concrete witness.
    match &run.trace.outcome {
        Outcome::AssertFailed { label } | Outcome::NullDeref { label } => {
            bugs.push(Bug {
                kind: BugKind::AtomicityViolation,
                witness: item.si.clone(),
                description: format!("run manifests failure at {label}"),
                replay_outcome: run.trace.outcome.clone(),
            });
            log.push(format!("path {} -> {:?}", item.prefix, run.trace.outcome));
            return ItemResult::Ran { bugs, new_items: Vec::new(), bound_hits, log, unknown, realized };
        }
        Outcome::Blocked { lock_blocked, .. } if !lock_blocked.is_empty() => {
            bugs.push(Bug {
                kind: BugKind::Deadlock,
                witness: item.si.clone(),
                description: format!(
                    "run blocks with {} thread(s) waiting on locks",
                    lock_blocked.len()
                ),
                replay_outcome: run.trace.outcome.clone(),
            });
            log.push(format!("path {} -> blocked", item.prefix));
            return ItemResult::Ran { bugs, new_items: Vec::new(), bound_hits, log, unknown, realized };
        }
        _ => {}
    }

    // Constraint checks over the completed trace: atomicity first, then
    // deadlocks, matching the driver's check order.
    let phi_tau = encode_trace(patched, &run.trace);
    for inst in find_av_instances(patched, &run.trace, spec) {
        let mut table = run.table.clone();
        let enc = encode_av(patched, &run.trace, &inst, &mut table);
        let f = Formula::and(vec![phi_tau.clone(), enc.defs.clone(), Formula::not(enc.phi)]);
        match solver.check_sat(&f, &table, &budget, true) {
            SolverResult::Sat(model) => {
                let witness = model_to_schedule_input(&model, &run.trace);
                match replay(patched, &witness, &cfg.exec) {
                    Ok(rerun) => {
                        let manifest = rerun.trace.outcome.is_failure()
                            || replay_violates(patched, &inst, &run.trace, &rerun.trace);
                        if manifest {
                            bugs.push(Bug {
                                kind: BugKind::AtomicityViolation,
                                witness,
                                description: inst.describe(&run.trace),
                                replay_outcome: rerun.trace.outcome.clone(),
                            });
                            if !cfg.find_all {
                                log.push(format!("path {} -> av {}", item.prefix, inst.describe(&run.trace)));
                                return ItemResult::Ran {
                                    bugs,
                                    new_items: Vec::new(),
                                    bound_hits,
                                    log,
                                    unknown,
                                    realized,
                                };
                            }
                        } else {
                            log.push(format!(
                                "warn: av witness for {} failed validation",
                                inst.describe(&run.trace)
                            ));
                        }
                    }
                    Err(e) => log.push(format!("warn: av witness replay failed: {e}")),
                }
            }
            SolverResult::Unsat => {}
            SolverResult::Unknown(r) => {
                unknown.get_or_insert(format!("av check: {r}"));
            }
        }
    }

    match deadlock::check_dl(patched, &run.trace, solver, &budget) {
        Ok(Some(confirmed)) => {
            match replay(patched, &confirmed.witness, &cfg.exec) {
                Ok(rerun) => {
                    let valid = matches!(
                        &rerun.trace.outcome,
                        Outcome::Blocked { lock_blocked, .. }
                            if lock_blocked.iter().map(|(t, _)| *t).collect::<BTreeSet<_>>()
                                == confirmed.cycle.threads
                    );
                    if valid {
                        bugs.push(Bug {
                            kind: BugKind::Deadlock,
                            witness: confirmed.witness.clone(),
                            description: confirmed.cycle.describe(&run.trace),
                            replay_outcome: rerun.trace.outcome.clone(),
                        });
                        if !cfg.find_all {
                            log.push(format!(
                                "path {} -> dl {}",
                                item.prefix,
                                confirmed.cycle.describe(&run.trace)
                            ));
                            return ItemResult::Ran {
                                bugs,
                                new_items: Vec::new(),
                                bound_hits,
                                log,
                                unknown,
                                realized,
                            };
                        }
                    } else {
                        log.push(format!(
                            "warn: dl witness for {} failed validation (replayed to {:?})",
                            confirmed.cycle.describe(&run.trace),
                            rerun.trace.outcome
                        ));
                    }
                }
                Err(e) => log.push(format!("warn: dl witness replay failed: {e}")),
            }
        }
        Ok(None) => {}
        Err(deadlock::DeadlockError::Unknown(r)) => {
            unknown.get_or_insert(format!("dl check: {r}"));
        }
        Err(e) => log.push(format!("warn: dl check failed: {e}")),
    }

    let new_items = generate_new_si(patched, &run, &item.prefix, solver, &budget, &mut log);
    log.push(format!(
        "path {} -> {:?}, {} new prefixes",
        item.prefix,
        run.trace.outcome,
        new_items.len(),
    ));
    ItemResult::Ran { bugs, new_items, bound_hits, log, unknown, realized }
}

/// Standalone atomicity check over one trace: the first satisfiable
/// instance's witness, if any, with an Unknown reported rather than
/// swallowed.
pub fn check_av(
    program: &Program,
    run: &Run,
    spec: &AtomicRegionSpec,
    solver: &Solver,
    budget: &Budget,
) -> Result<Option<(AvInstance, ScheduleInput)>, String> {
    let phi_tau = encode_trace(program, &run.trace);
    for inst in find_av_instances(program, &run.trace, spec) {
        let mut table = run.table.clone();
        let enc = encode_av(program, &run.trace, &inst, &mut table);
        let f = Formula::and(vec![phi_tau.clone(), enc.defs.clone(), Formula::not(enc.phi)]);
        match solver.check_sat(&f, &table, budget, true) {
            SolverResult::Sat(model) => {
                return Ok(Some((inst, model_to_schedule_input(&model, &run.trace))));
            }
            SolverResult::Unsat => {}
            SolverResult::Unknown(r) => return Err(r.to_string()),
        }
    }
    Ok(None)
}

/// Potential deadlocks of a trace (re-exported for the CLI).
pub fn potential_deadlocks(tr: &Trace) -> Result<Vec<PotentialDeadlock>, String> {
    deadlock::potential_dls(tr).map_err(|e| e.to_string())
}
