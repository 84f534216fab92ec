//! Deadlock prediction: lock-event graph, unsafe cycles, confirmation.
//!
//! The lock-event graph has one node per lock; an edge l1 -> l2 labeled
//! (thread, held set, <acquire, request>) exists when a thread requests l2
//! while holding l1, where the acquire event is its latest acquisition of
//! l1. A cycle is unsafe when its edges come from pairwise-distinct
//! threads with pairwise-disjoint held sets. Each unsafe cycle becomes an
//! order constraint solved together with the trace formula; a model is a
//! concrete schedule+input that steers the program into the deadlock.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Formula, OrdTerm};
use crate::ir::Program;
use crate::solver::{Budget, Solver, SolverResult, UnknownReason};
use crate::trace::{EventKind, ScheduleInput, Trace};

/// Edge of the lock-event graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockEdge {
    pub from: String,
    pub to: String,
    pub thread: usize,
    /// Locks held by the thread when it requested `to` (includes `from`).
    pub held: BTreeSet<String>,
    /// Latest event acquiring `from` before the request.
    pub acquire: usize,
    /// The event requesting `to`.
    pub request: usize,
}

#[derive(Debug, Clone, Default)]
pub struct LockEventGraph {
    pub locks: Vec<String>,
    pub edges: Vec<LockEdge>,
}

#[derive(Debug, thiserror::Error)]
pub enum DeadlockError {
    #[error("trace has an unlock without a matching lock at event {0}")]
    UnmatchedUnlock(usize),
    #[error("solver gave up: {0}")]
    Unknown(UnknownReason),
}

/// A potential deadlock: an unsafe cycle normalized to a list of
/// (acquire, request) event pairs where each request's lock is acquired by
/// the next pair, wrapping around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialDeadlock {
    /// (acquire event, request event) per edge, in cycle order.
    pub pairs: Vec<(usize, usize)>,
    pub threads: BTreeSet<usize>,
    pub locks: Vec<String>,
}

impl PotentialDeadlock {
    pub fn describe(&self, tr: &Trace) -> String {
        let label = |i: usize| {
            tr.events.iter().find(|e| e.index == i).map(|e| e.label.clone()).unwrap_or_default()
        };
        let pairs: Vec<String> = self
            .pairs
            .iter()
            .map(|(a, r)| format!("<{},{}>", label(*a), label(*r)))
            .collect();
        format!("cycle {} pairs {}", self.locks.join("->"), pairs.join(" "))
    }
}

/// Build the lock-event graph by a forward scan, maintaining per-thread
/// held sets and latest-acquisition bookkeeping.
pub fn build_lock_event_graph(tr: &Trace) -> Result<LockEventGraph, DeadlockError> {
    let mut held: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    let mut acquire_of: BTreeMap<(usize, String), usize> = BTreeMap::new();
    let mut graph = LockEventGraph::default();
    let mut locks = BTreeSet::new();
    for e in &tr.events {
        match &e.kind {
            EventKind::Lock { lock } => {
                locks.insert(lock.clone());
                let h = held.entry(e.thread).or_default();
                for l1 in h.iter() {
                    graph.edges.push(LockEdge {
                        from: l1.clone(),
                        to: lock.clone(),
                        thread: e.thread,
                        held: h.clone(),
                        acquire: acquire_of[&(e.thread, l1.clone())],
                        request: e.index,
                    });
                }
                h.insert(lock.clone());
                acquire_of.insert((e.thread, lock.clone()), e.index);
            }
            EventKind::Unlock { lock } => {
                let h = held.entry(e.thread).or_default();
                if !h.remove(lock) {
                    return Err(DeadlockError::UnmatchedUnlock(e.index));
                }
            }
            _ => {}
        }
    }
    graph.locks = locks.into_iter().collect();
    Ok(graph)
}

/// Enumerate unsafe cycles: simple cycles (no repeated lock node) whose
/// edges have pairwise-distinct threads and pairwise-disjoint held sets.
/// Results are normalized and deterministically ordered by length, then
/// lexicographic event indices.
pub fn potential_dls(tr: &Trace) -> Result<Vec<PotentialDeadlock>, DeadlockError> {
    let graph = build_lock_event_graph(tr)?;
    let mut found: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut out = Vec::new();

    // DFS over edge paths with simple lock nodes; cycles are canonicalized
    // by rotating the smallest request index first.
    fn dfs(
        graph: &LockEventGraph,
        start: &str,
        path: &mut Vec<LockEdge>,
        visited: &mut BTreeSet<String>,
        found: &mut BTreeSet<Vec<(usize, usize)>>,
        out: &mut Vec<PotentialDeadlock>,
    ) {
        let cur = path.last().map(|e| e.to.clone()).unwrap_or_else(|| start.to_string());
        for e in graph.edges.iter().filter(|e| e.from == cur) {
            if e.to == start && !path.is_empty() || !path.is_empty() && e.to == start {
                // handled below
            }
            if e.to == start {
                let mut cycle = path.clone();
                cycle.push(e.clone());
                if unsafe_cycle(&cycle) {
                    let mut pairs: Vec<(usize, usize)> =
                        cycle.iter().map(|e| (e.acquire, e.request)).collect();
                    let rot = pairs
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, p)| **p)
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    pairs.rotate_left(rot);
                    if found.insert(pairs.clone()) {
                        let mut rotated = cycle.clone();
                        rotated.rotate_left(rot);
                        out.push(PotentialDeadlock {
                            pairs,
                            threads: cycle.iter().map(|e| e.thread).collect(),
                            locks: rotated.iter().map(|e| e.from.clone()).collect(),
                        });
                    }
                }
                continue;
            }
            if visited.contains(&e.to) {
                continue;
            }
            visited.insert(e.to.clone());
            path.push(e.clone());
            dfs(graph, start, path, visited, found, out);
            path.pop();
            visited.remove(&e.to);
        }
    }

    for start in &graph.locks {
        let mut visited = BTreeSet::new();
        visited.insert(start.clone());
        dfs(&graph, start, &mut Vec::new(), &mut visited, &mut found, &mut out);
    }
    out.sort_by_key(|c| (c.pairs.len(), c.pairs.clone()));
    out.dedup_by_key(|c| c.pairs.clone());
    Ok(out)
}

fn unsafe_cycle(edges: &[LockEdge]) -> bool {
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if edges[i].thread == edges[j].thread {
                return false;
            }
            if edges[i].held.intersection(&edges[j].held).next().is_some() {
                return false;
            }
        }
    }
    true
}

/// The deadlock order constraint of a normalized cycle: each request is
/// ordered after the next edge's acquisition, wrapping around. Conjoined
/// positively with the trace formula (never negated).
pub fn encode_dl(cycle: &PotentialDeadlock) -> Formula {
    let n = cycle.pairs.len();
    let mut parts = Vec::new();
    for i in 0..n {
        let (_, request) = cycle.pairs[i];
        let (next_acquire, _) = cycle.pairs[(i + 1) % n];
        parts.push(Formula::ord_lt(OrdTerm::Ev(next_acquire), OrdTerm::Ev(request)));
    }
    Formula::and(parts)
}

/// Result of confirming one candidate cycle.
#[derive(Debug, Clone)]
pub struct ConfirmedDeadlock {
    pub cycle: PotentialDeadlock,
    pub witness: ScheduleInput,
}

/// Turn list of a deadlock witness: only the events that actually execute
/// before the deadlock. Each cycle thread stops before its blocked
/// request; a join of a thread that will not finish cannot execute either,
/// and cuts propagate through join chains to a fixpoint.
fn build_dl_witness(
    model: &crate::formula::Model,
    sub: &Trace,
    cycle: &PotentialDeadlock,
) -> ScheduleInput {
    let mut crits: Vec<&crate::trace::Event> =
        sub.events.iter().filter(|e| e.kind.is_critical()).collect();
    crits.sort_by_key(|e| (model.ord.get(&e.index).copied().unwrap_or(u64::MAX), e.index));
    let requests: BTreeSet<usize> = cycle.pairs.iter().map(|(_, r)| *r).collect();

    // Per-thread critical sequences in program order.
    let mut per_thread: BTreeMap<usize, Vec<&crate::trace::Event>> = BTreeMap::new();
    for e in sub.events.iter().filter(|e| e.kind.is_critical()) {
        per_thread.entry(e.thread).or_default().push(e);
    }
    let total: BTreeMap<usize, usize> =
        per_thread.iter().map(|(t, v)| (*t, v.len())).collect();
    let mut keep: BTreeMap<usize, usize> = total.clone();
    for (t, evs) in &per_thread {
        if let Some(pos) = evs.iter().position(|e| requests.contains(&e.index)) {
            keep.insert(*t, pos);
        }
    }
    loop {
        let mut changed = false;
        for (t, evs) in &per_thread {
            let limit = keep[t];
            for (k, e) in evs.iter().enumerate().take(limit) {
                if let EventKind::Join { child } = &e.kind {
                    let unfinished = cycle.threads.contains(child)
                        || keep.get(child).copied().unwrap_or(0)
                            < total.get(child).copied().unwrap_or(0);
                    if unfinished {
                        keep.insert(*t, k);
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut turns = Vec::new();
    for e in crits {
        let ord = seen.entry(e.thread).or_insert(0);
        if *ord < keep.get(&e.thread).copied().unwrap_or(0) {
            turns.push(sub.threads[e.thread].clone());
        }
        *ord += 1;
    }
    let mut si = crate::encode::model_to_schedule_input(model, sub);
    si.turns = turns;
    si
}

/// Check all candidate cycles of a trace against the trace formula and
/// return the first confirmed deadlock with its schedule+input witness.
/// An Unknown from the solver propagates; it is never treated as Unsat.
///
/// A confirmed deadlock is an execution *prefix*: each cycle thread runs
/// up to its blocked request and no further. The trace formula is
/// therefore encoded over the cycle-truncated trace, with the request
/// events left pending (they order, but never acquire), so the held
/// sections stay open exactly as they would at the deadlock point.
pub fn check_dl(
    program: &Program,
    tr: &Trace,
    solver: &Solver,
    budget: &Budget,
) -> Result<Option<ConfirmedDeadlock>, DeadlockError> {
    let candidates = potential_dls(tr)?;
    if candidates.is_empty() {
        return Ok(None);
    }
    for cycle in candidates {
        // Truncate each cycle thread right after its request event.
        let mut cut: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, request) in &cycle.pairs {
            let e = tr.events.iter().find(|e| e.index == *request).expect("cycle event");
            cut.insert(e.thread, *request);
        }
        let mut events = Vec::new();
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        for e in &tr.events {
            let keep = match cut.get(&e.thread) {
                Some(c) => e.index <= *c,
                None => true,
            };
            if keep {
                let mut e2 = e.clone();
                e2.index = events.len() + 1;
                remap.insert(e.index, e2.index);
                events.push(e2);
            }
        }
        let sub = Trace {
            threads: tr.threads.clone(),
            inputs: tr.inputs.clone(),
            events,
            outcome: crate::trace::Outcome::Completed,
            divergence: None,
            bound_hits: BTreeMap::new(),
        };
        let pending: BTreeSet<usize> =
            cycle.pairs.iter().map(|(_, r)| remap[r]).collect();
        let mapped = PotentialDeadlock {
            pairs: cycle.pairs.iter().map(|(a, r)| (remap[a], remap[r])).collect(),
            threads: cycle.threads.clone(),
            locks: cycle.locks.clone(),
        };
        let evs: Vec<usize> = sub.events.iter().map(|e| e.index).collect();
        let f = Formula::and(vec![
            Formula::OrdDistinct(evs),
            crate::encode::encode_rw(program, &sub),
            crate::encode::encode_pc(&sub),
            crate::encode::encode_sync_pending(&sub, &pending),
            encode_dl(&mapped),
        ]);
        let table = crate::encode::build_var_table(program, &sub);
        match solver.check_sat(&f, &table, budget, true) {
            SolverResult::Sat(model) => {
                let witness = build_dl_witness(&model, &sub, &mapped);
                return Ok(Some(ConfirmedDeadlock { cycle, witness }));
            }
            SolverResult::Unsat => continue,
            SolverResult::Unknown(r) => return Err(DeadlockError::Unknown(r)),
        }
    }
    Ok(None)
}
