//! Constraint encoders: traces, atomicity properties, deadlock orders.
//!
//! A trace is characterized by the conjunction of read-write matching
//! constraints (every read pairs with the last write before it), path
//! conditions, and synchronization order; the encoders below produce each
//! piece as a formula over order variables and value variables. Atomicity
//! patterns are encoded per matched instance; their negation is what the
//! checker searches for.

use std::collections::BTreeMap;

use crate::formula::{Formula, Model, OrdTerm, SymTerm, VarInfo, VarTable};
use crate::ir::{CmpOp, Program, Val};
use crate::trace::{Event, EventKind, ScheduleInput, Trace, VarId};

/// Rebuild the value-variable table of a trace (needed when the trace was
/// parsed from a file rather than produced by the executor).
pub fn build_var_table(program: &Program, tr: &Trace) -> VarTable {
    let mut table = VarTable::default();
    for i in &tr.inputs {
        table.insert(
            i.vvar,
            VarInfo { name: i.name.clone(), width: i.width, nullable: false, is_input: true },
        );
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut named = |table: &mut VarTable, base: String, id: VarId, width: u8, nullable: bool| {
        let n = counts.entry(base.clone()).or_insert(0);
        *n += 1;
        let name = if *n == 1 { base } else { format!("{base}#{n}") };
        table.insert(id, VarInfo { name, width, nullable, is_input: false });
    };
    for e in &tr.events {
        match &e.kind {
            EventKind::Read { var, vvar, .. } => {
                let (w, nl) = decl_of(program, var);
                named(&mut table, format!("R_{var}^{}", e.label), *vvar, w, nl);
            }
            EventKind::Write { var, vvar, prev_vvar, .. } => {
                let (w, nl) = decl_of(program, var);
                named(&mut table, format!("Rpre_{var}^{}", e.label), *prev_vvar, w, nl);
                named(&mut table, format!("W_{var}^{}", e.label), *vvar, w, nl);
            }
            _ => {}
        }
    }
    table
}

fn decl_of(program: &Program, var: &str) -> (u8, bool) {
    program.shared(var).map(|d| (d.width, d.nullable)).unwrap_or((8, false))
}

/// Labels for order variables, for pretty-printed formulas.
pub fn event_labels(tr: &Trace) -> BTreeMap<usize, String> {
    tr.events.iter().map(|e| (e.index, e.label.clone())).collect()
}

struct WriteRef {
    ord: OrdTerm,
    value: SymTerm,
}

fn writes_on<'t>(tr: &'t Trace, var: &str) -> Vec<(&'t Event, VarId)> {
    tr.events
        .iter()
        .filter_map(|e| match &e.kind {
            EventKind::Write { var: v, vvar, .. } if v == var => Some((e, *vvar)),
            _ => None,
        })
        .collect()
}

/// The last-write matching disjunction for one observer: `obs` must equal
/// some write on `var` ordered before `anchor`, with no other write in
/// between. The implicit initial write participates at the origin.
/// `skip` excludes an event (the anchor itself, for pre-values).
fn match_last_write(
    program: &Program,
    tr: &Trace,
    var: &str,
    obs: VarId,
    anchor: OrdTerm,
    skip: Option<usize>,
) -> Formula {
    let init = program.shared(var).map(|d| d.init).unwrap_or(Val::Int(0));
    let mut candidates: Vec<WriteRef> =
        vec![WriteRef { ord: OrdTerm::Origin, value: SymTerm::Const(init) }];
    for (e, vvar) in writes_on(tr, var) {
        if Some(e.index) == skip {
            continue;
        }
        candidates.push(WriteRef { ord: OrdTerm::Ev(e.index), value: SymTerm::Var(vvar) });
    }
    let mut arms = Vec::new();
    for (i, wi) in candidates.iter().enumerate() {
        let mut conj = vec![
            Formula::Cmp(CmpOp::Eq, SymTerm::Var(obs), wi.value.clone()),
            Formula::ord_lt(wi.ord, anchor),
        ];
        for (j, wj) in candidates.iter().enumerate() {
            if i == j || wj.ord == OrdTerm::Origin {
                continue;
            }
            conj.push(Formula::or(vec![
                Formula::ord_lt(wj.ord, wi.ord),
                Formula::ord_lt(anchor, wj.ord),
            ]));
        }
        arms.push(Formula::and(conj));
    }
    Formula::or(arms)
}

/// Data-validity constraints: for every read (and every write's pre-value
/// observer), the last-write matching disjunction; plus the definition of
/// each written value in terms of the values read before it.
pub fn encode_rw(program: &Program, tr: &Trace) -> Formula {
    let mut parts = Vec::new();
    for e in &tr.events {
        match &e.kind {
            EventKind::Read { var, vvar, .. } => {
                parts.push(match_last_write(program, tr, var, *vvar, OrdTerm::Ev(e.index), None));
            }
            EventKind::Write { var, vvar, prev_vvar, sym, .. } => {
                parts.push(Formula::Cmp(CmpOp::Eq, SymTerm::Var(*vvar), sym.clone()));
                parts.push(match_last_write(
                    program,
                    tr,
                    var,
                    *prev_vvar,
                    OrdTerm::Ev(e.index),
                    Some(e.index),
                ));
            }
            _ => {}
        }
    }
    Formula::and(parts)
}

/// Synchronization constraints: per-thread program order, spawn/join
/// edges, and pairwise mutual exclusion of lock critical sections
/// (including the sections the fix introduced).
pub fn encode_sync(tr: &Trace) -> Formula {
    encode_sync_pending(tr, &std::collections::BTreeSet::new())
}

/// Like [`encode_sync`], but lock events in `pending` are treated as
/// requests that never acquire: they order like any event but open no
/// critical section. Used by the deadlock check, whose scenario is an
/// execution prefix ending at the blocked requests.
pub fn encode_sync_pending(
    tr: &Trace,
    pending: &std::collections::BTreeSet<usize>,
) -> Formula {
    let mut parts = Vec::new();
    // Program order.
    for t in 0..tr.threads.len() {
        let evs: Vec<&Event> = tr.events.iter().filter(|e| e.thread == t).collect();
        for pair in evs.windows(2) {
            parts.push(Formula::ord_lt(OrdTerm::Ev(pair[0].index), OrdTerm::Ev(pair[1].index)));
        }
    }
    // Spawn/join edges.
    for e in &tr.events {
        match &e.kind {
            EventKind::Spawn { child } => {
                if let Some(first) = tr.events.iter().find(|x| x.thread == *child) {
                    parts.push(Formula::ord_lt(OrdTerm::Ev(e.index), OrdTerm::Ev(first.index)));
                }
            }
            EventKind::Join { child } => {
                if let Some(last) = tr.events.iter().rev().find(|x| x.thread == *child) {
                    parts.push(Formula::ord_lt(OrdTerm::Ev(last.index), OrdTerm::Ev(e.index)));
                }
            }
            _ => {}
        }
    }
    // Lock mutual exclusion.
    let mut sections: BTreeMap<String, Vec<(usize, usize, Option<usize>)>> = BTreeMap::new();
    let mut open: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for e in &tr.events {
        match &e.kind {
            EventKind::Lock { lock } => {
                if pending.contains(&e.index) {
                    continue;
                }
                open.insert((lock.clone(), e.thread), e.index);
            }
            EventKind::Unlock { lock } => {
                if let Some(start) = open.remove(&(lock.clone(), e.thread)) {
                    sections.entry(lock.clone()).or_default().push((
                        e.thread,
                        start,
                        Some(e.index),
                    ));
                }
            }
            _ => {}
        }
    }
    for ((lock, thread), start) in open {
        sections.entry(lock).or_default().push((thread, start, None));
    }
    for secs in sections.values_mut() {
        secs.sort();
        for i in 0..secs.len() {
            for j in i + 1..secs.len() {
                let (t1, l1, u1) = secs[i];
                let (t2, l2, u2) = secs[j];
                if t1 == t2 {
                    continue; // same thread: program order already serializes
                }
                let one_before_two = match u1 {
                    Some(u1) => Formula::ord_lt(OrdTerm::Ev(u1), OrdTerm::Ev(l2)),
                    None => Formula::False,
                };
                let two_before_one = match u2 {
                    Some(u2) => Formula::ord_lt(OrdTerm::Ev(u2), OrdTerm::Ev(l1)),
                    None => Formula::False,
                };
                parts.push(Formula::or(vec![one_before_two, two_before_one]));
            }
        }
    }
    Formula::and(parts)
}

/// Path conditions: branch outcomes, assert outcomes, and implicit deref
/// conditions, with the polarity the trace observed. Input value variables
/// appear free.
pub fn encode_pc(tr: &Trace) -> Formula {
    let mut parts = Vec::new();
    for e in &tr.events {
        match &e.kind {
            EventKind::Branch { taken, cond } => {
                let f = Formula::from_bool_term(cond);
                parts.push(if *taken { f } else { Formula::not(f) });
            }
            // Assert outcomes are observations, not control flow: pinning
            // them would contradict exactly the violating reorderings the
            // checks search for.
            EventKind::Assert { .. } => {}
            EventKind::Read { vvar, val, deref: true, .. } => {
                let op = if val.is_null() { CmpOp::Eq } else { CmpOp::Ne };
                parts.push(Formula::Cmp(op, SymTerm::Var(*vvar), SymTerm::Const(Val::Null)));
            }
            _ => {}
        }
    }
    Formula::and(parts)
}

/// The full trace formula: distinct orders, data validity, path
/// conditions, synchronization.
pub fn encode_trace(program: &Program, tr: &Trace) -> Formula {
    let evs: Vec<usize> = tr.events.iter().map(|e| e.index).collect();
    Formula::and(vec![
        Formula::OrdDistinct(evs),
        encode_rw(program, tr),
        encode_pc(tr),
        encode_sync(tr),
    ])
}

/// One matched atomicity-violation pattern instance: the local event pair
/// from the atomic unit plus the remote events that can interleave it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvInstance {
    pub case: u8,
    /// Event indices of the local pair (p/c or i/l in pattern terms).
    pub local: (usize, usize),
    /// Remote events referenced by the pattern formula (cases 2 and 6) or
    /// witnessing interruptibility (other cases).
    pub remotes: Vec<usize>,
    pub vars: (String, String),
}

impl AvInstance {
    pub fn describe(&self, tr: &Trace) -> String {
        let label = |i: usize| {
            tr.events.iter().find(|e| e.index == i).map(|e| e.label.clone()).unwrap_or_default()
        };
        let remotes: Vec<String> = self.remotes.iter().map(|r| label(*r)).collect();
        let vars = if self.vars.0 == self.vars.1 {
            self.vars.0.clone()
        } else {
            format!("{},{}", self.vars.0, self.vars.1)
        };
        format!(
            "case{} locals=({},{}) remotes=({}) vars={}",
            self.case,
            label(self.local.0),
            label(self.local.1),
            remotes.join(","),
            vars
        )
    }
}

fn is_unit_event(e: &Event, unit: &[String]) -> bool {
    unit.contains(&e.label)
}

/// Find all tuples matching one of the seven interleaving patterns over
/// the atomic unit and its locations, in deterministic trace order.
pub fn find_av_instances(
    program: &Program,
    tr: &Trace,
    spec: &crate::ir::AtomicRegionSpec,
) -> Vec<AvInstance> {
    let unit_thread = spec
        .unit
        .first()
        .and_then(|l| program.thread_of_label(l))
        .and_then(|name| tr.thread_idx(name));
    let Some(unit_thread) = unit_thread else { return Vec::new() };

    let locals: Vec<&Event> = tr
        .events
        .iter()
        .filter(|e| {
            e.thread == unit_thread
                && is_unit_event(e, &spec.unit)
                && e.kind.var().map(|v| spec.locations.contains(v)).unwrap_or(false)
        })
        .collect();
    let remote = |var: &str, want_write: bool| -> Vec<usize> {
        tr.events
            .iter()
            .filter(|e| e.thread != unit_thread)
            .filter(|e| match &e.kind {
                EventKind::Write { var: v, .. } => want_write && v == var,
                EventKind::Read { var: v, .. } => !want_write && v == var,
                _ => false,
            })
            .map(|e| e.index)
            .collect()
    };
    // A local write on the same location between the two pattern events
    // breaks the pattern (the pair is no longer adjacent in the unit).
    let intervening_write = |a: &Event, b: &Event, vars: &[&str]| {
        tr.events.iter().any(|e| {
            e.thread == unit_thread
                && e.index > a.index
                && e.index < b.index
                && matches!(&e.kind, EventKind::Write { var, .. } if vars.contains(&var.as_str()))
        })
    };

    let mut out = Vec::new();
    for (ai, a) in locals.iter().enumerate() {
        for b in locals.iter().skip(ai + 1) {
            let (av, bv) = (a.kind.var().unwrap().to_string(), b.kind.var().unwrap().to_string());
            let a_write = matches!(a.kind, EventKind::Write { .. });
            let b_write = matches!(b.kind, EventKind::Write { .. });
            if av == bv {
                if intervening_write(a, b, &[av.as_str()]) {
                    continue;
                }
                let case = match (a_write, b_write) {
                    (false, false) => 1,
                    (true, true) => 2,
                    (true, false) => 3,
                    (false, true) => 4,
                };
                if case == 2 {
                    for r in remote(&av, false) {
                        out.push(AvInstance {
                            case,
                            local: (a.index, b.index),
                            remotes: vec![r],
                            vars: (av.clone(), bv.clone()),
                        });
                    }
                } else {
                    let writes = remote(&av, true);
                    if !writes.is_empty() {
                        out.push(AvInstance {
                            case,
                            local: (a.index, b.index),
                            remotes: writes,
                            vars: (av.clone(), bv.clone()),
                        });
                    }
                }
            } else {
                if intervening_write(a, b, &[av.as_str(), bv.as_str()]) {
                    continue;
                }
                match (a_write, b_write) {
                    (true, true) => {
                        // Case 5: remote writes on both variables; case 6:
                        // remote reads on both variables.
                        let (w1, w2) = (remote(&av, true), remote(&bv, true));
                        if same_thread_pair_exists(tr, &w1, &w2) {
                            let mut remotes = w1.clone();
                            remotes.extend(&w2);
                            remotes.sort();
                            out.push(AvInstance {
                                case: 5,
                                local: (a.index, b.index),
                                remotes,
                                vars: (av.clone(), bv.clone()),
                            });
                        }
                        let (r1, r2) = (remote(&av, false), remote(&bv, false));
                        for j in &r1 {
                            for k in &r2 {
                                if event_thread(tr, *j) == event_thread(tr, *k) {
                                    out.push(AvInstance {
                                        case: 6,
                                        local: (a.index, b.index),
                                        remotes: vec![*j, *k],
                                        vars: (av.clone(), bv.clone()),
                                    });
                                }
                            }
                        }
                    }
                    (false, false) => {
                        let (w1, w2) = (remote(&av, true), remote(&bv, true));
                        if same_thread_pair_exists(tr, &w1, &w2) {
                            let mut remotes = w1.clone();
                            remotes.extend(&w2);
                            remotes.sort();
                            out.push(AvInstance {
                                case: 7,
                                local: (a.index, b.index),
                                remotes,
                                vars: (av.clone(), bv.clone()),
                            });
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    if let Some(p) = spec.pattern {
        out.retain(|i| i.case == p);
    }
    out.sort_by_key(|i| (i.local.0, i.local.1, i.case, i.remotes.clone()));
    out.dedup();
    out
}

fn event_thread(tr: &Trace, idx: usize) -> usize {
    tr.events.iter().find(|e| e.index == idx).map(|e| e.thread).unwrap_or(usize::MAX)
}

fn same_thread_pair_exists(tr: &Trace, xs: &[usize], ys: &[usize]) -> bool {
    xs.iter().any(|x| ys.iter().any(|y| event_thread(tr, *x) == event_thread(tr, *y)))
}

/// The pattern formula plus auxiliary observer definitions it needs.
#[derive(Debug, Clone)]
pub struct AvEncoding {
    /// The intended-atomicity property; its negation is searched for.
    pub phi: Formula,
    /// Matching constraints for phantom observers (value of a variable at
    /// another event's position); always asserted positively.
    pub defs: Formula,
}

fn event_of(tr: &Trace, idx: usize) -> &Event {
    tr.events.iter().find(|e| e.index == idx).expect("instance references trace event")
}

fn read_vvar(e: &Event) -> VarId {
    match &e.kind {
        EventKind::Read { vvar, .. } => *vvar,
        _ => panic!("expected read event"),
    }
}

fn write_vvar(e: &Event) -> VarId {
    match &e.kind {
        EventKind::Write { vvar, .. } => *vvar,
        _ => panic!("expected write event"),
    }
}

fn write_prev_vvar(e: &Event) -> VarId {
    match &e.kind {
        EventKind::Write { prev_vvar, .. } => *prev_vvar,
        _ => panic!("expected write event"),
    }
}

/// Encode the intended-atomicity property for one instance. Phantom
/// observers (the value a variable holds at another event's position) are
/// allocated in `table` and constrained in `defs`.
pub fn encode_av(
    program: &Program,
    tr: &Trace,
    inst: &AvInstance,
    table: &mut VarTable,
) -> AvEncoding {
    let a = event_of(tr, inst.local.0);
    let b = event_of(tr, inst.local.1);
    let mut defs = Vec::new();
    let observer = |var: &str, at: &Event, table: &mut VarTable, defs: &mut Vec<Formula>| {
        let (w, nl) = decl_of(program, var);
        let id = table.fresh(VarInfo {
            name: format!("Rat_{var}^{}", at.label),
            width: w,
            nullable: nl,
            is_input: false,
        });
        defs.push(match_last_write(program, tr, var, id, OrdTerm::Ev(at.index), None));
        id
    };
    let eq = |x: VarId, y: VarId| Formula::Cmp(CmpOp::Eq, SymTerm::Var(x), SymTerm::Var(y));
    let ne = |x: VarId, y: VarId| Formula::Cmp(CmpOp::Ne, SymTerm::Var(x), SymTerm::Var(y));

    let phi = match inst.case {
        // Two local reads must return the same value.
        1 => eq(read_vvar(a), read_vvar(b)),
        // The remote read must not see the first local write.
        2 => ne(write_vvar(a), read_vvar(event_of(tr, inst.remotes[0]))),
        // The local read always sees the local write.
        3 => eq(read_vvar(b), write_vvar(a)),
        // The value just before the local write equals the earlier read.
        4 => eq(read_vvar(a), write_prev_vvar(b)),
        // No remote write lands between the two local writes (on either
        // variable): the first variable's state at the second write and
        // the second variable's pre-states stay local.
        5 => {
            let v1_at_l = observer(&inst.vars.0, b, table, &mut defs);
            let v2_at_i = observer(&inst.vars.1, a, table, &mut defs);
            Formula::and(vec![eq(write_vvar(a), v1_at_l), eq(v2_at_i, write_prev_vvar(b))])
        }
        // No temporary result is seen by the remote reads.
        6 => {
            let j = event_of(tr, inst.remotes[0]);
            let k = event_of(tr, inst.remotes[1]);
            let v2_at_i = observer(&inst.vars.1, a, table, &mut defs);
            Formula::and(vec![ne(read_vvar(j), write_vvar(a)), ne(read_vvar(k), v2_at_i)])
        }
        // The two local reads observe the same memory state.
        7 => {
            let v1_at_l = observer(&inst.vars.0, b, table, &mut defs);
            let v2_at_i = observer(&inst.vars.1, a, table, &mut defs);
            Formula::and(vec![eq(read_vvar(a), v1_at_l), eq(v2_at_i, read_vvar(b))])
        }
        other => panic!("unknown pattern case {other}"),
    };
    AvEncoding { phi, defs: Formula::and(defs) }
}

/// Decode a model into a concrete schedule+input combination: inputs read
/// off their value variables, schedule from ascending order values.
pub fn model_to_schedule_input(model: &Model, tr: &Trace) -> ScheduleInput {
    let mut input_values = BTreeMap::new();
    for i in &tr.inputs {
        let val = match model.vals.get(&i.vvar) {
            Some(Val::Int(n)) => *n,
            _ => 0,
        };
        input_values.insert(i.name.clone(), val);
    }
    let mut criticals: Vec<&Event> = tr.events.iter().filter(|e| e.kind.is_critical()).collect();
    criticals.sort_by_key(|e| (model.ord.get(&e.index).copied().unwrap_or(u64::MAX), e.index));
    let turns = criticals.iter().map(|e| tr.threads[e.thread].clone()).collect();
    ScheduleInput { input_values, turns }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{replay, ExecConfig};
    use crate::ir::parse_program;
    use crate::solver::{Budget, Solver, SolverResult};
    use crate::trace::PathPrefix;

    fn si(pairs: &[(&str, u64)], turns: &[&str]) -> ScheduleInput {
        ScheduleInput {
            input_values: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            turns: turns.iter().map(|s| s.to_string()).collect(),
        }
    }

    const READER_WRITER: &str = "\
shared x : int8 = 5
thread main {
  m1: spawn W
  m2: spawn R
  m3: join W
  m4: join R
}
thread W {
  1: x = 7
}
thread R {
  2: r = x
}
";

    #[test]
    fn single_write_read_matching_admits_both_orders() {
        let p = parse_program(READER_WRITER).unwrap();
        let run =
            replay(&p, &si(&[], &["main", "main", "W", "R", "main", "main"]), &ExecConfig::default())
                .unwrap();
        let f = encode_trace(&p, &run.trace);
        let solver = Solver::builtin();

        let rv = run
            .trace
            .events
            .iter()
            .find_map(|e| match &e.kind {
                EventKind::Read { vvar, .. } => Some(*vvar),
                _ => None,
            })
            .unwrap();
        // r = 7 (writer first) is satisfiable.
        let with7 = Formula::and(vec![
            f.clone(),
            Formula::Cmp(CmpOp::Eq, SymTerm::Var(rv), SymTerm::Const(Val::Int(7))),
        ]);
        assert!(solver.check_sat(&with7, &run.table, &Budget::default(), false).is_sat());
        // r = 5 (initial value, read first) is satisfiable.
        let with5 = Formula::and(vec![
            f.clone(),
            Formula::Cmp(CmpOp::Eq, SymTerm::Var(rv), SymTerm::Const(Val::Int(5))),
        ]);
        assert!(solver.check_sat(&with5, &run.table, &Budget::default(), false).is_sat());
        // r = 9 is not.
        let with9 = Formula::and(vec![
            f,
            Formula::Cmp(CmpOp::Eq, SymTerm::Var(rv), SymTerm::Const(Val::Int(9))),
        ]);
        assert_eq!(
            solver.check_sat(&with9, &run.table, &Budget::default(), false),
            SolverResult::Unsat
        );
    }

    #[test]
    fn program_order_is_a_single_chain_per_thread() {
        let p = parse_program(READER_WRITER).unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        let f = encode_sync(&run.trace);
        let solver = Solver::builtin();
        let m = run.trace.project("main");
        let broken = Formula::and(vec![
            f,
            Formula::ord_lt(OrdTerm::Ev(m[1].index), OrdTerm::Ev(m[0].index)),
        ]);
        assert_eq!(
            solver.check_sat(&broken, &run.table, &Budget::default(), false),
            SolverResult::Unsat
        );
    }

    #[test]
    fn straight_line_pc_is_true() {
        let p = parse_program(READER_WRITER).unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        assert_eq!(encode_pc(&run.trace), Formula::True);
    }

    #[test]
    fn lock_sections_exclude_each_other() {
        let p = parse_program(
            "lock l\nshared x : int8 = 0\nthread main {\n m1: spawn A\n m2: spawn B\n m3: join A\n m4: join B\n}\nthread A {\n 1: lock(l)\n 2: x = 1\n 3: unlock(l)\n}\nthread B {\n 4: lock(l)\n 5: x = 2\n 6: unlock(l)\n}\n",
        )
        .unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        let f = encode_trace(&p, &run.trace);
        let by_label = |l: &str| run.trace.events.iter().find(|e| e.label == l).unwrap().index;
        // B's lock strictly inside A's section: contradiction.
        let inside = Formula::and(vec![
            f,
            Formula::ord_lt(OrdTerm::Ev(by_label("1")), OrdTerm::Ev(by_label("4"))),
            Formula::ord_lt(OrdTerm::Ev(by_label("4")), OrdTerm::Ev(by_label("3"))),
        ]);
        let solver = Solver::builtin();
        assert_eq!(
            solver.check_sat(&inside, &run.table, &Budget::default(), false),
            SolverResult::Unsat
        );
    }

    #[test]
    fn case1_instance_found_and_negation_satisfiable() {
        let p = parse_program(
            "shared a : int8 = 0\nthread main {\n m1: spawn T1\n m2: spawn T2\n m3: join T1\n m4: join T2\n}\nthread T1 {\n 1: r1 = a\n 2: r2 = a\n}\nthread T2 {\n 3: a = 9\n}\n",
        )
        .unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        let spec = crate::ir::AtomicRegionSpec {
            unit: vec!["1".into(), "2".into()],
            locations: ["a".to_string()].into_iter().collect(),
            pattern: None,
        };
        let insts = find_av_instances(&p, &run.trace, &spec);
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].case, 1);
        let mut table = run.table.clone();
        let enc = encode_av(&p, &run.trace, &insts[0], &mut table);
        let f = Formula::and(vec![
            encode_trace(&p, &run.trace),
            enc.defs.clone(),
            Formula::not(enc.phi.clone()),
        ]);
        let solver = Solver::builtin();
        assert!(solver.check_sat(&f, &table, &Budget::default(), false).is_sat());
    }

    #[test]
    fn no_remote_access_means_no_instances() {
        let p = parse_program(
            "shared a : int8 = 0\nshared b : int8 = 0\nthread main {\n m1: spawn T1\n m2: spawn T2\n m3: join T1\n m4: join T2\n}\nthread T1 {\n 1: r1 = a\n 2: r2 = a\n}\nthread T2 {\n 3: b = 9\n}\n",
        )
        .unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        let spec = crate::ir::AtomicRegionSpec {
            unit: vec!["1".into(), "2".into()],
            locations: ["a".to_string()].into_iter().collect(),
            pattern: None,
        };
        assert!(find_av_instances(&p, &run.trace, &spec).is_empty());
    }

    #[test]
    fn model_decodes_to_replayable_schedule() {
        let p = parse_program(READER_WRITER).unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        let f = encode_trace(&p, &run.trace);
        let solver = Solver::builtin();
        let model = match solver.check_sat(&f, &run.table, &Budget::default(), false) {
            SolverResult::Sat(m) => m,
            other => panic!("{other:?}"),
        };
        let si2 = model_to_schedule_input(&model, &run.trace);
        let run2 =
            crate::exec::guided_se(&p, &si2, &PathPrefix::default(), &ExecConfig::default())
                .unwrap();
        assert_eq!(run2.trace.outcome, crate::trace::Outcome::Completed);
        assert!(run2.trace.divergence.is_none(), "decoded schedule must replay cleanly");
    }

    #[test]
    fn rw_clause_size_within_cubic_bound() {
        let p = parse_program(
            "shared a : int8 = 0\nthread main {\n m1: spawn T1\n m2: spawn T2\n m3: join T1\n m4: join T2\n}\nthread T1 {\n 1: r1 = a\n 2: r2 = a\n 3: r3 = a\n}\nthread T2 {\n 4: a = 1\n 5: a = 2\n 6: a = 3\n}\n",
        )
        .unwrap();
        let run = replay(&p, &si(&[], &[]), &ExecConfig::default()).unwrap();
        let f = encode_rw(&p, &run.trace);
        fn count_atoms(f: &Formula) -> usize {
            match f {
                Formula::And(fs) | Formula::Or(fs) => fs.iter().map(count_atoms).sum(),
                Formula::Not(g) => count_atoms(g),
                Formula::True | Formula::False => 0,
                _ => 1,
            }
        }
        let reads = 3 + 3; // explicit reads plus write pre-values
        let writes = 3 + 1; // writes plus the implicit initial write
        assert!(count_atoms(&f) <= reads * writes * writes * 3);
    }
}
