//! Trace model: events, traces, schedule+input combinations, path prefixes.
//!
//! A trace is the record of one concolic run: every critical event (shared
//! read/write/deref, lock/unlock, spawn/join) plus branch and assert events,
//! each carrying concrete values and symbolic value-variable ids. Symbolic
//! terms live in [`crate::formula`]; this module only stores ids.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::SymTerm;
use crate::ir::Val;

/// Index of a thread in the trace's thread table.
pub type ThreadIdx = usize;

/// Id of a symbolic value variable (allocated by the executor).
pub type VarId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Read { var: String, vvar: VarId, val: Val, deref: bool },
    Write {
        var: String,
        vvar: VarId,
        val: Val,
        prev_vvar: VarId,
        prev_val: Val,
        /// Symbolic form of the written value.
        sym: SymTerm,
    },
    Lock { lock: String },
    Unlock { lock: String },
    Spawn { child: ThreadIdx },
    Join { child: ThreadIdx },
    Branch { taken: bool, cond: SymTerm },
    Assert { ok: bool, cond: SymTerm },
}

impl EventKind {
    /// Critical events are the ones a schedule orders.
    pub fn is_critical(&self) -> bool {
        !matches!(self, EventKind::Branch { .. } | EventKind::Assert { .. })
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            EventKind::Read { var, .. } | EventKind::Write { var, .. } => Some(var),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// 1-based position in the trace; doubles as the order-variable id.
    pub index: usize,
    pub thread: ThreadIdx,
    pub label: String,
    pub kind: EventKind,
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    AssertFailed { label: String },
    NullDeref { label: String },
    /// All live threads are stuck. `lock_blocked` pairs each thread with the
    /// lock it waits for; `join_blocked` with the thread it waits for.
    Blocked { lock_blocked: Vec<(ThreadIdx, String)>, join_blocked: Vec<(ThreadIdx, ThreadIdx)> },
}

impl Outcome {
    pub fn is_blocked(&self) -> bool {
        matches!(self, Outcome::Blocked { .. })
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::AssertFailed { .. } | Outcome::NullDeref { .. })
    }
}

/// Declared symbolic input: name, value-variable id, width, concrete value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceInput {
    pub name: String,
    pub vvar: VarId,
    pub width: u8,
    pub val: u64,
}

/// One site in a thread's path: a branch label or a deref label plus the
/// polarity observed (branch taken / deref non-null).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSite {
    pub label: String,
    pub polarity: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Thread names; event `thread` fields index into this table.
    pub threads: Vec<String>,
    pub inputs: Vec<TraceInput>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    /// Index (into `events`) after which the scheduler fell back to seeded
    /// random choice because the requested schedule became infeasible.
    pub divergence: Option<usize>,
    /// Loop labels whose unfold bound was hit, with a count.
    pub bound_hits: BTreeMap<String, usize>,
}

impl Trace {
    pub fn thread_idx(&self, name: &str) -> Option<ThreadIdx> {
        self.threads.iter().position(|t| t == name)
    }

    /// Subsequence of events belonging to one thread, order preserved.
    pub fn project(&self, thread: &str) -> Vec<&Event> {
        match self.thread_idx(thread) {
            Some(ti) => self.events.iter().filter(|e| e.thread == ti).collect(),
            None => Vec::new(),
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.events.iter().map(|e| e.label.as_str()).collect()
    }

    /// Per-thread path-condition sites in program order: branch outcomes and
    /// implicit deref conditions. Derived from events.
    pub fn path_sites(&self, thread: ThreadIdx) -> Vec<PathSite> {
        let mut out = Vec::new();
        for e in self.events.iter().filter(|e| e.thread == thread) {
            match &e.kind {
                EventKind::Branch { taken, .. } => {
                    out.push(PathSite { label: e.label.clone(), polarity: *taken })
                }
                EventKind::Read { deref: true, val, .. } => {
                    out.push(PathSite { label: e.label.clone(), polarity: !val.is_null() })
                }
                _ => {}
            }
        }
        out
    }

    /// Events that carry a path condition, across all threads.
    pub fn condition_events(&self) -> Vec<&Event> {
        self.events
            .iter()
            .filter(|e| {
                matches!(
                    e.kind,
                    EventKind::Branch { .. } | EventKind::Read { deref: true, .. }
                )
            })
            .collect()
    }

    pub fn input_val(&self, name: &str) -> Option<u64> {
        self.inputs.iter().find(|i| i.name == name).map(|i| i.val)
    }

    /// The schedule+input combination that replays this trace.
    pub fn to_schedule_input(&self) -> ScheduleInput {
        let turns = self
            .events
            .iter()
            .filter(|e| e.kind.is_critical())
            .map(|e| self.threads[e.thread].clone())
            .collect();
        let input_values =
            self.inputs.iter().map(|i| (i.name.clone(), i.val)).collect();
        ScheduleInput { input_values, turns }
    }
}

/// A concrete schedule+input combination: one value per input plus a turn
/// list, one thread name per critical event.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScheduleInput {
    pub input_values: BTreeMap<String, u64>,
    pub turns: Vec<String>,
}

/// A per-thread list of path sites that a guided run must realize. The
/// empty prefix is `True`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct PathPrefix {
    /// Sorted by thread name for canonical form.
    pub per_thread: Vec<(String, Vec<PathSite>)>,
}

impl PathPrefix {
    pub fn is_true(&self) -> bool {
        self.per_thread.iter().all(|(_, sites)| sites.is_empty())
    }

    pub fn sites_for(&self, thread: &str) -> &[PathSite] {
        self.per_thread
            .iter()
            .find(|(t, _)| t == thread)
            .map(|(_, s)| s.as_slice())
            .unwrap_or(&[])
    }

    pub fn set(&mut self, thread: &str, sites: Vec<PathSite>) {
        if let Some(slot) = self.per_thread.iter_mut().find(|(t, _)| t == thread) {
            slot.1 = sites;
        } else {
            self.per_thread.push((thread.to_string(), sites));
            self.per_thread.sort_by(|a, b| a.0.cmp(&b.0));
        }
    }

    /// Canonical text form, used for worklist deduplication.
    pub fn canon(&self) -> String {
        let mut s = String::new();
        for (t, sites) in &self.per_thread {
            if sites.is_empty() {
                continue;
            }
            s.push_str(t);
            s.push(':');
            for site in sites {
                s.push_str(&site.label);
                s.push(if site.polarity { '+' } else { '-' });
            }
            s.push(' ');
        }
        if s.is_empty() {
            s.push_str("true");
        }
        s
    }
}

impl fmt::Display for PathPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canon().trim_end())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct TraceParseError {
    pub line: usize,
    pub msg: String,
}

/// Serialize a trace; one event per line. See the README for the format.
pub fn serialize_trace(tr: &Trace) -> String {
    let mut out = String::from("trace v1\n");
    out.push_str(&format!("threads {}\n", tr.threads.join(" ")));
    for i in &tr.inputs {
        out.push_str(&format!("inputsym {} vv={} width={} val={}\n", i.name, i.vvar, i.width, i.val));
    }
    for e in &tr.events {
        let th = &tr.threads[e.thread];
        let head = format!("{} {} ", e.index, th);
        match &e.kind {
            EventKind::Read { var, vvar, val, deref } => {
                let kind = if *deref { "deref" } else { "read" };
                out.push_str(&format!("{head}{kind} {} v={var} val={val} vv={vvar}\n", e.label));
            }
            EventKind::Write { var, vvar, val, prev_vvar, prev_val, sym } => {
                out.push_str(&format!(
                    "{head}write {} v={var} val={val} vv={vvar} pval={prev_val} pvv={prev_vvar} expr={}\n",
                    e.label,
                    sym.to_sexp()
                ));
            }
            EventKind::Lock { lock } => {
                out.push_str(&format!("{head}lock {} l={lock}\n", e.label))
            }
            EventKind::Unlock { lock } => {
                out.push_str(&format!("{head}unlock {} l={lock}\n", e.label))
            }
            EventKind::Spawn { child } => {
                out.push_str(&format!("{head}spawn {} t={}\n", e.label, tr.threads[*child]))
            }
            EventKind::Join { child } => {
                out.push_str(&format!("{head}join {} t={}\n", e.label, tr.threads[*child]))
            }
            EventKind::Branch { taken, cond } => {
                out.push_str(&format!(
                    "{head}branch {} taken={} cond={}\n",
                    e.label,
                    *taken as u8,
                    cond.to_sexp()
                ));
            }
            EventKind::Assert { ok, cond } => {
                out.push_str(&format!(
                    "{head}assert {} ok={} cond={}\n",
                    e.label,
                    *ok as u8,
                    cond.to_sexp()
                ));
            }
        }
    }
    for (label, count) in &tr.bound_hits {
        out.push_str(&format!("boundhit {label} {count}\n"));
    }
    if let Some(d) = tr.divergence {
        out.push_str(&format!("divergence {d}\n"));
    }
    match &tr.outcome {
        Outcome::Completed => out.push_str("outcome completed\n"),
        Outcome::AssertFailed { label } => out.push_str(&format!("outcome assertfailed {label}\n")),
        Outcome::NullDeref { label } => out.push_str(&format!("outcome nullderef {label}\n")),
        Outcome::Blocked { lock_blocked, join_blocked } => {
            out.push_str("outcome blocked");
            for (t, l) in lock_blocked {
                out.push_str(&format!(" lock:{}:{}", tr.threads[*t], l));
            }
            for (t, c) in join_blocked {
                out.push_str(&format!(" join:{}:{}", tr.threads[*t], tr.threads[*c]));
            }
            out.push('\n');
        }
    }
    out
}

fn field<'a>(parts: &'a [&str], key: &str) -> Option<&'a str> {
    parts.iter().find_map(|p| p.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

fn parse_val_str(s: &str, line: usize) -> Result<Val, TraceParseError> {
    if s == "null" {
        Ok(Val::Null)
    } else {
        s.parse::<u64>()
            .map(Val::Int)
            .map_err(|_| TraceParseError { line, msg: format!("bad value `{s}`") })
    }
}

/// Parse a serialized trace. Inverse of [`serialize_trace`].
pub fn parse_trace(src: &str) -> Result<Trace, TraceParseError> {
    let mut lines = src.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
    if header != "trace v1" {
        return Err(TraceParseError { line: 1, msg: "expected `trace v1` header".into() });
    }
    let mut tr = Trace {
        threads: Vec::new(),
        inputs: Vec::new(),
        events: Vec::new(),
        outcome: Outcome::Completed,
        divergence: None,
        bound_hits: BTreeMap::new(),
    };
    let mut saw_outcome = false;
    for (ln, raw) in lines {
        let line = ln + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        let err = |msg: String| TraceParseError { line, msg };
        match parts[0] {
            "threads" => tr.threads = parts[1..].iter().map(|s| s.to_string()).collect(),
            "inputsym" => {
                let name = parts.get(1).ok_or_else(|| err("missing input name".into()))?;
                let vvar = field(&parts, "vv")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("missing vv".into()))?;
                let width = field(&parts, "width")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("missing width".into()))?;
                let val = field(&parts, "val")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("missing val".into()))?;
                tr.inputs.push(TraceInput { name: name.to_string(), vvar, width, val });
            }
            "boundhit" => {
                if parts.len() != 3 {
                    return Err(err("expected `boundhit LABEL COUNT`".into()));
                }
                let count =
                    parts[2].parse().map_err(|_| err("bad boundhit count".into()))?;
                tr.bound_hits.insert(parts[1].to_string(), count);
            }
            "divergence" => {
                tr.divergence =
                    Some(parts.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| {
                        err("bad divergence index".into())
                    })?);
            }
            "outcome" => {
                saw_outcome = true;
                tr.outcome = match parts.get(1).copied() {
                    Some("completed") => Outcome::Completed,
                    Some("assertfailed") => Outcome::AssertFailed {
                        label: parts.get(2).unwrap_or(&"?").to_string(),
                    },
                    Some("nullderef") => Outcome::NullDeref {
                        label: parts.get(2).unwrap_or(&"?").to_string(),
                    },
                    Some("blocked") => {
                        let mut lock_blocked = Vec::new();
                        let mut join_blocked = Vec::new();
                        for p in &parts[2..] {
                            let bits: Vec<&str> = p.split(':').collect();
                            if bits.len() != 3 {
                                return Err(err(format!("bad blocked entry `{p}`")));
                            }
                            let t = tr
                                .threads
                                .iter()
                                .position(|x| x == bits[1])
                                .ok_or_else(|| err(format!("unknown thread `{}`", bits[1])))?;
                            match bits[0] {
                                "lock" => lock_blocked.push((t, bits[2].to_string())),
                                "join" => {
                                    let c = tr
                                        .threads
                                        .iter()
                                        .position(|x| x == bits[2])
                                        .ok_or_else(|| {
                                            err(format!("unknown thread `{}`", bits[2]))
                                        })?;
                                    join_blocked.push((t, c));
                                }
                                _ => return Err(err(format!("bad blocked entry `{p}`"))),
                            }
                        }
                        Outcome::Blocked { lock_blocked, join_blocked }
                    }
                    other => return Err(err(format!("unknown outcome {other:?}"))),
                };
            }
            _ => {
                // Event line: IDX THREAD KIND LABEL fields...
                if parts.len() < 4 {
                    return Err(err("malformed event line".into()));
                }
                let index: usize =
                    parts[0].parse().map_err(|_| err("bad event index".into()))?;
                let thread = tr
                    .threads
                    .iter()
                    .position(|t| t == parts[1])
                    .ok_or_else(|| err(format!("unknown thread `{}`", parts[1])))?;
                let label = parts[3].to_string();
                let get = |k: &str| {
                    field(&parts, k).ok_or_else(|| TraceParseError {
                        line,
                        msg: format!("missing field `{k}`"),
                    })
                };
                let kind = match parts[2] {
                    "read" | "deref" => EventKind::Read {
                        var: get("v")?.to_string(),
                        vvar: get("vv")?.parse().map_err(|_| err("bad vv".into()))?,
                        val: parse_val_str(get("val")?, line)?,
                        deref: parts[2] == "deref",
                    },
                    "write" => {
                        let expr_text = text
                            .split_once("expr=")
                            .map(|(_, c)| c.trim())
                            .ok_or_else(|| err("missing expr".into()))?;
                        EventKind::Write {
                            var: get("v")?.to_string(),
                            vvar: get("vv")?.parse().map_err(|_| err("bad vv".into()))?,
                            val: parse_val_str(get("val")?, line)?,
                            prev_vvar: get("pvv")?.parse().map_err(|_| err("bad pvv".into()))?,
                            prev_val: parse_val_str(get("pval")?, line)?,
                            sym: SymTerm::from_sexp(expr_text)
                                .map_err(|e| err(format!("bad expr sexp: {e}")))?,
                        }
                    }
                    "lock" => EventKind::Lock { lock: get("l")?.to_string() },
                    "unlock" => EventKind::Unlock { lock: get("l")?.to_string() },
                    "spawn" | "join" => {
                        let name = get("t")?;
                        let child = tr
                            .threads
                            .iter()
                            .position(|t| t == name)
                            .ok_or_else(|| err(format!("unknown thread `{name}`")))?;
                        if parts[2] == "spawn" {
                            EventKind::Spawn { child }
                        } else {
                            EventKind::Join { child }
                        }
                    }
                    "branch" | "assert" => {
                        let flag_key = if parts[2] == "branch" { "taken" } else { "ok" };
                        let flag = get(flag_key)? == "1";
                        let cond_text = text
                            .split_once("cond=")
                            .map(|(_, c)| c.trim())
                            .ok_or_else(|| err("missing cond".into()))?;
                        let cond = SymTerm::from_sexp(cond_text)
                            .map_err(|e| err(format!("bad cond sexp: {e}")))?;
                        if parts[2] == "branch" {
                            EventKind::Branch { taken: flag, cond }
                        } else {
                            EventKind::Assert { ok: flag, cond }
                        }
                    }
                    other => return Err(err(format!("unknown event kind `{other}`"))),
                };
                tr.events.push(Event { index, thread, label, kind });
            }
        }
    }
    if !saw_outcome {
        return Err(TraceParseError { line: 0, msg: "missing outcome line".into() });
    }
    Ok(tr)
}

/// Serialize a schedule+input combination.
pub fn serialize_schedule_input(si: &ScheduleInput) -> String {
    let mut out = String::new();
    for (name, val) in &si.input_values {
        out.push_str(&format!("input {name} = {val}\n"));
    }
    out.push_str("order:");
    for t in &si.turns {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    out
}

/// Parse a schedule+input file: `input NAME = VALUE` lines then one or more
/// `order:` lines whose turn lists are concatenated.
pub fn parse_schedule_input(src: &str) -> Result<ScheduleInput, TraceParseError> {
    let mut si = ScheduleInput::default();
    for (ln, raw) in src.lines().enumerate() {
        let line = ln + 1;
        let text = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("input") {
            let (name, val) = rest.split_once('=').ok_or(TraceParseError {
                line,
                msg: "expected `input NAME = VALUE`".into(),
            })?;
            let val: u64 = val.trim().parse().map_err(|_| TraceParseError {
                line,
                msg: format!("bad input value `{}`", val.trim()),
            })?;
            si.input_values.insert(name.trim().to_string(), val);
        } else if let Some(rest) = text.strip_prefix("order:") {
            si.turns.extend(rest.split_whitespace().map(|s| s.to_string()));
        } else {
            return Err(TraceParseError { line, msg: format!("unexpected line `{text}`") });
        }
    }
    Ok(si)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_trace() -> Trace {
        Trace {
            threads: vec!["main".into(), "T1".into()],
            inputs: vec![TraceInput { name: "i".into(), vvar: 0, width: 8, val: 2 }],
            events: vec![
                Event {
                    index: 1,
                    thread: 0,
                    label: "m1".into(),
                    kind: EventKind::Spawn { child: 1 },
                },
                Event {
                    index: 2,
                    thread: 1,
                    label: "1".into(),
                    kind: EventKind::Read { var: "x".into(), vvar: 1, val: Val::Int(0), deref: false },
                },
                Event {
                    index: 3,
                    thread: 1,
                    label: "2".into(),
                    kind: EventKind::Branch {
                        taken: true,
                        cond: SymTerm::cmp(
                            crate::ir::CmpOp::Eq,
                            SymTerm::Var(1),
                            SymTerm::Const(Val::Int(0)),
                        ),
                    },
                },
                Event {
                    index: 4,
                    thread: 1,
                    label: "3".into(),
                    kind: EventKind::Write {
                        var: "x".into(),
                        vvar: 2,
                        val: Val::Int(7),
                        prev_vvar: 3,
                        prev_val: Val::Int(0),
                        sym: SymTerm::Const(Val::Int(7)),
                    },
                },
                Event {
                    index: 5,
                    thread: 0,
                    label: "m2".into(),
                    kind: EventKind::Join { child: 1 },
                },
            ],
            outcome: Outcome::Completed,
            divergence: None,
            bound_hits: BTreeMap::new(),
        }
    }

    #[test]
    fn project_preserves_order_and_filters() {
        let tr = toy_trace();
        let t1: Vec<&str> = tr.project("T1").iter().map(|e| e.label.as_str()).collect();
        assert_eq!(t1, vec!["1", "2", "3"]);
        assert!(tr.project("nope").is_empty());
    }

    #[test]
    fn trace_round_trip() {
        let tr = toy_trace();
        let text = serialize_trace(&tr);
        let back = parse_trace(&text).unwrap();
        assert_eq!(tr, back);
    }

    #[test]
    fn empty_trace_round_trip() {
        let tr = Trace {
            threads: vec!["main".into()],
            inputs: vec![],
            events: vec![],
            outcome: Outcome::Completed,
            divergence: None,
            bound_hits: BTreeMap::new(),
        };
        let back = parse_trace(&serialize_trace(&tr)).unwrap();
        assert_eq!(tr, back);
    }

    #[test]
    fn schedule_input_round_trip() {
        let mut si = ScheduleInput::default();
        si.input_values.insert("i".into(), 2);
        si.input_values.insert("j".into(), 1);
        si.turns = vec!["T3".into(), "T3".into(), "T1".into()];
        let back = parse_schedule_input(&serialize_schedule_input(&si)).unwrap();
        assert_eq!(si, back);
    }

    #[test]
    fn prefix_canonical_form() {
        let mut p = PathPrefix::default();
        p.set("T2", vec![PathSite { label: "9".into(), polarity: false }]);
        p.set("T1", vec![PathSite { label: "3".into(), polarity: true }]);
        assert_eq!(p.canon(), "T1:3+ T2:9- ");
        assert!(!p.is_true());
        assert!(PathPrefix::default().is_true());
    }
}
