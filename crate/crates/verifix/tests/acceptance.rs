//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with its measured numbers. Tolerances and thresholds are pinned
//! in the assertions.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use verifix::corpus::{load_entry, run_fix};
use verifix::encode::{
    encode_av, encode_trace, find_av_instances, model_to_schedule_input,
};
use verifix::exec::{enumerate_all, guided_se, replay, ExecConfig, Run};
use verifix::explore::{split, BugKind, ExploreConfig, Verdict};
use verifix::formula::{Formula, OrdTerm, SymTerm, VarInfo, VarTable};
use verifix::ir::{parse_program, AtomicRegionSpec, CmpOp, Program, Val};
use verifix::solver::{brute_force_sat, Budget, Solver, SolverResult};
use verifix::trace::{Outcome, PathPrefix, PathSite, ScheduleInput, Trace};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn seq_cfg() -> ExploreConfig {
    ExploreConfig { parallelism: 1, ..ExploreConfig::default() }
}

fn entry(name: &str) -> verifix::corpus::CorpusEntry {
    load_entry(&corpus_dir().join(name)).expect("corpus entry loads")
}

fn run_entry_fix(name: &str, fix: &str, cfg: &ExploreConfig) -> verifix::corpus::CorpusResult {
    let e = entry(name);
    let f = e.fixes.iter().find(|f| f.file == fix).expect("fix exists");
    run_fix(&e, f, cfg)
}

// -------------------------------------------------------------------
// Criterion 1: motivating-example suite.

#[test]
fn criterion_1_motivating_suite() {
    let started = Instant::now();

    // fix1: a bug verdict with an AV witness, and a deadlock witness too
    // under find-all.
    let mut cfg = seq_cfg();
    cfg.find_all = true;
    let r1 = run_entry_fix("prog4", "fix1.patch", &cfg);
    let kinds: BTreeSet<&str> = r1
        .outcome
        .bugs
        .iter()
        .map(|b| match b.kind {
            BugKind::AtomicityViolation => "av",
            BugKind::Deadlock => "dl",
        })
        .collect();
    assert!(kinds.contains("av"), "fix1 must yield an atomicity-violation witness");
    assert!(kinds.contains("dl"), "fix1 must yield a deadlock witness under find-all");

    // fix2: an AV witness whose instance involves the remote write the
    // original trace order cannot realize (label 24 or 18).
    let r2 = run_entry_fix("prog4", "fix2.patch", &seq_cfg());
    match &r2.outcome.verdict {
        Verdict::AtomicityViolation(bug) => {
            assert!(
                bug.description.contains("24") || bug.description.contains("18"),
                "fix2 witness must involve the out-of-trace remote write, got {}",
                bug.description
            );
        }
        other => panic!("fix2 expected an atomicity violation, got {other:?}"),
    }

    // fix3: verified, path count 7 +/- 2 under the default deterministic
    // order, verdict itself exact.
    let r3 = run_entry_fix("prog4", "fix3.patch", &seq_cfg());
    let paths = match &r3.outcome.verdict {
        Verdict::Verified { paths_explored, .. } => *paths_explored,
        other => panic!("fix3 expected verified, got {other:?}"),
    };
    assert!(
        (5..=9).contains(&paths),
        "fix3 explored {paths} paths, outside the 7 +/- 2 window"
    );

    let wall = started.elapsed();
    assert!(wall < Duration::from_secs(30), "suite took {wall:?}, budget 30s");
    println!(
        "criterion 1: PASS (fix1 av+dl, fix2 av via out-of-trace write, fix3 verified in {paths} paths, {} ms)",
        wall.as_millis()
    );
}

// -------------------------------------------------------------------
// Criterion 2: Prog1..Prog4 verdict classes.

#[test]
fn criterion_2_prog_table_verdicts() {
    let started = Instant::now();
    let mut lines = Vec::new();
    for (name, fix, expected) in [
        ("prog1", "fix1.patch", "av"),
        ("prog2", "fix2.patch", "av"),
        ("prog4", "fix2.patch", "av"), // Fix5 in the table
    ] {
        let r = run_entry_fix(name, fix, &seq_cfg());
        let got = r.outcome.verdict.class();
        assert_eq!(got, expected, "{name}/{fix}");
        lines.push(format!("{name}={got}"));
    }
    // Prog4/Fix4 must show both classes under find-all.
    let mut cfg = seq_cfg();
    cfg.find_all = true;
    let r4 = run_entry_fix("prog4", "fix1.patch", &cfg);
    let kinds: BTreeSet<&str> = r4
        .outcome
        .bugs
        .iter()
        .map(|b| match b.kind {
            BugKind::AtomicityViolation => "av",
            BugKind::Deadlock => "dl",
        })
        .collect();
    assert_eq!(kinds, BTreeSet::from(["av", "dl"]), "prog4/fix1 is av+dl");
    lines.push("prog4fix1=av+dl".into());
    let small_wall = started.elapsed();
    assert!(small_wall < Duration::from_secs(120), "small entries took {small_wall:?}");

    // Prog3 runs within the long budget.
    let p3_start = Instant::now();
    let r3 = run_entry_fix("prog3", "fix3.patch", &seq_cfg());
    assert_eq!(r3.outcome.verdict.class(), "dl", "prog3/fix3");
    let p3_wall = p3_start.elapsed();
    assert!(p3_wall < Duration::from_secs(1200), "prog3 took {p3_wall:?}");
    lines.push(format!("prog3=dl({}ms)", p3_wall.as_millis()));

    println!("criterion 2: PASS ({})", lines.join(" "));
}

// -------------------------------------------------------------------
// Criterion 3: deadlock oracle equivalence on random lock traces.

/// Generate a random program of nested lock/unlock sections, at most 4
/// threads, 4 locks, and 20 lock/unlock events.
fn random_lock_program(rng: &mut StdRng) -> Program {
    let n_threads = rng.gen_range(2..=4);
    let n_locks = rng.gen_range(2..=4);
    let mut src = String::from("shared x : int8 = 0\n");
    for l in 0..n_locks {
        src.push_str(&format!("lock k{l}\n"));
    }
    src.push_str("thread main {\n");
    for t in 0..n_threads {
        src.push_str(&format!("  s{t}: spawn W{t}\n"));
    }
    for t in 0..n_threads {
        src.push_str(&format!("  j{t}: join W{t}\n"));
    }
    src.push_str("}\n");
    let mut label = 0usize;
    let mut events = 0usize;
    for t in 0..n_threads {
        src.push_str(&format!("thread W{t} {{\n"));
        let mut held: Vec<usize> = Vec::new();
        let steps = rng.gen_range(2..8usize);
        for _ in 0..steps {
            if events >= 20 {
                break;
            }
            let acquire = held.is_empty() || (held.len() < 3 && rng.gen_bool(0.55));
            if acquire {
                let l = rng.gen_range(0..n_locks);
                if held.contains(&l) {
                    continue; // relocking self-deadlocks; skip
                }
                src.push_str(&format!("  a{label}: lock(k{l})\n"));
                held.push(l);
            } else {
                let l = held.pop().unwrap();
                src.push_str(&format!("  a{label}: unlock(k{l})\n"));
            }
            label += 1;
            events += 1;
        }
        while let Some(l) = held.pop() {
            src.push_str(&format!("  a{label}: unlock(k{l})\n"));
            label += 1;
        }
        src.push_str("}\n");
    }
    parse_program(&src).expect("generated program parses")
}

/// Serializing schedule: threads run to completion one after another, in
/// program order, so the run always completes.
fn serial_trace(p: &Program) -> Run {
    let mut turns = Vec::new();
    let entry = p.entry.clone();
    let workers: Vec<&verifix::ir::ThreadDef> =
        p.threads.iter().filter(|t| t.name != entry).collect();
    // Spawns first.
    for _ in 0..workers.len() {
        turns.push(entry.clone());
    }
    for w in &workers {
        // Flat bodies: every statement is at most one critical event.
        for _ in 0..count_criticals(&w.body) {
            turns.push(w.name.clone());
        }
    }
    for _ in 0..workers.len() {
        turns.push(entry.clone());
    }
    let si = ScheduleInput { input_values: BTreeMap::new(), turns };
    replay(p, &si, &ExecConfig { random_seed: 7, ..Default::default() }).expect("serial run")
}

fn count_criticals(block: &[verifix::ir::Stmt]) -> usize {
    use verifix::ir::StmtKind;
    block
        .iter()
        .map(|s| match &s.kind {
            StmtKind::Branch { then_block, else_block, .. } => {
                count_criticals(then_block).max(count_criticals(else_block))
            }
            StmtKind::Loop { body, .. } => count_criticals(body),
            StmtKind::Assign { .. } | StmtKind::Assert(_) => 0,
            _ => 1,
        })
        .sum()
}

/// Independent reference: enumerate every subset of graph edges, keep the
/// ones forming a single simple cycle, apply the unsafe filter.
fn reference_unsafe_cycles(tr: &Trace) -> BTreeSet<Vec<(usize, usize)>> {
    // Re-derive edges with a separate scan.
    #[derive(Clone)]
    struct Edge {
        from: String,
        to: String,
        thread: usize,
        held: BTreeSet<String>,
        acquire: usize,
        request: usize,
    }
    let mut held: BTreeMap<usize, Vec<(String, usize)>> = BTreeMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    for e in &tr.events {
        match &e.kind {
            verifix::trace::EventKind::Lock { lock } => {
                let h = held.entry(e.thread).or_default();
                for (l1, acq) in h.iter() {
                    edges.push(Edge {
                        from: l1.clone(),
                        to: lock.clone(),
                        thread: e.thread,
                        held: h.iter().map(|(l, _)| l.clone()).collect(),
                        acquire: *acq,
                        request: e.index,
                    });
                }
                h.push((lock.clone(), e.index));
            }
            verifix::trace::EventKind::Unlock { lock } => {
                let h = held.entry(e.thread).or_default();
                if let Some(pos) = h.iter().rposition(|(l, _)| l == lock) {
                    h.remove(pos);
                }
            }
            _ => {}
        }
    }
    // All edge subsets up to size = number of locks.
    let locks: BTreeSet<String> =
        edges.iter().flat_map(|e| [e.from.clone(), e.to.clone()]).collect();
    let max_len = locks.len().max(1);
    let mut out = BTreeSet::new();
    let n = edges.len();
    for mask in 1u32..(1u32 << n.min(20)) {
        let subset: Vec<&Edge> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &edges[i]).collect();
        if subset.len() > max_len {
            continue;
        }
        // Must form one simple cycle: every node has in-degree and
        // out-degree one and the edges chain into a single loop.
        let froms: BTreeSet<&str> = subset.iter().map(|e| e.from.as_str()).collect();
        let tos: BTreeSet<&str> = subset.iter().map(|e| e.to.as_str()).collect();
        if froms.len() != subset.len() || tos.len() != subset.len() || froms != tos {
            continue;
        }
        // Chain check.
        let mut order = vec![subset[0]];
        while order.len() < subset.len() {
            let last = order.last().unwrap();
            match subset.iter().find(|e| e.from == last.to) {
                Some(next) if !order.iter().any(|o| o.request == next.request) => {
                    order.push(next)
                }
                _ => break,
            }
        }
        if order.len() != subset.len() || order.last().unwrap().to != order[0].from {
            continue;
        }
        // Unsafe filter: pairwise distinct threads, disjoint held sets.
        let mut ok = true;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if order[i].thread == order[j].thread
                    || order[i].held.intersection(&order[j].held).next().is_some()
                {
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        let mut pairs: Vec<(usize, usize)> =
            order.iter().map(|e| (e.acquire, e.request)).collect();
        let rot = pairs.iter().enumerate().min_by_key(|(_, p)| **p).map(|(i, _)| i).unwrap();
        pairs.rotate_left(rot);
        out.insert(pairs);
    }
    out
}

#[test]
fn criterion_3_deadlock_oracle_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xD15C0);
    let solver = Solver::builtin();
    let mut confirmed = 0usize;
    let mut with_candidates = 0usize;
    for case in 0..220 {
        let p = random_lock_program(&mut rng);
        let run = serial_trace(&p);
        assert_eq!(run.trace.outcome, Outcome::Completed, "case {case} must complete");
        let ours: BTreeSet<Vec<(usize, usize)>> = verifix::deadlock::potential_dls(&run.trace)
            .expect("well-nested")
            .into_iter()
            .map(|c| c.pairs)
            .collect();
        let reference = reference_unsafe_cycles(&run.trace);
        assert_eq!(ours, reference, "case {case}: cycle sets differ");
        if !ours.is_empty() {
            with_candidates += 1;
        }
        // Every Sat confirmation must replay to a blocked state.
        if let Some(conf) =
            verifix::deadlock::check_dl(&p, &run.trace, &solver, &Budget::default())
                .expect("no unknowns on these sizes")
        {
            let rerun = replay(&p, &conf.witness, &ExecConfig::default()).unwrap();
            match &rerun.trace.outcome {
                Outcome::Blocked { lock_blocked, .. } => {
                    let blocked: BTreeSet<usize> = lock_blocked.iter().map(|(t, _)| *t).collect();
                    assert_eq!(blocked, conf.cycle.threads, "case {case}: blocked set");
                }
                other => panic!("case {case}: witness replayed to {other:?}"),
            }
            confirmed += 1;
        }
    }
    assert!(with_candidates >= 20, "generator too tame: {with_candidates} candidate cases");
    assert!(confirmed >= 10, "generator too tame: {confirmed} confirmed deadlocks");
    println!(
        "criterion 3: PASS (220 traces, {with_candidates} with candidates, {confirmed} confirmed, all replayed blocked)"
    );
}

// -------------------------------------------------------------------
// Criterion 4: read-write encoder oracle equivalence.

/// A generated pattern scenario: program, region spec, serial seed turns.
struct PatternCase {
    program: Program,
    spec: AtomicRegionSpec,
}

/// Build a program exhibiting one of the seven patterns plus some noise
/// accesses, over 4-bit variables, at most 3 threads / 8 critical events.
fn pattern_case(case: u8, rng: &mut StdRng) -> PatternCase {
    let two_vars = case >= 5;
    // Sometimes serialize both sides with a common lock, making the
    // intended atomicity actually hold.
    let guarded = rng.gen_bool(0.35);
    let mut src = String::new();
    src.push_str(&format!("shared u : int4 = {}\n", rng.gen_range(0..16)));
    if two_vars {
        src.push_str(&format!("shared v : int4 = {}\n", rng.gen_range(0..16)));
    }
    src.push_str("lock g\n");
    src.push_str("thread main {\n  m1: spawn L\n  m2: spawn R\n  m3: join L\n  m4: join R\n}\n");
    let c = |rng: &mut StdRng| rng.gen_range(0..16u64);
    // Local pair in the unit.
    let (l1, l2): (String, String) = match case {
        1 => ("p1: x1 = u".into(), "p2: x2 = u".into()),
        2 => (format!("p1: u = {}", c(rng)), format!("p2: u = {}", c(rng))),
        3 => (format!("p1: u = {}", c(rng)), "p2: x2 = u".into()),
        4 => ("p1: x1 = u".into(), format!("p2: u = {}", c(rng))),
        5 => (format!("p1: u = {}", c(rng)), format!("p2: v = {}", c(rng))),
        6 => (format!("p1: u = {}", c(rng)), format!("p2: v = {}", c(rng))),
        7 => ("p1: x1 = u".into(), "p2: x2 = v".into()),
        _ => unreachable!(),
    };
    if guarded {
        src.push_str(&format!(
            "thread L {{\n  g1: lock(g)\n  {l1}\n  {l2}\n  g2: unlock(g)\n}}\n"
        ));
    } else {
        src.push_str(&format!("thread L {{\n  {l1}\n  {l2}\n}}\n"));
    }
    // Remote accesses.
    let remotes: Vec<String> = match case {
        1 | 3 | 4 => vec![format!("r1: u = {}", c(rng))],
        2 => vec!["r1: y1 = u".into()],
        5 => vec![format!("r1: u = {}", c(rng)), format!("r2: v = {}", c(rng))],
        6 => vec!["r1: y1 = u".into(), "r2: y2 = v".into()],
        7 => vec![format!("r1: u = {}", c(rng)), format!("r2: v = {}", c(rng))],
        _ => unreachable!(),
    };
    let mut body = remotes.join("\n  ");
    // Noise: an extra remote write on u half the time.
    if rng.gen_bool(0.5) {
        body.push_str(&format!("\n  r9: u = {}", c(rng)));
    }
    if guarded {
        src.push_str(&format!("thread R {{\n  g3: lock(g)\n  {body}\n  g4: unlock(g)\n}}\n"));
    } else {
        src.push_str(&format!("thread R {{\n  {body}\n}}\n"));
    }
    let program = parse_program(&src).expect("pattern program parses");
    let mut locations: BTreeSet<String> = ["u".to_string()].into_iter().collect();
    if two_vars {
        locations.insert("v".to_string());
    }
    PatternCase {
        program,
        spec: AtomicRegionSpec {
            unit: vec!["p1".into(), "p2".into()],
            locations,
            pattern: Some(case),
        },
    }
}

/// Concrete violation check of an instance over an enumerated trace,
/// written independently of the engine's validator.
fn concrete_violation(
    program: &Program,
    case: u8,
    vars: (&str, &str),
    tr: &Trace,
) -> bool {
    use verifix::trace::EventKind;
    let val_of = |label: &str| {
        tr.events.iter().find(|e| e.label == label).and_then(|e| match &e.kind {
            EventKind::Read { val, .. } | EventKind::Write { val, .. } => Some(*val),
            _ => None,
        })
    };
    let prev_of = |label: &str| {
        tr.events.iter().find(|e| e.label == label).and_then(|e| match &e.kind {
            EventKind::Write { prev_val, .. } => Some(*prev_val),
            _ => None,
        })
    };
    let at = |var: &str, label: &str| {
        let idx = match tr.events.iter().find(|e| e.label == label) {
            Some(e) => e.index,
            None => return None,
        };
        let mut v = program.shared(var).map(|d| d.init)?;
        for e in &tr.events {
            if e.index >= idx {
                break;
            }
            if let EventKind::Write { var: w, val, .. } = &e.kind {
                if w == var {
                    v = *val;
                }
            }
        }
        Some(v)
    };
    let (v1, v2) = vars;
    match case {
        1 => val_of("p1") != val_of("p2"),
        2 => val_of("p1") == val_of("r1"),
        3 => val_of("p2") != val_of("p1"),
        4 => val_of("p1") != prev_of("p2"),
        5 => val_of("p1") != at(v1, "p2") || at(v2, "p1") != prev_of("p2"),
        6 => val_of("r1") == val_of("p1") || val_of("r2") == at(v2, "p1"),
        7 => val_of("p1") != at(v1, "p2") || at(v2, "p1") != val_of("p2"),
        _ => unreachable!(),
    }
}

fn sites_of(tr: &Trace) -> Vec<Vec<PathSite>> {
    (0..tr.threads.len()).map(|t| tr.path_sites(t)).collect()
}

#[test]
fn criterion_4_rw_encoder_oracle_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xE9E9);
    let solver = Solver::builtin();
    let cfg = ExecConfig::default();
    let mut sat_cases = 0usize;
    let mut unsat_cases = 0usize;
    let total = 504;
    for i in 0..total {
        let case = (i % 7 + 1) as u8;
        let pc = pattern_case(case, &mut rng);
        let run = serial_trace(&pc.program);
        assert_eq!(run.trace.outcome, Outcome::Completed);

        // Φ_τ models decoded and replayed reproduce the encoded path.
        let phi_tau = encode_trace(&pc.program, &run.trace);
        match solver.check_sat(&phi_tau, &run.table, &Budget::default(), false) {
            SolverResult::Sat(model) => {
                let si = model_to_schedule_input(&model, &run.trace);
                let rerun = guided_se(&pc.program, &si, &PathPrefix::default(), &cfg).unwrap();
                assert_eq!(
                    sites_of(&rerun.trace),
                    sites_of(&run.trace),
                    "case {i}: decoded model must reproduce the path"
                );
            }
            other => panic!("case {i}: trace formula must be satisfiable, got {other:?}"),
        }

        // Pattern check vs exhaustive interleaving search.
        let instances = find_av_instances(&pc.program, &run.trace, &pc.spec);
        let mut engine_sat = false;
        for inst in &instances {
            let mut table = run.table.clone();
            let enc = encode_av(&pc.program, &run.trace, inst, &mut table);
            let f = Formula::and(vec![
                phi_tau.clone(),
                enc.defs.clone(),
                Formula::not(enc.phi.clone()),
            ]);
            if solver.check_sat(&f, &table, &Budget::default(), false).is_sat() {
                engine_sat = true;
                break;
            }
        }
        // Brute force: any same-path interleaving with violating values.
        let runs = enumerate_all(&pc.program, &BTreeMap::new(), &cfg, 2_000_000).unwrap();
        let want_sites = sites_of(&run.trace);
        let brute = !instances.is_empty()
            && runs.iter().any(|r| {
                sites_of(&r.trace) == want_sites
                    && concrete_violation(
                        &pc.program,
                        case,
                        (&instances[0].vars.0, &instances[0].vars.1),
                        &r.trace,
                    )
            });
        assert_eq!(
            engine_sat, brute,
            "case {i} (pattern {case}): solver and enumeration disagree"
        );
        if engine_sat {
            sat_cases += 1;
        } else {
            unsat_cases += 1;
        }
    }
    assert!(sat_cases > 50, "generator too tame: {sat_cases} violating cases");
    assert!(unsat_cases > 20, "generator too tame: {unsat_cases} clean cases");
    println!(
        "criterion 4: PASS ({total} traces, all seven patterns, {sat_cases} violating / {unsat_cases} clean, solver == enumeration)"
    );
}

// -------------------------------------------------------------------
// Criterion 5: split combinatorics.

#[test]
fn criterion_5_split_combinatorics() {
    let mut rng = StdRng::seed_from_u64(0x5B11);
    for i in 0..1000 {
        let n_threads = rng.gen_range(1..=4usize);
        let threads: Vec<String> = (0..n_threads).map(|t| format!("T{t}")).collect();
        let mut path: BTreeMap<String, Vec<PathSite>> = BTreeMap::new();
        let mut pre = PathPrefix::default();
        let mut expected: usize = 1;
        for t in &threads {
            let path_len = rng.gen_range(0..=4usize);
            let sites: Vec<PathSite> = (0..path_len)
                .map(|k| PathSite { label: format!("{t}b{k}"), polarity: rng.gen_bool(0.5) })
                .collect();
            let pre_len = rng.gen_range(0..=path_len);
            pre.set(t, sites[..pre_len].to_vec());
            expected *= path_len - pre_len + 1;
            path.insert(t.clone(), sites);
        }
        let expected = expected - 1;
        let combos = split(&pre, &path, &threads);
        assert_eq!(combos.len(), expected, "pair {i}: split size");
        // Each combination is unique.
        let canon: BTreeSet<String> = combos.iter().map(|c| c.canon()).collect();
        assert_eq!(canon.len(), combos.len(), "pair {i}: duplicates in split");
    }
    println!("criterion 5: PASS (1000 random (prefix, path) pairs match the product formula)");
}

// -------------------------------------------------------------------
// Criterion 6: backend differential.

fn random_formula(rng: &mut StdRng, table: &mut VarTable) -> Formula {
    let n_ord = rng.gen_range(2..=4usize);
    let n_val = rng.gen_range(1..=3u32);
    for v in 0..n_val {
        table.insert(
            v,
            VarInfo {
                name: format!("v{v}"),
                width: rng.gen_range(1..=3),
                nullable: rng.gen_bool(0.3),
                is_input: false,
            },
        );
    }
    fn node(rng: &mut StdRng, n_ord: usize, n_val: u32, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.4) {
            // Atom.
            if rng.gen_bool(0.5) {
                let a = OrdTerm::Ev(rng.gen_range(1..=n_ord));
                let b = OrdTerm::Ev(rng.gen_range(1..=n_ord));
                if rng.gen_bool(0.8) {
                    Formula::OrdLt(a, b)
                } else {
                    Formula::OrdLe(a, b)
                }
            } else {
                let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
                let op = ops[rng.gen_range(0..ops.len())];
                let lhs = SymTerm::Var(rng.gen_range(0..n_val));
                let rhs = if rng.gen_bool(0.5) {
                    SymTerm::Var(rng.gen_range(0..n_val))
                } else if rng.gen_bool(0.15) {
                    SymTerm::Const(Val::Null)
                } else {
                    SymTerm::Const(Val::Int(rng.gen_range(0..10)))
                };
                Formula::Cmp(op, lhs, rhs)
            }
        } else {
            let parts: Vec<Formula> =
                (0..rng.gen_range(2..=3)).map(|_| node(rng, n_ord, n_val, depth - 1)).collect();
            match rng.gen_range(0..3) {
                0 => Formula::and(parts),
                1 => Formula::or(parts),
                _ => Formula::not(node(rng, n_ord, n_val, depth - 1)),
            }
        }
    }
    let body = node(rng, n_ord, n_val, 3);
    Formula::and(vec![Formula::OrdDistinct((1..=n_ord).collect()), body])
}

#[test]
fn criterion_6_backend_differential() {
    let shell = format!("{} smt-shell", env!("CARGO_BIN_EXE_verifix"));
    let external = Solver::external_with(
        shell.split_whitespace().map(|s| s.to_string()).collect(),
    );
    let builtin = Solver::builtin();
    let mut rng = StdRng::seed_from_u64(0xD1FF);
    let (mut sat_n, mut unsat_n) = (0usize, 0usize);
    for i in 0..1000 {
        let mut table = VarTable::default();
        let f = random_formula(&mut rng, &mut table);
        let oracle = brute_force_sat(&f, &table, &Budget::default());
        let ext = external.check_sat(&f, &table, &Budget::default(), false);
        let blt = builtin.check_sat(&f, &table, &Budget::default(), false);
        let cls = |r: &SolverResult| match r {
            SolverResult::Sat(_) => "sat",
            SolverResult::Unsat => "unsat",
            SolverResult::Unknown(r) => panic!("unexpected unknown: {r}"),
        };
        assert_eq!(cls(&oracle), cls(&ext), "formula {i}: oracle vs external\n{f:?}\noracle={oracle:?}\next={ext:?}");
        assert_eq!(cls(&oracle), cls(&blt), "formula {i}: oracle vs builtin\n{f:?}\noracle={oracle:?}\nblt={blt:?}");
        // Every Sat model passes local re-evaluation.
        for r in [&oracle, &ext, &blt] {
            if let SolverResult::Sat(m) = r {
                assert_eq!(
                    verifix::formula::eval_formula(&f, m, &table),
                    Some(true),
                    "formula {i}: model fails re-evaluation"
                );
            }
        }
        if oracle.is_sat() {
            sat_n += 1;
        } else {
            unsat_n += 1;
        }
    }
    assert!(sat_n > 100 && unsat_n > 100, "generator skew: {sat_n} sat / {unsat_n} unsat");
    println!(
        "criterion 6: PASS (1000 formulas, {sat_n} sat / {unsat_n} unsat, brute force == external == builtin)"
    );
}

// -------------------------------------------------------------------
// Criterion 7: parallel/sequential equivalence.

#[test]
fn criterion_7_parallel_equivalence() {
    let dir = corpus_dir();
    let entries = verifix::corpus::load_corpus(&dir).expect("corpus loads");
    let mut checked = 0usize;
    for e in &entries {
        for fix in &e.fixes {
            let seq = run_fix(e, fix, &seq_cfg());
            let mut par_cfg = seq_cfg();
            par_cfg.parallelism = 5;
            let par = run_fix(e, fix, &par_cfg);
            assert_eq!(
                seq.outcome.verdict.class(),
                par.outcome.verdict.class(),
                "{}/{}: verdict class differs between modes",
                e.name,
                fix.file
            );
            if matches!(seq.outcome.verdict, Verdict::Verified { .. }) {
                assert_eq!(
                    seq.outcome.explored, par.outcome.explored,
                    "{}/{}: explored prefix sets differ on a verified entry",
                    e.name, fix.file
                );
            }
            checked += 1;
        }
    }

    // Smoke check on the largest entry: parallel wall time does not exceed
    // sequential wall time (best of two runs each).
    let wall = |par: usize| {
        let mut cfg = seq_cfg();
        cfg.parallelism = par;
        (0..2)
            .map(|_| {
                let t = Instant::now();
                let r = run_entry_fix("prog3", "fix3.patch", &cfg);
                assert_eq!(r.outcome.verdict.class(), "dl");
                t.elapsed()
            })
            .min()
            .unwrap()
    };
    let seq_wall = wall(1);
    let par_wall = wall(5);
    assert!(
        par_wall <= seq_wall,
        "parallel {par_wall:?} slower than sequential {seq_wall:?} on the largest entry"
    );
    println!(
        "criterion 7: PASS ({checked} entry/fix pairs class-equal, verified sets equal, prog3 {}ms seq vs {}ms par)",
        seq_wall.as_millis(),
        par_wall.as_millis()
    );
}

// -------------------------------------------------------------------
// Criterion 8: paper witnesses pinned by the constraint system.

#[test]
fn criterion_8_pinned_witnesses() {
    let mut cfg = seq_cfg();
    cfg.find_all = true;
    let r = run_entry_fix("prog4", "fix1.patch", &cfg);
    let dl = r
        .outcome
        .bugs
        .iter()
        .find(|b| b.kind == BugKind::Deadlock)
        .expect("fix1 yields a deadlock witness");
    assert_eq!(dl.witness.input_values.get("i"), Some(&2), "deadlock witness input i");
    assert_eq!(dl.witness.input_values.get("j"), Some(&1), "deadlock witness input j");

    let p1 = r.outcome.bugs.iter().find(|b| {
        b.kind == BugKind::AtomicityViolation
            && b.witness.input_values.get("i") == Some(&0)
            && b.witness.input_values.get("j") == Some(&1)
            && matches!(b.replay_outcome, Outcome::NullDeref { .. })
    });
    assert!(
        p1.is_some(),
        "exploration must yield the i=0, j=1 witness replaying to a null dereference"
    );
    println!("criterion 8: PASS (deadlock witness i=2 j=1; exploration witness i=0 j=1 null-deref)");
}

// -------------------------------------------------------------------
// Witness validity across the whole corpus (backs the corpus invariants).

#[test]
fn corpus_witnesses_replay_to_their_outcomes() {
    let dir = corpus_dir();
    let entries = verifix::corpus::load_corpus(&dir).expect("corpus loads");
    let mut avs = 0usize;
    let mut dls = 0usize;
    for e in &entries {
        for fix in &e.fixes {
            let r = run_fix(e, fix, &seq_cfg());
            for bug in &r.outcome.bugs {
                match bug.kind {
                    BugKind::AtomicityViolation => {
                        avs += 1;
                        // Validated at emission time; the outcome recorded
                        // must be a concrete failure or a completed run
                        // with pattern-violating values.
                        assert!(
                            !bug.replay_outcome.is_blocked(),
                            "{}/{}: av witness replays blocked",
                            e.name,
                            fix.file
                        );
                    }
                    BugKind::Deadlock => {
                        dls += 1;
                        assert!(
                            bug.replay_outcome.is_blocked(),
                            "{}/{}: dl witness does not block",
                            e.name,
                            fix.file
                        );
                    }
                }
            }
        }
    }
    println!("corpus witnesses: PASS ({avs} av, {dls} dl, all consistent)");
}
