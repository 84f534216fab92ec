//! Report writing: a human-readable summary plus a line-oriented machine
//! format, side by side, reproducible byte-for-byte for a fixed seed and
//! the built-in backend.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::explore::{Bug, BugKind, Verdict, VerifyOutcome};
use crate::trace::{serialize_schedule_input, serialize_trace, Trace};

fn sorted_bugs(out: &VerifyOutcome) -> Vec<&Bug> {
    let mut bugs: Vec<&Bug> = out.bugs.iter().collect();
    // Stable listing regardless of discovery interleaving.
    bugs.sort_by(|a, b| {
        let ka = (a.kind == BugKind::Deadlock) as u8;
        let kb = (b.kind == BugKind::Deadlock) as u8;
        ka.cmp(&kb)
            .then_with(|| a.description.cmp(&b.description))
            .then_with(|| a.witness.input_values.cmp(&b.witness.input_values))
    });
    bugs
}

/// Machine-readable verdict lines (`key value` per line).
pub fn machine_verdict(out: &VerifyOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict {}", out.verdict.class());
    let _ = writeln!(s, "paths_explored {}", out.paths_explored);
    let _ = writeln!(s, "bound_hits {}", out.bound_hits);
    for (i, bug) in sorted_bugs(out).iter().enumerate() {
        let kind = match bug.kind {
            BugKind::AtomicityViolation => "av",
            BugKind::Deadlock => "dl",
        };
        let _ = writeln!(s, "bug{i} kind {kind}");
        let _ = writeln!(s, "bug{i} detail {}", bug.description);
        for (name, val) in &bug.witness.input_values {
            let _ = writeln!(s, "bug{i} input {name} = {val}");
        }
        let _ = writeln!(s, "bug{i} replay {:?}", bug.replay_outcome);
    }
    s
}

/// Human-readable verdict summary.
pub fn human_verdict(out: &VerifyOutcome) -> String {
    let mut s = String::new();
    match &out.verdict {
        Verdict::Verified { paths_explored, bound_hits } => {
            let _ = writeln!(s, "verified: no atomicity violation or deadlock found");
            let _ = writeln!(s, "paths explored: {paths_explored}");
            if *bound_hits > 0 {
                let _ = writeln!(
                    s,
                    "note: loop unfold bound hit {bound_hits} time(s); paths beyond it pruned"
                );
            }
        }
        Verdict::AtomicityViolation(bug) => {
            let _ = writeln!(s, "BUG atomicity violation: {}", bug.description);
            describe_bug(&mut s, bug);
        }
        Verdict::Deadlock(bug) => {
            let _ = writeln!(s, "BUG deadlock: {}", bug.description);
            describe_bug(&mut s, bug);
        }
        Verdict::Timeout { paths_explored } => {
            let _ = writeln!(
                s,
                "timeout: fix holds on the {paths_explored} path(s) explored; space not exhausted"
            );
        }
        Verdict::Unknown { reason, paths_explored } => {
            let _ = writeln!(s, "unknown: {reason} (after {paths_explored} paths)");
        }
    }
    if out.bugs.len() > 1 {
        let _ = writeln!(s, "all findings ({}):", out.bugs.len());
        for bug in sorted_bugs(out) {
            let kind = match bug.kind {
                BugKind::AtomicityViolation => "av",
                BugKind::Deadlock => "dl",
            };
            let _ = writeln!(s, "  [{kind}] {}", bug.description);
        }
    }
    s
}

fn describe_bug(s: &mut String, bug: &Bug) {
    for (name, val) in &bug.witness.input_values {
        let _ = writeln!(s, "  input {name} = {val}");
    }
    let _ = writeln!(s, "  schedule: {}", bug.witness.turns.join(" "));
    let _ = writeln!(s, "  replay outcome: {:?}", bug.replay_outcome);
}

/// Write the full report set into a directory: human and machine verdicts,
/// the progress log, and per-bug witness files.
pub fn write_reports(dir: &Path, out: &VerifyOutcome, traces: &[(String, Trace)]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.txt"), human_verdict(out))?;
    fs::write(dir.join("verdict.txt"), machine_verdict(out))?;
    fs::write(dir.join("progress.log"), out.log.join("\n") + "\n")?;
    for (i, bug) in sorted_bugs(out).iter().enumerate() {
        fs::write(
            dir.join(format!("witness{i}.si")),
            serialize_schedule_input(&bug.witness),
        )?;
    }
    for (name, tr) in traces {
        fs::write(dir.join(name), serialize_trace(tr))?;
    }
    Ok(())
}
