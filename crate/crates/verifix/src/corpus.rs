//! Corpus loading and batch verification.
//!
//! A corpus directory holds one subdirectory per benchmark:
//! `program.ir`, `spec.region`, one seed (`seed.si` or `seed.trace`),
//! any number of `*.patch` fixes, and `expected.txt` mapping each fix to
//! its expected verdict classes (`verified`, `av`, `dl`, or `av dl`).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::explore::{verify_fix, BugKind, ExploreConfig, Seed, Verdict, VerifyOutcome};
use crate::ir::{apply_fix, parse_fix_patch, parse_program, parse_region_spec};
use crate::ir::{AtomicRegionSpec, FixPatch, Program};
use crate::trace::{parse_schedule_input, parse_trace};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Bad(PathBuf, String),
}

#[derive(Debug, Clone)]
pub struct CorpusFix {
    pub file: String,
    pub patch: FixPatch,
    pub expected: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub dir: PathBuf,
    pub program: Program,
    pub spec: AtomicRegionSpec,
    pub seed: Seed,
    pub fixes: Vec<CorpusFix>,
}

#[derive(Debug)]
pub struct CorpusResult {
    pub entry: String,
    pub fix: String,
    pub expected: BTreeSet<String>,
    pub got: BTreeSet<String>,
    pub pass: bool,
    pub wall: Duration,
    pub outcome: VerifyOutcome,
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io(path.to_path_buf(), e))
}

pub fn load_entry(dir: &Path) -> Result<CorpusEntry, CorpusError> {
    let bad = |m: String| CorpusError::Bad(dir.to_path_buf(), m);
    let name = dir.file_name().and_then(|s| s.to_str()).unwrap_or("entry").to_string();
    let program =
        parse_program(&read(&dir.join("program.ir"))?).map_err(|e| bad(e.to_string()))?;
    let spec =
        parse_region_spec(&read(&dir.join("spec.region"))?).map_err(|e| bad(e.to_string()))?;
    let seed = if dir.join("seed.trace").exists() {
        Seed::BuggyTrace(
            parse_trace(&read(&dir.join("seed.trace"))?).map_err(|e| bad(e.to_string()))?,
        )
    } else {
        Seed::Combination(
            parse_schedule_input(&read(&dir.join("seed.si"))?).map_err(|e| bad(e.to_string()))?,
        )
    };
    let mut fixes = Vec::new();
    for line in read(&dir.join("expected.txt"))?.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let file = parts.next().ok_or_else(|| bad("empty expected line".into()))?.to_string();
        let expected: BTreeSet<String> = parts.map(|s| s.to_string()).collect();
        if expected.is_empty() {
            return Err(bad(format!("no expected classes for {file}")));
        }
        for c in &expected {
            if !matches!(c.as_str(), "verified" | "av" | "dl") {
                return Err(bad(format!("unknown expected class `{c}`")));
            }
        }
        let patch =
            parse_fix_patch(&read(&dir.join(&file))?).map_err(|e| bad(e.to_string()))?;
        fixes.push(CorpusFix { file, patch, expected });
    }
    Ok(CorpusEntry { name, dir: dir.to_path_buf(), program, spec, seed, fixes })
}

pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    let rd = fs::read_dir(dir).map_err(|e| CorpusError::Io(dir.to_path_buf(), e))?;
    let mut dirs: Vec<PathBuf> = rd
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && p.join("program.ir").exists())
        .collect();
    dirs.sort();
    for d in dirs {
        entries.push(load_entry(&d)?);
    }
    Ok(entries)
}

/// Verify one fix of one entry and compare against its expected classes.
/// Multi-class expectations run with find-all so every class can surface.
pub fn run_fix(entry: &CorpusEntry, fix: &CorpusFix, base: &ExploreConfig) -> CorpusResult {
    let mut cfg = base.clone();
    cfg.find_all = fix.expected.len() > 1 && !fix.expected.contains("verified");
    let started = Instant::now();
    let (outcome, got) = match apply_fix(&entry.program, &fix.patch) {
        Ok((patched, _warnings)) => {
            let outcome = verify_fix(&patched, entry.seed.clone(), &entry.spec, &cfg);
            let mut got: BTreeSet<String> = BTreeSet::new();
            match &outcome.verdict {
                Verdict::Verified { .. } => {
                    got.insert("verified".into());
                }
                Verdict::Timeout { .. } => {
                    got.insert("timeout".into());
                }
                Verdict::Unknown { .. } => {
                    got.insert("unknown".into());
                }
                _ => {}
            }
            for bug in &outcome.bugs {
                got.insert(
                    match bug.kind {
                        BugKind::AtomicityViolation => "av",
                        BugKind::Deadlock => "dl",
                    }
                    .into(),
                );
            }
            (outcome, got)
        }
        Err(e) => {
            let outcome = VerifyOutcome {
                verdict: Verdict::Unknown { reason: format!("patch failed: {e}"), paths_explored: 0 },
                bugs: Vec::new(),
                paths_explored: 0,
                bound_hits: 0,
                log: vec![format!("patch failed: {e}")],
                explored: BTreeSet::new(),
                realized: BTreeSet::new(),
            };
            (outcome, BTreeSet::from(["unknown".to_string()]))
        }
    };
    let pass = got == fix.expected;
    CorpusResult {
        entry: entry.name.clone(),
        fix: fix.file.clone(),
        expected: fix.expected.clone(),
        got,
        pass,
        wall: started.elapsed(),
        outcome,
    }
}

/// Run every (entry, fix) pair matching the filter; returns results in
/// deterministic order.
pub fn run_corpus(
    dir: &Path,
    filter: Option<&str>,
    cfg: &ExploreConfig,
) -> Result<Vec<CorpusResult>, CorpusError> {
    let mut out = Vec::new();
    for entry in load_corpus(dir)? {
        if let Some(f) = filter {
            if !entry.name.contains(f) {
                continue;
            }
        }
        for fix in &entry.fixes {
            out.push(run_fix(&entry, fix, cfg));
        }
    }
    Ok(out)
}

/// One summary line per result, plus a trailing pass/fail count.
pub fn summary_table(results: &[CorpusResult]) -> String {
    let mut s = String::new();
    for r in results {
        let expected: Vec<&str> = r.expected.iter().map(|x| x.as_str()).collect();
        let got: Vec<&str> = r.got.iter().map(|x| x.as_str()).collect();
        s.push_str(&format!(
            "{:<16} {:<14} expected={:<12} got={:<12} paths={:<5} {:>6}ms  {}\n",
            r.entry,
            r.fix,
            expected.join("+"),
            got.join("+"),
            r.outcome.paths_explored,
            r.wall.as_millis(),
            if r.pass { "ok" } else { "MISMATCH" },
        ));
    }
    let passed = results.iter().filter(|r| r.pass).count();
    s.push_str(&format!("{passed}/{} entries match expectations\n", results.len()));
    s
}
