//! Command-line entry point.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use verifix::encode::{self, event_labels};
use verifix::exec::{self, ExecConfig};
use verifix::explore::{ExploreConfig, Seed, Verdict};
use verifix::ir::{apply_fix, parse_fix_patch, parse_program, parse_region_spec};
use verifix::report;
use verifix::solver::{emit_smtlib, BackendKind};
use verifix::trace::{parse_schedule_input, parse_trace, serialize_trace, Outcome};

#[derive(Parser)]
#[command(name = "verifix", version, about = "Schedule+input space verifier for synchronization fixes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Builtin,
    External,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Builtin => BackendKind::Builtin,
            BackendArg::External => BackendKind::External,
        }
    }
}

#[derive(clap::Args, Clone)]
struct RunFlags {
    /// Loop unfold depth.
    #[arg(long = "loop-depth", env = "VERIFIX_LOOP_DEPTH", default_value_t = 5)]
    loop_depth: usize,
    /// Maximal parallelism of the explorer.
    #[arg(long = "parallel", env = "VERIFIX_PARALLEL", default_value_t = 5)]
    parallel: usize,
    /// Verification timeout in seconds.
    #[arg(long = "timeout-secs", env = "VERIFIX_TIMEOUT_SECS", default_value_t = 1200)]
    timeout_secs: u64,
    /// Solver backend.
    #[arg(long = "backend", env = "VERIFIX_BACKEND", value_enum, default_value = "builtin")]
    backend: BackendArg,
    /// Seed of the divergence-fallback scheduler.
    #[arg(long = "seed", env = "VERIFIX_SEED", default_value_t = 1)]
    seed: u64,
    /// Keep exploring after the first bug and report every witness.
    #[arg(long = "find-all", env = "VERIFIX_FIND_ALL", default_value_t = false)]
    find_all: bool,
    /// Directory for report files.
    #[arg(long = "report-dir", env = "VERIFIX_REPORT_DIR")]
    report_dir: Option<PathBuf>,
}

impl RunFlags {
    fn explore_config(&self) -> ExploreConfig {
        ExploreConfig {
            exec: ExecConfig {
                loop_unfold_depth: self.loop_depth,
                random_seed: self.seed,
                max_steps: 20_000,
            },
            backend: self.backend.into(),
            timeout: Duration::from_secs(self.timeout_secs),
            find_all: self.find_all,
            parallelism: self.parallel,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify a fix against a program, region spec, and seed.
    Verify {
        program: PathBuf,
        fix: PathBuf,
        region: PathBuf,
        /// Seed file: a schedule+input (.si) or a buggy trace (.trace).
        seed_file: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Replay a witness and print the trace and outcome.
    Replay {
        program: PathBuf,
        witness: PathBuf,
        /// Apply this fix before replaying.
        #[arg(long)]
        fix: Option<PathBuf>,
        #[arg(long = "loop-depth", env = "VERIFIX_LOOP_DEPTH", default_value_t = 5)]
        loop_depth: usize,
        #[arg(long = "seed", env = "VERIFIX_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Print a trace's constraint encodings.
    Encode {
        program: PathBuf,
        trace: PathBuf,
        #[arg(long, value_parser = ["rw", "sync", "pc", "all", "smtlib"], default_value = "all")]
        emit: String,
    },
    /// List candidate deadlock cycles of a trace and confirm them.
    Deadlock {
        program: PathBuf,
        trace: PathBuf,
        #[arg(long = "backend", env = "VERIFIX_BACKEND", value_enum, default_value = "builtin")]
        backend: BackendArg,
    },
    /// Run the benchmark corpus and compare verdicts with expectations.
    Corpus {
        /// Corpus directory.
        #[arg(long, env = "VERIFIX_CORPUS_DIR", default_value = "corpus")]
        dir: PathBuf,
        /// Only entries whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Read one SMT-LIB2 script from stdin, solve, print the result.
    #[command(hide = true)]
    SmtShell,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Verify { program, fix, region, seed_file, flags } => {
            let prog = parse_program(&read(&program)?).map_err(|e| e.to_string())?;
            let patch = parse_fix_patch(&read(&fix)?).map_err(|e| e.to_string())?;
            let spec = parse_region_spec(&read(&region)?).map_err(|e| e.to_string())?;
            let seed_text = read(&seed_file)?;
            let seed = if seed_text.trim_start().starts_with("trace v1") {
                Seed::BuggyTrace(parse_trace(&seed_text).map_err(|e| e.to_string())?)
            } else {
                Seed::Combination(parse_schedule_input(&seed_text).map_err(|e| e.to_string())?)
            };
            let (patched, warnings) = apply_fix(&prog, &patch).map_err(|e| e.to_string())?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let cfg = flags.explore_config();
            let outcome = verifix::explore::verify_fix(&patched, seed, &spec, &cfg);
            print!("{}", report::human_verdict(&outcome));
            if let Some(dir) = &flags.report_dir {
                report::write_reports(dir, &outcome, &[]).map_err(|e| e.to_string())?;
            }
            Ok(ExitCode::from(match outcome.verdict {
                Verdict::Verified { .. } => 0,
                Verdict::AtomicityViolation(_) | Verdict::Deadlock(_) => 2,
                Verdict::Timeout { .. } => 3,
                Verdict::Unknown { .. } => 4,
            }))
        }
        Cmd::Replay { program, witness, fix, loop_depth, seed } => {
            let prog = parse_program(&read(&program)?).map_err(|e| e.to_string())?;
            let prog = match fix {
                Some(f) => {
                    let patch = parse_fix_patch(&read(&f)?).map_err(|e| e.to_string())?;
                    apply_fix(&prog, &patch).map_err(|e| e.to_string())?.0
                }
                None => prog,
            };
            let si = parse_schedule_input(&read(&witness)?).map_err(|e| e.to_string())?;
            let cfg =
                ExecConfig { loop_unfold_depth: loop_depth, random_seed: seed, max_steps: 20_000 };
            let run = exec::replay(&prog, &si, &cfg).map_err(|e| e.to_string())?;
            print!("{}", serialize_trace(&run.trace));
            if let Some(d) = run.trace.divergence {
                eprintln!("note: schedule diverged after event {d}");
            }
            Ok(ExitCode::from(match run.trace.outcome {
                Outcome::Completed => 0,
                Outcome::AssertFailed { .. } | Outcome::NullDeref { .. } => 2,
                Outcome::Blocked { .. } => 5,
            }))
        }
        Cmd::Encode { program, trace, emit } => {
            let prog = parse_program(&read(&program)?).map_err(|e| e.to_string())?;
            let tr = parse_trace(&read(&trace)?).map_err(|e| e.to_string())?;
            let table = encode::build_var_table(&prog, &tr);
            let labels = event_labels(&tr);
            let show = |f: &verifix::formula::Formula| f.display(&table, &labels);
            match emit.as_str() {
                "rw" => println!("{}", show(&encode::encode_rw(&prog, &tr))),
                "sync" => println!("{}", show(&encode::encode_sync(&tr))),
                "pc" => println!("{}", show(&encode::encode_pc(&tr))),
                "all" => {
                    println!("rw:   {}", show(&encode::encode_rw(&prog, &tr)));
                    println!("pc:   {}", show(&encode::encode_pc(&tr)));
                    println!("sync: {}", show(&encode::encode_sync(&tr)));
                }
                "smtlib" => {
                    print!("{}", emit_smtlib(&encode::encode_trace(&prog, &tr), &table))
                }
                _ => unreachable!("clap validates"),
            }
            Ok(ExitCode::from(0))
        }
        Cmd::Deadlock { program, trace, backend } => {
            let prog = parse_program(&read(&program)?).map_err(|e| e.to_string())?;
            let tr = parse_trace(&read(&trace)?).map_err(|e| e.to_string())?;
            let cycles = verifix::deadlock::potential_dls(&tr).map_err(|e| e.to_string())?;
            println!("{} candidate cycle(s)", cycles.len());
            let labels = event_labels(&tr);
            let table = encode::build_var_table(&prog, &tr);
            for c in &cycles {
                println!("  {}", c.describe(&tr));
                println!(
                    "    order constraint: {}",
                    verifix::deadlock::encode_dl(c).display(&table, &labels)
                );
            }
            let solver = verifix::solver::Solver::new(BackendKind::from(backend));
            match verifix::deadlock::check_dl(&prog, &tr, &solver, &Default::default())
                .map_err(|e| e.to_string())?
            {
                Some(confirmed) => {
                    println!("confirmed: {}", confirmed.cycle.describe(&tr));
                    let inputs: Vec<String> = confirmed
                        .witness
                        .input_values
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect();
                    println!("witness inputs: {}", inputs.join(" "));
                    println!("witness schedule: {}", confirmed.witness.turns.join(" "));
                    Ok(ExitCode::from(2))
                }
                None => {
                    println!("no candidate confirmed");
                    Ok(ExitCode::from(0))
                }
            }
        }
        Cmd::Corpus { dir, filter, flags } => {
            let cfg = flags.explore_config();
            let results = verifix::corpus::run_corpus(&dir, filter.as_deref(), &cfg)
                .map_err(|e| e.to_string())?;
            print!("{}", verifix::corpus::summary_table(&results));
            if let Some(rd) = &flags.report_dir {
                std::fs::create_dir_all(rd).map_err(|e| e.to_string())?;
                for r in &results {
                    let sub = rd.join(format!("{}_{}", r.entry, r.fix.replace('.', "_")));
                    report::write_reports(&sub, &r.outcome, &[]).map_err(|e| e.to_string())?;
                }
            }
            Ok(ExitCode::from(if results.iter().all(|r| r.pass) { 0 } else { 2 }))
        }
        Cmd::SmtShell => {
            let mut input = String::new();
            std::io::stdin().read_to_string(&mut input).map_err(|e| e.to_string())?;
            let mut out = std::io::stdout();
            let code = verifix::solver::run_smt_shell(&input, &mut out);
            Ok(ExitCode::from(code as u8))
        }
    }
}
