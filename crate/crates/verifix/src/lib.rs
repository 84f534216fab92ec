//! Verification engine for synchronization fixes in concurrent programs.
//!
//! Given a program in a small intermediate language, a lock-insertion fix,
//! and a buggy seed (schedule+input or trace), the engine systematically
//! explores the joint schedule+input space. It either confirms that the fix
//! enforces the intended atomicity without introducing deadlocks, or emits
//! a concrete schedule+input witness of a residual atomicity violation or a
//! new deadlock.

pub mod corpus;
pub mod deadlock;
pub mod encode;
pub mod exec;
pub mod explore;
pub mod formula;
pub mod ir;
pub mod report;
pub mod solver;
pub mod trace;

pub use exec::{enumerate_all, guided_se, replay, ExecConfig, Run};
pub use ir::{apply_fix, parse_fix_patch, parse_program, parse_region_spec, validate, Program};
pub use trace::{parse_schedule_input, parse_trace, serialize_schedule_input, serialize_trace};
