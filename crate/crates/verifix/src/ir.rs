//! Program model: a small intermediate language for concurrent programs.
//!
//! A program is a set of shared variables, locks, inputs, and threads built
//! from labeled statements. Shared state is touched only through dedicated
//! read/write/deref statements so that every shared access is a distinct
//! critical event. Branch and loop conditions range over locals and inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

mod parse;
pub use parse::{parse_fix_patch, parse_program, parse_region_spec, ParseError};

/// A runtime value: a bounded unsigned integer or the distinguished null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Null,
    Int(u64),
}

impl Val {
    pub fn is_null(&self) -> bool {
        matches!(self, Val::Null)
    }

    pub fn as_int(&self) -> Option<u64> {
        match self {
            Val::Int(n) => Some(*n),
            Val::Null => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Null => write!(f, "null"),
            Val::Int(n) => write!(f, "{n}"),
        }
    }
}

/// Mask an integer to `width` bits.
pub fn mask(n: u64, width: u8) -> u64 {
    if width >= 64 {
        n
    } else {
        n & ((1u64 << width) - 1)
    }
}

/// An atom in an expression: a local, a program input, an integer, or null.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Local(String),
    Input(String),
    Const(Val),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// A value expression: an atom or a single arithmetic operation over atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VExpr {
    Atom(Atom),
    Arith(ArithOp, Atom, Atom),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
        }
    }
}

/// A boolean condition over locals and inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cond {
    Cmp(VExpr, CmpOp, VExpr),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

/// A labeled statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub label: String,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Lock(String),
    Unlock(String),
    /// `local = shared`
    ReadShared { local: String, var: String },
    /// `shared = expr`
    WriteShared { var: String, expr: VExpr },
    /// `local = deref(shared)`; traps on null, carries the implicit
    /// condition that the read value is non-null.
    Deref { local: String, var: String },
    /// `local = expr` over locals/inputs only.
    Assign { local: String, expr: VExpr },
    Branch { cond: Cond, then_block: Vec<Stmt>, else_block: Vec<Stmt> },
    Loop { cond: Cond, body: Vec<Stmt> },
    Spawn(String),
    Join(String),
    Assert(Cond),
}

impl StmtKind {
    pub fn is_sync(&self) -> bool {
        matches!(self, StmtKind::Lock(_) | StmtKind::Unlock(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedVarDecl {
    pub name: String,
    pub width: u8,
    pub init: Val,
    pub nullable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDecl {
    pub name: String,
    pub width: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadDef {
    pub name: String,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub shared_vars: Vec<SharedVarDecl>,
    pub locks: Vec<String>,
    pub inputs: Vec<InputDecl>,
    pub threads: Vec<ThreadDef>,
    /// Name of the main thread (runs at start; everything else is spawned).
    pub entry: String,
}

impl Program {
    pub fn shared(&self, name: &str) -> Option<&SharedVarDecl> {
        self.shared_vars.iter().find(|v| v.name == name)
    }

    pub fn input(&self, name: &str) -> Option<&InputDecl> {
        self.inputs.iter().find(|v| v.name == name)
    }

    pub fn thread(&self, name: &str) -> Option<&ThreadDef> {
        self.threads.iter().find(|t| t.name == name)
    }

    pub fn thread_index(&self, name: &str) -> Option<usize> {
        self.threads.iter().position(|t| t.name == name)
    }

    /// Find the thread containing a statement label.
    pub fn thread_of_label(&self, label: &str) -> Option<&str> {
        for t in &self.threads {
            if block_contains(&t.body, label) {
                return Some(&t.name);
            }
        }
        None
    }

    /// All statement labels, in thread/program order.
    pub fn all_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in &self.threads {
            collect_labels(&t.body, &mut out);
        }
        out
    }
}

fn collect_labels(block: &[Stmt], out: &mut Vec<String>) {
    for s in block {
        out.push(s.label.clone());
        match &s.kind {
            StmtKind::Branch { then_block, else_block, .. } => {
                collect_labels(then_block, out);
                collect_labels(else_block, out);
            }
            StmtKind::Loop { body, .. } => collect_labels(body, out),
            _ => {}
        }
    }
}

fn block_contains(block: &[Stmt], label: &str) -> bool {
    for s in block {
        if s.label == label {
            return true;
        }
        match &s.kind {
            StmtKind::Branch { then_block, else_block, .. } => {
                if block_contains(then_block, label) || block_contains(else_block, label) {
                    return true;
                }
            }
            StmtKind::Loop { body, .. } if block_contains(body, label) => return true,
            _ => {}
        }
    }
    false
}

/// One edit of a fix patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edit {
    InsertLock { lock: String, anchor: Anchor },
    InsertUnlock { lock: String, anchor: Anchor },
    /// Remove a lock/unlock statement by label.
    RemoveSync { label: String },
    /// Move a lock/unlock statement to a new position.
    MoveSync { label: String, anchor: Anchor },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Anchor {
    Before(String),
    After(String),
}

impl Anchor {
    pub fn label(&self) -> &str {
        match self {
            Anchor::Before(l) | Anchor::After(l) => l,
        }
    }
}

/// A synchronization fix: a list of edits applied to a program.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixPatch {
    pub edits: Vec<Edit>,
}

/// The intended-atomic region: statement labels forming the unit plus the
/// shared locations it protects. `pattern` optionally restricts the check
/// to one of the seven interleaving cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicRegionSpec {
    pub unit: Vec<String>,
    pub locations: BTreeSet<String>,
    pub pattern: Option<u8>,
}

/// A validation finding: the offending label (or declaration) plus a reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub label: String,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.reason)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PatchError {
    #[error("edit site `{0}` does not exist in the program")]
    MissingLabel(String),
    #[error("edit site `{0}` is not a lock/unlock statement")]
    NotSync(String),
    #[error("patched program is invalid: {0}")]
    Invalid(Diagnostic),
}

/// Check all program invariants. An empty list means the program is valid.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = BTreeSet::new();
    for label in p.all_labels() {
        if !seen.insert(label.clone()) {
            diags.push(Diagnostic { label, reason: "duplicate label".into() });
        }
    }
    if p.thread(&p.entry).is_none() {
        diags.push(Diagnostic { label: p.entry.clone(), reason: "entry thread not declared".into() });
    }

    let mut decl_names: BTreeSet<&str> = BTreeSet::new();
    for v in &p.shared_vars {
        if !decl_names.insert(&v.name) {
            diags.push(Diagnostic { label: v.name.clone(), reason: "duplicate declaration".into() });
        }
        if !v.nullable && v.init.is_null() {
            diags.push(Diagnostic {
                label: v.name.clone(),
                reason: "non-nullable variable initialized to null".into(),
            });
        }
    }
    for l in &p.locks {
        if !decl_names.insert(l) {
            diags.push(Diagnostic { label: l.clone(), reason: "duplicate declaration".into() });
        }
    }
    for i in &p.inputs {
        if !decl_names.insert(&i.name) {
            diags.push(Diagnostic { label: i.name.clone(), reason: "duplicate declaration".into() });
        }
    }

    let mut spawned: BTreeMap<String, usize> = BTreeMap::new();
    for t in &p.threads {
        check_block(p, &t.body, &mut diags, &mut spawned);
    }
    for (target, count) in &spawned {
        if *count > 1 {
            diags.push(Diagnostic {
                label: target.clone(),
                reason: format!("thread spawned {count} times"),
            });
        }
    }
    for t in &p.threads {
        if t.name != p.entry && !spawned.contains_key(&t.name) {
            diags.push(Diagnostic {
                label: t.name.clone(),
                reason: "thread is never spawned".into(),
            });
        }
    }
    if spawned.contains_key(&p.entry) {
        diags.push(Diagnostic { label: p.entry.clone(), reason: "entry thread is spawned".into() });
    }
    diags
}

fn check_block(
    p: &Program,
    block: &[Stmt],
    diags: &mut Vec<Diagnostic>,
    spawned: &mut BTreeMap<String, usize>,
) {
    for s in block {
        let lbl = || s.label.clone();
        match &s.kind {
            StmtKind::Lock(l) | StmtKind::Unlock(l) => {
                if !p.locks.iter().any(|x| x == l) {
                    diags.push(Diagnostic { label: lbl(), reason: format!("undeclared lock `{l}`") });
                }
            }
            StmtKind::ReadShared { var, .. } => {
                if p.shared(var).is_none() {
                    diags.push(Diagnostic {
                        label: lbl(),
                        reason: format!("undeclared shared variable `{var}`"),
                    });
                }
            }
            StmtKind::WriteShared { var, expr } => {
                if p.shared(var).is_none() {
                    diags.push(Diagnostic {
                        label: lbl(),
                        reason: format!("undeclared shared variable `{var}`"),
                    });
                }
                check_vexpr(p, expr, &s.label, diags);
            }
            StmtKind::Deref { var, .. } => match p.shared(var) {
                None => diags.push(Diagnostic {
                    label: lbl(),
                    reason: format!("undeclared shared variable `{var}`"),
                }),
                Some(d) => {
                    if !d.nullable {
                        diags.push(Diagnostic {
                            label: lbl(),
                            reason: format!("deref of non-nullable variable `{var}`"),
                        });
                    }
                }
            },
            StmtKind::Assign { expr, .. } => {
                check_vexpr(p, expr, &s.label, diags);
            }
            StmtKind::Branch { cond, then_block, else_block } => {
                check_cond(p, cond, &s.label, diags);
                check_block(p, then_block, diags, spawned);
                check_block(p, else_block, diags, spawned);
            }
            StmtKind::Loop { cond, body } => {
                check_cond(p, cond, &s.label, diags);
                check_block(p, body, diags, spawned);
            }
            StmtKind::Spawn(target) => {
                if p.thread(target).is_none() {
                    diags.push(Diagnostic {
                        label: lbl(),
                        reason: format!("spawn of undeclared thread `{target}`"),
                    });
                } else {
                    *spawned.entry(target.clone()).or_insert(0) += 1;
                }
            }
            StmtKind::Join(target) => {
                if p.thread(target).is_none() {
                    diags.push(Diagnostic {
                        label: lbl(),
                        reason: format!("join of undeclared thread `{target}`"),
                    });
                }
            }
            StmtKind::Assert(cond) => check_cond(p, cond, &s.label, diags),
        }
    }
}

fn check_atom(p: &Program, a: &Atom, label: &str, diags: &mut Vec<Diagnostic>) {
    match a {
        Atom::Input(name) => {
            if p.input(name).is_none() {
                diags.push(Diagnostic {
                    label: label.into(),
                    reason: format!("undeclared input `{name}`"),
                });
            }
        }
        Atom::Local(name) => {
            if p.shared(name).is_some() {
                diags.push(Diagnostic {
                    label: label.into(),
                    reason: format!(
                        "shared variable `{name}` used in an expression; shared state is only \
                         accessed through read/write/deref statements"
                    ),
                });
            }
        }
        Atom::Const(_) => {}
    }
}

fn check_vexpr(p: &Program, e: &VExpr, label: &str, diags: &mut Vec<Diagnostic>) {
    match e {
        VExpr::Atom(a) => check_atom(p, a, label, diags),
        VExpr::Arith(_, a, b) => {
            check_atom(p, a, label, diags);
            check_atom(p, b, label, diags);
        }
    }
}

fn check_cond(p: &Program, c: &Cond, label: &str, diags: &mut Vec<Diagnostic>) {
    match c {
        Cond::Cmp(a, _, b) => {
            check_vexpr(p, a, label, diags);
            check_vexpr(p, b, label, diags);
        }
        Cond::And(a, b) | Cond::Or(a, b) => {
            check_cond(p, a, label, diags);
            check_cond(p, b, label, diags);
        }
        Cond::Not(a) => check_cond(p, a, label, diags),
    }
}

/// Apply a fix patch. Inserted statements get fresh derived labels: the
/// first statement anchored at label `X` becomes `X'`, the next `X''`.
/// Returns the patched program and any non-fatal warnings (a patch that
/// leaves a lock path unbalanced is legal but flagged).
pub fn apply_fix(p: &Program, patch: &FixPatch) -> Result<(Program, Vec<Diagnostic>), PatchError> {
    let mut out = p.clone();
    let existing: BTreeSet<String> = p.all_labels().into_iter().collect();
    let mut derived: BTreeMap<String, usize> = BTreeMap::new();

    for edit in &patch.edits {
        match edit {
            Edit::InsertLock { lock, anchor } | Edit::InsertUnlock { lock, anchor } => {
                if !existing.contains(anchor.label()) {
                    return Err(PatchError::MissingLabel(anchor.label().to_string()));
                }
                let primes = derived.entry(anchor.label().to_string()).or_insert(0);
                *primes += 1;
                let label = format!("{}{}", anchor.label(), "'".repeat(*primes));
                let kind = match edit {
                    Edit::InsertLock { .. } => StmtKind::Lock(lock.clone()),
                    _ => StmtKind::Unlock(lock.clone()),
                };
                let stmt = Stmt { label, kind };
                if !insert_at(&mut out.threads, anchor, stmt) {
                    return Err(PatchError::MissingLabel(anchor.label().to_string()));
                }
            }
            Edit::RemoveSync { label } => {
                match remove_stmt(&mut out.threads, label) {
                    Some(s) if s.kind.is_sync() => {}
                    Some(_) => return Err(PatchError::NotSync(label.clone())),
                    None => return Err(PatchError::MissingLabel(label.clone())),
                }
            }
            Edit::MoveSync { label, anchor } => {
                let moved = match remove_stmt(&mut out.threads, label) {
                    Some(s) if s.kind.is_sync() => s,
                    Some(_) => return Err(PatchError::NotSync(label.clone())),
                    None => return Err(PatchError::MissingLabel(label.clone())),
                };
                if !insert_at(&mut out.threads, anchor, moved) {
                    return Err(PatchError::MissingLabel(anchor.label().to_string()));
                }
            }
        }
    }

    let diags = validate(&out);
    if let Some(d) = diags.first() {
        return Err(PatchError::Invalid(d.clone()));
    }
    let warnings = lock_balance_warnings(&out);
    Ok((out, warnings))
}

/// Warn about straight-line paths that end holding a lock or release an
/// un-held one. These are legal programs; the runtime treats a stray
/// unlock as a no-op and a leaked lock simply stays held.
fn lock_balance_warnings(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for t in &p.threads {
        let mut paths: Vec<(Vec<String>, String)> = vec![(Vec::new(), String::new())];
        walk_lock_paths(&t.body, &mut paths, &mut out, 0);
        for (held, last) in paths {
            if let Some(l) = held.first() {
                out.push(Diagnostic {
                    label: if last.is_empty() { t.name.clone() } else { last },
                    reason: format!("unbalanced: path ends holding lock `{l}`"),
                });
            }
        }
    }
    out
}

fn walk_lock_paths(
    block: &[Stmt],
    paths: &mut Vec<(Vec<String>, String)>,
    diags: &mut Vec<Diagnostic>,
    depth: usize,
) {
    // Path explosion guard: past a handful of branches the check degrades
    // to per-arm analysis, which is enough for a warning-level signal.
    if depth > 12 || paths.len() > 64 {
        return;
    }
    for s in block {
        for (held, last) in paths.iter_mut() {
            *last = s.label.clone();
            match &s.kind {
                StmtKind::Lock(l) => held.push(l.clone()),
                StmtKind::Unlock(l) => {
                    if let Some(pos) = held.iter().rposition(|h| h == l) {
                        held.remove(pos);
                    } else {
                        diags.push(Diagnostic {
                            label: s.label.clone(),
                            reason: format!("unbalanced: unlock of `{l}` not held on some path"),
                        });
                    }
                }
                _ => {}
            }
        }
        if let StmtKind::Branch { then_block, else_block, .. } = &s.kind {
            let mut then_paths = paths.clone();
            walk_lock_paths(then_block, &mut then_paths, diags, depth + 1);
            walk_lock_paths(else_block, paths, diags, depth + 1);
            paths.append(&mut then_paths);
        } else if let StmtKind::Loop { body, .. } = &s.kind {
            walk_lock_paths(body, paths, diags, depth + 1);
        }
    }
}

fn insert_at(threads: &mut [ThreadDef], anchor: &Anchor, stmt: Stmt) -> bool {
    for t in threads {
        if insert_in_block(&mut t.body, anchor, &stmt) {
            return true;
        }
    }
    false
}

fn insert_in_block(block: &mut Vec<Stmt>, anchor: &Anchor, stmt: &Stmt) -> bool {
    for i in 0..block.len() {
        if block[i].label == anchor.label() {
            let at = match anchor {
                Anchor::Before(_) => i,
                Anchor::After(_) => i + 1,
            };
            block.insert(at, stmt.clone());
            return true;
        }
        match &mut block[i].kind {
            StmtKind::Branch { then_block, else_block, .. } => {
                if insert_in_block(then_block, anchor, stmt)
                    || insert_in_block(else_block, anchor, stmt)
                {
                    return true;
                }
            }
            StmtKind::Loop { body, .. } => {
                if insert_in_block(body, anchor, stmt) {
                    return true;
                }
            }
            _ => {}
        }
    }
    false
}

fn remove_stmt(threads: &mut [ThreadDef], label: &str) -> Option<Stmt> {
    for t in threads {
        if let Some(s) = remove_in_block(&mut t.body, label) {
            return Some(s);
        }
    }
    None
}

fn remove_in_block(block: &mut Vec<Stmt>, label: &str) -> Option<Stmt> {
    for i in 0..block.len() {
        if block[i].label == label {
            return Some(block.remove(i));
        }
        match &mut block[i].kind {
            StmtKind::Branch { then_block, else_block, .. } => {
                if let Some(s) = remove_in_block(then_block, label) {
                    return Some(s);
                }
                if let Some(s) = remove_in_block(else_block, label) {
                    return Some(s);
                }
            }
            StmtKind::Loop { body, .. } => {
                if let Some(s) = remove_in_block(body, label) {
                    return Some(s);
                }
            }
            _ => {}
        }
    }
    None
}

/// Print a program in the textual format accepted by [`parse_program`].
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for v in &p.shared_vars {
        if v.nullable {
            out.push_str(&format!("shared {} : ref = {}\n", v.name, v.init));
        } else {
            out.push_str(&format!("shared {} : int{} = {}\n", v.name, v.width, v.init));
        }
    }
    for l in &p.locks {
        out.push_str(&format!("lock {l}\n"));
    }
    for i in &p.inputs {
        out.push_str(&format!("input {} : int{}\n", i.name, i.width));
    }
    for t in &p.threads {
        out.push_str(&format!("thread {} {{\n", t.name));
        print_block(&t.body, 1, &mut out);
        out.push_str("}\n");
    }
    out
}

fn print_block(block: &[Stmt], indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for s in block {
        match &s.kind {
            StmtKind::Lock(l) => out.push_str(&format!("{pad}{}: lock({l})\n", s.label)),
            StmtKind::Unlock(l) => out.push_str(&format!("{pad}{}: unlock({l})\n", s.label)),
            StmtKind::ReadShared { local, var } => {
                out.push_str(&format!("{pad}{}: {local} = {var}\n", s.label))
            }
            StmtKind::WriteShared { var, expr } => {
                out.push_str(&format!("{pad}{}: {var} = {}\n", s.label, print_vexpr(expr)))
            }
            StmtKind::Deref { local, var } => {
                out.push_str(&format!("{pad}{}: {local} = deref({var})\n", s.label))
            }
            StmtKind::Assign { local, expr } => {
                out.push_str(&format!("{pad}{}: {local} = {}\n", s.label, print_vexpr(expr)))
            }
            StmtKind::Branch { cond, then_block, else_block } => {
                out.push_str(&format!("{pad}{}: branch ({}) {{\n", s.label, print_cond(cond)));
                print_block(then_block, indent + 1, out);
                if else_block.is_empty() {
                    out.push_str(&format!("{pad}}}\n"));
                } else {
                    out.push_str(&format!("{pad}}} else {{\n"));
                    print_block(else_block, indent + 1, out);
                    out.push_str(&format!("{pad}}}\n"));
                }
            }
            StmtKind::Loop { cond, body } => {
                out.push_str(&format!("{pad}{}: loop ({}) {{\n", s.label, print_cond(cond)));
                print_block(body, indent + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
            StmtKind::Spawn(t) => out.push_str(&format!("{pad}{}: spawn {t}\n", s.label)),
            StmtKind::Join(t) => out.push_str(&format!("{pad}{}: join {t}\n", s.label)),
            StmtKind::Assert(c) => {
                out.push_str(&format!("{pad}{}: assert ({})\n", s.label, print_cond(c)))
            }
        }
    }
}

pub fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Local(n) | Atom::Input(n) => n.clone(),
        Atom::Const(v) => v.to_string(),
    }
}

pub fn print_vexpr(e: &VExpr) -> String {
    match e {
        VExpr::Atom(a) => print_atom(a),
        VExpr::Arith(op, a, b) => {
            let sym = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => "*",
            };
            format!("{} {sym} {}", print_atom(a), print_atom(b))
        }
    }
}

pub fn print_cond(c: &Cond) -> String {
    match c {
        Cond::Cmp(a, op, b) => {
            let sym = match op {
                CmpOp::Eq => "==",
                CmpOp::Ne => "!=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            format!("{} {sym} {}", print_vexpr(a), print_vexpr(b))
        }
        Cond::And(a, b) => format!("({}) && ({})", print_cond(a), print_cond(b)),
        Cond::Or(a, b) => format!("({}) || ({})", print_cond(a), print_cond(b)),
        Cond::Not(a) => format!("!({})", print_cond(a)),
    }
}
