//! Text formats: program source, fix-patch files, and region-spec files.
//!
//! The program grammar is line-oriented; see the repository README for the
//! full description. Comments run from `#` to end of line.

use std::collections::BTreeSet;

use super::{
    validate, Anchor, ArithOp, Atom, AtomicRegionSpec, CmpOp, Cond, Edit, FixPatch, InputDecl,
    Program, SharedVarDecl, Stmt, StmtKind, ThreadDef, Val, VExpr,
};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(&'static str),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

const PUNCTS: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", ":", "=", "<", ">", "!", "+", "-", "*",
];

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = ln + 1;
        let text = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let col = i + 1;
            if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric()
                        || matches!(bytes[i] as char, '_' | '.' | '\''))
                {
                    i += 1;
                }
                let word = &text[start..i];
                if word.chars().all(|c| c.is_ascii_digit()) {
                    toks.push((Tok::Int(word.parse().unwrap()), line, col));
                } else {
                    // Labels like 5' or 9.2 start with a digit.
                    toks.push((Tok::Ident(word.to_string()), line, col));
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric()
                        || matches!(bytes[i] as char, '_' | '.' | '\''))
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), line, col));
                continue;
            }
            let rest = &text[i..];
            let mut matched = false;
            for p in PUNCTS {
                if rest.starts_with(p) {
                    toks.push((Tok::Punct(p), line, col));
                    i += p.len();
                    matched = true;
                    break;
                }
            }
            if !matched {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn loc(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((0, 0))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.loc();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Punct(q)) if q == p => Ok(()),
            other => self.err(format!("expected `{p}`, found {other:?}")),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            Some(Tok::Int(n)) => Ok(n.to_string()),
            other => self.err(format!("expected identifier, found {other:?}")),
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if let Some(Tok::Punct(q)) = self.peek() {
            if *q == p {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == kw {
                self.pos += 1;
                return true;
            }
        }
        false
    }
}

struct Ctx {
    shared: BTreeSet<String>,
    inputs: BTreeSet<String>,
    locks: BTreeSet<String>,
}

/// Parse a program and validate it. The first validation diagnostic, if
/// any, is reported as an error.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut lx = lex(src)?;
    let mut prog = Program {
        shared_vars: Vec::new(),
        locks: Vec::new(),
        inputs: Vec::new(),
        threads: Vec::new(),
        entry: String::new(),
    };
    let mut ctx = Ctx { shared: BTreeSet::new(), inputs: BTreeSet::new(), locks: BTreeSet::new() };

    while let Some(tok) = lx.peek() {
        match tok {
            Tok::Ident(kw) if kw == "shared" => {
                lx.next();
                let name = lx.expect_ident()?;
                lx.expect_punct(":")?;
                let ty = lx.expect_ident()?;
                lx.expect_punct("=")?;
                let (width, nullable) = parse_type(&lx, &ty)?;
                let init = parse_val(&mut lx)?;
                ctx.shared.insert(name.clone());
                prog.shared_vars.push(SharedVarDecl { name, width, init, nullable });
            }
            Tok::Ident(kw) if kw == "lock" => {
                lx.next();
                let name = lx.expect_ident()?;
                ctx.locks.insert(name.clone());
                prog.locks.push(name);
            }
            Tok::Ident(kw) if kw == "input" => {
                lx.next();
                let name = lx.expect_ident()?;
                lx.expect_punct(":")?;
                let ty = lx.expect_ident()?;
                let (width, nullable) = parse_type(&lx, &ty)?;
                if nullable {
                    return lx.err("inputs must be integer typed");
                }
                ctx.inputs.insert(name.clone());
                prog.inputs.push(InputDecl { name, width });
            }
            Tok::Ident(kw) if kw == "thread" => {
                lx.next();
                let name = lx.expect_ident()?;
                lx.expect_punct("{")?;
                let body = parse_block(&mut lx, &ctx)?;
                if prog.entry.is_empty() {
                    prog.entry = name.clone();
                }
                prog.threads.push(ThreadDef { name, body });
            }
            _ => return lx.err("expected `shared`, `lock`, `input`, or `thread`"),
        }
    }

    let diags = validate(&prog);
    if let Some(d) = diags.first() {
        return Err(ParseError::Invalid(d.to_string()));
    }
    Ok(prog)
}

fn parse_type(lx: &Lexer, ty: &str) -> Result<(u8, bool), ParseError> {
    if ty == "ref" {
        return Ok((8, true));
    }
    if let Some(w) = ty.strip_prefix("int") {
        if let Ok(width) = w.parse::<u8>() {
            if (1..=32).contains(&width) {
                return Ok((width, false));
            }
        }
    }
    lx.err(format!("unknown type `{ty}` (expected intN or ref)"))
}

fn parse_val(lx: &mut Lexer) -> Result<Val, ParseError> {
    match lx.next() {
        Some(Tok::Int(n)) => Ok(Val::Int(n)),
        Some(Tok::Ident(s)) if s == "null" => Ok(Val::Null),
        other => lx.err(format!("expected integer or null, found {other:?}")),
    }
}

fn parse_block(lx: &mut Lexer, ctx: &Ctx) -> Result<Vec<Stmt>, ParseError> {
    let mut out = Vec::new();
    loop {
        if lx.eat_punct("}") {
            return Ok(out);
        }
        if lx.peek().is_none() {
            return lx.err("unexpected end of input inside block");
        }
        out.push(parse_stmt(lx, ctx)?);
    }
}

fn parse_stmt(lx: &mut Lexer, ctx: &Ctx) -> Result<Stmt, ParseError> {
    let label = lx.expect_ident()?;
    lx.expect_punct(":")?;
    let kind = if lx.eat_keyword("lock") {
        lx.expect_punct("(")?;
        let l = lx.expect_ident()?;
        lx.expect_punct(")")?;
        StmtKind::Lock(l)
    } else if lx.eat_keyword("unlock") {
        lx.expect_punct("(")?;
        let l = lx.expect_ident()?;
        lx.expect_punct(")")?;
        StmtKind::Unlock(l)
    } else if lx.eat_keyword("spawn") {
        StmtKind::Spawn(lx.expect_ident()?)
    } else if lx.eat_keyword("join") {
        StmtKind::Join(lx.expect_ident()?)
    } else if lx.eat_keyword("branch") {
        lx.expect_punct("(")?;
        let cond = parse_cond(lx, ctx)?;
        lx.expect_punct(")")?;
        lx.expect_punct("{")?;
        let then_block = parse_block(lx, ctx)?;
        let else_block = if lx.eat_keyword("else") {
            lx.expect_punct("{")?;
            parse_block(lx, ctx)?
        } else {
            Vec::new()
        };
        StmtKind::Branch { cond, then_block, else_block }
    } else if lx.eat_keyword("loop") {
        lx.expect_punct("(")?;
        let cond = parse_cond(lx, ctx)?;
        lx.expect_punct(")")?;
        lx.expect_punct("{")?;
        let body = parse_block(lx, ctx)?;
        StmtKind::Loop { cond, body }
    } else if lx.eat_keyword("assert") {
        lx.expect_punct("(")?;
        let cond = parse_cond(lx, ctx)?;
        lx.expect_punct(")")?;
        StmtKind::Assert(cond)
    } else {
        // Assignment forms: lhs = ...
        let lhs = lx.expect_ident()?;
        lx.expect_punct("=")?;
        if ctx.shared.contains(&lhs) {
            let expr = parse_vexpr(lx, ctx)?;
            StmtKind::WriteShared { var: lhs, expr }
        } else if lx.eat_keyword("deref") {
            lx.expect_punct("(")?;
            let var = lx.expect_ident()?;
            lx.expect_punct(")")?;
            StmtKind::Deref { local: lhs, var }
        } else {
            // A bare shared-variable name on the rhs is a shared read;
            // anything else is a local computation.
            let save = lx.pos;
            if let Some(Tok::Ident(name)) = lx.peek() {
                let name = name.clone();
                if ctx.shared.contains(&name) {
                    lx.next();
                    if matches!(lx.peek(), Some(Tok::Punct(p)) if matches!(*p, "+" | "-" | "*")) {
                        return lx
                            .err("shared variables may only appear alone on the right-hand side");
                    }
                    return Ok(Stmt { label, kind: StmtKind::ReadShared { local: lhs, var: name } });
                }
            }
            lx.pos = save;
            let expr = parse_vexpr(lx, ctx)?;
            StmtKind::Assign { local: lhs, expr }
        }
    };
    Ok(Stmt { label, kind })
}

fn parse_atom(lx: &mut Lexer, ctx: &Ctx) -> Result<Atom, ParseError> {
    match lx.next() {
        Some(Tok::Int(n)) => Ok(Atom::Const(Val::Int(n))),
        Some(Tok::Ident(s)) if s == "null" => Ok(Atom::Const(Val::Null)),
        Some(Tok::Ident(s)) => {
            if ctx.inputs.contains(&s) {
                Ok(Atom::Input(s))
            } else {
                Ok(Atom::Local(s))
            }
        }
        other => lx.err(format!("expected value atom, found {other:?}")),
    }
}

fn parse_vexpr(lx: &mut Lexer, ctx: &Ctx) -> Result<VExpr, ParseError> {
    let a = parse_atom(lx, ctx)?;
    let op = match lx.peek() {
        Some(Tok::Punct("+")) => Some(ArithOp::Add),
        Some(Tok::Punct("-")) => Some(ArithOp::Sub),
        Some(Tok::Punct("*")) => Some(ArithOp::Mul),
        _ => None,
    };
    if let Some(op) = op {
        lx.next();
        let b = parse_atom(lx, ctx)?;
        Ok(VExpr::Arith(op, a, b))
    } else {
        Ok(VExpr::Atom(a))
    }
}

fn parse_cond(lx: &mut Lexer, ctx: &Ctx) -> Result<Cond, ParseError> {
    let mut lhs = parse_cond_term(lx, ctx)?;
    loop {
        if lx.eat_punct("&&") {
            let rhs = parse_cond_term(lx, ctx)?;
            lhs = Cond::And(Box::new(lhs), Box::new(rhs));
        } else if lx.eat_punct("||") {
            let rhs = parse_cond_term(lx, ctx)?;
            lhs = Cond::Or(Box::new(lhs), Box::new(rhs));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_cond_term(lx: &mut Lexer, ctx: &Ctx) -> Result<Cond, ParseError> {
    if lx.eat_punct("!") {
        lx.expect_punct("(")?;
        let inner = parse_cond(lx, ctx)?;
        lx.expect_punct(")")?;
        return Ok(Cond::Not(Box::new(inner)));
    }
    if lx.eat_punct("(") {
        let inner = parse_cond(lx, ctx)?;
        lx.expect_punct(")")?;
        return Ok(inner);
    }
    let a = parse_vexpr(lx, ctx)?;
    let op = match lx.next() {
        Some(Tok::Punct("==")) => CmpOp::Eq,
        Some(Tok::Punct("!=")) => CmpOp::Ne,
        Some(Tok::Punct("<")) => CmpOp::Lt,
        Some(Tok::Punct("<=")) => CmpOp::Le,
        Some(Tok::Punct(">")) => CmpOp::Gt,
        Some(Tok::Punct(">=")) => CmpOp::Ge,
        other => return lx.err(format!("expected comparison operator, found {other:?}")),
    };
    let b = parse_vexpr(lx, ctx)?;
    Ok(Cond::Cmp(a, op, b))
}

/// Parse a fix-patch file: one edit per line.
///
/// ```text
/// insert lock(l1) before 5
/// insert unlock(l1) after 7
/// remove 5'
/// move 8 before 10
/// ```
pub fn parse_fix_patch(src: &str) -> Result<FixPatch, ParseError> {
    let mut edits = Vec::new();
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
        let words: Vec<&str> = text.split_whitespace().collect();
        let syntax = |msg: &str| ParseError::Syntax { line, col: 1, msg: msg.into() };
        match words[0] {
            "insert" => {
                if words.len() != 4 {
                    return Err(syntax("expected `insert lock(L) before|after LABEL`"));
                }
                let (what, lock) = parse_sync_ref(words[1])
                    .ok_or_else(|| syntax("expected lock(L) or unlock(L)"))?;
                let anchor = parse_anchor(words[2], words[3])
                    .ok_or_else(|| syntax("expected before|after LABEL"))?;
                edits.push(if what == "lock" {
                    Edit::InsertLock { lock, anchor }
                } else {
                    Edit::InsertUnlock { lock, anchor }
                });
            }
            "remove" => {
                if words.len() != 2 {
                    return Err(syntax("expected `remove LABEL`"));
                }
                edits.push(Edit::RemoveSync { label: words[1].to_string() });
            }
            "move" => {
                if words.len() != 4 {
                    return Err(syntax("expected `move LABEL before|after LABEL`"));
                }
                let anchor = parse_anchor(words[2], words[3])
                    .ok_or_else(|| syntax("expected before|after LABEL"))?;
                edits.push(Edit::MoveSync { label: words[1].to_string(), anchor });
            }
            other => return Err(syntax(&format!("unknown edit `{other}`"))),
        }
    }
    Ok(FixPatch { edits })
}

fn parse_sync_ref(word: &str) -> Option<(&'static str, String)> {
    let inner = word.strip_suffix(')')?;
    if let Some(l) = inner.strip_prefix("lock(") {
        return Some(("lock", l.to_string()));
    }
    if let Some(l) = inner.strip_prefix("unlock(") {
        return Some(("unlock", l.to_string()));
    }
    None
}

fn parse_anchor(kind: &str, label: &str) -> Option<Anchor> {
    match kind {
        "before" => Some(Anchor::Before(label.to_string())),
        "after" => Some(Anchor::After(label.to_string())),
        _ => None,
    }
}

/// Parse a region-spec file.
///
/// ```text
/// unit = 6 7
/// locations = p
/// pattern = case1    # optional
/// ```
pub fn parse_region_spec(src: &str) -> Result<AtomicRegionSpec, ParseError> {
    let mut unit = Vec::new();
    let mut locations = BTreeSet::new();
    let mut pattern = None;
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
        let (key, value) = text.split_once('=').ok_or(ParseError::Syntax {
            line,
            col: 1,
            msg: "expected `key = value`".into(),
        })?;
        let values: Vec<String> = value.split_whitespace().map(|s| s.to_string()).collect();
        match key.trim() {
            "unit" => unit = values,
            "locations" => locations = values.into_iter().collect(),
            "pattern" => {
                let v = values.first().cloned().unwrap_or_default();
                let n = v.strip_prefix("case").and_then(|n| n.parse::<u8>().ok());
                match n {
                    Some(n) if (1..=7).contains(&n) => pattern = Some(n),
                    _ => {
                        return Err(ParseError::Syntax {
                            line,
                            col: 1,
                            msg: format!("unknown pattern `{v}` (expected case1..case7)"),
                        })
                    }
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col: 1,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }
    if unit.is_empty() {
        return Err(ParseError::Invalid("region spec has an empty unit".into()));
    }
    if locations.is_empty() {
        return Err(ParseError::Invalid("region spec has no locations".into()));
    }
    Ok(AtomicRegionSpec { unit, locations, pattern })
}
