//! Formulas over order variables and value variables, plus models.
//!
//! Order variables denote positions of trace events in a candidate schedule
//! (the implicit initial write sits at the fixed origin 0). Value variables
//! denote symbolic inputs, read results, written values, and pre-write
//! values. Only comparisons between order variables appear, so shifting a
//! model's order values preserves satisfaction.

use std::collections::BTreeMap;
use std::fmt;

use crate::ir::{mask, ArithOp, CmpOp, Val};
use crate::trace::VarId;

/// A symbolic value- or boolean-valued term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymTerm {
    Var(VarId),
    Const(Val),
    Arith(ArithOp, Box<SymTerm>, Box<SymTerm>),
    Cmp(CmpOp, Box<SymTerm>, Box<SymTerm>),
    And(Box<SymTerm>, Box<SymTerm>),
    Or(Box<SymTerm>, Box<SymTerm>),
    Not(Box<SymTerm>),
}

impl SymTerm {
    pub fn cmp(op: CmpOp, a: SymTerm, b: SymTerm) -> SymTerm {
        SymTerm::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn vars(&self, out: &mut Vec<VarId>) {
        match self {
            SymTerm::Var(v) => out.push(*v),
            SymTerm::Const(_) => {}
            SymTerm::Arith(_, a, b) | SymTerm::Cmp(_, a, b) | SymTerm::And(a, b)
            | SymTerm::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            SymTerm::Not(a) => a.vars(out),
        }
    }

    pub fn to_sexp(&self) -> String {
        match self {
            SymTerm::Var(v) => format!("R{v}"),
            SymTerm::Const(Val::Null) => "null".into(),
            SymTerm::Const(Val::Int(n)) => n.to_string(),
            SymTerm::Arith(op, a, b) => {
                let s = match op {
                    ArithOp::Add => "+",
                    ArithOp::Sub => "-",
                    ArithOp::Mul => "*",
                };
                format!("({s} {} {})", a.to_sexp(), b.to_sexp())
            }
            SymTerm::Cmp(op, a, b) => {
                let s = match op {
                    CmpOp::Eq => "==",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                format!("({s} {} {})", a.to_sexp(), b.to_sexp())
            }
            SymTerm::And(a, b) => format!("(&& {} {})", a.to_sexp(), b.to_sexp()),
            SymTerm::Or(a, b) => format!("(|| {} {})", a.to_sexp(), b.to_sexp()),
            SymTerm::Not(a) => format!("(! {})", a.to_sexp()),
        }
    }

    pub fn from_sexp(src: &str) -> Result<SymTerm, String> {
        let mut toks = Vec::new();
        let mut cur = String::new();
        for c in src.chars() {
            match c {
                '(' | ')' => {
                    if !cur.is_empty() {
                        toks.push(std::mem::take(&mut cur));
                    }
                    toks.push(c.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        toks.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            toks.push(cur);
        }
        let mut pos = 0;
        let t = parse_sexp(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err("trailing tokens".into());
        }
        Ok(t)
    }
}

fn parse_sexp(toks: &[String], pos: &mut usize) -> Result<SymTerm, String> {
    let tok = toks.get(*pos).ok_or("unexpected end of sexp")?.clone();
    *pos += 1;
    if tok != "(" {
        return atom_from_str(&tok);
    }
    let op = toks.get(*pos).ok_or("missing operator")?.clone();
    *pos += 1;
    if op == "!" {
        let a = parse_sexp(toks, pos)?;
        expect_close(toks, pos)?;
        return Ok(SymTerm::Not(Box::new(a)));
    }
    let a = parse_sexp(toks, pos)?;
    let b = parse_sexp(toks, pos)?;
    finish_binop(&op, a, b, toks, pos)
}

fn finish_binop(
    op: &str,
    a: SymTerm,
    b: SymTerm,
    toks: &[String],
    pos: &mut usize,
) -> Result<SymTerm, String> {
    let t = match op {
        "+" => SymTerm::Arith(ArithOp::Add, Box::new(a), Box::new(b)),
        "-" => SymTerm::Arith(ArithOp::Sub, Box::new(a), Box::new(b)),
        "*" => SymTerm::Arith(ArithOp::Mul, Box::new(a), Box::new(b)),
        "==" => SymTerm::cmp(CmpOp::Eq, a, b),
        "!=" => SymTerm::cmp(CmpOp::Ne, a, b),
        "<" => SymTerm::cmp(CmpOp::Lt, a, b),
        "<=" => SymTerm::cmp(CmpOp::Le, a, b),
        ">" => SymTerm::cmp(CmpOp::Gt, a, b),
        ">=" => SymTerm::cmp(CmpOp::Ge, a, b),
        "&&" => SymTerm::And(Box::new(a), Box::new(b)),
        "||" => SymTerm::Or(Box::new(a), Box::new(b)),
        other => return Err(format!("unknown operator `{other}`")),
    };
    expect_close(toks, pos)?;
    Ok(t)
}

fn expect_close(toks: &[String], pos: &mut usize) -> Result<(), String> {
    if toks.get(*pos).map(|s| s.as_str()) != Some(")") {
        return Err("expected `)`".into());
    }
    *pos += 1;
    Ok(())
}

fn atom_from_str(s: &str) -> Result<SymTerm, String> {
    if s == "null" {
        return Ok(SymTerm::Const(Val::Null));
    }
    if let Some(v) = s.strip_prefix('R') {
        if let Ok(id) = v.parse::<VarId>() {
            return Ok(SymTerm::Var(id));
        }
    }
    s.parse::<u64>()
        .map(|n| SymTerm::Const(Val::Int(n)))
        .map_err(|_| format!("bad atom `{s}`"))
}

/// What a value variable stands for; used for naming and width lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub width: u8,
    pub nullable: bool,
    pub is_input: bool,
}

/// Symbol table for the value variables of one trace/formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarTable {
    pub infos: BTreeMap<VarId, VarInfo>,
}

impl VarTable {
    pub fn insert(&mut self, id: VarId, info: VarInfo) {
        self.infos.insert(id, info);
    }

    pub fn get(&self, id: VarId) -> Option<&VarInfo> {
        self.infos.get(&id)
    }

    pub fn name(&self, id: VarId) -> String {
        self.get(id).map(|i| i.name.clone()).unwrap_or_else(|| format!("R{id}"))
    }

    pub fn width(&self, id: VarId) -> u8 {
        self.get(id).map(|i| i.width).unwrap_or(8)
    }

    pub fn fresh(&mut self, info: VarInfo) -> VarId {
        let id = self.infos.keys().max().map(|m| m + 1).unwrap_or(0);
        self.infos.insert(id, info);
        id
    }

    pub fn input_ids(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> =
            self.infos.iter().filter(|(_, i)| i.is_input).map(|(id, _)| *id).collect();
        v.sort();
        v
    }
}

/// An order-variable term: a trace event (by index) or the fixed origin 0
/// carried by the implicit initial write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrdTerm {
    Origin,
    Ev(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    OrdLt(OrdTerm, OrdTerm),
    OrdLe(OrdTerm, OrdTerm),
    /// Pairwise-distinct side constraint over event order variables.
    OrdDistinct(Vec<usize>),
    Cmp(CmpOp, SymTerm, SymTerm),
}

impl Formula {
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::True,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::False,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    /// `a < b` over order variables, simplifying origin comparisons
    /// (every event has order >= 1 > origin).
    pub fn ord_lt(a: OrdTerm, b: OrdTerm) -> Formula {
        match (a, b) {
            (OrdTerm::Origin, OrdTerm::Ev(_)) => Formula::True,
            (OrdTerm::Ev(_), OrdTerm::Origin) => Formula::False,
            (OrdTerm::Origin, OrdTerm::Origin) => Formula::False,
            (a, b) if a == b => Formula::False,
            (a, b) => Formula::OrdLt(a, b),
        }
    }

    /// Lift a boolean symbolic term (a branch condition) into a formula.
    pub fn from_bool_term(t: &SymTerm) -> Formula {
        match t {
            SymTerm::Cmp(op, a, b) => Formula::Cmp(*op, (**a).clone(), (**b).clone()),
            SymTerm::And(a, b) => {
                Formula::and(vec![Formula::from_bool_term(a), Formula::from_bool_term(b)])
            }
            SymTerm::Or(a, b) => {
                Formula::or(vec![Formula::from_bool_term(a), Formula::from_bool_term(b)])
            }
            SymTerm::Not(a) => Formula::not(Formula::from_bool_term(a)),
            // A bare value term in boolean position never arises from the
            // interpreter; treat as a type error surfaced as False.
            _ => Formula::False,
        }
    }

    pub fn value_vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_value_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_value_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_value_vars(out);
                }
            }
            Formula::Not(f) => f.collect_value_vars(out),
            Formula::Cmp(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            _ => {}
        }
    }

    pub fn ord_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_ord_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_ord_vars(&self, out: &mut Vec<usize>) {
        match self {
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_ord_vars(out);
                }
            }
            Formula::Not(f) => f.collect_ord_vars(out),
            Formula::OrdLt(a, b) | Formula::OrdLe(a, b) => {
                for t in [a, b] {
                    if let OrdTerm::Ev(i) = t {
                        out.push(*i);
                    }
                }
            }
            Formula::OrdDistinct(evs) => out.extend(evs.iter().copied()),
            _ => {}
        }
    }

    /// Pretty form using the symbol table's variable names.
    pub fn display<'a>(&'a self, table: &'a VarTable, labels: &'a BTreeMap<usize, String>) -> String {
        match self {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::And(fs) => {
                let parts: Vec<String> =
                    fs.iter().map(|f| format!("({})", f.display(table, labels))).collect();
                parts.join(" && ")
            }
            Formula::Or(fs) => {
                let parts: Vec<String> =
                    fs.iter().map(|f| format!("({})", f.display(table, labels))).collect();
                parts.join(" || ")
            }
            Formula::Not(f) => format!("!({})", f.display(table, labels)),
            Formula::OrdLt(a, b) => {
                format!("{} < {}", ord_name(a, labels), ord_name(b, labels))
            }
            Formula::OrdLe(a, b) => {
                format!("{} <= {}", ord_name(a, labels), ord_name(b, labels))
            }
            Formula::OrdDistinct(evs) => {
                let names: Vec<String> =
                    evs.iter().map(|e| ord_name(&OrdTerm::Ev(*e), labels)).collect();
                format!("distinct({})", names.join(", "))
            }
            Formula::Cmp(op, a, b) => {
                let sym = match op {
                    CmpOp::Eq => "==",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                format!("{} {sym} {}", term_name(a, table), term_name(b, table))
            }
        }
    }
}

fn ord_name(t: &OrdTerm, labels: &BTreeMap<usize, String>) -> String {
    match t {
        OrdTerm::Origin => "O_init".into(),
        OrdTerm::Ev(i) => labels
            .get(i)
            .map(|l| format!("O_{l}"))
            .unwrap_or_else(|| format!("O#{i}")),
    }
}

fn term_name(t: &SymTerm, table: &VarTable) -> String {
    match t {
        SymTerm::Var(v) => table.name(*v),
        SymTerm::Const(v) => v.to_string(),
        SymTerm::Arith(op, a, b) => {
            let s = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => "*",
            };
            format!("({} {s} {})", term_name(a, table), term_name(b, table))
        }
        SymTerm::Cmp(op, a, b) => {
            let s = match op {
                CmpOp::Eq => "==",
                CmpOp::Ne => "!=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            format!("({} {s} {})", term_name(a, table), term_name(b, table))
        }
        SymTerm::And(a, b) => format!("({} && {})", term_name(a, table), term_name(b, table)),
        SymTerm::Or(a, b) => format!("({} || {})", term_name(a, table), term_name(b, table)),
        SymTerm::Not(a) => format!("!({})", term_name(a, table)),
    }
}

/// A model: order positions per event plus concrete values per value var.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub ord: BTreeMap<usize, u64>,
    pub vals: BTreeMap<VarId, Val>,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ev, pos) in &self.ord {
            write!(f, "O#{ev}={pos} ")?;
        }
        for (v, val) in &self.vals {
            write!(f, "R{v}={val} ")?;
        }
        Ok(())
    }
}

/// Widest variable underneath a term; 0 when only constants appear.
fn term_width(t: &SymTerm, table: &VarTable) -> u8 {
    match t {
        SymTerm::Var(v) => table.width(*v),
        SymTerm::Const(_) => 0,
        SymTerm::Arith(_, a, b) | SymTerm::Cmp(_, a, b) | SymTerm::And(a, b)
        | SymTerm::Or(a, b) => term_width(a, table).max(term_width(b, table)),
        SymTerm::Not(a) => term_width(a, table),
    }
}

/// Width a comparison evaluates at: the widest variable on either side,
/// defaulting to 8 for constant-only atoms. The interpreter applies the
/// same rule, so recorded conditions and their encodings agree.
fn cmp_width(w: u8) -> u8 {
    if w == 0 {
        8
    } else {
        w
    }
}

/// Evaluate a value term to a concrete value under `lookup`, with
/// arithmetic wrapping at `width` bits. Null propagates through arithmetic.
pub fn eval_value_term(
    t: &SymTerm,
    width: u8,
    lookup: &dyn Fn(VarId) -> Option<Val>,
) -> Option<Val> {
    match t {
        SymTerm::Var(v) => lookup(*v),
        SymTerm::Const(Val::Int(n)) => Some(Val::Int(mask(*n, width))),
        SymTerm::Const(Val::Null) => Some(Val::Null),
        SymTerm::Arith(op, a, b) => {
            let av = eval_value_term(a, width, lookup)?;
            let bv = eval_value_term(b, width, lookup)?;
            match (av, bv) {
                (Val::Int(x), Val::Int(y)) => {
                    let r = match op {
                        ArithOp::Add => x.wrapping_add(y),
                        ArithOp::Sub => x.wrapping_sub(y),
                        ArithOp::Mul => x.wrapping_mul(y),
                    };
                    Some(Val::Int(mask(r, width)))
                }
                _ => Some(Val::Null),
            }
        }
        // Boolean nodes in value position: type confusion, reject.
        _ => None,
    }
}

pub fn eval_cmp(op: CmpOp, a: Val, b: Val) -> bool {
    // Values are totally ordered with null as the bottom element, so
    // comparison negation identities hold unconditionally.
    match (a, b) {
        (Val::Null, Val::Null) => matches!(op, CmpOp::Eq | CmpOp::Le | CmpOp::Ge),
        (Val::Null, Val::Int(_)) => matches!(op, CmpOp::Ne | CmpOp::Lt | CmpOp::Le),
        (Val::Int(_), Val::Null) => matches!(op, CmpOp::Ne | CmpOp::Gt | CmpOp::Ge),
        (Val::Int(x), Val::Int(y)) => match op {
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
            CmpOp::Lt => x < y,
            CmpOp::Le => x <= y,
            CmpOp::Gt => x > y,
            CmpOp::Ge => x >= y,
        },
    }
}

/// Evaluate a boolean symbolic term (branch condition) under `lookup`.
pub fn eval_bool_term(
    t: &SymTerm,
    table: &VarTable,
    lookup: &dyn Fn(VarId) -> Option<Val>,
) -> Option<bool> {
    match t {
        SymTerm::Cmp(op, a, b) => {
            let w = cmp_width(term_width(t, table));
            let av = eval_value_term(a, w, lookup)?;
            let bv = eval_value_term(b, w, lookup)?;
            Some(eval_cmp(*op, av, bv))
        }
        SymTerm::And(a, b) => {
            Some(eval_bool_term(a, table, lookup)? && eval_bool_term(b, table, lookup)?)
        }
        SymTerm::Or(a, b) => {
            Some(eval_bool_term(a, table, lookup)? || eval_bool_term(b, table, lookup)?)
        }
        SymTerm::Not(a) => Some(!eval_bool_term(a, table, lookup)?),
        _ => None,
    }
}

/// Evaluate a formula under a model. `None` means the model does not cover
/// every variable the formula mentions.
pub fn eval_formula(f: &Formula, model: &Model, table: &VarTable) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::And(fs) => {
            for f in fs {
                if !eval_formula(f, model, table)? {
                    return Some(false);
                }
            }
            Some(true)
        }
        Formula::Or(fs) => {
            for f in fs {
                if eval_formula(f, model, table)? {
                    return Some(true);
                }
            }
            Some(false)
        }
        Formula::Not(f) => Some(!eval_formula(f, model, table)?),
        Formula::OrdLt(a, b) => Some(ord_val(a, model)? < ord_val(b, model)?),
        Formula::OrdLe(a, b) => Some(ord_val(a, model)? <= ord_val(b, model)?),
        Formula::OrdDistinct(evs) => {
            let mut seen = std::collections::BTreeSet::new();
            for e in evs {
                if !seen.insert(ord_val(&OrdTerm::Ev(*e), model)?) {
                    return Some(false);
                }
            }
            Some(true)
        }
        Formula::Cmp(op, a, b) => {
            let w = cmp_width(term_width(a, table).max(term_width(b, table)));
            let lookup = |v: VarId| model.vals.get(&v).copied();
            let av = eval_value_term(a, w, &lookup)?;
            let bv = eval_value_term(b, w, &lookup)?;
            Some(eval_cmp(*op, av, bv))
        }
    }
}

fn ord_val(t: &OrdTerm, model: &Model) -> Option<u64> {
    match t {
        OrdTerm::Origin => Some(0),
        OrdTerm::Ev(i) => model.ord.get(i).copied(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sexp_round_trip() {
        let t = SymTerm::cmp(
            CmpOp::Ne,
            SymTerm::Arith(
                ArithOp::Add,
                Box::new(SymTerm::Var(3)),
                Box::new(SymTerm::Const(Val::Int(1))),
            ),
            SymTerm::Const(Val::Null),
        );
        let s = t.to_sexp();
        assert_eq!(SymTerm::from_sexp(&s).unwrap(), t);
    }

    #[test]
    fn origin_comparisons_simplify() {
        assert_eq!(Formula::ord_lt(OrdTerm::Origin, OrdTerm::Ev(4)), Formula::True);
        assert_eq!(Formula::ord_lt(OrdTerm::Ev(4), OrdTerm::Origin), Formula::False);
    }

    #[test]
    fn wrapping_arithmetic_masks_to_width() {
        let mut table = VarTable::default();
        table.insert(0, VarInfo { name: "x".into(), width: 4, nullable: false, is_input: true });
        let model = Model {
            ord: BTreeMap::new(),
            vals: [(0, Val::Int(15))].into_iter().collect(),
        };
        // 15 + 1 wraps to 0 at 4 bits.
        let f = Formula::Cmp(
            CmpOp::Eq,
            SymTerm::Arith(
                ArithOp::Add,
                Box::new(SymTerm::Var(0)),
                Box::new(SymTerm::Const(Val::Int(1))),
            ),
            SymTerm::Const(Val::Int(0)),
        );
        assert_eq!(eval_formula(&f, &model, &table), Some(true));
    }

    #[test]
    fn null_is_the_bottom_of_the_value_order() {
        assert!(eval_cmp(CmpOp::Ne, Val::Null, Val::Int(0)));
        assert!(!eval_cmp(CmpOp::Eq, Val::Null, Val::Int(0)));
        assert!(eval_cmp(CmpOp::Eq, Val::Null, Val::Null));
        assert!(eval_cmp(CmpOp::Lt, Val::Null, Val::Int(5)));
        assert!(!eval_cmp(CmpOp::Lt, Val::Int(5), Val::Null));
        assert!(!eval_cmp(CmpOp::Lt, Val::Null, Val::Null));
        assert!(eval_cmp(CmpOp::Le, Val::Null, Val::Null));
    }

    #[test]
    fn distinct_detects_collisions() {
        let f = Formula::OrdDistinct(vec![1, 2]);
        let mut m = Model::default();
        m.ord.insert(1, 3);
        m.ord.insert(2, 3);
        assert_eq!(eval_formula(&f, &m, &VarTable::default()), Some(false));
        m.ord.insert(2, 4);
        assert_eq!(eval_formula(&f, &m, &VarTable::default()), Some(true));
    }
}
