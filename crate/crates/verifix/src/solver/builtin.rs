//! Built-in deterministic search engine.
//!
//! Complete backtracking search: disjunctions are resolved DPLL-style with
//! unit propagation, order atoms go into an incremental precedence graph
//! (cycle-checked), and value atoms prune per-variable finite domains.
//! Deterministic by construction: choice points are scanned in formula
//! order, domains are enumerated ascending (null first for nullable vars),
//! and the order model is the lexicographically smallest topological
//! order. Exceeding the node budget yields Unknown, never a wrong answer.

use std::collections::{BTreeMap, BTreeSet};

use super::{to_nnf, var_domain, Budget, SolverResult, UnknownReason};
use crate::formula::{eval_cmp, eval_value_term, Formula, Model, OrdTerm, VarTable};
use crate::ir::{CmpOp, Val};
use crate::trace::VarId;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Dom {
    null: bool,
    bits: Vec<u64>,
    size: u64,
}

impl Dom {
    fn full(size: u64, nullable: bool) -> Dom {
        let words = size.div_ceil(64) as usize;
        let mut bits = vec![u64::MAX; words];
        let tail = size % 64;
        if tail != 0 {
            if let Some(last) = bits.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        Dom { null: nullable, bits, size }
    }

    fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum::<u64>() + self.null as u64
    }

    fn is_empty(&self) -> bool {
        !self.null && self.bits.iter().all(|w| *w == 0)
    }

    /// Values in enumeration order: null first, then ints ascending.
    fn values(&self) -> impl Iterator<Item = Val> + '_ {
        let null = if self.null { Some(Val::Null) } else { None };
        null.into_iter().chain(
            (0..self.size).filter(move |n| {
                (self.bits[(n / 64) as usize] >> (n % 64)) & 1 == 1
            }).map(Val::Int),
        )
    }

    fn singleton(&self) -> Option<Val> {
        if self.count() == 1 {
            self.values().next()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
struct ValAtom {
    op: CmpOp,
    lhs: crate::formula::SymTerm,
    rhs: crate::formula::SymTerm,
    vars: Vec<VarId>,
    width: u8,
}

#[derive(Debug, Clone)]
struct State {
    /// Precedence edges (a, b, strict): a before b.
    edges: Vec<(usize, usize, bool)>,
    doms: BTreeMap<VarId, Dom>,
    atoms: Vec<ValAtom>,
    ors: Vec<Formula>,
    distinct: bool,
    ord_vars: BTreeSet<usize>,
}

struct Search<'a> {
    table: &'a VarTable,
    budget: &'a Budget,
    nodes: usize,
    exhausted: Option<UnknownReason>,
}

pub(crate) fn solve(f: &Formula, table: &VarTable, budget: &Budget) -> SolverResult {
    let nnf = to_nnf(f, false);
    let mut st = State {
        edges: Vec::new(),
        doms: BTreeMap::new(),
        atoms: Vec::new(),
        ors: Vec::new(),
        distinct: false,
        ord_vars: f.ord_vars().into_iter().collect(),
    };
    for v in f.value_vars() {
        let (size, nullable) = var_domain(table, v);
        st.doms.insert(v, Dom::full(size, nullable));
    }
    let mut search = Search { table, budget, nodes: 0, exhausted: None };
    if !assert_formula(&mut st, &nnf) {
        return SolverResult::Unsat;
    }
    match search.run(st) {
        Some(model) => SolverResult::Sat(model),
        None => match search.exhausted {
            Some(reason) => SolverResult::Unknown(reason),
            None => SolverResult::Unsat,
        },
    }
}

/// Assert a (NNF) formula into the state. Returns false on an immediate
/// conflict.
fn assert_formula(st: &mut State, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::And(fs) => fs.iter().all(|g| assert_formula(st, g)),
        Formula::Or(_) => {
            st.ors.push(f.clone());
            true
        }
        Formula::Not(_) => unreachable!("input is in NNF"),
        Formula::OrdLt(a, b) => assert_ord(st, *a, *b, true),
        Formula::OrdLe(a, b) => assert_ord(st, *a, *b, false),
        Formula::OrdDistinct(evs) => {
            st.distinct = true;
            st.ord_vars.extend(evs.iter().copied());
            // Any existing pure-Le cycle is now a conflict; recheck lazily.
            !has_conflict_cycle(st)
        }
        Formula::Cmp(op, a, b) => {
            let mut vars = Vec::new();
            a.vars(&mut vars);
            b.vars(&mut vars);
            vars.sort();
            vars.dedup();
            let width = vars
                .iter()
                .map(|v| st.doms.get(v).map(|d| width_of_size(d.size)).unwrap_or(8))
                .max()
                .filter(|w| *w > 0)
                .unwrap_or(8);
            st.atoms.push(ValAtom { op: *op, lhs: a.clone(), rhs: b.clone(), vars, width });
            true
        }
    }
}

fn width_of_size(size: u64) -> u8 {
    (63 - size.leading_zeros().min(63)) as u8
}

fn assert_ord(st: &mut State, a: OrdTerm, b: OrdTerm, strict: bool) -> bool {
    match (a, b) {
        (OrdTerm::Origin, OrdTerm::Origin) => !strict,
        (OrdTerm::Origin, OrdTerm::Ev(_)) => true,
        (OrdTerm::Ev(_), OrdTerm::Origin) => false,
        (OrdTerm::Ev(x), OrdTerm::Ev(y)) => {
            if x == y {
                return !strict;
            }
            st.ord_vars.insert(x);
            st.ord_vars.insert(y);
            st.edges.push((x, y, strict));
            // Conflict iff the new edge closes a forbidden cycle.
            let (reaches, via_strict) = reach(st, y, x);
            if !reaches {
                return true;
            }
            !(strict || via_strict || st.distinct)
        }
    }
}

/// Reachability from `from` to `to`: (any path, any path through a strict
/// edge or starting total-order distinctness aside).
fn reach(st: &State, from: usize, to: usize) -> (bool, bool) {
    let mut adj: BTreeMap<usize, Vec<(usize, bool)>> = BTreeMap::new();
    for (a, b, s) in &st.edges {
        adj.entry(*a).or_default().push((*b, *s));
    }
    // States: (node, seen_strict).
    let mut visited = BTreeSet::new();
    let mut stack = vec![(from, false)];
    let mut any = false;
    let mut strict = false;
    while let Some((n, s)) = stack.pop() {
        if !visited.insert((n, s)) {
            continue;
        }
        if n == to {
            any = true;
            if s {
                strict = true;
                break;
            }
            // Keep exploring: a strict path may still exist.
        }
        for (m, es) in adj.get(&n).into_iter().flatten() {
            stack.push((*m, s || *es));
        }
    }
    (any, strict)
}

fn has_conflict_cycle(st: &State) -> bool {
    // Under distinct, any cycle is a conflict; otherwise only cycles with a
    // strict edge are.
    for (a, b, s) in &st.edges {
        let (back, back_strict) = reach(st, *b, *a);
        if back && (*s || back_strict || st.distinct) {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    True,
    False,
    Open,
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.nodes {
            self.exhausted = Some(UnknownReason::Budget);
            return false;
        }
        if self.nodes.is_multiple_of(512) && self.budget.expired() {
            self.exhausted = Some(UnknownReason::Timeout);
            return false;
        }
        true
    }

    fn run(&mut self, mut st: State) -> Option<Model> {
        if !self.tick() {
            return None;
        }
        if !propagate(&mut st, self.table) {
            return None;
        }
        // Unit-resolve disjunctions until fixpoint.
        loop {
            let mut acted = false;
            let mut i = 0;
            while i < st.ors.len() {
                let or = st.ors[i].clone();
                let parts = match &or {
                    Formula::Or(parts) => parts.clone(),
                    _ => unreachable!("ors holds Or nodes"),
                };
                let mut viable = Vec::new();
                let mut decided_true = false;
                for p in &parts {
                    match self.status(&st, p) {
                        Status::True => {
                            decided_true = true;
                            break;
                        }
                        Status::Open => viable.push(p.clone()),
                        Status::False => {}
                    }
                }
                if decided_true {
                    st.ors.remove(i);
                    acted = true;
                    continue;
                }
                match viable.len() {
                    0 => return None,
                    1 => {
                        st.ors.remove(i);
                        if !assert_formula(&mut st, &viable[0]) {
                            return None;
                        }
                        if !propagate(&mut st, self.table) {
                            return None;
                        }
                        acted = true;
                    }
                    _ => i += 1,
                }
            }
            if !acted {
                break;
            }
        }
        if st.ors.is_empty() {
            return self.assign_values(st);
        }
        // Branch on the disjunction with the fewest open disjuncts.
        let mut best: Option<(usize, Vec<Formula>)> = None;
        for (i, or) in st.ors.iter().enumerate() {
            let parts = match or {
                Formula::Or(parts) => parts,
                _ => unreachable!(),
            };
            let viable: Vec<Formula> = parts
                .iter()
                .filter(|p| self.status(&st, p) != Status::False)
                .cloned()
                .collect();
            if best.as_ref().map(|(_, v)| viable.len() < v.len()).unwrap_or(true) {
                best = Some((i, viable));
            }
        }
        let (idx, viable) = best.expect("nonempty ors");
        for choice in viable {
            let mut next = st.clone();
            next.ors.remove(idx);
            if !assert_formula(&mut next, &choice) {
                continue;
            }
            if let Some(model) = self.run(next) {
                return Some(model);
            }
            if self.exhausted.is_some() {
                return None;
            }
        }
        None
    }

    /// Enumerate remaining free value variables (ascending id, domain
    /// order) and finish with the canonical order assignment.
    fn assign_values(&mut self, st: State) -> Option<Model> {
        if !self.tick() {
            return None;
        }
        let free = st
            .doms
            .iter()
            .find(|(_, d)| d.count() > 1)
            .map(|(v, _)| *v);
        match free {
            None => {
                // All atoms must now be fully decided.
                for atom in &st.atoms {
                    if self.eval_atom(&st, atom) != Status::True {
                        return None;
                    }
                }
                self.extract(st)
            }
            Some(v) => {
                let dom = st.doms[&v].clone();
                for val in dom.values() {
                    let mut next = st.clone();
                    let d = next.doms.get_mut(&v).unwrap();
                    *d = Dom::full(d.size, false);
                    for w in d.bits.iter_mut() {
                        *w = 0;
                    }
                    d.null = false;
                    match val {
                        Val::Null => d.null = true,
                        Val::Int(n) => d.bits[(n / 64) as usize] |= 1 << (n % 64),
                    }
                    if !propagate(&mut next, self.table) {
                        continue;
                    }
                    if let Some(model) = self.assign_values(next) {
                        return Some(model);
                    }
                    if self.exhausted.is_some() {
                        return None;
                    }
                }
                None
            }
        }
    }

    fn extract(&mut self, st: State) -> Option<Model> {
        let mut model = Model::default();
        for (v, d) in &st.doms {
            model.vals.insert(*v, d.singleton().expect("assign_values fixed all domains"));
        }
        // Condense strongly connected components (possible only without
        // distinct, where Le-cycles mean equality), then assign positions
        // in smallest-member-first topological order.
        let nodes: Vec<usize> = st.ord_vars.iter().copied().collect();
        let scc = condense(&nodes, &st.edges);
        if st.distinct && scc.iter().any(|c| c.len() > 1) {
            return None;
        }
        // Strict self-inconsistency inside an SCC.
        for comp in &scc {
            for (a, b, s) in &st.edges {
                if *s && comp.contains(a) && comp.contains(b) {
                    return None;
                }
            }
        }
        let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
        for (ci, comp) in scc.iter().enumerate() {
            for n in comp {
                comp_of.insert(*n, ci);
            }
        }
        let mut succs: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        let mut indeg: BTreeMap<usize, usize> = (0..scc.len()).map(|c| (c, 0)).collect();
        for (a, b, _) in &st.edges {
            let (ca, cb) = (comp_of[a], comp_of[b]);
            if ca != cb && succs.entry(ca).or_default().insert(cb) {
                *indeg.get_mut(&cb).unwrap() += 1;
            }
        }
        let mut order = Vec::new();
        let mut ready: BTreeSet<(usize, usize)> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(c, _)| (*scc[*c].iter().min().unwrap(), *c))
            .collect();
        while let Some(&(key, c)) = ready.iter().next() {
            ready.remove(&(key, c));
            order.push(c);
            for s in succs.get(&c).cloned().unwrap_or_default() {
                let d = indeg.get_mut(&s).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert((*scc[s].iter().min().unwrap(), s));
                }
            }
        }
        if order.len() != scc.len() {
            return None; // residual cycle
        }
        for (pos, c) in order.iter().enumerate() {
            for n in &scc[*c] {
                model.ord.insert(*n, (pos + 1) as u64);
            }
        }
        Some(model)
    }

    fn eval_atom(&self, st: &State, atom: &ValAtom) -> Status {
        let lookup = |v: VarId| st.doms.get(&v).and_then(|d| d.singleton());
        let (Some(a), Some(b)) = (
            eval_value_term(&atom.lhs, atom.width, &lookup),
            eval_value_term(&atom.rhs, atom.width, &lookup),
        ) else {
            return Status::Open;
        };
        if eval_cmp(atom.op, a, b) {
            Status::True
        } else {
            Status::False
        }
    }

    /// Quick three-valued evaluation of a formula against the current
    /// state; used for disjunct viability.
    fn status(&self, st: &State, f: &Formula) -> Status {
        match f {
            Formula::True => Status::True,
            Formula::False => Status::False,
            Formula::And(fs) => {
                let mut all_true = true;
                for g in fs {
                    match self.status(st, g) {
                        Status::False => return Status::False,
                        Status::Open => all_true = false,
                        Status::True => {}
                    }
                }
                if all_true {
                    Status::True
                } else {
                    Status::Open
                }
            }
            Formula::Or(fs) => {
                let mut all_false = true;
                for g in fs {
                    match self.status(st, g) {
                        Status::True => return Status::True,
                        Status::Open => all_false = false,
                        Status::False => {}
                    }
                }
                if all_false {
                    Status::False
                } else {
                    Status::Open
                }
            }
            Formula::Not(_) => Status::Open,
            Formula::OrdLt(a, b) => self.ord_status(st, *a, *b, true),
            Formula::OrdLe(a, b) => self.ord_status(st, *a, *b, false),
            Formula::OrdDistinct(_) => {
                if st.distinct {
                    Status::True
                } else {
                    Status::Open
                }
            }
            Formula::Cmp(op, lhs, rhs) => {
                let mut vars = Vec::new();
                lhs.vars(&mut vars);
                rhs.vars(&mut vars);
                vars.sort();
                vars.dedup();
                let width = vars
                    .iter()
                    .map(|v| st.doms.get(v).map(|d| width_of_size(d.size)).unwrap_or(8))
                    .max()
                    .filter(|w| *w > 0)
                    .unwrap_or(8);
                let free: Vec<VarId> = vars
                    .iter()
                    .filter(|v| st.doms.get(v).map(|d| d.count() > 1).unwrap_or(false))
                    .copied()
                    .collect();
                let atom =
                    ValAtom { op: *op, lhs: lhs.clone(), rhs: rhs.clone(), vars, width };
                match free.len() {
                    0 => self.eval_atom(st, &atom),
                    1 => {
                        // Decided when every/no candidate satisfies it.
                        let v = free[0];
                        let dom = &st.doms[&v];
                        let mut any = false;
                        let mut all = true;
                        for cand in dom.values() {
                            let lookup = |x: VarId| {
                                if x == v {
                                    Some(cand)
                                } else {
                                    st.doms.get(&x).and_then(|d| d.singleton())
                                }
                            };
                            let (Some(a), Some(b)) = (
                                eval_value_term(&atom.lhs, atom.width, &lookup),
                                eval_value_term(&atom.rhs, atom.width, &lookup),
                            ) else {
                                return Status::Open;
                            };
                            if eval_cmp(atom.op, a, b) {
                                any = true;
                            } else {
                                all = false;
                            }
                        }
                        if !any {
                            Status::False
                        } else if all {
                            Status::True
                        } else {
                            Status::Open
                        }
                    }
                    _ => Status::Open,
                }
            }
        }
    }

    fn ord_status(&self, st: &State, a: OrdTerm, b: OrdTerm, strict: bool) -> Status {
        match (a, b) {
            (OrdTerm::Origin, OrdTerm::Origin) => {
                if strict {
                    Status::False
                } else {
                    Status::True
                }
            }
            (OrdTerm::Origin, OrdTerm::Ev(_)) => Status::True,
            (OrdTerm::Ev(_), OrdTerm::Origin) => Status::False,
            (OrdTerm::Ev(x), OrdTerm::Ev(y)) => {
                if x == y {
                    return if strict { Status::False } else { Status::True };
                }
                let (fwd, fwd_strict) = reach(st, x, y);
                let (bwd, bwd_strict) = reach(st, y, x);
                if strict {
                    // x < y: contradicted by any y->x path; implied by a
                    // strict x->y path (or any, under distinct).
                    if bwd {
                        return Status::False;
                    }
                    if fwd && (fwd_strict || st.distinct) {
                        return Status::True;
                    }
                } else {
                    // x <= y: contradicted by strict y->x (or any, under
                    // distinct); implied by any x->y path.
                    if bwd && (bwd_strict || st.distinct) {
                        return Status::False;
                    }
                    if fwd {
                        return Status::True;
                    }
                }
                Status::Open
            }
        }
    }
}

/// Domain propagation to fixpoint. Atoms with exactly one undecided
/// variable prune that variable's domain. Returns false on conflict.
fn propagate(st: &mut State, table: &VarTable) -> bool {
    let _ = table;
    loop {
        let mut changed = false;
        for i in 0..st.atoms.len() {
            let atom = st.atoms[i].clone();
            let free: Vec<VarId> = atom
                .vars
                .iter()
                .filter(|v| st.doms.get(v).map(|d| d.count() > 1).unwrap_or(false))
                .copied()
                .collect();
            match free.len() {
                0 => {
                    let lookup = |v: VarId| st.doms.get(&v).and_then(|d| d.singleton());
                    let (Some(a), Some(b)) = (
                        eval_value_term(&atom.lhs, atom.width, &lookup),
                        eval_value_term(&atom.rhs, atom.width, &lookup),
                    ) else {
                        return false;
                    };
                    if !eval_cmp(atom.op, a, b) {
                        return false;
                    }
                }
                1 => {
                    let v = free[0];
                    let dom = st.doms[&v].clone();
                    let mut keep = Vec::new();
                    for cand in dom.values() {
                        let lookup = |x: VarId| {
                            if x == v {
                                Some(cand)
                            } else {
                                st.doms.get(&x).and_then(|d| d.singleton())
                            }
                        };
                        let (Some(a), Some(b)) = (
                            eval_value_term(&atom.lhs, atom.width, &lookup),
                            eval_value_term(&atom.rhs, atom.width, &lookup),
                        ) else {
                            return false;
                        };
                        if eval_cmp(atom.op, a, b) {
                            keep.push(cand);
                        }
                    }
                    if keep.len() as u64 != dom.count() {
                        let d = st.doms.get_mut(&v).unwrap();
                        d.null = false;
                        for w in d.bits.iter_mut() {
                            *w = 0;
                        }
                        for val in &keep {
                            match val {
                                Val::Null => d.null = true,
                                Val::Int(n) => d.bits[(n / 64) as usize] |= 1 << (n % 64),
                            }
                        }
                        if d.is_empty() {
                            return false;
                        }
                        changed = true;
                    }
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Tarjan-style SCC condensation, deterministic over sorted nodes.
fn condense(nodes: &[usize], edges: &[(usize, usize, bool)]) -> Vec<Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, b, _) in edges {
        adj.entry(*a).or_default().push(*b);
    }
    let mut index = BTreeMap::new();
    let mut low = BTreeMap::new();
    let mut on_stack = BTreeSet::new();
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut out: Vec<Vec<usize>> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn strong(
        v: usize,
        adj: &BTreeMap<usize, Vec<usize>>,
        index: &mut BTreeMap<usize, usize>,
        low: &mut BTreeMap<usize, usize>,
        on_stack: &mut BTreeSet<usize>,
        stack: &mut Vec<usize>,
        next: &mut usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        index.insert(v, *next);
        low.insert(v, *next);
        *next += 1;
        stack.push(v);
        on_stack.insert(v);
        for w in adj.get(&v).cloned().unwrap_or_default() {
            if !index.contains_key(&w) {
                strong(w, adj, index, low, on_stack, stack, next, out);
                let lw = low[&w];
                let lv = low.get_mut(&v).unwrap();
                *lv = (*lv).min(lw);
            } else if on_stack.contains(&w) {
                let iw = index[&w];
                let lv = low.get_mut(&v).unwrap();
                *lv = (*lv).min(iw);
            }
        }
        if low[&v] == index[&v] {
            let mut comp = Vec::new();
            while let Some(w) = stack.pop() {
                on_stack.remove(&w);
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort();
            out.push(comp);
        }
    }

    for v in nodes {
        if !index.contains_key(v) {
            strong(*v, &adj, &mut index, &mut low, &mut on_stack, &mut stack, &mut next, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{SymTerm, VarInfo};

    fn tbl(n: u32, width: u8) -> VarTable {
        let mut t = VarTable::default();
        for id in 0..n {
            t.insert(
                id,
                VarInfo { name: format!("v{id}"), width, nullable: false, is_input: false },
            );
        }
        t
    }

    #[test]
    fn chain_orders_get_positions_one_to_n() {
        let f = Formula::and(vec![
            Formula::OrdLt(OrdTerm::Ev(1), OrdTerm::Ev(2)),
            Formula::OrdLt(OrdTerm::Ev(2), OrdTerm::Ev(3)),
            Formula::OrdDistinct(vec![1, 2, 3]),
        ]);
        match solve(&f, &VarTable::default(), &Budget::default()) {
            SolverResult::Sat(m) => {
                assert_eq!(m.ord[&1], 1);
                assert_eq!(m.ord[&2], 2);
                assert_eq!(m.ord[&3], 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disjunction_branches() {
        // (O1 < O2 or O2 < O1) and (v0 == 3)
        let f = Formula::and(vec![
            Formula::Or(vec![
                Formula::OrdLt(OrdTerm::Ev(1), OrdTerm::Ev(2)),
                Formula::OrdLt(OrdTerm::Ev(2), OrdTerm::Ev(1)),
            ]),
            Formula::Cmp(CmpOp::Eq, SymTerm::Var(0), SymTerm::Const(Val::Int(3))),
            Formula::OrdDistinct(vec![1, 2]),
        ]);
        match solve(&f, &tbl(1, 8), &Budget::default()) {
            SolverResult::Sat(m) => {
                assert_eq!(m.vals[&0], Val::Int(3));
                assert_eq!(m.ord.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_reports_unknown() {
        let mut parts = Vec::new();
        for i in 0..24u32 {
            parts.push(Formula::Or(vec![
                Formula::Cmp(CmpOp::Eq, SymTerm::Var(i), SymTerm::Const(Val::Int(0))),
                Formula::Cmp(CmpOp::Eq, SymTerm::Var(i), SymTerm::Const(Val::Int(1))),
            ]));
        }
        // Force conflict only at full depth so search visits many nodes.
        let sum = (0..24u32).fold(SymTerm::Const(Val::Int(0)), |acc, i| {
            SymTerm::Arith(crate::ir::ArithOp::Add, Box::new(acc), Box::new(SymTerm::Var(i)))
        });
        parts.push(Formula::Cmp(CmpOp::Eq, sum, SymTerm::Const(Val::Int(99))));
        let f = Formula::and(parts);
        let tight = Budget { nodes: 50, deadline: None };
        assert!(matches!(
            solve(&f, &tbl(24, 8), &tight),
            SolverResult::Unknown(UnknownReason::Budget)
        ));
    }

    #[test]
    fn le_cycle_without_distinct_means_equal_positions() {
        let f = Formula::and(vec![
            Formula::OrdLe(OrdTerm::Ev(1), OrdTerm::Ev(2)),
            Formula::OrdLe(OrdTerm::Ev(2), OrdTerm::Ev(1)),
        ]);
        match solve(&f, &VarTable::default(), &Budget::default()) {
            SolverResult::Sat(m) => assert_eq!(m.ord[&1], m.ord[&2]),
            other => panic!("{other:?}"),
        }
    }
}
