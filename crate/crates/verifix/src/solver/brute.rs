//! Naive bounded-domain enumerator: the anti-hallucination oracle.
//!
//! Exhaustively walks the full assignment space in lexicographic order
//! (order variables by event index over 1..=n, then value variables by id,
//! null before integers) and returns the first satisfying assignment, so
//! the model it reports is the lexicographically smallest one.

use super::{var_domain, Budget, SolverResult, UnknownReason};
use crate::formula::{eval_formula, Formula, Model, VarTable};
use crate::ir::Val;

/// Exhaustive check. `Unknown(Budget)` when the domain product exceeds the
/// node budget.
pub fn brute_force_sat(f: &Formula, table: &VarTable, budget: &Budget) -> SolverResult {
    let ord_vars = f.ord_vars();
    let val_vars = f.value_vars();
    let n = ord_vars.len() as u64;

    // Upfront product guard.
    let mut product: u128 = 1;
    for _ in &ord_vars {
        product = product.saturating_mul(n.max(1) as u128);
    }
    for v in &val_vars {
        let (size, nullable) = var_domain(table, *v);
        product = product.saturating_mul(size as u128 + nullable as u128);
    }
    if product > budget.nodes as u128 {
        return SolverResult::Unknown(UnknownReason::Budget);
    }

    let mut model = Model::default();
    let mut steps = 0usize;
    if enumerate(f, table, &ord_vars, &val_vars, 0, n, &mut model, &mut steps, budget) {
        SolverResult::Sat(model)
    } else if budget.expired() {
        SolverResult::Unknown(UnknownReason::Timeout)
    } else {
        SolverResult::Unsat
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    f: &Formula,
    table: &VarTable,
    ord_vars: &[usize],
    val_vars: &[u32],
    depth: usize,
    n: u64,
    model: &mut Model,
    steps: &mut usize,
    budget: &Budget,
) -> bool {
    *steps += 1;
    if steps.is_multiple_of(4096) && budget.expired() {
        return false;
    }
    if depth < ord_vars.len() {
        for pos in 1..=n {
            model.ord.insert(ord_vars[depth], pos);
            if enumerate(f, table, ord_vars, val_vars, depth + 1, n, model, steps, budget) {
                return true;
            }
        }
        model.ord.remove(&ord_vars[depth]);
        return false;
    }
    let vi = depth - ord_vars.len();
    if vi < val_vars.len() {
        let v = val_vars[vi];
        let (size, nullable) = var_domain(table, v);
        if nullable {
            model.vals.insert(v, Val::Null);
            if enumerate(f, table, ord_vars, val_vars, depth + 1, n, model, steps, budget) {
                return true;
            }
        }
        for x in 0..size {
            model.vals.insert(v, Val::Int(x));
            if enumerate(f, table, ord_vars, val_vars, depth + 1, n, model, steps, budget) {
                return true;
            }
        }
        model.vals.remove(&v);
        return false;
    }
    eval_formula(f, model, table) == Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{OrdTerm, SymTerm, VarInfo};
    use crate::ir::CmpOp;

    #[test]
    fn x_ne_x_is_unsat() {
        let mut t = VarTable::default();
        t.insert(0, VarInfo { name: "x".into(), width: 1, nullable: false, is_input: false });
        let f = Formula::Cmp(CmpOp::Ne, SymTerm::Var(0), SymTerm::Var(0));
        assert_eq!(brute_force_sat(&f, &t, &Budget::default()), SolverResult::Unsat);
    }

    #[test]
    fn antisymmetric_orders_unsat() {
        let f = Formula::and(vec![
            Formula::OrdLt(OrdTerm::Ev(1), OrdTerm::Ev(2)),
            Formula::OrdLt(OrdTerm::Ev(2), OrdTerm::Ev(1)),
        ]);
        assert_eq!(
            brute_force_sat(&f, &VarTable::default(), &Budget::default()),
            SolverResult::Unsat
        );
    }

    #[test]
    fn model_is_lexicographically_smallest() {
        let mut t = VarTable::default();
        t.insert(0, VarInfo { name: "x".into(), width: 3, nullable: false, is_input: false });
        let f = Formula::Cmp(CmpOp::Gt, SymTerm::Var(0), SymTerm::Const(Val::Int(2)));
        match brute_force_sat(&f, &t, &Budget::default()) {
            SolverResult::Sat(m) => assert_eq!(m.vals[&0], Val::Int(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overlarge_domain_is_unknown() {
        let mut t = VarTable::default();
        for id in 0..16 {
            t.insert(
                id,
                VarInfo { name: format!("x{id}"), width: 8, nullable: false, is_input: false },
            );
        }
        let f = Formula::and(
            (0..16).map(|i| Formula::Cmp(CmpOp::Eq, SymTerm::Var(i), SymTerm::Var(i))).collect(),
        );
        assert!(matches!(
            brute_force_sat(&f, &t, &Budget::default()),
            SolverResult::Unknown(UnknownReason::Budget)
        ));
    }
}
