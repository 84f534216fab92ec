//! Property tests over the value model and the text formats.

use std::collections::BTreeMap;

use proptest::prelude::*;

use verifix::formula::{eval_cmp, SymTerm};
use verifix::ir::{mask, CmpOp, Val};
use verifix::trace::{
    parse_schedule_input, parse_trace, serialize_schedule_input, serialize_trace, Event,
    EventKind, Outcome, PathPrefix, PathSite, ScheduleInput, Trace, TraceInput,
};

fn arb_val() -> impl Strategy<Value = Val> {
    prop_oneof![Just(Val::Null), (0u64..256).prop_map(Val::Int)]
}

fn arb_cmp_op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Eq),
        Just(CmpOp::Ne),
        Just(CmpOp::Lt),
        Just(CmpOp::Le),
        Just(CmpOp::Gt),
        Just(CmpOp::Ge),
    ]
}

fn arb_label() -> impl Strategy<Value = String> {
    "[0-9]{1,2}'{0,2}"
}

fn arb_sym_term() -> impl Strategy<Value = SymTerm> {
    let leaf = prop_oneof![
        (0u32..8).prop_map(SymTerm::Var),
        arb_val().prop_map(SymTerm::Const),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        (inner.clone(), inner, arb_cmp_op()).prop_map(|(a, b, op)| SymTerm::cmp(op, a, b))
    })
}

fn arb_event_kind() -> impl Strategy<Value = EventKind> {
    prop_oneof![
        (arb_val(), 0u32..32).prop_map(|(val, vvar)| EventKind::Read {
            var: "x".into(),
            vvar,
            val,
            deref: false,
        }),
        (arb_val(), arb_val(), 0u32..32, arb_sym_term()).prop_map(
            |(val, prev_val, vvar, sym)| EventKind::Write {
                var: "x".into(),
                vvar,
                val,
                prev_vvar: vvar + 1,
                prev_val,
                sym,
            }
        ),
        Just(EventKind::Lock { lock: "l".into() }),
        Just(EventKind::Unlock { lock: "l".into() }),
        (any::<bool>(), arb_sym_term())
            .prop_map(|(taken, cond)| EventKind::Branch { taken, cond }),
        (any::<bool>(), arb_sym_term()).prop_map(|(ok, cond)| EventKind::Assert { ok, cond }),
        Just(EventKind::Spawn { child: 1 }),
        Just(EventKind::Join { child: 1 }),
    ]
}

fn arb_trace() -> impl Strategy<Value = Trace> {
    (
        proptest::collection::vec((0usize..2, arb_label(), arb_event_kind()), 0..12),
        prop_oneof![
            Just(Outcome::Completed),
            Just(Outcome::AssertFailed { label: "7".into() }),
            Just(Outcome::NullDeref { label: "6".into() }),
            Just(Outcome::Blocked {
                lock_blocked: vec![(1, "l".into())],
                join_blocked: vec![(0, 1)],
            }),
        ],
        proptest::option::of(0usize..20),
        0u64..16,
    )
        .prop_map(|(raw, outcome, divergence, input_val)| {
            let events = raw
                .into_iter()
                .enumerate()
                .map(|(i, (thread, label, kind))| Event { index: i + 1, thread, label, kind })
                .collect();
            Trace {
                threads: vec!["main".into(), "W".into()],
                inputs: vec![TraceInput { name: "i".into(), vvar: 0, width: 4, val: input_val }],
                events,
                outcome,
                divergence,
                bound_hits: BTreeMap::new(),
            }
        })
}

proptest! {
    /// Any generated trace survives serialize -> parse structurally.
    #[test]
    fn trace_serialization_round_trips(tr in arb_trace()) {
        let text = serialize_trace(&tr);
        let back = parse_trace(&text).expect("parse back");
        prop_assert_eq!(tr, back);
    }

    /// Schedule+input files round trip.
    #[test]
    fn schedule_input_round_trips(
        inputs in proptest::collection::btree_map("[a-z]{1,4}", 0u64..99, 0..4),
        turns in proptest::collection::vec("[A-Z][0-9]?", 0..12),
    ) {
        let si = ScheduleInput { input_values: inputs, turns };
        let back = parse_schedule_input(&serialize_schedule_input(&si)).expect("parse back");
        prop_assert_eq!(si, back);
    }

    /// Comparison negation is total: op and its negation partition every
    /// value pair, including null operands.
    #[test]
    fn cmp_negation_partitions(a in arb_val(), b in arb_val(), op in arb_cmp_op()) {
        prop_assert_ne!(eval_cmp(op, a, b), eval_cmp(op.negate(), a, b));
    }

    /// Masking is idempotent and bounds the value.
    #[test]
    fn mask_idempotent(n in any::<u64>(), w in 1u8..16) {
        let m = mask(n, w);
        prop_assert!(m < (1u64 << w));
        prop_assert_eq!(mask(m, w), m);
    }

    /// Symbolic terms survive the s-expression round trip.
    #[test]
    fn sym_term_sexp_round_trips(t in arb_sym_term()) {
        let s = t.to_sexp();
        prop_assert_eq!(SymTerm::from_sexp(&s).expect("parse back"), t);
    }

    /// Prefix canonical form is insensitive to insertion order.
    #[test]
    fn prefix_canon_order_insensitive(
        sites in proptest::collection::vec(("[A-Z][0-9]", any::<bool>()), 1..6)
    ) {
        let mut fwd = PathPrefix::default();
        let mut rev = PathPrefix::default();
        let threads: Vec<(String, Vec<PathSite>)> = sites
            .iter()
            .enumerate()
            .map(|(k, (t, pol))| {
                (format!("{t}{k}"), vec![PathSite { label: "1".into(), polarity: *pol }])
            })
            .collect();
        for (t, s) in &threads {
            fwd.set(t, s.clone());
        }
        for (t, s) in threads.iter().rev() {
            rev.set(t, s.clone());
        }
        prop_assert_eq!(fwd.canon(), rev.canon());
    }
}
