mod common;

use common::{arb_term, generalize_call, oracle_results, recount, sorted};
use proptest::prelude::*;
use subsumption_trie::trie::TrieConfig;
use subsumption_trie::{collect_nirs, FrameState, LeafRegistry, MatcherState, SubgoalTrie, Term};

#[derive(Clone, Debug)]
enum Op {
    Insert(Vec<Term>),
    Evaluate(usize),
    Complete(usize),
}

fn arb_ops(arity: usize) -> impl Strategy<Value = Vec<Op>> {
    let op = prop_oneof![
        prop::collection::vec(arb_term(2), arity).prop_map(Op::Insert),
        any::<usize>().prop_map(Op::Evaluate),
        any::<usize>().prop_map(Op::Complete),
    ];
    prop::collection::vec(op, 1..60)
}

fn apply(trie: &mut SubgoalTrie, registry: &mut LeafRegistry, ops: &[Op]) {
    for op in ops {
        let frames = trie.frames().len();
        match op {
            Op::Insert(args) => {
                let call = Term::compound("p", args.clone());
                let (f, new) = trie.check_insert(&call).unwrap();
                if new {
                    registry.record(trie, f);
                }
            }
            Op::Evaluate(i) if frames > 0 => {
                let _ = trie.mark_evaluating(trie.frames()[i % frames].id());
            }
            Op::Complete(i) if frames > 0 => {
                let _ = trie.mark_completed(trie.frames()[i % frames].id());
            }
            _ => {}
        }
    }
}

fn small_config() -> impl Strategy<Value = TrieConfig> {
    (1usize..10, 0u32..3).prop_map(|(t, b)| TrieConfig {
        hash_threshold: t,
        initial_buckets: 1 << b,
    })
}

proptest! {
    #[test]
    fn counters_match_recount(config in small_config(), ops in arb_ops(2)) {
        let mut trie = SubgoalTrie::with_config("p", 2, config).unwrap();
        apply(&mut trie, &mut LeafRegistry::new(), &ops);
        prop_assert!(trie.validate().is_ok());
        let expected = recount(&trie);
        for n in trie.node_ids() {
            prop_assert_eq!(trie.effective_in_eval(n), expected[&n]);
        }
        let evaluating = trie
            .frames()
            .iter()
            .filter(|f| f.state() == FrameState::Evaluating)
            .count() as u32;
        prop_assert_eq!(trie.evaluating_count(), evaluating);
    }

    #[test]
    fn retrievals_agree_with_oracle(
        config in small_config(),
        ops in arb_ops(3),
        pick in any::<usize>(),
        mask in any::<u64>(),
    ) {
        let mut trie = SubgoalTrie::with_config("p", 3, config).unwrap();
        let mut registry = LeafRegistry::new();
        apply(&mut trie, &mut registry, &ops);
        prop_assume!(!trie.frames().is_empty());
        let base = trie.frames()[pick % trie.frames().len()].call().clone();
        let query = generalize_call(&base, mask);
        let oracle = sorted(oracle_results(&trie, &query));
        let mut state = MatcherState::new();
        let before = state.marks();
        let eirs = state.collect_subsumed_subgoals(&trie, &query).unwrap();
        prop_assert_eq!(state.marks(), before);
        prop_assert_eq!(sorted(eirs), oracle.clone());
        prop_assert_eq!(sorted(state.collect_sirs(&trie, &query).unwrap()), oracle.clone());
        prop_assert_eq!(sorted(collect_nirs(&trie, &registry, &query).unwrap()), oracle);
    }

    #[test]
    fn a_stored_call_finds_itself_while_evaluating(args in prop::collection::vec(arb_term(3), 2)) {
        let call = Term::compound("p", args);
        let mut trie = SubgoalTrie::new("p", 2).unwrap();
        let f = trie.check_insert(&call).unwrap().0;
        trie.mark_evaluating(f).unwrap();
        let mut state = MatcherState::new();
        prop_assert_eq!(state.collect_subsumed_subgoals(&trie, &call).unwrap(), vec![f]);
        trie.mark_completed(f).unwrap();
        prop_assert!(state.collect_subsumed_subgoals(&trie, &call).unwrap().is_empty());
    }
}
