//! Property tests over randomly generated complete trees and samples.

use std::collections::BTreeSet;

use proptest::prelude::*;

use vlmc::estimator::{compare_truncated_sets, count_naive, estimate_tree, CountTrie};
use vlmc::{ChainLaw, ContextTree, NoiseChannel, PerturbedLaw, SamplePath, Seq, Symbol};

/// Builds a complete context tree by splitting nodes into both children
/// according to `shape` bits, with leaves at depth ≤ 3.
fn complete_tree(shape: u64, probs: &[f64]) -> ContextTree {
    fn grow(w: Seq, shape: u64, next_bit: &mut u32, leaves: &mut Vec<Seq>) {
        let split = w.len() < 3 && {
            let bit = (shape >> (*next_bit % 64)) & 1;
            *next_bit += 1;
            bit == 1 || w.is_empty()
        };
        if !split {
            leaves.push(w);
            return;
        }
        for a in Symbol::ALL {
            grow(w.push_oldest(a), shape, next_bit, leaves);
        }
    }
    let mut leaves = Vec::new();
    let mut cursor = 0;
    grow(Seq::EMPTY, shape, &mut cursor, &mut leaves);
    let rows = leaves
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let p0 = probs[i % probs.len()];
            (w, [p0, 1.0 - p0])
        })
        .collect();
    ContextTree::new(rows).expect("generated tree is valid")
}

fn tree_strategy() -> impl Strategy<Value = ContextTree> {
    (
        any::<u64>(),
        prop::collection::vec(0.05f64..0.95, 1..=8),
    )
        .prop_map(|(shape, probs)| complete_tree(shape, &probs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_trees_are_complete_and_irreducible(tree in tree_strategy()) {
        prop_assert!(tree.is_complete());
        prop_assert!(tree.is_irreducible());
    }

    #[test]
    fn serialize_parse_round_trip(tree in tree_strategy()) {
        let back = ContextTree::parse(&tree.serialize()).unwrap();
        prop_assert_eq!(back.num_contexts(), tree.num_contexts());
        for w in tree.contexts() {
            let a = tree.row(w).unwrap();
            let b = back.row(w).unwrap();
            prop_assert_eq!(a[0].to_bits(), b[0].to_bits());
            prop_assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }

    #[test]
    fn truncation_keeps_suffix_property(tree in tree_strategy(), k in 1usize..=4) {
        let cut = tree.truncated(k);
        for &w in &cut {
            prop_assert!(w.len() <= k);
            for &v in &cut {
                prop_assert!(!w.is_proper_suffix_of(v), "{} suffix of {}", w, v);
            }
        }
        if k >= tree.height() {
            let full: BTreeSet<Seq> = tree.contexts().collect();
            prop_assert_eq!(cut, full);
        }
    }

    #[test]
    fn every_past_has_exactly_one_context(tree in tree_strategy()) {
        let h = tree.height();
        for past in Seq::all_of_len(h) {
            let hits = tree.contexts().filter(|c| c.is_suffix_of(past)).count();
            prop_assert_eq!(hits, 1, "past {}", past);
        }
    }

    #[test]
    fn constants_shapes(tree in tree_strategy()) {
        let c = tree.constants();
        prop_assert!(c.alpha > 0.0 && c.alpha <= 0.5 + 1e-15);
        prop_assert!(c.beta_star >= 1.0);
        prop_assert!(c.c_const >= 1.0);
        for k in 1..c.beta_seq.len() {
            prop_assert!(c.beta_seq[0] >= c.beta_seq[k] - 1e-12);
        }
    }

    #[test]
    fn stationary_measure_is_a_fixed_point(tree in tree_strategy()) {
        let law = ChainLaw::new(tree).unwrap();
        let pi = law.stationary().as_slice();
        let total: f64 = pi.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(pi.iter().all(|&p| p > 0.0));
        // one transition sweep by hand
        let e = law.embedding();
        let mut out = vec![0.0f64; pi.len()];
        for s in 0..e.num_states() {
            let row = e.row(s);
            prop_assert!((row[0] + row[1] - 1.0).abs() < 1e-12);
            for a in Symbol::ALL {
                out[e.step(s, a)] += pi[s] * row[a.index()];
            }
        }
        for (a, b) in pi.iter().zip(out.iter()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn cylinder_marginals_are_consistent(tree in tree_strategy()) {
        let law = ChainLaw::new(tree).unwrap();
        for j in 0..=4usize {
            for w in Seq::all_of_len(j) {
                let whole = law.marginal(w);
                let split: f64 = Symbol::ALL
                    .iter()
                    .map(|&a| law.marginal(w.push_recent(a)))
                    .sum();
                prop_assert!((whole - split).abs() < 1e-12);
            }
        }
        let level: f64 = Seq::all_of_len(5).map(|w| law.marginal(w)).sum();
        prop_assert!((level - 1.0).abs() < 1e-10);
    }

    #[test]
    fn observed_law_interpolates_channels(tree in tree_strategy(), eps in 0.0f64..=1.0) {
        let law = ChainLaw::new(tree).unwrap();
        let noisy = PerturbedLaw::new(law, NoiseChannel::new(eps).unwrap());
        let mut level = 0.0;
        for w in Seq::all_of_len(4) {
            let q = noisy.marginal(w).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
            level += q;
        }
        prop_assert!((level - 1.0).abs() < 1e-10);
    }

    #[test]
    fn counts_match_naive_scan(
        bits in prop::collection::vec(any::<bool>(), 30..200),
        d in 1usize..=5,
    ) {
        let symbols: Vec<Symbol> = bits
            .iter()
            .map(|&b| if b { Symbol::ONE } else { Symbol::ZERO })
            .collect();
        let n = symbols.len();
        let path = SamplePath::from_symbols(symbols);
        let trie = CountTrie::build(&path, d).unwrap();
        for j in 1..=d + 1 {
            let mut level_total = 0u64;
            for w in Seq::all_of_len(j) {
                let fast = trie.count(w);
                prop_assert_eq!(fast, count_naive(&path, w));
                level_total += fast;
                if j >= 2 {
                    // a window never occurs more often than its suffix
                    prop_assert!(fast <= trie.count(w.suffix()));
                }
            }
            prop_assert_eq!(level_total, (n - j + 1) as u64);
        }
    }

    #[test]
    fn estimator_matches_the_unpruned_definition(
        bits in prop::collection::vec(any::<bool>(), 12..64),
        delta in 0.0f64..0.6,
        d in 1usize..=4,
    ) {
        // Reference route: score every node of length <= d from naive
        // counts and apply the keep rule verbatim, no search-space
        // pruning at all.
        let symbols: Vec<Symbol> = bits
            .iter()
            .map(|&b| if b { Symbol::ONE } else { Symbol::ZERO })
            .collect();
        let path = SamplePath::from_symbols(symbols);
        if path.len() <= d {
            return Ok(());
        }
        let qhat = |a: Symbol, w: Seq| {
            let n_wa = count_naive(&path, w.push_recent(a));
            let n_dot: u64 = Symbol::ALL
                .iter()
                .map(|&b| count_naive(&path, w.push_recent(b)))
                .sum();
            (n_wa + 1) as f64 / (n_dot + 2) as f64
        };
        let score = |w: Seq| {
            Symbol::ALL
                .iter()
                .map(|&a| (qhat(a, w) - qhat(a, w.suffix())).abs())
                .fold(0.0f64, f64::max)
        };
        let mut reference = BTreeSet::new();
        for len in 1..=d {
            for w in Seq::all_of_len(len) {
                if score(w) <= delta {
                    continue;
                }
                let extension_scores_low = (len + 1..=d).all(|j| {
                    Seq::all_of_len(j)
                        .filter(|x| w.is_proper_suffix_of(*x))
                        .all(|x| score(x) <= delta)
                });
                if extension_scores_low {
                    reference.insert(w);
                }
            }
        }
        let est = estimate_tree(&path, delta, d).unwrap();
        prop_assert_eq!(est.contexts, reference);
    }

    #[test]
    fn estimated_sets_keep_suffix_property_and_truncate_cleanly(
        bits in prop::collection::vec(any::<bool>(), 50..300),
        delta in 0.0f64..0.4,
    ) {
        let symbols: Vec<Symbol> = bits
            .iter()
            .map(|&b| if b { Symbol::ONE } else { Symbol::ZERO })
            .collect();
        let path = SamplePath::from_symbols(symbols);
        let est = estimate_tree(&path, delta, 5).unwrap();
        for &w in &est.contexts {
            for &v in &est.contexts {
                prop_assert!(!w.is_proper_suffix_of(v));
            }
        }
        // self-comparison is exact equality at every level
        for k in 1..=5 {
            let report = compare_truncated_sets(&est.contexts, &est.contexts, k);
            prop_assert!(report.equal);
        }
    }
}
