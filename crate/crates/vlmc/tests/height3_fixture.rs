//! Exact-value checks on a height-3 tree with mixed context lengths.
//!
//! Fixture T3 has contexts {1, 00, 010, 110}; the expected values below
//! were frozen from an independent exact-rational enumeration and linear
//! solve (stationary masses are in 4240ths).

use std::collections::BTreeSet;

use vlmc::{ChainLaw, ContextTree, NoiseChannel, PerturbedLaw, Seq, Symbol};

const T3: &str = "1 0.6 0.4\n00 0.15 0.85\n010 0.7 0.3\n110 0.35 0.65\n";

fn tree() -> ContextTree {
    ContextTree::parse(T3).unwrap()
}

fn chain() -> ChainLaw {
    ChainLaw::new(tree()).unwrap()
}

fn seq(s: &str) -> Seq {
    Seq::parse(s).unwrap()
}

#[test]
fn flags_and_shape() {
    let t = tree();
    assert_eq!(t.height(), 3);
    assert!(t.is_complete());
    assert!(t.is_irreducible());
    assert_eq!(t.context_for(seq("0010")).unwrap(), seq("010"));
    assert_eq!(t.context_for(seq("100")).unwrap(), seq("00"));
}

#[test]
fn derived_constants() {
    let c = tree().constants();
    assert!((c.alpha - 0.15).abs() < 1e-15);
    // worst ratios: |1 - 0.7/0.15| at suffix lengths 0 and 1, then
    // |1 - 0.65/0.3| between the two length-3 rows
    assert!((c.beta_seq[0] - 11.0 / 3.0).abs() < 1e-12);
    assert!((c.beta_seq[1] - 11.0 / 3.0).abs() < 1e-12);
    assert!((c.beta_seq[2] - 7.0 / 6.0).abs() < 1e-12);
    assert!((c.beta - 8.5).abs() < 1e-12);
    assert!((c.beta_star - 1274.0 / 27.0).abs() < 1e-10);
    assert!((c.c_const - 866401.0 / 81.0).abs() < 1e-7);
}

#[test]
fn stationary_masses_in_4240ths() {
    let law = chain();
    let pi = law.stationary().as_slice();
    // states ordered by packed bits (most recent symbol = bit 0); the
    // string shown is oldest-first
    let expect = [
        ("000", 126.0),
        ("001", 714.0),
        ("010", 765.0),
        ("011", 510.0),
        ("100", 714.0),
        ("101", 561.0),
        ("110", 510.0),
        ("111", 340.0),
    ];
    for (text, num) in expect {
        let bits = seq(text).bits() as usize;
        assert!(
            (pi[bits] - num / 4240.0).abs() < 1e-12,
            "pi({text}) = {} vs {num}/4240",
            pi[bits]
        );
    }
}

#[test]
fn marginals_and_conditionals() {
    let law = chain();
    assert!((law.marginal(seq("101")) - 561.0 / 4240.0).abs() < 1e-14);
    assert!((law.marginal(seq("0110")) - 153.0 / 2120.0).abs() < 1e-14);

    let root = law.conditional(Symbol::ONE, Seq::EMPTY).unwrap();
    assert!((root - 425.0 / 848.0).abs() < 1e-13);
    let after_zero = law.conditional(Symbol::ONE, seq("0")).unwrap();
    assert!((after_zero - 85.0 / 141.0).abs() < 1e-13);
    // "10" is an internal node: stationary mixture of the 010/110 rows
    let mixed = law.conditional(Symbol::ONE, seq("10")).unwrap();
    assert!((mixed - 0.44).abs() < 1e-13, "{mixed}");
    // a long past ending in the context 010 uses the row exactly
    assert_eq!(law.conditional(Symbol::ZERO, seq("0010")).unwrap(), 0.7);
}

#[test]
fn detection_gap_constant_across_depths() {
    let law = chain();
    let d = 429.0 / 4240.0;
    for k in [1, 2, 3, 6] {
        assert!((law.signal_gap(k) - d).abs() < 1e-12, "k={k}");
    }
}

#[test]
fn truncation_and_minimal_depth() {
    let t = tree();
    let level2: BTreeSet<Seq> = [seq("1"), seq("00"), seq("10")].into();
    assert_eq!(t.truncated(2), level2);
    assert_eq!(t.min_valid_depth(2), 3);
    assert_eq!(t.min_valid_depth(3), 3);
}

#[test]
fn observed_law_floors_and_window() {
    let law = PerturbedLaw::new(chain(), NoiseChannel::new(0.0).unwrap());
    let q3 = law.min_cylinder_prob(3).unwrap();
    assert!((q3 - 63.0 / 2120.0).abs() < 1e-14);
    let q4 = law.min_cylinder_prob(4).unwrap();
    assert!((q4 - 189.0 / 42400.0).abs() < 1e-14);

    let window = law.exact_delta_window(4).unwrap();
    assert!((window.high - 429.0 / 4240.0).abs() < 1e-12);
    assert!(window.low.abs() < 1e-12);

    for eps in [0.001, 0.01, 0.1, 0.5] {
        let noisy = PerturbedLaw::new(chain(), NoiseChannel::new(eps).unwrap());
        let cert = noisy.certify_gap(8).unwrap();
        assert!(cert.holds, "eps={eps}");
        let floors = noisy.check_floors(8).unwrap();
        assert!(floors.conditional_holds, "eps={eps}");
        assert!(floors.posterior_holds, "eps={eps}");
    }
}

#[test]
fn threshold_recovery_at_depth_four() {
    // recovery needs d strictly above min_valid_depth(K) = 3 for K = 2,
    // and also recovers the full tree at K = 3 with enough data
    let law = chain();
    let sample = law.sample(200_000, 0xBEEF).unwrap();
    let est = vlmc::estimate_tree(&sample, 0.05, 4).unwrap();
    let want: BTreeSet<Seq> = [seq("1"), seq("00"), seq("010"), seq("110")].into();
    assert_eq!(est.contexts, want);
    let report = vlmc::estimator::compare_truncated_sets(&est.contexts, &tree().context_set(), 3);
    assert!(report.equal);
}
