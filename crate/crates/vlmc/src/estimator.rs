//! Window counting and the threshold-pruning tree estimator.
//!
//! From a sample `z_1..z_n` the estimator counts every window of length
//! ≤ d+1, forms smoothed conditionals `q̂(a|w) = (N(wa)+1)/(N(w·)+2)`,
//! scores each node by `Δ(w) = max_a |q̂(a|w) − q̂(a|suf(w))|`, and keeps
//! the nodes scoring above the threshold that have no scoring extension
//! within depth d.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::chain::SamplePath;
use crate::error::Error;
use crate::seq::{mask, Seq, Symbol, ALPHABET};
use crate::tree::{truncate_set, ContextTree};

/// Largest supported window length d+1 (dense per-level storage).
pub const COUNT_DEPTH_CAP: usize = 22;

/// Dense per-level window counts `N(w)` for all `ℓ(w) ≤ d+1`.
///
/// A window of length j occurs `n − j + 1` times across the sample, so
/// per-level counts always sum to that total; a node absent from the
/// sample simply holds count 0.
#[derive(Debug, Clone)]
pub struct CountTrie {
    /// `levels[j][bits]` = N(w) for ℓ(w) = j ≥ 1.
    levels: Vec<Vec<u64>>,
    n: usize,
    depth: usize,
}

impl CountTrie {
    /// One pass over the sample, counting every window of length ≤ d+1.
    pub fn build(sample: &SamplePath, d: usize) -> Result<CountTrie, Error> {
        let n = sample.symbols.len();
        let max_len = d + 1;
        if max_len > n {
            return Err(Error::CountDepth { depth: max_len, n });
        }
        if max_len > COUNT_DEPTH_CAP {
            return Err(Error::DepthCap {
                depth: max_len,
                cap: COUNT_DEPTH_CAP,
            });
        }
        let mut levels: Vec<Vec<u64>> = Vec::with_capacity(max_len + 1);
        levels.push(Vec::new());
        for j in 1..=max_len {
            levels.push(vec![0u64; 1usize << j]);
        }
        let mut window = 0u64;
        for (t, &s) in sample.symbols.iter().enumerate() {
            window = ((window << 1) | s.value() as u64) & mask(max_len);
            let reach = max_len.min(t + 1);
            for (j, level) in levels.iter_mut().enumerate().take(reach + 1).skip(1) {
                level[(window & mask(j)) as usize] += 1;
            }
        }
        Ok(CountTrie {
            levels,
            n,
            depth: d,
        })
    }

    pub fn sample_len(&self) -> usize {
        self.n
    }

    /// Estimation depth d; counts exist for window lengths up to d+1.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `N(w)`; zero for unseen windows. λ is not a window.
    pub fn count(&self, w: Seq) -> u64 {
        assert!(
            (1..=self.depth + 1).contains(&w.len()),
            "count window length {} out of range",
            w.len()
        );
        self.levels[w.len()][w.bits() as usize]
    }

    /// `N(w·) = Σ_b N(wb)`: occurrences of `w` that have a successor.
    /// For `w = λ` this is the total symbol count `n`.
    pub fn continuation_total(&self, w: Seq) -> u64 {
        Symbol::ALL
            .iter()
            .map(|&b| self.count_for_child(w, b))
            .sum()
    }

    #[inline]
    fn count_for_child(&self, w: Seq, b: Symbol) -> u64 {
        let child = w.push_recent(b);
        self.levels[child.len()][child.bits() as usize]
    }

    /// Smoothed conditional `q̂(a|w) = (N(wa)+1)/(N(w·)+|A|)`; equal to
    /// 1/2 for unseen windows. Requires `ℓ(w) ≤ d`.
    pub fn empirical_conditional(&self, a: Symbol, w: Seq) -> f64 {
        assert!(w.len() <= self.depth, "conditional past longer than d");
        let num = self.count_for_child(w, a) + 1;
        let den = self.continuation_total(w) + ALPHABET as u64;
        num as f64 / den as f64
    }

    /// `Δ(w) = max_a |q̂(a|w) − q̂(a|suf(w))|`. Both symbols give the same
    /// value over a binary alphabet; the maximum is taken regardless.
    pub fn delta(&self, w: Seq) -> f64 {
        assert!(
            (1..=self.depth).contains(&w.len()),
            "delta node length {} out of range",
            w.len()
        );
        let suf = w.suffix();
        Symbol::ALL
            .iter()
            .map(|&a| (self.empirical_conditional(a, w) - self.empirical_conditional(a, suf)).abs())
            .fold(0.0f64, f64::max)
    }
}

/// Reference count: a direct scan of the sample. Quadratic and meant for
/// cross-checking `CountTrie::build` in tests.
pub fn count_naive(sample: &SamplePath, w: Seq) -> u64 {
    let n = sample.symbols.len();
    let len = w.len();
    if len == 0 || len > n {
        return 0;
    }
    let mut hits = 0u64;
    for t in 0..=(n - len) {
        let matches = (0..len).all(|i| sample.symbols[t + i] == w.symbol_back(len - 1 - i));
        hits += matches as u64;
    }
    hits
}

/// The estimated context set with its smoothed rows and parameters.
///
/// An empty context set is the memoryless outcome: nothing scored above
/// the threshold, and the attached row for λ is the whole model.
#[derive(Debug, Clone)]
pub struct EstimatedTree {
    pub contexts: BTreeSet<Seq>,
    /// Smoothed rows for each estimated context; for an empty estimate,
    /// the single λ row.
    pub rows: Vec<(Seq, [f64; 2])>,
    pub delta: f64,
    pub d: usize,
    pub n: usize,
    /// Largest Δ seen across scored nodes.
    pub max_delta: f64,
}

impl EstimatedTree {
    /// Serializes in the tree file format with a provenance header; an
    /// empty estimate is written as the single λ row.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("# context tree: <context> <p0> <p1>; rightmost symbol = most recent\n");
        let _ = writeln!(
            out,
            "# estimated: n={} d={} delta={} max_delta={}",
            self.n, self.d, self.delta, self.max_delta
        );
        if self.contexts.is_empty() {
            let _ = writeln!(out, "# no node scored above the threshold; memoryless model");
        }
        for (w, row) in &self.rows {
            let _ = writeln!(out, "{w} {} {}", row[0], row[1]);
        }
        out
    }
}

/// Runs the threshold estimator at depth `d`: keep nodes with
/// `Δ(w) > delta` whose extensions within depth d all score ≤ delta.
///
/// Only seen nodes and unseen children of seen nodes are scored: an
/// unseen suffix makes both conditionals the smoothing value 1/2, so
/// every other node has Δ = 0 exactly and can never score.
pub fn estimate_tree(sample: &SamplePath, delta: f64, d: usize) -> Result<EstimatedTree, Error> {
    let counts = CountTrie::build(sample, d)?;
    estimate_from_counts(&counts, delta)
}

/// Same as [`estimate_tree`] for an already-built count trie.
pub fn estimate_from_counts(counts: &CountTrie, delta: f64) -> Result<EstimatedTree, Error> {
    let n = counts.sample_len();
    let d = counts.depth();
    if d >= n {
        return Err(Error::EstimatorDepth { d, n });
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::BadThreshold(delta));
    }

    let mut significant: Vec<Vec<u64>> = vec![Vec::new()];
    let mut max_delta = 0.0f64;
    for j in 1..=d {
        let mut level = Vec::new();
        for bits in 0..(1u64 << j) {
            let w = Seq::from_bits(j, bits);
            let parent_seen = w.len() == 1 || counts.count(w.suffix()) > 0;
            if !parent_seen {
                continue;
            }
            let score = counts.delta(w);
            if score > max_delta {
                max_delta = score;
            }
            if score > delta {
                level.push(bits);
            }
        }
        significant.push(level);
    }

    // Keep significant nodes with no significant strict extension: each
    // significant node rules out all of its proper suffixes.
    let mut ruled_out: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); d + 1];
    for (j, level) in significant.iter().enumerate() {
        for &bits in level {
            for (k, shorter) in ruled_out.iter_mut().enumerate().take(j).skip(1) {
                shorter.insert(bits & mask(k));
            }
        }
    }
    let mut contexts = BTreeSet::new();
    for (j, level) in significant.iter().enumerate() {
        for &bits in level {
            if !ruled_out[j].contains(&bits) {
                contexts.insert(Seq::from_bits(j, bits));
            }
        }
    }

    let rows: Vec<(Seq, [f64; 2])> = if contexts.is_empty() {
        vec![(
            Seq::EMPTY,
            [
                counts.empirical_conditional(Symbol::ZERO, Seq::EMPTY),
                counts.empirical_conditional(Symbol::ONE, Seq::EMPTY),
            ],
        )]
    } else {
        contexts
            .iter()
            .map(|&w| {
                (
                    w,
                    [
                        counts.empirical_conditional(Symbol::ZERO, w),
                        counts.empirical_conditional(Symbol::ONE, w),
                    ],
                )
            })
            .collect()
    };

    Ok(EstimatedTree {
        contexts,
        rows,
        delta,
        d,
        n,
        max_delta,
    })
}

/// Set difference of two context sets truncated to level `K`.
#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub equal: bool,
    /// Nodes of the truncated truth missing from the truncated estimate.
    pub missing: BTreeSet<Seq>,
    /// Nodes of the truncated estimate absent from the truncated truth.
    pub extra: BTreeSet<Seq>,
}

/// Truncates both trees to level `K` and compares the context sets.
pub fn compare_truncated(est: &EstimatedTree, truth: &ContextTree, k: usize) -> TruncationReport {
    compare_truncated_sets(&est.contexts, &truth.context_set(), k)
}

pub fn compare_truncated_sets(
    est: &BTreeSet<Seq>,
    truth: &BTreeSet<Seq>,
    k: usize,
) -> TruncationReport {
    let est_k = truncate_set(est.iter().copied(), k);
    let truth_k = truncate_set(truth.iter().copied(), k);
    let missing: BTreeSet<Seq> = truth_k.difference(&est_k).copied().collect();
    let extra: BTreeSet<Seq> = est_k.difference(&truth_k).copied().collect();
    TruncationReport {
        equal: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
    }
}
