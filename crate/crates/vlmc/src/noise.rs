//! The Bernoulli flip channel and the exact law of the observed chain.
//!
//! Observations are `Z_t = X_t ⊕ ξ_t` with i.i.d. flips of probability ε.
//! Even when X is a finite-order chain, Z generally is not; its cylinder
//! probabilities are still computable exactly by a forward pass over the
//! hidden embedding states, and every supremum over short windows below
//! is an exhaustive enumeration, not an estimate.

use rand::Rng;

use crate::chain::{ChainLaw, ForwardVec, SamplePath};
use crate::error::Error;
use crate::rng;
use crate::seq::{Seq, Symbol};

/// Evaluation cap for single cylinder queries.
pub const EVAL_LEN_CAP: usize = 30;
/// Depth cap for the minimum-cylinder scan.
pub const QMIN_DEPTH_CAP: usize = 20;
/// Window-length cap for the conditional-gap certificate.
pub const CERTIFY_JMAX_CAP: usize = 16;
/// Window-length cap for the floor checks.
pub const FLOORS_KMAX_CAP: usize = 12;
/// Depth cap for the exact threshold window.
pub const WINDOW_DEPTH_CAP: usize = 16;

/// Slack added to exhaustively computed bounds before comparing.
pub const CHECK_TOL: f64 = 1e-10;

/// The binary symmetric channel: each symbol flips independently with
/// probability ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannel {
    epsilon: f64,
}

impl NoiseChannel {
    pub fn new(epsilon: f64) -> Result<NoiseChannel, Error> {
        if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
            return Err(Error::BadEpsilon(epsilon));
        }
        Ok(NoiseChannel { epsilon })
    }

    #[inline]
    pub fn epsilon(self) -> f64 {
        self.epsilon
    }

    /// Flips each symbol independently with probability ε; deterministic
    /// for a given seed and independent of the sampling stream.
    pub fn perturb(self, path: &SamplePath, seed: u64) -> SamplePath {
        let mut rng = rng::rng_from(rng::mix(seed, &[rng::STREAM_FLIP]));
        let symbols = path
            .symbols
            .iter()
            .map(|&s| {
                if rng.gen::<f64>() < self.epsilon {
                    s.complement()
                } else {
                    s
                }
            })
            .collect();
        SamplePath {
            symbols,
            seed: Some(seed),
            tree_fingerprint: path.tree_fingerprint,
        }
    }
}

/// Exact law of the observed chain for a fixed noise level.
#[derive(Debug, Clone)]
pub struct PerturbedLaw {
    base: ChainLaw,
    channel: NoiseChannel,
}

/// Report of the exhaustive conditional-gap check: the worst difference
/// between observed-chain and hidden-chain conditionals over all windows
/// up to `j_max`, against the bound `c_const · ε`.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub epsilon: f64,
    pub j_max: usize,
    /// Worst gap per window length `j = 0..=j_max`.
    pub per_j: Vec<f64>,
    pub max_gap: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Report of the exhaustive floor checks: observed conditionals stay
/// above α, and the posterior probability that the latest symbol was
/// flipped stays below `(β*/α) · ε`.
#[derive(Debug, Clone)]
pub struct FloorReport {
    pub epsilon: f64,
    pub k_max: usize,
    pub alpha: f64,
    pub min_conditional: f64,
    pub conditional_holds: bool,
    pub max_flip_posterior: f64,
    pub posterior_bound: f64,
    pub posterior_holds: bool,
}

/// Exact analog of the threshold window: thresholds strictly between
/// `low` and `high` separate context nodes from their extensions under
/// the observed law. Empty when `low ≥ high`.
#[derive(Debug, Clone, Copy)]
pub struct DeltaWindow {
    pub low: f64,
    pub high: f64,
}

impl DeltaWindow {
    pub fn is_empty(self) -> bool {
        !matches!(
            self.low.partial_cmp(&self.high),
            Some(std::cmp::Ordering::Less)
        )
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

impl PerturbedLaw {
    pub fn new(base: ChainLaw, channel: NoiseChannel) -> PerturbedLaw {
        PerturbedLaw { base, channel }
    }

    pub fn base(&self) -> &ChainLaw {
        &self.base
    }

    pub fn epsilon(&self) -> f64 {
        self.channel.epsilon()
    }

    /// One forward step absorbing observed symbol `z`: the hidden chain
    /// emits `a` and the channel matches it to `z` with weight `1-ε` when
    /// equal, `ε` otherwise.
    fn step(&self, f: &mut ForwardVec, scratch: &mut Vec<f64>, z: Symbol) {
        let e = self.base.embedding();
        let eps = self.channel.epsilon();
        scratch.clear();
        scratch.resize(f.v.len(), 0.0);
        for (s, &m) in f.v.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let row = e.row(s);
            for a in Symbol::ALL {
                let w = if a == z { 1.0 - eps } else { eps };
                scratch[e.step(s, a)] += m * row[a.index()] * w;
            }
        }
        std::mem::swap(&mut f.v, scratch);
        f.rescale_if_needed();
    }

    fn forward(&self, w: Seq) -> ForwardVec {
        let mut f = ForwardVec::new(self.base.stationary().as_slice());
        let mut scratch = Vec::new();
        for z in w.symbols() {
            self.step(&mut f, &mut scratch, z);
        }
        f
    }

    /// Probability of observing `z` next, given the joint vector of a
    /// prefix; unnormalized (divide by the prefix total).
    fn next_mass(&self, f: &ForwardVec, z: Symbol) -> f64 {
        let e = self.base.embedding();
        let eps = self.channel.epsilon();
        f.v.iter()
            .enumerate()
            .map(|(s, &m)| {
                let row = e.row(s);
                m * (row[z.index()] * (1.0 - eps) + row[z.complement().index()] * eps)
            })
            .sum()
    }

    /// Exact cylinder probability `q(w)` of the observed chain.
    pub fn marginal(&self, w: Seq) -> Result<f64, Error> {
        if w.len() > EVAL_LEN_CAP {
            return Err(Error::LengthCap {
                len: w.len(),
                cap: EVAL_LEN_CAP,
            });
        }
        Ok(self.forward(w).total())
    }

    /// Conditional `q(a | w) = q(wa) / q(w)`.
    pub fn conditional(&self, a: Symbol, w: Seq) -> Result<f64, Error> {
        if w.len() + 1 > EVAL_LEN_CAP {
            return Err(Error::LengthCap {
                len: w.len() + 1,
                cap: EVAL_LEN_CAP,
            });
        }
        let f = self.forward(w);
        let total: f64 = f.v.iter().sum();
        if total == 0.0 {
            return Err(Error::UndefinedConditional(w));
        }
        Ok(self.next_mass(&f, a) / total)
    }

    /// Minimum positive cylinder probability over windows of length ≤ d.
    pub fn min_cylinder_prob(&self, d: usize) -> Result<f64, Error> {
        if d > QMIN_DEPTH_CAP {
            return Err(Error::DepthCap {
                depth: d,
                cap: QMIN_DEPTH_CAP,
            });
        }
        let mut best = f64::INFINITY;
        let init = ForwardVec::new(self.base.stationary().as_slice());
        self.walk_min(&init, d, &mut best);
        Ok(best)
    }

    fn walk_min(&self, f: &ForwardVec, depth_left: usize, best: &mut f64) {
        if depth_left == 0 {
            return;
        }
        let mut scratch = Vec::new();
        for z in Symbol::ALL {
            let mut child = f.clone();
            self.step(&mut child, &mut scratch, z);
            let q = child.total();
            if q > 0.0 {
                if q < *best {
                    *best = q;
                }
                self.walk_min(&child, depth_left - 1, best);
            }
        }
    }

    /// Exhaustively certifies that observed-chain conditionals stay within
    /// `c_const · ε` of the hidden-chain conditionals for every window of
    /// length ≤ j_max. The worst gap is an output, not an assumption.
    pub fn certify_gap(&self, j_max: usize) -> Result<GapCertificate, Error> {
        if j_max > CERTIFY_JMAX_CAP {
            return Err(Error::DepthCap {
                depth: j_max,
                cap: CERTIFY_JMAX_CAP,
            });
        }
        let mut per_j = vec![0.0f64; j_max + 1];
        let fz = ForwardVec::new(self.base.stationary().as_slice());
        let fx = ForwardVec::new(self.base.stationary().as_slice());
        self.walk_gap(&fx, &fz, 0, j_max, &mut per_j);
        let max_gap = per_j.iter().copied().fold(0.0f64, f64::max);
        let bound = self.base.tree().constants().c_const * self.channel.epsilon();
        Ok(GapCertificate {
            epsilon: self.channel.epsilon(),
            j_max,
            per_j,
            max_gap,
            bound,
            holds: max_gap <= bound + CHECK_TOL,
        })
    }

    fn walk_gap(&self, fx: &ForwardVec, fz: &ForwardVec, j: usize, j_max: usize, per_j: &mut [f64]) {
        let e = self.base.embedding();
        let px: f64 = fx.v.iter().sum();
        let qz: f64 = fz.v.iter().sum();
        let mut scratch = Vec::new();
        for a in Symbol::ALL {
            // conditional of the hidden chain given this window
            let x_next: f64 = fx
                .v
                .iter()
                .enumerate()
                .map(|(s, &m)| m * e.row(s)[a.index()])
                .sum();
            let z_next = self.next_mass(fz, a);
            if px > 0.0 && qz > 0.0 {
                let gap = (z_next / qz - x_next / px).abs();
                if gap > per_j[j] {
                    per_j[j] = gap;
                }
            }
            if j < j_max {
                let mut cx = fx.clone();
                scratch.clear();
                scratch.resize(cx.v.len(), 0.0);
                for (s, &m) in fx.v.iter().enumerate() {
                    if m != 0.0 {
                        scratch[e.step(s, a)] += m * e.row(s)[a.index()];
                    }
                }
                std::mem::swap(&mut cx.v, &mut scratch);
                cx.rescale_if_needed();
                let mut cz = fz.clone();
                self.step(&mut cz, &mut scratch, a);
                self.walk_gap(&cx, &cz, j + 1, j_max, per_j);
            }
        }
    }

    /// Exhaustively checks two floors over all windows of length ≤ k_max:
    /// observed conditionals ≥ α, and the posterior probability that the
    /// most recent symbol was flipped ≤ (β*/α) · ε.
    pub fn check_floors(&self, k_max: usize) -> Result<FloorReport, Error> {
        if k_max > FLOORS_KMAX_CAP {
            return Err(Error::DepthCap {
                depth: k_max,
                cap: FLOORS_KMAX_CAP,
            });
        }
        let constants = self.base.tree().constants();
        let eps = self.channel.epsilon();
        // joint forward vectors split by the most recent hidden symbol
        let pi = self.base.stationary().as_slice();
        let mut min_cond = f64::INFINITY;
        let mut max_post = 0.0f64;
        let root = [ForwardVec::new(pi), ForwardVec::new(pi)];
        // the root split is unused (no observation yet); conditionals at
        // the root come straight from the stationary vector
        for a in Symbol::ALL {
            let f = ForwardVec::new(pi);
            let total: f64 = f.v.iter().sum();
            min_cond = min_cond.min(self.next_mass(&f, a) / total);
        }
        self.walk_floors(&root, true, k_max, &mut min_cond, &mut max_post);
        let posterior_bound = constants.beta_star / constants.alpha * eps;
        Ok(FloorReport {
            epsilon: eps,
            k_max,
            alpha: constants.alpha,
            min_conditional: min_cond,
            conditional_holds: min_cond >= constants.alpha - CHECK_TOL,
            max_flip_posterior: max_post,
            posterior_bound,
            posterior_holds: max_post <= posterior_bound + CHECK_TOL,
        })
    }

    /// `split` holds joint vectors by the most recent hidden symbol;
    /// at the root both entries are the full stationary vector and only
    /// their sum is meaningful.
    fn walk_floors(
        &self,
        split: &[ForwardVec; 2],
        at_root: bool,
        depth_left: usize,
        min_cond: &mut f64,
        max_post: &mut f64,
    ) {
        if depth_left == 0 {
            return;
        }
        let e = self.base.embedding();
        let eps = self.channel.epsilon();
        for z in Symbol::ALL {
            // extend by observing z, tracking the hidden emission
            let mut child = [
                ForwardVec {
                    v: vec![0.0; e.num_states()],
                    exp_shift: 0,
                },
                ForwardVec {
                    v: vec![0.0; e.num_states()],
                    exp_shift: 0,
                },
            ];
            let sources: &[&ForwardVec] = if at_root {
                &[&split[0]]
            } else {
                &[&split[0], &split[1]]
            };
            for f in sources {
                for (s, &m) in f.v.iter().enumerate() {
                    if m == 0.0 {
                        continue;
                    }
                    let row = e.row(s);
                    for a in Symbol::ALL {
                        let w = if a == z { 1.0 - eps } else { eps };
                        child[a.index()].v[e.step(s, a)] += m * row[a.index()] * w;
                    }
                }
            }
            let t0: f64 = child[0].v.iter().sum();
            let t1: f64 = child[1].v.iter().sum();
            let total = t0 + t1;
            if total == 0.0 {
                continue;
            }
            // posterior that the hidden symbol differs from observed z
            let flipped = if z == Symbol::ZERO { t1 } else { t0 };
            let post = flipped / total;
            if post > *max_post {
                *max_post = post;
            }
            // conditionals for the next symbol given this window
            let merged = ForwardVec {
                v: child[0]
                    .v
                    .iter()
                    .zip(child[1].v.iter())
                    .map(|(a, b)| a + b)
                    .collect(),
                exp_shift: child[0].exp_shift,
            };
            for a in Symbol::ALL {
                let c = self.next_mass(&merged, a) / total;
                if c < *min_cond {
                    *min_cond = c;
                }
            }
            self.walk_floors(&child, false, depth_left - 1, min_cond, max_post);
        }
    }

    /// The exact threshold window at depth `d`.
    ///
    /// `high` is the smallest observed-law separation of a context from
    /// its largest suffix; `low` is the largest observed-law separation of
    /// a strict extension of a context from its suffix. A usable threshold
    /// exists exactly when `low < high`.
    pub fn exact_delta_window(&self, d: usize) -> Result<DeltaWindow, Error> {
        if d > WINDOW_DEPTH_CAP {
            return Err(Error::DepthCap {
                depth: d,
                cap: WINDOW_DEPTH_CAP,
            });
        }
        if d == 0 {
            // no nodes at all within depth 0
            return Ok(DeltaWindow {
                low: 0.0,
                high: 0.0,
            });
        }
        let mut window = DeltaWindow {
            low: 0.0,
            high: f64::INFINITY,
        };
        let init = ForwardVec::new(self.base.stationary().as_slice());
        // children of λ: node "a" paired with its suffix λ
        let mut scratch = Vec::new();
        for a in Symbol::ALL {
            let mut node = init.clone();
            self.step(&mut node, &mut scratch, a);
            let w = Seq::EMPTY.push_recent(a);
            self.walk_window(w, &node, &init, d, &mut window);
        }
        // No context within depth d means the structure is out of reach;
        // report a closed window rather than an unbounded one.
        if window.high.is_infinite() {
            window.high = 0.0;
        }
        Ok(window)
    }

    fn walk_window(
        &self,
        w: Seq,
        node: &ForwardVec,
        suffix: &ForwardVec,
        d: usize,
        window: &mut DeltaWindow,
    ) {
        let tree = self.base.tree();
        let node_total: f64 = node.v.iter().sum();
        let suf_total: f64 = suffix.v.iter().sum();
        if node_total > 0.0 && suf_total > 0.0 {
            let mut gap = 0.0f64;
            for a in Symbol::ALL {
                let qa = self.next_mass(node, a) / node_total;
                let qb = self.next_mass(suffix, a) / suf_total;
                gap = gap.max((qa - qb).abs());
            }
            if tree.contains(w) {
                window.high = window.high.min(gap);
            } else if tree.contexts().any(|c| c.is_proper_suffix_of(w)) {
                window.low = window.low.max(gap);
            }
        }
        if w.len() < d {
            let mut scratch = Vec::new();
            for a in Symbol::ALL {
                let mut cn = node.clone();
                self.step(&mut cn, &mut scratch, a);
                let mut cs = suffix.clone();
                self.step(&mut cs, &mut scratch, a);
                self.walk_window(w.push_recent(a), &cn, &cs, d, window);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::ContextTree;

    const T1: &str = "1 0.7 0.3\n00 0.2 0.8\n10 0.6 0.4\n";

    fn law(eps: f64) -> PerturbedLaw {
        let chain = ChainLaw::new(ContextTree::parse(T1).unwrap()).unwrap();
        PerturbedLaw::new(chain, NoiseChannel::new(eps).unwrap())
    }

    fn seq(s: &str) -> Seq {
        Seq::parse(s).unwrap()
    }

    #[test]
    fn channel_rejects_bad_epsilon() {
        assert!(NoiseChannel::new(-0.1).is_err());
        assert!(NoiseChannel::new(1.1).is_err());
        assert!(NoiseChannel::new(f64::NAN).is_err());
        assert!(NoiseChannel::new(0.0).is_ok());
        assert!(NoiseChannel::new(1.0).is_ok());
    }

    #[test]
    fn perturb_identity_and_complement() {
        let chain = ChainLaw::new(ContextTree::parse(T1).unwrap()).unwrap();
        let path = chain.sample(500, 3).unwrap();
        let same = NoiseChannel::new(0.0).unwrap().perturb(&path, 11);
        assert_eq!(same.symbols, path.symbols);
        let flipped = NoiseChannel::new(1.0).unwrap().perturb(&path, 11);
        assert!(flipped
            .symbols
            .iter()
            .zip(path.symbols.iter())
            .all(|(a, b)| *a == b.complement()));
    }

    #[test]
    fn perturb_flip_rate_matches_epsilon() {
        let chain = ChainLaw::new(ContextTree::parse(T1).unwrap()).unwrap();
        let n = 1_000_000;
        let path = chain.sample(n, 4).unwrap();
        let noisy = NoiseChannel::new(0.3).unwrap().perturb(&path, 12);
        let flips = noisy
            .symbols
            .iter()
            .zip(path.symbols.iter())
            .filter(|(a, b)| a != b)
            .count() as f64;
        assert!((flips / n as f64 - 0.3).abs() < 0.002);
    }

    #[test]
    fn perturb_deterministic_per_seed() {
        let chain = ChainLaw::new(ContextTree::parse(T1).unwrap()).unwrap();
        let path = chain.sample(200, 8).unwrap();
        let ch = NoiseChannel::new(0.25).unwrap();
        assert_eq!(ch.perturb(&path, 5).symbols, ch.perturb(&path, 5).symbols);
        assert_ne!(ch.perturb(&path, 5).symbols, ch.perturb(&path, 6).symbols);
    }

    #[test]
    fn half_noise_is_uniform() {
        let l = law(0.5);
        for len in 0..=5 {
            for w in Seq::all_of_len(len) {
                let q = l.marginal(w).unwrap();
                assert!((q - 0.5f64.powi(len as i32)).abs() < 1e-12, "{w}: {q}");
            }
        }
        let c = l.conditional(Symbol::ONE, seq("0110")).unwrap();
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_reduces_to_base_law() {
        let l = law(0.0);
        for len in 0..=8 {
            for w in Seq::all_of_len(len) {
                let q = l.marginal(w).unwrap();
                let p = l.base().marginal(w);
                assert!((q - p).abs() < 1e-15, "{w}");
            }
        }
    }

    #[test]
    fn single_symbol_mixture() {
        let l = law(0.1);
        let q = l.marginal(seq("1")).unwrap();
        assert!((q - 40.9 / 89.0).abs() < 1e-14, "{q}");
    }

    #[test]
    fn conditional_identity_channel_uses_context_row() {
        let l = law(0.0);
        let q = l.conditional(Symbol::ONE, seq("110")).unwrap();
        assert!((q - 0.4).abs() < 1e-14);
    }

    #[test]
    fn conditional_small_noise_stays_in_certified_interval() {
        let l = law(0.05);
        let q = l.conditional(Symbol::ONE, seq("00")).unwrap();
        // within c·eps of the context row, and inside [alpha, 1-alpha]
        assert!((q - 0.8).abs() <= 946.0 * 0.05);
        assert!((0.2..=0.8).contains(&q), "{q}");
    }

    #[test]
    fn brute_force_oracle_short_windows() {
        // independent route: the full double sum over hidden strings and
        // flip patterns, keeping only pairs whose xor is the observation
        let eps = 0.13;
        let l = law(eps);
        let chain = l.base();
        for len in 1..=6usize {
            for w in Seq::all_of_len(len) {
                let mut total = 0.0;
                for x in Seq::all_of_len(len) {
                    let px = chain.marginal(x);
                    for flips in Seq::all_of_len(len) {
                        let observed = (0..len).all(|i| {
                            x.symbol_back(i).xor(flips.symbol_back(i)) == w.symbol_back(i)
                        });
                        if !observed {
                            continue;
                        }
                        let mut p_flips = 1.0;
                        for i in 0..len {
                            p_flips *= if flips.symbol_back(i) == Symbol::ONE {
                                eps
                            } else {
                                1.0 - eps
                            };
                        }
                        total += px * p_flips;
                    }
                }
                let q = l.marginal(w).unwrap();
                assert!((q - total).abs() < 1e-12, "{w}: {q} vs {total}");
            }
        }
    }

    #[test]
    fn complement_symmetry() {
        for eps in [0.1, 0.3] {
            let a = law(eps);
            let b = law(1.0 - eps);
            for len in 0..=8usize {
                for w in Seq::all_of_len(len) {
                    let qa = b.marginal(w).unwrap();
                    let qb = a.marginal(w.complemented()).unwrap();
                    assert!((qa - qb).abs() < 1e-12, "{w} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn marginal_consistency() {
        let l = law(0.07);
        for len in 0..=9 {
            for w in Seq::all_of_len(len) {
                let q = l.marginal(w).unwrap();
                let split: f64 = Symbol::ALL
                    .iter()
                    .map(|&a| l.marginal(w.push_recent(a)).unwrap())
                    .sum();
                assert!((q - split).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn min_cylinder_examples() {
        let l = law(0.0);
        let q3 = l.min_cylinder_prob(3).unwrap();
        assert!((q3 - 3.6 / 89.0).abs() < 1e-14, "{q3}");
        let q4 = l.min_cylinder_prob(4).unwrap();
        assert!((q4 - 21.0 / 2225.0).abs() < 1e-14, "{q4}");

        let u = law(0.5);
        assert!((u.min_cylinder_prob(4).unwrap() - 1.0 / 16.0).abs() < 1e-12);

        let l1 = law(0.2);
        let direct = l1
            .marginal(seq("0"))
            .unwrap()
            .min(l1.marginal(seq("1")).unwrap());
        assert!((l1.min_cylinder_prob(1).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn certificate_zero_noise_has_zero_gap() {
        let report = law(0.0).certify_gap(6).unwrap();
        assert_eq!(report.max_gap, 0.0);
        assert!(report.holds);
    }

    #[test]
    fn certificate_holds_across_noise_grid() {
        let flat = "0 0.3 0.7\n1 0.3 0.7\n";
        for fixture in [T1, flat] {
            for eps in [0.001, 0.01, 0.05, 0.1, 0.5] {
                let chain = ChainLaw::new(ContextTree::parse(fixture).unwrap()).unwrap();
                let report = PerturbedLaw::new(chain, NoiseChannel::new(eps).unwrap())
                    .certify_gap(10)
                    .unwrap();
                assert!(
                    report.holds,
                    "eps={eps}: gap {} vs bound {}",
                    report.max_gap, report.bound
                );
                assert!(report.max_gap <= 1.0);
            }
        }
    }

    #[test]
    fn certificate_reports_true_gap_below_loose_bound() {
        let report = law(0.001).certify_gap(8).unwrap();
        assert!((report.bound - 0.946).abs() < 1e-12);
        assert!(report.holds);
        assert!(report.max_gap < report.bound);
        assert!(report.max_gap > 0.0);
    }

    #[test]
    fn certificate_gap_values_match_independent_enumeration() {
        // frozen from a separate forward implementation
        let g1 = law(0.01).certify_gap(10).unwrap();
        assert!((g1.max_gap - 0.06609444826139921).abs() < 1e-9, "{}", g1.max_gap);
        let g5 = law(0.05).certify_gap(8).unwrap();
        assert!((g5.max_gap - 0.1870116777322898).abs() < 1e-9, "{}", g5.max_gap);
    }

    #[test]
    fn floors_zero_noise_has_zero_posterior() {
        let report = law(0.0).check_floors(6).unwrap();
        assert_eq!(report.max_flip_posterior, 0.0);
        assert!(report.conditional_holds);
        assert!(report.posterior_holds);
    }

    #[test]
    fn floors_hold_on_grid() {
        for eps in [0.001, 0.01, 0.05, 0.1] {
            let report = law(eps).check_floors(8).unwrap();
            assert!(report.conditional_holds, "eps={eps}");
            assert!(report.min_conditional >= 0.2 - 1e-10, "eps={eps}");
            assert!(report.posterior_holds, "eps={eps}");
        }
    }

    #[test]
    fn flip_posterior_closed_form_on_iid_chain() {
        // independent chain with p(1) = 0.7 at eps = 0.1: the posterior
        // that the last symbol was flipped is eps·0.3/q(1) after a 1 and
        // eps·0.7/q(0) after a 0, so the worst case is 7/34
        let chain = ChainLaw::new(ContextTree::parse("0 0.3 0.7\n1 0.3 0.7\n").unwrap()).unwrap();
        let l = PerturbedLaw::new(chain, NoiseChannel::new(0.1).unwrap());
        let report = l.check_floors(1).unwrap();
        assert!(
            (report.max_flip_posterior - 7.0 / 34.0).abs() < 1e-14,
            "{}",
            report.max_flip_posterior
        );
        assert!(report.posterior_holds);
    }

    #[test]
    fn posterior_bound_value_small_noise() {
        let report = law(0.001).check_floors(6).unwrap();
        assert!((report.posterior_bound - 10.5 / 0.2 * 0.001).abs() < 1e-12);
        assert!(report.max_flip_posterior <= report.posterior_bound + 1e-10);
    }

    #[test]
    fn window_zero_noise_matches_detection_gap() {
        let l = law(0.0);
        let w = l.exact_delta_window(3).unwrap();
        assert!((w.high - 13.3 / 89.0).abs() < 1e-12, "{}", w.high);
        assert!(w.low < 1e-12);
        assert!(!w.is_empty());
    }

    #[test]
    fn window_closes_at_half_noise() {
        let w = law(0.5).exact_delta_window(4).unwrap();
        assert!(w.high.abs() < 1e-12);
        assert!(w.is_empty());
    }

    #[test]
    fn window_small_noise_stays_open() {
        // edges frozen from a separate forward implementation
        let w = law(0.01).exact_delta_window(4).unwrap();
        assert!(!w.is_empty());
        assert!((w.low - 0.02259745478029243).abs() < 1e-9, "{}", w.low);
        assert!((w.high - 0.14319825336812408).abs() < 1e-9, "{}", w.high);
    }

    #[test]
    fn caps_are_enforced() {
        let l = law(0.1);
        assert!(matches!(
            l.min_cylinder_prob(21),
            Err(Error::DepthCap { .. })
        ));
        assert!(matches!(l.certify_gap(17), Err(Error::DepthCap { .. })));
        assert!(matches!(l.check_floors(13), Err(Error::DepthCap { .. })));
        assert!(matches!(
            l.exact_delta_window(17),
            Err(Error::DepthCap { .. })
        ));
    }
}
