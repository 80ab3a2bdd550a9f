//! Exact law of the unperturbed chain: Markov embedding on length-h
//! states, stationary measure, cylinder marginals, conditionals for
//! arbitrary finite pasts, the detection gap D_k, and a stationary
//! sampler.

use rand::Rng;

use crate::error::Error;
use crate::rng::{self, GENERATOR};
use crate::seq::{mask, Seq, Symbol};
use crate::tree::ContextTree;

/// Largest tree height accepted by the embedding (2^20 states).
pub const MAX_EMBED_HEIGHT: usize = 20;
/// Heights up to this use a direct linear solve for the stationary
/// measure; larger state spaces fall back to power iteration.
pub const DIRECT_SOLVE_HEIGHT: usize = 12;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 1_000_000;

/// Order-h Markov chain on all length-h pasts realizing a context tree.
///
/// State `s` packs the last `order` true symbols (bit 0 = most recent).
/// From `s` the chain emits `a` with the matching context's row entry and
/// moves to `(s << 1 | a) & mask(order)`.
#[derive(Debug, Clone)]
pub struct MarkovEmbedding {
    order: usize,
    rows: Vec<[f64; 2]>,
}

impl MarkovEmbedding {
    pub fn new(tree: &ContextTree) -> Result<MarkovEmbedding, Error> {
        let h = tree.height();
        if h > MAX_EMBED_HEIGHT {
            return Err(Error::HeightCap {
                height: h,
                cap: MAX_EMBED_HEIGHT,
            });
        }
        if !tree.is_complete() {
            let hole = Seq::all_of_len(h)
                .find(|&past| tree.context_for(past).is_err())
                .unwrap_or(Seq::EMPTY);
            return Err(Error::Incomplete(hole));
        }
        let rows = Seq::all_of_len(h)
            .map(|past| {
                let ctx = tree.context_for(past)?;
                Ok(tree.row(ctx).expect("context row exists"))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(MarkovEmbedding { order: h, rows })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    /// Emission row of a state, `[p(0|state), p(1|state)]`.
    #[inline]
    pub fn row(&self, state: usize) -> [f64; 2] {
        self.rows[state]
    }

    /// Successor state after emitting `a`.
    #[inline]
    pub fn step(&self, state: usize, a: Symbol) -> usize {
        ((state << 1) | a.index()) & mask(self.order) as usize
    }
}

/// Stationary distribution over embedding states.
#[derive(Debug, Clone)]
pub struct StationaryMeasure {
    pi: Vec<f64>,
}

impl StationaryMeasure {
    /// Solves `π P = π`, `Σπ = 1`: directly for small state spaces,
    /// by power iteration (sup-norm tolerance 1e-12) above.
    pub fn solve(embedding: &MarkovEmbedding) -> Result<StationaryMeasure, Error> {
        let pi = if embedding.order() <= DIRECT_SOLVE_HEIGHT {
            solve_direct(embedding)?
        } else {
            solve_power(embedding)?
        };
        Ok(StationaryMeasure { pi })
    }

    #[inline]
    pub fn prob(&self, state: usize) -> f64 {
        self.pi[state]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.pi
    }
}

/// One transition sweep: `out = in · P`.
fn apply_transition(embedding: &MarkovEmbedding, v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (s, &m) in v.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let row = embedding.row(s);
        for a in Symbol::ALL {
            out[embedding.step(s, a)] += m * row[a.index()];
        }
    }
}

fn solve_direct(embedding: &MarkovEmbedding) -> Result<Vec<f64>, Error> {
    let n = embedding.num_states();
    // Rows j of (P^T - I) x = 0 for j < n-1, replaced at j = n-1 by Σx = 1.
    let mut a = vec![0.0f64; n * n];
    let mut b = vec![0.0f64; n];
    for s in 0..n {
        let row = embedding.row(s);
        for sym in Symbol::ALL {
            let t = embedding.step(s, sym);
            if t < n - 1 {
                a[t * n + s] += row[sym.index()];
            }
        }
    }
    for j in 0..n - 1 {
        a[j * n + j] -= 1.0;
    }
    for s in 0..n {
        a[(n - 1) * n + s] = 1.0;
    }
    b[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("nonempty column");
        if a[pivot * n + col].abs() < 1e-300 {
            return Err(Error::NonConvergence(0));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / diag;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in r + 1..n {
            acc -= a[r * n + k] * x[k];
        }
        x[r] = acc / a[r * n + r];
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    Ok(x)
}

fn solve_power(embedding: &MarkovEmbedding) -> Result<Vec<f64>, Error> {
    let n = embedding.num_states();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..POWER_MAX_ITERS {
        apply_transition(embedding, &v, &mut next);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let diff = v
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut v, &mut next);
        if diff < POWER_TOL {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence(POWER_MAX_ITERS))
}

/// Forward vector over embedding states with lazy power-of-two rescaling.
///
/// Rescaling multiplies by exact powers of two only, so short evaluations
/// are bit-identical to the unscaled product while arbitrarily long ones
/// cannot underflow.
#[derive(Debug, Clone)]
pub(crate) struct ForwardVec {
    pub v: Vec<f64>,
    pub exp_shift: i32,
}

const RESCALE_FLOOR: f64 = 1e-270;
const RESCALE_EXP: i32 = 900;

impl ForwardVec {
    pub fn new(init: &[f64]) -> ForwardVec {
        ForwardVec {
            v: init.to_vec(),
            exp_shift: 0,
        }
    }

    pub fn total(&self) -> f64 {
        let s: f64 = self.v.iter().sum();
        if self.exp_shift == 0 {
            s
        } else {
            scale_pow2(s, -self.exp_shift)
        }
    }

    pub fn rescale_if_needed(&mut self) {
        let s: f64 = self.v.iter().sum();
        if s != 0.0 && s < RESCALE_FLOOR {
            for x in &mut self.v {
                *x = scale_pow2(*x, RESCALE_EXP);
            }
            self.exp_shift += RESCALE_EXP;
        }
    }
}

#[inline]
fn scale_pow2(x: f64, e: i32) -> f64 {
    x * f64::powi(2.0, e)
}

/// The exact law of a stationary chain compatible with a context tree.
#[derive(Debug, Clone)]
pub struct ChainLaw {
    tree: ContextTree,
    embedding: MarkovEmbedding,
    stationary: StationaryMeasure,
}

impl ChainLaw {
    /// Builds the embedding and solves for the stationary measure.
    /// Requires a complete tree of height ≤ 20.
    pub fn new(tree: ContextTree) -> Result<ChainLaw, Error> {
        let embedding = MarkovEmbedding::new(&tree)?;
        let stationary = StationaryMeasure::solve(&embedding)?;
        Ok(ChainLaw {
            tree,
            embedding,
            stationary,
        })
    }

    pub fn tree(&self) -> &ContextTree {
        &self.tree
    }

    pub fn embedding(&self) -> &MarkovEmbedding {
        &self.embedding
    }

    pub fn stationary(&self) -> &StationaryMeasure {
        &self.stationary
    }

    /// Forward pass absorbing the symbols of `w` (oldest first); the
    /// resulting vector holds joint probabilities of `w` and each state.
    pub(crate) fn forward(&self, w: Seq) -> ForwardVec {
        let mut f = ForwardVec::new(self.stationary.as_slice());
        let mut next = vec![0.0f64; f.v.len()];
        for a in w.symbols() {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (s, &m) in f.v.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                next[self.embedding.step(s, a)] += m * self.embedding.row(s)[a.index()];
            }
            std::mem::swap(&mut f.v, &mut next);
            f.rescale_if_needed();
        }
        f
    }

    /// Stationary cylinder probability `p(w)`; `p(λ) = 1`.
    pub fn marginal(&self, w: Seq) -> f64 {
        self.forward(w).total()
    }

    /// Conditional `p(a | w)` for an arbitrary finite past.
    ///
    /// When a context is a suffix of `w` this is that context's row entry,
    /// exactly. Otherwise it is the stationary mixture `p(wa)/p(w)`; for
    /// `w = λ` that is the stationary symbol marginal.
    pub fn conditional(&self, a: Symbol, w: Seq) -> Result<f64, Error> {
        if let Some(ctx) = self.tree.contexts().find(|c| c.is_suffix_of(w)) {
            return Ok(self.tree.row(ctx).expect("context row")[a.index()]);
        }
        let f = self.forward(w);
        let total: f64 = f.v.iter().sum();
        if total == 0.0 {
            return Err(Error::UndefinedConditional(w));
        }
        let num: f64 = f
            .v
            .iter()
            .enumerate()
            .map(|(s, &m)| m * self.embedding.row(s)[a.index()])
            .sum();
        Ok(num / total)
    }

    /// The detection gap `D_k`: the smallest, over contexts of length ≤ k,
    /// worst-case difference between a context's row and the row its
    /// largest proper suffix induces under the stationary law. Infinite
    /// when no context is that short.
    pub fn signal_gap(&self, k: usize) -> f64 {
        assert!(k >= 1, "detection gap needs k >= 1");
        let mut best = f64::INFINITY;
        for w in self.tree.contexts().filter(|w| w.len() <= k) {
            let row = self.tree.row(w).expect("context row");
            let suf = w.suffix();
            let gap = Symbol::ALL
                .iter()
                .map(|&a| {
                    let base = self
                        .conditional(a, suf)
                        .expect("suffix cylinder has positive probability");
                    (row[a.index()] - base).abs()
                })
                .fold(0.0f64, f64::max);
            best = best.min(gap);
        }
        best
    }

    /// Draws a stationary path: the initial h-block comes from the
    /// stationary measure (no burn-in), later symbols from the transition
    /// rows. Deterministic for a given seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SamplePath, Error> {
        let h = self.embedding.order();
        if n < h {
            return Err(Error::SampleTooShort { n, h });
        }
        let mut rng = rng::rng_from(rng::mix(seed, &[rng::STREAM_SAMPLE]));
        let mut symbols = Vec::with_capacity(n);

        // Inverse-CDF draw of the initial state.
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut state = self.embedding.num_states() - 1;
        for (s, &p) in self.stationary.as_slice().iter().enumerate() {
            acc += p;
            if u < acc {
                state = s;
                break;
            }
        }
        let init = Seq::from_bits(h, state as u64);
        symbols.extend(init.symbols());

        for _ in h..n {
            let p0 = self.embedding.row(state)[0];
            let a = if rng.gen::<f64>() < p0 {
                Symbol::ZERO
            } else {
                Symbol::ONE
            };
            symbols.push(a);
            state = self.embedding.step(state, a);
        }
        Ok(SamplePath {
            symbols,
            seed: Some(seed),
            tree_fingerprint: Some(self.tree.fingerprint()),
        })
    }
}

/// A finite realization of a chain, with provenance for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub symbols: Vec<Symbol>,
    pub seed: Option<u64>,
    pub tree_fingerprint: Option<u64>,
}

impl SamplePath {
    pub fn from_symbols(symbols: Vec<Symbol>) -> SamplePath {
        SamplePath {
            symbols,
            seed: None,
            tree_fingerprint: None,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Writes the sample file format: `#` header lines carrying
    /// provenance, then one line of `0`/`1` characters.
    pub fn write_to(&self, mut w: impl std::io::Write) -> Result<(), Error> {
        write!(w, "# n={} generator={}", self.symbols.len(), GENERATOR)?;
        if let Some(seed) = self.seed {
            write!(w, " seed={seed}")?;
        }
        if let Some(fp) = self.tree_fingerprint {
            write!(w, " tree={fp:016x}")?;
        }
        writeln!(w)?;
        // chunked so long paths never need a second full-size buffer
        let mut buf = Vec::with_capacity(1 << 16);
        for s in &self.symbols {
            buf.push(s.to_char() as u8);
            if buf.len() == buf.capacity() {
                w.write_all(&buf)?;
                buf.clear();
            }
        }
        buf.push(b'\n');
        w.write_all(&buf)?;
        Ok(())
    }

    /// Reads the sample file format: `#` lines are headers, newlines are
    /// ignored, anything else must be `0` or `1`.
    pub fn read_from(text: &str) -> Result<SamplePath, Error> {
        let mut symbols = Vec::new();
        let mut seed = None;
        let mut fingerprint = None;
        for line in text.lines() {
            if let Some(rest) = line.trim_start().strip_prefix('#') {
                for token in rest.split_whitespace() {
                    if let Some(v) = token.strip_prefix("seed=") {
                        seed = v.parse::<u64>().ok();
                    } else if let Some(v) = token.strip_prefix("tree=") {
                        fingerprint = u64::from_str_radix(v, 16).ok();
                    }
                }
                continue;
            }
            for c in line.chars() {
                if c == '\r' {
                    continue;
                }
                let s = Symbol::from_char(c)
                    .map_err(|_| Error::SampleFormat(format!("unexpected character {c:?}")))?;
                symbols.push(s);
            }
        }
        Ok(SamplePath {
            symbols,
            seed,
            tree_fingerprint: fingerprint,
        })
    }
}
