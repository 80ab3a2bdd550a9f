//! Probabilistic context trees over the binary alphabet.
//!
//! A context tree is a finite set of binary sequences (the contexts) in
//! which no context is a proper suffix of another, together with one
//! next-symbol distribution per context. The tree file format is plain
//! text: `#` starts a comment, and each remaining line reads
//! `<context> <p0> <p1>` with the rightmost context symbol being the
//! most recent one. The empty context λ is written as `.`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::Error;
use crate::seq::{Seq, Symbol};

/// Row-sum tolerance for probabilities built programmatically.
pub const EXACT_ROW_TOL: f64 = 1e-12;
/// Row-sum tolerance when parsing decimal text.
pub const PARSE_ROW_TOL: f64 = 1e-9;

/// A probabilistic context tree: contexts plus per-context transition rows.
///
/// Rows are stored exactly as given; parsing never renormalizes, so
/// serializing and re-parsing reproduces every probability bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextTree {
    rows: BTreeMap<Seq, [f64; 2]>,
    height: usize,
    complete: bool,
    irreducible: bool,
}

impl ContextTree {
    /// Builds and validates a tree from explicit rows (tolerance 1e-12).
    pub fn new(rows: Vec<(Seq, [f64; 2])>) -> Result<ContextTree, Error> {
        Self::build(rows, EXACT_ROW_TOL)
    }

    /// Parses the tree file format (row-sum tolerance 1e-9 for decimal text).
    pub fn parse(text: &str) -> Result<ContextTree, Error> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let mut fields = content.split_whitespace();
            let Some(ctx) = fields.next() else { continue };
            let (p0, p1) = match (fields.next(), fields.next(), fields.next()) {
                (Some(p0), Some(p1), None) => (p0, p1),
                _ => {
                    return Err(Error::TreeFormat {
                        line,
                        msg: format!("expected `<context> <p0> <p1>`, got {content:?}"),
                    })
                }
            };
            let ctx = Seq::parse(ctx).map_err(|e| Error::TreeFormat {
                line,
                msg: e.to_string(),
            })?;
            let parse_prob = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::TreeFormat {
                    line,
                    msg: format!("bad probability {s:?}"),
                })
            };
            rows.push((ctx, [parse_prob(p0)?, parse_prob(p1)?]));
        }
        Self::build(rows, PARSE_ROW_TOL)
    }

    fn build(rows: Vec<(Seq, [f64; 2])>, row_tol: f64) -> Result<ContextTree, Error> {
        if rows.is_empty() {
            return Err(Error::TreeFormat {
                line: 0,
                msg: "tree has no contexts".into(),
            });
        }
        let mut map = BTreeMap::new();
        for (ctx, row) in rows {
            let sum = row[0] + row[1];
            if (sum - 1.0).abs() > row_tol {
                return Err(Error::RowSum { context: ctx, sum });
            }
            for a in Symbol::ALL {
                let p = row[a.index()];
                if !p.is_finite() || p <= 0.0 {
                    return Err(Error::NonNull {
                        context: ctx,
                        symbol: a.to_char(),
                        value: p,
                    });
                }
            }
            if map.insert(ctx, row).is_some() {
                return Err(Error::DuplicateContext(ctx));
            }
        }

        let contexts: Vec<Seq> = map.keys().copied().collect();
        for &w in &contexts {
            for &v in &contexts {
                if w.is_proper_suffix_of(v) {
                    return Err(Error::SuffixViolation {
                        shorter: w,
                        longer: v,
                    });
                }
            }
        }

        let height = contexts.iter().map(|c| c.len()).max().unwrap_or(0);
        let complete = Self::check_complete(&contexts, height);
        let irreducible = Self::check_irreducible(&contexts);
        Ok(ContextTree {
            rows: map,
            height,
            complete,
            irreducible,
        })
    }

    /// Every length-`height` string must have exactly one context as a
    /// suffix; the suffix property already rules out more than one.
    fn check_complete(contexts: &[Seq], height: usize) -> bool {
        Seq::all_of_len(height).all(|past| contexts.iter().any(|c| c.is_suffix_of(past)))
    }

    /// A tree is irreducible when no context can be replaced by a proper
    /// suffix while keeping the suffix property. Checking the largest
    /// suffix suffices: any violation it causes persists for every
    /// shorter replacement.
    fn check_irreducible(contexts: &[Seq]) -> bool {
        contexts.iter().all(|&w| {
            if w.is_empty() {
                return true;
            }
            let s = w.suffix();
            contexts
                .iter()
                .filter(|&&v| v != w)
                .any(|&v| s.is_proper_suffix_of(v) || v.is_proper_suffix_of(s) || v == s)
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_contexts(&self) -> usize {
        self.rows.len()
    }

    /// Every past of length ≥ height has a matching context.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn contexts(&self) -> impl Iterator<Item = Seq> + '_ {
        self.rows.keys().copied()
    }

    pub fn context_set(&self) -> BTreeSet<Seq> {
        self.rows.keys().copied().collect()
    }

    pub fn contains(&self, w: Seq) -> bool {
        self.rows.contains_key(&w)
    }

    /// The transition row of a context, `[p(0|w), p(1|w)]`.
    pub fn row(&self, context: Seq) -> Option<[f64; 2]> {
        self.rows.get(&context).copied()
    }

    pub fn prob(&self, a: Symbol, context: Seq) -> Option<f64> {
        self.rows.get(&context).map(|r| r[a.index()])
    }

    /// The unique context that is a suffix of `past`.
    ///
    /// The past must be at least as long as the tree height; shorter pasts
    /// do not determine the context in general.
    pub fn context_for(&self, past: Seq) -> Result<Seq, Error> {
        if past.len() < self.height {
            return Err(Error::PastTooShort {
                need: self.height,
                got: past.len(),
            });
        }
        self.rows
            .keys()
            .copied()
            .find(|c| c.is_suffix_of(past))
            .ok_or(Error::NoMatchingContext(past))
    }

    /// The tree truncated to level `K`: contexts of length ≤ K together
    /// with the length-K suffixes of longer contexts.
    pub fn truncated(&self, k: usize) -> BTreeSet<Seq> {
        truncate_set(self.contexts(), k)
    }

    /// Shortest depth from which every node of the level-`K` truncation
    /// extends to a full context: `max_{w ∈ τ|_K} min{ℓ(v) : v ∈ τ, w ⪯ v}`.
    /// Any strictly larger depth is a valid estimation depth for level-`K`
    /// recovery.
    pub fn min_valid_depth(&self, k: usize) -> usize {
        self.truncated(k)
            .iter()
            .map(|&w| {
                self.contexts()
                    .filter(|&v| w.is_suffix_of(v))
                    .map(|v| v.len())
                    .min()
                    .expect("truncation nodes extend to contexts")
            })
            .max()
            .unwrap_or(0)
    }

    /// Derived scalar constants of the tree; see [`TreeConstants`].
    pub fn constants(&self) -> TreeConstants {
        let alpha = self
            .rows
            .values()
            .flat_map(|r| r.iter().copied())
            .fold(f64::INFINITY, f64::min);

        // β_k is a sup over ordered context pairs sharing a common proper
        // suffix of length k; the pair (w, w) contributes 0, and k = 0
        // admits every pair of nonempty contexts.
        let contexts: Vec<Seq> = self.contexts().collect();
        let mut beta_seq = Vec::new();
        for k in 0..self.height {
            let mut sup = 0.0f64;
            for &w in &contexts {
                for &v in &contexts {
                    if w.len() <= k || v.len() <= k || w.last_k(k) != v.last_k(k) {
                        continue;
                    }
                    for a in Symbol::ALL {
                        let ratio = self.rows[&w][a.index()] / self.rows[&v][a.index()];
                        sup = sup.max((1.0 - ratio).abs());
                    }
                }
            }
            beta_seq.push(sup);
        }

        let beta: f64 = beta_seq.iter().sum();
        let beta_star: f64 = beta_seq.iter().map(|b| 1.0 + b).product();
        let c_const = 1.0 + 4.0 * beta * beta_star / alpha;
        TreeConstants {
            alpha,
            beta_seq,
            beta,
            beta_star,
            c_const,
        }
    }

    /// Serializes to the tree file format, bit-exact on probabilities.
    pub fn serialize(&self) -> String {
        self.serialize_with_header(&[])
    }

    /// Serializes with extra `#` header comment lines.
    pub fn serialize_with_header(&self, header: &[String]) -> String {
        let mut out = String::new();
        out.push_str("# context tree: <context> <p0> <p1>; rightmost symbol = most recent\n");
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let mut keys: Vec<Seq> = self.rows.keys().copied().collect();
        keys.sort_by_key(|s| (s.len(), s.bits()));
        for key in keys {
            let row = self.rows[&key];
            let _ = writeln!(out, "{key} {} {}", row[0], row[1]);
        }
        out
    }

    /// 64-bit FNV-1a fingerprint of the canonical serialization (header
    /// excluded); recorded in sample headers for provenance.
    pub fn fingerprint(&self) -> u64 {
        let mut body = String::new();
        let mut keys: Vec<Seq> = self.rows.keys().copied().collect();
        keys.sort_by_key(|s| (s.len(), s.bits()));
        for key in keys {
            let row = self.rows[&key];
            let _ = writeln!(body, "{key} {} {}", row[0], row[1]);
        }
        let mut hash = 0xcbf29ce484222325u64;
        for byte in body.bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        hash
    }
}

/// Truncates an arbitrary context set to level `K`: members of length ≤ K
/// plus the length-K suffixes of longer members. The result keeps the
/// suffix property whenever the input has it.
pub fn truncate_set(contexts: impl Iterator<Item = Seq>, k: usize) -> BTreeSet<Seq> {
    let mut out = BTreeSet::new();
    for c in contexts {
        if c.len() <= k {
            out.insert(c);
        } else {
            out.insert(c.last_k(k));
        }
    }
    out
}

/// Scalars derived from a tree's transition rows.
///
/// `alpha` is the smallest transition probability. `beta_seq[k]` is the
/// worst relative row discrepancy over ordered context pairs sharing a
/// common proper suffix of length `k`; it vanishes for `k ≥ height`, so
/// the sum `beta` and the product `beta_star = Π(1+β_k)` are finite by
/// construction. `c_const = 1 + 4·β·β*/α` scales the noise level in the
/// perturbation bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeConstants {
    pub alpha: f64,
    pub beta_seq: Vec<f64>,
    pub beta: f64,
    pub beta_star: f64,
    pub c_const: f64,
}
