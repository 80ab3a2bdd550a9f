//! Seeded Monte Carlo recovery experiments over (ε, n) grids.
//!
//! Each grid point runs independent replicates of the full pipeline —
//! sample the chain, pass it through the flip channel, estimate the tree,
//! compare truncations — and reports the error frequency next to the
//! theoretical bound. Chain paths and flip patterns draw from separate
//! seed streams, so changing ε never changes the underlying paths.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bounds::{recovery_error_bound, theoretical_window_of, BoundParams};
use crate::chain::ChainLaw;
use crate::error::Error;
use crate::estimator::{compare_truncated_sets, estimate_tree};
use crate::noise::{NoiseChannel, PerturbedLaw};
use crate::rng;
use crate::tree::ContextTree;

/// Replicate cap per run; beyond this, shard across runs.
pub const REPLICATES_CAP: usize = 100_000;
/// Sample-size cap per run.
pub const SAMPLE_SIZE_CAP: usize = 100_000_000;

/// Threshold choice for the estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaChoice {
    Explicit(f64),
    /// Midpoint of the exact threshold window at each noise level;
    /// grid points with an empty window are skipped.
    Auto,
}

/// A recovery experiment over an (ε, n) grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub tree_path: String,
    pub eps_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub delta: DeltaChoice,
    pub d: usize,
    pub k: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Parses the `key=value` config format; `#` starts a comment.
    ///
    /// Keys: `tree`, `eps` (comma list), `n` (comma list),
    /// `delta` (number or `auto`), `d`, `K`, `replicates`, `seed`.
    pub fn parse(text: &str) -> Result<ExperimentConfig, Error> {
        let mut tree_path = None;
        let mut eps_grid = None;
        let mut n_grid = None;
        let mut delta = None;
        let mut d = None;
        let mut k = None;
        let mut replicates = None;
        let mut seed = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::ConfigFormat {
                    line,
                    msg: format!("expected key=value, got {content:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| Error::ConfigFormat { line, msg };
            match key {
                "tree" => tree_path = Some(value.to_string()),
                "eps" => {
                    eps_grid = Some(
                        value
                            .split(',')
                            .map(|v| {
                                v.trim()
                                    .parse::<f64>()
                                    .map_err(|_| bad(format!("bad eps entry {v:?}")))
                            })
                            .collect::<Result<Vec<f64>, Error>>()?,
                    )
                }
                "n" => {
                    n_grid = Some(
                        value
                            .split(',')
                            .map(|v| {
                                v.trim()
                                    .parse::<usize>()
                                    .map_err(|_| bad(format!("bad n entry {v:?}")))
                            })
                            .collect::<Result<Vec<usize>, Error>>()?,
                    )
                }
                "delta" => {
                    delta = Some(if value == "auto" {
                        DeltaChoice::Auto
                    } else {
                        DeltaChoice::Explicit(
                            value
                                .parse::<f64>()
                                .map_err(|_| bad(format!("bad delta {value:?}")))?,
                        )
                    })
                }
                "d" => {
                    d = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| bad(format!("bad d {value:?}")))?,
                    )
                }
                "K" => {
                    k = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| bad(format!("bad K {value:?}")))?,
                    )
                }
                "replicates" => {
                    replicates = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| bad(format!("bad replicates {value:?}")))?,
                    )
                }
                "seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| bad(format!("bad seed {value:?}")))?,
                    )
                }
                other => {
                    return Err(Error::ConfigFormat {
                        line,
                        msg: format!("unknown key {other:?}"),
                    })
                }
            }
        }

        let missing = |name: &str| Error::ConfigInvalid(format!("missing key {name}"));
        let config = ExperimentConfig {
            tree_path: tree_path.ok_or_else(|| missing("tree"))?,
            eps_grid: eps_grid.ok_or_else(|| missing("eps"))?,
            n_grid: n_grid.ok_or_else(|| missing("n"))?,
            delta: delta.ok_or_else(|| missing("delta"))?,
            d: d.ok_or_else(|| missing("d"))?,
            k: k.ok_or_else(|| missing("K"))?,
            replicates: replicates.ok_or_else(|| missing("replicates"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.eps_grid.is_empty() || self.n_grid.is_empty() {
            return Err(Error::ConfigInvalid("empty grid".into()));
        }
        for &e in &self.eps_grid {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::ConfigInvalid(format!("eps {e} outside [0,1]")));
            }
        }
        if self.replicates == 0 {
            return Err(Error::ConfigInvalid("replicates must be at least 1".into()));
        }
        if self.replicates > REPLICATES_CAP {
            return Err(Error::ConfigInvalid(format!(
                "replicates {} exceeds the cap {REPLICATES_CAP}; shard across runs",
                self.replicates
            )));
        }
        if self.d == 0 {
            return Err(Error::ConfigInvalid("d must be at least 1".into()));
        }
        let n_min = *self.n_grid.iter().min().expect("nonempty");
        if self.d >= n_min {
            return Err(Error::ConfigInvalid(format!(
                "d = {} must be below the smallest n = {n_min}",
                self.d
            )));
        }
        let n_max = *self.n_grid.iter().max().expect("nonempty");
        if n_max > SAMPLE_SIZE_CAP {
            return Err(Error::ConfigInvalid(format!(
                "n = {n_max} exceeds the cap {SAMPLE_SIZE_CAP}; shard across runs"
            )));
        }
        if self.k == 0 {
            return Err(Error::ConfigInvalid("K must be at least 1".into()));
        }
        Ok(())
    }
}

/// Row status in the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Admissible,
    Inadmissible,
    /// Auto threshold requested but the exact window was empty.
    Skipped,
}

/// One grid point of the recovery report.
#[derive(Debug, Clone)]
pub struct RecoveryRow {
    pub epsilon: f64,
    pub n: usize,
    pub delta: Option<f64>,
    pub d: usize,
    pub k: usize,
    pub replicates: usize,
    pub errors: Option<u64>,
    pub freq: Option<f64>,
    pub bound: Option<f64>,
    pub status: RowStatus,
}

/// Per-noise-level window diagnostics recorded in the report header.
#[derive(Debug, Clone)]
pub struct WindowNote {
    pub epsilon: f64,
    pub theoretical: (f64, f64),
    pub exact: (f64, f64),
    pub chosen_delta: Option<f64>,
}

/// Full result of a recovery experiment.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub rows: Vec<RecoveryRow>,
    pub windows: Vec<WindowNote>,
    pub seed: u64,
    pub tree_fingerprint: u64,
}

impl RecoveryReport {
    /// Renders the TSV report: `#` header comments carry versions, seed
    /// streams, and both threshold windows per noise level.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# vlmc={} generator={} mixer={}",
            env!("CARGO_PKG_VERSION"),
            rng::GENERATOR,
            rng::MIXER
        );
        let _ = writeln!(
            out,
            "# seed={} tree={:016x}",
            self.seed, self.tree_fingerprint
        );
        for w in &self.windows {
            let _ = writeln!(
                out,
                "# eps={} theoretical_window=({:.6},{:.6}) exact_window=({:.6},{:.6}) delta={}",
                w.epsilon,
                w.theoretical.0,
                w.theoretical.1,
                w.exact.0,
                w.exact.1,
                w.chosen_delta
                    .map(|d| d.to_string())
                    .unwrap_or_else(|| "skipped".into()),
            );
        }
        let _ = writeln!(
            out,
            "eps\tn\tdelta\td\tK\treplicates\terrors\tfreq\tbound\tadmissible"
        );
        for r in &self.rows {
            let delta = r
                .delta
                .map(|d| d.to_string())
                .unwrap_or_else(|| "na".into());
            let errors = r
                .errors
                .map(|e| e.to_string())
                .unwrap_or_else(|| "na".into());
            let freq = r.freq.map(|f| f.to_string()).unwrap_or_else(|| "na".into());
            let bound = r
                .bound
                .map(|b| b.to_string())
                .unwrap_or_else(|| "na".into());
            let status = match r.status {
                RowStatus::Admissible => "yes",
                RowStatus::Inadmissible => "no",
                RowStatus::Skipped => "skipped",
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.epsilon, r.n, delta, r.d, r.k, r.replicates, errors, freq, bound, status
            );
        }
        out
    }
}

/// Runs the experiment: replicates are independent and executed in
/// parallel; the error count is an order-free sum, so reports are
/// bit-identical across runs and thread schedules.
pub fn run_recovery(tree: &ContextTree, config: &ExperimentConfig) -> Result<RecoveryReport, Error> {
    config.validate()?;
    let chain = ChainLaw::new(tree.clone())?;
    let truth = tree.context_set();
    let mut rows = Vec::new();
    let mut windows = Vec::new();

    for (ei, &eps) in config.eps_grid.iter().enumerate() {
        let channel = NoiseChannel::new(eps)?;
        let law = PerturbedLaw::new(chain.clone(), channel);
        // an explicit threshold does not need the exact window, so a
        // depth beyond the exhaustive-scan cap only degrades the header
        let exact = match law.exact_delta_window(config.d) {
            Ok(w) => Some(w),
            Err(Error::DepthCap { .. }) if matches!(config.delta, DeltaChoice::Explicit(_)) => {
                None
            }
            Err(e) => return Err(e),
        };
        let theo = theoretical_window_of(&chain, eps, config.d);
        let delta = match config.delta {
            DeltaChoice::Explicit(v) => Some(v),
            DeltaChoice::Auto => exact.and_then(|w| (!w.is_empty()).then(|| w.midpoint())),
        };
        windows.push(WindowNote {
            epsilon: eps,
            theoretical: (theo.low, theo.high),
            exact: exact.map_or((f64::NAN, f64::NAN), |w| (w.low, w.high)),
            chosen_delta: delta,
        });

        // the model-derived bound inputs are n-independent
        let base_params = match delta {
            Some(delta) => match BoundParams::derive(&law, config.d, config.k, 0, delta) {
                Ok(params) => Some(params),
                Err(Error::DepthCap { .. }) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };

        for (ni, &n) in config.n_grid.iter().enumerate() {
            let Some(delta) = delta else {
                rows.push(RecoveryRow {
                    epsilon: eps,
                    n,
                    delta: None,
                    d: config.d,
                    k: config.k,
                    replicates: config.replicates,
                    errors: None,
                    freq: None,
                    bound: None,
                    status: RowStatus::Skipped,
                });
                continue;
            };

            let errors = (0..config.replicates)
                .into_par_iter()
                .map(|r| {
                    replicate_error(
                        &chain, &truth, config, eps, n, delta, ei as u64, ni as u64, r as u64,
                    )
                    .map(u64::from)
                })
                .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
            let freq = errors as f64 / config.replicates as f64;

            let (bound, admissible) = match &base_params {
                Some(base) => {
                    let params = BoundParams {
                        n: n as u64,
                        ..base.clone()
                    };
                    (
                        recovery_error_bound(&params).ok().map(|b| b.raw),
                        params.is_admissible(),
                    )
                }
                None => (None, false),
            };
            rows.push(RecoveryRow {
                epsilon: eps,
                n,
                delta: Some(delta),
                d: config.d,
                k: config.k,
                replicates: config.replicates,
                errors: Some(errors),
                freq: Some(freq),
                bound,
                status: if admissible {
                    RowStatus::Admissible
                } else {
                    RowStatus::Inadmissible
                },
            });
        }
    }

    Ok(RecoveryReport {
        rows,
        windows,
        seed: config.seed,
        tree_fingerprint: tree.fingerprint(),
    })
}

/// One replicate: sample, perturb, estimate, compare at level K.
/// The chain seed ignores the noise index on purpose.
#[allow(clippy::too_many_arguments)]
fn replicate_error(
    chain: &ChainLaw,
    truth: &std::collections::BTreeSet<crate::seq::Seq>,
    config: &ExperimentConfig,
    eps: f64,
    n: usize,
    delta: f64,
    eps_idx: u64,
    n_idx: u64,
    replicate: u64,
) -> Result<bool, Error> {
    let sample_seed = rng::mix(config.seed, &[rng::STREAM_SAMPLE, n_idx, replicate]);
    let flip_seed = rng::mix(config.seed, &[rng::STREAM_FLIP, eps_idx, n_idx, replicate]);
    let clean = chain.sample(n, sample_seed)?;
    let noisy = NoiseChannel::new(eps)?.perturb(&clean, flip_seed);
    let est = estimate_tree(&noisy, delta, config.d)?;
    let report = compare_truncated_sets(&est.contexts, truth, config.k);
    Ok(!report.equal)
}
