//! The explicit recovery error bound, its admissibility conditions, and
//! the theoretical threshold window.
//!
//! For depth d, truncation level K, threshold δ, noise ε and sample size
//! n, the error probability of level-K recovery is bounded by
//!
//! ```text
//! 4·e^{1/e}·(|A|+1)·|A|^{d+1} · exp[ −(n−d)·m²·q_d² / (256·e·(1+β)·|A|²·(d+1)) ]
//! ```
//!
//! with margin `m = min(δ, D_d−δ) − 2·ε·c_const`, valid once d exceeds the
//! minimal depth for level K, δ sits inside the theoretical window, and n
//! exceeds the minimal sample size below.

use crate::chain::ChainLaw;
use crate::error::Error;
use crate::noise::{DeltaWindow, PerturbedLaw};
use crate::seq::ALPHABET;

/// Minimal-sample-size computations beyond this are reported as failures
/// instead of astronomically large integers.
pub const MIN_N_CAP: f64 = 1e12;

/// Everything the bound formula consumes. The model-derived fields can be
/// filled by [`BoundParams::derive`] or pinned directly.
#[derive(Debug, Clone)]
pub struct BoundParams {
    pub d: usize,
    pub k: usize,
    pub n: u64,
    pub delta: f64,
    pub epsilon: f64,
    /// `1 + 4ββ*/α` of the underlying tree.
    pub c_const: f64,
    /// Summed continuity rate β of the underlying tree.
    pub beta: f64,
    /// Detection gap `D_d` of the hidden chain.
    pub signal_gap: f64,
    /// Minimum positive cylinder probability `q_d` of the observed chain.
    pub min_cylinder: f64,
    /// `min_valid_depth(tree, K)`; d must exceed this.
    pub min_depth: usize,
}

/// Raw and clamped bound values; the raw value often exceeds 1 at desk
/// scale because the constants are loose.
#[derive(Debug, Clone, Copy)]
pub struct BoundValue {
    pub raw: f64,
    pub clamped: f64,
}

impl BoundParams {
    /// Fills the model-derived fields from the exact law engines.
    pub fn derive(
        law: &PerturbedLaw,
        d: usize,
        k: usize,
        n: u64,
        delta: f64,
    ) -> Result<BoundParams, Error> {
        let tree = law.base().tree();
        let constants = tree.constants();
        Ok(BoundParams {
            d,
            k,
            n,
            delta,
            epsilon: law.epsilon(),
            c_const: constants.c_const,
            beta: constants.beta,
            signal_gap: law.base().signal_gap(d),
            min_cylinder: law.min_cylinder_prob(d)?,
            min_depth: tree.min_valid_depth(k),
        })
    }

    /// `min(δ, D_d−δ) − 2·ε·c_const`; the quantity the exponent squares.
    pub fn margin(&self) -> f64 {
        self.delta.min(self.signal_gap - self.delta) - 2.0 * self.epsilon * self.c_const
    }

    /// Checks every strict admissibility condition, naming the first
    /// violated one.
    pub fn check_admissible(&self) -> Result<(), Error> {
        if self.d <= self.min_depth {
            return Err(Error::Inadmissible(format!(
                "depth d = {} must exceed the minimal level-{} depth {}",
                self.d, self.k, self.min_depth
            )));
        }
        let window = theoretical_delta_window(self.c_const, self.signal_gap, self.epsilon);
        if window.is_empty() {
            return Err(Error::EmptyWindow {
                low: window.low,
                high: window.high,
            });
        }
        if !(self.delta > window.low && self.delta < window.high) {
            return Err(Error::Inadmissible(format!(
                "threshold {} outside the window ({}, {})",
                self.delta, window.low, window.high
            )));
        }
        if self.min_cylinder.is_nan() || self.min_cylinder <= 0.0 {
            return Err(Error::Inadmissible(
                "minimum cylinder probability is zero".into(),
            ));
        }
        let min_n = min_sample_size(self)?;
        if self.n < min_n {
            return Err(Error::Inadmissible(format!(
                "n = {} is below the minimal sample size {}",
                self.n, min_n
            )));
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.check_admissible().is_ok()
    }
}

/// Evaluates the recovery error bound.
///
/// The margin may be zero (the degenerate window edge, where the value is
/// just the prefactor); a negative margin, a too-small depth, or a
/// zero cylinder floor are rejected with the violated condition named.
pub fn recovery_error_bound(params: &BoundParams) -> Result<BoundValue, Error> {
    if params.d <= params.min_depth {
        return Err(Error::Inadmissible(format!(
            "depth d = {} must exceed the minimal level-{} depth {}",
            params.d, params.k, params.min_depth
        )));
    }
    if params.min_cylinder.is_nan() || params.min_cylinder <= 0.0 {
        return Err(Error::Inadmissible(
            "minimum cylinder probability is zero".into(),
        ));
    }
    if params.n <= params.d as u64 {
        return Err(Error::Inadmissible(format!(
            "n = {} must exceed d = {}",
            params.n, params.d
        )));
    }
    let margin = params.margin();
    if margin < 0.0 {
        return Err(Error::Inadmissible(format!(
            "margin min(δ, D_d−δ) − 2εc = {margin} is negative"
        )));
    }
    let a = ALPHABET as f64;
    let e = std::f64::consts::E;
    let prefactor = 4.0 * (1.0 / e).exp() * (a + 1.0) * a.powi(params.d as i32 + 1);
    let denom = 256.0 * e * (1.0 + params.beta) * a * a * (params.d as f64 + 1.0);
    let exponent = -((params.n - params.d as u64) as f64)
        * (margin * params.min_cylinder).powi(2)
        / denom;
    let raw = prefactor * exponent.exp();
    Ok(BoundValue {
        raw,
        clamped: raw.min(1.0),
    })
}

/// Smallest sample size for which the bound applies:
/// the least integer n with `n > 4(|A|+1) / (margin · q_d) + d`.
pub fn min_sample_size(params: &BoundParams) -> Result<u64, Error> {
    let margin = params.margin();
    if margin <= 0.0 {
        let window = theoretical_delta_window(params.c_const, params.signal_gap, params.epsilon);
        return Err(Error::EmptyWindow {
            low: window.low.min(params.delta),
            high: window.high.max(params.delta),
        });
    }
    let a = ALPHABET as f64;
    let rhs = 4.0 * (a + 1.0) / (margin * params.min_cylinder) + params.d as f64;
    if !rhs.is_finite() || rhs > MIN_N_CAP {
        return Err(Error::MinSampleSizeCap { cap: MIN_N_CAP });
    }
    Ok(rhs.floor() as u64 + 1)
}

/// The theoretical threshold window `(2·c·ε, D_d − 2·c·ε)`.
pub fn theoretical_delta_window(c_const: f64, signal_gap: f64, epsilon: f64) -> DeltaWindow {
    DeltaWindow {
        low: 2.0 * c_const * epsilon,
        high: signal_gap - 2.0 * c_const * epsilon,
    }
}

/// Theoretical window from the laws themselves.
pub fn theoretical_window_of(chain: &ChainLaw, epsilon: f64, d: usize) -> DeltaWindow {
    theoretical_delta_window(chain.tree().constants().c_const, chain.signal_gap(d), epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    const D2: f64 = 133.0 / 890.0;

    fn t1_params() -> BoundParams {
        BoundParams {
            d: 3,
            k: 2,
            n: 100_000,
            delta: 0.07,
            epsilon: 0.0,
            c_const: 946.0,
            beta: 4.5,
            signal_gap: D2,
            min_cylinder: 3.6 / 89.0,
            min_depth: 2,
        }
    }

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn pinned_bound_values() {
        // direct substitution, frozen: T1 at d=3, δ=0.07, n=1e5, ε=0
        let a = t1_params();
        assert!(rel_close(recovery_error_bound(&a).unwrap().raw, 277.37259805411446));
        assert_eq!(min_sample_size(&a).unwrap(), 4242);

        // d=4, n=1e6, q_4 = 21/2225
        let b = BoundParams {
            d: 4,
            n: 1_000_000,
            min_cylinder: 21.0 / 2225.0,
            ..t1_params()
        };
        assert!(rel_close(recovery_error_bound(&b).unwrap().raw, 554.7492953030916));
        assert_eq!(min_sample_size(&b).unwrap(), 18168);

        // small positive noise, d=4, n=1e7, pinned observed-cylinder floor
        let c = BoundParams {
            d: 4,
            n: 10_000_000,
            epsilon: 1e-5,
            min_cylinder: 0.009441222426292235,
            ..t1_params()
        };
        assert!(rel_close(recovery_error_bound(&c).unwrap().raw, 554.7356038291352));
        assert_eq!(min_sample_size(&c).unwrap(), 24887);
    }

    #[test]
    fn degenerate_margin_yields_prefactor() {
        // ε chosen so the margin is exactly zero: bound = 4·e^{1/e}·3·2^{d+1}
        let mut p = t1_params();
        p.epsilon = p.delta.min(p.signal_gap - p.delta) / (2.0 * p.c_const);
        assert!(p.margin().abs() < 1e-15);
        let v = recovery_error_bound(&p).unwrap();
        assert!(rel_close(v.raw, 277.3762293138751));
        assert_eq!(v.clamped, 1.0);
        // but no finite sample size qualifies at zero margin
        assert!(min_sample_size(&p).is_err());
    }

    #[test]
    fn bound_decreases_in_n() {
        let mut prev = f64::INFINITY;
        for i in 0..10u64 {
            let p = BoundParams {
                n: 10_000 + i * 50_000,
                ..t1_params()
            };
            let v = recovery_error_bound(&p).unwrap().raw;
            assert!(v < prev, "n={}: {v} !< {prev}", p.n);
            prev = v;
        }
    }

    #[test]
    fn bound_increases_in_d_for_fixed_margins() {
        let shallow = t1_params();
        let deep = BoundParams {
            d: 5,
            ..t1_params()
        };
        let lo = recovery_error_bound(&shallow).unwrap().raw;
        let hi = recovery_error_bound(&deep).unwrap().raw;
        assert!(hi > lo);
    }

    #[test]
    fn inadmissible_conditions_are_named() {
        let shallow = BoundParams {
            d: 2,
            ..t1_params()
        };
        let err = recovery_error_bound(&shallow).unwrap_err();
        assert!(err.to_string().contains("depth"), "{err}");

        let wild = BoundParams {
            epsilon: 0.01, // 2cε = 18.9 swamps every threshold
            ..t1_params()
        };
        let err = recovery_error_bound(&wild).unwrap_err();
        assert!(err.to_string().contains("margin"), "{err}");

        let tiny_n = BoundParams {
            n: 3,
            ..t1_params()
        };
        assert!(recovery_error_bound(&tiny_n).is_err());
    }

    #[test]
    fn strict_admissibility() {
        let good = t1_params();
        assert!(good.is_admissible());
        let late = BoundParams {
            n: 4241,
            ..t1_params()
        };
        assert!(!late.is_admissible());
        let edge = BoundParams {
            n: 4242,
            ..t1_params()
        };
        assert!(edge.is_admissible());
    }

    #[test]
    fn min_sample_size_blows_up_near_window_edge() {
        let p = BoundParams {
            delta: D2 - 1e-14,
            ..t1_params()
        };
        assert!(matches!(
            min_sample_size(&p),
            Err(Error::MinSampleSizeCap { .. })
        ));
    }

    #[test]
    fn theoretical_window_shapes() {
        let w = theoretical_delta_window(946.0, D2, 0.0);
        assert_eq!(w.low, 0.0);
        assert!((w.high - D2).abs() < 1e-15);
        assert!(!w.is_empty());

        let w = theoretical_delta_window(946.0, D2, 0.001);
        assert!((w.low - 1.892).abs() < 1e-12);
        assert!(w.is_empty());

        let w = theoretical_delta_window(1.0, 0.5, 0.01);
        assert!((w.low - 0.02).abs() < 1e-15);
        assert!((w.high - 0.48).abs() < 1e-15);
    }

    #[test]
    fn window_midpoint_maximizes_margin_when_nonempty() {
        // min(δ, D−δ) peaks at D/2, which is the midpoint of every
        // nonempty theoretical window; confirm by grid search.
        for eps in [0.0, 1e-5, 5e-5] {
            let w = theoretical_delta_window(946.0, D2, eps);
            if w.is_empty() {
                continue;
            }
            let mid = w.midpoint();
            assert!((mid - D2 / 2.0).abs() < 1e-15);
            let score = |delta: f64| delta.min(D2 - delta);
            let steps = 1000;
            let best = (0..=steps)
                .map(|i| w.low + (w.high - w.low) * i as f64 / steps as f64)
                .map(score)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(score(mid) >= best - 1e-12);
        }
    }
}
