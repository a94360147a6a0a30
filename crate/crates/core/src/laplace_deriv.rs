//! Estimators for the s → ∞ limits behind Laplace continuity (LD₀) and the
//! Laplace derivative (LD₁).
//!
//! Each side is sampled on a geometric grid of `s` and the trailing third of
//! the samples is classified. No extrapolation is applied.

use rayon::prelude::*;
use thiserror::Error;

use crate::function::{RealFunction, Shifted};
use crate::quadrature::{exp_weighted_auto, QuadratureError, Side, WeightPower, WeightedQuery};

/// Divergence threshold on the last sample.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Default one-sided window length.
pub const DEFAULT_DELTA: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("neither side of x = {x} leaves room for a window inside {domain}")]
    DomainTooSmall {
        x: f64,
        domain: crate::function::Interval,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// `s_k = s0·ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SGrid {
    pub s0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for SGrid {
    fn default() -> Self {
        Self {
            s0: 4.0,
            ratio: 2.0,
            count: 24,
        }
    }
}

impl SGrid {
    pub fn validate(&self) -> Result<(), LimitError> {
        if !(self.s0 > 0.0 && self.ratio > 1.0 && self.count >= 1) {
            return Err(LimitError::InvalidInput(format!(
                "s-grid needs s0 > 0, ratio > 1, count ≥ 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.s0 * self.ratio.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Classification {
    Converged,
    Diverged(Infinity),
    Oscillating,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LimitEstimate {
    /// The last sample; meaningful when converged.
    pub value: f64,
    pub classification: Classification,
    /// max − min over the trailing window.
    pub tail_spread: f64,
    pub samples: Vec<(f64, f64)>,
}

impl LimitEstimate {
    pub fn is_converged(&self) -> bool {
        self.classification == Classification::Converged
    }
}

/// Classifies a sampled limit by its trailing `⌈count/3⌉` values.
///
/// * converged: spread ≤ `tol`;
/// * diverged: window monotone and `|last| > 10⁶`;
/// * oscillating: successive differences change sign at least 3 times;
/// * inconclusive otherwise.
pub fn classify(samples: Vec<(f64, f64)>, tol: f64) -> LimitEstimate {
    let n = samples.len();
    let w = n.div_ceil(3).max(1).min(n);
    let tail: Vec<f64> = samples[n - w..].iter().map(|p| p.1).collect();
    let last = tail.last().copied().unwrap_or(f64::NAN);
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let spread = if tail.iter().all(|v| v.is_finite()) {
        hi - lo
    } else {
        f64::INFINITY
    };
    let diffs: Vec<f64> = tail.windows(2).map(|p| p[1] - p[0]).collect();
    let increasing = diffs.iter().all(|&d| d >= 0.0);
    let decreasing = diffs.iter().all(|&d| d <= 0.0);
    let sign_changes = diffs
        .iter()
        .filter(|d| **d != 0.0)
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|p| (p[0].signum()) != (p[1].signum()))
        .count();

    let classification = if spread <= tol {
        Classification::Converged
    } else if (increasing || decreasing) && last.abs() > DIVERGENCE_THRESHOLD {
        Classification::Diverged(if last > 0.0 {
            Infinity::Positive
        } else {
            Infinity::Negative
        })
    } else if sign_changes >= 3 {
        Classification::Oscillating
    } else {
        Classification::Inconclusive
    };
    LimitEstimate {
        value: last,
        classification,
        tail_spread: spread,
        samples,
    }
}

/// Estimates for both sides; a side is `None` when the domain leaves no room
/// for it.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SidedEstimates {
    pub plus: Option<LimitEstimate>,
    pub minus: Option<LimitEstimate>,
}

impl SidedEstimates {
    /// Common converged value, if both present sides converged and agree
    /// within `tol`. A single available side counts on its own.
    pub fn common_value(&self, tol: f64) -> Option<f64> {
        match (&self.plus, &self.minus) {
            (Some(p), Some(m)) => (p.is_converged()
                && m.is_converged()
                && (p.value - m.value).abs() <= tol)
                .then(|| 0.5 * (p.value + m.value)),
            (Some(e), None) | (None, Some(e)) => e.is_converged().then_some(e.value),
            (None, None) => None,
        }
    }
}

fn side_deltas<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    delta: f64,
) -> Result<(Option<f64>, Option<f64>), LimitError> {
    if !(delta > 0.0) {
        return Err(LimitError::InvalidInput(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let dom = f.domain();
    if !dom.contains(x) {
        return Err(LimitError::DomainTooSmall { x, domain: dom });
    }
    let plus = delta.min(dom.hi - x);
    let minus = delta.min(x - dom.lo);
    let plus = (plus > 0.0).then_some(plus);
    let minus = (minus > 0.0).then_some(minus);
    if plus.is_none() && minus.is_none() {
        return Err(LimitError::DomainTooSmall { x, domain: dom });
    }
    Ok((plus, minus))
}

fn sample_side<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    side: Side,
    delta: f64,
    power: WeightPower,
    grid: &SGrid,
    qtol: f64,
    negate: bool,
) -> Result<Vec<(f64, f64)>, LimitError> {
    grid.points()
        .into_par_iter()
        .map(|s| {
            let q = WeightedQuery {
                x,
                side,
                s,
                delta,
                power,
                tol: qtol,
            };
            let r = exp_weighted_auto(f, &q)?;
            Ok((s, if negate { -r.value } else { r.value }))
        })
        .collect()
}

/// Laplace-continuity limits `s ∫₀^δ e^{-st} f(x ± t) dt` on both sides.
pub fn ld0<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    delta: f64,
    grid: &SGrid,
    tol: f64,
) -> Result<SidedEstimates, LimitError> {
    limits(f, x, delta, grid, tol, WeightPower::One)
}

/// Laplace-derivative limits `± s² ∫₀^δ e^{-st} [f(x ± t) − f(x)] dt`.
///
/// The minus side carries the sign flip so both sides estimate the same
/// number.
pub fn ld1<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    delta: f64,
    grid: &SGrid,
    tol: f64,
) -> Result<SidedEstimates, LimitError> {
    limits(f, x, delta, grid, tol, WeightPower::Two)
}

fn limits<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    delta: f64,
    grid: &SGrid,
    tol: f64,
    power: WeightPower,
) -> Result<SidedEstimates, LimitError> {
    grid.validate()?;
    if !(tol > 0.0) {
        return Err(LimitError::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (dp, dm) = side_deltas(f, x, delta)?;
    let qtol = tol / 10.0;
    let run = |side: Side, d: f64| -> Result<LimitEstimate, LimitError> {
        let samples = match power {
            WeightPower::One => sample_side(f, x, side, d, power, grid, qtol, false)?,
            WeightPower::Two => {
                let fx = f.eval(x);
                if !fx.is_finite() {
                    return Err(QuadratureError::NonFiniteEvaluation { x, value: fx }.into());
                }
                let shifted = Shifted::new(f, fx);
                sample_side(&shifted, x, side, d, power, grid, qtol, side == Side::Minus)?
            }
        };
        Ok(classify(samples, tol))
    };
    let (plus, minus) = rayon::join(
        || dp.map(|d| run(Side::Plus, d)).transpose(),
        || dm.map(|d| run(Side::Minus, d)).transpose(),
    );
    Ok(SidedEstimates {
        plus: plus?,
        minus: minus?,
    })
}

/// Finite-grid surrogates of the four Laplace derivates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Derivates {
    pub lower_plus: f64,
    pub upper_plus: f64,
    pub lower_minus: f64,
    pub upper_minus: f64,
}

/// min/max of the LD₁ samples over the trailing half of the grid on each
/// side. A side without room yields NaN.
pub fn derivates<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    delta: f64,
    grid: &SGrid,
) -> Result<Derivates, LimitError> {
    let est = ld1(f, x, delta, grid, 1e-9)?;
    let bounds = |e: &Option<LimitEstimate>| -> (f64, f64) {
        match e {
            Some(e) => {
                let n = e.samples.len();
                let tail = &e.samples[n - n.div_ceil(2)..];
                tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p.1), hi.max(p.1))
                })
            }
            None => (f64::NAN, f64::NAN),
        }
    };
    let (lower_plus, upper_plus) = bounds(&est.plus);
    let (lower_minus, upper_minus) = bounds(&est.minus);
    Ok(Derivates {
        lower_plus,
        upper_plus,
        lower_minus,
        upper_minus,
    })
}
