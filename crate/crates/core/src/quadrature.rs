//! Adaptive Gauss-Kronrod quadrature and exponentially weighted transforms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::function::RealFunction;

/// Hard cap on the number of panels a single adaptive call may create.
pub const MAX_PANELS: usize = 1_000_000;

/// Relative inward displacement applied once to a node whose evaluation is not
/// finite, when its panel touches an integration limit.
const ENDPOINT_NUDGE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("integrand returned a non-finite value ({value}) at x = {x}")]
    NonFiniteEvaluation { x: f64, value: f64 },
    #[error("tolerance {tol:e} not met after {panels} panels (error estimate {error:e})")]
    ToleranceNotMet { panels: usize, error: f64, tol: f64 },
    #[error("integration range [{a}, {b}] is not inside the domain {domain}")]
    OutOfDomain {
        a: f64,
        b: f64,
        domain: crate::function::Interval,
    },
    #[error("invalid quadrature input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub(crate) fn zero() -> Self {
        Self {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        }
    }
}

// G7-K15 pair: Kronrod abscissae in decreasing order; odd indices are the
// Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 Kronrod `(node, weight)` pairs on `[-1, 1]`.
pub(crate) fn kronrod15() -> [(f64, f64); 15] {
    let mut out = [(0.0, WGK[7]); 15];
    for j in 0..7 {
        out[2 * j] = (-XGK[j], WGK[j]);
        out[2 * j + 1] = (XGK[j], WGK[j]);
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // Once the G7/K15 discrepancy is at rounding level, splitting cannot help.
    converged: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Applies the 15-point Kronrod rule and its embedded 7-point Gauss rule on
/// `[a, b]`.
///
/// `lo_limit`/`hi_limit` flag whether the panel touches the integration
/// limits, which enables the one-shot endpoint nudge.
fn gk15<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    lo_limit: bool,
    hi_limit: bool,
) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, QuadratureError> {
        let y = f(x);
        if y.is_finite() {
            return Ok(y);
        }
        let nudge = (b - a) * ENDPOINT_NUDGE;
        let retry = if lo_limit && x < center {
            Some(x + nudge)
        } else if hi_limit && x > center {
            Some(x - nudge)
        } else {
            None
        };
        match retry.map(|x2| (x2, f(x2))) {
            Some((_, y2)) if y2.is_finite() => Ok(y2),
            _ => Err(QuadratureError::NonFiniteEvaluation { x, value: y }),
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for (j, (&node, &wk)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * node;
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        kronrod += wk * (f1 + f2);
        resabs += wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let raw = ((kronrod - gauss) * half).abs();
    let floor = 50.0 * f64::EPSILON * resabs;
    let converged = raw <= floor || half.abs() <= 4.0 * f64::EPSILON * center.abs().max(1e-300);
    Ok(Panel {
        a,
        b,
        value,
        error: raw.max(floor),
        converged,
    })
}

/// Globally adaptive integration of a closure over consecutive breakpoints.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops to `tol`. Panels whose estimate is already at rounding
/// level are retired. Exceeding [`MAX_PANELS`] is an error.
pub fn integrate_closure<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    if !(tol > 0.0) {
        return Err(QuadratureError::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if breakpoints.len() < 2 {
        return Err(QuadratureError::InvalidInput(
            "need at least two breakpoints".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(QuadratureError::InvalidInput(
            "breakpoints must be sorted and finite".into(),
        ));
    }
    let first = breakpoints[0];
    let last = *breakpoints.last().unwrap();
    if first == last {
        return Ok(QuadratureResult::zero());
    }

    let mut heap = BinaryHeap::new();
    let mut retired_value = 0.0;
    let mut retired_error = 0.0;
    let mut evaluations = 0usize;
    let mut panels = 0usize;
    for w in breakpoints.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = gk15(&f, w[0], w[1], w[0] == first, w[1] == last)?;
        evaluations += 15;
        panels += 1;
        heap.push(p);
    }

    // Running sum of active panel errors; resynchronised periodically and
    // before every termination decision to keep floating drift out.
    let mut active_error: f64 = heap.iter().map(|p| p.error).sum();
    let mut since_resync = 0usize;
    loop {
        if active_error + retired_error <= tol || since_resync >= 4096 {
            active_error = heap.iter().map(|p| p.error).sum();
            since_resync = 0;
            if active_error + retired_error <= tol {
                break;
            }
        }
        let Some(worst) = heap.pop() else { break };
        active_error -= worst.error;
        if worst.converged {
            retired_value += worst.value;
            retired_error += worst.error;
            continue;
        }
        if panels >= MAX_PANELS {
            return Err(QuadratureError::ToleranceNotMet {
                panels,
                error: active_error + worst.error + retired_error,
                tol,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(&f, worst.a, mid, worst.a == first, false)?;
        let right = gk15(&f, mid, worst.b, false, worst.b == last)?;
        evaluations += 30;
        panels += 1;
        since_resync += 1;
        // A panel too narrow to bisect meaningfully is as resolved as
        // floating point allows.
        let stalled = mid <= worst.a || mid >= worst.b || (mid - worst.a) < 1e-14 * worst.a.abs().max(1e-300);
        for mut p in [left, right] {
            p.converged |= stalled;
            active_error += p.error;
            heap.push(p);
        }
    }

    let value = retired_value + heap.iter().map(|p| p.value).sum::<f64>();
    let error = retired_error + heap.iter().map(|p| p.error).sum::<f64>();
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
    })
}

/// `∫ₐᵇ f` to absolute tolerance `tol`.
pub fn integrate<F: RealFunction + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    check_range(f, a, b)?;
    integrate_closure(|x| f.eval(x), &[a, b], tol)
}

/// `∫ₐᵇ f` with forced interior breakpoints (unsorted, possibly outside
/// `[a, b]`; those are dropped).
pub fn integrate_with_breakpoints<F: RealFunction + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    interior: &[f64],
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    check_range(f, a, b)?;
    let mut pts: Vec<f64> = interior
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate_closure(|x| f.eval(x), &pts, tol)
}

fn check_range<F: RealFunction + ?Sized>(f: &F, a: f64, b: f64) -> Result<(), QuadratureError> {
    if !(a <= b) {
        return Err(QuadratureError::InvalidInput(format!(
            "lower limit {a} exceeds upper limit {b}"
        )));
    }
    let dom = f.domain();
    if !dom.contains_loose(a) || !dom.contains_loose(b) {
        return Err(QuadratureError::OutOfDomain { a, b, domain: dom });
    }
    Ok(())
}

/// Direction of the one-sided transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// The `s^p` prefactor of the weighted transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WeightPower {
    One,
    Two,
}

impl WeightPower {
    pub fn exponent(self) -> i32 {
        match self {
            WeightPower::One => 1,
            WeightPower::Two => 2,
        }
    }
}

/// Parameters of `s^p ∫₀^δ e^{-st} f(x ± t) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedQuery {
    pub x: f64,
    pub side: Side,
    pub s: f64,
    pub delta: f64,
    pub power: WeightPower,
    /// Absolute tolerance on the scaled value.
    pub tol: f64,
}

impl WeightedQuery {
    pub fn scale(&self) -> f64 {
        self.s.powi(self.power.exponent())
    }

    /// The transform of `f ≡ 1`: `s^{p-1}(1 − e^{−sδ})`.
    pub fn constant_transform(&self) -> f64 {
        self.s.powi(self.power.exponent() - 1) * -(-self.s * self.delta).exp_m1()
    }

    /// The `x`-side endpoints `[lo, hi]` covered by the transform.
    pub fn span(&self) -> (f64, f64) {
        match self.side {
            Side::Plus => (self.x, self.x + self.delta),
            Side::Minus => (self.x - self.delta, self.x),
        }
    }

    pub(crate) fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(QuadratureError::InvalidInput(format!(
                "s must be positive and finite, got {}",
                self.s
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(QuadratureError::InvalidInput(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.tol > 0.0) {
            return Err(QuadratureError::InvalidInput(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Breakpoints in `t` for the weighted transform: `δ·2^{-k}` down to about
/// `min(δ, 1/s)·2^{-8}`, plus `0`.
pub fn geometric_grid(s: f64, delta: f64) -> Vec<f64> {
    let floor = delta.min(1.0 / s) * 2f64.powi(-8);
    let mut pts = vec![delta];
    let mut t = delta;
    while t > floor {
        t *= 0.5;
        pts.push(t);
    }
    pts.push(0.0);
    pts.reverse();
    pts
}

/// `s^p ∫₀^δ e^{-st} f(x ± t) dt` by generic quadrature on the geometric grid.
///
/// The tolerance applies to the scaled value; the unscaled integral is
/// computed to `tol / s^p`.
pub fn exp_weighted<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    side: Side,
    s: f64,
    delta: f64,
    power: WeightPower,
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    let q = WeightedQuery {
        x,
        side,
        s,
        delta,
        power,
        tol,
    };
    exp_weighted_quadrature(f, &q)
}

pub(crate) fn exp_weighted_quadrature<F: RealFunction + ?Sized>(
    f: &F,
    q: &WeightedQuery,
) -> Result<QuadratureResult, QuadratureError> {
    q.validate()?;
    let (lo, hi) = q.span();
    let dom = f.domain();
    if !dom.contains_loose(lo) || !dom.contains_loose(hi) {
        return Err(QuadratureError::OutOfDomain {
            a: lo,
            b: hi,
            domain: dom,
        });
    }
    let scale = q.scale();
    let sign = q.side.sign();
    let (x, s) = (q.x, q.s);
    let grid = geometric_grid(s, q.delta);
    let raw = integrate_closure(
        |t| {
            let w = (-s * t).exp();
            if w == 0.0 {
                0.0
            } else {
                w * f.eval(x + sign * t)
            }
        },
        &grid,
        q.tol / scale,
    )?;
    Ok(QuadratureResult {
        value: raw.value * scale,
        abs_error_estimate: raw.abs_error_estimate * scale,
        evaluations: raw.evaluations,
    })
}

/// Weighted transform that prefers the function's own hint and falls back to
/// [`exp_weighted`].
pub fn exp_weighted_auto<F: RealFunction + ?Sized>(
    f: &F,
    q: &WeightedQuery,
) -> Result<QuadratureResult, QuadratureError> {
    q.validate()?;
    match f.exp_weighted_hint(q) {
        Some(r) => r,
        None => exp_weighted_quadrature(f, q),
    }
}
