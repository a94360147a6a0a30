//! Picard iteration for systems `LD₁x = f(t, x)`, `x(t₀) = α`.
//!
//! The step `a` is chosen so that the Lipschitz weight `v` integrates to at
//! most 1/2 on each side of `t₀`; the map
//! `F(x)(t) = α + ∫_{t₀}^t f(s, x(s)) ds` is then a contraction on
//! `[t₀ − a, t₀ + a]`. Iterates live on a uniform odd grid centred at `t₀`,
//! are interpolated by local cubics, and are integrated cell by cell with the
//! 15-point Kronrod rule. Additive forcing terms are integrated once, by
//! their own quadrature.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::function::{from_fn, Interval, RealFunction};
use crate::laplace_deriv::{ld0, LimitError, SGrid};
use crate::quadrature::{integrate, integrate_closure, kronrod15, QuadratureError};
use crate::svc::{PathologicalFunction, SvcError, SvcModel};

/// Successive sup-norm changes may shrink by no less than this factor.
pub const CONTRACTION_LIMIT: f64 = 0.55;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step {a:e} is below the tolerance {tol:e}: the Lipschitz weight is too large near t0")]
    DegenerateStep { a: f64, tol: f64 },
    #[error("no convergence after {iterations} iterations (last change {delta:e})")]
    MaxIterExceeded { iterations: usize, delta: f64 },
    #[error("iteration {iteration}: change ratio {ratio} exceeds {CONTRACTION_LIMIT}")]
    NotContracting { iteration: usize, ratio: f64 },
    #[error("non-finite right-hand side at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Svc(#[from] SvcError),
}

pub type RhsFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// A state-independent term added to one component of the right-hand side.
pub trait Forcing: RealFunction {
    /// `∫_lo^hi` of the term, `lo ≤ hi`.
    fn integral(&self, lo: f64, hi: f64, tol: f64) -> Result<f64, QuadratureError>;
}

impl Forcing for PathologicalFunction {
    fn integral(&self, lo: f64, hi: f64, tol: f64) -> Result<f64, QuadratureError> {
        PathologicalFunction::integral(self, lo, hi, tol).map(|r| r.value)
    }
}

/// Forcing by a smooth function, integrated adaptively.
pub struct SmoothForcing<F>(pub F);

impl<F: RealFunction> RealFunction for SmoothForcing<F> {
    fn domain(&self) -> Interval {
        self.0.domain()
    }
    fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }
}

impl<F: RealFunction> Forcing for SmoothForcing<F> {
    fn integral(&self, lo: f64, hi: f64, tol: f64) -> Result<f64, QuadratureError> {
        integrate(&self.0, lo, hi, tol).map(|r| r.value)
    }
}

#[derive(Clone)]
pub struct IvpSystem {
    pub dim: usize,
    /// Classical part of the right-hand side.
    pub rhs: RhsFn,
    /// `(component, term)` pairs added to the right-hand side.
    pub forcing: Vec<(usize, Arc<dyn Forcing>)>,
    pub t0: f64,
    pub alpha: Vec<f64>,
    /// Lipschitz weight `v` of the right-hand side in the max norm.
    pub lipschitz: Arc<dyn RealFunction>,
    pub domain: Interval,
}

impl fmt::Debug for IvpSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpSystem")
            .field("dim", &self.dim)
            .field("forcing_components", &self.forcing.iter().map(|p| p.0).collect::<Vec<_>>())
            .field("t0", &self.t0)
            .field("alpha", &self.alpha)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl IvpSystem {
    pub fn validate(&self) -> Result<(), OdeError> {
        if self.dim == 0 || self.alpha.len() != self.dim {
            return Err(OdeError::InvalidInput(format!(
                "dimension {} does not match {} initial values",
                self.dim,
                self.alpha.len()
            )));
        }
        if !self.domain.contains(self.t0) {
            return Err(OdeError::InvalidInput(format!(
                "t0 = {} lies outside {}",
                self.t0, self.domain
            )));
        }
        for (c, term) in &self.forcing {
            if *c >= self.dim {
                return Err(OdeError::InvalidInput(format!(
                    "forcing targets component {c} of a {}-dimensional system",
                    self.dim
                )));
            }
            let d = term.domain();
            if !(d.contains(self.domain.lo) && d.contains(self.domain.hi)) {
                return Err(OdeError::InvalidInput(format!(
                    "forcing domain {d} does not cover {}",
                    self.domain
                )));
            }
        }
        let probe = (self.rhs)(self.t0, &self.alpha);
        if probe.len() != self.dim || probe.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite { t: self.t0 });
        }
        Ok(())
    }

    /// Full right-hand side including forcing.
    pub fn eval_rhs(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut out = (self.rhs)(t, x);
        for (c, term) in &self.forcing {
            out[*c] += term.eval(t);
        }
        out
    }
}

/// Largest `a` with `∫_{t₀}^{t₀+a} v ≤ 1/2`, `∫_{t₀−a}^{t₀} v ≤ 1/2` and
/// `[t₀ − a, t₀ + a] ⊆ I`, by bisection to `tol`.
pub fn contraction_step<V: RealFunction + ?Sized>(
    v: &V,
    t0: f64,
    domain: Interval,
    tol: f64,
) -> Result<f64, OdeError> {
    if !(tol > 0.0 && domain.contains(t0)) {
        return Err(OdeError::InvalidInput(format!(
            "need tol > 0 and t0 in {domain} (got tol = {tol}, t0 = {t0})"
        )));
    }
    let reach = (t0 - domain.lo).min(domain.hi - t0);
    let qtol = 1e-3 * tol;
    let mass = |a: f64| -> Result<f64, OdeError> {
        if a == 0.0 {
            return Ok(0.0);
        }
        let right = integrate_closure(|s| v.eval(s), &[t0, t0 + a], qtol)?.value;
        let left = integrate_closure(|s| v.eval(s), &[t0 - a, t0], qtol)?.value;
        Ok(right.max(left))
    };
    let a = if mass(reach)? <= 0.5 {
        reach
    } else {
        let (mut lo, mut hi) = (0.0, reach);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mass(mid)? <= 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if a < tol {
        return Err(OdeError::DegenerateStep { a, tol });
    }
    Ok(a)
}

/// The Picard map on a fixed grid.
pub struct PicardOperator<'a> {
    sys: &'a IvpSystem,
    a: f64,
    grid: Vec<f64>,
    centre: usize,
    /// `∫_{t₀}^{t_j}` of the forcing, per component.
    forcing_integrals: Vec<Vec<f64>>,
}

/// Cubic through the four grid nodes nearest to `t`.
fn interpolate(grid: &[f64], values: &[Vec<f64>], t: f64, out: &mut [f64]) {
    let n = grid.len();
    let h = grid[1] - grid[0];
    let cell = (((t - grid[0]) / h).floor() as isize).clamp(0, n as isize - 2) as usize;
    let start = cell.saturating_sub(1).min(n - 4);
    let xs = &grid[start..start + 4];
    let mut w = [1.0f64; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                w[i] *= (t - xs[j]) / (xs[i] - xs[j]);
            }
        }
    }
    for (c, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|i| w[i] * values[start + i][c]).sum();
    }
}

impl<'a> PicardOperator<'a> {
    /// `grid_points` is rounded up to an odd count of at least 5.
    pub fn new(sys: &'a IvpSystem, a: f64, grid_points: usize, tol: f64) -> Result<Self, OdeError> {
        sys.validate()?;
        if !(a > 0.0) {
            return Err(OdeError::InvalidInput(format!("step must be positive, got {a}")));
        }
        let n = (grid_points.max(5)) | 1;
        let centre = n / 2;
        let h = a / centre as f64;
        let grid: Vec<f64> = (0..n)
            .map(|j| match j.cmp(&centre) {
                std::cmp::Ordering::Equal => sys.t0,
                _ if j == 0 => sys.t0 - a,
                _ if j == n - 1 => sys.t0 + a,
                _ => sys.t0 + h * (j as f64 - centre as f64),
            })
            .collect();
        let mut forcing_integrals = vec![vec![0.0; n]; sys.dim];
        let ftol = tol * 1e-2 / n as f64;
        for (c, term) in &sys.forcing {
            let cells = grid
                .par_windows(2)
                .map(|w| term.integral(w[0], w[1], ftol))
                .collect::<Result<Vec<_>, _>>()?;
            let row = &mut forcing_integrals[*c];
            for j in centre + 1..n {
                row[j] = row[j - 1] + cells[j - 1];
            }
            for j in (0..centre).rev() {
                row[j] = row[j + 1] - cells[j];
            }
        }
        Ok(Self {
            sys,
            a,
            grid,
            centre,
            forcing_integrals,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn step(&self) -> f64 {
        self.a
    }

    /// `F(x)` at the grid nodes, for `x` given at the grid nodes.
    pub fn apply(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, OdeError> {
        let dim = self.sys.dim;
        let rule = kronrod15();
        let cells = self
            .grid
            .par_windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let mut acc = vec![0.0; dim];
                let mut state = vec![0.0; dim];
                for &(node, weight) in &rule {
                    let t = mid + half * node;
                    interpolate(&self.grid, x, t, &mut state);
                    let f = (self.sys.rhs)(t, &state);
                    if f.iter().any(|v| !v.is_finite()) {
                        return Err(OdeError::NonFinite { t });
                    }
                    for c in 0..dim {
                        acc[c] += weight * half * f[c];
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = self.grid.len();
        let mut out = vec![self.sys.alpha.clone(); n];
        for j in self.centre + 1..n {
            for c in 0..dim {
                out[j][c] = out[j - 1][c] + cells[j - 1][c];
            }
        }
        for j in (0..self.centre).rev() {
            for c in 0..dim {
                out[j][c] = out[j + 1][c] - cells[j][c];
            }
        }
        for (j, row) in out.iter_mut().enumerate() {
            for c in 0..dim {
                row[c] += self.forcing_integrals[c][j];
            }
        }
        Ok(out)
    }

    /// Iterates from `start` until the sup-norm change drops to `tol`.
    pub fn iterate(
        &self,
        start: Vec<Vec<f64>>,
        tol: f64,
        max_iter: usize,
    ) -> Result<PicardSolution, OdeError> {
        let mut x = start;
        let mut deltas = Vec::new();
        let scale = x.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        let noise = (1e-2 * tol).max(1e3 * f64::EPSILON * scale);
        for k in 1..=max_iter {
            let next = self.apply(&x)?;
            let delta = sup_distance(&next, &x);
            x = next;
            if let Some(&prev) = deltas.last() {
                let ratio = delta / prev;
                if k > 2 && prev > noise && delta > noise && ratio > CONTRACTION_LIMIT {
                    return Err(OdeError::NotContracting { iteration: k, ratio });
                }
            }
            deltas.push(delta);
            if delta <= tol {
                return Ok(PicardSolution {
                    step: self.a,
                    grid: self.grid.clone(),
                    trajectory: x,
                    iterations: k,
                    final_delta: delta,
                    deltas,
                });
            }
        }
        Err(OdeError::MaxIterExceeded {
            iterations: max_iter,
            delta: deltas.last().copied().unwrap_or(f64::INFINITY),
        })
    }

    /// The constant initial iterate `α`.
    pub fn constant_start(&self) -> Vec<Vec<f64>> {
        vec![self.sys.alpha.clone(); self.grid.len()]
    }

    /// The initial iterate `α + (t − t₀)` in every component.
    pub fn ramp_start(&self) -> Vec<Vec<f64>> {
        self.grid
            .iter()
            .map(|&t| self.sys.alpha.iter().map(|a| a + (t - self.sys.t0)).collect())
            .collect()
    }
}

fn sup_distance(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    x.iter()
        .zip(y)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PicardSolution {
    pub step: f64,
    pub grid: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    pub iterations: usize,
    pub final_delta: f64,
    /// Sup-norm change at every iteration.
    pub deltas: Vec<f64>,
}

impl PicardSolution {
    /// Interpolated state at `t` inside the grid.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.trajectory[0].len()];
        interpolate(&self.grid, &self.trajectory, t, &mut out);
        out
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.grid[0], *self.grid.last().unwrap())
    }

    /// Largest ratio of successive changes among those above `floor`.
    pub fn max_contraction_ratio(&self, floor: f64) -> f64 {
        self.deltas
            .windows(2)
            .filter(|w| w[0] > floor && w[1] > floor)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

/// Solves on the contraction step around `t₀`, starting from `α`.
pub fn picard_solve(
    sys: &IvpSystem,
    grid_points: usize,
    tol: f64,
    max_iter: usize,
) -> Result<PicardSolution, OdeError> {
    if !(tol > 0.0) {
        return Err(OdeError::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    sys.validate()?;
    let a = contraction_step(sys.lipschitz.as_ref(), sys.t0, sys.domain, 1e-12 * sys.domain.width().max(1.0))?;
    let op = PicardOperator::new(sys, a, grid_points, tol)?;
    op.iterate(op.constant_start(), tol, max_iter)
}

/// Sup distance between the fixed points reached from the constant and the
/// ramp initial iterates.
pub fn uniqueness_probe(
    sys: &IvpSystem,
    grid_points: usize,
    tol: f64,
    max_iter: usize,
) -> Result<f64, OdeError> {
    sys.validate()?;
    let a = contraction_step(sys.lipschitz.as_ref(), sys.t0, sys.domain, 1e-12 * sys.domain.width().max(1.0))?;
    let op = PicardOperator::new(sys, a, grid_points, tol)?;
    let x = op.iterate(op.constant_start(), tol, max_iter)?;
    let y = op.iterate(op.ramp_start(), tol, max_iter)?;
    Ok(sup_distance(&x.trajectory, &y.trajectory))
}

/// Forward continuation: re-anchors at the right end of each step until
/// `t_end` is reached.
pub fn picard_continue(
    sys: &IvpSystem,
    t_end: f64,
    grid_points: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<PicardSolution>, OdeError> {
    if !(t_end >= sys.t0 && t_end <= sys.domain.hi) {
        return Err(OdeError::InvalidInput(format!(
            "t_end = {t_end} must lie in [t0, {}]",
            sys.domain.hi
        )));
    }
    let mut local = sys.clone();
    let mut pieces = Vec::new();
    let min_step = 1e-12 * sys.domain.width().max(1.0);
    while t_end - local.t0 > min_step {
        let a = contraction_step(local.lipschitz.as_ref(), local.t0, local.domain, min_step)
            .map(|a| a.min(t_end - local.t0))?;
        let op = PicardOperator::new(&local, a, grid_points, tol)?;
        let sol = op.iterate(op.constant_start(), tol, max_iter)?;
        local.t0 = *sol.grid.last().unwrap();
        local.alpha = sol.trajectory.last().unwrap().clone();
        pieces.push(sol);
    }
    Ok(pieces)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ContinuityCheck {
    pub t: f64,
    pub component: usize,
    pub expected: f64,
    pub estimate: f64,
    pub passed: bool,
}

/// Checks that `t ↦ f(t, x(t))` is Laplace continuous at the sample times:
/// the classical part and each forcing term are estimated separately and
/// their sum is compared with the pointwise value.
pub fn laplace_continuity_check(
    sys: &IvpSystem,
    sol: &PicardSolution,
    times: &[f64],
    delta: f64,
    grid: &SGrid,
    tol: f64,
) -> Result<Vec<ContinuityCheck>, OdeError> {
    let iv = sol.interval();
    let mut out = Vec::new();
    for &t in times {
        if !iv.contains(t) {
            return Err(OdeError::InvalidInput(format!("sample time {t} lies outside {iv}")));
        }
        for c in 0..sys.dim {
            let classical = from_fn(iv.lo, iv.hi, |s| (sys.rhs)(s, &sol.eval(s))[c]);
            let mut estimate = 0.0;
            let mut converged = true;
            let mut add = |e: crate::laplace_deriv::SidedEstimates| match e.common_value(tol) {
                Some(v) => estimate += v,
                None => converged = false,
            };
            add(ld0(&classical, t, delta, grid, tol)?);
            for (fc, term) in &sys.forcing {
                if *fc == c {
                    let restricted = Restricted { inner: term.as_ref(), domain: iv };
                    add(ld0(&restricted, t, delta, grid, tol)?);
                }
            }
            let expected = sys.eval_rhs(t, &sol.eval(t))[c];
            out.push(ContinuityCheck {
                t,
                component: c,
                expected,
                estimate,
                passed: converged && (estimate - expected).abs() <= 2.0 * tol,
            });
        }
    }
    Ok(out)
}

/// A function viewed on a smaller interval; keeps the weighted-transform
/// hint of the inner function.
struct Restricted<'a> {
    inner: &'a dyn Forcing,
    domain: Interval,
}

impl RealFunction for Restricted<'_> {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }
    fn exp_weighted_hint(
        &self,
        q: &crate::quadrature::WeightedQuery,
    ) -> Option<Result<crate::quadrature::QuadratureResult, QuadratureError>> {
        self.inner.exp_weighted_hint(q)
    }
}

pub type ScalarRhs = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// `x⁽ⁿ⁾ = f(t, x, x′, …, x⁽ⁿ⁻¹⁾)` as the first-order system
/// `x₁′ = x₂, …, LD₁xₙ = f`. The Lipschitz weight is `max(1, L_f)` for
/// `n ≥ 2` and `L_f` for `n = 1`.
pub fn reduce_higher_order(
    n: usize,
    f: ScalarRhs,
    lipschitz_f: f64,
    t0: f64,
    alphas: Vec<f64>,
    domain: Interval,
) -> Result<IvpSystem, OdeError> {
    if n == 0 || alphas.len() != n {
        return Err(OdeError::InvalidInput(format!(
            "order {n} needs exactly {n} initial values, got {}",
            alphas.len()
        )));
    }
    if !(lipschitz_f >= 0.0) {
        return Err(OdeError::InvalidInput(format!(
            "Lipschitz constant must be non-negative, got {lipschitz_f}"
        )));
    }
    let v = if n == 1 { lipschitz_f } else { lipschitz_f.max(1.0) };
    let rhs: RhsFn = Arc::new(move |t, x: &[f64]| {
        let mut out: Vec<f64> = x[1..].to_vec();
        out.push(f(t, x));
        out
    });
    Ok(IvpSystem {
        dim: n,
        rhs,
        forcing: Vec::new(),
        t0,
        alpha: alphas,
        lipschitz: Arc::new(from_fn(domain.lo, domain.hi, move |_| v)),
        domain,
    })
}

/// Right-hand sides selectable by name from a configuration file.
#[derive(Debug, Clone, PartialEq, Deserialize, serde::Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RhsSpec {
    /// `x′ = rate·x`.
    Exponential { rate: f64 },
    /// `x″ = −ω² x`, reduced to a 2-dimensional system.
    Oscillator { omega: f64 },
    /// `x′ = 0` in `dim` components.
    Zero { dim: usize },
    /// `x′ = A x`.
    Linear { matrix: Vec<Vec<f64>> },
    /// `x′ = rate·x + f(t)` with `f` the SVC(4) pathological function.
    PathologicalForcing { rate: f64, depth: u32 },
}

impl RhsSpec {
    pub fn dim(&self) -> usize {
        match self {
            RhsSpec::Exponential { .. } | RhsSpec::PathologicalForcing { .. } => 1,
            RhsSpec::Oscillator { .. } => 2,
            RhsSpec::Zero { dim } => *dim,
            RhsSpec::Linear { matrix } => matrix.len(),
        }
    }

    pub fn build(&self, t0: f64, alpha: Vec<f64>, domain: Interval) -> Result<IvpSystem, OdeError> {
        let constant = |v: f64| -> Arc<dyn RealFunction> { Arc::new(from_fn(domain.lo, domain.hi, move |_| v)) };
        let sys = match self.clone() {
            RhsSpec::Exponential { rate } => IvpSystem {
                dim: 1,
                rhs: Arc::new(move |_, x: &[f64]| vec![rate * x[0]]),
                forcing: Vec::new(),
                t0,
                alpha,
                lipschitz: constant(rate.abs()),
                domain,
            },
            RhsSpec::Oscillator { omega } => {
                let w2 = omega * omega;
                reduce_higher_order(2, Arc::new(move |_, x: &[f64]| -w2 * x[0]), w2, t0, alpha, domain)?
            }
            RhsSpec::Zero { dim } => IvpSystem {
                dim,
                rhs: Arc::new(move |_, _: &[f64]| vec![0.0; dim]),
                forcing: Vec::new(),
                t0,
                alpha,
                lipschitz: constant(0.0),
                domain,
            },
            RhsSpec::Linear { matrix } => {
                let n = matrix.len();
                if n == 0 || matrix.iter().any(|row| row.len() != n) {
                    return Err(OdeError::InvalidInput("matrix must be square and non-empty".into()));
                }
                let norm = matrix
                    .iter()
                    .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                IvpSystem {
                    dim: n,
                    rhs: Arc::new(move |_, x: &[f64]| {
                        matrix
                            .iter()
                            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                            .collect()
                    }),
                    forcing: Vec::new(),
                    t0,
                    alpha,
                    lipschitz: constant(norm),
                    domain,
                }
            }
            RhsSpec::PathologicalForcing { rate, depth } => {
                let pf = PathologicalFunction::new(SvcModel::new(depth)?);
                IvpSystem {
                    dim: 1,
                    rhs: Arc::new(move |_, x: &[f64]| vec![rate * x[0]]),
                    forcing: vec![(0, Arc::new(pf) as Arc<dyn Forcing>)],
                    t0,
                    alpha,
                    lipschitz: constant(rate.abs()),
                    domain,
                }
            }
        };
        sys.validate()?;
        Ok(sys)
    }
}
