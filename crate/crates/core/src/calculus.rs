//! Integration through primitives, the Alexiewicz norm and the classical
//! theorems built on it: integration by parts, Hake limits, mean-value
//! points and Taylor expansion with integral remainder.

use rayon::prelude::*;
use thiserror::Error;

use crate::function::{Interval, RealFunction};
use crate::laplace_deriv::{classify, LimitEstimate};
use crate::quadrature::{integrate_closure, QuadratureError};

/// Uniform probe points used by [`alexiewicz_norm`].
pub const NORM_GRID: usize = 4097;
/// Number of `c_k = b − (b−a)2^{-k}` samples in [`hake_limit`].
pub const HAKE_STEPS: u32 = 40;
const ROOT_SCAN: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error("{x} lies outside {domain}")]
    Domain { x: f64, domain: Interval },
    #[error("no sign change of {what} on [{a}, {b}]; smallest residual {min_residual:e} at {at}")]
    NoRootBracketed {
        what: &'static str,
        a: f64,
        b: f64,
        min_residual: f64,
        at: f64,
    },
    #[error("{check}: {lhs} vs {rhs} (tolerance {tol:e})")]
    Consistency {
        check: &'static str,
        lhs: f64,
        rhs: f64,
        tol: f64,
    },
    #[error("primitive looks discontinuous near {near}: modulus {fine:e} at the fine scale vs {coarse:e}")]
    Discontinuous { near: f64, fine: f64, coarse: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A continuous `F` viewed as the primitive of its Laplace derivative, with
/// base point `a`: the integral of `LD₁F` over `[a, x]` is `F(x) − F(a)`.
#[derive(Debug, Clone)]
pub struct Primitive<F> {
    func: F,
    base: f64,
    end: f64,
}

impl<F: RealFunction> Primitive<F> {
    /// Primitive on `[base, domain.hi]`.
    pub fn new(func: F, base: f64) -> Result<Self, CalculusError> {
        let end = func.domain().hi;
        Self::on(func, base, end)
    }

    /// Primitive on `[base, end]`.
    pub fn on(func: F, base: f64, end: f64) -> Result<Self, CalculusError> {
        let dom = func.domain();
        if !(dom.contains(base) && dom.contains(end) && base < end) {
            return Err(CalculusError::InvalidInput(format!(
                "[{base}, {end}] is not a non-degenerate subinterval of {dom}"
            )));
        }
        Ok(Self { func, base, end })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.base, self.end)
    }

    pub fn func(&self) -> &F {
        &self.func
    }

    /// `F(x) − F(base)`.
    pub fn shifted(&self, x: f64) -> f64 {
        self.func.eval(x) - self.func.eval(self.base)
    }

    /// Compares the largest grid increment at spacings `w/256` and `w/4096`.
    /// A jump keeps the fine modulus near the coarse one; continuous data
    /// shrinks it.
    pub fn check_continuity(&self) -> Result<(), CalculusError> {
        let modulus = |n: usize| {
            let h = (self.end - self.base) / n as f64;
            let vals: Vec<f64> = (0..=n)
                .into_par_iter()
                .map(|i| self.func.eval(self.base + h * i as f64))
                .collect();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let (i, jump) = vals
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .enumerate()
                .fold((0, 0.0f64), |acc, (i, j)| if j > acc.1 { (i, j) } else { acc });
            (self.base + h * i as f64, jump, scale)
        };
        let (_, coarse, scale) = modulus(256);
        let (near, fine, _) = modulus(4096);
        if !fine.is_finite() || (fine > 0.75 * coarse && fine > 1e-12 * scale.max(1.0)) {
            return Err(CalculusError::Discontinuous { near, fine, coarse });
        }
        Ok(())
    }
}

/// `Φ(y) = ∫_lo^y φ` built from fixed panel sums plus one adaptive piece.
#[derive(Debug, Clone)]
pub struct CumulativePrimitive<F> {
    integrand: F,
    lo: f64,
    hi: f64,
    knots: Vec<f64>,
    sums: Vec<f64>,
    tol: f64,
}

impl<F: RealFunction> CumulativePrimitive<F> {
    pub fn new(integrand: F, lo: f64, hi: f64, panels: usize, tol: f64) -> Result<Self, CalculusError> {
        if !(lo < hi && panels >= 1 && tol > 0.0) {
            return Err(CalculusError::InvalidInput(format!(
                "cumulative primitive needs lo < hi, panels ≥ 1, tol > 0 (got {lo}, {hi}, {panels}, {tol})"
            )));
        }
        let dom = integrand.domain();
        if !(dom.contains_loose(lo) && dom.contains_loose(hi)) {
            return Err(CalculusError::Domain { x: if dom.contains_loose(lo) { hi } else { lo }, domain: dom });
        }
        let h = (hi - lo) / panels as f64;
        let knots: Vec<f64> = (0..=panels)
            .map(|i| if i == panels { hi } else { lo + h * i as f64 })
            .collect();
        let ptol = tol / (2.0 * panels as f64);
        let pieces = knots
            .par_windows(2)
            .map(|w| integrate_closure(|t| integrand.eval(t), w, ptol).map(|r| r.value))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sums = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        sums.push(0.0);
        for p in pieces {
            acc += p;
            sums.push(acc);
        }
        Ok(Self {
            integrand,
            lo,
            hi,
            knots,
            sums,
            tol: tol / 2.0,
        })
    }

    pub fn total(&self) -> f64 {
        *self.sums.last().unwrap()
    }
}

impl<F: RealFunction> RealFunction for CumulativePrimitive<F> {
    fn domain(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    fn eval(&self, y: f64) -> f64 {
        if !(self.lo <= y && y <= self.hi) {
            return f64::NAN;
        }
        let i = self.knots.partition_point(|&k| k <= y).saturating_sub(1);
        let i = i.min(self.knots.len() - 2);
        let k = self.knots[i];
        if y == k {
            return self.sums[i];
        }
        match integrate_closure(|t| self.integrand.eval(t), &[k, y], self.tol) {
            Ok(r) => self.sums[i] + r.value,
            Err(_) => f64::NAN,
        }
    }
}

/// `F(x) − F(base)`, the Laplace integral of `LD₁F` over `[base, x]`.
pub fn ftc_integral<F: RealFunction>(prim: &Primitive<F>, x: f64) -> Result<f64, CalculusError> {
    let dom = prim.func.domain();
    if !dom.contains(x) {
        return Err(CalculusError::Domain { x, domain: dom });
    }
    Ok(prim.shifted(x))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AlexiewiczNorm {
    pub value: f64,
    pub argmax_x: f64,
}

/// `sup |F(x) − F(a)|` over the primitive's interval: grid maximum, then
/// golden-section refinement around the best few grid peaks until the
/// bracket is narrower than `tol`.
pub fn alexiewicz_norm<F: RealFunction>(prim: &Primitive<F>, tol: f64) -> AlexiewiczNorm {
    let (a, b) = (prim.base, prim.end);
    let fa = prim.func.eval(a);
    let g = |x: f64| (prim.func.eval(x) - fa).abs();
    let h = (b - a) / (NORM_GRID - 1) as f64;
    let xs: Vec<f64> = (0..NORM_GRID)
        .map(|i| if i == NORM_GRID - 1 { b } else { a + h * i as f64 })
        .collect();
    let vals: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect();

    let mut peaks: Vec<usize> = (0..NORM_GRID)
        .filter(|&i| {
            (i == 0 || vals[i] >= vals[i - 1]) && (i == NORM_GRID - 1 || vals[i] >= vals[i + 1])
        })
        .collect();
    peaks.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    peaks.truncate(3);

    let mut best = AlexiewiczNorm {
        value: vals[peaks[0]],
        argmax_x: xs[peaks[0]],
    };
    let tol = tol.max(f64::EPSILON * (b - a));
    for i in peaks {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(NORM_GRID - 1)];
        let (x, v) = golden_max(&g, lo, hi, tol);
        if v > best.value {
            best = AlexiewiczNorm { value: v, argmax_x: x };
        }
    }
    best
}

fn golden_max(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while hi - lo > tol {
        if g1 >= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 >= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// `∫ₐᵇ f G = F(b)G(b) − ∫ₐᵇ F g` with `F(a) = 0` and `G(x) = ∫ₐˣ g`.
pub fn integrate_by_parts<F: RealFunction, G: RealFunction + ?Sized>(
    prim: &Primitive<F>,
    g: &G,
    tol: f64,
) -> Result<f64, CalculusError> {
    let (a, b) = (prim.base, prim.end);
    let gb = integrate_closure(|t| g.eval(t), &[a, b], tol / 4.0)?.value;
    let fg = integrate_closure(|t| prim.shifted(t) * g.eval(t), &[a, b], tol / 4.0)?.value;
    Ok(prim.shifted(b) * gb - fg)
}

/// Samples `F(c) − F(a)` at `c_k = b − (b−a)2^{-k}`, `k = 1..=40`, and
/// classifies the sequence.
pub fn hake_limit<F: RealFunction>(prim: &Primitive<F>, b: f64, tol: f64) -> LimitEstimate {
    let a = prim.base;
    let fa = prim.func.eval(a);
    let samples = (1..=HAKE_STEPS)
        .map(|k| {
            let c = b - (b - a) * 2f64.powi(-(k as i32));
            (c, prim.func.eval(c) - fa)
        })
        .collect();
    classify(samples, tol)
}

/// Leftmost point where `h` vanishes: `a` itself if `|h(a)| ≤ tol`, else the
/// first sign change on a uniform scan, bisected to width `tol`.
fn leftmost_root(
    h: impl Fn(f64) -> f64 + Sync,
    a: f64,
    b: f64,
    tol: f64,
    what: &'static str,
) -> Result<f64, CalculusError> {
    let ha = h(a);
    if ha.abs() <= tol {
        return Ok(a);
    }
    let step = (b - a) / ROOT_SCAN as f64;
    let xs: Vec<f64> = (0..=ROOT_SCAN)
        .map(|i| if i == ROOT_SCAN { b } else { a + step * i as f64 })
        .collect();
    let hs: Vec<f64> = xs.par_iter().map(|&x| h(x)).collect();
    let Some(i) = (1..=ROOT_SCAN).find(|&i| hs[i] == 0.0 || hs[i].signum() != ha.signum()) else {
        let (i, m) = hs
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v.abs() < acc.1 { (i, v.abs()) } else { acc });
        if m <= tol {
            return Ok(xs[i]);
        }
        return Err(CalculusError::NoRootBracketed {
            what,
            a,
            b,
            min_residual: m,
            at: xs[i],
        });
    };
    if hs[i] == 0.0 {
        return Ok(xs[i]);
    }
    let (mut lo, mut hi) = (xs[i - 1], xs[i]);
    let s_lo = hs[i - 1].signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let hm = h(mid);
        if hm == 0.0 {
            return Ok(mid);
        }
        if hm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ξ` with `∫ₐᵇ f g = f(ξ) ∫ₐᵇ g` for continuous `f` and `g ≥ 0`.
pub fn mean_value_xi_first<F, G>(f: &F, g: &G, a: f64, b: f64, tol: f64) -> Result<f64, CalculusError>
where
    F: RealFunction + ?Sized,
    G: RealFunction + ?Sized,
{
    if !(a < b && tol > 0.0) {
        return Err(CalculusError::InvalidInput(format!(
            "need a < b and tol > 0 (got {a}, {b}, {tol})"
        )));
    }
    let qtol = (tol * 1e-2).max(1e-15);
    let ig = integrate_closure(|t| g.eval(t), &[a, b], qtol)?.value;
    if ig <= tol {
        return Ok(a);
    }
    let ifg = integrate_closure(|t| f.eval(t) * g.eval(t), &[a, b], qtol)?.value;
    let target = ifg / ig;
    leftmost_root(|x| f.eval(x) - target, a, b, tol, "f − ∫fg/∫g")
}

/// `∫ₐᵇ G dF` by Romberg extrapolation of trapezoidal Stieltjes sums.
pub fn stieltjes_integral<F, G>(f_prim: &F, g_prim: &G, a: f64, b: f64, tol: f64) -> f64
where
    F: RealFunction + ?Sized,
    G: RealFunction + ?Sized,
{
    const LEVELS: usize = 18;
    let sum = |n: usize| {
        let h = (b - a) / n as f64;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x0 = a + h * i as f64;
                let x1 = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
                0.5 * (g_prim.eval(x0) + g_prim.eval(x1)) * (f_prim.eval(x1) - f_prim.eval(x0))
            })
            .sum::<f64>()
    };
    let mut prev: Vec<f64> = vec![sum(1)];
    for level in 1..LEVELS {
        let mut row = vec![sum(1 << level)];
        let mut factor = 1.0;
        for j in 0..level {
            factor *= 4.0;
            let r = row[j] + (row[j] - prev[j]) / (factor - 1.0);
            row.push(r);
        }
        let done = level >= 4 && (row[level] - prev[level - 1]).abs() <= tol;
        prev = row;
        if done {
            break;
        }
    }
    *prev.last().unwrap()
}

/// `ξ` with `∫ₐᵇ f G = G(a)∫ₐ^ξ f + G(b)∫_ξᵇ f`, where `g` keeps one sign.
pub fn mean_value_xi_second<F: RealFunction, G: RealFunction>(
    f_prim: &Primitive<F>,
    g_prim: &Primitive<G>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, CalculusError> {
    if !(a < b && tol > 0.0) {
        return Err(CalculusError::InvalidInput(format!(
            "need a < b and tol > 0 (got {a}, {b}, {tol})"
        )));
    }
    let (f, g) = (f_prim.func(), g_prim.func());
    let total = stieltjes_integral(f, g, a, b, (tol * 1e-2).max(1e-15));
    let (fa, fb) = (f.eval(a), f.eval(b));
    let (ga, gb) = (g.eval(a), g.eval(b));
    leftmost_root(
        |xi| {
            let fx = f.eval(xi);
            ga * (fx - fa) + gb * (fb - fx) - total
        },
        a,
        b,
        tol,
        "the second mean-value identity",
    )
}

/// Taylor polynomial, integral remainder and its Alexiewicz bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TaylorExpansion {
    pub order: usize,
    pub polynomial: f64,
    pub remainder: f64,
    pub bound: f64,
    /// `‖LD_{n+1} f‖` over the interval between `a` and `x`.
    pub ld_norm: f64,
    /// `f(x) − polynomial − remainder`.
    pub residual: f64,
}

/// Expands `f` about `a` to order `n = derivs.len() − 1` and evaluates at
/// `x`.
///
/// `derivs` holds `f, f′, …, f⁽ⁿ⁾`; `ld_next` is `LD_{n+1}f`. The derivative
/// list is spot-checked by central differences, `f⁽ⁿ⁾(x) − f⁽ⁿ⁾(a) = ∫ₐˣ
/// LD_{n+1}f` is checked to `tol`, and so are the expansion identity and the
/// remainder bound.
pub fn taylor(
    derivs: &[&dyn RealFunction],
    ld_next: &dyn RealFunction,
    a: f64,
    x: f64,
    tol: f64,
) -> Result<TaylorExpansion, CalculusError> {
    let Some((&f, _)) = derivs.split_first() else {
        return Err(CalculusError::InvalidInput("empty derivative list".into()));
    };
    if !(tol > 0.0) {
        return Err(CalculusError::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    for p in [a, x] {
        for d in derivs.iter().copied().chain([ld_next]) {
            if !d.domain().contains(p) {
                return Err(CalculusError::Domain { x: p, domain: d.domain() });
            }
        }
    }
    let n = derivs.len() - 1;
    let mut fact = 1.0;
    let mut polynomial = 0.0;
    let mut pow = 1.0;
    for (k, d) in derivs.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
            pow *= x - a;
        }
        polynomial += d.eval(a) * pow / fact;
    }
    if x == a {
        return Ok(TaylorExpansion {
            order: n,
            polynomial,
            remainder: 0.0,
            bound: 0.0,
            ld_norm: 0.0,
            residual: f.eval(x) - polynomial,
        });
    }

    spot_check_derivatives(derivs, 0.5 * (a + x), (x - a).abs())?;

    let (lo, hi) = if a < x { (a, x) } else { (x, a) };
    let orient = if a < x { 1.0 } else { -1.0 };
    let qtol = (tol * 1e-2).max(1e-15);
    let remainder = orient
        * integrate_closure(|t| ld_next.eval(t) * (x - t).powi(n as i32), &[lo, hi], qtol)?.value
        / fact;

    let step = orient * integrate_closure(|t| ld_next.eval(t), &[lo, hi], qtol)?.value;
    let top = derivs[n];
    let lhs = top.eval(x) - top.eval(a);
    if (lhs - step).abs() > tol {
        return Err(CalculusError::Consistency {
            check: "f⁽ⁿ⁾(x) − f⁽ⁿ⁾(a) against ∫ LD_{n+1}f",
            lhs,
            rhs: step,
            tol,
        });
    }

    // The norm is measured from the base point a, so for x < a the
    // primitive is reflected: u ↦ Φ(a) − Φ(a − u) on [0, a − x].
    let cumulative = CumulativePrimitive::new(ld_next, lo, hi, 64, qtol)?;
    let ld_norm = if a < x {
        alexiewicz_norm(&Primitive::on(&cumulative, lo, hi)?, 1e-10 * (hi - lo)).value
    } else {
        let total = cumulative.total();
        let reflected = crate::function::from_fn(0.0, hi - lo, |u| total - cumulative.eval(hi - u));
        alexiewicz_norm(&Primitive::on(&reflected, 0.0, hi - lo)?, 1e-10 * (hi - lo)).value
    };
    let bound = (x - a).abs().powi(n as i32) / fact * ld_norm;

    let residual = f.eval(x) - polynomial - remainder;
    if residual.abs() > tol {
        return Err(CalculusError::Consistency {
            check: "f(x) against polynomial + remainder",
            lhs: f.eval(x),
            rhs: polynomial + remainder,
            tol,
        });
    }
    if remainder.abs() > bound + tol {
        return Err(CalculusError::Consistency {
            check: "|remainder| against its norm bound",
            lhs: remainder.abs(),
            rhs: bound,
            tol,
        });
    }
    Ok(TaylorExpansion {
        order: n,
        polynomial,
        remainder,
        bound,
        ld_norm,
        residual,
    })
}

fn spot_check_derivatives(derivs: &[&dyn RealFunction], m: f64, span: f64) -> Result<(), CalculusError> {
    let h = 1e-3 * span.max(1e-3);
    for k in 1..derivs.len() {
        let (p, d) = (derivs[k - 1], derivs[k]);
        let dom = p.domain();
        if !(dom.contains(m - h) && dom.contains(m + h)) {
            continue;
        }
        let fd = (p.eval(m + h) - p.eval(m - h)) / (2.0 * h);
        let exact = d.eval(m);
        let tol = 1e-3 * (1.0 + exact.abs().max(fd.abs()));
        if (fd - exact).abs() > tol {
            return Err(CalculusError::Consistency {
                check: "derivative list against central differences",
                lhs: exact,
                rhs: fd,
                tol,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::from_fn;
    use crate::laplace_deriv::Classification;
    use std::f64::consts::{E, PI};

    #[test]
    fn ftc_examples() {
        let p = Primitive::new(from_fn(0.0, 3.0, |x| x * x), 0.0).unwrap();
        assert_eq!(ftc_integral(&p, 2.0).unwrap(), 4.0);
        let s = Primitive::new(from_fn(0.0, 4.0, f64::sin), 0.0).unwrap();
        assert!(ftc_integral(&s, PI).unwrap().abs() < 1e-15);
        assert!(matches!(ftc_integral(&s, 5.0), Err(CalculusError::Domain { .. })));
    }

    #[test]
    fn additivity_is_exact() {
        let p = Primitive::new(from_fn(0.0, 2.0, |x: f64| x.exp() * x.sin()), 0.0).unwrap();
        let (b, c) = (1.7, 0.6);
        let whole = ftc_integral(&p, b).unwrap();
        let split = ftc_integral(&p, c).unwrap() + (p.func().eval(b) - p.func().eval(c));
        assert!((whole - split).abs() <= 4.0 * f64::EPSILON * whole.abs());
    }

    #[test]
    fn continuity_probe() {
        let smooth = Primitive::new(from_fn(0.0, 1.0, f64::sqrt), 0.0).unwrap();
        assert!(smooth.check_continuity().is_ok());
        let jump = Primitive::new(from_fn(0.0, 1.0, |x| if x < 0.3 { 0.0 } else { 1.0 }), 0.0).unwrap();
        assert!(matches!(jump.check_continuity(), Err(CalculusError::Discontinuous { .. })));
    }

    #[test]
    fn norm_examples() {
        let id = Primitive::new(from_fn(0.0, 1.0, |x| x), 0.0).unwrap();
        assert!((alexiewicz_norm(&id, 1e-12).value - 1.0).abs() < 1e-12);
        let c = Primitive::new(from_fn(0.0, 2.0 * PI, |x| 1.0 - x.cos()), 0.0).unwrap();
        let n = alexiewicz_norm(&c, 1e-12);
        assert!((n.value - 2.0).abs() < 1e-12);
        assert!((n.argmax_x - PI).abs() < 1e-5);
        let z = Primitive::new(from_fn(0.0, 1.0, |_| 0.0), 0.0).unwrap();
        assert_eq!(alexiewicz_norm(&z, 1e-9).value, 0.0);
    }

    #[test]
    fn norm_finds_interior_peak_between_grid_points() {
        // Narrow bump whose crest sits between probe points.
        let p = Primitive::new(
            from_fn(0.0, 1.0, |x: f64| (-((x - 0.123_456_7) / 1e-4).powi(2)).exp()),
            0.0,
        )
        .unwrap();
        assert!((alexiewicz_norm(&p, 1e-12).value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cumulative_primitive_matches_closed_form() {
        let c = CumulativePrimitive::new(from_fn(0.0, 2.0, f64::cos), 0.0, 2.0, 16, 1e-13).unwrap();
        for &y in &[0.0, 0.3, 1.0, 1.999, 2.0] {
            assert!((c.eval(y) - y.sin()).abs() < 1e-12);
        }
        assert!(c.eval(2.5).is_nan());
    }

    #[test]
    fn parts_examples() {
        let f = Primitive::new(from_fn(0.0, PI / 2.0, f64::sin), 0.0).unwrap();
        let one = from_fn(0.0, PI / 2.0, |_| 1.0);
        let v = integrate_by_parts(&f, &one, 1e-12).unwrap();
        assert!((v - (PI / 2.0 - 1.0)).abs() < 1e-12);
        let zero = from_fn(0.0, PI / 2.0, |_| 0.0);
        assert_eq!(integrate_by_parts(&f, &zero, 1e-12).unwrap(), 0.0);
        let fz = Primitive::new(from_fn(0.0, 1.0, |_| 0.0), 0.0).unwrap();
        assert_eq!(integrate_by_parts(&fz, &from_fn(0.0, 1.0, f64::exp), 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn parts_against_direct_quadrature() {
        // f = x e^x (F = (x−1)e^x + 1), g = cos (G = sin).
        let f = Primitive::new(from_fn(0.0, 1.5, |x: f64| (x - 1.0) * x.exp() + 1.0), 0.0).unwrap();
        let g = from_fn(0.0, 1.5, f64::cos);
        let lhs = integrate_by_parts(&f, &g, 1e-12).unwrap();
        let direct = integrate_closure(|x: f64| x * x.exp() * x.sin(), &[0.0, 1.5], 1e-13)
            .unwrap()
            .value;
        assert!((lhs - direct).abs() < 1e-10);
    }

    #[test]
    fn hake_examples() {
        let sq = Primitive::new(from_fn(0.0, 1.0, |c: f64| 2.0 * c.sqrt()), 0.0).unwrap();
        let e = hake_limit(&sq, 1.0, 1e-6);
        assert!(e.is_converged() && (e.value - 2.0).abs() < 1e-6);

        let osc = Primitive::new(from_fn(0.0, 1.0, |c: f64| (1.0 / (1.0 - c)).sin()), 0.0).unwrap();
        assert_eq!(hake_limit(&osc, 1.0, 1e-6).classification, Classification::Oscillating);

        let k = Primitive::new(from_fn(0.0, 1.0, |_| 5.0), 0.0).unwrap();
        let e = hake_limit(&k, 1.0, 1e-12);
        assert!(e.is_converged() && e.value == 0.0);
    }

    #[test]
    fn first_mean_value_examples() {
        let id = from_fn(0.0, 1.0, |x| x);
        let one = from_fn(0.0, 1.0, |_| 1.0);
        let xi = mean_value_xi_first(&id, &one, 0.0, 1.0, 1e-12).unwrap();
        assert!((xi - 0.5).abs() < 1e-10);
        let c = from_fn(0.0, 1.0, |_| 3.0);
        assert_eq!(mean_value_xi_first(&c, &id, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        let zero = from_fn(0.0, 1.0, |_| 0.0);
        assert_eq!(mean_value_xi_first(&id, &zero, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn first_mean_value_identity_and_leftmost_choice() {
        let f = from_fn(0.0, 2.0 * PI, f64::sin);
        let g = from_fn(0.0, 2.0 * PI, |x: f64| 1.0 + 0.5 * x.cos());
        let xi = mean_value_xi_first(&f, &g, 0.0, 2.0 * PI, 1e-13).unwrap();
        let ifg = integrate_closure(|x: f64| x.sin() * (1.0 + 0.5 * x.cos()), &[0.0, 2.0 * PI], 1e-14)
            .unwrap()
            .value;
        let ig = 2.0 * PI;
        assert!((ifg - xi.sin() * ig).abs() < 1e-10);
        // sin equals the (≈0) mean first at 0 itself.
        assert!(xi < 1e-6);
    }

    #[test]
    fn first_mean_value_reports_missing_root() {
        // f ≥ 1 everywhere but g < 0 pushes the target outside f's range.
        let f = from_fn(0.0, 1.0, |x| 1.0 + x);
        let g = from_fn(0.0, 1.0, |x| if x < 0.5 { 1.0 } else { -0.9 });
        assert!(matches!(
            mean_value_xi_first(&f, &g, 0.0, 1.0, 1e-10),
            Err(CalculusError::NoRootBracketed { .. })
        ));
    }

    #[test]
    fn second_mean_value_examples() {
        let f = Primitive::new(from_fn(0.0, 1.0, |x| x), 0.0).unwrap();
        let g = Primitive::new(from_fn(0.0, 1.0, |x| x), 0.0).unwrap();
        let xi = mean_value_xi_second(&f, &g, 0.0, 1.0, 1e-12).unwrap();
        assert!((xi - 0.5).abs() < 1e-10);
        let fz = Primitive::new(from_fn(0.0, 1.0, |_| 0.0), 0.0).unwrap();
        assert_eq!(mean_value_xi_second(&fz, &g, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        let gz = Primitive::new(from_fn(0.0, 1.0, |_| 0.0), 0.0).unwrap();
        assert_eq!(mean_value_xi_second(&f, &gz, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn stieltjes_matches_closed_form() {
        // ∫₀¹ x² d(sin x) = ∫₀¹ x² cos x dx = 2cos 1 − sin 1.
        let f = from_fn(0.0, 1.0, f64::sin);
        let g = from_fn(0.0, 1.0, |x| x * x);
        let v = stieltjes_integral(&f, &g, 0.0, 1.0, 1e-14);
        assert!((v - (2.0 * 1f64.cos() - 1f64.sin())).abs() < 1e-12);
    }

    #[test]
    fn taylor_exp_second_order() {
        let e = from_fn(-1.0, 2.0, f64::exp);
        let derivs: Vec<&dyn RealFunction> = vec![&e, &e, &e];
        let t = taylor(&derivs, &e, 0.0, 1.0, 1e-10).unwrap();
        assert!((t.remainder - (E - 2.5)).abs() < 1e-10);
        assert!((t.bound - (E - 1.0) / 2.0).abs() < 1e-9);
        assert!(t.remainder <= t.bound);
    }

    #[test]
    fn taylor_order_zero_is_increment() {
        let s = from_fn(-1.0, 2.0, f64::sin);
        let c = from_fn(-1.0, 2.0, f64::cos);
        let t = taylor(&[&s], &c, 0.2, 1.1, 1e-10).unwrap();
        assert!((t.remainder - (1.1f64.sin() - 0.2f64.sin())).abs() < 1e-11);
    }

    #[test]
    fn taylor_to_the_left_of_base() {
        let s = from_fn(-2.0, 2.0, f64::sin);
        let c = from_fn(-2.0, 2.0, f64::cos);
        let ms = from_fn(-2.0, 2.0, |x: f64| -x.sin());
        let mc = from_fn(-2.0, 2.0, |x: f64| -x.cos());
        let t = taylor(&[&s, &c, &ms], &mc, 0.5, -1.0, 1e-10).unwrap();
        assert!(t.residual.abs() < 1e-10 && t.remainder.abs() <= t.bound + 1e-10);
    }

    #[test]
    fn taylor_rejects_wrong_derivative() {
        let s = from_fn(-1.0, 2.0, f64::sin);
        let wrong = from_fn(-1.0, 2.0, |x: f64| -x.cos());
        let ms = from_fn(-1.0, 2.0, |x: f64| -x.sin());
        assert!(matches!(
            taylor(&[&s, &wrong], &ms, 0.0, 1.0, 1e-8),
            Err(CalculusError::Consistency { .. })
        ));
    }

    #[test]
    fn taylor_rejects_inconsistent_ld_step() {
        let e = from_fn(-1.0, 2.0, f64::exp);
        let off = from_fn(-1.0, 2.0, |x: f64| x.exp() + 0.1);
        assert!(matches!(
            taylor(&[&e, &e], &off, 0.0, 1.0, 1e-8),
            Err(CalculusError::Consistency { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn norm_below_l1(c in prop::collection::vec(-2.0f64..2.0, 4), w in 0.5f64..6.0) {
                let h = move |x: f64| c[0] + c[1] * (w * x).sin() + c[2] * x * x + c[3] * (w * x).cos();
                let prim = CumulativePrimitive::new(from_fn(0.0, 1.0, h.clone()), 0.0, 1.0, 32, 1e-12).unwrap();
                let p = Primitive::new(&prim, 0.0).unwrap();
                let norm = alexiewicz_norm(&p, 1e-10).value;
                let l1 = integrate_closure(|x| h(x).abs(), &[0.0, 1.0], 1e-12).unwrap().value;
                prop_assert!(norm <= l1 + 1e-9);
            }

            #[test]
            fn monotone_integrals(c in -1.0f64..1.0, d in 0.0f64..1.0) {
                let f = move |x: f64| c * x.sin();
                let h = move |x: f64| c * x.sin() + d * x * x;
                let i_f = integrate_closure(f, &[0.0, 2.0], 1e-12).unwrap().value;
                let i_h = integrate_closure(h, &[0.0, 2.0], 1e-12).unwrap().value;
                prop_assert!(i_f <= i_h + 1e-12);
            }

            #[test]
            fn taylor_bound_holds(w in 0.2f64..2.0, n in 0usize..=5, x in 0.05f64..1.0) {
                // f(t) = sin(w t): derivatives wᵏ sin(w t + kπ/2).
                let fns: Vec<_> = (0..=n + 1)
                    .map(|k| {
                        let amp = w.powi(k as i32);
                        let shift = k as f64 * PI / 2.0;
                        from_fn(-1.0, 2.0, move |t: f64| amp * (w * t + shift).sin())
                    })
                    .collect();
                let derivs: Vec<&dyn RealFunction> = fns[..=n].iter().map(|f| f as &dyn RealFunction).collect();
                let t = taylor(&derivs, &fns[n + 1], 0.0, x, 1e-9).unwrap();
                prop_assert!(t.remainder.abs() <= t.bound + 1e-9);
            }
        }
    }
}
