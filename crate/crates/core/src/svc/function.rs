use std::cmp::Ordering;

use crate::dd::DoubleDouble;
use crate::function::{Interval, RealFunction};
use crate::quadrature::{QuadratureError, QuadratureResult, Side, WeightedQuery};

use super::phase::phase_integral;
use super::{Component, ComponentId, Dyadic, Gap, Location, SvcModel};

/// The function that is `0` on SVC(4) and, on each gap `(a, b)` with midpoint
/// `c`, equals `(x−a)^{1/4} sin((x−a)^{-7/4})` on `(a, c]` and
/// `(b−x)^{1/4} sin((b−x)^{-7/4})` on `[c, b)`.
///
/// Gaps deeper than the model are treated as part of the set; the resulting
/// pointwise error is at most [`PathologicalFunction::truncation_bound`].
#[derive(Debug, Clone, Copy)]
pub struct PathologicalFunction {
    model: SvcModel,
}

/// `t^{1/4} sin(t^{-7/4})` with the phase formed and reduced in
/// double-double.
pub fn endpoint_branch(t: DoubleDouble) -> f64 {
    if !t.is_positive() {
        return 0.0;
    }
    let (sin, _) = t.pow_neg_seven_quarters().sin_cos();
    t.to_f64().powf(0.25) * sin
}

impl PathologicalFunction {
    pub fn new(model: SvcModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &SvcModel {
        &self.model
    }

    /// `(4^{-N}/2)^{1/4}`: bound on `|f|` over gaps below the model depth.
    pub fn truncation_bound(&self) -> f64 {
        (4f64.powi(-(self.model.depth() as i32)) / 2.0).powf(0.25)
    }

    /// Value on a given gap; `x` must lie in `[a, b]`.
    pub fn eval_in_gap(gap: &Gap, x: f64) -> f64 {
        let xd = DoubleDouble::from_f64(x);
        if gap.c().cmp_f64(x) != Ordering::Less {
            endpoint_branch(xd - gap.a.to_dd())
        } else {
            endpoint_branch(gap.b.to_dd() - xd)
        }
    }

    /// `s^p ∫₀^δ e^{-st} f(x ± t) dt`, summed gap by gap in phase space.
    ///
    /// The construction tree is walked from the root. For a component at
    /// level `n`, every gap inside it of length `L` at weight at most `W`
    /// contributes at most `W L³ (1/2 + sL/50)` (integration by parts
    /// against the phase); when that total for the whole subtree fits the
    /// component's share of the tolerance the subtree is dropped and the
    /// bound is charged to the error estimate.
    pub fn weighted_transform(
        &self,
        q: &WeightedQuery,
    ) -> Result<QuadratureResult, QuadratureError> {
        q.validate()?;
        let (lo, hi) = q.span();
        let dom = self.domain();
        if !dom.contains_loose(lo) || !dom.contains_loose(hi) {
            return Err(QuadratureError::OutOfDomain {
                a: lo,
                b: hi,
                domain: dom,
            });
        }
        let ln_scale = q.power.exponent() as f64 * q.s.ln();
        let ctx = Ctx::new(q.x, q.side, q.s, ln_scale, q.tol, lo.max(0.0), hi.min(1.0), self.model.depth());
        self.walk(&ctx)
    }

    /// `∫_lo^hi f`, by the same gap walk with unit weight.
    pub fn integral(&self, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult, QuadratureError> {
        if !(tol > 0.0) {
            return Err(QuadratureError::InvalidInput(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(QuadratureError::OutOfDomain {
                a: lo,
                b: hi,
                domain: self.domain(),
            });
        }
        if lo == hi {
            return Ok(QuadratureResult::zero());
        }
        let ctx = Ctx::new(lo, Side::Plus, 0.0, 0.0, tol, lo, hi, self.model.depth());
        self.walk(&ctx)
    }

    fn walk(&self, ctx: &Ctx) -> Result<QuadratureResult, QuadratureError> {
        let mut acc = Acc::default();
        let mut stack = vec![Component {
            id: ComponentId { level: 0, index: 0 },
            lo: Dyadic::ZERO,
            hi: Dyadic::ONE,
        }];
        while let Some(c) = stack.pop() {
            let n = c.id.level;
            let (clo, chi) = (c.lo.to_f64(), c.hi.to_f64());
            let Some((overlap, weight)) = ctx.overlap(clo, chi) else {
                continue;
            };
            let bound = weight * ctx.subtree_bound[n as usize];
            if bound <= ctx.prune_tol * overlap / ctx.width {
                acc.err += bound;
                continue;
            }
            if n < ctx.depth {
                let gap = SvcModel::middle_gap(&c);
                ctx.integrate_gap(&gap, &mut acc)?;
            }
            if n + 1 < ctx.depth {
                stack.extend(SvcModel::children(&c));
            }
        }
        Ok(QuadratureResult {
            value: acc.value,
            abs_error_estimate: acc.err,
            evaluations: acc.evals.max(1),
        })
    }
}

impl RealFunction for PathologicalFunction {
    fn domain(&self) -> Interval {
        Interval::new(0.0, 1.0)
    }

    fn eval(&self, x: f64) -> f64 {
        match self.model.locate(x) {
            Location::InGap(id) => {
                let gap = self.model.gap(id).expect("located gap exists");
                Self::eval_in_gap(&gap, x)
            }
            Location::Outside => f64::NAN,
            _ => 0.0,
        }
    }

    fn exp_weighted_hint(
        &self,
        query: &WeightedQuery,
    ) -> Option<Result<QuadratureResult, QuadratureError>> {
        Some(self.weighted_transform(query))
    }
}

#[derive(Default)]
struct Acc {
    value: f64,
    err: f64,
    evals: usize,
}

struct Ctx {
    x: f64,
    side: Side,
    s: f64,
    ln_scale: f64,
    lo: f64,
    hi: f64,
    width: f64,
    depth: u32,
    prune_tol: f64,
    gap_tol: f64,
    /// Σ over gaps strictly below a level-`n` component of `L³(1/2 + sL/50)`.
    subtree_bound: Vec<f64>,
}

impl Ctx {
    #[allow(clippy::too_many_arguments)]
    fn new(x: f64, side: Side, s: f64, ln_scale: f64, tol: f64, lo: f64, hi: f64, depth: u32) -> Self {
        let subtree_bound = (0..=depth)
            .map(|n| {
                (n + 1..=depth)
                    .map(|m| {
                        let len = 4f64.powi(-(m as i32));
                        2f64.powi((m - n - 1) as i32) * gap_bound(len, s)
                    })
                    .sum()
            })
            .collect();
        Self {
            x,
            side,
            s,
            ln_scale,
            lo,
            hi,
            width: hi - lo,
            depth,
            prune_tol: tol / 2.0,
            gap_tol: tol / 2.0,
            subtree_bound,
        }
    }

    /// Length of `[clo, chi] ∩ window` and the largest weight on it.
    fn overlap(&self, clo: f64, chi: f64) -> Option<(f64, f64)> {
        let a = clo.max(self.lo);
        let b = chi.min(self.hi);
        if !(b > a) {
            return None;
        }
        let dist = match self.side {
            Side::Plus => (a - self.x).max(0.0),
            Side::Minus => (self.x - b).max(0.0),
        };
        Some((b - a, (self.ln_scale - self.s * dist).exp()))
    }

    fn kappa(&self) -> f64 {
        match self.side {
            Side::Plus => -self.s,
            Side::Minus => self.s,
        }
    }

    fn integrate_gap(&self, gap: &Gap, acc: &mut Acc) -> Result<(), QuadratureError> {
        let (ga, gb) = (gap.a.to_f64(), gap.b.to_f64());
        let Some((overlap, weight)) = self.overlap(ga, gb) else {
            return Ok(());
        };
        let len = gap.length().to_f64();
        let budget = self.gap_tol * overlap / self.width;
        let bound = weight * gap_bound(len, self.s);
        if bound <= budget {
            acc.err += bound;
            return Ok(());
        }
        let x = DoubleDouble::from_f64(self.x);
        let wlo = DoubleDouble::from_f64(self.lo);
        let whi = DoubleDouble::from_f64(self.hi);
        let (a, b) = (gap.a.to_dd(), gap.b.to_dd());
        let half = Dyadic(gap.length().0 >> 1).to_dd();
        let kappa = self.kappa();
        let tol = budget * 7.0 / 8.0;

        // Left half: offset t = y − a over [max(0, lo − a), min(L/2, hi − a)].
        let t_lo = max_dd(DoubleDouble::ZERO, wlo - a);
        let t_hi = min_dd(half, whi - a);
        let e_g = self.ln_scale + kappa * (a - x).to_f64();
        self.half_gap(e_g, kappa, t_lo, t_hi, tol, acc)?;

        // Right half: offset t = b − y over [max(0, b − hi), min(L/2, b − lo)].
        let t_lo = max_dd(DoubleDouble::ZERO, b - whi);
        let t_hi = min_dd(half, b - wlo);
        let e_h = self.ln_scale + kappa * (b - x).to_f64();
        self.half_gap(e_h, -kappa, t_lo, t_hi, tol, acc)
    }

    fn half_gap(
        &self,
        e: f64,
        eta: f64,
        t_lo: DoubleDouble,
        t_hi: DoubleDouble,
        tol: f64,
        acc: &mut Acc,
    ) -> Result<(), QuadratureError> {
        if !(t_lo < t_hi) {
            return Ok(());
        }
        let p = t_hi.pow_neg_seven_quarters();
        let q = t_lo
            .is_positive()
            .then(|| t_lo.pow_neg_seven_quarters());
        let r = phase_integral(e, eta, p, q, tol)?;
        acc.value += 4.0 / 7.0 * r.value;
        acc.err += 4.0 / 7.0 * r.abs_error_estimate;
        acc.evals += r.evaluations;
        Ok(())
    }
}

/// Bound on `|∫ w f|` over any part of one gap of length `len`, per unit of
/// maximal weight.
fn gap_bound(len: f64, s: f64) -> f64 {
    len * len * len * (0.5 + s * len / 50.0)
}

fn max_dd(a: DoubleDouble, b: DoubleDouble) -> DoubleDouble {
    if a < b {
        b
    } else {
        a
    }
}

fn min_dd(a: DoubleDouble, b: DoubleDouble) -> DoubleDouble {
    if a < b {
        a
    } else {
        b
    }
}
