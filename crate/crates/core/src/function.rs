use std::fmt;
use std::sync::Arc;

use crate::quadrature::{QuadratureError, QuadratureResult, WeightedQuery};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Containment with a relative slack of a few ulps, for endpoints produced
    /// by arithmetic such as `x + delta`.
    pub fn contains_loose(&self, x: f64) -> bool {
        let slack = 4.0 * f64::EPSILON * (self.lo.abs().max(self.hi.abs()).max(1.0));
        self.lo - slack <= x && x <= self.hi + slack
    }

    pub fn unbounded() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A real-valued map on a closed interval.
///
/// This is the input abstraction for every operation in the crate. Functions
/// with special structure can override [`RealFunction::exp_weighted_hint`] to
/// supply the weighted transform `s^p ∫₀^δ e^{-st} f(x ± t) dt` by a route
/// other than generic quadrature.
pub trait RealFunction: Send + Sync {
    fn domain(&self) -> Interval;

    fn eval(&self, x: f64) -> f64;

    fn exp_weighted_hint(
        &self,
        _query: &WeightedQuery,
    ) -> Option<Result<QuadratureResult, QuadratureError>> {
        None
    }
}

impl<T: RealFunction + ?Sized> RealFunction for &T {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn exp_weighted_hint(
        &self,
        query: &WeightedQuery,
    ) -> Option<Result<QuadratureResult, QuadratureError>> {
        (**self).exp_weighted_hint(query)
    }
}

impl<T: RealFunction + ?Sized> RealFunction for Arc<T> {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn exp_weighted_hint(
        &self,
        query: &WeightedQuery,
    ) -> Option<Result<QuadratureResult, QuadratureError>> {
        (**self).exp_weighted_hint(query)
    }
}

impl<T: RealFunction + ?Sized> RealFunction for Box<T> {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn exp_weighted_hint(
        &self,
        query: &WeightedQuery,
    ) -> Option<Result<QuadratureResult, QuadratureError>> {
        (**self).exp_weighted_hint(query)
    }
}

/// A closure together with its domain.
#[derive(Clone)]
pub struct FnFunction<F> {
    domain: Interval,
    f: F,
}

impl<F> FnFunction<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(domain: Interval, f: F) -> Self {
        Self { domain, f }
    }
}

impl<F> RealFunction for FnFunction<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn domain(&self) -> Interval {
        self.domain
    }
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl<F> fmt::Debug for FnFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnFunction")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Wraps a closure as a [`RealFunction`] on `[lo, hi]`.
pub fn from_fn<F>(lo: f64, hi: f64, f: F) -> FnFunction<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    FnFunction::new(Interval::new(lo, hi), f)
}

/// `f − c`. Forwards the weighted-transform hint of `f`, correcting it for the
/// constant analytically.
pub struct Shifted<F> {
    pub inner: F,
    pub offset: f64,
}

impl<F: RealFunction> Shifted<F> {
    pub fn new(inner: F, offset: f64) -> Self {
        Self { inner, offset }
    }
}

impl<F: RealFunction> RealFunction for Shifted<F> {
    fn domain(&self) -> Interval {
        self.inner.domain()
    }

    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x) - self.offset
    }

    fn exp_weighted_hint(
        &self,
        query: &WeightedQuery,
    ) -> Option<Result<QuadratureResult, QuadratureError>> {
        let inner = self.inner.exp_weighted_hint(query)?;
        Some(inner.map(|mut r| {
            r.value -= self.offset * query.constant_transform();
            r
        }))
    }
}
