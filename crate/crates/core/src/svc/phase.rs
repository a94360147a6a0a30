//! `∫_P^Q A(u) sin u du` with `A(u) = exp(E + η u^{-4/7}) u^{-12/7}`.
//!
//! This is the shape every weighted gap integral takes after substituting
//! `u = t^{-7/4}` for the offset `t` from a gap endpoint. Below a threshold
//! `U*` the integrand is handled by adaptive quadrature between multiples of
//! π. Above it, `A` varies slowly on the scale of one period and the integral
//! is the tail of the asymptotic series
//!
//! `∫_U^∞ A sin = Σ_m (-1)^m [A^{(2m)}(U) cos U − A^{(2m+1)}(U) sin U]`,
//!
//! truncated at its smallest term. Derivatives of `A` come from a Taylor jet
//! of `ln A`.

use crate::dd::DoubleDouble;
use crate::quadrature::{integrate_closure, QuadratureError};

const JET_ORDER: usize = 64;
const PANEL_LIMIT: f64 = 200_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseIntegral {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

fn ln_amplitude(e: f64, eta: f64, u: f64) -> f64 {
    let ln_u = u.ln();
    e + eta * (-4.0 / 7.0 * ln_u).exp() - 12.0 / 7.0 * ln_u
}

/// Start of the asymptotic regime: both terms of `(ln A)'` are at most 0.025.
pub(crate) fn asymptotic_threshold(eta: f64) -> f64 {
    (22.86 * eta.abs()).powf(7.0 / 11.0).max(68.6)
}

/// `∫_P^Q exp(E + η u^{-4/7}) u^{-12/7} sin u du`; `Q = None` means `+∞`.
pub fn phase_integral(
    e: f64,
    eta: f64,
    p: DoubleDouble,
    q: Option<DoubleDouble>,
    tol: f64,
) -> Result<PhaseIntegral, QuadratureError> {
    let mut out = PhaseIntegral {
        value: 0.0,
        abs_error_estimate: 0.0,
        evaluations: 0,
    };
    if !p.is_positive() || q.is_some_and(|q| !(p < q)) {
        return Ok(out);
    }
    let ustar = asymptotic_threshold(eta);
    let p_f = p.to_f64();
    if p_f < ustar {
        let r = match q {
            Some(q) if q.to_f64() < ustar => q.to_f64(),
            _ => ustar,
        };
        if r > p_f {
            let (v, err, n) = oscillatory_quadrature(e, eta, p_f, r, tol / 2.0)?;
            out.value += v;
            out.abs_error_estimate += err;
            out.evaluations += n;
        }
    }
    if q.map_or(true, |q| q.to_f64() > ustar) {
        let start = if p_f >= ustar {
            p
        } else {
            DoubleDouble::from_f64(ustar)
        };
        let (t0, e0) = asymptotic_tail(e, eta, start);
        let (t1, e1) = q.map_or((0.0, 0.0), |q| asymptotic_tail(e, eta, q));
        out.value += t0 - t1;
        out.abs_error_estimate += e0 + e1;
        out.evaluations += 2;
    }
    Ok(out)
}

fn oscillatory_quadrature(
    e: f64,
    eta: f64,
    p: f64,
    r: f64,
    tol: f64,
) -> Result<(f64, f64, usize), QuadratureError> {
    let ln_a = |u: f64| ln_amplitude(e, eta, u);
    // ln A is unimodal: decreasing for η ≥ 0, single maximum otherwise.
    let peak = if eta < 0.0 {
        (-eta / 3.0).powf(7.0 / 4.0).clamp(p, r)
    } else {
        p
    };
    let width = r - p;
    let top = ln_a(peak);
    let thr = (tol / (4.0 * width)).ln();
    if top <= thr {
        return Ok((0.0, top.exp() * width, 1));
    }
    let lo = if ln_a(p) >= thr {
        p
    } else {
        bisect_crossing(&ln_a, p, peak, thr)
    };
    let hi = if ln_a(r) >= thr {
        r
    } else {
        bisect_crossing(&ln_a, r, peak, thr)
    };
    let dropped = thr.exp() * ((lo - p) + (r - hi));

    let first = (lo / std::f64::consts::PI).ceil();
    let last = (hi / std::f64::consts::PI).floor();
    let count = (last - first + 1.0).max(0.0);
    let stride = (count / PANEL_LIMIT).ceil().max(1.0);
    let mut bps = vec![lo];
    let mut k = first;
    while k <= last {
        let x = k * std::f64::consts::PI;
        if x > lo && x < hi {
            bps.push(x);
        }
        k += stride;
    }
    bps.push(hi);
    let res = integrate_closure(
        |u| {
            let la = ln_a(u);
            if la < -745.0 {
                0.0
            } else {
                la.exp() * u.sin()
            }
        },
        &bps,
        tol / 2.0,
    )?;
    Ok((res.value, res.abs_error_estimate + dropped, res.evaluations))
}

/// Point where `g` crosses `thr`, with `g(outer) < thr ≤ g(inner)`.
fn bisect_crossing(g: &impl Fn(f64) -> f64, outer: f64, inner: f64, thr: f64) -> f64 {
    let (mut below, mut above) = (outer, inner);
    for _ in 0..80 {
        let mid = 0.5 * (below + above);
        if mid == below || mid == above {
            break;
        }
        if g(mid) >= thr {
            above = mid;
        } else {
            below = mid;
        }
    }
    below
}

/// `∫_U^∞ A sin u du` for `U` in the asymptotic regime, with an estimate of
/// the truncation error.
pub(crate) fn asymptotic_tail(e: f64, eta: f64, u: DoubleDouble) -> (f64, f64) {
    let uh = u.to_f64();
    let p0 = ln_amplitude(e, eta, uh);
    if p0 < -740.0 {
        return (0.0, 0.0);
    }
    // Taylor coefficients of ln A(U + h) in h.
    let u47 = (-4.0 / 7.0 * uh.ln()).exp();
    let mut pcoef = [0.0f64; JET_ORDER + 1];
    let mut binom = 1.0;
    let mut upow = 1.0;
    for (j, c) in pcoef.iter_mut().enumerate().skip(1) {
        let jf = j as f64;
        binom *= (-4.0 / 7.0 - (jf - 1.0)) / jf;
        upow /= uh;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        *c = eta * u47 * binom * upow - 12.0 / 7.0 * sign * upow / jf;
    }
    // d_k = A^{(k)}(U) / A(U) via the exponential recurrence, written for
    // k!·a_k so that nothing overflows.
    let mut d = [0.0f64; JET_ORDER + 1];
    d[0] = 1.0;
    for k in 1..=JET_ORDER {
        let mut acc = 0.0;
        let mut falling = 1.0;
        for j in 1..=k {
            acc += j as f64 * pcoef[j] * falling * d[k - j];
            falling *= (k - j) as f64;
        }
        d[k] = acc;
    }
    let (sin_u, cos_u) = u.sin_cos();
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    for m in 0..JET_ORDER / 2 {
        let term = sign * (d[2 * m] * cos_u - d[2 * m + 1] * sin_u);
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last <= 1e-17 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    let scale = p0.exp();
    (
        scale * sum,
        scale * (last + 4.0 * f64::EPSILON * sum.abs()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Direct phase-space quadrature with π breakpoints.
    fn direct(e: f64, eta: f64, p: f64, q: f64) -> f64 {
        let mut bps = vec![p];
        let mut k = (p / PI).ceil();
        while k * PI < q {
            bps.push(k * PI);
            k += 1.0;
        }
        bps.push(q);
        integrate_closure(
            |u| ln_amplitude(e, eta, u).exp() * u.sin(),
            &bps,
            1e-14,
        )
        .unwrap()
        .value
    }

    #[test]
    fn tail_difference_matches_quadrature() {
        for &(e, eta) in &[(0.0, 0.0), (2.0, -40.0), (1.0, 25.0), (5.0, -300.0)] {
            let ustar = asymptotic_threshold(eta);
            let p = ustar * 1.3;
            let q = p + 4000.0;
            let (a, ea) = asymptotic_tail(e, eta, DoubleDouble::from_f64(p));
            let (b, eb) = asymptotic_tail(e, eta, DoubleDouble::from_f64(q));
            let want = direct(e, eta, p, q);
            let scale = ln_amplitude(e, eta, p).exp();
            assert!(
                ((a - b) - want).abs() <= 1e-9 * scale + ea + eb,
                "e={e} eta={eta}: tail {} vs direct {want}",
                a - b
            );
        }
    }

    #[test]
    fn full_integral_matches_quadrature_across_threshold() {
        let (e, eta) = (0.5, -200.0);
        let p = 40.0;
        let q = 20_000.0;
        let r = phase_integral(
            e,
            eta,
            DoubleDouble::from_f64(p),
            Some(DoubleDouble::from_f64(q)),
            1e-12,
        )
        .unwrap();
        let want = direct(e, eta, p, q);
        assert!((r.value - want).abs() < 1e-10, "{} vs {want}", r.value);
    }

    #[test]
    fn infinite_upper_limit_converges() {
        // The integrand beyond Q contributes less than A(Q)·2, so truncating the
        // direct quadrature far out bounds the answer.
        let (e, eta) = (0.0, -10.0);
        let p = 20.0;
        let inf = phase_integral(e, eta, DoubleDouble::from_f64(p), None, 1e-13).unwrap();
        let q = 3.0e5;
        let finite = direct(e, eta, p, q);
        let bound = 2.0 * ln_amplitude(e, eta, q).exp();
        assert!((inf.value - finite).abs() <= bound + 1e-12);
    }

    #[test]
    fn empty_range_is_zero() {
        let x = DoubleDouble::from_f64(10.0);
        let r = phase_integral(0.0, 0.0, x, Some(x), 1e-10).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
