//! Non-differentiability witnesses at points of the set.
//!
//! For `a` in the set and a level `n ≥ 2`, one side of `a` stays inside `S_n`
//! for a distance `5·4^{-(n+1)}`. On that side a gap of level in
//! `(n, 2n]` lies inside `[a + 4^{-(n+1)}, a + 5·4^{-(n+1)}]` (mirrored on
//! the left). Inside its quarter `(d, c)` next to the near endpoint sit `u`,
//! where the sine factor is `1`, and `v`, where it is `0`.

use std::f64::consts::PI;

use crate::quadrature::Side;

use super::{Dyadic, Gap, PathologicalFunction, SvcError, SvcModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// The level `n` whose neighbourhood is searched.
    pub level: u32,
    pub side: Side,
    pub gap: Gap,
    /// Smallest integer with `2lπ` beyond the midpoint phase.
    pub l: f64,
    /// `((4l+1)π/2)^{-4/7}`: distance of `u` from the near gap endpoint.
    pub u_offset: f64,
    /// `(2lπ)^{-4/7}`: distance of `v` from the near gap endpoint.
    pub v_offset: f64,
    /// Signed `u − a`.
    pub u_minus_a: f64,
    /// Signed `v − a`.
    pub v_minus_a: f64,
    pub u: f64,
    pub v: f64,
    /// `f(u) = u_offset^{1/4}` since the sine factor is exactly one.
    pub f_u: f64,
    /// `f(v) = 0` since the sine factor is exactly zero.
    pub f_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DifferenceQuotient {
    pub k: u32,
    pub side: Side,
    pub gap_level: u32,
    pub quotient_u: f64,
    pub quotient_v: f64,
    /// `2^{k+3/2}/5`, the guaranteed lower bound on `|quotient_u|`.
    pub lower_bound: f64,
}

fn not_found(model: &SvcModel, a: Dyadic, level: u32) -> SvcError {
    SvcError::NoWitnessAtDepth {
        level,
        point: a.to_string(),
        depth: model.depth(),
    }
}

/// Searches both sides of `a` (right first) for the level-`level` witness.
pub fn witness_pair(model: &SvcModel, a: Dyadic, level: u32) -> Result<Witness, SvcError> {
    if !model.is_certified(a) {
        return Err(SvcError::NotCertified {
            point: a.to_string(),
            depth: model.depth(),
        });
    }
    if level < 2 || level >= model.depth() {
        return Err(not_found(model, a, level));
    }
    [Side::Plus, Side::Minus]
        .into_iter()
        .find_map(|side| witness_on_side(model, a, level, side))
        .ok_or_else(|| not_found(model, a, level))
}

fn witness_on_side(model: &SvcModel, a: Dyadic, n: u32, side: Side) -> Option<Witness> {
    let unit = Dyadic::pow2_neg(2 * (n + 1));
    let reach = Dyadic(5 * unit.0);
    // [a, a ± 5·4^{-(n+1)}] must avoid every gap of level ≤ n.
    let (lo, hi) = match side {
        Side::Plus => (a, a + reach),
        Side::Minus => (a - reach, a),
    };
    if lo < Dyadic::ZERO || hi > Dyadic::ONE || !model.gaps_intersecting(lo, hi, n).is_empty() {
        return None;
    }
    let (ilo, ihi) = match side {
        Side::Plus => (a + unit, a + reach),
        Side::Minus => (a - reach, a - unit),
    };
    let top = (2 * n).min(model.depth());
    let gap = model
        .gaps_intersecting(ilo, ihi, top)
        .into_iter()
        .filter(|g| g.id.level > n && g.a >= ilo && g.b <= ihi)
        .min_by_key(|g| {
            let dist = match side {
                Side::Plus => g.a - a,
                Side::Minus => a - g.b,
            };
            (g.id.level, dist)
        })?;

    let len = gap.length().to_f64();
    let mid_phase = (len / 2.0).powf(-1.75);
    let l = (mid_phase * (1.0 + 2f64.powi(-32)) / (2.0 * PI)).floor() + 1.0;
    let u_offset = ((4.0 * l + 1.0) * PI / 2.0).powf(-4.0 / 7.0);
    let v_offset = (2.0 * l * PI).powf(-4.0 / 7.0);
    // Both must fall in the quarter next to the near endpoint. For large l
    // the two offsets agree to every bit of a double, so only the quarter
    // bounds are checked.
    if !(u_offset > len / 4.0 && v_offset <= len / 2.0) {
        return None;
    }
    let (u_minus_a, v_minus_a, u, v) = match side {
        Side::Plus => {
            let base = (gap.a - a).to_f64();
            let origin = gap.a.to_dd();
            (
                base + u_offset,
                base + v_offset,
                (origin + crate::dd::DoubleDouble::from_f64(u_offset)).to_f64(),
                (origin + crate::dd::DoubleDouble::from_f64(v_offset)).to_f64(),
            )
        }
        Side::Minus => {
            let base = (gap.b - a).to_f64();
            let origin = gap.b.to_dd();
            (
                base - u_offset,
                base - v_offset,
                (origin - crate::dd::DoubleDouble::from_f64(u_offset)).to_f64(),
                (origin - crate::dd::DoubleDouble::from_f64(v_offset)).to_f64(),
            )
        }
    };
    Some(Witness {
        level: n,
        side,
        gap,
        l,
        u_offset,
        v_offset,
        u_minus_a,
        v_minus_a,
        u,
        v,
        f_u: u_offset.powf(0.25),
        f_v: 0.0,
    })
}

/// Difference quotients `(f(u) − f(a))/(u − a)` and `(f(v) − f(a))/(v − a)`
/// for every level `2..=k_max` at which a witness exists.
pub fn difference_quotients(
    pf: &PathologicalFunction,
    a: Dyadic,
    k_max: u32,
) -> Result<Vec<DifferenceQuotient>, SvcError> {
    let model = pf.model();
    if !model.is_certified(a) {
        return Err(SvcError::NotCertified {
            point: a.to_string(),
            depth: model.depth(),
        });
    }
    let mut out = Vec::new();
    for k in 2..=k_max {
        match witness_pair(model, a, k) {
            Ok(w) => out.push(DifferenceQuotient {
                k,
                side: w.side,
                gap_level: w.gap.id.level,
                quotient_u: w.f_u / w.u_minus_a,
                quotient_v: w.f_v / w.v_minus_a,
                lower_bound: 2f64.powf(k as f64 + 1.5) / 5.0,
            }),
            Err(SvcError::NoWitnessAtDepth { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(not_found(model, a, k_max));
    }
    Ok(out)
}
