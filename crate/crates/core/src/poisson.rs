//! Poisson integrals on the unit disc.
//!
//! `F(r, θ) = (1/2π) ∫_{−π}^{π} G(t) P_r(θ − t) dt` with
//! `P_r(φ) = (1 − r²)/(1 − 2r cos φ + r²)`. Boundary data may be given
//! pointwise or through a primitive `Φ` with `Φ(−π) = 0`; in the second case
//! the kernel is moved onto `Φ` by parts.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::calculus::{alexiewicz_norm, CalculusError, CumulativePrimitive, Primitive};
use crate::function::{from_fn, RealFunction};
use crate::quadrature::{integrate_closure, QuadratureError};

/// Breakpoints are forced at `θ ± k(1 − r)` for `k = 1..=8`.
pub const CLUSTER_BREAKPOINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoissonError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

fn check_radius(r: f64) -> Result<(), PoissonError> {
    if !(0.0..1.0).contains(&r) {
        return Err(PoissonError::Domain(format!("radius must lie in [0, 1), got {r}")));
    }
    Ok(())
}

/// `1 − 2r cos φ + r²`, written as `(1−r)² + 4r sin²(φ/2)` to avoid
/// cancellation near `φ = 0`.
fn denominator(r: f64, phi: f64) -> f64 {
    let s = (0.5 * phi).sin();
    (1.0 - r) * (1.0 - r) + 4.0 * r * s * s
}

pub fn poisson_kernel(r: f64, phi: f64) -> Result<f64, PoissonError> {
    check_radius(r)?;
    Ok((1.0 - r * r) / denominator(r, phi))
}

/// `∂P_r/∂φ`.
fn kernel_slope(r: f64, phi: f64) -> f64 {
    let d = denominator(r, phi);
    -(1.0 - r * r) * 2.0 * r * phi.sin() / (d * d)
}

/// Reduces an angle into `[−π, π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

fn breakpoints(r: f64, theta: f64) -> Vec<f64> {
    let scale = 1.0 - r;
    let mut pts = vec![-PI, PI, wrap_angle(theta)];
    for k in 1..=CLUSTER_BREAKPOINTS {
        let off = k as f64 * scale;
        if off >= PI {
            break;
        }
        pts.push(wrap_angle(theta + off));
        pts.push(wrap_angle(theta - off));
    }
    pts.retain(|p| (-PI..=PI).contains(p));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `(1/2π) ∫ G(t) P_r(θ − t) dt` over `[−π, π]`.
pub fn poisson_integral<G: RealFunction + ?Sized>(
    gf: &G,
    r: f64,
    theta: f64,
    tol: f64,
) -> Result<f64, PoissonError> {
    check_radius(r)?;
    let bps = breakpoints(r, theta);
    let res = integrate_closure(
        |t| gf.eval(t) * (1.0 - r * r) / denominator(r, theta - t),
        &bps,
        tol * 2.0 * PI,
    )?;
    Ok(res.value / (2.0 * PI))
}

/// The same integral from a primitive `Φ` of the boundary data with
/// `Φ(−π) = 0`: `(1/2π)[Φ(π) P_r(θ − π) + ∫ Φ(t) ∂_φP_r(θ − t) dt]`.
pub fn poisson_integral_from_primitive<P: RealFunction + ?Sized>(
    phi: &P,
    r: f64,
    theta: f64,
    tol: f64,
) -> Result<f64, PoissonError> {
    check_radius(r)?;
    let base = phi.eval(-PI);
    let top = phi.eval(PI) - base;
    let bps = breakpoints(r, theta);
    let res = integrate_closure(
        |t| (phi.eval(t) - base) * kernel_slope(r, theta - t),
        &bps,
        tol * 2.0 * PI,
    )?;
    Ok((top * (1.0 - r * r) / denominator(r, theta - PI) + res.value) / (2.0 * PI))
}

/// Harmonic extension of pointwise boundary data, evaluated to a fixed
/// quadrature tolerance.
pub struct DiscFunction<G> {
    boundary: G,
    tol: f64,
}

impl<G: RealFunction> DiscFunction<G> {
    pub fn new(boundary: G, tol: f64) -> Self {
        Self { boundary, tol }
    }

    pub fn eval(&self, r: f64, theta: f64) -> Result<f64, PoissonError> {
        poisson_integral(&self.boundary, r, theta, self.tol)
    }

    /// `∂²F/∂r² + (1/r)∂F/∂r + (1/r²)∂²F/∂θ²` by central differences.
    pub fn laplacian(&self, r: f64, theta: f64, h: f64) -> Result<f64, PoissonError> {
        if !(h > 0.0 && r - h > 0.0 && r + h < 1.0) {
            return Err(PoissonError::Domain(format!(
                "stencil r ± h = {r} ± {h} must stay inside (0, 1)"
            )));
        }
        let pts = [
            (r, theta),
            (r + h, theta),
            (r - h, theta),
            (r, theta + h),
            (r, theta - h),
        ];
        let v = pts
            .par_iter()
            .map(|&(r, t)| self.eval(r, t))
            .collect::<Result<Vec<_>, _>>()?;
        let f_rr = (v[1] - 2.0 * v[0] + v[2]) / (h * h);
        let f_r = (v[1] - v[2]) / (2.0 * h);
        let f_tt = (v[3] - 2.0 * v[0] + v[4]) / (h * h);
        Ok(f_rr + f_r / r + f_tt / (r * r))
    }
}

/// `|ΔF(r, θ)|` with quadrature far below the stencil's truncation error.
pub fn harmonicity_residual<G: RealFunction>(
    gf: G,
    r: f64,
    theta: f64,
    h: f64,
) -> Result<f64, PoissonError> {
    Ok(DiscFunction::new(gf, 1e-14).laplacian(r, theta, h)?.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundaryDistance {
    pub r: f64,
    /// `‖F_r − G‖` over `[−π, π]`.
    pub distance: f64,
    /// `‖F_r‖` over `[−π, π]`.
    pub norm_fr: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundaryReport {
    /// `‖G‖` over `[−π, π]`.
    pub norm_g: f64,
    pub rows: Vec<BoundaryDistance>,
}

/// Alexiewicz distances `‖F_r − G‖` for each radius, from the boundary
/// primitive alone. Fails if some `‖F_r‖` exceeds `‖G‖ + tol`.
pub fn boundary_convergence<P: RealFunction>(
    prim: &Primitive<P>,
    r_list: &[f64],
    tol: f64,
) -> Result<BoundaryReport, PoissonError> {
    if prim.base() > -PI || prim.end() < PI {
        return Err(PoissonError::Domain(format!(
            "boundary primitive must cover [−π, π], got {}",
            prim.interval()
        )));
    }
    if r_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(PoissonError::Domain("radii must be strictly increasing".into()));
    }
    for &r in r_list {
        check_radius(r)?;
    }
    let phi = from_fn(-PI, PI, |t| prim.func().eval(t) - prim.func().eval(-PI));
    let norm_g = alexiewicz_norm(&Primitive::on(&phi, -PI, PI)?, 1e-10).value;
    let ftol = tol * 1e-3;

    let rows = r_list
        .iter()
        .map(|&r| {
            let fr = from_fn(-PI, PI, |th| {
                poisson_integral_from_primitive(&phi, r, th, ftol).unwrap_or(f64::NAN)
            });
            let cum = CumulativePrimitive::new(&fr, -PI, PI, 256, ftol)?;
            let norm_fr = alexiewicz_norm(&Primitive::on(&cum, -PI, PI)?, 1e-9).value;
            let diff = from_fn(-PI, PI, |th| cum.eval(th) - phi.eval(th));
            let distance = alexiewicz_norm(&Primitive::on(&diff, -PI, PI)?, 1e-9).value;
            if !(distance.is_finite() && norm_fr.is_finite()) {
                return Err(PoissonError::Domain(format!(
                    "boundary norms are not finite at r = {r}"
                )));
            }
            if norm_fr > norm_g + tol {
                return Err(PoissonError::Calculus(CalculusError::Consistency {
                    check: "‖F_r‖ against ‖G‖",
                    lhs: norm_fr,
                    rhs: norm_g,
                    tol,
                }));
            }
            Ok(BoundaryDistance { r, distance, norm_fr })
        })
        .collect::<Result<Vec<_>, PoissonError>>()?;
    Ok(BoundaryReport { norm_g, rows })
}

/// `(r, θ, F(r, θ))` over a grid, in row-major order.
pub fn poisson_table<G: RealFunction + ?Sized>(
    gf: &G,
    radii: &[f64],
    thetas: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64, f64)>, PoissonError> {
    let cells: Vec<(f64, f64)> = radii
        .iter()
        .flat_map(|&r| thetas.iter().map(move |&t| (r, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(r, t)| poisson_integral(gf, r, t, tol).map(|v| (r, t, v)))
        .collect()
}
