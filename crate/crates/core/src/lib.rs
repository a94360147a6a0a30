//! Numerical toolkit for the Laplace-derivative calculus.
//!
//! The crate is organised by subsystem:
//!
//! * [`quadrature`]: adaptive Gauss-Kronrod integration and the exponentially
//!   weighted transforms `s^p ∫₀^δ e^{-st} f(x ± t) dt`.
//! * [`laplace_deriv`]: s→∞ limit estimators for Laplace continuity (LD₀),
//!   the Laplace derivative (LD₁) and finite-grid derivates.
//! * [`svc`]: the SVC(4) fat Cantor set in exact rational arithmetic and the
//!   continuous function that is Laplace differentiable everywhere but not
//!   differentiable on the set.
//! * [`calculus`]: primitives, the Alexiewicz norm, integration by parts,
//!   Hake limits, mean-value points and Taylor remainders.
//! * [`poisson`]: Poisson integrals on the unit disc and their boundary
//!   behaviour under the Alexiewicz norm.
//! * [`gen_ode`]: Picard iteration for `LD₁x = f(t, x)` systems.

pub mod calculus;
pub mod dd;
pub mod function;
pub mod gen_ode;
pub mod laplace_deriv;
pub mod poisson;
pub mod quadrature;
pub mod svc;

pub use function::{from_fn, FnFunction, Interval, RealFunction, Shifted};
pub use quadrature::{QuadratureError, QuadratureResult, Side, WeightPower};
