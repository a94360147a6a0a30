use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use laplace_calc::gen_ode::RhsSpec;
use laplace_calc::laplace_deriv::SGrid;
use laplace_calc::svc::MAX_DEPTH;
use serde::Deserialize;

/// A parsed configuration file: the experiment plus optional output
/// directory and seed (both overridable on the command line).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    SvcMeasure(SvcMeasure),
    SvcGaps(SvcGaps),
    Ld1Smooth(Ld1Smooth),
    Ld1Pathological(Ld1Pathological),
    NondiffWitness(NondiffWitness),
    Taylor(Taylor),
    PoissonTable(PoissonTable),
    PoissonBoundary(PoissonBoundary),
    Picard(Picard),
}

pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("svc-measure", "component counts, lengths and measures of S_n against closed forms"),
    ("svc-gaps", "removed intervals up to a level, as exact rationals"),
    ("ld1-smooth", "Laplace derivative of a smooth function against its classical derivative"),
    ("ld1-pathological", "Laplace derivative of the SVC(4) function at points of the set"),
    ("nondiff-witness", "divergent difference quotients of the SVC(4) function at points of the set"),
    ("taylor", "Taylor polynomial, integral remainder and Alexiewicz bound"),
    ("poisson-table", "Poisson integral of boundary data on an (r, θ) grid"),
    ("poisson-boundary", "Alexiewicz distance between F_r and the boundary data as r → 1"),
    ("picard", "Picard iteration for LD₁x = f(t, x) on the contraction step"),
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvcMeasure {
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvcGaps {
    pub depth: u32,
    #[serde(default)]
    pub max_level: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothFn {
    Sin,
    Cos,
    Exp,
    Square,
    Cube,
    Arctan,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ld1Smooth {
    #[serde(default = "default_smooth")]
    pub function: SmoothFn,
    /// Explicit points; otherwise `count` seeded points in `[-1, 1]`.
    #[serde(default)]
    pub points: Option<Vec<f64>>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub grid: SGrid,
    #[serde(default = "default_ld_tol")]
    pub tol: f64,
    #[serde(default = "default_ld_tol")]
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ld1Pathological {
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_count")]
    pub points: usize,
    #[serde(default = "default_path_delta")]
    pub delta: f64,
    #[serde(default)]
    pub grid: SGrid,
    #[serde(default = "default_path_tol")]
    pub tol: f64,
    #[serde(default = "default_path_bound")]
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NondiffWitness {
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_count")]
    pub points: usize,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaylorFn {
    Exp,
    Sin,
    Rational,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Taylor {
    pub function: TaylorFn,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "default_xs")]
    pub xs: Vec<f64>,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default = "default_taylor_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryData {
    Cos,
    One,
    Zero,
    Square,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonTable {
    #[serde(default = "default_boundary")]
    pub data: BoundaryData,
    #[serde(default = "default_table_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "default_poisson_tol")]
    pub tol: f64,
    #[serde(default = "default_table_error")]
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonBoundary {
    #[serde(default = "default_boundary")]
    pub data: BoundaryData,
    #[serde(default = "default_boundary_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_table_error")]
    pub tol: f64,
    /// The last distance must not exceed this fraction of `‖G‖`.
    #[serde(default = "default_final_fraction")]
    pub final_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Picard {
    pub rhs: RhsSpec,
    #[serde(default)]
    pub t0: f64,
    pub alpha: Vec<f64>,
    pub domain: [f64; 2],
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_picard_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Continue forward to this time after the first step.
    #[serde(default)]
    pub continue_to: Option<f64>,
    /// Random times at which Laplace continuity of the right-hand side
    /// along the solution is checked.
    #[serde(default = "default_ld0_samples")]
    pub ld0_samples: usize,
    #[serde(default = "default_ld0_grid")]
    pub ld0_grid: SGrid,
}

fn default_smooth() -> SmoothFn {
    SmoothFn::Sin
}
fn default_count() -> usize {
    10
}
fn default_delta() -> f64 {
    0.25
}
fn default_ld_tol() -> f64 {
    1e-4
}
fn default_depth() -> u32 {
    MAX_DEPTH
}
fn default_path_delta() -> f64 {
    0.05
}
fn default_path_tol() -> f64 {
    1e-3
}
fn default_path_bound() -> f64 {
    0.1
}
fn default_k_max() -> u32 {
    20
}
fn default_threshold() -> f64 {
    1e3
}
fn default_xs() -> Vec<f64> {
    vec![0.25, 0.5, 0.75, 1.0]
}
fn default_max_order() -> usize {
    5
}
fn default_taylor_tol() -> f64 {
    1e-8
}
fn default_boundary() -> BoundaryData {
    BoundaryData::Cos
}
fn default_table_radii() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9]
}
fn default_thetas() -> Vec<f64> {
    (0..8).map(|k| -3.0 + 0.8 * k as f64).collect()
}
fn default_poisson_tol() -> f64 {
    1e-10
}
fn default_table_error() -> f64 {
    1e-6
}
fn default_boundary_radii() -> Vec<f64> {
    vec![0.5, 0.9, 0.99]
}
fn default_final_fraction() -> f64 {
    0.05
}
fn default_grid_points() -> usize {
    401
}
fn default_picard_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    200
}
fn default_ld0_grid() -> SGrid {
    SGrid {
        count: 36,
        ..SGrid::default()
    }
}
fn default_ld0_samples() -> usize {
    3
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("field `{name}` must be a positive finite number, got {v}");
    }
    Ok(())
}

fn depth_ok(name: &str, d: u32) -> Result<()> {
    if d == 0 || d > MAX_DEPTH {
        bail!("field `{name}` must lie in 1..={MAX_DEPTH}, got {d}");
    }
    Ok(())
}

fn grid_ok(g: &SGrid) -> Result<()> {
    positive("grid.s0", g.s0)?;
    if !(g.ratio > 1.0) {
        bail!("field `grid.ratio` must exceed 1, got {}", g.ratio);
    }
    if g.count < 3 {
        bail!("field `grid.count` must be at least 3, got {}", g.count);
    }
    Ok(())
}

fn radii_ok(name: &str, radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.iter().any(|r| !(0.0..1.0).contains(r)) {
        bail!("field `{name}` must be a non-empty list of radii in [0, 1)");
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            bail!("config is empty: expected a JSON object with an `experiment` field");
        }
        let mut value: serde_json::Value =
            serde_json::from_str(text).context("config is not valid JSON")?;
        let Some(obj) = value.as_object_mut() else {
            bail!("config must be a JSON object");
        };
        if !obj.contains_key("experiment") {
            bail!("missing field `experiment`");
        }
        let out = match obj.remove("out") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::String(s)) => Some(PathBuf::from(s)),
            Some(other) => bail!("field `out` must be a string, got {other}"),
        };
        let seed = match obj.remove("seed") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => Some(v.as_u64().with_context(|| format!("field `seed` must be a u64, got {v}"))?),
        };
        let experiment: Experiment =
            serde_json::from_value(value).context("config does not match the experiment schema")?;
        experiment.validate()?;
        Ok(Self { experiment, out, seed })
    }
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        let i = match self {
            Experiment::SvcMeasure(_) => 0,
            Experiment::SvcGaps(_) => 1,
            Experiment::Ld1Smooth(_) => 2,
            Experiment::Ld1Pathological(_) => 3,
            Experiment::NondiffWitness(_) => 4,
            Experiment::Taylor(_) => 5,
            Experiment::PoissonTable(_) => 6,
            Experiment::PoissonBoundary(_) => 7,
            Experiment::Picard(_) => 8,
        };
        EXPERIMENTS[i].0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Experiment::SvcMeasure(c) => depth_ok("depth", c.depth),
            Experiment::SvcGaps(c) => {
                depth_ok("depth", c.depth)?;
                if let Some(m) = c.max_level {
                    if m == 0 || m > c.depth || m > 24 {
                        bail!("field `max_level` must lie in 1..=min(depth, 24), got {m}");
                    }
                }
                Ok(())
            }
            Experiment::Ld1Smooth(c) => {
                positive("delta", c.delta)?;
                positive("tol", c.tol)?;
                positive("max_error", c.max_error)?;
                grid_ok(&c.grid)?;
                if c.points.as_ref().is_some_and(|p| p.is_empty()) || (c.points.is_none() && c.count == 0) {
                    bail!("field `points` (or `count`) must select at least one point");
                }
                Ok(())
            }
            Experiment::Ld1Pathological(c) => {
                depth_ok("depth", c.depth)?;
                positive("delta", c.delta)?;
                positive("tol", c.tol)?;
                positive("bound", c.bound)?;
                grid_ok(&c.grid)?;
                if c.points == 0 {
                    bail!("field `points` must be at least 1");
                }
                Ok(())
            }
            Experiment::NondiffWitness(c) => {
                depth_ok("depth", c.depth)?;
                positive("threshold", c.threshold)?;
                if c.points == 0 || c.k_max < 2 {
                    bail!("fields `points` ≥ 1 and `k_max` ≥ 2 are required");
                }
                Ok(())
            }
            Experiment::Taylor(c) => {
                positive("tol", c.tol)?;
                if c.xs.is_empty() || c.xs.iter().any(|x| !x.is_finite() || (x - c.a).abs() > 2.0) {
                    bail!("field `xs` must be a non-empty list within distance 2 of `a`");
                }
                if c.max_order > 12 {
                    bail!("field `max_order` must be at most 12, got {}", c.max_order);
                }
                Ok(())
            }
            Experiment::PoissonTable(c) => {
                positive("tol", c.tol)?;
                positive("max_error", c.max_error)?;
                radii_ok("radii", &c.radii)?;
                if c.thetas.is_empty() {
                    bail!("field `thetas` must not be empty");
                }
                Ok(())
            }
            Experiment::PoissonBoundary(c) => {
                positive("tol", c.tol)?;
                positive("final_fraction", c.final_fraction)?;
                radii_ok("radii", &c.radii)?;
                if c.radii.windows(2).any(|w| !(w[0] < w[1])) {
                    bail!("field `radii` must be strictly increasing");
                }
                Ok(())
            }
            Experiment::Picard(c) => {
                positive("tol", c.tol)?;
                if !(c.domain[0] <= c.t0 && c.t0 <= c.domain[1]) {
                    bail!("field `t0` must lie inside `domain`");
                }
                if c.alpha.len() != c.rhs.dim() {
                    bail!(
                        "field `alpha` has {} entries but the right-hand side has dimension {}",
                        c.alpha.len(),
                        c.rhs.dim()
                    );
                }
                if c.grid_points < 5 {
                    bail!("field `grid_points` must be at least 5");
                }
                if let Some(t) = c.continue_to {
                    if !(c.t0 <= t && t <= c.domain[1]) {
                        bail!("field `continue_to` must lie in [t0, domain[1]]");
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_configs_parse() {
        let c = ExperimentConfig::parse(r#"{"experiment":"svc-measure","depth":10}"#).unwrap();
        assert_eq!(c.experiment, Experiment::SvcMeasure(SvcMeasure { depth: 10 }));
        let c = ExperimentConfig::parse(r#"{"experiment":"ld1-smooth","seed":3,"out":"x"}"#).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.out, Some(PathBuf::from("x")));
        assert_eq!(c.experiment.name(), "ld1-smooth");
    }

    #[test]
    fn errors_name_the_field() {
        let e = ExperimentConfig::parse("").unwrap_err();
        assert!(format!("{e:#}").contains("empty"));
        let e = ExperimentConfig::parse(r#"{"experiment":"svc-measure"}"#).unwrap_err();
        assert!(format!("{e:#}").contains("depth"), "{e:#}");
        let e = ExperimentConfig::parse(r#"{"experiment":"svc-measure","depth":3,"dept":4}"#).unwrap_err();
        assert!(format!("{e:#}").contains("dept"), "{e:#}");
        let e = ExperimentConfig::parse(r#"{"experiment":"svc-measure","depth":99}"#).unwrap_err();
        assert!(format!("{e:#}").contains("depth"), "{e:#}");
        let e = ExperimentConfig::parse(r#"{"experiment":"ld1-smooth","tol":-1}"#).unwrap_err();
        assert!(format!("{e:#}").contains("tol"), "{e:#}");
        let e = ExperimentConfig::parse(r#"{"experiment":"nope"}"#).unwrap_err();
        assert!(format!("{e:#}").contains("nope"), "{e:#}");
        let e = ExperimentConfig::parse(r#"{"depth":3}"#).unwrap_err();
        assert!(format!("{e:#}").contains("experiment"), "{e:#}");
    }

    #[test]
    fn picard_schema() {
        let c = ExperimentConfig::parse(
            r#"{"experiment":"picard","rhs":{"kind":"oscillator","omega":1.0},"alpha":[0,1],"domain":[-2,2]}"#,
        )
        .unwrap();
        let Experiment::Picard(p) = c.experiment else { panic!() };
        assert_eq!(p.grid_points, 401);
        let e = ExperimentConfig::parse(
            r#"{"experiment":"picard","rhs":{"kind":"exponential","rate":1.0},"alpha":[0,1],"domain":[-2,2]}"#,
        )
        .unwrap_err();
        assert!(format!("{e:#}").contains("alpha"));
    }
}
