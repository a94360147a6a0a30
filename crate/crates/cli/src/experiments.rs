use std::f64::consts::{E, PI};

use anyhow::{Context, Result};
use laplace_calc::calculus::{taylor, Primitive};
use laplace_calc::function::{from_fn, RealFunction};
use laplace_calc::gen_ode::{
    contraction_step, laplace_continuity_check, picard_continue, uniqueness_probe, PicardOperator,
    PicardSolution, RhsSpec,
};
use laplace_calc::laplace_deriv::{ld1, Classification, LimitEstimate};
use laplace_calc::poisson::{boundary_convergence, harmonicity_residual, poisson_integral, poisson_table};
use laplace_calc::svc::{difference_quotients, Dyadic, PathologicalFunction, Rational, SvcModel};
use laplace_calc::{Interval, Side};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::*;
use crate::report::{Cell, Report};

pub fn run(exp: &Experiment, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match exp {
        Experiment::SvcMeasure(c) => svc_measure(c),
        Experiment::SvcGaps(c) => svc_gaps(c),
        Experiment::Ld1Smooth(c) => ld1_smooth(c, &mut rng),
        Experiment::Ld1Pathological(c) => ld1_pathological(c, &mut rng),
        Experiment::NondiffWitness(c) => nondiff_witness(c, &mut rng),
        Experiment::Taylor(c) => taylor_table(c),
        Experiment::PoissonTable(c) => poisson_grid(c),
        Experiment::PoissonBoundary(c) => poisson_boundary(c),
        Experiment::Picard(c) => picard(c, &mut rng),
    }
}

fn rational(r: &Rational) -> Cell {
    Cell::Text(format!("{}/{}", r.numer(), r.denom()))
}

fn class_name(c: Classification) -> &'static str {
    match c {
        Classification::Converged => "converged",
        Classification::Diverged(_) => "diverged",
        Classification::Oscillating => "oscillating",
        Classification::Inconclusive => "inconclusive",
    }
}

fn svc_measure(c: &SvcMeasure) -> Result<Report> {
    let mut r = Report::new(&["n", "count", "component_length", "gap_length", "measure"]);
    let mut exact = true;
    for n in 1..=c.depth {
        let count = SvcModel::component_count(n);
        let len = SvcModel::component_length(n).to_ratio();
        let gap = SvcModel::gap_length(n).to_ratio();
        let measure = SvcModel::measure(n);
        let p = 1i128 << n;
        exact &= count as i128 == p
            && len == Rational::new(p + 1, 1i128 << (2 * n + 1))
            && gap == Rational::new(1, 1i128 << (2 * n))
            && measure == Rational::new(p + 1, 2 * p);
        r.row(vec![n.into(), Cell::Int(count as i64), rational(&len), rational(&gap), rational(&measure)]);
    }
    r.check(
        "closed forms",
        exact,
        "count = 2^n, length = (2^n+1)/2^(2n+1), gap = 4^-n, measure = (1+2^-n)/2",
    );
    r.plot = "set logscale y\nplot 'results.csv' using 1:(column(3)) with points title 'component length'\n".into();
    Ok(r)
}

fn svc_gaps(c: &SvcGaps) -> Result<Report> {
    let model = SvcModel::new(c.depth)?;
    let top = c.max_level.unwrap_or(c.depth.min(12));
    let mut r = Report::new(&["level", "index", "a", "b", "length"]);
    let mut counts_ok = true;
    let mut removed = Rational::new(0, 1);
    let mut prev_b: Option<Dyadic> = None;
    let mut disjoint = true;
    let mut all = Vec::new();
    for level in 1..=top {
        let gaps: Vec<_> = model.gaps(level)?.collect();
        counts_ok &= gaps.len() as u64 == 1u64 << (level - 1);
        for g in gaps {
            removed += g.length().to_ratio();
            r.row(vec![
                level.into(),
                Cell::Int(g.id.index as i64),
                rational(&g.a.to_ratio()),
                rational(&g.b.to_ratio()),
                rational(&g.length().to_ratio()),
            ]);
            all.push((g.a, g.b));
        }
    }
    all.sort();
    for (a, b) in all {
        if prev_b.is_some_and(|p| p >= a) {
            disjoint = false;
        }
        prev_b = Some(b);
    }
    r.check("gap counts", counts_ok, "2^(n-1) gaps at level n");
    r.check(
        "measure balance",
        removed + SvcModel::measure(top) == Rational::new(1, 1),
        format!("removed length {} plus measure of S_{top} equals 1", removed),
    );
    r.check("disjoint", disjoint, "removed intervals are pairwise disjoint");
    r.plot = "plot 'results.csv' using 3:1:(0):(0) with vectors nohead title 'gaps'\n".into();
    Ok(r)
}

fn smooth_pair(f: SmoothFn) -> (fn(f64) -> f64, fn(f64) -> f64) {
    match f {
        SmoothFn::Sin => (f64::sin, f64::cos),
        SmoothFn::Cos => (f64::cos, |x| -x.sin()),
        SmoothFn::Exp => (f64::exp, f64::exp),
        SmoothFn::Square => (|x| x * x, |x| 2.0 * x),
        SmoothFn::Cube => (|x| x * x * x, |x| 3.0 * x * x),
        SmoothFn::Arctan => (f64::atan, |x| 1.0 / (1.0 + x * x)),
    }
}

fn ld1_smooth(c: &Ld1Smooth, rng: &mut ChaCha8Rng) -> Result<Report> {
    let (f, df) = smooth_pair(c.function);
    let func = from_fn(-3.0, 3.0, f);
    let points = match &c.points {
        Some(p) => p.clone(),
        None => (0..c.count).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    let mut r = Report::new(&["x", "estimate", "derivative", "abs_error", "plus", "minus"]);
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for x in points {
        let e = ld1(&func, x, c.delta, &c.grid, c.tol).with_context(|| format!("ld1 at x = {x}"))?;
        let est = e.common_value(c.tol).unwrap_or(f64::NAN);
        all_converged &= est.is_finite();
        let err = (est - df(x)).abs();
        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
        let cls = |s: &Option<LimitEstimate>| s.as_ref().map_or("none", |s| class_name(s.classification));
        r.row(vec![
            x.into(),
            est.into(),
            df(x).into(),
            err.into(),
            cls(&e.plus).into(),
            cls(&e.minus).into(),
        ]);
    }
    r.check("both sides converge to a common value", all_converged, "");
    r.check(
        "matches classical derivative",
        worst <= c.max_error,
        format!("max |estimate − f′(x)| = {worst:e} (limit {:e})", c.max_error),
    );
    r.plot = "plot 'results.csv' using 1:4 with points title '|LD1 - f prime|'\n".into();
    Ok(r)
}

/// Gap endpoints of levels `1..=6` inside `[margin, 1 − margin]`, shuffled
/// by the seed; all lie in the set at every depth.
fn set_points(rng: &mut ChaCha8Rng, model: &SvcModel, count: usize, margin: f64) -> Result<Vec<Dyadic>> {
    let mut pts = Vec::new();
    for level in 1..=model.depth().min(6) {
        for g in model.gaps(level)? {
            for p in [g.a, g.b] {
                let x = p.to_f64();
                if x >= margin && x <= 1.0 - margin {
                    pts.push(p);
                }
            }
        }
    }
    pts.shuffle(rng);
    pts.truncate(count);
    pts.sort();
    Ok(pts)
}

fn ld1_pathological(c: &Ld1Pathological, rng: &mut ChaCha8Rng) -> Result<Report> {
    let model = SvcModel::new(c.depth)?;
    let pf = PathologicalFunction::new(model);
    let pts = set_points(rng, &model, c.points, c.delta)?;
    let mut r = Report::new(&[
        "a", "x", "plus_value", "plus_class", "plus_spread", "minus_value", "minus_class", "minus_spread",
    ]);
    let mut ok = 0usize;
    for a in &pts {
        let x = a.to_f64();
        let e = ld1(&pf, x, c.delta, &c.grid, c.tol).with_context(|| format!("ld1 at {a}"))?;
        let (p, m) = (e.plus.as_ref().unwrap(), e.minus.as_ref().unwrap());
        if [p, m].iter().all(|s| s.is_converged() && s.value.abs() <= c.bound) {
            ok += 1;
        }
        r.row(vec![
            a.to_string().into(),
            x.into(),
            p.value.into(),
            class_name(p.classification).into(),
            p.tail_spread.into(),
            m.value.into(),
            class_name(m.classification).into(),
            m.tail_spread.into(),
        ]);
    }
    r.check(
        "Laplace derivative converges near zero",
        ok == pts.len() && !pts.is_empty(),
        format!("{ok}/{} points with both sides converged and |LD1| ≤ {}", pts.len(), c.bound),
    );
    r.plot = "plot 'results.csv' using 2:3 with points title 'plus', '' using 2:6 with points title 'minus'\n".into();
    Ok(r)
}

fn nondiff_witness(c: &NondiffWitness, rng: &mut ChaCha8Rng) -> Result<Report> {
    let model = SvcModel::new(c.depth)?;
    let pf = PathologicalFunction::new(model);
    let pts = set_points(rng, &model, c.points, 0.05)?;
    let mut r = Report::new(&["a", "k", "side", "gap_level", "quotient_u", "quotient_v", "lower_bound"]);
    let (mut zero_v, mut bounded, mut diverged) = (true, true, 0usize);
    for a in &pts {
        let qs = difference_quotients(&pf, *a, c.k_max).with_context(|| format!("witnesses at {a}"))?;
        let mut peak = 0.0f64;
        for q in &qs {
            zero_v &= q.quotient_v == 0.0;
            bounded &= q.quotient_u.abs() >= q.lower_bound;
            peak = peak.max(q.quotient_u.abs());
            r.row(vec![
                a.to_string().into(),
                q.k.into(),
                match q.side {
                    Side::Plus => "plus",
                    Side::Minus => "minus",
                }
                .into(),
                q.gap_level.into(),
                q.quotient_u.into(),
                q.quotient_v.into(),
                q.lower_bound.into(),
            ]);
        }
        if peak > c.threshold {
            diverged += 1;
        }
    }
    r.check("quotient at v is exactly zero", zero_v, "");
    r.check("quotient at u respects its lower bound", bounded, "|q_u| ≥ 2^(k+3/2)/5");
    r.check(
        "quotients diverge",
        diverged == pts.len() && !pts.is_empty(),
        format!("{diverged}/{} points with max |q_u| > {:e}", pts.len(), c.threshold),
    );
    r.plot = "set logscale y\nplot 'results.csv' using 2:(abs($5)) with points title '|q_u|', '' using 2:7 with lines title 'bound'\n".into();
    Ok(r)
}

/// `k`-th derivative of the selected function.
fn taylor_derivative(f: TaylorFn, k: usize) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
    match f {
        TaylorFn::Exp => Box::new(f64::exp),
        TaylorFn::Sin => {
            let shift = k as f64 * PI / 2.0;
            Box::new(move |x: f64| (x + shift).sin())
        }
        TaylorFn::Rational => {
            // 1/(1+x²) = Im 1/(x − i); its k-th derivative is
            // (−1)^k k! Im (x − i)^{−k−1}.
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let m = (k + 1) as f64;
            Box::new(move |x: f64| {
                let theta = (-1.0f64).atan2(x);
                let modulus = (1.0 + x * x).powf(-m / 2.0);
                sign * fact * (-modulus * (m * theta).sin())
            })
        }
    }
}

fn taylor_table(c: &Taylor) -> Result<Report> {
    let lo = c.a - 2.5;
    let hi = c.a + 2.5;
    let fns: Vec<_> = (0..=c.max_order + 1)
        .map(|k| from_fn(lo, hi, taylor_derivative(c.function, k)))
        .collect();
    let mut r = Report::new(&["n", "x", "value", "polynomial", "remainder", "bound", "residual"]);
    let mut failures = Vec::new();
    let mut exp_case = None;
    for n in 1..=c.max_order {
        let derivs: Vec<&dyn RealFunction> = fns[..=n].iter().map(|f| f as &dyn RealFunction).collect();
        for &x in &c.xs {
            match taylor(&derivs, &fns[n + 1], c.a, x, c.tol) {
                Ok(t) => {
                    if c.function == TaylorFn::Exp && c.a == 0.0 && n == 2 && x == 1.0 {
                        exp_case = Some(t.remainder);
                    }
                    r.row(vec![
                        n.into(),
                        x.into(),
                        fns[0].eval(x).into(),
                        t.polynomial.into(),
                        t.remainder.into(),
                        t.bound.into(),
                        t.residual.into(),
                    ]);
                }
                Err(e) => failures.push(format!("n={n} x={x}: {e}")),
            }
        }
    }
    r.check(
        "expansion identity and remainder bound",
        failures.is_empty(),
        if failures.is_empty() { String::new() } else { failures.join("; ") },
    );
    if let Some(rem) = exp_case {
        r.check(
            "exp remainder at n = 2, x = 1",
            (rem - (E - 2.5)).abs() <= c.tol,
            format!("{rem} vs e − 5/2 = {}", E - 2.5),
        );
    }
    r.plot = "set logscale y\nplot 'results.csv' using 1:(abs($5)) with points title '|remainder|', '' using 1:6 with points title 'bound'\n".into();
    Ok(r)
}

type Boundary = (
    Box<dyn Fn(f64) -> f64 + Send + Sync>,
    Box<dyn Fn(f64) -> f64 + Send + Sync>,
    Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
);

/// Pointwise data, its primitive from −π, and the harmonic extension.
fn boundary(data: BoundaryData) -> Boundary {
    match data {
        BoundaryData::Cos => (Box::new(f64::cos), Box::new(f64::sin), Box::new(|r, t: f64| r * t.cos())),
        BoundaryData::One => (Box::new(|_| 1.0), Box::new(|t| t + PI), Box::new(|_, _| 1.0)),
        BoundaryData::Zero => (Box::new(|_| 0.0), Box::new(|_| 0.0), Box::new(|_, _| 0.0)),
        BoundaryData::Square => (
            Box::new(|t| t * t),
            Box::new(|t: f64| (t.powi(3) + PI.powi(3)) / 3.0),
            // Fourier series of t² on [−π, π].
            Box::new(|r: f64, t: f64| {
                PI * PI / 3.0
                    + (1..20_000)
                        .map(|n| {
                            let nf = n as f64;
                            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                            4.0 * sign * r.powi(n) * (nf * t).cos() / (nf * nf)
                        })
                        .sum::<f64>()
            }),
        ),
    }
}

fn poisson_grid(c: &PoissonTable) -> Result<Report> {
    let (g, _, exact) = boundary(c.data);
    let gf = from_fn(-PI, PI, g);
    let table = poisson_table(&gf, &c.radii, &c.thetas, c.tol)?;
    let mut r = Report::new(&["r", "theta", "value", "exact", "abs_error"]);
    let mut worst = 0.0f64;
    for (rad, th, v) in table {
        let ex = exact(rad, th);
        worst = worst.max((v - ex).abs());
        r.row(vec![rad.into(), th.into(), v.into(), ex.into(), (v - ex).abs().into()]);
    }
    r.check(
        "matches harmonic extension",
        worst <= c.max_error,
        format!("max error {worst:e} (limit {:e})", c.max_error),
    );

    let one = from_fn(-PI, PI, |_| 1.0);
    let mut norm_worst = 0.0f64;
    for &rad in &c.radii {
        norm_worst = norm_worst.max((poisson_integral(&one, rad, 0.0, 1e-12)? - 1.0).abs());
    }
    r.check("kernel normalisation", norm_worst <= 1e-8, format!("max |mean − 1| = {norm_worst:e}"));

    let (probe_r, probe_t) = (0.5, 0.4);
    let h1 = harmonicity_residual(&gf, probe_r, probe_t, 1e-2)?;
    let h2 = harmonicity_residual(&gf, probe_r, probe_t, 5e-3)?;
    let shrinks = h1 < 1e-9 || h1 / h2 >= 3.5;
    r.check(
        "harmonic to second order",
        h1 <= 1e-3 && shrinks,
        format!("residual {h1:e} at h = 1e-2, {h2:e} at h = 5e-3"),
    );
    r.plot = "plot 'results.csv' using 2:3:1 with points palette title 'F(r, theta)'\n".into();
    Ok(r)
}

fn poisson_boundary(c: &PoissonBoundary) -> Result<Report> {
    let (_, prim, _) = boundary(c.data);
    let prim = Primitive::new(from_fn(-PI, PI, prim), -PI)?;
    let rep = boundary_convergence(&prim, &c.radii, c.tol);
    let mut r = Report::new(&["r", "distance", "norm_fr", "norm_g"]);
    let rep = match rep {
        Ok(rep) => rep,
        Err(e) => {
            r.check("norm contraction", false, e.to_string());
            return Ok(r);
        }
    };
    for row in &rep.rows {
        r.row(vec![row.r.into(), row.distance.into(), row.norm_fr.into(), rep.norm_g.into()]);
    }
    let ds: Vec<f64> = rep.rows.iter().map(|x| x.distance).collect();
    let negligible = ds.iter().all(|d| *d <= c.tol);
    r.check(
        "distances decrease",
        negligible || ds.windows(2).all(|w| w[1] < w[0]),
        format!("{ds:?}"),
    );
    let last = *ds.last().unwrap();
    r.check(
        "final distance small",
        last <= c.final_fraction * rep.norm_g + c.tol,
        format!("{last:e} vs {} · ‖G‖ = {:e}", c.final_fraction, c.final_fraction * rep.norm_g),
    );
    r.check(
        "norm contraction",
        rep.rows.iter().all(|x| x.norm_fr <= rep.norm_g + c.tol),
        format!("‖G‖ = {}", rep.norm_g),
    );
    r.plot = "plot 'results.csv' using (1-$1):2 with linespoints title 'distance vs 1-r'\n".into();
    Ok(r)
}

fn rk4_linear(matrix: &[Vec<f64>], alpha: &[f64], t0: f64, t: f64) -> Vec<f64> {
    let steps = 4000;
    let h = (t - t0) / steps as f64;
    let apply = |x: &[f64]| -> Vec<f64> {
        matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    };
    let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let mut x = alpha.to_vec();
    for _ in 0..steps {
        let k1 = apply(&x);
        let k2 = apply(&axpy(&x, &k1, h / 2.0));
        let k3 = apply(&axpy(&x, &k2, h / 2.0));
        let k4 = apply(&axpy(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

/// Independent reference solution where one is available.
fn oracle(spec: &RhsSpec, t0: f64, alpha: &[f64], t: f64) -> Result<Option<Vec<f64>>> {
    let tau = t - t0;
    Ok(match spec {
        RhsSpec::Exponential { rate } => Some(vec![alpha[0] * (rate * tau).exp()]),
        RhsSpec::Oscillator { omega } if *omega != 0.0 => {
            let (s, c) = (omega * tau).sin_cos();
            Some(vec![
                alpha[0] * c + alpha[1] / omega * s,
                -alpha[0] * omega * s + alpha[1] * c,
            ])
        }
        RhsSpec::Oscillator { .. } => Some(vec![alpha[0] + alpha[1] * tau, alpha[1]]),
        RhsSpec::Zero { .. } => Some(alpha.to_vec()),
        RhsSpec::Linear { matrix } => Some(rk4_linear(matrix, alpha, t0, t)),
        RhsSpec::PathologicalForcing { rate, depth } if *rate == 0.0 => {
            let pf = PathologicalFunction::new(SvcModel::new(*depth)?);
            let (lo, hi, sign) = if t >= t0 { (t0, t, 1.0) } else { (t, t0, -1.0) };
            Some(vec![alpha[0] + sign * pf.integral(lo, hi, 1e-13)?.value])
        }
        RhsSpec::PathologicalForcing { .. } => None,
    })
}

fn picard(c: &Picard, rng: &mut ChaCha8Rng) -> Result<Report> {
    let domain = Interval::new(c.domain[0], c.domain[1]);
    let sys = c.rhs.build(c.t0, c.alpha.clone(), domain)?;
    let dim = sys.dim;
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.extend((1..=dim).map(|i| format!("oracle{i}")));
    header.push("abs_error".into());
    header.push("segment".into());
    let mut r = Report {
        header,
        ..Default::default()
    };

    let min_step = 1e-12 * domain.width().max(1.0);
    let a = contraction_step(sys.lipschitz.as_ref(), sys.t0, domain, min_step)?;
    let op = PicardOperator::new(&sys, a, c.grid_points, c.tol)?;
    let first = op.iterate(op.constant_start(), c.tol, c.max_iter);
    let first = match first {
        Ok(s) => s,
        Err(e) => {
            r.check("Picard iteration converges", false, e.to_string());
            return Ok(r);
        }
    };
    r.check(
        "Picard iteration converges",
        true,
        format!("step {a}, {} iterations, final change {:e}", first.iterations, first.final_delta),
    );
    let ratio = first.max_contraction_ratio(1e-2 * c.tol);
    r.check("contraction ratio", ratio <= 0.55, format!("max successive ratio {ratio}"));

    let mut segments: Vec<PicardSolution> = vec![first.clone()];
    if let Some(t_end) = c.continue_to {
        let start = *first.grid.last().unwrap();
        if t_end > start {
            let mut rest = sys.clone();
            rest.t0 = start;
            rest.alpha = first.trajectory.last().unwrap().clone();
            segments.extend(picard_continue(&rest, t_end, c.grid_points, c.tol, c.max_iter)?);
        }
    }

    let mut worst: Option<f64> = None;
    for (k, seg) in segments.iter().enumerate() {
        // Later segments repeat the backward half of their step; only the
        // forward half extends the solution.
        let skip = if k == 0 { 0 } else { seg.grid.len() / 2 };
        for (t, x) in seg.grid.iter().zip(&seg.trajectory).skip(skip) {
            let o = oracle(&c.rhs, c.t0, &c.alpha, *t)?;
            let err = o.as_ref().map(|o| x.iter().zip(o).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
            if let Some(e) = err {
                worst = Some(worst.unwrap_or(0.0).max(e));
            }
            let mut row: Vec<Cell> = vec![(*t).into()];
            row.extend(x.iter().map(|v| Cell::from(*v)));
            match &o {
                Some(o) => row.extend(o.iter().map(|v| Cell::from(*v))),
                None => row.extend((0..dim).map(|_| Cell::Float(f64::NAN))),
            }
            row.push(err.unwrap_or(f64::NAN).into());
            row.push(k.into());
            r.row(row);
        }
    }
    if let Some(w) = worst {
        r.check(
            "matches reference solution",
            w <= 100.0 * c.tol.max(1e-10),
            format!("max error {w:e} (limit {:e})", 100.0 * c.tol.max(1e-10)),
        );
    }

    let gap = uniqueness_probe(&sys, c.grid_points, c.tol, c.max_iter)?;
    r.check(
        "unique fixed point",
        gap <= 10.0 * c.tol,
        format!("constant and ramp starts differ by {gap:e}"),
    );

    if c.ld0_samples > 0 {
        let iv = first.interval();
        let margin = 0.05 * iv.width();
        let times: Vec<f64> = (0..c.ld0_samples)
            .map(|_| rng.gen_range(iv.lo + margin..iv.hi - margin))
            .collect();
        let delta = (0.1f64).min(0.25 * iv.width());
        let checks = laplace_continuity_check(&sys, &first, &times, delta, &c.ld0_grid, 1e-4)?;
        let passed = checks.iter().filter(|c| c.passed).count();
        r.check(
            "right-hand side is Laplace continuous along the solution",
            passed == checks.len(),
            format!("{passed}/{} checks at t = {times:?}", checks.len()),
        );
    }
    r.plot = format!(
        "plot {}\n",
        (1..=dim)
            .map(|i| format!("'results.csv' using 1:{} with lines title 'x{i}'", i + 1))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(r)
}
