//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use curvlab::branching::{
    self, build_branching_plans, build_branching_plans_with, entropy_along, BranchingScenario, Tripod, Which,
};
use curvlab::coefficients::{sigma, CurvatureParams, ExtReal};
use curvlab::curvature::{
    check_kn_convex, circle_obstruction, default_battery, eighths, random_uniform_pairs, verify_cde, Witness,
    DEFAULT_SEED,
};
use curvlab::geometry_scan::{
    bg_boundary_check, bg_boundary_sides, bg_ratio_scan, lipschitz_modulus, lipschitz_pair_bound, random_close_pairs,
};
use curvlab::space1d::{Space1D, Topology1D, WeightFn};
use curvlab::transport1d::{w2_circle_quantiles, w2_line_quantiles, ProbMeasure1D, QuantileFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Shape = Box<dyn Fn(f64) -> f64>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn p(k: f64, n: f64) -> CurvatureParams {
    CurvatureParams::new(k, n).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sigma_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_continuity = 0.0f64;
    for _ in 0..10_000 {
        let t: f64 = rng.gen_range(0.0..=1.0);
        let n: f64 = rng.gen_range(1.0001..50.0);
        let theta: f64 = rng.gen_range(0.0..10.0);
        let flat = sigma(t, p(0.0, n), theta).unwrap();
        if flat != ExtReal::Finite(t) {
            return Err(format!("K=0: sigma({t}, N={n}, {theta}) = {flat:?}"));
        }
        let k: f64 = rng.gen_range(-5.0..5.0);
        let params = p(k, n);
        let theta_ok = theta.min(0.99 * params.sigma_horizon());
        for (tt, want) in [(0.0, 0.0), (1.0, 1.0)] {
            let s = sigma(tt, params, theta_ok).unwrap();
            if s != ExtReal::Finite(want) {
                return Err(format!("sigma({tt}, K={k}, N={n}, {theta_ok}) = {s:?}"));
            }
        }
        let small_k = rng.gen_range(-1.0..1.0) * 1e-4 / theta.max(1e-3).powi(2);
        let s = sigma(t, p(small_k, n), theta).unwrap().to_f64();
        let excess = (s - t).abs() / (10.0 * small_k.abs() * theta * theta).max(f64::MIN_POSITIVE);
        worst_continuity = worst_continuity.max(excess);
    }
    ensure(worst_continuity <= 1.0, format!("10^4 draws, worst |σ-t| / (10|K|θ²) = {worst_continuity:.3e}"))
}

fn equality_weight_margin(h: f64) -> f64 {
    let (k, n) = (1.0f64, 2.0f64);
    let half = 0.9 * 0.5 * PI * (n / k).sqrt();
    let f = WeightFn::sample(|x| -n * (x * (k / n).sqrt()).cos().ln(), -half, half, h).unwrap();
    let space = Space1D::new(Topology1D::Line, f.clone(), Some((-half, half)), h).unwrap();
    let plans = default_battery(&space, DEFAULT_SEED);
    check_kn_convex(&f, &space, p(k, n), &plans, 1e-5).unwrap().max_violation
}

fn equality_case() -> Outcome {
    let coarse = equality_weight_margin(1e-3);
    let fine = equality_weight_margin(5e-4);
    let shrink = coarse.abs() / fine.abs();
    ensure(
        coarse.abs() <= 1e-5 && shrink >= 3.5,
        format!("margin {coarse:.3e} at h=1e-3, {fine:.3e} at h=5e-4, shrink {shrink:.2}x"),
    )
}

fn flat_interval_cde() -> Outcome {
    let space = Space1D::flat(Topology1D::Interval { length: 1.0 }, None).unwrap();
    let pairs = random_uniform_pairs(&space, 50, DEFAULT_SEED).unwrap();
    let t = eighths();
    let flat = verify_cde(&space, p(0.0, 2.0), &pairs, &t, 5e-4).unwrap();
    let u = |a, b| ProbMeasure1D::uniform(&space, a, b).unwrap();
    let stretch = vec![(u(0.0, 0.1), u(0.5, 0.9))];
    let curved = verify_cde(&space, p(5.0, 2.0), &stretch, &t, 5e-4).unwrap();
    ensure(
        flat.max_violation <= 5e-4 && curved.max_violation >= 0.01,
        format!(
            "K=0 battery margin {:.3e}; K=5 stretching pair margin {:.3e}",
            flat.max_violation, curved.max_violation
        ),
    )
}

/// Weights on the unit circle: constant, ten random trigonometric
/// polynomials and nine shapes with spikes, plateaus and large amplitudes.
fn circle_weights() -> Vec<(String, Shape)> {
    let mut out: Vec<(String, Shape)> = vec![("constant".into(), Box::new(|_| 0.0))];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..10 {
        let coef: Vec<(f64, f64)> = (1..=4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        out.push((
            format!("random #{i}"),
            Box::new(move |x: f64| {
                coef.iter()
                    .enumerate()
                    .map(|(j, (a, b))| {
                        (a * ((j + 1) as f64 * x).cos() + b * ((j + 1) as f64 * x).sin()) / (j + 1) as f64
                    })
                    .sum()
            }),
        ));
    }
    let shapes: Vec<(&str, Shape)> = vec![
        ("cos", Box::new(|x: f64| x.cos())),
        ("cos 3x", Box::new(|x: f64| (3.0 * x).cos())),
        ("tiny", Box::new(|x: f64| 1e-6 * x.sin())),
        ("large", Box::new(|x: f64| 5.0 * x.cos())),
        ("bump", Box::new(|x: f64| -2.0 * (-8.0 * (x - PI).powi(2)).exp())),
        ("well", Box::new(|x: f64| 2.0 * (-8.0 * ((x - 1.0 + PI).rem_euclid(TAU) - PI).powi(2)).exp())),
        ("abs sin", Box::new(|x: f64| x.sin().abs())),
        ("plateau", Box::new(|x: f64| (4.0 * x.cos()).tanh())),
        ("mixed", Box::new(|x: f64| x.sin() + 0.5 * (2.0 * x).cos())),
    ];
    out.extend(shapes.into_iter().map(|(n, f)| (n.to_string(), f)));
    out
}

fn circle_non_collapse() -> Outcome {
    let weights = circle_weights();
    let mut found = 0;
    let mut total = 0;
    let mut worst_factor_gap = 0.0f64;
    for (name, g) in &weights {
        let f = WeightFn::sample(g, 0.0, TAU, 1e-3).unwrap();
        let space = Space1D::circle(1.0, f).unwrap();
        for k in [0.25, 1.0, 4.0] {
            total += 1;
            let r = circle_obstruction(&space, p(k, 2.0)).unwrap();
            if r.max_violation > 0.0 {
                found += 1;
            } else {
                return Err(format!("no violation for {name}, K={k}"));
            }
            if name == "constant" {
                if let Some(Witness::Obstruction { factor, analytic_factor, .. }) = r.witness {
                    worst_factor_gap = worst_factor_gap.max((factor - analytic_factor).abs());
                }
            }
        }
    }
    ensure(
        found == total && worst_factor_gap <= 1e-9,
        format!("{found}/{total} weight×K cases violated; constant-weight factor gap {worst_factor_gap:.1e}"),
    )
}

fn bg_spaces() -> Vec<(&'static str, Space1D, f64)> {
    vec![
        ("line", Space1D::flat(Topology1D::Line, Some((-5.0, 5.0))).unwrap(), 0.0),
        ("half-line", Space1D::flat(Topology1D::HalfLine, Some((0.0, 5.0))).unwrap(), 0.5),
        ("interval", Space1D::flat(Topology1D::Interval { length: 3.0 }, None).unwrap(), 1.0),
        ("circle", Space1D::flat(Topology1D::Circle { radius: 1.0 }, None).unwrap(), 0.0),
    ]
}

const BG_PARAMS: [(f64, f64); 3] = [(0.0, 2.0), (-1.0, 3.0), (1.0, 2.0)];

fn radii(step: f64) -> Vec<f64> {
    let count = (2.0 / step).round() as usize;
    (1..=count).map(|i| step * i as f64).filter(|&r| r >= 0.2 - 1e-12).collect()
}

fn bg_boundary() -> Outcome {
    let mut min_slack = f64::INFINITY;
    for (name, space, x0) in bg_spaces() {
        for (k, n) in BG_PARAMS {
            let r = bg_boundary_check(&space, x0, p(k, n), &radii(0.2), 1e-12).unwrap();
            if r.max_violation >= 0.0 || r.max_violation.is_nan() {
                return Err(format!("{name} K={k} N={n}: slack {:.3e}", -r.max_violation));
            }
            min_slack = min_slack.min(-r.max_violation);
        }
    }
    let line = Space1D::flat(Topology1D::Line, Some((-5.0, 5.0))).unwrap();
    let (lhs, rhs) = bg_boundary_sides(&line, 0.0, p(0.0, 2.0), 1.0).unwrap();
    ensure(
        (lhs - 4.0).abs() <= 1e-6 && (rhs - 40.0).abs() <= 1e-6,
        format!("12 cases × 10 radii, min slack {min_slack:.3e}; line t=1: LHS {lhs}, RHS {rhs:.9}"),
    )
}

fn bg_ratio() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut trend = Vec::new();
    for step in [0.2, 0.1, 0.05] {
        let mut level = f64::NEG_INFINITY;
        for (_, space, x0) in bg_spaces() {
            for (k, n) in BG_PARAMS {
                let r = bg_ratio_scan(&space, x0, p(k, n), &radii(step), 1e-6).unwrap();
                level = level.max(r.max_violation);
            }
        }
        trend.push(format!("{level:.2e}"));
        worst = worst.max(level);
    }
    ensure(worst <= 1e-6, format!("worst relative increase per radius step 0.2/0.1/0.05: {}", trend.join(" / ")))
}

fn w2_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_line = 0.0f64;
    for _ in 0..200 {
        let (na, nb) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let a = common::random_atoms(&mut rng, na, -2.0, 2.0);
        let b = common::random_atoms(&mut rng, nb, -2.0, 2.0);
        let q = w2_line_quantiles(&QuantileFn::from_atoms(&a).unwrap(), &QuantileFn::from_atoms(&b).unwrap());
        let lp = common::lp_transport_cost(&a, &b, common::line_cost).max(0.0).sqrt();
        worst_line = worst_line.max((q - lp).abs());
    }
    let mut worst_circle = 0.0f64;
    for _ in 0..20 {
        let (na, nb) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let a = common::random_atoms(&mut rng, na, 0.0, TAU);
        let b = common::random_atoms(&mut rng, nb, 0.0, TAU);
        let q = w2_circle_quantiles(&QuantileFn::from_atoms(&a).unwrap(), &QuantileFn::from_atoms(&b).unwrap(), TAU);
        let lp = common::lp_transport_cost(&a, &b, common::circle_cost(TAU)).max(0.0).sqrt();
        worst_circle = worst_circle.max((q - lp).abs());
    }
    ensure(
        worst_line <= 1e-6 && worst_circle <= 5e-4,
        format!("200 line pairs max gap {worst_line:.2e}; 20 circle pairs max gap {worst_circle:.2e}"),
    )
}

fn shannon_sweep() -> Outcome {
    let tripod = Tripod::symmetric(1.0).unwrap();
    let eps = [0.05, 0.02, 0.01, 0.005, 0.002];
    let rows = branching::sweep(&tripod, &BranchingScenario::symmetric(0.05), &eps, 1024).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for (i, r) in rows.iter().enumerate() {
        ok &= r.rhs <= -0.01;
        if i > 0 {
            ok &= r.lhs > rows[i - 1].lhs;
        }
        if r.eps <= 0.01 {
            ok &= r.lhs > r.rhs;
        }
        detail.push(format!("ε={}: lhs {:.4} rhs {:.4}", r.eps, r.lhs, r.rhs));
    }
    ensure(ok, detail.join("; "))
}

fn renyi_limit() -> Outcome {
    let tripod = Tripod::symmetric(1.0).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [2.0, 8.0, 64.0] {
        let s = BranchingScenario { n, ..BranchingScenario::symmetric(1e-3) };
        let pair = build_branching_plans(&tripod, &s).unwrap();
        let r = branching::renyi_contradiction(&pair, &tripod, n).unwrap();
        ok &= r.contradiction && r.ratio >= 2f64.powf(1.0 / n) * (1.0 - 5e-3);
        detail.push(format!("N={n}: ratio {:.5} vs 2^(1/N) {:.5}", r.ratio, r.threshold));
    }
    ensure(ok, detail.join("; "))
}

fn entropy_bookkeeping() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_split = 0.0f64;
    let mut bound_ok = 0;
    for _ in 0..50 {
        let a = rng.gen_range(0.2..0.7);
        let s = BranchingScenario {
            a,
            b: rng.gen_range(0.02..0.95) * a,
            eps: rng.gen_range(0.001..0.1),
            eta: rng.gen_range(0.1..1.0),
            beta: rng.gen_range(0.1..=1.0),
            n: rng.gen_range(1.5..20.0),
        };
        let dens = [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)];
        let tripod = Tripod::new([1.0, 1.0, 1.0], dens).unwrap();
        let pair = build_branching_plans_with(&tripod, &s, 512).unwrap();
        let after = s.a + s.eps;
        for t in [after + 1e-9, 0.5 * (after + 1.0), 1.0] {
            let e = |w| entropy_along(&pair, &tripod, t, w).unwrap();
            let gap = e(Which::Mixed) - (0.5 * e(Which::U) + 0.5 * e(Which::D) - 2f64.ln());
            worst_split = worst_split.max(gap.abs());
        }
        let (lhs, bound) = branching::lower_entropy_bound(&pair, &tripod);
        if lhs >= bound {
            bound_ok += 1;
        }
    }
    ensure(
        worst_split <= 1e-6 && bound_ok == 50,
        format!("50 scenarios, split identity max gap {worst_split:.2e}; lower bound held on {bound_ok}/50"),
    )
}

fn lipschitz_battery() -> Outcome {
    let gaussian = WeightFn::sample(|x| 0.5 * x * x, -3.0, 3.0, 1e-3).unwrap();
    let half = 0.9 * 0.5 * PI * 2f64.sqrt();
    let model = WeightFn::sample(|x| -2.0 * (x / 2f64.sqrt()).cos().ln(), -half, half, 1e-3).unwrap();
    let spaces = [
        ("equality weight", Space1D::line(-half, half, model).unwrap(), p(1.0, 2.0), 0.3),
        ("gaussian", Space1D::line(-3.0, 3.0, gaussian).unwrap(), p(-1.0, 10.0), 0.5),
        (
            "exponential interval",
            Space1D::interval(2.0, WeightFn::new(vec![0.0, 2.0], vec![0.0, 2.0]).unwrap()).unwrap(),
            p(-1.0, 2.0),
            0.4,
        ),
        (
            "tilted half-line",
            Space1D::half_line(2.0, WeightFn::new(vec![0.0, 2.0], vec![0.0, 1.0]).unwrap()).unwrap(),
            p(-0.5, 2.0),
            0.4,
        ),
        (
            "circle",
            Space1D::circle(1.0, WeightFn::sample(|x| 0.1 * x.cos(), 0.0, TAU, 1e-3).unwrap()).unwrap(),
            p(-0.2, 2.0),
            0.5,
        ),
    ];
    let mut held = 0;
    let mut detail = Vec::new();
    for (i, (name, space, params, r)) in spaces.iter().enumerate() {
        let pairs = random_close_pairs(space, *r, 100, DEFAULT_SEED + i as u64);
        let est = lipschitz_modulus(space, *r, &pairs, *params).unwrap();
        for &(x, y) in &pairs {
            let (mx, my) = (space.measure_ball(x, *r).unwrap(), space.measure_ball(y, *r).unwrap());
            let bound = lipschitz_pair_bound(*params, *r, space.distance(x, y), mx, my).unwrap();
            held += usize::from((mx - my).abs() / r <= bound);
        }
        detail.push(format!("{name} {:.3}≤{:.3}", est.empirical, est.theoretical));
    }
    ensure(held == 500, format!("{held}/500 pairs within bound; {}", detail.join(", ")))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let space = dir.path().join("space.json");
    std::fs::write(&space, r#"{"topology": "interval", "param": 1.0, "weight": {"coords": [0, 1], "f": [0, 0.5]}}"#)
        .map_err(|e| e.to_string())?;
    let space = space.to_str().unwrap().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["check-kn-convex", "--input", &space],
        vec!["verify-cde", "--pairs", "10"],
        vec!["verify-cd-infty", "--pairs", "10"],
        vec!["circle-obstruction", "--k", "1", "--n", "2"],
        vec!["bg-scan", "--input", &space],
        vec!["bg-boundary"],
        vec!["density-ratio", "--tripod", "--power", "2"],
        vec!["lipschitz", "--pairs", "50", "--radius", "0.2"],
        vec!["classify", "--input", &space],
        vec!["tripod-shannon"],
        vec!["tripod-renyi"],
        vec!["coefficients-table"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut bodies = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("run{i}-{rep}"));
            let mut full = vec!["curvlab".to_string(), "--seed".into(), "99".into(), "--output".into()];
            full.push(out.to_str().unwrap().into());
            full.extend(args.iter().map(|s| s.to_string()));
            let code = curvlab::cli::main_with_args(full);
            if code == 1 {
                return Err(format!("`{}` exited with a usage error", args.join(" ")));
            }
            bodies.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if bodies[0] != bodies[1] || bodies[0].is_empty() {
            return Err(format!("`{}` produced differing output", args.join(" ")));
        }
    }
    ensure(true, format!("{} commands, two runs each, byte-identical", runs.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "distortion coefficient sanity", Duration::from_secs(1), sigma_sanity),
        (2, "equality-case weight converges at second order", Duration::from_secs(30), equality_case),
        (3, "entropic CD on the flat interval", Duration::from_secs(60), flat_interval_cde),
        (4, "circle non-collapse obstruction", Duration::from_secs(30), circle_non_collapse),
        (5, "boundary measure inequality", Duration::from_secs(10), bg_boundary),
        (6, "ball volume ratio monotonicity", Duration::from_secs(10), bg_ratio),
        (7, "W2 agrees with linear programming", Duration::from_secs(60), w2_oracle),
        (8, "tripod Shannon contradiction", Duration::from_secs(60), shannon_sweep),
        (9, "tripod Renyi contradiction", Duration::from_secs(60), renyi_limit),
        (10, "tripod entropy bookkeeping", Duration::from_secs(30), entropy_bookkeeping),
        (11, "Lipschitz modulus bound", Duration::from_secs(30), lipschitz_battery),
        (12, "CLI determinism", Duration::from_secs(120), cli_determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow ({:.2?} > {:?})", elapsed, limit)),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {id:>2} {} {name} [{elapsed:.2?}] {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
