//! Curvature-dimension checks on one-dimensional spaces.
//!
//! Every check returns a [`CurvatureReport`] whose `max_violation` is the
//! worst signed margin found: negative or zero means the inequality held on
//! every tested input, positive values measure how badly it failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{sigma, CurvatureParams, ExtReal};
use crate::error::{Error, Result};
use crate::space1d::{Arc, Space1D, WeightFn};
use crate::transport1d::{entropy, Coupling, ProbMeasure1D};

/// Default seed of the random part of the triple battery.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;
/// Coarse grid size of the default triple battery.
pub const COARSE_POINTS: usize = 64;
/// Number of random triples in the default battery.
pub const RANDOM_TRIPLES: usize = 256;

/// The input that produced the worst margin of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Triple { x0: f64, x1: f64, t: f64, arc: Arc, d: f64 },
    Node { x: f64 },
    Pair { index: usize, t: f64, w2: f64 },
    Obstruction { x0: f64, x_bar: f64, x1: f64, d: f64, factor: f64, analytic_factor: f64 },
    Radius { x0: f64, r: f64 },
    Points { x: f64, y: f64 },
}

/// Outcome of a check: the worst signed margin and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub kind: String,
    #[serde(rename = "K")]
    pub k: f64,
    /// `None` for dimension-free checks.
    #[serde(rename = "N")]
    pub n: Option<f64>,
    pub max_violation: f64,
    pub witness: Option<Witness>,
    pub tol: f64,
    pub grid_step: f64,
    pub seed: Option<u64>,
    /// Number of inequality instances evaluated.
    pub evaluated: usize,
    /// Instances skipped because a coefficient was infinite.
    pub skipped: usize,
    pub flags: Vec<String>,
}

impl CurvatureReport {
    pub(crate) fn new(kind: &str, k: f64, n: Option<f64>, tol: f64, grid_step: f64) -> Self {
        CurvatureReport {
            kind: kind.to_string(),
            k,
            n,
            max_violation: f64::NEG_INFINITY,
            witness: None,
            tol,
            grid_step,
            seed: None,
            evaluated: 0,
            skipped: 0,
            flags: Vec::new(),
        }
    }

    /// Records a margin; ties keep the earlier witness.
    pub(crate) fn offer(&mut self, margin: f64, witness: impl FnOnce() -> Witness) {
        self.evaluated += 1;
        if margin > self.max_violation || self.witness.is_none() {
            self.max_violation = margin;
            self.witness = Some(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.max_violation <= self.tol
    }

    pub fn params(&self) -> Option<CurvatureParams> {
        CurvatureParams::new(self.k, self.n?).ok()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Two points, the geodesic between them and the times to test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriplePlan {
    pub x0: f64,
    pub x1: f64,
    pub t_grid: Vec<f64>,
    pub arc: Arc,
}

impl TriplePlan {
    pub fn new(space: &Space1D, x0: f64, x1: f64, t_grid: Vec<f64>, arc: Arc) -> Result<Self> {
        let plan = TriplePlan { x0, x1, t_grid, arc };
        plan.validate(space)?;
        Ok(plan)
    }

    pub fn validate(&self, space: &Space1D) -> Result<()> {
        if !(space.contains(self.x0) && space.contains(self.x1)) {
            return Err(Error::Domain(format!("triple endpoints {} / {} outside the space", self.x0, self.x1)));
        }
        if space.distance(self.x0, self.x1) <= 0.0 {
            return Err(Error::Domain("triple endpoints must differ".into()));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::Domain(format!("triple time {t} outside (0,1)")));
        }
        Ok(())
    }

    /// Arcs to test: both at antipodes of a circle, otherwise the declared one.
    fn arcs(&self, space: &Space1D) -> Vec<Arc> {
        if space.is_circle() && self.arc == Arc::Shortest {
            let l = space.length();
            let fwd = (self.x1 - self.x0).rem_euclid(l);
            if (fwd - 0.5 * l).abs() <= 1e-12 * l {
                return vec![Arc::Positive, Arc::Negative];
            }
        }
        vec![self.arc]
    }
}

/// Eighths `1/8, …, 7/8`.
pub fn eighths() -> Vec<f64> {
    (1..8).map(|i| i as f64 / 8.0).collect()
}

/// All pairs of a coarse grid with `t ∈ {1/8, …, 7/8}` plus `RANDOM_TRIPLES`
/// random `(x0, x1, t)`.
pub fn default_battery(space: &Space1D, seed: u64) -> Vec<TriplePlan> {
    battery(space, COARSE_POINTS, RANDOM_TRIPLES, seed)
}

pub fn battery(space: &Space1D, coarse: usize, random: usize, seed: u64) -> Vec<TriplePlan> {
    let (lo, hi) = space.domain();
    let coarse = coarse.max(2);
    let points: Vec<f64> = if space.is_circle() {
        (0..coarse).map(|i| lo + (hi - lo) * i as f64 / coarse as f64).collect()
    } else {
        (0..coarse).map(|i| lo + (hi - lo) * i as f64 / (coarse - 1) as f64).collect()
    };
    let mut plans = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            plans.push(TriplePlan { x0: points[i], x1: points[j], t_grid: eighths(), arc: Arc::Shortest });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while plans.len() < coarse * (coarse - 1) / 2 + random {
        let x0 = rng.gen_range(lo..hi);
        let x1 = rng.gen_range(lo..hi);
        let t = rng.gen_range(0.0..1.0);
        if space.distance(x0, x1) > 0.0 && t > 0.0 {
            plans.push(TriplePlan { x0, x1, t_grid: vec![t], arc: Arc::Shortest });
        }
    }
    plans
}

fn weight_at(space: &Space1D, f: &WeightFn, x: f64) -> f64 {
    f.eval(space.wrap(x))
}

/// Margin `σ^{(1-t)}(d) g(x0) + σ^{(t)}(d) g(x1) - g(x_t)` with `g = e^{-f/N}`,
/// or `None` when a coefficient is infinite.
pub fn kn_margin(
    space: &Space1D,
    f: &WeightFn,
    params: CurvatureParams,
    x0: f64,
    x1: f64,
    t: f64,
    arc: Arc,
) -> Result<Option<f64>> {
    let d = space.displacement(x0, x1, arc).abs();
    let (s0, s1) = match (sigma(1.0 - t, params, d)?, sigma(t, params, d)?) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (a, b),
        _ => return Ok(None),
    };
    let n = params.n();
    let g = |x: f64| (-weight_at(space, f, x) / n).exp();
    let xt = space.geodesic_point(x0, x1, t, arc);
    Ok(Some(s0 * g(x0) + s1 * g(x1) - g(xt)))
}

/// Checks that `f` is `(K,N)`-convex along every plan of the battery.
pub fn check_kn_convex(
    f: &WeightFn,
    space: &Space1D,
    params: CurvatureParams,
    plans: &[TriplePlan],
    tol: f64,
) -> Result<CurvatureReport> {
    check_tol(tol)?;
    for p in plans {
        p.validate(space)?;
    }
    let per_plan: Vec<Vec<(Option<f64>, f64, Arc)>> = plans
        .par_iter()
        .map(|p| {
            let mut out = Vec::with_capacity(p.t_grid.len());
            for arc in p.arcs(space) {
                for &t in &p.t_grid {
                    let m = kn_margin(space, f, params, p.x0, p.x1, t, arc).unwrap_or(None);
                    out.push((m, t, arc));
                }
            }
            out
        })
        .collect();
    let mut report = CurvatureReport::new("kn_convex", params.k(), Some(params.n()), tol, space.grid_step());
    for (p, results) in plans.iter().zip(per_plan) {
        for (m, t, arc) in results {
            match m {
                Some(m) => report.offer(m, || Witness::Triple {
                    x0: p.x0,
                    x1: p.x1,
                    t,
                    arc,
                    d: space.displacement(p.x0, p.x1, arc).abs(),
                }),
                None => report.skipped += 1,
            }
        }
    }
    if report.skipped > 0 {
        report.flags.push(format!("conjugate regime: {} instances skipped", report.skipped));
    }
    Ok(report)
}

/// Re-evaluates the margin recorded in a triple witness.
pub fn reevaluate_triple(space: &Space1D, f: &WeightFn, params: CurvatureParams, w: &Witness) -> Result<Option<f64>> {
    match *w {
        Witness::Triple { x0, x1, t, arc, .. } => kn_margin(space, f, params, x0, x1, t, arc),
        _ => Err(Error::Domain("not a triple witness".into())),
    }
}

/// Checks `V'' ≥ K + V'^2/N` at the interior nodes of `f` by central
/// differences. Margins are `K + V'^2/N - V''`.
pub fn differential_criterion(f: &WeightFn, params: CurvatureParams, tol: f64) -> Result<CurvatureReport> {
    check_tol(tol)?;
    let (x, v) = (f.coords(), f.values());
    if x.len() < 5 {
        return Err(Error::InsufficientResolution(format!("{} nodes, need at least 5", x.len())));
    }
    let h = x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let mut report = CurvatureReport::new("differential", params.k(), Some(params.n()), tol, h);
    for i in 1..x.len() - 1 {
        let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let d1 = (v[i + 1] - v[i - 1]) / (hl + hr);
        let d2 = 2.0 * (hr * v[i - 1] - (hl + hr) * v[i] + hl * v[i + 1]) / (hl * hr * (hl + hr));
        let margin = params.k() + d1 * d1 / params.n() - d2;
        report.offer(margin, || Witness::Node { x: x[i] });
    }
    Ok(report)
}

/// `count` seeded pairs of uniform measures on random intervals (arcs on the
/// circle) of length between 2% and 30% of the domain.
pub fn random_uniform_pairs(space: &Space1D, count: usize, seed: u64) -> Result<Vec<(ProbMeasure1D, ProbMeasure1D)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = space.domain();
    let len = hi - lo;
    let draw = |rng: &mut ChaCha8Rng| {
        let w = rng.gen_range(0.02..0.3) * len;
        let a = rng.gen_range(lo..hi - w);
        ProbMeasure1D::uniform(space, a, a + w)
    };
    (0..count).map(|_| Ok((draw(&mut rng)?, draw(&mut rng)?))).collect()
}

struct PairTrace {
    w2: f64,
    ent0: f64,
    ent1: f64,
    ent_t: Vec<f64>,
}

fn trace_pair(
    space: &Space1D,
    mu0: &ProbMeasure1D,
    mu1: &ProbMeasure1D,
    index: usize,
    t_grid: &[f64],
) -> Result<PairTrace> {
    let coupling = Coupling::new(space, mu0, mu1)?;
    let ent = |t: f64| -> Result<f64> {
        let e = entropy(&coupling.interpolant(t), space)?;
        if !e.is_finite() {
            return Err(Error::EntropyDivergence(format!("pair {index} at t={t}")));
        }
        Ok(e)
    };
    Ok(PairTrace {
        w2: coupling.w2(),
        ent0: ent(0.0)?,
        ent1: ent(1.0)?,
        ent_t: t_grid.iter().map(|&t| ent(t)).collect::<Result<_>>()?,
    })
}

fn trace_battery(space: &Space1D, pairs: &[(ProbMeasure1D, ProbMeasure1D)], t_grid: &[f64]) -> Result<Vec<PairTrace>> {
    if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Domain(format!("t_grid entry {t} outside [0,1]")));
    }
    pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| trace_pair(space, a, b, i, t_grid))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Entropic curvature-dimension check along the displacement geodesics of
/// every pair. Margins are `σ^{(1-t)}(W) e^{-E_0/N} + σ^{(t)}(W) e^{-E_1/N} - e^{-E_t/N}`.
pub fn verify_cde(
    space: &Space1D,
    params: CurvatureParams,
    pairs: &[(ProbMeasure1D, ProbMeasure1D)],
    t_grid: &[f64],
    tol: f64,
) -> Result<CurvatureReport> {
    check_tol(tol)?;
    let traces = trace_battery(space, pairs, t_grid)?;
    let n = params.n();
    let mut report = CurvatureReport::new("cde", params.k(), Some(n), tol, space.grid_step());
    for (index, tr) in traces.iter().enumerate() {
        for (&t, &et) in t_grid.iter().zip(&tr.ent_t) {
            match (sigma(1.0 - t, params, tr.w2)?, sigma(t, params, tr.w2)?) {
                (ExtReal::Finite(s0), ExtReal::Finite(s1)) => {
                    let margin = s0 * (-tr.ent0 / n).exp() + s1 * (-tr.ent1 / n).exp() - (-et / n).exp();
                    report.offer(margin, || Witness::Pair { index, t, w2: tr.w2 });
                }
                _ => report.skipped += 1,
            }
        }
    }
    if report.skipped > 0 {
        report.flags.push(format!("conjugate regime: {} instances skipped", report.skipped));
    }
    Ok(report)
}

/// `K`-convexity of the entropy. Margins are
/// `E_t - (1-t) E_0 - t E_1 + (K/2) t (1-t) W^2`.
pub fn verify_cd_infty(
    space: &Space1D,
    k: f64,
    pairs: &[(ProbMeasure1D, ProbMeasure1D)],
    t_grid: &[f64],
    tol: f64,
) -> Result<CurvatureReport> {
    check_tol(tol)?;
    if !k.is_finite() {
        return Err(Error::Domain(format!("K must be finite, got {k}")));
    }
    let traces = trace_battery(space, pairs, t_grid)?;
    let mut report = CurvatureReport::new("cd_infty", k, None, tol, space.grid_step());
    for (index, tr) in traces.iter().enumerate() {
        for (&t, &et) in t_grid.iter().zip(&tr.ent_t) {
            let margin = et - (1.0 - t) * tr.ent0 - t * tr.ent1 + 0.5 * k * t * (1.0 - t) * tr.w2 * tr.w2;
            report.offer(margin, || Witness::Pair { index, t, w2: tr.w2 });
        }
    }
    Ok(report)
}

/// Finds a triple around the maximum of the weight on a circle that violates
/// `(K,N)`-convexity. A positive `max_violation` is the expected outcome.
pub fn circle_obstruction(space: &Space1D, params: CurvatureParams) -> Result<CurvatureReport> {
    let l = space.length();
    let d0 = (0.25 * l).min(0.5 * std::f64::consts::PI * (params.n() / params.k()).sqrt());
    circle_obstruction_from(space, params, d0)
}

/// As [`circle_obstruction`], starting the symmetric triples at distance `d0`
/// and halving until a violation appears.
pub fn circle_obstruction_from(space: &Space1D, params: CurvatureParams, d0: f64) -> Result<CurvatureReport> {
    if !space.is_circle() {
        return Err(Error::Domain("circle_obstruction needs a circle".into()));
    }
    if !(params.k() > 0.0) {
        return Err(Error::Domain(format!("circle_obstruction needs K > 0, got {}", params.k())));
    }
    let l = space.length();
    if !(d0 > 0.0 && d0 <= 0.5 * l) {
        return Err(Error::Domain(format!("triple distance {d0} outside (0, L/2]")));
    }
    let f = space.weight();
    let n = params.n();
    let x_bar = space.wrap(f.coords()[f.argmax().0]);
    let g = |x: f64| (-weight_at(space, f, x) / n).exp();
    let mut report = CurvatureReport::new("circle_obstruction", params.k(), Some(n), f64::EPSILON, space.grid_step());
    let mut d = d0;
    for _ in 0..64 {
        let x0 = space.wrap(x_bar - 0.5 * d);
        let x1 = space.wrap(x_bar + 0.5 * d);
        if let Some(margin) = kn_margin(space, f, params, x0, x1, 0.5, Arc::Positive)? {
            let s = sigma(0.5, params, d)?.to_f64();
            let factor = s * (g(x0) + g(x1)) / g(x_bar);
            let analytic_factor = 1.0 / (0.5 * d * (params.k() / n).sqrt()).cos();
            report.offer(margin, || Witness::Obstruction { x0, x_bar, x1, d, factor, analytic_factor });
            if margin > 0.0 {
                return Ok(report);
            }
        } else {
            report.skipped += 1;
        }
        d *= 0.5;
    }
    report.flags.push("no violating triple found: contradicts the circle obstruction".into());
    Ok(report)
}
