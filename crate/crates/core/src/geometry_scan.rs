//! Volume comparison scans: Bishop-Gromov ratios, boundary measures, linear
//! ball growth, density ratios, the Lipschitz modulus of `x ↦ m(B_r(x))/r`,
//! and classification of one-dimensional spaces.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::{Tripod, TripodPoint};
use crate::coefficients::{f_vol, f_vol_derivative, s_vol, CurvatureParams};
use crate::curvature::{check_kn_convex, default_battery, CurvatureReport, Witness, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::space1d::{Space1D, Topology1D, WeightFn};

/// Covering constant of the boundary inequality.
pub fn covering_constant(params: CurvatureParams) -> f64 {
    2.0 * 5f64.powf(params.n() - 1.0)
}

/// Checks that `r ↦ m(B_r(x0)) / F(r)` is nonincreasing along the increasing
/// radii. Margins are relative increases between consecutive radii.
pub fn bg_ratio_scan(
    space: &Space1D,
    x0: f64,
    params: CurvatureParams,
    r_grid: &[f64],
    tol: f64,
) -> Result<CurvatureReport> {
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid.first().is_none_or(|r| !(*r > 0.0)) {
        return Err(Error::Domain("bg_ratio_scan: radii must be positive and increasing".into()));
    }
    let ratios =
        r_grid.iter().map(|&r| Ok(space.measure_ball(x0, r)? / f_vol(params, r)?)).collect::<Result<Vec<f64>>>()?;
    let mut report = CurvatureReport::new("bg_ratio", params.k(), Some(params.n()), tol, space.grid_step());
    for i in 1..ratios.len() {
        let margin = (ratios[i] - ratios[i - 1]) / ratios[i - 1];
        report.offer(margin, || Witness::Radius { x0, r: r_grid[i] });
    }
    Ok(report)
}

/// The two sides of the boundary inequality at radius `t`:
/// `m_{-1}(∂B_t(x0))` and `2·5^{N-1} m(B_t(x0)) S(t)^{N-1} / F(t)`.
pub fn bg_boundary_sides(space: &Space1D, x0: f64, params: CurvatureParams, t: f64) -> Result<(f64, f64)> {
    let lhs = space.boundary_measure(x0, t)?;
    let ball = space.measure_ball(x0, t)?;
    let rhs = covering_constant(params) * ball * s_vol(params, t)?.powf(params.n() - 1.0) / f_vol(params, t)?;
    Ok((lhs, rhs))
}

/// Boundary inequality on a list of radii. Margins are `LHS - RHS`.
pub fn bg_boundary_check(
    space: &Space1D,
    x0: f64,
    params: CurvatureParams,
    t_grid: &[f64],
    tol: f64,
) -> Result<CurvatureReport> {
    let mut report = CurvatureReport::new("bg_boundary", params.k(), Some(params.n()), tol, space.grid_step());
    for &t in t_grid {
        let (lhs, rhs) = bg_boundary_sides(space, x0, params, t)?;
        report.offer(lhs - rhs, || Witness::Radius { x0, r: t });
    }
    Ok(report)
}

/// Result of a linear growth scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearGrowth {
    /// `sup m(B_s(x)) / s` over the scanned centers and radii.
    pub empirical: f64,
    /// `2·5^{N-1} · sup_{t ≤ R} (t F'(t) / F(t)) · sup_{t ≤ R} m(B_t(y)) / t`.
    pub envelope: f64,
    pub report: CurvatureReport,
}

/// Scans `m(B_s(x))/s` for `x ∈ B_R(y)` on the working grid and `s ∈ s_grid`.
pub fn linear_growth_constant(
    space: &Space1D,
    y: f64,
    radius: f64,
    s_grid: &[f64],
    params: CurvatureParams,
) -> Result<LinearGrowth> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("R must be > 0, got {radius}")));
    }
    if s_grid.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
        return Err(Error::Domain("s_grid must lie in (0, 1]".into()));
    }
    let h = space.grid_step();
    let steps = (radius / h).round() as i64;
    let centers: Vec<f64> = (-steps..=steps).map(|i| y + i as f64 * h).filter(|&x| space.contains(x)).collect();
    let rows: Vec<(f64, f64, f64)> = centers
        .par_iter()
        .map(|&x| s_grid.iter().map(|&s| space.measure_ball(x, s).map(|m| (m / s, x, s))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut report = CurvatureReport::new("linear_growth", params.k(), Some(params.n()), 1e-12, h);
    let mut empirical = 0.0f64;
    for &(c, x, s) in &rows {
        empirical = empirical.max(c);
        report.offer(c, || Witness::Radius { x0: x, r: s });
    }
    let samples = 256;
    let mut shape = 0.0f64;
    let mut ball = 0.0f64;
    for i in 1..=samples {
        let t = radius * i as f64 / samples as f64;
        shape = shape.max(t * f_vol_derivative(params, t)? / f_vol(params, t)?);
        ball = ball.max(space.measure_ball(y, t)? / t);
    }
    let envelope = covering_constant(params) * shape * ball;
    report.max_violation = empirical - envelope;
    Ok(LinearGrowth { empirical, envelope, report })
}

/// `m(B_r(x)) / r^k` along decreasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRatioTrace {
    pub x: f64,
    pub k: u32,
    pub r_grid: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `0.1 · max ratio`.
    pub threshold: f64,
    /// Smallest ratio over the last quarter of the trace falls below the threshold.
    pub in_mk: bool,
}

impl DensityRatioTrace {
    fn from_balls(x: f64, k: u32, r_grid: &[f64], ball: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("k must be a positive integer".into()));
        }
        if r_grid.is_empty() || r_grid.windows(2).any(|w| !(w[1] < w[0])) || r_grid.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Domain("r_grid must be positive and strictly decreasing".into()));
        }
        let ratios = r_grid.iter().map(|&r| Ok(ball(r)? / r.powi(k as i32))).collect::<Result<Vec<f64>>>()?;
        let threshold = 0.1 * ratios.iter().cloned().fold(0.0, f64::max);
        let tail = ratios.len().div_ceil(4);
        let tail_min = ratios[ratios.len() - tail..].iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(DensityRatioTrace { x, k, r_grid: r_grid.to_vec(), ratios, threshold, in_mk: tail_min < threshold })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "ratio"])?;
        for (r, q) in self.r_grid.iter().zip(&self.ratios) {
            out.write_record([r.to_string(), q.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Density ratio trace at a point of a space. Radii must exceed the grid step.
pub fn density_ratio_trace(space: &Space1D, x: f64, k: u32, r_grid: &[f64]) -> Result<DensityRatioTrace> {
    if r_grid.iter().any(|&r| r <= space.grid_step()) {
        return Err(Error::Domain("radii must exceed the grid step".into()));
    }
    DensityRatioTrace::from_balls(x, k, r_grid, |r| space.measure_ball(x, r))
}

/// Density ratio trace at a point of a tripod.
pub fn density_ratio_trace_tripod(
    tripod: &Tripod,
    p: TripodPoint,
    k: u32,
    r_grid: &[f64],
) -> Result<DensityRatioTrace> {
    tripod.check_point(p)?;
    DensityRatioTrace::from_balls(p.s, k, r_grid, |r| Ok(tripod.measure_ball(p, r)))
}

/// Result of the Lipschitz modulus scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    /// `sup |m(B_r(x)) - m(B_r(y))| / (r d(x,y))`.
    pub empirical: f64,
    /// Largest per-pair bound, per unit distance.
    pub theoretical: f64,
    /// Margins `|Δm|/r - bound` per pair; positive means the bound failed.
    pub report: CurvatureReport,
}

/// Bound on `|m(B_r(x)) - m(B_r(y))| / r` for `d = d(x,y) < 2r` from the
/// volume comparison around the midpoint:
/// `(1/r) (1 - F(r - d/2)/F(r + d/2)) (m(B_r(x)) + m(B_r(y)))`.
pub fn lipschitz_pair_bound(params: CurvatureParams, r: f64, d: f64, mx: f64, my: f64) -> Result<f64> {
    let shrink = f_vol(params, r - 0.5 * d)? / f_vol(params, r + 0.5 * d)?;
    Ok((1.0 - shrink) * (mx + my) / r)
}

/// `count` seeded pairs `(x, y)` with `0 < d(x,y) < r/2` whose `r`-balls stay
/// inside the working window.
pub fn random_close_pairs(space: &Space1D, r: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = space.domain();
    let (lo, hi) = match space.topology() {
        Topology1D::Line => (lo + 1.5 * r, hi - 1.5 * r),
        Topology1D::HalfLine => (lo, hi - 1.5 * r),
        _ => (lo, hi),
    };
    (0..count)
        .map(|_| {
            let d = rng.gen_range(0.01..0.49) * r;
            let x = rng.gen_range(lo..hi - d);
            (x, x + d)
        })
        .collect()
}

pub fn lipschitz_modulus(
    space: &Space1D,
    r: f64,
    pairs: &[(f64, f64)],
    params: CurvatureParams,
) -> Result<LipschitzEstimate> {
    if !(r > 2.0 * space.grid_step()) {
        return Err(Error::Domain(format!("radius {r} must exceed twice the grid step")));
    }
    let rows = pairs
        .par_iter()
        .map(|&(x, y)| {
            let d = space.distance(x, y);
            if !(d > 0.0 && d < 0.5 * r) {
                return Err(Error::Domain(format!("pair ({x}, {y}) must satisfy 0 < d < r/2")));
            }
            let mx = space.measure_ball(x, r)?;
            let my = space.measure_ball(y, r)?;
            let bound = lipschitz_pair_bound(params, r, d, mx, my)?;
            Ok(((mx - my).abs() / r, bound, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CurvatureReport::new("lipschitz", params.k(), Some(params.n()), 1e-12, space.grid_step());
    let (mut empirical, mut theoretical) = (0.0f64, 0.0f64);
    for (&(x, y), &(diff, bound, d)) in pairs.iter().zip(&rows) {
        empirical = empirical.max(diff / d);
        theoretical = theoretical.max(bound / d);
        report.offer(diff - bound, || Witness::Points { x, y });
    }
    Ok(LipschitzEstimate { empirical, theoretical, report })
}

/// A recognised model space with a weight that verifies `(K,N)`-convexity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub model: Topology1D,
    pub weight: WeightFn,
    pub kn_params: CurvatureParams,
    pub max_violation: f64,
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Option<ClassificationVerdict>,
    /// `(params, max_violation)` for every candidate, in search order.
    pub tried: Vec<(CurvatureParams, f64)>,
    pub message: String,
}

pub const CLASSIFY_TOL: f64 = 1e-6;

/// Reads off the model and weight and returns the smallest-`K` candidate
/// under which the weight is `(K,N)`-convex on the default battery.
pub fn classify(space: &Space1D, search: &[CurvatureParams]) -> Result<Classification> {
    let mut order: Vec<CurvatureParams> = search.to_vec();
    order.sort_by(|a, b| a.k().total_cmp(&b.k()));
    let plans = default_battery(space, DEFAULT_SEED);
    let mut tried = Vec::new();
    let mut verdict = None;
    for p in order {
        let rep = check_kn_convex(space.weight(), space, p, &plans, CLASSIFY_TOL)?;
        tried.push((p, rep.max_violation));
        if rep.passed() && verdict.is_none() {
            verdict = Some(ClassificationVerdict {
                model: space.topology(),
                weight: space.weight().clone(),
                kn_params: p,
                max_violation: rep.max_violation,
            });
        }
    }
    let message = match &verdict {
        Some(v) => format!("{} with a {} weight", v.model.name(), v.kn_params),
        None => "no admissible (K,N) in search battery".to_string(),
    };
    Ok(Classification { verdict, tried, message })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: f64, n: f64) -> CurvatureParams {
        CurvatureParams::new(k, n).unwrap()
    }

    fn flat(t: Topology1D, w: Option<(f64, f64)>) -> Space1D {
        Space1D::flat(t, w).unwrap()
    }

    #[test]
    fn bg_ratio_flat_line() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let radii: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
        let r = bg_ratio_scan(&line, 0.0, p(0.0, 2.0), &radii, 1e-9).unwrap();
        assert!(r.passed() && r.max_violation < 0.0);
        let ratio = line.measure_ball(0.0, 1.0).unwrap() / f_vol(p(0.0, 2.0), 1.0).unwrap();
        assert!((ratio - 4.0).abs() < 1e-9);
    }

    #[test]
    fn boundary_closed_forms() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let (l, r) = bg_boundary_sides(&line, 0.0, p(0.0, 2.0), 1.0).unwrap();
        assert!((l - 4.0).abs() < 1e-12 && (r - 40.0).abs() < 1e-6);
        let half = flat(Topology1D::HalfLine, Some((0.0, 5.0)));
        let (l, r) = bg_boundary_sides(&half, 0.0, p(0.0, 2.0), 1.0).unwrap();
        assert!((l - 2.0).abs() < 1e-12 && (r - 20.0).abs() < 1e-6);
        let circle = flat(Topology1D::Circle { radius: 1.0 }, None);
        let (l, r) = bg_boundary_sides(&circle, 0.0, p(0.0, 2.0), std::f64::consts::PI).unwrap();
        assert!((l - 2.0).abs() < 1e-12 && r > l);
    }

    #[test]
    fn linear_growth_examples() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let s = [0.05, 0.1, 0.5, 1.0];
        let g = linear_growth_constant(&line, 0.0, 1.0, &s, p(0.0, 2.0)).unwrap();
        assert!((g.empirical - 2.0).abs() < 1e-12 && g.empirical <= g.envelope);
        let half = flat(Topology1D::HalfLine, Some((0.0, 5.0)));
        let g = linear_growth_constant(&half, 0.0, 1.0, &s, p(0.0, 2.0)).unwrap();
        assert!((g.empirical - 2.0).abs() < 1e-12);
        let w = WeightFn::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let iv = Space1D::interval(1.0, w).unwrap();
        let g = linear_growth_constant(&iv, 0.5, 0.5, &[0.001, 0.002, 0.005], p(-1.0, 2.0)).unwrap();
        assert!((g.empirical - 2.0).abs() < 0.1, "{}", g.empirical);
        assert!(g.empirical <= g.envelope);
    }

    #[test]
    fn density_ratios() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let radii: Vec<f64> = (0..7).map(|i| 1.0 / 2f64.powi(i)).collect();
        let t = density_ratio_trace(&line, 0.0, 1, &radii).unwrap();
        assert!(t.ratios.iter().all(|r| (r - 2.0).abs() < 1e-12) && !t.in_mk);
        let t = density_ratio_trace(&line, 0.0, 2, &radii).unwrap();
        assert!(!t.in_mk);
        let tri = Tripod::symmetric(1.0).unwrap();
        let t = density_ratio_trace_tripod(&tri, TripodPoint::CENTER, 1, &radii).unwrap();
        assert!(t.ratios.iter().all(|r| (r - 3.0).abs() < 1e-12) && !t.in_mk);
        let t = density_ratio_trace_tripod(&tri, TripodPoint::CENTER, 2, &radii).unwrap();
        assert!(!t.in_mk && t.ratios.last().unwrap() > &190.0);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("r,ratio\n"));
        assert!(density_ratio_trace(&line, 0.0, 1, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn lipschitz_flat_and_exponential() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let pairs = [(0.0, 0.1), (1.0, 1.2)];
        let est = lipschitz_modulus(&line, 1.0, &pairs, p(0.0, 2.0)).unwrap();
        assert!(est.empirical < 1e-12 && est.report.passed());
        let w = WeightFn::sample(|x| x, -5.0, 5.0, 1e-3).unwrap();
        let sp = Space1D::line(-5.0, 5.0, w).unwrap();
        let (x, r) = (0.5, 1.0);
        let pairs = [(x - 1e-4, x + 1e-4)];
        let est = lipschitz_modulus(&sp, r, &pairs, p(-1.0, 2.0)).unwrap();
        let want = ((-(x - r)).exp() - (-(x + r)).exp()).abs() / r;
        assert!((est.empirical - want).abs() < 1e-4 * want, "{} vs {want}", est.empirical);
        assert!(est.report.passed());
    }

    #[test]
    fn classification() {
        let iv = flat(Topology1D::Interval { length: 1.0 }, None);
        let c = classify(&iv, &[p(0.0, 2.0)]).unwrap();
        let v = c.verdict.unwrap();
        assert_eq!(v.model, Topology1D::Interval { length: 1.0 });
        assert_eq!(v.kn_params, p(0.0, 2.0));
        let circle = flat(Topology1D::Circle { radius: 1.0 }, None);
        let c = classify(&circle, &[p(1.0, 2.0), p(0.1, 8.0)]).unwrap();
        assert!(c.verdict.is_none());
        assert_eq!(c.message, "no admissible (K,N) in search battery");
    }
}
