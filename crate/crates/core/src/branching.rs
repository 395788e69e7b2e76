//! The tripod and the failure of entropy convexity under branching.
//!
//! Edge 0 carries the sources, edges 1 ("up") and 2 ("down") the targets.
//! Every geodesic of the plans has length `η` and starts at distance
//! `s0 ∈ [aη, (a+ε)η]` from the center, so it sits on edge 0 up to time `a`,
//! crosses the center during `[a, a+ε]` and ends on edge 1 (plan `π^u`) or
//! edge 2 (plan `π^d`) at distance `η - s0`. The two plans agree up to time
//! `a` and are mutually singular from time `a+ε` on.
//!
//! Plans are ensembles of `M` contiguous cells of geodesics sharing one node
//! array, so every pushforward is a union of uniform pieces and all
//! integrals below are exact.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{json_schema_error, Error, Result};
use crate::transport1d::{w2_line_quantiles, QuantileFn};

/// Default ensemble size.
pub const ENSEMBLE_CELLS: usize = 4096;

/// Three segments glued at a common endpoint, with constant density per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tripod {
    pub edge_lengths: [f64; 3],
    #[serde(default = "unit_densities")]
    pub densities: [f64; 3],
}

fn unit_densities() -> [f64; 3] {
    [1.0; 3]
}

/// A point `s` units from the center along an edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripodPoint {
    pub edge: usize,
    pub s: f64,
}

impl TripodPoint {
    pub const CENTER: TripodPoint = TripodPoint { edge: 0, s: 0.0 };

    pub fn new(edge: usize, s: f64) -> Self {
        TripodPoint { edge, s }.canonical()
    }

    /// The center is stored on edge 0.
    pub fn canonical(self) -> Self {
        if self.s == 0.0 {
            TripodPoint::CENTER
        } else {
            self
        }
    }
}

impl Tripod {
    pub fn new(edge_lengths: [f64; 3], densities: [f64; 3]) -> Result<Self> {
        let t = Tripod { edge_lengths, densities };
        t.validate()?;
        Ok(t)
    }

    pub fn symmetric(length: f64) -> Result<Self> {
        Tripod::new([length; 3], unit_densities())
    }

    pub fn validate(&self) -> Result<()> {
        if self.edge_lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::Schema(format!("edge_lengths must be > 0, got {:?}", self.edge_lengths)));
        }
        if self.densities.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::Schema(format!("densities must be > 0, got {:?}", self.densities)));
        }
        Ok(())
    }

    pub fn check_point(&self, p: TripodPoint) -> Result<()> {
        if p.edge > 2 || !(p.s >= 0.0 && p.s <= self.edge_lengths[p.edge]) {
            return Err(Error::Domain(format!("point {p:?} is not on the tripod")));
        }
        Ok(())
    }

    /// `m(B_r(p))`.
    pub fn measure_ball(&self, p: TripodPoint, r: f64) -> f64 {
        let p = p.canonical();
        if r <= 0.0 {
            return 0.0;
        }
        let own = p.edge;
        let lo = (p.s - r).max(0.0);
        let hi = (p.s + r).min(self.edge_lengths[own]);
        let mut m = self.densities[own] * (hi - lo);
        let spill = r - p.s;
        if spill > 0.0 {
            for e in (0..3).filter(|&e| e != own) {
                m += self.densities[e] * spill.min(self.edge_lengths[e]);
            }
        }
        m
    }

    pub fn total_mass(&self) -> f64 {
        (0..3).map(|e| self.densities[e] * self.edge_lengths[e]).sum()
    }
}

/// Distance through the center for points on different edges.
pub fn tripod_distance(_t: &Tripod, p: TripodPoint, q: TripodPoint) -> f64 {
    let (p, q) = (p.canonical(), q.canonical());
    if p.edge == q.edge {
        (p.s - q.s).abs()
    } else {
        p.s + q.s
    }
}

/// Parameters of the branching construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchingScenario {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub eta: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(rename = "N", default = "two")]
    pub n: f64,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

impl BranchingScenario {
    /// `a = 0.5, b = 0.05, η = 0.5, β = 1, N = 2` with the given `ε`.
    pub fn symmetric(eps: f64) -> Self {
        BranchingScenario { a: 0.5, b: 0.05, eps, eta: 0.5, beta: 1.0, n: 2.0 }
    }

    pub fn with_eps(self, eps: f64) -> Self {
        BranchingScenario { eps, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self;
        let bad = |m: String| Err(Error::InfeasibleScenario(m));
        if !(s.eps > 0.0) {
            return bad(format!("eps must be > 0, got {}", s.eps));
        }
        if !(0.0 < s.b && s.b < s.a && s.a + s.eps < 1.0) {
            return bad(format!("need 0 < b < a < a+eps < 1, got b={}, a={}, eps={}", s.b, s.a, s.eps));
        }
        if !(s.eta > 0.0 && s.eta.is_finite()) {
            return bad(format!("eta must be > 0, got {}", s.eta));
        }
        if !(s.beta > 0.0 && s.beta <= 1.0) {
            return bad(format!("beta must lie in (0, 1], got {}", s.beta));
        }
        if !(s.n > 1.0 && s.n.is_finite()) {
            return bad(format!("N must be > 1, got {}", s.n));
        }
        Ok(())
    }
}

/// JSON scenario file: a scenario plus the tripod it lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub eta: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(rename = "N", default = "two")]
    pub n: f64,
    pub edge_lengths: [f64; 3],
    #[serde(default = "unit_densities")]
    pub densities: [f64; 3],
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_schema_error)
    }

    pub fn split(&self) -> Result<(Tripod, BranchingScenario)> {
        let tripod = Tripod::new(self.edge_lengths, self.densities)?;
        let s = BranchingScenario { a: self.a, b: self.b, eps: self.eps, eta: self.eta, beta: self.beta, n: self.n };
        s.validate()?;
        Ok((tripod, s))
    }
}

/// Cells of geodesics: cell `j` starts on edge 0 at distances
/// `[nodes[j], nodes[j+1]]` with mass `masses[j]`; a geodesic starting at
/// `s0` ends on `target_edge` at distance `η - s0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFamily {
    pub target_edge: usize,
    pub nodes: Vec<f64>,
    pub masses: Vec<f64>,
}

/// The two branching plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanPair {
    pub scenario: BranchingScenario,
    pub pi_u: PlanFamily,
    pub pi_d: PlanFamily,
    /// Density bound `C` for `(e_b)♯π^d` and `(e_1)♯π^{u,d}`.
    pub density_bound: f64,
}

/// A uniform piece of a pushforward: `mass` spread over `[lo, hi]` on `edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub edge: usize,
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

/// Which pushforward to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    U,
    D,
    Mixed,
}

impl PlanFamily {
    fn pushforward(&self, eta: f64, t: f64) -> Vec<Piece> {
        // signed position along edge 0 (negative) → target edge (positive)
        let pos: Vec<f64> = self.nodes.iter().map(|&s0| t * eta - s0).collect();
        let mut out = Vec::with_capacity(self.masses.len() + 1);
        for (j, &m) in self.masses.iter().enumerate() {
            let (p_lo, p_hi) = (pos[j + 1], pos[j]);
            if p_hi <= 0.0 {
                out.push(Piece { edge: 0, lo: -p_hi, hi: -p_lo, mass: m });
            } else if p_lo >= 0.0 {
                out.push(Piece { edge: self.target_edge, lo: p_lo, hi: p_hi, mass: m });
            } else {
                let frac = p_hi / (p_hi - p_lo);
                out.push(Piece { edge: self.target_edge, lo: 0.0, hi: p_hi, mass: m * frac });
                out.push(Piece { edge: 0, lo: 0.0, hi: -p_lo, mass: m * (1.0 - frac) });
            }
        }
        out
    }
}

/// Builds the plan pair with the default ensemble size.
pub fn build_branching_plans(tripod: &Tripod, scenario: &BranchingScenario) -> Result<PlanPair> {
    build_branching_plans_with(tripod, scenario, ENSEMBLE_CELLS)
}

pub fn build_branching_plans_with(tripod: &Tripod, scenario: &BranchingScenario, cells: usize) -> Result<PlanPair> {
    tripod.validate()?;
    scenario.validate()?;
    let s = scenario;
    if cells == 0 {
        return Err(Error::InfeasibleScenario("ensemble needs at least one cell".into()));
    }
    let src_hi = (s.a + s.eps) * s.eta;
    if src_hi > tripod.edge_lengths[0] {
        return Err(Error::InfeasibleScenario(format!(
            "source window reaches {src_hi} but edge 0 has length {}",
            tripod.edge_lengths[0]
        )));
    }
    let reach = (1.0 - s.a) * s.eta;
    for e in [1, 2] {
        if reach > tripod.edge_lengths[e] {
            return Err(Error::InfeasibleScenario(format!(
                "targets reach {reach} but edge {e} has length {}",
                tripod.edge_lengths[e]
            )));
        }
    }
    let width = s.eps * s.eta;
    let nodes: Vec<f64> = (0..=cells).map(|j| s.a * s.eta + width * j as f64 / cells as f64).collect();
    let masses = vec![s.beta / cells as f64; cells];
    let pi_u = PlanFamily { target_edge: 1, nodes: nodes.clone(), masses: masses.clone() };
    let pi_d = PlanFamily { target_edge: 2, nodes, masses };
    let mut pair = PlanPair { scenario: *s, pi_u, pi_d, density_bound: 0.0 };
    let c = [
        max_density(tripod, &pair.pi_d.pushforward(s.eta, s.b)),
        max_density(tripod, &pair.pi_u.pushforward(s.eta, 1.0)),
        max_density(tripod, &pair.pi_d.pushforward(s.eta, 1.0)),
    ];
    pair.density_bound = c.into_iter().fold(0.0, f64::max);
    Ok(pair)
}

impl PlanPair {
    /// Pushforward at time `t` (unnormalized; mixed is `(u + d)/2`).
    pub fn pieces(&self, t: f64, which: Which) -> Vec<Piece> {
        let eta = self.scenario.eta;
        match which {
            Which::U => self.pi_u.pushforward(eta, t),
            Which::D => self.pi_d.pushforward(eta, t),
            Which::Mixed => {
                let mut v = self.pi_u.pushforward(eta, t);
                v.extend(self.pi_d.pushforward(eta, t));
                v.iter_mut().for_each(|p| p.mass *= 0.5);
                v
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.pi_u.masses.iter().sum()
    }

    /// Prefix certificate: sup over `t ≤ a` (sampled) of the TV gap between the
    /// two pushforwards.
    pub fn prefix_gap(&self, samples: usize) -> f64 {
        let a = self.scenario.a;
        (0..=samples)
            .map(|i| a * i as f64 / samples.max(1) as f64)
            .map(|t| tv_distance(&self.pieces(t, Which::U), &self.pieces(t, Which::D)))
            .fold(0.0, f64::max)
    }
}

/// Piecewise constant `H^1` density of a sum of pieces: `(edge, lo, hi, density)`.
fn superpose(pieces: &[Piece]) -> Vec<(usize, f64, f64, f64)> {
    let mut out = Vec::new();
    for edge in 0..3 {
        let on: Vec<&Piece> = pieces.iter().filter(|p| p.edge == edge && p.hi > p.lo).collect();
        if on.is_empty() {
            continue;
        }
        let mut bp: Vec<f64> = on.iter().flat_map(|p| [p.lo, p.hi]).collect();
        bp.sort_by(f64::total_cmp);
        bp.dedup();
        let mut dens = vec![0.0; bp.len() - 1];
        for p in on {
            let i0 = bp.partition_point(|&x| x < p.lo);
            let i1 = bp.partition_point(|&x| x < p.hi);
            let d = p.mass / (p.hi - p.lo);
            for slot in &mut dens[i0..i1] {
                *slot += d;
            }
        }
        for (i, d) in dens.into_iter().enumerate() {
            if d > 0.0 {
                out.push((edge, bp[i], bp[i + 1], d));
            }
        }
    }
    out
}

fn max_density(tripod: &Tripod, pieces: &[Piece]) -> f64 {
    superpose(pieces).iter().map(|&(e, _, _, d)| d / tripod.densities[e]).fold(0.0, f64::max)
}

/// `½ ∫ |ρ - ρ'| dH^1` for two sums of pieces.
pub fn tv_distance(p: &[Piece], q: &[Piece]) -> f64 {
    let neg: Vec<Piece> = q.iter().map(|x| Piece { mass: -x.mass, ..*x }).collect();
    let mut all = p.to_vec();
    all.extend(neg);
    let mut total = 0.0;
    for edge in 0..3 {
        let on: Vec<&Piece> = all.iter().filter(|x| x.edge == edge && x.hi > x.lo).collect();
        if on.is_empty() {
            continue;
        }
        let mut bp: Vec<f64> = on.iter().flat_map(|x| [x.lo, x.hi]).collect();
        bp.sort_by(f64::total_cmp);
        bp.dedup();
        let mut dens = vec![0.0; bp.len() - 1];
        for x in on {
            let i0 = bp.partition_point(|&v| v < x.lo);
            let i1 = bp.partition_point(|&v| v < x.hi);
            let d = x.mass / (x.hi - x.lo);
            for slot in &mut dens[i0..i1] {
                *slot += d;
            }
        }
        total += dens.iter().enumerate().map(|(i, d)| d.abs() * (bp[i + 1] - bp[i])).sum::<f64>();
    }
    0.5 * total
}

/// `∫ ρ log ρ dm` of the normalized measure.
pub fn entropy_of_pieces(tripod: &Tripod, pieces: &[Piece]) -> f64 {
    let total: f64 = pieces.iter().map(|p| p.mass).sum();
    superpose(pieces)
        .iter()
        .map(|&(e, lo, hi, d)| {
            let rho = d / (total * tripod.densities[e]);
            rho * rho.ln() * tripod.densities[e] * (hi - lo)
        })
        .sum()
}

/// `∫ ρ^{1-1/N} dm` of the unnormalized measure.
pub fn renyi_integral(tripod: &Tripod, pieces: &[Piece], n: f64) -> f64 {
    let expo = 1.0 - 1.0 / n;
    superpose(pieces)
        .iter()
        .map(|&(e, lo, hi, d)| (d / tripod.densities[e]).powf(expo) * tripod.densities[e] * (hi - lo))
        .sum()
}

/// Entropy of the normalized pushforward at time `t`.
pub fn entropy_along(pair: &PlanPair, tripod: &Tripod, t: f64, which: Which) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("time {t} outside [0,1]")));
    }
    Ok(entropy_of_pieces(tripod, &pair.pieces(t, which)))
}

/// Both sides of the Shannon inequality of the appendix and the direct
/// convexity margin along the mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShannonOutcome {
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs ≤ rhs`, the inequality K-convexity would force.
    pub holds: bool,
    pub rhs_negative: bool,
    pub density_bound: f64,
    pub ball_mass: f64,
    /// `Ent(mix_a) - [(ε Ent(mix_b) + (a-b) Ent(mix_{a+ε}))/(a+ε-b) - (K/2) s(1-s) W^2]`
    /// with `s = (a-b)/(a+ε-b)`, at `K = 0`; positive means convexity fails.
    pub convexity_margin: f64,
    pub w2: f64,
}

/// Measure of the ball of radius `η/2` around the center.
pub fn center_ball_mass(tripod: &Tripod, eta: f64) -> f64 {
    tripod.measure_ball(TripodPoint::CENTER, 0.5 * eta)
}

fn folded(pieces: &[Piece]) -> Result<QuantileFn> {
    let signed: Vec<(f64, f64, f64)> =
        pieces.iter().map(|p| if p.edge == 0 { (-p.hi, -p.lo, p.mass) } else { (p.lo, p.hi, p.mass) }).collect();
    QuantileFn::from_pieces(&signed)
}

/// `W_2` between the mixtures at times `b` and `a + ε`, computed on the line
/// obtained by folding edges 1 and 2 together (exact here because the first
/// measure lives on edge 0).
pub fn mixture_w2(pair: &PlanPair) -> Result<f64> {
    let s = pair.scenario;
    let q0 = folded(&pair.pieces(s.b, Which::Mixed))?;
    let q1 = folded(&pair.pieces(s.a + s.eps, Which::Mixed))?;
    Ok(w2_line_quantiles(&q0, &q1))
}

/// Evaluates the appendix inequality with constants measured on the plans.
pub fn appendix_inequality(pair: &PlanPair, tripod: &Tripod, k: f64) -> Result<ShannonOutcome> {
    let s = pair.scenario;
    s.validate()?;
    let (a, b, eps) = (s.a, s.b, s.eps);
    let c = pair.density_bound;
    let ball = center_ball_mass(tripod, s.eta);
    let lhs = eps * ((eps / (10.0 * ball)).ln() - c.ln());
    let rhs = -(1.0 - a - eps) * 2f64.ln() * ((a - b) / (1.0 - b) - a * (a + eps - b) / 3.0);
    let e = |t| entropy_along(pair, tripod, t, Which::Mixed);
    let w2 = mixture_w2(pair)?;
    let span = a + eps - b;
    let sfrac = (a - b) / span;
    let chord = (eps * e(b)? + (a - b) * e(a + eps)?) / span;
    let convexity_margin = e(a)? - (chord - 0.5 * k * sfrac * (1.0 - sfrac) * w2 * w2);
    Ok(ShannonOutcome {
        eps,
        lhs,
        rhs,
        holds: lhs <= rhs,
        rhs_negative: rhs < 0.0,
        density_bound: c,
        ball_mass: ball,
        convexity_margin,
        w2,
    })
}

/// Checks the lower entropy bound `∫ρ^u log ρ^u dm ≥ β log(ε / (10 m(B(x, η/2))))`
/// at time `a + ε`; returns `(lhs, bound)`.
pub fn lower_entropy_bound(pair: &PlanPair, tripod: &Tripod) -> (f64, f64) {
    let s = pair.scenario;
    let pieces = pair.pieces(s.a + s.eps, Which::U);
    let beta = pair.total_mass();
    let lhs = beta * (entropy_of_pieces(tripod, &pieces) + beta.ln());
    let bound = beta * (s.eps / (10.0 * center_ball_mass(tripod, s.eta))).ln();
    (lhs, bound)
}

/// The Rényi version of the contradiction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenyiOutcome {
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: f64,
    /// Right side of the first convexity estimate divided by `∫(ρ^d_a)^{1-1/N} dm`.
    pub ratio: f64,
    /// The same ratio after the second convexity step, `→ 2^{1/N}` as `ε → 0`.
    pub limit_ratio: f64,
    pub threshold: f64,
    pub contradiction: bool,
}

pub const RENYI_TOL: f64 = 5e-3;

/// Measures the Rényi chain along the mixed plan at `K = 0`, `β = 1`.
pub fn renyi_contradiction(pair: &PlanPair, tripod: &Tripod, n: f64) -> Result<RenyiOutcome> {
    let s = pair.scenario;
    s.validate()?;
    if !(n > 1.0 && n.is_finite()) {
        return Err(Error::Domain(format!("N must be > 1, got {n}")));
    }
    let (a, b, eps) = (s.a, s.b, s.eps);
    let span = a + eps - b;
    let int = |t: f64, w: Which| renyi_integral(tripod, &pair.pieces(t, w), n);
    let base = int(a, Which::D);
    let mut sum_ae = pair.pieces(a + eps, Which::U);
    sum_ae.extend(pair.pieces(a + eps, Which::D));
    let first =
        eps / span * int(b, Which::D) + 2f64.powf(1.0 / n - 1.0) * (a - b) / span * renyi_integral(tripod, &sum_ae, n);
    let second = 2f64.powf(1.0 / n - 1.0) * (a - b) / span
        * ((eps / (1.0 - a)) * (int(1.0, Which::D) + int(1.0, Which::U))
            + ((1.0 - a - eps) / (1.0 - a)) * (int(a, Which::D) + int(a, Which::U)));
    let threshold = 2f64.powf(1.0 / n);
    let ratio = first / base;
    Ok(RenyiOutcome {
        eps,
        n,
        ratio,
        limit_ratio: second / base,
        threshold,
        contradiction: ratio >= threshold * (1.0 - RENYI_TOL),
    })
}

/// One row of an ε sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

pub fn sweep(tripod: &Tripod, base: &BranchingScenario, eps_values: &[f64], cells: usize) -> Result<Vec<SweepRow>> {
    eps_values
        .iter()
        .map(|&eps| {
            let s = base.with_eps(eps);
            let pair = build_branching_plans_with(tripod, &s, cells)?;
            let sh = appendix_inequality(&pair, tripod, 0.0)?;
            let re = renyi_contradiction(&pair, tripod, s.n)?;
            Ok(SweepRow { eps, lhs: sh.lhs, rhs: sh.rhs, ratio: re.ratio })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Largest `ε` of a decreasing grid from which the Shannon inequality fails at
/// every smaller grid value; `None` if it never fails at the end of the grid.
pub fn first_failure_eps(tripod: &Tripod, base: &BranchingScenario, eps_desc: &[f64]) -> Result<Option<f64>> {
    let mut found = None;
    for &eps in eps_desc.iter().rev() {
        let pair = build_branching_plans_with(tripod, &base.with_eps(eps), 64)?;
        if appendix_inequality(&pair, tripod, 0.0)?.holds {
            break;
        }
        found = Some(eps);
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> Tripod {
        Tripod::symmetric(1.0).unwrap()
    }

    #[test]
    fn distances() {
        let t = sym();
        assert!((tripod_distance(&t, TripodPoint::new(0, 0.2), TripodPoint::new(0, 0.7)) - 0.5).abs() < 1e-15);
        assert!((tripod_distance(&t, TripodPoint::new(0, 0.3), TripodPoint::new(1, 0.4)) - 0.7).abs() < 1e-15);
        let p = TripodPoint::new(2, 0.3);
        assert_eq!(tripod_distance(&t, p, p), 0.0);
        assert_eq!(TripodPoint::new(2, 0.0), TripodPoint::CENTER);
        assert!((tripod_distance(&t, TripodPoint::new(1, 0.0), TripodPoint::new(2, 0.4)) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn balls() {
        let t = sym();
        assert!((t.measure_ball(TripodPoint::CENTER, 0.25) - 0.75).abs() < 1e-15);
        assert!((t.measure_ball(TripodPoint::new(1, 0.5), 0.25) - 0.5).abs() < 1e-15);
        assert!((t.measure_ball(TripodPoint::new(1, 0.1), 0.25) - (0.35 + 0.3)).abs() < 1e-15);
        assert!((t.measure_ball(TripodPoint::CENTER, 5.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn plans_share_a_prefix_and_separate() {
        let t = sym();
        let pair =
            build_branching_plans(&t, &BranchingScenario { eps: 0.05, b: 0.1, ..BranchingScenario::symmetric(0.05) })
                .unwrap();
        assert_eq!(pair.prefix_gap(50), 0.0);
        let s = pair.scenario;
        let u = pair.pieces(s.a + s.eps, Which::U);
        let d = pair.pieces(s.a + s.eps, Which::D);
        assert!(u.iter().all(|p| p.edge == 1 || p.hi == p.lo) && d.iter().all(|p| p.edge == 2 || p.hi == p.lo));
        assert!((tv_distance(&u, &d) - 1.0).abs() < 1e-12);
        let eu = entropy_along(&pair, &t, 1.0, Which::U).unwrap();
        let ed = entropy_along(&pair, &t, 1.0, Which::D).unwrap();
        assert!((eu - ed).abs() < 1e-12);
        assert!((eu + (s.eps * s.eta).ln()).abs() < 1e-10);
    }

    #[test]
    fn split_identity_and_coincidence() {
        let t = sym();
        let pair = build_branching_plans(&t, &BranchingScenario::symmetric(0.02)).unwrap();
        let s = pair.scenario;
        let at_a = entropy_along(&pair, &t, s.a, Which::Mixed).unwrap();
        assert!((at_a - entropy_along(&pair, &t, s.a, Which::U).unwrap()).abs() < 1e-12);
        for tt in [s.a + s.eps, 0.8, 1.0] {
            let m = entropy_along(&pair, &t, tt, Which::Mixed).unwrap();
            let u = entropy_along(&pair, &t, tt, Which::U).unwrap();
            let d = entropy_along(&pair, &t, tt, Which::D).unwrap();
            assert!((m - (0.5 * u + 0.5 * d - 2f64.ln())).abs() < 1e-10);
        }
    }

    #[test]
    fn infeasible_scenarios() {
        let t = sym();
        assert!(matches!(
            build_branching_plans(&t, &BranchingScenario::symmetric(0.5)),
            Err(Error::InfeasibleScenario(_))
        ));
        let short = Tripod::new([0.1, 1.0, 1.0], [1.0; 3]).unwrap();
        assert!(build_branching_plans(&short, &BranchingScenario::symmetric(0.05)).is_err());
    }

    #[test]
    fn shannon_values() {
        let t = sym();
        let pair = build_branching_plans(&t, &BranchingScenario::symmetric(0.01)).unwrap();
        let out = appendix_inequality(&pair, &t, 0.0).unwrap();
        assert!((pair.density_bound - 200.0).abs() < 1e-6);
        assert!((out.ball_mass - 0.75).abs() < 1e-15);
        let want_lhs = 0.01 * (2.0 * 0.01f64.ln() - 15f64.ln());
        assert!((out.lhs - want_lhs).abs() < 1e-9);
        assert!(out.rhs < -0.01 && !out.holds);
        assert!(out.convexity_margin > 0.0);
        let w = mixture_w2(&pair).unwrap();
        assert!((w - (s_eta_span(&pair))).abs() < 1e-9, "{w}");
    }

    // every geodesic moves by η, so the mixtures at b and a+ε are rigidly
    // translated along the folded line
    fn s_eta_span(pair: &PlanPair) -> f64 {
        let s = pair.scenario;
        (s.a + s.eps - s.b) * s.eta
    }

    #[test]
    fn renyi_ratio_near_limit() {
        let t = sym();
        let pair = build_branching_plans(&t, &BranchingScenario::symmetric(1e-3)).unwrap();
        let r = renyi_contradiction(&pair, &t, 2.0).unwrap();
        let (a, b, e) = (0.5, 0.05, 1e-3);
        let want = e / (e + a - b) + 2f64.sqrt() * (a - b) / (a + e - b);
        assert!((r.ratio - want).abs() < 1e-9);
        assert!(r.contradiction);
    }

    #[test]
    fn scenario_json() {
        let f =
            ScenarioFile::from_json(r#"{"a":0.5,"b":0.05,"eps":0.01,"eta":0.5,"N":2,"edge_lengths":[1,1,1]}"#).unwrap();
        let (tripod, s) = f.split().unwrap();
        assert_eq!(tripod.densities, [1.0; 3]);
        assert_eq!(s.beta, 1.0);
        assert!(
            ScenarioFile::from_json(r#"{"a":0.5,"b":0.05,"eps":0.01,"eta":0.5,"edge_lengths":[1,1,1],"x":1}"#).is_err()
        );
    }

    #[test]
    fn larger_gap_fails_earlier() {
        let tripod = Tripod::symmetric(1.0).unwrap();
        let eps: Vec<f64> = (0..40).map(|i| 0.2 * 0.8f64.powi(i)).collect();
        let mut rows = Vec::new();
        for (a, b) in [(0.5, 0.05), (0.5, 0.2), (0.5, 0.4), (0.3, 0.05), (0.7, 0.05), (0.7, 0.5)] {
            let s = BranchingScenario { a, b, ..BranchingScenario::symmetric(0.01) };
            let rhs =
                appendix_inequality(&build_branching_plans_with(&tripod, &s, 64).unwrap(), &tripod, 0.0).unwrap().rhs;
            rows.push((rhs.abs(), first_failure_eps(&tripod, &s, &eps).unwrap().unwrap()));
        }
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1), "{rows:?}");
    }
}
