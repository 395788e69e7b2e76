//! Exact one-dimensional optimal transport.
//!
//! Probability measures live on the working cells of a [`Space1D`] with a
//! constant density per cell. Their quantile functions are then piecewise
//! linear and are stored exactly as segments, so `W_2` and the displacement
//! interpolation `Q_t = (1-t) Q_0 + t Q_1` need no resampling. Discrete
//! measures (atoms) are supported at the quantile level through
//! [`QuantileFn::from_atoms`].
//!
//! On the circle the optimal coupling is monotone after a shift of the
//! quantile parameter: `W_2^2 = min_θ ∫_0^1 |Q_0(u) - Q_1(u+θ)|^2 du` with
//! `Q_1(u+1) = Q_1(u) + L`. The shift is found by a coarse scan followed by a
//! golden-section refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space1d::Space1D;

/// Coarse grid size for the circle shift search.
pub const CIRCLE_SHIFT_SAMPLES: usize = 512;

/// Default resolution of [`QuantileFn::on_grid`].
pub const QUANTILE_GRID: usize = 4096;

/// Absolutely continuous probability measure with constant density on each
/// working cell of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMeasure1D {
    lo: f64,
    hi: f64,
    periodic: bool,
    step: f64,
    masses: Vec<f64>,
}

impl ProbMeasure1D {
    fn empty(space: &Space1D) -> Self {
        let (n, step) = space.cells();
        let (lo, hi) = space.domain();
        ProbMeasure1D { lo, hi, periodic: space.is_circle(), step, masses: vec![0.0; n] }
    }

    /// Normalizes the given per-cell masses.
    pub fn from_cell_masses(space: &Space1D, masses: Vec<f64>) -> Result<Self> {
        let mut mu = ProbMeasure1D::empty(space);
        if masses.len() != mu.masses.len() {
            return Err(Error::Domain(format!("expected {} cell masses, got {}", mu.masses.len(), masses.len())));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Domain("cell masses must be finite and >= 0".into()));
        }
        mu.masses = masses;
        mu.normalize()?;
        Ok(mu)
    }

    /// Measure with `H^1`-density proportional to `g` (averaged per cell with
    /// Simpson's rule).
    pub fn from_density_fn(space: &Space1D, g: impl Fn(f64) -> f64) -> Result<Self> {
        let (n, step) = space.cells();
        let (lo, _) = space.domain();
        let masses = (0..n)
            .map(|i| {
                let a = lo + i as f64 * step;
                let b = a + step;
                step / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b))
            })
            .collect();
        ProbMeasure1D::from_cell_masses(space, masses)
    }

    /// Uniform probability on `[a, b]` (an arc on the circle).
    pub fn uniform(space: &Space1D, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::Domain(format!("uniform: need a < b, got [{a}, {b}]")));
        }
        let mut mu = ProbMeasure1D::empty(space);
        mu.check_range(a, b)?;
        mu.deposit(a, b, 1.0);
        mu.normalize()?;
        Ok(mu)
    }

    /// Atoms `(x, w)` each smeared uniformly over a window of the given width.
    pub fn from_atoms(space: &Space1D, atoms: &[(f64, f64)], width: f64) -> Result<Self> {
        if !(width >= 0.0) {
            return Err(Error::Domain("atom width must be >= 0".into()));
        }
        let mut mu = ProbMeasure1D::empty(space);
        for &(x, w) in atoms {
            if !(w >= 0.0) {
                return Err(Error::Domain("atom weights must be >= 0".into()));
            }
            mu.check_range(x - 0.5 * width, x + 0.5 * width)?;
            mu.deposit(x - 0.5 * width, x + 0.5 * width, w);
        }
        mu.normalize()?;
        Ok(mu)
    }

    fn check_range(&self, a: f64, b: f64) -> Result<()> {
        let eps = 1e-12 * (self.hi - self.lo).max(1.0);
        if !self.periodic && (a < self.lo - eps || b > self.hi + eps) {
            return Err(Error::WindowExit { lo: self.lo, hi: self.hi, what: format!("support [{a}, {b}]") });
        }
        Ok(())
    }

    fn normalize(&mut self) -> Result<()> {
        let total: f64 = self.masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Domain("measure has no mass".into()));
        }
        self.masses.iter_mut().for_each(|m| *m /= total);
        Ok(())
    }

    fn cell_index(&self, x: f64) -> usize {
        let n = self.masses.len() as i64;
        let i = ((x - self.lo) / self.step).floor() as i64;
        if self.periodic {
            i.rem_euclid(n) as usize
        } else {
            i.clamp(0, n - 1) as usize
        }
    }

    /// Adds `mass` spread uniformly over `[a, b]`.
    fn deposit(&mut self, a: f64, b: f64, mass: f64) {
        if mass == 0.0 {
            return;
        }
        if b - a <= 1e-15 * self.step {
            let i = self.cell_index(0.5 * (a + b));
            self.masses[i] += mass;
            return;
        }
        let density = mass / (b - a);
        let i0 = ((a - self.lo) / self.step).floor() as i64;
        let i1 = ((b - self.lo) / self.step).floor() as i64;
        let n = self.masses.len() as i64;
        for i in i0..=i1 {
            let ca = self.lo + i as f64 * self.step;
            let overlap = (ca + self.step).min(b) - ca.max(a);
            if overlap <= 0.0 {
                continue;
            }
            let idx = if self.periodic { i.rem_euclid(n) } else { i.clamp(0, n - 1) } as usize;
            self.masses[idx] += density * overlap;
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Density with respect to `H^1`, per cell.
    pub fn densities(&self) -> Vec<f64> {
        self.masses.iter().map(|m| m / self.step).collect()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let a = self.lo + i as f64 * self.step;
        (a, a + self.step)
    }

    /// Mean coordinate (cell coordinates, no wrapping).
    pub fn mean(&self) -> f64 {
        self.masses.iter().enumerate().map(|(i, m)| m * (self.lo + (i as f64 + 0.5) * self.step)).sum()
    }

    /// Smallest and largest coordinates of cells with positive mass.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.masses.iter().position(|&m| m > 0.0)?;
        let last = self.masses.iter().rposition(|&m| m > 0.0)?;
        Some((self.cell_bounds(first).0, self.cell_bounds(last).1))
    }

    /// Total variation distance `½ Σ |m_i - n_i|`.
    pub fn tv_distance(&self, other: &ProbMeasure1D) -> Result<f64> {
        self.same_space(other)?;
        Ok(0.5 * self.masses.iter().zip(&other.masses).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    fn same_space(&self, other: &ProbMeasure1D) -> Result<()> {
        if self.lo != other.lo
            || self.hi != other.hi
            || self.periodic != other.periodic
            || self.masses.len() != other.masses.len()
        {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn belongs_to(&self, space: &Space1D) -> Result<()> {
        let (n, step) = space.cells();
        let (lo, hi) = space.domain();
        if lo != self.lo
            || hi != self.hi
            || n != self.masses.len()
            || step != self.step
            || space.is_circle() != self.periodic
        {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn from_quantile(template: &ProbMeasure1D, q: &QuantileFn) -> Self {
        let mut mu = ProbMeasure1D { masses: vec![0.0; template.masses.len()], ..template.clone() };
        for s in &q.segs {
            mu.deposit(s.x0, s.x1, s.u1 - s.u0);
        }
        mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Segment {
    u0: f64,
    u1: f64,
    x0: f64,
    x1: f64,
}

impl Segment {
    fn at(&self, u: f64) -> f64 {
        if self.u1 == self.u0 {
            return self.x0;
        }
        self.x0 + (self.x1 - self.x0) * (u - self.u0) / (self.u1 - self.u0)
    }
}

/// Monotone quantile function `u ↦ inf{x : F(x) ≥ u}` on `[0, 1]`, stored as
/// contiguous linear segments; jumps sit between segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileFn {
    segs: Vec<Segment>,
}

impl QuantileFn {
    fn from_segments(mut segs: Vec<Segment>) -> Self {
        segs.retain(|s| s.u1 > s.u0);
        if let Some(first) = segs.first_mut() {
            first.u0 = 0.0;
        }
        if let Some(last) = segs.last_mut() {
            last.u1 = 1.0;
        }
        QuantileFn { segs }
    }

    /// Quantile function of a cell measure; exact for its piecewise constant
    /// density.
    pub fn from_measure(mu: &ProbMeasure1D) -> Self {
        let total = mu.total_mass();
        let mut segs = Vec::new();
        let mut acc = 0.0;
        for (i, &m) in mu.masses.iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            let (a, b) = mu.cell_bounds(i);
            let u0 = acc / total;
            acc += m;
            segs.push(Segment { u0, u1: acc / total, x0: a, x1: b });
        }
        QuantileFn::from_segments(segs)
    }

    /// Quantile function of a discrete measure `Σ w_i δ_{x_i}`.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        QuantileFn::from_pieces(&atoms.iter().map(|&(x, w)| (x, x, w)).collect::<Vec<_>>())
    }

    /// Quantile function of `Σ w_i · Unif[a_i, b_i]` for pieces with disjoint
    /// interiors (atoms when `a_i = b_i`).
    pub fn from_pieces(pieces: &[(f64, f64, f64)]) -> Result<Self> {
        let mut sorted: Vec<(f64, f64, f64)> = pieces.iter().copied().filter(|p| p.2 > 0.0).collect();
        if sorted.iter().any(|p| !(p.0.is_finite() && p.1 >= p.0 && p.2.is_finite())) {
            return Err(Error::Domain("pieces need finite a <= b and finite weights".into()));
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let total: f64 = sorted.iter().map(|p| p.2).sum();
        if !(total > 0.0) {
            return Err(Error::Domain("measure has no mass".into()));
        }
        let mut segs = Vec::new();
        let mut acc = 0.0;
        for (a, b, w) in sorted {
            let u0 = acc / total;
            acc += w;
            segs.push(Segment { u0, u1: acc / total, x0: a, x1: b });
        }
        Ok(QuantileFn::from_segments(segs))
    }

    /// Left-continuous evaluation.
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.segs.partition_point(|s| s.u1 < u).min(self.segs.len() - 1);
        self.segs[i].at(u)
    }

    /// Values at the midpoints of `n` equal cells of `[0, 1]`.
    pub fn on_grid(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.eval((i as f64 + 0.5) / n as f64)).collect()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segs.iter().map(|s| s.u0).collect();
        b.push(1.0);
        b
    }

    pub fn mean(&self) -> f64 {
        self.segs.iter().map(|s| 0.5 * (s.x0 + s.x1) * (s.u1 - s.u0)).sum()
    }

    pub fn is_monotone(&self) -> bool {
        self.segs.iter().all(|s| s.x1 >= s.x0)
            && self.segs.windows(2).all(|w| w[1].x0 >= w[0].x1 - 1e-12 * w[0].x1.abs().max(1.0))
    }

    /// Walks both functions over the union of their breakpoints, handing each
    /// common linear piece `(u0, u1, a0, a1, b0, b1)` to `visit`.
    fn merge(&self, other: &QuantileFn, mut visit: impl FnMut(f64, f64, f64, f64, f64, f64)) {
        let (mut i, mut j) = (0, 0);
        let mut u = 0.0;
        while i < self.segs.len() && j < other.segs.len() {
            let (s, o) = (&self.segs[i], &other.segs[j]);
            let end = s.u1.min(o.u1);
            if end > u {
                visit(u, end, s.at(u), s.at(end), o.at(u), o.at(end));
                u = end;
            }
            if s.u1 <= end {
                i += 1;
            }
            if o.u1 <= end {
                j += 1;
            }
        }
    }

    /// `(1-t) self + t other`.
    pub fn interpolate(&self, other: &QuantileFn, t: f64) -> QuantileFn {
        let mut segs = Vec::with_capacity(self.segs.len() + other.segs.len());
        self.merge(other, |u0, u1, a0, a1, b0, b1| {
            segs.push(Segment { u0, u1, x0: (1.0 - t) * a0 + t * b0, x1: (1.0 - t) * a1 + t * b1 });
        });
        QuantileFn::from_segments(segs)
    }

    /// `u ↦ Q(u + θ)` on `[0, 1]` for the periodic lift `Q(u+1) = Q(u) + period`.
    pub fn shifted(&self, theta: f64, period: f64) -> QuantileFn {
        let lo = theta;
        let hi = theta + 1.0;
        let mut segs = Vec::with_capacity(self.segs.len() + 2);
        let k0 = lo.floor() as i64;
        let k1 = hi.floor() as i64;
        for k in k0..=k1 {
            let kf = k as f64;
            for s in &self.segs {
                let (a, b) = (s.u0 + kf, s.u1 + kf);
                let (ca, cb) = (a.max(lo), b.min(hi));
                if cb <= ca {
                    continue;
                }
                let xa = s.at(ca - kf) + kf * period;
                let xb = s.at(cb - kf) + kf * period;
                segs.push(Segment { u0: ca - theta, u1: cb - theta, x0: xa, x1: xb });
            }
        }
        QuantileFn::from_segments(segs)
    }
}

/// `∫_0^1 |Q_0 - Q_1|^2 du`, exact for piecewise linear quantiles.
pub fn w2_squared_quantiles(q0: &QuantileFn, q1: &QuantileFn) -> f64 {
    let mut total = 0.0;
    q0.merge(q1, |u0, u1, a0, a1, b0, b1| {
        let d0 = a0 - b0;
        let d1 = a1 - b1;
        total += (u1 - u0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    });
    total.max(0.0)
}

/// `W_2` between two measures on the line given by their quantile functions.
pub fn w2_line_quantiles(q0: &QuantileFn, q1: &QuantileFn) -> f64 {
    w2_squared_quantiles(q0, q1).sqrt()
}

/// Optimal circle shift `θ*` and the squared cost at it: a scan over
/// `samples` shifts in `[-1, 1]`, then golden-section refinement around the
/// best few local minima of the scan.
pub fn circle_optimal_shift(q0: &QuantileFn, q1: &QuantileFn, circumference: f64, samples: usize) -> (f64, f64) {
    let cost = |theta: f64| w2_squared_quantiles(q0, &q1.shifted(theta, circumference));
    let samples = samples.max(8);
    let h = 2.0 / samples as f64;
    let values: Vec<f64> = (0..=samples).map(|i| cost(-1.0 + i as f64 * h)).collect();
    let mut minima: Vec<usize> = (0..values.len())
        .filter(|&i| {
            let left = if i > 0 { values[i - 1] } else { f64::INFINITY };
            let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
            values[i] <= left && values[i] <= right
        })
        .collect();
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    minima.truncate(8);
    let mut best = (0.0, f64::INFINITY);
    for i in minima {
        let center = -1.0 + i as f64 * h;
        if values[i] < best.1 {
            best = (center, values[i]);
        }
        let refined = golden_section(&cost, (center - h).max(-1.0), (center + h).min(1.0));
        if refined.1 < best.1 {
            best = refined;
        }
    }
    best
}

fn golden_section(cost: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `W_2` between discrete measures on a circle of the given circumference.
pub fn w2_circle_quantiles(q0: &QuantileFn, q1: &QuantileFn, circumference: f64) -> f64 {
    circle_optimal_shift(q0, q1, circumference, CIRCLE_SHIFT_SAMPLES).1.sqrt()
}

/// Quantile function of a measure.
pub fn quantile(mu: &ProbMeasure1D) -> QuantileFn {
    QuantileFn::from_measure(mu)
}

/// Optimal monotone coupling between two measures of one space.
#[derive(Debug, Clone)]
pub struct Coupling {
    q0: QuantileFn,
    /// Target quantile, already shifted on the circle.
    q1: QuantileFn,
    w2: f64,
    template: ProbMeasure1D,
}

impl Coupling {
    pub fn new(space: &Space1D, mu0: &ProbMeasure1D, mu1: &ProbMeasure1D) -> Result<Self> {
        mu0.belongs_to(space)?;
        mu1.belongs_to(space)?;
        let q0 = quantile(mu0);
        let q1 = quantile(mu1);
        let (q1, w2) = if space.is_circle() {
            let l = space.length();
            let (theta, cost) = circle_optimal_shift(&q0, &q1, l, CIRCLE_SHIFT_SAMPLES);
            (q1.shifted(theta, l), cost.sqrt())
        } else {
            let w = w2_line_quantiles(&q0, &q1);
            (q1, w)
        };
        Ok(Coupling { q0, q1, w2, template: mu0.clone() })
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    pub fn quantile_at(&self, t: f64) -> QuantileFn {
        self.q0.interpolate(&self.q1, t)
    }

    /// `μ_t`, binned onto the working cells with exact mass conservation.
    pub fn interpolant(&self, t: f64) -> ProbMeasure1D {
        ProbMeasure1D::from_quantile(&self.template, &self.quantile_at(t))
    }
}

/// `W_2(μ_0, μ_1)`.
pub fn w2(space: &Space1D, mu0: &ProbMeasure1D, mu1: &ProbMeasure1D) -> Result<f64> {
    Ok(Coupling::new(space, mu0, mu1)?.w2())
}

/// The point `μ_t` of the Wasserstein geodesic from `μ_0` to `μ_1`.
pub fn displacement_interpolate(
    space: &Space1D,
    mu0: &ProbMeasure1D,
    mu1: &ProbMeasure1D,
    t: f64,
) -> Result<ProbMeasure1D> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("interpolation time must lie in [0,1], got {t}")));
    }
    Ok(Coupling::new(space, mu0, mu1)?.interpolant(t))
}

/// Relative entropy `∫ ρ log ρ dm` with `ρ = dμ/dm = ρ_{H^1} e^{f}`.
pub fn entropy(mu: &ProbMeasure1D, space: &Space1D) -> Result<f64> {
    mu.belongs_to(space)?;
    let mut total = 0.0;
    for (i, &m) in mu.masses.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let (a, b) = mu.cell_bounds(i);
        let f_avg = space.integrate_f(a, b) / mu.step;
        total += m * ((m / mu.step).ln() + f_avg);
    }
    Ok(total)
}

/// Rényi-type functional `S_N(μ|m) = N + ∫ U_N(ρ) dm`, `U_N(r) = -N r^{1-1/N}`.
pub fn renyi(mu: &ProbMeasure1D, space: &Space1D, n: f64) -> Result<f64> {
    if !(n > 1.0 && n.is_finite()) {
        return Err(Error::Domain(format!("renyi: N must be > 1, got {n}")));
    }
    mu.belongs_to(space)?;
    let expo = 1.0 - 1.0 / n;
    let mut integral = 0.0;
    for (i, &m) in mu.masses.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let (a, b) = mu.cell_bounds(i);
        integral += (m / mu.step).powf(expo) * space.integrate_exp_f(a, b, 1.0 / n);
    }
    Ok(n - n * integral)
}

/// A sampled Wasserstein geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicOfMeasures {
    pub mu0: ProbMeasure1D,
    pub mu1: ProbMeasure1D,
    pub t_grid: Vec<f64>,
    pub interpolants: Vec<ProbMeasure1D>,
    pub w2: f64,
}

/// JSON summary of a geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSummary {
    pub w2: f64,
    pub t_grid: Vec<f64>,
    pub means: Vec<f64>,
    pub entropies: Vec<f64>,
}

impl GeodesicOfMeasures {
    pub fn build(space: &Space1D, mu0: &ProbMeasure1D, mu1: &ProbMeasure1D, t_grid: &[f64]) -> Result<Self> {
        if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Domain(format!("t_grid entry {t} outside [0,1]")));
        }
        let coupling = Coupling::new(space, mu0, mu1)?;
        let interpolants = t_grid.iter().map(|&t| coupling.interpolant(t)).collect();
        Ok(GeodesicOfMeasures {
            mu0: mu0.clone(),
            mu1: mu1.clone(),
            t_grid: t_grid.to_vec(),
            interpolants,
            w2: coupling.w2(),
        })
    }

    pub fn summary(&self, space: &Space1D) -> Result<GeodesicSummary> {
        Ok(GeodesicSummary {
            w2: self.w2,
            t_grid: self.t_grid.clone(),
            means: self.interpolants.iter().map(|m| m.mean()).collect(),
            entropies: self.interpolants.iter().map(|m| entropy(m, space)).collect::<Result<_>>()?,
        })
    }
}
