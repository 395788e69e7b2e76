//! One-dimensional model metric measure spaces `(X, d, e^{-f} H^1)`.
//!
//! The underlying metric space is the line, the half-line `[0, ∞)`, a compact
//! interval `[0, l]`, or a circle of radius `r` with its arc-length metric.
//! Unbounded spaces carry a working window; anything that would leave it is an
//! error rather than an extrapolation.
//!
//! The weight `f` is stored as samples and interpolated piecewise linearly, so
//! the density `e^{-f}` is positive and log-linear between samples. Every mass
//! integral below is evaluated in closed form for that rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{json_schema_error, Error, Result};
use crate::quadrature::adaptive_simpson;

pub const DEFAULT_GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Topology1D {
    Line,
    HalfLine,
    Interval { length: f64 },
    Circle { radius: f64 },
}

impl Topology1D {
    pub fn name(&self) -> &'static str {
        match self {
            Topology1D::Line => "line",
            Topology1D::HalfLine => "halfline",
            Topology1D::Interval { .. } => "interval",
            Topology1D::Circle { .. } => "circle",
        }
    }
}

/// Samples `(x_i, f(x_i))` of a weight, interpolated piecewise linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFn {
    coords: Vec<f64>,
    f: Vec<f64>,
}

impl WeightFn {
    pub fn new(coords: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if coords.len() != f.len() {
            return Err(Error::Schema(format!("weight: {} coords but {} f-values", coords.len(), f.len())));
        }
        if coords.is_empty() {
            return Err(Error::Schema("weight: at least one sample is required".into()));
        }
        if let Some(i) = coords.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Schema(format!("weight: coords not strictly increasing at index {}", i + 1)));
        }
        if let Some(i) = coords.iter().chain(&f).position(|v| !v.is_finite()) {
            return Err(Error::Schema(format!("weight: non-finite value at flat index {i}")));
        }
        Ok(WeightFn { coords, f })
    }

    /// `f ≡ value` on `[lo, hi]`.
    pub fn constant(value: f64, lo: f64, hi: f64) -> Self {
        WeightFn { coords: vec![lo, hi], f: vec![value, value] }
    }

    /// Samples `f` on a uniform grid over `[lo, hi]` with spacing at most `step`.
    pub fn sample<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Result<Self> {
        let n = (((hi - lo) / step).ceil() as usize).max(1);
        let h = (hi - lo) / n as f64;
        let coords: Vec<f64> = (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * h }).collect();
        let values = coords.iter().map(|&x| f(x)).collect();
        WeightFn::new(coords, values)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Interpolated value; constant extension outside the sample range.
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.coords;
        if x <= c[0] {
            return self.f[0];
        }
        let last = c.len() - 1;
        if x >= c[last] {
            return self.f[last];
        }
        let i = c.partition_point(|&v| v <= x) - 1;
        let w = (x - c[i]) / (c[i + 1] - c[i]);
        self.f[i] + w * (self.f[i + 1] - self.f[i])
    }

    /// Index and value of the largest sample.
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (0, self.f[0]);
        for (i, &v) in self.f.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    /// Weight `x ↦ f(x/λ)`, i.e. the weight transported by `x ↦ λx`.
    pub fn dilated(&self, lambda: f64) -> Self {
        WeightFn { coords: self.coords.iter().map(|c| c * lambda).collect(), f: self.f.clone() }
    }
}

/// Exact `∫_a^b e^{-s·g(x)} dx` for `g` linear with `g(a)=ga`, `g(b)=gb`.
pub(crate) fn exp_linear_integral(a: f64, b: f64, ga: f64, gb: f64, s: f64) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    let delta = s * (gb - ga);
    let phi = if delta.abs() < 1e-12 { 1.0 - 0.5 * delta } else { -(-delta).exp_m1() / delta };
    len * (-s * ga).exp() * phi
}

/// A model space together with its working grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Space1D {
    topology: Topology1D,
    weight: WeightFn,
    grid_step: f64,
    lo: f64,
    hi: f64,
    /// Knots covering `[lo, hi]` (wrapped for the circle).
    knots_x: Vec<f64>,
    knots_f: Vec<f64>,
    /// `∫_{knots_x[0]}^{knots_x[i]} e^{-f}`.
    prefix: Vec<f64>,
}

/// Masses at distance exactly `r` from `origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMeasure {
    pub origin: f64,
    pub radius: f64,
    pub atoms: Vec<(f64, f64)>,
}

impl SphereMeasure {
    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// A point of a sphere, flagged when it is an endpoint of the space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub coord: f64,
    pub endpoint: bool,
}

/// `(X, d/r, m^x_r, x)`: distances divided by `scale`, measure divided by
/// `∫_{B_scale(center)} (1 - d(center, ·)/scale) dm`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSpace {
    pub base: Space1D,
    pub center: f64,
    pub scale: f64,
    pub normalization: f64,
}

impl RescaledSpace {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        self.base.distance(x, y) / self.scale
    }

    /// `m^x_r(B^{d_r}_s(center))`.
    pub fn ball_measure(&self, s: f64) -> Result<f64> {
        Ok(self.base.measure_ball(self.center, s * self.scale)? / self.normalization)
    }
}

/// Direction of travel along a circle geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arc {
    /// The shorter arc (either one at antipodes; resolved as `Positive`).
    Shortest,
    Positive,
    Negative,
}

impl Space1D {
    /// Builds a space. `window` is required for the line and the half-line
    /// (for the latter it must start at 0) and ignored otherwise.
    pub fn new(topology: Topology1D, weight: WeightFn, window: Option<(f64, f64)>, grid_step: f64) -> Result<Self> {
        if !(grid_step > 0.0 && grid_step.is_finite()) {
            return Err(Error::Schema(format!("grid_step must be > 0, got {grid_step}")));
        }
        let (lo, hi) = match topology {
            Topology1D::Line => {
                let (a, b) = window.ok_or_else(|| Error::Schema("window: required for topology line".into()))?;
                (a, b)
            }
            Topology1D::HalfLine => {
                let (a, b) = window.ok_or_else(|| Error::Schema("window: required for topology halfline".into()))?;
                if a != 0.0 {
                    return Err(Error::Schema(format!("window: half-line window must start at 0, got {a}")));
                }
                (a, b)
            }
            Topology1D::Interval { length } => {
                if !(length > 0.0 && length.is_finite()) {
                    return Err(Error::Schema(format!("param: interval length must be > 0, got {length}")));
                }
                (0.0, length)
            }
            Topology1D::Circle { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Schema(format!("param: circle radius must be > 0, got {radius}")));
                }
                (0.0, 2.0 * PI * radius)
            }
        };
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Schema(format!("window: need a < b, got [{lo}, {hi}]")));
        }
        let (knots_x, knots_f) = resolve_knots(&topology, &weight, lo, hi)?;
        let mut prefix = Vec::with_capacity(knots_x.len());
        prefix.push(0.0);
        for i in 1..knots_x.len() {
            let seg = exp_linear_integral(knots_x[i - 1], knots_x[i], knots_f[i - 1], knots_f[i], 1.0);
            prefix.push(prefix[i - 1] + seg);
        }
        Ok(Space1D { topology, weight, grid_step, lo, hi, knots_x, knots_f, prefix })
    }

    pub fn line(lo: f64, hi: f64, weight: WeightFn) -> Result<Self> {
        Space1D::new(Topology1D::Line, weight, Some((lo, hi)), DEFAULT_GRID_STEP)
    }

    pub fn half_line(hi: f64, weight: WeightFn) -> Result<Self> {
        Space1D::new(Topology1D::HalfLine, weight, Some((0.0, hi)), DEFAULT_GRID_STEP)
    }

    pub fn interval(length: f64, weight: WeightFn) -> Result<Self> {
        Space1D::new(Topology1D::Interval { length }, weight, None, DEFAULT_GRID_STEP)
    }

    pub fn circle(radius: f64, weight: WeightFn) -> Result<Self> {
        Space1D::new(Topology1D::Circle { radius }, weight, None, DEFAULT_GRID_STEP)
    }

    /// Unweighted (`f ≡ 0`) space of the given topology.
    pub fn flat(topology: Topology1D, window: Option<(f64, f64)>) -> Result<Self> {
        let (lo, hi) = match topology {
            Topology1D::Line | Topology1D::HalfLine => {
                window.ok_or_else(|| Error::Schema("window: required for unbounded topologies".into()))?
            }
            Topology1D::Interval { length } => (0.0, length),
            Topology1D::Circle { radius } => (0.0, 2.0 * PI * radius),
        };
        Space1D::new(topology, WeightFn::constant(0.0, lo, hi), window, DEFAULT_GRID_STEP)
    }

    pub fn with_grid_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Schema(format!("grid_step must be > 0, got {h}")));
        }
        self.grid_step = h;
        Ok(self)
    }

    /// The space with distances multiplied by `lambda` and the same weight.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        let topology = match self.topology {
            Topology1D::Interval { length } => Topology1D::Interval { length: length * lambda },
            Topology1D::Circle { radius } => Topology1D::Circle { radius: radius * lambda },
            t => t,
        };
        let window = match self.topology {
            Topology1D::Line | Topology1D::HalfLine => Some((self.lo * lambda, self.hi * lambda)),
            _ => None,
        };
        Space1D::new(topology, self.weight.dilated(lambda), window, self.grid_step * lambda)
    }

    pub fn topology(&self) -> Topology1D {
        self.topology
    }

    pub fn weight(&self) -> &WeightFn {
        &self.weight
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    /// Coordinates of the working domain: the window, `[0, l]`, or `[0, 2πr)`.
    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.topology, Topology1D::Circle { .. })
    }

    /// Number of working cells and their width (`≤ grid_step`).
    pub fn cells(&self) -> (usize, f64) {
        let n = ((self.length() / self.grid_step).round() as usize).max(1);
        (n, self.length() / n as f64)
    }

    fn eps(&self) -> f64 {
        1e-12 * self.length().max(1.0)
    }

    /// Reduces a circle coordinate into `[0, L)`; identity otherwise.
    pub fn wrap(&self, x: f64) -> f64 {
        if self.is_circle() {
            x.rem_euclid(self.length())
        } else {
            x
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && (self.is_circle() || (x >= self.lo - self.eps() && x <= self.hi + self.eps()))
    }

    fn check_point(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "point {x} outside the domain [{}, {}] of the {}",
                self.lo,
                self.hi,
                self.topology.name()
            )));
        }
        Ok(if self.is_circle() { self.wrap(x) } else { x.clamp(self.lo, self.hi) })
    }

    /// True endpoints of the metric space (not window edges).
    fn true_endpoints(&self) -> Vec<f64> {
        match self.topology {
            Topology1D::Line | Topology1D::Circle { .. } => vec![],
            Topology1D::HalfLine => vec![0.0],
            Topology1D::Interval { length } => vec![0.0, length],
        }
    }

    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let d = (x - y).abs();
        if self.is_circle() {
            let l = self.length();
            let d = d.rem_euclid(l);
            d.min(l - d)
        } else {
            d
        }
    }

    /// The weight `f` at `x`.
    pub fn f(&self, x: f64) -> f64 {
        let x = self.wrap(x);
        let c = &self.knots_x;
        if x <= c[0] {
            return self.knots_f[0];
        }
        let last = c.len() - 1;
        if x >= c[last] {
            return self.knots_f[last];
        }
        let i = c.partition_point(|&v| v <= x) - 1;
        let w = (x - c[i]) / (c[i + 1] - c[i]);
        self.knots_f[i] + w * (self.knots_f[i + 1] - self.knots_f[i])
    }

    /// Density of `m` with respect to `H^1`.
    pub fn density(&self, x: f64) -> f64 {
        (-self.f(x)).exp()
    }

    fn cumulative(&self, x: f64) -> f64 {
        let c = &self.knots_x;
        let x = x.clamp(c[0], c[c.len() - 1]);
        let i = (c.partition_point(|&v| v <= x).max(1) - 1).min(c.len() - 2);
        let fx = self.knots_f[i] + (x - c[i]) / (c[i + 1] - c[i]) * (self.knots_f[i + 1] - self.knots_f[i]);
        self.prefix[i] + exp_linear_integral(c[i], x, self.knots_f[i], fx, 1.0)
    }

    /// `m([a, b])` for `lo ≤ a ≤ b ≤ hi` (no wrapping).
    fn mass_plain(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.cumulative(b) - self.cumulative(a)).max(0.0)
    }

    /// Mass of the coordinate interval `[a, b]`; on the circle `[a, b]` may be
    /// any arc of length at most one turn, given in unwrapped coordinates.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if !self.is_circle() {
            return self.mass_plain(a.max(self.lo), b.min(self.hi));
        }
        let l = self.length();
        if b - a >= l {
            return self.total_mass();
        }
        let a0 = a.rem_euclid(l);
        let b0 = a0 + (b - a);
        if b0 <= l {
            self.mass_plain(a0, b0)
        } else {
            self.mass_plain(a0, l) + self.mass_plain(0.0, b0 - l)
        }
    }

    /// Total mass of the working domain.
    pub fn total_mass(&self) -> f64 {
        self.mass_plain(self.lo, self.hi)
    }

    /// Exact `∫_a^b g(f(x)) dx` helpers over a plain coordinate range.
    pub(crate) fn integrate_f(&self, a: f64, b: f64) -> f64 {
        self.piecewise(a, b, |x0, x1, f0, f1| 0.5 * (x1 - x0) * (f0 + f1))
    }

    /// Exact `∫_a^b e^{-s f(x)} dx` over a plain coordinate range.
    pub(crate) fn integrate_exp_f(&self, a: f64, b: f64, s: f64) -> f64 {
        self.piecewise(a, b, |x0, x1, f0, f1| exp_linear_integral(x0, x1, f0, f1, s))
    }

    fn piecewise(&self, a: f64, b: f64, g: impl Fn(f64, f64, f64, f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let c = &self.knots_x;
        let last_seg = c.len() - 2;
        let mut i = (c.partition_point(|&v| v <= a).max(1) - 1).min(last_seg);
        let mut total = 0.0;
        let mut x = a;
        loop {
            let seg_end = if i == last_seg { b } else { c[i + 1].min(b) };
            if seg_end > x {
                total += g(x, seg_end, self.f_plain(x, i), self.f_plain(seg_end, i));
                x = seg_end;
            }
            if x >= b || i == last_seg {
                break;
            }
            i += 1;
        }
        total
    }

    fn f_plain(&self, x: f64, i: usize) -> f64 {
        let c = &self.knots_x;
        let w = (x - c[i]) / (c[i + 1] - c[i]);
        self.knots_f[i] + w * (self.knots_f[i + 1] - self.knots_f[i])
    }

    /// `m(B_r(x))`.
    pub fn measure_ball(&self, x: f64, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("measure_ball: radius must be >= 0, got {r}")));
        }
        let x = self.check_point(x)?;
        match self.topology {
            Topology1D::Line => {
                self.check_window(x - r, x + r, "ball")?;
                Ok(self.mass_plain(x - r, x + r))
            }
            Topology1D::HalfLine => {
                self.check_window(x, x + r, "ball")?;
                Ok(self.mass_plain((x - r).max(0.0), x + r))
            }
            Topology1D::Interval { length } => Ok(self.mass_plain((x - r).max(0.0), (x + r).min(length))),
            Topology1D::Circle { .. } => {
                if 2.0 * r >= self.length() {
                    Ok(self.total_mass())
                } else {
                    Ok(self.mass(x - r, x + r))
                }
            }
        }
    }

    fn check_window(&self, a: f64, b: f64, what: &str) -> Result<()> {
        let lower_is_window = matches!(self.topology, Topology1D::Line);
        if (lower_is_window && a < self.lo - self.eps()) || b > self.hi + self.eps() {
            return Err(Error::WindowExit { lo: self.lo, hi: self.hi, what: format!("{what} [{a}, {b}]") });
        }
        Ok(())
    }

    /// Points at distance exactly `r` from `x`.
    pub fn sphere_points(&self, x: f64, r: f64) -> Result<Vec<SpherePoint>> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("sphere radius must be >= 0, got {r}")));
        }
        let x = self.check_point(x)?;
        let eps = self.eps();
        if r <= eps {
            let endpoint = self.true_endpoints().iter().any(|e| (e - x).abs() <= eps);
            return Ok(vec![SpherePoint { coord: x, endpoint }]);
        }
        let mut out = Vec::new();
        match self.topology {
            Topology1D::Circle { .. } => {
                let l = self.length();
                if (2.0 * r - l).abs() <= eps {
                    out.push(SpherePoint { coord: self.wrap(x + r), endpoint: false });
                } else if 2.0 * r < l {
                    out.push(SpherePoint { coord: self.wrap(x - r), endpoint: false });
                    out.push(SpherePoint { coord: self.wrap(x + r), endpoint: false });
                }
            }
            _ => {
                let ends = self.true_endpoints();
                for y in [x - r, x + r] {
                    let is_end = ends.iter().any(|e| (e - y).abs() <= eps);
                    let inside = y >= self.lo - eps && y <= self.hi + eps;
                    let beyond_window = match self.topology {
                        Topology1D::Line => !inside,
                        Topology1D::HalfLine => y > self.hi + eps,
                        _ => false,
                    };
                    if beyond_window {
                        return Err(Error::WindowExit { lo: self.lo, hi: self.hi, what: format!("sphere point {y}") });
                    }
                    if inside {
                        let coord =
                            if is_end { ends.iter().copied().find(|e| (e - y).abs() <= eps).unwrap() } else { y };
                        out.push(SpherePoint { coord, endpoint: is_end });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Codimension-one measure `m_{-1}(∂B_t(x0))` of a sphere: interior sphere
    /// points carry `2 e^{-f}`, endpoints of the space `e^{-f}`.
    pub fn boundary_measure(&self, x0: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("boundary_measure: t must be > 0, got {t}")));
        }
        let pts = self.sphere_points(x0, t)?;
        if pts.is_empty() {
            return Err(Error::EmptySphere { center: x0, radius: t });
        }
        Ok(pts.iter().map(|p| if p.endpoint { 1.0 } else { 2.0 } * self.density(p.coord)).sum())
    }

    /// The sphere measure `m_r` of the disintegration `m = ∫ m_r dr` around
    /// `origin`.
    pub fn disintegrate(&self, origin: f64, r: f64) -> Result<SphereMeasure> {
        let pts = self.sphere_points(origin, r)?;
        let atoms = pts.iter().map(|p| (p.coord, self.density(p.coord))).collect();
        Ok(SphereMeasure { origin: self.check_point(origin)?, radius: r, atoms })
    }

    /// Pointed rescaling `(X, d/r, m^x_r, x)`.
    pub fn rescale(&self, x: f64, r: f64) -> Result<RescaledSpace> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("rescale: r must be > 0, got {r}")));
        }
        let x = self.check_point(x)?;
        // ∫_{B_r} (1 - d/r) dm = (1/r) ∫_0^r m(B_s(x)) ds
        let scale = self.measure_ball(x, r)?.max(f64::MIN_POSITIVE);
        let integral = adaptive_simpson(|s| self.measure_ball(x, s).unwrap_or(0.0), 0.0, r, 1e-13 * scale * r, 40);
        let normalization = integral.value / r;
        if !(normalization > 0.0) {
            return Err(Error::Domain(format!("rescale: normalization underflow at x={x}, r={r}")));
        }
        Ok(RescaledSpace { base: self.clone(), center: x, scale: r, normalization })
    }

    /// Signed displacement from `x0` to `x1` along the selected geodesic.
    pub fn displacement(&self, x0: f64, x1: f64, arc: Arc) -> f64 {
        if !self.is_circle() {
            return x1 - x0;
        }
        let l = self.length();
        let fwd = (x1 - x0).rem_euclid(l);
        match arc {
            Arc::Positive => fwd,
            Arc::Negative => fwd - l,
            Arc::Shortest => {
                if fwd <= l - fwd {
                    fwd
                } else {
                    fwd - l
                }
            }
        }
    }

    /// Point at time `t` on the geodesic from `x0` to `x1`.
    pub fn geodesic_point(&self, x0: f64, x1: f64, t: f64, arc: Arc) -> f64 {
        self.wrap(x0 + t * self.displacement(x0, x1, arc))
    }

    pub fn to_descriptor(&self) -> SpaceDescriptor {
        let (topology, param, window) = match self.topology {
            Topology1D::Line => ("line", None, Some([self.lo, self.hi])),
            Topology1D::HalfLine => ("halfline", None, Some([self.lo, self.hi])),
            Topology1D::Interval { length } => ("interval", Some(length), None),
            Topology1D::Circle { radius } => ("circle", Some(radius), None),
        };
        SpaceDescriptor {
            topology: topology.to_string(),
            param,
            window,
            weight: WeightDescriptor { coords: self.weight.coords.clone(), f: self.weight.f.clone() },
            grid_step: Some(self.grid_step),
        }
    }
}

fn resolve_knots(topology: &Topology1D, weight: &WeightFn, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = &weight.coords;
    let f = &weight.f;
    let tol = 1e-9 * (hi - lo).max(1.0);
    match topology {
        Topology1D::Circle { .. } => {
            let l = hi - lo;
            if c[0] < -tol || c[c.len() - 1] > l + tol {
                return Err(Error::Schema(format!("weight: circle samples must lie in [0, {l}]")));
            }
            let mut xs = c.clone();
            let mut fs = f.clone();
            let closes = c.len() >= 2 && c[0].abs() <= tol && (c[c.len() - 1] - l).abs() <= tol;
            if closes {
                if (f[0] - f[f.len() - 1]).abs() > 1e-9 * f[0].abs().max(1.0) {
                    return Err(Error::Schema("weight: circle samples at 0 and 2πr disagree".into()));
                }
                xs[0] = 0.0;
                let last = xs.len() - 1;
                xs[last] = l;
            } else {
                let (first_x, first_f) = (c[0], f[0]);
                let (last_x, last_f) = (c[c.len() - 1], f[f.len() - 1]);
                xs.insert(0, last_x - l);
                fs.insert(0, last_f);
                xs.push(first_x + l);
                fs.push(first_f);
            }
            Ok((xs, fs))
        }
        _ => {
            if c.len() < 2 {
                return Err(Error::Schema("weight: at least two samples are required".into()));
            }
            if c[0] > lo + tol || c[c.len() - 1] < hi - tol {
                return Err(Error::Schema(format!(
                    "weight: samples [{}, {}] do not cover the domain [{lo}, {hi}]",
                    c[0],
                    c[c.len() - 1]
                )));
            }
            Ok((c.clone(), f.clone()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDescriptor {
    pub coords: Vec<f64>,
    pub f: Vec<f64>,
}

/// JSON description of a space:
/// `{"topology", "param", "window", "weight": {"coords", "f"}, "grid_step"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub topology: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    pub weight: WeightDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
}

impl SpaceDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_schema_error)
    }

    pub fn build(&self) -> Result<Space1D> {
        let param =
            |name: &str| self.param.ok_or_else(|| Error::Schema(format!("param: required for topology {name}")));
        let topology = match self.topology.as_str() {
            "line" => Topology1D::Line,
            "halfline" => Topology1D::HalfLine,
            "interval" => Topology1D::Interval { length: param("interval")? },
            "circle" => Topology1D::Circle { radius: param("circle")? },
            other => {
                return Err(Error::Schema(format!(
                    "topology: expected one of line|halfline|interval|circle, got {other:?}"
                )))
            }
        };
        let window = match topology {
            Topology1D::Line | Topology1D::HalfLine => {
                let w = self
                    .window
                    .ok_or_else(|| Error::Schema(format!("window: required for topology {}", self.topology)))?;
                Some((w[0], w[1]))
            }
            _ => None,
        };
        let weight = WeightFn::new(self.weight.coords.clone(), self.weight.f.clone())?;
        Space1D::new(topology, weight, window, self.grid_step.unwrap_or(DEFAULT_GRID_STEP))
    }
}

impl TryFrom<&SpaceDescriptor> for Space1D {
    type Error = Error;
    fn try_from(d: &SpaceDescriptor) -> Result<Self> {
        d.build()
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn flat(t: Topology1D, window: Option<(f64, f64)>) -> Space1D {
        Space1D::flat(t, window).unwrap()
    }

    #[test]
    fn flat_ball_masses() {
        let line = flat(Topology1D::Line, Some((-10.0, 10.0)));
        assert!((line.measure_ball(0.0, 3.0).unwrap() - 6.0).abs() < 1e-14);
        let half = flat(Topology1D::HalfLine, Some((0.0, 10.0)));
        assert!((half.measure_ball(0.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((half.measure_ball(1.0, 2.0).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_interval_ball_matches_closed_form() {
        let space = Space1D::interval(1.0, WeightFn::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap()).unwrap();
        let m = space.measure_ball(0.5, 0.25).unwrap();
        assert!((m - 0.306_434_230_330_390_161_107_123_716_034).abs() < 1e-14);
    }

    #[test]
    fn circle_ball_caps_at_total_mass() {
        let c = flat(Topology1D::Circle { radius: 1.0 }, None);
        let total = 2.0 * PI;
        assert!((c.measure_ball(0.3, 4.0).unwrap() - total).abs() < 1e-12);
        assert!((c.measure_ball(0.3, PI).unwrap() - total).abs() < 1e-12);
        assert!((c.measure_ball(6.0, 1.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn line_window_exit_is_an_error() {
        let line = flat(Topology1D::Line, Some((-1.0, 1.0)));
        assert!(matches!(line.measure_ball(0.5, 1.0), Err(Error::WindowExit { .. })));
        assert!(line.measure_ball(2.0, 0.1).is_err());
    }

    #[test]
    fn sphere_points_per_topology() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        assert_eq!(line.sphere_points(0.0, 2.0).unwrap().len(), 2);
        let half = flat(Topology1D::HalfLine, Some((0.0, 5.0)));
        let pts = half.sphere_points(1.0, 1.0).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].endpoint && pts[0].coord == 0.0);
        let circle = flat(Topology1D::Circle { radius: 1.0 }, None);
        assert_eq!(circle.sphere_points(0.0, PI).unwrap().len(), 1);
        assert!(circle.sphere_points(0.0, 3.5).unwrap().is_empty());
    }

    #[test]
    fn boundary_measure_examples() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        assert_eq!(line.boundary_measure(0.0, 1.0).unwrap(), 4.0);
        let half = flat(Topology1D::HalfLine, Some((0.0, 5.0)));
        assert_eq!(half.boundary_measure(0.0, 1.0).unwrap(), 2.0);
        let circle = flat(Topology1D::Circle { radius: 1.0 }, None);
        assert_eq!(circle.boundary_measure(0.0, PI).unwrap(), 2.0);
        assert!(matches!(circle.boundary_measure(0.0, 3.2), Err(Error::EmptySphere { .. })));
        let interval = flat(Topology1D::Interval { length: 1.0 }, None);
        assert!(interval.boundary_measure(0.2, 0.9).is_err());
        assert_eq!(interval.boundary_measure(0.2, 0.8).unwrap(), 1.0);
        assert!(line.boundary_measure(0.0, 0.0).is_err());
    }

    #[test]
    fn disintegration_examples() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let s = line.disintegrate(0.0, 2.0).unwrap();
        assert_eq!(s.atoms, vec![(-2.0, 1.0), (2.0, 1.0)]);
        let half = flat(Topology1D::HalfLine, Some((0.0, 5.0)));
        assert_eq!(half.disintegrate(0.0, 2.0).unwrap().atoms, vec![(2.0, 1.0)]);
        let weighted = Space1D::interval(1.0, WeightFn::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap()).unwrap();
        let s = weighted.disintegrate(0.0, 0.3).unwrap();
        assert_eq!(s.atoms.len(), 1);
        assert!((s.atoms[0].0 - 0.3).abs() < 1e-15);
        assert!((s.atoms[0].1 - (-0.3f64).exp()).abs() < 1e-15);
        assert!(weighted.disintegrate(0.0, 2.0).unwrap().atoms.is_empty());
    }

    #[test]
    fn rescale_normalization() {
        let line = flat(Topology1D::Line, Some((-5.0, 5.0)));
        let r1 = line.rescale(0.0, 1.0).unwrap();
        assert!((r1.normalization - 1.0).abs() < 1e-12);
        assert!((r1.ball_measure(1.0).unwrap() - 2.0).abs() < 1e-12);
        let r2 = line.rescale(0.0, 2.0).unwrap();
        assert!((r2.normalization - 2.0).abs() < 1e-12);
        assert!((r2.distance(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!(line.rescale(0.0, 0.0).is_err());
    }

    #[test]
    fn circle_weight_wraps_periodically() {
        let w = WeightFn::new(vec![1.0, 3.0], vec![0.0, 2.0]).unwrap();
        let c = Space1D::circle(1.0, w).unwrap();
        let l = 2.0 * PI;
        // between 3 and 1 + 2π the weight goes linearly from 2 back to 0
        let mid = 0.5 * (3.0 + 1.0 + l);
        assert!((c.f(mid) - 1.0).abs() < 1e-12);
        assert!((c.f(mid - l) - 1.0).abs() < 1e-12);
        assert!((c.f(0.0) - c.f(l)).abs() < 1e-12);
    }

    #[test]
    fn descriptor_validation_reports_fields() {
        let json = r#"{"topology":"line","weight":{"coords":[0,1],"f":[0,0]}}"#;
        let err = SpaceDescriptor::from_json(json).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("window"), "{err}");
        let json = r#"{"topology":"torus","param":1,"weight":{"coords":[0,1],"f":[0,0]}}"#;
        let err = SpaceDescriptor::from_json(json).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("topology"), "{err}");
        let json = r#"{"topology":"interval","param":2,"weight":{"coords":[0,1],"f":[0,0]}}"#;
        let err = SpaceDescriptor::from_json(json).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("cover"), "{err}");
        let json = r#"{"topology":"interval","param":1,"weight":{"coords":[0,1],"f":[0,0]},"extra":3}"#;
        assert!(SpaceDescriptor::from_json(json).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let space = Space1D::new(
            Topology1D::HalfLine,
            WeightFn::new(vec![0.0, 2.0, 4.0], vec![0.5, 0.1, 0.3]).unwrap(),
            Some((0.0, 4.0)),
            2e-3,
        )
        .unwrap();
        let json = serde_json::to_string(&space.to_descriptor()).unwrap();
        let back = SpaceDescriptor::from_json(&json).unwrap().build().unwrap();
        assert_eq!(back, space);
    }

    #[test]
    fn geodesic_points_on_circle() {
        let c = flat(Topology1D::Circle { radius: 1.0 }, None);
        let l = 2.0 * PI;
        let p = c.geodesic_point(l - 0.2, 0.2, 0.5, Arc::Shortest);
        assert!(p.abs() < 1e-12 || (p - l).abs() < 1e-12);
        let q = c.geodesic_point(l - 0.2, 0.2, 0.5, Arc::Negative);
        assert!((q - PI).abs() < 1e-12);
    }
}
