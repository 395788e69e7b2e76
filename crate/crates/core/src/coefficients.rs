//! Model coefficients of curvature-dimension comparison.
//!
//! * [`sigma`] — the distortion coefficient `σ^{(t)}_{K,N}(θ)`, with branches
//!   `+∞` (for `Kθ² ≥ Nπ²`), a sine ratio, `t` and a hyperbolic sine ratio.
//! * [`s_vol`] — the model volume density `S_{K,N}(t)`.
//! * [`f_vol`] — `F(r) = ∫_0^r S_{K,N}(s)^{N-1} ds`, the model ball volume.
//!
//! All functions are pure and thread-safe.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_ABS_TOL, DEFAULT_MAX_DEPTH};

/// Below this value of `|K| θ² / N` the sine ratios are replaced by their
/// Taylor expansion.
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// Curvature bound `K` (1/length²) and dimension bound `N > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CurvatureParams {
    k: f64,
    n: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "N")]
    n: f64,
}

impl TryFrom<RawParams> for CurvatureParams {
    type Error = crate::Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        CurvatureParams::new(raw.k, raw.n)
    }
}

impl From<CurvatureParams> for RawParams {
    fn from(p: CurvatureParams) -> Self {
        RawParams { k: p.k, n: p.n }
    }
}

impl CurvatureParams {
    pub fn new(k: f64, n: f64) -> Result<Self> {
        if !k.is_finite() {
            return domain(format!("K must be finite, got {k}"));
        }
        if !(n.is_finite() && n > 1.0) {
            return domain(format!("N must be a finite number > 1, got {n}"));
        }
        Ok(CurvatureParams { k, n })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// Same `N`, curvature replaced.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        CurvatureParams::new(k, self.n)
    }

    /// Radius of the first zero of `S_{K,N}` for `K > 0`, infinity otherwise.
    pub fn conjugate_radius(&self) -> f64 {
        if self.k > 0.0 {
            PI * ((self.n - 1.0) / self.k).sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Largest `θ` for which `σ` stays finite (`Kθ² < Nπ²`).
    pub fn sigma_horizon(&self) -> f64 {
        if self.k > 0.0 {
            PI * (self.n / self.k).sqrt()
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for CurvatureParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(K={}, N={})", self.k, self.n)
    }
}

/// A real number or `+∞`. Never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinity => None,
        }
    }

    /// `f64::INFINITY` for the infinite value.
    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

/// Distortion coefficient `σ^{(t)}_{K,N}(θ)`.
pub fn sigma(t: f64, params: CurvatureParams, theta: f64) -> Result<ExtReal> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("sigma: t must lie in [0,1], got {t}"));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return domain(format!("sigma: theta must be finite and >= 0, got {theta}"));
    }
    let (k, n) = (params.k, params.n);
    let k_theta2 = k * theta * theta;
    if k_theta2 >= n * PI * PI {
        return Ok(ExtReal::Infinity);
    }
    let x = k_theta2 / n;
    if x.abs() < SERIES_THRESHOLD {
        // sin(t a)/sin(a) and sinh(t b)/sinh(b) share this expansion in x = ±a².
        let t2 = t * t;
        let num = 1.0 - t2 * x / 6.0 + t2 * t2 * x * x / 120.0;
        let den = 1.0 - x / 6.0 + x * x / 120.0;
        return Ok(ExtReal::Finite(t * num / den));
    }
    let value = if x > 0.0 {
        let a = x.sqrt();
        (t * a).sin() / a.sin()
    } else {
        let b = (-x).sqrt();
        (t * b).sinh() / b.sinh()
    };
    Ok(ExtReal::Finite(value))
}

/// Model volume density `S_{K,N}(t)`.
pub fn s_vol(params: CurvatureParams, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("s_vol: t must be finite and >= 0, got {t}"));
    }
    let (k, n) = (params.k, params.n);
    Ok(if k > 0.0 {
        let c = (k / (n - 1.0)).sqrt();
        (t * c).sin() / c
    } else if k == 0.0 {
        t
    } else {
        let c = (-k / (n - 1.0)).sqrt();
        (t * c).sinh() / c
    })
}

/// `F'(r) = S_{K,N}(r)^{N-1}`.
pub fn f_vol_derivative(params: CurvatureParams, r: f64) -> Result<f64> {
    check_f_domain(params, r)?;
    Ok(s_vol(params, r)?.max(0.0).powf(params.n - 1.0))
}

/// `F(r) = ∫_0^r S_{K,N}(s)^{N-1} ds` by adaptive Simpson quadrature.
pub fn f_vol(params: CurvatureParams, r: f64) -> Result<f64> {
    check_f_domain(params, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let n1 = params.n - 1.0;
    let integrand = |s: f64| {
        let sv = s_vol(params, s).unwrap_or(0.0);
        sv.max(0.0).powf(n1)
    };
    // Scale the tolerance with the expected size r^N/N so small radii keep
    // relative accuracy; never looser than the absolute default.
    let scale = r.powf(params.n) / params.n;
    let tol = DEFAULT_ABS_TOL.min(1e-13 * scale.max(f64::MIN_POSITIVE));
    Ok(adaptive_simpson(integrand, 0.0, r, tol, DEFAULT_MAX_DEPTH).value)
}

fn check_f_domain(params: CurvatureParams, r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return domain(format!("f_vol: r must be finite and >= 0, got {r}"));
    }
    let limit = params.conjugate_radius();
    if r > limit * (1.0 + 1e-12) {
        return domain(format!("f_vol: r = {r} exceeds the conjugate radius {limit} for {params}"));
    }
    Ok(())
}
