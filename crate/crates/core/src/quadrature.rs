//! Adaptive Simpson quadrature.

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the local Richardson error estimates.
    pub error_estimate: f64,
    /// True when some panel hit the depth limit before meeting its tolerance.
    pub depth_limited: bool,
}

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Integral {
    if a == b {
        return Integral { value: 0.0, error_estimate: 0.0, depth_limited: false };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let flo = f(lo);
    let fhi = f(hi);
    let mid = 0.5 * (lo + hi);
    let fmid = f(mid);
    let whole = simpson(lo, hi, flo, fmid, fhi);
    let mut acc = Accum::default();
    recurse(&f, lo, hi, flo, fmid, fhi, whole, tol, max_depth, &mut acc);
    Integral { value: sign * acc.value, error_estimate: acc.err, depth_limited: acc.limited }
}

/// Convenience wrapper with the crate defaults (abs tol 1e-10, depth 40).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    adaptive_simpson(f, a, b, DEFAULT_ABS_TOL, DEFAULT_MAX_DEPTH).value
}

#[derive(Default)]
struct Accum {
    value: f64,
    err: f64,
    limited: bool,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Accum,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        acc.value += left + right + delta / 15.0;
        acc.err += delta.abs() / 15.0;
        return;
    }
    if depth == 0 || m <= a || m >= b {
        acc.value += left + right + delta / 15.0;
        acc.err += delta.abs() / 15.0;
        acc.limited = true;
        return;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc);
    recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}
