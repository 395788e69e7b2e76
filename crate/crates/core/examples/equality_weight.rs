//! The weight -N log cos(x √(K/N)) sits exactly on the (K,N)-convexity
//! boundary. Its worst margin is pure discretization error and shrinks like h².

use std::f64::consts::PI;

use curvlab::coefficients::CurvatureParams;
use curvlab::curvature::{check_kn_convex, default_battery, differential_criterion, DEFAULT_SEED};
use curvlab::space1d::{Space1D, Topology1D, WeightFn};

fn main() -> curvlab::Result<()> {
    let params = CurvatureParams::new(1.0, 2.0)?;
    let half = 0.9 * 0.5 * PI * 2f64.sqrt();
    let mut previous: Option<f64> = None;
    for h in [4e-3, 2e-3, 1e-3, 5e-4] {
        let f = WeightFn::sample(|x| -2.0 * (x / 2f64.sqrt()).cos().ln(), -half, half, h)?;
        let space = Space1D::new(Topology1D::Line, f.clone(), Some((-half, half)), h)?;
        let report = check_kn_convex(&f, &space, params, &default_battery(&space, DEFAULT_SEED), 1e-5)?;
        let shrink = previous.map(|p| format!("{:.2}x", p / report.max_violation)).unwrap_or_default();
        println!("h = {h:.0e}: max margin {:.3e} {shrink}", report.max_violation);
        previous = Some(report.max_violation);
    }

    let f = WeightFn::sample(|x| -2.0 * (x / 2f64.sqrt()).cos().ln(), -half, half, 1e-3)?;
    let diff = differential_criterion(&f, params, 1e-4)?;
    println!("differential criterion: worst K + V'^2/N - V'' = {:.3e}", diff.max_violation);
    let stronger = CurvatureParams::new(1.2, 2.0)?;
    let space = Space1D::line(-half, half, f.clone())?;
    let fail = check_kn_convex(&f, &space, stronger, &default_battery(&space, DEFAULT_SEED), 1e-5)?;
    println!("with K = 1.2 the same weight fails: margin {:.3e} at {:?}", fail.max_violation, fail.witness);
    Ok(())
}
