//! x ↦ m(B_r(x))/r is Lipschitz with a constant controlled by the curvature
//! bound. Compares the observed constant with the bound on a few spaces.

use std::f64::consts::TAU;

use curvlab::coefficients::CurvatureParams;
use curvlab::curvature::DEFAULT_SEED;
use curvlab::geometry_scan::{lipschitz_modulus, random_close_pairs};
use curvlab::space1d::{Space1D, WeightFn};

fn main() -> curvlab::Result<()> {
    let cases = [
        (
            "gaussian line",
            Space1D::line(-3.0, 3.0, WeightFn::sample(|x| 0.5 * x * x, -3.0, 3.0, 1e-3)?)?,
            CurvatureParams::new(-1.0, 10.0)?,
        ),
        (
            "exponential interval",
            Space1D::interval(2.0, WeightFn::new(vec![0.0, 2.0], vec![0.0, 2.0])?)?,
            CurvatureParams::new(-1.0, 2.0)?,
        ),
        (
            "wavy circle",
            Space1D::circle(1.0, WeightFn::sample(|x| 0.1 * x.cos(), 0.0, TAU, 1e-3)?)?,
            CurvatureParams::new(-0.2, 2.0)?,
        ),
    ];
    for (name, space, params) in &cases {
        let r = 0.4;
        let pairs = random_close_pairs(space, r, 200, DEFAULT_SEED);
        let est = lipschitz_modulus(space, r, &pairs, *params)?;
        println!(
            "{name:>20}: observed {:.4}, bound {:.4}, worst pair margin {:.3e}",
            est.empirical, est.theoretical, est.report.max_violation
        );
    }
    Ok(())
}
