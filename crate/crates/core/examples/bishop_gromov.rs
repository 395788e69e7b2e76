//! Volume comparison on the model spaces: the ratio m(B_r)/F(r), the
//! boundary measure bound and the linear growth of small balls.

use curvlab::coefficients::CurvatureParams;
use curvlab::geometry_scan::{bg_boundary_sides, bg_ratio_scan, linear_growth_constant};
use curvlab::space1d::{Space1D, Topology1D, WeightFn};

fn main() -> curvlab::Result<()> {
    let spaces = [
        ("line", Space1D::flat(Topology1D::Line, Some((-5.0, 5.0)))?, 0.0),
        ("half-line", Space1D::flat(Topology1D::HalfLine, Some((0.0, 5.0)))?, 0.5),
        ("interval", Space1D::flat(Topology1D::Interval { length: 3.0 }, None)?, 1.0),
        ("circle", Space1D::flat(Topology1D::Circle { radius: 1.0 }, None)?, 0.0),
    ];
    let radii: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
    for (name, space, x0) in &spaces {
        for (k, n) in [(0.0, 2.0), (-1.0, 3.0), (1.0, 2.0)] {
            let params = CurvatureParams::new(k, n)?;
            let scan = bg_ratio_scan(space, *x0, params, &radii, 1e-6)?;
            let (lhs, rhs) = bg_boundary_sides(space, *x0, params, 1.0)?;
            println!(
                "{name:>9} K={k:<3} N={n}: ratio worst increase {:+.3e}; boundary at t=1: {lhs:.3} <= {rhs:.3}",
                scan.max_violation
            );
        }
    }

    let weighted = Space1D::line(-3.0, 3.0, WeightFn::sample(|x| 0.5 * x * x, -3.0, 3.0, 1e-3)?)?;
    let growth =
        linear_growth_constant(&weighted, 0.0, 1.0, &[0.05, 0.1, 0.5, 1.0], CurvatureParams::new(-1.0, 10.0)?)?;
    println!("gaussian line: sup m(B_s(x))/s = {:.4} within envelope {:.4}", growth.empirical, growth.envelope);

    let tangent = weighted.rescale(0.0, 0.01)?;
    println!("rescaled at 0 with r = 0.01: unit ball has measure {:.6}", tangent.ball_measure(1.0)?);
    Ok(())
}
