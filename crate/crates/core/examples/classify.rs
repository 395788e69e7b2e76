//! Reads off the model space of a few weighted spaces and tries each
//! candidate (K,N). The verdict is the smallest admissible K; the full list
//! shows how far up the bound goes.

use std::f64::consts::TAU;

use curvlab::coefficients::CurvatureParams;
use curvlab::geometry_scan::{classify, CLASSIFY_TOL};
use curvlab::space1d::{Space1D, WeightFn};

fn main() -> curvlab::Result<()> {
    let search: Vec<CurvatureParams> = [(-1.0, 2.0), (0.0, 2.0), (0.5, 2.0), (1.0, 2.0)]
        .into_iter()
        .map(|(k, n)| CurvatureParams::new(k, n))
        .collect::<curvlab::Result<_>>()?;
    let spaces = [
        ("flat interval", Space1D::interval(1.0, WeightFn::constant(0.0, 0.0, 1.0))?),
        ("exponential half-line", Space1D::half_line(3.0, WeightFn::new(vec![0.0, 3.0], vec![0.0, 3.0])?)?),
        ("convex line", Space1D::line(-1.0, 1.0, WeightFn::sample(|x| x * x, -1.0, 1.0, 1e-3)?)?),
        ("wavy circle", Space1D::circle(1.0, WeightFn::sample(|x| 0.2 * x.cos(), 0.0, TAU, 1e-3)?)?),
    ];
    for (name, space) in &spaces {
        let c = classify(space, &search)?;
        println!("{name:>22}: {}", c.message);
        for (params, margin) in &c.tried {
            let verdict = if *margin <= CLASSIFY_TOL { "ok" } else { "fails" };
            println!("{:>24}{params}: margin {margin:+.3e} {verdict}", "");
        }
    }
    Ok(())
}
