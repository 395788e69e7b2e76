//! No weight on a circle is (K,N)-convex for K > 0: a symmetric triple around
//! the maximum of the weight always violates the inequality.

use std::f64::consts::TAU;

use curvlab::coefficients::CurvatureParams;
use curvlab::curvature::{circle_obstruction, Witness};
use curvlab::space1d::{Space1D, WeightFn};

type Shape = fn(f64) -> f64;

fn main() -> curvlab::Result<()> {
    let weights: [(&str, Shape); 3] =
        [("constant", |_| 0.0), ("cos x", f64::cos), ("bumpy", |x| 0.3 * (3.0 * x).sin() + 0.1 * x.cos())];
    for (name, g) in weights {
        let space = Space1D::circle(1.0, WeightFn::sample(g, 0.0, TAU, 1e-3)?)?;
        for k in [0.25, 1.0, 4.0] {
            let r = circle_obstruction(&space, CurvatureParams::new(k, 2.0)?)?;
            if let Some(Witness::Obstruction { x_bar, d, factor, analytic_factor, .. }) = r.witness {
                println!(
                    "{name:>8} K={k:<4} margin {:.3e} around {x_bar:.3} at d={d:.4}; factor {factor:.6} (flat model {analytic_factor:.6})",
                    r.max_violation
                );
            }
        }
    }
    Ok(())
}
