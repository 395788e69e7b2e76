//! Entropy along Wasserstein geodesics on the unit interval: CD^e(0,2) holds,
//! CD^e(5,2) and CD(3,∞) do not.

use curvlab::coefficients::CurvatureParams;
use curvlab::curvature::{eighths, random_uniform_pairs, verify_cd_infty, verify_cde, DEFAULT_SEED};
use curvlab::space1d::{Space1D, Topology1D};
use curvlab::transport1d::{GeodesicOfMeasures, ProbMeasure1D};

fn main() -> curvlab::Result<()> {
    let space = Space1D::flat(Topology1D::Interval { length: 1.0 }, None)?;
    let t = eighths();
    let pairs = random_uniform_pairs(&space, 50, DEFAULT_SEED)?;
    let flat = verify_cde(&space, CurvatureParams::new(0.0, 2.0)?, &pairs, &t, 5e-4)?;
    println!("CDe(0,2) on 50 pairs: margin {:.3e}, passed {}", flat.max_violation, flat.passed());

    let u = |a, b| ProbMeasure1D::uniform(&space, a, b);
    let stretch = vec![(u(0.0, 0.1)?, u(0.5, 0.9)?)];
    let curved = verify_cde(&space, CurvatureParams::new(5.0, 2.0)?, &stretch, &t, 5e-4)?;
    println!("CDe(5,2) on a stretching pair: margin {:.3e}", curved.max_violation);
    let shift = vec![(u(0.0, 0.1)?, u(0.9, 1.0)?)];
    let infty = verify_cd_infty(&space, 3.0, &shift, &t, 5e-4)?;
    println!("CD(3,inf) on a translation: margin {:.3e}", infty.max_violation);

    let geo = GeodesicOfMeasures::build(&space, &stretch[0].0, &stretch[0].1, &[0.0, 0.25, 0.5, 0.75, 1.0])?;
    let summary = geo.summary(&space)?;
    println!("W2 = {:.6}", summary.w2);
    for ((t, m), e) in summary.t_grid.iter().zip(&summary.means).zip(&summary.entropies) {
        println!("  t = {t:.2}: mean {m:.4}, entropy {e:.4}");
    }
    Ok(())
}
