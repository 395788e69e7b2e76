//! Exact quadratic transport on the line and the circle through quantile
//! functions.

use std::f64::consts::TAU;

use curvlab::space1d::{Space1D, Topology1D};
use curvlab::transport1d::{
    circle_optimal_shift, displacement_interpolate, entropy, quantile, renyi, w2, w2_line_quantiles, ProbMeasure1D,
    QuantileFn, CIRCLE_SHIFT_SAMPLES,
};

fn main() -> curvlab::Result<()> {
    let a = QuantileFn::from_atoms(&[(0.0, 0.5), (1.0, 0.5)])?;
    let b = QuantileFn::from_atoms(&[(0.5, 0.25), (2.0, 0.75)])?;
    println!("atoms on the line: W2 = {:.6}", w2_line_quantiles(&a, &b));

    let line = Space1D::flat(Topology1D::Interval { length: 1.0 }, None)?;
    let mu = ProbMeasure1D::uniform(&line, 0.0, 0.2)?;
    let nu = ProbMeasure1D::from_density_fn(&line, |x| if x > 0.5 { 2.0 * x } else { 0.0 })?;
    println!("uniform to linear density: W2 = {:.6}", w2(&line, &mu, &nu)?);
    for t in [0.0, 0.5, 1.0] {
        let m = displacement_interpolate(&line, &mu, &nu, t)?;
        println!(
            "  t = {t}: mean {:.4}, entropy {:.4}, Renyi(N=2) {:.4}",
            m.mean(),
            entropy(&m, &line)?,
            renyi(&m, &line, 2.0)?
        );
    }

    let circle = Space1D::flat(Topology1D::Circle { radius: 1.0 }, None)?;
    let p = ProbMeasure1D::uniform(&circle, 0.2, 0.8)?;
    let q = ProbMeasure1D::uniform(&circle, 5.8, 6.2)?;
    let (_, cost) = circle_optimal_shift(&quantile(&p), &quantile(&q), TAU, CIRCLE_SHIFT_SAMPLES);
    println!("circle: W2 = {:.6}, the short way round through 0", cost.sqrt());
    println!("same pair on the interval [0, 2π]: W2 = {:.6}", {
        let flat = Space1D::flat(Topology1D::Interval { length: TAU }, None)?;
        w2(&flat, &ProbMeasure1D::uniform(&flat, 0.2, 0.8)?, &ProbMeasure1D::uniform(&flat, 5.8, 6.2)?)?
    });
    Ok(())
}
