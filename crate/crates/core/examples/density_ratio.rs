//! Traces of m(B_r(x))/r^k as r ↓ 0 on a weighted line and at the center of
//! the tripod, written as CSV.

use curvlab::branching::{Tripod, TripodPoint};
use curvlab::geometry_scan::{density_ratio_trace, density_ratio_trace_tripod};
use curvlab::space1d::{Space1D, WeightFn};

fn main() -> curvlab::Result<()> {
    let radii: Vec<f64> = (0..12).map(|i| 0.5 * 0.6f64.powi(i)).collect();
    let line = Space1D::line(-2.0, 2.0, WeightFn::sample(|x| x * x, -2.0, 2.0, 1e-4)?)?.with_grid_step(1e-4)?;
    for k in [1, 2] {
        let trace = density_ratio_trace(&line, 0.3, k, &radii)?;
        println!("line, k = {k}: last ratio {:.4}, in M_k: {}", trace.ratios.last().unwrap(), trace.in_mk);
    }
    let tripod = Tripod::symmetric(1.0)?;
    for k in [1, 2] {
        let trace = density_ratio_trace_tripod(&tripod, TripodPoint::CENTER, k, &radii)?;
        println!("tripod center, k = {k}: last ratio {:.4}, in M_k: {}", trace.ratios.last().unwrap(), trace.in_mk);
        if k == 2 {
            trace.write_csv(std::io::stdout())?;
        }
    }
    Ok(())
}
