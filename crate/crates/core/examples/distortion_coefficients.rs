//! Tabulates σ^{(t)}_{K,N}(θ), the model density S_{K,N} and its integral F.

use curvlab::coefficients::{f_vol, s_vol, sigma, CurvatureParams};

fn main() -> curvlab::Result<()> {
    println!("{:>6} {:>4} {:>6} {:>12} {:>12} {:>12}", "K", "N", "theta", "sigma(1/2)", "S(theta)", "F(theta)");
    for k in [-1.0, 0.0, 1.0] {
        for n in [2.0, 3.0] {
            let params = CurvatureParams::new(k, n)?;
            for theta in [0.5, 1.0, 2.0] {
                let s = sigma(0.5, params, theta)?;
                println!(
                    "{k:>6} {n:>4} {theta:>6} {:>12.8} {:>12.8} {:>12.8}",
                    s.to_f64(),
                    s_vol(params, theta)?,
                    f_vol(params, theta)?
                );
            }
        }
    }
    // past π√(N/K) the coefficient is infinite
    let p = CurvatureParams::new(1.0, 2.0)?;
    println!("sigma(1/2) at theta = 5 for K=1, N=2: {:?}", sigma(0.5, p, 5.0)?);
    Ok(())
}
