//! Branching geodesics on the tripod break K-convexity of the entropy.
//! Prints the Shannon sweep as CSV and the Rényi ratios against 2^{1/N}.

use curvlab::branching::{
    build_branching_plans, first_failure_eps, renyi_contradiction, sweep, write_sweep_csv, BranchingScenario, Tripod,
};

fn main() -> curvlab::Result<()> {
    let tripod = Tripod::symmetric(1.0)?;
    let base = BranchingScenario::symmetric(0.05);
    let eps = [0.05, 0.02, 0.01, 0.005, 0.002];
    let rows = sweep(&tripod, &base, &eps, 1024)?;
    write_sweep_csv(&rows, std::io::stdout())?;
    match first_failure_eps(&tripod, &base, &eps)? {
        Some(e) => println!("inequality fails for every eps <= {e}"),
        None => println!("inequality holds at the smallest eps"),
    }

    for n in [2.0, 8.0, 64.0] {
        let s = BranchingScenario { n, ..BranchingScenario::symmetric(1e-3) };
        let r = renyi_contradiction(&build_branching_plans(&tripod, &s)?, &tripod, n)?;
        println!("N = {n}: ratio {:.5} vs 2^(1/N) = {:.5}", r.ratio, r.threshold);
    }
    Ok(())
}
