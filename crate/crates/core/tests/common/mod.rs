//! Oracles shared by the integration tests.

#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Exact discrete optimal transport cost `min Σ π_ij c(x_i, y_j)` by linear
/// programming. One marginal constraint is dropped since it is implied by the rest.
pub fn lp_transport_cost(a: &[(f64, f64)], b: &[(f64, f64)], cost: impl Fn(f64, f64) -> f64) -> f64 {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = a
        .iter()
        .map(|&(x, _)| b.iter().map(|&(y, _)| problem.add_var(cost(x, y), (0.0, f64::INFINITY))).collect())
        .collect();
    for (i, &(_, w)) in a.iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        problem.add_constraint(&row, ComparisonOp::Eq, w);
    }
    for (j, &(_, w)) in b.iter().enumerate().skip(1) {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        problem.add_constraint(&col, ComparisonOp::Eq, w);
    }
    problem.solve().expect("transport LP is feasible").objective()
}

pub fn line_cost(x: f64, y: f64) -> f64 {
    (x - y) * (x - y)
}

pub fn circle_cost(circumference: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, y| {
        let d = (x - y).rem_euclid(circumference);
        let d = d.min(circumference - d);
        d * d
    }
}

/// Random probability atoms: `count` positions in `[lo, hi)` with weights
/// bounded away from zero.
pub fn random_atoms(rng: &mut impl rand::Rng, count: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let raw: Vec<(f64, f64)> = (0..count).map(|_| (rng.gen_range(lo..hi), rng.gen_range(0.05..1.0))).collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    raw.into_iter().map(|(x, w)| (x, w / total)).collect()
}
