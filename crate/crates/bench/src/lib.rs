//! Shared fixtures for the solver benchmarks.

use lechat_core::harness::{generate, Instance};
use lechat_core::{
    CostFunction, CostSpec, DynamicScenario, GridLattice, Objective, ParamPoset, Result,
};

/// A generated instance for a suite id, fixed seed.
pub fn instance(theorem: &str) -> Result<Instance> {
    generate(theorem, 42)
}

/// Stationary dynamic scenario on a `k × k` grid with a supermodular
/// objective and Euclidean adjustment cost.
pub fn grid_scenario(k: usize, delta: f64) -> Result<DynamicScenario> {
    let axis: Vec<f64> = (0..k).map(|i| i as f64).collect();
    let l = GridLattice::product(vec![axis.clone(), axis])?;
    let params = ParamPoset::chain(2)?;
    let objective = Objective::tabulate(l, params, |p, t| {
        let x = p.coords();
        let c = k as f64 / 2.0 + t as f64;
        x[0] * x[1] / k as f64 - (x[0] - c).powi(2) - (x[1] - c).powi(2)
    })?;
    let cost = CostFunction::new(CostSpec::Euclidean { scale: 1.0 })?;
    Ok(DynamicScenario::stationary(objective, 0, 1, cost, delta))
}
