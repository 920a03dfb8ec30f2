//! Monotone comparative statics with adjustment costs on finite lattices:
//! property checks, static and dynamic solvers, the short-run/long-run
//! comparisons, and seeded random instance suites.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cost;
pub mod dynamic_solver;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod lechatelier;
pub mod models;
pub mod myopic;
pub mod objective;
pub mod properties;
pub mod report;
pub mod static_solver;
pub mod stochastic;

pub use config::{Scenario, ScenarioConfig};
pub use cost::{CostEntry, CostFunction, CostSpec, CostTable, ExtValue, ScalarCost};
pub use dynamic_solver::{
    solve_dynamic, DynamicModel, DynamicScenario, DynamicSolution, Horizon, Path,
};
pub use error::{Error, Result};
pub use lattice::{DiffSet, DiffVector, GridLattice, MemberId, ParamPoset, Point};
pub use lechatelier::LeChatelierResult;
pub use models::BuiltModel;
pub use myopic::SelectionMode;
pub use objective::Objective;
pub use properties::{CheckOptions, CostProfile, Property, PropertyReport, Witness};
pub use report::{TheoremReport, Verdict};
pub use static_solver::{Selection, SolveOptions, StaticProblem, Strictness};
pub use stochastic::{CostLottery, LotteryState, Utility};
