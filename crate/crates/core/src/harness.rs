//! Seeded random instance generators, theorem suites and the registered
//! counterexample fixtures.
//!
//! Every generated number is a small dyadic rational (axis values are
//! multiples of 1/2, everything else a multiple of 1/8), so sums and
//! products of objective and cost values are exact in `f64` and the exact
//! property checks and tie-breaks see the true values.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::cost::{CostEntry, CostFunction, CostSpec, CostTable, ExtValue, ScalarCost};
use crate::dynamic_solver::{theorem3_check, theorem4_check, DynamicScenario};
use crate::error::{Error, Result};
use crate::lattice::{GridLattice, ParamPoset, Point};
use crate::lechatelier::{prop3_forall_check, theorem2_check};
use crate::models::BeliefSet;
use crate::myopic::{theorem5_check, theorem6_check, SelectionMode};
use crate::objective::Objective;
use crate::properties::{
    check_additively_separable, check_minimally_monotone, check_monotone, check_separable_convex,
    check_strictly_minimally_monotone, check_strictly_monotone, CheckOptions, Property,
    PropertyReport,
};
use crate::report::{TheoremReport, Verdict};
use crate::static_solver::{
    prop1_forall_check, rejected_or, theorem1_check, SolveOptions, StaticProblem, Strictness,
};
use crate::stochastic::{
    theorem1_prime_check, theorem2_prime_check, theorem3_prime_check, CostLottery, LotteryState,
    Utility,
};

/// Discount factor and report horizon for every dynamic suite.
pub const SUITE_DELTA: f64 = 0.9;
pub const SUITE_HORIZON: usize = 40;

/// Resampling budget per instance before the generator gives up.
const ATTEMPTS: usize = 200;

/// Failures kept in a suite report.
const MAX_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveFamily {
    /// Separable terms plus nonnegative pairwise interactions plus a
    /// parameter-dependent linear term.
    SupermodularLinear,
    /// One-dimensional pricing profit `(p − c_θ)(a − b p)`.
    Pricing,
    /// A strictly increasing transform of a supermodular table that is no
    /// longer supermodular.
    QuasiSupermodular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFamily {
    SingleDipped,
    StrictSingleDipped,
    ConvexSingleDipped,
    ConcaveSingleDipped,
    Quadratic,
    Euclidean,
    CobbDouglas,
    Fixed,
    FreeDisposal,
    Lumpy,
    BoxConstraint,
    Zero,
    Prohibitive,
    GapTable,
}

use CostFamily as CF;

impl CostFamily {
    /// Families only generated on one-dimensional lattices.
    fn one_dimensional(self) -> bool {
        matches!(self, CF::GapTable)
    }

    /// Properties the generator promises; rechecked on every instance.
    pub fn declared(self, dims: usize) -> Vec<Property> {
        let mut v = vec![Property::MinimallyMonotone];
        if !matches!(self, CF::Lumpy | CF::GapTable) {
            v.push(Property::Monotone);
        }
        if matches!(self, CF::StrictSingleDipped | CF::Quadratic | CF::Euclidean) {
            v.push(Property::StrictlyMonotone);
            v.push(Property::StrictlyMinimallyMonotone);
        }
        let separable = match self {
            CF::Euclidean | CF::CobbDouglas | CF::Fixed => dims == 1,
            _ => true,
        };
        if separable {
            v.push(Property::AdditivelySeparable);
        }
        if matches!(
            self,
            CF::ConvexSingleDipped | CF::Quadratic | CF::FreeDisposal | CF::Zero
        ) {
            v.push(Property::SeparableConvex);
        }
        v
    }
}

/// A generated cost with its family and declared properties.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub family: CostFamily,
    pub declared: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathShape {
    Stationary,
    /// Prefix values anywhere in `[θ̲, θ̄]`.
    Caged,
    /// Nondecreasing prefix from `θ̲` up to `θ̄`.
    Increasing,
}

#[derive(Debug, Clone)]
struct Profile {
    objectives: &'static [ObjectiveFamily],
    costs: &'static [CostFamily],
    strict_scd: bool,
    sets: bool,
    lottery: bool,
    path: Option<PathShape>,
}

const ALL_OBJECTIVES: &[ObjectiveFamily] = &[
    ObjectiveFamily::SupermodularLinear,
    ObjectiveFamily::Pricing,
    ObjectiveFamily::QuasiSupermodular,
];
const SM_OBJECTIVES: &[ObjectiveFamily] = &[
    ObjectiveFamily::SupermodularLinear,
    ObjectiveFamily::Pricing,
];

const MIN_MONOTONE: &[CostFamily] = &[
    CF::SingleDipped,
    CF::StrictSingleDipped,
    CF::ConvexSingleDipped,
    CF::ConcaveSingleDipped,
    CF::Quadratic,
    CF::Euclidean,
    CF::CobbDouglas,
    CF::Fixed,
    CF::FreeDisposal,
    CF::Lumpy,
    CF::BoxConstraint,
    CF::Zero,
    CF::Prohibitive,
    CF::GapTable,
];
const MONOTONE: &[CostFamily] = &[
    CF::SingleDipped,
    CF::StrictSingleDipped,
    CF::ConvexSingleDipped,
    CF::ConcaveSingleDipped,
    CF::Quadratic,
    CF::Euclidean,
    CF::CobbDouglas,
    CF::Fixed,
    CF::FreeDisposal,
    CF::BoxConstraint,
    CF::Zero,
    CF::Prohibitive,
];
const STRICT: &[CostFamily] = &[CF::StrictSingleDipped, CF::Quadratic, CF::Euclidean];
const SEPARABLE_MONOTONE: &[CostFamily] = &[
    CF::SingleDipped,
    CF::StrictSingleDipped,
    CF::ConvexSingleDipped,
    CF::ConcaveSingleDipped,
    CF::Quadratic,
    CF::FreeDisposal,
    CF::BoxConstraint,
    CF::Zero,
    CF::Prohibitive,
];
const CONVEX: &[CostFamily] = &[
    CF::ConvexSingleDipped,
    CF::Quadratic,
    CF::FreeDisposal,
    CF::Zero,
];
const NOT_MONOTONE: &[CostFamily] = &[CF::Lumpy, CF::GapTable];
const NOT_CONVEX: &[CostFamily] = &[CF::ConcaveSingleDipped, CF::Fixed];

/// Suites whose conclusions are asserted.
pub const THEOREMS: &[&str] = &[
    "thm1", "thm1star", "prop1a", "prop1b", "thm2", "prop3", "thm3", "thm4", "thm5", "thm6",
    "thm1p", "thm2p", "thm3p",
];

/// Suites with a weakened hypothesis, run for the record.
pub const EXPLORATORY: &[&str] = &["thm2_minimal", "thm6_nonconvex"];

fn profile(theorem: &str) -> Result<Profile> {
    let p = |objectives, costs| Profile {
        objectives,
        costs,
        strict_scd: false,
        sets: false,
        lottery: false,
        path: None,
    };
    Ok(match theorem {
        "thm1" => p(ALL_OBJECTIVES, MIN_MONOTONE),
        "thm1star" => Profile {
            sets: true,
            ..p(ALL_OBJECTIVES, MIN_MONOTONE)
        },
        "prop1a" => Profile {
            strict_scd: true,
            ..p(ALL_OBJECTIVES, MIN_MONOTONE)
        },
        "prop1b" => p(ALL_OBJECTIVES, STRICT),
        "thm2" => p(ALL_OBJECTIVES, MONOTONE),
        "prop3" => p(ALL_OBJECTIVES, STRICT),
        "thm3" => Profile {
            path: Some(PathShape::Caged),
            ..p(ALL_OBJECTIVES, MONOTONE)
        },
        "thm4" => Profile {
            path: Some(PathShape::Stationary),
            ..p(SM_OBJECTIVES, SEPARABLE_MONOTONE)
        },
        "thm5" => Profile {
            path: Some(PathShape::Increasing),
            ..p(ALL_OBJECTIVES, MONOTONE)
        },
        "thm6" => Profile {
            path: Some(PathShape::Increasing),
            ..p(SM_OBJECTIVES, CONVEX)
        },
        "thm1p" => Profile {
            lottery: true,
            ..p(ALL_OBJECTIVES, MIN_MONOTONE)
        },
        "thm2p" => Profile {
            lottery: true,
            ..p(ALL_OBJECTIVES, MONOTONE)
        },
        "thm3p" => Profile {
            lottery: true,
            path: Some(PathShape::Caged),
            ..p(ALL_OBJECTIVES, MONOTONE)
        },
        "thm2_minimal" => p(ALL_OBJECTIVES, NOT_MONOTONE),
        "thm6_nonconvex" => Profile {
            path: Some(PathShape::Increasing),
            ..p(SM_OBJECTIVES, NOT_CONVEX)
        },
        other => {
            return Err(Error::InvalidScenario(format!(
                "unknown theorem suite {other:?}"
            )))
        }
    })
}

/// One generated instance: a static problem, optionally with a cost
/// lottery and a dynamic scenario built from it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub theorem: String,
    pub seed: u64,
    pub objective_family: ObjectiveFamily,
    pub problem: StaticProblem,
    pub lottery: Option<CostLottery>,
    pub dynamic: Option<DynamicScenario>,
    pub certificates: Vec<Certificate>,
}

impl Instance {
    /// Serializable scenario that reproduces the instance.
    pub fn repro(&self) -> ScenarioConfig {
        match &self.dynamic {
            Some(d) => {
                let mut p = StaticProblem::new(
                    d.objective.clone(),
                    d.cost_tail.clone(),
                    d.theta_lo,
                    d.theta_hi,
                );
                p.x_lo = d.x0.clone();
                ScenarioConfig::from_problem(&p, Some(d), d.lottery.as_ref())
            }
            None => ScenarioConfig::from_problem(&self.problem, None, self.lottery.as_ref()),
        }
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    *xs.choose(rng).expect("nonempty choice list")
}

/// Uniform multiple of `1/denom` in `[lo, hi]` (both in units of `1/denom`).
fn dyadic(rng: &mut ChaCha8Rng, lo: i32, hi: i32, denom: f64) -> f64 {
    rng.gen_range(lo..=hi) as f64 / denom
}

fn random_lattice(rng: &mut ChaCha8Rng, dims: usize) -> Result<GridLattice> {
    let axes: Vec<Vec<f64>> = (0..dims)
        .map(|_| {
            let size = rng.gen_range(2..=5);
            let start = dyadic(rng, -2, 2, 2.0);
            let step = pick(rng, &[0.5, 1.0]);
            (0..size).map(|k| start + step * k as f64).collect()
        })
        .collect();
    if dims >= 2 && rng.gen_bool(0.3) {
        // idx_i ≤ idx_j + c is closed under componentwise max and min.
        let i = rng.gen_range(0..dims);
        let j = (i + rng.gen_range(1..dims)) % dims;
        let c = rng.gen_range(0..=2) as i64;
        let ax = axes.clone();
        let index = move |d: usize, v: f64| ax[d].iter().position(|&a| a == v).unwrap_or(0) as i64;
        GridLattice::with_mask(axes, move |x| index(i, x[i]) <= index(j, x[j]) + c)
    } else {
        GridLattice::product(axes)
    }
}

fn chain(k: usize) -> Result<ParamPoset> {
    ParamPoset::chain(k)
}

fn supermodular_table(
    rng: &mut ChaCha8Rng,
    l: &GridLattice,
    k: usize,
    strict: bool,
) -> Vec<Vec<f64>> {
    let n = l.dims();
    let sizes: Vec<usize> = l.axes().iter().map(Vec::len).collect();
    let sep: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&s| (0..s).map(|_| dyadic(rng, -16, 16, 8.0)).collect())
        .collect();
    let mut inter = vec![vec![0.0; n]; n];
    for (i, row) in inter.iter_mut().enumerate() {
        for w in &mut row[i + 1..] {
            *w = pick(rng, &[0.0, 0.125, 0.25, 0.5]);
        }
    }
    let incs: &[f64] = if strict {
        &[0.25, 0.5, 1.0]
    } else {
        &[0.0, 0.25, 0.5, 1.0]
    };
    let slopes: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut a = dyadic(rng, -8, 4, 4.0);
            (0..k)
                .map(|t| {
                    if t > 0 {
                        a += pick(rng, incs);
                    }
                    a
                })
                .collect()
        })
        .collect();
    (0..k)
        .map(|t| {
            l.ids()
                .map(|id| {
                    let idx = l.axis_index(id);
                    let mut v = 0.0;
                    for i in 0..n {
                        let xi = idx[i] as f64;
                        v += sep[i][idx[i]] + slopes[i][t] * xi;
                        for j in i + 1..n {
                            v += inter[i][j] * xi * idx[j] as f64;
                        }
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn random_objective(
    rng: &mut ChaCha8Rng,
    family: ObjectiveFamily,
    dims: usize,
    strict: bool,
) -> Result<Objective> {
    let k = rng.gen_range(2..=4);
    match family {
        ObjectiveFamily::SupermodularLinear => {
            let l = random_lattice(rng, dims)?;
            let t = supermodular_table(rng, &l, k, strict);
            Objective::from_table(l, chain(k)?, t)
        }
        ObjectiveFamily::Pricing => {
            let size = rng.gen_range(3..=6);
            let start = dyadic(rng, 1, 4, 2.0);
            let prices: Vec<f64> = (0..size).map(|i| start + 0.5 * i as f64).collect();
            let b = pick(rng, &[0.5, 1.0]);
            let a = b * prices[size - 1] + dyadic(rng, 1, 8, 2.0);
            let mut c = dyadic(rng, 0, 4, 4.0);
            let costs: Vec<f64> = (0..k)
                .map(|t| {
                    if t > 0 {
                        c += pick(rng, &[0.25, 0.5, 1.0]);
                    }
                    c
                })
                .collect();
            let l = GridLattice::product(vec![prices.clone()])?;
            let t = costs
                .iter()
                .map(|&c| prices.iter().map(|&p| (p - c) * (a - b * p)).collect())
                .collect();
            Objective::from_table(l, chain(k)?, t)
        }
        ObjectiveFamily::QuasiSupermodular => {
            let dims = dims.max(2);
            for _ in 0..ATTEMPTS {
                let l = random_lattice(rng, dims)?;
                let t = supermodular_table(rng, &l, k, strict);
                let phi = |v: f64| v * v * v + v;
                let t: Vec<Vec<f64>> = t
                    .iter()
                    .map(|r| r.iter().map(|&v| phi(v)).collect())
                    .collect();
                let obj = Objective::from_table(l, chain(k)?, t)?;
                if !crate::properties::check_objective_supermodular(&obj, &CheckOptions::exact())
                    .holds
                {
                    return Ok(obj);
                }
            }
            Err(Error::Generator(
                "could not draw a non-supermodular quasi-supermodular table".into(),
            ))
        }
    }
}

fn axis_differences(axis: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pos: Vec<f64> = Vec::new();
    for a in axis {
        for b in axis {
            if a > b {
                pos.push(a - b);
            }
        }
    }
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    let neg = pos.iter().map(|d| -d).collect();
    (pos, neg)
}

#[derive(Clone, Copy)]
enum Profile1d {
    Plain,
    Strict,
    Convex,
    Concave,
}

/// Per-dimension table increasing away from zero on both sides.
fn single_dipped_component(rng: &mut ChaCha8Rng, axis: &[f64], shape: Profile1d) -> ScalarCost {
    let (pos, neg) = axis_differences(axis);
    let mut values = vec![(0.0, ExtValue(0.0))];
    for side in [pos, neg] {
        let (quad, lin) = (dyadic(rng, 0, 8, 8.0), dyadic(rng, 0, 4, 8.0));
        let cut = (matches!(shape, Profile1d::Plain) && rng.gen_bool(0.15))
            .then(|| rng.gen_range(0..=side.len()));
        let mut acc = 0.0;
        let mut inc = pick(rng, &[1.0, 2.0, 4.0]);
        for (k, &d) in side.iter().enumerate() {
            let v = match shape {
                Profile1d::Plain => {
                    acc += pick(rng, &[0.0, 0.25, 0.5, 1.0, 2.0]);
                    if cut.is_some_and(|c| k >= c) {
                        f64::INFINITY
                    } else {
                        acc
                    }
                }
                Profile1d::Strict => {
                    acc += pick(rng, &[0.25, 0.5, 1.0, 2.0]);
                    acc
                }
                Profile1d::Convex => quad * d * d + lin * d.abs(),
                Profile1d::Concave => {
                    acc += inc;
                    inc = (inc / 2.0).max(0.125);
                    acc
                }
            };
            values.push((d, ExtValue(v)));
        }
    }
    ScalarCost::Table { values }
}

fn weights(rng: &mut ChaCha8Rng, n: usize, lo: i32) -> Vec<f64> {
    (0..n).map(|_| dyadic(rng, lo, 16, 8.0)).collect()
}

fn random_cost(rng: &mut ChaCha8Rng, family: CostFamily, l: &GridLattice) -> Result<CostFunction> {
    let n = l.dims();
    let separable = |rng: &mut ChaCha8Rng, shape| CostSpec::Separable {
        components: l
            .axes()
            .iter()
            .map(|a| single_dipped_component(rng, a, shape))
            .collect(),
    };
    let spec = match family {
        CF::SingleDipped => separable(rng, Profile1d::Plain),
        CF::StrictSingleDipped => separable(rng, Profile1d::Strict),
        CF::ConvexSingleDipped => separable(rng, Profile1d::Convex),
        CF::ConcaveSingleDipped => separable(rng, Profile1d::Concave),
        CF::Quadratic => CostSpec::Quadratic {
            weights: weights(rng, n, 1),
        },
        CF::Euclidean => CostSpec::Euclidean {
            scale: dyadic(rng, 1, 16, 8.0),
        },
        CF::CobbDouglas => CostSpec::CobbDouglas {
            exponents: (0..n).map(|_| pick(rng, &[0.5, 1.0, 2.0])).collect(),
            scale: dyadic(rng, 1, 16, 8.0),
        },
        CF::Fixed => CostSpec::Fixed {
            k: dyadic(rng, 0, 16, 8.0),
        },
        CF::FreeDisposal => CostSpec::FreeDisposal {
            weights: weights(rng, n, 0),
        },
        CF::Lumpy => CostSpec::Lumpy {
            min_size: pick(rng, &[1.0, 1.5, 2.0]),
            weight: dyadic(rng, 0, 8, 8.0),
        },
        CF::BoxConstraint => {
            let bound = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.2) {
                    ExtValue(f64::INFINITY)
                } else {
                    ExtValue(dyadic(rng, 0, 6, 2.0))
                }
            };
            CostSpec::BoxConstraint {
                weights: weights(rng, n, 0),
                lower: (0..n).map(|_| ExtValue(-bound(rng).0)).collect(),
                upper: (0..n).map(|_| bound(rng)).collect(),
            }
        }
        CF::Zero => CostSpec::Zero,
        CF::Prohibitive => CostSpec::Prohibitive,
        CF::GapTable => {
            let (pos, neg) = axis_differences(&l.axes()[0]);
            let mut values = vec![(0.0, ExtValue(0.0))];
            for d in pos.into_iter().chain(neg) {
                let v = if rng.gen_bool(0.5) {
                    f64::INFINITY
                } else {
                    dyadic(rng, 0, 16, 8.0)
                };
                values.push((d, ExtValue(v)));
            }
            CostSpec::Separable {
                components: vec![ScalarCost::Table { values }],
            }
        }
    };
    CostFunction::new(spec)
}

/// Rechecks a family's declared properties; returns the first failure.
pub fn verify_certificate(
    cost: &CostFunction,
    l: &GridLattice,
    cert: &Certificate,
) -> Result<Option<PropertyReport>> {
    let table = cost.bind(l)?;
    let opts = CheckOptions::exact();
    for &p in &cert.declared {
        let r = match p {
            Property::MinimallyMonotone => check_minimally_monotone(&table, &opts),
            Property::Monotone => check_monotone(&table, &opts),
            Property::StrictlyMonotone => check_strictly_monotone(&table, &opts),
            Property::StrictlyMinimallyMonotone => check_strictly_minimally_monotone(&table, &opts),
            Property::AdditivelySeparable => check_additively_separable(cost, l, &opts)?,
            Property::SeparableConvex => check_separable_convex(cost, l, &opts)?,
            other => {
                return Err(Error::Generator(format!(
                    "no certificate check for {}",
                    other.name()
                )))
            }
        };
        if !r.holds {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

fn certified_cost(
    rng: &mut ChaCha8Rng,
    families: &[CostFamily],
    l: &GridLattice,
) -> Result<(CostFunction, Certificate)> {
    let eligible: Vec<CostFamily> = families
        .iter()
        .copied()
        .filter(|f| l.dims() == 1 || !f.one_dimensional())
        .collect();
    let eligible: Vec<CostFamily> = if families == NOT_CONVEX {
        // Fixed costs are separable only in one dimension.
        eligible
            .into_iter()
            .filter(|&f| l.dims() == 1 || f != CF::Fixed)
            .collect()
    } else {
        eligible
    };
    if eligible.is_empty() {
        return Err(Error::Generator(format!(
            "no cost family fits a {}-dimensional lattice",
            l.dims()
        )));
    }
    for _ in 0..ATTEMPTS {
        let family = pick(rng, &eligible);
        let cost = random_cost(rng, family, l)?;
        let cert = Certificate {
            family,
            declared: family.declared(l.dims()),
        };
        if verify_certificate(&cost, l, &cert)?.is_none() {
            return Ok((cost, cert));
        }
    }
    Err(Error::Generator("cost certificates kept failing".into()))
}

fn random_lottery(
    rng: &mut ChaCha8Rng,
    families: &[CostFamily],
    obj: &Objective,
    certs: &mut Vec<Certificate>,
) -> Result<CostLottery> {
    let l = obj.lattice();
    let probs: &[f64] = match rng.gen_range(1..=3) {
        1 => &[1.0],
        2 => pick(rng, &[&[0.25, 0.75][..], &[0.5, 0.5][..]]),
        _ => &[0.25, 0.25, 0.5],
    };
    let mut states = Vec::new();
    for &probability in probs {
        let (cost, cert) = certified_cost(rng, families, l)?;
        certs.push(cert);
        states.push(LotteryState { probability, cost });
    }
    let utility = match rng.gen_range(0..3) {
        0 => Utility::Linear,
        1 => {
            // Keep α·|payoff| of order one: past ~35 the exponential
            // saturates and distinct payoffs get equal utility.
            let mut scale = obj.max_abs();
            for st in &states {
                scale += st.cost.bind(l)?.max_finite();
            }
            Utility::Cara {
                alpha: pick(rng, &[0.5, 1.0, 2.0]) / (1.0 + scale),
            }
        }
        _ => {
            // Concave, kinks every 32 so interpolation divides by a power of two.
            let mut knots = vec![(-64.0, -96.0)];
            for slope in [2.0, 1.0, 0.5, 0.25] {
                let (x, y) = knots[knots.len() - 1];
                knots.push((x + 32.0, y + 32.0 * slope));
            }
            Utility::PiecewiseLinear { knots }
        }
    };
    CostLottery::new(states, utility)
}

/// Draws `lo < hi` from a chain of length `k`.
fn parameter_pair(rng: &mut ChaCha8Rng, k: usize) -> (usize, usize) {
    let lo = rng.gen_range(0..k - 1);
    (lo, rng.gen_range(lo + 1..k))
}

fn constraint_sets(rng: &mut ChaCha8Rng, l: &GridLattice) -> Result<(GridLattice, GridLattice)> {
    let m = |rng: &mut ChaCha8Rng| rng.gen_range(0..l.len());
    let (p1, p2, p3, p4) = (m(rng), m(rng), m(rng), m(rng));
    let a = l.meet_id(p1, p2);
    let b = l.join_id(p1, p2);
    let a2 = l.join_id(a, p3);
    let b2 = l.join_id(l.join_id(b, p3), p4);
    let initial = l.sub_box(&l.point(a), &l.point(b))?;
    let new = l.sub_box(&l.point(a2), &l.point(b2))?;
    Ok((initial, new))
}

fn draw(theorem: &str, prof: &Profile, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = pick(&mut rng, prof.objectives);
    let needs_1d = prof.costs.iter().all(|f| f.one_dimensional());
    let dims = if family == ObjectiveFamily::Pricing || needs_1d {
        1
    } else {
        rng.gen_range(1..=3)
    };
    let objective = random_objective(&mut rng, family, dims, prof.strict_scd)?;
    let l = objective.lattice().clone();
    let k = objective.params().len();
    let (theta_lo, theta_hi) = parameter_pair(&mut rng, k);
    let mut certificates = Vec::new();
    let (cost, cert) = certified_cost(&mut rng, prof.costs, &l)?;
    certificates.push(cert);
    let mut problem = StaticProblem::new(objective.clone(), cost.clone(), theta_lo, theta_hi);
    if prof.sets {
        let (initial, new) = constraint_sets(&mut rng, &l)?;
        problem = problem.with_sets(initial, new);
    }
    let lottery = if prof.lottery {
        Some(random_lottery(
            &mut rng,
            prof.costs,
            &objective,
            &mut certificates,
        )?)
    } else {
        None
    };
    let dynamic = match prof.path {
        None => None,
        Some(shape) => {
            let mut s =
                DynamicScenario::stationary(objective, theta_lo, theta_hi, cost, SUITE_DELTA);
            s.report_horizon = SUITE_HORIZON;
            if shape != PathShape::Stationary {
                let len = rng.gen_range(0..=3);
                let mut thetas: Vec<usize> = (0..len)
                    .map(|_| rng.gen_range(theta_lo..=theta_hi))
                    .collect();
                if shape == PathShape::Increasing {
                    thetas.sort_unstable();
                }
                if lottery.is_none() {
                    for _ in 0..len {
                        let (c, cert) = certified_cost(&mut rng, prof.costs, &l)?;
                        certificates.push(cert);
                        s.cost_prefix.push(c);
                    }
                }
                s.theta_prefix = thetas;
            }
            s.lottery = lottery.clone();
            Some(s)
        }
    };
    // Static instances must have a maximizer with finite cost.
    problem.prepare()?.adjusted_argmax()?;
    Ok(Instance {
        theorem: theorem.into(),
        seed,
        objective_family: family,
        problem,
        lottery,
        dynamic,
        certificates,
    })
}

/// Generates the instance for `theorem` from one seed. Deterministic.
pub fn generate(theorem: &str, seed: u64) -> Result<Instance> {
    let prof = profile(theorem)?;
    let mut s = seed;
    for _ in 0..ATTEMPTS {
        match draw(theorem, &prof, s) {
            Err(Error::Infeasible) | Err(Error::Generator(_)) => {
                // Derive the next attempt's seed from the current one.
                s = ChaCha8Rng::seed_from_u64(s).next_u64();
            }
            other => return other,
        }
    }
    Err(Error::Generator(format!(
        "no feasible {theorem} instance from seed {seed}"
    )))
}

/// Runs the theorem check(s) for an instance. With `checked` off the
/// hypotheses are still computed and reported but not enforced.
pub fn evaluate(inst: &Instance, checked: bool) -> Result<Vec<TheoremReport>> {
    let opts = SolveOptions {
        check_hypotheses: checked,
        check: CheckOptions::exact(),
    };
    let p = &inst.problem;
    let dynamic = || {
        inst.dynamic.as_ref().ok_or_else(|| {
            Error::InvalidScenario(format!("{} instance has no dynamic scenario", inst.theorem))
        })
    };
    let lottery = || {
        inst.lottery.as_ref().ok_or_else(|| {
            Error::InvalidScenario(format!("{} instance has no cost lottery", inst.theorem))
        })
    };
    let t = inst.theorem.as_str();
    let one = |r: Result<TheoremReport>| rejected_or(t, r).map(|r| vec![r]);
    match t {
        "thm1" | "thm1star" => one(theorem1_check(p, &opts)),
        "prop1a" => one(prop1_forall_check(p, Strictness::StrictScd, &opts)),
        "prop1b" => one(prop1_forall_check(p, Strictness::StrictCost, &opts)),
        "thm2" | "thm2_minimal" => one(theorem2_check(p, &opts)),
        "prop3" => one(prop3_forall_check(p, None, &opts)),
        "thm3" => one(theorem3_check(dynamic()?, &opts)),
        "thm4" => one(theorem4_check(dynamic()?, &opts)),
        "thm5" => {
            let s = dynamic()?;
            let caged = rejected_or(t, theorem5_check(s, SelectionMode::Caged, &opts))?;
            let monotone = rejected_or(t, theorem5_check(s, SelectionMode::Monotone, &opts))?;
            Ok(vec![caged, monotone])
        }
        "thm6" | "thm6_nonconvex" => one(theorem6_check(dynamic()?, &opts)),
        "thm1p" => one(theorem1_prime_check(p, lottery()?, &opts)),
        "thm2p" => one(theorem2_prime_check(p, lottery()?, &opts)),
        "thm3p" => one(theorem3_prime_check(dynamic()?, &opts)),
        other => Err(Error::InvalidScenario(format!(
            "unknown theorem suite {other:?}"
        ))),
    }
}

/// Verdict tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub holds: usize,
    pub violated: usize,
    pub rejected: usize,
    pub inconclusive: usize,
    pub errors: usize,
}

impl Counts {
    fn add(&mut self, v: Option<Verdict>) {
        match v {
            Some(Verdict::Holds) => self.holds += 1,
            Some(Verdict::Violated) => self.violated += 1,
            Some(Verdict::Rejected) => self.rejected += 1,
            Some(Verdict::Inconclusive) => self.inconclusive += 1,
            None => self.errors += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.holds + self.violated + self.rejected + self.inconclusive + self.errors
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteFailure {
    pub index: usize,
    pub instance_seed: u64,
    /// `None` when the check returned an error.
    pub verdict: Option<Verdict>,
    pub notes: Vec<String>,
    pub repro: ScenarioConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub theorem: String,
    pub count: usize,
    pub seed: u64,
    pub exploratory: bool,
    pub counts: Counts,
    /// Exploratory suites only: verdicts with hypothesis enforcement off.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unchecked: Option<Counts>,
    pub failures: Vec<SuiteFailure>,
    /// Every instance holds (asserted suites); no errors (exploratory).
    pub passed: bool,
}

/// Worst verdict of a multi-report outcome; `None` for an error.
fn combined(res: &Result<Vec<TheoremReport>>) -> (Option<Verdict>, Vec<String>) {
    match res {
        Err(e) => (None, vec![e.to_string()]),
        Ok(reps) => {
            let rank = |v: Verdict| match v {
                Verdict::Holds => 0,
                Verdict::Rejected => 1,
                Verdict::Inconclusive => 2,
                Verdict::Violated => 3,
            };
            let worst = reps
                .iter()
                .map(|r| r.verdict)
                .max_by_key(|&v| rank(v))
                .unwrap_or(Verdict::Holds);
            let mut notes: Vec<String> =
                reps.iter().flat_map(|r| r.notes.iter().cloned()).collect();
            for r in reps {
                for h in r.hypotheses.iter().filter(|h| !h.holds) {
                    notes.push(format!("hypothesis failed: {}", h.summary()));
                }
            }
            (Some(worst), notes)
        }
    }
}

/// Seeds for `count` instances drawn from a master generator.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| master.next_u64()).collect()
}

struct Outcome {
    seed: u64,
    verdict: Option<Verdict>,
    notes: Vec<String>,
    unchecked: Option<Option<Verdict>>,
    repro: Option<ScenarioConfig>,
}

fn run_one(theorem: &str, index: usize, seed: u64, exploratory: bool) -> Outcome {
    let inst = if theorem == "thm2_minimal" && index == 0 {
        gap_cost_fixture().map(|problem| Instance {
            theorem: theorem.into(),
            seed,
            objective_family: ObjectiveFamily::SupermodularLinear,
            problem,
            lottery: None,
            dynamic: None,
            certificates: vec![Certificate {
                family: CF::GapTable,
                declared: CF::GapTable.declared(1),
            }],
        })
    } else {
        generate(theorem, seed)
    };
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            return Outcome {
                seed,
                verdict: None,
                notes: vec![e.to_string()],
                unchecked: None,
                repro: None,
            };
        }
    };
    let (verdict, mut notes) = combined(&evaluate(&inst, true));
    let mut unchecked = None;
    if exploratory {
        let (v, n) = combined(&evaluate(&inst, false));
        unchecked = Some(v);
        notes = n;
    }
    Outcome {
        seed,
        verdict,
        notes,
        unchecked,
        repro: Some(inst.repro()),
    }
}

/// Runs `count` seeded instances of a suite. Output is identical for a
/// given `(theorem, count, seed)` whatever the thread count.
pub fn run_suite(theorem: &str, count: usize, seed: u64) -> Result<SuiteReport> {
    profile(theorem)?;
    let exploratory = EXPLORATORY.contains(&theorem);
    let seeds = instance_seeds(seed, count);
    let outcomes: Vec<Outcome> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| run_one(theorem, i, s, exploratory))
        .collect();
    let mut counts = Counts::default();
    let mut unchecked = exploratory.then(Counts::default);
    let mut failures = Vec::new();
    for (index, o) in outcomes.into_iter().enumerate() {
        counts.add(o.verdict);
        if let (Some(u), Some(v)) = (unchecked.as_mut(), o.unchecked) {
            u.add(v);
        }
        let interesting = if exploratory {
            o.unchecked.flatten() == Some(Verdict::Violated) || o.verdict.is_none()
        } else {
            o.verdict != Some(Verdict::Holds)
        };
        if interesting && failures.len() < MAX_FAILURES {
            failures.push(SuiteFailure {
                index,
                instance_seed: o.seed,
                verdict: if exploratory {
                    o.unchecked.flatten()
                } else {
                    o.verdict
                },
                notes: o.notes,
                repro: o.repro.unwrap_or_default(),
            });
        }
    }
    let passed = if exploratory {
        counts.errors == 0 && unchecked.as_ref().is_none_or(|u| u.errors == 0)
    } else {
        counts.holds == count
    };
    Ok(SuiteReport {
        theorem: theorem.into(),
        count,
        seed,
        exploratory,
        counts,
        unchecked,
        failures,
        passed,
    })
}

/// A registered counterexample with its expected outcome.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub description: String,
    pub passed: bool,
    pub details: Vec<String>,
}

/// Line `{0,…,5}`, `F(·,θ̲) = −x²`, `F(·,θ̄) = −(x−2)²`, cost infinite on
/// `0 < ε < 3` and zero elsewhere. Minimally monotone but not monotone.
pub fn gap_cost_fixture() -> Result<StaticProblem> {
    let xs: Vec<f64> = (0..=5).map(f64::from).collect();
    let l = GridLattice::product(vec![xs.clone()])?;
    let table = vec![
        xs.iter().map(|x| -x * x).collect(),
        xs.iter().map(|x| -(x - 2.0) * (x - 2.0)).collect(),
    ];
    let obj = Objective::from_table(l, ParamPoset::chain(2)?, table)?;
    let values = (-5..=5)
        .map(|e| {
            let v = if e > 0 && e < 3 { f64::INFINITY } else { 0.0 };
            (f64::from(e), ExtValue(v))
        })
        .collect();
    let cost = CostFunction::new(CostSpec::Separable {
        components: vec![ScalarCost::Table { values }],
    })?;
    Ok(StaticProblem::new(obj, cost, 0, 1).with_x_lo(Point::new(vec![0.0])))
}

/// Grid `{0,…,3}²`, `F(x,θ) = −(x₁−1−θ)² − (x₂−1−θ)²`, `x̲ = (1,1)`, cost
/// zero at `ε̂ = (1,−1)`, 10 at `0` (cost tables need a finite `C(0)`) and
/// infinite at every other difference.
pub fn forced_move_fixture() -> Result<StaticProblem> {
    let ax: Vec<f64> = (0..=3).map(f64::from).collect();
    let l = GridLattice::product(vec![ax.clone(), ax])?;
    let table = (0..2)
        .map(|t| {
            let c = 1.0 + f64::from(t);
            l.ids()
                .map(|i| {
                    let x = l.coords(i);
                    -(x[0] - c).powi(2) - (x[1] - c).powi(2)
                })
                .collect()
        })
        .collect();
    let entries = l
        .diff_set()
        .iter()
        .map(|d| {
            let e = d.entries().to_vec();
            let v = if e == [1.0, -1.0] {
                0.0
            } else if e == [0.0, 0.0] {
                10.0
            } else {
                f64::INFINITY
            };
            CostEntry {
                diff: e,
                cost: ExtValue(v),
            }
        })
        .collect();
    let obj = Objective::from_table(l, ParamPoset::chain(2)?, table)?;
    let cost = CostFunction::new(CostSpec::Table { entries })?;
    Ok(StaticProblem::new(obj, cost, 0, 1).with_x_lo(Point::new(vec![1.0, 1.0])))
}

/// KL cost over the belief set generated by `G₀, G, H` on support
/// `{1,2,3}`, with the lattice of those beliefs. Returns the cost, the
/// lattice, and `C(G−G₀) − C(H−G₀)`.
pub fn kl_fixture() -> Result<(CostFunction, GridLattice, f64)> {
    let g0 = [1.0 / 3.0, 2.0 / 3.0, 1.0];
    let g = [0.25, 0.25, 1.0];
    let h = [0.125, 0.25, 1.0];
    let beliefs = BeliefSet::closure(&[1.0, 2.0, 3.0], &[g0.to_vec(), g.to_vec(), h.to_vec()])?;
    let pts: Vec<Point> = beliefs
        .cdfs()
        .iter()
        .map(|c| Point::new(vec![-c[0] + 0.0, -c[1] + 0.0]))
        .collect();
    let axes = (0..2)
        .map(|j| {
            let mut a: Vec<f64> = pts.iter().map(|p| p.coords()[j]).collect();
            a.sort_by(f64::total_cmp);
            a.dedup();
            a
        })
        .collect();
    let l = GridLattice::from_members(axes, &pts)?;
    let kl = CostFunction::new(CostSpec::KullbackLeibler {
        reference: g0[..2].to_vec(),
        scale: 1.0,
        offset: 0,
    })?;
    let eps = |c: &[f64]| [g0[0] - c[0], g0[1] - c[1]];
    let diff = kl.eval(&eps(&g))? - kl.eval(&eps(&h))?;
    Ok((kl, l, diff))
}

/// Runs the three registered counterexamples against their expected
/// outcomes.
pub fn fixtures() -> Result<Vec<FixtureOutcome>> {
    let exact = CheckOptions::exact();
    let mut out = Vec::new();

    let p = gap_cost_fixture()?;
    let prep = p.prepare()?;
    let best = prep.adjusted_argmax()?;
    let argmax: Vec<f64> = best
        .points(&prep.lattice)
        .iter()
        .map(|q| q.coords()[0])
        .collect();
    let forced = crate::lechatelier::theorem2_select(&p, None, &SolveOptions::unchecked())?;
    let gate = theorem2_check(&p, &SolveOptions::default());
    let rejected_monotone =
        matches!(&gate, Err(Error::Hypothesis(r)) if r.property == Property::Monotone);
    let x_bar = forced.x_bar.coords()[0];
    out.push(FixtureOutcome {
        name: "gap_cost".into(),
        description: "non-monotone cost overshoots the frictionless optimum".into(),
        passed: argmax == [3.0] && x_bar == 2.0 && argmax[0] > x_bar && rejected_monotone,
        details: vec![
            format!("argmax G = {argmax:?}"),
            format!("x_bar = {x_bar}"),
            format!("monotone hypothesis rejected: {rejected_monotone}"),
        ],
    });

    let p = forced_move_fixture()?;
    let forced = crate::static_solver::theorem1_select(&p, &SolveOptions::unchecked())?;
    let gate = theorem1_check(&p, &SolveOptions::default());
    let rejected_minimal =
        matches!(&gate, Err(Error::Hypothesis(r)) if r.property == Property::MinimallyMonotone);
    // The unique short-run maximizer is x_lo + ε̂, which is not above x_lo,
    // so the join x_lo ∨ x' is not a maximizer.
    let argmax: Vec<Vec<f64>> = forced.argmax.iter().map(|q| q.coords().to_vec()).collect();
    let only = argmax.len() == 1 && argmax[0] == [2.0, 0.0];
    out.push(FixtureOutcome {
        name: "forced_move".into(),
        description: "a cost that only permits a move not above zero makes the unique maximizer fall below x_lo".into(),
        passed: only && !forced.some_maximizer_above && !forced.x_hat_optimal && rejected_minimal,
        details: vec![
            format!("argmax G = {argmax:?}"),
            format!("some maximizer above x_lo: {}", forced.some_maximizer_above),
            format!("minimally monotone hypothesis rejected: {rejected_minimal}"),
        ],
    });

    let (kl, l, diff) = kl_fixture()?;
    let table = CostTable::new(&kl, &l)?;
    let mono = check_monotone(&table, &exact).holds;
    let minimal = check_minimally_monotone(&table, &exact).holds;
    let expected = 0.25 * std::f64::consts::LN_2;
    out.push(FixtureOutcome {
        name: "kl_not_monotone".into(),
        description: "Kullback-Leibler belief cost is minimally monotone but not monotone".into(),
        passed: (diff - expected).abs() <= 1e-9 && !mono && minimal,
        details: vec![
            format!("C(G-G0) - C(H-G0) = {diff:.12} (expected {expected:.12})"),
            format!("monotone: {mono}, minimally monotone: {minimal}"),
        ],
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        for t in THEOREMS.iter().chain(EXPLORATORY) {
            let a = generate(t, 7).unwrap();
            let b = generate(t, 7).unwrap();
            assert_eq!(a.repro(), b.repro(), "{t}");
        }
    }

    #[test]
    fn quadratic_instance_passes_its_checks() {
        let inst = (0..200)
            .map(|s| generate("thm2", s).unwrap())
            .find(|i| i.certificates[0].family == CF::Quadratic)
            .unwrap();
        let reps = evaluate(&inst, true).unwrap();
        assert!(reps.iter().all(|r| r.holds()), "{reps:?}");
    }

    #[test]
    fn lumpy_certificate_is_minimal_only() {
        let d = CF::Lumpy.declared(2);
        assert!(d.contains(&Property::MinimallyMonotone));
        assert!(!d.contains(&Property::Monotone));
    }

    #[test]
    fn suite_is_deterministic() {
        let a = serde_json::to_string(&run_suite("thm1", 24, 3).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite("thm1", 24, 3).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("thm9", 1, 0).is_err());
    }

    #[test]
    fn fixtures_reproduce() {
        for f in fixtures().unwrap() {
            assert!(f.passed, "{}: {:?}", f.name, f.details);
        }
    }
}
