//! Application models: each builder tabulates the model on a finite grid,
//! runs the property profile its comparative statics rely on, and only
//! then hands out a problem.

use std::collections::BTreeSet;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, CostSpec};
use crate::dynamic_solver::DynamicScenario;
use crate::error::{Error, Result};
use crate::lattice::{GridLattice, ParamPoset, Point};
use crate::objective::Objective;
use crate::properties::{
    check_increasing_differences, check_log_increasing_differences, check_objective_supermodular,
    check_single_crossing, check_submodular, check_supermodular, gate, CheckOptions, Property,
    PropertyReport, Witness,
};
use crate::report::TheoremReport;
use crate::static_solver::{argmax, theorem1_star_select, SolveOptions, StaticProblem};

/// A model that passed its property profile.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub name: String,
    pub objective: Objective,
    pub cost: CostFunction,
    pub theta_lo: usize,
    pub theta_hi: usize,
    pub x_lo: Option<Point>,
    pub initial_set: Option<GridLattice>,
    pub new_set: Option<GridLattice>,
    /// Axes negated relative to the model's natural coordinates.
    pub flipped: Vec<usize>,
    pub profile: Vec<PropertyReport>,
    /// Comparison slack matched to the rounding in the tabulation.
    pub check: CheckOptions,
}

impl BuiltModel {
    fn release(self) -> Result<Self> {
        gate(&self.profile)?;
        Ok(self)
    }

    /// Checked solving with the model's comparison slack.
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            check_hypotheses: true,
            check: self.check,
        }
    }

    pub fn static_problem(&self) -> StaticProblem {
        StaticProblem {
            objective: self.objective.clone(),
            cost: self.cost.clone(),
            theta_lo: self.theta_lo,
            theta_hi: self.theta_hi,
            x_lo: self.x_lo.clone(),
            initial_set: self.initial_set.clone(),
            new_set: self.new_set.clone(),
        }
    }

    /// Stationary dynamic version with the new parameter in every period.
    pub fn dynamic(&self, delta: f64) -> DynamicScenario {
        let mut s = DynamicScenario::stationary(
            self.objective.clone(),
            self.theta_lo,
            self.theta_hi,
            self.cost.clone(),
            delta,
        );
        s.x0 = self.x_lo.clone();
        s
    }

    /// Maps a point back to the model's natural coordinates.
    pub fn natural(&self, p: &Point) -> Point {
        flip_point(p, &self.flipped)
    }
}

fn axis(values: &[f64], what: &str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidScenario(format!("{what} grid is empty")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidScenario(format!(
            "{what} grid has non-finite value {v}"
        )));
    }
    let mut a = values.to_vec();
    a.sort_by(f64::total_cmp);
    a.dedup();
    Ok(a)
}

/// Relative slack for closed-form tabulations, whose modular parts cancel
/// only up to rounding.
pub const TABULATION_RTOL: f64 = 1e-10;

fn tabulated(opts: &CheckOptions, scale: f64) -> CheckOptions {
    CheckOptions {
        tolerance: opts.tolerance.max(TABULATION_RTOL * (1.0 + scale)),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn state_index(i: usize, n: usize, what: &str) -> Result<usize> {
    if i >= n {
        return Err(Error::InvalidScenario(format!(
            "{what} index {i} out of range (have {n})"
        )));
    }
    Ok(i)
}

fn positivity(name: &str, values: impl IntoIterator<Item = (String, f64)>) -> PropertyReport {
    for (at, v) in values {
        if !(v > 0.0 && v.is_finite()) {
            return PropertyReport::fail(
                Property::Positivity,
                Witness::new().param(&at).value(name, v),
            );
        }
    }
    PropertyReport::pass(Property::Positivity)
}

// ---------------------------------------------------------------------------
// Sign flips.

fn flip_point(p: &Point, dims: &[usize]) -> Point {
    let mut c = p.coords().to_vec();
    for &d in dims {
        // `+ 0.0` keeps zero unsigned.
        c[d] = -c[d] + 0.0;
    }
    Point::new(c)
}

fn flip_lattice(l: &GridLattice, dims: &[usize]) -> Result<GridLattice> {
    let mut axes = l.axes().to_vec();
    for &d in dims {
        axes[d] = axes[d].iter().rev().map(|v| -v + 0.0).collect();
    }
    let members: Vec<Point> = l.points().iter().map(|p| flip_point(p, dims)).collect();
    GridLattice::from_members(axes, &members)
}

/// Negates the listed coordinates. Objective, cost, initial choice and
/// constraint sets are transformed together, so flipping twice gives back
/// the same evaluations.
pub fn flip_dimensions(problem: &StaticProblem, dims: &[usize]) -> Result<StaticProblem> {
    let l = problem.objective.lattice();
    let set: BTreeSet<usize> = dims.iter().copied().collect();
    if set.len() != dims.len() {
        return Err(Error::InvalidScenario("flip dimensions repeat".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d >= l.dims()) {
        return Err(Error::InvalidScenario(format!(
            "flip dimension {d} out of range"
        )));
    }
    let flipped = flip_lattice(l, dims)?;
    let obj = &problem.objective;
    let objective = Objective::tabulate(flipped, obj.params().clone(), |x, t| {
        obj.eval(&flip_point(x, dims), t)
            .expect("flipped member maps back into the lattice")
    })?;
    let sets = |s: &Option<GridLattice>| s.as_ref().map(|s| flip_lattice(s, dims)).transpose();
    Ok(StaticProblem {
        objective,
        cost: problem.cost.flipped(dims)?,
        theta_lo: problem.theta_lo,
        theta_hi: problem.theta_hi,
        x_lo: problem.x_lo.as_ref().map(|p| flip_point(p, dims)),
        initial_set: sets(&problem.initial_set)?,
        new_set: sets(&problem.new_set)?,
    })
}

// ---------------------------------------------------------------------------
// Pricing.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Demand {
    /// `a − η p`.
    Linear { intercept: f64 },
    /// `p^{−η}`.
    Isoelastic,
    /// `e^{−η p}`.
    Exponential,
    /// `values[state][price]`, one row per demand state.
    Table { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PricingState {
    pub marginal_cost: f64,
    /// Elasticity parameter `η`; the model is ordered by `(c, −η)`.
    pub eta: f64,
}

/// Monopolist choosing a price with profit `(p − c) D(p, η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PricingModel {
    pub prices: Vec<f64>,
    pub states: Vec<PricingState>,
    pub demand: Demand,
    pub cost: CostSpec,
    pub initial: usize,
    pub shocked: usize,
}

impl PricingModel {
    /// Linear demand `10 − p`, marginal cost rising from 1 to 3, menu cost
    /// plus quadratic price adjustment.
    pub fn demo() -> Self {
        PricingModel {
            prices: (0..=12).map(|i| 2.0 + 0.5 * f64::from(i)).collect(),
            states: vec![
                PricingState {
                    marginal_cost: 1.0,
                    eta: 1.0,
                },
                PricingState {
                    marginal_cost: 3.0,
                    eta: 1.0,
                },
            ],
            demand: Demand::Linear { intercept: 10.0 },
            cost: CostSpec::Sum {
                terms: vec![
                    CostSpec::Fixed { k: 0.2 },
                    CostSpec::Quadratic { weights: vec![1.5] },
                ],
            },
            initial: 0,
            shocked: 1,
        }
    }

    fn demand_at(&self, s: usize, i: usize, p: f64) -> Result<f64> {
        let eta = self.states[s].eta;
        Ok(match &self.demand {
            Demand::Linear { intercept } => intercept - eta * p,
            Demand::Isoelastic => p.powf(-eta),
            Demand::Exponential => (-eta * p).exp(),
            Demand::Table { values } => {
                *values.get(s).and_then(|row| row.get(i)).ok_or_else(|| {
                    Error::InvalidScenario("demand table does not cover the grid".into())
                })?
            }
        })
    }

    pub fn build(&self, opts: &CheckOptions) -> Result<BuiltModel> {
        let prices = axis(&self.prices, "price")?;
        if prices.len() != self.prices.len() {
            return Err(Error::InvalidScenario(
                "price grid must be strictly increasing".into(),
            ));
        }
        let k = self.states.len();
        let theta_lo = state_index(self.initial, k, "initial state")?;
        let theta_hi = state_index(self.shocked, k, "shocked state")?;
        let labels = self
            .states
            .iter()
            .map(|s| format!("c={},eta={}", s.marginal_cost, s.eta))
            .collect();
        let order: Vec<Vec<f64>> = self
            .states
            .iter()
            .map(|s| vec![s.marginal_cost, -s.eta])
            .collect();
        let params = ParamPoset::from_vectors(labels, &order)?;
        let l = GridLattice::product(vec![prices.clone()])?;
        let mut demand = vec![vec![0.0; prices.len()]; k];
        for (s, row) in demand.iter_mut().enumerate() {
            for (i, &p) in prices.iter().enumerate() {
                row[i] = self.demand_at(s, i, p)?;
            }
        }
        let positive = positivity(
            "D(p)",
            demand.iter().enumerate().flat_map(|(s, row)| {
                row.iter()
                    .zip(&prices)
                    .map(move |(&d, p)| (format!("state {s}, p={p}"), d))
            }),
        );
        let mut profile = vec![positive.clone()];
        if !positive.holds {
            return Err(Error::hypothesis(positive));
        }
        let d_obj = Objective::from_table(l.clone(), params.clone(), demand.clone())?;
        let opts = &tabulated(opts, d_obj.max_abs());
        profile.push(check_log_increasing_differences(&d_obj, opts)?.with_note("demand"));
        let profit = demand
            .iter()
            .enumerate()
            .map(|(s, row)| {
                row.iter()
                    .zip(&prices)
                    .map(|(d, p)| (p - self.states[s].marginal_cost) * d)
                    .collect()
            })
            .collect();
        let objective = Objective::from_table(l, params, profit)?;
        let opts = &tabulated(opts, objective.max_abs());
        profile.push(check_single_crossing(&objective, opts).with_note("profit"));
        BuiltModel {
            name: "pricing".into(),
            objective,
            cost: CostFunction::new(self.cost.clone())?,
            theta_lo,
            theta_hi,
            x_lo: None,
            initial_set: None,
            new_set: None,
            flipped: Vec::new(),
            profile,
            check: *opts,
        }
        .release()
    }
}

// ---------------------------------------------------------------------------
// Factor demand.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Production {
    /// `A k^α ℓ^β`.
    CobbDouglas { scale: f64, alpha: f64, beta: f64 },
    /// `A (k + ℓ)^γ`; submodular for `γ < 1`.
    PerfectSubstitutes { scale: f64, gamma: f64 },
    /// `values[k][ℓ]` on the grid.
    Table { values: Vec<Vec<f64>> },
}

/// Firm choosing capital and labor; the parameter is `−w`, so a wage drop
/// is an increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FactorDemandModel {
    pub capital: Vec<f64>,
    pub labor: Vec<f64>,
    pub production: Production,
    #[serde(default = "unit")]
    pub output_price: f64,
    pub rental: f64,
    pub wages: Vec<f64>,
    pub initial: usize,
    pub shocked: usize,
    /// Cost in natural `(k, ℓ)` coordinates.
    pub cost: CostSpec,
    /// Substitutes: `f` submodular; the capital axis is flipped.
    #[serde(default)]
    pub substitutes: bool,
}

fn unit() -> f64 {
    1.0
}

impl FactorDemandModel {
    /// `4(k + ℓ)^{0.5}` on a 4×4 grid, wage falling from 1.2 to 0.6.
    pub fn demo_substitutes() -> Self {
        FactorDemandModel {
            capital: vec![0.0, 1.0, 2.0, 3.0],
            labor: vec![0.0, 1.0, 2.0, 3.0],
            production: Production::PerfectSubstitutes {
                scale: 4.0,
                gamma: 0.5,
            },
            output_price: 1.0,
            rental: 0.9,
            wages: vec![1.2, 0.6],
            initial: 0,
            shocked: 1,
            cost: CostSpec::Quadratic {
                weights: vec![0.05, 0.05],
            },
            substitutes: true,
        }
    }

    fn output(&self, ki: usize, li: usize, k: f64, l: f64) -> Result<f64> {
        Ok(match &self.production {
            Production::CobbDouglas { scale, alpha, beta } => {
                scale * k.powf(*alpha) * l.powf(*beta)
            }
            Production::PerfectSubstitutes { scale, gamma } => scale * (k + l).powf(*gamma),
            Production::Table { values } => {
                *values.get(ki).and_then(|r| r.get(li)).ok_or_else(|| {
                    Error::InvalidScenario("production table does not cover the grid".into())
                })?
            }
        })
    }

    pub fn build(&self, opts: &CheckOptions) -> Result<BuiltModel> {
        let ks = axis(&self.capital, "capital")?;
        let ls = axis(&self.labor, "labor")?;
        if ks.len() != self.capital.len() || ls.len() != self.labor.len() {
            return Err(Error::InvalidScenario(
                "factor grids must be strictly increasing".into(),
            ));
        }
        let n = self.wages.len();
        let theta_lo = state_index(self.initial, n, "initial wage")?;
        let theta_hi = state_index(self.shocked, n, "shocked wage")?;
        let l = GridLattice::product(vec![ks.clone(), ls.clone()])?;
        let mut f = Vec::with_capacity(l.len());
        for id in l.ids() {
            let idx = l.axis_index(id);
            let c = l.coords(id);
            let v = self.output(idx[0], idx[1], c[0], c[1])?;
            if !v.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "production is {v} at {}",
                    l.point(id)
                )));
            }
            f.push(v);
        }
        let check = tabulated(opts, max_abs(&f));
        let opts = &check;
        let shape = if self.substitutes {
            check_submodular(&l, &f, opts)
        } else {
            check_supermodular(&l, &f, opts)
        };
        let mut profile = vec![shape.with_note("production")];
        gate(&profile)?;
        let labels = self.wages.iter().map(|w| format!("w={w}")).collect();
        let order: Vec<Vec<f64>> = self.wages.iter().map(|w| vec![-w]).collect();
        let params = ParamPoset::from_vectors(labels, &order)?;
        let objective = Objective::tabulate(l.clone(), params, |x, t| {
            let id = l.id_of(x).expect("member");
            let c = x.coords();
            self.output_price * f[id] - self.rental * c[0] - self.wages[t] * c[1]
        })?;
        let natural = StaticProblem::new(
            objective,
            CostFunction::new(self.cost.clone())?,
            theta_lo,
            theta_hi,
        );
        let (problem, flipped) = if self.substitutes {
            (flip_dimensions(&natural, &[0])?, vec![0])
        } else {
            (natural, Vec::new())
        };
        let opts = &tabulated(opts, problem.objective.max_abs());
        profile.push(check_objective_supermodular(&problem.objective, opts).with_note("profit"));
        profile.push(check_increasing_differences(&problem.objective, opts).with_note("profit"));
        BuiltModel {
            name: "factor_demand".into(),
            objective: problem.objective,
            cost: problem.cost,
            theta_lo,
            theta_hi,
            x_lo: None,
            initial_set: None,
            new_set: None,
            flipped,
            profile,
            check: *opts,
        }
        .release()
    }
}

// ---------------------------------------------------------------------------
// Labor supply.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TaxSchedule {
    /// `rate · max(0, y − allowance)`.
    Linear {
        rate: f64,
        #[serde(default)]
        allowance: f64,
    },
    /// Tax at each hours grid point.
    Table { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Disutility {
    /// `κ x² / 2`.
    Quadratic {
        kappa: f64,
    },
    Table {
        values: Vec<f64>,
    },
}

/// Worker choosing hours under a sequence of successively flatter tax
/// schedules; `F(x, T) = wx − T(wx) − κ(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct LaborSupplyModel {
    pub hours: Vec<f64>,
    pub wage: f64,
    /// Ordered so that each schedule is flatter than the one before.
    pub schedules: Vec<TaxSchedule>,
    pub disutility: Disutility,
    pub initial: usize,
    pub shocked: usize,
    pub cost: CostSpec,
}

impl LaborSupplyModel {
    pub fn demo() -> Self {
        LaborSupplyModel {
            hours: (0..=8).map(f64::from).collect(),
            wage: 2.0,
            schedules: vec![
                TaxSchedule::Linear {
                    rate: 0.5,
                    allowance: 2.0,
                },
                TaxSchedule::Linear {
                    rate: 0.2,
                    allowance: 2.0,
                },
            ],
            disutility: Disutility::Quadratic { kappa: 0.4 },
            initial: 0,
            shocked: 1,
            cost: CostSpec::Quadratic { weights: vec![0.3] },
        }
    }

    fn taxes(&self, hours: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.schedules
            .iter()
            .map(|s| match s {
                TaxSchedule::Linear { rate, allowance } => Ok(hours
                    .iter()
                    .map(|h| rate * (self.wage * h - allowance).max(0.0))
                    .collect()),
                TaxSchedule::Table { values } if values.len() == hours.len() => Ok(values.clone()),
                TaxSchedule::Table { .. } => Err(Error::InvalidScenario(
                    "tax table length differs from the hours grid".into(),
                )),
            })
            .collect()
    }

    pub fn build(&self, opts: &CheckOptions) -> Result<BuiltModel> {
        let hours = axis(&self.hours, "hours")?;
        if hours.len() != self.hours.len() {
            return Err(Error::InvalidScenario(
                "hours grid must be strictly increasing".into(),
            ));
        }
        if !(self.wage > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "wage {} must be positive",
                self.wage
            )));
        }
        let k = self.schedules.len();
        let theta_lo = state_index(self.initial, k, "initial schedule")?;
        let theta_hi = state_index(self.shocked, k, "shocked schedule")?;
        let taxes = self.taxes(&hours)?;
        let kappa: Vec<f64> = match &self.disutility {
            Disutility::Quadratic { kappa } => hours.iter().map(|h| kappa * h * h / 2.0).collect(),
            Disutility::Table { values } if values.len() == hours.len() => values.clone(),
            Disutility::Table { .. } => {
                return Err(Error::InvalidScenario(
                    "disutility table length differs from the hours grid".into(),
                ))
            }
        };
        let mut profile = Vec::new();
        for s in 1..k {
            profile.push(check_flatter(&hours, &taxes[s - 1], &taxes[s], s, opts));
        }
        if profile.is_empty() {
            profile.push(PropertyReport::pass(Property::Flatter));
        }
        let l = GridLattice::product(vec![hours.clone()])?;
        let table = taxes
            .iter()
            .map(|t| {
                hours
                    .iter()
                    .enumerate()
                    .map(|(i, h)| self.wage * h - t[i] - kappa[i])
                    .collect()
            })
            .collect();
        let labels = (0..k).map(|s| format!("T{s}")).collect();
        let pairs: Vec<_> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
        let objective = Objective::from_table(l, ParamPoset::new(labels, &pairs)?, table)?;
        let opts = &tabulated(opts, objective.max_abs());
        profile.push(check_single_crossing(&objective, opts).with_note("earnings net of tax"));
        BuiltModel {
            name: "labor_supply".into(),
            objective,
            cost: CostFunction::new(self.cost.clone())?,
            theta_lo,
            theta_hi,
            x_lo: None,
            initial_set: None,
            new_set: None,
            flipped: Vec::new(),
            profile,
            check: *opts,
        }
        .release()
    }
}

/// `T̄(y′) − T̄(y) ≤ T(y′) − T(y)` for every pair of grid earnings `y ≤ y′`.
fn check_flatter(
    hours: &[f64],
    steep: &[f64],
    flat: &[f64],
    s: usize,
    opts: &CheckOptions,
) -> PropertyReport {
    for i in 0..hours.len() {
        for j in i + 1..hours.len() {
            let (df, ds) = (flat[j] - flat[i], steep[j] - steep[i]);
            if !opts.le(df, ds) {
                let w = Witness::new()
                    .point("x", &[hours[i]])
                    .point("x'", &[hours[j]])
                    .value("flatter increase", df)
                    .value("steeper increase", ds);
                return PropertyReport::fail(Property::Flatter, w)
                    .with_note(format!("schedule {s}"));
            }
        }
    }
    PropertyReport::pass(Property::Flatter).with_note(format!("schedule {s}"))
}

// ---------------------------------------------------------------------------
// Investment.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct InvestmentState {
    pub price: f64,
    pub productivity: f64,
    pub rental: f64,
}

/// Firm choosing a capital stock with `F(k) = p η k^a − r k`, ordered by
/// `(p, η, −r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct InvestmentModel {
    pub capital: Vec<f64>,
    pub exponent: f64,
    pub states: Vec<InvestmentState>,
    pub initial: usize,
    pub shocked: usize,
    pub cost: CostSpec,
}

impl InvestmentModel {
    /// A productivity gain with a minimum investment size of 3.
    pub fn demo_lumpy() -> Self {
        InvestmentModel {
            capital: (0..=8).map(f64::from).collect(),
            exponent: 0.5,
            states: vec![
                InvestmentState {
                    price: 1.0,
                    productivity: 2.0,
                    rental: 0.5,
                },
                InvestmentState {
                    price: 1.0,
                    productivity: 4.0,
                    rental: 0.5,
                },
            ],
            initial: 0,
            shocked: 1,
            cost: CostSpec::Lumpy {
                min_size: 3.0,
                weight: 0.05,
            },
        }
    }

    /// The investment size below which the lumpy cost is infinite, if any.
    pub fn minimum_size(&self) -> Option<f64> {
        match &self.cost {
            CostSpec::Lumpy { min_size, .. } => Some(*min_size),
            _ => None,
        }
    }

    pub fn build(&self, opts: &CheckOptions) -> Result<BuiltModel> {
        let ks = axis(&self.capital, "capital")?;
        if ks.len() != self.capital.len() || ks[0] < 0.0 {
            return Err(Error::InvalidScenario(
                "capital grid must be nonnegative and strictly increasing".into(),
            ));
        }
        let n = self.states.len();
        let theta_lo = state_index(self.initial, n, "initial state")?;
        let theta_hi = state_index(self.shocked, n, "shocked state")?;
        let l = GridLattice::product(vec![ks])?;
        let prod_params = ParamPoset::from_vectors(
            self.states
                .iter()
                .map(|s| format!("eta={}", s.productivity))
                .collect(),
            &self
                .states
                .iter()
                .map(|s| vec![s.productivity])
                .collect::<Vec<_>>(),
        )?;
        let a = self.exponent;
        let f = Objective::tabulate(l.clone(), prod_params, |x, t| {
            self.states[t].productivity * x.coords()[0].powf(a)
        })?;
        let mut profile = vec![
            check_increasing_differences(&f, &tabulated(opts, f.max_abs())).with_note("production"),
        ];
        let labels = self
            .states
            .iter()
            .map(|s| format!("p={},eta={},r={}", s.price, s.productivity, s.rental))
            .collect();
        let order: Vec<Vec<f64>> = self
            .states
            .iter()
            .map(|s| vec![s.price, s.productivity, -s.rental])
            .collect();
        let objective =
            Objective::tabulate(l, ParamPoset::from_vectors(labels, &order)?, |x, t| {
                let s = &self.states[t];
                let k = x.coords()[0];
                s.price * s.productivity * k.powf(a) - s.rental * k
            })?;
        let opts = &tabulated(opts, objective.max_abs());
        profile.push(check_increasing_differences(&objective, opts).with_note("profit"));
        BuiltModel {
            name: "investment".into(),
            objective,
            cost: CostFunction::new(self.cost.clone())?,
            theta_lo,
            theta_hi,
            x_lo: None,
            initial_set: None,
            new_set: None,
            flipped: Vec::new(),
            profile,
            check: *opts,
        }
        .release()
    }
}

// ---------------------------------------------------------------------------
// Wishful thinking.

/// Increasing felicity function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Felicity {
    Linear {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// `scale · ln(v + shift)`.
    Log {
        #[serde(default)]
        shift: f64,
        #[serde(default = "unit")]
        scale: f64,
    },
    /// `scale · (1 − e^{−αv}) / α`.
    Cara {
        alpha: f64,
        #[serde(default = "unit")]
        scale: f64,
    },
    /// `scale · √v`.
    Sqrt {
        #[serde(default = "unit")]
        scale: f64,
    },
}

impl Felicity {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            Felicity::Linear { scale } => scale * v,
            Felicity::Log { shift, scale } => scale * (v + shift).ln(),
            Felicity::Cara { alpha, scale } => -scale * (-alpha * v).exp_m1() / alpha,
            Felicity::Sqrt { scale } => scale * v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BeliefCost {
    /// `scale · KL(G ‖ G₀)`.
    KullbackLeibler {
        #[serde(default = "unit")]
        scale: f64,
    },
    Zero,
    /// Any cost over the `(c, −G(y_1..y_{N−1}))` differences.
    Custom {
        spec: CostSpec,
    },
}

/// A finite set of CDFs on a common support, closed under pointwise max
/// and min.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSet {
    support: Vec<f64>,
    cdfs: Vec<Vec<f64>>,
}

const CDF_TOL: f64 = 1e-12;

impl BeliefSet {
    /// Validates the CDFs and closes the set under pointwise max/min.
    pub fn closure(support: &[f64], cdfs: &[Vec<f64>]) -> Result<Self> {
        if support.len() < 2 || support.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidScenario(
                "income support must have two or more increasing points".into(),
            ));
        }
        if cdfs.is_empty() {
            return Err(Error::InvalidScenario("belief set is empty".into()));
        }
        for g in cdfs {
            validate_cdf(g, support.len())?;
        }
        let mut set: Vec<Vec<f64>> = Vec::new();
        let push = |set: &mut Vec<Vec<f64>>, g: Vec<f64>| {
            if !set.contains(&g) {
                set.push(g);
                true
            } else {
                false
            }
        };
        for g in cdfs {
            push(&mut set, g.clone());
        }
        loop {
            let mut grew = false;
            let n = set.len();
            for a in 0..n {
                for b in a + 1..n {
                    let hi: Vec<f64> = set[a].iter().zip(&set[b]).map(|(x, y)| x.max(*y)).collect();
                    let lo: Vec<f64> = set[a].iter().zip(&set[b]).map(|(x, y)| x.min(*y)).collect();
                    grew |= push(&mut set, hi);
                    grew |= push(&mut set, lo);
                }
            }
            if !grew {
                break;
            }
        }
        set.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(BeliefSet {
            support: support.to_vec(),
            cdfs: set,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn cdfs(&self) -> &[Vec<f64>] {
        &self.cdfs
    }

    /// The pointwise-smallest CDF, which dominates every other member.
    pub fn most_optimistic(&self) -> Vec<f64> {
        let mut g = self.cdfs[0].clone();
        for h in &self.cdfs[1..] {
            for (a, b) in g.iter_mut().zip(h) {
                *a = a.min(*b);
            }
        }
        g
    }
}

fn validate_cdf(g: &[f64], n: usize) -> Result<()> {
    if g.len() != n {
        return Err(Error::InvalidScenario(format!(
            "CDF has {} entries, support has {n}",
            g.len()
        )));
    }
    let ok = g.iter().all(|v| (0.0..=1.0).contains(v))
        && g.windows(2).all(|w| w[0] <= w[1])
        && (g[n - 1] - 1.0).abs() <= CDF_TOL;
    if !ok {
        return Err(Error::InvalidScenario(format!("{g:?} is not a CDF")));
    }
    Ok(())
}

/// `G ≤₁ H`: `H` first-order dominates `G`, i.e. `G ≥ H` pointwise.
pub fn fosd_leq(g: &[f64], h: &[f64]) -> bool {
    g.iter().zip(h).all(|(a, b)| a >= b)
}

/// Saver with beliefs over income; choosing a more optimistic belief
/// costs `C(G − G₀)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WishfulModel {
    pub wealth: f64,
    pub interest: f64,
    pub consumption: Vec<f64>,
    pub incomes: Vec<f64>,
    pub beliefs: Vec<Vec<f64>>,
    /// Index of the realist's belief `G₀` in `beliefs`.
    pub realist: usize,
    pub u1: Felicity,
    pub u2: Felicity,
    pub belief_cost: BeliefCost,
}

/// Embedded wishful-thinking problem.
#[derive(Debug, Clone)]
pub struct WishfulProblem {
    pub beliefs: BeliefSet,
    pub realist: Vec<f64>,
    pub optimist: Vec<f64>,
    pub problem: StaticProblem,
    pub profile: Vec<PropertyReport>,
    pub check: CheckOptions,
}

/// Realist, wishful and optimist choices.
#[derive(Debug, Clone, Serialize)]
pub struct WishfulOutcome {
    pub c0: f64,
    pub c_hat: f64,
    pub c_bar: f64,
    pub g0: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub g_bar: Vec<f64>,
    pub report: TheoremReport,
}

impl WishfulModel {
    /// Three income outcomes, four beliefs, moderate KL cost.
    pub fn demo() -> Self {
        WishfulModel {
            wealth: 4.0,
            interest: 0.0,
            consumption: (0..=8).map(|i| 0.5 * f64::from(i)).collect(),
            incomes: vec![1.0, 2.0, 3.0],
            beliefs: vec![
                vec![1.0 / 3.0, 2.0 / 3.0, 1.0],
                vec![0.25, 0.5, 1.0],
                vec![0.2, 0.6, 1.0],
                vec![0.125, 0.25, 1.0],
            ],
            realist: 0,
            u1: Felicity::Log {
                shift: 0.5,
                scale: 1.0,
            },
            u2: Felicity::Log {
                shift: 0.5,
                scale: 1.0,
            },
            belief_cost: BeliefCost::KullbackLeibler { scale: 1.0 },
        }
    }

    fn coords(c: f64, g: &[f64]) -> Point {
        let mut v = vec![c];
        v.extend(g[..g.len() - 1].iter().map(|x| -x + 0.0));
        Point::new(v)
    }

    fn cdf_of(p: &Point) -> Vec<f64> {
        let mut g: Vec<f64> = p.coords()[1..].iter().map(|x| -x + 0.0).collect();
        g.push(1.0);
        g
    }

    fn utility(&self, c: f64, g: &[f64]) -> f64 {
        let save = (1.0 + self.interest) * (self.wealth - c);
        let mut prev = 0.0;
        let mut eu = 0.0;
        for (y, &cdf) in self.incomes.iter().zip(g) {
            let pmf = cdf - prev;
            prev = cdf;
            if pmf > 0.0 {
                eu += pmf * self.u2.eval(save + y);
            }
        }
        self.u1.eval(c) + eu
    }

    pub fn build(&self, opts: &CheckOptions) -> Result<WishfulProblem> {
        if !(self.wealth > 0.0) || !(self.interest > -1.0) {
            return Err(Error::InvalidScenario(
                "wealth must be positive and interest above −1".into(),
            ));
        }
        let cs = axis(&self.consumption, "consumption")?;
        if cs[0] < 0.0 || cs[cs.len() - 1] > self.wealth {
            return Err(Error::InvalidScenario(
                "consumption grid must lie in [0, wealth]".into(),
            ));
        }
        let beliefs = BeliefSet::closure(&self.incomes, &self.beliefs)?;
        let g0 = self
            .beliefs
            .get(self.realist)
            .ok_or_else(|| {
                Error::InvalidScenario(format!("realist index {} out of range", self.realist))
            })?
            .clone();
        let g_bar = beliefs.most_optimistic();
        let n = self.incomes.len();
        let mut axes = vec![cs.clone()];
        for j in 0..n - 1 {
            axes.push(axis(
                &beliefs
                    .cdfs()
                    .iter()
                    .map(|g| -g[j] + 0.0)
                    .collect::<Vec<_>>(),
                "belief",
            )?);
        }
        let members: Vec<Point> = cs
            .iter()
            .flat_map(|&c| beliefs.cdfs().iter().map(move |g| Self::coords(c, g)))
            .collect();
        let l = GridLattice::from_members(axes, &members)?;

        let mut profile = vec![
            concavity("u1", &self.u1, cs.iter().copied(), opts),
            concavity(
                "u2",
                &self.u2,
                cs.iter().flat_map(|c| {
                    let save = (1.0 + self.interest) * (self.wealth - c);
                    self.incomes.iter().map(move |y| save + y)
                }),
                opts,
            ),
        ];
        let objective = Objective::tabulate(l.clone(), ParamPoset::chain(1)?, |x, _| {
            self.utility(x.coords()[0], &Self::cdf_of(x))
        })?;
        if let Some(v) = objective.row(0).iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "expected utility {v} on the grid"
            )));
        }
        let opts = &tabulated(opts, objective.max_abs());
        profile.push(check_supermodular(&l, objective.row(0), opts).with_note("expected utility"));
        gate(&profile)?;

        let cost = match &self.belief_cost {
            BeliefCost::KullbackLeibler { scale } => {
                CostFunction::new(CostSpec::KullbackLeibler {
                    reference: g0[..n - 1].to_vec(),
                    scale: *scale,
                    offset: 1,
                })?
            }
            BeliefCost::Zero => CostFunction::zero(),
            BeliefCost::Custom { spec } => CostFunction::new(spec.clone())?,
        };
        let realist_set = l.restrict(|p| fosd_leq(&Self::cdf_of(p), &g0))?;
        let on_g0 = l.restrict(|p| Self::cdf_of(p) == g0)?;
        let ids: Vec<_> = l.ids().filter(|&i| on_g0.contains(&l.point(i))).collect();
        let best = crate::static_solver::argmax_ids(&ids, |i| objective.value(i, 0))?;
        let x_lo = l.point(best.first());
        let problem = StaticProblem::new(objective, cost, 0, 0)
            .with_x_lo(x_lo)
            .with_sets(realist_set, l);
        Ok(WishfulProblem {
            beliefs,
            realist: g0,
            optimist: g_bar,
            problem,
            profile,
            check: *opts,
        })
    }
}

fn concavity(
    name: &str,
    u: &Felicity,
    args: impl Iterator<Item = f64>,
    opts: &CheckOptions,
) -> PropertyReport {
    let mut v: Vec<f64> = args.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    for w in v.windows(3) {
        let s1 = (u.eval(w[1]) - u.eval(w[0])) / (w[1] - w[0]);
        let s2 = (u.eval(w[2]) - u.eval(w[1])) / (w[2] - w[1]);
        // Slopes of a linear felicity differ by rounding only.
        let slack = 1e-12 * s1.abs().max(1.0);
        if !(s1 > 0.0 && s2 > 0.0) || !opts.le(s2, s1 + slack) {
            let wit = Witness::new()
                .point("v", w)
                .value("left slope", s1)
                .value("right slope", s2);
            return PropertyReport::fail(Property::Concavity, wit).with_note(name.to_string());
        }
    }
    PropertyReport::pass(Property::Concavity).with_note(name.to_string())
}

/// Realist `c₀`, wishful `(ĉ, Ĝ)` from the constraint-shift selection, and
/// optimist `c̄ = ĉ ∨ c″`; checks `c̄ ≥ ĉ ≥ c₀` and `Ḡ ≥₁ Ĝ ≥₁ G₀`.
pub fn wishful_check(model: &WishfulModel, opts: &SolveOptions) -> Result<WishfulOutcome> {
    let built = model.build(&opts.check)?;
    let sel = theorem1_star_select(
        &built.problem,
        &SolveOptions {
            check: built.check,
            ..*opts
        },
    )?;
    let l = built.problem.objective.lattice();
    let obj = &built.problem.objective;
    let g_hat = WishfulModel::cdf_of(&sel.x_hat);
    let c0 = sel.x_lo.coords()[0];
    let c_hat = sel.x_hat.coords()[0];

    let optimist = l.restrict(|p| WishfulModel::cdf_of(p) == built.optimist)?;
    let opt_ids = optimist.embed_into(l)?;
    let best = argmax(l, |i| {
        if opt_ids.contains(&i) {
            obj.value(i, 0)
        } else {
            f64::NEG_INFINITY
        }
    })?;
    let c_second = l.coords(best.first())[0];
    let c_bar = c_hat.max(c_second);
    let bar_id = l.require(&WishfulModel::coords(c_bar, &built.optimist))?;

    let mut hyps = built.profile.clone();
    hyps.extend(sel.hypotheses.iter().cloned());
    let mut r = TheoremReport::new("wishful", hyps);
    r.point("x_lo", &sel.x_lo)
        .point("x_hat", &sel.x_hat)
        .point("x_bar", &l.point(bar_id));
    r.expect(
        sel.conclusion_holds(),
        "the wishful selection is not certified",
    )
    .expect(best.contains(bar_id), "optimist consumption is not optimal")
    .expect(
        c0 <= c_hat && c_hat <= c_bar,
        "consumption is not ordered c0 ≤ c_hat ≤ c_bar",
    )
    .expect(
        fosd_leq(&built.realist, &g_hat) && fosd_leq(&g_hat, &built.optimist),
        "beliefs are not ordered G0 ≤ G_hat ≤ G_bar",
    );
    Ok(WishfulOutcome {
        c0,
        c_hat,
        c_bar,
        g0: built.realist,
        g_hat,
        g_bar: built.optimist,
        report: r,
    })
}

/// Result of one application demo against its expected behavior.
#[derive(Debug, Clone, Serialize)]
pub struct DemoOutcome {
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
    pub reports: Vec<TheoremReport>,
}

pub const DEMOS: &[&str] = &[
    "pricing",
    "factor_demand",
    "labor_supply",
    "investment",
    "wishful",
];

fn coords_of(path: &crate::report::NamedPath) -> Vec<Vec<f64>> {
    path.points
        .iter()
        .cloned()
        .chain(path.continuation.clone())
        .collect()
}

/// Runs a named demo model and checks the behavior it is meant to show.
pub fn run_demo(name: &str, delta: f64) -> Result<DemoOutcome> {
    let opts = CheckOptions::exact();
    let mut details = Vec::new();
    let mut reports = Vec::new();
    let passed = match name {
        "pricing" => {
            // Marginal cost rises: the monotonized optimal price path climbs
            // from the old price towards the new frictionless price.
            let b = PricingModel::demo().build(&opts)?;
            let r = crate::dynamic_solver::theorem4_check(&b.dynamic(delta), &b.solve_options())?;
            let lo = r.get_point("x_lo").map(|p| p[0]).unwrap_or(f64::NAN);
            let hi = r.get_point("x_bar").map(|p| p[0]).unwrap_or(f64::NAN);
            let path: Vec<f64> = r
                .paths
                .iter()
                .find(|p| p.name == "monotonized")
                .map(|p| coords_of(p).iter().map(|c| c[0]).collect())
                .unwrap_or_default();
            let ordered = std::iter::once(lo)
                .chain(path.iter().copied())
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[0] <= w[1])
                && path.iter().all(|&p| p <= hi);
            details.push(format!("x_lo = {lo}, x_bar = {hi}"));
            details.push(format!("price path = {path:?}"));
            let ok = r.holds() && ordered && !path.is_empty();
            reports.push(r);
            ok
        }
        "factor_demand" => {
            // Substitutes: flip capital, so a wage drop moves (−k, ℓ) up.
            let b = FactorDemandModel::demo_substitutes().build(&opts)?;
            let res =
                crate::lechatelier::theorem2_select(&b.static_problem(), None, &b.solve_options())?;
            let (lo, hat, bar) = (
                b.natural(&res.x_lo),
                b.natural(&res.x_hat),
                b.natural(&res.x_bar),
            );
            let (k0, l0) = (lo.coords()[0], lo.coords()[1]);
            let moves = |p: &Point| p.coords()[0] <= k0 && p.coords()[1] >= l0;
            let r3 = crate::dynamic_solver::theorem3_check(&b.dynamic(delta), &b.solve_options())?;
            let sandwiched: Vec<Point> = r3
                .paths
                .iter()
                .find(|p| p.name == "sandwiched")
                .map(|p| {
                    coords_of(p)
                        .into_iter()
                        .map(|c| b.natural(&Point::new(c)))
                        .collect()
                })
                .unwrap_or_default();
            details.push(format!(
                "(k, l): initial {lo}, short run {hat}, long run {bar}"
            ));
            details.push(format!(
                "dynamic path (k, l) = {}",
                sandwiched
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            let ok = res.conclusion_holds()
                && moves(&hat)
                && moves(&bar)
                && bar.coords()[0] < k0
                && bar.coords()[1] > l0
                && r3.holds()
                && !sandwiched.is_empty()
                && sandwiched.iter().all(moves);
            reports.push(crate::lechatelier::lechatelier_report("thm2", &res));
            reports.push(r3);
            ok
        }
        "labor_supply" => {
            let b = LaborSupplyModel::demo().build(&opts)?;
            let res =
                crate::lechatelier::theorem2_select(&b.static_problem(), None, &b.solve_options())?;
            let r3 = crate::dynamic_solver::theorem3_check(&b.dynamic(delta), &b.solve_options())?;
            details.push(format!(
                "hours: initial {}, short run {}, long run {}",
                res.x_lo, res.x_hat, res.x_bar
            ));
            let ok = res.conclusion_holds() && res.x_hat.geq(&res.x_lo) && r3.holds();
            reports.push(crate::lechatelier::lechatelier_report("thm2", &res));
            reports.push(r3);
            ok
        }
        "investment" => {
            // Lumpy cost: minimally monotone only, so the join selection
            // applies and the short-run/long-run bound is refused.
            let m = InvestmentModel::demo_lumpy();
            let b = m.build(&opts)?;
            let r1 = crate::static_solver::theorem1_check(&b.static_problem(), &b.solve_options())?;
            let gate = crate::lechatelier::theorem2_check(&b.static_problem(), &b.solve_options());
            let size = m.minimum_size().unwrap_or(f64::NAN);
            let inside = match &gate {
                Err(Error::Hypothesis(r)) if r.property == Property::Monotone => r
                    .witness
                    .as_ref()
                    .and_then(|w| w.get_point("ε'"))
                    .map(|e| e[0] > 0.0 && e[0] < size),
                _ => None,
            };
            details.push(format!("join selection holds: {}", r1.holds()));
            details.push(match &gate {
                Err(Error::Hypothesis(r)) => {
                    format!("short-run/long-run gate rejected: {}", r.summary())
                }
                Err(e) => format!("short-run/long-run gate error: {e}"),
                Ok(r) => format!("short-run/long-run gate passed unexpectedly: {}", r.verdict),
            });
            reports.push(r1.clone());
            reports.push(crate::static_solver::rejected_or("thm2", gate)?);
            r1.holds() && inside == Some(true)
        }
        "wishful" => {
            let out = wishful_check(&WishfulModel::demo(), &SolveOptions::default())?;
            details.push(format!(
                "c0 = {}, c_hat = {}, c_bar = {}",
                out.c0, out.c_hat, out.c_bar
            ));
            details.push(format!(
                "G0 = {:?}, G_hat = {:?}, G_bar = {:?}",
                out.g0, out.g_hat, out.g_bar
            ));
            let ok = out.report.holds()
                && out.c0 <= out.c_hat
                && out.c_hat <= out.c_bar
                && fosd_leq(&out.g0, &out.g_hat)
                && fosd_leq(&out.g_hat, &out.g_bar);
            reports.push(out.report);
            ok
        }
        other => return Err(Error::InvalidScenario(format!("unknown demo {other:?}"))),
    };
    Ok(DemoOutcome {
        name: name.into(),
        passed,
        details,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostTable;
    use crate::lechatelier::theorem2_select;
    use crate::properties::{check_minimally_monotone, check_monotone};
    use crate::static_solver::theorem1_select;

    fn exact() -> CheckOptions {
        CheckOptions::exact()
    }

    #[test]
    fn pricing_linear_passes_profile() {
        let mut m = PricingModel::demo();
        m.states[1].marginal_cost = 2.0;
        let b = m.build(&exact()).unwrap();
        assert!(b.profile.iter().all(|r| r.holds));
        let sel = theorem2_select(&b.static_problem(), None, &b.solve_options()).unwrap();
        assert!(sel.conclusion_holds());
        assert!(sel.x_bar.coords()[0] >= sel.x_lo.coords()[0]);
    }

    #[test]
    fn pricing_rejects_nonpositive_demand() {
        let mut m = PricingModel::demo();
        m.demand = Demand::Linear { intercept: 5.0 };
        assert!(
            matches!(m.build(&exact()), Err(Error::Hypothesis(r)) if r.property == Property::Positivity)
        );
    }

    #[test]
    fn cobb_douglas_is_supermodular() {
        let m = FactorDemandModel {
            production: Production::CobbDouglas {
                scale: 3.0,
                alpha: 0.3,
                beta: 0.4,
            },
            substitutes: false,
            ..FactorDemandModel::demo_substitutes()
        };
        let b = m.build(&exact()).unwrap();
        assert_eq!(b.profile[0].property, Property::Supermodular);
    }

    #[test]
    fn substitutes_flip_and_move_apart() {
        let m = FactorDemandModel::demo_substitutes();
        let b = m.build(&exact()).unwrap();
        let res = theorem2_select(&b.static_problem(), None, &b.solve_options()).unwrap();
        assert!(res.conclusion_holds());
        let (lo, hat, bar) = (
            b.natural(&res.x_lo),
            b.natural(&res.x_hat),
            b.natural(&res.x_bar),
        );
        assert!(hat.coords()[1] >= lo.coords()[1] && bar.coords()[1] > lo.coords()[1]);
        assert!(hat.coords()[0] <= lo.coords()[0] && bar.coords()[0] < lo.coords()[0]);
    }

    #[test]
    fn flip_twice_is_identity() {
        let b = FactorDemandModel::demo_substitutes()
            .build(&exact())
            .unwrap();
        let p = b.static_problem();
        let back = flip_dimensions(&flip_dimensions(&p, &[0, 1]).unwrap(), &[0, 1]).unwrap();
        let l = p.objective.lattice();
        for id in l.ids() {
            let x = l.point(id);
            for t in 0..2 {
                assert_eq!(
                    p.objective.eval(&x, t).unwrap(),
                    back.objective.eval(&x, t).unwrap()
                );
            }
        }
        let d = [1.0, -2.0];
        assert_eq!(p.cost.eval(&d).unwrap(), back.cost.eval(&d).unwrap());
    }

    #[test]
    fn labor_rejects_steeper_schedule() {
        let mut m = LaborSupplyModel::demo();
        m.schedules.reverse();
        assert!(
            matches!(m.build(&exact()), Err(Error::Hypothesis(r)) if r.property == Property::Flatter)
        );
        let b = LaborSupplyModel::demo().build(&exact()).unwrap();
        assert!(
            theorem2_select(&b.static_problem(), None, &b.solve_options())
                .unwrap()
                .conclusion_holds()
        );
    }

    #[test]
    fn lumpy_investment_splits_the_theorems() {
        let m = InvestmentModel::demo_lumpy();
        let b = m.build(&exact()).unwrap();
        assert!(theorem1_select(&b.static_problem(), &b.solve_options())
            .unwrap()
            .conclusion_holds());
        match theorem2_select(&b.static_problem(), None, &b.solve_options()) {
            Err(Error::Hypothesis(r)) => {
                assert_eq!(r.property, Property::Monotone);
                let inner = r.witness.as_ref().unwrap().get_point("ε'").unwrap()[0];
                assert!(inner > 0.0 && inner < m.minimum_size().unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kl_worked_values() {
        let g0 = [1.0 / 3.0, 2.0 / 3.0, 1.0];
        let g = [0.25, 0.25, 1.0];
        let h = [0.125, 0.25, 1.0];
        let beliefs =
            BeliefSet::closure(&[1.0, 2.0, 3.0], &[g0.to_vec(), g.to_vec(), h.to_vec()]).unwrap();
        assert_eq!(beliefs.cdfs().len(), 3);
        let pts: Vec<Point> = beliefs
            .cdfs()
            .iter()
            .map(|c| Point::new(vec![-c[0] + 0.0, -c[1] + 0.0]))
            .collect();
        let axes = (0..2)
            .map(|j| axis(&pts.iter().map(|p| p.coords()[j]).collect::<Vec<_>>(), "b").unwrap())
            .collect();
        let l = GridLattice::from_members(axes, &pts).unwrap();
        let kl = CostFunction::new(CostSpec::KullbackLeibler {
            reference: g0[..2].to_vec(),
            scale: 1.0,
            offset: 0,
        })
        .unwrap();
        let eps = |c: &[f64]| [g0[0] - c[0], g0[1] - c[1]];
        let diff = kl.eval(&eps(&g)).unwrap() - kl.eval(&eps(&h)).unwrap();
        assert!((diff - 0.25 * 2f64.ln()).abs() < 1e-12);
        let table = CostTable::new(&kl, &l).unwrap();
        assert!(!check_monotone(&table, &exact()).holds);
        assert!(check_minimally_monotone(&table, &exact()).holds);
    }

    #[test]
    fn wishful_demo_orders() {
        let out = wishful_check(&WishfulModel::demo(), &SolveOptions::default()).unwrap();
        assert!(out.report.holds(), "{:?}", out.report.notes);
        assert!(out.c0 <= out.c_hat && out.c_hat <= out.c_bar);
    }

    #[test]
    fn wishful_extremes() {
        let free = WishfulModel {
            belief_cost: BeliefCost::Zero,
            ..WishfulModel::demo()
        };
        let out = wishful_check(&free, &SolveOptions::default()).unwrap();
        assert!(out.report.holds());
        assert_eq!(out.g_hat, out.g_bar);
        assert_eq!(out.c_hat, out.c_bar);
        let dear = WishfulModel {
            belief_cost: BeliefCost::KullbackLeibler { scale: 1e6 },
            ..WishfulModel::demo()
        };
        let out = wishful_check(&dear, &SolveOptions::default()).unwrap();
        assert!(out.report.holds());
        assert_eq!(out.g_hat, out.g0);
        assert_eq!(out.c_hat, out.c0);
    }

    #[test]
    fn demos_behave() {
        for d in DEMOS {
            let out = run_demo(d, 0.9).unwrap();
            assert!(out.passed, "{d}: {:?}", out.details);
        }
    }
}
