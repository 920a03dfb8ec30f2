//! JSON scenario documents: either raw lattice/objective/cost blocks or a
//! model block, plus optional dynamic and lottery blocks.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, CostSpec};
use crate::dynamic_solver::{DynamicScenario, Horizon};
use crate::error::{Error, Result};
use crate::lattice::{GridLattice, ParamPoset, Point};
use crate::models::{
    BuiltModel, FactorDemandModel, InvestmentModel, LaborSupplyModel, PricingModel, WishfulModel,
};
use crate::objective::Objective;
use crate::properties::CheckOptions;
use crate::static_solver::StaticProblem;
use crate::stochastic::{CostLottery, LotteryState, Utility};

/// A parameter value by position or by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum ParamRef {
    Index(usize),
    Label(String),
}

impl ParamRef {
    fn resolve(&self, params: &ParamPoset) -> Result<usize> {
        match self {
            ParamRef::Index(i) if *i < params.len() => Ok(*i),
            ParamRef::Index(i) => Err(Error::InvalidScenario(format!(
                "parameter index {i} out of range"
            ))),
            ParamRef::Label(s) => params
                .labels()
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::InvalidScenario(format!("unknown parameter label {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Sorted coordinate values per dimension.
    pub axes: Vec<Vec<f64>>,
    /// Explicit members; the full product grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<f64>>>,
}

impl LatticeConfig {
    pub fn build(&self) -> Result<GridLattice> {
        match &self.members {
            None => GridLattice::product(self.axes.clone()),
            Some(m) => {
                let pts: Vec<Point> = m.iter().map(|c| Point::new(c.clone())).collect();
                GridLattice::from_members(self.axes.clone(), &pts)
            }
        }
    }

    pub fn of(l: &GridLattice) -> Self {
        LatticeConfig {
            axes: l.axes().to_vec(),
            members: (!l.is_full_grid()).then(|| l.ids().map(|i| l.coords(i).to_vec()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderConfig {
    /// Labels in increasing order.
    Chain,
    /// Generating pairs `a ≤ b`, closed transitively.
    Generators { pairs: Vec<(ParamRef, ParamRef)> },
    /// Product order on one vector per label.
    Vectors { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ParameterConfig {
    pub labels: Vec<String>,
    pub order: OrderConfig,
}

impl ParameterConfig {
    pub fn build(&self) -> Result<ParamPoset> {
        let labels = self.labels.clone();
        match &self.order {
            OrderConfig::Chain => {
                let k = labels.len();
                let pairs: Vec<_> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
                ParamPoset::new(labels, &pairs)
            }
            OrderConfig::Generators { pairs } => {
                let lookup = ParamPoset::from_generators(labels.clone(), &[])?;
                let pairs = pairs
                    .iter()
                    .map(|(a, b)| Ok((a.resolve(&lookup)?, b.resolve(&lookup)?)))
                    .collect::<Result<Vec<_>>>()?;
                ParamPoset::from_generators(labels, &pairs)
            }
            OrderConfig::Vectors { values } => ParamPoset::from_vectors(labels, values),
        }
    }

    pub fn of(p: &ParamPoset) -> Self {
        let pairs = p
            .pairs()
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (ParamRef::Index(a), ParamRef::Index(b)))
            .collect();
        ParameterConfig {
            labels: p.labels().to_vec(),
            order: OrderConfig::Generators { pairs },
        }
    }
}

/// Objective tables list members in lattice order: lexicographic in the
/// coordinates, first dimension slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ObjectiveConfig {
    /// One row per parameter value, one entry per member.
    Table { values: Vec<Vec<f64>> },
    /// `−Σ w_i (x_i − target_i(θ))²`, one target vector per parameter.
    Quadratic {
        targets: Vec<Vec<f64>>,
        #[serde(default = "unit_weights")]
        weights: Vec<f64>,
    },
    /// `φ(x) + θ·x` with `φ` per member and one slope vector per parameter.
    LinearInTheta {
        base: Vec<f64>,
        slopes: Vec<Vec<f64>>,
    },
}

fn unit_weights() -> Vec<f64> {
    vec![1.0]
}

impl ObjectiveConfig {
    pub fn build(&self, l: &GridLattice, params: ParamPoset) -> Result<Objective> {
        let per_param = |n: usize, what: &str| -> Result<()> {
            if n != params.len() {
                return Err(Error::InvalidObjective(format!(
                    "{n} {what} for {} parameter values",
                    params.len()
                )));
            }
            Ok(())
        };
        match self {
            ObjectiveConfig::Table { values } => {
                Objective::from_table(l.clone(), params, values.clone())
            }
            ObjectiveConfig::Quadratic { targets, weights } => {
                per_param(targets.len(), "target vectors")?;
                let w = |i: usize| {
                    if weights.len() == 1 {
                        weights[0]
                    } else {
                        weights[i]
                    }
                };
                if weights.len() != 1 && weights.len() != l.dims() {
                    return Err(Error::InvalidObjective(
                        "one weight, or one per dimension".into(),
                    ));
                }
                if targets.iter().any(|t| t.len() != l.dims()) {
                    return Err(Error::DimensionMismatch {
                        expected: l.dims(),
                        got: targets[0].len(),
                    });
                }
                Objective::tabulate(l.clone(), params, |x, t| {
                    -x.coords()
                        .iter()
                        .enumerate()
                        .map(|(i, v)| w(i) * (v - targets[t][i]).powi(2))
                        .sum::<f64>()
                })
            }
            ObjectiveConfig::LinearInTheta { base, slopes } => {
                per_param(slopes.len(), "slope vectors")?;
                if base.len() != l.len() {
                    return Err(Error::InvalidObjective(format!(
                        "{} base values for {} members",
                        base.len(),
                        l.len()
                    )));
                }
                if slopes.iter().any(|s| s.len() != l.dims()) {
                    return Err(Error::DimensionMismatch {
                        expected: l.dims(),
                        got: slopes[0].len(),
                    });
                }
                let values = slopes
                    .iter()
                    .map(|s| {
                        l.ids()
                            .map(|i| {
                                base[i] + l.coords(i).iter().zip(s).map(|(x, a)| x * a).sum::<f64>()
                            })
                            .collect()
                    })
                    .collect();
                Objective::from_table(l.clone(), params, values)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub members: Vec<Vec<f64>>,
}

impl SetConfig {
    fn build(&self, ambient: &GridLattice) -> Result<GridLattice> {
        let pts: Vec<Point> = self.members.iter().map(|c| Point::new(c.clone())).collect();
        GridLattice::from_members(ambient.axes().to_vec(), &pts)
    }

    fn of(l: &GridLattice) -> Self {
        SetConfig {
            members: l.ids().map(|i| l.coords(i).to_vec()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DynamicConfig {
    pub delta: f64,
    /// Parameters for the first periods; the tail parameter applies after.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta_prefix: Vec<ParamRef>,
    /// Defaults to `theta_hi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_tail: Option<ParamRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cost_prefix: Vec<CostSpec>,
    /// Defaults to the scenario cost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_tail: Option<CostSpec>,
    /// Defaults to the initial optimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default = "default_report_horizon")]
    pub report_horizon: usize,
    #[serde(default = "default_horizon")]
    pub horizon: Horizon,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_report_horizon() -> usize {
    40
}

fn default_horizon() -> Horizon {
    Horizon::Infinite
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_max_iterations() -> usize {
    1_000_000
}

impl DynamicConfig {
    pub fn stationary(delta: f64) -> Self {
        DynamicConfig {
            delta,
            theta_prefix: Vec::new(),
            theta_tail: None,
            cost_prefix: Vec::new(),
            cost_tail: None,
            x0: None,
            report_horizon: default_report_horizon(),
            horizon: default_horizon(),
            tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
        }
    }

    fn of(s: &DynamicScenario) -> Self {
        DynamicConfig {
            delta: s.delta,
            theta_prefix: s.theta_prefix.iter().map(|&t| ParamRef::Index(t)).collect(),
            theta_tail: Some(ParamRef::Index(s.theta_tail)),
            cost_prefix: s.cost_prefix.iter().map(|c| c.spec().clone()).collect(),
            cost_tail: Some(s.cost_tail.spec().clone()),
            x0: s.x0.as_ref().map(|p| p.coords().to_vec()),
            report_horizon: s.report_horizon,
            horizon: s.horizon,
            tolerance: s.tolerance,
            max_iterations: s.max_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LotteryStateConfig {
    pub probability: f64,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LotteryConfig {
    pub states: Vec<LotteryStateConfig>,
    #[serde(default = "linear")]
    pub utility: Utility,
}

fn linear() -> Utility {
    Utility::Linear
}

impl LotteryConfig {
    pub fn build(&self) -> Result<CostLottery> {
        let states = self
            .states
            .iter()
            .map(|s| {
                Ok(LotteryState {
                    probability: s.probability,
                    cost: CostFunction::new(s.cost.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CostLottery::new(states, self.utility.clone())
    }

    fn of(l: &CostLottery) -> Self {
        LotteryConfig {
            states: l
                .states
                .iter()
                .map(|s| LotteryStateConfig {
                    probability: s.probability,
                    cost: s.cost.spec().clone(),
                })
                .collect(),
            utility: l.utility.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Pricing(PricingModel),
    FactorDemand(FactorDemandModel),
    LaborSupply(LaborSupplyModel),
    Investment(InvestmentModel),
    Wishful(WishfulModel),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Pricing(_) => "pricing",
            ModelConfig::FactorDemand(_) => "factor_demand",
            ModelConfig::LaborSupply(_) => "labor_supply",
            ModelConfig::Investment(_) => "investment",
            ModelConfig::Wishful(_) => "wishful",
        }
    }
}

/// The scenario document. Exactly one of the raw blocks (`lattice`,
/// `parameters`, `objective`, `cost`) or `model` is given.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParameterConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSpec>,
    /// Defaults to the first parameter value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_lo: Option<ParamRef>,
    /// Defaults to the last parameter value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_hi: Option<ParamRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_set: Option<SetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_set: Option<SetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamic: Option<DynamicConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lottery: Option<LotteryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
}

/// A resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub problem: StaticProblem,
    pub dynamic: Option<DynamicScenario>,
    pub lottery: Option<CostLottery>,
    /// Comparison slack: exact for raw tables, the builder's slack for
    /// models.
    pub check: CheckOptions,
    pub model: Option<BuiltModel>,
    pub wishful: Option<WishfulModel>,
}

impl ScenarioConfig {
    /// Parses JSON, reporting the path of the first offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config {
                path,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn json_schema() -> serde_json::Value {
        serde_json::to_value(schemars::schema_for!(ScenarioConfig)).expect("schema serializes")
    }

    /// A raw config reproducing a problem exactly.
    pub fn from_problem(
        problem: &StaticProblem,
        dynamic: Option<&DynamicScenario>,
        lottery: Option<&CostLottery>,
    ) -> Self {
        let obj = &problem.objective;
        ScenarioConfig {
            lattice: Some(LatticeConfig::of(obj.lattice())),
            parameters: Some(ParameterConfig::of(obj.params())),
            objective: Some(ObjectiveConfig::Table {
                values: obj.table().to_vec(),
            }),
            cost: Some(problem.cost.spec().clone()),
            theta_lo: Some(ParamRef::Index(problem.theta_lo)),
            theta_hi: Some(ParamRef::Index(problem.theta_hi)),
            x_lo: problem.x_lo.as_ref().map(|p| p.coords().to_vec()),
            initial_set: problem.initial_set.as_ref().map(SetConfig::of),
            new_set: problem.new_set.as_ref().map(SetConfig::of),
            dynamic: dynamic.map(DynamicConfig::of),
            lottery: lottery.map(LotteryConfig::of),
            model: None,
        }
    }

    fn raw_blocks(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (name, present) in [
            ("lattice", self.lattice.is_some()),
            ("parameters", self.parameters.is_some()),
            ("objective", self.objective.is_some()),
            ("cost", self.cost.is_some()),
            ("initial_set", self.initial_set.is_some()),
            ("new_set", self.new_set.is_some()),
        ] {
            if present {
                v.push(name);
            }
        }
        v
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let raw = self.raw_blocks();
        let (problem, check, model, wishful) = match (&self.model, raw.is_empty()) {
            (Some(_), false) => {
                return Err(Error::Config {
                    path: raw[0].into(),
                    message: "a model block excludes raw lattice/parameter/objective/cost blocks"
                        .into(),
                })
            }
            (None, true) => {
                return Err(Error::Config {
                    path: ".".into(),
                    message: "give either a model block or lattice, parameters, objective and cost"
                        .into(),
                })
            }
            (Some(m), true) => self.resolve_model(m)?,
            (None, false) => (self.resolve_raw()?, CheckOptions::exact(), None, None),
        };
        let mut problem = problem;
        if model.is_some() || wishful.is_some() {
            let params = problem.objective.params();
            if let Some(t) = &self.theta_lo {
                problem.theta_lo = t.resolve(params)?;
            }
            if let Some(t) = &self.theta_hi {
                problem.theta_hi = t.resolve(params)?;
            }
            if let Some(x) = &self.x_lo {
                problem.x_lo = Some(Point::new(x.clone()));
            }
        }
        let dynamic = self
            .dynamic
            .as_ref()
            .map(|d| self.resolve_dynamic(d, &problem))
            .transpose()?;
        let lottery = self
            .lottery
            .as_ref()
            .map(LotteryConfig::build)
            .transpose()?;
        let dynamic = match (dynamic, &lottery) {
            (Some(mut d), Some(lot)) => {
                d.lottery = Some(lot.clone());
                Some(d)
            }
            (d, _) => d,
        };
        Ok(Scenario {
            problem,
            dynamic,
            lottery,
            check,
            model,
            wishful,
        })
    }

    fn resolve_raw(&self) -> Result<StaticProblem> {
        let missing = |name: &str| Error::Config {
            path: name.into(),
            message: "block is required".into(),
        };
        let l = self
            .lattice
            .as_ref()
            .ok_or_else(|| missing("lattice"))?
            .build()?;
        let params = self
            .parameters
            .as_ref()
            .ok_or_else(|| missing("parameters"))?
            .build()?;
        let k = params.len();
        let theta_lo = self
            .theta_lo
            .as_ref()
            .map(|t| t.resolve(&params))
            .transpose()?
            .unwrap_or(0);
        let theta_hi = self
            .theta_hi
            .as_ref()
            .map(|t| t.resolve(&params))
            .transpose()?
            .unwrap_or(k - 1);
        let objective = self
            .objective
            .as_ref()
            .ok_or_else(|| missing("objective"))?
            .build(&l, params)?;
        let cost = CostFunction::new(self.cost.clone().ok_or_else(|| missing("cost"))?)?;
        let mut p = StaticProblem::new(objective, cost, theta_lo, theta_hi);
        p.x_lo = self.x_lo.as_ref().map(|x| Point::new(x.clone()));
        p.initial_set = self.initial_set.as_ref().map(|s| s.build(&l)).transpose()?;
        p.new_set = self.new_set.as_ref().map(|s| s.build(&l)).transpose()?;
        Ok(p)
    }

    #[allow(clippy::type_complexity)]
    fn resolve_model(
        &self,
        m: &ModelConfig,
    ) -> Result<(
        StaticProblem,
        CheckOptions,
        Option<BuiltModel>,
        Option<WishfulModel>,
    )> {
        let opts = CheckOptions::exact();
        let built = match m {
            ModelConfig::Pricing(p) => p.build(&opts)?,
            ModelConfig::FactorDemand(f) => f.build(&opts)?,
            ModelConfig::LaborSupply(l) => l.build(&opts)?,
            ModelConfig::Investment(i) => i.build(&opts)?,
            ModelConfig::Wishful(w) => {
                let wp = w.build(&opts)?;
                return Ok((wp.problem, wp.check, None, Some(w.clone())));
            }
        };
        Ok((built.static_problem(), built.check, Some(built), None))
    }

    fn resolve_dynamic(
        &self,
        d: &DynamicConfig,
        problem: &StaticProblem,
    ) -> Result<DynamicScenario> {
        let params = problem.objective.params();
        let base_cost = problem.cost.clone();
        let mut s = DynamicScenario::stationary(
            problem.objective.clone(),
            problem.theta_lo,
            problem.theta_hi,
            match &d.cost_tail {
                Some(c) => CostFunction::new(c.clone())?,
                None => base_cost,
            },
            d.delta,
        );
        s.theta_prefix = d
            .theta_prefix
            .iter()
            .map(|t| t.resolve(params))
            .collect::<Result<_>>()?;
        if let Some(t) = &d.theta_tail {
            s.theta_tail = t.resolve(params)?;
        }
        s.cost_prefix = d
            .cost_prefix
            .iter()
            .map(|c| CostFunction::new(c.clone()))
            .collect::<Result<_>>()?;
        s.x0 =
            d.x0.as_ref()
                .map(|x| Point::new(x.clone()))
                .or_else(|| problem.x_lo.clone());
        s.report_horizon = d.report_horizon;
        s.horizon = d.horizon;
        s.tolerance = d.tolerance;
        s.max_iterations = d.max_iterations;
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAW: &str = r#"{
        "lattice": { "axes": [[0, 1, 2, 3]] },
        "parameters": { "labels": ["low", "high"], "order": { "kind": "chain" } },
        "objective": { "family": "quadratic", "targets": [[0.5], [2.5]] },
        "cost": { "kind": "fixed", "k": 0.1 },
        "theta_lo": "low",
        "theta_hi": 1,
        "dynamic": { "delta": 0.9 }
    }"#;

    #[test]
    fn raw_config_resolves() {
        let c = ScenarioConfig::from_json(RAW).unwrap();
        let s = c.resolve().unwrap();
        assert_eq!((s.problem.theta_lo, s.problem.theta_hi), (0, 1));
        assert_eq!(
            s.problem.objective.eval(&Point::new(vec![3.0]), 1).unwrap(),
            -0.25
        );
        assert_eq!(s.dynamic.unwrap().delta, 0.9);
    }

    #[test]
    fn errors_carry_paths() {
        let bad = RAW.replace("\"k\": 0.1", "\"k\": \"lots\"");
        match ScenarioConfig::from_json(&bad) {
            Err(Error::Config { path, .. }) => assert!(path.starts_with("cost"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
        let both = r#"{"model": {"kind": "pricing", "prices": [1], "states": [], "demand": {"family": "isoelastic"},
            "cost": {"kind": "zero"}, "initial": 0, "shocked": 0}, "cost": {"kind": "zero"}}"#;
        assert!(matches!(
            ScenarioConfig::from_json(both).unwrap().resolve(),
            Err(Error::Config { path, .. }) if path == "cost"
        ));
    }

    #[test]
    fn problem_round_trips() {
        let s = ScenarioConfig::from_json(RAW).unwrap().resolve().unwrap();
        let out = ScenarioConfig::from_problem(&s.problem, s.dynamic.as_ref(), None);
        let back = ScenarioConfig::from_json(&out.to_json())
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(back.problem.objective, s.problem.objective);
        assert_eq!(
            out.to_json(),
            ScenarioConfig::from_problem(&back.problem, back.dynamic.as_ref(), None).to_json()
        );
    }

    #[test]
    fn model_block_resolves() {
        let c = ScenarioConfig {
            model: Some(ModelConfig::Pricing(PricingModel::demo())),
            ..Default::default()
        };
        let text = c.to_json();
        let s = ScenarioConfig::from_json(&text).unwrap().resolve().unwrap();
        assert!(s.model.is_some());
        assert!(ScenarioConfig::json_schema().get("properties").is_some());
    }
}
