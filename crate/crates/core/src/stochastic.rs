//! Uncertain adjustment costs: the cost is drawn from a finite lottery
//! and the agent maximizes `G̃(x) = E[u(F(x, θ̄) − C_S(x − x̲))]`.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, CostTable};
use crate::dynamic_solver::{theorem3_check, DynamicScenario};
use crate::error::{Error, Result};
use crate::lattice::{GridLattice, MemberId, Point};
use crate::lechatelier::{
    lechatelier_over, lechatelier_report, prepare_unconstrained, LeChatelierResult,
};
use crate::properties::{check_minimally_monotone, check_monotone, CheckOptions, PropertyReport};
use crate::report::TheoremReport;
use crate::static_solver::{
    argmax_ids, join_selection_over, ArgmaxSet, Prepared, Selection, SolveOptions, StaticProblem,
};

/// Strictly increasing utility over realized payoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Utility {
    Linear,
    /// `(1 − e^{−αv}) / α`, concave for `α > 0`.
    Cara {
        alpha: f64,
    },
    /// Linear interpolation through `(v, u)` knots, extended linearly past
    /// the ends.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
}

impl Utility {
    pub fn validate(&self) -> Result<()> {
        match self {
            Utility::Linear => Ok(()),
            Utility::Cara { alpha } if alpha.is_finite() && *alpha > 0.0 => Ok(()),
            Utility::Cara { alpha } => Err(Error::InvalidScenario(format!(
                "risk-aversion coefficient {alpha} must be positive"
            ))),
            Utility::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidScenario(
                        "piecewise utility needs two knots".into(),
                    ));
                }
                if knots
                    .windows(2)
                    .any(|w| !(w[0].0 < w[1].0 && w[0].1 < w[1].1))
                {
                    return Err(Error::InvalidScenario(
                        "piecewise utility knots must be strictly increasing in both coordinates"
                            .into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Utility::Linear)
    }

    pub fn eval(&self, v: f64) -> f64 {
        if v == f64::NEG_INFINITY {
            return v;
        }
        match self {
            Utility::Linear => v,
            Utility::Cara { alpha } => -(-alpha * v).exp_m1() / alpha,
            Utility::PiecewiseLinear { knots } => {
                let k = knots
                    .partition_point(|&(x, _)| x <= v)
                    .clamp(1, knots.len() - 1);
                let (x0, y0) = knots[k - 1];
                let (x1, y1) = knots[k];
                y0 + (y1 - y0) * (v - x0) / (x1 - x0)
            }
        }
    }

    /// Parses `linear`, `cara:<alpha>`.
    pub fn parse(s: &str) -> Result<Self> {
        let u = match s.split_once(':') {
            None if s == "linear" => Utility::Linear,
            Some(("cara", a)) => Utility::Cara {
                alpha: a
                    .parse()
                    .map_err(|_| Error::InvalidScenario(format!("bad risk coefficient {a:?}")))?,
            },
            _ => {
                return Err(Error::InvalidScenario(format!(
                    "unknown utility family {s:?}"
                )))
            }
        };
        u.validate()?;
        Ok(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LotteryState {
    pub probability: f64,
    pub cost: CostFunction,
}

/// Finite distribution over cost functions, with a utility.
#[derive(Debug, Clone, PartialEq)]
pub struct CostLottery {
    pub states: Vec<LotteryState>,
    pub utility: Utility,
}

impl CostLottery {
    pub fn new(states: Vec<LotteryState>, utility: Utility) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidScenario("lottery has no states".into()));
        }
        if let Some(s) = states
            .iter()
            .find(|s| !(s.probability >= 0.0) || !s.probability.is_finite())
        {
            return Err(Error::InvalidScenario(format!(
                "bad probability {}",
                s.probability
            )));
        }
        let total: f64 = states.iter().map(|s| s.probability).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidScenario(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        utility.validate()?;
        Ok(CostLottery { states, utility })
    }

    pub fn degenerate(cost: CostFunction, utility: Utility) -> Result<Self> {
        Self::new(
            vec![LotteryState {
                probability: 1.0,
                cost,
            }],
            utility,
        )
    }

    /// States with positive probability; "almost every realization" on a
    /// finite state space.
    pub fn positive_costs(&self) -> Vec<&CostFunction> {
        self.states
            .iter()
            .filter(|s| s.probability > 0.0)
            .map(|s| &s.cost)
            .collect()
    }

    /// `ε ↦ E[C_S(ε)]`, meaningful as a deterministic cost under linear utility.
    pub fn expected_cost(&self, lattice: &GridLattice) -> Result<CostFunction> {
        let bound = self.bind(lattice)?;
        let diffs = lattice.diff_set();
        CostFunction::from_fn(lattice, |d| {
            let id = diffs.id_of(d).expect("difference from the set");
            bound
                .probs
                .iter()
                .zip(&bound.tables)
                .map(|(p, t)| {
                    let c = t.by_id(id);
                    if c == f64::INFINITY {
                        f64::INFINITY
                    } else {
                        p * c
                    }
                })
                .sum()
        })
    }

    pub fn bind(&self, lattice: &GridLattice) -> Result<BoundLottery> {
        let mut probs = Vec::new();
        let mut tables = Vec::new();
        for s in &self.states {
            if s.probability > 0.0 {
                probs.push(s.probability);
                tables.push(s.cost.bind(lattice)?);
            }
        }
        Ok(BoundLottery {
            probs,
            tables,
            utility: self.utility.clone(),
        })
    }
}

/// A lottery with its positive-probability states bound to a lattice.
#[derive(Debug, Clone)]
pub struct BoundLottery {
    probs: Vec<f64>,
    tables: Vec<CostTable>,
    utility: Utility,
}

impl BoundLottery {
    /// `Σ_s P(s) u(f − C_s(x − y))`; `−∞` if any state's cost is infinite.
    pub fn value(&self, f: f64, x: MemberId, y: MemberId) -> f64 {
        let mut acc = 0.0;
        for (p, t) in self.probs.iter().zip(&self.tables) {
            let c = t.between(x, y);
            if c == f64::INFINITY {
                return f64::NEG_INFINITY;
            }
            acc += p * self.utility.eval(f - c);
        }
        acc
    }

    pub fn tables(&self) -> &[CostTable] {
        &self.tables
    }
}

/// `G̃(x, θ)` relative to the initial choice `x̲`.
pub fn expected_objective(
    problem: &StaticProblem,
    lottery: &CostLottery,
    x: &Point,
    theta: usize,
) -> Result<f64> {
    let prep = problem.prepare()?;
    let bound = lottery.bind(&prep.lattice)?;
    let id = prep.lattice.require(x)?;
    Ok(bound.value(prep.objective.value(id, theta), id, prep.x_lo))
}

fn risky_argmax(prep: &Prepared, bound: &BoundLottery) -> Result<ArgmaxSet> {
    argmax_ids(&prep.feasible, |x| {
        bound.value(prep.objective.value(x, prep.theta_hi), x, prep.x_lo)
    })
}

fn state_checks(
    prep: &Prepared,
    bound: &BoundLottery,
    check: fn(&CostTable, &CheckOptions) -> PropertyReport,
    opts: &CheckOptions,
) -> Result<Vec<PropertyReport>> {
    let mut hyps = prep.hypotheses(&[], false, false, opts)?;
    for (k, t) in bound.tables().iter().enumerate() {
        let r = check(t, opts);
        hyps.push(if bound.tables().len() > 1 {
            r.with_note(format!("state {k}"))
        } else {
            r
        });
    }
    Ok(hyps)
}

/// Join selection for `G̃`: every positive-probability cost minimally
/// monotone.
pub fn theorem1_prime_select(
    problem: &StaticProblem,
    lottery: &CostLottery,
    opts: &SolveOptions,
) -> Result<Selection> {
    let prep = problem.prepare()?;
    let bound = lottery.bind(&prep.lattice)?;
    let hyps = state_checks(&prep, &bound, check_minimally_monotone, &opts.check)?;
    opts.enforce(&hyps)?;
    join_selection_over(&prep, risky_argmax(&prep, &bound)?, hyps)
}

pub fn theorem1_prime_check(
    problem: &StaticProblem,
    lottery: &CostLottery,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    let sel = theorem1_prime_select(problem, lottery, opts)?;
    let mut r = TheoremReport::new("thm1p", sel.hypotheses.clone());
    r.point("x_lo", &sel.x_lo).point("x_hat", &sel.x_hat);
    r.expect(
        sel.x_hat_optimal,
        "x_lo ∨ x' does not maximize expected utility",
    )
    .expect(sel.x_hat_above, "x_hat is not above x_lo")
    .expect(
        sel.companion_holds.unwrap_or(true),
        "companion check failed",
    );
    Ok(r)
}

/// Short-run/long-run construction for `G̃`: every positive-probability
/// cost monotone.
pub fn theorem2_prime_select(
    problem: &StaticProblem,
    lottery: &CostLottery,
    opts: &SolveOptions,
) -> Result<LeChatelierResult> {
    let prep = prepare_unconstrained(problem)?;
    let bound = lottery.bind(&prep.lattice)?;
    let hyps = state_checks(&prep, &bound, check_monotone, &opts.check)?;
    opts.enforce(&hyps)?;
    lechatelier_over(&prep, risky_argmax(&prep, &bound)?, None, hyps)
}

pub fn theorem2_prime_check(
    problem: &StaticProblem,
    lottery: &CostLottery,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    Ok(lechatelier_report(
        "thm2p",
        &theorem2_prime_select(problem, lottery, opts)?,
    ))
}

/// Dynamic sandwich with i.i.d. per-period cost draws; the scenario's
/// lottery supplies every period's payoff.
pub fn theorem3_prime_check(
    scenario: &DynamicScenario,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    if scenario.lottery.is_none() {
        return Err(Error::InvalidScenario(
            "scenario has no cost lottery".into(),
        ));
    }
    let mut r = theorem3_check(scenario, opts)?;
    r.theorem = "thm3p".into();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostSpec;
    use crate::lattice::ParamPoset;
    use crate::objective::Objective;

    fn problem() -> StaticProblem {
        let l = GridLattice::product(vec![(0..5).map(f64::from).collect()]).unwrap();
        let obj = Objective::tabulate(l, ParamPoset::chain(2).unwrap(), |x, t| {
            let v = x.coords()[0];
            -(v - 1.0 - 2.0 * t as f64).powi(2)
        })
        .unwrap();
        StaticProblem::new(obj, CostFunction::zero(), 0, 1)
    }

    fn quad(a: f64) -> CostFunction {
        CostFunction::new(CostSpec::Quadratic { weights: vec![a] }).unwrap()
    }

    #[test]
    fn two_state_linear_averages() {
        let p = problem();
        let lot = CostLottery::new(
            vec![
                LotteryState {
                    probability: 0.5,
                    cost: quad(1.0),
                },
                LotteryState {
                    probability: 0.5,
                    cost: quad(3.0),
                },
            ],
            Utility::Linear,
        )
        .unwrap();
        let mid = CostLottery::degenerate(quad(2.0), Utility::Linear).unwrap();
        for v in 0..5 {
            let x = Point::new(vec![f64::from(v)]);
            let a = expected_objective(&p, &lot, &x, 1).unwrap();
            let b = expected_objective(&p, &mid, &x, 1).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cara_and_piecewise_are_increasing() {
        let u = Utility::Cara { alpha: 0.5 };
        assert!(u.eval(1.0) > u.eval(0.0));
        assert_eq!(u.eval(0.0), 0.0);
        let pw = Utility::PiecewiseLinear {
            knots: vec![(0.0, 0.0), (1.0, 2.0), (2.0, 2.5)],
        };
        assert_eq!(pw.eval(0.5), 1.0);
        assert_eq!(pw.eval(3.0), 3.0);
        assert_eq!(pw.eval(-1.0), -2.0);
        assert_eq!(
            Utility::parse("cara:0.25").unwrap(),
            Utility::Cara { alpha: 0.25 }
        );
    }

    #[test]
    fn degenerate_lottery_matches_deterministic() {
        let p = StaticProblem {
            cost: quad(1.0),
            ..problem()
        };
        let lot = CostLottery::degenerate(quad(1.0), Utility::Cara { alpha: 0.3 }).unwrap();
        let a = theorem1_prime_select(&p, &lot, &SolveOptions::default()).unwrap();
        let b = crate::static_solver::theorem1_select(&p, &SolveOptions::default()).unwrap();
        assert_eq!(a.argmax, b.argmax);
        assert!(theorem2_prime_check(&p, &lot, &SolveOptions::default())
            .unwrap()
            .holds());
    }
}
