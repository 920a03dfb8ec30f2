//! The forward-looking adjustment problem
//! `max Σ δ^{t−1} [F(x_t, θ_t) − C_t(x_t − x_{t−1})]` on a finite lattice.
//!
//! Parameter and cost paths are a transient prefix followed by a constant
//! tail, so optimal paths are eventually constant and their values can be
//! evaluated exactly. The tail is solved by value iteration and then
//! polished by exact policy evaluation; the prefix by backward induction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, CostTable};
use crate::error::{Error, Result};
use crate::lattice::{GridLattice, MemberId, Point};
use crate::lechatelier::longrun_ids;
use crate::objective::Objective;
use crate::properties::{
    check_additively_separable, check_monotone, check_objective_quasi_supermodular,
    check_objective_supermodular, check_single_crossing, CheckOptions, Property, PropertyReport,
    Witness,
};
use crate::report::{TheoremReport, Verdict};
use crate::static_solver::{adjusted, argmax_ids, SolveOptions};
use crate::stochastic::{BoundLottery, CostLottery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Horizon {
    Infinite,
    /// Periods `1..=periods`, nothing afterwards.
    Finite {
        periods: usize,
    },
}

/// Relative tolerance for value comparisons between paths.
pub const VALUE_RTOL: f64 = 1e-9;

pub fn value_tolerance(v: f64) -> f64 {
    VALUE_RTOL * v.abs().max(1.0)
}

#[derive(Debug, Clone)]
pub struct DynamicScenario {
    pub objective: Objective,
    /// `θ̲`, at which the initial choice is optimal.
    pub theta_lo: usize,
    /// `θ̄`, the bound on the parameter path.
    pub theta_hi: usize,
    /// `θ_1, …, θ_T`; `θ_t = θ_tail` afterwards.
    pub theta_prefix: Vec<usize>,
    pub theta_tail: usize,
    /// `C_1, …, C_T`; same length as `theta_prefix`.
    pub cost_prefix: Vec<CostFunction>,
    pub cost_tail: CostFunction,
    pub delta: f64,
    /// `x₀ = x̲`; defaults to the lexicographically first maximizer of `F(·, θ̲)`.
    pub x0: Option<Point>,
    pub report_horizon: usize,
    pub horizon: Horizon,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// When set, every period's cost is an independent draw from this
    /// lottery and the period payoff is its expected utility; the
    /// deterministic costs are then unused and the cost prefix must be empty.
    pub lottery: Option<CostLottery>,
}

impl DynamicScenario {
    /// `θ_t = θ̄` and `C_t = C` for every period.
    pub fn stationary(
        objective: Objective,
        theta_lo: usize,
        theta_hi: usize,
        cost: CostFunction,
        delta: f64,
    ) -> Self {
        DynamicScenario {
            objective,
            theta_lo,
            theta_hi,
            theta_prefix: Vec::new(),
            theta_tail: theta_hi,
            cost_prefix: Vec::new(),
            cost_tail: cost,
            delta,
            x0: None,
            report_horizon: 40,
            horizon: Horizon::Infinite,
            tolerance: 1e-10,
            max_iterations: 1_000_000,
            lottery: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidScenario(format!(
                "discount {} is outside (0, 1)",
                self.delta
            )));
        }
        if self.lottery.is_some() && !self.cost_prefix.is_empty() {
            return Err(Error::InvalidScenario(
                "a cost lottery replaces the per-period costs; leave the cost prefix empty".into(),
            ));
        }
        if self.lottery.is_none() && self.theta_prefix.len() != self.cost_prefix.len() {
            return Err(Error::InvalidScenario(format!(
                "parameter prefix has {} periods but cost prefix has {}",
                self.theta_prefix.len(),
                self.cost_prefix.len()
            )));
        }
        let k = self.objective.params().len();
        let thetas = [self.theta_lo, self.theta_hi, self.theta_tail];
        if let Some(t) = thetas.iter().chain(&self.theta_prefix).find(|&&t| t >= k) {
            return Err(Error::InvalidScenario(format!(
                "parameter index {t} out of range"
            )));
        }
        if let Horizon::Finite { periods: 0 } = self.horizon {
            return Err(Error::InvalidScenario(
                "finite horizon needs at least one period".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidScenario(
                "value-iteration tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Every period has parameter `θ̄` and the tail cost.
    pub fn is_stationary(&self) -> bool {
        self.theta_tail == self.theta_hi
            && self.theta_prefix.iter().all(|&t| t == self.theta_tail)
            && self.cost_prefix.iter().all(|c| *c == self.cost_tail)
    }

    /// Parameter index in period `t ≥ 1`.
    pub fn theta_at(&self, t: usize) -> usize {
        self.theta_prefix
            .get(t - 1)
            .copied()
            .unwrap_or(self.theta_tail)
    }

    /// Distinct costs in order of first appearance (the positive-probability
    /// lottery states when a lottery is set).
    pub fn distinct_costs(&self) -> Vec<&CostFunction> {
        if let Some(lot) = &self.lottery {
            return lot.positive_costs();
        }
        let mut out: Vec<&CostFunction> = Vec::new();
        for c in self
            .cost_prefix
            .iter()
            .chain(std::iter::once(&self.cost_tail))
        {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// A path `x_1, x_2, …`: explicit points followed by a constant
/// continuation (infinite horizon), or exactly `K` points (finite horizon).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuation: Option<Point>,
    pub value: f64,
    #[serde(skip)]
    pub ids: Vec<MemberId>,
    #[serde(skip)]
    pub continuation_id: Option<MemberId>,
}

impl Path {
    /// Point in period `t ≥ 1`.
    pub fn id_at(&self, t: usize) -> MemberId {
        match self.ids.get(t - 1) {
            Some(&i) => i,
            None => self
                .continuation_id
                .unwrap_or(*self.ids.last().expect("nonempty path")),
        }
    }

    /// The first `h` periods, padded with the continuation.
    pub fn head(&self, h: usize) -> Vec<MemberId> {
        (1..=h).map(|t| self.id_at(t)).collect()
    }

    /// Explicit ids followed by the continuation, if any.
    pub fn all_ids(&self) -> impl Iterator<Item = MemberId> + '_ {
        self.ids.iter().copied().chain(self.continuation_id)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicSolution {
    pub path: Path,
    /// `V₁(x₀)` from the dynamic program.
    pub value: f64,
    /// Sup-norm Bellman residual of the tail value function.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bellman_residual: Option<f64>,
    pub iterations: usize,
    #[serde(skip)]
    pub tail_values: Vec<f64>,
}

/// A scenario with costs bound to the lattice.
#[derive(Debug, Clone)]
pub struct DynamicModel {
    pub scenario: DynamicScenario,
    pub lattice: GridLattice,
    prefix: Vec<CostTable>,
    tail: CostTable,
    lottery: Option<BoundLottery>,
    pub x0: MemberId,
}

/// One period: parameter and cost.
#[derive(Clone, Copy)]
struct Stage<'a> {
    theta: usize,
    cost: &'a CostTable,
}

impl DynamicModel {
    pub fn new(scenario: &DynamicScenario) -> Result<Self> {
        scenario.validate()?;
        let lattice = scenario.objective.lattice().clone();
        let prefix = scenario
            .cost_prefix
            .iter()
            .map(|c| c.bind(&lattice))
            .collect::<Result<Vec<_>>>()?;
        let tail = scenario.cost_tail.bind(&lattice)?;
        let lottery = scenario
            .lottery
            .as_ref()
            .map(|l| l.bind(&lattice))
            .transpose()?;
        let x0 = match &scenario.x0 {
            Some(p) => lattice.require(p)?,
            None => {
                let ids: Vec<MemberId> = lattice.ids().collect();
                argmax_ids(&ids, |i| scenario.objective.value(i, scenario.theta_lo))?.first()
            }
        };
        Ok(DynamicModel {
            scenario: scenario.clone(),
            lattice,
            prefix,
            tail,
            lottery,
            x0,
        })
    }

    fn stage(&self, t: usize) -> Stage<'_> {
        Stage {
            theta: self.scenario.theta_at(t),
            cost: self.prefix.get(t - 1).unwrap_or(&self.tail),
        }
    }

    fn tail_stage(&self) -> Stage<'_> {
        Stage {
            theta: self.scenario.theta_tail,
            cost: &self.tail,
        }
    }

    fn r(&self, s: Stage<'_>, y: MemberId, x: MemberId) -> f64 {
        let f = self.scenario.objective.value(x, s.theta);
        match &self.lottery {
            Some(lot) => lot.value(f, x, y),
            None => adjusted(f, s.cost.between(x, y)),
        }
    }

    /// Period-`t` payoff `F(x, θ_t) − C_t(x − y)`, `−∞` when infeasible.
    pub fn payoff(&self, t: usize, y: MemberId, x: MemberId) -> f64 {
        self.r(self.stage(t), y, x)
    }

    /// Period-`t` adjustment term: `C_t(x − y)`, or `F(x, θ_t)` minus the
    /// expected-utility payoff under a lottery.
    pub fn period_cost(&self, t: usize, y: MemberId, x: MemberId) -> f64 {
        let s = self.stage(t);
        match &self.lottery {
            Some(_) => self.scenario.objective.value(x, s.theta) - self.r(s, y, x),
            None => s.cost.between(x, y),
        }
    }

    pub fn delta(&self) -> f64 {
        self.scenario.delta
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    /// Lexicographically first maximizer of `r(y, ·) + δ V(·)`; exact ties.
    fn best_response(&self, s: Stage<'_>, y: MemberId, next: &[f64]) -> (MemberId, f64) {
        let d = self.delta();
        let mut best = (y, f64::NEG_INFINITY);
        for x in self.lattice.ids() {
            let q = self.r(s, y, x) + d * next[x];
            if q > best.1 {
                best = (x, q);
            }
        }
        best
    }

    /// Sup-norm Bellman residual of `v` for the tail problem.
    pub fn bellman_residual(&self, v: &[f64]) -> f64 {
        let s = self.tail_stage();
        self.lattice
            .ids()
            .into_par_iter()
            .map(|y| (self.best_response(s, y, v).1 - v[y]).abs())
            .reduce(|| 0.0, f64::max)
    }

    fn value_iteration(&self) -> Result<(Vec<f64>, usize)> {
        let s = self.tail_stage();
        let m = self.lattice.len();
        let mut v = vec![0.0; m];
        for it in 1..=self.scenario.max_iterations {
            let next: Vec<f64> = self
                .lattice
                .ids()
                .into_par_iter()
                .map(|y| self.best_response(s, y, &v).1)
                .collect();
            let change = next
                .iter()
                .zip(&v)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            v = next;
            if change <= self.scenario.tolerance {
                return Ok((v, it));
            }
            if it == self.scenario.max_iterations {
                return Err(Error::NoConvergence {
                    iterations: it,
                    change,
                });
            }
        }
        unreachable!("loop returns on its last iteration")
    }

    /// Greedy policy for `v`: lexicographically first action within a
    /// small tolerance of the best, so numerically tied actions resolve
    /// the same way at every state.
    fn greedy(&self, v: &[f64], rtol: f64) -> Vec<MemberId> {
        let s = self.tail_stage();
        let d = self.delta();
        self.lattice
            .ids()
            .into_par_iter()
            .map(|y| {
                let q: Vec<f64> = self
                    .lattice
                    .ids()
                    .map(|x| self.r(s, y, x) + d * v[x])
                    .collect();
                let top = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let cut = top - rtol * (1.0 + top.abs());
                q.iter()
                    .position(|&z| z >= cut)
                    .expect("staying put is feasible")
            })
            .collect()
    }

    /// Exact value of following a stationary policy in the tail from each
    /// state. Every orbit ends in a cycle, whose value is a geometric sum.
    fn policy_values(&self, policy: &[MemberId]) -> Vec<f64> {
        let s = self.tail_stage();
        let d = self.delta();
        let m = policy.len();
        let mut value: Vec<Option<f64>> = vec![None; m];
        for start in 0..m {
            if value[start].is_some() {
                continue;
            }
            let mut orbit = Vec::new();
            let mut pos = vec![usize::MAX; 0];
            let mut cur = start;
            // Walk until reaching a valued state or revisiting one on this orbit.
            loop {
                if value[cur].is_some() {
                    break;
                }
                if let Some(k) = orbit.iter().position(|&z| z == cur) {
                    pos.push(k);
                    break;
                }
                orbit.push(cur);
                cur = policy[cur];
            }
            if let Some(&k) = pos.first() {
                let cycle = &orbit[k..];
                let len = cycle.len();
                let mut sum = 0.0;
                for j in (0..len).rev() {
                    let a = cycle[j];
                    sum = self.r(s, a, policy[a]) + d * sum;
                }
                let head = sum / (1.0 - d.powi(len as i32));
                value[cycle[0]] = Some(head);
                for j in (1..len).rev() {
                    let a = cycle[j];
                    let b = policy[a];
                    value[a] =
                        Some(self.r(s, a, b) + d * value[b].expect("cycle successor valued"));
                }
                orbit.truncate(k);
            }
            for &a in orbit.iter().rev() {
                let b = policy[a];
                value[a] = Some(self.r(s, a, b) + d * value[b].expect("successor valued"));
            }
        }
        value
            .into_iter()
            .map(|v| v.expect("all states valued"))
            .collect()
    }

    /// Value iteration to tolerance, then policy iteration from the greedy
    /// policy with exact evaluation, switching actions only on strict
    /// improvement.
    fn solve_tail(&self) -> Result<(Vec<f64>, Vec<MemberId>, usize)> {
        let (v, iterations) = self.value_iteration()?;
        let mut policy = self.greedy(&v, 1e-9);
        let s = self.tail_stage();
        let d = self.delta();
        for _ in 0..1000 {
            let vp = self.policy_values(&policy);
            let mut changed = false;
            for y in self.lattice.ids() {
                let (x, q) = self.best_response(s, y, &vp);
                if q > vp[y] + 1e-12 * (1.0 + vp[y].abs()) && x != policy[y] {
                    let cur = self.r(s, y, policy[y]) + d * vp[policy[y]];
                    if q > cur {
                        policy[y] = x;
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok((vp, policy, iterations));
            }
        }
        Err(Error::NoConvergence {
            iterations,
            change: f64::NAN,
        })
    }

    pub fn solve(&self) -> Result<DynamicSolution> {
        match self.scenario.horizon {
            Horizon::Finite { periods } => self.solve_finite(periods),
            Horizon::Infinite => self.solve_infinite(),
        }
    }

    fn solve_finite(&self, k: usize) -> Result<DynamicSolution> {
        let m = self.lattice.len();
        let mut next = vec![0.0; m];
        let mut policies = vec![Vec::new(); k];
        for t in (1..=k).rev() {
            let s = self.stage(t);
            let (pol, vals): (Vec<MemberId>, Vec<f64>) = self
                .lattice
                .ids()
                .into_par_iter()
                .map(|y| self.best_response(s, y, &next))
                .unzip();
            policies[t - 1] = pol;
            next = vals;
        }
        let value = next[self.x0];
        if value == f64::NEG_INFINITY {
            return Err(Error::Infeasible);
        }
        let mut ids = Vec::with_capacity(k);
        let mut cur = self.x0;
        for pol in &policies {
            cur = pol[cur];
            ids.push(cur);
        }
        let path = self.make_path(ids, None);
        Ok(DynamicSolution {
            path,
            value,
            bellman_residual: None,
            iterations: k,
            tail_values: Vec::new(),
        })
    }

    fn solve_infinite(&self) -> Result<DynamicSolution> {
        let (tail_v, tail_pol, iterations) = self.solve_tail()?;
        let tp = self.prefix_len();
        let mut next = tail_v.clone();
        let mut policies = vec![Vec::new(); tp];
        for t in (1..=tp).rev() {
            let s = self.stage(t);
            let (pol, vals): (Vec<MemberId>, Vec<f64>) = self
                .lattice
                .ids()
                .into_par_iter()
                .map(|y| self.best_response(s, y, &next))
                .unzip();
            policies[t - 1] = pol;
            next = vals;
        }
        let value = next[self.x0];
        let mut ids = Vec::new();
        let mut cur = self.x0;
        for pol in &policies {
            cur = pol[cur];
            ids.push(cur);
        }
        // Tail: follow the stationary policy until it reaches a fixed point.
        let h = self.scenario.report_horizon;
        let mut seen = vec![usize::MAX; self.lattice.len()];
        let continuation = loop {
            let nxt = tail_pol[cur];
            if nxt == cur && ids.len() >= h {
                break cur;
            }
            if nxt != cur && seen[nxt] != usize::MAX {
                let cycle: Vec<String> = ids[seen[nxt]..]
                    .iter()
                    .map(|&i| self.lattice.point(i).to_string())
                    .collect();
                return Err(Error::PolicyCycle(cycle));
            }
            cur = nxt;
            ids.push(cur);
            if seen[cur] == usize::MAX {
                seen[cur] = ids.len() - 1;
            }
        };
        let residual = self.bellman_residual(&tail_v);
        let path = self.make_path(ids, Some(continuation));
        Ok(DynamicSolution {
            path,
            value,
            bellman_residual: Some(residual),
            iterations,
            tail_values: tail_v,
        })
    }

    /// Exact discounted value of a path, evaluated by Horner's rule from
    /// the last period back, matching the dynamic program's arithmetic.
    pub fn evaluate(&self, ids: &[MemberId], continuation: Option<MemberId>) -> f64 {
        let d = self.delta();
        let mut ids = ids.to_vec();
        let mut acc = match (self.scenario.horizon, continuation) {
            (Horizon::Finite { .. }, _) | (_, None) => 0.0,
            (Horizon::Infinite, Some(c)) => {
                while ids.len() < self.prefix_len() {
                    ids.push(c);
                }
                let s = self.tail_stage();
                let last = ids.last().copied().unwrap_or(self.x0);
                self.r(s, last, c) + d * (self.r(s, c, c) / (1.0 - d))
            }
        };
        for t in (1..=ids.len()).rev() {
            let prev = if t == 1 { self.x0 } else { ids[t - 2] };
            acc = self.payoff(t, prev, ids[t - 1]) + d * acc;
        }
        acc
    }

    /// `Σ_{t ≤ h} δ^{t−1} r_t` along the path.
    pub fn truncated_value(&self, path: &Path, h: usize) -> f64 {
        let d = self.delta();
        let mut acc = 0.0;
        for t in (1..=h).rev() {
            let prev = if t == 1 { self.x0 } else { path.id_at(t - 1) };
            acc = self.payoff(t, prev, path.id_at(t)) + d * acc;
        }
        acc
    }

    pub fn make_path(&self, ids: Vec<MemberId>, continuation: Option<MemberId>) -> Path {
        let value = self.evaluate(&ids, continuation);
        Path {
            points: ids.iter().map(|&i| self.lattice.point(i)).collect(),
            continuation: continuation.map(|c| self.lattice.point(c)),
            value,
            ids,
            continuation_id: continuation,
        }
    }

    /// Pointwise `x̄ ∧ (x̲ ∨ x_t)`, revalued.
    pub fn sandwich_transform(&self, p: &Path, lo: MemberId, hi: MemberId) -> Path {
        let l = &self.lattice;
        let f = |x: MemberId| l.meet_id(hi, l.join_id(lo, x));
        self.make_path(
            p.ids.iter().map(|&x| f(x)).collect(),
            p.continuation_id.map(f),
        )
    }

    /// Cumulative joins `x_1 ∨ … ∨ x_t`, revalued.
    pub fn monotonize(&self, p: &Path) -> Path {
        let l = &self.lattice;
        let mut acc: Option<MemberId> = None;
        let ids: Vec<MemberId> = p
            .ids
            .iter()
            .map(|&x| {
                let j = acc.map_or(x, |a| l.join_id(a, x));
                acc = Some(j);
                j
            })
            .collect();
        let cont = p
            .continuation_id
            .map(|c| acc.map_or(c, |a| l.join_id(a, c)));
        self.make_path(ids, cont)
    }
}

/// Solves the scenario and extracts a path from `x₀`.
pub fn solve_dynamic(scenario: &DynamicScenario) -> Result<DynamicSolution> {
    DynamicModel::new(scenario)?.solve()
}

/// `θ̲ ≤ θ_t ≤ θ̄` for every period (and `θ_t ≤ θ_{t+1}` when
/// `increasing`).
pub fn check_parameter_path(s: &DynamicScenario, increasing: bool) -> PropertyReport {
    let p = s.objective.params();
    let path: Vec<usize> = s
        .theta_prefix
        .iter()
        .copied()
        .chain(std::iter::once(s.theta_tail))
        .collect();
    for (t, &th) in path.iter().enumerate() {
        if !(p.leq(s.theta_lo, th) && p.leq(th, s.theta_hi)) {
            return PropertyReport::fail(
                Property::ParameterPath,
                Witness::new()
                    .param(p.label(th))
                    .value("period", (t + 1) as f64),
            )
            .with_note("θ_t outside [θ_lo, θ_hi]");
        }
        if increasing && t > 0 && !p.leq(path[t - 1], th) {
            return PropertyReport::fail(
                Property::ParameterPath,
                Witness::new()
                    .param(p.label(path[t - 1]))
                    .param(p.label(th))
                    .value("period", (t + 1) as f64),
            )
            .with_note("θ_t is not increasing");
        }
    }
    PropertyReport::pass(Property::ParameterPath)
}

fn initial_optimality(model: &DynamicModel) -> Result<PropertyReport> {
    let s = &model.scenario;
    let ids: Vec<MemberId> = model.lattice.ids().collect();
    let best = argmax_ids(&ids, |i| s.objective.value(i, s.theta_lo))?;
    Ok(if best.contains(model.x0) {
        PropertyReport::pass(Property::InitialOptimality)
    } else {
        PropertyReport::fail(
            Property::InitialOptimality,
            Witness::new()
                .point("x_lo", model.lattice.coords(model.x0))
                .point("better", model.lattice.coords(best.first())),
        )
    })
}

/// Hypotheses for the dynamic sandwich: ordinal complementarity, every
/// period's cost monotone, `θ_t ∈ [θ̲, θ̄]`, and `x₀` optimal at `θ̲`.
pub(crate) fn dynamic_hypotheses(
    model: &DynamicModel,
    increasing: bool,
    opts: &CheckOptions,
) -> Result<Vec<PropertyReport>> {
    let s = &model.scenario;
    let mut out = vec![
        check_objective_quasi_supermodular(&s.objective, opts),
        check_single_crossing(&s.objective, opts),
    ];
    for c in s.distinct_costs() {
        out.push(check_monotone(&c.bind(&model.lattice)?, opts));
    }
    out.push(check_parameter_path(s, increasing));
    out.push(initial_optimality(model)?);
    Ok(out)
}

/// Frictionless `θ̄`-maximizer above `x̲` (the largest when it exists).
pub(crate) fn long_run_target(model: &DynamicModel) -> Result<MemberId> {
    let s = &model.scenario;
    let ids: Vec<MemberId> = model.lattice.ids().collect();
    Ok(longrun_ids(&model.lattice, &s.objective, s.theta_hi, &ids, model.x0)?.id)
}

pub(crate) fn inconclusive(theorem: &str, hyps: Vec<PropertyReport>, err: &Error) -> TheoremReport {
    let mut r = TheoremReport::new(theorem, hyps);
    r.verdict = Verdict::Inconclusive;
    r.note(err.to_string());
    r
}

fn values_match(transformed: f64, optimal: f64) -> bool {
    (transformed - optimal).abs() <= value_tolerance(optimal)
}

fn record_path(r: &mut TheoremReport, model: &DynamicModel, name: &str, p: &Path) {
    let h = model.scenario.report_horizon.min(p.ids.len());
    let pts: Vec<Point> = p.ids[..h].iter().map(|&i| model.lattice.point(i)).collect();
    r.path(name, &pts, p.continuation.as_ref());
}

/// Solves, applies the sandwich transform with `x̄` and checks that the
/// transformed path is still optimal. Holds iff so.
pub fn theorem3_check(scenario: &DynamicScenario, opts: &SolveOptions) -> Result<TheoremReport> {
    let model = DynamicModel::new(scenario)?;
    let hyps = dynamic_hypotheses(&model, false, &opts.check)?;
    opts.enforce(&hyps)?;
    let x_bar = long_run_target(&model)?;
    let sol = match model.solve() {
        Ok(s) => s,
        Err(e @ Error::PolicyCycle(_)) => return Ok(inconclusive("thm3", hyps, &e)),
        Err(e) => return Err(e),
    };
    let t = model.sandwich_transform(&sol.path, model.x0, x_bar);
    let l = &model.lattice;
    let mut r = TheoremReport::new("thm3", hyps);
    r.point("x_lo", &l.point(model.x0))
        .point("x_bar", &l.point(x_bar));
    record_path(&mut r, &model, "optimal", &sol.path);
    record_path(&mut r, &model, "sandwiched", &t);
    r.expect(
        values_match(t.value, sol.path.value),
        format!(
            "sandwiched value {} differs from optimal {}",
            t.value, sol.path.value
        ),
    );
    let inside = t
        .all_ids()
        .all(|x| l.leq_id(model.x0, x) && l.leq_id(x, x_bar));
    r.expect(inside, "sandwiched path leaves [x_lo, x_bar]");
    Ok(r)
}

/// Stationary case: sandwich, then monotonize, and check the result is
/// optimal and increasing inside `[x̲, x̄]`.
pub fn theorem4_check(scenario: &DynamicScenario, opts: &SolveOptions) -> Result<TheoremReport> {
    let model = DynamicModel::new(scenario)?;
    let s = &model.scenario;
    // Risk-neutral uncertain costs reduce to the expected cost.
    let cost = match &s.lottery {
        None => s.cost_tail.clone(),
        Some(lot) if lot.utility.is_linear() => lot.expected_cost(&model.lattice)?,
        Some(_) => {
            return Err(Error::InvalidScenario(
                "the monotone-path result covers uncertain costs only under linear utility".into(),
            ))
        }
    };
    let mut hyps = vec![
        check_objective_supermodular(&s.objective, &opts.check),
        check_single_crossing(&s.objective, &opts.check),
        check_monotone(&cost.bind(&model.lattice)?, &opts.check),
        check_additively_separable(&cost, &model.lattice, &opts.check)?,
        if s.is_stationary() {
            PropertyReport::pass(Property::ParameterPath)
        } else {
            PropertyReport::fail(Property::ParameterPath, Witness::new())
                .with_note("parameter and cost must equal θ_hi and the tail cost in every period")
        },
        check_parameter_path(s, false),
        initial_optimality(&model)?,
    ];
    hyps.dedup_by(|a, b| a.property == b.property && a.holds && b.holds);
    opts.enforce(&hyps)?;
    let x_bar = long_run_target(&model)?;
    let sol = match model.solve() {
        Ok(s) => s,
        Err(e @ Error::PolicyCycle(_)) => return Ok(inconclusive("thm4", hyps, &e)),
        Err(e) => return Err(e),
    };
    let sand = model.sandwich_transform(&sol.path, model.x0, x_bar);
    let mono = model.monotonize(&sand);
    let l = &model.lattice;
    let mut r = TheoremReport::new("thm4", hyps);
    r.point("x_lo", &l.point(model.x0))
        .point("x_bar", &l.point(x_bar));
    record_path(&mut r, &model, "optimal", &sol.path);
    record_path(&mut r, &model, "monotonized", &mono);
    r.expect(
        values_match(mono.value, sol.path.value),
        format!(
            "monotonized value {} differs from optimal {}",
            mono.value, sol.path.value
        ),
    );
    let seq: Vec<MemberId> = std::iter::once(model.x0).chain(mono.all_ids()).collect();
    let increasing = seq.windows(2).all(|w| l.leq_id(w[0], w[1]));
    r.expect(increasing, "monotonized path is not increasing from x_lo");
    r.expect(
        seq.iter().all(|&x| l.leq_id(x, x_bar)),
        "monotonized path exceeds x_bar",
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostSpec;
    use crate::lattice::ParamPoset;

    fn line_model(cost: CostSpec, horizon: Horizon) -> DynamicScenario {
        let l = GridLattice::product(vec![(0..6).map(f64::from).collect()]).unwrap();
        let obj = Objective::tabulate(l, ParamPoset::chain(2).unwrap(), |x, t| {
            let v = x.coords()[0];
            -(v - 1.0 - 3.0 * t as f64).powi(2)
        })
        .unwrap();
        let mut s = DynamicScenario::stationary(obj, 0, 1, CostFunction::new(cost).unwrap(), 0.9);
        s.horizon = horizon;
        s.report_horizon = 10;
        s
    }

    #[test]
    fn zero_cost_jumps_immediately() {
        let sol = solve_dynamic(&line_model(CostSpec::Zero, Horizon::Infinite)).unwrap();
        assert_eq!(sol.path.points[0], Point::new(vec![4.0]));
        assert_eq!(sol.path.continuation, Some(Point::new(vec![4.0])));
        assert!(sol.bellman_residual.unwrap() <= 1e-9);
        assert!((sol.value - sol.path.value).abs() < 1e-9);
    }

    #[test]
    fn large_fixed_cost_means_inaction() {
        let sol = solve_dynamic(&line_model(
            CostSpec::Fixed { k: 1000.0 },
            Horizon::Infinite,
        ))
        .unwrap();
        assert!(sol.path.all_ids().all(|i| i == 1));
    }

    #[test]
    fn monotonize_example() {
        let s = line_model(CostSpec::Zero, Horizon::Infinite);
        let m = DynamicModel::new(&s).unwrap();
        let p = m.make_path(vec![2, 0, 3], Some(3));
        let q = m.monotonize(&p);
        assert_eq!(q.ids, vec![2, 2, 3]);
        let r = m.sandwich_transform(&p, 1, 2);
        assert_eq!(r.ids, vec![2, 1, 2]);
    }

    #[test]
    fn quadratic_cost_theorems_hold() {
        let s = line_model(
            CostSpec::Quadratic { weights: vec![2.0] },
            Horizon::Infinite,
        );
        assert!(theorem3_check(&s, &SolveOptions::default())
            .unwrap()
            .holds());
        assert!(theorem4_check(&s, &SolveOptions::default())
            .unwrap()
            .holds());
        let f = line_model(
            CostSpec::Quadratic { weights: vec![2.0] },
            Horizon::Finite { periods: 3 },
        );
        assert!(theorem4_check(&f, &SolveOptions::default())
            .unwrap()
            .holds());
    }

    #[test]
    fn finite_value_matches_path() {
        let s = line_model(
            CostSpec::Quadratic { weights: vec![1.5] },
            Horizon::Finite { periods: 4 },
        );
        let sol = solve_dynamic(&s).unwrap();
        assert_eq!(sol.value, sol.path.value);
        assert_eq!(sol.path.ids.len(), 4);
    }
}
