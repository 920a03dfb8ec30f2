//! Short-lived agents: each period maximizes `G_t(·, x_{t−1}) =
//! F(·, θ_t) − C_t(· − x_{t−1})` given its predecessor's choice.

use serde::{Deserialize, Serialize};

use crate::cost::{CostFunction, CostSpec};
use crate::dynamic_solver::{
    check_parameter_path, dynamic_hypotheses, inconclusive, long_run_target, value_tolerance,
    DynamicModel, DynamicScenario, Horizon, Path,
};
use crate::error::{Error, Result};
use crate::lattice::{MemberId, Point};
use crate::objective::Objective;
use crate::properties::{
    check_additively_separable, check_monotone, check_objective_supermodular,
    check_separable_convex, check_single_crossing, Property, PropertyReport,
};
use crate::report::TheoremReport;
use crate::static_solver::{argmax_ids, ArgmaxSet, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// `x_t = x̄ ∧ (x̲ ∨ x″_t)`: stays in `[x̲, x̄]`.
    Caged,
    /// `x_t = x_{t−1} ∨ (x̄ ∧ (x̲ ∨ x″_t))`: increasing in `[x̲, x̄]`.
    Monotone,
    /// Lexicographically first maximizer each period, for exploration.
    Arbitrary,
}

/// An equilibrium sequence with per-period argmax certificates.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSequence {
    pub mode: SelectionMode,
    pub points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuation: Option<Point>,
    /// Every `x_t` maximizes `G_t(·, x_{t−1})` exactly (and the
    /// continuation maximizes the tail payoff from itself).
    pub certified: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip)]
    pub ids: Vec<MemberId>,
    #[serde(skip)]
    pub continuation_id: Option<MemberId>,
}

impl EquilibriumSequence {
    pub fn id_at(&self, t: usize) -> MemberId {
        match self.ids.get(t - 1) {
            Some(&i) => i,
            None => self
                .continuation_id
                .unwrap_or(*self.ids.last().expect("nonempty sequence")),
        }
    }

    pub fn all_ids(&self) -> impl Iterator<Item = MemberId> + '_ {
        self.ids.iter().copied().chain(self.continuation_id)
    }
}

fn period_argmax(model: &DynamicModel, t: usize, y: MemberId) -> Result<ArgmaxSet> {
    let ids: Vec<MemberId> = model.lattice.ids().collect();
    argmax_ids(&ids, |x| model.payoff(t, y, x))
}

struct Builder<'a> {
    model: &'a DynamicModel,
    mode: SelectionMode,
    x_bar: MemberId,
    ids: Vec<MemberId>,
    failures: Vec<String>,
}

impl Builder<'_> {
    fn prev(&self) -> MemberId {
        self.ids.last().copied().unwrap_or(self.model.x0)
    }

    fn certify(&mut self, t: usize, best: &ArgmaxSet, x: MemberId, what: &str) {
        if !best.contains(x) {
            let p = self.model.lattice.point(x);
            self.failures
                .push(format!("period {t}: {what} {p} is not a maximizer"));
        }
    }

    /// Chooses `x_t` from `x_{t−1}`.
    fn step(&mut self, t: usize) -> Result<MemberId> {
        let l = &self.model.lattice;
        let y = self.prev();
        let best = period_argmax(self.model, t, y)?;
        let first = best.first();
        if self.mode == SelectionMode::Arbitrary {
            return Ok(first);
        }
        let lifted = l.join_id(self.model.x0, first);
        self.certify(t, &best, lifted, "x_lo ∨ x''");
        let caged = l.meet_id(self.x_bar, lifted);
        self.certify(t, &best, caged, "x_bar ∧ (x_lo ∨ x'')");
        if self.mode == SelectionMode::Caged {
            return Ok(caged);
        }
        // Successive joins with x_1, …, x_{t−1}; each must stay optimal.
        let mut x = caged;
        for s in 0..self.ids.len() {
            x = l.join_id(self.ids[s], x);
            if s + 1 == self.ids.len() || self.ids[s] != self.ids[s + 1] {
                let tag = format!("x_{} ∨ x'", s + 1);
                self.certify(t, &best, x, &tag);
            }
        }
        Ok(x)
    }
}

/// Builds the constructive equilibrium sequence. In the stationary tail
/// each choice is a function of its predecessor, so the sequence either
/// reaches a fixed point (the continuation) or cycles, which is an error.
pub fn equilibrium_sequence(
    scenario: &DynamicScenario,
    mode: SelectionMode,
) -> Result<EquilibriumSequence> {
    let model = DynamicModel::new(scenario)?;
    sequence_for(&model, mode)
}

pub(crate) fn sequence_for(
    model: &DynamicModel,
    mode: SelectionMode,
) -> Result<EquilibriumSequence> {
    let x_bar = match mode {
        SelectionMode::Arbitrary => model.lattice.top(),
        _ => long_run_target(model)?,
    };
    let mut b = Builder {
        model,
        mode,
        x_bar,
        ids: Vec::new(),
        failures: Vec::new(),
    };
    let l = &model.lattice;
    let continuation = match model.scenario.horizon {
        Horizon::Finite { periods } => {
            for t in 1..=periods {
                let x = b.step(t)?;
                b.ids.push(x);
            }
            None
        }
        Horizon::Infinite => {
            let h = model.scenario.report_horizon.max(model.prefix_len());
            let mut seen: Vec<Option<usize>> = vec![None; l.len()];
            let mut t = 1;
            loop {
                let x = b.step(t)?;
                if t > model.prefix_len() && t > h && x == b.prev() {
                    break Some(x);
                }
                if t > model.prefix_len() + 1 && x != b.prev() {
                    if let Some(k) = seen[x] {
                        let cycle = b.ids[k..].iter().map(|&i| l.point(i).to_string()).collect();
                        return Err(Error::PolicyCycle(cycle));
                    }
                }
                b.ids.push(x);
                if t > model.prefix_len() && seen[x].is_none() {
                    seen[x] = Some(b.ids.len() - 1);
                }
                t += 1;
            }
        }
    };
    let mut failures = b.failures;
    // Independent re-verification of every period, including the fixed point.
    let mut prev = model.x0;
    for (k, &x) in b.ids.iter().enumerate() {
        if !period_argmax(model, k + 1, prev)?.contains(x) {
            failures.push(format!("period {}: x_t is not a maximizer", k + 1));
        }
        prev = x;
    }
    if let Some(c) = continuation {
        if !period_argmax(model, b.ids.len() + 1, c)?.contains(c) {
            failures.push("continuation does not maximize its own tail payoff".into());
        }
    }
    Ok(EquilibriumSequence {
        mode,
        points: b.ids.iter().map(|&i| l.point(i)).collect(),
        continuation: continuation.map(|c| l.point(c)),
        certified: failures.is_empty(),
        failures,
        ids: b.ids,
        continuation_id: continuation,
    })
}

/// Short-lived sandwich results. Caged: `x̲ ≤ x_t ≤ x̄`; monotone
/// (requires increasing `θ_t`): `x_{t−1} ≤ x_t ≤ x̄`.
pub fn theorem5_check(
    scenario: &DynamicScenario,
    mode: SelectionMode,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    if mode == SelectionMode::Arbitrary {
        return Err(Error::InvalidScenario(
            "the theorem check needs the caged or monotone selection".into(),
        ));
    }
    reject_lottery(scenario)?;
    let model = DynamicModel::new(scenario)?;
    let monotone = mode == SelectionMode::Monotone;
    let hyps = dynamic_hypotheses(&model, monotone, &opts.check)?;
    opts.enforce(&hyps)?;
    let name = if monotone {
        "thm5_monotone"
    } else {
        "thm5_caged"
    };
    let seq = match sequence_for(&model, mode) {
        Ok(s) => s,
        Err(e @ Error::PolicyCycle(_)) => return Ok(inconclusive(name, hyps, &e)),
        Err(e) => return Err(e),
    };
    let x_bar = long_run_target(&model)?;
    let l = &model.lattice;
    let mut r = TheoremReport::new(name, hyps);
    r.point("x_lo", &l.point(model.x0))
        .point("x_bar", &l.point(x_bar));
    let h = model.scenario.report_horizon.min(seq.points.len());
    r.path("equilibrium", &seq.points[..h], seq.continuation.as_ref());
    for f in &seq.failures {
        r.expect(false, f.clone());
    }
    let all: Vec<MemberId> = std::iter::once(model.x0).chain(seq.all_ids()).collect();
    r.expect(
        all.iter()
            .all(|&x| l.leq_id(model.x0, x) && l.leq_id(x, x_bar)),
        "equilibrium leaves [x_lo, x_bar]",
    );
    if monotone {
        r.expect(
            all.windows(2).all(|w| l.leq_id(w[0], w[1])),
            "equilibrium is not increasing",
        );
    }
    Ok(r)
}

/// The two-period case: the parameter jumps to `θ̄` in period 1, costs
/// `C_1` then `C_2`, and no adjustment afterwards. Holds iff the
/// constructed choices satisfy `x̲ ≤ x_1 ≤ x_2 ≤ x̄`.
pub fn prop2_check(
    objective: &Objective,
    theta_lo: usize,
    theta_hi: usize,
    c1: CostFunction,
    c2: CostFunction,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    let mut s = DynamicScenario::stationary(
        objective.clone(),
        theta_lo,
        theta_hi,
        CostFunction::new(CostSpec::Prohibitive)?,
        0.5,
    );
    s.theta_prefix = vec![theta_hi, theta_hi];
    s.cost_prefix = vec![c1, c2];
    s.report_horizon = 2;
    let mut r = theorem5_check(&s, SelectionMode::Monotone, opts)?;
    r.theorem = "prop2".into();
    Ok(r)
}

/// Joins the myopic sequence into a forward-looking optimal path:
/// `x^T = R_T ⋯ R_0 x′`, with entries `x̃_t ∨ x′_t` for `t ≤ T` and
/// `x̃_T ∨ x′_t` after. Holds iff every `x^T` and the full join are optimal
/// and `x̃_t ≤ x̃_t ∨ x′_t ≤ x̄`.
pub fn theorem6_check(scenario: &DynamicScenario, opts: &SolveOptions) -> Result<TheoremReport> {
    reject_lottery(scenario)?;
    let model = DynamicModel::new(scenario)?;
    let s = &model.scenario;
    let mut hyps = vec![
        check_objective_supermodular(&s.objective, &opts.check),
        check_single_crossing(&s.objective, &opts.check),
    ];
    for c in s.distinct_costs() {
        hyps.push(check_monotone(&c.bind(&model.lattice)?, &opts.check));
        hyps.push(check_additively_separable(c, &model.lattice, &opts.check)?);
        hyps.push(check_separable_convex(c, &model.lattice, &opts.check)?);
    }
    hyps.push(check_parameter_path(s, true));
    let dyn_hyps = dynamic_hypotheses(&model, true, &opts.check)?;
    hyps.extend(
        dyn_hyps
            .into_iter()
            .filter(|h| h.property == Property::InitialOptimality),
    );
    dedup_passing(&mut hyps);
    opts.enforce(&hyps)?;

    let seq = match sequence_for(&model, SelectionMode::Monotone) {
        Ok(q) => q,
        Err(e @ Error::PolicyCycle(_)) => return Ok(inconclusive("thm6", hyps, &e)),
        Err(e) => return Err(e),
    };
    let sol = match model.solve() {
        Ok(q) => q,
        Err(e @ Error::PolicyCycle(_)) => return Ok(inconclusive("thm6", hyps, &e)),
        Err(e) => return Err(e),
    };
    let x_bar = long_run_target(&model)?;
    let opt = model.sandwich_transform(&sol.path, model.x0, x_bar);
    let l = &model.lattice;
    let n = seq.ids.len().max(opt.ids.len());
    // x̃_s with x̃_0 = x̲.
    let tilde = |s: usize| if s == 0 { model.x0 } else { seq.id_at(s) };
    let joined_at = |t: usize, cap: usize| l.join_id(tilde(t.min(cap)), opt.id_at(t));
    let cont = match (seq.continuation_id, opt.continuation_id) {
        (Some(a), Some(b)) => Some(l.join_id(a, b)),
        _ => None,
    };
    let optimal = sol.path.value;
    let mut r = TheoremReport::new("thm6", hyps);
    r.point("x_lo", &l.point(model.x0))
        .point("x_bar", &l.point(x_bar));
    // Partial transforms R_T ⋯ R_0 for T = 0..=n.
    for cap in 0..=n {
        let ids: Vec<MemberId> = (1..=n).map(|t| joined_at(t, cap)).collect();
        let c = opt.continuation_id.map(|b| l.join_id(tilde(cap), b));
        let p = model.make_path(ids, c);
        if (p.value - optimal).abs() > value_tolerance(optimal) {
            r.expect(
                false,
                format!(
                    "partial join up to period {cap} has value {} vs optimal {optimal}",
                    p.value
                ),
            );
            break;
        }
    }
    let ids: Vec<MemberId> = (1..=n).map(|t| joined_at(t, t)).collect();
    let full: Path = model.make_path(ids, cont);
    let h = s.report_horizon.min(n);
    r.path(
        "myopic",
        &seq.points[..h.min(seq.points.len())],
        seq.continuation.as_ref(),
    );
    r.path("forward", &full.points[..h], full.continuation.as_ref());
    r.expect(
        (full.value - optimal).abs() <= value_tolerance(optimal),
        format!("joined path has value {} vs optimal {optimal}", full.value),
    );
    let dominated = (1..=n).all(|t| {
        let x = full.id_at(t);
        l.leq_id(seq.id_at(t), x) && l.leq_id(x, x_bar)
    }) && match (seq.continuation_id, full.continuation_id) {
        (Some(a), Some(b)) => l.leq_id(a, b) && l.leq_id(b, x_bar),
        _ => true,
    };
    r.expect(
        dominated,
        "joined path is not between the myopic path and x_bar",
    );
    for f in &seq.failures {
        r.expect(false, f.clone());
    }
    Ok(r)
}

fn reject_lottery(s: &DynamicScenario) -> Result<()> {
    if s.lottery.is_some() {
        return Err(Error::InvalidScenario(
            "short-lived results are stated for deterministic costs".into(),
        ));
    }
    Ok(())
}

fn dedup_passing(hyps: &mut Vec<PropertyReport>) {
    let mut seen = Vec::new();
    hyps.retain(|h| {
        if h.holds {
            if seen.contains(&h.property) {
                return false;
            }
            seen.push(h.property);
        }
        true
    });
}
