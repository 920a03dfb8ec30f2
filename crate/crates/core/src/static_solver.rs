//! The one-shot adjusted problem `max_x F(x, θ̄) − C(x − x̲)` and the
//! join selection `x̂ = x̲ ∨ x′`.

use serde::Serialize;

use crate::cost::{CostFunction, CostTable};
use crate::error::{Error, Result};
use crate::lattice::{strong_set_geq_ids, GridLattice, MemberId, Point};
use crate::objective::Objective;
use crate::properties::{
    check_minimally_monotone, check_objective_quasi_supermodular, check_parameter_order,
    check_single_crossing, check_strict_single_crossing, check_strictly_minimally_monotone, gate,
    CheckOptions, Property, PropertyReport, Witness,
};
use crate::report::{TheoremReport, Verdict};

/// Hypothesis handling for constructive selections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Refuse to run when a hypothesis fails. Turning this off reproduces
    /// counterexamples.
    pub check_hypotheses: bool,
    pub check: CheckOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            check_hypotheses: true,
            check: CheckOptions::exact(),
        }
    }
}

impl SolveOptions {
    pub fn unchecked() -> Self {
        SolveOptions {
            check_hypotheses: false,
            ..Self::default()
        }
    }

    /// Gates on the reports when checking is on.
    pub fn enforce(&self, reports: &[PropertyReport]) -> Result<()> {
        if self.check_hypotheses {
            gate(reports)
        } else {
            Ok(())
        }
    }
}

/// All maximizers of a function over a member subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxSet {
    pub members: Vec<MemberId>,
    pub value: f64,
}

impl ArgmaxSet {
    pub fn contains(&self, id: MemberId) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    /// Lexicographically first maximizer.
    pub fn first(&self) -> MemberId {
        self.members[0]
    }

    pub fn points(&self, l: &GridLattice) -> Vec<Point> {
        self.members.iter().map(|&i| l.point(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Exact argmax by enumeration. `−∞` (and NaN) values are infeasible and
/// never maximize; fails when nothing is feasible.
pub fn argmax_ids(ids: &[MemberId], f: impl Fn(MemberId) -> f64) -> Result<ArgmaxSet> {
    let mut best = f64::NEG_INFINITY;
    let mut members = Vec::new();
    for &i in ids {
        let v = f(i);
        if v.is_nan() || v == f64::NEG_INFINITY {
            continue;
        }
        if v > best {
            best = v;
            members.clear();
            members.push(i);
        } else if v == best {
            members.push(i);
        }
    }
    if members.is_empty() {
        return Err(Error::Infeasible);
    }
    members.sort_unstable();
    Ok(ArgmaxSet {
        members,
        value: best,
    })
}

/// Argmax over every member of `l`.
pub fn argmax(l: &GridLattice, f: impl Fn(MemberId) -> f64) -> Result<ArgmaxSet> {
    let ids: Vec<MemberId> = l.ids().collect();
    argmax_ids(&ids, f)
}

/// `F(x) − C`, with an infinite cost mapping to `−∞`.
pub fn adjusted(f: f64, c: f64) -> f64 {
    if c == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        f - c
    }
}

/// The static problem: objective on an ambient lattice, cost, parameter
/// shift, and optionally distinct initial and new constraint sets.
#[derive(Debug, Clone)]
pub struct StaticProblem {
    pub objective: Objective,
    pub cost: CostFunction,
    pub theta_lo: usize,
    pub theta_hi: usize,
    /// Initial choice; defaults to the lexicographically first maximizer
    /// of `F(·, θ̲)` over the initial set.
    pub x_lo: Option<Point>,
    /// `L̲`; defaults to the whole lattice.
    pub initial_set: Option<GridLattice>,
    /// `L̄`; defaults to the whole lattice.
    pub new_set: Option<GridLattice>,
}

impl StaticProblem {
    pub fn new(objective: Objective, cost: CostFunction, theta_lo: usize, theta_hi: usize) -> Self {
        StaticProblem {
            objective,
            cost,
            theta_lo,
            theta_hi,
            x_lo: None,
            initial_set: None,
            new_set: None,
        }
    }

    pub fn with_x_lo(mut self, x: Point) -> Self {
        self.x_lo = Some(x);
        self
    }

    pub fn with_sets(mut self, initial: GridLattice, new: GridLattice) -> Self {
        self.initial_set = Some(initial);
        self.new_set = Some(new);
        self
    }

    pub fn prepare(&self) -> Result<Prepared> {
        let lattice = self.objective.lattice().clone();
        let k = self.objective.params().len();
        for t in [self.theta_lo, self.theta_hi] {
            if t >= k {
                return Err(Error::InvalidScenario(format!(
                    "parameter index {t} out of range"
                )));
            }
        }
        let ids_of = |set: &Option<GridLattice>| -> Result<Vec<MemberId>> {
            match set {
                None => Ok(lattice.ids().collect()),
                Some(s) => {
                    let mut ids = s.embed_into(&lattice)?;
                    ids.sort_unstable();
                    Ok(ids)
                }
            }
        };
        let initial = ids_of(&self.initial_set)?;
        let feasible = ids_of(&self.new_set)?;
        let cost = self.cost.bind(&lattice)?;
        let x_lo = match &self.x_lo {
            Some(p) => {
                let id = lattice.require(p)?;
                if initial.binary_search(&id).is_err() {
                    return Err(Error::InvalidScenario(format!(
                        "initial choice {p} is outside the initial set"
                    )));
                }
                id
            }
            None => argmax_ids(&initial, |i| self.objective.value(i, self.theta_lo))?.first(),
        };
        Ok(Prepared {
            objective: self.objective.clone(),
            lattice,
            cost,
            initial,
            feasible,
            x_lo,
            theta_lo: self.theta_lo,
            theta_hi: self.theta_hi,
            has_sets: self.initial_set.is_some() || self.new_set.is_some(),
        })
    }
}

/// A static problem with its cost bound and sets resolved to member ids.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub objective: Objective,
    pub lattice: GridLattice,
    pub cost: CostTable,
    pub initial: Vec<MemberId>,
    pub feasible: Vec<MemberId>,
    pub x_lo: MemberId,
    pub theta_lo: usize,
    pub theta_hi: usize,
    pub has_sets: bool,
}

impl Prepared {
    /// `G(x, θ̄)`.
    pub fn g(&self, x: MemberId) -> f64 {
        adjusted(
            self.objective.value(x, self.theta_hi),
            self.cost.between(x, self.x_lo),
        )
    }

    pub fn adjusted_argmax(&self) -> Result<ArgmaxSet> {
        argmax_ids(&self.feasible, |i| self.g(i))
    }

    pub fn frictionless_argmax(&self, theta: usize, ids: &[MemberId]) -> Result<ArgmaxSet> {
        argmax_ids(ids, |i| self.objective.value(i, theta))
    }

    pub fn point(&self, id: MemberId) -> Point {
        self.lattice.point(id)
    }

    fn initial_optimality(&self) -> Result<PropertyReport> {
        let best = self.frictionless_argmax(self.theta_lo, &self.initial)?;
        Ok(if best.contains(self.x_lo) {
            PropertyReport::pass(Property::InitialOptimality)
        } else {
            let w = Witness::new()
                .point("x_lo", self.lattice.coords(self.x_lo))
                .point("better", self.lattice.coords(best.first()));
            PropertyReport::fail(Property::InitialOptimality, w)
        })
    }

    fn strong_set_order(&self) -> PropertyReport {
        for (name, ids) in [("initial", &self.initial), ("new", &self.feasible)] {
            if !self.lattice.is_sublattice(ids) {
                return PropertyReport::fail(Property::Sublattice, Witness::new())
                    .with_note(format!("{name} set is not a sublattice"));
            }
        }
        if strong_set_geq_ids(&self.lattice, &self.feasible, &self.initial) {
            PropertyReport::pass(Property::StrongSetOrder)
        } else {
            let l = &self.lattice;
            let mut w = Witness::new();
            'outer: for &a in &self.feasible {
                for &b in &self.initial {
                    if self.feasible.binary_search(&l.join_id(a, b)).is_err()
                        || self.initial.binary_search(&l.meet_id(a, b)).is_err()
                    {
                        w = w
                            .point("x_new", l.coords(a))
                            .point("x_initial", l.coords(b));
                        break 'outer;
                    }
                }
            }
            PropertyReport::fail(Property::StrongSetOrder, w)
        }
    }

    /// Hypotheses shared by the comparative-statics results: ordinal
    /// complementarity of `F`, the given cost property, `θ̲ ≤ θ̄`, the
    /// initial choice's optimality, and (with distinct sets) `L̄ ≥ₛₛ L̲`.
    pub fn hypotheses(
        &self,
        cost_checks: &[fn(&CostTable, &CheckOptions) -> PropertyReport],
        strict_scd: bool,
        strict_order: bool,
        opts: &CheckOptions,
    ) -> Result<Vec<PropertyReport>> {
        let mut out = vec![
            check_objective_quasi_supermodular(&self.objective, opts),
            if strict_scd {
                check_strict_single_crossing(&self.objective, opts)
            } else {
                check_single_crossing(&self.objective, opts)
            },
        ];
        for check in cost_checks {
            out.push(check(&self.cost, opts));
        }
        out.push(check_parameter_order(
            &self.objective,
            self.theta_lo,
            self.theta_hi,
            strict_order,
        ));
        if self.has_sets {
            out.push(self.strong_set_order());
        }
        out.push(self.initial_optimality()?);
        Ok(out)
    }
}

/// Output of the join selection.
#[derive(Debug, Clone, Serialize)]
pub struct Selection {
    pub x_lo: Point,
    pub argmax: Vec<Point>,
    pub value: f64,
    pub x_prime: Point,
    pub x_hat: Point,
    /// `x̂ ∈ argmax G(·, θ̄)`.
    pub x_hat_optimal: bool,
    /// `x̂ ≥ x̲`.
    pub x_hat_above: bool,
    /// Some maximizer of `G` lies above `x̲`.
    pub some_maximizer_above: bool,
    /// For distinct constraint sets: for every maximizer `x′`, both
    /// `x̲ ∧ x′` maximizes `F(·, θ̲)` on `L̲` and `x̲ ∨ x′` maximizes `G` on `L̄`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub companion_holds: Option<bool>,
    pub hypotheses: Vec<PropertyReport>,
    #[serde(skip)]
    pub ids: SelectionIds,
}

#[derive(Debug, Clone, Default)]
pub struct SelectionIds {
    pub x_lo: MemberId,
    pub x_prime: MemberId,
    pub x_hat: MemberId,
    pub argmax: Vec<MemberId>,
}

impl Selection {
    pub fn conclusion_holds(&self) -> bool {
        self.x_hat_optimal && self.x_hat_above && self.companion_holds.unwrap_or(true)
    }
}

pub(crate) fn join_selection(
    prep: &Prepared,
    hypotheses: Vec<PropertyReport>,
) -> Result<Selection> {
    join_selection_over(prep, prep.adjusted_argmax()?, hypotheses)
}

/// Join selection given the argmax of the adjusted objective (which may be
/// an expected utility rather than `G`).
pub(crate) fn join_selection_over(
    prep: &Prepared,
    best: ArgmaxSet,
    hypotheses: Vec<PropertyReport>,
) -> Result<Selection> {
    let l = &prep.lattice;
    // Staying put wins ties, so the selection is idempotent.
    let x_prime = if best.contains(prep.x_lo) {
        prep.x_lo
    } else {
        best.first()
    };
    let x_hat = l.join_id(prep.x_lo, x_prime);
    let x_hat_optimal = prep.feasible.binary_search(&x_hat).is_ok() && best.contains(x_hat);
    let companion_holds = if prep.has_sets {
        let initial_best = prep.frictionless_argmax(prep.theta_lo, &prep.initial)?;
        Some(best.members.iter().all(|&xp| {
            initial_best.contains(l.meet_id(prep.x_lo, xp))
                && best.contains(l.join_id(prep.x_lo, xp))
        }))
    } else {
        None
    };
    Ok(Selection {
        x_lo: prep.point(prep.x_lo),
        argmax: best.points(l),
        value: best.value,
        x_prime: prep.point(x_prime),
        x_hat: prep.point(x_hat),
        x_hat_optimal,
        x_hat_above: l.leq_id(prep.x_lo, x_hat),
        some_maximizer_above: best.members.iter().any(|&y| l.leq_id(prep.x_lo, y)),
        companion_holds,
        hypotheses,
        ids: SelectionIds {
            x_lo: prep.x_lo,
            x_prime,
            x_hat,
            argmax: best.members,
        },
    })
}

/// `x̂ = x̲ ∨ x′`, where `x′` is `x̲` if it maximizes `G(·, θ̄)` and the
/// lexicographically first maximizer otherwise. Requires `F`
/// quasi-supermodular with single-crossing differences, `C` minimally monotone and `θ̲ ≤ θ̄`; with distinct
/// constraint sets, also `L̄ ≥ₛₛ L̲` and the companion check is evaluated.
pub fn theorem1_select(problem: &StaticProblem, opts: &SolveOptions) -> Result<Selection> {
    let prep = problem.prepare()?;
    let hyps = prep.hypotheses(&[check_minimally_monotone], false, false, &opts.check)?;
    opts.enforce(&hyps)?;
    join_selection(&prep, hyps)
}

/// The constraint-shift form: requires both `L̲` and `L̄`.
pub fn theorem1_star_select(problem: &StaticProblem, opts: &SolveOptions) -> Result<Selection> {
    if problem.initial_set.is_none() || problem.new_set.is_none() {
        return Err(Error::InvalidScenario(
            "the constraint-shift selection needs both an initial and a new set".into(),
        ));
    }
    theorem1_select(problem, opts)
}

/// Theorem-style report for the join selection.
pub fn theorem1_check(problem: &StaticProblem, opts: &SolveOptions) -> Result<TheoremReport> {
    let sel = theorem1_select(problem, opts)?;
    let name = if problem.initial_set.is_some() || problem.new_set.is_some() {
        "thm1star"
    } else {
        "thm1"
    };
    let mut r = TheoremReport::new(name, sel.hypotheses.clone());
    r.point("x_lo", &sel.x_lo)
        .point("x_prime", &sel.x_prime)
        .point("x_hat", &sel.x_hat);
    r.expect(sel.x_hat_optimal, "x_lo ∨ x' is not a maximizer of G")
        .expect(sel.x_hat_above, "x_hat is not above x_lo")
        .expect(
            sel.companion_holds.unwrap_or(true),
            "companion check failed",
        );
    Ok(r)
}

/// Source of strictness for the "every maximizer" result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// Strict single-crossing differences with a minimally monotone cost.
    StrictScd,
    /// Single-crossing differences with a strictly minimally monotone cost.
    StrictCost,
}

/// Holds iff every maximizer of `G(·, θ̄)` lies above `x̲`. Needs `θ̲ < θ̄`.
pub fn prop1_forall_check(
    problem: &StaticProblem,
    mode: Strictness,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    let prep = problem.prepare()?;
    let hyps = match mode {
        Strictness::StrictScd => {
            prep.hypotheses(&[check_minimally_monotone], true, true, &opts.check)?
        }
        Strictness::StrictCost => prep.hypotheses(
            &[check_strictly_minimally_monotone],
            false,
            true,
            &opts.check,
        )?,
    };
    opts.enforce(&hyps)?;
    let best = prep.adjusted_argmax()?;
    let name = match mode {
        Strictness::StrictScd => "prop1a",
        Strictness::StrictCost => "prop1b",
    };
    let mut r = TheoremReport::new(name, hyps);
    r.point("x_lo", &prep.point(prep.x_lo));
    let below = best
        .members
        .iter()
        .copied()
        .find(|&y| !prep.lattice.leq_id(prep.x_lo, y));
    if let Some(y) = below {
        r.point("maximizer", &prep.point(y));
    }
    r.expect(below.is_none(), "a maximizer of G is not above x_lo");
    Ok(r)
}

/// Maps a hypothesis error to a rejected report; other errors pass through.
pub fn rejected_or(theorem: &str, res: Result<TheoremReport>) -> Result<TheoremReport> {
    match res {
        Err(Error::Hypothesis(rep)) => {
            let mut r = TheoremReport::new(theorem, vec![*rep]);
            r.verdict = Verdict::Rejected;
            Ok(r)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostSpec;
    use crate::lattice::ParamPoset;

    #[test]
    fn argmax_examples() {
        let l = GridLattice::product(vec![(0..6).map(f64::from).collect()]).unwrap();
        let a = argmax(&l, |i| -(l.coords(i)[0] - 2.0).powi(2)).unwrap();
        assert_eq!(a.members, vec![2]);
        let flat = argmax(&l, |_| 1.0).unwrap();
        assert_eq!(flat.len(), 6);
        assert!(matches!(
            argmax(&l, |_| f64::NEG_INFINITY),
            Err(Error::Infeasible)
        ));
    }

    fn grid_problem(cost: CostSpec) -> StaticProblem {
        let l = GridLattice::product(vec![vec![0.0, 1.0, 2.0]; 2]).unwrap();
        let p = ParamPoset::chain(2).unwrap();
        let obj = Objective::tabulate(l, p, |x, t| {
            let c = x.coords();
            c[0] * c[1] + t as f64 * (c[0] + c[1]) - 1.5 * (c[0] * c[0] + c[1] * c[1])
        })
        .unwrap();
        StaticProblem::new(obj, CostFunction::new(cost).unwrap(), 0, 1)
    }

    #[test]
    fn euclidean_join_selection() {
        let sel = theorem1_select(
            &grid_problem(CostSpec::Euclidean { scale: 1.0 }),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(sel.conclusion_holds());
        assert!(sel.hypotheses.iter().all(|h| h.holds));
    }

    #[test]
    fn zero_cost_is_frictionless() {
        let sel = theorem1_select(&grid_problem(CostSpec::Zero), &SolveOptions::default()).unwrap();
        assert!(sel.conclusion_holds());
    }

    #[test]
    fn singleton_lattice_forall_vacuous() {
        let l = GridLattice::product(vec![vec![3.0]]).unwrap();
        let obj = Objective::tabulate(l, ParamPoset::chain(2).unwrap(), |_, t| t as f64).unwrap();
        let p = StaticProblem::new(obj, CostFunction::zero(), 0, 1);
        let r = prop1_forall_check(&p, Strictness::StrictCost, &SolveOptions::unchecked()).unwrap();
        assert!(r.holds());
    }
}
