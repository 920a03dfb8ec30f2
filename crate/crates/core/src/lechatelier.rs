//! Short-run versus long-run responses: the short-run choice under a
//! monotone cost lies between the old optimum and the new frictionless one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{GridLattice, MemberId, Point};
use crate::objective::Objective;
use crate::properties::{check_monotone, check_strictly_monotone, PropertyReport};
use crate::report::TheoremReport;
use crate::static_solver::{
    argmax_ids, join_selection_over, ArgmaxSet, Prepared, SolveOptions, StaticProblem,
};

/// A frictionless long-run choice `x̄ ≥ x̲`.
#[derive(Debug, Clone, Serialize)]
pub struct LongRun {
    pub x_bar: Point,
    /// `x̲ ∨ x″` for the lexicographically first frictionless maximizer `x″`.
    pub constructed: Point,
    /// `x̄` is the largest element of the frictionless argmax.
    pub largest: bool,
    pub argmax: Vec<Point>,
    #[serde(skip)]
    pub id: MemberId,
}

pub(crate) fn longrun_ids(
    l: &GridLattice,
    obj: &Objective,
    theta_hi: usize,
    ids: &[MemberId],
    x_lo: MemberId,
) -> Result<LongRun> {
    let best = argmax_ids(ids, |i| obj.value(i, theta_hi))?;
    let constructed = l.join_id(x_lo, best.first());
    let largest = l
        .largest_of(&best.members)
        .filter(|&top| best.contains(top));
    let id = match largest {
        Some(top) if l.leq_id(x_lo, top) => top,
        _ if best.contains(constructed) => constructed,
        _ => {
            return Err(Error::Certification(format!(
                "no frictionless maximizer lies above {}",
                l.point(x_lo)
            )))
        }
    };
    Ok(LongRun {
        x_bar: l.point(id),
        constructed: l.point(constructed),
        largest: largest == Some(id),
        argmax: best.points(l),
        id,
    })
}

/// Picks `x̄ ∈ argmax F(·, θ̄)` with `x̄ ≥ x̲`: the largest maximizer when it
/// exists, else `x̲ ∨ x″`.
pub fn longrun_select(obj: &Objective, theta_hi: usize, x_lo: &Point) -> Result<LongRun> {
    let l = obj.lattice();
    let ids: Vec<MemberId> = l.ids().collect();
    longrun_ids(l, obj, theta_hi, &ids, l.require(x_lo)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct LeChatelierResult {
    pub x_lo: Point,
    /// Join selection `x̲ ∨ x′` from the one-shot problem.
    pub x_prime: Point,
    pub x_hat: Point,
    pub x_bar: Point,
    pub x_bar_largest: bool,
    pub x_hat_optimal: bool,
    /// `x̲ ≤ x̂ ≤ x̄`.
    pub sandwich: bool,
    /// Set when `x̄` is the largest frictionless maximizer: every short-run
    /// maximizer lies below `x̄`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub universal_bound: Option<bool>,
    pub short_run_argmax: Vec<Point>,
    pub hypotheses: Vec<PropertyReport>,
}

impl LeChatelierResult {
    pub fn conclusion_holds(&self) -> bool {
        self.x_hat_optimal && self.sandwich && self.universal_bound.unwrap_or(true)
    }
}

pub(crate) fn prepare_unconstrained(problem: &StaticProblem) -> Result<Prepared> {
    if problem.initial_set.is_some() || problem.new_set.is_some() {
        return Err(Error::InvalidScenario(
            "short-run/long-run comparison takes a single constraint set".into(),
        ));
    }
    problem.prepare()
}

fn resolve_x_bar(prep: &Prepared, x_bar: Option<&Point>) -> Result<LongRun> {
    let l = &prep.lattice;
    let auto = longrun_ids(l, &prep.objective, prep.theta_hi, &prep.feasible, prep.x_lo)?;
    let Some(p) = x_bar else { return Ok(auto) };
    let id = l.require(p)?;
    let best = argmax_ids(&prep.feasible, |i| prep.objective.value(i, prep.theta_hi))?;
    if !best.contains(id) || !l.leq_id(prep.x_lo, id) {
        return Err(Error::InvalidScenario(format!(
            "{p} is not a frictionless maximizer above the initial choice"
        )));
    }
    Ok(LongRun {
        x_bar: p.clone(),
        largest: l.largest_of(&best.members) == Some(id),
        id,
        ..auto
    })
}

/// `x̂ = x̄ ∧ (x̲ ∨ x′)`, certified optimal and sandwiched. Requires a
/// monotone cost. `x_bar` defaults to the largest long-run maximizer.
pub fn theorem2_select(
    problem: &StaticProblem,
    x_bar: Option<&Point>,
    opts: &SolveOptions,
) -> Result<LeChatelierResult> {
    let prep = prepare_unconstrained(problem)?;
    let hyps = prep.hypotheses(&[check_monotone], false, false, &opts.check)?;
    opts.enforce(&hyps)?;
    let best = prep.adjusted_argmax()?;
    lechatelier_over(&prep, best, x_bar, hyps)
}

/// The short-run/long-run construction given the short-run argmax.
pub(crate) fn lechatelier_over(
    prep: &Prepared,
    best: ArgmaxSet,
    x_bar: Option<&Point>,
    hyps: Vec<PropertyReport>,
) -> Result<LeChatelierResult> {
    let long = resolve_x_bar(prep, x_bar)?;
    let sel = join_selection_over(prep, best, Vec::new())?;
    let l = &prep.lattice;
    let x_hat = l.meet_id(long.id, sel.ids.x_hat);
    let x_hat_optimal = sel.ids.argmax.binary_search(&x_hat).is_ok();
    let universal_bound = long
        .largest
        .then(|| sel.ids.argmax.iter().all(|&y| l.leq_id(y, long.id)));
    Ok(LeChatelierResult {
        x_lo: prep.point(prep.x_lo),
        x_prime: sel.x_hat,
        x_hat: prep.point(x_hat),
        x_bar: long.x_bar,
        x_bar_largest: long.largest,
        x_hat_optimal,
        sandwich: l.leq_id(prep.x_lo, x_hat) && l.leq_id(x_hat, long.id),
        universal_bound,
        short_run_argmax: sel.argmax,
        hypotheses: hyps,
    })
}

pub fn theorem2_check(problem: &StaticProblem, opts: &SolveOptions) -> Result<TheoremReport> {
    Ok(lechatelier_report(
        "thm2",
        &theorem2_select(problem, None, opts)?,
    ))
}

pub(crate) fn lechatelier_report(name: &str, res: &LeChatelierResult) -> TheoremReport {
    let mut r = TheoremReport::new(name, res.hypotheses.clone());
    r.point("x_lo", &res.x_lo)
        .point("x_hat", &res.x_hat)
        .point("x_bar", &res.x_bar);
    r.expect(res.x_hat_optimal, "x_bar ∧ x' is not a maximizer of G")
        .expect(res.sandwich, "x_hat is not between x_lo and x_bar")
        .expect(
            res.universal_bound.unwrap_or(true),
            "a short-run maximizer exceeds the largest long-run maximizer",
        );
    r
}

/// Holds iff every short-run maximizer lies in `[x̲, x̄]`. Requires a
/// strictly monotone cost.
pub fn prop3_forall_check(
    problem: &StaticProblem,
    x_bar: Option<&Point>,
    opts: &SolveOptions,
) -> Result<TheoremReport> {
    let prep = prepare_unconstrained(problem)?;
    let hyps = prep.hypotheses(&[check_strictly_monotone], false, false, &opts.check)?;
    opts.enforce(&hyps)?;
    let long = resolve_x_bar(&prep, x_bar)?;
    let best = prep.adjusted_argmax()?;
    let l = &prep.lattice;
    let mut r = TheoremReport::new("prop3", hyps);
    r.point("x_lo", &prep.point(prep.x_lo))
        .point("x_bar", &long.x_bar);
    let outside = best
        .members
        .iter()
        .copied()
        .find(|&y| !(l.leq_id(prep.x_lo, y) && l.leq_id(y, long.id)));
    if let Some(y) = outside {
        r.point("maximizer", &prep.point(y));
    }
    r.expect(
        outside.is_none(),
        "a short-run maximizer lies outside [x_lo, x_bar]",
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostFunction, CostSpec};
    use crate::lattice::ParamPoset;
    use crate::properties::Property;

    fn line(n: i32) -> GridLattice {
        GridLattice::product(vec![(0..n).map(f64::from).collect()]).unwrap()
    }

    #[test]
    fn flat_top_picks_largest() {
        let obj = Objective::tabulate(line(6), ParamPoset::chain(2).unwrap(), |x, _| {
            let v = x.coords()[0];
            -(v - 2.5).abs().max(0.5)
        })
        .unwrap();
        let lr = longrun_select(&obj, 1, &Point::new(vec![1.0])).unwrap();
        assert_eq!(lr.x_bar, Point::new(vec![3.0]));
        assert!(lr.largest);
        assert_eq!(lr.argmax.len(), 2);
    }

    fn gap_problem() -> StaticProblem {
        let obj = Objective::tabulate(line(6), ParamPoset::chain(2).unwrap(), |x, t| {
            let v = x.coords()[0];
            if t == 0 {
                -v * v
            } else {
                -(v - 2.0) * (v - 2.0)
            }
        })
        .unwrap();
        let cost = CostFunction::from_fn(obj.lattice(), |d| {
            let e = d.entries()[0];
            if e > 0.0 && e < 3.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .unwrap();
        StaticProblem::new(obj, cost, 0, 1)
    }

    #[test]
    fn gap_cost_overshoots_and_is_rejected() {
        let p = gap_problem();
        let err = theorem2_select(&p, None, &SolveOptions::default()).unwrap_err();
        match err {
            Error::Hypothesis(rep) => assert_eq!(rep.property, Property::Monotone),
            other => panic!("unexpected {other:?}"),
        }
        let forced = theorem2_select(&p, None, &SolveOptions::unchecked()).unwrap();
        assert_eq!(forced.short_run_argmax, vec![Point::new(vec![3.0])]);
        assert_eq!(forced.x_bar, Point::new(vec![2.0]));
        assert!(!forced.conclusion_holds());
    }

    #[test]
    fn zero_cost_sandwich() {
        let obj = Objective::tabulate(line(6), ParamPoset::chain(3).unwrap(), |x, t| {
            let v = x.coords()[0];
            -(v - t as f64 * 2.0).powi(2)
        })
        .unwrap();
        let p = StaticProblem::new(obj, CostFunction::zero(), 0, 2);
        let res = theorem2_select(&p, None, &SolveOptions::default()).unwrap();
        assert!(res.conclusion_holds());
        assert_eq!(res.x_hat, res.x_bar);
    }

    #[test]
    fn strict_cost_forall() {
        let obj = Objective::tabulate(line(6), ParamPoset::chain(2).unwrap(), |x, t| {
            let v = x.coords()[0];
            -(v - 1.0 - 3.0 * t as f64).powi(2)
        })
        .unwrap();
        let cost = CostFunction::new(CostSpec::Quadratic { weights: vec![0.7] }).unwrap();
        let p = StaticProblem::new(obj, cost, 0, 1);
        assert!(prop3_forall_check(&p, None, &SolveOptions::default())
            .unwrap()
            .holds());
        let fixed = CostFunction::new(CostSpec::Fixed { k: 1.0 }).unwrap();
        let p = StaticProblem { cost: fixed, ..p };
        assert!(matches!(
            prop3_forall_check(&p, None, &SolveOptions::default()),
            Err(Error::Hypothesis(_))
        ));
    }
}
