//! Property-based invariants across modules.

use lechat_core::cost::{CostSpec, ExtValue, ScalarCost};
use lechat_core::harness::{evaluate, generate, verify_certificate};
use lechat_core::lattice::strong_set_geq;
use lechat_core::lechatelier::{longrun_select, theorem2_select};
use lechat_core::models::{flip_dimensions, BeliefSet, PricingModel};
use lechat_core::myopic::equilibrium_sequence;
use lechat_core::properties::{
    check_join_path_inequality, check_minimally_monotone, check_monotone,
    check_single_dipped_at_zero,
};
use lechat_core::static_solver::{argmax, theorem1_select};
use lechat_core::stochastic::expected_objective;
use lechat_core::{
    CheckOptions, CostFunction, CostLottery, CostTable, DynamicModel, GridLattice, Point,
    ScenarioConfig, SelectionMode, SolveOptions, Utility,
};
use proptest::prelude::*;

fn exact() -> CheckOptions {
    CheckOptions::exact()
}

/// Product grid with an optional `idx_i ≤ idx_j + c` mask.
fn lattice() -> impl Strategy<Value = GridLattice> {
    (
        prop::collection::vec(2usize..=4, 1..=3),
        any::<bool>(),
        0i64..=1,
    )
        .prop_map(|(sizes, mask, c)| {
            let axes: Vec<Vec<f64>> = sizes
                .iter()
                .map(|&s| (0..s).map(|i| i as f64).collect())
                .collect();
            if mask && axes.len() >= 2 {
                GridLattice::with_mask(axes, move |x| x[0] <= x[1] + c as f64).unwrap()
            } else {
                GridLattice::product(axes).unwrap()
            }
        })
}

/// Scalar table single-dipped at zero over `−m..=m`, from nonnegative
/// increments outward.
fn single_dipped(m: usize) -> impl Strategy<Value = ScalarCost> {
    (
        prop::collection::vec(0u8..3, m),
        prop::collection::vec(0u8..3, m),
    )
        .prop_map(move |(up, down)| {
            let mut values = vec![(0.0, ExtValue(0.0))];
            for (sign, incs) in [(1.0, up), (-1.0, down)] {
                let mut acc = 0.0;
                for (k, inc) in incs.iter().enumerate() {
                    acc += f64::from(*inc);
                    values.push((sign * (k + 1) as f64, ExtValue(acc)));
                }
            }
            ScalarCost::Table { values }
        })
}

/// Scalar table over `−m..=m` with arbitrary values and `C(0)` in `{0, 1}`.
fn arbitrary_scalar(m: usize) -> impl Strategy<Value = ScalarCost> {
    (prop::collection::vec(0u8..4, 2 * m), 0u8..2).prop_map(move |(vals, z)| {
        let mut values = vec![(0.0, ExtValue(f64::from(z)))];
        for (k, v) in vals.iter().enumerate() {
            let e = (k / 2 + 1) as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
            values.push((e, ExtValue(f64::from(*v))));
        }
        ScalarCost::Table { values }
    })
}

fn scalar_single_dipped(c: &ScalarCost, m: usize) -> bool {
    let v = |e: f64| c.eval(e).unwrap();
    (1..=m).all(|k| v(k as f64 - 1.0) <= v(k as f64) && v(1.0 - k as f64) <= v(-(k as f64)))
}

fn scalar_min_at_zero(c: &ScalarCost, m: usize) -> bool {
    (1..=m).all(|k| {
        c.eval(0.0).unwrap() <= c.eval(k as f64).unwrap()
            && c.eval(0.0).unwrap() <= c.eval(-(k as f64)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sublattice_closed_and_lattice_identities(l in lattice(), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let m = l.len();
        let [a, b, c] = [picks[0].index(m), picks[1].index(m), picks[2].index(m)];
        for x in l.ids() {
            for y in l.ids() {
                let (p, q) = (l.point(x), l.point(y));
                prop_assert!(l.contains(&p.meet(&q).unwrap()));
                prop_assert!(l.contains(&p.join(&q).unwrap()));
            }
        }
        prop_assert_eq!(l.meet_id(a, l.join_id(a, b)), a);
        prop_assert_eq!(l.join_id(a, l.meet_id(a, b)), a);
        prop_assert_eq!(l.meet_id(a, b), l.meet_id(b, a));
        prop_assert_eq!(l.join_id(a, b), l.join_id(b, a));
        prop_assert_eq!(l.meet_id(a, l.meet_id(b, c)), l.meet_id(l.meet_id(a, b), c));
        prop_assert_eq!(l.join_id(a, l.join_id(b, c)), l.join_id(l.join_id(a, b), c));
    }

    #[test]
    fn strong_set_order_reflexive_and_transitive(l in lattice(), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        // Boxes [x_k, top] with x_1 ≤ x_2 ≤ x_3 form an increasing chain of sublattices.
        let m = l.len();
        let x1 = picks[0].index(m);
        let x2 = l.join_id(x1, picks[1].index(m));
        let x3 = l.join_id(x2, picks[2].index(m));
        let top = l.point(l.top());
        let sets: Vec<Vec<Point>> = [x1, x2, x3]
            .iter()
            .map(|&x| l.sub_box(&l.point(x), &top).unwrap().points())
            .collect();
        for s in &sets {
            prop_assert!(strong_set_geq(s, s));
        }
        prop_assert!(strong_set_geq(&sets[1], &sets[0]));
        prop_assert!(strong_set_geq(&sets[2], &sets[1]));
        prop_assert!(strong_set_geq(&sets[2], &sets[0]));
    }

    #[test]
    fn monotonicity_is_ordinal(seed in 0u64..5000) {
        let inst = generate("thm1", seed).unwrap();
        let l = inst.problem.objective.lattice().clone();
        let t = CostTable::new(&inst.problem.cost, &l).unwrap();
        let phi = |v: f64| if v.is_infinite() { v } else { v * v * v + 2.0 * v };
        let spec = CostSpec::Table {
            entries: l.diff_set().iter().map(|d| lechat_core::CostEntry {
                diff: d.entries().to_vec(),
                cost: ExtValue(phi(inst.problem.cost.at(d).unwrap())),
            }).collect(),
        };
        let t2 = CostTable::new(&CostFunction::new(spec).unwrap(), &l).unwrap();
        prop_assert_eq!(check_monotone(&t, &exact()).holds, check_monotone(&t2, &exact()).holds);
        prop_assert_eq!(check_minimally_monotone(&t, &exact()).holds, check_minimally_monotone(&t2, &exact()).holds);
    }

    #[test]
    fn separable_monotone_iff_components_single_dipped(
        comps in prop::collection::vec(prop_oneof![single_dipped(3), arbitrary_scalar(3)], 1..=2)
    ) {
        let n = comps.len();
        let l = GridLattice::product(vec![(0..4).map(f64::from).collect(); n]).unwrap();
        let zero_ok = comps.iter().all(|c| c.eval(0.0).unwrap() == 0.0);
        prop_assume!(zero_ok || n == 1);
        let c = CostFunction::new(CostSpec::Separable { components: comps.clone() }).unwrap();
        let t = CostTable::new(&c, &l).unwrap();
        let mono = check_monotone(&t, &exact());
        prop_assert_eq!(mono.holds, comps.iter().all(|c| scalar_single_dipped(c, 3)));
        prop_assert_eq!(check_minimally_monotone(&t, &exact()).holds, comps.iter().all(|c| scalar_min_at_zero(c, 3)));
        if n == 1 {
            prop_assert_eq!(mono.holds, check_single_dipped_at_zero(&t, &exact()).unwrap().holds);
        }
        // A failing verdict's witness re-evaluates to a violation.
        if let Some(w) = mono.witness.as_ref() {
            let inner = c.eval(w.get_point("ε'").unwrap()).unwrap();
            let outer = c.eval(w.get_point("ε").unwrap()).unwrap();
            prop_assert!(inner > outer);
        }
    }

    #[test]
    fn join_path_inequality_for_single_dipped(c in single_dipped(4)) {
        let l = GridLattice::product(vec![(0..5).map(f64::from).collect()]).unwrap();
        let cost = CostFunction::new(CostSpec::Separable { components: vec![c] }).unwrap();
        let t = CostTable::new(&cost, &l).unwrap();
        prop_assert!(check_join_path_inequality(&t, &exact()).unwrap().holds);
    }

    #[test]
    fn generated_instances_carry_valid_certificates(seed in 0u64..5000, which in 0usize..6) {
        let theorem = ["thm1", "thm2", "prop3", "thm4", "thm6", "thm2_minimal"][which];
        let inst = generate(theorem, seed).unwrap();
        let l = inst.problem.objective.lattice();
        prop_assert!(verify_certificate(&inst.problem.cost, l, &inst.certificates[0]).unwrap().is_none());
    }

    #[test]
    fn join_selection_holds_and_is_idempotent(seed in 0u64..5000) {
        let inst = generate("thm1", seed).unwrap();
        let sel = theorem1_select(&inst.problem, &SolveOptions::default()).unwrap();
        prop_assert!(sel.conclusion_holds());
        // Start from the selected point: it is optimal there, so it is kept.
        let mut again = inst.problem.clone();
        again.theta_lo = again.theta_hi;
        let prep = again.prepare().unwrap();
        let best = argmax(&prep.lattice, |i| prep.objective.value(i, again.theta_hi)).unwrap();
        again.x_lo = Some(prep.lattice.point(best.first()));
        again.cost = CostFunction::zero();
        let sel2 = theorem1_select(&again, &SolveOptions::default()).unwrap();
        prop_assert_eq!(sel2.x_hat, sel2.x_lo);
    }

    #[test]
    fn parameter_decrease_moves_down(seed in 0u64..5000) {
        let inst = generate("thm1", seed).unwrap();
        let mut p = inst.problem.clone();
        std::mem::swap(&mut p.theta_lo, &mut p.theta_hi);
        let dims: Vec<usize> = (0..p.objective.lattice().dims()).collect();
        let mut flipped = flip_dimensions(&p, &dims).unwrap();
        flipped.objective = flipped.objective.with_params(flipped.objective.params().dual()).unwrap();
        let sel = theorem1_select(&flipped, &SolveOptions::default()).unwrap();
        prop_assert!(sel.conclusion_holds());
        let back = |q: &Point| Point::new(q.coords().iter().map(|v| -v + 0.0).collect());
        prop_assert!(back(&sel.x_hat).leq(&back(&sel.x_lo)));
    }

    #[test]
    fn lechatelier_is_meet_of_long_run_and_join(seed in 0u64..5000) {
        let inst = generate("thm2", seed).unwrap();
        let two = theorem2_select(&inst.problem, None, &SolveOptions::default()).unwrap();
        let one = theorem1_select(&inst.problem, &SolveOptions::default()).unwrap();
        prop_assert!(two.conclusion_holds());
        prop_assert_eq!(&two.x_hat, &two.x_bar.meet(&one.x_hat).unwrap());
    }

    #[test]
    fn truncation_and_monotonized_costs(seed in 0u64..2000) {
        let inst = generate("thm4", seed).unwrap();
        let s = inst.dynamic.unwrap();
        let model = DynamicModel::new(&s).unwrap();
        let sol = model.solve().unwrap();
        let l = &model.lattice;
        let h = 10;
        let bound_f = s.objective.max_abs();
        let bound_c = CostTable::new(&s.cost_tail, l).unwrap().max_finite();
        let gap = (model.truncated_value(&sol.path, h + 5) - model.truncated_value(&sol.path, h)).abs();
        prop_assert!(gap <= s.delta.powi(h as i32) * (bound_f + bound_c) / (1.0 - s.delta) + 1e-9);

        let x_bar = l.require(&longrun_select(&s.objective, s.theta_hi, &l.point(model.x0)).unwrap().x_bar).unwrap();
        let sand = model.sandwich_transform(&sol.path, model.x0, x_bar);
        let mono = model.monotonize(&sand);
        let cost = |a: usize, b: usize| {
            let e: Vec<f64> = l.coords(a).iter().zip(l.coords(b)).map(|(x, y)| x - y).collect();
            s.cost_tail.eval(&e).unwrap()
        };
        for t in 2..=h {
            prop_assert!(cost(mono.id_at(t), mono.id_at(t - 1)) <= cost(sand.id_at(t), sand.id_at(t - 1)));
        }
    }

    #[test]
    fn myopic_points_are_period_maximizers(seed in 0u64..2000) {
        let inst = generate("thm5", seed).unwrap();
        let s = inst.dynamic.unwrap();
        let model = DynamicModel::new(&s).unwrap();
        for mode in [SelectionMode::Caged, SelectionMode::Monotone] {
            let seq = equilibrium_sequence(&s, mode).unwrap();
            let mut prev = model.x0;
            for (t, &x) in seq.ids.iter().enumerate() {
                let best = model.lattice.ids().map(|y| model.payoff(t + 1, prev, y)).fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(model.payoff(t + 1, prev, x), best);
                prev = x;
            }
        }
    }

    #[test]
    fn degenerate_lottery_keeps_the_argmax(seed in 0u64..5000, alpha in 0.1f64..2.0) {
        let inst = generate("thm2", seed).unwrap();
        let p = &inst.problem;
        // Scale α to the payoff range so exp does not saturate distinct payoffs.
        let range = 1.0 + p.objective.max_abs()
            + CostTable::new(&p.cost, p.objective.lattice()).unwrap().max_finite();
        let lot = CostLottery::degenerate(p.cost.clone(), Utility::Cara { alpha: alpha / range }).unwrap();
        let prep = p.prepare().unwrap();
        let plain = prep.adjusted_argmax().unwrap();
        let l = &prep.lattice;
        let risky = argmax(l, |i| expected_objective(p, &lot, &l.point(i), p.theta_hi).unwrap()).unwrap();
        prop_assert_eq!(plain.members, risky.members);
    }

    #[test]
    fn kl_cost_is_minimally_monotone(cdfs in prop::collection::vec((1u8..8, 0u8..8), 1..=3)) {
        let cdfs: Vec<Vec<f64>> = std::iter::once(vec![1.0 / 3.0, 2.0 / 3.0, 1.0])
            .chain(cdfs.iter().map(|&(a, b)| {
                let a = f64::from(a) / 8.0;
                vec![a, (a + f64::from(b) / 8.0).min(1.0), 1.0]
            }))
            .collect();
        let beliefs = BeliefSet::closure(&[1.0, 2.0, 3.0], &cdfs).unwrap();
        let pts: Vec<Point> = beliefs.cdfs().iter().map(|c| Point::new(vec![-c[0] + 0.0, -c[1] + 0.0])).collect();
        let axes: Vec<Vec<f64>> = (0..2).map(|j| {
            let mut a: Vec<f64> = pts.iter().map(|p| p.coords()[j]).collect();
            a.sort_by(f64::total_cmp);
            a.dedup();
            a
        }).collect();
        let l = GridLattice::from_members(axes, &pts).unwrap();
        let kl = CostFunction::new(CostSpec::KullbackLeibler { reference: vec![1.0 / 3.0, 2.0 / 3.0], scale: 1.0, offset: 0 }).unwrap();
        let t = CostTable::new(&kl, &l).unwrap();
        let opts = CheckOptions { tolerance: 1e-12 };
        prop_assert!(check_minimally_monotone(&t, &opts).holds);
    }

    #[test]
    fn pricing_raises_price_with_marginal_cost(c0 in 0u8..8, bump in 1u8..8) {
        let mut m = PricingModel::demo();
        m.states[0].marginal_cost = f64::from(c0) / 4.0;
        m.states[1].marginal_cost = f64::from(c0 + bump) / 4.0;
        let b = m.build(&exact()).unwrap();
        let res = theorem2_select(&b.static_problem(), None, &b.solve_options()).unwrap();
        prop_assert!(res.conclusion_holds());
        prop_assert!(res.x_hat.geq(&res.x_lo) && res.x_bar.geq(&res.x_hat));
    }

    #[test]
    fn repro_round_trips(seed in 0u64..3000, which in 0usize..4) {
        let theorem = ["thm1star", "thm2p", "thm3", "thm6"][which];
        let inst = generate(theorem, seed).unwrap();
        let json = inst.repro().to_json();
        let back = ScenarioConfig::from_json(&json).unwrap();
        prop_assert_eq!(&back, &inst.repro());
        let sc = back.resolve().unwrap();
        prop_assert_eq!(sc.problem.objective.table(), inst.problem.objective.table());
        let again = lechat_core::harness::Instance {
            problem: sc.problem,
            lottery: sc.lottery,
            dynamic: sc.dynamic,
            ..inst.clone()
        };
        let a: Vec<_> = evaluate(&inst, true).unwrap().into_iter().map(|r| r.verdict).collect();
        let b: Vec<_> = evaluate(&again, true).unwrap().into_iter().map(|r| r.verdict).collect();
        prop_assert_eq!(a, b);
    }
}
