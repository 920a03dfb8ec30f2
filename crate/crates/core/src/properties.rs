//! Exhaustive decision procedures for complementarity and cost properties.
//!
//! Every check enumerates the finite instance in member-id (lexicographic)
//! order and reports the first violation found, so witnesses are
//! deterministic. Comparisons are phrased without subtracting infinities.

use std::fmt;

use serde::Serialize;

use crate::cost::{CostFunction, CostTable, ExtValue};
use crate::error::{Error, Result};
use crate::lattice::{DiffVector, GridLattice, MemberId};
use crate::objective::Objective;

/// Tolerance for comparisons of finite reals. The default of zero makes
/// every comparison exact; a positive tolerance gives slack to conclusions
/// and demands margin from premises, for noisy user tabulations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckOptions {
    pub tolerance: f64,
}

impl CheckOptions {
    pub fn exact() -> Self {
        CheckOptions { tolerance: 0.0 }
    }

    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b || a <= b + self.tolerance
    }

    pub fn lt(&self, a: f64, b: f64) -> bool {
        a + self.tolerance < b
    }

    /// Premise `a ≥ b` with margin.
    fn premise_ge(&self, a: f64, b: f64) -> bool {
        a >= b + self.tolerance
    }

    fn premise_gt(&self, a: f64, b: f64) -> bool {
        a > b + self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    QuasiSupermodular,
    Supermodular,
    Submodular,
    SingleCrossingDifferences,
    StrictSingleCrossingDifferences,
    IncreasingDifferences,
    LogIncreasingDifferences,
    Monotone,
    MinimallyMonotone,
    StrictlyMonotone,
    StrictlyMinimallyMonotone,
    SingleDippedAtZero,
    AdditivelySeparable,
    SeparableConvex,
    MonotoneTriples,
    JoinPathInequality,
    ParameterOrder,
    ParameterPath,
    StrongSetOrder,
    InitialOptimality,
    Sublattice,
    Concavity,
    Flatter,
    Positivity,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::QuasiSupermodular => "quasi-supermodular",
            Property::Supermodular => "supermodular",
            Property::Submodular => "submodular",
            Property::SingleCrossingDifferences => "single-crossing differences",
            Property::StrictSingleCrossingDifferences => "strict single-crossing differences",
            Property::IncreasingDifferences => "increasing differences",
            Property::LogIncreasingDifferences => "log increasing differences",
            Property::Monotone => "monotone cost",
            Property::MinimallyMonotone => "minimally monotone cost",
            Property::StrictlyMonotone => "strictly monotone cost",
            Property::StrictlyMinimallyMonotone => "strictly minimally monotone cost",
            Property::SingleDippedAtZero => "single-dipped and minimized at zero",
            Property::AdditivelySeparable => "additively separable cost",
            Property::SeparableConvex => "convex in every dimension",
            Property::MonotoneTriples => "join/meet triple cost inequality",
            Property::JoinPathInequality => "path join inequality",
            Property::ParameterOrder => "parameter order",
            Property::ParameterPath => "parameter path bounds",
            Property::StrongSetOrder => "strong set order",
            Property::InitialOptimality => "initial choice optimal",
            Property::Sublattice => "sublattice",
            Property::Concavity => "concavity",
            Property::Flatter => "flatter tax schedule",
            Property::Positivity => "strictly positive",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedPoint {
    pub name: String,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: ExtValue,
}

/// The violating tuple behind a failed check.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Witness {
    pub points: Vec<NamedPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<NamedValue>,
}

impl Witness {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(mut self, name: &str, coords: &[f64]) -> Self {
        self.points.push(NamedPoint {
            name: name.into(),
            coords: coords.to_vec(),
        });
        self
    }

    pub fn param(mut self, label: &str) -> Self {
        self.params.push(label.into());
        self
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.push(NamedValue {
            name: name.into(),
            value: ExtValue(v),
        });
        self
    }

    pub fn get_point(&self, name: &str) -> Option<&[f64]> {
        self.points
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.coords.as_slice())
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for p in &self.points {
            parts.push(format!(
                "{}={}",
                p.name,
                crate::lattice::Point::new(p.coords.clone())
            ));
        }
        if !self.params.is_empty() {
            parts.push(format!("θ=[{}]", self.params.join(", ")));
        }
        for v in &self.values {
            parts.push(format!("{}={}", v.name, v.value));
        }
        f.write_str(&parts.join(", "))
    }
}

/// Verdict of one property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyReport {
    pub fn pass(property: Property) -> Self {
        PropertyReport {
            property,
            holds: true,
            witness: None,
            note: None,
        }
    }

    pub fn fail(property: Property, witness: Witness) -> Self {
        PropertyReport {
            property,
            holds: false,
            witness: Some(witness),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {}",
            self.property,
            if self.holds { "holds" } else { "fails" }
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(" at {w}"));
        }
        if let Some(n) = &self.note {
            s.push_str(&format!(" ({n})"));
        }
        s
    }

    /// Converts a failing report into a hypothesis error.
    pub fn require(self) -> Result<Self> {
        if self.holds {
            Ok(self)
        } else {
            Err(Error::hypothesis(self))
        }
    }
}

/// First failing report, as an error.
pub fn gate(reports: &[PropertyReport]) -> Result<()> {
    match reports.iter().find(|r| !r.holds) {
        Some(r) => Err(Error::hypothesis(r.clone())),
        None => Ok(()),
    }
}

fn with_witness(property: Property, found: Option<Witness>) -> PropertyReport {
    match found {
        Some(w) => PropertyReport::fail(property, w),
        None => PropertyReport::pass(property),
    }
}

// ---------------------------------------------------------------------------
// Functions on a lattice.

/// `f(x) − f(x∧y) ≤ f(x∨y) − f(y)` for every ordered pair.
pub fn check_supermodular(l: &GridLattice, f: &[f64], opts: &CheckOptions) -> PropertyReport {
    with_witness(
        Property::Supermodular,
        supermodular_violation(l, f, 1.0, opts),
    )
}

/// `−f` supermodular.
pub fn check_submodular(l: &GridLattice, f: &[f64], opts: &CheckOptions) -> PropertyReport {
    with_witness(
        Property::Submodular,
        supermodular_violation(l, f, -1.0, opts),
    )
}

fn supermodular_violation(
    l: &GridLattice,
    f: &[f64],
    sign: f64,
    opts: &CheckOptions,
) -> Option<Witness> {
    for x in l.ids() {
        for y in l.ids() {
            if l.leq_id(x, y) || l.leq_id(y, x) {
                continue;
            }
            let (m, j) = (l.meet_id(x, y), l.join_id(x, y));
            let lhs = sign * f[x] - sign * f[m];
            let rhs = sign * f[j] - sign * f[y];
            if !opts.le(lhs, rhs) {
                return Some(
                    Witness::new()
                        .point("x", l.coords(x))
                        .point("y", l.coords(y))
                        .value("f(x)-f(x∧y)", lhs)
                        .value("f(x∨y)-f(y)", rhs),
                );
            }
        }
    }
    None
}

/// `f(x) ≥ (>) f(x∧y) ⟹ f(x∨y) ≥ (>) f(y)` for every ordered pair.
pub fn check_quasi_supermodular(l: &GridLattice, f: &[f64], opts: &CheckOptions) -> PropertyReport {
    with_witness(Property::QuasiSupermodular, qsm_violation(l, f, opts))
}

fn qsm_violation(l: &GridLattice, f: &[f64], opts: &CheckOptions) -> Option<Witness> {
    for x in l.ids() {
        for y in l.ids() {
            let (m, j) = (l.meet_id(x, y), l.join_id(x, y));
            let weak = opts.premise_ge(f[x], f[m]) && !opts.le(f[y], f[j]);
            let strict = opts.premise_gt(f[x], f[m]) && !opts.lt(f[y], f[j]);
            if weak || strict {
                return Some(
                    Witness::new()
                        .point("x", l.coords(x))
                        .point("y", l.coords(y))
                        .value("f(x)", f[x])
                        .value("f(x∧y)", f[m])
                        .value("f(x∨y)", f[j])
                        .value("f(y)", f[y]),
                );
            }
        }
    }
    None
}

fn per_parameter(
    obj: &Objective,
    property: Property,
    check: impl Fn(&[f64]) -> Option<Witness>,
) -> PropertyReport {
    for t in 0..obj.params().len() {
        if let Some(w) = check(obj.row(t)) {
            return PropertyReport::fail(property, w.param(obj.params().label(t)));
        }
    }
    PropertyReport::pass(property)
}

/// `F(·, θ)` quasi-supermodular for every θ.
pub fn check_objective_quasi_supermodular(obj: &Objective, opts: &CheckOptions) -> PropertyReport {
    per_parameter(obj, Property::QuasiSupermodular, |f| {
        qsm_violation(obj.lattice(), f, opts)
    })
}

pub fn check_objective_supermodular(obj: &Objective, opts: &CheckOptions) -> PropertyReport {
    per_parameter(obj, Property::Supermodular, |f| {
        supermodular_violation(obj.lattice(), f, 1.0, opts)
    })
}

pub fn check_objective_submodular(obj: &Objective, opts: &CheckOptions) -> PropertyReport {
    per_parameter(obj, Property::Submodular, |f| {
        supermodular_violation(obj.lattice(), f, -1.0, opts)
    })
}

// ---------------------------------------------------------------------------
// Differences in (x, θ).

fn ordered_pairs(l: &GridLattice) -> Vec<(MemberId, MemberId)> {
    let mut out = Vec::new();
    for x in l.ids() {
        for y in l.ids() {
            if x != y && l.leq_id(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

fn difference_scan(
    obj: &Objective,
    property: Property,
    mut violates: impl FnMut(MemberId, MemberId, usize, usize) -> Option<Witness>,
) -> PropertyReport {
    let pairs = ordered_pairs(obj.lattice());
    let params = obj.params().pairs();
    for &(lo, hi) in &params {
        if lo == hi {
            continue;
        }
        for &(x, y) in &pairs {
            if let Some(w) = violates(x, y, lo, hi) {
                let l = obj.lattice();
                let w = w
                    .point("x", l.coords(x))
                    .point("y", l.coords(y))
                    .param(obj.params().label(lo))
                    .param(obj.params().label(hi));
                return PropertyReport::fail(property, w);
            }
        }
    }
    PropertyReport::pass(property)
}

/// For `x ≤ y` and `θ′ ≤ θ″`: `F(y,θ′) ≥ (>) F(x,θ′) ⟹ F(y,θ″) ≥ (>) F(x,θ″)`.
pub fn check_single_crossing(obj: &Objective, opts: &CheckOptions) -> PropertyReport {
    difference_scan(obj, Property::SingleCrossingDifferences, |x, y, a, b| {
        let (ya, xa, yb, xb) = (
            obj.value(y, a),
            obj.value(x, a),
            obj.value(y, b),
            obj.value(x, b),
        );
        let weak = opts.premise_ge(ya, xa) && !opts.le(xb, yb);
        let strict = opts.premise_gt(ya, xa) && !opts.lt(xb, yb);
        (weak || strict).then(|| {
            Witness::new()
                .value("F(y,θ')-F(x,θ')", ya - xa)
                .value("F(y,θ'')-F(x,θ'')", yb - xb)
        })
    })
}

/// For `x < y` and `θ′ < θ″`: `F(y,θ′) ≥ F(x,θ′) ⟹ F(y,θ″) > F(x,θ″)`.
pub fn check_strict_single_crossing(obj: &Objective, opts: &CheckOptions) -> PropertyReport {
    difference_scan(
        obj,
        Property::StrictSingleCrossingDifferences,
        |x, y, a, b| {
            let (ya, xa, yb, xb) = (
                obj.value(y, a),
                obj.value(x, a),
                obj.value(y, b),
                obj.value(x, b),
            );
            (opts.premise_ge(ya, xa) && !opts.lt(xb, yb)).then(|| {
                Witness::new()
                    .value("F(y,θ')-F(x,θ')", ya - xa)
                    .value("F(y,θ'')-F(x,θ'')", yb - xb)
            })
        },
    )
}

/// `F(y,θ) − F(x,θ)` nondecreasing in θ for `x ≤ y`.
pub fn check_increasing_differences(obj: &Objective, opts: &CheckOptions) -> PropertyReport {
    difference_scan(obj, Property::IncreasingDifferences, |x, y, a, b| {
        let da = obj.value(y, a) - obj.value(x, a);
        let db = obj.value(y, b) - obj.value(x, b);
        (!opts.le(da, db)).then(|| {
            Witness::new()
                .value("F(y,θ')-F(x,θ')", da)
                .value("F(y,θ'')-F(x,θ'')", db)
        })
    })
}

/// Increasing differences of `ln F`; fails with an error on nonpositive values.
pub fn check_log_increasing_differences(
    obj: &Objective,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    for t in 0..obj.params().len() {
        if let Some(i) = obj.row(t).iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidObjective(format!(
                "log increasing differences needs F > 0; F({}, {}) = {}",
                obj.lattice().point(i),
                obj.params().label(t),
                obj.value(i, t)
            )));
        }
    }
    Ok(difference_scan(
        obj,
        Property::LogIncreasingDifferences,
        |x, y, a, b| {
            let da = obj.value(y, a).ln() - obj.value(x, a).ln();
            let db = obj.value(y, b).ln() - obj.value(x, b).ln();
            (!opts.le(da, db)).then(|| {
                Witness::new()
                    .value("lnF(y,θ')-lnF(x,θ')", da)
                    .value("lnF(y,θ'')-lnF(x,θ'')", db)
            })
        },
    ))
}

// ---------------------------------------------------------------------------
// Costs.

fn diff_witness(names: &[(&str, &DiffVector, f64)]) -> Witness {
    let mut w = Witness::new();
    for (n, d, _) in names {
        w = w.point(n, d.entries());
    }
    for (n, _, v) in names {
        w = w.value(&format!("C({n})"), *v);
    }
    w
}

/// `C(ε′) ≤ C(ε)` whenever `ε′ ∈ ΔL` lies between `0` and `ε`.
pub fn check_monotone(cost: &CostTable, opts: &CheckOptions) -> PropertyReport {
    between_scan(cost, Property::Monotone, |c_inner, c_outer, _| {
        !opts.le(c_inner, c_outer)
    })
}

/// `C(ε′) < C(ε)` whenever `ε′ ≠ ε` lies between `0` and `ε`.
pub fn check_strictly_monotone(cost: &CostTable, opts: &CheckOptions) -> PropertyReport {
    between_scan(
        cost,
        Property::StrictlyMonotone,
        |c_inner, c_outer, same| !same && !opts.lt(c_inner, c_outer),
    )
}

fn between_scan(
    cost: &CostTable,
    property: Property,
    violates: impl Fn(f64, f64, bool) -> bool,
) -> PropertyReport {
    let diffs = cost.lattice().diff_set();
    for outer in 0..diffs.len() {
        let e = diffs.get(outer);
        for inner in 0..diffs.len() {
            let d = diffs.get(inner);
            if !d.is_between_zero_and(e) {
                continue;
            }
            let (ci, co) = (cost.by_id(inner), cost.by_id(outer));
            if violates(ci, co, inner == outer) {
                return PropertyReport::fail(
                    property,
                    diff_witness(&[("ε'", d, ci), ("ε", e, co)]),
                );
            }
        }
    }
    PropertyReport::pass(property)
}

/// `C(ε∧0) ≤ C(ε) ≥ C(ε∨0)`.
pub fn check_minimally_monotone(cost: &CostTable, opts: &CheckOptions) -> PropertyReport {
    minimal_scan(cost, Property::MinimallyMonotone, |c_cut, c, _vacuous| {
        !opts.le(c_cut, c)
    })
}

/// `C(ε∧0) < C(ε)` unless `ε ≤ 0`, and `C(ε∨0) < C(ε)` unless `ε ≥ 0`.
pub fn check_strictly_minimally_monotone(cost: &CostTable, opts: &CheckOptions) -> PropertyReport {
    minimal_scan(
        cost,
        Property::StrictlyMinimallyMonotone,
        |c_cut, c, vacuous| !vacuous && !opts.lt(c_cut, c),
    )
}

fn minimal_scan(
    cost: &CostTable,
    property: Property,
    violates: impl Fn(f64, f64, bool) -> bool,
) -> PropertyReport {
    let diffs = cost.lattice().diff_set();
    for id in 0..diffs.len() {
        let e = diffs.get(id);
        for cut in [e.meet_zero(), e.join_zero()] {
            let cid = diffs
                .id_of(&cut)
                .expect("ε∧0 and ε∨0 are differences of lattice members");
            let (cc, c) = (cost.by_id(cid), cost.by_id(id));
            if violates(cc, c, cut == *e) {
                return PropertyReport::fail(
                    property,
                    diff_witness(&[("ε'", &cut, cc), ("ε", e, c)]),
                );
            }
        }
    }
    PropertyReport::pass(property)
}

/// One-dimensional only: a dip exists and zero attains the minimum.
///
/// Uses a direct search for the dip rather than the "between" test, so it
/// serves as an independent route to monotonicity for `n = 1`.
pub fn check_single_dipped_at_zero(
    cost: &CostTable,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let l = cost.lattice();
    if l.dims() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: l.dims(),
        });
    }
    let diffs = l.diff_set();
    let mut pts: Vec<(f64, f64)> = (0..diffs.len())
        .map(|i| (diffs.get(i).entries()[0], cost.by_id(i)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zero = pts
        .iter()
        .position(|p| p.0 == 0.0)
        .expect("zero difference");
    let c0 = pts[zero].1;
    if let Some(p) = pts.iter().find(|p| !opts.le(c0, p.1)) {
        let w = Witness::new()
            .point("ε", &[p.0])
            .value("C(0)", c0)
            .value("C(ε)", p.1);
        return Ok(PropertyReport::fail(Property::SingleDippedAtZero, w)
            .with_note("not minimized at zero"));
    }
    let k = pts.len();
    // dec[i]: nonincreasing on 0..=i; inc[i]: nondecreasing on i..k.
    let mut dec = vec![true; k];
    for i in 1..k {
        dec[i] = dec[i - 1] && opts.le(pts[i].1, pts[i - 1].1);
    }
    let mut inc = vec![true; k];
    for i in (0..k - 1).rev() {
        inc[i] = inc[i + 1] && opts.le(pts[i].1, pts[i + 1].1);
    }
    if (0..k).any(|i| dec[i] && inc[i]) {
        return Ok(PropertyReport::pass(Property::SingleDippedAtZero));
    }
    // Report the first rise followed by a later fall.
    let rise = (1..k)
        .find(|&i| !opts.le(pts[i].1, pts[i - 1].1))
        .unwrap_or(1);
    let fall = (rise..k)
        .find(|&i| !opts.le(pts[i - 1].1, pts[i].1))
        .unwrap_or(k - 1);
    let w = Witness::new()
        .point("a", &[pts[rise - 1].0])
        .point("b", &[pts[rise].0])
        .point("c", &[pts[fall].0])
        .value("C(a)", pts[rise - 1].1)
        .value("C(b)", pts[rise].1)
        .value("C(c)", pts[fall].1);
    Ok(PropertyReport::fail(Property::SingleDippedAtZero, w).with_note("no single dip"))
}

fn unit_component(e: &[f64], i: usize) -> Vec<f64> {
    let mut v = vec![0.0; e.len()];
    v[i] = e[i];
    v
}

fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol + 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// `C(ε) + (n−1)·C(0) = Σ_i C(ε_i e_i)` over `ΔL`. Sums are compared with
/// a relative tolerance of `1e−12` on top of the user tolerance, since the
/// two sides accumulate in different orders.
pub fn check_additively_separable(
    cost: &CostFunction,
    lattice: &GridLattice,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let n = lattice.dims();
    let zero = vec![0.0; n];
    let c0 = cost.eval(&zero)?;
    for d in lattice.diff_set().iter() {
        let e = d.entries();
        let lhs = cost.eval(e)? + (n as f64 - 1.0) * c0;
        let mut rhs = 0.0;
        for i in 0..n {
            rhs += cost.eval(&unit_component(e, i))?;
        }
        if !approx_eq(lhs, rhs, opts.tolerance) {
            let w = Witness::new()
                .point("ε", e)
                .value("C(ε)+(n-1)C(0)", lhs)
                .value("ΣC(ε_i e_i)", rhs);
            return Ok(PropertyReport::fail(Property::AdditivelySeparable, w));
        }
    }
    Ok(PropertyReport::pass(Property::AdditivelySeparable))
}

/// Per-dimension discrete convexity of `d ↦ C(d e_i)` on the grid of
/// coordinate differences: finite values form a contiguous run and slopes
/// are nondecreasing along it.
pub fn check_separable_convex(
    cost: &CostFunction,
    lattice: &GridLattice,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let n = lattice.dims();
    let diffs = lattice.diff_set();
    for i in 0..n {
        let mut grid: Vec<f64> = diffs.iter().map(|d| d.entries()[i]).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let mut vals = Vec::with_capacity(grid.len());
        for &g in &grid {
            let mut e = vec![0.0; n];
            e[i] = g;
            vals.push(cost.eval(&e)?);
        }
        let finite: Vec<usize> = (0..grid.len()).filter(|&k| vals[k].is_finite()).collect();
        if let (Some(&a), Some(&b)) = (finite.first(), finite.last()) {
            if let Some(k) = (a..=b).find(|&k| !vals[k].is_finite()) {
                let w = Witness::new()
                    .point("ε", &axis_vec(n, i, grid[k]))
                    .value("C(ε)", vals[k]);
                return Ok(PropertyReport::fail(Property::SeparableConvex, w)
                    .with_note(format!("finite domain has a gap in dimension {i}")));
            }
            for k in a + 1..b {
                // (v[k]-v[k-1])/(g[k]-g[k-1]) ≤ (v[k+1]-v[k])/(g[k+1]-g[k]), cross-multiplied.
                let left = (vals[k] - vals[k - 1]) * (grid[k + 1] - grid[k]);
                let right = (vals[k + 1] - vals[k]) * (grid[k] - grid[k - 1]);
                if !opts.le(left, right) {
                    let w = Witness::new()
                        .point("a", &axis_vec(n, i, grid[k - 1]))
                        .point("b", &axis_vec(n, i, grid[k]))
                        .point("c", &axis_vec(n, i, grid[k + 1]))
                        .value("C(a)", vals[k - 1])
                        .value("C(b)", vals[k])
                        .value("C(c)", vals[k + 1]);
                    return Ok(PropertyReport::fail(Property::SeparableConvex, w));
                }
            }
        }
    }
    Ok(PropertyReport::pass(Property::SeparableConvex))
}

fn axis_vec(n: usize, i: usize, v: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = v;
    e
}

/// For member points `x, y, z`:
/// `C(z∨x − z∨y) ≤ C(x−y) ≥ C(z∧x − z∧y)`, and the specializations
/// `z ≤ y ⟹ C(z∨x − y) ≤ C(x−y)` and `z ≥ y ⟹ C(z∧x − y) ≤ C(x−y)`.
pub fn check_monotone_triples(cost: &CostTable, opts: &CheckOptions) -> PropertyReport {
    let l = cost.lattice();
    for x in l.ids() {
        for y in l.ids() {
            let base = cost.between(x, y);
            for z in l.ids() {
                let mut cands = vec![
                    ("C(z∨x-z∨y)", cost.between(l.join_id(z, x), l.join_id(z, y))),
                    ("C(z∧x-z∧y)", cost.between(l.meet_id(z, x), l.meet_id(z, y))),
                ];
                if l.leq_id(z, y) {
                    cands.push(("C(z∨x-y)", cost.between(l.join_id(z, x), y)));
                }
                if l.leq_id(y, z) {
                    cands.push(("C(z∧x-y)", cost.between(l.meet_id(z, x), y)));
                }
                if let Some((name, v)) = cands.into_iter().find(|(_, v)| !opts.le(*v, base)) {
                    let w = Witness::new()
                        .point("x", l.coords(x))
                        .point("y", l.coords(y))
                        .point("z", l.coords(z))
                        .value(name, v)
                        .value("C(x-y)", base);
                    return PropertyReport::fail(Property::MonotoneTriples, w);
                }
            }
        }
    }
    PropertyReport::pass(Property::MonotoneTriples)
}

/// One-dimensional: `C(y∨z − x∨y) + C(y∧z − x∧y) ≤ C(y−x) + C(z−y)` for
/// every member triple.
pub fn check_join_path_inequality(cost: &CostTable, opts: &CheckOptions) -> Result<PropertyReport> {
    let l = cost.lattice();
    if l.dims() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: l.dims(),
        });
    }
    for x in l.ids() {
        for y in l.ids() {
            for z in l.ids() {
                let lhs = cost.between(l.join_id(y, z), l.join_id(x, y))
                    + cost.between(l.meet_id(y, z), l.meet_id(x, y));
                let rhs = cost.between(y, x) + cost.between(z, y);
                if !opts.le(lhs, rhs) {
                    let w = Witness::new()
                        .point("x", l.coords(x))
                        .point("y", l.coords(y))
                        .point("z", l.coords(z))
                        .value("lhs", lhs)
                        .value("rhs", rhs);
                    return Ok(PropertyReport::fail(Property::JoinPathInequality, w));
                }
            }
        }
    }
    Ok(PropertyReport::pass(Property::JoinPathInequality))
}

/// `θ̲ ≤ θ̄` in the parameter poset (strictly when `strict`).
pub fn check_parameter_order(
    obj: &Objective,
    lo: usize,
    hi: usize,
    strict: bool,
) -> PropertyReport {
    let p = obj.params();
    let ok = if strict { p.lt(lo, hi) } else { p.leq(lo, hi) };
    if ok {
        PropertyReport::pass(Property::ParameterOrder)
    } else {
        PropertyReport::fail(
            Property::ParameterOrder,
            Witness::new().param(p.label(lo)).param(p.label(hi)),
        )
        .with_note(if strict {
            "need θ_lo < θ_hi"
        } else {
            "need θ_lo ≤ θ_hi"
        })
    }
}

/// Cost property profile used by the generators and the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct CostProfile {
    pub minimally_monotone: bool,
    pub monotone: bool,
    pub strictly_monotone: bool,
    pub strictly_minimally_monotone: bool,
    pub additively_separable: bool,
    pub separable_convex: bool,
}

pub fn cost_profile(
    cost: &CostFunction,
    lattice: &GridLattice,
    opts: &CheckOptions,
) -> Result<CostProfile> {
    let table = cost.bind(lattice)?;
    let separable = check_additively_separable(cost, lattice, opts)?.holds;
    Ok(CostProfile {
        minimally_monotone: check_minimally_monotone(&table, opts).holds,
        monotone: check_monotone(&table, opts).holds,
        strictly_monotone: check_strictly_monotone(&table, opts).holds,
        strictly_minimally_monotone: check_strictly_minimally_monotone(&table, opts).holds,
        additively_separable: separable,
        separable_convex: separable && check_separable_convex(cost, lattice, opts)?.holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostSpec, ScalarCost};
    use crate::lattice::ParamPoset;

    fn grid(n: usize, k: usize) -> GridLattice {
        GridLattice::product(vec![(0..k).map(|v| v as f64).collect(); n]).unwrap()
    }

    fn table(l: &GridLattice, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        l.ids().map(|i| f(l.coords(i))).collect()
    }

    #[test]
    fn product_is_supermodular() {
        let l = grid(2, 3);
        let f = table(&l, |c| c[0] * c[1]);
        assert!(check_supermodular(&l, &f, &CheckOptions::exact()).holds);
        assert!(check_quasi_supermodular(&l, &f, &CheckOptions::exact()).holds);
    }

    #[test]
    fn one_dimensional_always_supermodular() {
        let l = grid(1, 5);
        let f = vec![3.0, -1.0, 7.0, 0.5, 2.0];
        assert!(check_supermodular(&l, &f, &CheckOptions::exact()).holds);
    }

    #[test]
    fn negated_product_fails_with_antichain_witness() {
        let l = grid(2, 2);
        let f = table(&l, |c| -c[0] * c[1]);
        let r = check_supermodular(&l, &f, &CheckOptions::exact());
        assert!(!r.holds);
        let w = r.witness.unwrap();
        // Enumeration order reaches (0,1) before (1,0).
        assert_eq!(w.get_point("x").unwrap(), &[0.0, 1.0]);
        assert_eq!(w.get_point("y").unwrap(), &[1.0, 0.0]);
        assert!(check_submodular(&l, &f, &CheckOptions::exact()).holds);
    }

    #[test]
    fn linear_in_theta_has_increasing_differences() {
        let l = grid(2, 3);
        let p = ParamPoset::chain(3).unwrap();
        let obj = Objective::tabulate(l, p, |x, t| {
            let c = x.coords();
            (c[0] - 1.0).powi(2) * -2.0 + 3.0 * c[0] * c[1] - c[1].powi(3)
                + t as f64 * (c[0] + c[1])
        })
        .unwrap();
        assert!(check_increasing_differences(&obj, &CheckOptions::exact()).holds);
        assert!(check_single_crossing(&obj, &CheckOptions::exact()).holds);
    }

    #[test]
    fn constant_in_theta_is_weak_not_strict() {
        let l = grid(1, 3);
        let p = ParamPoset::chain(2).unwrap();
        let obj = Objective::tabulate(l, p, |x, _| -(x.coords()[0] - 1.0).powi(2)).unwrap();
        assert!(check_single_crossing(&obj, &CheckOptions::exact()).holds);
        assert!(!check_strict_single_crossing(&obj, &CheckOptions::exact()).holds);
    }

    fn cost(spec: CostSpec, l: &GridLattice) -> CostTable {
        CostFunction::new(spec).unwrap().bind(l).unwrap()
    }

    #[test]
    fn fixed_cost_is_monotone() {
        let l = grid(1, 4);
        let c = cost(CostSpec::Fixed { k: 2.5 }, &l);
        assert!(check_monotone(&c, &CheckOptions::exact()).holds);
        assert!(!check_strictly_monotone(&c, &CheckOptions::exact()).holds);
        assert!(check_strictly_minimally_monotone(&c, &CheckOptions::exact()).holds);
    }

    #[test]
    fn lumpy_is_minimal_not_monotone() {
        let l = grid(1, 6);
        let c = cost(
            CostSpec::Lumpy {
                min_size: 3.0,
                weight: 1.0,
            },
            &l,
        );
        assert!(check_minimally_monotone(&c, &CheckOptions::exact()).holds);
        let r = check_monotone(&c, &CheckOptions::exact());
        assert!(!r.holds);
        let inner = r.witness.unwrap().get_point("ε'").unwrap()[0];
        assert!(inner > 0.0 && inner < 3.0);
    }

    #[test]
    fn cobb_douglas_is_monotone() {
        let l = grid(2, 4);
        let c = cost(
            CostSpec::CobbDouglas {
                exponents: vec![0.5, 1.5],
                scale: 1.0,
            },
            &l,
        );
        assert!(check_monotone(&c, &CheckOptions::exact()).holds);
    }

    #[test]
    fn quadratic_triples_hold_and_nonmonotone_fails() {
        let l = GridLattice::product(vec![vec![0.0, 1.0, 2.0]; 2]).unwrap();
        let q = cost(CostSpec::Quadratic { weights: vec![1.0] }, &l);
        assert!(check_monotone_triples(&q, &CheckOptions::exact()).holds);
        // Cheaper to move by 2 than by 1 in the first coordinate.
        let bad = CostFunction::new(CostSpec::Separable {
            components: vec![
                ScalarCost::Table {
                    values: vec![
                        (-2.0, 1.0.into()),
                        (-1.0, 1.0.into()),
                        (0.0, 0.0.into()),
                        (1.0, 5.0.into()),
                        (2.0, 1.0.into()),
                    ],
                },
                ScalarCost::Zero,
            ],
        })
        .unwrap()
        .bind(&l)
        .unwrap();
        assert!(!check_monotone(&bad, &CheckOptions::exact()).holds);
        assert!(!check_monotone_triples(&bad, &CheckOptions::exact()).holds);
    }

    #[test]
    fn separability_and_convexity() {
        let l = grid(2, 3);
        let q = CostFunction::new(CostSpec::Quadratic {
            weights: vec![1.0, 2.0],
        })
        .unwrap();
        assert!(
            check_additively_separable(&q, &l, &CheckOptions::exact())
                .unwrap()
                .holds
        );
        assert!(
            check_separable_convex(&q, &l, &CheckOptions::exact())
                .unwrap()
                .holds
        );
        let e = CostFunction::new(CostSpec::Euclidean { scale: 1.0 }).unwrap();
        assert!(
            !check_additively_separable(&e, &l, &CheckOptions::exact())
                .unwrap()
                .holds
        );
        let fixed = CostFunction::new(CostSpec::Separable {
            components: vec![ScalarCost::Fixed { k: 1.0 }, ScalarCost::Zero],
        })
        .unwrap();
        assert!(
            !check_separable_convex(&fixed, &l, &CheckOptions::exact())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn single_dip_detection() {
        let l = grid(1, 3);
        let dip = cost(CostSpec::Quadratic { weights: vec![1.0] }, &l);
        assert!(
            check_single_dipped_at_zero(&dip, &CheckOptions::exact())
                .unwrap()
                .holds
        );
        let two_dips = CostFunction::from_fn(&l, |d| match d.entries()[0] as i32 {
            0 => 0.0,
            1 => 2.0,
            2 => 1.0,
            _ => 0.5,
        })
        .unwrap()
        .bind(&l)
        .unwrap();
        assert!(
            !check_single_dipped_at_zero(&two_dips, &CheckOptions::exact())
                .unwrap()
                .holds
        );
    }
}
