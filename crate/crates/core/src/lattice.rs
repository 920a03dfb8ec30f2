//! Finite sublattices of a product grid in ℝⁿ.
//!
//! A [`GridLattice`] is a set of points drawn from the product of `n`
//! strictly increasing coordinate axes, closed under coordinatewise min
//! (meet) and max (join). Members are stored as axis-index vectors in
//! lexicographic order, so "lexicographically first" and "lowest member id"
//! coincide everywhere in the crate.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a lattice member in lexicographic enumeration order.
pub type MemberId = usize;

/// Upper bound on the member count; meet/join tables are `m²`.
pub const MAX_MEMBERS: usize = 2048;
const MAX_GRID: usize = 1 << 22;
const NONE: u32 = u32::MAX;

/// Canonical bit pattern of a coordinate (`-0.0` folds into `0.0`).
pub(crate) fn key_bits(v: f64) -> u64 {
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

pub(crate) fn key_of(values: &[f64]) -> Vec<u64> {
    values.iter().map(|&v| key_bits(v)).collect()
}

/// A point of ℝⁿ under the product order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    fn check_dims(&self, other: &Point) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: other.dims(),
            });
        }
        Ok(())
    }

    /// Coordinatewise minimum.
    pub fn meet(&self, other: &Point) -> Result<Point> {
        self.check_dims(other)?;
        Ok(Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.min(*b))
                .collect(),
        ))
    }

    /// Coordinatewise maximum.
    pub fn join(&self, other: &Point) -> Result<Point> {
        self.check_dims(other)?;
        Ok(Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.max(*b))
                .collect(),
        ))
    }

    /// Product order `self ≤ other`.
    pub fn leq(&self, other: &Point) -> bool {
        self.dims() == other.dims() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn geq(&self, other: &Point) -> bool {
        other.leq(self)
    }

    pub fn sub(&self, other: &Point) -> Result<DiffVector> {
        self.check_dims(other)?;
        Ok(DiffVector::new(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, values: &[f64]) -> fmt::Result {
    write!(f, "(")?;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, ")")
}

/// An adjustment vector `ε = x − y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiffVector(Vec<f64>);

impl DiffVector {
    pub fn new(entries: Vec<f64>) -> Self {
        DiffVector(entries)
    }

    pub fn zero(dims: usize) -> Self {
        DiffVector(vec![0.0; dims])
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0.0)
    }

    /// `ε ∧ 0`: cancel every upward adjustment.
    pub fn meet_zero(&self) -> DiffVector {
        DiffVector(self.0.iter().map(|&e| e.min(0.0)).collect())
    }

    /// `ε ∨ 0`: cancel every downward adjustment.
    pub fn join_zero(&self) -> DiffVector {
        DiffVector(self.0.iter().map(|&e| e.max(0.0)).collect())
    }

    /// True when `self` lies between `0` and `outer` in every dimension.
    pub fn is_between_zero_and(&self, outer: &DiffVector) -> bool {
        self.dims() == outer.dims()
            && self
                .0
                .iter()
                .zip(&outer.0)
                .all(|(&e, &o)| (0.0 <= e && e <= o) || (0.0 >= e && e >= o))
    }

    pub fn leq(&self, other: &DiffVector) -> bool {
        self.dims() == other.dims() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for DiffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// The exact difference set `ΔL = {x − y : x, y ∈ L}` of a lattice,
/// together with the id of `x − y` for every member pair.
#[derive(Debug)]
pub struct DiffSet {
    diffs: Vec<DiffVector>,
    index: HashMap<Vec<u64>, usize>,
    pair: Vec<u32>,
    members: usize,
}

impl DiffSet {
    fn build(lattice: &GridLattice) -> Self {
        let m = lattice.len();
        let mut diffs = Vec::new();
        let mut index = HashMap::new();
        let mut pair = vec![0u32; m * m];
        for x in 0..m {
            for y in 0..m {
                let d: Vec<f64> = lattice
                    .coords(x)
                    .iter()
                    .zip(lattice.coords(y))
                    .map(|(a, b)| a - b)
                    .collect();
                let key = key_of(&d);
                let id = *index.entry(key).or_insert_with(|| {
                    diffs.push(DiffVector(d));
                    diffs.len() - 1
                });
                pair[x * m + y] = id as u32;
            }
        }
        DiffSet {
            diffs,
            index,
            pair,
            members: m,
        }
    }

    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    pub fn get(&self, id: usize) -> &DiffVector {
        &self.diffs[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = &DiffVector> {
        self.diffs.iter()
    }

    pub fn id_of(&self, d: &DiffVector) -> Option<usize> {
        self.index.get(&key_of(d.entries())).copied()
    }

    /// Id of `x − y` for members `x`, `y`.
    pub fn pair_id(&self, x: MemberId, y: MemberId) -> usize {
        self.pair[x * self.members + y] as usize
    }
}

#[derive(Debug)]
struct Inner {
    axes: Vec<Vec<f64>>,
    strides: Vec<usize>,
    members: Vec<Vec<usize>>,
    coords: Vec<Vec<f64>>,
    slot: Vec<u32>,
    meet: Vec<u32>,
    join: Vec<u32>,
    diffs: OnceLock<DiffSet>,
}

/// A finite sublattice of an `n`-dimensional product grid.
///
/// Cloning is cheap; the contents are shared and immutable.
#[derive(Debug, Clone)]
pub struct GridLattice {
    inner: Arc<Inner>,
}

impl PartialEq for GridLattice {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.axes == other.inner.axes && self.inner.members == other.inner.members)
    }
}

impl GridLattice {
    /// The full product grid over `axes`.
    pub fn product(axes: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(axes, |_| true)
    }

    /// The subset of the product grid selected by `keep`. Fails unless the
    /// selection is nonempty and closed under meet and join.
    pub fn with_mask(axes: Vec<Vec<f64>>, keep: impl Fn(&[f64]) -> bool) -> Result<Self> {
        Self::build(axes, keep)
    }

    /// An explicit member list. Every point must lie on the axes.
    pub fn from_members(axes: Vec<Vec<f64>>, members: &[Point]) -> Result<Self> {
        let keys: HashSet<Vec<u64>> = members.iter().map(|p| key_of(p.coords())).collect();
        for p in members {
            if p.dims() != axes.len() {
                return Err(Error::DimensionMismatch {
                    expected: axes.len(),
                    got: p.dims(),
                });
            }
            for (v, axis) in p.coords().iter().zip(&axes) {
                if !axis.iter().any(|a| key_bits(*a) == key_bits(*v)) {
                    return Err(Error::InvalidLattice(format!(
                        "member {p} has coordinate {v} that is not on its axis"
                    )));
                }
            }
        }
        Self::build(axes, |c| keys.contains(&key_of(c)))
    }

    fn build(axes: Vec<Vec<f64>>, keep: impl Fn(&[f64]) -> bool) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidLattice(
                "at least one dimension is required".into(),
            ));
        }
        for (i, axis) in axes.iter().enumerate() {
            if axis.is_empty() {
                return Err(Error::InvalidLattice(format!("axis {i} is empty")));
            }
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidLattice(format!(
                    "axis {i} has a non-finite value"
                )));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidLattice(format!(
                    "axis {i} is not strictly increasing"
                )));
            }
        }
        let n = axes.len();
        let mut strides = vec![1usize; n];
        let mut grid = 1usize;
        for i in (0..n).rev() {
            strides[i] = grid;
            grid = grid
                .checked_mul(axes[i].len())
                .filter(|&g| g <= MAX_GRID)
                .ok_or_else(|| Error::InvalidLattice("product grid too large".into()))?;
        }

        let mut slot = vec![NONE; grid];
        let mut members = Vec::new();
        let mut coords = Vec::new();
        let mut idx = vec![0usize; n];
        for (pos, s) in slot.iter_mut().enumerate() {
            let mut rem = pos;
            for (k, st) in idx.iter_mut().zip(&strides) {
                *k = rem / st;
                rem %= st;
            }
            let c: Vec<f64> = idx.iter().zip(&axes).map(|(&k, a)| a[k]).collect();
            if keep(&c) {
                if members.len() == MAX_MEMBERS {
                    return Err(Error::InvalidLattice(format!(
                        "more than {MAX_MEMBERS} members"
                    )));
                }
                *s = members.len() as u32;
                members.push(idx.clone());
                coords.push(c);
            }
        }
        if members.is_empty() {
            return Err(Error::InvalidLattice("lattice has no members".into()));
        }

        // Closure scan: every pair's meet and join must be a member.
        let m = members.len();
        let mut meet = vec![NONE; m * m];
        let mut join = vec![NONE; m * m];
        let position = |v: &[usize]| v.iter().zip(&strides).map(|(a, s)| a * s).sum::<usize>();
        let mut lo = vec![0usize; n];
        let mut hi = vec![0usize; n];
        for a in 0..m {
            for b in a..m {
                for i in 0..n {
                    lo[i] = members[a][i].min(members[b][i]);
                    hi[i] = members[a][i].max(members[b][i]);
                }
                let (ml, mh) = (slot[position(&lo)], slot[position(&hi)]);
                if ml == NONE || mh == NONE {
                    let (p, q) = (Point(coords[a].clone()), Point(coords[b].clone()));
                    let which = if ml == NONE { "meet" } else { "join" };
                    return Err(Error::InvalidLattice(format!(
                        "not closed under {which}: members {p} and {q}"
                    )));
                }
                meet[a * m + b] = ml;
                meet[b * m + a] = ml;
                join[a * m + b] = mh;
                join[b * m + a] = mh;
            }
        }

        Ok(GridLattice {
            inner: Arc::new(Inner {
                axes,
                strides,
                members,
                coords,
                slot,
                meet,
                join,
                diffs: OnceLock::new(),
            }),
        })
    }

    pub fn dims(&self) -> usize {
        self.inner.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.inner.axes
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.inner.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when every grid point is a member.
    pub fn is_full_grid(&self) -> bool {
        self.inner.slot.len() == self.len()
    }

    pub fn ids(&self) -> std::ops::Range<MemberId> {
        0..self.len()
    }

    pub fn coords(&self, id: MemberId) -> &[f64] {
        &self.inner.coords[id]
    }

    /// Axis-index vector of a member.
    pub fn axis_index(&self, id: MemberId) -> &[usize] {
        &self.inner.members[id]
    }

    pub fn point(&self, id: MemberId) -> Point {
        Point(self.inner.coords[id].clone())
    }

    pub fn points(&self) -> Vec<Point> {
        self.ids().map(|i| self.point(i)).collect()
    }

    pub fn id_of_index(&self, idx: &[usize]) -> Option<MemberId> {
        if idx.len() != self.dims() || idx.iter().zip(&self.inner.axes).any(|(k, a)| *k >= a.len())
        {
            return None;
        }
        let pos: usize = idx
            .iter()
            .zip(&self.inner.strides)
            .map(|(a, s)| a * s)
            .sum();
        match self.inner.slot[pos] {
            NONE => None,
            id => Some(id as usize),
        }
    }

    /// Member id of a point, if the point is a member.
    pub fn id_of(&self, p: &Point) -> Option<MemberId> {
        if p.dims() != self.dims() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dims());
        for (v, axis) in p.coords().iter().zip(&self.inner.axes) {
            let k = axis.iter().position(|a| key_bits(*a) == key_bits(*v))?;
            idx.push(k);
        }
        self.id_of_index(&idx)
    }

    pub fn require(&self, p: &Point) -> Result<MemberId> {
        if p.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: p.dims(),
            });
        }
        self.id_of(p).ok_or_else(|| Error::NotMember(p.to_string()))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.id_of(p).is_some()
    }

    pub fn meet_id(&self, a: MemberId, b: MemberId) -> MemberId {
        self.inner.meet[a * self.len() + b] as usize
    }

    pub fn join_id(&self, a: MemberId, b: MemberId) -> MemberId {
        self.inner.join[a * self.len() + b] as usize
    }

    /// Product order on members.
    pub fn leq_id(&self, a: MemberId, b: MemberId) -> bool {
        self.inner.members[a]
            .iter()
            .zip(&self.inner.members[b])
            .all(|(x, y)| x <= y)
    }

    /// Meet of two member points.
    pub fn meet(&self, x: &Point, y: &Point) -> Result<Point> {
        let (a, b) = (self.require(x)?, self.require(y)?);
        Ok(self.point(self.meet_id(a, b)))
    }

    /// Join of two member points.
    pub fn join(&self, x: &Point, y: &Point) -> Result<Point> {
        let (a, b) = (self.require(x)?, self.require(y)?);
        Ok(self.point(self.join_id(a, b)))
    }

    /// Least and greatest members.
    pub fn bottom(&self) -> MemberId {
        (1..self.len()).fold(0, |acc, i| self.meet_id(acc, i))
    }

    pub fn top(&self) -> MemberId {
        (1..self.len()).fold(0, |acc, i| self.join_id(acc, i))
    }

    /// The difference set `ΔL`, built on first use.
    pub fn diff_set(&self) -> &DiffSet {
        self.inner.diffs.get_or_init(|| DiffSet::build(self))
    }

    /// Difference `x − y` of two members.
    pub fn diff(&self, x: MemberId, y: MemberId) -> DiffVector {
        DiffVector(
            self.coords(x)
                .iter()
                .zip(self.coords(y))
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `{x ∈ L : lo ≤ x ≤ hi}` as a lattice over the same axes.
    pub fn sub_box(&self, lo: &Point, hi: &Point) -> Result<GridLattice> {
        for p in [lo, hi] {
            if p.dims() != self.dims() {
                return Err(Error::DimensionMismatch {
                    expected: self.dims(),
                    got: p.dims(),
                });
            }
        }
        if !lo.leq(hi) {
            return Err(Error::InvalidLattice(format!("box bounds {lo} ≰ {hi}")));
        }
        let keep: HashSet<Vec<u64>> = self
            .ids()
            .filter(|&i| {
                let p = Point(self.coords(i).to_vec());
                lo.leq(&p) && p.leq(hi)
            })
            .map(|i| key_of(self.coords(i)))
            .collect();
        if keep.is_empty() {
            return Err(Error::InvalidLattice(format!("box [{lo}, {hi}] is empty")));
        }
        Self::build(self.inner.axes.clone(), |c| keep.contains(&key_of(c)))
    }

    /// Sub-sublattice selected by a predicate; closure is re-verified.
    pub fn restrict(&self, keep: impl Fn(&Point) -> bool) -> Result<GridLattice> {
        let kept: HashSet<Vec<u64>> = self
            .ids()
            .filter(|&i| keep(&self.point(i)))
            .map(|i| key_of(self.coords(i)))
            .collect();
        Self::build(self.inner.axes.clone(), |c| kept.contains(&key_of(c)))
    }

    /// Ids in `ambient` of every member of `self`.
    pub fn embed_into(&self, ambient: &GridLattice) -> Result<Vec<MemberId>> {
        self.ids()
            .map(|i| {
                let p = self.point(i);
                ambient
                    .id_of(&p)
                    .ok_or_else(|| Error::NotMember(p.to_string()))
            })
            .collect()
    }

    /// Member ids selected from a point list (order preserved).
    pub fn ids_of(&self, points: &[Point]) -> Result<Vec<MemberId>> {
        points.iter().map(|p| self.require(p)).collect()
    }

    /// Checks that a member-id subset is itself closed under meet and join.
    pub fn is_sublattice(&self, ids: &[MemberId]) -> bool {
        let set: HashSet<MemberId> = ids.iter().copied().collect();
        ids.iter().all(|&a| {
            ids.iter()
                .all(|&b| set.contains(&self.meet_id(a, b)) && set.contains(&self.join_id(a, b)))
        })
    }

    /// Largest element of a member subset, if the subset has one.
    pub fn largest_of(&self, ids: &[MemberId]) -> Option<MemberId> {
        let first = *ids.first()?;
        let j = ids.iter().fold(first, |acc, &i| self.join_id(acc, i));
        ids.contains(&j).then_some(j)
    }

    pub fn smallest_of(&self, ids: &[MemberId]) -> Option<MemberId> {
        let first = *ids.first()?;
        let j = ids.iter().fold(first, |acc, &i| self.meet_id(acc, i));
        ids.contains(&j).then_some(j)
    }
}

/// Strong set order `X ≥ₛₛ Y`: for all `x ∈ X`, `y ∈ Y`, `x ∨ y ∈ X` and
/// `x ∧ y ∈ Y`. Empty sets compare vacuously true.
pub fn strong_set_geq(x: &[Point], y: &[Point]) -> bool {
    let xs: HashSet<Vec<u64>> = x.iter().map(|p| key_of(p.coords())).collect();
    let ys: HashSet<Vec<u64>> = y.iter().map(|p| key_of(p.coords())).collect();
    x.iter().all(|a| {
        y.iter().all(|b| match (a.join(b), a.meet(b)) {
            (Ok(j), Ok(m)) => xs.contains(&key_of(j.coords())) && ys.contains(&key_of(m.coords())),
            _ => false,
        })
    })
}

/// Id-based strong set order within one lattice.
pub fn strong_set_geq_ids(lattice: &GridLattice, x: &[MemberId], y: &[MemberId]) -> bool {
    let xs: HashSet<MemberId> = x.iter().copied().collect();
    let ys: HashSet<MemberId> = y.iter().copied().collect();
    x.iter().all(|&a| {
        y.iter()
            .all(|&b| xs.contains(&lattice.join_id(a, b)) && ys.contains(&lattice.meet_id(a, b)))
    })
}

/// A finite partially ordered parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoset {
    labels: Vec<String>,
    leq: Vec<bool>,
}

impl ParamPoset {
    /// Builds a poset from an explicit relation, which must already be
    /// reflexive, antisymmetric and transitive.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::InvalidPoset("no parameter values".into()));
        }
        let mut leq = vec![false; k * k];
        for &(a, b) in pairs {
            if a >= k || b >= k {
                return Err(Error::InvalidPoset(format!("pair ({a}, {b}) out of range")));
            }
            leq[a * k + b] = true;
        }
        let poset = ParamPoset { labels, leq };
        poset.validate()?;
        Ok(poset)
    }

    /// Reflexive-transitive closure of generating pairs; fails if the
    /// closure is not antisymmetric.
    pub fn from_generators(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::InvalidPoset("no parameter values".into()));
        }
        let mut leq = vec![false; k * k];
        for i in 0..k {
            leq[i * k + i] = true;
        }
        for &(a, b) in pairs {
            if a >= k || b >= k {
                return Err(Error::InvalidPoset(format!("pair ({a}, {b}) out of range")));
            }
            leq[a * k + b] = true;
        }
        for m in 0..k {
            for a in 0..k {
                if leq[a * k + m] {
                    for b in 0..k {
                        if leq[m * k + b] {
                            leq[a * k + b] = true;
                        }
                    }
                }
            }
        }
        let poset = ParamPoset { labels, leq };
        poset.validate()?;
        Ok(poset)
    }

    /// The chain `0 < 1 < … < k−1`.
    pub fn chain(k: usize) -> Result<Self> {
        let labels = (0..k).map(|i| format!("t{i}")).collect();
        let pairs: Vec<_> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
        Self::new(labels, &pairs)
    }

    /// Product order over parameter vectors.
    pub fn from_vectors(labels: Vec<String>, values: &[Vec<f64>]) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::InvalidPoset("label and value counts differ".into()));
        }
        let mut pairs = Vec::new();
        for (a, va) in values.iter().enumerate() {
            for (b, vb) in values.iter().enumerate() {
                if va.len() != vb.len() {
                    return Err(Error::InvalidPoset(
                        "parameter vectors differ in length".into(),
                    ));
                }
                if va.iter().zip(vb).all(|(x, y)| x <= y) {
                    pairs.push((a, b));
                }
            }
        }
        Self::new(labels, &pairs)
    }

    fn validate(&self) -> Result<()> {
        let k = self.len();
        for a in 0..k {
            if !self.leq(a, a) {
                return Err(Error::InvalidPoset(format!(
                    "not reflexive at {}",
                    self.labels[a]
                )));
            }
            for b in 0..k {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(Error::InvalidPoset(format!(
                        "not antisymmetric: {} and {}",
                        self.labels[a], self.labels[b]
                    )));
                }
                for c in 0..k {
                    if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                        return Err(Error::InvalidPoset(format!(
                            "not transitive: {} ≤ {} ≤ {}",
                            self.labels[a], self.labels[b], self.labels[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// All comparable pairs `(a, b)` with `a ≤ b`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .filter(|&(a, b)| self.leq(a, b))
            .collect()
    }

    /// The reversed order.
    pub fn dual(&self) -> ParamPoset {
        let k = self.len();
        let mut leq = vec![false; k * k];
        for a in 0..k {
            for b in 0..k {
                leq[a * k + b] = self.leq(b, a);
            }
        }
        ParamPoset {
            labels: self.labels.clone(),
            leq,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, k: usize) -> GridLattice {
        GridLattice::product(vec![(0..k).map(|v| v as f64).collect(); n]).unwrap()
    }

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec())
    }

    #[test]
    fn meet_join_examples() {
        let (x, y) = (p(&[1.0, 3.0]), p(&[2.0, 2.0]));
        assert_eq!(x.meet(&y).unwrap(), p(&[1.0, 2.0]));
        assert_eq!(x.join(&y).unwrap(), p(&[2.0, 3.0]));
        assert_eq!(x.meet(&x).unwrap(), x);
        let sq = grid(2, 2);
        assert_eq!(
            sq.join(&p(&[0.0, 1.0]), &p(&[1.0, 0.0])).unwrap(),
            p(&[1.0, 1.0])
        );
    }

    #[test]
    fn meet_dimension_mismatch() {
        assert!(matches!(
            p(&[1.0]).meet(&p(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(GridLattice::product(vec![vec![0.0, 0.0]]).is_err());
        assert!(GridLattice::product(vec![vec![]]).is_err());
        assert!(GridLattice::product(vec![]).is_err());
    }

    #[test]
    fn antichain_mask_is_rejected() {
        let axes = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        let err = GridLattice::from_members(axes, &[p(&[1.0, 0.0]), p(&[0.0, 1.0])]).unwrap_err();
        assert!(matches!(err, Error::InvalidLattice(_)));
    }

    #[test]
    fn box_examples() {
        let g = grid(2, 3);
        let b = g.sub_box(&p(&[0.0, 0.0]), &p(&[1.0, 1.0])).unwrap();
        assert_eq!(b.len(), 4);
        let s = g.sub_box(&p(&[1.0, 2.0]), &p(&[1.0, 2.0])).unwrap();
        assert_eq!(s.points(), vec![p(&[1.0, 2.0])]);
        assert!(g.sub_box(&p(&[2.0, 0.0]), &p(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn box_over_masked_lattice_is_closed_or_rejected() {
        // Upper-left triangle {x : x1 ≤ x2} of the 3×3 grid is a sublattice.
        let axes = vec![vec![0.0, 1.0, 2.0]; 2];
        let tri = GridLattice::with_mask(axes.clone(), |c| c[0] <= c[1]).unwrap();
        let b = tri.sub_box(&p(&[0.0, 1.0]), &p(&[2.0, 2.0])).unwrap();
        let ids: Vec<_> = b.ids().collect();
        assert!(b.is_sublattice(&ids));
        // Enumerate closure directly over point pairs.
        for x in b.points() {
            for y in b.points() {
                assert!(b.contains(&x.meet(&y).unwrap()));
                assert!(b.contains(&x.join(&y).unwrap()));
            }
        }
        // A grid with a hole at the corner (1,1) fails construction.
        let holed = GridLattice::with_mask(axes, |c| !(c[0] == 1.0 && c[1] == 1.0));
        assert!(holed.is_err());
    }

    #[test]
    fn strong_set_examples() {
        assert!(strong_set_geq(&[p(&[1.0, 1.0])], &[p(&[0.0, 0.0])]));
        assert!(!strong_set_geq(&[p(&[1.0, 0.0])], &[p(&[0.0, 1.0])]));
        assert!(strong_set_geq(&[], &[p(&[0.0, 1.0])]));
    }

    #[test]
    fn lexicographic_member_order() {
        let g = grid(2, 3);
        assert_eq!(g.point(0), p(&[0.0, 0.0]));
        assert_eq!(g.point(1), p(&[0.0, 1.0]));
        assert_eq!(g.point(3), p(&[1.0, 0.0]));
        assert_eq!(g.top(), 8);
        assert_eq!(g.bottom(), 0);
    }

    #[test]
    fn diff_set_of_grid() {
        let g = grid(2, 3);
        let d = g.diff_set();
        assert_eq!(d.len(), 25);
        let id = d.pair_id(8, 0);
        assert_eq!(d.get(id).entries(), &[2.0, 2.0]);
    }

    #[test]
    fn poset_validation() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(ParamPoset::new(labels.clone(), &[(0, 0), (1, 1), (0, 1)]).is_ok());
        assert!(ParamPoset::new(labels.clone(), &[(0, 1)]).is_err());
        assert!(ParamPoset::from_generators(labels.clone(), &[(0, 1), (1, 0)]).is_err());
        let c = ParamPoset::chain(3).unwrap();
        assert!(c.leq(0, 2) && !c.leq(2, 0) && c.lt(0, 1));
        let d = c.dual();
        assert!(d.leq(2, 0));
    }
}
