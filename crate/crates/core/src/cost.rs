//! Extended-real adjustment costs `C : ΔL → [0, ∞]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use schemars::gen::SchemaGenerator;
use schemars::schema::Schema;
use schemars::JsonSchema;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{key_of, DiffVector, GridLattice, MemberId};

/// A real number or `+∞`, serialized as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtValue(pub f64);

impl ExtValue {
    pub const INFINITY: ExtValue = ExtValue(f64::INFINITY);

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }
}

impl From<f64> for ExtValue {
    fn from(v: f64) -> Self {
        ExtValue(v)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtValue(v)),
            Raw::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtValue(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(ExtValue(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number or \"inf\", found \"{other}\""
                ))),
            },
        }
    }
}

impl JsonSchema for ExtValue {
    fn schema_name() -> String {
        "ExtValue".into()
    }

    fn json_schema(_: &mut SchemaGenerator) -> Schema {
        serde_json::from_value(serde_json::json!({
            "description": "A real number, or \"inf\" for an infinite (infeasible) cost.",
            "anyOf": [
                { "type": "number" },
                { "type": "string", "enum": ["inf", "+inf", "infinity", "-inf"] }
            ]
        }))
        .expect("static schema")
    }
}

/// One-dimensional cost component `C_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarCost {
    Zero,
    /// `a ε²`.
    Quadratic {
        a: f64,
    },
    /// `a ε²` for `ε ≥ 0`, zero for downward moves.
    FreeDisposal {
        a: f64,
    },
    /// `k` for any nonzero move.
    Fixed {
        k: f64,
    },
    /// `a ε²` on `[lower, upper]`, infinite elsewhere.
    Constrained {
        a: f64,
        lower: ExtValue,
        upper: ExtValue,
    },
    /// `a ε²` on `(−∞, 0] ∪ [min_size, ∞)`, infinite on `(0, min_size)`.
    Lumpy {
        a: f64,
        min_size: f64,
    },
    /// Zero at `0`, infinite elsewhere.
    Prohibitive,
    /// `up·ε` upward, `down·|ε|` downward.
    Linear {
        down: f64,
        up: f64,
    },
    /// Explicit `(ε, C(ε))` pairs.
    Table {
        values: Vec<(f64, ExtValue)>,
    },
}

impl ScalarCost {
    pub fn eval(&self, e: f64) -> Result<f64> {
        let v = match self {
            ScalarCost::Zero => 0.0,
            ScalarCost::Quadratic { a } => a * e * e,
            ScalarCost::FreeDisposal { a } => {
                if e > 0.0 {
                    a * e * e
                } else {
                    0.0
                }
            }
            ScalarCost::Fixed { k } => {
                if e == 0.0 {
                    0.0
                } else {
                    *k
                }
            }
            ScalarCost::Constrained { a, lower, upper } => {
                if lower.0 <= e && e <= upper.0 {
                    a * e * e
                } else {
                    f64::INFINITY
                }
            }
            ScalarCost::Lumpy { a, min_size } => {
                if e > 0.0 && e < *min_size {
                    f64::INFINITY
                } else {
                    a * e * e
                }
            }
            ScalarCost::Prohibitive => {
                if e == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ScalarCost::Linear { down, up } => {
                if e >= 0.0 {
                    up * e
                } else {
                    -down * e
                }
            }
            ScalarCost::Table { values } => values
                .iter()
                .find(|(k, _)| *k == e)
                .map(|(_, v)| v.0)
                .ok_or_else(|| Error::InvalidCost(format!("scalar table has no entry for {e}")))?,
        };
        Ok(v)
    }
}

/// Named cost families and explicit tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    Zero,
    /// `Σ a_i ε_i²`; a single weight applies to every dimension.
    Quadratic {
        weights: Vec<f64>,
    },
    /// `Σ a_i ε_i²` over upward moves only.
    FreeDisposal {
        weights: Vec<f64>,
    },
    /// `k` whenever any coordinate moves.
    Fixed {
        k: f64,
    },
    /// `scale · ‖ε‖₂`.
    Euclidean {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `scale · Π |ε_i|^{a_i}`.
    CobbDouglas {
        exponents: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Per-dimension lumpy cost with the same minimum size.
    Lumpy {
        min_size: f64,
        weight: f64,
    },
    /// Per-dimension quadratic inside `[lower_i, upper_i]`, infinite outside.
    BoxConstraint {
        weights: Vec<f64>,
        lower: Vec<ExtValue>,
        upper: Vec<ExtValue>,
    },
    /// Zero at `0`, infinite elsewhere.
    Prohibitive,
    /// `Σ C_i(ε_i)`.
    Separable {
        components: Vec<ScalarCost>,
    },
    /// Explicit `(ε, C(ε))` entries; must cover `ΔL` when bound.
    Table {
        entries: Vec<CostEntry>,
    },
    /// The inner cost evaluated with the listed coordinates negated.
    Flip {
        dims: Vec<usize>,
        inner: Box<CostSpec>,
    },
    Sum {
        terms: Vec<CostSpec>,
    },
    /// `scale · KL(G ‖ G₀)` for belief coordinates stored as `−G(y_k)`
    /// starting at `offset`; `reference` lists `G₀(y_1..y_{N−1})`.
    /// Infinite when `G₀ − ε` is not a CDF or is not absolutely
    /// continuous with respect to `G₀`.
    KullbackLeibler {
        reference: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        offset: usize,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CostEntry {
    pub diff: Vec<f64>,
    pub cost: ExtValue,
}

const CDF_TOL: f64 = 1e-12;

fn weight(weights: &[f64], i: usize) -> Result<f64> {
    match weights.len() {
        1 => Ok(weights[0]),
        _ => weights
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidCost(format!("no weight for dimension {i}"))),
    }
}

pub(crate) fn kl_divergence(reference: &[f64], belief: &[f64]) -> f64 {
    let pmf = |cdf: &[f64]| -> Vec<f64> {
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(cdf.len() + 1);
        for &v in cdf.iter().chain(std::iter::once(&1.0)) {
            out.push((v - prev).max(0.0));
            prev = v;
        }
        out
    };
    let (g, g0) = (pmf(belief), pmf(reference));
    let mut total = 0.0;
    for (&p, &q) in g.iter().zip(&g0) {
        if p <= CDF_TOL {
            continue;
        }
        if q <= CDF_TOL {
            return f64::INFINITY;
        }
        total += p * (p / q).ln();
    }
    total.max(0.0)
}

impl CostSpec {
    /// Evaluates `C(ε)`. Fails only when a table lacks the entry or the
    /// dimension does not fit the family's parameters.
    pub fn eval(&self, e: &[f64]) -> Result<f64> {
        let v = match self {
            CostSpec::Zero => 0.0,
            CostSpec::Quadratic { weights } => {
                let mut s = 0.0;
                for (i, &x) in e.iter().enumerate() {
                    s += weight(weights, i)? * x * x;
                }
                s
            }
            CostSpec::FreeDisposal { weights } => {
                let mut s = 0.0;
                for (i, &x) in e.iter().enumerate() {
                    if x > 0.0 {
                        s += weight(weights, i)? * x * x;
                    }
                }
                s
            }
            CostSpec::Fixed { k } => {
                if e.iter().all(|&x| x == 0.0) {
                    0.0
                } else {
                    *k
                }
            }
            CostSpec::Euclidean { scale } => scale * e.iter().map(|x| x * x).sum::<f64>().sqrt(),
            CostSpec::CobbDouglas { exponents, scale } => {
                if exponents.len() != e.len() {
                    return Err(Error::DimensionMismatch {
                        expected: exponents.len(),
                        got: e.len(),
                    });
                }
                let mut p = *scale;
                for (x, a) in e.iter().zip(exponents) {
                    p *= x.abs().powf(*a);
                }
                p
            }
            CostSpec::Lumpy { min_size, weight } => {
                let mut s = 0.0;
                for &x in e {
                    s += ScalarCost::Lumpy {
                        a: *weight,
                        min_size: *min_size,
                    }
                    .eval(x)?;
                }
                s
            }
            CostSpec::BoxConstraint {
                weights,
                lower,
                upper,
            } => {
                if lower.len() != e.len() || upper.len() != e.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lower.len(),
                        got: e.len(),
                    });
                }
                let mut s = 0.0;
                for (i, &x) in e.iter().enumerate() {
                    s += ScalarCost::Constrained {
                        a: weight(weights, i)?,
                        lower: lower[i],
                        upper: upper[i],
                    }
                    .eval(x)?;
                }
                s
            }
            CostSpec::Prohibitive => {
                if e.iter().all(|&x| x == 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            CostSpec::Separable { components } => {
                if components.len() != e.len() {
                    return Err(Error::DimensionMismatch {
                        expected: components.len(),
                        got: e.len(),
                    });
                }
                let mut s = 0.0;
                for (c, &x) in components.iter().zip(e) {
                    s += c.eval(x)?;
                }
                s
            }
            CostSpec::Table { entries } => {
                let key = key_of(e);
                entries
                    .iter()
                    .find(|en| key_of(&en.diff) == key)
                    .map(|en| en.cost.0)
                    .ok_or_else(|| {
                        Error::InvalidCost(format!(
                            "table has no entry for {}",
                            DiffVector::new(e.to_vec())
                        ))
                    })?
            }
            CostSpec::Flip { dims, inner } => {
                let mut f = e.to_vec();
                for &d in dims {
                    let slot = f.get_mut(d).ok_or_else(|| {
                        Error::InvalidCost(format!("flip dimension {d} out of range"))
                    })?;
                    *slot = -*slot;
                }
                inner.eval(&f)?
            }
            CostSpec::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.eval(e)?;
                }
                s
            }
            CostSpec::KullbackLeibler {
                reference,
                scale,
                offset,
            } => {
                let n = reference.len();
                let part = e
                    .get(*offset..offset + n)
                    .ok_or_else(|| Error::InvalidCost("belief coordinates out of range".into()))?;
                let g: Vec<f64> = reference.iter().zip(part).map(|(r, d)| r - d).collect();
                let valid = g.iter().all(|&v| (-CDF_TOL..=1.0 + CDF_TOL).contains(&v))
                    && g.windows(2).all(|w| w[0] <= w[1] + CDF_TOL);
                if !valid {
                    f64::INFINITY
                } else {
                    scale * kl_divergence(reference, &g)
                }
            }
        };
        Ok(v)
    }

    /// True for specs whose form is a sum of per-dimension components.
    pub fn declared_separable(&self) -> bool {
        match self {
            CostSpec::Zero
            | CostSpec::Quadratic { .. }
            | CostSpec::FreeDisposal { .. }
            | CostSpec::Lumpy { .. }
            | CostSpec::BoxConstraint { .. }
            | CostSpec::Prohibitive
            | CostSpec::Separable { .. } => true,
            CostSpec::Flip { inner, .. } => inner.declared_separable(),
            CostSpec::Sum { terms } => terms.iter().all(|t| t.declared_separable()),
            _ => false,
        }
    }
}

/// A validated cost function. Cheap to clone.
#[derive(Debug, Clone)]
pub struct CostFunction {
    spec: CostSpec,
    index: Option<Arc<HashMap<Vec<u64>, f64>>>,
}

impl PartialEq for CostFunction {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl CostFunction {
    pub fn new(spec: CostSpec) -> Result<Self> {
        let index = match &spec {
            CostSpec::Table { entries } => {
                let mut map = HashMap::with_capacity(entries.len());
                for en in entries {
                    if map.insert(key_of(&en.diff), en.cost.0).is_some() {
                        return Err(Error::InvalidCost(format!(
                            "duplicate table entry for {}",
                            DiffVector::new(en.diff.clone())
                        )));
                    }
                }
                Some(Arc::new(map))
            }
            _ => None,
        };
        Ok(CostFunction { spec, index })
    }

    pub fn zero() -> Self {
        CostFunction::new(CostSpec::Zero).expect("zero cost")
    }

    /// Tabulates an arbitrary function over `ΔL`.
    pub fn from_fn(lattice: &GridLattice, f: impl Fn(&DiffVector) -> f64) -> Result<Self> {
        let entries = lattice
            .diff_set()
            .iter()
            .map(|d| CostEntry {
                diff: d.entries().to_vec(),
                cost: ExtValue(f(d)),
            })
            .collect();
        CostFunction::new(CostSpec::Table { entries })
    }

    pub fn spec(&self) -> &CostSpec {
        &self.spec
    }

    pub fn eval(&self, e: &[f64]) -> Result<f64> {
        if let Some(index) = &self.index {
            return index.get(&key_of(e)).copied().ok_or_else(|| {
                Error::InvalidCost(format!(
                    "table has no entry for {}",
                    DiffVector::new(e.to_vec())
                ))
            });
        }
        self.spec.eval(e)
    }

    pub fn at(&self, e: &DiffVector) -> Result<f64> {
        self.eval(e.entries())
    }

    /// `ε ↦ C(ε with dims negated)`.
    pub fn flipped(&self, dims: &[usize]) -> Result<Self> {
        CostFunction::new(CostSpec::Flip {
            dims: dims.to_vec(),
            inner: Box::new(self.spec.clone()),
        })
    }

    /// Evaluates over `ΔL` and checks the value conventions.
    pub fn bind(&self, lattice: &GridLattice) -> Result<CostTable> {
        CostTable::new(self, lattice)
    }
}

/// A cost evaluated once over the difference set of a lattice.
#[derive(Debug, Clone)]
pub struct CostTable {
    lattice: GridLattice,
    values: Arc<Vec<f64>>,
}

impl CostTable {
    pub fn new(cost: &CostFunction, lattice: &GridLattice) -> Result<Self> {
        let diffs = lattice.diff_set();
        let mut values = Vec::with_capacity(diffs.len());
        for d in diffs.iter() {
            let v = cost.at(d)?;
            if v.is_nan() || v < 0.0 {
                return Err(Error::InvalidCost(format!(
                    "C{d} = {v}; costs must lie in [0, ∞]"
                )));
            }
            values.push(v);
        }
        let zero = DiffVector::zero(lattice.dims());
        let z = diffs.id_of(&zero).expect("zero difference");
        if !values[z].is_finite() {
            return Err(Error::InvalidCost("C(0) must be finite".into()));
        }
        Ok(CostTable {
            lattice: lattice.clone(),
            values: Arc::new(values),
        })
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    /// Cost of the move `to − from`.
    pub fn between(&self, to: MemberId, from: MemberId) -> f64 {
        self.values[self.lattice.diff_set().pair_id(to, from)]
    }

    /// Cost by difference id.
    pub fn by_id(&self, id: usize) -> f64 {
        self.values[id]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_value_round_trip() {
        let v: Vec<ExtValue> = serde_json::from_str(r#"[1.5, "inf", "Infinity", 0]"#).unwrap();
        assert_eq!(v[0].0, 1.5);
        assert!(v[1].is_infinite() && v[2].is_infinite());
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"inf","inf",0.0]"#);
        assert!(serde_json::from_str::<ExtValue>(r#""big""#).is_err());
    }

    #[test]
    fn named_families() {
        let e = [2.0, -1.0];
        let q = CostSpec::Quadratic {
            weights: vec![1.0, 3.0],
        };
        assert_eq!(q.eval(&e).unwrap(), 7.0);
        let fd = CostSpec::FreeDisposal { weights: vec![1.0] };
        assert_eq!(fd.eval(&e).unwrap(), 4.0);
        let eu = CostSpec::Euclidean { scale: 1.0 };
        assert_eq!(eu.eval(&[3.0, 4.0]).unwrap(), 5.0);
        let cd = CostSpec::CobbDouglas {
            exponents: vec![1.0, 2.0],
            scale: 1.0,
        };
        assert_eq!(cd.eval(&e).unwrap(), 2.0);
        let lumpy = CostSpec::Lumpy {
            min_size: 3.0,
            weight: 1.0,
        };
        assert!(lumpy.eval(&[2.0]).unwrap().is_infinite());
        assert_eq!(lumpy.eval(&[3.0]).unwrap(), 9.0);
        assert_eq!(lumpy.eval(&[-1.0]).unwrap(), 1.0);
        let flip = CostSpec::Flip {
            dims: vec![0],
            inner: Box::new(fd),
        };
        assert_eq!(flip.eval(&e).unwrap(), 0.0);
    }

    #[test]
    fn kl_worked_value() {
        // Belief coordinates are −G(y1), −G(y2); the reference is G0.
        let g0 = vec![1.0 / 3.0, 2.0 / 3.0];
        let kl = CostSpec::KullbackLeibler {
            reference: g0.clone(),
            scale: 1.0,
            offset: 0,
        };
        let eps = |g: [f64; 2]| [-(g[0] - g0[0]), -(g[1] - g0[1])];
        let cg = kl.eval(&eps([0.25, 0.25])).unwrap();
        let ch = kl.eval(&eps([0.125, 0.25])).unwrap();
        assert!((cg - ch - 0.25 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(kl.eval(&[0.0, 0.0]).unwrap(), 0.0);
        // Not a CDF: decreasing.
        assert!(kl.eval(&eps([0.5, 0.25])).unwrap().is_infinite());
    }

    #[test]
    fn bind_rejects_bad_values() {
        let l = GridLattice::product(vec![vec![0.0, 1.0]]).unwrap();
        let bad =
            CostFunction::from_fn(&l, |d| if d.is_zero() { f64::INFINITY } else { 0.0 }).unwrap();
        assert!(bad.bind(&l).is_err());
        let neg = CostFunction::from_fn(&l, |_| -1.0).unwrap();
        assert!(neg.bind(&l).is_err());
        let ok = CostFunction::new(CostSpec::Fixed { k: 2.0 })
            .unwrap()
            .bind(&l)
            .unwrap();
        assert_eq!(ok.between(1, 0), 2.0);
        assert_eq!(ok.between(1, 1), 0.0);
    }
}
