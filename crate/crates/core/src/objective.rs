//! Tabulated objectives `F(x, θ)` over a lattice and a parameter poset.

use crate::error::{Error, Result};
use crate::lattice::{GridLattice, MemberId, ParamPoset, Point};

/// `F(x, θ)` stored as one value per (parameter, member).
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    lattice: GridLattice,
    params: ParamPoset,
    values: Vec<Vec<f64>>,
}

impl Objective {
    pub fn from_table(
        lattice: GridLattice,
        params: ParamPoset,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if values.len() != params.len() {
            return Err(Error::InvalidObjective(format!(
                "{} parameter rows for {} parameter values",
                values.len(),
                params.len()
            )));
        }
        for (t, row) in values.iter().enumerate() {
            if row.len() != lattice.len() {
                return Err(Error::InvalidObjective(format!(
                    "row {} has {} values for {} members",
                    params.label(t),
                    row.len(),
                    lattice.len()
                )));
            }
            if let Some(i) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidObjective(format!(
                    "F({}, {}) is not finite",
                    lattice.point(i),
                    params.label(t)
                )));
            }
        }
        Ok(Objective {
            lattice,
            params,
            values,
        })
    }

    /// Evaluates `f` at every (member, parameter index) pair.
    pub fn tabulate(
        lattice: GridLattice,
        params: ParamPoset,
        f: impl Fn(&Point, usize) -> f64,
    ) -> Result<Self> {
        let values = (0..params.len())
            .map(|t| lattice.ids().map(|i| f(&lattice.point(i), t)).collect())
            .collect();
        Self::from_table(lattice, params, values)
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    pub fn params(&self) -> &ParamPoset {
        &self.params
    }

    pub fn value(&self, x: MemberId, theta: usize) -> f64 {
        self.values[theta][x]
    }

    pub fn row(&self, theta: usize) -> &[f64] {
        &self.values[theta]
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn eval(&self, p: &Point, theta: usize) -> Result<f64> {
        if theta >= self.params.len() {
            return Err(Error::InvalidObjective(format!(
                "parameter index {theta} out of range"
            )));
        }
        Ok(self.values[theta][self.lattice.require(p)?])
    }

    /// The same objective under a different parameter order (for example
    /// the dual, to study parameter decreases).
    pub fn with_params(&self, params: ParamPoset) -> Result<Self> {
        if params.len() != self.params.len() {
            return Err(Error::InvalidPoset("parameter count changed".into()));
        }
        Ok(Objective {
            lattice: self.lattice.clone(),
            params,
            values: self.values.clone(),
        })
    }

    /// Restriction to a sublattice over the same axes.
    pub fn restrict(&self, sub: &GridLattice) -> Result<Self> {
        let ids = sub.embed_into(&self.lattice)?;
        let values = self
            .values
            .iter()
            .map(|row| ids.iter().map(|&i| row[i]).collect())
            .collect();
        Self::from_table(sub.clone(), self.params.clone(), values)
    }

    /// `(x, θ) ↦ φ(F(x, θ))`.
    pub fn map_values(&self, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|row| row.iter().map(|&v| phi(v)).collect())
            .collect();
        Self::from_table(self.lattice.clone(), self.params.clone(), values)
    }

    /// Maximum absolute value over the table.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}
