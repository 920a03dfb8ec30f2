//! Verdicts for theorem checks on single instances.

use std::fmt;

use serde::Serialize;

use crate::lattice::Point;
use crate::properties::{NamedPoint, PropertyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Hypotheses verified and the conclusion holds.
    Holds,
    /// The conclusion fails (only possible with hypotheses skipped, or an
    /// engine bug).
    Violated,
    /// A hypothesis failed; the conclusion was not evaluated.
    Rejected,
    /// The check could not be completed (e.g. a cycling optimal policy).
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Rejected => "rejected",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedPath {
    pub name: String,
    pub points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuation: Option<Vec<f64>>,
}

/// Outcome of one theorem check on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub verdict: Verdict,
    pub hypotheses: Vec<PropertyReport>,
    pub points: Vec<NamedPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<NamedPath>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn new(theorem: &str, hypotheses: Vec<PropertyReport>) -> Self {
        TheoremReport {
            theorem: theorem.into(),
            verdict: Verdict::Holds,
            hypotheses,
            points: Vec::new(),
            paths: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn point(&mut self, name: &str, p: &Point) -> &mut Self {
        self.points.push(NamedPoint {
            name: name.into(),
            coords: p.coords().to_vec(),
        });
        self
    }

    pub fn path(
        &mut self,
        name: &str,
        points: &[Point],
        continuation: Option<&Point>,
    ) -> &mut Self {
        self.paths.push(NamedPath {
            name: name.into(),
            points: points.iter().map(|p| p.coords().to_vec()).collect(),
            continuation: continuation.map(|p| p.coords().to_vec()),
        });
        self
    }

    /// Records a conclusion; a failed one marks the report violated.
    pub fn expect(&mut self, ok: bool, what: impl Into<String>) -> &mut Self {
        if !ok {
            self.verdict = Verdict::Violated;
            self.notes.push(what.into());
        }
        self
    }

    pub fn note(&mut self, what: impl Into<String>) -> &mut Self {
        self.notes.push(what.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn get_point(&self, name: &str) -> Option<&[f64]> {
        self.points
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.coords.as_slice())
    }
}
