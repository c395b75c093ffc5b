//! Floating-point thresholds for zero tests, eigenvalue clustering and rank.
//!
//! Every threshold is either relative (a coefficient applied to a
//! machine-precision unit of the matrix at hand) or an absolute user value.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum Threshold {
    /// Coefficient on the policy's machine-precision unit.
    Relative(f64),
    Absolute(f64),
}

impl Threshold {
    fn validate(self, name: &str) -> Result<Self> {
        let v = match self {
            Threshold::Relative(v) | Threshold::Absolute(v) => v,
        };
        if v.is_finite() && v > 0.0 {
            Ok(self)
        } else {
            Err(Error::Tolerance(format!("{name} must be positive and finite, got {v}")))
        }
    }

    fn resolve(self, unit: f64) -> f64 {
        match self {
            Threshold::Relative(c) => c * unit,
            Threshold::Absolute(v) => v,
        }
    }
}

/// Accepts `abs:<v>`, `rel:<c>`, or a bare number (absolute).
impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, value) = match s.split_once(':') {
            Some((k, v)) => (k, v),
            None => ("abs", s),
        };
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Tolerance(format!("cannot parse threshold {s:?}")))?;
        let t = match kind {
            "abs" => Threshold::Absolute(v),
            "rel" => Threshold::Relative(v),
            other => return Err(Error::Tolerance(format!("unknown threshold kind {other:?}"))),
        };
        t.validate("threshold")
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Relative(c) => write!(f, "rel:{c}"),
            Threshold::Absolute(v) => write!(f, "abs:{v}"),
        }
    }
}

/// Thresholds used by the rank, spectrum and classification stages.
///
/// Relative units:
/// - zero and cluster: `n * eps * ||A||_2`, default coefficient 100
/// - rank: `max(m, n) * eps * sigma_1`, default coefficient 1
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TolerancePolicy {
    pub zero: Threshold,
    pub cluster: Threshold,
    pub rank: Threshold,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            zero: Threshold::Relative(100.0),
            cluster: Threshold::Relative(100.0),
            rank: Threshold::Relative(1.0),
        }
    }
}

/// A policy evaluated against one matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolvedTolerances {
    pub zero: f64,
    pub cluster: f64,
    pub rank: f64,
    /// The `||A||_2` value the relative thresholds were resolved against.
    pub scale: f64,
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        self.zero.validate("zero threshold")?;
        self.cluster.validate("cluster threshold")?;
        self.rank.validate("rank threshold")?;
        Ok(())
    }

    pub fn with_zero(mut self, t: Threshold) -> Self {
        self.zero = t;
        self
    }

    pub fn with_cluster(mut self, t: Threshold) -> Self {
        self.cluster = t;
        self
    }

    pub fn with_rank(mut self, t: Threshold) -> Self {
        self.rank = t;
        self
    }

    /// Rank threshold for an `m x n` matrix whose largest singular value is `sigma1`.
    pub fn rank_tolerance(&self, m: usize, n: usize, sigma1: f64) -> Result<f64> {
        self.validate()?;
        let unit = m.max(n) as f64 * EPS * effective_scale(sigma1);
        checked(self.rank.resolve(unit), "rank threshold")
    }

    /// Resolve all thresholds for an `n x n` matrix with spectral norm `scale`.
    ///
    /// A zero matrix has no natural scale; unit scale is used so the resolved
    /// thresholds stay strictly positive.
    pub fn resolve(&self, n: usize, scale: f64) -> Result<ResolvedTolerances> {
        self.validate()?;
        let s = effective_scale(scale);
        let unit = n as f64 * EPS * s;
        Ok(ResolvedTolerances {
            zero: checked(self.zero.resolve(unit), "zero threshold")?,
            cluster: checked(self.cluster.resolve(unit), "cluster threshold")?,
            rank: self.rank_tolerance(n, n, scale)?,
            scale: s,
        })
    }
}

fn effective_scale(s: f64) -> f64 {
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

fn checked(v: f64, name: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Tolerance(format!("{name} resolved to {v}")))
    }
}
