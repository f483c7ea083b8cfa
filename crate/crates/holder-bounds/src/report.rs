//! Report tolerance policy shared by the chain verifiers.

use serde::{Deserialize, Serialize};

/// How a chain verification turns the classical bound into the tolerance
/// its verdict is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReportTol {
    /// `factor * max(1, classical)`: absolute-relative hybrid so tiny and
    /// large scales are both meaningful.
    Scaled { factor: f64 },
    /// Fixed absolute tolerance.
    Fixed { tol: f64 },
}

impl Default for ReportTol {
    fn default() -> Self {
        ReportTol::Scaled { factor: 1e-8 }
    }
}

impl ReportTol {
    pub fn scaled(factor: f64) -> Self {
        ReportTol::Scaled { factor }
    }

    pub fn fixed(tol: f64) -> Self {
        ReportTol::Fixed { tol }
    }

    /// Resolves the tolerance once the classical bound is known.
    pub fn resolve(&self, classical: f64) -> f64 {
        match *self {
            ReportTol::Scaled { factor } => factor * classical.abs().max(1.0),
            ReportTol::Fixed { tol } => tol,
        }
    }

    /// Smallest tolerance this policy can resolve to; integral evaluations
    /// are run 100x tighter than this.
    pub fn floor(&self) -> f64 {
        match *self {
            ReportTol::Scaled { factor } => factor,
            ReportTol::Fixed { tol } => tol,
        }
    }

    /// Tolerance cap for the quadrature runs behind a chain verification:
    /// 100x tighter than the report tolerance, but never below what the
    /// Gauss-Kronrod error estimator can certify in doubles.
    pub fn quadrature_cap(&self) -> f64 {
        (self.floor() / 100.0).max(1e-13)
    }
}

impl From<f64> for ReportTol {
    fn from(tol: f64) -> Self {
        ReportTol::Fixed { tol }
    }
}
