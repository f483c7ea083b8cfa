//! Numerical toolkit for Hölder-type bounds.
//!
//! Computes the classical integral and sum Hölder inequalities, their
//! weight-partition refinements, and the sharpened trapezoid bound for
//! functions with convex `|f'|^q`, then certifies the refinement chains
//! `lhs <= refined <= classical` at machine precision.
//!
//! Modules:
//!
//! - [`expr`]: the expression language functions and weights are written in
//! - [`quadrature`]: adaptive Gauss-Kronrod integration with kink handling
//! - [`holder_integral`]: integral-form bounds and chain verification
//! - [`holder_sum`]: discrete analogues over positive tuples
//! - [`hermite_hadamard`]: trapezoid-defect bounds
//! - [`harness`]: seeded randomized sweeps with gap statistics

pub mod expr;
pub mod harness;
pub mod hermite_hadamard;
pub mod holder_integral;
pub mod holder_sum;
pub mod kahan;
pub mod quadrature;
pub mod report;

pub use expr::{parse, Expr};
pub use harness::{run_sweep, run_sweep_serial, Family, SweepConfig, SweepSummary};
pub use hermite_hadamard::{hh_report, HHInput, HHReport};
pub use holder_integral::{verify_chain, BoundChainReport, ConjugateExponents, WeightPartition};
pub use holder_sum::{verify_sum_chain, DiscreteWeightPartition, PositiveTuple, SumChainReport};
pub use quadrature::{Interval, QuadratureConfig};
pub use report::ReportTol;
