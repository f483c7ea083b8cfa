//! Integral-form Hölder bounds and their weight-partition refinements.
//!
//! For conjugate exponents `p, q` and functions `f, g` on `[a, b]`, the
//! classical bound is
//!
//! ```text
//! ∫|fg| <= (∫|f|^p)^(1/p) (∫|g|^q)^(1/q)
//! ```
//!
//! Splitting the constant weight 1 into nonnegative functions that sum to
//! one and applying the bound per piece tightens it:
//!
//! ```text
//! ∫|fg| <= Σ_i (∫ w_i |f|^p)^(1/p) (∫ w_i |g|^q)^(1/q) <= classical
//! ```
//!
//! [`verify_chain`] computes all three quantities and checks the ordering
//! numerically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::kahan::KahanSum;
use crate::quadrature::{integrate, Interval, QuadratureConfig, QuadratureError};
use crate::report::ReportTol;

/// Number of grid samples used to validate a weight partition.
pub const PARTITION_SAMPLES: usize = 1001;
/// Pointwise tolerance on `Σ_i w_i(x) = 1`.
pub const PARTITION_SUM_TOL: f64 = 1e-10;

/// Validated conjugate exponent pair: `p, q > 1` with `1/p + 1/q = 1`.
///
/// `p` is capped at 64 because `|f|^p` overflows doubles for moderate `f`
/// beyond that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateExponents {
    p: f64,
    q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ExponentError {
    #[error("p must exceed 1 (got p = {p})")]
    PNotGreaterThanOne { p: f64 },
    #[error("p must not exceed 64 (got p = {p})")]
    PTooLarge { p: f64 },
    #[error("q must exceed 1 (got q = {q})")]
    QNotGreaterThanOne { q: f64 },
    #[error("exponents are not conjugate: 1/{p} + 1/{q} differs from 1 by more than 1e-12")]
    NotConjugate { p: f64, q: f64 },
}

impl ConjugateExponents {
    // Negated comparisons are deliberate: they reject NaN as well.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(p: f64, q: f64) -> Result<Self, ExponentError> {
        if !(p > 1.0) {
            return Err(ExponentError::PNotGreaterThanOne { p });
        }
        if p > 64.0 {
            return Err(ExponentError::PTooLarge { p });
        }
        if !(q > 1.0) {
            return Err(ExponentError::QNotGreaterThanOne { q });
        }
        if (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
            return Err(ExponentError::NotConjugate { p, q });
        }
        Ok(ConjugateExponents { p, q })
    }

    /// Builds the pair from `p` alone, with `q = p / (p - 1)`.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_p(p: f64) -> Result<Self, ExponentError> {
        if !(p > 1.0) {
            return Err(ExponentError::PNotGreaterThanOne { p });
        }
        Self::new(p, p / (p - 1.0))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The pair with the roles of `p` and `q` exchanged.
    pub fn swapped(&self) -> Result<Self, ExponentError> {
        Self::new(self.q, self.p)
    }
}

/// Nonnegative weight functions on an interval that sum pointwise to one.
///
/// Validity is probed by dense sampling (1001 points), not symbolically:
/// the expression language has no decision procedure for nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPartition {
    weights: Vec<Expr>,
    interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("a weight partition needs at least 2 weights (got {n})")]
    TooFewWeights { n: usize },
    #[error("weight {index} is negative somewhere on the interval")]
    NegativeWeight { index: usize },
    #[error("weights sum to {sum} at x = {x}, expected 1")]
    SumNotOne { x: f64, sum: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl WeightPartition {
    pub fn new(weights: Vec<Expr>, interval: Interval) -> Result<Self, PartitionError> {
        if weights.len() < 2 {
            return Err(PartitionError::TooFewWeights { n: weights.len() });
        }
        for (index, w) in weights.iter().enumerate() {
            if !w.check_nonnegative(&interval, PARTITION_SAMPLES)? {
                return Err(PartitionError::NegativeWeight { index });
            }
        }
        for x in interval.grid(PARTITION_SAMPLES) {
            let mut sum = 0.0;
            for w in &weights {
                sum += w.eval(x)?;
            }
            if (sum - 1.0).abs() > PARTITION_SUM_TOL {
                return Err(PartitionError::SumNotOne { x, sum });
            }
        }
        Ok(WeightPartition { weights, interval })
    }

    /// The linear pair `(b - x)/(b - a)`, `(x - a)/(b - a)` behind the
    /// headline refined bound.
    pub fn linear(interval: Interval) -> Result<Self, PartitionError> {
        let (a, b) = (interval.a(), interval.b());
        let width = Expr::constant(b - a);
        let first = (Expr::constant(b) - Expr::var()) / width.clone();
        let second = (Expr::var() - Expr::constant(a)) / width;
        Self::new(vec![first, second], interval)
    }

    /// The `sin^2 x`, `cos^2 x` pair.
    pub fn trig(interval: Interval) -> Result<Self, PartitionError> {
        let two = || Expr::constant(2.0);
        let first = Expr::var().sin().pow(two());
        let second = Expr::var().cos().pow(two());
        Self::new(vec![first, second], interval)
    }

    pub fn weights(&self) -> &[Expr] {
        &self.weights
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Per-weight refined terms and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedBound {
    pub terms: Vec<f64>,
    pub total: f64,
}

/// Outcome of one chain verification `lhs <= refined <= classical`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundChainReport {
    pub lhs: f64,
    pub refined_terms: Vec<f64>,
    pub refined_total: f64,
    pub classical: f64,
    /// `classical - refined_total`.
    pub gap_refined: f64,
    /// `refined_total - lhs`.
    pub gap_lhs: f64,
    pub chain_ok: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolderError {
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("split point lambda must lie in [0, 1] (got {lambda})")]
    LambdaOutOfRange { lambda: f64 },
}

/// Young's inequality for two scalars: returns `(x*y, x^p/p + y^q/q)`.
///
/// The product never exceeds the bound; equality holds when `x^p = y^q`.
pub fn young_bound(x: f64, y: f64, exps: &ConjugateExponents) -> (f64, f64) {
    assert!(x >= 0.0 && y >= 0.0, "young_bound needs nonnegative inputs");
    let bound = x.powf(exps.p()) / exps.p() + y.powf(exps.q()) / exps.q();
    (x * y, bound)
}

fn finite(v: f64, x: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { x })
    }
}

/// `∫ w * |e|^power` over `interval`, clamped below at zero since the
/// integrand is nonnegative and quadrature may wobble by `-abs_tol`.
fn weighted_power_integral(
    weight: Option<&Expr>,
    e: &Expr,
    power: f64,
    interval: &Interval,
    cfg: &QuadratureConfig,
) -> Result<f64, QuadratureError> {
    let value = integrate(
        |x| {
            let v = e.eval(x)?.abs().powf(power);
            let v = match weight {
                Some(w) => w.eval(x)? * v,
                None => v,
            };
            finite(v, x)
        },
        interval,
        cfg,
    )?
    .value;
    Ok(value.max(0.0))
}

/// Left side of the chain: `∫ |f g|`.
pub fn lhs_integral(
    f: &Expr,
    g: &Expr,
    interval: &Interval,
    cfg: &QuadratureConfig,
) -> Result<f64, HolderError> {
    let value = integrate(
        |x| finite((f.eval(x)? * g.eval(x)?).abs(), x),
        interval,
        cfg,
    )?
    .value;
    Ok(value.max(0.0))
}

/// Classical bound `(∫|f|^p)^(1/p) (∫|g|^q)^(1/q)`.
pub fn classical_bound(
    f: &Expr,
    g: &Expr,
    exps: &ConjugateExponents,
    interval: &Interval,
    cfg: &QuadratureConfig,
) -> Result<f64, HolderError> {
    let fp = weighted_power_integral(None, f, exps.p(), interval, cfg)?;
    let gq = weighted_power_integral(None, g, exps.q(), interval, cfg)?;
    Ok(fp.powf(1.0 / exps.p()) * gq.powf(1.0 / exps.q()))
}

/// Refined bound for an arbitrary weight partition:
/// `Σ_i (∫ w_i |f|^p)^(1/p) (∫ w_i |g|^q)^(1/q)`.
pub fn refined_bound_weighted(
    f: &Expr,
    g: &Expr,
    exps: &ConjugateExponents,
    partition: &WeightPartition,
    cfg: &QuadratureConfig,
) -> Result<RefinedBound, HolderError> {
    let interval = partition.interval();
    let mut terms = Vec::with_capacity(partition.len());
    let mut total = KahanSum::new();
    for w in partition.weights() {
        let fp = weighted_power_integral(Some(w), f, exps.p(), interval, cfg)?;
        let gq = weighted_power_integral(Some(w), g, exps.q(), interval, cfg)?;
        let term = fp.powf(1.0 / exps.p()) * gq.powf(1.0 / exps.q());
        terms.push(term);
        total.add(term);
    }
    Ok(RefinedBound {
        terms,
        total: total.total(),
    })
}

/// The headline refined bound, i.e. [`refined_bound_weighted`] under the
/// linear pair `(b - x)/(b - a)`, `(x - a)/(b - a)`.
pub fn refined_bound_linear(
    f: &Expr,
    g: &Expr,
    exps: &ConjugateExponents,
    interval: &Interval,
    cfg: &QuadratureConfig,
) -> Result<RefinedBound, HolderError> {
    let partition = WeightPartition::linear(*interval)?;
    refined_bound_weighted(f, g, exps, &partition, cfg)
}

/// Two-piece bound obtained by applying the classical inequality on
/// `[a, c]` and `[c, b]` with `c = λ b + (1 - λ) a`.
///
/// At `λ = 0` or `λ = 1` one piece is empty and the value equals the
/// classical bound.
pub fn split_point_bound(
    f: &Expr,
    g: &Expr,
    exps: &ConjugateExponents,
    interval: &Interval,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, HolderError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(HolderError::LambdaOutOfRange { lambda });
    }
    let (a, b) = (interval.a(), interval.b());
    let c = (lambda * b + (1.0 - lambda) * a).clamp(a, b);
    let mut total = 0.0;
    for (lo, hi) in [(a, c), (c, b)] {
        if lo < hi {
            let piece = Interval::new(lo, hi)?;
            let fp = weighted_power_integral(None, f, exps.p(), &piece, cfg)?;
            let gq = weighted_power_integral(None, g, exps.q(), &piece, cfg)?;
            total += fp.powf(1.0 / exps.p()) * gq.powf(1.0 / exps.q());
        }
    }
    Ok(total)
}

/// Whether the chain ordering holds within `tol`. A classical bound of
/// zero means `f` or `g` vanishes, so the other two values must vanish
/// too.
pub fn chain_holds(lhs: f64, refined_total: f64, classical: f64, tol: f64) -> bool {
    if classical == 0.0 {
        lhs <= tol && refined_total <= tol
    } else {
        lhs <= refined_total + tol && refined_total <= classical + tol
    }
}

/// Computes the full chain and checks `lhs <= refined <= classical` within
/// the given absolute tolerance.
pub fn verify_chain(
    f: &Expr,
    g: &Expr,
    exps: &ConjugateExponents,
    partition: &WeightPartition,
    cfg: &QuadratureConfig,
    report_tol: f64,
) -> Result<BoundChainReport, HolderError> {
    verify_chain_with(f, g, exps, partition, cfg, &ReportTol::fixed(report_tol))
}

/// [`verify_chain`] with the tolerance resolved from a policy once the
/// classical bound is known. Integrals run at least 100x tighter than the
/// smallest tolerance the policy can produce.
pub fn verify_chain_with(
    f: &Expr,
    g: &Expr,
    exps: &ConjugateExponents,
    partition: &WeightPartition,
    cfg: &QuadratureConfig,
    policy: &ReportTol,
) -> Result<BoundChainReport, HolderError> {
    let cfg = cfg.tightened(policy.quadrature_cap());
    let interval = partition.interval();
    let classical = classical_bound(f, g, exps, interval, &cfg)?;
    let refined = refined_bound_weighted(f, g, exps, partition, &cfg)?;
    let lhs = lhs_integral(f, g, interval, &cfg)?;
    let tolerance = policy.resolve(classical);
    Ok(BoundChainReport {
        lhs,
        chain_ok: chain_holds(lhs, refined.total, classical, tolerance),
        gap_refined: classical - refined.total,
        gap_lhs: refined.total - lhs,
        refined_total: refined.total,
        refined_terms: refined.terms,
        classical,
        tolerance,
    })
}
