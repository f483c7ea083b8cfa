//! Sum-form Hölder bounds and their discrete weight-partition refinements.
//!
//! Mirrors the integral module for positive n-tuples:
//!
//! ```text
//! Σ a_k b_k <= Σ_i (Σ_k c_k^(i) a_k^p)^(1/p) (Σ_k c_k^(i) b_k^q)^(1/q)
//!           <= (Σ a_k^p)^(1/p) (Σ b_k^q)^(1/q)
//! ```
//!
//! where the rows `c^(i)` are nonnegative and sum to one at every index.
//! All sums are compensated: chain gaps can sit at 1e-12 of the magnitude
//! and naive summation would create false violations at n = 10^4.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::holder_integral::{chain_holds, ConjugateExponents};
use crate::kahan::KahanSum;
use crate::report::ReportTol;

/// Tolerance on `Σ_i rows_i[k] = 1` per index.
pub const COLUMN_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SumError {
    #[error("tuple must not be empty")]
    EmptyTuple,
    #[error("tuple entry {index} is not a positive finite real (got {value})")]
    NonPositiveEntry { index: usize, value: f64 },
    #[error("tuple lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("a discrete partition needs at least 2 rows (got {m})")]
    TooFewRows { m: usize },
    #[error("partition row {row} has length {got}, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("partition entry at row {row}, index {index} is negative (got {value})")]
    NegativeEntry {
        row: usize,
        index: usize,
        value: f64,
    },
    #[error("partition column {index} sums to {sum}, expected 1")]
    ColumnSumNotOne { index: usize, sum: f64 },
}

/// Tuple of strictly positive finite reals.
///
/// Zero entries are rejected: the discrete bounds assume positive tuples,
/// and the integral module covers the vanishing case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveTuple {
    values: Vec<f64>,
}

impl PositiveTuple {
    pub fn new(values: Vec<f64>) -> Result<Self, SumError> {
        if values.is_empty() {
            return Err(SumError::EmptyTuple);
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(SumError::NonPositiveEntry { index, value });
            }
        }
        Ok(PositiveTuple { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `m >= 2` nonnegative weight rows of equal length whose columns sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteWeightPartition {
    rows: Vec<Vec<f64>>,
}

impl DiscreteWeightPartition {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, SumError> {
        if rows.len() < 2 {
            return Err(SumError::TooFewRows { m: rows.len() });
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(SumError::EmptyTuple);
        }
        for (row, values) in rows.iter().enumerate() {
            if values.len() != n {
                return Err(SumError::RaggedRow {
                    row,
                    expected: n,
                    got: values.len(),
                });
            }
            for (index, &value) in values.iter().enumerate() {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(SumError::NegativeEntry { row, index, value });
                }
            }
        }
        for index in 0..n {
            let sum: f64 = rows.iter().map(|r| r[index]).sum();
            if (sum - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(SumError::ColumnSumNotOne { index, sum });
            }
        }
        Ok(DiscreteWeightPartition { rows })
    }

    /// The index-linear pair `c_k = k/n`, `d_k = (n-k)/n` for `k = 1..n`.
    pub fn linear(n: usize) -> Result<Self, SumError> {
        if n == 0 {
            return Err(SumError::EmptyTuple);
        }
        let nf = n as f64;
        let c: Vec<f64> = (1..=n).map(|k| k as f64 / nf).collect();
        let d: Vec<f64> = (1..=n).map(|k| (n - k) as f64 / nf).collect();
        Self::new(vec![c, d])
    }

    /// The `sin^2 k`, `cos^2 k` pair for `k = 1..n` (radians).
    pub fn trig(n: usize) -> Result<Self, SumError> {
        if n == 0 {
            return Err(SumError::EmptyTuple);
        }
        let c: Vec<f64> = (1..=n).map(|k| (k as f64).sin().powi(2)).collect();
        let d: Vec<f64> = (1..=n).map(|k| (k as f64).cos().powi(2)).collect();
        Self::new(vec![c, d])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn tuple_len(&self) -> usize {
        self.rows[0].len()
    }
}

/// Per-row refined terms and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedSumBound {
    pub terms: Vec<f64>,
    pub total: f64,
}

/// Outcome of one discrete chain verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumChainReport {
    pub lhs: f64,
    pub refined_terms: Vec<f64>,
    pub refined_total: f64,
    pub classical: f64,
    pub gap_refined: f64,
    pub gap_lhs: f64,
    pub chain_ok: bool,
    pub tolerance: f64,
}

fn check_lengths(a: &PositiveTuple, b: &PositiveTuple) -> Result<(), SumError> {
    if a.len() != b.len() {
        return Err(SumError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// `Σ a_k b_k`, compensated.
pub fn sum_lhs(a: &PositiveTuple, b: &PositiveTuple) -> Result<f64, SumError> {
    check_lengths(a, b)?;
    let mut acc = KahanSum::new();
    for (&x, &y) in a.values().iter().zip(b.values()) {
        acc.add(x * y);
    }
    Ok(acc.total())
}

fn weighted_power_sum(weights: Option<&[f64]>, tuple: &PositiveTuple, power: f64) -> f64 {
    let mut acc = KahanSum::new();
    for (k, &v) in tuple.values().iter().enumerate() {
        let term = v.powf(power);
        acc.add(match weights {
            Some(w) => w[k] * term,
            None => term,
        });
    }
    acc.total()
}

/// Classical bound `(Σ a_k^p)^(1/p) (Σ b_k^q)^(1/q)`.
pub fn classical_sum_bound(
    a: &PositiveTuple,
    b: &PositiveTuple,
    exps: &ConjugateExponents,
) -> Result<f64, SumError> {
    check_lengths(a, b)?;
    let ap = weighted_power_sum(None, a, exps.p());
    let bq = weighted_power_sum(None, b, exps.q());
    Ok(ap.powf(1.0 / exps.p()) * bq.powf(1.0 / exps.q()))
}

/// Refined bound for an arbitrary discrete partition.
pub fn refined_sum_weighted(
    a: &PositiveTuple,
    b: &PositiveTuple,
    exps: &ConjugateExponents,
    partition: &DiscreteWeightPartition,
) -> Result<RefinedSumBound, SumError> {
    check_lengths(a, b)?;
    if partition.tuple_len() != a.len() {
        return Err(SumError::LengthMismatch {
            left: partition.tuple_len(),
            right: a.len(),
        });
    }
    let mut terms = Vec::with_capacity(partition.row_count());
    let mut total = KahanSum::new();
    for row in partition.rows() {
        let ap = weighted_power_sum(Some(row), a, exps.p());
        let bq = weighted_power_sum(Some(row), b, exps.q());
        let term = ap.powf(1.0 / exps.p()) * bq.powf(1.0 / exps.q());
        terms.push(term);
        total.add(term);
    }
    Ok(RefinedSumBound {
        terms,
        total: total.total(),
    })
}

/// The index-linear refined bound, i.e. [`refined_sum_weighted`] under the
/// rows `c_k = k/n`, `d_k = (n-k)/n`.
pub fn refined_sum_linear(
    a: &PositiveTuple,
    b: &PositiveTuple,
    exps: &ConjugateExponents,
) -> Result<RefinedSumBound, SumError> {
    check_lengths(a, b)?;
    let partition = DiscreteWeightPartition::linear(a.len())?;
    refined_sum_weighted(a, b, exps, &partition)
}

/// Computes the discrete chain and checks the ordering within `report_tol`.
pub fn verify_sum_chain(
    a: &PositiveTuple,
    b: &PositiveTuple,
    exps: &ConjugateExponents,
    partition: &DiscreteWeightPartition,
    report_tol: f64,
) -> Result<SumChainReport, SumError> {
    verify_sum_chain_with(a, b, exps, partition, &ReportTol::fixed(report_tol))
}

/// [`verify_sum_chain`] with the tolerance resolved from a policy once the
/// classical bound is known.
pub fn verify_sum_chain_with(
    a: &PositiveTuple,
    b: &PositiveTuple,
    exps: &ConjugateExponents,
    partition: &DiscreteWeightPartition,
    policy: &ReportTol,
) -> Result<SumChainReport, SumError> {
    let lhs = sum_lhs(a, b)?;
    let classical = classical_sum_bound(a, b, exps)?;
    let refined = refined_sum_weighted(a, b, exps, partition)?;
    let tolerance = policy.resolve(classical);
    Ok(SumChainReport {
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

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tuple(values: &[f64]) -> PositiveTuple {
        PositiveTuple::new(values.to_vec()).unwrap()
    }

    fn p2() -> ConjugateExponents {
        ConjugateExponents::new(2.0, 2.0).unwrap()
    }

    #[test]
    fn positive_tuple_rejects_bad_entries() {
        assert!(matches!(
            PositiveTuple::new(vec![]),
            Err(SumError::EmptyTuple)
        ));
        assert!(matches!(
            PositiveTuple::new(vec![1.0, 0.0]),
            Err(SumError::NonPositiveEntry { index: 1, .. })
        ));
        assert!(matches!(
            PositiveTuple::new(vec![-1.0]),
            Err(SumError::NonPositiveEntry { index: 0, .. })
        ));
        assert!(PositiveTuple::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn sum_lhs_examples() {
        assert_eq!(
            sum_lhs(&tuple(&[1.0, 1.0]), &tuple(&[1.0, 1.0])).unwrap(),
            2.0
        );
        assert_eq!(
            sum_lhs(&tuple(&[1.0, 2.0, 3.0]), &tuple(&[3.0, 2.0, 1.0])).unwrap(),
            10.0
        );
        assert_eq!(
            sum_lhs(&tuple(&[0.5, 1.5]), &tuple(&[2.0, 4.0])).unwrap(),
            7.0
        );
        assert!(matches!(
            sum_lhs(&tuple(&[1.0]), &tuple(&[1.0, 2.0])),
            Err(SumError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn classical_sum_examples() {
        // Proportional tuples are the equality case.
        let v = classical_sum_bound(&tuple(&[1.0, 1.0]), &tuple(&[1.0, 1.0]), &p2()).unwrap();
        assert!((v - 2.0).abs() <= 1e-15);
        // Oracle: sqrt(5) * sqrt(2).
        let v = classical_sum_bound(&tuple(&[1.0, 2.0]), &tuple(&[1.0, 1.0]), &p2()).unwrap();
        assert!((v - 5.0f64.sqrt() * 2.0f64.sqrt()).abs() <= 1e-14);
        // n = 1 is always the equality case.
        assert_eq!(
            classical_sum_bound(&tuple(&[3.0]), &tuple(&[4.0]), &p2()).unwrap(),
            12.0
        );
    }

    #[test]
    fn degenerate_partition_is_exact() {
        let a = tuple(&[0.3, 2.0, 11.0]);
        let b = tuple(&[5.0, 0.25, 2.0]);
        let rows = DiscreteWeightPartition::new(vec![vec![1.0; 3], vec![0.0; 3]]).unwrap();
        let refined = refined_sum_weighted(&a, &b, &p2(), &rows).unwrap();
        let classical = classical_sum_bound(&a, &b, &p2()).unwrap();
        assert_eq!(refined.total, classical);
        assert_eq!(refined.terms[1], 0.0);
    }

    #[test]
    fn two_point_linear_rows() {
        // Linear rows for n = 2 are ((1/2, 1), (1/2, 0)); for a = b = (1, 1)
        // the terms are 3/2 and 1/2.
        let a = tuple(&[1.0, 1.0]);
        let refined = refined_sum_linear(&a, &a, &p2()).unwrap();
        assert!((refined.terms[0] - 1.5).abs() <= 1e-15);
        assert!((refined.terms[1] - 0.5).abs() <= 1e-15);
        assert!((refined.total - 2.0).abs() <= 1e-15);
    }

    #[test]
    fn linear_refinement_matches_scalar_oracle() {
        // a = (1,2), b = (2,1), p = q = 2: lhs = 4, classical = 5, and the
        // refined terms are sqrt(4.5)*sqrt(3) = sqrt(13.5) and
        // sqrt(0.5)*sqrt(2) = 1, so the total is (sqrt(54) + 2) / 2.
        let a = tuple(&[1.0, 2.0]);
        let b = tuple(&[2.0, 1.0]);
        let refined = refined_sum_linear(&a, &b, &p2()).unwrap();
        let oracle = (54.0f64.sqrt() + 2.0) / 2.0;
        assert!((refined.terms[0] - 13.5f64.sqrt()).abs() <= 1e-14);
        assert!((refined.terms[1] - 1.0).abs() <= 1e-14);
        assert!((refined.total - oracle).abs() <= 1e-14);

        let lhs = sum_lhs(&a, &b).unwrap();
        let classical = classical_sum_bound(&a, &b, &p2()).unwrap();
        assert_eq!(lhs, 4.0);
        assert!((classical - 5.0).abs() <= 1e-14);
        assert!(lhs < refined.total && refined.total < classical);
    }

    #[test]
    fn trig_partition_chain_holds() {
        let a = tuple(&[2.0, 0.5, 3.0, 1.0, 4.0]);
        let b = tuple(&[1.0, 1.5, 0.25, 2.0, 0.75]);
        let partition = DiscreteWeightPartition::trig(5).unwrap();
        let report = verify_sum_chain_with(
            &a,
            &b,
            &ConjugateExponents::from_p(3.0).unwrap(),
            &partition,
            &ReportTol::scaled(1e-9),
        )
        .unwrap();
        assert!(report.chain_ok, "report: {report:?}");
    }

    #[test]
    fn verify_chain_worked_example() {
        let a = tuple(&[1.0, 2.0]);
        let b = tuple(&[2.0, 1.0]);
        let partition = DiscreteWeightPartition::linear(2).unwrap();
        let report = verify_sum_chain(&a, &b, &p2(), &partition, 1e-9).unwrap();
        assert!(report.chain_ok);
        assert_eq!(report.lhs, 4.0);
        assert!((report.refined_total - (54.0f64.sqrt() + 2.0) / 2.0).abs() <= 1e-14);
        assert!((report.classical - 5.0).abs() <= 1e-14);
    }

    #[test]
    fn proportional_tuples_force_equality() {
        // b_k = (a_k^p)^(1/q) with p = q = 2 gives b = a: classical equals
        // lhs and the refinement is squeezed to the same value.
        let a = tuple(&[1.0, 2.0]);
        let b = tuple(&[1.0, 2.0]);
        let partition = DiscreteWeightPartition::linear(2).unwrap();
        let report = verify_sum_chain(&a, &b, &p2(), &partition, 1e-12).unwrap();
        assert!(report.chain_ok);
        assert!((report.lhs - 5.0).abs() <= 1e-14);
        assert!((report.refined_total - 5.0).abs() <= 1e-13);
        assert!((report.classical - 5.0).abs() <= 1e-14);
    }

    #[test]
    fn single_entry_collapses() {
        let a = tuple(&[1.0]);
        let partition = DiscreteWeightPartition::new(vec![vec![0.25], vec![0.75]]).unwrap();
        for p in [1.5, 2.0, 7.0] {
            let exps = ConjugateExponents::from_p(p).unwrap();
            let report = verify_sum_chain(&a, &a, &exps, &partition, 1e-12).unwrap();
            assert!((report.lhs - 1.0).abs() <= 1e-13);
            assert!((report.refined_total - 1.0).abs() <= 1e-13);
            assert!((report.classical - 1.0).abs() <= 1e-13);
            assert!(report.chain_ok);
        }
    }

    #[test]
    fn partition_validation_errors() {
        assert!(matches!(
            DiscreteWeightPartition::new(vec![vec![1.0]]),
            Err(SumError::TooFewRows { m: 1 })
        ));
        assert!(matches!(
            DiscreteWeightPartition::new(vec![vec![0.5, 0.5], vec![0.5]]),
            Err(SumError::RaggedRow { row: 1, .. })
        ));
        assert!(matches!(
            DiscreteWeightPartition::new(vec![vec![-0.1], vec![1.1]]),
            Err(SumError::NegativeEntry {
                row: 0,
                index: 0,
                ..
            })
        ));
        assert!(matches!(
            DiscreteWeightPartition::new(vec![vec![0.5], vec![0.4]]),
            Err(SumError::ColumnSumNotOne { index: 0, .. })
        ));
    }

    fn arb_tuple(max_len: usize) -> impl Strategy<Value = PositiveTuple> {
        proptest::collection::vec(-3.0..3.0f64, 1..=max_len).prop_map(|exponents| {
            PositiveTuple::new(exponents.into_iter().map(|e| 10f64.powf(e)).collect()).unwrap()
        })
    }

    fn normalized_partition(m: usize, n: usize, raw: &[f64]) -> DiscreteWeightPartition {
        let mut rows = vec![vec![0.0; n]; m];
        for k in 0..n {
            let col: Vec<f64> = (0..m).map(|i| raw[i * n + k]).collect();
            let total: f64 = col.iter().sum();
            for i in 0..m {
                rows[i][k] = col[i] / total;
            }
        }
        DiscreteWeightPartition::new(rows).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // lhs <= refined <= classical for random tuples and partitions.
        #[test]
        fn chain_ordering_holds(
            exponents in proptest::collection::vec(-3.0..3.0f64, 1..200),
            shifts in proptest::collection::vec(-3.0..3.0f64, 1..200),
            raw in proptest::collection::vec(0.01..1.0f64, 8 * 200),
            m in 2..=8usize,
            p in 1.1..10.0f64,
        ) {
            let n = exponents.len().min(shifts.len());
            let a = PositiveTuple::new(exponents[..n].iter().map(|e| 10f64.powf(*e)).collect()).unwrap();
            let b = PositiveTuple::new(shifts[..n].iter().map(|e| 10f64.powf(*e)).collect()).unwrap();
            let partition = normalized_partition(m, n, &raw);
            let exps = ConjugateExponents::from_p(p).unwrap();
            let report = verify_sum_chain_with(&a, &b, &exps, &partition, &ReportTol::scaled(1e-9)).unwrap();
            prop_assert!(report.chain_ok, "report: {:?}", report);
        }

        // Homogeneity in a and in b separately.
        #[test]
        fn scaling_is_exact(a in arb_tuple(50), b_seed in arb_tuple(50), c in 0.001..1000.0f64) {
            let n = a.len().min(b_seed.len());
            let a = PositiveTuple::new(a.values()[..n].to_vec()).unwrap();
            let b = PositiveTuple::new(b_seed.values()[..n].to_vec()).unwrap();
            let scaled_a = PositiveTuple::new(a.values().iter().map(|v| c * v).collect()).unwrap();
            let exps = ConjugateExponents::from_p(3.0).unwrap();

            let base = refined_sum_linear(&a, &b, &exps).unwrap();
            let scaled = refined_sum_linear(&scaled_a, &b, &exps).unwrap();
            prop_assert!((scaled.total - c * base.total).abs() <= 1e-12 * (c * base.total));

            let base_classical = classical_sum_bound(&a, &b, &exps).unwrap();
            let scaled_classical = classical_sum_bound(&scaled_a, &b, &exps).unwrap();
            prop_assert!((scaled_classical - c * base_classical).abs() <= 1e-12 * (c * base_classical));

            let scaled_b = PositiveTuple::new(b.values().iter().map(|v| c * v).collect()).unwrap();
            let scaled_via_b = refined_sum_linear(&a, &scaled_b, &exps).unwrap();
            prop_assert!((scaled_via_b.total - c * base.total).abs() <= 1e-12 * (c * base.total));
        }

        // Permuting indices of a, b, and all partition rows together leaves
        // every output unchanged.
        #[test]
        fn permutation_covariance(
            a in arb_tuple(64),
            b_seed in arb_tuple(64),
            raw in proptest::collection::vec(0.01..1.0f64, 3 * 64),
            seed in 0u64..1000,
        ) {
            let n = a.len().min(b_seed.len());
            let a = PositiveTuple::new(a.values()[..n].to_vec()).unwrap();
            let b = PositiveTuple::new(b_seed.values()[..n].to_vec()).unwrap();
            let partition = normalized_partition(3, n, &raw);

            // Deterministic Fisher-Yates driven by the seed.
            let mut perm: Vec<usize> = (0..n).collect();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                perm.swap(i, j);
            }

            let permute = |v: &[f64]| -> Vec<f64> { perm.iter().map(|&i| v[i]).collect() };
            let pa = PositiveTuple::new(permute(a.values())).unwrap();
            let pb = PositiveTuple::new(permute(b.values())).unwrap();
            let prows = DiscreteWeightPartition::new(
                partition.rows().iter().map(|r| permute(r)).collect()
            ).unwrap();

            let exps = ConjugateExponents::from_p(2.5).unwrap();
            let original = verify_sum_chain(&a, &b, &exps, &partition, 1e-9).unwrap();
            let permuted = verify_sum_chain(&pa, &pb, &exps, &prows, 1e-9).unwrap();
            let rel = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
            prop_assert!(rel(original.lhs, permuted.lhs));
            prop_assert!(rel(original.refined_total, permuted.refined_total));
            prop_assert!(rel(original.classical, permuted.classical));
        }

        // n = 1: all three chain values coincide for any exponents.
        #[test]
        fn single_entry_equality(x in 0.001..1000.0f64, y in 0.001..1000.0f64, p in 1.1..10.0f64) {
            let a = PositiveTuple::new(vec![x]).unwrap();
            let b = PositiveTuple::new(vec![y]).unwrap();
            let exps = ConjugateExponents::from_p(p).unwrap();
            let partition = DiscreteWeightPartition::linear(1).unwrap();
            let report = verify_sum_chain(&a, &b, &exps, &partition, 1e-9 * x * y).unwrap();
            prop_assert!(report.chain_ok);
            prop_assert!((report.refined_total - report.lhs).abs() <= 1e-12 * report.lhs);
            prop_assert!((report.classical - report.lhs).abs() <= 1e-12 * report.lhs);
        }
    }
}
